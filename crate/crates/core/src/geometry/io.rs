//! Plain-text mesh files.
//!
//! ```text
//! # vdw-bem surface mesh
//! # label=<body label>
//! # generator=<generator parameters>
//! # panels=<N>
//! # columns: cx cy cz nx ny nz area (nm, 1, nm^2)
//! cx cy cz nx ny nz area
//! ...
//! ```
//!
//! Values are written in shortest round-trip exponent form, so reading a
//! file back reproduces the mesh exactly.

use std::io::{BufRead, Write};

use super::{Panel, Point3, SurfaceMesh, UnitVec3};
use crate::error::{Error, Result};

pub fn write_mesh<W: Write>(mesh: &SurfaceMesh, mut out: W) -> Result<()> {
    writeln!(out, "# vdw-bem surface mesh")?;
    writeln!(out, "# label={}", mesh.label())?;
    writeln!(out, "# generator={}", mesh.description())?;
    writeln!(out, "# panels={}", mesh.len())?;
    writeln!(out, "# columns: cx cy cz nx ny nz area (nm, 1, nm^2)")?;
    for p in mesh.panels() {
        let c = p.centroid;
        let n = p.normal.get();
        writeln!(
            out,
            "{:e} {:e} {:e} {:e} {:e} {:e} {:e}",
            c.x, c.y, c.z, n.x, n.y, n.z, p.area
        )?;
    }
    Ok(())
}

pub fn read_mesh<R: BufRead>(input: R) -> Result<SurfaceMesh> {
    let mut label = String::from("mesh");
    let mut description = String::new();
    let mut panels = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("label=") {
                label = v.to_string();
            } else if let Some(v) = comment.strip_prefix("generator=") {
                description = v.to_string();
            }
            continue;
        }
        let values = trimmed
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|e| Error::MeshParse {
                    line: lineno,
                    msg: format!("bad number '{tok}': {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != 7 {
            return Err(Error::MeshParse {
                line: lineno,
                msg: format!("expected 7 columns, found {}", values.len()),
            });
        }
        let centroid = Point3::new(values[0], values[1], values[2]);
        let normal = UnitVec3::try_from_unit(Point3::new(values[3], values[4], values[5]))
            .map_err(|e| Error::MeshParse {
                line: lineno,
                msg: e.to_string(),
            })?;
        let panel = Panel::new(centroid, normal, values[6]).map_err(|e| Error::MeshParse {
            line: lineno,
            msg: e.to_string(),
        })?;
        panels.push(panel);
    }
    SurfaceMesh::new(panels, label, description)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_circular_cylinder, MeshResolution};

    #[test]
    fn round_trip_is_exact() {
        let mesh = make_circular_cylinder(2.0, 1.3, MeshResolution::new(6).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_mesh(&mesh, &mut buf).unwrap();
        let back = read_mesh(buf.as_slice()).unwrap();
        assert_eq!(back, mesh);
        back.check_closed().unwrap();

        let mut again = Vec::new();
        write_mesh(&back, &mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn reports_line_of_bad_row() {
        let text = "# label=x\n0 0 0 0 0 1 1\n0 0 0 0 0 1\n";
        match read_mesh(text.as_bytes()) {
            Err(Error::MeshParse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let text = "0 0 0 0 0 2 1\n";
        assert!(matches!(
            read_mesh(text.as_bytes()),
            Err(Error::MeshParse { line: 1, .. })
        ));
    }
}
