//! Mesh generators for the canonical bodies.
//!
//! Panel counts, with `n` = [`MeshResolution::divisions`], `r` = refinement
//! factor on a designated face (1 otherwise) and `d(len, r) = max(1, ⌈n·r·len/c⌉)`
//! divisions along an edge of length `len` measured against the
//! characteristic length `c`:
//!
//! * box, `c = min(lx, ly)`: `N = Σ_{base,top} d(lx,r)·d(ly,r) + 2·d(lx,1)·d(h,1) + 2·d(ly,1)·d(h,1)`.
//! * circular cylinder, `c = diameter`: each cap is a cubed disk with
//!   `m = max(1, ⌈n·r/2⌉)` cells along the inner square side and
//!   `k = max(1, ⌈n·r/4⌉)` radial cells per outer sector, i.e. `m² + 4mk`
//!   panels; the wall has `4·m₀ × d(h,1)` panels with `m₀` the unrefined `m`.
//! * sphere: cubed sphere with `n × n` equiangular cells per cube face,
//!   `N = 6n²`.
//!
//! Panel ordering is fixed and documented on each generator so mesh files
//! are reproducible byte for byte.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::{Panel, Point3, SurfaceMesh, UnitVec3};
use crate::error::{Error, Result};

/// Faces of a cylinder that can carry extra refinement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FaceSet {
    pub base: bool,
    pub top: bool,
}

impl FaceSet {
    pub const NONE: FaceSet = FaceSet {
        base: false,
        top: false,
    };
    pub const BASE: FaceSet = FaceSet {
        base: true,
        top: false,
    };
    pub const TOP: FaceSet = FaceSet {
        base: false,
        top: true,
    };
    pub const BOTH: FaceSet = FaceSet {
        base: true,
        top: true,
    };

    pub fn describe(&self) -> &'static str {
        match (self.base, self.top) {
            (false, false) => "none",
            (true, false) => "base",
            (false, true) => "top",
            (true, true) => "base+top",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshResolution {
    divisions: usize,
    refinement: f64,
    refined: FaceSet,
}

impl MeshResolution {
    pub fn new(divisions: usize) -> Result<Self> {
        if divisions < 2 {
            return Err(Error::InvalidGeometry(format!(
                "mesh resolution needs at least 2 divisions per edge, got {divisions}"
            )));
        }
        Ok(Self {
            divisions,
            refinement: 1.0,
            refined: FaceSet::NONE,
        })
    }

    /// Multiplies the division count on `faces` by `factor`.
    pub fn with_refinement(mut self, factor: f64, faces: FaceSet) -> Result<Self> {
        if !(factor.is_finite() && factor >= 1.0) {
            return Err(Error::InvalidGeometry(format!(
                "refinement factor must be >= 1, got {factor}"
            )));
        }
        self.refinement = factor;
        self.refined = faces;
        Ok(self)
    }

    pub fn divisions(&self) -> usize {
        self.divisions
    }

    pub fn refinement(&self) -> f64 {
        self.refinement
    }

    pub fn refined_faces(&self) -> FaceSet {
        self.refined
    }

    fn base_factor(&self) -> f64 {
        if self.refined.base {
            self.refinement
        } else {
            1.0
        }
    }

    fn top_factor(&self) -> f64 {
        if self.refined.top {
            self.refinement
        } else {
            1.0
        }
    }

    /// Divisions along an edge of length `len` relative to `characteristic`.
    pub fn edge_divisions(&self, len: f64, characteristic: f64, factor: f64) -> usize {
        let raw = self.divisions as f64 * factor * len / characteristic;
        ((raw - 1e-9).ceil() as usize).max(1)
    }

    fn describe(&self) -> String {
        format!(
            "divisions={} refinement={} refined={}",
            self.divisions,
            self.refinement,
            self.refined.describe()
        )
    }
}

fn check_dimension(name: &str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "{name} must be positive and finite, got {value}"
        )));
    }
    Ok(())
}

/// Cell-centre coordinate `len·((2i+1)/(2n) − 1/2)`, exactly antisymmetric
/// under `i → n−1−i`.
fn cell_centre(len: f64, i: usize, n: usize) -> f64 {
    len * ((2 * i + 1) as f64 - n as f64) / (2 * n) as f64
}

/// Box with cross section `lx × ly`, base at `z = 0`, top at `z = h`,
/// centred on the `z` axis.
///
/// Panel order: base (−z), top (+z), y = −ly/2, y = +ly/2, x = −lx/2,
/// x = +lx/2. Each face is traversed with its first in-plane axis outermost
/// (x before y, x/y before z).
pub fn make_box_cylinder(lx: f64, ly: f64, h: f64, res: MeshResolution) -> Result<SurfaceMesh> {
    check_dimension("lx", lx)?;
    check_dimension("ly", ly)?;
    check_dimension("h", h)?;
    let c = lx.min(ly);
    let mut panels = Vec::new();

    let cap = |z: f64, normal: UnitVec3, factor: f64, panels: &mut Vec<Panel>| {
        let nx = res.edge_divisions(lx, c, factor);
        let ny = res.edge_divisions(ly, c, factor);
        let area = (lx / nx as f64) * (ly / ny as f64);
        for i in 0..nx {
            for j in 0..ny {
                let centroid = Point3::new(cell_centre(lx, i, nx), cell_centre(ly, j, ny), z);
                panels.push(Panel {
                    centroid,
                    normal,
                    area,
                });
            }
        }
    };
    cap(0.0, UnitVec3::Z.negate(), res.base_factor(), &mut panels);
    cap(h, UnitVec3::Z, res.top_factor(), &mut panels);

    let nx = res.edge_divisions(lx, c, 1.0);
    let ny = res.edge_divisions(ly, c, 1.0);
    let nz = res.edge_divisions(h, c, 1.0);
    let z_at = |l: usize| h * (2 * l + 1) as f64 / (2 * nz) as f64;

    for (y, normal) in [(-0.5 * ly, UnitVec3::Y.negate()), (0.5 * ly, UnitVec3::Y)] {
        let area = (lx / nx as f64) * (h / nz as f64);
        for i in 0..nx {
            for l in 0..nz {
                panels.push(Panel {
                    centroid: Point3::new(cell_centre(lx, i, nx), y, z_at(l)),
                    normal,
                    area,
                });
            }
        }
    }
    for (x, normal) in [(-0.5 * lx, UnitVec3::X.negate()), (0.5 * lx, UnitVec3::X)] {
        let area = (ly / ny as f64) * (h / nz as f64);
        for j in 0..ny {
            for l in 0..nz {
                panels.push(Panel {
                    centroid: Point3::new(x, cell_centre(ly, j, ny), z_at(l)),
                    normal,
                    area,
                });
            }
        }
    }

    SurfaceMesh::new(
        panels,
        "box",
        format!("box lx_nm={lx} ly_nm={ly} h_nm={h} {}", res.describe()),
    )
}

/// Rotates `(x, y)` by `q · π/2` exactly.
fn quarter_turn(q: usize, x: f64, y: f64) -> (f64, f64) {
    match q % 4 {
        0 => (x, y),
        1 => (-y, x),
        2 => (-x, -y),
        _ => (y, -x),
    }
}

/// Area and centroid of a simple polygon (shoelace).
fn polygon_area_centroid(pts: &[(f64, f64)]) -> (f64, (f64, f64)) {
    let mut a2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..pts.len() {
        let (x0, y0) = pts[i];
        let (x1, y1) = pts[(i + 1) % pts.len()];
        let cr = x0 * y1 - x1 * y0;
        a2 += cr;
        cx += (x0 + x1) * cr;
        cy += (y0 + y1) * cr;
    }
    let area = 0.5 * a2;
    (area.abs(), (cx / (3.0 * a2), cy / (3.0 * a2)))
}

/// Cubed-disk cells of radius `radius`: `(centroid_xy, area)`.
///
/// Inner square of half-width `radius/2` with `m × m` cells (row-major), then
/// four outer sectors centred on angles 0, π/2, π, 3π/2, each with `m`
/// angular × `k` radial cells (angle outermost). Outer-row cells include the
/// circular segment beyond their chord, so the areas sum to `π·radius²`.
fn cubed_disk(radius: f64, m: usize, k: usize) -> Vec<((f64, f64), f64)> {
    let s = 0.5 * radius;
    let mut cells = Vec::with_capacity(m * m + 4 * m * k);
    let side = 2.0 * s / m as f64;
    for i in 0..m {
        for j in 0..m {
            cells.push((
                (cell_centre(2.0 * s, i, m), cell_centre(2.0 * s, j, m)),
                side * side,
            ));
        }
    }
    let corner = |u: f64, v: f64| -> (f64, f64) {
        let phi = u * FRAC_PI_4;
        let (ox, oy) = (radius * phi.cos(), radius * phi.sin());
        ((1.0 - v) * s + v * ox, (1.0 - v) * s * u + v * oy)
    };
    for q in 0..4 {
        for a in 0..m {
            let u0 = -1.0 + 2.0 * a as f64 / m as f64;
            let u1 = -1.0 + 2.0 * (a + 1) as f64 / m as f64;
            for b in 0..k {
                let v0 = b as f64 / k as f64;
                let v1 = (b + 1) as f64 / k as f64;
                let poly = [corner(u0, v0), corner(u1, v0), corner(u1, v1), corner(u0, v1)];
                let (mut area, (mut cx, mut cy)) = polygon_area_centroid(&poly);
                if b + 1 == k {
                    let dphi = (u1 - u0) * FRAC_PI_4;
                    let seg_area = 0.5 * radius * radius * (dphi - dphi.sin());
                    let seg_dist =
                        4.0 * radius * (0.5 * dphi).sin().powi(3) / (3.0 * (dphi - dphi.sin()));
                    let mid = 0.5 * (u0 + u1) * FRAC_PI_4;
                    let (sx, sy) = (seg_dist * mid.cos(), seg_dist * mid.sin());
                    let total = area + seg_area;
                    cx = (area * cx + seg_area * sx) / total;
                    cy = (area * cy + seg_area * sy) / total;
                    area = total;
                }
                let (rx, ry) = quarter_turn(q, cx, cy);
                cells.push(((rx, ry), area));
            }
        }
    }
    cells
}

/// Finite circular cylinder of the given diameter, base at `z = 0`, top at
/// `z = h`.
///
/// Panel order: base cap (−z), top cap (+z), then the lateral wall with the
/// angle outermost (starting at −π/4) and height innermost. Wall panels sit
/// on the exact radius with exact areas `R·Δθ·Δz`.
pub fn make_circular_cylinder(diameter: f64, h: f64, res: MeshResolution) -> Result<SurfaceMesh> {
    check_dimension("diameter", diameter)?;
    check_dimension("h", h)?;
    let radius = 0.5 * diameter;
    let n = res.divisions as f64;
    let cap_counts = |factor: f64| {
        let m = ((n * factor / 2.0 - 1e-9).ceil() as usize).max(1);
        let k = ((n * factor / 4.0 - 1e-9).ceil() as usize).max(1);
        (m, k)
    };
    let mut panels = Vec::new();
    for (z, normal, factor) in [
        (0.0, UnitVec3::Z.negate(), res.base_factor()),
        (h, UnitVec3::Z, res.top_factor()),
    ] {
        let (m, k) = cap_counts(factor);
        for ((x, y), area) in cubed_disk(radius, m, k) {
            panels.push(Panel {
                centroid: Point3::new(x, y, z),
                normal,
                area,
            });
        }
    }
    let (m0, _) = cap_counts(1.0);
    let n_theta = 4 * m0;
    let nz = res.edge_divisions(h, diameter, 1.0);
    let dtheta = 2.0 * PI / n_theta as f64;
    let area = radius * dtheta * h / nz as f64;
    for c in 0..n_theta {
        let theta = -FRAC_PI_4 + (c as f64 + 0.5) * dtheta;
        let (sin, cos) = theta.sin_cos();
        let normal = UnitVec3::from_unit_unchecked(Point3::new(cos, sin, 0.0));
        for l in 0..nz {
            let z = h * (2 * l + 1) as f64 / (2 * nz) as f64;
            panels.push(Panel {
                centroid: Point3::new(radius * cos, radius * sin, z),
                normal,
                area,
            });
        }
    }
    SurfaceMesh::new(
        panels,
        "circular",
        format!(
            "circular_cylinder diameter_nm={diameter} h_nm={h} {}",
            res.describe()
        ),
    )
}

/// Equiangular cubed sphere centred on the origin.
///
/// Panel order: cube faces +x, −x, +y, −y, +z, −z, each with its first
/// angle outermost. Centroids are the projected cell centres (exactly on the
/// sphere); areas are the exact spherical cell areas. Face refinement does
/// not apply to spheres.
pub fn make_sphere(radius: f64, res: MeshResolution) -> Result<SurfaceMesh> {
    check_dimension("radius", radius)?;
    let n = res.divisions;
    let edge: Vec<f64> = (0..=n)
        .map(|i| (-FRAC_PI_4 + FRAC_PI_2 * i as f64 / n as f64).tan())
        .collect();
    let mid: Vec<f64> = (0..n)
        .map(|i| (FRAC_PI_2 * ((2 * i + 1) as f64 - n as f64) / (2 * n) as f64).tan())
        .collect();
    // Area of the gnomonic rectangle [0,x] × [0,y] on the unit sphere.
    let patch = |x: f64, y: f64| (x * y / (1.0 + x * x + y * y).sqrt()).atan();
    let faces: [fn(f64, f64) -> Point3; 6] = [
        |a, b| Point3::new(1.0, a, b),
        |a, b| Point3::new(-1.0, -a, b),
        |a, b| Point3::new(-a, 1.0, b),
        |a, b| Point3::new(a, -1.0, b),
        |a, b| Point3::new(a, b, 1.0),
        |a, b| Point3::new(a, -b, -1.0),
    ];
    let mut panels = Vec::with_capacity(6 * n * n);
    for face in faces {
        for i in 0..n {
            for j in 0..n {
                let dir = UnitVec3::normalize(face(mid[i], mid[j]))?;
                let area = radius
                    * radius
                    * (patch(edge[i + 1], edge[j + 1]) - patch(edge[i], edge[j + 1])
                        - patch(edge[i + 1], edge[j])
                        + patch(edge[i], edge[j]));
                panels.push(Panel {
                    centroid: dir.get() * radius,
                    normal: dir,
                    area,
                });
            }
        }
    }
    SurfaceMesh::new(
        panels,
        "sphere",
        format!("sphere radius_nm={radius} {}", res.describe()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn res(n: usize) -> MeshResolution {
        MeshResolution::new(n).unwrap()
    }

    #[test]
    fn resolution_rejects_too_few_divisions() {
        assert!(MeshResolution::new(1).is_err());
        assert!(res(2).with_refinement(0.5, FaceSet::BASE).is_err());
    }

    #[test]
    fn unit_cube_has_24_panels_and_area_6() {
        let mesh = make_box_cylinder(1.0, 1.0, 1.0, res(2)).unwrap();
        assert_eq!(mesh.len(), 24);
        assert!((mesh.total_area() - 6.0).abs() < 1e-14);
        assert!(mesh.closure_vector().norm() < 1e-15);
    }

    #[test]
    fn rectangular_box_area() {
        let mesh = make_box_cylinder(1.0, 2.0, 0.8, res(4)).unwrap();
        assert!((mesh.total_area() - 8.8).abs() < 1e-12);
        mesh.check_closed().unwrap();
    }

    #[test]
    fn box_panel_count_formula() {
        let r = res(4).with_refinement(2.0, FaceSet::BASE).unwrap();
        let mesh = make_box_cylinder(1.0, 2.0, 1.5, r).unwrap();
        // base 8x16, top 4x8, y-walls 4x6, x-walls 8x6
        assert_eq!(mesh.len(), 8 * 16 + 4 * 8 + 2 * 4 * 6 + 2 * 8 * 6);
        mesh.check_closed().unwrap();
    }

    #[test]
    fn box_rejects_non_positive_dimensions() {
        assert!(make_box_cylinder(0.0, 1.0, 1.0, res(2)).is_err());
        assert!(make_box_cylinder(1.0, -1.0, 1.0, res(2)).is_err());
        assert!(make_box_cylinder(1.0, 1.0, f64::NAN, res(2)).is_err());
    }

    #[test]
    fn box_base_sits_at_zero() {
        let mesh = make_box_cylinder(1.0, 1.0, 2.0, res(3)).unwrap();
        let (lo, hi) = mesh.z_range();
        assert_eq!(lo, 0.0);
        assert_eq!(hi, 2.0);
    }

    #[test]
    fn cubed_disk_covers_the_disk() {
        for (m, k) in [(1, 1), (3, 2), (8, 4)] {
            let cells = cubed_disk(1.5, m, k);
            assert_eq!(cells.len(), m * m + 4 * m * k);
            let area: f64 = cells.iter().map(|c| c.1).sum();
            assert!((area - PI * 2.25).abs() < 1e-12, "{m} {k} {area}");
            assert!(cells.iter().all(|c| c.1 > 0.0));
        }
    }

    #[test]
    fn circular_cylinder_area_and_closure() {
        let mesh = make_circular_cylinder(2.0, 1.0, res(12)).unwrap();
        let exact = 4.0 * PI;
        assert!((mesh.total_area() - exact).abs() / exact < 1e-12);
        mesh.check_closed().unwrap();
    }

    #[test]
    fn circular_cylinder_panel_count_formula() {
        let r = res(10).with_refinement(2.0, FaceSet::TOP).unwrap();
        let mesh = make_circular_cylinder(2.0, 3.0, r).unwrap();
        // base m=5,k=3; top m=10,k=5; wall 20 x 15
        assert_eq!(mesh.len(), (25 + 60) + (100 + 200) + 20 * 15);
    }

    #[test]
    fn sphere_area_closure_and_symmetry() {
        let mesh = make_sphere(1.0, res(10)).unwrap();
        assert_eq!(mesh.len(), 600);
        assert!((mesh.total_area() - 4.0 * PI).abs() < 1e-12);
        mesh.check_closed().unwrap();
        assert!(mesh.centroid_mean().norm() < 1e-9);
        for p in mesh.panels() {
            assert!((p.centroid.norm() - 1.0).abs() < 1e-14);
            assert!((p.normal.get().dot(p.centroid) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn normals_point_outward() {
        let meshes = [
            make_box_cylinder(1.0, 2.0, 0.7, res(3)).unwrap(),
            make_circular_cylinder(1.0, 0.7, res(6)).unwrap(),
        ];
        for mesh in meshes {
            let (lo, hi) = mesh.z_range();
            let centre = Point3::new(0.0, 0.0, 0.5 * (lo + hi));
            for p in mesh.panels() {
                assert!(p.normal.get().dot(p.centroid - centre) > 0.0);
            }
        }
    }
}
