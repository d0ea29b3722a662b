use super::{Panel, Point3, SurfaceMesh, UnitVec3};
use crate::error::{Error, Result};

/// Proper rigid motion `x ↦ R·x + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidMotion {
    rotation: [[f64; 3]; 3],
    translation: Point3,
}

impl RigidMotion {
    /// Validates that `rotation` is orthogonal with determinant +1 (to 1e-12).
    pub fn new(rotation: [[f64; 3]; 3], translation: Point3) -> Result<Self> {
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| rotation[i][k] * rotation[j][k]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                if (dot - expected).abs() > 1e-12 {
                    return Err(Error::InvalidMotion(format!(
                        "rotation is not orthogonal (row {i}·row {j} = {dot})"
                    )));
                }
            }
        }
        let r = &rotation;
        let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        if (det - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMotion(format!(
                "rotation has determinant {det}, expected +1"
            )));
        }
        if !(translation.x.is_finite() && translation.y.is_finite() && translation.z.is_finite())
        {
            return Err(Error::InvalidMotion("non-finite translation".into()));
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        Self {
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation: Point3::ORIGIN,
        }
    }

    pub fn translation(t: Point3) -> Self {
        Self {
            translation: t,
            ..Self::identity()
        }
    }

    /// Rotation by `angle` (rad) about the `z` axis through the origin.
    pub fn rotation_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            rotation: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
            translation: Point3::ORIGIN,
        }
    }

    /// Rotation by `angle` about `axis` through the origin (Rodrigues).
    pub fn rotation_about(axis: UnitVec3, angle: f64) -> Self {
        let Point3 { x, y, z } = axis.get();
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        Self {
            rotation: [
                [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
                [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
                [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
            ],
            translation: Point3::ORIGIN,
        }
    }

    /// `other ∘ self`: apply `self` first, then `other`.
    pub fn then(&self, other: &RigidMotion) -> RigidMotion {
        let mut rotation = [[0.0; 3]; 3];
        for (i, row) in rotation.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| other.rotation[i][k] * self.rotation[k][j]).sum();
            }
        }
        RigidMotion {
            rotation,
            translation: other.apply_point(self.translation),
        }
    }

    pub fn rotation(&self) -> [[f64; 3]; 3] {
        self.rotation
    }

    pub fn translation_part(&self) -> Point3 {
        self.translation
    }

    #[inline]
    pub fn apply_vector(&self, v: Point3) -> Point3 {
        let r = &self.rotation;
        Point3::new(
            r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z,
            r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
            r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z,
        )
    }

    #[inline]
    pub fn apply_point(&self, p: Point3) -> Point3 {
        self.apply_vector(p) + self.translation
    }
}

/// Moves every panel rigidly: centroids affinely, normals by the rotation
/// only, areas untouched.
pub fn apply_motion(mesh: &SurfaceMesh, motion: &RigidMotion) -> SurfaceMesh {
    let panels = mesh
        .panels
        .iter()
        .map(|p| Panel {
            centroid: motion.apply_point(p.centroid),
            normal: UnitVec3::from_unit_unchecked(motion.apply_vector(p.normal.get())),
            area: p.area,
        })
        .collect();
    SurfaceMesh {
        panels,
        label: mesh.label.clone(),
        description: mesh.description.clone(),
    }
}

/// Reflects a mesh through the plane `z = z0`.
///
/// The reflected outward normals remain outward for the image body. Fails if
/// the mesh has centroids on both sides of, or on, the plane.
pub fn mirror_across_plane(mesh: &SurfaceMesh, z0: f64) -> Result<SurfaceMesh> {
    let (lo, hi) = mesh.z_range();
    if lo <= z0 && z0 <= hi {
        return Err(Error::InvalidConfiguration(format!(
            "mesh '{}' spans z ∈ [{lo}, {hi}] and intersects the mirror plane z = {z0}",
            mesh.label
        )));
    }
    let panels = mesh
        .panels
        .iter()
        .map(|p| {
            let n = p.normal.get();
            Panel {
                centroid: Point3::new(p.centroid.x, p.centroid.y, 2.0 * z0 - p.centroid.z),
                normal: UnitVec3::from_unit_unchecked(Point3::new(n.x, n.y, -n.z)),
                area: p.area,
            }
        })
        .collect();
    Ok(SurfaceMesh {
        panels,
        label: format!("{}-mirror", mesh.label),
        description: format!("{} mirrored_at_z_nm={z0}", mesh.description),
    })
}
