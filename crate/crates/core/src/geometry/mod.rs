//! Closed quad-panel surface meshes.
//!
//! Every body is generated in a canonical frame (base centred on the origin,
//! symmetry axis along `z`) and positioned afterwards with a [`RigidMotion`].
//! A panel carries exactly what the collocation kernel needs: a centroid, an
//! outward unit normal and an area. Lengths are in nanometres throughout.

mod generators;
mod io;
mod motion;

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

pub use generators::{
    make_box_cylinder, make_circular_cylinder, make_sphere, FaceSet, MeshResolution,
};
pub use io::{read_mesh, write_mesh};
pub use motion::{apply_motion, mirror_across_plane, RigidMotion};

use crate::error::{Error, Result};

/// A point (or displacement) in nanometres.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn dot(self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn cross(self, other: Point3) -> Point3 {
        Point3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Add for Point3 {
    type Output = Point3;
    #[inline]
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Point3 {
    #[inline]
    fn add_assign(&mut self, o: Point3) {
        self.x += o.x;
        self.y += o.y;
        self.z += o.z;
    }
}

impl Sub for Point3 {
    type Output = Point3;
    #[inline]
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    #[inline]
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    #[inline]
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// A direction with unit Euclidean norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVec3(Point3);

impl UnitVec3 {
    pub const X: UnitVec3 = UnitVec3(Point3::new(1.0, 0.0, 0.0));
    pub const Y: UnitVec3 = UnitVec3(Point3::new(0.0, 1.0, 0.0));
    pub const Z: UnitVec3 = UnitVec3(Point3::new(0.0, 0.0, 1.0));

    /// Normalises `v`; fails for a zero or non-finite vector.
    pub fn normalize(v: Point3) -> Result<Self> {
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "cannot normalise vector {v:?}"
            )));
        }
        Ok(Self(v * (1.0 / n)))
    }

    /// Accepts `v` as-is if its norm is within `1e-12` of one.
    pub fn try_from_unit(v: Point3) -> Result<Self> {
        if (v.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidGeometry(format!(
                "normal {v:?} is not unit length"
            )));
        }
        Ok(Self(v))
    }

    pub(crate) fn from_unit_unchecked(v: Point3) -> Self {
        Self(v)
    }

    pub fn get(self) -> Point3 {
        self.0
    }

    pub fn negate(self) -> Self {
        Self(-self.0)
    }
}

/// One flat surface element with a single collocation point at its centroid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Panel {
    pub centroid: Point3,
    /// Outward unit normal.
    pub normal: UnitVec3,
    /// Area in nm².
    pub area: f64,
}

impl Panel {
    pub fn new(centroid: Point3, normal: UnitVec3, area: f64) -> Result<Self> {
        if !(area.is_finite() && area > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "panel area must be positive, got {area}"
            )));
        }
        Ok(Self {
            centroid,
            normal,
            area,
        })
    }

    /// Edge length of a square with the panel's area.
    pub fn size(&self) -> f64 {
        self.area.sqrt()
    }
}

/// An ordered list of panels describing one closed body surface.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceMesh {
    panels: Vec<Panel>,
    label: String,
    /// Generator parameters, echoed into mesh files.
    description: String,
}

impl SurfaceMesh {
    pub fn new(
        panels: Vec<Panel>,
        label: impl Into<String>,
        description: impl Into<String>,
    ) -> Result<Self> {
        if panels.is_empty() {
            return Err(Error::InvalidGeometry("mesh has no panels".into()));
        }
        Ok(Self {
            panels,
            label: label.into(),
            description: description.into(),
        })
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn total_area(&self) -> f64 {
        self.panels.iter().map(|p| p.area).sum()
    }

    /// `Σ area · normal`; vanishes for a closed surface.
    pub fn closure_vector(&self) -> Point3 {
        self.panels
            .iter()
            .fold(Point3::ORIGIN, |acc, p| acc + p.normal.get() * p.area)
    }

    /// Checks the closed-surface identity to `1e-9 × total area`.
    pub fn check_closed(&self) -> Result<()> {
        let residual = self.closure_vector().norm();
        let area = self.total_area();
        if residual > 1e-9 * area {
            return Err(Error::InvalidGeometry(format!(
                "mesh '{}' is not closed: |Σ area·normal| = {residual:e} for area {area}",
                self.label
            )));
        }
        Ok(())
    }

    /// Arithmetic mean of the panel centroids.
    pub fn centroid_mean(&self) -> Point3 {
        let sum = self
            .panels
            .iter()
            .fold(Point3::ORIGIN, |acc, p| acc + p.centroid);
        sum * (1.0 / self.panels.len() as f64)
    }

    /// Smallest and largest centroid `z`.
    pub fn z_range(&self) -> (f64, f64) {
        self.panels.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.centroid.z), hi.max(p.centroid.z))
        })
    }

    pub fn max_panel_size(&self) -> f64 {
        self.panels.iter().map(Panel::size).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_vector_rejects_zero_and_non_unit() {
        assert!(UnitVec3::normalize(Point3::ORIGIN).is_err());
        assert!(UnitVec3::try_from_unit(Point3::new(1.0, 1.0, 0.0)).is_err());
        let n = UnitVec3::normalize(Point3::new(3.0, 0.0, 4.0)).unwrap();
        assert!((n.get().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn panel_requires_positive_area() {
        assert!(Panel::new(Point3::ORIGIN, UnitVec3::Z, 0.0).is_err());
        assert!(Panel::new(Point3::ORIGIN, UnitVec3::Z, -1.0).is_err());
        assert!(Panel::new(Point3::ORIGIN, UnitVec3::Z, f64::NAN).is_err());
    }

    #[test]
    fn open_mesh_fails_closure_check() {
        let p = Panel::new(Point3::ORIGIN, UnitVec3::Z, 1.0).unwrap();
        let mesh = SurfaceMesh::new(vec![p], "open", "").unwrap();
        assert!(mesh.check_closed().is_err());
    }

    #[test]
    fn cross_product_is_right_handed() {
        let z = UnitVec3::X.get().cross(UnitVec3::Y.get());
        assert_eq!(z, UnitVec3::Z.get());
    }
}
