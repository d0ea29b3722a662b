//! Additivity baselines: the proximity-force approximation built on the
//! non-retarded Lifshitz half-space energy, and pairwise `r⁻⁶` volume sums
//! calibrated by the Hamaker constant of the same material.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::material::{half_space_reflection, Dielectric};
use crate::quadrature::FrequencyGrid;

/// Two half spaces of the same material at gap `d` (nm).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfSpacePair<M> {
    pub material: M,
    pub gap: f64,
}

impl<M: Dielectric> HalfSpacePair<M> {
    pub fn new(material: M, gap: f64) -> Result<Self> {
        if !(gap.is_finite() && gap > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "half-space gap must be positive, got {gap}"
            )));
        }
        Ok(Self { material, gap })
    }
}

/// `Li₃(x) = Σ_{k≥1} x^k / k³` for `|x| ≤ 1` by direct summation, stopped
/// once the remaining tail is provably below `1e-12`.
pub fn li3(x: f64) -> f64 {
    assert!(x.abs() <= 1.0, "Li3 series needs |x| <= 1, got {x}");
    if x.abs() == 1.0 {
        // ζ(3), or −(3/4)ζ(3) at x = −1; the series converges too slowly.
        const ZETA3: f64 = 1.202_056_903_159_594_3;
        return if x > 0.0 { ZETA3 } else { -0.75 * ZETA3 };
    }
    let a = x.abs();
    let mut sum = 0.0;
    let mut power = x;
    let mut k = 1.0f64;
    loop {
        sum += power / (k * k * k);
        // Tail after term k: at most a^{k+1} / ((k+1)³ (1 − a)) and at most
        // Σ_{j>k} j⁻³ < 1 / (2k²).
        let next = power.abs() * a;
        let tail = (next / ((k + 1.0).powi(3) * (1.0 - a))).min(next / (2.0 * k * k));
        if tail < 1e-12 {
            return sum;
        }
        power *= x;
        k += 1.0;
    }
}

/// `∫₀^∞ Li₃(r(iξ)²) dξ` (eV): the gap-independent part of the half-space
/// energy.
pub fn lifshitz_integral(material: &dyn Dielectric, grid: &FrequencyGrid) -> Result<f64> {
    grid.try_integrate(|xi| {
        let r = half_space_reflection(material.eps_imaginary(xi)?)?;
        Ok(li3(r * r))
    })
}

/// Non-retarded energy per area of two half spaces (eV/nm²):
/// `E/A = −(1/16π²d²) ∫₀^∞ Li₃(r²) dξ`.
pub fn lifshitz_energy_per_area<M: Dielectric>(
    pair: &HalfSpacePair<M>,
    grid: &FrequencyGrid,
) -> Result<f64> {
    let d = pair.gap;
    Ok(-lifshitz_integral(&pair.material, grid)? / (16.0 * PI * PI * d * d))
}

/// Proximity-force estimate of the normal force (eV/nm) on a flat base of
/// area `base_area` facing a half space: `F = −A · d(E/A)/dd`, negative for
/// attraction. Depends on the body only through the base area.
pub fn pfa_normal_force<M: Dielectric>(
    base_area: f64,
    pair: &HalfSpacePair<M>,
    grid: &FrequencyGrid,
) -> Result<f64> {
    if !(base_area.is_finite() && base_area > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "base area must be positive, got {base_area}"
        )));
    }
    // E/A ∝ d⁻², so d(E/A)/dd = −2 (E/A) / d.
    let e = lifshitz_energy_per_area(pair, grid)?;
    Ok(-base_area * (-2.0 * e / pair.gap))
}

/// Hamaker constant (eV) matching the half-space energy:
/// `A_H = −12π d² (E/A) = (3/4π) ∫ Li₃(r²) dξ`.
pub fn hamaker_constant(material: &dyn Dielectric, grid: &FrequencyGrid) -> Result<f64> {
    Ok(3.0 / (4.0 * PI) * lifshitz_integral(material, grid)?)
}

/// Shapes that can be filled with voxels, placed like the surface meshes:
/// cylinders with their base at `z = 0` centred on the `z` axis, spheres at
/// the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VoxelShape {
    Box { lx: f64, ly: f64, h: f64 },
    Cylinder { diameter: f64, h: f64 },
    Sphere { radius: f64 },
}

impl VoxelShape {
    pub fn volume(&self) -> f64 {
        match *self {
            VoxelShape::Box { lx, ly, h } => lx * ly * h,
            VoxelShape::Cylinder { diameter, h } => 0.25 * PI * diameter * diameter * h,
            VoxelShape::Sphere { radius } => 4.0 / 3.0 * PI * radius.powi(3),
        }
    }
}

/// Point-sampled body: voxel centres and a common voxel volume.
#[derive(Clone, Debug, PartialEq)]
pub struct VoxelBody {
    pub centers: Vec<Point3>,
    pub voxel_volume: f64,
    /// Largest voxel edge; sets the closest admissible pair distance.
    pub voxel_edge: f64,
    pub label: String,
}

impl VoxelBody {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn volume(&self) -> f64 {
        self.centers.len() as f64 * self.voxel_volume
    }

    pub fn translated(&self, t: Point3) -> VoxelBody {
        VoxelBody {
            centers: self.centers.iter().map(|&c| c + t).collect(),
            ..self.clone()
        }
    }

    fn diagonal(&self) -> f64 {
        3f64.sqrt() * self.voxel_edge
    }
}

fn cell_centre(len: f64, i: usize, n: usize) -> f64 {
    len * ((2 * i + 1) as f64 - n as f64) / (2 * n) as f64
}

/// Fills a shape with a regular grid.
///
/// `resolution` is the number of cells across the shortest extent. A box
/// gets `nx·ny·nz` cells with `n_i = ⌈resolution · l_i / l_min⌉` sized to
/// tile it exactly. Cylinders use `resolution` cells across the shorter of
/// diameter and height, spheres `resolution` cells across the diameter;
/// both keep the cells whose centre lies inside and share the exact volume
/// equally among them, so the voxel body never gains or loses material.
pub fn voxelize(shape: VoxelShape, resolution: usize) -> Result<VoxelBody> {
    if resolution == 0 {
        return Err(Error::InvalidConfiguration("voxel resolution must be ≥ 1".into()));
    }
    let dims: &[f64] = match &shape {
        VoxelShape::Box { lx, ly, h } => &[*lx, *ly, *h],
        VoxelShape::Cylinder { diameter, h } => &[*diameter, *h],
        VoxelShape::Sphere { radius } => &[*radius],
    };
    if dims.iter().any(|&v| !(v.is_finite() && v > 0.0)) {
        return Err(Error::InvalidGeometry(format!("{shape:?} has non-positive extent")));
    }
    let count = |len: f64, c: f64| ((resolution as f64 * len / c) - 1e-9).ceil().max(1.0) as usize;
    let mut centers = Vec::new();
    let (voxel_volume, voxel_edge, label) = match shape {
        VoxelShape::Box { lx, ly, h } => {
            let c = lx.min(ly).min(h);
            let (nx, ny, nz) = (count(lx, c), count(ly, c), count(h, c));
            let (ax, ay, az) = (lx / nx as f64, ly / ny as f64, h / nz as f64);
            for i in 0..nx {
                for j in 0..ny {
                    for k in 0..nz {
                        centers.push(Point3::new(
                            cell_centre(lx, i, nx),
                            cell_centre(ly, j, ny),
                            (k as f64 + 0.5) * az,
                        ));
                    }
                }
            }
            (ax * ay * az, ax.max(ay).max(az), "box")
        }
        VoxelShape::Cylinder { diameter, h } => {
            let a = diameter.min(h) / resolution as f64;
            let n = count(diameter, a * resolution as f64);
            let nz = count(h, a * resolution as f64);
            let (ax, az) = (diameter / n as f64, h / nz as f64);
            let r2 = 0.25 * diameter * diameter;
            for i in 0..n {
                for j in 0..n {
                    let (x, y) = (cell_centre(diameter, i, n), cell_centre(diameter, j, n));
                    if x * x + y * y <= r2 {
                        for k in 0..nz {
                            centers.push(Point3::new(x, y, (k as f64 + 0.5) * az));
                        }
                    }
                }
            }
            (shape.volume() / centers.len() as f64, ax.max(az), "cylinder")
        }
        VoxelShape::Sphere { radius } => {
            let d = 2.0 * radius;
            let n = resolution;
            let a = d / n as f64;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let p = Point3::new(
                            cell_centre(d, i, n),
                            cell_centre(d, j, n),
                            cell_centre(d, k, n),
                        );
                        if p.norm_squared() <= radius * radius {
                            centers.push(p);
                        }
                    }
                }
            }
            (shape.volume() / centers.len() as f64, a, "sphere")
        }
    };
    Ok(VoxelBody {
        centers,
        voxel_volume,
        voxel_edge,
        label: label.into(),
    })
}

/// Attractive pairwise energy `U = −(A_H/π²) v₁v₂ Σ |p − q|⁻⁶` (eV).
///
/// Outer voxels are processed in parallel and their partial sums added in
/// index order, so the result does not depend on the thread count.
pub fn lj_pairwise_energy(b1: &VoxelBody, b2: &VoxelBody, hamaker: f64) -> Result<f64> {
    let min_allowed = b1.diagonal().max(b2.diagonal());
    let partial: Vec<(f64, f64)> = b1
        .centers
        .par_iter()
        .map(|&p| {
            let mut sum = 0.0;
            let mut closest = f64::INFINITY;
            for &q in &b2.centers {
                let r2 = (p - q).norm_squared();
                closest = closest.min(r2);
                sum += 1.0 / (r2 * r2 * r2);
            }
            (sum, closest)
        })
        .collect();
    let closest = partial.iter().map(|p| p.1).fold(f64::INFINITY, f64::min).sqrt();
    if closest < min_allowed {
        return Err(Error::RefineResolution(format!(
            "voxels of {} and {} are {closest:.4} nm apart, closer than a voxel diagonal {min_allowed:.4} nm",
            b1.label, b2.label
        )));
    }
    let total: f64 = partial.iter().map(|p| p.0).sum();
    Ok(-hamaker / (PI * PI) * b1.voxel_volume * b2.voxel_volume * total)
}
