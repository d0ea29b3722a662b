use std::cmp::Ordering;
use std::f64::consts::PI;

use rayon::prelude::*;

use super::determinant::{interaction_logdet_lu, DeterminantMethod, InteractionSpectra};
use super::kernel::{assemble_kernel_with, KernelMatrix, KernelScheme};
use crate::error::Result;
use crate::geometry::{Panel, Point3, SurfaceMesh};
use crate::material::{lambda_of_eps, Dielectric};
use crate::quadrature::FrequencyGrid;

/// Interaction energy of one configuration with its frequency samples.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyResult {
    /// Interaction energy in eV.
    pub energy: f64,
    /// Frequency nodes `ξ_k` (eV).
    pub xi: Vec<f64>,
    /// Quadrature weights `w_k` (eV).
    pub weights: Vec<f64>,
    /// Dimensionless samples `Δ(ξ_k) / 2π`; `energy = Σ w_k · integrand_k`.
    pub integrand: Vec<f64>,
    pub n_panels: usize,
    pub method: DeterminantMethod,
    pub scheme: KernelScheme,
    pub warnings: Vec<String>,
}

impl EnergyResult {
    pub fn n_nodes(&self) -> usize {
        self.xi.len()
    }

    /// Per-node integrand as `xi_ev,integrand` CSV rows (no header).
    pub fn integrand_csv(&self) -> String {
        self.xi
            .iter()
            .zip(&self.integrand)
            .map(|(x, v)| format!("{x:e},{v:e}\n"))
            .collect()
    }
}

/// Settings for [`interaction_energy`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergySolver {
    pub scheme: KernelScheme,
    /// Forces the LU route when set; otherwise the spectral route is used up
    /// to `lu_threshold` panels.
    pub method: Option<DeterminantMethod>,
    pub lu_threshold: usize,
}

impl Default for EnergySolver {
    fn default() -> Self {
        Self {
            scheme: KernelScheme::GaussClosure,
            method: None,
            lu_threshold: 6000,
        }
    }
}

impl EnergySolver {
    pub fn method_for(&self, n: usize) -> DeterminantMethod {
        self.method.unwrap_or(if n > self.lu_threshold {
            DeterminantMethod::Lu
        } else {
            DeterminantMethod::Spectral
        })
    }

    pub fn energy(
        &self,
        meshes: &[SurfaceMesh],
        material: &dyn Dielectric,
        grid: &FrequencyGrid,
    ) -> Result<EnergyResult> {
        // The energy is symmetric in the bodies; a canonical order makes it
        // bit-for-bit symmetric as well.
        let mut order: Vec<&SurfaceMesh> = meshes.iter().collect();
        order.sort_by(|a, b| canonical_order(a, b));
        let ordered: Vec<SurfaceMesh> = order.into_iter().cloned().collect();
        let kernel = assemble_kernel_with(&ordered, self.scheme)?;
        let mut result = self.energy_from_kernel(&kernel, material, grid)?;
        result.warnings.extend(gap_resolution_warnings(meshes));
        Ok(result)
    }

    /// Integrates `Δ` over the grid for an already assembled kernel.
    pub fn energy_from_kernel(
        &self,
        kernel: &KernelMatrix,
        material: &dyn Dielectric,
        grid: &FrequencyGrid,
    ) -> Result<EnergyResult> {
        let lambdas = grid
            .nodes()
            .iter()
            .map(|&xi| lambda_of_eps(material.eps_imaginary(xi)?))
            .collect::<Result<Vec<f64>>>()?;
        let method = self.method_for(kernel.dim());
        let deltas: Vec<f64> = match method {
            DeterminantMethod::Spectral => {
                let spectra = InteractionSpectra::new(kernel)?;
                lambdas
                    .iter()
                    .map(|&l| spectra.delta(l))
                    .collect::<Result<_>>()?
            }
            DeterminantMethod::Lu => lambdas
                .par_iter()
                .map(|&l| interaction_logdet_lu(kernel, l))
                .collect::<Result<_>>()?,
        };
        let integrand: Vec<f64> = deltas.iter().map(|d| d / (2.0 * PI)).collect();
        let energy = grid
            .weights()
            .iter()
            .zip(&integrand)
            .map(|(w, v)| w * v)
            .sum::<f64>();
        let mut warnings = Vec::new();
        if energy > 0.0 {
            warnings.push(format!(
                "positive interaction energy {energy:e} eV for like-material bodies; \
                 check orientation of normals or mesh resolution"
            ));
        }
        Ok(EnergyResult {
            energy,
            xi: grid.nodes().to_vec(),
            weights: grid.weights().to_vec(),
            integrand,
            n_panels: kernel.dim(),
            method,
            scheme: kernel.scheme(),
            warnings,
        })
    }
}

/// Total order on meshes by panel count, then panel data compared by value.
fn canonical_order(a: &SurfaceMesh, b: &SurfaceMesh) -> Ordering {
    let key = |p: &Panel| {
        let n = p.normal.get();
        [p.centroid.x, p.centroid.y, p.centroid.z, n.x, n.y, n.z, p.area]
    };
    a.len().cmp(&b.len()).then_with(|| {
        a.panels()
            .iter()
            .zip(b.panels())
            .flat_map(|(p, q)| key(p).into_iter().zip(key(q)))
            .map(|(x, y)| x.total_cmp(&y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Interaction energy (eV) of like-material bodies with the default solver:
/// `E = (1/2π) ∫₀^∞ dξ Δ(λ(ε(iξ)))`, negative for attraction.
pub fn interaction_energy(
    meshes: &[SurfaceMesh],
    material: &dyn Dielectric,
    grid: &FrequencyGrid,
) -> Result<EnergyResult> {
    EnergySolver::default().energy(meshes, material, grid)
}

/// Flags body pairs whose facing panels are larger than half the gap.
///
/// The gap is the smallest centroid distance between the two bodies. A panel
/// faces the other body when its nearest panel there lies within 1.5 gaps
/// and within 60° of its outward normal.
pub fn gap_resolution_warnings(meshes: &[SurfaceMesh]) -> Vec<String> {
    let mut warnings = Vec::new();
    for a in 0..meshes.len() {
        for b in a + 1..meshes.len() {
            let near_a = nearest_panels(meshes[a].panels(), meshes[b].panels());
            let near_b = nearest_panels(meshes[b].panels(), meshes[a].panels());
            let gap = near_a.iter().map(|n| n.0).fold(f64::INFINITY, f64::min);
            let largest = facing_size(meshes[a].panels(), &near_a, gap)
                .max(facing_size(meshes[b].panels(), &near_b, gap));
            if largest > 0.5 * gap {
                warnings.push(format!(
                    "bodies {a} and {b}: facing panel size {largest:.4} nm exceeds half the gap {gap:.4} nm"
                ));
            }
        }
    }
    warnings
}

/// Distance to, and unit direction of, the nearest panel of `other`.
fn nearest_panels(panels: &[Panel], other: &[Panel]) -> Vec<(f64, Point3)> {
    panels
        .iter()
        .map(|p| {
            let (d2, q) = other
                .iter()
                .map(|q| ((q.centroid - p.centroid).norm_squared(), q.centroid))
                .fold((f64::INFINITY, p.centroid), |acc, x| if x.0 < acc.0 { x } else { acc });
            let d = d2.sqrt();
            (d, (q - p.centroid) * (1.0 / d))
        })
        .collect()
}

fn facing_size(panels: &[Panel], nearest: &[(f64, Point3)], gap: f64) -> f64 {
    panels
        .iter()
        .zip(nearest)
        .filter(|(p, (d, dir))| *d <= 1.5 * gap && p.normal.get().dot(*dir) >= 0.5)
        .map(|(p, _)| p.size())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{apply_motion, make_sphere, MeshResolution, Point3, RigidMotion};
    use crate::material::DrudeModel;
    use crate::quadrature::make_frequency_grid;

    fn pair(distance: f64, n: usize) -> Vec<SurfaceMesh> {
        let a = make_sphere(1.0, MeshResolution::new(n).unwrap()).unwrap();
        let b = apply_motion(&a, &RigidMotion::translation(Point3::new(0.0, 0.0, distance)));
        vec![a, b]
    }

    #[test]
    fn energy_is_weighted_sum_of_samples() {
        let grid = make_frequency_grid(9.0, 16).unwrap();
        let r = interaction_energy(&pair(4.0, 4), &DrudeModel::gold(), &grid).unwrap();
        let sum: f64 = r.weights.iter().zip(&r.integrand).map(|(w, v)| w * v).sum();
        assert_eq!(sum, r.energy);
        assert!(r.energy < 0.0);
        assert_eq!(r.n_nodes(), 16);
        assert_eq!(r.n_panels, 192);
        assert!(r.warnings.is_empty(), "{:?}", r.warnings);
        assert_eq!(r.integrand_csv().lines().count(), 16);
    }

    #[test]
    fn spectral_and_lu_routes_agree() {
        let grid = make_frequency_grid(9.0, 12).unwrap();
        let meshes = pair(3.0, 4);
        let gold = DrudeModel::gold();
        let spectral = EnergySolver::default().energy(&meshes, &gold, &grid).unwrap();
        let lu = EnergySolver {
            method: Some(DeterminantMethod::Lu),
            ..Default::default()
        }
        .energy(&meshes, &gold, &grid)
        .unwrap();
        assert_eq!(lu.method, DeterminantMethod::Lu);
        let rel = (spectral.energy - lu.energy).abs() / spectral.energy.abs();
        assert!(rel < 1e-8, "{rel}");
    }

    #[test]
    fn lu_threshold_switches_method() {
        let solver = EnergySolver {
            lu_threshold: 100,
            ..Default::default()
        };
        assert_eq!(solver.method_for(100), DeterminantMethod::Spectral);
        assert_eq!(solver.method_for(101), DeterminantMethod::Lu);
    }

    #[test]
    fn coarse_gap_is_flagged() {
        let meshes = pair(2.2, 3);
        let w = gap_resolution_warnings(&meshes);
        assert_eq!(w.len(), 1, "{w:?}");
        assert!(gap_resolution_warnings(&pair(6.0, 3)).is_empty());
    }
}
