//! Analytic oracles that gate the solver.
//!
//! Reference values here never go through the kernel or determinant code:
//! the sphere eigenvalues are closed form, the London coefficient and the
//! multipole two-sphere energy use their own quadrature (exp-sinh) and their
//! own small elimination.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::baselines::lifshitz_integral;
use crate::bem::{assemble_kernel, spectrum, EnergySolver, KernelMatrix};
use crate::error::{Error, Result};
use crate::geometry::{apply_motion, make_sphere, MeshResolution, Point3, RigidMotion};
use crate::material::{half_space_reflection, Dielectric};
use crate::quadrature::{exp_sinh, FrequencyGrid};

/// Step and range of the exp-sinh rule used by all oracles.
const ES_STEP: f64 = 1.0 / 64.0;
const ES_RANGE: f64 = 4.5;

/// One computed-versus-reference comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub name: String,
    pub computed: f64,
    pub reference: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleReport {
    pub fn new(name: impl Into<String>, computed: f64, reference: f64, tolerance: f64) -> Self {
        let rel_err = if reference == 0.0 {
            computed.abs()
        } else {
            ((computed - reference) / reference).abs()
        };
        Self {
            name: name.into(),
            computed,
            reference,
            rel_err,
            tolerance,
            passed: rel_err <= tolerance,
        }
    }

    /// Boolean check reported with `computed = 1` for true.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            computed: if ok { 1.0 } else { 0.0 },
            reference: 1.0,
            rel_err: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            passed: ok,
        }
    }

    pub const CSV_HEADER: &'static str = "oracle,computed,reference,rel_err,pass";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:e},{:e},{:e},{}",
            self.name, self.computed, self.reference, self.rel_err, self.passed
        )
    }
}

pub fn reports_to_csv(reports: &[OracleReport]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", OracleReport::CSV_HEADER);
    for r in reports {
        let _ = writeln!(s, "{}", r.csv_row());
    }
    s
}

/// Neumann–Poincaré eigenvalue of the sphere for multipole order `l`.
pub fn sphere_eigenvalue(l: usize) -> f64 {
    -2.0 * PI / (2 * l + 1) as f64
}

/// Permittivity at which the interior-exterior system resonates for a
/// kernel eigenvalue `κ`: solves `λ(ε) + κ = 0`.
pub fn resonance_permittivity(kappa: f64) -> f64 {
    (kappa - 2.0 * PI) / (kappa + 2.0 * PI)
}

/// The `2l + 1` eigenvalues closest to the sphere value of order `l`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenCluster {
    pub l: usize,
    pub target: f64,
    /// Real parts, ascending.
    pub values: Vec<f64>,
    /// Largest `|κ − target| / |target|` within the cluster.
    pub rel_err: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumRung {
    pub divisions: usize,
    pub n_panels: usize,
    pub clusters: Vec<EigenCluster>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphereSpectrumCheck {
    pub rungs: Vec<SpectrumRung>,
}

impl SphereSpectrumCheck {
    pub fn errors(&self, l: usize) -> Vec<f64> {
        self.rungs
            .iter()
            .map(|r| r.clusters[l - 1].rel_err)
            .collect()
    }

    /// Observed order `p` in `err ∝ h^p` between consecutive rungs, with the
    /// panel size `h ∝ 1/divisions`.
    pub fn convergence_orders(&self, l: usize) -> Vec<f64> {
        let e = self.errors(l);
        self.rungs
            .windows(2)
            .zip(e.windows(2))
            .map(|(r, e)| {
                (e[0] / e[1]).ln() / (r[1].divisions as f64 / r[0].divisions as f64).ln()
            })
            .collect()
    }

    pub fn strictly_converging(&self, l: usize) -> bool {
        self.errors(l).windows(2).all(|w| w[1] < w[0])
    }

    pub fn finest(&self) -> &SpectrumRung {
        self.rungs.last().expect("ladder is never empty")
    }

    /// Reports for the finest rung with per-order tolerances, plus the
    /// monotone-convergence flags.
    pub fn reports(&self, tolerances: &[f64]) -> Vec<OracleReport> {
        let finest = self.finest();
        let mut out = Vec::new();
        for (c, &tol) in finest.clusters.iter().zip(tolerances) {
            let worst = c
                .values
                .iter()
                .copied()
                .max_by(|a, b| (a - c.target).abs().total_cmp(&(b - c.target).abs()))
                .unwrap_or(f64::NAN);
            out.push(OracleReport::new(
                format!("sphere_l{}_n{}", c.l, finest.n_panels),
                worst,
                c.target,
                tol,
            ));
            out.push(OracleReport::flag(
                format!("sphere_l{}_converging", c.l),
                self.strictly_converging(c.l),
            ));
        }
        if let Some(c) = finest.clusters.first() {
            let mean = c.values.iter().sum::<f64>() / c.values.len() as f64;
            out.push(OracleReport::new(
                "sphere_l1_resonance_eps",
                resonance_permittivity(mean),
                -2.0,
                tolerances.first().copied().unwrap_or(0.0) * 3.0,
            ));
        }
        out
    }
}

/// Extracts the `l = 1..=l_max` clusters from a single-sphere kernel.
pub fn sphere_clusters(k: &KernelMatrix, l_max: usize) -> Result<Vec<EigenCluster>> {
    let spec = spectrum(k)?;
    let eig = spec.eigenvalues();
    let mut clusters = Vec::with_capacity(l_max);
    for l in 1..=l_max {
        let target = sphere_eigenvalue(l);
        let size = 2 * l + 1;
        if eig.len() < size + 1 {
            return Err(Error::CoarseMesh(format!(
                "{} eigenvalues cannot hold the l = {l} cluster",
                eig.len()
            )));
        }
        let mut order: Vec<usize> = (0..eig.len()).collect();
        order.sort_by(|&a, &b| {
            (eig[a] - target)
                .norm()
                .total_cmp(&(eig[b] - target).norm())
                .then(a.cmp(&b))
        });
        let mut values: Vec<f64> = order[..size].iter().map(|&i| eig[i].re).collect();
        values.sort_by(f64::total_cmp);
        let (lo, hi) = (values[0], values[size - 1]);
        let width = hi - lo;
        let gap = order[size..]
            .iter()
            .map(|&i| {
                let x = eig[i].re;
                if x < lo {
                    lo - x
                } else if x > hi {
                    x - hi
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min);
        if gap < width {
            return Err(Error::CoarseMesh(format!(
                "l = {l} cluster is ambiguous: width {width:.3e} exceeds gap {gap:.3e}"
            )));
        }
        let rel_err = order[..size]
            .iter()
            .map(|&i| (eig[i] - target).norm() / target.abs())
            .fold(0.0, f64::max);
        clusters.push(EigenCluster {
            l,
            target,
            values,
            rel_err,
        });
    }
    Ok(clusters)
}

/// Eigenvalue clusters `l = 1, 2, 3` of unit-sphere kernels along a ladder
/// of resolutions.
pub fn sphere_spectrum_check(ladder: &[usize]) -> Result<SphereSpectrumCheck> {
    if ladder.len() < 3 {
        return Err(Error::InvalidConfiguration(format!(
            "sphere spectrum check needs at least 3 resolutions, got {}",
            ladder.len()
        )));
    }
    let mut rungs = Vec::with_capacity(ladder.len());
    for &n in ladder {
        let mesh = make_sphere(1.0, MeshResolution::new(n)?)?;
        let k = assemble_kernel(std::slice::from_ref(&mesh))?;
        rungs.push(SpectrumRung {
            divisions: n,
            n_panels: mesh.len(),
            clusters: sphere_clusters(&k, 3)?,
        });
    }
    Ok(SphereSpectrumCheck { rungs })
}

/// Static-geometry polarizability of a sphere, `a³ (ε − 1)/(ε + 2)` (nm³).
pub fn sphere_polarizability(eps: f64, radius: f64) -> f64 {
    radius.powi(3) * (eps - 1.0) / (eps + 2.0)
}

/// London coefficient `C6 = (3/π) ∫₀^∞ α(iξ)² dξ` (eV·nm⁶) on the given grid.
pub fn london_c6(material: &dyn Dielectric, radius: f64, grid: &FrequencyGrid) -> Result<f64> {
    let integral = grid.try_integrate(|xi| {
        let a = sphere_polarizability(material.eps_imaginary(xi)?, radius);
        Ok(a * a)
    })?;
    Ok(3.0 / PI * integral)
}

/// Same coefficient by the exp-sinh rule.
pub fn london_c6_reference(material: &dyn Dielectric, radius: f64) -> Result<f64> {
    let integral = try_exp_sinh(|xi| {
        let a = sphere_polarizability(material.eps_imaginary(xi)?, radius);
        Ok(a * a)
    })?;
    Ok(3.0 / PI * integral)
}

fn try_exp_sinh<F: FnMut(f64) -> Result<f64>>(mut f: F) -> Result<f64> {
    let mut err = None;
    let v = exp_sinh(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        ES_STEP,
        ES_RANGE,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// `∫₀^∞ Li₃(r²) dξ` by exp-sinh in `ξ` and a direct wavenumber integral
/// `∫₀^∞ u ln(1 − r² e^{−u}) du = −Li₃(r²)` in place of the series.
pub fn lifshitz_integral_reference(material: &dyn Dielectric) -> Result<f64> {
    try_exp_sinh(|xi| {
        let eps = material.eps_imaginary(xi)?;
        let r = half_space_reflection(eps)?;
        let x = r * r;
        // Near x e^{−u} → 1 write 1 − x e^{−u} = (1 − x) − x (e^{−u} − 1)
        // with 1 − r² = 4ε/(ε+1)², which stays exact where r² rounds to one.
        let one_minus_x = 4.0 * eps / ((eps + 1.0) * (eps + 1.0));
        let log_term = |u: f64| {
            let y = x * (-u).exp();
            if y < 0.5 {
                (-y).ln_1p()
            } else {
                (one_minus_x - x * (-u).exp_m1()).ln()
            }
        };
        Ok(-exp_sinh(|u| u * log_term(u), ES_STEP, ES_RANGE))
    })
}

/// Dual-quadrature check of the half-space integral.
pub fn lifshitz_check(material: &dyn Dielectric, grid: &FrequencyGrid, tol: f64) -> Result<OracleReport> {
    Ok(OracleReport::new(
        "lifshitz_integral",
        lifshitz_integral(material, grid)?,
        lifshitz_integral_reference(material)?,
        tol,
    ))
}

/// Far-field results for a sphere pair.
#[derive(Clone, Debug, PartialEq)]
pub struct FarFieldCheck {
    pub c6: f64,
    pub distances: Vec<f64>,
    pub energies: Vec<f64>,
    pub reports: Vec<OracleReport>,
}

impl FarFieldCheck {
    pub fn errors(&self) -> Vec<f64> {
        self.reports.iter().map(|r| r.rel_err).collect()
    }

    /// Relative error against `−C6/d⁶` decreasing with distance.
    pub fn monotone(&self) -> bool {
        self.errors().windows(2).all(|w| w[1] < w[0])
    }
}

/// Two identical spheres of `radius` at the given centre distances; BEM
/// energy compared with `−C6/d⁶`.
pub fn two_sphere_far_field_check(
    material: &dyn Dielectric,
    radius: f64,
    distances: &[f64],
    tolerances: &[f64],
    divisions: usize,
    grid: &FrequencyGrid,
) -> Result<FarFieldCheck> {
    if distances.len() != tolerances.len() {
        return Err(Error::InvalidConfiguration(
            "one tolerance per distance is required".into(),
        ));
    }
    if let Some(&d) = distances.iter().find(|&&d| d < 8.0 * radius) {
        return Err(Error::InvalidConfiguration(format!(
            "far-field check needs d ≥ 8a, got d = {d} for a = {radius}"
        )));
    }
    let c6 = london_c6(material, radius, grid)?;
    let sphere = make_sphere(radius, MeshResolution::new(divisions)?)?;
    let mut energies = Vec::with_capacity(distances.len());
    let mut reports = Vec::with_capacity(distances.len());
    for (&d, &tol) in distances.iter().zip(tolerances) {
        let other = apply_motion(&sphere, &RigidMotion::translation(Point3::new(0.0, 0.0, d)));
        let e = EnergySolver::default()
            .energy(&[sphere.clone(), other], material, grid)?
            .energy;
        energies.push(e);
        reports.push(OracleReport::new(
            format!("london_d{d}"),
            e,
            -c6 / d.powi(6),
            tol,
        ));
    }
    Ok(FarFieldCheck {
        c6,
        distances: distances.to_vec(),
        energies,
        reports,
    })
}

/// Exact non-retarded energy (eV) of two identical spheres at centre
/// distance `d`, from the multipole expansion truncated at `l_max`.
///
/// For each azimuthal order `m` the round-trip operator is
/// `M = α B α Bᵀ` with `α_l = a^{2l+1} l (ε − 1)/(l ε + l + 1)` and the
/// axial translation coefficients
/// `B_{ll'} = (−1)^{l'+m} (l+l')! / √((l−m)!(l+m)!(l'−m)!(l'+m)!) / d^{l+l'+1}`,
/// and `E = (1/2π) ∫ dξ Σ_m ln det(1 − M)`.
pub fn two_sphere_multipole_energy(
    material: &dyn Dielectric,
    radius: f64,
    d: f64,
    l_max: usize,
) -> Result<f64> {
    if !(d > 2.0 * radius) {
        return Err(Error::InvalidGeometry(format!(
            "spheres of radius {radius} overlap at distance {d}"
        )));
    }
    if l_max == 0 {
        return Err(Error::InvalidConfiguration("l_max must be ≥ 1".into()));
    }
    let fact: Vec<f64> = (0..=2 * l_max)
        .scan(1.0, |acc, k| {
            if k > 0 {
                *acc *= k as f64;
            }
            Some(*acc)
        })
        .collect();
    // Translation blocks are frequency independent.
    let blocks: Vec<(usize, Vec<f64>)> = (0..=l_max)
        .map(|m| {
            let l0 = m.max(1);
            let n = l_max - l0 + 1;
            let mut b = vec![0.0; n * n];
            for (i, l) in (l0..=l_max).enumerate() {
                for (j, lp) in (l0..=l_max).enumerate() {
                    let sign = if (lp + m) % 2 == 0 { 1.0 } else { -1.0 };
                    let norm = (fact[l - m] * fact[l + m] * fact[lp - m] * fact[lp + m]).sqrt();
                    b[i * n + j] = sign * fact[l + lp] / norm / d.powi((l + lp + 1) as i32);
                }
            }
            (l0, b)
        })
        .collect();
    let integral = try_exp_sinh(|xi| {
        let eps = material.eps_imaginary(xi)?;
        let mut total = 0.0;
        for (m, (l0, b)) in blocks.iter().enumerate() {
            let n = l_max - l0 + 1;
            let alpha: Vec<f64> = (*l0..=l_max)
                .map(|l| {
                    let lf = l as f64;
                    radius.powi(2 * l as i32 + 1) * lf * (eps - 1.0) / (lf * eps + lf + 1.0)
                })
                .collect();
            // det(1 − αBαBᵀ) = det(1 − CCᵀ) with C = α^{1/2} B α^{1/2}.
            let root: Vec<f64> = alpha.iter().map(|a| a.sqrt()).collect();
            let c: Vec<f64> = (0..n * n).map(|k| root[k / n] * b[k] * root[k % n]).collect();
            let mut g = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    g[i * n + j] = (0..n).map(|k| c[i * n + k] * c[j * n + k]).sum::<f64>();
                }
            }
            let ld = log_det_unit_minus(&mut g, n)?;
            total += if m == 0 { ld } else { 2.0 * ld };
        }
        Ok(total)
    })?;
    Ok(integral / (2.0 * PI))
}

/// `ln det(1 − G)` for a small symmetric positive semi-definite `G` with
/// `1 − G` positive definite; overwrites `g`.
///
/// Elimination runs on the deviation `E = −G` from the identity so that
/// pivots `1 + E_cc` enter through `ln_1p` and tiny couplings keep their
/// relative precision.
fn log_det_unit_minus(g: &mut [f64], n: usize) -> Result<f64> {
    for v in g.iter_mut() {
        *v = -*v;
    }
    let e = g;
    let mut acc = 0.0;
    for c in 0..n {
        let p = e[c * n + c];
        if !(p > -1.0) {
            return Err(Error::NumericalFailure {
                n,
                detail: format!("1 − G is not positive definite (pivot {})", 1.0 + p),
            });
        }
        acc += p.ln_1p();
        let pivot = 1.0 + p;
        for r in c + 1..n {
            let f = e[r * n + c] / pivot;
            if f != 0.0 {
                for k in c + 1..n {
                    e[r * n + k] -= f * e[c * n + k];
                }
            }
        }
    }
    Ok(acc)
}

/// Settings of the default oracle suite.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    pub sphere_ladder: Vec<usize>,
    /// Tolerances for the `l = 1, 2, 3` clusters on the finest sphere.
    pub sphere_tolerances: Vec<f64>,
    pub london_radius: f64,
    pub london_distances: Vec<f64>,
    pub london_tolerances: Vec<f64>,
    pub london_divisions: usize,
    /// Tolerance of BEM against the multipole reference at every distance.
    pub multipole_tolerance: f64,
    pub multipole_l_max: usize,
    pub quadrature_tolerance: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            sphere_ladder: vec![9, 12, 15],
            sphere_tolerances: vec![0.02, 0.03, 0.05],
            london_radius: 1.0,
            london_distances: vec![10.0, 20.0],
            london_tolerances: vec![0.05, 0.02],
            london_divisions: 10,
            multipole_tolerance: 0.01,
            multipole_l_max: 12,
            quadrature_tolerance: 1e-8,
        }
    }
}

/// Runs every oracle and returns one report per check.
pub fn run_suite(
    material: &dyn Dielectric,
    grid: &FrequencyGrid,
    opts: &SuiteOptions,
) -> Result<Vec<OracleReport>> {
    let mut reports = Vec::new();

    let spectrum = sphere_spectrum_check(&opts.sphere_ladder)?;
    reports.extend(spectrum.reports(&opts.sphere_tolerances));

    let a = opts.london_radius;
    reports.push(OracleReport::new(
        "london_c6_dual_quadrature",
        london_c6(material, a, grid)?,
        london_c6_reference(material, a)?,
        opts.quadrature_tolerance,
    ));
    reports.push(lifshitz_check(material, grid, opts.quadrature_tolerance)?);

    let far = two_sphere_far_field_check(
        material,
        a,
        &opts.london_distances,
        &opts.london_tolerances,
        opts.london_divisions,
        grid,
    )?;
    for (&d, &e) in far.distances.iter().zip(&far.energies) {
        reports.push(OracleReport::new(
            format!("multipole_d{d}"),
            e,
            two_sphere_multipole_energy(material, a, d, opts.multipole_l_max)?,
            opts.multipole_tolerance,
        ));
    }
    reports.push(OracleReport::flag("london_error_monotone", far.monotone()));
    reports.extend(far.reports);
    Ok(reports)
}

/// `Li₃` evaluated through its integral representation; a check on the
/// series used by the baselines.
pub fn li3_reference(x: f64) -> f64 {
    -exp_sinh(|u| u * (-x * (-u).exp()).ln_1p(), ES_STEP, ES_RANGE)
}
