//! Log-determinants of `R(λ) = λI + K` by two independent routes.
//!
//! Only the diagonal of `R` depends on frequency, so the spectral route
//! diagonalises `K` once and evaluates every `λ` in `O(N)`. The LU route
//! factorises `λI + K` afresh for each `λ` and serves as cross-check and as
//! fallback for very large `N`.

use std::f64::consts::PI;
use std::sync::Once;

use faer::{c64, Mat, Par};

use super::kernel::{KernelMatrix, KernelScheme};
use crate::error::{Error, Result};

/// Below this modulus `λ + κ` (or an LU pivot) counts as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-14;

static SEQUENTIAL_FAER: Once = Once::new();

/// Dense factorisations run sequentially; parallelism lives at the scan and
/// assembly level, which keeps results independent of the worker count.
fn ensure_sequential_faer() {
    SEQUENTIAL_FAER.call_once(|| faer::set_global_parallelism(Par::Seq));
}

/// Eigenvalues of a real kernel matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<c64>,
}

impl Spectrum {
    pub fn from_eigenvalues(eigenvalues: Vec<c64>) -> Self {
        Self { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[c64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn sum(&self) -> c64 {
        self.eigenvalues.iter().fold(c64::new(0.0, 0.0), |a, &b| a + b)
    }

    /// Real parts sorted ascending.
    pub fn sorted_real(&self) -> Vec<f64> {
        let mut re: Vec<f64> = self.eigenvalues.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        re
    }

    /// `Σ ln|1 + κ/λ| = ln|det(λI + K)| − N ln λ`, for `λ > 0`.
    ///
    /// Small `κ/λ` go through `ln_1p`; large ones use `|λ + κ|` directly so
    /// that near-resonant factors keep full relative precision.
    pub fn log_ratio(&self, lambda: f64) -> Result<f64> {
        let mut acc = 0.0;
        for z in &self.eigenvalues {
            let shifted = c64::new(lambda + z.re, z.im);
            let modulus = shifted.re.hypot(shifted.im);
            if modulus < SINGULAR_THRESHOLD {
                return Err(Error::SingularDeterminant {
                    lambda,
                    detail: format!("|λ + κ| = {modulus:e} for κ = {z}"),
                });
            }
            let (x, y) = (z.re / lambda, z.im / lambda);
            acc += if x.abs() < 0.5 && y.abs() < 0.5 {
                0.5 * (2.0 * x + x * x + y * y).ln_1p()
            } else {
                modulus.ln() - lambda.ln()
            };
        }
        Ok(acc)
    }
}

pub fn spectrum(k: &KernelMatrix) -> Result<Spectrum> {
    ensure_sequential_faer();
    let n = k.dim();
    if k.as_mat().col_iter().any(|c| c.iter().any(|v| !v.is_finite())) {
        return Err(Error::NumericalFailure {
            n,
            detail: "kernel has non-finite entries".into(),
        });
    }
    let eigenvalues = k.as_mat().eigenvalues().map_err(|e| Error::NumericalFailure {
        n,
        detail: format!("{e:?} (max |K_ij| = {:e})", k.max_abs()),
    })?;
    Ok(Spectrum { eigenvalues })
}

/// `ln|det(λI + K)| = Re Σ ln(λ + κ_i)`.
pub fn logdet_spectral(spec: &Spectrum, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(spec.len() as f64 * lambda.ln() + spec.log_ratio(lambda)?)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!(
            "λ must be positive and finite, got {lambda}"
        )));
    }
    Ok(())
}

/// Log-magnitude and sign of a determinant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLogDet {
    pub log_abs: f64,
    pub sign: f64,
}

/// `ln|det(a·I + b·K)|` with sign, via partial-pivot LU.
fn lu_logdet(k: &KernelMatrix, diag: f64, scale: f64) -> Result<SignedLogDet> {
    ensure_sequential_faer();
    let n = k.dim();
    let m = Mat::from_fn(n, n, |i, j| {
        let v = scale * k.get(i, j);
        if i == j {
            diag + v
        } else {
            v
        }
    });
    let lu = m.partial_piv_lu();
    let u = lu.U();
    let mut log_abs = 0.0;
    let mut sign = permutation_sign(lu.P().arrays().0);
    for i in 0..n {
        let p = u[(i, i)];
        if !(p.is_finite() && p.abs() >= SINGULAR_THRESHOLD) {
            return Err(Error::SingularDeterminant {
                lambda: diag / scale,
                detail: format!("LU pivot {i} = {p:e}"),
            });
        }
        log_abs += p.abs().ln();
        if p < 0.0 {
            sign = -sign;
        }
    }
    Ok(SignedLogDet { log_abs, sign })
}

fn permutation_sign(forward: &[usize]) -> f64 {
    let mut seen = vec![false; forward.len()];
    let mut sign = 1.0;
    for start in 0..forward.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = forward[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// `ln|det(λI + K)|` by LU factorisation.
pub fn logdet_lu(k: &KernelMatrix, lambda: f64) -> Result<f64> {
    Ok(logdet_lu_signed(k, lambda)?.log_abs)
}

pub fn logdet_lu_signed(k: &KernelMatrix, lambda: f64) -> Result<SignedLogDet> {
    check_lambda(lambda)?;
    lu_logdet(k, lambda, 1.0)
}

/// Selects how `ln det` is evaluated across frequencies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DeterminantMethod {
    #[default]
    Spectral,
    Lu,
}

impl DeterminantMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            DeterminantMethod::Spectral => "spectral",
            DeterminantMethod::Lu => "lu",
        }
    }
}

/// Spectra of the full kernel and of each isolated body, computed once and
/// reused for every frequency.
#[derive(Clone, Debug)]
pub struct InteractionSpectra {
    full: Spectrum,
    bodies: Vec<Spectrum>,
    decoupled: bool,
}

impl InteractionSpectra {
    pub fn new(k: &KernelMatrix) -> Result<Self> {
        require_bodies(k)?;
        let mut bodies = (0..k.blocks().len())
            .map(|b| spectrum(&k.block(b)))
            .collect::<Result<Vec<_>>>()?;
        let decoupled = k.cross_blocks_vanish();
        let mut full = if decoupled {
            Spectrum::from_eigenvalues(bodies.iter().flat_map(|s| s.eigenvalues.clone()).collect())
        } else {
            spectrum(k)?
        };
        if k.scheme() == KernelScheme::GaussClosure {
            deflate_constant_modes(&mut full, &mut bodies, k.max_abs());
        }
        Ok(Self {
            full,
            bodies,
            decoupled,
        })
    }

    pub fn full(&self) -> &Spectrum {
        &self.full
    }

    pub fn bodies(&self) -> &[Spectrum] {
        &self.bodies
    }

    /// `Δ(λ) = ln|det(λI + K)| − Σ_b ln|det(λI + K_bb)|`.
    pub fn delta(&self, lambda: f64) -> Result<f64> {
        check_lambda(lambda)?;
        if self.decoupled {
            return Ok(0.0);
        }
        // The N ln λ terms cancel exactly between the full system and the
        // bodies, so only the log-ratios are summed.
        let mut delta = self.full.log_ratio(lambda)?;
        for s in &self.bodies {
            delta -= s.log_ratio(lambda)?;
        }
        Ok(delta)
    }
}

/// Under the closure scheme each body's constant vector is an exact
/// eigenvector with `κ = −2π`, in its own block and in the full kernel alike,
/// so the factors `λ − 2π` cancel identically in `Δ`. Near `λ = 2π` (static
/// limit of a good conductor) they are also the worst conditioned, hence they
/// are removed from every spectrum. Nothing is removed unless all of them
/// are found where expected.
fn deflate_constant_modes(full: &mut Spectrum, bodies: &mut [Spectrum], scale: f64) {
    let target = c64::new(-2.0 * PI, 0.0);
    let tol = 1e-8 * scale.max(1.0);
    let nearest = |s: &Spectrum, count: usize| -> Option<Vec<usize>> {
        let mut idx: Vec<usize> = (0..s.eigenvalues.len()).collect();
        idx.sort_by(|&a, &b| {
            (s.eigenvalues[a] - target)
                .norm()
                .total_cmp(&(s.eigenvalues[b] - target).norm())
                .then(a.cmp(&b))
        });
        idx.truncate(count);
        let ok = idx.len() == count
            && idx.iter().all(|&i| (s.eigenvalues[i] - target).norm() <= tol);
        ok.then_some(idx)
    };
    let Some(full_idx) = nearest(full, bodies.len()) else {
        return;
    };
    let Some(body_idx) = bodies.iter().map(|s| nearest(s, 1)).collect::<Option<Vec<_>>>() else {
        return;
    };
    let remove = |s: &mut Spectrum, mut idx: Vec<usize>| {
        idx.sort_unstable_by(|a, b| b.cmp(a));
        for i in idx {
            s.eigenvalues.remove(i);
        }
    };
    remove(full, full_idx);
    for (s, idx) in bodies.iter_mut().zip(body_idx) {
        remove(s, idx);
    }
}

fn require_bodies(k: &KernelMatrix) -> Result<()> {
    if k.blocks().len() < 2 {
        return Err(Error::InvalidConfiguration(format!(
            "interaction needs at least 2 bodies, kernel has {}",
            k.blocks().len()
        )));
    }
    Ok(())
}

/// Interaction log-determinant `Δ(λ)` by the spectral route.
pub fn interaction_logdet(k: &KernelMatrix, lambda: f64) -> Result<f64> {
    InteractionSpectra::new(k)?.delta(lambda)
}

/// Interaction log-determinant `Δ(λ)` by LU factorisation of `I + K/λ` for
/// the full system and each body.
pub fn interaction_logdet_lu(k: &KernelMatrix, lambda: f64) -> Result<f64> {
    require_bodies(k)?;
    check_lambda(lambda)?;
    if k.cross_blocks_vanish() {
        return Ok(0.0);
    }
    let inv = 1.0 / lambda;
    let mut delta = lu_logdet(k, 1.0, inv)?.log_abs;
    for b in 0..k.blocks().len() {
        delta -= lu_logdet(&k.block(b), 1.0, inv)?.log_abs;
    }
    Ok(delta)
}
