//! Energy scans and their numerical derivatives.
//!
//! Every scan point is an independent energy evaluation with a freshly
//! assembled kernel. Forces come from a symmetric three-point stencil of
//! half-width `δ` around each sample, `F = −(E(c+δ) − E(c−δ)) / 2δ`; with
//! step halving enabled the stencil is repeated at `δ/2` and the relative
//! change is reported per point. The Richardson option replaces the reported
//! derivative with `(4 D(δ/2) − D(δ)) / 3`.
//!
//! Geometry conventions (lengths in nm, bodies centred on the `z` axis):
//!
//! * normal: one cylinder with its base at height `z` above the plane
//!   `z = 0` plus its mirror image, so the pair gap is `2z`;
//! * lateral: lower cylinder on `[0, h]`, upper one on `[h + d, 2h + d]`
//!   shifted by the scan offset along `x`;
//! * torque: as lateral without shift, the upper body rotated by `θ` about
//!   the common `z` axis.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::baselines::{pfa_normal_force, HalfSpacePair};
use crate::bem::EnergySolver;
use crate::error::{Error, Result};
use crate::geometry::{
    apply_motion, make_box_cylinder, make_circular_cylinder, mirror_across_plane, FaceSet,
    MeshResolution, Point3, RigidMotion, SurfaceMesh,
};
use crate::material::DrudeModel;
use crate::quadrature::make_frequency_grid;

/// Derivative of uniformly sampled data.
///
/// Interior points use `(f[i+1] − f[i−1]) / 2h`; the endpoints use the
/// one-sided second-order stencils `∓(3f₀ − 4f₁ + f₂) / 2h`.
pub fn central_difference(values: &[f64], step: f64) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidConfiguration(format!(
            "difference step must be positive, got {step}"
        )));
    }
    let mut d = Vec::with_capacity(n);
    d.push((-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * step));
    for i in 1..n - 1 {
        d.push((values[i + 1] - values[i - 1]) / (2.0 * step));
    }
    d.push((3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * step));
    Ok(d)
}

/// [`central_difference`] followed by one Richardson pass.
///
/// Where `i ± 2` exist the step-`h` and step-`2h` central differences are
/// combined into `(4 D_h − D_2h) / 3`, which is fourth order; other points
/// keep the second-order value.
pub fn central_difference_richardson(values: &[f64], step: f64) -> Result<Vec<f64>> {
    let mut d = central_difference(values, step)?;
    let n = values.len();
    for i in 2..n.saturating_sub(2) {
        let wide = (values[i + 2] - values[i - 2]) / (4.0 * step);
        d[i] = (4.0 * d[i] - wide) / 3.0;
    }
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    NormalToSubstrate,
    LateralPair,
    TorquePair,
}

impl Scenario {
    pub fn tag(&self) -> &'static str {
        match self {
            Scenario::NormalToSubstrate => "normal",
            Scenario::LateralPair => "lateral",
            Scenario::TorquePair => "torque",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "normal" => Some(Scenario::NormalToSubstrate),
            "lateral" => Some(Scenario::LateralPair),
            "torque" => Some(Scenario::TorquePair),
            _ => None,
        }
    }

    fn is_rotation(&self) -> bool {
        matches!(self, Scenario::TorquePair)
    }
}

/// Cross section of the cylinders, with side or diameter `L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CrossSection {
    /// Diameter `L`.
    Circular,
    /// `L × L`.
    Square,
    /// `L × aspect·L`, the long side along `y`.
    Rectangular { aspect: f64 },
}

impl CrossSection {
    pub fn tag(&self) -> &'static str {
        match self {
            CrossSection::Circular => "circular",
            CrossSection::Square => "square",
            CrossSection::Rectangular { .. } => "rectangular",
        }
    }

    pub fn aspect(&self) -> f64 {
        match self {
            CrossSection::Rectangular { aspect } => *aspect,
            _ => 1.0,
        }
    }

    pub fn base_area(&self, length: f64) -> f64 {
        match self {
            CrossSection::Circular => 0.25 * std::f64::consts::PI * length * length,
            CrossSection::Square => length * length,
            CrossSection::Rectangular { aspect } => aspect * length * length,
        }
    }

    /// Cylinder of this cross section, base at `z = 0`.
    pub fn mesh(&self, length: f64, height: f64, res: MeshResolution) -> Result<SurfaceMesh> {
        match self {
            CrossSection::Circular => make_circular_cylinder(length, height, res),
            CrossSection::Square => make_box_cylinder(length, length, height, res),
            CrossSection::Rectangular { aspect } => {
                make_box_cylinder(length, aspect * length, height, res)
            }
        }
    }
}

/// Full description of one scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanSpec {
    pub scenario: Scenario,
    pub cross_section: CrossSection,
    /// Side or diameter `L` (nm).
    pub length: f64,
    /// Cylinder height `h` (nm).
    pub height: f64,
    /// Vertical gap `d` of the pair scans (nm); unused for the normal scan.
    pub gap: f64,
    /// Scan coordinate: base height `z` or lateral offset (nm), or angle (rad).
    pub samples: Vec<f64>,
    /// Panel divisions across `L`.
    pub divisions: usize,
    /// Extra refinement on the facing faces.
    pub refinement: f64,
    pub material: DrudeModel,
    pub grid_scale: f64,
    pub grid_nodes: usize,
    /// Stencil half-width; defaults to `1e-3·L` for translations and
    /// `1e-3` rad for rotations.
    pub fd_step: Option<f64>,
    pub step_halving: bool,
    pub richardson: bool,
    /// Adds the proximity-force columns to normal scans.
    pub pfa: bool,
    pub solver: EnergySolver,
}

impl ScanSpec {
    pub fn new(scenario: Scenario, cross_section: CrossSection, length: f64, height: f64) -> Self {
        Self {
            scenario,
            cross_section,
            length,
            height,
            gap: 0.5 * length,
            samples: Vec::new(),
            divisions: 6,
            refinement: 2.0,
            material: DrudeModel::gold(),
            grid_scale: DrudeModel::GOLD_PLASMA_ENERGY_EV,
            grid_nodes: 48,
            fd_step: None,
            step_halving: true,
            richardson: false,
            pfa: scenario == Scenario::NormalToSubstrate,
            solver: EnergySolver::default(),
        }
    }

    pub fn with_samples(mut self, samples: Vec<f64>) -> Self {
        self.samples = samples;
        self
    }

    pub fn step(&self) -> f64 {
        self.fd_step.unwrap_or(if self.scenario.is_rotation() {
            1e-3
        } else {
            1e-3 * self.length
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfiguration(msg));
        for (name, v) in [("length", self.length), ("height", self.height)] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if self.scenario != Scenario::NormalToSubstrate && !(self.gap.is_finite() && self.gap > 0.0) {
            return bad(format!("gap must be positive, got {}", self.gap));
        }
        if let CrossSection::Rectangular { aspect } = self.cross_section {
            if !(aspect.is_finite() && aspect > 0.0) {
                return bad(format!("aspect must be positive, got {aspect}"));
            }
        }
        if self.samples.is_empty() {
            return bad("scan needs at least one sample".into());
        }
        if self.samples.iter().any(|s| !s.is_finite()) {
            return bad("scan samples must be finite".into());
        }
        if self.samples.windows(2).any(|w| w[0] >= w[1]) {
            return bad("scan samples must be strictly increasing".into());
        }
        let step = self.step();
        if !(step.is_finite() && step > 0.0) {
            return bad(format!("difference step must be positive, got {step}"));
        }
        if self.scenario == Scenario::NormalToSubstrate && self.samples[0] - step <= 0.0 {
            return bad(format!(
                "normal scan needs z > step ({step}) at every sample, got z = {}",
                self.samples[0]
            ));
        }
        MeshResolution::new(self.divisions)?.with_refinement(self.refinement, FaceSet::BOTH)?;
        make_frequency_grid(self.grid_scale, self.grid_nodes)?;
        Ok(())
    }

    fn resolution(&self, faces: FaceSet) -> Result<MeshResolution> {
        MeshResolution::new(self.divisions)?.with_refinement(self.refinement, faces)
    }

    /// Meshes at scan coordinate `c`.
    pub fn configuration(&self, c: f64) -> Result<Vec<SurfaceMesh>> {
        let (l, h) = (self.length, self.height);
        match self.scenario {
            Scenario::NormalToSubstrate => {
                let body = self.cross_section.mesh(l, h, self.resolution(FaceSet::BASE)?)?;
                let body = apply_motion(&body, &RigidMotion::translation(Point3::new(0.0, 0.0, c)))
                    .with_label("body");
                let image = mirror_across_plane(&body, 0.0)?;
                Ok(vec![body, image])
            }
            Scenario::LateralPair | Scenario::TorquePair => {
                let lower = self
                    .cross_section
                    .mesh(l, h, self.resolution(FaceSet::TOP)?)?
                    .with_label("lower");
                let upper = self.cross_section.mesh(l, h, self.resolution(FaceSet::BASE)?)?;
                let lift = RigidMotion::translation(Point3::new(0.0, 0.0, h + self.gap));
                let motion = if self.scenario == Scenario::LateralPair {
                    RigidMotion::translation(Point3::new(c, 0.0, h + self.gap))
                } else {
                    RigidMotion::rotation_z(c).then(&lift)
                };
                Ok(vec![lower, apply_motion(&upper, &motion).with_label("upper")])
            }
        }
    }

    /// Header comment lines (`# key = value`) describing the scan.
    pub fn header(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# scenario = {}", self.scenario.tag());
        let _ = writeln!(s, "# cross_section = {}", self.cross_section.tag());
        let _ = writeln!(s, "# aspect = {}", self.cross_section.aspect());
        let _ = writeln!(s, "# length_nm = {}", self.length);
        let _ = writeln!(s, "# height_nm = {}", self.height);
        let _ = writeln!(s, "# gap_nm = {}", self.gap);
        let _ = writeln!(s, "# divisions = {}", self.divisions);
        let _ = writeln!(s, "# refinement = {}", self.refinement);
        let _ = writeln!(s, "# plasma_energy_ev = {}", self.material.plasma_energy());
        let _ = writeln!(s, "# damping_energy_ev = {}", self.material.damping_energy());
        let _ = writeln!(s, "# grid_scale_ev = {}", self.grid_scale);
        let _ = writeln!(s, "# grid_nodes = {}", self.grid_nodes);
        let _ = writeln!(s, "# fd_step = {}", self.step());
        let _ = writeln!(s, "# step_halving = {}", self.step_halving);
        let _ = writeln!(s, "# richardson = {}", self.richardson);
        let _ = writeln!(s, "# pfa = {}", self.pfa);
        let _ = writeln!(s, "# kernel_scheme = {}", self.solver.scheme.tag());
        s
    }
}

/// Per-point bookkeeping of a scan.
#[derive(Clone, Debug, PartialEq)]
pub struct PointDiagnostics {
    pub n_panels: usize,
    /// Energies at `c − δ, c + δ` followed, with step halving, by
    /// `c − δ/2, c + δ/2`.
    pub stencil_energies: Vec<f64>,
    /// `|D(δ) − D(δ/2)|` relative to the largest `|force|` of the scan, when
    /// step halving ran.
    pub step_change: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub spec: ScanSpec,
    pub coord: Vec<f64>,
    /// Interaction energy at each coordinate (eV).
    pub energy: Vec<f64>,
    /// `−dE/dc`: eV/nm, or eV/rad for torque scans.
    pub force: Vec<f64>,
    pub pfa_force: Option<Vec<f64>>,
    /// `(F − F_PFA) / F_PFA`.
    pub rel_diff: Option<Vec<f64>>,
    pub diagnostics: Vec<PointDiagnostics>,
}

impl ScanResult {
    pub fn force_unit(&self) -> &'static str {
        if self.spec.scenario.is_rotation() {
            "eV/rad"
        } else {
            "eV/nm"
        }
    }

    pub fn coord_unit(&self) -> &'static str {
        if self.spec.scenario.is_rotation() {
            "rad"
        } else {
            "nm"
        }
    }

    /// Trapezoid integral of `force` between consecutive samples, i.e. the
    /// predicted `−(E[i+1] − E[i])`.
    pub fn integrated_force(&self) -> Vec<f64> {
        self.coord
            .windows(2)
            .zip(self.force.windows(2))
            .map(|(c, f)| 0.5 * (c[1] - c[0]) * (f[0] + f[1]))
            .collect()
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut all: Vec<String> = Vec::new();
        for (c, d) in self.coord.iter().zip(&self.diagnostics) {
            for w in &d.warnings {
                all.push(format!("at {c} {}: {w}", self.coord_unit()));
            }
        }
        all
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.spec.header();
        s.push_str(&self.csv_body());
        s
    }

    /// Units line, column header and rows, without the configuration header.
    pub fn csv_body(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# units: coord {}, energy_ev eV, force {}",
            self.coord_unit(),
            self.force_unit()
        );
        let pfa = self.pfa_force.as_ref().zip(self.rel_diff.as_ref());
        if pfa.is_some() {
            s.push_str("coord,energy_ev,force,pfa_force,rel_diff\n");
        } else {
            s.push_str("coord,energy_ev,force\n");
        }
        for i in 0..self.coord.len() {
            let _ = write!(s, "{:e},{:e},{:e}", self.coord[i], self.energy[i], self.force[i]);
            if let Some((f, r)) = pfa {
                let _ = write!(s, ",{:e},{:e}", f[i], r[i]);
            }
            s.push('\n');
        }
        s
    }
}

/// Relative step-halving change above which a point gets a warning.
pub const STEP_HALVING_TOLERANCE: f64 = 1e-3;

/// Runs the scan described by `spec`, whatever its scenario.
pub fn run_scan(spec: &ScanSpec) -> Result<ScanResult> {
    spec.validate()?;
    let step = spec.step();
    let mut offsets = vec![0.0, -step, step];
    if spec.step_halving || spec.richardson {
        offsets.extend([-0.5 * step, 0.5 * step]);
    }
    let grid = make_frequency_grid(spec.grid_scale, spec.grid_nodes)?;

    let jobs: Vec<(usize, f64)> = (0..spec.samples.len())
        .flat_map(|i| offsets.iter().map(move |&o| (i, o)))
        .collect();
    let evaluated = jobs
        .par_iter()
        .map(|&(i, o)| {
            let meshes = spec.configuration(spec.samples[i] + o)?;
            spec.solver.energy(&meshes, &spec.material, &grid)
        })
        .collect::<Result<Vec<_>>>()?;

    let per_point = offsets.len();
    let mut energy = Vec::with_capacity(spec.samples.len());
    let mut force = Vec::with_capacity(spec.samples.len());
    let mut halved = Vec::with_capacity(spec.samples.len());
    for chunk in evaluated.chunks(per_point) {
        let e: Vec<f64> = chunk.iter().map(|r| r.energy).collect();
        let wide = -central_difference(&[e[1], e[0], e[2]], step)?[1];
        let narrow = if per_point == 5 {
            Some(-central_difference(&[e[3], e[0], e[4]], 0.5 * step)?[1])
        } else {
            None
        };
        energy.push(e[0]);
        force.push(match narrow {
            Some(n) if spec.richardson => (4.0 * n - wide) / 3.0,
            _ => wide,
        });
        halved.push(narrow.map(|n| (wide - n).abs()));
    }
    // Step-halving changes are measured against the largest force of the
    // scan; symmetry nulls would make a pointwise ratio meaningless.
    let peak = force.iter().fold(0.0f64, |m, f| m.max(f.abs()));
    let diagnostics = evaluated
        .chunks(per_point)
        .zip(&halved)
        .map(|(chunk, change)| {
            let step_change = change.map(|c| if peak > 0.0 { c / peak } else { c });
            let mut warnings = chunk[0].warnings.clone();
            if let Some(c) = step_change.filter(|&c| c > STEP_HALVING_TOLERANCE) {
                warnings.push(format!("derivative changes by {c:.2e} of the peak under step halving"));
            }
            PointDiagnostics {
                n_panels: chunk[0].n_panels,
                stencil_energies: chunk[1..].iter().map(|r| r.energy).collect(),
                step_change,
                warnings,
            }
        })
        .collect();

    let (pfa_force, rel_diff) = if spec.pfa && spec.scenario == Scenario::NormalToSubstrate {
        let area = spec.cross_section.base_area(spec.length);
        let mut pfa = Vec::with_capacity(spec.samples.len());
        for &z in &spec.samples {
            // The image pair sits at gap 2z, so d/dz brings a factor 2.
            let pair = HalfSpacePair::new(spec.material, 2.0 * z)?;
            pfa.push(2.0 * pfa_normal_force(area, &pair, &grid)?);
        }
        let rel = force.iter().zip(&pfa).map(|(f, p)| (f - p) / p).collect();
        (Some(pfa), Some(rel))
    } else {
        (None, None)
    };

    Ok(ScanResult {
        spec: spec.clone(),
        coord: spec.samples.clone(),
        energy,
        force,
        pfa_force,
        rel_diff,
        diagnostics,
    })
}

/// Normal force on a cylinder above a substrate modelled by its mirror image.
pub fn normal_scan(spec: &ScanSpec) -> Result<ScanResult> {
    expect(spec, Scenario::NormalToSubstrate)?;
    run_scan(spec)
}

/// Lateral force between two stacked cylinders at fixed vertical gap.
pub fn lateral_scan(spec: &ScanSpec) -> Result<ScanResult> {
    expect(spec, Scenario::LateralPair)?;
    run_scan(spec)
}

/// Torque between two stacked cylinders, angles in `[0, π/2]`.
pub fn torque_scan(spec: &ScanSpec) -> Result<ScanResult> {
    expect(spec, Scenario::TorquePair)?;
    if spec.samples.iter().any(|&t| !(0.0..=FRAC_PI_2 + 1e-12).contains(&t)) {
        return Err(Error::InvalidConfiguration(
            "torque scan angles must lie in [0, π/2]".into(),
        ));
    }
    run_scan(spec)
}

fn expect(spec: &ScanSpec, scenario: Scenario) -> Result<()> {
    if spec.scenario != scenario {
        return Err(Error::InvalidConfiguration(format!(
            "expected a {} scan, got {}",
            scenario.tag(),
            spec.scenario.tag()
        )));
    }
    Ok(())
}

/// `n` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_derivative_is_exact() {
        let x = linspace(0.0, 2.0, 21);
        let f: Vec<f64> = x.iter().map(|x| x * x).collect();
        let d = central_difference(&f, 0.1).unwrap();
        for (x, d) in x.iter().zip(&d) {
            assert!((d - 2.0 * x).abs() < 1e-12, "{x}: {d}");
        }
        assert!((d[10] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_has_zero_derivative() {
        let d = central_difference(&[3.5; 7], 0.2).unwrap();
        assert!(d.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sine_error_bound() {
        // Samples reach one step past [0, π] so every point of the interval
        // gets the central stencil (error h²/6); the one-sided ends are
        // bounded by h²/3.
        let h = 1e-2;
        let n = (std::f64::consts::PI / h).ceil() as usize + 3;
        let x: Vec<f64> = (0..n).map(|i| (i as f64 - 1.0) * h).collect();
        let f: Vec<f64> = x.iter().map(|x| x.sin()).collect();
        let d = central_difference(&f, h).unwrap();
        let err = (1..n - 1).map(|i| (d[i] - x[i].cos()).abs()).fold(0.0, f64::max);
        assert!(err <= 2e-5, "{err}");
        assert!((d[0] - x[0].cos()).abs() <= h * h / 3.0 * 1.01);
        let r = central_difference_richardson(&f, h).unwrap();
        let interior = (2..n - 2).map(|i| (r[i] - x[i].cos()).abs()).fold(0.0, f64::max);
        assert!(interior < 1e-8, "{interior}");
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            central_difference(&[1.0, 2.0], 0.1),
            Err(Error::InsufficientData { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn spec_validation() {
        let spec = ScanSpec::new(Scenario::NormalToSubstrate, CrossSection::Square, 10.0, 10.0);
        assert!(spec.validate().is_err());
        let ok = spec.clone().with_samples(vec![1.0, 2.0]);
        assert!(ok.validate().is_ok());
        assert!(spec.clone().with_samples(vec![2.0, 1.0]).validate().is_err());
        assert!(spec.clone().with_samples(vec![0.005]).validate().is_err());
        let mut lateral = ScanSpec::new(Scenario::LateralPair, CrossSection::Square, 10.0, 10.0)
            .with_samples(vec![-1.0, 0.0, 1.0]);
        lateral.gap = 0.0;
        assert!(lateral.validate().is_err());
        assert_eq!(lateral.step(), 1e-2);
        let torque = ScanSpec::new(Scenario::TorquePair, CrossSection::Square, 10.0, 10.0);
        assert_eq!(torque.step(), 1e-3);
    }

    #[test]
    fn configurations_place_bodies() {
        let spec = ScanSpec::new(Scenario::NormalToSubstrate, CrossSection::Square, 2.0, 3.0);
        let m = spec.configuration(0.5).unwrap();
        assert_eq!(m[0].z_range(), (0.5, 3.5));
        assert_eq!(m[1].z_range(), (-3.5, -0.5));

        let mut spec = ScanSpec::new(Scenario::LateralPair, CrossSection::Square, 2.0, 3.0);
        spec.gap = 1.0;
        let m = spec.configuration(0.25).unwrap();
        assert_eq!(m[0].z_range(), (0.0, 3.0));
        assert_eq!(m[1].z_range(), (4.0, 7.0));
        assert!((m[1].centroid_mean().x - 0.25).abs() < 1e-12);

        let spec = ScanSpec::new(
            Scenario::TorquePair,
            CrossSection::Rectangular { aspect: 2.0 },
            1.0,
            1.0,
        );
        let m = spec.configuration(FRAC_PI_2).unwrap();
        // After a quarter turn the long side of the upper body lies along x.
        let xmax = m[1].panels().iter().map(|p| p.centroid.x).fold(f64::MIN, f64::max);
        assert!(xmax > 0.9 && xmax < 1.0 + 1e-12, "{xmax}");
    }

    #[test]
    fn lateral_scan_is_odd_and_restoring() {
        let mut spec = ScanSpec::new(Scenario::LateralPair, CrossSection::Square, 2.0, 1.0)
            .with_samples(vec![-0.4, 0.0, 0.4]);
        spec.divisions = 3;
        spec.grid_nodes = 12;
        let r = lateral_scan(&spec).unwrap();
        assert!((r.energy[0] - r.energy[2]).abs() < 1e-10 * r.energy[1].abs(), "{:?}", r.energy);
        assert!(r.force[1].abs() < 1e-6 * r.force[0].abs(), "{:?}", r.force);
        assert!(r.force[0] > 0.0 && r.force[2] < 0.0);
        assert!(r.energy.iter().all(|&e| e < 0.0));
        assert!(r.to_csv().contains("coord,energy_ev,force\n"));
        assert!(r.pfa_force.is_none());
        assert_eq!(r.diagnostics[0].stencil_energies.len(), 4);
    }

    #[test]
    fn scan_kind_must_match() {
        let spec = ScanSpec::new(Scenario::LateralPair, CrossSection::Square, 2.0, 1.0)
            .with_samples(vec![0.0]);
        assert!(normal_scan(&spec).is_err());
        assert!(torque_scan(&spec).is_err());
    }
}
