//! Flat `[section]` / `key = value` run configuration.
//!
//! Every key has a default; [`RunConfig::echo`] writes the complete
//! effective configuration in the same syntax, so an echo parses back to an
//! identical value. `#` starts a comment anywhere on a line.

use std::collections::HashMap;
use std::fmt::Write as _;

use vdw_bem::bem::{DeterminantMethod, EnergySolver, KernelScheme};
use vdw_bem::forces::{linspace, CrossSection, Scenario, ScanSpec};
use vdw_bem::material::DrudeModel;
use vdw_bem::validation::SuiteOptions;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config: `{key}` (line {line}): {msg}")]
pub struct ConfigError {
    pub key: String,
    /// 1-based source line; 0 when the offending value is a default.
    pub line: usize,
    pub msg: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverMethod {
    Auto,
    Spectral,
    Lu,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineKind {
    Pfa,
    Lj,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub cross_section: String,
    pub length_nm: f64,
    pub aspect: f64,
    pub h_nm: f64,
    pub gap_nm: f64,
    pub plasma_energy_ev: f64,
    pub damping_energy_ev: f64,
    pub divisions: usize,
    pub refinement: f64,
    pub grid_scale_ev: f64,
    pub grid_nodes: usize,
    pub kernel_scheme: KernelScheme,
    pub method: SolverMethod,
    pub lu_threshold: usize,
    /// Scan coordinate of the single `energy` run (nm or rad).
    pub energy_coordinate: f64,
    pub scan_start: f64,
    pub scan_stop: f64,
    pub scan_count: usize,
    /// Explicit samples; override start/stop/count when non-empty.
    pub scan_values: Vec<f64>,
    /// `None` selects the scenario default.
    pub fd_step: Option<f64>,
    pub step_halving: bool,
    pub richardson: bool,
    pub pfa: bool,
    pub baseline: BaselineKind,
    pub voxels: usize,
    pub sphere_ladder: Vec<usize>,
    pub sphere_tolerances: Vec<f64>,
    pub london_radius_nm: f64,
    pub london_distances_nm: Vec<f64>,
    pub london_tolerances: Vec<f64>,
    pub london_divisions: usize,
    pub multipole_tolerance: f64,
    pub multipole_l_max: usize,
    pub quadrature_tolerance: f64,
    pub convergence_steps: usize,
    pub convergence_tolerance: f64,
    pub node_tolerance: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let suite = SuiteOptions::default();
        Self {
            scenario: Scenario::NormalToSubstrate,
            cross_section: "square".into(),
            length_nm: 10.0,
            aspect: 2.0,
            h_nm: 10.0,
            gap_nm: 5.0,
            plasma_energy_ev: DrudeModel::GOLD_PLASMA_ENERGY_EV,
            damping_energy_ev: DrudeModel::GOLD_DAMPING_ENERGY_EV,
            divisions: 6,
            refinement: 2.0,
            grid_scale_ev: DrudeModel::GOLD_PLASMA_ENERGY_EV,
            grid_nodes: 48,
            kernel_scheme: KernelScheme::GaussClosure,
            method: SolverMethod::Auto,
            lu_threshold: 6000,
            energy_coordinate: 1.0,
            scan_start: 1.0,
            scan_stop: 10.0,
            scan_count: 10,
            scan_values: Vec::new(),
            fd_step: None,
            step_halving: true,
            richardson: false,
            pfa: true,
            baseline: BaselineKind::Pfa,
            voxels: 10,
            sphere_ladder: suite.sphere_ladder,
            sphere_tolerances: suite.sphere_tolerances,
            london_radius_nm: suite.london_radius,
            london_distances_nm: suite.london_distances,
            london_tolerances: suite.london_tolerances,
            london_divisions: suite.london_divisions,
            multipole_tolerance: suite.multipole_tolerance,
            multipole_l_max: suite.multipole_l_max,
            quadrature_tolerance: suite.quadrature_tolerance,
            convergence_steps: 2,
            convergence_tolerance: 0.02,
            node_tolerance: 1e-3,
        }
    }
}

fn parse_f64(v: &str) -> Result<f64, String> {
    v.parse::<f64>()
        .map_err(|_| format!("expected a number, got `{v}`"))
        .and_then(|x| {
            if x.is_finite() {
                Ok(x)
            } else {
                Err(format!("expected a finite number, got `{v}`"))
            }
        })
}

fn parse_usize(v: &str) -> Result<usize, String> {
    v.parse::<usize>()
        .map_err(|_| format!("expected a non-negative integer, got `{v}`"))
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true or false, got `{v}`")),
    }
}

fn parse_list<T>(v: &str, item: fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| item(s.trim())).collect()
}

fn join<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "run.scenario" => {
                self.scenario = Scenario::from_tag(v)
                    .ok_or_else(|| format!("expected normal, lateral or torque, got `{v}`"))?
            }
            "geometry.cross_section" => match v {
                "circular" | "square" | "rectangular" => self.cross_section = v.into(),
                _ => return Err(format!("expected circular, square or rectangular, got `{v}`")),
            },
            "geometry.length_nm" => self.length_nm = parse_f64(v)?,
            "geometry.aspect" => self.aspect = parse_f64(v)?,
            "geometry.h_nm" => self.h_nm = parse_f64(v)?,
            "geometry.gap_nm" => self.gap_nm = parse_f64(v)?,
            "material.plasma_energy_ev" => self.plasma_energy_ev = parse_f64(v)?,
            "material.damping_energy_ev" => self.damping_energy_ev = parse_f64(v)?,
            "mesh.divisions" => self.divisions = parse_usize(v)?,
            "mesh.refinement" => self.refinement = parse_f64(v)?,
            "grid.scale_ev" => self.grid_scale_ev = parse_f64(v)?,
            "grid.nodes" => self.grid_nodes = parse_usize(v)?,
            "solver.scheme" => {
                self.kernel_scheme = match v {
                    "closure" => KernelScheme::GaussClosure,
                    "point" => KernelScheme::PointCollocation,
                    _ => return Err(format!("expected closure or point, got `{v}`")),
                }
            }
            "solver.method" => {
                self.method = match v {
                    "auto" => SolverMethod::Auto,
                    "spectral" => SolverMethod::Spectral,
                    "lu" => SolverMethod::Lu,
                    _ => return Err(format!("expected auto, spectral or lu, got `{v}`")),
                }
            }
            "solver.lu_threshold" => self.lu_threshold = parse_usize(v)?,
            "energy.coordinate" => self.energy_coordinate = parse_f64(v)?,
            "scan.start" => self.scan_start = parse_f64(v)?,
            "scan.stop" => self.scan_stop = parse_f64(v)?,
            "scan.count" => self.scan_count = parse_usize(v)?,
            "scan.values" => self.scan_values = parse_list(v, parse_f64)?,
            "scan.fd_step" => {
                self.fd_step = if v == "auto" { None } else { Some(parse_f64(v)?) }
            }
            "scan.step_halving" => self.step_halving = parse_bool(v)?,
            "scan.richardson" => self.richardson = parse_bool(v)?,
            "scan.pfa" => self.pfa = parse_bool(v)?,
            "baseline.kind" => {
                self.baseline = match v {
                    "pfa" => BaselineKind::Pfa,
                    "lj" => BaselineKind::Lj,
                    _ => return Err(format!("expected pfa or lj, got `{v}`")),
                }
            }
            "baseline.voxels" => self.voxels = parse_usize(v)?,
            "validate.sphere_ladder" => self.sphere_ladder = parse_list(v, parse_usize)?,
            "validate.sphere_tolerances" => self.sphere_tolerances = parse_list(v, parse_f64)?,
            "validate.london_radius_nm" => self.london_radius_nm = parse_f64(v)?,
            "validate.london_distances_nm" => self.london_distances_nm = parse_list(v, parse_f64)?,
            "validate.london_tolerances" => self.london_tolerances = parse_list(v, parse_f64)?,
            "validate.london_divisions" => self.london_divisions = parse_usize(v)?,
            "validate.multipole_tolerance" => self.multipole_tolerance = parse_f64(v)?,
            "validate.multipole_l_max" => self.multipole_l_max = parse_usize(v)?,
            "validate.quadrature_tolerance" => self.quadrature_tolerance = parse_f64(v)?,
            "convergence.steps" => self.convergence_steps = parse_usize(v)?,
            "convergence.tolerance" => self.convergence_tolerance = parse_f64(v)?,
            "convergence.node_tolerance" => self.node_tolerance = parse_f64(v)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Checks every constraint; called by [`parse_config`].
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.validate_with_lines(&HashMap::new())
    }

    fn validate_with_lines(&self, lines: &HashMap<String, usize>) -> Result<(), ConfigError> {
        let fail = |key: &str, msg: &str| ConfigError {
            key: key.into(),
            line: lines.get(key).copied().unwrap_or(0),
            msg: msg.into(),
        };
        let positive = [
            ("geometry.length_nm", self.length_nm),
            ("geometry.aspect", self.aspect),
            ("geometry.h_nm", self.h_nm),
            ("geometry.gap_nm", self.gap_nm),
            ("material.plasma_energy_ev", self.plasma_energy_ev),
            ("grid.scale_ev", self.grid_scale_ev),
            ("validate.london_radius_nm", self.london_radius_nm),
            ("validate.multipole_tolerance", self.multipole_tolerance),
            ("validate.quadrature_tolerance", self.quadrature_tolerance),
            ("convergence.tolerance", self.convergence_tolerance),
            ("convergence.node_tolerance", self.node_tolerance),
        ];
        for (key, v) in positive {
            if v <= 0.0 {
                return Err(fail(key, &format!("must be positive, got {v}")));
            }
        }
        if self.damping_energy_ev < 0.0 {
            return Err(fail("material.damping_energy_ev", "must not be negative"));
        }
        if self.divisions < 2 {
            return Err(fail("mesh.divisions", "must be at least 2"));
        }
        if self.refinement < 1.0 {
            return Err(fail("mesh.refinement", "must be at least 1"));
        }
        if self.grid_nodes < 4 {
            return Err(fail("grid.nodes", "must be at least 4"));
        }
        if let Some(step) = self.fd_step {
            if step <= 0.0 {
                return Err(fail("scan.fd_step", "must be positive or auto"));
            }
        }
        if self.scan_values.is_empty() {
            if self.scan_count == 0 {
                return Err(fail("scan.count", "must be at least 1"));
            }
            if self.scan_count > 1 && self.scan_stop <= self.scan_start {
                return Err(fail("scan.stop", "must exceed scan.start"));
            }
        } else if self.scan_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(fail("scan.values", "must be strictly increasing"));
        }
        let samples = self.samples();
        if self.scenario == Scenario::NormalToSubstrate {
            if samples.iter().any(|&z| z <= 0.0) {
                let key = if self.scan_values.is_empty() { "scan.start" } else { "scan.values" };
                return Err(fail(key, "base heights must be positive"));
            }
            if self.energy_coordinate <= 0.0 {
                return Err(fail("energy.coordinate", "base height must be positive"));
            }
        }
        if self.scenario == Scenario::TorquePair
            && samples.iter().any(|&t| !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&t))
        {
            return Err(fail("scan.stop", "torque angles must lie in [0, π/2]"));
        }
        if self.voxels == 0 {
            return Err(fail("baseline.voxels", "must be at least 1"));
        }
        if self.sphere_ladder.len() < 3 || self.sphere_ladder.iter().any(|&n| n < 2) {
            return Err(fail("validate.sphere_ladder", "needs at least 3 resolutions ≥ 2"));
        }
        if self.sphere_tolerances.len() != 3 {
            return Err(fail("validate.sphere_tolerances", "needs one tolerance per l = 1, 2, 3"));
        }
        if self.london_distances_nm.len() != self.london_tolerances.len() {
            return Err(fail("validate.london_tolerances", "needs one tolerance per distance"));
        }
        if self
            .london_distances_nm
            .iter()
            .any(|&d| d < 8.0 * self.london_radius_nm)
        {
            return Err(fail("validate.london_distances_nm", "distances must be at least 8 radii"));
        }
        if self.london_divisions < 2 {
            return Err(fail("validate.london_divisions", "must be at least 2"));
        }
        if self.multipole_l_max == 0 {
            return Err(fail("validate.multipole_l_max", "must be at least 1"));
        }
        Ok(())
    }

    pub fn samples(&self) -> Vec<f64> {
        if self.scan_values.is_empty() {
            linspace(self.scan_start, self.scan_stop, self.scan_count)
        } else {
            self.scan_values.clone()
        }
    }

    pub fn material(&self) -> DrudeModel {
        DrudeModel::new(self.plasma_energy_ev, self.damping_energy_ev).expect("validated")
    }

    pub fn cross_section(&self) -> CrossSection {
        match self.cross_section.as_str() {
            "circular" => CrossSection::Circular,
            "rectangular" => CrossSection::Rectangular {
                aspect: self.aspect,
            },
            _ => CrossSection::Square,
        }
    }

    pub fn solver(&self) -> EnergySolver {
        EnergySolver {
            scheme: self.kernel_scheme,
            method: match self.method {
                SolverMethod::Auto => None,
                SolverMethod::Spectral => Some(DeterminantMethod::Spectral),
                SolverMethod::Lu => Some(DeterminantMethod::Lu),
            },
            lu_threshold: self.lu_threshold,
        }
    }

    pub fn scan_spec(&self) -> ScanSpec {
        let mut spec = ScanSpec::new(self.scenario, self.cross_section(), self.length_nm, self.h_nm)
            .with_samples(self.samples());
        spec.gap = self.gap_nm;
        spec.divisions = self.divisions;
        spec.refinement = self.refinement;
        spec.material = self.material();
        spec.grid_scale = self.grid_scale_ev;
        spec.grid_nodes = self.grid_nodes;
        spec.fd_step = self.fd_step;
        spec.step_halving = self.step_halving;
        spec.richardson = self.richardson;
        spec.pfa = self.pfa;
        spec.solver = self.solver();
        spec
    }

    pub fn suite_options(&self) -> SuiteOptions {
        SuiteOptions {
            sphere_ladder: self.sphere_ladder.clone(),
            sphere_tolerances: self.sphere_tolerances.clone(),
            london_radius: self.london_radius_nm,
            london_distances: self.london_distances_nm.clone(),
            london_tolerances: self.london_tolerances.clone(),
            london_divisions: self.london_divisions,
            multipole_tolerance: self.multipole_tolerance,
            multipole_l_max: self.multipole_l_max,
            quadrature_tolerance: self.quadrature_tolerance,
        }
    }

    /// Complete effective configuration in config syntax.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let method = match self.method {
            SolverMethod::Auto => "auto",
            SolverMethod::Spectral => "spectral",
            SolverMethod::Lu => "lu",
        };
        let baseline = match self.baseline {
            BaselineKind::Pfa => "pfa",
            BaselineKind::Lj => "lj",
        };
        let fd_step = self.fd_step.map_or("auto".to_string(), |v| v.to_string());
        let _ = write!(
            s,
            "[run]\nscenario = {}\n\n\
             [geometry]\ncross_section = {}\nlength_nm = {}\naspect = {}\nh_nm = {}\ngap_nm = {}\n\n\
             [material]\nplasma_energy_ev = {}\ndamping_energy_ev = {}\n\n\
             [mesh]\ndivisions = {}\nrefinement = {}\n\n\
             [grid]\nscale_ev = {}\nnodes = {}\n\n\
             [solver]\nscheme = {}\nmethod = {}\nlu_threshold = {}\n\n\
             [energy]\ncoordinate = {}\n\n\
             [scan]\nstart = {}\nstop = {}\ncount = {}\nvalues = {}\nfd_step = {}\n\
             step_halving = {}\nrichardson = {}\npfa = {}\n\n\
             [baseline]\nkind = {}\nvoxels = {}\n\n\
             [validate]\nsphere_ladder = {}\nsphere_tolerances = {}\nlondon_radius_nm = {}\n\
             london_distances_nm = {}\nlondon_tolerances = {}\nlondon_divisions = {}\n\
             multipole_tolerance = {}\nmultipole_l_max = {}\nquadrature_tolerance = {}\n\n\
             [convergence]\nsteps = {}\ntolerance = {}\nnode_tolerance = {}\n",
            self.scenario.tag(),
            self.cross_section,
            self.length_nm,
            self.aspect,
            self.h_nm,
            self.gap_nm,
            self.plasma_energy_ev,
            self.damping_energy_ev,
            self.divisions,
            self.refinement,
            self.grid_scale_ev,
            self.grid_nodes,
            self.kernel_scheme.tag(),
            method,
            self.lu_threshold,
            self.energy_coordinate,
            self.scan_start,
            self.scan_stop,
            self.scan_count,
            join(&self.scan_values),
            fd_step,
            self.step_halving,
            self.richardson,
            self.pfa,
            baseline,
            self.voxels,
            join(&self.sphere_ladder),
            join(&self.sphere_tolerances),
            self.london_radius_nm,
            join(&self.london_distances_nm),
            join(&self.london_tolerances),
            self.london_divisions,
            self.multipole_tolerance,
            self.multipole_l_max,
            self.quadrature_tolerance,
            self.convergence_steps,
            self.convergence_tolerance,
            self.node_tolerance,
        );
        s
    }

    /// The echo as `#` comment lines for artifact headers.
    pub fn header(&self) -> String {
        self.echo()
            .lines()
            .filter(|l| !l.is_empty())
            .map(|l| format!("# {l}\n"))
            .collect()
    }
}

/// Parses and validates a configuration; absent keys keep their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut lines: HashMap<String, usize> = HashMap::new();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| ConfigError {
                key: line.into(),
                line: line_no,
                msg: "unterminated section header".into(),
            })?;
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError {
            key: line.into(),
            line: line_no,
            msg: "expected `key = value`".into(),
        })?;
        let full = format!("{section}.{}", key.trim());
        if let Some(first) = lines.get(&full) {
            return Err(ConfigError {
                key: full.clone(),
                line: line_no,
                msg: format!("duplicate key, first set on line {first}"),
            });
        }
        cfg.set(&full, value.trim()).map_err(|msg| ConfigError {
            key: full.clone(),
            line: line_no,
            msg,
        })?;
        lines.insert(full, line_no);
    }
    cfg.validate_with_lines(&lines)?;
    Ok(cfg)
}
