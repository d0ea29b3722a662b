//! Subcommand implementations. Each writes its artifacts into the output
//! directory and returns a one-line summary.

use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use vdw_bem::baselines::{
    hamaker_constant, lifshitz_energy_per_area, lj_pairwise_energy, pfa_normal_force, voxelize,
    HalfSpacePair, VoxelBody, VoxelShape,
};
use vdw_bem::forces::{run_scan, CrossSection, Scenario};
use vdw_bem::geometry::{read_mesh, write_mesh, Point3};
use vdw_bem::quadrature::{make_frequency_grid, FrequencyGrid};
use vdw_bem::validation::{reports_to_csv, run_suite};

use crate::config::{BaselineKind, ConfigError, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("vdw-bem: {0}")]
    Core(#[from] vdw_bem::Error),
    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("validate: {failed} of {total} oracles failed")]
    OracleFailure { failed: usize, total: usize },
    #[error("convergence: {0}")]
    NotConverged(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Mesh,
    Energy,
    Scan,
    Baseline,
    Validate,
    Convergence,
}

/// Options that do not belong in the physics configuration.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub emit_integrand: bool,
}

fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn grid(cfg: &RunConfig) -> CliResult<FrequencyGrid> {
    Ok(make_frequency_grid(cfg.grid_scale_ev, cfg.grid_nodes)?)
}

fn coord_unit(cfg: &RunConfig) -> &'static str {
    if cfg.scenario == Scenario::TorquePair {
        "rad"
    } else {
        "nm"
    }
}

pub fn run(command: Command, cfg: &RunConfig, opts: &RunOptions) -> CliResult<String> {
    match command {
        Command::Mesh => mesh(cfg, opts),
        Command::Energy => energy(cfg, opts),
        Command::Scan => scan(cfg, opts),
        Command::Baseline => baseline(cfg, opts),
        Command::Validate => validate(cfg, opts),
        Command::Convergence => convergence(cfg, opts),
    }
}

fn mesh(cfg: &RunConfig, opts: &RunOptions) -> CliResult<String> {
    let meshes = cfg.scan_spec().configuration(cfg.energy_coordinate)?;
    let mut summary = Vec::new();
    for (i, m) in meshes.iter().enumerate() {
        let mut buf = Vec::new();
        write_mesh(m, &mut buf)?;
        let text = String::from_utf8(buf).expect("mesh writer emits UTF-8");
        let path = write_file(&opts.out_dir, &format!("mesh_{i}.txt"), &text)?;
        let file = fs::File::open(&path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        let back = read_mesh(BufReader::new(file))?;
        back.check_closed()?;
        summary.push(format!("{} ({} panels, closed)", back.label(), back.len()));
    }
    Ok(format!("mesh: wrote {}", summary.join(", ")))
}

fn energy(cfg: &RunConfig, opts: &RunOptions) -> CliResult<String> {
    let spec = cfg.scan_spec();
    let meshes = spec.configuration(cfg.energy_coordinate)?;
    let grid = grid(cfg)?;
    let result = cfg.solver().energy(&meshes, &spec.material, &grid)?;
    let mut s = cfg.header();
    let _ = writeln!(s, "# units: coordinate {}, energy_ev eV", coord_unit(cfg));
    s.push_str("scenario,coordinate,n_panels,nodes,method,scheme,energy_ev\n");
    let _ = writeln!(
        s,
        "{},{:e},{},{},{},{},{:e}",
        cfg.scenario.tag(),
        cfg.energy_coordinate,
        result.n_panels,
        result.n_nodes(),
        result.method.tag(),
        result.scheme.tag(),
        result.energy
    );
    write_file(&opts.out_dir, "energy.csv", &s)?;
    if opts.emit_integrand {
        let mut t = cfg.header();
        t.push_str("# units: xi_ev eV, integrand dimensionless (energy = sum of weight * integrand)\n");
        t.push_str("xi_ev,integrand\n");
        t.push_str(&result.integrand_csv());
        write_file(&opts.out_dir, "integrand.csv", &t)?;
    }
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    Ok(format!(
        "energy: {:e} eV ({} panels, {} nodes, {})",
        result.energy,
        result.n_panels,
        result.n_nodes(),
        result.method.tag()
    ))
}

fn scan(cfg: &RunConfig, opts: &RunOptions) -> CliResult<String> {
    let result = run_scan(&cfg.scan_spec())?;
    let mut s = cfg.header();
    s.push_str(&result.csv_body());
    write_file(&opts.out_dir, "scan.csv", &s)?;
    for w in result.warnings() {
        eprintln!("warning: {w}");
    }
    let peak = result.force.iter().fold(0.0f64, |m, f| m.max(f.abs()));
    Ok(format!(
        "scan: {} {} points, peak |force| {:e} {}",
        cfg.scenario.tag(),
        result.coord.len(),
        peak,
        result.force_unit()
    ))
}

fn voxel_shape(cfg: &RunConfig) -> VoxelShape {
    let (l, h) = (cfg.length_nm, cfg.h_nm);
    match cfg.cross_section() {
        CrossSection::Circular => VoxelShape::Cylinder { diameter: l, h },
        CrossSection::Square => VoxelShape::Box { lx: l, ly: l, h },
        CrossSection::Rectangular { aspect } => VoxelShape::Box {
            lx: l,
            ly: aspect * l,
            h,
        },
    }
}

fn rotate_z(body: &VoxelBody, angle: f64, lift: f64) -> VoxelBody {
    let (s, c) = angle.sin_cos();
    VoxelBody {
        centers: body
            .centers
            .iter()
            .map(|p| Point3::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z + lift))
            .collect(),
        ..body.clone()
    }
}

fn baseline(cfg: &RunConfig, opts: &RunOptions) -> CliResult<String> {
    let grid = grid(cfg)?;
    let material = cfg.material();
    let samples = cfg.samples();
    let mut s = cfg.header();
    match cfg.baseline {
        BaselineKind::Pfa => {
            let area = cfg.cross_section().base_area(cfg.length_nm);
            let _ = writeln!(
                s,
                "# base_area_nm2 = {area}\n# units: d nm, energy_per_area eV/nm^2, pfa_force eV/nm"
            );
            s.push_str("d,energy_per_area,pfa_force\n");
            for &d in &samples {
                let pair = HalfSpacePair::new(material, d)?;
                let e = lifshitz_energy_per_area(&pair, &grid)?;
                let f = pfa_normal_force(area, &pair, &grid)?;
                let _ = writeln!(s, "{d:e},{e:e},{f:e}");
            }
            write_file(&opts.out_dir, "baseline_pfa.csv", &s)?;
            Ok(format!("baseline: PFA at {} gaps", samples.len()))
        }
        BaselineKind::Lj => {
            let ah = hamaker_constant(&material, &grid)?;
            let body = voxelize(voxel_shape(cfg), cfg.voxels)?;
            let h = cfg.h_nm;
            let _ = writeln!(
                s,
                "# hamaker_ev = {ah:e}\n# voxels_per_body = {}\n# units: offset {}, lj_energy eV",
                body.len(),
                coord_unit(cfg)
            );
            s.push_str("offset,lj_energy\n");
            for &c in &samples {
                let (a, b) = match cfg.scenario {
                    Scenario::NormalToSubstrate => {
                        let up = body.translated(Point3::new(0.0, 0.0, c));
                        let image = VoxelBody {
                            centers: up.centers.iter().map(|p| Point3::new(p.x, p.y, -p.z)).collect(),
                            ..up.clone()
                        };
                        (up, image)
                    }
                    Scenario::LateralPair => (
                        body.clone(),
                        body.translated(Point3::new(c, 0.0, h + cfg.gap_nm)),
                    ),
                    Scenario::TorquePair => (body.clone(), rotate_z(&body, c, h + cfg.gap_nm)),
                };
                let u = lj_pairwise_energy(&a, &b, ah)?;
                let _ = writeln!(s, "{c:e},{u:e}");
            }
            write_file(&opts.out_dir, "baseline_lj.csv", &s)?;
            Ok(format!(
                "baseline: pairwise sum at {} offsets, A_H = {ah:e} eV",
                samples.len()
            ))
        }
    }
}

fn validate(cfg: &RunConfig, opts: &RunOptions) -> CliResult<String> {
    let grid = grid(cfg)?;
    let reports = run_suite(&cfg.material(), &grid, &cfg.suite_options())?;
    let mut s = cfg.header();
    s.push_str(&reports_to_csv(&reports));
    write_file(&opts.out_dir, "validate.csv", &s)?;
    for r in &reports {
        println!("{}", r.csv_row());
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::OracleFailure {
            failed,
            total: reports.len(),
        });
    }
    Ok(format!("validate: all {} oracles passed", reports.len()))
}

fn convergence(cfg: &RunConfig, opts: &RunOptions) -> CliResult<String> {
    let grid = grid(cfg)?;
    let fine_grid = make_frequency_grid(cfg.grid_scale_ev, 2 * cfg.grid_nodes)?;
    let coord = cfg.samples()[0];
    let mut s = cfg.header();
    let _ = writeln!(
        s,
        "# coordinate = {coord} {}\n# units: energy_ev eV, rel_change relative to the previous row",
        coord_unit(cfg)
    );
    s.push_str("kind,divisions,nodes,n_panels,energy_ev,rel_change\n");
    let mut spec = cfg.scan_spec();
    let solver = cfg.solver();
    let mut previous: Option<f64> = None;
    let mut mesh_change = 0.0;
    for step in 0..=cfg.convergence_steps {
        spec.divisions = cfg.divisions + 2 * step;
        let meshes = spec.configuration(coord)?;
        let r = solver.energy(&meshes, &spec.material, &grid)?;
        let change = previous.map(|p| ((r.energy - p) / p).abs());
        if let Some(c) = change {
            mesh_change = c;
        }
        let _ = writeln!(
            s,
            "mesh,{},{},{},{:e},{}",
            spec.divisions,
            grid.len(),
            r.n_panels,
            r.energy,
            change.map_or(String::new(), |c| format!("{c:e}"))
        );
        previous = Some(r.energy);
    }
    spec.divisions = cfg.divisions;
    let meshes = spec.configuration(coord)?;
    let coarse = solver.energy(&meshes, &spec.material, &grid)?;
    let fine = solver.energy(&meshes, &spec.material, &fine_grid)?;
    let node_change = ((fine.energy - coarse.energy) / coarse.energy).abs();
    let _ = writeln!(
        s,
        "nodes,{},{},{},{:e},{node_change:e}",
        spec.divisions,
        fine_grid.len(),
        fine.n_panels,
        fine.energy
    );
    write_file(&opts.out_dir, "convergence.csv", &s)?;
    let summary = format!(
        "convergence: last mesh step changes E by {mesh_change:.3e}, node doubling by {node_change:.3e}"
    );
    if cfg.convergence_steps > 0 && mesh_change >= cfg.convergence_tolerance {
        return Err(CliError::NotConverged(format!(
            "{summary} (mesh tolerance {})",
            cfg.convergence_tolerance
        )));
    }
    if node_change >= cfg.node_tolerance {
        return Err(CliError::NotConverged(format!(
            "{summary} (node tolerance {})",
            cfg.node_tolerance
        )));
    }
    Ok(summary)
}
