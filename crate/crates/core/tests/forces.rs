use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;
use vdw_bem::forces::{
    central_difference, central_difference_richardson, linspace, run_scan, CrossSection, ScanResult,
    ScanSpec, Scenario,
};

/// Largest gap between the trapezoid-integrated force and the energy change
/// from the first sample, relative to the largest energy change in the scan.
fn cumulative_mismatch(r: &ScanResult) -> f64 {
    let steps = r.integrated_force();
    let mut acc = 0.0;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (i, s) in steps.iter().enumerate() {
        acc += s;
        let de = r.energy[i + 1] - r.energy[0];
        worst = worst.max((acc + de).abs());
        scale = scale.max(de.abs());
    }
    worst / scale
}

fn spec(scenario: Scenario, cs: CrossSection, samples: Vec<f64>, n: usize, refine: f64) -> ScanSpec {
    let mut s = ScanSpec::new(scenario, cs, 10.0, 10.0).with_samples(samples);
    s.divisions = n;
    s.refinement = refine;
    s.grid_nodes = 32;
    s
}

#[test]
fn normal_scan_is_attractive_and_integrates_back() {
    let r = run_scan(&spec(
        Scenario::NormalToSubstrate,
        CrossSection::Square,
        linspace(3.0, 6.0, 16),
        4,
        2.0,
    ))
    .unwrap();
    assert!(r.force.iter().all(|&f| f < 0.0), "{:?}", r.force);
    assert!(r.energy.windows(2).all(|w| w[1] > w[0]));
    let m = cumulative_mismatch(&r);
    assert!(m < 0.005, "trapezoid mismatch {m}");
    for d in &r.diagnostics {
        assert!(d.step_change.unwrap() < 1e-3, "{:?}", d.step_change);
    }
    let pfa = r.pfa_force.as_ref().unwrap();
    assert!(pfa.iter().all(|&f| f < 0.0));
    assert_eq!(r.rel_diff.as_ref().unwrap().len(), r.coord.len());
}

#[test]
fn lateral_scan_is_odd_and_integrates_back() {
    let r = run_scan(&spec(
        Scenario::LateralPair,
        CrossSection::Square,
        linspace(-10.0, 10.0, 41),
        4,
        1.0,
    ))
    .unwrap();
    let peak = r.force.iter().fold(0.0f64, |m, f| m.max(f.abs()));
    let mid = r.coord.len() / 2;
    assert_eq!(r.coord[mid], 0.0);
    assert!(r.force[mid].abs() < 1e-3 * peak, "F(0) = {}", r.force[mid]);
    for i in 0..mid {
        let j = r.coord.len() - 1 - i;
        assert!((r.force[i] + r.force[j]).abs() < 1e-3 * peak);
    }
    // Restoring: pushes back towards alignment.
    assert!(r.force[mid + 4] < 0.0 && r.force[mid - 4] > 0.0);
    let m = cumulative_mismatch(&r);
    assert!(m < 0.005, "trapezoid mismatch {m}");
}

#[test]
fn torque_scan_vanishes_at_symmetric_angles() {
    let r = run_scan(&spec(
        Scenario::TorquePair,
        CrossSection::Rectangular { aspect: 2.0 },
        linspace(0.0, FRAC_PI_2, 25),
        4,
        1.0,
    ))
    .unwrap();
    let peak = r.force.iter().fold(0.0f64, |m, f| m.max(f.abs()));
    let last = r.coord.len() - 1;
    assert!(r.force[0].abs() < 1e-3 * peak, "τ(0) = {}", r.force[0]);
    assert!(r.force[last].abs() < 1e-3 * peak, "τ(π/2) = {}", r.force[last]);
    // Aligned is the energy minimum, so the torque turns the body back.
    assert!(r.force[1..last].iter().all(|&t| t < 0.0));
    assert!(r.energy[0] < r.energy[last]);
    let m = cumulative_mismatch(&r);
    assert!(m < 0.005, "trapezoid mismatch {m}");
}

#[test]
fn remeshing_one_step_changes_little_at_the_smallest_gap() {
    let energy = |n| {
        run_scan(&{
            let mut s = spec(Scenario::NormalToSubstrate, CrossSection::Square, vec![2.0], n, 2.0);
            s.step_halving = false;
            s
        })
        .unwrap()
        .energy[0]
    };
    let (e6, e8) = (energy(6), energy(8));
    assert!(((e8 - e6) / e8).abs() < 0.02, "{e6} {e8}");
}

#[test]
fn scans_do_not_depend_on_worker_count() {
    let s = spec(
        Scenario::NormalToSubstrate,
        CrossSection::Circular,
        vec![2.0, 3.0, 4.0],
        4,
        1.0,
    );
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_scan(&s).unwrap().to_csv())
    };
    assert_eq!(run(1), run(3));
}

proptest! {
    #[test]
    fn stencils_are_exact_for_quadratics(
        a in -10.0..10.0f64,
        b in -10.0..10.0f64,
        c in -10.0..10.0f64,
        x0 in -5.0..5.0f64,
        h in 0.01..1.0f64,
        n in 3usize..12,
    ) {
        let xs: Vec<f64> = (0..n).map(|i| x0 + i as f64 * h).collect();
        let ys: Vec<f64> = xs.iter().map(|x| a * x * x + b * x + c).collect();
        let d = central_difference(&ys, h).unwrap();
        let scale = 1.0 + (a * x0).abs() + a.abs() * n as f64 * h + b.abs();
        for (x, g) in xs.iter().zip(&d) {
            prop_assert!((g - (2.0 * a * x + b)).abs() < 1e-9 * scale / h);
        }
        if n >= 5 {
            let r = central_difference_richardson(&ys, h).unwrap();
            for (x, g) in xs.iter().zip(&r) {
                prop_assert!((g - (2.0 * a * x + b)).abs() < 1e-8 * scale / h);
            }
        }
    }
}
