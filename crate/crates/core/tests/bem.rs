use std::f64::consts::PI;

use proptest::prelude::*;
use vdw_bem::bem::{
    assemble_kernel, assemble_kernel_with, interaction_energy, interaction_logdet,
    interaction_logdet_lu, logdet_lu, logdet_spectral, spectrum, EnergySolver, KernelScheme,
};
use vdw_bem::geometry::{
    apply_motion, make_box_cylinder, make_circular_cylinder, make_sphere, MeshResolution, Point3,
    RigidMotion, SurfaceMesh, UnitVec3,
};
use vdw_bem::material::DrudeModel;
use vdw_bem::quadrature::make_frequency_grid;

fn res(n: usize) -> MeshResolution {
    MeshResolution::new(n).unwrap()
}

fn moved(m: &SurfaceMesh, motion: &RigidMotion) -> SurfaceMesh {
    apply_motion(m, motion)
}

/// Two small boxes, the second lifted by `h + gap`, shifted by `dx` and
/// turned by `angle` about its own axis.
fn box_pair(l: f64, gap: f64, dx: f64, angle: f64, n: usize) -> Vec<SurfaceMesh> {
    let a = make_box_cylinder(l, l, l, res(n)).unwrap();
    let b = moved(
        &make_box_cylinder(l, 1.3 * l, 0.8 * l, res(n)).unwrap(),
        &RigidMotion::rotation_z(angle).then(&RigidMotion::translation(Point3::new(dx, 0.0, l + gap))),
    );
    vec![a, b.with_label("upper")]
}

fn energy(meshes: &[SurfaceMesh]) -> f64 {
    let grid = make_frequency_grid(9.0, 24).unwrap();
    interaction_energy(meshes, &DrudeModel::gold(), &grid).unwrap().energy
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn config() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (2.0..20.0f64, 0.2..1.5f64, -0.5..0.5f64, 0.0..PI)
        .prop_map(|(l, g, x, a)| (l, g * l, x * l, a))
}

fn axis() -> impl Strategy<Value = UnitVec3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("axis", |(x, y, z)| x * x + y * y + z * z > 1e-2)
        .prop_map(|(x, y, z)| UnitVec3::normalize(Point3::new(x, y, z)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn spectral_and_lu_determinants_agree((l, gap, dx, angle) in config(), log_lambda in 0.8..4.0f64) {
        let k = assemble_kernel(&box_pair(l, gap, dx, angle, 3)).unwrap();
        let lambda = 10f64.powf(log_lambda);
        let s = logdet_spectral(&spectrum(&k).unwrap(), lambda).unwrap();
        let u = logdet_lu(&k, lambda).unwrap();
        prop_assert!((s - u).abs() <= 1e-8 * s.abs().max(1.0), "{} {}", s, u);
        let ds = interaction_logdet(&k, lambda).unwrap();
        let du = interaction_logdet_lu(&k, lambda).unwrap();
        prop_assert!((ds - du).abs() <= 1e-8 * ds.abs().max(1.0), "{} {}", ds, du);
    }

    #[test]
    fn energy_is_attractive((l, gap, dx, angle) in config()) {
        prop_assert!(energy(&box_pair(l, gap, dx, angle, 3)) < 0.0);
    }

    #[test]
    fn translation_leaves_energy_unchanged(
        (l, gap, dx, angle) in config(),
        t in (-100.0..100.0f64, -100.0..100.0f64, -100.0..100.0f64),
    ) {
        let meshes = box_pair(l, gap, dx, angle, 3);
        let shift = RigidMotion::translation(Point3::new(t.0, t.1, t.2));
        let shifted: Vec<_> = meshes.iter().map(|m| moved(m, &shift)).collect();
        let (e0, e1) = (energy(&meshes), energy(&shifted));
        prop_assert!(rel(e1, e0) < 1e-10, "{} {}", e0, e1);
    }

    #[test]
    fn rotation_leaves_energy_unchanged((l, gap, dx, angle) in config(), ax in axis(), turn in -PI..PI) {
        let meshes = box_pair(l, gap, dx, angle, 3);
        let r = RigidMotion::rotation_about(ax, turn);
        let turned: Vec<_> = meshes.iter().map(|m| moved(m, &r)).collect();
        let (e0, e1) = (energy(&meshes), energy(&turned));
        prop_assert!(rel(e1, e0) < 1e-9, "{} {}", e0, e1);
    }

    #[test]
    fn body_order_does_not_matter((l, gap, dx, angle) in config()) {
        let meshes = box_pair(l, gap, dx, angle, 3);
        let swapped = vec![meshes[1].clone(), meshes[0].clone()];
        let (e0, e1) = (energy(&meshes), energy(&swapped));
        prop_assert!(rel(e1, e0) < 1e-12, "{} {}", e0, e1);
    }
}

#[test]
fn quarter_turns_of_box_meshes_are_exact() {
    let meshes = box_pair(10.0, 4.0, 2.0, 0.0, 4);
    let e0 = energy(&meshes);
    for q in 1..4 {
        let r = RigidMotion::rotation_z(q as f64 * PI / 2.0);
        let turned: Vec<_> = meshes.iter().map(|m| moved(m, &r)).collect();
        assert!(rel(energy(&turned), e0) < 1e-9);
    }
}

#[test]
fn zeroed_cross_blocks_give_no_interaction() {
    let mut k = assemble_kernel(&box_pair(10.0, 3.0, 1.0, 0.3, 3)).unwrap();
    k.zero_cross_blocks();
    for lambda in [7.0, 20.0, 1e3] {
        assert_eq!(interaction_logdet(&k, lambda).unwrap(), 0.0);
        assert_eq!(interaction_logdet_lu(&k, lambda).unwrap(), 0.0);
        // The same difference taken the long way, through the full spectrum.
        let full = logdet_spectral(&spectrum(&k).unwrap(), lambda).unwrap();
        let parts: f64 = (0..2)
            .map(|b| logdet_spectral(&spectrum(&k.block(b)).unwrap(), lambda).unwrap())
            .sum();
        assert!((full - parts).abs() < 1e-12 * full.abs(), "{full} {parts}");
    }
}

#[test]
fn point_kernel_has_zero_diagonal_and_trace() {
    let meshes = box_pair(10.0, 3.0, 1.0, 0.3, 4);
    let k = assemble_kernel_with(&meshes, KernelScheme::PointCollocation).unwrap();
    let n = k.dim();
    assert!((0..n).all(|i| k.get(i, i) == 0.0));
    // Panels on the same flat face see each other edge-on.
    let base = &meshes[0].panels()[..16];
    assert!(base.iter().all(|p| p.centroid.z == 0.0));
    for i in 0..16 {
        for j in 0..16 {
            assert_eq!(k.get(i, j), 0.0);
        }
    }
    let sum = spectrum(&k).unwrap().sum();
    assert!(sum.norm() < 1e-8 * k.max_abs() * n as f64, "{sum}");
}

#[test]
fn spectrum_is_closed_under_conjugation() {
    let k = assemble_kernel(&box_pair(10.0, 2.0, 3.0, 0.7, 3)).unwrap();
    let eig = spectrum(&k).unwrap();
    let values = eig.eigenvalues();
    for z in values.iter().filter(|z| z.im.abs() > 1e-10) {
        let found = values.iter().any(|w| (w.re - z.re).abs() < 1e-9 && (w.im + z.im).abs() < 1e-9);
        assert!(found, "no conjugate for {z}");
    }
}

#[test]
fn spectrum_is_scale_invariant() {
    let base = box_pair(10.0, 2.0, 3.0, 0.7, 3);
    let reference = spectrum(&assemble_kernel(&base).unwrap()).unwrap().sorted_real();
    for s in [0.5, 2.0] {
        let scaled: Vec<_> = base
            .iter()
            .map(|m| {
                let panels = m
                    .panels()
                    .iter()
                    .map(|p| vdw_bem::geometry::Panel::new(p.centroid * s, p.normal, p.area * s * s).unwrap())
                    .collect();
                SurfaceMesh::new(panels, m.label(), m.description()).unwrap()
            })
            .collect();
        let k = assemble_kernel(&scaled).unwrap();
        let got = spectrum(&k).unwrap().sorted_real();
        let worst = reference
            .iter()
            .zip(&got)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10 * k.max_abs(), "s={s}: {worst}");
    }
}

#[test]
fn lu_route_matches_spectral_route_for_energy() {
    let meshes = vec![
        make_sphere(2.0, res(5)).unwrap(),
        moved(
            &make_circular_cylinder(3.0, 2.0, res(4)).unwrap(),
            &RigidMotion::translation(Point3::new(0.5, 0.0, 3.0)),
        ),
    ];
    let grid = make_frequency_grid(9.0, 32).unwrap();
    let gold = DrudeModel::gold();
    let spectral = EnergySolver::default().energy(&meshes, &gold, &grid).unwrap();
    let lu = EnergySolver {
        method: Some(vdw_bem::bem::DeterminantMethod::Lu),
        ..EnergySolver::default()
    }
    .energy(&meshes, &gold, &grid)
    .unwrap();
    assert!(rel(lu.energy, spectral.energy) < 1e-8);
    let summed: f64 = spectral.weights.iter().zip(&spectral.integrand).map(|(w, f)| w * f).sum();
    assert!(rel(summed, spectral.energy) < 1e-14);
}

#[test]
fn energy_is_independent_of_worker_count() {
    let meshes = box_pair(10.0, 3.0, 1.0, 0.3, 3);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| energy(&meshes))
    };
    assert_eq!(run(1).to_bits(), run(4).to_bits());
}

#[test]
fn overlapping_bodies_are_rejected() {
    let a = make_box_cylinder(4.0, 4.0, 4.0, res(3)).unwrap();
    assert!(assemble_kernel(&[a.clone(), a]).is_err());
}
