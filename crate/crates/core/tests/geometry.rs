use std::f64::consts::PI;

use proptest::prelude::*;
use vdw_bem::geometry::{
    apply_motion, make_box_cylinder, make_circular_cylinder, make_sphere, mirror_across_plane,
    read_mesh, write_mesh, FaceSet, MeshResolution, Point3, RigidMotion, SurfaceMesh, UnitVec3,
};

fn res(n: usize) -> MeshResolution {
    MeshResolution::new(n).unwrap()
}

fn closure_ok(m: &SurfaceMesh) -> bool {
    m.closure_vector().norm() <= 1e-9 * m.total_area()
}

fn ceil_div(n: usize, len: f64, c: f64, r: f64) -> usize {
    ((n as f64 * r * len / c - 1e-9).ceil() as usize).max(1)
}

#[test]
fn default_meshes_match_analytic_areas() {
    let b = make_box_cylinder(10.0, 20.0, 15.0, res(6)).unwrap();
    let exact = 2.0 * 200.0 + 2.0 * 10.0 * 15.0 + 2.0 * 20.0 * 15.0;
    assert!((b.total_area() - exact).abs() < 1e-9 * exact);

    let c = make_circular_cylinder(10.0, 10.0, res(6)).unwrap();
    let exact = 2.0 * PI * 25.0 + PI * 10.0 * 10.0;
    assert!(((c.total_area() - exact) / exact).abs() < 0.01, "{}", c.total_area());

    let s = make_sphere(3.0, res(6)).unwrap();
    let exact = 4.0 * PI * 9.0;
    assert!(((s.total_area() - exact) / exact).abs() < 0.01);
}

#[test]
fn curved_areas_are_exact_at_every_resolution() {
    // Curved panels carry their exact surface-patch areas, so the total area
    // has no discretisation error at all.
    let cyl = 2.0 * PI * 25.0 + PI * 10.0 * 10.0;
    let sph = 4.0 * PI * 4.0;
    for n in [2, 4, 8, 16] {
        let c = make_circular_cylinder(10.0, 10.0, res(n)).unwrap().total_area();
        let s = make_sphere(2.0, res(n)).unwrap().total_area();
        assert!(((c - cyl) / cyl).abs() < 1e-12, "n={n}: {c}");
        assert!(((s - sph) / sph).abs() < 1e-12, "n={n}: {s}");
    }
}

#[test]
fn panel_counts_follow_the_documented_formulas() {
    for (n, r) in [(4, 1.0), (6, 2.0), (5, 1.5)] {
        let (lx, ly, h) = (10.0, 25.0, 7.0);
        let m = make_box_cylinder(lx, ly, h, res(n).with_refinement(r, FaceSet::TOP).unwrap()).unwrap();
        let c = lx.min(ly);
        let d = |len, f| ceil_div(n, len, c, f);
        let expected = d(lx, 1.0) * d(ly, 1.0)
            + d(lx, r) * d(ly, r)
            + 2 * d(lx, 1.0) * d(h, 1.0)
            + 2 * d(ly, 1.0) * d(h, 1.0);
        assert_eq!(m.len(), expected, "n={n} r={r}");
    }
    for n in [2, 5, 9] {
        assert_eq!(make_sphere(1.0, res(n)).unwrap().len(), 6 * n * n);
    }
    let n = 6;
    let m = ((n as f64 / 2.0 - 1e-9).ceil() as usize).max(1);
    let k = ((n as f64 / 4.0 - 1e-9).ceil() as usize).max(1);
    let wall = 4 * m * ceil_div(n, 10.0, 10.0, 1.0);
    let cyl = make_circular_cylinder(10.0, 10.0, res(n)).unwrap();
    assert_eq!(cyl.len(), 2 * (m * m + 4 * m * k) + wall);
}

#[test]
fn normals_point_outward() {
    for mesh in [
        make_box_cylinder(4.0, 6.0, 3.0, res(4)).unwrap(),
        make_circular_cylinder(4.0, 3.0, res(5)).unwrap(),
        make_sphere(2.0, res(5)).unwrap(),
    ] {
        let c = mesh.centroid_mean();
        for p in mesh.panels() {
            assert!(p.area > 0.0);
            assert!((p.normal.get().norm() - 1.0).abs() < 1e-12);
            assert!(p.normal.get().dot(p.centroid - c) > 0.0);
        }
    }
}

#[test]
fn mesh_files_round_trip_exactly() {
    let mesh = make_circular_cylinder(7.0, 3.0, res(5).with_refinement(2.0, FaceSet::BASE).unwrap())
        .unwrap()
        .with_label("probe");
    let mut a = Vec::new();
    write_mesh(&mesh, &mut a).unwrap();
    let back = read_mesh(a.as_slice()).unwrap();
    assert_eq!(back.panels(), mesh.panels());
    assert_eq!(back.label(), "probe");
    let mut b = Vec::new();
    write_mesh(&back, &mut b).unwrap();
    assert_eq!(a, b);
}

#[test]
fn malformed_mesh_files_are_rejected() {
    assert!(read_mesh("0 0 0 0 0 1\n".as_bytes()).is_err());
    assert!(read_mesh("0 0 0 0 0 1 -1\n".as_bytes()).is_err());
    assert!(read_mesh("0 0 0 0 0 2 1\n".as_bytes()).is_err());
}

fn unit_axis() -> impl Strategy<Value = UnitVec3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("non-degenerate axis", |(x, y, z)| x * x + y * y + z * z > 1e-2)
        .prop_map(|(x, y, z)| UnitVec3::normalize(Point3::new(x, y, z)).unwrap())
}

fn motion() -> impl Strategy<Value = RigidMotion> {
    (unit_axis(), -PI..PI, -50.0..50.0f64, -50.0..50.0f64, -50.0..50.0f64).prop_map(
        |(axis, angle, x, y, z)| {
            RigidMotion::rotation_about(axis, angle).then(&RigidMotion::translation(Point3::new(x, y, z)))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_meshes_are_closed(
        lx in 0.5..30.0f64,
        ly in 0.5..30.0f64,
        h in 0.5..30.0f64,
        n in 2usize..7,
        r in 1.0..3.0f64,
    ) {
        let refined = res(n).with_refinement(r, FaceSet::BOTH).unwrap();
        prop_assert!(closure_ok(&make_box_cylinder(lx, ly, h, refined).unwrap()));
        prop_assert!(closure_ok(&make_circular_cylinder(lx, h, refined).unwrap()));
        prop_assert!(closure_ok(&make_sphere(lx, res(n)).unwrap()));
    }

    #[test]
    fn rigid_motions_preserve_areas_and_distances(m in motion()) {
        let rot = m.rotation();
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| rot[k][i] * rot[k][j]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - expected).abs() < 1e-12);
            }
        }
        let det = rot[0][0] * (rot[1][1] * rot[2][2] - rot[1][2] * rot[2][1])
            - rot[0][1] * (rot[1][0] * rot[2][2] - rot[1][2] * rot[2][0])
            + rot[0][2] * (rot[1][0] * rot[2][1] - rot[1][1] * rot[2][0]);
        prop_assert!((det - 1.0).abs() < 1e-12);

        let mesh = make_box_cylinder(3.0, 5.0, 2.0, res(3)).unwrap();
        let moved = apply_motion(&mesh, &m);
        let (a, b) = (mesh.panels(), moved.panels());
        for i in 0..a.len() {
            prop_assert_eq!(a[i].area, b[i].area);
            for j in (i + 1..a.len()).step_by(7) {
                let d0 = (a[i].centroid - a[j].centroid).norm();
                let d1 = (b[i].centroid - b[j].centroid).norm();
                prop_assert!((d0 - d1).abs() < 1e-12, "{} vs {}", d0, d1);
            }
        }
        prop_assert!(closure_ok(&moved));
    }

    #[test]
    fn mirror_is_an_involution(z0 in -20.0..20.0f64, lift in 0.1..10.0f64) {
        let mesh = apply_motion(
            &make_circular_cylinder(4.0, 2.0, res(4)).unwrap(),
            &RigidMotion::translation(Point3::new(0.3, -0.2, z0 + lift)),
        );
        let once = mirror_across_plane(&mesh, z0).unwrap();
        let twice = mirror_across_plane(&once, z0).unwrap();
        prop_assert!((once.total_area() - mesh.total_area()).abs() < 1e-12 * mesh.total_area());
        prop_assert!(closure_ok(&once));
        for (p, q) in mesh.panels().iter().zip(twice.panels()) {
            prop_assert!((p.centroid - q.centroid).norm() < 1e-12 * (1.0 + z0.abs() + lift));
            prop_assert!((p.normal.get() - q.normal.get()).norm() < 1e-15);
            prop_assert_eq!(p.area, q.area);
        }
    }
}
