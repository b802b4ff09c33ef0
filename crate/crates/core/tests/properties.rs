use ale_fsi::config::parse_config;
use ale_fsi::extension::harmonic_extension;
use ale_fsi::fem::{assemble_stokes_blocks, DofMap, FieldPair, NOT_FREE};
use ale_fsi::mesh::{
    generate_mesh, read_mesh_str, write_mesh_string, Geometry, Mesh2D, NodeTag, Point,
};
use ale_fsi::output::{read_trajectory_csv, write_trajectory_csv};
use ale_fsi::rigid_body::{
    hydrodynamic_load_boundary, trajectory_update, Load, RigidParams, RigidState, RigidTrajectory,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mesh(radius: f64, h: f64) -> Mesh2D {
    generate_mesh(&Geometry::unit_box([0.5, 0.5], radius, h)).unwrap()
}

fn geometry() -> impl Strategy<Value = (f64, f64)> {
    (0.06..0.15f64, 0.05..0.1f64)
}

fn point() -> impl Strategy<Value = Point> {
    [-1.0..1.0f64, -1.0..1.0f64]
}

fn load() -> impl Strategy<Value = Load> {
    (point(), -1.0..1.0f64).prop_map(|(force, torque)| Load { force, torque })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn moving_back_restores_the_mesh((radius, h) in geometry(), seed in any::<u64>(), scale in 0.0..0.3f64) {
        let m = mesh(radius, h);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let disp: Vec<Point> = (0..m.node_count())
            .map(|_| [scale * h * rng.gen_range(-1.0..1.0), scale * h * rng.gen_range(-1.0..1.0)])
            .collect();
        if let Ok(moved) = m.move_nodes(&disp) {
            prop_assert!(moved.signed_areas().iter().all(|&a| a > 0.0));
            let back: Vec<Point> = disp.iter().map(|d| [-d[0], -d[1]]).collect();
            let restored = moved.move_nodes(&back).unwrap();
            for i in 0..m.node_count() {
                let (a, b) = (m.node(i), restored.node(i));
                prop_assert!((a[0] - b[0]).abs() <= 1e-14 && (a[1] - b[1]).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn boundary_edges_are_either_wall_or_body((radius, h) in geometry()) {
        let m = mesh(radius, h);
        let (mut walls, mut body) = (0, 0);
        for be in m.boundary_edges() {
            let [a, b] = m.edges()[be.edge];
            for v in [a, b] {
                let p = m.vertices()[v];
                let on_circle = ((p[0] - 0.5).hypot(p[1] - 0.5) - radius).abs() < 1e-12;
                let on_box = [p[0], p[1], 1.0 - p[0], 1.0 - p[1]].iter().any(|c| c.abs() < 1e-12);
                match be.tag {
                    NodeTag::Body => prop_assert!(on_circle && !on_box),
                    NodeTag::Wall => prop_assert!(on_box && !on_circle),
                    NodeTag::Interior => prop_assert!(false, "untagged boundary edge"),
                }
            }
            match be.tag {
                NodeTag::Body => body += 1,
                _ => walls += 1,
            }
        }
        prop_assert!(walls > 0 && body > 0);
    }

    #[test]
    fn fluid_area_is_close_to_exact(radius in 0.06..0.15f64, h in 0.05..0.07f64) {
        let m = mesh(radius, h);
        let exact = 1.0 - std::f64::consts::PI * radius * radius;
        prop_assert!((m.total_area() - exact).abs() / exact < 0.02);
    }

    #[test]
    fn mesh_text_round_trips((radius, h) in geometry()) {
        let m = mesh(radius, h);
        let text = write_mesh_string(&m);
        let back = read_mesh_str(&text).unwrap();
        prop_assert_eq!(back.vertices(), m.vertices());
        prop_assert_eq!(back.triangles(), m.triangles());
        prop_assert_eq!(back.vertex_tags(), m.vertex_tags());
        prop_assert_eq!(write_mesh_string(&back), text);
        // edge nodes are rebuilt on load
        for (a, b) in back.edge_midpoints().iter().zip(m.edge_midpoints()) {
            prop_assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn viscous_block_is_positive_and_deterministic(seed in any::<u64>(), mu in 0.01..10.0f64) {
        let m = mesh(0.1, 0.1);
        let dofs = DofMap::new(&m);
        let blocks = assemble_stokes_blocks(&m, mu);
        prop_assert_eq!(&blocks.a, &assemble_stokes_blocks(&m, mu).a);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..dofs.velocity_dofs())
            .map(|i| if dofs.free_index(i) == NOT_FREE { 0.0 } else { rng.gen_range(-1.0..1.0) })
            .collect();
        prop_assert!(blocks.a.bilinear(&x, &x) > 0.0);
    }

    #[test]
    fn extension_is_linear_in_the_rigid_data(v1 in point(), v2 in point(), w1 in -5.0..5.0f64, w2 in -5.0..5.0f64) {
        let m = mesh(0.1, 0.08);
        let q = [0.5, 0.5];
        let a = harmonic_extension(&m, q, v1, w1).unwrap();
        let b = harmonic_extension(&m, q, v2, w2).unwrap();
        let s = harmonic_extension(&m, q, [v1[0] + v2[0], v1[1] + v2[1]], w1 + w2).unwrap();
        for i in 0..m.node_count() {
            for c in 0..2 {
                prop_assert!((s.values[i][c] - a.values[i][c] - b.values[i][c]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn extension_ignores_a_common_shift(shift in point(), v in point(), w in -5.0..5.0f64) {
        let m = mesh(0.1, 0.08);
        let shifted = m.move_nodes(&vec![shift; m.node_count()]).unwrap();
        let a = harmonic_extension(&m, [0.5, 0.5], v, w).unwrap();
        let b = harmonic_extension(&shifted, [0.5 + shift[0], 0.5 + shift[1]], v, w).unwrap();
        for i in 0..m.node_count() {
            for c in 0..2 {
                prop_assert!((a.values[i][c] - b.values[i][c]).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn constant_pressure_exerts_no_load(p in -100.0..100.0f64, q in point()) {
        let m = mesh(0.1, 0.08);
        let mut field = FieldPair::zeros(&m);
        field.pressure.iter_mut().for_each(|x| *x = p);
        let l = hydrodynamic_load_boundary(&m, &field, [0.5 + 0.1 * q[0], 0.5 + 0.1 * q[1]], 1.0);
        prop_assert!(l.force[0].abs().max(l.force[1].abs()).max(l.torque.abs()) <= 1e-12 * p.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trajectory_update_is_linear_in_the_loads(
        pairs in prop::collection::vec((load(), load()), 1..30),
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
    ) {
        let params = RigidParams { gravity: [0.0, 0.0], ..RigidParams::new(5.0, 0.1) };
        let rest = RigidState::at_rest([0.0, 0.0]);
        let (l1, l2): (Vec<Load>, Vec<Load>) = pairs.into_iter().unzip();
        let combo: Vec<Load> = l1
            .iter()
            .zip(&l2)
            .map(|(x, y)| Load {
                force: [a * x.force[0] + b * y.force[0], a * x.force[1] + b * y.force[1]],
                torque: a * x.torque + b * y.torque,
            })
            .collect();
        let t1 = trajectory_update(&l1, &params, rest, 0.01).unwrap();
        let t2 = trajectory_update(&l2, &params, rest, 0.01).unwrap();
        let tc = trajectory_update(&combo, &params, rest, 0.01).unwrap();
        for ((s1, s2), sc) in t1.states.iter().zip(&t2.states).zip(&tc.states) {
            let (x1, x2, xc) = (s1.as_array(), s2.as_array(), sc.as_array());
            for i in 0..5 {
                prop_assert!((xc[i] - a * x1[i] - b * x2[i]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn trajectory_csv_round_trips(
        rows in prop::collection::vec(prop::array::uniform5(-1e3..1e3f64), 2..40),
        tau in 1e-6..1.0f64,
    ) {
        let traj = RigidTrajectory {
            tau,
            states: rows.iter().map(|r| RigidState { q: [r[0], r[1]], v: [r[2], r[3]], omega: r[4] }).collect(),
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_trajectory_csv(&traj, &path).unwrap();
        prop_assert_eq!(read_trajectory_csv(&path).unwrap(), traj);
    }

    #[test]
    fn config_values_round_trip(
        h in 0.01..0.2f64,
        rho in 1e-3..10.0f64,
        mu in 1e-3..10.0f64,
        tau in 1e-5..1e-2f64,
        steps in 1usize..500,
    ) {
        let text = format!("# generated\nh = {h:?}\nrho = {rho:?}\nmu = {mu:?}\ntau = {tau:?}\nT = {:?}\n", tau * steps as f64);
        let cfg = parse_config(&text).unwrap();
        prop_assert_eq!(cfg.h, h);
        prop_assert_eq!(cfg.fluid.density, rho);
        prop_assert_eq!(cfg.fluid.viscosity, mu);
        prop_assert_eq!(cfg.iteration.tau, tau);
        prop_assert_eq!(cfg.iteration.steps().unwrap(), steps);
    }
}
