use ale_fsi_demo::ops::{box_mesh, fall, flat_triangles, flat_vertices, steady_loads};

#[test]
fn flat_arrays_describe_the_mesh() {
    let mesh = box_mesh(0.1, 0.1).unwrap();
    let v = flat_vertices(&mesh);
    let t = flat_triangles(&mesh);
    assert_eq!(v.len(), 2 * mesh.vertex_count());
    assert_eq!(t.len(), 3 * mesh.triangle_count());
    assert!(t.iter().all(|&i| (i as usize) < mesh.vertex_count()));
    assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
}

#[test]
fn drag_opposes_motion_and_both_integrals_agree() {
    let mesh = box_mesh(0.08, 0.1).unwrap();
    let out = steady_loads(&mesh, [1.0, 0.0], 0.0, 1.0).unwrap();
    assert!(out.boundary.force[0] < 0.0);
    let gap = (out.bulk.force[0] - out.boundary.force[0]).abs() / out.boundary.force[0].abs();
    assert!(gap < 0.1, "{gap}");
    assert_eq!(out.speed.len(), mesh.vertex_count());
    let top = out.speed.iter().cloned().fold(0.0, f64::max);
    assert!(
        (top - 1.0).abs() < 1e-9,
        "disk nodes move at unit speed, got {top}"
    );
}

#[test]
fn short_fall_contracts() {
    let (rows, failure) = fall(0.1, 200.0 / std::f64::consts::PI, 0.01, 1e-3, 3).unwrap();
    assert!(failure.is_none());
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.v_y < 0.0 && r.q_y < 0.5));
    assert!(rows[2].distance < rows[1].distance);
}

#[test]
fn bad_mesh_size_is_an_error() {
    assert!(box_mesh(-1.0, 0.1).is_err());
    assert!(fall(0.1, 1.0, 0.01, 3e-3, 1).is_err());
}
