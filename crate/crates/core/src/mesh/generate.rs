use std::f64::consts::PI;

use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use super::{signed_area_of, Circle, Geometry, Mesh2D, NodeTag, Point};
use crate::error::{Error, Result};

/// Smallest interior angle accepted from the generator.
pub const MIN_ANGLE_DEG: f64 = 20.0;

const SMOOTHING_SWEEPS: usize = 4;
const RINGS: usize = 3;

/// Point set fed to the triangulator. Only `free` points may be smoothed.
struct PointSet {
    points: Vec<Point>,
    tags: Vec<NodeTag>,
    free: Vec<bool>,
    constraints: Vec<(usize, usize)>,
}

impl PointSet {
    fn new() -> Self {
        Self {
            points: Vec::new(),
            tags: Vec::new(),
            free: Vec::new(),
            constraints: Vec::new(),
        }
    }

    fn push(&mut self, p: Point, tag: NodeTag, free: bool) -> usize {
        self.points.push(p);
        self.tags.push(tag);
        self.free.push(free);
        self.points.len() - 1
    }

    /// Closed polygon of constraint edges through consecutive indices.
    fn close_loop(&mut self, ids: &[usize]) {
        for k in 0..ids.len() {
            self.constraints.push((ids[k], ids[(k + 1) % ids.len()]));
        }
    }

    fn triangulate(&self) -> Result<Vec<[usize; 3]>> {
        let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::new();
        let mut handles = Vec::with_capacity(self.points.len());
        for p in &self.points {
            let h = cdt
                .insert(Point2::new(p[0], p[1]))
                .map_err(|e| Error::GeometryInfeasible(format!("triangulation failed: {e:?}")))?;
            handles.push(h);
        }
        // duplicate points would alias handles
        let mut slot = vec![usize::MAX; self.points.len()];
        for (i, h) in handles.iter().enumerate() {
            if slot[h.index()] != usize::MAX {
                return Err(Error::GeometryInfeasible("coincident mesh points".into()));
            }
            slot[h.index()] = i;
        }
        for &(a, b) in &self.constraints {
            if cdt.can_add_constraint(handles[a], handles[b]) {
                cdt.add_constraint(handles[a], handles[b]);
            } else if !cdt.exists_constraint(handles[a], handles[b]) {
                return Err(Error::GeometryInfeasible(
                    "boundary constraint edges intersect".into(),
                ));
            }
        }
        let mut triangles = Vec::with_capacity(cdt.num_inner_faces());
        for face in cdt.inner_faces() {
            let [a, b, c] = face.vertices().map(|v| slot[v.fix().index()]);
            if self.tags[a] == NodeTag::Body
                && self.tags[b] == NodeTag::Body
                && self.tags[c] == NodeTag::Body
            {
                // inside the disk polygon
                continue;
            }
            let tri = if signed_area_of(self.points[a], self.points[b], self.points[c]) > 0.0 {
                [a, b, c]
            } else {
                [a, c, b]
            };
            triangles.push(tri);
        }
        Ok(triangles)
    }

    /// Laplacian smoothing of the free points over the triangle graph.
    fn smooth(&mut self, triangles: &[[usize; 3]]) {
        let n = self.points.len();
        let mut neighbours: Vec<Vec<usize>> = vec![Vec::new(); n];
        for t in triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if !neighbours[a].contains(&b) {
                    neighbours[a].push(b);
                }
                if !neighbours[b].contains(&a) {
                    neighbours[b].push(a);
                }
            }
        }
        let old = self.points.clone();
        for i in 0..n {
            if !self.free[i] || neighbours[i].is_empty() {
                continue;
            }
            let m = neighbours[i].len() as f64;
            let sx: f64 = neighbours[i].iter().map(|&j| old[j][0]).sum();
            let sy: f64 = neighbours[i].iter().map(|&j| old[j][1]).sum();
            self.points[i] = [sx / m, sy / m];
        }
    }

    fn into_mesh(self, triangles: Vec<[usize; 3]>, body: Option<Circle>) -> Result<Mesh2D> {
        Mesh2D::from_parts(self.points, triangles, self.tags, body)
    }
}

fn ring(center: Point, radius: f64, count: usize, phase: f64) -> impl Iterator<Item = Point> {
    (0..count).map(move |i| {
        let theta = phase + 2.0 * PI * i as f64 / count as f64;
        [
            center[0] + radius * theta.cos(),
            center[1] + radius * theta.sin(),
        ]
    })
}

/// Ring phase keeping the ring symmetric about the vertical through the
/// centre, staggered between consecutive layers.
fn mirror_phase(count: usize, layer: usize) -> f64 {
    if layer.is_multiple_of(2) {
        PI / 2.0 + PI / count as f64
    } else {
        PI / 2.0
    }
}

fn check_quality(mesh: &Mesh2D) -> Result<()> {
    mesh.check_orientation()?;
    let min_angle = mesh.min_angle_deg();
    if min_angle < MIN_ANGLE_DEG {
        return Err(Error::MeshQualityFailure {
            min_angle_deg: min_angle,
            required_deg: MIN_ANGLE_DEG,
        });
    }
    Ok(())
}

/// Triangulates the box minus the disk: graded rings of nodes around the
/// disk, a triangular lattice over the rest of the box, and a constrained
/// Delaunay triangulation of the union with the box sides and disk chords as
/// constraints.
pub fn generate_mesh(geom: &Geometry) -> Result<Mesh2D> {
    let h = geom.target_h;
    let r = geom.disk_radius;
    let width = geom.box_max[0] - geom.box_min[0];
    let height = geom.box_max[1] - geom.box_min[1];
    if !(h > 0.0 && r > 0.0 && width > 0.0 && height > 0.0) {
        return Err(Error::GeometryInfeasible(
            "mesh size, radius and box extents must be positive".into(),
        ));
    }
    let gap = geom.clearance();
    if gap < 3f64.sqrt() * h {
        return Err(Error::GeometryInfeasible(format!(
            "clearance {gap:.4} between disk and walls leaves room for fewer than two element layers at h = {h}"
        )));
    }

    if geom.grading > 0.0 {
        return generate_graded(geom);
    }

    let mut set = PointSet::new();
    let center = geom.disk_center;

    // body boundary
    let n_body = ((2.0 * PI * r / h).ceil() as usize).max(8);
    let body: Vec<usize> = ring(center, r, n_body, PI / 2.0)
        .map(|p| set.push(p, NodeTag::Body, false))
        .collect();
    set.close_loop(&body);

    // graded rings: each layer is one equilateral row thicker than the last
    let mut radius = r;
    let mut count = n_body;
    let mut outer = r;
    for layer in 0..RINGS {
        let spacing = 2.0 * PI * radius / count as f64;
        let next = radius + spacing * 3f64.sqrt() / 2.0;
        if next + 1.2 * h > r + gap {
            break;
        }
        let next_count = count.max((2.0 * PI * next / h).ceil() as usize);
        for p in ring(center, next, next_count, mirror_phase(next_count, layer)) {
            set.push(p, NodeTag::Interior, false);
        }
        radius = next;
        count = next_count;
        outer = next;
    }
    let outer_spacing = 2.0 * PI * outer / count as f64;

    // box boundary: the sides share the lattice spacing
    let nx = ((width / h).round() as usize).max(2);
    let row_h = h * 3f64.sqrt() / 2.0;
    let ny = ((height / row_h).round() as usize).max(2);
    let dx = width / nx as f64;
    let dy = height / ny as f64;
    let [x0, y0] = geom.box_min;
    let mut wall = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        wall.push(set.push([x0 + i as f64 * dx, y0], NodeTag::Wall, false));
    }
    for j in 0..ny {
        wall.push(set.push([x0 + width, y0 + j as f64 * dy], NodeTag::Wall, false));
    }
    for i in (1..=nx).rev() {
        wall.push(set.push([x0 + i as f64 * dx, y0 + height], NodeTag::Wall, false));
    }
    for j in (1..=ny).rev() {
        wall.push(set.push([x0, y0 + j as f64 * dy], NodeTag::Wall, false));
    }
    set.close_loop(&wall);

    // lattice, kept clear of the outermost ring
    let keep_out = outer + 0.7 * outer_spacing.max(h);
    for j in 1..ny {
        let y = y0 + j as f64 * dy;
        let shifted = j % 2 == 1;
        let (start, end) = if shifted { (0, nx) } else { (1, nx) };
        for i in start..end {
            let x = x0 + (i as f64 + if shifted { 0.5 } else { 0.0 }) * dx;
            if (x - center[0]).hypot(y - center[1]) < keep_out {
                continue;
            }
            set.push([x, y], NodeTag::Interior, true);
        }
    }

    let mut triangles = set.triangulate()?;
    for _ in 0..SMOOTHING_SWEEPS {
        set.smooth(&triangles);
        triangles = set.triangulate()?;
    }
    let mesh = set.into_mesh(triangles, Some(geom.circle()))?;
    check_quality(&mesh)?;
    Ok(mesh)
}

/// Element size as a function of distance from the disk centre, tabulated at
/// the ring radii.
struct SizeTable {
    radii: Vec<f64>,
    sizes: Vec<f64>,
}

impl SizeTable {
    fn at(&self, rho: f64) -> f64 {
        let k = self.radii.partition_point(|&r| r <= rho);
        if k == 0 {
            return self.sizes[0];
        }
        if k == self.radii.len() {
            return *self.sizes.last().unwrap();
        }
        let (r0, r1) = (self.radii[k - 1], self.radii[k]);
        let s = (rho - r0) / (r1 - r0);
        self.sizes[k - 1] * (1.0 - s) + self.sizes[k] * s
    }
}

/// Places nodes on the segment `a → b` (excluding `b`) with local spacing
/// following `size`.
fn graded_side(a: Point, b: Point, size: impl Fn(Point) -> f64) -> Vec<Point> {
    const SAMPLES: usize = 2000;
    let at = |s: f64| [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
    // cumulative number of elements along the side
    let mut cum = vec![0.0; SAMPLES + 1];
    for i in 0..SAMPLES {
        let mid = at((i as f64 + 0.5) / SAMPLES as f64);
        cum[i + 1] = cum[i] + len / SAMPLES as f64 / size(mid);
    }
    let n = (cum[SAMPLES].round() as usize).max(1);
    let scale = cum[SAMPLES] / n as f64;
    let mut out = vec![a];
    let mut i = 0;
    for k in 1..n {
        let target = k as f64 * scale;
        while cum[i + 1] < target {
            i += 1;
        }
        let s = (i as f64 + (target - cum[i]) / (cum[i + 1] - cum[i])) / SAMPLES as f64;
        out.push(at(s));
    }
    out
}

/// Graded variant of [`generate_mesh`]: rings around the disk whose spacing
/// grows geometrically out to the walls, wall nodes spaced by the local ring
/// size.
fn generate_graded(geom: &Geometry) -> Result<Mesh2D> {
    let h = geom.target_h;
    let r = geom.disk_radius;
    let center = geom.disk_center;
    let [x0, y0] = geom.box_min;
    let [x1, y1] = geom.box_max;
    let max_h = geom.max_h.max(h);
    let far = [x0, x1]
        .iter()
        .flat_map(|&x| [y0, y1].map(|y| (x - center[0]).hypot(y - center[1])))
        .fold(0.0, f64::max);

    let mut set = PointSet::new();
    let n_body = ((2.0 * PI * r / h).ceil() as usize).max(8);
    let body: Vec<usize> = ring(center, r, n_body, PI / 2.0)
        .map(|p| set.push(p, NodeTag::Body, false))
        .collect();
    set.close_loop(&body);

    let mut table = SizeTable {
        radii: vec![r],
        sizes: vec![2.0 * PI * r / n_body as f64],
    };
    let mut rings = Vec::new();
    let mut radius = r;
    let mut size = table.sizes[0];
    let mut k = 0;
    while radius < far + size {
        if k >= RINGS {
            size = (size * (1.0 + geom.grading)).min(max_h);
        } else {
            size = size.max(h);
        }
        let next = radius + size * 3f64.sqrt() / 2.0;
        let count = ((2.0 * PI * next / size).ceil() as usize).max(8);
        table.radii.push(next);
        table.sizes.push(size);
        rings.push((next, count, mirror_phase(count, k), k >= RINGS));
        radius = next;
        k += 1;
    }
    let size_at = |p: Point| table.at((p[0] - center[0]).hypot(p[1] - center[1]));

    let corners = [[x0, y0], [x1, y0], [x1, y1], [x0, y1]];
    let mut wall = Vec::new();
    for c in 0..4 {
        for p in graded_side(corners[c], corners[(c + 1) % 4], size_at) {
            wall.push(set.push(p, NodeTag::Wall, false));
        }
    }
    set.close_loop(&wall);

    for &(rho, count, phase, free) in &rings {
        let s = table.at(rho);
        for p in ring(center, rho, count, phase) {
            let wall_dist = (p[0] - x0).min(x1 - p[0]).min(p[1] - y0).min(y1 - p[1]);
            if wall_dist < 0.6 * s {
                continue;
            }
            set.push(p, NodeTag::Interior, free);
        }
    }

    let mut triangles = set.triangulate()?;
    for _ in 0..SMOOTHING_SWEEPS {
        set.smooth(&triangles);
        triangles = set.triangulate()?;
    }
    let mesh = set.into_mesh(triangles, Some(geom.circle()))?;
    check_quality(&mesh)?;
    Ok(mesh)
}

/// Triangulation of the disk interior (the body itself), with the boundary
/// nodes on the circle tagged as body nodes. Used for quadrature over the
/// rigid body.
pub fn generate_disk_mesh(circle: Circle, h: f64) -> Result<Mesh2D> {
    let r = circle.radius;
    if !(h > 0.0 && r > 0.0) {
        return Err(Error::GeometryInfeasible(
            "radius and mesh size must be positive".into(),
        ));
    }
    let mut set = PointSet::new();
    let n_body = ((2.0 * PI * r / h).ceil() as usize).max(8);
    let body: Vec<usize> = ring(circle.center, r, n_body, 0.0)
        .map(|p| set.push(p, NodeTag::Body, false))
        .collect();
    set.close_loop(&body);
    let layers = ((r / (h * 3f64.sqrt() / 2.0)).round() as usize).max(1);
    let mut phase = 0.0;
    for j in 1..layers {
        let rj = r * (1.0 - j as f64 / layers as f64);
        let count = ((2.0 * PI * rj / h).ceil() as usize).max(3);
        phase += PI / count as f64;
        for p in ring(circle.center, rj, count, phase) {
            set.push(p, NodeTag::Interior, false);
        }
    }
    set.push(circle.center, NodeTag::Interior, false);

    // the body-only filter in `triangulate` would drop every face here, so
    // tag the circle as wall while triangulating
    let tags = std::mem::take(&mut set.tags);
    set.tags = vec![NodeTag::Interior; tags.len()];
    let triangles = set.triangulate()?;
    set.tags = tags;
    let mesh = set.into_mesh(triangles, Some(circle))?;
    mesh.check_orientation()?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{cross, sub};

    fn default_unit_box() -> Geometry {
        Geometry::unit_box([0.5, 0.5], 0.1, 6.284e-2)
    }

    #[test]
    fn unit_box_mesh_is_valid() {
        let geom = default_unit_box();
        let mesh = generate_mesh(&geom).unwrap();
        // ceil(2π·0.1 / h) with h just above 2π/100
        assert_eq!(mesh.body_vertex_count(), 10);
        // independent orientation pass
        for t in mesh.triangles() {
            let p = t.map(|i| mesh.vertices()[i]);
            for k in 0..3 {
                let e1 = sub(p[(k + 1) % 3], p[k]);
                let e2 = sub(p[(k + 2) % 3], p[(k + 1) % 3]);
                assert!(cross(e1, e2) > 0.0);
            }
        }
        assert!(mesh.min_angle_deg() >= MIN_ANGLE_DEG);
        let mean = mesh.mean_edge_length();
        assert!(
            (mean - geom.target_h).abs() <= 0.25 * geom.target_h,
            "mean edge {mean}"
        );
    }

    #[test]
    fn body_nodes_lie_on_circle_with_bounded_spacing() {
        let geom = default_unit_box();
        let mesh = generate_mesh(&geom).unwrap();
        let circle = geom.circle();
        for i in 0..mesh.node_count() {
            if mesh.node_tag(i) == NodeTag::Body {
                assert!(circle.distance_to_boundary(mesh.node(i)) < 1e-15);
            }
        }
        for b in mesh
            .boundary_edges()
            .iter()
            .filter(|b| b.tag == NodeTag::Body)
        {
            let [a, c] = mesh.edges()[b.edge];
            let d = sub(mesh.vertices()[a], mesh.vertices()[c]);
            assert!(d[0].hypot(d[1]) <= geom.target_h);
        }
    }

    #[test]
    fn boundary_edges_are_tagged_consistently() {
        let mesh = generate_mesh(&default_unit_box()).unwrap();
        let body = mesh
            .boundary_edges()
            .iter()
            .filter(|b| b.tag == NodeTag::Body)
            .count();
        let wall = mesh
            .boundary_edges()
            .iter()
            .filter(|b| b.tag == NodeTag::Wall)
            .count();
        assert_eq!(body, 10);
        assert_eq!(body + wall, mesh.boundary_edges().len());
        for b in mesh.boundary_edges() {
            let [a, c] = mesh.edges()[b.edge];
            assert_eq!(mesh.vertex_tags()[a], b.tag);
            assert_eq!(mesh.vertex_tags()[c], b.tag);
        }
    }

    #[test]
    fn oversized_disk_is_rejected() {
        let geom = Geometry::unit_box([0.5, 0.5], 0.5, 0.05);
        assert!(matches!(
            generate_mesh(&geom),
            Err(Error::GeometryInfeasible(_))
        ));
        let tight = Geometry::unit_box([0.5, 0.12], 0.1, 0.05);
        assert!(matches!(
            generate_mesh(&tight),
            Err(Error::GeometryInfeasible(_))
        ));
    }

    #[test]
    fn area_matches_box_minus_disk() {
        let geom = default_unit_box();
        let mesh = generate_mesh(&geom).unwrap();
        let rel = (mesh.total_area() - geom.fluid_area()).abs() / geom.fluid_area();
        assert!(rel < 0.02, "relative area error {rel}");
    }

    #[test]
    fn other_sizes_mesh_cleanly() {
        for &(c, h) in &[
            ([0.5, 0.5], 4.879e-2),
            ([0.5, 0.3], 0.05),
            ([0.4, 0.6], 0.08),
            ([0.5, 0.5], 0.03),
        ] {
            let geom = Geometry::unit_box(c, 0.1, h);
            let mesh = generate_mesh(&geom).unwrap();
            assert!(mesh.min_angle_deg() >= MIN_ANGLE_DEG);
        }
    }

    #[test]
    fn disk_mesh_covers_polygon() {
        let circle = Circle::new([0.3, 0.2], 0.1);
        let mesh = generate_disk_mesh(circle, 0.06).unwrap();
        let n = mesh.body_vertex_count() as f64;
        let polygon = 0.5 * n * 0.01 * (2.0 * PI / n).sin();
        assert!((mesh.total_area() - polygon).abs() < 1e-14);
        assert_eq!(
            mesh.boundary_edges()
                .iter()
                .filter(|b| b.tag == NodeTag::Body)
                .count(),
            mesh.body_vertex_count()
        );
    }

    fn graded_geometry() -> Geometry {
        Geometry::graded_box([0.5, 0.5], 2.0, [0.5, 0.5], 0.1, 6.284e-2, 0.2, 0.4)
    }

    #[test]
    fn graded_mesh_is_valid_and_coarsens_outward() {
        let geom = graded_geometry();
        let mesh = generate_mesh(&geom).unwrap();
        assert!(mesh.min_angle_deg() >= MIN_ANGLE_DEG);
        assert_eq!(mesh.body_vertex_count(), 10);
        let rel = (mesh.total_area() - geom.fluid_area()).abs() / geom.fluid_area();
        assert!(rel < 0.01, "relative area error {rel}");
        // far fewer elements than a uniform mesh of the same box
        let uniform = 16.0 / (0.5 * 6.284e-2 * 6.284e-2 * 3f64.sqrt() / 2.0);
        assert!((mesh.triangle_count() as f64) < 0.25 * uniform);
        let mut near = 0.0f64;
        let mut far = 0.0f64;
        for e in mesh.edges() {
            let (a, b) = (mesh.vertices()[e[0]], mesh.vertices()[e[1]]);
            let len = (a[0] - b[0]).hypot(a[1] - b[1]);
            let d = ((a[0] + b[0]) / 2.0 - 0.5).hypot((a[1] + b[1]) / 2.0 - 0.5);
            if d < 0.2 {
                near = near.max(len);
            } else if d > 1.5 {
                far = far.max(len);
            }
        }
        assert!(far > 3.0 * near, "near {near} far {far}");
    }

    #[test]
    fn rings_are_mirror_symmetric() {
        let geom = graded_geometry();
        let mesh = generate_mesh(&geom).unwrap();
        let fixed: Vec<Point> = (0..mesh.vertex_count())
            .map(|i| mesh.vertices()[i])
            .filter(|p| (p[0] - 0.5).hypot(p[1] - 0.5) < 0.3)
            .collect();
        for p in &fixed {
            let mirror = [1.0 - p[0], p[1]];
            let hit = fixed
                .iter()
                .any(|q| (q[0] - mirror[0]).hypot(q[1] - mirror[1]) < 1e-12);
            assert!(hit, "no mirror image for {p:?}");
        }
    }
}
