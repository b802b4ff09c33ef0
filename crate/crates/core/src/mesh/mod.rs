//! Body-fitted triangulations of the fluid region between a rectangular box
//! and a rigid disk.
//!
//! Elements are straight-sided. Quadratic velocity nodes live at the vertices
//! and at one point per edge; for edges on the body boundary that point sits
//! on the exact circle, for every other edge it is the chord midpoint.

mod generate;
mod io;

use std::collections::HashMap;

pub use generate::{generate_disk_mesh, generate_mesh, MIN_ANGLE_DEG};
pub use io::{read_mesh, read_mesh_str, write_mesh, write_mesh_string};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Boundary classification of a mesh node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeTag {
    Interior,
    /// Fixed outer wall.
    Wall,
    /// Moving body boundary.
    Body,
}

impl NodeTag {
    pub fn code(self) -> u8 {
        match self {
            NodeTag::Interior => 0,
            NodeTag::Wall => 1,
            NodeTag::Body => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(NodeTag::Interior),
            1 => Some(NodeTag::Wall),
            2 => Some(NodeTag::Body),
            _ => None,
        }
    }

    pub fn is_boundary(self) -> bool {
        self != NodeTag::Interior
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn project(&self, p: Point) -> Point {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        let d = dx.hypot(dy);
        if d == 0.0 {
            return [self.center[0] + self.radius, self.center[1]];
        }
        let s = self.radius / d;
        [self.center[0] + dx * s, self.center[1] + dy * s]
    }

    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        ((p[0] - self.center[0]).hypot(p[1] - self.center[1]) - self.radius).abs()
    }
}

/// Computational domain: a box with a disk removed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geometry {
    pub box_min: Point,
    pub box_max: Point,
    pub disk_center: Point,
    pub disk_radius: f64,
    /// Nominal element size.
    pub target_h: f64,
    /// Growth of the element size per ring away from the disk. Zero gives a
    /// uniform mesh.
    pub grading: f64,
    /// Largest element size reached when grading.
    pub max_h: f64,
}

impl Geometry {
    pub fn unit_box(disk_center: Point, disk_radius: f64, target_h: f64) -> Self {
        Self {
            box_min: [0.0, 0.0],
            box_max: [1.0, 1.0],
            disk_center,
            disk_radius,
            target_h,
            grading: 0.0,
            max_h: target_h,
        }
    }

    /// Box of half-width `half_width` centred on `box_center`, meshed with
    /// sizes growing by `grading` per ring up to `max_h`.
    pub fn graded_box(
        box_center: Point,
        half_width: f64,
        disk_center: Point,
        disk_radius: f64,
        target_h: f64,
        grading: f64,
        max_h: f64,
    ) -> Self {
        Self {
            box_min: [box_center[0] - half_width, box_center[1] - half_width],
            box_max: [box_center[0] + half_width, box_center[1] + half_width],
            disk_center,
            disk_radius,
            target_h,
            grading,
            max_h,
        }
    }

    /// Smallest distance between the disk and the box walls (negative if the
    /// disk pokes out).
    pub fn clearance(&self) -> f64 {
        let [cx, cy] = self.disk_center;
        let r = self.disk_radius;
        (cx - self.box_min[0] - r)
            .min(self.box_max[0] - cx - r)
            .min(cy - self.box_min[1] - r)
            .min(self.box_max[1] - cy - r)
    }

    pub fn circle(&self) -> Circle {
        Circle::new(self.disk_center, self.disk_radius)
    }

    pub fn fluid_area(&self) -> f64 {
        (self.box_max[0] - self.box_min[0]) * (self.box_max[1] - self.box_min[1])
            - std::f64::consts::PI * self.disk_radius * self.disk_radius
    }
}

/// An edge on the domain boundary, seen from its unique adjacent triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub edge: usize,
    pub triangle: usize,
    /// Local edge index: edge `k` joins local vertices `k` and `(k + 1) % 3`.
    pub local: usize,
    pub tag: NodeTag,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh2D {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    triangle_edges: Vec<[usize; 3]>,
    edge_midpoints: Vec<Point>,
    vertex_tags: Vec<NodeTag>,
    edge_tags: Vec<NodeTag>,
    boundary_edges: Vec<BoundaryEdge>,
}

#[inline]
pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn signed_area_of(a: Point, b: Point, c: Point) -> f64 {
    0.5 * cross(sub(b, a), sub(c, a))
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let ap = sub(p, a);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
    (p[0] - q[0]).hypot(p[1] - q[1])
}

impl Mesh2D {
    /// Builds the edge structure and boundary classification from vertices,
    /// counter-clockwise triangles and vertex tags. Body edge midpoints are
    /// placed on `body` when given, otherwise on a circle fitted through the
    /// body vertices.
    pub fn from_parts(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        vertex_tags: Vec<NodeTag>,
        body: Option<Circle>,
    ) -> Result<Self> {
        if vertex_tags.len() != vertices.len() {
            return Err(Error::InconsistentConfig(format!(
                "{} vertex tags for {} vertices",
                vertex_tags.len(),
                vertices.len()
            )));
        }
        let nv = vertices.len();
        let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_count = Vec::new();
        let mut first_owner = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::InconsistentConfig(format!(
                    "triangle {t} references a vertex out of range"
                )));
            }
            let mut te = [0; 3];
            for k in 0..3 {
                let a = tri[k];
                let b = tri[(k + 1) % 3];
                let key = (a.min(b), a.max(b));
                let id = *edge_ids.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edge_count.push(0usize);
                    first_owner.push((t, k));
                    edges.len() - 1
                });
                edge_count[id] += 1;
                te[k] = id;
            }
            triangle_edges.push(te);
        }

        let mut edge_tags = vec![NodeTag::Interior; edges.len()];
        let mut boundary_edges = Vec::new();
        for (e, &count) in edge_count.iter().enumerate() {
            if count > 2 {
                return Err(Error::InconsistentConfig(format!(
                    "edge {e} is shared by {count} triangles"
                )));
            }
            if count == 1 {
                let [a, b] = edges[e];
                let tag = if vertex_tags[a] == NodeTag::Body && vertex_tags[b] == NodeTag::Body {
                    NodeTag::Body
                } else {
                    NodeTag::Wall
                };
                edge_tags[e] = tag;
                let (triangle, local) = first_owner[e];
                boundary_edges.push(BoundaryEdge {
                    edge: e,
                    triangle,
                    local,
                    tag,
                });
            }
        }

        let circle = match body {
            Some(c) => Some(c),
            None => fit_circle(&vertices, &vertex_tags),
        };
        let edge_midpoints = edges
            .iter()
            .zip(&edge_tags)
            .map(|(&[a, b], &tag)| {
                let m = midpoint(vertices[a], vertices[b]);
                match (tag, circle) {
                    (NodeTag::Body, Some(c)) => c.project(m),
                    _ => m,
                }
            })
            .collect();

        Ok(Self {
            vertices,
            triangles,
            edges,
            triangle_edges,
            edge_midpoints,
            vertex_tags,
            edge_tags,
            boundary_edges,
        })
    }

    /// Structured annulus around `center`: the inner circle (radius `r0`) is
    /// the body, the outer polygon (radius `r1`) the wall. `nr` layers of `nt`
    /// cells, each split in two.
    pub fn annulus(center: Point, r0: f64, r1: f64, nr: usize, nt: usize) -> Result<Self> {
        let mut vertices = Vec::with_capacity((nr + 1) * nt);
        let mut tags = Vec::with_capacity((nr + 1) * nt);
        for i in 0..=nr {
            let r = r0 + (r1 - r0) * i as f64 / nr as f64;
            for j in 0..nt {
                let a = std::f64::consts::TAU * j as f64 / nt as f64;
                vertices.push([center[0] + r * a.cos(), center[1] + r * a.sin()]);
                tags.push(match i {
                    0 => NodeTag::Body,
                    _ if i == nr => NodeTag::Wall,
                    _ => NodeTag::Interior,
                });
            }
        }
        let id = |i: usize, j: usize| i * nt + j % nt;
        let mut triangles = Vec::with_capacity(2 * nr * nt);
        for i in 0..nr {
            for j in 0..nt {
                triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        let mesh = Self::from_parts(vertices, triangles, tags, Some(Circle::new(center, r0)))?;
        mesh.check_orientation()?;
        Ok(mesh)
    }

    /// Structured triangulation of a rectangle with `nx × ny` cells, each
    /// split along its diagonal. All boundary nodes are walls.
    pub fn structured_rectangle(min: Point, max: Point, nx: usize, ny: usize) -> Self {
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        let mut tags = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                let x = min[0] + (max[0] - min[0]) * i as f64 / nx as f64;
                let y = min[1] + (max[1] - min[1]) * j as f64 / ny as f64;
                vertices.push([x, y]);
                let on_wall = i == 0 || j == 0 || i == nx || j == ny;
                tags.push(if on_wall {
                    NodeTag::Wall
                } else {
                    NodeTag::Interior
                });
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        Self::from_parts(vertices, triangles, tags, None).expect("structured mesh is consistent")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Number of quadratic nodes (vertices followed by edge nodes).
    pub fn node_count(&self) -> usize {
        self.vertices.len() + self.edges.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_midpoints(&self) -> &[Point] {
        &self.edge_midpoints
    }

    pub fn vertex_tags(&self) -> &[NodeTag] {
        &self.vertex_tags
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    /// Quadratic node indices of triangle `t`: three vertices, then the edge
    /// nodes of edges (0,1), (1,2), (2,0).
    pub fn triangle_nodes(&self, t: usize) -> [usize; 6] {
        let [a, b, c] = self.triangles[t];
        let nv = self.vertices.len();
        let [e0, e1, e2] = self.triangle_edges[t];
        [a, b, c, nv + e0, nv + e1, nv + e2]
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn node(&self, i: usize) -> Point {
        let nv = self.vertices.len();
        if i < nv {
            self.vertices[i]
        } else {
            self.edge_midpoints[i - nv]
        }
    }

    pub fn node_tag(&self, i: usize) -> NodeTag {
        let nv = self.vertices.len();
        if i < nv {
            self.vertex_tags[i]
        } else {
            self.edge_tags[i - nv]
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = Point> + '_ {
        self.vertices
            .iter()
            .chain(self.edge_midpoints.iter())
            .copied()
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        signed_area_of(a, b, c)
    }

    pub fn signed_areas(&self) -> Vec<f64> {
        (0..self.triangles.len())
            .map(|t| self.signed_area(t))
            .collect()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.signed_area(t)).sum()
    }

    /// Worst (smallest) signed area, with its triangle.
    pub fn worst_triangle(&self) -> Option<(usize, f64)> {
        (0..self.triangles.len())
            .map(|t| (t, self.signed_area(t)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn check_orientation(&self) -> Result<()> {
        match self.worst_triangle() {
            Some((triangle, signed_area)) if !(signed_area > 0.0) => Err(Error::ElementInversion {
                triangle,
                signed_area,
            }),
            _ => Ok(()),
        }
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        let mut worst = f64::INFINITY;
        for t in 0..self.triangles.len() {
            let p = self.triangle_points(t);
            for k in 0..3 {
                let a = sub(p[(k + 1) % 3], p[k]);
                let b = sub(p[(k + 2) % 3], p[k]);
                let ang = cross(a, b).abs().atan2(a[0] * b[0] + a[1] * b[1]);
                worst = worst.min(ang.to_degrees());
            }
        }
        worst
    }

    pub fn mean_edge_length(&self) -> f64 {
        let sum: f64 = self
            .edges
            .iter()
            .map(|&[a, b]| {
                let d = sub(self.vertices[b], self.vertices[a]);
                d[0].hypot(d[1])
            })
            .sum();
        sum / self.edges.len() as f64
    }

    /// Displaces every quadratic node. Edge nodes of straight (non-body)
    /// edges are then re-placed at the chord midpoint, since the element
    /// geometry is affine.
    pub fn move_nodes(&self, displacement: &[Point]) -> Result<Mesh2D> {
        if displacement.len() != self.node_count() {
            return Err(Error::InconsistentConfig(format!(
                "displacement has {} entries, mesh has {} nodes",
                displacement.len(),
                self.node_count()
            )));
        }
        let nv = self.vertices.len();
        let mut moved = self.clone();
        for (v, d) in moved.vertices.iter_mut().zip(&displacement[..nv]) {
            v[0] += d[0];
            v[1] += d[1];
        }
        for (e, m) in moved.edge_midpoints.iter_mut().enumerate() {
            if self.edge_tags[e] == NodeTag::Body {
                let d = displacement[nv + e];
                m[0] += d[0];
                m[1] += d[1];
            } else {
                let [a, b] = self.edges[e];
                *m = midpoint(moved.vertices[a], moved.vertices[b]);
            }
        }
        moved.check_orientation()?;
        Ok(moved)
    }

    /// Projects all body vertices and body edge nodes radially onto `circle`.
    pub fn snap_disk_boundary(&self, circle: Circle) -> Result<Mesh2D> {
        let limit = 0.2 * circle.radius;
        let nv = self.vertices.len();
        let mut snapped = self.clone();
        for i in 0..self.node_count() {
            if self.node_tag(i) != NodeTag::Body {
                continue;
            }
            let p = self.node(i);
            let distance = circle.distance_to_boundary(p);
            if distance > limit {
                return Err(Error::SnapTooLarge {
                    node: i,
                    distance,
                    limit,
                });
            }
            let q = circle.project(p);
            if i < nv {
                snapped.vertices[i] = q;
            } else {
                snapped.edge_midpoints[i - nv] = q;
            }
        }
        snapped.check_orientation()?;
        Ok(snapped)
    }

    /// Minimum distance between body nodes and wall edges.
    pub fn min_gap(&self) -> f64 {
        let walls: Vec<(Point, Point)> = self
            .boundary_edges
            .iter()
            .filter(|b| b.tag == NodeTag::Wall)
            .map(|b| {
                let [a, c] = self.edges[b.edge];
                (self.vertices[a], self.vertices[c])
            })
            .collect();
        let mut gap = f64::INFINITY;
        for i in 0..self.node_count() {
            if self.node_tag(i) != NodeTag::Body {
                continue;
            }
            let p = self.node(i);
            for &(a, b) in &walls {
                gap = gap.min(point_segment_distance(p, a, b));
            }
        }
        gap
    }

    /// Splits every triangle into four. Old edge nodes become vertices; new
    /// body edge nodes are placed on `body` (or a fitted circle).
    pub fn refine_uniform(&self, body: Option<Circle>) -> Result<Mesh2D> {
        let nv = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&self.edge_midpoints);
        let mut tags = self.vertex_tags.clone();
        tags.extend_from_slice(&self.edge_tags);
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for t in 0..self.triangles.len() {
            let [a, b, c] = self.triangles[t];
            let [e0, e1, e2] = self.triangle_edges[t];
            let (ab, bc, ca) = (nv + e0, nv + e1, nv + e2);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        let body = body.or_else(|| fit_circle(&self.vertices, &self.vertex_tags));
        let refined = Mesh2D::from_parts(vertices, triangles, tags, body)?;
        refined.check_orientation()?;
        Ok(refined)
    }

    /// Circle through the body vertices (centroid and mean radius).
    pub fn body_circle(&self) -> Option<Circle> {
        fit_circle(&self.vertices, &self.vertex_tags)
    }

    pub fn body_vertex_count(&self) -> usize {
        self.vertex_tags
            .iter()
            .filter(|&&t| t == NodeTag::Body)
            .count()
    }
}

fn midpoint(a: Point, b: Point) -> Point {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

fn fit_circle(vertices: &[Point], tags: &[NodeTag]) -> Option<Circle> {
    let body: Vec<Point> = vertices
        .iter()
        .zip(tags)
        .filter(|(_, &t)| t == NodeTag::Body)
        .map(|(p, _)| *p)
        .collect();
    if body.len() < 3 {
        return None;
    }
    let n = body.len() as f64;
    let cx = body.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = body.iter().map(|p| p[1]).sum::<f64>() / n;
    let r = body
        .iter()
        .map(|p| (p[0] - cx).hypot(p[1] - cy))
        .sum::<f64>()
        / n;
    Some(Circle::new([cx, cy], r))
}
