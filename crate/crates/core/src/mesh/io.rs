//! Plain-text mesh interchange.
//!
//! ```text
//! nodes N elements M
//! x y tag        (N lines, tag 0 = interior, 1 = wall, 2 = body)
//! i j k          (M lines, 0-based vertex indices)
//! ```
//!
//! Edge nodes are not stored; they are rebuilt on load.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Mesh2D, NodeTag};
use crate::error::{Error, Result};

pub fn write_mesh_string(mesh: &Mesh2D) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "nodes {} elements {}",
        mesh.vertex_count(),
        mesh.triangle_count()
    );
    for (p, tag) in mesh.vertices().iter().zip(mesh.vertex_tags()) {
        let _ = writeln!(out, "{:.16e} {:.16e} {}", p[0], p[1], tag.code());
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
    }
    out
}

pub fn write_mesh(mesh: &Mesh2D, path: &Path) -> Result<()> {
    fs::write(path, write_mesh_string(mesh))?;
    Ok(())
}

pub fn read_mesh(path: &Path) -> Result<Mesh2D> {
    let text = fs::read_to_string(path)?;
    read_mesh_str(&text).map_err(|e| match e {
        Error::MeshFormat { line, message, .. } => Error::MeshFormat {
            path: path.to_path_buf(),
            line,
            message,
        },
        other => other,
    })
}

pub fn read_mesh_str(text: &str) -> Result<Mesh2D> {
    let err = |line: usize, message: String| Error::MeshFormat {
        path: Default::default(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines
        .next()
        .ok_or_else(|| err(1, "empty mesh file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (n, m) = match fields.as_slice() {
        ["nodes", n, "elements", m] => (
            n.parse::<usize>()
                .map_err(|e| err(ln, format!("node count: {e}")))?,
            m.parse::<usize>()
                .map_err(|e| err(ln, format!("element count: {e}")))?,
        ),
        _ => {
            return Err(err(
                ln,
                format!("expected `nodes N elements M`, found `{header}`"),
            ))
        }
    };

    let mut vertices = Vec::with_capacity(n);
    let mut tags = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| err(ln, "truncated node block".into()))?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(err(ln, format!("expected `x y tag`, found `{line}`")));
        }
        let x = f[0]
            .parse::<f64>()
            .map_err(|e| err(ln, format!("x: {e}")))?;
        let y = f[1]
            .parse::<f64>()
            .map_err(|e| err(ln, format!("y: {e}")))?;
        let tag = f[2]
            .parse::<u8>()
            .ok()
            .and_then(NodeTag::from_code)
            .ok_or_else(|| err(ln, format!("unknown tag `{}`", f[2])))?;
        vertices.push([x, y]);
        tags.push(tag);
    }

    let mut triangles = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| err(ln, "truncated element block".into()))?;
        let idx: std::result::Result<Vec<usize>, _> =
            line.split_whitespace().map(str::parse::<usize>).collect();
        match idx {
            Ok(v) if v.len() == 3 && v.iter().all(|&i| i < n) => triangles.push([v[0], v[1], v[2]]),
            _ => return Err(err(ln, format!("bad element `{line}`"))),
        }
    }
    if let Some((ln, line)) = lines.next() {
        return Err(err(ln, format!("trailing content `{line}`")));
    }
    Mesh2D::from_parts(vertices, triangles, tags, None)
}
