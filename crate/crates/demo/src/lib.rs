//! WebAssembly bindings for the browser demo in `www/`.

pub mod ops;

use ale_fsi::mesh::Mesh2D;
use wasm_bindgen::prelude::*;

fn js(e: ale_fsi::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// A meshed unit box with a disk in the middle, plus the last flow solved on
/// it.
#[wasm_bindgen]
pub struct Scene {
    mesh: Mesh2D,
    speed: Vec<f64>,
}

#[wasm_bindgen]
impl Scene {
    #[wasm_bindgen(constructor)]
    pub fn new(h: f64, radius: f64) -> Result<Scene, JsError> {
        let mesh = ops::box_mesh(h, radius).map_err(js)?;
        let speed = vec![0.0; mesh.vertex_count()];
        Ok(Scene { mesh, speed })
    }

    pub fn vertices(&self) -> Vec<f64> {
        ops::flat_vertices(&self.mesh)
    }

    pub fn triangles(&self) -> Vec<u32> {
        ops::flat_triangles(&self.mesh)
    }

    #[wasm_bindgen(js_name = minAngle)]
    pub fn min_angle(&self) -> f64 {
        self.mesh.min_angle_deg()
    }

    #[wasm_bindgen(js_name = nodeCount)]
    pub fn node_count(&self) -> usize {
        self.mesh.node_count()
    }

    /// Solves steady Stokes flow for a disk moving with `(vx, vy, omega)`.
    /// Returns `[Fx, Fy, M]` from the boundary integral followed by the
    /// same from the bulk integral.
    pub fn drag(
        &mut self,
        vx: f64,
        vy: f64,
        omega: f64,
        viscosity: f64,
    ) -> Result<Vec<f64>, JsError> {
        let out = ops::steady_loads(&self.mesh, [vx, vy], omega, viscosity).map_err(js)?;
        self.speed = out.speed;
        let (b, k) = (out.boundary, out.bulk);
        Ok(vec![
            b.force[0], b.force[1], b.torque, k.force[0], k.force[1], k.torque,
        ])
    }

    /// Vertex speeds of the last `drag` solve.
    pub fn speed(&self) -> Vec<f64> {
        self.speed.clone()
    }
}

/// Runs `iterations` global iterations of a disk falling in the unit box.
/// Returns rows of `[q_y(T), v_y(T), omega(T), d_k]`, flattened. A run that
/// stops early returns the rows it completed.
#[wasm_bindgen]
pub fn fall(
    h: f64,
    body_density: f64,
    final_time: f64,
    tau: f64,
    iterations: usize,
) -> Result<Vec<f64>, JsError> {
    let (rows, _) = ops::fall(h, body_density, final_time, tau, iterations).map_err(js)?;
    Ok(rows
        .iter()
        .flat_map(|r| [r.q_y, r.v_y, r.omega, r.distance])
        .collect())
}
