use super::Mesh;
use crate::{Error, Result};

/// Triangulates the tensor grid `xs x ys` (both strictly increasing from 0 to 1),
/// cutting every cell along its southwest-northeast diagonal.
fn tensor_mesh(xs: &[f64], ys: &[f64]) -> Result<Mesh> {
    let nx = xs.len();
    let mut vertices = Vec::with_capacity(nx * ys.len());
    for &y in ys {
        for &x in xs {
            vertices.push([x, y]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * (nx - 1) * (ys.len() - 1));
    for j in 0..ys.len() - 1 {
        for i in 0..nx - 1 {
            let sw = j * nx + i;
            let (se, ne, nw) = (sw + 1, sw + nx + 1, sw + nx);
            triangles.push([sw, se, ne]);
            triangles.push([sw, ne, nw]);
        }
    }
    Mesh::new(vertices, triangles, None)
}

fn linspace(a: f64, b: f64, cells: usize) -> impl Iterator<Item = f64> {
    (0..=cells).map(move |i| {
        if i == cells {
            b
        } else {
            a + (b - a) * i as f64 / cells as f64
        }
    })
}

/// Uniform `n x n` grid of right triangles.
pub fn gen_uniform(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::param("n", "subdivision count must be at least 1"));
    }
    let xs: Vec<f64> = linspace(0.0, 1.0, n).collect();
    tensor_mesh(&xs, &xs)
}

/// Geometrically graded mesh towards the origin on the grid
/// `{0, beta^N, beta^(N-1), ..., beta, 1}` in each direction.
pub fn gen_geometric(beta: f64, levels: usize) -> Result<Mesh> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::param("beta", format!("grading ratio must lie in (0, 1), got {beta}")));
    }
    if levels == 0 {
        return Err(Error::param("levels", "number of geometric levels must be at least 1"));
    }
    let mut xs = vec![0.0];
    xs.extend((0..=levels).rev().map(|i| beta.powi(i as i32)));
    tensor_mesh(&xs, &xs)
}

/// Shishkin transition point `min(1/2, 2 eps ln n)`.
pub fn shishkin_transition(epsilon: f64, n: usize) -> f64 {
    (2.0 * epsilon * (n as f64).ln()).min(0.5)
}

/// Shishkin-type mesh resolving a layer at `x = 0`: `n` cells on `[0, tau]`,
/// `n` cells on `[tau, 1]` and `n` uniform cells in `y`.
pub fn gen_shishkin(epsilon: f64, n: usize) -> Result<Mesh> {
    if !(epsilon > 0.0 && epsilon <= 0.25) {
        return Err(Error::param("epsilon", format!("layer width must lie in (0, 1/4], got {epsilon}")));
    }
    if n < 2 {
        return Err(Error::param("n", "Shishkin meshes need at least 2 cells per band"));
    }
    let tau = shishkin_transition(epsilon, n);
    let mut xs: Vec<f64> = linspace(0.0, tau, n).collect();
    xs.extend(linspace(tau, 1.0, n).skip(1));
    let ys: Vec<f64> = linspace(0.0, 1.0, n).collect();
    tensor_mesh(&xs, &ys)
}
