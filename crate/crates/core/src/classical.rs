//! Direct banded solver and the classical marching reference.

use crate::error::{Error, Result};
use crate::mesh::{assemble_system, velocity, InletProfile, MarchingSystem, Mesh, PhysicalParams};

/// Pivots smaller than this in magnitude are treated as singular.
pub const PIVOT_FLOOR: f64 = 1e-14;

/// Temperatures on an `M × N` mesh, stored column by column (`grid[i][j]`).
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureField {
    pub grid: Vec<Vec<f64>>,
    pub mesh: Mesh,
}

impl TemperatureField {
    pub fn column(&self, i: usize) -> &[f64] {
        &self.grid[i]
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.grid[i][j]
    }

    pub fn max_abs_difference(&self, other: &TemperatureField) -> f64 {
        self.grid
            .iter()
            .flatten()
            .zip(other.grid.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Gaussian elimination with partial pivoting restricted to the band.
///
/// Row interchanges can widen the upper band by the lower bandwidth, so the
/// working rows span `lower` extra columns on the right.
pub fn solve_banded(system: &MarchingSystem) -> Result<Vec<f64>> {
    let a = &system.matrix;
    let n = a.dim();
    let kl = a.lower();
    let ku = a.upper() + kl;
    let width = kl + ku + 1;

    // Working copy; row i stores columns i - kl ..= i + ku.
    let mut work = vec![0.0; n * width];
    let idx = |i: usize, j: usize| i * width + j + kl - i;
    for i in 0..n {
        let (lo, hi) = a.row_span(i);
        for j in lo..hi {
            work[idx(i, j)] = a.get(i, j);
        }
    }
    let mut b = system.rhs.clone();

    for k in 0..n {
        let last_row = (k + kl).min(n - 1);
        let pivot_row = (k..=last_row)
            .max_by(|&p, &q| work[idx(p, k)].abs().total_cmp(&work[idx(q, k)].abs()))
            .unwrap_or(k);
        let pivot = work[idx(pivot_row, k)];
        if pivot.abs() < PIVOT_FLOOR {
            return Err(Error::Singular { column: k, pivot });
        }

        let last_col = (k + ku).min(n - 1);
        if pivot_row != k {
            for j in k..=last_col {
                work.swap(idx(k, j), idx(pivot_row, j));
            }
            b.swap(k, pivot_row);
        }

        for i in k + 1..=last_row {
            let factor = work[idx(i, k)] / pivot;
            if factor == 0.0 {
                continue;
            }
            work[idx(i, k)] = 0.0;
            for j in k + 1..=last_col {
                work[idx(i, j)] -= factor * work[idx(k, j)];
            }
            b[i] -= factor * b[k];
        }
    }

    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let last_col = (i + ku).min(n - 1);
        let tail: f64 = (i + 1..=last_col).map(|j| work[idx(i, j)] * x[j]).sum();
        x[i] = (b[i] - tail) / work[idx(i, i)];
    }
    Ok(x)
}

/// `‖A·x − rhs‖∞`.
pub fn residual_inf(system: &MarchingSystem, x: &[f64]) -> f64 {
    system
        .residual(x)
        .iter()
        .fold(0.0, |acc, r| acc.max(r.abs()))
}

/// Marches from the inlet column through `M − 1` linear solves.
pub fn march(
    params: &PhysicalParams,
    mesh: &Mesh,
    inlet: &InletProfile,
) -> Result<TemperatureField> {
    if inlet.values().len() != mesh.y_nodes() {
        return Err(Error::Dimension(format!(
            "inlet has {} values for {} y-nodes",
            inlet.values().len(),
            mesh.y_nodes()
        )));
    }
    let mut grid = Vec::with_capacity(mesh.x_nodes());
    grid.push(inlet.values().to_vec());
    for step in 1..mesh.x_nodes() {
        let prev = &grid[step - 1];
        let next = assemble_system(params, mesh, prev)
            .and_then(|sys| solve_banded(&sys))
            .map_err(|e| e.at_step(step))?;
        grid.push(next);
    }
    Ok(TemperatureField { grid, mesh: *mesh })
}

/// Trapezoid weights over the y-nodes.
fn trapezoid_weights(mesh: &Mesh) -> Vec<f64> {
    let n = mesh.y_nodes();
    (0..n)
        .map(|j| {
            if j == 0 || j + 1 == n {
                0.5 * mesh.dy()
            } else {
                mesh.dy()
            }
        })
        .collect()
}

/// Flow-weighted mean temperature of one column.
pub fn bulk_temperature(params: &PhysicalParams, mesh: &Mesh, column: &[f64]) -> Result<f64> {
    let w = trapezoid_weights(mesh);
    let mut flux = 0.0;
    let mut flow = 0.0;
    for (j, (&wj, &t)) in w.iter().zip(column).enumerate() {
        let u = velocity(params, mesh.y(j))?;
        flux += wj * u * t;
        flow += wj * u;
    }
    Ok(flux / flow)
}

/// Enthalpy gained by the fluid between inlet and outlet together with the
/// heat supplied through both walls, `(ρ cp um h ΔT_b, 2 q" b)`.
pub fn energy_balance(params: &PhysicalParams, field: &TemperatureField) -> Result<(f64, f64)> {
    let mesh = &field.mesh;
    let t_in = bulk_temperature(params, mesh, field.column(0))?;
    let t_out = bulk_temperature(params, mesh, field.column(mesh.x_nodes() - 1))?;
    let gained = params.rho * params.cp * params.um * params.h * (t_out - t_in);
    let supplied = 2.0 * params.qflux * params.b;
    Ok((gained, supplied))
}
