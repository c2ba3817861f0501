//! Physical problem, mesh, and per-step marching system.
//!
//! Nodes are 0-based here: x-node `i` in `0..M` and y-node `j` in `0..N`, with
//! `j = 0` on the lower plate (y = 0) and `j = N - 1` on the upper plate
//! (y = h). Physical numbering used in the literature is 1-based; node `j`
//! here is node `j + 1` there.

use serde::{Deserialize, Serialize};

use crate::band::BandMatrix;
use crate::error::{Error, Result};

/// Thermal and physical constants of the channel flow.
///
/// The defaults describe air between plates 1 cm apart and 1 m long, heated
/// by a 50 W/m² flux on both walls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicalParams {
    /// Thermal conductivity [W/(m·K)].
    pub k: f64,
    /// Specific heat [J/(kg·K)].
    pub cp: f64,
    /// Specific mass [kg/m³].
    pub rho: f64,
    /// Plate spacing [m].
    pub h: f64,
    /// Plate length [m].
    pub b: f64,
    /// Mean fluid velocity [m/s].
    pub um: f64,
    /// Wall heat flux [W/m²].
    pub qflux: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            k: 0.0265,
            cp: 2000.0,
            rho: 1.1614,
            h: 0.01,
            b: 1.0,
            um: 2.0,
            qflux: 50.0,
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("k", self.k),
            ("cp", self.cp),
            ("rho", self.rho),
            ("h", self.h),
            ("b", self.b),
            ("um", self.um),
            ("qflux", self.qflux),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Params(format!(
                    "{name} must be finite and strictly positive, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Thermal diffusivity k / (ρ·cp).
    pub fn diffusivity(&self) -> f64 {
        self.k / (self.rho * self.cp)
    }
}

/// Uniform rectangular mesh over `[0, b] × [0, h]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    m: usize,
    n: usize,
    dx: f64,
    dy: f64,
    b: f64,
    h: f64,
}

impl Mesh {
    pub const MIN_X_NODES: usize = 2;
    /// Below four y-nodes the one-sided wall stencils overlap.
    pub const MIN_Y_NODES: usize = 4;

    pub fn new(params: &PhysicalParams, m: usize, n: usize) -> Result<Self> {
        params.validate()?;
        if m < Self::MIN_X_NODES {
            return Err(Error::Mesh(format!(
                "M = {m}, need at least {} x-nodes",
                Self::MIN_X_NODES
            )));
        }
        if n < Self::MIN_Y_NODES {
            return Err(Error::Mesh(format!(
                "N = {n}, need at least {} y-nodes",
                Self::MIN_Y_NODES
            )));
        }
        Ok(Self {
            m,
            n,
            dx: params.b / (m - 1) as f64,
            dy: params.h / (n - 1) as f64,
            b: params.b,
            h: params.h,
        })
    }

    pub fn x_nodes(&self) -> usize {
        self.m
    }

    pub fn y_nodes(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.m {
            self.b
        } else {
            i as f64 * self.dx
        }
    }

    pub fn y(&self, j: usize) -> f64 {
        if j + 1 == self.n {
            self.h
        } else {
            j as f64 * self.dy
        }
    }
}

/// Inlet temperatures at x = 0, one per y-node.
#[derive(Debug, Clone, PartialEq)]
pub struct InletProfile {
    values: Vec<f64>,
}

impl InletProfile {
    pub fn new(mesh: &Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.y_nodes() {
            return Err(Error::Dimension(format!(
                "inlet has {} values for {} y-nodes",
                values.len(),
                mesh.y_nodes()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("non-finite inlet temperature {v}")));
        }
        Ok(Self { values })
    }

    pub fn uniform(mesh: &Mesh, value: f64) -> Result<Self> {
        Self::new(mesh, vec![value; mesh.y_nodes()])
    }

    /// `low` for `y <= split · h` (the split node itself included), `high` above.
    pub fn step(mesh: &Mesh, low: f64, high: f64, split: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&split) {
            return Err(Error::Config(format!(
                "inlet split {split} must be a fraction of h in [0, 1]"
            )));
        }
        let cut = split * mesh.h;
        let slack = 1e-12 * mesh.h;
        let values = (0..mesh.y_nodes())
            .map(|j| if mesh.y(j) <= cut + slack { low } else { high })
            .collect();
        Self::new(mesh, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// One banded linear system `A · T(i+1) = rhs(i)` of the marching scheme.
///
/// Systems produced by [`assemble_system`] carry the one-sided wall stencils
/// `[-3, 4, -1]` and `[1, -4, 3]` in the first and last row and
/// `(-r_j, 2 r_j + 1, -r_j)` on interior rows. [`MarchingSystem::new`] accepts
/// any square system so the encoding and solver can be exercised directly.
#[derive(Debug, Clone, PartialEq)]
pub struct MarchingSystem {
    pub matrix: BandMatrix,
    pub rhs: Vec<f64>,
}

impl MarchingSystem {
    pub fn new(matrix: BandMatrix, rhs: Vec<f64>) -> Result<Self> {
        if rhs.len() != matrix.dim() {
            return Err(Error::Dimension(format!(
                "rhs length {} for a {}×{} matrix",
                rhs.len(),
                matrix.dim(),
                matrix.dim()
            )));
        }
        Ok(Self { matrix, rhs })
    }

    pub fn from_dense(rows: &[Vec<f64>], rhs: Vec<f64>) -> Result<Self> {
        Self::new(BandMatrix::from_dense(rows)?, rhs)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `A · x − rhs`.
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        self.matrix
            .mul_vec(x)
            .iter()
            .zip(&self.rhs)
            .map(|(ax, b)| ax - b)
            .collect()
    }

    /// ‖A · x − rhs‖².
    pub fn squared_residual(&self, x: &[f64]) -> f64 {
        self.residual(x).iter().map(|r| r * r).sum()
    }
}

/// Parabolic fully developed profile `6 um (y/h)(1 − y/h)`.
pub fn velocity(params: &PhysicalParams, y: f64) -> Result<f64> {
    if !(0.0..=params.h).contains(&y) {
        return Err(Error::Domain {
            what: "velocity height",
            value: y,
            lower: 0.0,
            upper: params.h,
        });
    }
    let eta = y / params.h;
    Ok(6.0 * params.um * eta * (1.0 - eta))
}

/// Coefficient `(k / ρ cp) · (dx / dy²) / u_j` of interior node `j`.
pub fn r_coefficient(params: &PhysicalParams, mesh: &Mesh, j: usize) -> Result<f64> {
    if j == 0 || j + 1 >= mesh.y_nodes() {
        return Err(Error::Mesh(format!(
            "y-node {j} is not interior (valid: 1..={})",
            mesh.y_nodes() - 2
        )));
    }
    let u = velocity(params, mesh.y(j))?;
    if u == 0.0 {
        return Err(Error::ZeroVelocity { node: j });
    }
    Ok(params.diffusivity() * mesh.dx() / (mesh.dy() * mesh.dy()) / u)
}

/// Wall flux term `q" · 2 dy / k` of the boundary rows.
pub fn wall_flux_term(params: &PhysicalParams, mesh: &Mesh) -> f64 {
    params.qflux * 2.0 * mesh.dy() / params.k
}

/// Builds the system giving column `i + 1` from column `i` (`prev_column`).
pub fn assemble_system(
    params: &PhysicalParams,
    mesh: &Mesh,
    prev_column: &[f64],
) -> Result<MarchingSystem> {
    let n = mesh.y_nodes();
    if n < Mesh::MIN_Y_NODES {
        return Err(Error::Mesh(format!("N = {n} < {}", Mesh::MIN_Y_NODES)));
    }
    if prev_column.len() != n {
        return Err(Error::Dimension(format!(
            "previous column has {} values for {n} y-nodes",
            prev_column.len()
        )));
    }

    let mut a = BandMatrix::zeros(n, 2, 2);
    a.set(0, 0, -3.0);
    a.set(0, 1, 4.0);
    a.set(0, 2, -1.0);
    for j in 1..n - 1 {
        let r = r_coefficient(params, mesh, j)?;
        a.set(j, j - 1, -r);
        a.set(j, j, 2.0 * r + 1.0);
        a.set(j, j + 1, -r);
    }
    a.set(n - 1, n - 3, 1.0);
    a.set(n - 1, n - 2, -4.0);
    a.set(n - 1, n - 1, 3.0);

    let flux = wall_flux_term(params, mesh);
    let mut rhs = prev_column.to_vec();
    rhs[0] = -flux;
    rhs[n - 1] = flux;
    MarchingSystem::new(a, rhs)
}
