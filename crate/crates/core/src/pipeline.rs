//! End-to-end marching with a selectable linear-system solver, plus CSV
//! output and the classical-vs-quantum comparison report.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classical::{march, solve_banded, TemperatureField};
use crate::error::{Error, Result};
use crate::mesh::{assemble_system, InletProfile, MarchingSystem, Mesh, PhysicalParams};
use crate::optimizer::{minimize, OptimizationTrace, OptimizerConfig};
use crate::qaoa::{
    best_sampled, build_energy_table, expectation, run_circuit, run_circuit_into, sample,
    warm_start_state, QaoaParams,
};
use crate::qubo::{
    bits_from_index, brute_force_ground_state, decode, encode_qubo, BitWeighting,
    MAX_ENUMERATION_VARS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMode {
    Classical,
    Qaoa,
    #[default]
    BruteForce,
}

impl SolverMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverMode::Classical => "classical",
            SolverMode::Qaoa => "qaoa",
            SolverMode::BruteForce => "brute_force",
        }
    }

    pub fn is_quantum(self) -> bool {
        self != SolverMode::Classical
    }
}

impl fmt::Display for SolverMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(SolverMode::Classical),
            "qaoa" => Ok(SolverMode::Qaoa),
            "brute_force" => Ok(SolverMode::BruteForce),
            other => Err(Error::Config(format!(
                "unknown solver mode `{other}` (expected classical, qaoa or brute_force)"
            ))),
        }
    }
}

/// Inlet temperatures: a two-level step, or explicit per-node values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InletSpec {
    pub low: f64,
    pub high: f64,
    /// Fraction of h at and below which the inlet takes `low`.
    pub split: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl Default for InletSpec {
    fn default() -> Self {
        Self {
            low: 4.0,
            high: 8.0,
            split: 0.5,
            values: None,
        }
    }
}

impl InletSpec {
    pub fn uniform(value: f64) -> Self {
        Self {
            low: value,
            high: value,
            ..Default::default()
        }
    }

    pub fn build(&self, mesh: &Mesh) -> Result<InletProfile> {
        match &self.values {
            Some(values) => InletProfile::new(mesh, values.clone())
                .map_err(|e| Error::Config(format!("inlet values: {e}"))),
            None => InletProfile::step(mesh, self.low, self.high, self.split),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub params: PhysicalParams,
    #[serde(rename = "M", alias = "m")]
    pub m: usize,
    #[serde(rename = "N", alias = "n")]
    pub n: usize,
    pub inlet: InletSpec,
    pub weighting: BitWeighting,
    /// QAOA layer count.
    pub p: usize,
    pub optimizer: OptimizerConfig,
    pub epsilon: f64,
    pub shots: u64,
    pub solver_mode: SolverMode,
    pub seed: u64,
    /// Start each step's optimization from the previous step's optimum.
    pub reuse_params: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: PhysicalParams::default(),
            m: 5,
            n: 5,
            inlet: InletSpec::default(),
            weighting: BitWeighting::default(),
            p: 3,
            optimizer: OptimizerConfig::default(),
            epsilon: 0.25,
            shots: 4096,
            solver_mode: SolverMode::default(),
            seed: 0,
            reuse_params: false,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config JSON: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn mesh(&self) -> Result<Mesh> {
        Mesh::new(&self.params, self.m, self.n)
    }

    /// Binary variables per marching step, `R · N`.
    pub fn qubits_per_step(&self) -> usize {
        self.weighting.bits() * self.n
    }

    pub fn validate(&self) -> Result<()> {
        let mesh = self.mesh()?;
        self.inlet.build(&mesh)?;
        if self.p == 0 {
            return Err(Error::Config("p must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 0.5) {
            return Err(Error::Config(format!(
                "epsilon {} not in (0, 0.5]",
                self.epsilon
            )));
        }
        if self.shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        self.optimizer.validate()?;
        if self.solver_mode.is_quantum() && self.qubits_per_step() > MAX_ENUMERATION_VARS {
            return Err(Error::Config(format!(
                "{} mode needs R·N = {} ≤ {MAX_ENUMERATION_VARS} variables per step",
                self.solver_mode,
                self.qubits_per_step()
            )));
        }
        Ok(())
    }
}

/// One marching step as seen by the report.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    /// 1-based: step `k` produces column `k` (column 0 is the inlet).
    pub step: usize,
    /// Column produced by the selected solver.
    pub decoded: Vec<f64>,
    /// Same column of the purely classical field.
    pub classical: Vec<f64>,
    /// Exact solution of this step's own system (fed by `decoded` of the
    /// previous step).
    pub relaxed: Vec<f64>,
    pub max_abs_deviation: f64,
    /// `‖A·decoded − rhs‖²` of this step's system.
    pub residual_energy: f64,
    /// Minimum of the binarized objective, when it was enumerated.
    pub ground_energy: Option<f64>,
    /// Entries of `relaxed` outside the representable range.
    pub unrepresentable: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub mode: SolverMode,
    pub steps: Vec<StepReport>,
    pub field_max_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub field: TemperatureField,
    pub classical: TemperatureField,
    pub report: ComparisonReport,
    /// Per-step optimizer traces (QAOA mode only), keyed by step.
    pub traces: Vec<(usize, OptimizationTrace)>,
}

/// Linear ramp in units of the inverse energy spread: γ grows and β shrinks
/// across layers.
pub fn default_initial_params(p: usize) -> QaoaParams {
    let frac = |l: usize| (l as f64 + 0.5) / p as f64;
    QaoaParams::new(
        (0..p).map(|l| 0.5 * frac(l)).collect(),
        (0..p).map(|l| 0.25 * (1.0 - frac(l))).collect(),
    )
    .expect("p ≥ 1")
}

struct StepSolution {
    column: Vec<f64>,
    ground_energy: Option<f64>,
    trace: Option<OptimizationTrace>,
    normalized_best: Option<QaoaParams>,
}

/// Result of one warm-started QAOA solve of a binarized system.
#[derive(Debug, Clone)]
pub struct QaoaSolve {
    pub bits: Vec<bool>,
    pub energy: f64,
    pub ground_energy: f64,
    pub uniform_mean: f64,
    pub final_expectation: f64,
    /// Trace with angles in physical units.
    pub trace: OptimizationTrace,
    /// Optimum with γ in units of the inverse energy spread.
    pub normalized_best: QaoaParams,
}

/// Settings of [`solve_qaoa`].
#[derive(Debug, Clone)]
pub struct QaoaSettings {
    pub weighting: BitWeighting,
    pub epsilon: f64,
    pub shots: u64,
    pub optimizer: OptimizerConfig,
    pub sample_seed: u64,
}

/// Binarizes `system`, warm-starts from the rounded exact solution, tunes
/// the angles and returns the best sampled bitstring.
///
/// γ is optimized in units of `1 / (E_max − E_min)` so the fixed simplex
/// edge is meaningful whatever the energy scale.
pub fn solve_qaoa(
    system: &MarchingSystem,
    start: &QaoaParams,
    settings: &QaoaSettings,
) -> Result<QaoaSolve> {
    let qubo = encode_qubo(system, &settings.weighting)?;
    let table = build_energy_table(&qubo)?;
    let relaxed = solve_banded(system)?;
    let (warm_bits, _) = settings.weighting.encode_nearest(&relaxed);
    let warm: Vec<f64> = warm_bits.iter().map(|&b| f64::from(u8::from(b))).collect();
    let initial = warm_start_state(&warm, settings.epsilon)?;

    let spread = table.max() - table.min();
    let scale = if spread > 0.0 { spread.recip() } else { 1.0 };
    let mut buffer = initial.clone();
    let trace = minimize(
        |params| {
            run_circuit_into(&table, &params.scale_gammas(scale), &initial, &mut buffer);
            expectation(&buffer, &table)
        },
        start,
        &settings.optimizer,
    )?;
    let normalized_best = trace.best_params.clone();
    let trace = trace.map_params(|p| p.scale_gammas(scale));

    drop(buffer);
    let state = run_circuit(&table, &trace.best_params, &initial);
    let hist = sample(&state, settings.shots, settings.sample_seed)?;
    let (index, energy) = best_sampled(&hist, &table)?;
    Ok(QaoaSolve {
        bits: bits_from_index(index, qubo.num_vars()),
        energy,
        ground_energy: table.min(),
        uniform_mean: table.mean(),
        final_expectation: trace.best_value,
        trace,
        normalized_best,
    })
}

/// Marches the configured problem with the configured solver and compares
/// every column against the classical field.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let params = &config.params;
    let mesh = config.mesh()?;
    let inlet = config.inlet.build(&mesh)?;
    let classical = march(params, &mesh, &inlet)?;
    let max_value = config.weighting.max_value();

    let mut grid = vec![inlet.values().to_vec()];
    let mut steps = Vec::with_capacity(mesh.x_nodes() - 1);
    let mut traces = Vec::new();
    let mut carried: Option<QaoaParams> = None;

    for step in 1..mesh.x_nodes() {
        let attempt = || -> Result<(MarchingSystem, Vec<f64>, StepSolution)> {
            let system = assemble_system(params, &mesh, &grid[step - 1])?;
            let relaxed = solve_banded(&system)?;
            let solution = match config.solver_mode {
                SolverMode::Classical => StepSolution {
                    column: relaxed.clone(),
                    ground_energy: None,
                    trace: None,
                    normalized_best: None,
                },
                SolverMode::BruteForce => {
                    let qubo = encode_qubo(&system, &config.weighting)?;
                    let (bits, energy) = brute_force_ground_state(&qubo)?;
                    StepSolution {
                        column: decode(&bits, &config.weighting)?,
                        ground_energy: Some(energy),
                        trace: None,
                        normalized_best: None,
                    }
                }
                SolverMode::Qaoa => {
                    let start = match (&carried, config.reuse_params) {
                        (Some(prev), true) => prev.clone(),
                        _ => default_initial_params(config.p),
                    };
                    let settings = QaoaSettings {
                        weighting: config.weighting.clone(),
                        epsilon: config.epsilon,
                        shots: config.shots,
                        optimizer: OptimizerConfig {
                            seed: config.optimizer.seed.wrapping_add(step as u64),
                            ..config.optimizer
                        },
                        sample_seed: config.seed.wrapping_add(step as u64),
                    };
                    let solve = solve_qaoa(&system, &start, &settings)?;
                    StepSolution {
                        column: decode(&solve.bits, &config.weighting)?,
                        ground_energy: Some(solve.ground_energy),
                        trace: Some(solve.trace),
                        normalized_best: Some(solve.normalized_best),
                    }
                }
            };
            Ok((system, relaxed, solution))
        };
        let (system, relaxed, solution) = attempt().map_err(|e| e.at_step(step))?;

        let reference = classical.column(step);
        let max_abs_deviation = solution
            .column
            .iter()
            .zip(reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let unrepresentable = if config.solver_mode.is_quantum() {
            relaxed
                .iter()
                .filter(|&&v| !(0.0..=max_value).contains(&v))
                .count()
        } else {
            0
        };
        steps.push(StepReport {
            step,
            decoded: solution.column.clone(),
            classical: reference.to_vec(),
            relaxed,
            max_abs_deviation,
            residual_energy: system.squared_residual(&solution.column),
            ground_energy: solution.ground_energy,
            unrepresentable,
        });
        if let Some(trace) = solution.trace {
            traces.push((step, trace));
        }
        if solution.normalized_best.is_some() {
            carried = solution.normalized_best;
        }
        grid.push(solution.column);
    }

    let field = TemperatureField { grid, mesh };
    let report = ComparisonReport {
        mode: config.solver_mode,
        field_max_deviation: field.max_abs_difference(&classical),
        steps,
    };
    Ok(RunOutput {
        field,
        classical,
        report,
        traces,
    })
}

/// `x,y,T` rows, x-major.
pub fn field_to_csv(field: &TemperatureField) -> String {
    let mesh = &field.mesh;
    let mut out = String::from("x,y,T\n");
    for i in 0..mesh.x_nodes() {
        for j in 0..mesh.y_nodes() {
            let _ = writeln!(out, "{},{},{}", mesh.x(i), mesh.y(j), field.at(i, j));
        }
    }
    out
}

pub fn report_to_csv(report: &ComparisonReport) -> String {
    let mut out =
        String::from("step,max_abs_deviation,residual_energy,ground_energy,unrepresentable\n");
    for s in &report.steps {
        let ground = s.ground_energy.map(|e| e.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.step, s.max_abs_deviation, s.residual_energy, ground, s.unrepresentable
        );
    }
    out
}

fn fmt_column(values: &[f64]) -> String {
    let cells: Vec<String> = values.iter().map(|v| format!("{v:.4}")).collect();
    format!("[{}]", cells.join(", "))
}

pub fn report_summary(report: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "solver mode: {}", report.mode);
    let _ = writeln!(
        out,
        "field max |quantum - classical|: {}",
        report.field_max_deviation
    );
    for s in &report.steps {
        let _ = writeln!(out, "\nstep {}", s.step);
        let _ = writeln!(out, "  decoded     {}", fmt_column(&s.decoded));
        let _ = writeln!(out, "  classical   {}", fmt_column(&s.classical));
        let _ = writeln!(out, "  step exact  {}", fmt_column(&s.relaxed));
        let _ = writeln!(out, "  max |deviation|  {}", s.max_abs_deviation);
        let _ = writeln!(out, "  residual energy  {}", s.residual_energy);
        if let Some(g) = s.ground_energy {
            let _ = writeln!(out, "  ground energy    {g}");
        }
        if s.unrepresentable > 0 {
            let _ = writeln!(
                out,
                "  WARNING: {} exact value(s) outside the representable range",
                s.unrepresentable
            );
        }
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn emit_field(field: &TemperatureField, path: &Path) -> Result<()> {
    write_file(path, &field_to_csv(field))
}

/// Writes the CSV to `path` and the readable summary next to it as `.txt`.
pub fn emit_report(report: &ComparisonReport, path: &Path) -> Result<PathBuf> {
    write_file(path, &report_to_csv(report))?;
    let summary = path.with_extension("txt");
    write_file(&summary, &report_summary(report))?;
    Ok(summary)
}

pub fn emit_traces(traces: &[(usize, OptimizationTrace)], dir: &Path) -> Result<Vec<PathBuf>> {
    traces
        .iter()
        .map(|(step, trace)| {
            let path = dir.join(format!("trace_step_{step}.csv"));
            write_file(&path, &trace.to_csv()).map(|()| path)
        })
        .collect()
}
