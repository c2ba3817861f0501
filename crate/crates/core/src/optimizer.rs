//! Nelder–Mead outer loop for the variational angles.

use std::fmt::Write as _;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qaoa::QaoaParams;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
const SIMPLEX_EDGE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    /// Objective evaluations allowed across all restarts.
    pub max_evals: usize,
    /// A run stops once the simplex values span less than this.
    pub tol: f64,
    /// Extra runs after the first, each around the best point so far.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_evals: 300,
            tol: 1e-6,
            restarts: 2,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_evals == 0 {
            return Err(Error::Config(
                "optimizer max_evals must be at least 1".into(),
            ));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!(
                "optimizer tol must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<P> {
    pub index: usize,
    pub params: P,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationTrace<P = QaoaParams> {
    pub evaluations: Vec<Evaluation<P>>,
    pub best_params: P,
    pub best_value: f64,
}

impl<P> OptimizationTrace<P> {
    pub fn map_params<Q>(self, mut f: impl FnMut(P) -> Q) -> OptimizationTrace<Q> {
        OptimizationTrace {
            evaluations: self
                .evaluations
                .into_iter()
                .map(|e| Evaluation {
                    index: e.index,
                    params: f(e.params),
                    value: e.value,
                })
                .collect(),
            best_params: f(self.best_params),
            best_value: self.best_value,
        }
    }

    /// Best value seen after each evaluation.
    pub fn running_best(&self) -> Vec<f64> {
        self.evaluations
            .iter()
            .scan(f64::INFINITY, |best, e| {
                *best = best.min(e.value);
                Some(*best)
            })
            .collect()
    }
}

impl OptimizationTrace<QaoaParams> {
    /// `eval_index,gamma_1..gamma_p,beta_1..beta_p,expectation`.
    pub fn to_csv(&self) -> String {
        let p = self.best_params.layers();
        let mut out = String::from("eval_index");
        for l in 1..=p {
            let _ = write!(out, ",gamma_{l}");
        }
        for l in 1..=p {
            let _ = write!(out, ",beta_{l}");
        }
        out.push_str(",expectation\n");
        for e in &self.evaluations {
            let _ = write!(out, "{}", e.index);
            for v in e.params.to_flat() {
                let _ = write!(out, ",{v}");
            }
            let _ = writeln!(out, ",{}", e.value);
        }
        out
    }
}

struct Budget<'a, F> {
    objective: F,
    max_evals: usize,
    trace: &'a mut Vec<Evaluation<Vec<f64>>>,
}

impl<F: FnMut(&[f64]) -> f64> Budget<'_, F> {
    /// `Ok(None)` once the budget is spent.
    fn eval(&mut self, x: &[f64]) -> Result<Option<f64>> {
        if self.trace.len() >= self.max_evals {
            return Ok(None);
        }
        let index = self.trace.len();
        let value = (self.objective)(x);
        if !value.is_finite() {
            return Err(Error::NonFinite { eval: index, value });
        }
        self.trace.push(Evaluation {
            index,
            params: x.to_vec(),
            value,
        });
        Ok(Some(value))
    }
}

/// Nelder–Mead over `ℝᵈ`, with deterministic restarts.
pub fn nelder_mead<F>(
    objective: F,
    initial: &[f64],
    config: &OptimizerConfig,
) -> Result<OptimizationTrace<Vec<f64>>>
where
    F: FnMut(&[f64]) -> f64,
{
    config.validate()?;
    if initial.is_empty() {
        return Err(Error::Config("cannot optimize over zero parameters".into()));
    }
    let dim = initial.len();
    let mut trace = Vec::new();
    let mut budget = Budget {
        objective,
        max_evals: config.max_evals,
        trace: &mut trace,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut offsets: Vec<f64> = vec![SIMPLEX_EDGE; dim];
    let mut base = initial.to_vec();
    for run in 0..=config.restarts {
        if run > 0 {
            offsets = (0..dim)
                .map(|_| {
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    sign * SIMPLEX_EDGE * rng.gen_range(0.5..1.5)
                })
                .collect();
        }
        if !simplex_run(&mut budget, &base, &offsets, config.tol)? {
            break;
        }
        base = best_of(budget.trace).params.clone();
    }

    let best = best_of(&trace).clone();
    Ok(OptimizationTrace {
        evaluations: trace,
        best_params: best.params,
        best_value: best.value,
    })
}

fn best_of<P>(trace: &[Evaluation<P>]) -> &Evaluation<P> {
    trace
        .iter()
        .reduce(|best, e| if e.value < best.value { e } else { best })
        .expect("trace holds at least one evaluation")
}

/// One simplex descent. Returns `false` if the budget ran out.
fn simplex_run<F: FnMut(&[f64]) -> f64>(
    budget: &mut Budget<'_, F>,
    base: &[f64],
    offsets: &[f64],
    tol: f64,
) -> Result<bool> {
    let dim = base.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    for vertex in 0..=dim {
        let mut x = base.to_vec();
        if vertex > 0 {
            x[vertex - 1] += offsets[vertex - 1];
        }
        match budget.eval(&x)? {
            Some(f) => simplex.push((x, f)),
            None => return Ok(false),
        }
    }

    loop {
        // Stable sort keeps earlier vertices first on ties.
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if worst - best < tol {
            return Ok(true);
        }
        let second_worst = simplex[dim - 1].1;

        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|(x, _)| x[k]).sum::<f64>() / dim as f64)
            .collect();
        let toward = |from: &[f64], t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(c, x)| c + t * (x - c))
                .collect()
        };
        let worst_x = simplex[dim].0.clone();

        let reflected = toward(&worst_x, -REFLECT);
        let Some(fr) = budget.eval(&reflected)? else {
            return Ok(false);
        };

        if fr < best {
            let expanded = toward(&worst_x, -REFLECT * EXPAND);
            let Some(fe) = budget.eval(&expanded)? else {
                return Ok(false);
            };
            simplex[dim] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < second_worst {
            simplex[dim] = (reflected, fr);
            continue;
        }

        let outside = fr < worst;
        let contracted = if outside {
            toward(&reflected, CONTRACT)
        } else {
            toward(&worst_x, CONTRACT)
        };
        let Some(fc) = budget.eval(&contracted)? else {
            return Ok(false);
        };
        if (outside && fc <= fr) || (!outside && fc < worst) {
            simplex[dim] = (contracted, fc);
            continue;
        }

        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = anchor
                .iter()
                .zip(&vertex.0)
                .map(|(a, x)| a + SHRINK * (x - a))
                .collect();
            let Some(f) = budget.eval(&x)? else {
                return Ok(false);
            };
            *vertex = (x, f);
        }
    }
}

/// Minimizes an objective over QAOA angles.
pub fn minimize<F>(
    mut objective: F,
    initial: &QaoaParams,
    config: &OptimizerConfig,
) -> Result<OptimizationTrace<QaoaParams>>
where
    F: FnMut(&QaoaParams) -> f64,
{
    let trace = nelder_mead(
        |flat| {
            let params = QaoaParams::from_flat(flat).expect("flat length is 2p");
            objective(&params)
        },
        &initial.to_flat(),
        config,
    )?;
    Ok(trace.map_params(|flat| QaoaParams::from_flat(&flat).expect("flat length is 2p")))
}
