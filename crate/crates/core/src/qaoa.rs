//! Exact statevector simulation of QAOA on a diagonal cost.
//!
//! Qubit `k` carries binary variable `k`; basis index `x` follows the
//! big-endian convention of [`crate::qubo`] (qubit 0 is the most significant
//! bit of `x`).

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{check_capacity, for_each_energy, same_energy, QuboInstance};

/// Measurement counts keyed by basis index.
pub type Histogram = BTreeMap<usize, u64>;

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    pub fn basis(n: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { n, amplitudes }
    }

    /// `|+⟩^⊗n`, the standard QAOA starting state.
    pub fn uniform(n: usize) -> Self {
        let dim = 1usize << n;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Self {
            n,
            amplitudes: vec![a; dim],
        }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "{dim} amplitudes is not a power of two"
            )));
        }
        Ok(Self {
            n: dim.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Complex64::norm_sqr).collect()
    }
}

/// Layer angles `γ_1..γ_p` (cost) and `β_1..β_p` (mixer).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(Error::Config(format!(
                "need p ≥ 1 gammas and betas of equal length, got {} and {}",
                gammas.len(),
                betas.len()
            )));
        }
        Ok(Self { gammas, betas })
    }

    /// Inverse of [`QaoaParams::to_flat`]: the first half are gammas.
    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if !flat.len().is_multiple_of(2) {
            return Err(Error::Config(format!("odd parameter count {}", flat.len())));
        }
        let (g, b) = flat.split_at(flat.len() / 2);
        Self::new(g.to_vec(), b.to_vec())
    }

    pub fn zeros(p: usize) -> Self {
        Self {
            gammas: vec![0.0; p],
            betas: vec![0.0; p],
        }
    }

    pub fn layers(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn scale_gammas(&self, factor: f64) -> Self {
        Self {
            gammas: self.gammas.iter().map(|g| g * factor).collect(),
            betas: self.betas.clone(),
        }
    }
}

/// Cost of every basis state, indexed like the statevector.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTable {
    n: usize,
    energies: Vec<f64>,
}

impl EnergyTable {
    pub fn from_energies(energies: Vec<f64>) -> Result<Self> {
        let dim = energies.len();
        if !dim.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "{dim} energies is not a power of two"
            )));
        }
        Ok(Self {
            n: dim.trailing_zeros() as usize,
            energies,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn get(&self, index: usize) -> f64 {
        self.energies[index]
    }

    pub fn min(&self) -> f64 {
        self.energies.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.energies
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.energies.iter().sum::<f64>() / self.energies.len() as f64
    }
}

pub fn build_energy_table(qubo: &QuboInstance) -> Result<EnergyTable> {
    let n = qubo.num_vars();
    check_capacity(n)?;
    let mut energies = vec![0.0; 1 << n];
    for_each_energy(qubo, |x, e| energies[x] = e)?;
    Ok(EnergyTable { n, energies })
}

fn check_dims(state: &Statevector, table: &EnergyTable) {
    assert_eq!(
        state.n, table.n,
        "statevector has {} qubits, energy table {}",
        state.n, table.n
    );
}

/// `|ψ⟩ ← e^{−iγC}|ψ⟩`.
pub fn apply_cost_layer(state: &mut Statevector, table: &EnergyTable, gamma: f64) {
    check_dims(state, table);
    if gamma == 0.0 {
        return;
    }
    for (a, &e) in state.amplitudes.iter_mut().zip(&table.energies) {
        *a *= Complex64::from_polar(1.0, -gamma * e);
    }
}

/// `|ψ⟩ ← Π_j e^{−iβX_j}|ψ⟩`.
pub fn apply_mixer_layer(state: &mut Statevector, beta: f64) {
    if beta == 0.0 {
        return;
    }
    let (s, c) = beta.sin_cos();
    let minus_is = Complex64::new(0.0, -s);
    let amps = &mut state.amplitudes;
    for qubit in 0..state.n {
        let stride = 1usize << (state.n - 1 - qubit);
        for block in amps.chunks_exact_mut(2 * stride) {
            let (zeros, ones) = block.split_at_mut(stride);
            for (a0, a1) in zeros.iter_mut().zip(ones.iter_mut()) {
                let (x0, x1) = (*a0, *a1);
                *a0 = x0 * c + x1 * minus_is;
                *a1 = x0 * minus_is + x1 * c;
            }
        }
    }
}

/// Product state `⊗_j (√(1−c_j)|0⟩ + √c_j|1⟩)` with each `c_j` clamped into
/// `[ε, 1−ε]`. `ε = 0.5` gives the uniform superposition.
pub fn warm_start_state(relaxed_bits: &[f64], epsilon: f64) -> Result<Statevector> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::Config(format!(
            "warm-start epsilon {epsilon} not in (0, 0.5]"
        )));
    }
    if let Some(v) = relaxed_bits.iter().find(|v| !v.is_finite()) {
        return Err(Error::Config(format!("non-finite relaxed value {v}")));
    }
    check_capacity(relaxed_bits.len())?;
    let mut amplitudes = vec![Complex64::new(1.0, 0.0)];
    for &value in relaxed_bits {
        let c = value.clamp(epsilon, 1.0 - epsilon);
        let (zero, one) = ((1.0 - c).sqrt(), c.sqrt());
        amplitudes = amplitudes
            .iter()
            .flat_map(|&a| [a * zero, a * one])
            .collect();
    }
    Statevector::from_amplitudes(amplitudes)
}

/// Applies `p` alternating cost and mixer layers to a copy of `initial`.
pub fn run_circuit(table: &EnergyTable, params: &QaoaParams, initial: &Statevector) -> Statevector {
    let mut state = initial.clone();
    evolve(&mut state, table, params);
    state
}

/// [`run_circuit`] writing into an existing buffer.
pub fn run_circuit_into(
    table: &EnergyTable,
    params: &QaoaParams,
    initial: &Statevector,
    out: &mut Statevector,
) {
    out.n = initial.n;
    out.amplitudes.clear();
    out.amplitudes.extend_from_slice(&initial.amplitudes);
    evolve(out, table, params);
}

fn evolve(state: &mut Statevector, table: &EnergyTable, params: &QaoaParams) {
    for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
        apply_cost_layer(state, table, gamma);
        apply_mixer_layer(state, beta);
    }
}

/// `⟨ψ|C|ψ⟩ = Σ_x |α_x|² E_x`.
pub fn expectation(state: &Statevector, table: &EnergyTable) -> f64 {
    check_dims(state, table);
    state
        .amplitudes
        .iter()
        .zip(&table.energies)
        .map(|(a, e)| a.norm_sqr() * e)
        .sum()
}

/// Draws `shots` computational-basis measurements.
pub fn sample(state: &Statevector, shots: u64, seed: u64) -> Result<Histogram> {
    if shots == 0 {
        return Err(Error::Config("shots must be at least 1".into()));
    }
    let dist = WeightedIndex::new(state.probabilities())
        .map_err(|e| Error::Dimension(format!("cannot sample statevector: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hist = Histogram::new();
    for _ in 0..shots {
        *hist.entry(dist.sample(&mut rng)).or_insert(0) += 1;
    }
    Ok(hist)
}

/// Lowest-energy outcome among those observed, whatever its frequency.
pub fn best_sampled(histogram: &Histogram, table: &EnergyTable) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    // BTreeMap iterates in ascending index order, so the first of a tie wins.
    for &x in histogram.keys() {
        let e = table.get(x);
        match best {
            Some((_, be)) if same_energy(e, be) || e > be => {}
            _ => best = Some((x, e)),
        }
    }
    best.ok_or_else(|| Error::Dimension("empty histogram".into()))
}
