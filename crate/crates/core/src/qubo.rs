//! Binarized least-squares objectives in QUBO and Ising form.
//!
//! Each unknown `s_i` of an `N`-variable system is written as
//! `s_i = Σ_r w_r q_{i,r}` with power-of-two weights `w_r`. Binary variable
//! `(i, r)` sits at flat position `i·R + r`, so each unknown owns one
//! contiguous block with its smallest weight first.
//!
//! A bitstring `(q_0, …, q_{n−1})` maps to basis index
//! `x = Σ_k q_k 2^{n−1−k}`: variable 0 is the most significant bit, and
//! lexicographic order on bitstrings coincides with numeric order on indices.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::MarchingSystem;

/// Largest variable count accepted by exhaustive enumeration.
pub const MAX_ENUMERATION_VARS: usize = 26;

/// Largest bit count per unknown for which nearest-value search enumerates.
const MAX_NEAREST_SEARCH_BITS: usize = 20;

/// Exponent list `e` of the weights `w_r = 2^{e_r}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i32>", into = "Vec<i32>")]
pub struct BitWeighting {
    exponents: Vec<i32>,
}

impl Default for BitWeighting {
    fn default() -> Self {
        Self {
            exponents: vec![0, 1, 2, 3, 4],
        }
    }
}

impl TryFrom<Vec<i32>> for BitWeighting {
    type Error = Error;

    fn try_from(exponents: Vec<i32>) -> Result<Self> {
        Self::new(exponents)
    }
}

impl From<BitWeighting> for Vec<i32> {
    fn from(w: BitWeighting) -> Self {
        w.exponents
    }
}

impl BitWeighting {
    pub fn new(exponents: Vec<i32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::Encoding("weighting needs at least one bit".into()));
        }
        if exponents.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::Encoding(format!(
                "exponents must be strictly increasing, got {exponents:?}"
            )));
        }
        if exponents.iter().any(|e| e.abs() > 1000) {
            return Err(Error::Encoding(format!(
                "exponent out of range in {exponents:?}"
            )));
        }
        Ok(Self { exponents })
    }

    pub fn exponents(&self) -> &[i32] {
        &self.exponents
    }

    pub fn bits(&self) -> usize {
        self.exponents.len()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.exponents.iter().map(|&e| 2f64.powi(e)).collect()
    }

    /// Smallest weight, i.e. the spacing of representable values.
    pub fn resolution(&self) -> f64 {
        2f64.powi(self.exponents[0])
    }

    /// Largest representable value (all bits set).
    pub fn max_value(&self) -> f64 {
        self.weights().iter().sum()
    }

    /// Bits of the representable value closest to `value`; ties go to the
    /// smaller value.
    pub fn nearest_bits(&self, value: f64) -> Vec<bool> {
        let weights = self.weights();
        let r = weights.len();
        if r <= MAX_NEAREST_SEARCH_BITS {
            let mut best = (f64::INFINITY, f64::INFINITY, 0usize);
            for mask in 0..1usize << r {
                let v: f64 = (0..r)
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| weights[b])
                    .sum();
                let d = (v - value).abs();
                if d < best.0 || (d == best.0 && v < best.1) {
                    best = (d, v, mask);
                }
            }
            (0..r).map(|b| best.2 >> b & 1 == 1).collect()
        } else {
            // Greedy from the largest weight; exact for contiguous exponents.
            let mut bits = vec![false; r];
            let mut rest = value.max(0.0) + 0.5 * weights[0];
            for b in (0..r).rev() {
                if rest >= weights[b] {
                    bits[b] = true;
                    rest -= weights[b];
                }
            }
            bits
        }
    }

    /// Entrywise nearest representable vector and its bit encoding.
    pub fn encode_nearest(&self, values: &[f64]) -> (Vec<bool>, Vec<f64>) {
        let bits: Vec<bool> = values.iter().flat_map(|&v| self.nearest_bits(v)).collect();
        let decoded = decode(&bits, self).expect("length is a multiple of R");
        (bits, decoded)
    }
}

/// `s_i = Σ_r w_r · bit_{i·R + r}`.
pub fn decode(bits: &[bool], weighting: &BitWeighting) -> Result<Vec<f64>> {
    let r = weighting.bits();
    if !bits.len().is_multiple_of(r) {
        return Err(Error::Encoding(format!(
            "{} bits is not a multiple of R = {r}",
            bits.len()
        )));
    }
    let weights = weighting.weights();
    Ok(bits
        .chunks(r)
        .map(|block| {
            block
                .iter()
                .zip(&weights)
                .filter(|(&bit, _)| bit)
                .map(|(_, w)| w)
                .sum()
        })
        .collect())
}

pub fn bits_from_index(index: usize, n: usize) -> Vec<bool> {
    (0..n).map(|k| index >> (n - 1 - k) & 1 == 1).collect()
}

pub fn index_from_bits(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| acc << 1 | usize::from(b))
}

pub fn bitstring_label(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// `E(q) = qᵀ Q q + Lᵀ q + C` over `q ∈ {0,1}ⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboInstance {
    n: usize,
    /// Row-major `n × n`, kept symmetric.
    quad: Vec<f64>,
    linear: Vec<f64>,
    offset: f64,
}

impl QuboInstance {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            quad: vec![0.0; n * n],
            linear: vec![0.0; n],
            offset: 0.0,
        }
    }

    /// `quad` is symmetrized as `(Q + Qᵀ)/2`, which leaves every energy unchanged.
    pub fn new(quad: Vec<Vec<f64>>, linear: Vec<f64>, offset: f64) -> Result<Self> {
        let n = linear.len();
        if quad.len() != n || quad.iter().any(|row| row.len() != n) {
            return Err(Error::Dimension(format!(
                "quadratic matrix must be {n}×{n} to match the linear term"
            )));
        }
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.quad[i * n + j] = 0.5 * (quad[i][j] + quad[j][i]);
            }
        }
        out.linear = linear;
        out.offset = offset;
        Ok(out)
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn quad(&self, i: usize, j: usize) -> f64 {
        self.quad[i * self.n + j]
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Adds `c` to the `q_i q_j` pair coefficient (`i ≠ j`) or to the linear
    /// term (`i = j`).
    pub fn add_term(&mut self, i: usize, j: usize, c: f64) {
        if i == j {
            self.linear[i] += c;
        } else {
            let n = self.n;
            self.quad[i * n + j] += 0.5 * c;
            self.quad[j * n + i] += 0.5 * c;
        }
    }

    /// Full coefficient of `q_i q_j` for `i ≠ j`, i.e. `Q_ij + Q_ji`.
    pub fn pair(&self, i: usize, j: usize) -> f64 {
        self.quad(i, j) + self.quad(j, i)
    }

    /// Coefficient of `q_i` once `q_i² = q_i` is applied.
    pub fn effective_linear(&self, i: usize) -> f64 {
        self.linear[i] + self.quad(i, i)
    }

    pub fn energy(&self, bits: &[bool]) -> f64 {
        assert_eq!(bits.len(), self.n, "bitstring length");
        let mut e = self.offset;
        for i in (0..self.n).filter(|&i| bits[i]) {
            e += self.linear[i];
            let row = &self.quad[i * self.n..(i + 1) * self.n];
            e += (0..self.n)
                .filter(|&j| bits[j])
                .map(|j| row[j])
                .sum::<f64>();
        }
        e
    }

    pub fn energy_of_index(&self, index: usize) -> f64 {
        self.energy(&bits_from_index(index, self.n))
    }

    /// Plain-text interchange form.
    ///
    /// First line `n offset`; then one `i j coeff` line per nonzero term with
    /// `i ≤ j`. `i = j` lines carry the linear coefficient of `q_i`, `i < j`
    /// lines the full coefficient of `q_i q_j`. Numbers are written in
    /// shortest round-trip form.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.offset);
        for i in 0..self.n {
            let lin = self.effective_linear(i);
            if lin != 0.0 {
                let _ = writeln!(out, "{i} {i} {lin}");
            }
            for j in i + 1..self.n {
                let c = self.pair(i, j);
                if c != 0.0 {
                    let _ = writeln!(out, "{i} {j} {c}");
                }
            }
        }
        out
    }

    /// Parses [`QuboInstance::to_text`] output; `#` starts a comment line and
    /// repeated terms accumulate.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty QUBO text".into()))?;
        let mut head = header.split_whitespace();
        let n: usize = parse_field(head.next(), 1, "n")?;
        let offset: f64 = parse_field(head.next(), 1, "offset")?;
        if head.next().is_some() {
            return Err(Error::Parse("line 1: expected `n offset`".into()));
        }
        let mut qubo = Self::zeros(n);
        qubo.offset = offset;
        for (lineno, line) in lines {
            let mut parts = line.split_whitespace();
            let i: usize = parse_field(parts.next(), lineno + 1, "i")?;
            let j: usize = parse_field(parts.next(), lineno + 1, "j")?;
            let c: f64 = parse_field(parts.next(), lineno + 1, "coeff")?;
            if parts.next().is_some() {
                return Err(Error::Parse(format!(
                    "line {}: trailing tokens",
                    lineno + 1
                )));
            }
            if i >= n || j >= n {
                return Err(Error::Parse(format!(
                    "line {}: index out of range for n = {n}",
                    lineno + 1
                )));
            }
            qubo.add_term(i, j, c);
        }
        Ok(qubo)
    }
}

fn parse_field<T: std::str::FromStr>(token: Option<&str>, line: usize, name: &str) -> Result<T> {
    token
        .ok_or_else(|| Error::Parse(format!("line {line}: missing {name}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad {name}")))
}

/// `E(z) = Σ_{i<j} J_ij z_i z_j + Σ_i h_i z_i + c` over `z ∈ {−1,+1}ⁿ`.
///
/// Spin `z = +1` corresponds to bit `q = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingInstance {
    n: usize,
    couplings: Vec<f64>,
    fields: Vec<f64>,
    offset: f64,
}

impl IsingInstance {
    pub fn num_spins(&self) -> usize {
        self.n
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings[i * self.n + j]
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn energy(&self, spins: &[i8]) -> f64 {
        assert_eq!(spins.len(), self.n, "spin count");
        let mut e = self.offset;
        for i in 0..self.n {
            let zi = f64::from(spins[i]);
            e += self.fields[i] * zi;
            for j in i + 1..self.n {
                e += self.coupling(i, j) * zi * f64::from(spins[j]);
            }
        }
        e
    }
}

pub fn spins_from_bits(bits: &[bool]) -> Vec<i8> {
    bits.iter().map(|&b| if b { 1 } else { -1 }).collect()
}

/// Substitutes `q = (z + 1)/2`.
pub fn qubo_to_ising(qubo: &QuboInstance) -> IsingInstance {
    let n = qubo.num_vars();
    let mut couplings = vec![0.0; n * n];
    let mut fields = vec![0.0; n];
    let mut offset = qubo.offset();
    for i in 0..n {
        let lin = qubo.effective_linear(i);
        fields[i] += 0.5 * lin;
        offset += 0.5 * lin;
        for j in i + 1..n {
            let p = qubo.pair(i, j);
            couplings[i * n + j] = 0.25 * p;
            couplings[j * n + i] = 0.25 * p;
            fields[i] += 0.25 * p;
            fields[j] += 0.25 * p;
            offset += 0.25 * p;
        }
    }
    IsingInstance {
        n,
        couplings,
        fields,
        offset,
    }
}

/// Substitutes `z = 2q − 1`.
pub fn ising_to_qubo(ising: &IsingInstance) -> QuboInstance {
    let n = ising.num_spins();
    let mut qubo = QuboInstance::zeros(n);
    qubo.offset = ising.offset();
    for i in 0..n {
        let h = ising.fields[i];
        qubo.linear[i] += 2.0 * h;
        qubo.offset -= h;
        for j in i + 1..n {
            let jij = ising.coupling(i, j);
            qubo.add_term(i, j, 4.0 * jij);
            qubo.linear[i] -= 2.0 * jij;
            qubo.linear[j] -= 2.0 * jij;
            qubo.offset += jij;
        }
    }
    qubo
}

/// Expands `‖A·s − b‖²` with `s = decode(q)` into an exact QUBO.
pub fn encode_qubo(system: &MarchingSystem, weighting: &BitWeighting) -> Result<QuboInstance> {
    let dim = system.dim();
    let a = system.matrix.to_dense();
    let b = &system.rhs;
    let w = weighting.weights();
    let r = w.len();

    // Gram matrix AᵀA and Aᵀb.
    let mut gram = vec![vec![0.0; dim]; dim];
    let mut atb = vec![0.0; dim];
    for (row, &bk) in a.iter().zip(b) {
        for i in 0..dim {
            if row[i] == 0.0 {
                continue;
            }
            atb[i] += row[i] * bk;
            for j in 0..dim {
                gram[i][j] += row[i] * row[j];
            }
        }
    }

    let n = dim * r;
    let mut qubo = QuboInstance::zeros(n);
    for i in 0..dim {
        for (ri, &wr) in w.iter().enumerate() {
            let u = i * r + ri;
            qubo.linear[u] = gram[i][i] * wr * wr - 2.0 * atb[i] * wr;
            for j in 0..dim {
                for (tj, &wt) in w.iter().enumerate() {
                    let v = j * r + tj;
                    if u != v {
                        qubo.quad[u * n + v] = gram[i][j] * wr * wt;
                    }
                }
            }
        }
    }
    qubo.offset = b.iter().map(|x| x * x).sum();
    Ok(qubo)
}

pub(crate) fn check_capacity(n: usize) -> Result<()> {
    if n > MAX_ENUMERATION_VARS {
        return Err(Error::Capacity {
            needed: n,
            limit: MAX_ENUMERATION_VARS,
        });
    }
    Ok(())
}

/// Visits every basis index with its energy in Gray-code order.
///
/// Each step flips one variable and updates the energy from a maintained
/// local-field vector, so a visit costs `O(n)` instead of `O(n²)`.
pub fn for_each_energy(qubo: &QuboInstance, mut visit: impl FnMut(usize, f64)) -> Result<()> {
    let n = qubo.num_vars();
    check_capacity(n)?;
    let pair: Vec<f64> = (0..n * n)
        .map(|u| {
            let (i, j) = (u / n, u % n);
            if i == j {
                0.0
            } else {
                qubo.pair(i, j)
            }
        })
        .collect();
    let mut field: Vec<f64> = (0..n).map(|i| qubo.effective_linear(i)).collect();
    let mut bits = vec![false; n];
    let mut energy = qubo.offset();
    let mut index = 0usize;
    visit(index, energy);
    for step in 1..1usize << n {
        let t = step.trailing_zeros() as usize;
        let k = n - 1 - t;
        let sign = if bits[k] { -1.0 } else { 1.0 };
        energy += sign * field[k];
        bits[k] = !bits[k];
        let row = &pair[k * n..(k + 1) * n];
        for (f, &p) in field.iter_mut().zip(row) {
            *f += sign * p;
        }
        index ^= 1 << t;
        visit(index, energy);
    }
    Ok(())
}

/// Ties within this relative band count as degenerate.
pub(crate) fn same_energy(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Exhaustive minimum; among degenerate minima the lexicographically smallest
/// bitstring wins.
pub fn brute_force_ground_state(qubo: &QuboInstance) -> Result<(Vec<bool>, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for_each_energy(qubo, |index, e| match best {
        Some((bi, be)) if same_energy(e, be) => {
            if index < bi {
                best = Some((index, e));
            }
        }
        Some((_, be)) if e > be => {}
        _ => best = Some((index, e)),
    })?;
    let (index, _) = best.expect("enumeration visits at least one state");
    let bits = bits_from_index(index, qubo.num_vars());
    let energy = qubo.energy(&bits);
    Ok((bits, energy))
}
