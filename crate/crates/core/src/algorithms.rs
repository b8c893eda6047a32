//! Canonical quantum algorithms at desk scale: Deutsch, Simon, phase
//! estimation and Grover search (circuit and Hamiltonian forms), each with
//! its classical post-processing and oracle-call accounting.

use crate::circuits;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::states::StateVector;
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Table-backed boolean function oracle `f: {0,1}^n_in → {0,1}^n_out`,
/// applied as the permutation `|x⟩|y⟩ → |x⟩|y⊕f(x)⟩`.
#[derive(Debug, Clone)]
pub struct BooleanOracle {
    pub n_in: usize,
    pub n_out: usize,
    table: Vec<usize>,
}

impl BooleanOracle {
    pub fn new(n_in: usize, n_out: usize, table: Vec<usize>) -> Result<Self> {
        if table.len() != 1 << n_in {
            return Err(Error::DimensionMismatch(format!(
                "table of {} entries for {n_in} input bits",
                table.len()
            )));
        }
        if table.iter().any(|&v| v >= 1 << n_out) {
            return Err(Error::InvalidParameter(format!(
                "table value exceeds {n_out} output bits"
            )));
        }
        Ok(Self { n_in, n_out, table })
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn eval(&self, x: usize) -> usize {
        self.table[x]
    }

    /// Permutation matrix of `|x⟩|y⟩ → |x⟩|y⊕f(x)⟩` (input register as the
    /// most significant factor).
    pub fn unitary(&self) -> ComplexMatrix {
        let dim = 1 << (self.n_in + self.n_out);
        let mut m = ComplexMatrix::zeros(dim, dim);
        for col in 0..dim {
            let x = col >> self.n_out;
            let y = col & ((1 << self.n_out) - 1);
            let row = (x << self.n_out) | (y ^ self.table[x]);
            m.set(row, col, C64::new(1.0, 0.0));
        }
        m
    }

    /// In-place application of the oracle permutation to a joint state.
    pub fn apply(&self, amps: &mut [C64]) {
        let out_mask = (1 << self.n_out) - 1;
        let mut moved = vec![false; amps.len()];
        for idx in 0..amps.len() {
            if moved[idx] {
                continue;
            }
            let x = idx >> self.n_out;
            let y = idx & out_mask;
            let dst = (x << self.n_out) | (y ^ self.table[x]);
            if dst != idx {
                amps.swap(idx, dst);
                moved[dst] = true;
            }
            moved[idx] = true;
        }
    }
}

/// Deutsch's verdict on a one-bit function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeutschVerdict {
    Constant,
    Balanced,
}

#[derive(Debug, Clone)]
pub struct DeutschOutcome {
    pub verdict: DeutschVerdict,
    pub oracle_calls: usize,
}

/// Classify a one-bit function as constant or balanced with a single oracle
/// application: X on the ancilla, Hadamards, the oracle, a final Hadamard on
/// the first qubit, then read it out. Deterministic.
pub fn deutsch(f: &BooleanOracle) -> Result<DeutschOutcome> {
    if f.n_in != 1 || f.n_out != 1 {
        return Err(Error::DimensionMismatch(
            "Deutsch's algorithm expects a 1-bit to 1-bit oracle".into(),
        ));
    }
    // |0⟩|1⟩ after the X gate
    let mut amps = vec![C64::new(0.0, 0.0); 4];
    amps[0b01] = C64::new(1.0, 0.0);
    hadamard_on(&mut amps, 2, 0);
    hadamard_on(&mut amps, 2, 1);
    let mut oracle_calls = 0;
    f.apply(&mut amps);
    oracle_calls += 1;
    hadamard_on(&mut amps, 2, 0);
    // p(first qubit = 0)
    let p0 = amps[0b00].norm_sqr() + amps[0b01].norm_sqr();
    let verdict = if p0 > 0.5 {
        DeutschVerdict::Constant
    } else {
        DeutschVerdict::Balanced
    };
    Ok(DeutschOutcome {
        verdict,
        oracle_calls,
    })
}

// In-place Hadamard on one wire of an n-qubit amplitude buffer
// (wire 0 = most significant bit).
fn hadamard_on(amps: &mut [C64], n: usize, wire: usize) {
    let bit = n - 1 - wire;
    let inv = 1.0 / 2.0_f64.sqrt();
    for idx in 0..amps.len() {
        if idx >> bit & 1 == 0 {
            let a = amps[idx];
            let b = amps[idx | (1 << bit)];
            amps[idx] = (a + b) * C64::new(inv, 0.0);
            amps[idx | (1 << bit)] = (a - b) * C64::new(inv, 0.0);
        }
    }
}

/// Check the Simon promise `f(x) = f(y) ⇔ y = x ⊕ s` for some `s ≠ 0` and
/// return that `s` (used only for validation; the algorithm recovers it from
/// samples).
fn simon_promise_secret(f: &BooleanOracle) -> Result<usize> {
    if f.n_in != f.n_out {
        return Err(Error::PromiseViolated(
            "Simon oracle must map n bits to n bits".into(),
        ));
    }
    let mut first_preimage = std::collections::HashMap::new();
    let mut secret = None;
    for (x, &v) in f.table.iter().enumerate() {
        match first_preimage.get(&v) {
            None => {
                first_preimage.insert(v, x);
            }
            Some(&x0) => {
                let s = x0 ^ x;
                match secret {
                    None => secret = Some(s),
                    Some(prev) if prev == s => {}
                    Some(prev) => {
                        return Err(Error::PromiseViolated(format!(
                            "colliding pairs give different periods {prev:#b} and {s:#b}"
                        )))
                    }
                }
            }
        }
    }
    let s = secret.ok_or_else(|| Error::PromiseViolated("function is injective (s = 0)".into()))?;
    for x in 0..f.table.len() {
        if f.table[x] != f.table[x ^ s] {
            return Err(Error::PromiseViolated(format!(
                "f({x}) != f({})",
                x ^ s
            )));
        }
    }
    Ok(s)
}

/// One run of Simon's quantum subcircuit: returns a sample `z` with
/// `z·s = 0 (mod 2)`.
pub fn simon_sample(f: &BooleanOracle, rng: &mut impl Rng) -> usize {
    let n = f.n_in;
    let total = 1usize << (2 * n);
    // After H^⊗n on the input register and the oracle on |x⟩|0⟩:
    let inv = 1.0 / (1u64 << n) as f64;
    let mut amps = vec![C64::new(0.0, 0.0); total];
    for x in 0..1usize << n {
        amps[(x << n) | f.table[x]] = C64::new(inv.sqrt(), 0.0);
    }
    for wire in 0..n {
        hadamard_on(&mut amps, 2 * n, wire);
    }
    // marginal over the input register
    let mut probs = vec![0.0; 1 << n];
    for (idx, amp) in amps.iter().enumerate() {
        probs[idx >> n] += amp.norm_sqr();
    }
    let draw: f64 = rng.gen();
    let mut acc = 0.0;
    for (z, &p) in probs.iter().enumerate() {
        acc += p;
        if draw < acc {
            return z;
        }
    }
    probs.len() - 1
}

/// Row-echelon accumulator over GF(2).
#[derive(Debug, Default, Clone)]
pub struct Gf2Basis {
    rows: Vec<usize>,
}

impl Gf2Basis {
    /// Reduce and insert; returns true if the vector was independent.
    pub fn insert(&mut self, mut v: usize) -> bool {
        for &r in &self.rows {
            let pivot = usize::BITS - 1 - r.leading_zeros();
            if v >> pivot & 1 == 1 {
                v ^= r;
            }
        }
        if v == 0 {
            return false;
        }
        self.rows.push(v);
        self.rows.sort_unstable_by(|a, b| b.cmp(a));
        true
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// The unique nonzero vector of `n` bits orthogonal to every basis row,
    /// valid when the rank is `n-1`.
    pub fn null_vector(&self, n: usize) -> Option<usize> {
        if self.rank() != n - 1 {
            return None;
        }
        // full reduction to RREF
        let mut rows = self.rows.clone();
        rows.sort_unstable_by(|a, b| b.cmp(a));
        for i in (0..rows.len()).rev() {
            let pivot = usize::BITS - 1 - rows[i].leading_zeros();
            for j in 0..i {
                if rows[j] >> pivot & 1 == 1 {
                    rows[j] ^= rows[i];
                }
            }
        }
        let pivots: Vec<u32> = rows
            .iter()
            .map(|r| usize::BITS - 1 - r.leading_zeros())
            .collect();
        let free: u32 = (0..n as u32)
            .find(|b| !pivots.contains(b))
            .expect("rank n-1 leaves one free bit");
        let mut s = 1usize << free;
        for (row, &p) in rows.iter().zip(&pivots) {
            if row >> free & 1 == 1 {
                s |= 1 << p;
            }
        }
        Some(s)
    }
}

#[derive(Debug, Clone)]
pub struct SimonOutcome {
    /// The recovered period, satisfying `f(x) = f(x⊕s)` for all `x`.
    pub s: usize,
    pub oracle_calls: usize,
    /// Every sampled `z`, each satisfying `z·s = 0 (mod 2)`.
    pub samples: Vec<usize>,
}

/// Simon's algorithm: sample `z` values until `n-1` linearly independent
/// nonzero ones are collected, then read `s` off the GF(2) null space.
pub fn simon(f: &BooleanOracle, seed: u64, max_calls: usize) -> Result<SimonOutcome> {
    let true_s = simon_promise_secret(f)?;
    let n = f.n_in;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis = Gf2Basis::default();
    let mut samples = Vec::new();
    let mut oracle_calls = 0;
    while basis.rank() < n - 1 {
        if oracle_calls >= max_calls {
            return Err(Error::MaxCallsExceeded {
                calls: oracle_calls,
                needed: n - 1,
            });
        }
        let z = simon_sample(f, &mut rng);
        oracle_calls += 1;
        samples.push(z);
        if z != 0 {
            basis.insert(z);
        }
    }
    let s = basis.null_vector(n).expect("rank is n-1");
    debug_assert_eq!(s, true_s);
    for x in 0..1usize << n {
        if f.table[x] != f.table[x ^ s] {
            return Err(Error::PromiseViolated(format!(
                "recovered s = {s:#b} fails at x = {x}"
            )));
        }
    }
    Ok(SimonOutcome {
        s,
        oracle_calls,
        samples,
    })
}

/// A unitary with a known eigenvector whose phase is to be estimated.
#[derive(Debug, Clone)]
pub struct PhaseEstimationInstance {
    pub unitary: ComplexMatrix,
    pub eigenvector: StateVector,
    pub n_bits: usize,
}

impl PhaseEstimationInstance {
    pub fn new(unitary: ComplexMatrix, eigenvector: StateVector, n_bits: usize, tol: f64) -> Result<Self> {
        if unitary.rows() != eigenvector.dim() {
            return Err(Error::DimensionMismatch(
                "eigenvector does not match unitary dimension".into(),
            ));
        }
        let residual = unitary.unitarity_residual();
        if !(residual < 1e-8) {
            return Err(Error::NotUnitary { residual });
        }
        let image = unitary.mul_vec(eigenvector.amplitudes());
        let lambda: C64 = eigenvector
            .amplitudes()
            .iter()
            .zip(&image)
            .map(|(a, b)| a.conj() * b)
            .sum();
        let err: f64 = image
            .iter()
            .zip(eigenvector.amplitudes())
            .map(|(b, a)| (b - lambda * a).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if err > tol || (lambda.norm() - 1.0).abs() > tol {
            return Err(Error::InvalidParameter(format!(
                "eigenvector residual {err:.3e} exceeds tolerance"
            )));
        }
        Ok(Self {
            unitary,
            eigenvector,
            n_bits,
        })
    }

    /// The true phase `φ ∈ [0,1)` with `U|u⟩ = e^{i2πφ}|u⟩`.
    pub fn phase(&self) -> f64 {
        let image = self.unitary.mul_vec(self.eigenvector.amplitudes());
        let lambda: C64 = self
            .eigenvector
            .amplitudes()
            .iter()
            .zip(&image)
            .map(|(a, b)| a.conj() * b)
            .sum();
        (lambda.arg() / (2.0 * PI)).rem_euclid(1.0)
    }
}

#[derive(Debug, Clone)]
pub struct PhaseEstimate {
    /// Exact outcome distribution over the `2^n` register values.
    pub distribution: Vec<f64>,
    /// Most probable register value.
    pub best_index: usize,
    /// Point estimate `φ̃ = best_index / 2^n`.
    pub estimate: f64,
}

/// Exact phase-estimation outcome distribution: Hadamards, controlled
/// `U^{2^j}` powers (computed by repeated squaring), inverse Fourier
/// transform, then the register marginal. No sampling.
pub fn phase_estimate(inst: &PhaseEstimationInstance) -> PhaseEstimate {
    let n = inst.n_bits;
    let reg = 1usize << n;
    let d = inst.eigenvector.dim();
    // joint amplitudes indexed k·d + s, register uniform after Hadamards
    let inv = 1.0 / (reg as f64).sqrt();
    let mut amps = vec![C64::new(0.0, 0.0); reg * d];
    for k in 0..reg {
        for s in 0..d {
            amps[k * d + s] = inst.eigenvector.amplitudes()[s] * C64::new(inv, 0.0);
        }
    }
    // controlled powers: register bit j applies U^{2^j}
    let mut power = inst.unitary.clone(); // U^(2^0)
    for j in 0..n {
        for k in 0..reg {
            if k >> j & 1 == 1 {
                let block: Vec<C64> = amps[k * d..(k + 1) * d].to_vec();
                let new = power.mul_vec(&block);
                amps[k * d..(k + 1) * d].copy_from_slice(&new);
            }
        }
        if j + 1 < n {
            power = power.mul(&power);
        }
    }
    // inverse Fourier transform on the register factor
    let f_dag = circuits::qft_matrix(n).adjoint();
    let mut out = vec![C64::new(0.0, 0.0); reg * d];
    for s in 0..d {
        for j in 0..reg {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..reg {
                acc += f_dag.get(j, k) * amps[k * d + s];
            }
            out[j * d + s] = acc;
        }
    }
    let mut distribution = vec![0.0; reg];
    for j in 0..reg {
        for s in 0..d {
            distribution[j] += out[j * d + s].norm_sqr();
        }
    }
    let best_index = distribution
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    PhaseEstimate {
        estimate: best_index as f64 / reg as f64,
        best_index,
        distribution,
    }
}

/// Closed-form outcome probability `|sin(2ⁿπΔ)/(2ⁿ sin(πΔ))|²` with
/// `Δ = φ - φ̃`.
pub fn phase_estimate_probability(n_bits: usize, phi: f64, phi_tilde: f64) -> f64 {
    let reg = (1u64 << n_bits) as f64;
    let delta = phi - phi_tilde;
    let denom = (PI * delta).sin();
    if denom.abs() < 1e-15 {
        return 1.0;
    }
    ((reg * PI * delta).sin() / (reg * denom)).powi(2)
}

/// Search instance: `n` qubits with a nonempty proper solution set.
#[derive(Debug, Clone)]
pub struct GroverInstance {
    pub n: usize,
    solutions: Vec<usize>,
}

impl GroverInstance {
    pub fn new(n: usize, mut solutions: Vec<usize>) -> Result<Self> {
        solutions.sort_unstable();
        solutions.dedup();
        let total = 1usize << n;
        if solutions.is_empty() || solutions.len() >= total {
            return Err(Error::InvalidParameter(format!(
                "need 1 ≤ M < N = {total} solutions, got {}",
                solutions.len()
            )));
        }
        if solutions.iter().any(|&s| s >= total) {
            return Err(Error::InvalidParameter("solution label out of range".into()));
        }
        Ok(Self { n, solutions })
    }

    pub fn solutions(&self) -> &[usize] {
        &self.solutions
    }

    pub fn n_states(&self) -> usize {
        1 << self.n
    }

    pub fn m(&self) -> usize {
        self.solutions.len()
    }

    /// `θ = 2 arcsin √(M/N)`.
    pub fn theta(&self) -> f64 {
        2.0 * (self.m() as f64 / self.n_states() as f64).sqrt().asin()
    }
}

/// `k₀ = min{k ∈ ℕ : k + 1/2 ≥ π/(4 arcsin √(M/N)) - 1/2}`, with 0 allowed.
pub fn grover_k0(n_states: usize, m: usize) -> usize {
    let x = PI / (4.0 * (m as f64 / n_states as f64).sqrt().asin()) - 1.0;
    if x <= 0.0 {
        0
    } else {
        // absorb floating-point noise on exact integer boundaries
        (x - 1e-9).ceil() as usize
    }
}

/// Exact measured-outcome distribution of `G^k|ψ⟩`: the oracle flips signs on
/// solutions, the diffusion reflects about the uniform state.
pub fn grover(inst: &GroverInstance, k: usize) -> Vec<f64> {
    let n_states = inst.n_states();
    let mut amps = vec![1.0 / (n_states as f64).sqrt(); n_states];
    for _ in 0..k {
        for &s in &inst.solutions {
            amps[s] = -amps[s];
        }
        let mean = amps.iter().sum::<f64>() / n_states as f64;
        for a in amps.iter_mut() {
            *a = 2.0 * mean - *a;
        }
    }
    amps.iter().map(|a| a * a).collect()
}

/// Success probability of measuring a solution after `k` iterations
/// (simulated route).
pub fn grover_success(inst: &GroverInstance, k: usize) -> f64 {
    let dist = grover(inst, k);
    inst.solutions.iter().map(|&s| dist[s]).sum()
}

/// `sin²((2k+1)θ/2)`; the geometric closed form for the same quantity.
pub fn grover_success_closed_form(inst: &GroverInstance, k: usize) -> f64 {
    let theta = inst.theta();
    ((2.0 * k as f64 + 1.0) * theta / 2.0).sin().powi(2)
}

/// Success probability of the continuous-time search generated by
/// `H = |β⟩⟨β| + |ψ⟩⟨ψ|` after time `t` (ħ = 1), evaluated in the
/// two-dimensional {|α⟩, |β⟩} subspace.
pub fn grover_hamiltonian(inst: &GroverInstance, t: f64) -> f64 {
    let beta = (inst.m() as f64 / inst.n_states() as f64).sqrt();
    let alpha = (1.0 - beta * beta).sqrt();
    let mut h = ComplexMatrix::zeros(2, 2);
    h.set(0, 0, C64::new(alpha * alpha, 0.0));
    h.set(0, 1, C64::new(alpha * beta, 0.0));
    h.set(1, 0, C64::new(alpha * beta, 0.0));
    h.set(1, 1, C64::new(1.0 + beta * beta, 0.0));
    let u = linalg::exp_i_hermitian(&h, -t, 1e-9).expect("2x2 Hermitian");
    let psi = vec![C64::new(alpha, 0.0), C64::new(beta, 0.0)];
    let out = u.mul_vec(&psi);
    out[1].norm_sqr()
}
