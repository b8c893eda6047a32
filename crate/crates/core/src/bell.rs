//! CHSH machinery: projective correlators at detector angles, the S
//! statistic with its classical and Tsirelson bounds, a settings optimizer,
//! and a finite-sample local-hidden-variable simulator for the classical
//! side of the inequality.

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::states::{DensityMatrix, StateVector};
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// The four detector angles of a CHSH run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub alpha: f64,
    pub alpha_prime: f64,
    pub beta: f64,
    pub beta_prime: f64,
}

impl ChshSettings {
    /// The maximizing angle family `(φ, 2π/8+φ, π/8+φ, 3π/8+φ)`.
    pub fn optimal_family(phi: f64) -> Self {
        Self {
            alpha: phi,
            alpha_prime: 2.0 * PI / 8.0 + phi,
            beta: PI / 8.0 + phi,
            beta_prime: 3.0 * PI / 8.0 + phi,
        }
    }
}

/// `|α⟩ = cos(α)|1⟩ - sin(α)|0⟩`, the analyzer state at angle `α`.
fn analyzer_ket(angle: f64) -> [C64; 2] {
    [C64::new(-angle.sin(), 0.0), C64::new(angle.cos(), 0.0)]
}

/// Projector `P_α = |α⟩⟨α|`.
pub fn analyzer_projector(angle: f64) -> ComplexMatrix {
    let k = analyzer_ket(angle);
    ComplexMatrix::outer(&k, &k)
}

/// Dichotomic observable `M_α = P_α - P_{α+π/2}`.
fn analyzer_observable(angle: f64) -> ComplexMatrix {
    analyzer_projector(angle).sub(&analyzer_projector(angle + PI / 2.0))
}

/// Joint outcome probability `p_{αβ} = ⟨P_α ⊗ P_β⟩`.
pub fn joint_probability(state: &DensityMatrix, a: f64, b: f64) -> Result<f64> {
    if state.dim() != 4 {
        return Err(Error::DimensionMismatch(
            "CHSH expects a two-qubit state".into(),
        ));
    }
    let proj = linalg::kron(&analyzer_projector(a), &analyzer_projector(b));
    Ok(proj.mul(state.matrix()).trace().re)
}

/// Correlator `E(α,β) = p_{αβ} + p_{α+π/2,β+π/2} - p_{α,β+π/2} - p_{α+π/2,β}`,
/// evaluated as `⟨M_α ⊗ M_β⟩`.
pub fn correlator(state: &DensityMatrix, a: f64, b: f64) -> Result<f64> {
    if state.dim() != 4 {
        return Err(Error::DimensionMismatch(
            "CHSH expects a two-qubit state".into(),
        ));
    }
    let joint = linalg::kron(&analyzer_observable(a), &analyzer_observable(b));
    Ok(joint.mul(state.matrix()).trace().re)
}

/// `|⟨S⟩| = |E(α,β) - E(α,β') + E(α',β) + E(α',β')|`.
pub fn chsh_value(state: &DensityMatrix, s: &ChshSettings) -> Result<f64> {
    let value = correlator(state, s.alpha, s.beta)?
        - correlator(state, s.alpha, s.beta_prime)?
        + correlator(state, s.alpha_prime, s.beta)?
        + correlator(state, s.alpha_prime, s.beta_prime)?;
    let value = value.abs();
    debug_assert!(value <= 2.0 * 2.0_f64.sqrt() + 1e-9);
    Ok(value)
}

/// The singlet `|ψ⁻⟩ = (|01⟩ - |10⟩)/√2`.
pub fn psi_minus() -> StateVector {
    let inv = 1.0 / 2.0_f64.sqrt();
    StateVector::new(
        vec![2, 2],
        vec![
            C64::new(0.0, 0.0),
            C64::new(inv, 0.0),
            C64::new(-inv, 0.0),
            C64::new(0.0, 0.0),
        ],
    )
    .expect("normalized")
}

/// The analyzer observable is `M_α = -(sin 2α · X + cos 2α · Z)`, so every
/// correlator is a bilinear form in the four traces `Tr(ρ σ_i⊗σ_j)` over
/// `i,j ∈ {x,z}`. Precomputing them makes the settings search cheap.
#[derive(Debug, Clone, Copy)]
struct CorrelationTensor {
    t: [[f64; 2]; 2],
}

impl CorrelationTensor {
    fn new(state: &DensityMatrix) -> Self {
        let paulis = [crate::gates::pauli_x(), crate::gates::pauli_z()];
        let mut t = [[0.0; 2]; 2];
        for (i, pi) in paulis.iter().enumerate() {
            for (j, pj) in paulis.iter().enumerate() {
                t[i][j] = linalg::kron(pi, pj).mul(state.matrix()).trace().re;
            }
        }
        Self { t }
    }

    fn correlator(&self, a: f64, b: f64) -> f64 {
        let (sa, ca) = (2.0 * a).sin_cos();
        let (sb, cb) = (2.0 * b).sin_cos();
        sa * sb * self.t[0][0] + sa * cb * self.t[0][1] + ca * sb * self.t[1][0]
            + ca * cb * self.t[1][1]
    }

    fn s_value(&self, angles: &[f64; 4]) -> f64 {
        (self.correlator(angles[0], angles[2]) - self.correlator(angles[0], angles[3])
            + self.correlator(angles[1], angles[2])
            + self.correlator(angles[1], angles[3]))
        .abs()
    }
}

/// Grid search plus coordinate descent over the four angles, with seeded
/// jittered restarts; returns the best settings found and their value.
pub fn optimize_settings(state: &DensityMatrix, seed: u64) -> Result<(ChshSettings, f64)> {
    if state.dim() != 4 {
        return Err(Error::DimensionMismatch(
            "CHSH expects a two-qubit state".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tensor = CorrelationTensor::new(state);
    let evaluate = |angles: &[f64; 4], _state: &DensityMatrix| -> f64 { tensor.s_value(angles) };
    let steps = 8;
    let mut best = [0.0; 4];
    let mut best_value = f64::NEG_INFINITY;
    let grid: Vec<f64> = (0..steps).map(|k| PI * k as f64 / steps as f64).collect();
    for &a in &grid {
        for &ap in &grid {
            for &b in &grid {
                for &bp in &grid {
                    let angles = [a, ap, b, bp];
                    let v = evaluate(&angles, state);
                    if v > best_value {
                        best_value = v;
                        best = angles;
                    }
                }
            }
        }
    }
    // jittered restarts around the best grid point, then coordinate descent
    let mut candidates = vec![best];
    for _ in 0..4 {
        let mut jig = best;
        for a in jig.iter_mut() {
            *a += rng.gen_range(-0.2..0.2);
        }
        candidates.push(jig);
    }
    for start in candidates {
        let mut angles = start;
        let mut value = evaluate(&angles, state);
        let mut step = PI / steps as f64;
        while step > 1e-9 {
            let mut improved = false;
            for i in 0..4 {
                for dir in [-1.0, 1.0] {
                    let mut probe = angles;
                    probe[i] += dir * step;
                    let v = evaluate(&probe, state);
                    if v > value {
                        value = v;
                        angles = probe;
                        improved = true;
                    }
                }
            }
            if !improved {
                step /= 2.0;
            }
        }
        if value > best_value {
            best_value = value;
            best = angles;
        }
    }
    Ok((
        ChshSettings {
            alpha: best[0],
            alpha_prime: best[1],
            beta: best[2],
            beta_prime: best[3],
        },
        best_value,
    ))
}

/// One random local-realistic strategy: a finite hidden-variable table with
/// deterministic ±1 responses per setting, evaluated exactly.
///
/// `⟨S⟩ = Σ_λ ρ(λ)[A_α(B_β - B_β') + A_α'(B_β + B_β')]`; every such strategy
/// obeys `|⟨S⟩| ≤ 2`.
pub fn classical_strategy_s_value(rng: &mut impl Rng, hidden_values: usize) -> f64 {
    let k = hidden_values.max(1);
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut s = 0.0;
    for weight in raw.iter().map(|x| x / total) {
        let sign = |rng: &mut dyn FnMut() -> bool| if rng() { 1.0 } else { -1.0 };
        let mut flip = || rng.gen::<bool>();
        let a = sign(&mut flip);
        let ap = sign(&mut flip);
        let b = sign(&mut flip);
        let bp = sign(&mut flip);
        s += weight * (a * (b - bp) + ap * (b + bp));
    }
    s
}
