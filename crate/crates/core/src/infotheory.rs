//! Classical and quantum distance measures, fidelities, the entropy family
//! and the Holevo bound. All logarithms are base 2; entropies are in bits.

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::states::{DensityMatrix, Ensemble, StateVector};
use crate::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Eigenvalues below this count as outside the support when deciding whether
/// a relative entropy diverges.
pub const SUPPORT_TOL: f64 = 1e-10;

/// Probability distribution over a finite index set.
#[derive(Debug, Clone)]
pub struct ProbDist {
    probs: Vec<f64>,
}

impl ProbDist {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|&p| p < -1e-12 || !p.is_finite()) {
            return Err(Error::InvalidParameter("negative probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Joint probability table `p(x,y)`.
#[derive(Debug, Clone)]
pub struct JointDist {
    table: Vec<Vec<f64>>,
}

impl JointDist {
    pub fn new(table: Vec<Vec<f64>>) -> Result<Self> {
        if table.is_empty() || table[0].is_empty() {
            return Err(Error::InvalidParameter("empty joint table".into()));
        }
        let cols = table[0].len();
        let mut total = 0.0;
        for row in &table {
            if row.len() != cols {
                return Err(Error::DimensionMismatch("ragged joint table".into()));
            }
            for &p in row {
                if p < -1e-12 || !p.is_finite() {
                    return Err(Error::InvalidParameter("negative joint probability".into()));
                }
                total += p;
            }
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "joint probabilities sum to {total}"
            )));
        }
        Ok(Self { table })
    }

    pub fn marginal_x(&self) -> ProbDist {
        ProbDist {
            probs: self.table.iter().map(|row| row.iter().sum()).collect(),
        }
    }

    pub fn marginal_y(&self) -> ProbDist {
        let cols = self.table[0].len();
        ProbDist {
            probs: (0..cols)
                .map(|j| self.table.iter().map(|row| row[j]).sum())
                .collect(),
        }
    }

    fn flat(&self) -> Vec<f64> {
        self.table.iter().flatten().copied().collect()
    }
}

fn check_same_len(p: &ProbDist, q: &ProbDist) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(
            "distributions have different lengths".into(),
        ));
    }
    Ok(())
}

/// Classical trace (L₁) distance `D = Σ|p-q|/2`.
pub fn trace_distance_c(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    check_same_len(p, q)?;
    Ok(p.probs
        .iter()
        .zip(&q.probs)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / 2.0)
}

/// Classical fidelity `F = Σ√(pq)`.
pub fn fidelity_c(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    check_same_len(p, q)?;
    Ok(p.probs
        .iter()
        .zip(&q.probs)
        .map(|(a, b)| (a.max(0.0) * b.max(0.0)).sqrt())
        .sum())
}

/// Quantum trace distance `D = Tr|ρ-σ|/2`, via the spectrum of `ρ-σ`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(
            "states have different dimensions".into(),
        ));
    }
    let diff = rho.matrix().sub(sigma.matrix());
    let eig = linalg::hermitian_eig(&diff, 1e-7)?;
    Ok(eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>() / 2.0)
}

// Square root with the null space truncated to exactly zero: eigenvalue
// noise ε otherwise turns into √ε errors in fidelities.
fn sqrt_psd_truncated(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = linalg::hermitian_eig(m, 1e-7)?;
    Ok(eig.apply_fn(|l| {
        if l > 1e-13 {
            C64::new(l.sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// Quantum fidelity `F = Tr√(√ρ σ √ρ)`, computed as the singular-value sum
/// of `√σ·√ρ` (one PSD square root fewer, same value).
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(
            "states have different dimensions".into(),
        ));
    }
    let sr = sqrt_psd_truncated(rho.matrix())?;
    let ss = sqrt_psd_truncated(sigma.matrix())?;
    let f = linalg::trace_norm(&ss.mul(&sr))?;
    Ok(f.clamp(0.0, 1.0 + 1e-9).min(1.0))
}

/// `F(|ψ⟩, ρ) = √(⟨ψ|ρ|ψ⟩)`.
pub fn fidelity_pure_mixed(psi: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(
            "state dimensions disagree".into(),
        ));
    }
    let image = rho.matrix().mul_vec(psi.amplitudes());
    let overlap: C64 = psi
        .amplitudes()
        .iter()
        .zip(&image)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(overlap.re.max(0.0).sqrt())
}

/// Fuchs–van de Graaf chain: `(1-F, D, √(1-F²))`.
pub fn fuchs_van_de_graaf(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<(f64, f64, f64)> {
    let f = fidelity(rho, sigma)?;
    let d = trace_distance(rho, sigma)?;
    Ok((1.0 - f, d, (1.0 - f * f).max(0.0).sqrt()))
}

/// Result of the worst-case gate-fidelity search. The minimization over pure
/// states is done by seeded sampling plus local refinement, so the reported
/// value is an upper bound on the true minimum; `state` is the certificate
/// achieving it.
#[derive(Debug, Clone)]
pub struct GateFidelity {
    pub value: f64,
    pub state: StateVector,
}

/// `F(U,𝓔) = min_ψ F(U|ψ⟩, 𝓔(|ψ⟩⟨ψ|))`, approximated by `budget` seeded
/// samples followed by a shrinking random-walk refinement.
pub fn gate_fidelity(
    u: &ComplexMatrix,
    ch: &KrausChannel,
    budget: usize,
    seed: u64,
) -> Result<GateFidelity> {
    if u.rows() != ch.dim() {
        return Err(Error::DimensionMismatch(
            "gate and channel dimensions disagree".into(),
        ));
    }
    let d = u.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f_of = |amps: &[C64]| -> f64 {
        let projector = ComplexMatrix::outer(amps, amps);
        let evolved = ch.apply_matrix(&projector);
        let target = u.mul_vec(amps);
        let image = evolved.mul_vec(&target);
        let overlap: C64 = target.iter().zip(&image).map(|(a, b)| a.conj() * b).sum();
        overlap.re.max(0.0).sqrt()
    };
    let sample = |rng: &mut ChaCha8Rng| -> Vec<C64> {
        let raw: Vec<C64> = (0..d)
            .map(|_| {
                C64::new(
                    linalg::sample_standard_normal(rng),
                    linalg::sample_standard_normal(rng),
                )
            })
            .collect();
        normalize(raw)
    };
    let mut best = sample(&mut rng);
    let mut best_f = f_of(&best);
    for _ in 1..budget.max(1) {
        let cand = sample(&mut rng);
        let f = f_of(&cand);
        if f < best_f {
            best_f = f;
            best = cand;
        }
    }
    // local refinement with a shrinking step
    let mut step = 0.3;
    while step > 1e-7 {
        let mut improved = false;
        for _ in 0..40 {
            let cand: Vec<C64> = best
                .iter()
                .map(|z| {
                    z + C64::new(
                        step * linalg::sample_standard_normal(&mut rng),
                        step * linalg::sample_standard_normal(&mut rng),
                    )
                })
                .collect();
            let cand = normalize(cand);
            let f = f_of(&cand);
            if f < best_f {
                best_f = f;
                best = cand;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(GateFidelity {
        value: best_f,
        state: StateVector::new(vec![d], best)?,
    })
}

fn normalize(mut v: Vec<C64>) -> Vec<C64> {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= C64::new(norm, 0.0);
    }
    v
}

fn entropy_term(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy of a spectrum or probability vector (0·log 0 = 0).
pub fn entropy_of_spectrum(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| entropy_term(p.max(0.0))).sum()
}

/// Shannon entropy `H(X) = -Σ p log p` in bits.
pub fn shannon(p: &ProbDist) -> f64 {
    entropy_of_spectrum(&p.probs)
}

/// Classical relative entropy `H(P‖Q) = Σ p log(p/q)`, `+∞` when `P` puts
/// weight outside the support of `Q`.
pub fn relative_entropy_c(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    check_same_len(p, q)?;
    let mut acc = 0.0;
    for (&pp, &qq) in p.probs.iter().zip(&q.probs) {
        if pp <= SUPPORT_TOL {
            continue;
        }
        if qq <= SUPPORT_TOL {
            return Ok(f64::INFINITY);
        }
        acc += pp * (pp / qq).log2();
    }
    Ok(acc)
}

/// `H(X,Y)`: Shannon entropy of the joint table.
pub fn joint_entropy(j: &JointDist) -> f64 {
    entropy_of_spectrum(&j.flat())
}

/// `H(X|Y) = H(X,Y) - H(Y)`.
pub fn conditional_entropy(j: &JointDist) -> f64 {
    joint_entropy(j) - shannon(&j.marginal_y())
}

/// `H(X:Y) = H(X) + H(Y) - H(X,Y)`.
pub fn mutual_information(j: &JointDist) -> f64 {
    shannon(&j.marginal_x()) + shannon(&j.marginal_y()) - joint_entropy(j)
}

/// Von Neumann entropy `S(ρ) = -Tr(ρ log ρ)` in bits.
pub fn von_neumann(rho: &DensityMatrix) -> Result<f64> {
    let eig = linalg::hermitian_eig(rho.matrix(), 1e-7)?;
    Ok(entropy_of_spectrum(&eig.eigenvalues))
}

/// Quantum relative entropy `S(ρ‖σ)`, `+∞` when the support of `ρ` leaks
/// outside the support of `σ`.
pub fn quantum_relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(
            "states have different dimensions".into(),
        ));
    }
    let er = linalg::hermitian_eig(rho.matrix(), 1e-7)?;
    let es = linalg::hermitian_eig(sigma.matrix(), 1e-7)?;
    let d = rho.dim();
    let mut acc = 0.0;
    for x in 0..d {
        let r = er.eigenvalues[x].max(0.0);
        if r <= SUPPORT_TOL {
            continue;
        }
        acc += r * r.log2();
        let rx = er.eigenvector(x);
        for y in 0..d {
            let s = es.eigenvalues[y].max(0.0);
            let sy = es.eigenvector(y);
            let overlap: C64 = sy.iter().zip(&rx).map(|(a, b)| a.conj() * b).sum();
            let w = overlap.norm_sqr();
            if w <= SUPPORT_TOL {
                continue;
            }
            if s <= SUPPORT_TOL {
                return Ok(f64::INFINITY);
            }
            acc -= r * w * s.log2();
        }
    }
    Ok(acc)
}

fn bipartite_parts(rho: &DensityMatrix) -> Result<(DensityMatrix, DensityMatrix)> {
    if rho.dims().len() != 2 {
        return Err(Error::DimensionMismatch(
            "joint entropies need a declared bipartition".into(),
        ));
    }
    Ok((rho.partial_trace(&[0])?, rho.partial_trace(&[1])?))
}

/// `S(A,B)` of a bipartite state.
pub fn quantum_joint_entropy(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims().len() != 2 {
        return Err(Error::DimensionMismatch(
            "joint entropies need a declared bipartition".into(),
        ));
    }
    von_neumann(rho)
}

/// `S(A|B) = S(A,B) - S(B)`.
pub fn quantum_conditional_entropy(rho: &DensityMatrix) -> Result<f64> {
    let (_, rho_b) = bipartite_parts(rho)?;
    Ok(von_neumann(rho)? - von_neumann(&rho_b)?)
}

/// `S(A:B) = S(A) + S(B) - S(A,B)`.
pub fn quantum_mutual_information(rho: &DensityMatrix) -> Result<f64> {
    let (rho_a, rho_b) = bipartite_parts(rho)?;
    Ok(von_neumann(&rho_a)? + von_neumann(&rho_b)? - von_neumann(rho)?)
}

/// Holevo `χ = S(Σ p_x ρ_x) - Σ p_x S(ρ_x)`.
pub fn holevo_chi(e: &Ensemble) -> Result<f64> {
    let mixed = crate::states::density_from_ensemble(e);
    let mut chi = von_neumann(&mixed)?;
    for (p, rho) in e.entries() {
        chi -= p * von_neumann(rho)?;
    }
    Ok(chi)
}

/// Joint distribution `p(x,y) = p_x Tr(E_y ρ_x)` of an ensemble measured by
/// a POVM; its mutual information is the accessible-information candidate
/// the Holevo bound dominates.
pub fn ensemble_measurement_joint(
    e: &Ensemble,
    povm: &crate::circuits::Povm,
) -> Result<JointDist> {
    let mut table = Vec::with_capacity(e.entries().len());
    for (p, rho) in e.entries() {
        let row: Vec<f64> = crate::circuits::povm_probabilities(rho, povm)?
            .into_iter()
            .map(|q| p * q)
            .collect();
        table.push(row);
    }
    JointDist::new(table)
}
