//! Separability tooling and entanglement monotones: majorization and LOCC
//! convertibility of pure states, entanglement entropy, concurrences, the
//! two-qubit entanglement of formation, partial transpose, the PPT verdict
//! and negativity.

use crate::error::{Error, Result};
use crate::gates;
use crate::infotheory;
use crate::linalg::{self, ComplexMatrix};
use crate::states::{schmidt, DensityMatrix, StateVector};
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Both majorization verdicts with the compared prefix sums.
#[derive(Debug, Clone)]
pub struct MajorizationReport {
    pub prefix_sums_x: Vec<f64>,
    pub prefix_sums_y: Vec<f64>,
    pub x_majorized_by_y: bool,
    pub y_majorized_by_x: bool,
}

const MAJORIZATION_TOL: f64 = 1e-12;

/// Compare two nonnegative vectors under majorization; the shorter is padded
/// with zeros. `x ≺ y` demands every descending prefix sum of `x` to stay
/// below `y`'s, with equal totals.
pub fn majorizes(x: &[f64], y: &[f64]) -> Result<MajorizationReport> {
    if x.iter().chain(y.iter()).any(|&v| v < -MAJORIZATION_TOL) {
        return Err(Error::InvalidParameter(
            "majorization expects nonnegative entries".into(),
        ));
    }
    let len = x.len().max(y.len());
    let sorted_padded = |v: &[f64]| -> Vec<f64> {
        let mut out = v.to_vec();
        out.resize(len, 0.0);
        out.sort_by(|a, b| b.partial_cmp(a).unwrap());
        out
    };
    let xs = sorted_padded(x);
    let ys = sorted_padded(y);
    let prefix = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .scan(0.0, |acc, &p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    };
    let prefix_sums_x = prefix(&xs);
    let prefix_sums_y = prefix(&ys);
    let totals_equal =
        (prefix_sums_x[len - 1] - prefix_sums_y[len - 1]).abs() < MAJORIZATION_TOL;
    let x_below = prefix_sums_x
        .iter()
        .zip(&prefix_sums_y)
        .all(|(a, b)| *a <= *b + MAJORIZATION_TOL);
    let y_below = prefix_sums_y
        .iter()
        .zip(&prefix_sums_x)
        .all(|(a, b)| *a <= *b + MAJORIZATION_TOL);
    Ok(MajorizationReport {
        x_majorized_by_y: totals_equal && x_below,
        y_majorized_by_x: totals_equal && y_below,
        prefix_sums_x,
        prefix_sums_y,
    })
}

fn bipartite_schmidt_spectrum(psi: &StateVector) -> Result<Vec<f64>> {
    if psi.dims().len() != 2 {
        return Err(Error::DimensionMismatch(
            "state must carry a declared bipartition".into(),
        ));
    }
    Ok(schmidt(psi, 1)?.squared_coefficients())
}

/// Pure-state LOCC convertibility `ψ → φ`: holds iff the squared Schmidt
/// spectrum of `ψ` is majorized by that of `φ`.
pub fn locc_convertible(psi: &StateVector, phi: &StateVector) -> Result<bool> {
    let lx = bipartite_schmidt_spectrum(psi)?;
    let ly = bipartite_schmidt_spectrum(phi)?;
    Ok(majorizes(&lx, &ly)?.x_majorized_by_y)
}

/// Entanglement entropy `E = S(ρ_A)` of a bipartite pure state, in bits.
pub fn entanglement_entropy(psi: &StateVector) -> Result<f64> {
    Ok(infotheory::entropy_of_spectrum(&bipartite_schmidt_spectrum(
        psi,
    )?))
}

/// Pure-state concurrence `c = √(2(1-Tr ρ_A²))`, evaluated through the
/// Schmidt cross terms `2(1-Σλ²) = 2Σ_{j≠k}λ_jλ_k` so product states give
/// an exact zero instead of √(rounding).
pub fn concurrence_pure(psi: &StateVector) -> Result<f64> {
    let lambda = bipartite_schmidt_spectrum(psi)?;
    let mut cross = 0.0;
    for j in 0..lambda.len() {
        for k in j + 1..lambda.len() {
            cross += lambda[j] * lambda[k];
        }
    }
    Ok(2.0 * cross.max(0.0).sqrt())
}

fn spin_flip_conjugator() -> ComplexMatrix {
    linalg::kron(&gates::pauli_y(), &gates::pauli_y())
}

// Square root with the null space truncated, as in the fidelity route.
fn sqrt_truncated(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = linalg::hermitian_eig(m, 1e-7)?;
    Ok(eig.apply_fn(|l| {
        if l > 1e-13 {
            C64::new(l.sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// Two-qubit mixed-state concurrence `max(0, λ₁-λ₂-λ₃-λ₄)` over the
/// decreasing eigenvalues of `R = √(√ρ ρ̃ √ρ)` with
/// `ρ̃ = (Y⊗Y) ρ* (Y⊗Y)`; the spectrum of `R` is read off the singular
/// values of `√ρ̃ √ρ`.
pub fn concurrence_mixed_2q(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 || rho.dims() != [2, 2] {
        return Err(Error::DimensionMismatch(
            "Wootters concurrence is defined for two qubits".into(),
        ));
    }
    let yy = spin_flip_conjugator();
    let tilde = &(&yy * &rho.matrix().conj()) * &yy;
    let sr = sqrt_truncated(rho.matrix())?;
    let st = sqrt_truncated(&tilde)?;
    let mut svals = linalg::svd(&st.mul(&sr))?.singular_values;
    svals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let c = svals[0] - svals[1] - svals[2] - svals[3];
    Ok(c.max(0.0))
}

/// Binary-entropy profile `𝓔(c)` of the Schmidt weight induced by a
/// concurrence value: the entropy of `(1±√(1-c²))/2`.
pub fn eof_profile(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    let root = (1.0 - c * c).max(0.0).sqrt();
    infotheory::entropy_of_spectrum(&[(1.0 + root) / 2.0, (1.0 - root) / 2.0])
}

/// Two-qubit entanglement of formation `E(ρ) = 𝓔(c(ρ))`, in bits.
pub fn entanglement_of_formation_2q(rho: &DensityMatrix) -> Result<f64> {
    Ok(eof_profile(concurrence_mixed_2q(rho)?))
}

/// Partial transpose of a bipartite state on the chosen subsystem (0 or 1),
/// taken in the computational basis.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: usize) -> Result<ComplexMatrix> {
    if rho.dims().len() != 2 {
        return Err(Error::DimensionMismatch(
            "partial transpose needs a declared bipartition".into(),
        ));
    }
    if subsystem > 1 {
        return Err(Error::InvalidParameter(
            "subsystem index must be 0 or 1".into(),
        ));
    }
    let (da, db) = (rho.dims()[0], rho.dims()[1]);
    let m = rho.matrix();
    let out = ComplexMatrix::from_fn(da * db, da * db, |row, col| {
        let (a, b) = (row / db, row % db);
        let (ap, bp) = (col / db, col % db);
        if subsystem == 0 {
            m.get(ap * db + b, a * db + bp)
        } else {
            m.get(a * db + bp, ap * db + b)
        }
    });
    Ok(out)
}

/// Positive-partial-transpose verdict.
pub fn is_ppt(rho: &DensityMatrix, tol: f64) -> Result<bool> {
    let pt = partial_transpose(rho, 0)?;
    Ok(pt.is_psd(tol))
}

/// Negativity `𝓝 = (‖ρ^pt‖₁ - 1)/2`; zero exactly on PPT states.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    let pt = partial_transpose(rho, 0)?;
    let eig = linalg::hermitian_eig(&pt, 1e-7)?;
    let norm: f64 = eig.eigenvalues.iter().map(|l| l.abs()).sum();
    Ok(((norm - 1.0) / 2.0).max(0.0))
}

/// `|ψ_max⟩ = Σ_j |jj⟩/√d`.
pub fn maximally_entangled(d: usize) -> Result<StateVector> {
    if d < 2 {
        return Err(Error::InvalidParameter(
            "maximal entanglement needs local dimension at least 2".into(),
        ));
    }
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    let inv = 1.0 / (d as f64).sqrt();
    for j in 0..d {
        amps[j * d + j] = C64::new(inv, 0.0);
    }
    StateVector::new(vec![d, d], amps)
}

/// Sampled upper bound on the convex roof of a pure-state monotone.
///
/// Pure-state decompositions of `ρ` are drawn through the unitary freedom
/// of ensembles (random isometries applied to the spectral decomposition)
/// and the smallest average monotone over `samples` draws is returned. This
/// is an upper bound, not the infimum — the closed-form two-qubit routines
/// stay the authority where they apply.
pub fn convex_roof_upper_bound(
    rho: &DensityMatrix,
    monotone: &dyn Fn(&StateVector) -> Result<f64>,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let eig = linalg::hermitian_eig(rho.matrix(), 1e-7)?;
    let d = rho.dim();
    let kept: Vec<(f64, Vec<C64>)> = (0..d)
        .filter(|&k| eig.eigenvalues[k] > 1e-12)
        .map(|k| (eig.eigenvalues[k], eig.eigenvector(k)))
        .collect();
    let rank = kept.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for trial in 0..samples.max(1) {
        // decomposition size between rank and 2·rank; trial 0 is spectral
        let m = if trial == 0 {
            rank
        } else {
            rng.gen_range(rank..=2 * rank)
        };
        let w = linalg::random_unitary(m, &mut rng);
        let mut average = 0.0;
        for j in 0..m {
            // |ψ̃_j⟩ = Σ_k W_{jk} √λ_k |v_k⟩, p_j = ‖ψ̃_j‖²
            let mut amps = vec![C64::new(0.0, 0.0); d];
            for (k, (lambda, vec)) in kept.iter().enumerate() {
                let weight = w.get(j, k) * C64::new(lambda.sqrt(), 0.0);
                for (a, v) in amps.iter_mut().zip(vec) {
                    *a += weight * v;
                }
            }
            let p: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
            if p < 1e-14 {
                continue;
            }
            let inv = C64::new(1.0 / p.sqrt(), 0.0);
            let psi = StateVector::new(
                rho.dims().to_vec(),
                amps.into_iter().map(|z| z * inv).collect(),
            )?;
            average += p * monotone(&psi)?;
        }
        best = best.min(average);
    }
    Ok(best)
}

/// Sampled Schur-concavity check for a permutation-symmetric function on the
/// probability simplex: symmetry under sampled permutations plus the
/// pairwise derivative condition `(λ₁-λ₂)(∂f/∂λ₁ - ∂f/∂λ₂) ≤ 0` with
/// central finite differences.
pub fn schur_concavity_check(
    f: &dyn Fn(&[f64]) -> f64,
    dim: usize,
    trials: usize,
    seed: u64,
) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-6;
    for _ in 0..trials {
        // interior simplex point
        let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
        // permutation symmetry on a sampled swap
        let i = rng.gen_range(0..dim);
        let j = rng.gen_range(0..dim);
        let mut swapped = p.clone();
        swapped.swap(i, j);
        if (f(&p) - f(&swapped)).abs() > 1e-9 {
            return false;
        }
        // derivative condition on the first coordinate pair
        let mut plus = p.clone();
        let mut minus = p.clone();
        plus[0] += h;
        minus[0] -= h;
        let d0 = (f(&plus) - f(&minus)) / (2.0 * h);
        let mut plus = p.clone();
        let mut minus = p.clone();
        plus[1] += h;
        minus[1] -= h;
        let d1 = (f(&plus) - f(&minus)) / (2.0 * h);
        if (p[0] - p[1]) * (d0 - d1) > 1e-7 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;
    use crate::DEFAULT_TOL;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn bell_phi_plus() -> StateVector {
        maximally_entangled(2).unwrap()
    }

    /// `p|φ⁺⟩⟨φ⁺| + (1-p)1/4`.
    fn werner(p: f64) -> DensityMatrix {
        let bell = bell_phi_plus().to_density();
        let mixed = ComplexMatrix::identity(4).scale_re((1.0 - p) / 4.0);
        DensityMatrix::new(vec![2, 2], bell.matrix().scale_re(p).add(&mixed), DEFAULT_TOL)
            .unwrap()
    }

    #[test]
    fn majorization_of_identical_vectors() {
        let r = majorizes(&[0.5, 0.3, 0.2], &[0.2, 0.5, 0.3]).unwrap();
        assert!(r.x_majorized_by_y && r.y_majorized_by_x);
    }

    #[test]
    fn textbook_incomparable_pair() {
        let r = majorizes(&[0.4, 0.4, 0.2], &[0.48, 0.26, 0.26]).unwrap();
        assert!(!r.x_majorized_by_y && !r.y_majorized_by_x);
        assert!((r.prefix_sums_x[1] - 0.8).abs() < 1e-12);
        assert!((r.prefix_sums_y[1] - 0.74).abs() < 1e-12);
    }

    #[test]
    fn uniform_vector_is_majorized_by_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let raw: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let uniform = vec![0.25; 4];
            assert!(majorizes(&uniform, &p).unwrap().x_majorized_by_y);
        }
    }

    #[test]
    fn majorization_rejects_negative_entries() {
        assert!(majorizes(&[-0.1, 1.1], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn locc_from_maximally_entangled_reaches_everything() {
        let max = maximally_entangled(3).unwrap();
        for seed in 0..10 {
            let target = states::random_pure(vec![3, 3], seed);
            assert!(locc_convertible(&max, &target).unwrap());
        }
        // the incomparable pair converts in neither direction
        let psi = StateVector::from_unnormalized(vec![3, 3], {
            let mut v = vec![c(0.0, 0.0); 9];
            v[0] = c(0.4f64.sqrt(), 0.0);
            v[4] = c(0.4f64.sqrt(), 0.0);
            v[8] = c(0.2f64.sqrt(), 0.0);
            v
        })
        .unwrap();
        let phi = StateVector::from_unnormalized(vec![3, 3], {
            let mut v = vec![c(0.0, 0.0); 9];
            v[0] = c(0.48f64.sqrt(), 0.0);
            v[4] = c(0.26f64.sqrt(), 0.0);
            v[8] = c(0.26f64.sqrt(), 0.0);
            v
        })
        .unwrap();
        assert!(!locc_convertible(&psi, &phi).unwrap());
        assert!(!locc_convertible(&phi, &psi).unwrap());
        assert!(locc_convertible(&phi, &phi).unwrap());
    }

    #[test]
    fn entanglement_entropy_landmarks() {
        assert!((entanglement_entropy(&bell_phi_plus()).unwrap() - 1.0).abs() < 1e-12);
        let product = states::random_pure(vec![2], 1)
            .tensor(&states::random_pure(vec![2], 2))
            .with_dims(vec![2, 2])
            .unwrap();
        assert!(entanglement_entropy(&product).unwrap() < 1e-9);
        // equals the Shannon entropy of the Schmidt spectrum
        for seed in 0..10 {
            let psi = states::random_pure(vec![3, 3], seed);
            let spectrum = schmidt(&psi, 1).unwrap().squared_coefficients();
            let direct = infotheory::entropy_of_spectrum(&spectrum);
            assert!((entanglement_entropy(&psi).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn concurrence_pure_landmarks() {
        assert!((concurrence_pure(&bell_phi_plus()).unwrap() - 1.0).abs() < 1e-12);
        let product = states::random_pure(vec![2], 3)
            .tensor(&states::random_pure(vec![2], 4))
            .with_dims(vec![2, 2])
            .unwrap();
        assert!(concurrence_pure(&product).unwrap() < 1e-9);
        // bound √(2(1-1/d)) on qutrits
        for seed in 0..10 {
            let psi = states::random_pure(vec![3, 3], seed);
            let c = concurrence_pure(&psi).unwrap();
            assert!(c <= (2.0f64 * (1.0 - 1.0 / 3.0)).sqrt() + 1e-12);
        }
    }

    #[test]
    fn concurrence_pure_two_qubit_formulas() {
        // |⟨ψ*|Y⊗Y|ψ⟩| and 2|ψ₀₀ψ₁₁-ψ₀₁ψ₁₀| agree with the general form
        let yy = spin_flip_conjugator();
        for seed in 0..50 {
            let psi = states::random_pure(vec![2, 2], seed);
            let general = concurrence_pure(&psi).unwrap();
            let image = yy.mul_vec(psi.amplitudes());
            let overlap: C64 = psi
                .amplitudes()
                .iter()
                .zip(&image)
                .map(|(a, b)| a * b) // ⟨ψ*| means no conjugation on ψ
                .sum();
            assert!((general - overlap.norm()).abs() < 1e-10);
            let a = psi.amplitudes();
            let det = 2.0 * (a[0] * a[3] - a[1] * a[2]).norm();
            assert!((general - det).abs() < 1e-10);
        }
    }

    #[test]
    fn werner_concurrence_threshold() {
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            let c = concurrence_mixed_2q(&werner(p)).unwrap();
            let want = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert!((c - want).abs() < 1e-10, "p={p}: {c} vs {want}");
        }
    }

    #[test]
    fn mixed_concurrence_agrees_with_pure_formula() {
        for seed in 0..200 {
            let psi = states::random_pure(vec![2, 2], seed);
            let mixed = concurrence_mixed_2q(&psi.to_density()).unwrap();
            let pure = concurrence_pure(&psi).unwrap();
            assert!((mixed - pure).abs() < 1e-9, "seed {seed}: {mixed} vs {pure}");
        }
    }

    #[test]
    fn product_mixed_states_have_zero_concurrence() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let a = states::random_density_with(vec![2], &mut rng);
            let b = states::random_density_with(vec![2], &mut rng);
            let joint = a.tensor(&b);
            assert!(concurrence_mixed_2q(&joint).unwrap() < 1e-10);
            // PPT cross-check
            assert!(is_ppt(&joint, 1e-9).unwrap());
            assert!(negativity(&joint).unwrap() < 1e-10);
        }
    }

    #[test]
    fn eof_profile_endpoints_and_pure_agreement() {
        assert!(eof_profile(0.0).abs() < 1e-15);
        assert!((eof_profile(1.0) - 1.0).abs() < 1e-15);
        // monotone on a grid
        let mut prev = -1.0;
        for k in 0..=50 {
            let v = eof_profile(k as f64 / 50.0);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
        for seed in 0..100 {
            let psi = states::random_pure(vec![2, 2], seed);
            let eof = entanglement_of_formation_2q(&psi.to_density()).unwrap();
            let entropy = entanglement_entropy(&psi).unwrap();
            assert!((eof - entropy).abs() < 1e-8, "seed {seed}");
        }
        assert!((entanglement_of_formation_2q(&werner(1.0)).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bell_state_partial_transpose_spectrum() {
        let rho = bell_phi_plus().to_density();
        let pt = partial_transpose(&rho, 0).unwrap();
        assert!((pt.trace().re - 1.0).abs() < 1e-12);
        let mut eigs = linalg::hermitian_eig(&pt, DEFAULT_TOL).unwrap().eigenvalues;
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let want = [-0.5, 0.5, 0.5, 0.5];
        for (e, w) in eigs.iter().zip(want) {
            assert!((e - w).abs() < 1e-10);
        }
        assert!((negativity(&rho).unwrap() - 0.5).abs() < 1e-10);
        assert!(!is_ppt(&rho, 1e-9).unwrap());
    }

    #[test]
    fn negativity_is_side_independent() {
        for seed in 0..20 {
            let rho = states::random_density(vec![2, 2], seed);
            let e0 = {
                let pt = partial_transpose(&rho, 0).unwrap();
                linalg::hermitian_eig(&pt, 1e-7).unwrap().eigenvalues
            };
            let e1 = {
                let pt = partial_transpose(&rho, 1).unwrap();
                linalg::hermitian_eig(&pt, 1e-7).unwrap().eigenvalues
            };
            for (a, b) in e0.iter().zip(&e1) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn werner_negativity_threshold_matches_concurrence() {
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            let n = negativity(&werner(p)).unwrap();
            let c = concurrence_mixed_2q(&werner(p)).unwrap();
            if p <= 1.0 / 3.0 + 1e-9 {
                assert!(n < 1e-9, "p={p}: negativity {n}");
                assert!(c < 1e-9);
            } else {
                assert!(n > 1e-9, "p={p}: negativity {n}");
                assert!(c > 1e-9);
            }
        }
    }

    #[test]
    fn separable_mixtures_are_ppt_with_zero_negativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mut acc = ComplexMatrix::zeros(4, 4);
            let raw: Vec<f64> = (0..3).map(|_| rng.gen_range(0.1..1.0)).collect();
            let total: f64 = raw.iter().sum();
            for w in raw.iter().map(|x| x / total) {
                let a = states::random_density_with(vec![2], &mut rng);
                let b = states::random_density_with(vec![2], &mut rng);
                acc = acc.add(&linalg::kron(a.matrix(), b.matrix()).scale_re(w));
            }
            let rho = DensityMatrix::new(vec![2, 2], acc, DEFAULT_TOL).unwrap();
            assert!(is_ppt(&rho, 1e-9).unwrap());
            assert!(negativity(&rho).unwrap() < 1e-10);
        }
    }

    #[test]
    fn maximally_entangled_properties() {
        let psi2 = maximally_entangled(2).unwrap();
        let inv = 1.0 / 2.0_f64.sqrt();
        assert!((psi2.amplitudes()[0].re - inv).abs() < 1e-15);
        assert!((psi2.amplitudes()[3].re - inv).abs() < 1e-15);
        let psi3 = maximally_entangled(3).unwrap();
        assert!((entanglement_entropy(&psi3).unwrap() - 3.0f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn schur_concavity_verdicts() {
        let shannon = |p: &[f64]| infotheory::entropy_of_spectrum(p);
        assert!(schur_concavity_check(&shannon, 3, 200, 7));
        let concurrence = |p: &[f64]| {
            let purity: f64 = p.iter().map(|x| x * x).sum();
            (2.0 * (1.0 - purity)).max(0.0).sqrt()
        };
        assert!(schur_concavity_check(&concurrence, 3, 200, 8));
        let largest = |p: &[f64]| p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(!schur_concavity_check(&largest, 3, 200, 9));
    }

    #[test]
    fn convex_roof_sampling_dominates_the_closed_form() {
        // the sampled bound can never undercut the Wootters solution, and on
        // pure states the only decomposition is the state itself
        for seed in 0..10 {
            let rho = states::random_density(vec![2, 2], seed);
            let bound = convex_roof_upper_bound(
                &rho,
                &|psi| entanglement_entropy(psi),
                40,
                seed,
            )
            .unwrap();
            let exact = entanglement_of_formation_2q(&rho).unwrap();
            assert!(bound >= exact - 1e-9, "seed {seed}: {bound} < {exact}");
        }
        let psi = states::random_pure(vec![2, 2], 3);
        let bound =
            convex_roof_upper_bound(&psi.to_density(), &|p| entanglement_entropy(p), 5, 0)
                .unwrap();
        let direct = entanglement_entropy(&psi).unwrap();
        assert!((bound - direct).abs() < 1e-8);
    }

    #[test]
    fn monotones_are_invariant_under_local_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for seed in 0..10 {
            let rho = states::random_density(vec![2, 2], seed);
            let ua = linalg::random_unitary(2, &mut rng);
            let ub = linalg::random_unitary(2, &mut rng);
            let local = linalg::kron(&ua, &ub);
            let conj = DensityMatrix::new(
                vec![2, 2],
                (&(&local * rho.matrix()) * &local.adjoint()).clone(),
                1e-7,
            )
            .unwrap();
            let dc = (concurrence_mixed_2q(&rho).unwrap()
                - concurrence_mixed_2q(&conj).unwrap())
            .abs();
            let dn = (negativity(&rho).unwrap() - negativity(&conj).unwrap()).abs();
            let de = (entanglement_of_formation_2q(&rho).unwrap()
                - entanglement_of_formation_2q(&conj).unwrap())
            .abs();
            assert!(dc < 1e-9 && dn < 1e-9 && de < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn explicit_locc_protocol_lowers_monotones() {
        // Alice measures {E₁, E₂}, Bob applies 1 or X on her outcome:
        // |φ⁺⟩ becomes √λ₁|00⟩ + √λ₂|11⟩ deterministically.
        let (l1, l2): (f64, f64) = (0.8, 0.2);
        let ket = |j: usize| {
            let mut v = [c(0.0, 0.0); 2];
            v[j] = c(1.0, 0.0);
            v
        };
        let e1 = ComplexMatrix::outer(&ket(0), &ket(0))
            .scale_re(l1.sqrt())
            .add(&ComplexMatrix::outer(&ket(1), &ket(1)).scale_re(l2.sqrt()));
        let e2 = ComplexMatrix::outer(&ket(0), &ket(1))
            .scale_re(l1.sqrt())
            .add(&ComplexMatrix::outer(&ket(1), &ket(0)).scale_re(l2.sqrt()));
        let f11 = ComplexMatrix::identity(2);
        let f21 = gates::pauli_x();
        let input = bell_phi_plus().to_density();
        let branch1 = {
            let k = linalg::kron(&e1, &f11);
            &(&k * input.matrix()) * &k.adjoint()
        };
        let branch2 = {
            let k = linalg::kron(&e2, &f21);
            &(&k * input.matrix()) * &k.adjoint()
        };
        let out = DensityMatrix::new(vec![2, 2], branch1.add(&branch2), DEFAULT_TOL).unwrap();
        let mut want = vec![c(0.0, 0.0); 4];
        want[0] = c(l1.sqrt(), 0.0);
        want[3] = c(l2.sqrt(), 0.0);
        let phi = StateVector::new(vec![2, 2], want).unwrap();
        assert!(out.matrix().max_abs_diff(phi.to_density().matrix()) < 1e-12);
        // monotones cannot increase
        assert!(
            concurrence_mixed_2q(&out).unwrap()
                <= concurrence_mixed_2q(&input).unwrap() + 1e-9
        );
        assert!(negativity(&out).unwrap() <= negativity(&input).unwrap() + 1e-9);
        assert!(
            entanglement_of_formation_2q(&out).unwrap()
                <= entanglement_of_formation_2q(&input).unwrap() + 1e-9
        );
    }
}
