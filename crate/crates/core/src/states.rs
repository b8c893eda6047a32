//! Pure and mixed quantum states over an explicit tensor factorization,
//! ensembles, Bloch-vector conversion, Schmidt decomposition, purification
//! and seeded random-state generation.

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Pure state: amplitudes over the product basis of `dims`.
///
/// Factor 0 is the leftmost tensor factor and the most significant index of
/// the basis label.
#[derive(Debug, Clone)]
pub struct StateVector {
    dims: Vec<usize>,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::DimensionMismatch("dims must be nonempty and positive".into()));
        }
        if amplitudes.len() != total {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims {:?} (need {total})",
                amplitudes.len(),
                dims
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntries);
        }
        let norm = norm_of(&amplitudes);
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { dims, amplitudes })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Self {
        let total: usize = dims.iter().product();
        assert!(index < total);
        let mut amplitudes = vec![C64::new(0.0, 0.0); total];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { dims, amplitudes }
    }

    /// Build from unnormalized amplitudes, normalizing.
    pub fn from_unnormalized(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        let norm = norm_of(&amplitudes);
        if norm < 1e-12 {
            return Err(Error::NotNormalized { norm });
        }
        let amps = amplitudes
            .into_iter()
            .map(|z| z / C64::new(norm, 0.0))
            .collect();
        Self::new(dims, amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm_of(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|`; equals 1 iff the states agree up to a global phase.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        StateVector {
            dims,
            amplitudes: linalg::kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }

    /// Projector `|ψ⟩⟨ψ|` as a density matrix.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims.clone(),
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    /// Reinterpret the same amplitudes under a different factorization.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<StateVector> {
        StateVector::new(dims, self.amplitudes.clone())
    }
}

/// Mixed state: density matrix over the product basis of `dims`.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let total: usize = dims.iter().product();
        if matrix.rows() != total || matrix.cols() != total {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} but dims {:?} give {total}",
                matrix.rows(),
                matrix.cols(),
                dims
            )));
        }
        let residual = matrix.density_residual();
        if !(residual < tol) {
            return Err(Error::NotDensity(format!(
                "density residual {residual:.3e} exceeds tolerance {tol:.1e}"
            )));
        }
        Ok(Self { dims, matrix })
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self {
            dims,
            matrix: ComplexMatrix::identity(d).scale_re(1.0 / d as f64),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            dims,
            matrix: linalg::kron(&self.matrix, &other.matrix),
        }
    }

    /// Reduced state on the kept factors.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let reduced = linalg::partial_trace(&self.matrix, &self.dims, keep)?;
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        let dims = keep_sorted.iter().map(|&k| self.dims[k]).collect();
        Ok(DensityMatrix {
            dims,
            matrix: reduced,
        })
    }

    pub fn with_dims(&self, dims: Vec<usize>) -> Result<DensityMatrix> {
        let total: usize = dims.iter().product();
        if total != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} do not match dimension {}",
                dims,
                self.dim()
            )));
        }
        Ok(DensityMatrix {
            dims,
            matrix: self.matrix.clone(),
        })
    }
}

/// Ensemble of states with mixing probabilities.
#[derive(Debug, Clone)]
pub struct Ensemble {
    entries: Vec<(f64, DensityMatrix)>,
}

impl Ensemble {
    pub fn new(entries: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter("ensemble must be nonempty".into()));
        }
        let dim = entries[0].1.dim();
        if entries.iter().any(|(_, rho)| rho.dim() != dim) {
            return Err(Error::DimensionMismatch(
                "ensemble members have mismatched dimensions".into(),
            ));
        }
        if entries.iter().any(|(p, _)| *p < -1e-12) {
            return Err(Error::InvalidParameter("negative ensemble probability".into()));
        }
        let total: f64 = entries.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "ensemble probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { entries })
    }

    /// Equal-weight ensemble of pure states.
    pub fn uniform_pure(states: &[StateVector]) -> Result<Self> {
        let p = 1.0 / states.len() as f64;
        Self::new(states.iter().map(|s| (p, s.to_density())).collect())
    }

    pub fn entries(&self) -> &[(f64, DensityMatrix)] {
        &self.entries
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|(p, _)| *p).collect()
    }
}

/// Mix an ensemble into its average state `Σ pⱼ ρⱼ`.
pub fn density_from_ensemble(e: &Ensemble) -> DensityMatrix {
    let dim = e.entries[0].1.dim();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for (p, rho) in &e.entries {
        acc = acc.add(&rho.matrix.scale_re(*p));
    }
    DensityMatrix {
        dims: e.entries[0].1.dims.clone(),
        matrix: acc,
    }
}

/// `Tr(ρ²)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix.mul(&rho.matrix).trace().re
}

pub fn is_pure(rho: &DensityMatrix, tol: f64) -> bool {
    purity(rho) > 1.0 - tol
}

/// Bloch vector of a qubit state; `v ∈ ℝ³` with `|v| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub v: [f64; 3],
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        self.v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

fn pauli(k: usize) -> ComplexMatrix {
    let i = C64::new(0.0, 1.0);
    match k {
        0 => ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        1 => {
            let mut m = ComplexMatrix::zeros(2, 2);
            m.set(0, 1, -i);
            m.set(1, 0, i);
            m
        }
        _ => ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]),
    }
}

/// `v_k = Tr(ρ σ_k)` for a qubit density matrix.
pub fn bloch_from_qubit(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(
            "Bloch vector is defined for qubit states".into(),
        ));
    }
    let mut v = [0.0; 3];
    for k in 0..3 {
        v[k] = rho.matrix.mul(&pauli(k)).trace().re;
    }
    Ok(BlochVector { v })
}

/// `ρ = (1 + v·σ)/2`.
pub fn qubit_from_bloch(b: &BlochVector) -> Result<DensityMatrix> {
    if b.norm() > 1.0 + 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "Bloch vector has norm {} > 1",
            b.norm()
        )));
    }
    let mut m = ComplexMatrix::identity(2);
    for k in 0..3 {
        m = m.add(&pauli(k).scale_re(b.v[k]));
    }
    Ok(DensityMatrix {
        dims: vec![2],
        matrix: m.scale_re(0.5),
    })
}

/// Schmidt decomposition of a bipartite pure state.
///
/// `coefficients` are the strictly positive Schmidt coefficients `√λⱼ` in
/// descending order (entries below the rank cutoff dropped); the bases hold
/// the matching orthonormal local vectors as columns.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left_basis: ComplexMatrix,
    pub right_basis: ComplexMatrix,
}

/// Coefficients below this are SVD noise, not Schmidt rank.
pub const SCHMIDT_CUTOFF: f64 = 1e-10;

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// Squared coefficients `λⱼ` (the reduced-state eigenvalues).
    pub fn squared_coefficients(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c * c).collect()
    }

    /// `Σ √λⱼ |vⱼ⟩⊗|wⱼ⟩`.
    pub fn reconstruct(&self, dims: Vec<usize>) -> Result<StateVector> {
        let da = self.left_basis.rows();
        let db = self.right_basis.rows();
        let mut amps = vec![C64::new(0.0, 0.0); da * db];
        for (l, &c) in self.coefficients.iter().enumerate() {
            for j in 0..da {
                for k in 0..db {
                    amps[j * db + k] +=
                        C64::new(c, 0.0) * self.left_basis.get(j, l) * self.right_basis.get(k, l);
                }
            }
        }
        StateVector::new(dims, amps)
    }
}

/// Schmidt decomposition across the bipartition grouping the first `cut`
/// factors against the rest.
pub fn schmidt(psi: &StateVector, cut: usize) -> Result<SchmidtDecomposition> {
    if cut == 0 || cut >= psi.dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "cut {cut} does not split {} factors into two nonempty groups",
            psi.dims.len()
        )));
    }
    let da: usize = psi.dims[..cut].iter().product();
    let db: usize = psi.dims[cut..].iter().product();
    // Coefficient matrix c[j,k] = ⟨j,k|ψ⟩, decomposed as C = U Σ V†, so that
    // |ψ⟩ = Σ_l s_l |u_l⟩⊗|w_l⟩ with w_l the l-th row of V†.
    let c = ComplexMatrix::from_fn(da, db, |j, k| psi.amplitudes[j * db + k]);
    let (left, coeffs, right): (Vec<Vec<C64>>, Vec<f64>, Vec<Vec<C64>>) = if da >= db {
        let thin = linalg::jacobi_svd_tall(&c);
        let mut left = Vec::new();
        let mut coeffs = Vec::new();
        let mut right = Vec::new();
        for (l, col) in thin.columns.iter().enumerate() {
            let (Some(u_col), s) = (col, thin.sigma[l]) else {
                continue;
            };
            if s <= SCHMIDT_CUTOFF {
                continue;
            }
            left.push(u_col.clone());
            coeffs.push(s);
            right.push((0..db).map(|k| thin.v_dagger.get(l, k)).collect());
        }
        (left, coeffs, right)
    } else {
        // C† = U' Σ V'† gives C = V' Σ U'†: swap the roles of the factors.
        let thin = linalg::jacobi_svd_tall(&c.adjoint());
        let mut left = Vec::new();
        let mut coeffs = Vec::new();
        let mut right = Vec::new();
        for (l, col) in thin.columns.iter().enumerate() {
            let (Some(u_col), s) = (col, thin.sigma[l]) else {
                continue;
            };
            if s <= SCHMIDT_CUTOFF {
                continue;
            }
            left.push((0..da).map(|j| thin.v_dagger.get(l, j).conj()).collect());
            coeffs.push(s);
            right.push(u_col.iter().map(|z| z.conj()).collect());
        }
        (left, coeffs, right)
    };
    let rank = coeffs.len();
    let left_basis = ComplexMatrix::from_fn(da, rank, |i, j| left[j][i]);
    let right_basis = ComplexMatrix::from_fn(db, rank, |i, j| right[j][i]);
    Ok(SchmidtDecomposition {
        coefficients: coeffs,
        left_basis,
        right_basis,
    })
}

/// Purification of `ρ` on system ⊗ reference, with the reference a copy of
/// the system carrying the computational basis:
/// `|ψ⟩ = Σ √pⱼ |pⱼ⟩ ⊗ |rⱼ⟩`.
pub fn purify(rho: &DensityMatrix) -> Result<StateVector> {
    let d = rho.dim();
    let eig = linalg::hermitian_eig(&rho.matrix, 1e-7)?;
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    for (j, &p) in eig.eigenvalues.iter().enumerate() {
        let p = p.max(0.0);
        if p == 0.0 {
            continue;
        }
        let sq = C64::new(p.sqrt(), 0.0);
        let vec = eig.eigenvector(j);
        for (a, &va) in vec.iter().enumerate() {
            amps[a * d + j] += sq * va;
        }
    }
    StateVector::from_unnormalized(vec![d, d], amps)
}

/// Seeded Haar-like random pure state: normalized complex Gaussian
/// amplitudes, unitarily invariant in distribution.
pub fn random_pure(dims: Vec<usize>, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_pure_with(dims, &mut rng)
}

pub fn random_pure_with(dims: Vec<usize>, rng: &mut impl rand::Rng) -> StateVector {
    let total: usize = dims.iter().product();
    let amps: Vec<C64> = (0..total)
        .map(|_| {
            C64::new(
                linalg::sample_standard_normal(rng),
                linalg::sample_standard_normal(rng),
            )
        })
        .collect();
    StateVector::from_unnormalized(dims, amps).expect("gaussian vector normalizes")
}

/// Seeded random density matrix: partial trace of a random pure state on the
/// doubled space.
pub fn random_density(dims: Vec<usize>, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_density_with(dims, &mut rng)
}

pub fn random_density_with(dims: Vec<usize>, rng: &mut impl rand::Rng) -> DensityMatrix {
    let d: usize = dims.iter().product();
    let psi = random_pure_with(vec![d, d], rng);
    let reduced = psi.to_density().partial_trace(&[0]).expect("valid bipartition");
    DensityMatrix {
        dims,
        matrix: reduced.matrix,
    }
}

fn norm_of(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// JSON form of a state: `{"dims":[..],"kind":"pure"|"mixed","re":[..],"im":[..]}`
/// with row-major matrix entries for mixed states.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateJson {
    pub dims: Vec<usize>,
    pub kind: String,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl StateJson {
    pub fn from_pure(psi: &StateVector) -> Self {
        Self {
            dims: psi.dims.clone(),
            kind: "pure".into(),
            re: psi.amplitudes.iter().map(|z| z.re).collect(),
            im: psi.amplitudes.iter().map(|z| z.im).collect(),
        }
    }

    pub fn from_mixed(rho: &DensityMatrix) -> Self {
        Self {
            dims: rho.dims.clone(),
            kind: "mixed".into(),
            re: rho.matrix.data().iter().map(|z| z.re).collect(),
            im: rho.matrix.data().iter().map(|z| z.im).collect(),
        }
    }

    fn complex_entries(&self) -> Result<Vec<C64>> {
        if self.re.len() != self.im.len() {
            return Err(Error::DimensionMismatch(
                "re and im arrays differ in length".into(),
            ));
        }
        Ok(self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&r, &i)| C64::new(r, i))
            .collect())
    }

    pub fn to_pure(&self) -> Result<StateVector> {
        if self.kind != "pure" {
            return Err(Error::InvalidParameter(format!(
                "expected kind \"pure\", got \"{}\"",
                self.kind
            )));
        }
        StateVector::new(self.dims.clone(), self.complex_entries()?)
    }

    pub fn to_mixed(&self, tol: f64) -> Result<DensityMatrix> {
        if self.kind != "mixed" {
            return Err(Error::InvalidParameter(format!(
                "expected kind \"mixed\", got \"{}\"",
                self.kind
            )));
        }
        let d: usize = self.dims.iter().product();
        let entries = self.complex_entries()?;
        let matrix = ComplexMatrix::new(d, d, entries)?;
        DensityMatrix::new(self.dims.clone(), matrix, tol)
    }

    /// Accept either kind, returning a density matrix.
    pub fn to_density(&self, tol: f64) -> Result<DensityMatrix> {
        match self.kind.as_str() {
            "pure" => Ok(self.to_pure()?.to_density()),
            "mixed" => self.to_mixed(tol),
            other => Err(Error::InvalidParameter(format!(
                "unknown state kind \"{other}\""
            ))),
        }
    }
}
