//! Dense complex linear algebra: the kernel every other module builds on.
//!
//! [`ComplexMatrix`] is a plain row-major buffer of `Complex64`. The heavy
//! decompositions (Hermitian eigen, SVD) are delegated to `nalgebra` behind
//! the small wrapper types [`HermitianEig`], [`SvdResult`] and [`PolarResult`];
//! Kronecker products, partial traces, matrix functions and the predicate
//! family live here directly.

use crate::error::{Error, Result};
use crate::C64;
use nalgebra::DMatrix;
use rand::Rng;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Build from a row-major buffer. Rejects empty shapes, size mismatches
    /// and non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix shape {rows}x{cols} must be at least 1x1"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "buffer of length {} does not fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntries);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Square matrix with `diag` on the diagonal.
    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Convenience constructor from nested real rows (tests, gate tables).
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    /// Outer product `a b†` of two coefficient vectors.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// Matrix product.
    pub fn mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> ComplexMatrix {
        self.scale(C64::new(s, 0.0))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Residual of `U†U = 1`; zero exactly for unitary matrices.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        self.adjoint().mul(self).max_abs_diff(&Self::identity(n))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() < tol
    }

    /// Residual of `M = M†`.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() < tol
    }

    /// Residual of positive semidefiniteness: Hermiticity residual combined
    /// with the magnitude of the most negative eigenvalue.
    pub fn psd_residual(&self) -> f64 {
        let h = self.hermiticity_residual();
        if !h.is_finite() {
            return f64::INFINITY;
        }
        let eig = hermitian_eig_symmetrized(self);
        let min_eig = eig.eigenvalues.first().copied().unwrap_or(0.0);
        h.max(-min_eig.min(0.0))
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.psd_residual() < tol
    }

    /// Residual of `P² = P` and `P = P†`.
    pub fn projector_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let idem = self.mul(self).max_abs_diff(self);
        idem.max(self.hermiticity_residual())
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.projector_residual() < tol
    }

    /// Residual of the density-matrix characterization: Hermitian, PSD and
    /// unit trace.
    pub fn density_residual(&self) -> f64 {
        let p = self.psd_residual();
        if !p.is_finite() {
            return f64::INFINITY;
        }
        p.max((self.trace() - C64::new(1.0, 0.0)).norm())
    }

    pub fn is_density(&self, tol: f64) -> bool {
        self.density_residual() < tol
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::mul(self, rhs)
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::add(self, rhs)
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::sub(self, rhs)
    }
}

/// Kronecker product; the first factor owns the most significant index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let f = a.get(i, j);
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out.set(i * rb + k, j * cb + l, f * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Kronecker product of coefficient vectors, same index convention.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

/// Decompose a flat index into per-factor indices (factor 0 most significant).
pub fn unravel(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

/// Inverse of [`unravel`].
pub fn ravel(multi: &[usize], dims: &[usize]) -> usize {
    let mut idx = 0;
    for (i, &d) in dims.iter().enumerate() {
        idx = idx * d + multi[i];
    }
    idx
}

/// Partial trace over the factors *not* listed in `keep`.
///
/// `dims` lists the tensor factors with factor 0 as the most significant
/// index; `keep` selects the factors the output acts on, in their original
/// order. The trace of the output equals the trace of the input.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{} but dims {:?} give total dimension {total}",
            m.rows(),
            m.cols(),
            dims
        )));
    }
    let mut seen = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "keep index {k} exceeds {} factors",
                dims.len()
            )));
        }
        if seen[k] {
            return Err(Error::DimensionMismatch(format!("keep index {k} repeated")));
        }
        seen[k] = true;
    }
    let mut keep_sorted: Vec<usize> = keep.to_vec();
    keep_sorted.sort_unstable();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !seen[*k]).collect();

    let keep_dims: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let dk: usize = keep_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    let mut out = ComplexMatrix::zeros(dk, dk);
    let mut full_row = vec![0usize; dims.len()];
    let mut full_col = vec![0usize; dims.len()];
    for r in 0..dk {
        let rk = unravel(r, &keep_dims);
        for c in 0..dk {
            let ck = unravel(c, &keep_dims);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..dt {
                let tt = unravel(t, &traced_dims);
                for (pos, &k) in keep_sorted.iter().enumerate() {
                    full_row[k] = rk[pos];
                    full_col[k] = ck[pos];
                }
                for (pos, &k) in traced.iter().enumerate() {
                    full_row[k] = tt[pos];
                    full_col[k] = tt[pos];
                }
                acc += m.get(ravel(&full_row, dims), ravel(&full_col, dims));
            }
            out.set(r, c, acc);
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues ascending; `eigenvectors` holds the matching orthonormal
/// eigenvectors as columns, so `V diag(λ) V†` reconstructs the input.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    /// Rebuild `V f(λ) V†`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let fd = ComplexMatrix::from_diag(&self.eigenvalues.iter().map(|&l| f(l)).collect::<Vec<_>>());
        &(v * &fd) * &v.adjoint()
    }

    /// Eigenvector for the k-th eigenvalue (ascending order).
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        (0..self.eigenvectors.rows())
            .map(|i| self.eigenvectors.get(i, k))
            .collect()
    }
}

fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

fn from_nalgebra(m: &DMatrix<C64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

// Internal: eigendecomposition of (M + M†)/2 without the Hermiticity gate,
// used by the PSD predicate which must not error on near-Hermitian input.
fn hermitian_eig_symmetrized(m: &ComplexMatrix) -> HermitianEig {
    let sym = m.add(&m.adjoint()).scale_re(0.5);
    let se = nalgebra::linalg::SymmetricEigen::new(to_nalgebra(&sym));
    let n = sym.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let eigenvectors =
        ComplexMatrix::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);
    HermitianEig {
        eigenvalues,
        eigenvectors,
    }
}

/// Eigendecomposition of a Hermitian matrix; errors if the input is not
/// Hermitian within `tol`.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<HermitianEig> {
    let residual = m.hermiticity_residual();
    if !(residual < tol) {
        return Err(Error::NotHermitian { residual });
    }
    Ok(hermitian_eig_symmetrized(m))
}

/// Singular value decomposition `A = U · diag(s) · V` with `s` descending
/// and `U`, `V` unitary.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::from_diag(
            &self
                .singular_values
                .iter()
                .map(|&s| C64::new(s, 0.0))
                .collect::<Vec<_>>(),
        );
        &(&self.u * &d) * &self.v
    }
}

/// Thin SVD factors of an `m×n` matrix with `m ≥ n`: `n` left columns, the
/// singular values (descending) and the `n×n` right factor `V†`.
pub(crate) struct ThinSvd {
    /// Columns `u_j`; zero singular values leave a `None` slot.
    pub columns: Vec<Option<Vec<C64>>>,
    pub sigma: Vec<f64>,
    /// `V†` with `A = U Σ V†`.
    pub v_dagger: ComplexMatrix,
}

/// One-sided Jacobi SVD: rotate column pairs until mutually orthogonal.
/// Slow-ish (O(n³) per sweep) but numerically reliable on the rank-deficient
/// inputs this crate routinely produces (pure-state projectors and friends).
pub(crate) fn jacobi_svd_tall(a: &ComplexMatrix) -> ThinSvd {
    let (m, n) = (a.rows(), a.cols());
    assert!(m >= n, "jacobi_svd_tall expects a tall matrix");
    // column-major working copy
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|j| (0..m).map(|i| a.get(i, j)).collect())
        .collect();
    let mut v_acc = ComplexMatrix::identity(n);
    let tol = 1e-15;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut app = 0.0f64;
                let mut aqq = 0.0f64;
                let mut apq = C64::new(0.0, 0.0);
                for i in 0..m {
                    app += cols[p][i].norm_sqr();
                    aqq += cols[q][i].norm_sqr();
                    apq += cols[p][i].conj() * cols[q][i];
                }
                if apq.norm() <= tol * (app * aqq).sqrt() || apq.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                // diagonalize the 2x2 Gram block [[app, apq], [apq*, aqq]]:
                // factor the phase out (G = D G' D† with D = diag(1, e^{-iθ}))
                // and apply the real Jacobi rotation to G'.
                let phase = (apq / C64::new(apq.norm(), 0.0)).conj();
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // W = diag(1, e^{-iθ}) · [[c, s], [-s, c]]
                let (w00, w01) = (C64::new(c, 0.0), C64::new(s, 0.0));
                let (w10, w11) = (phase * C64::new(-s, 0.0), phase * C64::new(c, 0.0));
                for i in 0..m {
                    let (x, y) = (cols[p][i], cols[q][i]);
                    cols[p][i] = x * w00 + y * w10;
                    cols[q][i] = x * w01 + y * w11;
                }
                for i in 0..n {
                    let (x, y) = (v_acc.get(i, p), v_acc.get(i, q));
                    v_acc.set(i, p, x * w00 + y * w10);
                    v_acc.set(i, q, x * w01 + y * w11);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| sigma[y].partial_cmp(&sigma[x]).unwrap());
    let scale = sigma[order[0]].max(f64::MIN_POSITIVE);
    let mut out_cols = Vec::with_capacity(n);
    let mut out_sigma = Vec::with_capacity(n);
    let v_dagger = ComplexMatrix::from_fn(n, n, |i, j| v_acc.get(j, order[i]).conj());
    for &j in &order {
        let s = sigma[j];
        out_sigma.push(s);
        if s > scale * 1e-14 {
            let inv = C64::new(1.0 / s, 0.0);
            out_cols.push(Some(cols[j].iter().map(|z| z * inv).collect()));
        } else {
            out_cols.push(None);
        }
    }
    ThinSvd {
        columns: out_cols,
        sigma: out_sigma,
        v_dagger,
    }
}

/// SVD of a square matrix by one-sided Jacobi.
pub fn svd(m: &ComplexMatrix) -> Result<SvdResult> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(
            "svd expects a square matrix".into(),
        ));
    }
    let n = m.rows();
    let thin = jacobi_svd_tall(m);
    let mut positions = Vec::new();
    let mut prescribed = Vec::new();
    for (j, col) in thin.columns.iter().enumerate() {
        if let Some(c) = col {
            positions.push(j);
            prescribed.push(c.clone());
        }
    }
    let u = unitary_with_prescribed_columns(n, &positions, &prescribed)?;
    Ok(SvdResult {
        u,
        singular_values: thin.sigma,
        v: thin.v_dagger,
    })
}

/// Polar decomposition `A = U·J = K·U` with `J = √(A†A)`, `K = √(AA†)`.
#[derive(Debug, Clone)]
pub struct PolarResult {
    pub unitary_part: ComplexMatrix,
    /// `J = √(A†A)`, the right positive factor (`A = U·J`).
    pub positive_part_right: ComplexMatrix,
    /// `K = √(AA†)`, the left positive factor (`A = K·U`).
    pub positive_part_left: ComplexMatrix,
}

/// Polar decomposition built from the SVD (`A = W Σ V` gives `U = W·V`,
/// `J = V† Σ V`, `K = W Σ W†`).
pub fn polar(m: &ComplexMatrix) -> Result<PolarResult> {
    let s = svd(m)?;
    let sigma = ComplexMatrix::from_diag(
        &s.singular_values
            .iter()
            .map(|&x| C64::new(x, 0.0))
            .collect::<Vec<_>>(),
    );
    let unitary_part = &s.u * &s.v;
    let positive_part_right = &(&s.v.adjoint() * &sigma) * &s.v;
    let positive_part_left = &(&s.u * &sigma) * &s.u.adjoint();
    Ok(PolarResult {
        unitary_part,
        positive_part_right,
        positive_part_left,
    })
}

fn psd_eig_clamped(m: &ComplexMatrix, tol: f64) -> Result<HermitianEig> {
    let mut eig = hermitian_eig(m, tol)?;
    for l in eig.eigenvalues.iter_mut() {
        if *l < -tol {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: *l });
        }
        if *l < 0.0 {
            *l = 0.0;
        }
    }
    Ok(eig)
}

/// Positive square root of a PSD Hermitian matrix. Eigenvalues in
/// `[-tol, 0)` are clamped to zero; anything below `-tol` is an error.
pub fn matrix_sqrt_psd(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = psd_eig_clamped(m, tol)?;
    Ok(eig.apply_fn(|l| C64::new(l.sqrt(), 0.0)))
}

/// Base-2 matrix logarithm on the support of a PSD Hermitian matrix.
///
/// Zero eigenvalues map to zero, realizing the `0·log 0 = 0` convention when
/// the result is traced against operators supported on the same subspace.
pub fn matrix_log2_psd(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = psd_eig_clamped(m, tol)?;
    Ok(eig.apply_fn(|l| {
        if l > 0.0 {
            C64::new(l.log2(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// `|A| = √(A†A)` for an arbitrary square matrix, via the SVD.
pub fn matrix_abs(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let s = svd(m)?;
    let sigma = ComplexMatrix::from_diag(
        &s.singular_values
            .iter()
            .map(|&x| C64::new(x, 0.0))
            .collect::<Vec<_>>(),
    );
    Ok(&(&s.v.adjoint() * &sigma) * &s.v)
}

/// Trace norm `‖A‖₁ = Σ singular values`.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(svd(m)?.singular_values.iter().sum())
}

/// `exp(i·factor·M)` for Hermitian `M`, by eigendecomposition.
pub fn exp_i_hermitian(m: &ComplexMatrix, factor: f64, tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m, tol)?;
    Ok(eig.apply_fn(|l| C64::from_polar(1.0, factor * l)))
}

/// Extend a set of orthonormal columns to a full unitary.
///
/// `columns` holds `k ≤ n` orthonormal vectors of length `n`; the result is an
/// `n×n` unitary whose first `k` columns are the inputs. Completion is by
/// Gram-Schmidt over the standard basis.
pub fn complete_to_unitary(n: usize, columns: &[Vec<C64>]) -> Result<ComplexMatrix> {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(n);
    for c in columns {
        if c.len() != n {
            return Err(Error::DimensionMismatch(
                "column length does not match dimension".into(),
            ));
        }
        basis.push(c.clone());
    }
    let mut candidate = 0usize;
    while basis.len() < n {
        if candidate >= n {
            return Err(Error::InvalidParameter(
                "could not complete orthonormal basis; input columns not independent".into(),
            ));
        }
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[candidate] = C64::new(1.0, 0.0);
        candidate += 1;
        // Two rounds of Gram-Schmidt for numerical orthogonality.
        for _ in 0..2 {
            for b in &basis {
                let ip: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= ip * bi;
                }
            }
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        for vi in v.iter_mut() {
            *vi /= C64::new(norm, 0.0);
        }
        basis.push(v);
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| basis[j][i]))
}

/// Unitary with the given orthonormal columns placed at `positions`;
/// the remaining columns are an orthonormal completion.
pub fn unitary_with_prescribed_columns(
    n: usize,
    positions: &[usize],
    columns: &[Vec<C64>],
) -> Result<ComplexMatrix> {
    if positions.len() != columns.len() {
        return Err(Error::DimensionMismatch(
            "one position per prescribed column".into(),
        ));
    }
    let packed = complete_to_unitary(n, columns)?;
    let mut used = vec![false; n];
    for &p in positions {
        if p >= n || used[p] {
            return Err(Error::InvalidParameter(format!(
                "bad column position {p}"
            )));
        }
        used[p] = true;
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for (i, &p) in positions.iter().enumerate() {
        for row in 0..n {
            out.set(row, p, packed.get(row, i));
        }
    }
    let mut spare = positions.len();
    for col in 0..n {
        if used[col] {
            continue;
        }
        for row in 0..n {
            out.set(row, col, packed.get(row, spare));
        }
        spare += 1;
    }
    Ok(out)
}

/// Haar-random unitary, from the QR of a complex Gaussian matrix with the
/// usual phase fix on the diagonal of R.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| {
        C64::new(sample_standard_normal(rng), sample_standard_normal(rng))
    });
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut phases = Vec::with_capacity(n);
    for i in 0..n {
        let d = r[(i, i)];
        let ph = if d.norm() > 0.0 {
            d / C64::new(d.norm(), 0.0)
        } else {
            C64::new(1.0, 0.0)
        };
        phases.push(ph);
    }
    let mut out = from_nalgebra(&q);
    for j in 0..n {
        for i in 0..n {
            let v = out.get(i, j) * phases[j];
            out.set(i, j, v);
        }
    }
    out
}

/// Standard-normal sample by Box-Muller; rand 0.8 keeps the normal
/// distribution in rand_distr, which nothing else here needs.
pub fn sample_standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// JSON form of a complex matrix: nested row-major `re`/`im` arrays.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let row = |i: usize, picker: fn(&C64) -> f64| {
            (0..m.cols()).map(|j| picker(&m.get(i, j))).collect()
        };
        Self {
            re: (0..m.rows()).map(|i| row(i, |z| z.re)).collect(),
            im: (0..m.rows()).map(|i| row(i, |z| z.im)).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let rows = self.re.len();
        if rows == 0 || self.im.len() != rows {
            return Err(Error::DimensionMismatch(
                "matrix re/im arrays must be nonempty and equal-shaped".into(),
            ));
        }
        let cols = self.re[0].len();
        if self
            .re
            .iter()
            .chain(self.im.iter())
            .any(|r| r.len() != cols)
        {
            return Err(Error::DimensionMismatch(
                "matrix rows have uneven lengths".into(),
            ));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(C64::new(self.re[i][j], self.im[i][j]));
            }
        }
        ComplexMatrix::new(rows, cols, data)
    }
}
