//! Quantum operations in operator-sum form: application and validation, the
//! six named qubit noise channels, system-environment constructions in both
//! directions, Kraus-set equivalence via Choi matrices, and Bloch affine maps.

use crate::error::{Error, Result};
use crate::gates;
use crate::linalg::{self, ComplexMatrix};
use crate::states::DensityMatrix;
use crate::C64;

/// Whether the operation elements resolve the identity or only stay below it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    TracePreserving,
    SubNormalized,
}

/// A quantum operation `ρ ↦ Σ E_k ρ E_k†` given by its operation elements.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    elements: Vec<ComplexMatrix>,
    kind: ChannelKind,
}

impl KrausChannel {
    pub fn new(elements: Vec<ComplexMatrix>, kind: ChannelKind, tol: f64) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidParameter("channel needs elements".into()));
        }
        let d = elements[0].rows();
        for e in &elements {
            if e.rows() != d || e.cols() != d {
                return Err(Error::DimensionMismatch(
                    "operation elements must share a square shape".into(),
                ));
            }
        }
        let mut sum = ComplexMatrix::zeros(d, d);
        for e in &elements {
            sum = sum.add(&e.adjoint().mul(e));
        }
        match kind {
            ChannelKind::TracePreserving => {
                let residual = sum.max_abs_diff(&ComplexMatrix::identity(d));
                if !(residual < tol) {
                    return Err(Error::IncompleteMeasurement { residual });
                }
            }
            ChannelKind::SubNormalized => {
                let slack = ComplexMatrix::identity(d).sub(&sum);
                let residual = slack.psd_residual();
                if !(residual < tol) {
                    return Err(Error::NotPositiveSemidefinite {
                        min_eigenvalue: -residual,
                    });
                }
            }
        }
        Ok(Self { elements, kind })
    }

    pub fn unitary(u: ComplexMatrix, tol: f64) -> Result<Self> {
        Self::new(vec![u], ChannelKind::TracePreserving, tol)
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    /// `Σ E_k M E_k†` on an arbitrary matrix.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let d = self.dim();
        let mut acc = ComplexMatrix::zeros(d, d);
        for e in &self.elements {
            acc = acc.add(&(&(e * m) * &e.adjoint()));
        }
        acc
    }
}

/// Apply a trace-preserving channel to a density matrix.
pub fn apply(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if ch.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(
            "channel does not match state dimension".into(),
        ));
    }
    if ch.kind != ChannelKind::TracePreserving {
        return Err(Error::InvalidParameter(
            "apply expects a trace-preserving channel; use apply_subnormalized".into(),
        ));
    }
    DensityMatrix::new(rho.dims().to_vec(), ch.apply_matrix(rho.matrix()), 1e-6)
}

/// Apply a (possibly sub-normalized) channel; the returned trace is the
/// probability that the represented process occurs.
pub fn apply_subnormalized(ch: &KrausChannel, rho: &DensityMatrix) -> Result<(ComplexMatrix, f64)> {
    if ch.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(
            "channel does not match state dimension".into(),
        ));
    }
    let out = ch.apply_matrix(rho.matrix());
    let trace = out.trace().re;
    Ok((out, trace))
}

/// The six textbook qubit noise channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedChannel {
    BitFlip,
    PhaseFlip,
    BitPhaseFlip,
    Depolarizing,
    AmplitudeDamping,
    PhaseDamping,
}

impl NamedChannel {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "bit_flip" => Self::BitFlip,
            "phase_flip" => Self::PhaseFlip,
            "bit_phase_flip" => Self::BitPhaseFlip,
            "depolarizing" => Self::Depolarizing,
            "amplitude_damping" => Self::AmplitudeDamping,
            "phase_damping" => Self::PhaseDamping,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown channel \"{other}\""
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::BitFlip => "bit_flip",
            Self::PhaseFlip => "phase_flip",
            Self::BitPhaseFlip => "bit_phase_flip",
            Self::Depolarizing => "depolarizing",
            Self::AmplitudeDamping => "amplitude_damping",
            Self::PhaseDamping => "phase_damping",
        }
    }

    pub const ALL: [NamedChannel; 6] = [
        Self::BitFlip,
        Self::PhaseFlip,
        Self::BitPhaseFlip,
        Self::Depolarizing,
        Self::AmplitudeDamping,
        Self::PhaseDamping,
    ];
}

/// Time-dependent damping probability `1 - e^{-t/T}`: the usual way the
/// amplitude-damping γ (with the relaxation time T₁) or the phase-damping λ
/// (with the spin-spin relaxation time T₂) is parameterized.
pub fn damping_probability(t: f64, relaxation_time: f64) -> f64 {
    1.0 - (-t / relaxation_time).exp()
}

/// Construct a named qubit channel with its textbook operation elements.
pub fn named_channel(which: NamedChannel, param: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&param) {
        return Err(Error::InvalidParameter(format!(
            "channel parameter {param} outside [0,1]"
        )));
    }
    let p = param;
    let id = ComplexMatrix::identity(2);
    let elements = match which {
        NamedChannel::BitFlip => vec![
            id.scale_re((1.0 - p).sqrt()),
            gates::pauli_x().scale_re(p.sqrt()),
        ],
        NamedChannel::PhaseFlip => vec![
            id.scale_re((1.0 - p).sqrt()),
            gates::pauli_z().scale_re(p.sqrt()),
        ],
        NamedChannel::BitPhaseFlip => vec![
            id.scale_re((1.0 - p).sqrt()),
            gates::pauli_y().scale_re(p.sqrt()),
        ],
        NamedChannel::Depolarizing => vec![
            id.scale_re((1.0 - 3.0 * p / 4.0).sqrt()),
            gates::pauli_x().scale_re(p.sqrt() / 2.0),
            gates::pauli_y().scale_re(p.sqrt() / 2.0),
            gates::pauli_z().scale_re(p.sqrt() / 2.0),
        ],
        NamedChannel::AmplitudeDamping => {
            let mut e0 = ComplexMatrix::identity(2);
            e0.set(1, 1, C64::new((1.0 - p).sqrt(), 0.0));
            let mut e1 = ComplexMatrix::zeros(2, 2);
            e1.set(0, 1, C64::new(p.sqrt(), 0.0));
            vec![e0, e1]
        }
        NamedChannel::PhaseDamping => {
            let mut e0 = ComplexMatrix::identity(2);
            e0.set(1, 1, C64::new((1.0 - p).sqrt(), 0.0));
            let mut e1 = ComplexMatrix::zeros(2, 2);
            e1.set(1, 1, C64::new(p.sqrt(), 0.0));
            vec![e0, e1]
        }
    };
    KrausChannel::new(elements, ChannelKind::TracePreserving, 1e-10)
}

/// Serial composition: `(outer ∘ inner)(ρ) = outer(inner(ρ))`.
pub fn compose(outer: &KrausChannel, inner: &KrausChannel) -> Result<KrausChannel> {
    if outer.dim() != inner.dim() {
        return Err(Error::DimensionMismatch(
            "composed channels must share a dimension".into(),
        ));
    }
    let mut elements = Vec::with_capacity(outer.elements.len() * inner.elements.len());
    for o in &outer.elements {
        for i in &inner.elements {
            elements.push(o.mul(i));
        }
    }
    let kind = if outer.kind == ChannelKind::TracePreserving
        && inner.kind == ChannelKind::TracePreserving
    {
        ChannelKind::TracePreserving
    } else {
        ChannelKind::SubNormalized
    };
    KrausChannel::new(elements, kind, 1e-8)
}

/// System-environment realization of a channel: a joint unitary, a pure
/// environment input, and the environment basis the Kraus elements refer to.
#[derive(Debug, Clone)]
pub struct EnvironmentModel {
    /// Unitary on system ⊗ environment (system is the first factor).
    pub joint_unitary: ComplexMatrix,
    pub env_init: Vec<C64>,
    /// Orthonormal environment basis as columns.
    pub env_basis: ComplexMatrix,
}

impl EnvironmentModel {
    pub fn new(
        joint_unitary: ComplexMatrix,
        env_init: Vec<C64>,
        env_basis: ComplexMatrix,
    ) -> Result<Self> {
        let m = env_basis.rows();
        if env_basis.cols() != m || env_init.len() != m {
            return Err(Error::DimensionMismatch(
                "environment basis and initial state sizes disagree".into(),
            ));
        }
        if !joint_unitary.rows().is_multiple_of(m) {
            return Err(Error::DimensionMismatch(
                "joint dimension is not a multiple of the environment dimension".into(),
            ));
        }
        let residual = joint_unitary.unitarity_residual();
        if !(residual < 1e-8) {
            return Err(Error::NotUnitary { residual });
        }
        let basis_residual = env_basis.unitarity_residual();
        if !(basis_residual < 1e-8) {
            return Err(Error::NotUnitary {
                residual: basis_residual,
            });
        }
        let norm: f64 = env_init.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            joint_unitary,
            env_init,
            env_basis,
        })
    }

    pub fn system_dim(&self) -> usize {
        self.joint_unitary.rows() / self.env_basis.rows()
    }

    pub fn env_dim(&self) -> usize {
        self.env_basis.rows()
    }
}

/// Extract the operation elements `E_k = ⟨e_k|U|e_0⟩` of an environment
/// model with a pure environment input.
pub fn kraus_from_environment(model: &EnvironmentModel) -> Result<KrausChannel> {
    let d = model.system_dim();
    let m = model.env_dim();
    let u = &model.joint_unitary;
    let mut elements = Vec::with_capacity(m);
    for k in 0..m {
        let mut e = ComplexMatrix::zeros(d, d);
        for a in 0..d {
            for s in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for b_out in 0..m {
                    for b_in in 0..m {
                        acc += model.env_basis.get(b_out, k).conj()
                            * u.get(a * m + b_out, s * m + b_in)
                            * model.env_init[b_in];
                    }
                }
                e.set(a, s, acc);
            }
        }
        elements.push(e);
    }
    KrausChannel::new(elements, ChannelKind::TracePreserving, 1e-8)
}

/// Minimal-dilation system-environment model of a trace-preserving channel:
/// the isometry `U(|ψ⟩|e₀⟩) = Σ_k (E_k|ψ⟩)|e_k⟩` completed to a unitary.
pub fn stinespring(ch: &KrausChannel) -> Result<EnvironmentModel> {
    if ch.kind != ChannelKind::TracePreserving {
        return Err(Error::InvalidParameter(
            "system-environment dilation needs a trace-preserving channel".into(),
        ));
    }
    let d = ch.dim();
    let m = ch.elements.len().max(2);
    let joint = d * m;
    let mut columns = Vec::with_capacity(d);
    for s in 0..d {
        let mut col = vec![C64::new(0.0, 0.0); joint];
        for (k, e) in ch.elements.iter().enumerate() {
            for a in 0..d {
                col[a * m + k] = e.get(a, s);
            }
        }
        columns.push(col);
    }
    let positions: Vec<usize> = (0..d).map(|s| s * m).collect();
    let joint_unitary = linalg::unitary_with_prescribed_columns(joint, &positions, &columns)?;
    let mut env_init = vec![C64::new(0.0, 0.0); m];
    env_init[0] = C64::new(1.0, 0.0);
    EnvironmentModel::new(joint_unitary, env_init, ComplexMatrix::identity(m))
}

/// Choi matrix `Σ_{jk} |j⟩⟨k| ⊗ 𝓔(|j⟩⟨k|)` (unnormalized maximally
/// entangled reference; trace `d` for trace-preserving channels).
pub fn choi(ch: &KrausChannel) -> ComplexMatrix {
    let d = ch.dim();
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for e in &ch.elements {
        // vec(E) with components v[(j,a)] = E[a,j] gives Σ vec(E)vec(E)†
        for j in 0..d {
            for a in 0..d {
                let x = e.get(a, j);
                if x.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..d {
                    for b in 0..d {
                        let y = e.get(b, k).conj();
                        let cur = out.get(j * d + a, k * d + b);
                        out.set(j * d + a, k * d + b, cur + x * y);
                    }
                }
            }
        }
    }
    out
}

/// Canonical Kraus set from the Choi eigendecomposition; at most `d²`
/// elements.
pub fn canonical_kraus(ch: &KrausChannel, tol: f64) -> Result<KrausChannel> {
    let d = ch.dim();
    let sigma = choi(ch);
    let eig = linalg::hermitian_eig(&sigma, 1e-8)?;
    let mut elements = Vec::new();
    for (l, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda < tol {
            continue;
        }
        let v = eig.eigenvector(l);
        let scale = lambda.sqrt();
        elements.push(ComplexMatrix::from_fn(d, d, |a, j| {
            v[j * d + a] * C64::new(scale, 0.0)
        }));
    }
    if elements.is_empty() {
        return Err(Error::InvalidParameter("channel has vanishing Choi".into()));
    }
    KrausChannel::new(elements, ch.kind, 1e-7)
}

/// Equality of channels as maps, decided on Choi matrices.
pub fn channels_equal(a: &KrausChannel, b: &KrausChannel, tol: f64) -> bool {
    a.dim() == b.dim() && choi(a).max_abs_diff(&choi(b)) < tol
}

/// When two Kraus sets generate the same channel, return an `m×m` unitary
/// with `E_j = Σ_k U_{jk} F_k` (zero-padding the shorter list).
pub fn find_kraus_unitary(
    a: &KrausChannel,
    b: &KrausChannel,
    tol: f64,
) -> Result<Option<ComplexMatrix>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(
            "channels must share a dimension".into(),
        ));
    }
    if !channels_equal(a, b, tol) {
        return Ok(None);
    }
    let d = a.dim();
    let m = a.elements.len().max(b.elements.len());
    let vec_of = |e: &ComplexMatrix| -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); d * d];
        for j in 0..d {
            for x in 0..d {
                v[j * d + x] = e.get(x, j);
            }
        }
        v
    };
    let padded = |ch: &KrausChannel| -> Vec<Vec<C64>> {
        let mut vs: Vec<Vec<C64>> = ch.elements.iter().map(vec_of).collect();
        vs.resize(m, vec![C64::new(0.0, 0.0); d * d]);
        vs
    };
    let e_vecs = padded(a);
    let f_vecs = padded(b);

    // Shared Choi eigenbasis: coefficients of each element vector on the
    // orthonormal eigenvectors, scaled by 1/√λ, form isometry columns.
    let sigma = choi(a);
    let eig = linalg::hermitian_eig(&sigma, 1e-8)?;
    let kept: Vec<(f64, Vec<C64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 1e-10)
        .map(|(i, &l)| (l, eig.eigenvector(i)))
        .collect();
    let coeff_columns = |vs: &[Vec<C64>]| -> Vec<Vec<C64>> {
        kept.iter()
            .map(|(l, g)| {
                let inv = 1.0 / l.sqrt();
                vs.iter()
                    .map(|v| {
                        let ip: C64 = g.iter().zip(v).map(|(gi, vi)| gi.conj() * vi).sum();
                        ip * C64::new(inv, 0.0)
                    })
                    .collect()
            })
            .collect()
    };
    let a_cols = coeff_columns(&e_vecs);
    let b_cols = coeff_columns(&f_vecs);
    let ua = linalg::unitary_with_prescribed_columns(m, &(0..kept.len()).collect::<Vec<_>>(), &a_cols)?;
    let ub = linalg::unitary_with_prescribed_columns(m, &(0..kept.len()).collect::<Vec<_>>(), &b_cols)?;
    let u = ua.mul(&ub.adjoint());

    // residual check: E_j = Σ_k U_{jk} F_k
    let mut residual: f64 = 0.0;
    for j in 0..m {
        let mut combo = vec![C64::new(0.0, 0.0); d * d];
        for k in 0..m {
            let w = u.get(j, k);
            for (ci, fi) in combo.iter_mut().zip(&f_vecs[k]) {
                *ci += w * fi;
            }
        }
        for (ci, ei) in combo.iter().zip(&e_vecs[j]) {
            residual = residual.max((ci - ei).norm());
        }
    }
    if residual < tol.max(1e-7) {
        Ok(Some(u))
    } else {
        Ok(None)
    }
}

/// Affine action on the Bloch ball: `v ↦ L·v + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochAffineMap {
    pub linear: [[f64; 3]; 3],
    pub offset: [f64; 3],
}

impl BlochAffineMap {
    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let mut out = self.offset;
        for i in 0..3 {
            for j in 0..3 {
                out[i] += self.linear[i][j] * v[j];
            }
        }
        out
    }
}

/// Bloch affine map of a qubit channel:
/// `L[i][j] = Tr(σ_i 𝓔(σ_j))/2`, `offset[i] = Tr(σ_i 𝓔(1))/2`.
pub fn bloch_map(ch: &KrausChannel) -> Result<BlochAffineMap> {
    if ch.dim() != 2 {
        return Err(Error::DimensionMismatch(
            "Bloch map is defined for qubit channels".into(),
        ));
    }
    let mut linear = [[0.0; 3]; 3];
    let mut offset = [0.0; 3];
    let image_id = ch.apply_matrix(&ComplexMatrix::identity(2));
    for i in 0..3 {
        offset[i] = gates::pauli(i + 1).mul(&image_id).trace().re / 2.0;
        for j in 0..3 {
            let image = ch.apply_matrix(&gates::pauli(j + 1));
            linear[i][j] = gates::pauli(i + 1).mul(&image).trace().re / 2.0;
        }
    }
    Ok(BlochAffineMap { linear, offset })
}
