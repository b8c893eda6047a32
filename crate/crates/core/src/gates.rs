//! Standard gate catalog, single-qubit rotation algebra, and the synthesis
//! pipelines: ABC decomposition, two-level decomposition, Gray-code routing
//! and breadth-first Hadamard/T approximation.

use crate::circuits::{Circuit, Control};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::C64;
use std::f64::consts::PI;

/// Named unitary acting on `arity` qubits.
#[derive(Debug, Clone)]
pub struct Gate {
    pub name: String,
    pub arity: usize,
    pub matrix: ComplexMatrix,
}

impl Gate {
    pub fn new(name: impl Into<String>, arity: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != (1 << arity) || matrix.cols() != (1 << arity) {
            return Err(Error::DimensionMismatch(format!(
                "gate on {arity} qubits needs a {0}x{0} matrix",
                1 << arity
            )));
        }
        let residual = matrix.unitarity_residual();
        if !(residual < 1e-8) {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self {
            name: name.into(),
            arity,
            matrix,
        })
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m.set(0, 1, c(0.0, -1.0));
    m.set(1, 0, c(0.0, 1.0));
    m
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

/// σ_k for k = 1,2,3 (σ_0 is the identity).
pub fn pauli(k: usize) -> ComplexMatrix {
    match k {
        0 => ComplexMatrix::identity(2),
        1 => pauli_x(),
        2 => pauli_y(),
        3 => pauli_z(),
        _ => panic!("pauli index {k} out of range"),
    }
}

pub fn hadamard() -> ComplexMatrix {
    pauli_x().add(&pauli_z()).scale_re(1.0 / 2.0_f64.sqrt())
}

/// `T = diag(1, e^{iπ/4})`.
pub fn t_gate() -> ComplexMatrix {
    ComplexMatrix::from_diag(&[c(1.0, 0.0), C64::from_polar(1.0, PI / 4.0)])
}

/// `S = T² = diag(1, i)`.
pub fn s_gate() -> ComplexMatrix {
    ComplexMatrix::from_diag(&[c(1.0, 0.0), c(0.0, 1.0)])
}

/// Phase shift `P_φ = diag(1, e^{iφ})`.
pub fn phase_gate(phi: f64) -> ComplexMatrix {
    ComplexMatrix::from_diag(&[c(1.0, 0.0), C64::from_polar(1.0, phi)])
}

/// CNOT with the first index as control.
pub fn cnot() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
}

pub fn swap() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
    ])
}

/// |a b c⟩ → |a b c⊕ab⟩.
pub fn toffoli() -> ComplexMatrix {
    ComplexMatrix::from_fn(8, 8, |i, j| {
        let flip = (j >> 2) & (j >> 1) & 1;
        if i == j ^ flip {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Axis-angle specification of a single-qubit rotation.
#[derive(Debug, Clone, Copy)]
pub struct RotationSpec {
    pub axis: [f64; 3],
    pub angle: f64,
}

impl RotationSpec {
    pub fn z(angle: f64) -> Self {
        Self {
            axis: [0.0, 0.0, 1.0],
            angle,
        }
    }

    pub fn y(angle: f64) -> Self {
        Self {
            axis: [0.0, 1.0, 0.0],
            angle,
        }
    }
}

/// `R_n̂(θ) = e^{-iθ/2 n̂·σ} = cos(θ/2) 1 - i sin(θ/2) n̂·σ`.
pub fn rotation_matrix(spec: &RotationSpec) -> Result<ComplexMatrix> {
    let norm = spec.axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "rotation axis must be a unit vector (norm {norm})"
        )));
    }
    let half = spec.angle / 2.0;
    let mut m = ComplexMatrix::identity(2).scale(c(half.cos(), 0.0));
    for k in 0..3 {
        m = m.add(&pauli(k + 1).scale(c(0.0, -half.sin() * spec.axis[k] / norm)));
    }
    Ok(m)
}

pub fn rotation(spec: &RotationSpec) -> Result<Gate> {
    let name = format!(
        "Rn({},{},{},{})",
        spec.axis[0], spec.axis[1], spec.axis[2], spec.angle
    );
    Gate::new(name, 1, rotation_matrix(spec)?)
}

fn parse_args(name: &str, prefix: &str) -> Result<Vec<f64>> {
    let inner = name
        .strip_prefix(prefix)
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::UnknownGate(name.to_string()))?;
    inner
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::UnknownGate(name.to_string()))
        })
        .collect()
}

/// Look up a catalog gate by name. Accepts the fixed names
/// `X,Y,Z,H,T,S,I,CNOT,TOFFOLI,SWAP` and the parameterized forms
/// `P(phi)` and `Rn(nx,ny,nz,theta)`.
pub fn standard_gate(name: &str) -> Result<Gate> {
    let mat = match name {
        "X" => pauli_x(),
        "Y" => pauli_y(),
        "Z" => pauli_z(),
        "H" => hadamard(),
        "T" => t_gate(),
        "S" => s_gate(),
        "I" => ComplexMatrix::identity(2),
        "CNOT" => return Gate::new("CNOT", 2, cnot()),
        "SWAP" => return Gate::new("SWAP", 2, swap()),
        "TOFFOLI" => return Gate::new("TOFFOLI", 3, toffoli()),
        _ if name.starts_with("P(") => {
            let args = parse_args(name, "P(")?;
            if args.len() != 1 {
                return Err(Error::UnknownGate(name.to_string()));
            }
            phase_gate(args[0])
        }
        _ if name.starts_with("Rn(") => {
            let args = parse_args(name, "Rn(")?;
            if args.len() != 4 {
                return Err(Error::UnknownGate(name.to_string()));
            }
            rotation_matrix(&RotationSpec {
                axis: [args[0], args[1], args[2]],
                angle: args[3],
            })?
        }
        _ => return Err(Error::UnknownGate(name.to_string())),
    };
    Gate::new(name, 1, mat)
}

/// `U = e^{iα} A·X·B·X·C` with `A·B·C = 1`.
#[derive(Debug, Clone)]
pub struct AbcDecomposition {
    pub alpha: f64,
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
}

impl AbcDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let x = pauli_x();
        let prod = &(&(&(&self.a * &x) * &self.b) * &x) * &self.c;
        prod.scale(C64::from_polar(1.0, self.alpha))
    }

    pub fn abc_product(&self) -> ComplexMatrix {
        &(&self.a * &self.b) * &self.c
    }
}

/// ZYZ Euler angles: `U = e^{iα} R_z(β) R_y(γ) R_z(δ)`.
pub fn zyz_angles(u: &ComplexMatrix) -> Result<(f64, f64, f64, f64)> {
    let residual = u.unitarity_residual();
    if u.rows() != 2 || !(residual < 1e-8) {
        return Err(Error::NotUnitary {
            residual: if u.rows() == 2 { residual } else { f64::INFINITY },
        });
    }
    let det = u.get(0, 0) * u.get(1, 1) - u.get(0, 1) * u.get(1, 0);
    let alpha = det.arg() / 2.0;
    let phase = C64::from_polar(1.0, -alpha);
    let v00 = u.get(0, 0) * phase;
    let v10 = u.get(1, 0) * phase;
    let gamma = 2.0 * v10.norm().atan2(v00.norm());
    let (beta, delta);
    if v00.norm() > 1e-9 && v10.norm() > 1e-9 {
        let sum = -2.0 * v00.arg(); // β + δ
        let diff = 2.0 * v10.arg(); // β - δ
        beta = (sum + diff) / 2.0;
        delta = (sum - diff) / 2.0;
    } else if v00.norm() > 1e-9 {
        beta = -2.0 * v00.arg();
        delta = 0.0;
    } else {
        beta = 2.0 * v10.arg();
        delta = 0.0;
    }
    Ok((alpha, beta, gamma, delta))
}

/// Split a single-qubit unitary as `e^{iα} A·X·B·X·C` with `ABC = 1`, from
/// the ZYZ angles: `A = R_z(β)R_y(γ/2)`, `B = R_y(-γ/2)R_z(-(δ+β)/2)`,
/// `C = R_z((δ-β)/2)`.
pub fn abc_decompose(u: &ComplexMatrix) -> Result<AbcDecomposition> {
    let (alpha, beta, gamma, delta) = zyz_angles(u)?;
    let rz = |t: f64| rotation_matrix(&RotationSpec::z(t)).expect("unit axis");
    let ry = |t: f64| rotation_matrix(&RotationSpec::y(t)).expect("unit axis");
    let a = &rz(beta) * &ry(gamma / 2.0);
    let b = &ry(-gamma / 2.0) * &rz(-(delta + beta) / 2.0);
    let cm = rz((delta - beta) / 2.0);
    Ok(AbcDecomposition {
        alpha,
        a,
        b,
        c: cm,
    })
}

/// Unitary acting nontrivially only on the basis states `i < j`.
#[derive(Debug, Clone)]
pub struct TwoLevelUnitary {
    pub dim: usize,
    pub i: usize,
    pub j: usize,
    /// 2x2 block in the ordered basis (|i⟩, |j⟩).
    pub block: ComplexMatrix,
}

impl TwoLevelUnitary {
    pub fn new(dim: usize, i: usize, j: usize, block: ComplexMatrix) -> Result<Self> {
        if i >= j || j >= dim {
            return Err(Error::InvalidParameter(format!(
                "two-level indices ({i},{j}) must satisfy i < j < {dim}"
            )));
        }
        let residual = block.unitarity_residual();
        if block.rows() != 2 || !(residual < 1e-8) {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { dim, i, j, block })
    }

    /// Embedding into the identity on the full space.
    pub fn embed(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::identity(self.dim);
        m.set(self.i, self.i, self.block.get(0, 0));
        m.set(self.i, self.j, self.block.get(0, 1));
        m.set(self.j, self.i, self.block.get(1, 0));
        m.set(self.j, self.j, self.block.get(1, 1));
        m
    }
}

/// Ordered product of embedded two-level factors.
pub fn two_level_product(factors: &[TwoLevelUnitary], dim: usize) -> ComplexMatrix {
    let mut acc = ComplexMatrix::identity(dim);
    for f in factors {
        acc = acc.mul(&f.embed());
    }
    acc
}

/// Decompose a unitary into two-level factors whose ordered product
/// reconstructs it; at most `d(d-1)/2` factors.
///
/// Column-by-column elimination: each subdiagonal entry is removed by a
/// two-level rotation; the factors collected along the way are returned
/// adjointed so that their left-to-right product equals the input.
pub fn two_level_decompose(u: &ComplexMatrix, tol: f64) -> Result<Vec<TwoLevelUnitary>> {
    let residual = u.unitarity_residual();
    if !u.is_square() || !(residual < tol.max(1e-8)) {
        return Err(Error::NotUnitary { residual });
    }
    let d = u.rows();
    let mut m = u.clone();
    let mut eliminators: Vec<TwoLevelUnitary> = Vec::new();
    let apply_rows = |m: &mut ComplexMatrix, i: usize, j: usize, b: &ComplexMatrix| {
        for col in 0..d {
            let x = m.get(i, col);
            let y = m.get(j, col);
            m.set(i, col, b.get(0, 0) * x + b.get(0, 1) * y);
            m.set(j, col, b.get(1, 0) * x + b.get(1, 1) * y);
        }
    };
    for col in 0..d - 1 {
        if col == d - 2 {
            // The remaining 2x2 block is unitary; its adjoint finishes the job.
            let block = ComplexMatrix::from_fn(2, 2, |i, j| m.get(col + i, col + j)).adjoint();
            apply_rows(&mut m, col, col + 1, &block);
            eliminators.push(TwoLevelUnitary::new(d, col, col + 1, block)?);
            break;
        }
        for row in col + 1..d {
            let b = m.get(row, col);
            if b.norm() <= 1e-13 {
                continue;
            }
            let a = m.get(col, col);
            let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let inv = c(1.0 / n, 0.0);
            let mut block = ComplexMatrix::zeros(2, 2);
            block.set(0, 0, a.conj() * inv);
            block.set(0, 1, b.conj() * inv);
            block.set(1, 0, b * inv);
            block.set(1, 1, -a * inv);
            apply_rows(&mut m, col, row, &block);
            eliminators.push(TwoLevelUnitary::new(d, col, row, block)?);
        }
        let diag = m.get(col, col);
        if (diag - c(1.0, 0.0)).norm() > 1e-13 {
            // Untouched column with a leftover phase (e.g. diagonal input).
            let block = ComplexMatrix::from_diag(&[diag.conj(), c(1.0, 0.0)]);
            apply_rows(&mut m, col, col + 1, &block);
            eliminators.push(TwoLevelUnitary::new(d, col, col + 1, block)?);
        }
    }
    // U_k ⋯ U_1 U = 1, so U = U_1† ⋯ U_k†.
    Ok(eliminators
        .into_iter()
        .map(|f| TwoLevelUnitary {
            dim: f.dim,
            i: f.i,
            j: f.j,
            block: f.block.adjoint(),
        })
        .collect())
}

/// Gray-code routing of a two-level unitary onto controlled gates.
///
/// The basis states `i` and `j` are connected by flipping one differing bit
/// at a time (least significant first); every routing step is a controlled-X
/// with one control per remaining wire, the middle step applies the 2x2 block
/// as a multi-controlled gate, and the routing is undone in reverse.
pub fn gray_synthesize(t: &TwoLevelUnitary, n: usize) -> Result<Circuit> {
    if t.dim != (1 << n) {
        return Err(Error::DimensionMismatch(format!(
            "two-level unitary on dimension {} does not fit {n} qubits",
            t.dim
        )));
    }
    let wire_of_bit = |bit: usize| n - 1 - bit;
    let mut path = Vec::new();
    let mut g = t.i;
    for bit in 0..n {
        if (t.i ^ t.j) >> bit & 1 == 1 {
            path.push((g, bit));
            g ^= 1 << bit;
        }
    }
    debug_assert_eq!(g, t.j);
    let (&(v_state, v_bit), routing) = path.split_last().expect("i != j");

    let mut circuit = Circuit::new(n);
    let controls_for = |state: usize, flip_bit: usize| -> Vec<Control> {
        (0..n)
            .filter(|&q| q != flip_bit)
            .map(|q| Control {
                wire: wire_of_bit(q),
                polarity: (state >> q & 1) as u8,
            })
            .collect()
    };
    for &(state, bit) in routing {
        circuit.push_controlled(
            standard_gate("X")?,
            vec![wire_of_bit(bit)],
            controls_for(state, bit),
        )?;
    }
    // Orient the block so its first index matches the wire's |0⟩ component.
    let v = if v_state >> v_bit & 1 == 0 {
        t.block.clone()
    } else {
        ComplexMatrix::from_fn(2, 2, |a, b| t.block.get(1 - a, 1 - b))
    };
    circuit.push_controlled(
        Gate::new("CU", 1, v)?,
        vec![wire_of_bit(v_bit)],
        controls_for(v_state, v_bit),
    )?;
    for &(state, bit) in routing.iter().rev() {
        circuit.push_controlled(
            standard_gate("X")?,
            vec![wire_of_bit(bit)],
            controls_for(state, bit),
        )?;
    }
    Ok(circuit)
}

/// `E(U,V) = max_ψ ‖(U-V)|ψ⟩‖`, realized exactly as the largest singular
/// value of `U-V`.
pub fn approximation_error(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    if u.rows() != v.rows() || u.cols() != v.cols() {
        return Err(Error::DimensionMismatch(
            "approximation error needs equal dimensions".into(),
        ));
    }
    let diff = u.sub(v);
    Ok(linalg::svd(&diff)?
        .singular_values
        .first()
        .copied()
        .unwrap_or(0.0))
}

/// Projective approximation error for single-qubit unitaries:
/// `min_φ E(e^{iφ}U, V)`, together with the minimizing phase.
///
/// With `M = U†V` and eigenphases `θ₁, θ₂`, the optimal alignment sits at a
/// midpoint of the eigenphase pair; both candidates are evaluated exactly.
pub fn approximation_error_up_to_phase(
    u: &ComplexMatrix,
    v: &ComplexMatrix,
) -> Result<(f64, f64)> {
    if u.rows() != 2 || v.rows() != 2 {
        return Err(Error::DimensionMismatch(
            "projective error is implemented for single-qubit gates".into(),
        ));
    }
    let m = u.adjoint().mul(v);
    let tr = m.trace();
    let det = m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0);
    let disc = (tr * tr - det * c(4.0, 0.0)).sqrt();
    let l1 = (tr + disc) * c(0.5, 0.0);
    let l2 = (tr - disc) * c(0.5, 0.0);
    let (t1, t2) = (l1.arg(), l2.arg());
    let mut best = (f64::INFINITY, 0.0);
    for cand in [(t1 + t2) / 2.0, (t1 + t2) / 2.0 + PI] {
        let shifted = u.scale(C64::from_polar(1.0, cand));
        let err = approximation_error(&shifted, v)?;
        if err < best.0 {
            best = (err, cand);
        }
    }
    Ok(best)
}

// Fast in-search variant: same quantity via the eigenphase distance, no SVD.
fn projective_error_fast(m_adj_v: &ComplexMatrix) -> f64 {
    let tr = m_adj_v.trace();
    let det = m_adj_v.get(0, 0) * m_adj_v.get(1, 1) - m_adj_v.get(0, 1) * m_adj_v.get(1, 0);
    let disc = (tr * tr - det * c(4.0, 0.0)).sqrt();
    let l1 = (tr + disc) * c(0.5, 0.0);
    let l2 = (tr - disc) * c(0.5, 0.0);
    let mut d = (l1.arg() - l2.arg()).abs();
    if d > PI {
        d = 2.0 * PI - d;
    }
    2.0 * (d / 4.0).sin()
}

/// Letter of a Hadamard/T word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HtLetter {
    H,
    T,
}

/// A word over {H, T} with its matrix value (ordered left-to-right product).
#[derive(Debug, Clone)]
pub struct HtWord {
    pub letters: Vec<HtLetter>,
    pub value: ComplexMatrix,
    /// Projective approximation error against the search target.
    pub error: f64,
    /// Global phase aligning the word with the target at that error.
    pub phase: f64,
}

impl HtWord {
    pub fn letters_string(&self) -> String {
        self.letters
            .iter()
            .map(|l| match l {
                HtLetter::H => 'H',
                HtLetter::T => 'T',
            })
            .collect()
    }
}

fn word_value(letters: &[HtLetter]) -> ComplexMatrix {
    let h = hadamard();
    let t = t_gate();
    let mut acc = ComplexMatrix::identity(2);
    for l in letters {
        acc = acc.mul(match l {
            HtLetter::H => &h,
            HtLetter::T => &t,
        });
    }
    acc
}

// Quantized SU(2) fingerprint used to prune revisits of (projectively)
// nearby words. The quaternion sign is canonicalized before rounding.
fn su2_fingerprint(m: &ComplexMatrix, resolution: f64) -> Option<[i32; 4]> {
    let det = m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0);
    let half = C64::from_polar(1.0, det.arg() / 2.0);
    let a = m.get(0, 0) / half;
    let b = m.get(0, 1) / half;
    // M/√det = w·1 + i(x·X + y·Y + z·Z)
    let mut q = [a.re, b.im, b.re, a.im];
    if q.iter().any(|x| !x.is_finite()) {
        return None;
    }
    for k in 0..4 {
        if q[k].abs() > 1e-9 {
            if q[k] < 0.0 {
                for v in q.iter_mut() {
                    *v = -*v;
                }
            }
            break;
        }
    }
    Some([
        (q[0] / resolution).round() as i32,
        (q[1] / resolution).round() as i32,
        (q[2] / resolution).round() as i32,
        (q[3] / resolution).round() as i32,
    ])
}

/// Breadth-first search over {H,T}-words approximating a single-qubit target
/// to projective error `epsilon`.
///
/// Words are explored shortest-first with two prunings: no `HH` pairs and at
/// most seven consecutive `T`s (both reduce to shorter words up to phase),
/// plus a visited set keyed by a coarse SU(2) grid. Best-effort: if no word
/// within `max_len` letters reaches `epsilon`, the best one found is returned
/// with its achieved error.
pub fn ht_approximate(target: &ComplexMatrix, epsilon: f64, max_len: usize) -> Result<HtWord> {
    if epsilon <= 0.0 {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let residual = target.unitarity_residual();
    if target.rows() != 2 || !(residual < 1e-8) {
        return Err(Error::NotUnitary { residual });
    }
    let h = hadamard();
    let t = t_gate();
    let resolution = 0.01;

    struct Node {
        parent: usize,
        letter: HtLetter,
        value: ComplexMatrix,
        len: usize,
    }
    let root_value = ComplexMatrix::identity(2);
    let mut nodes: Vec<Node> = vec![Node {
        parent: usize::MAX,
        letter: HtLetter::H, // unused for the root
        value: root_value,
        len: 0,
    }];
    let mut visited = std::collections::HashSet::new();
    visited.insert(su2_fingerprint(&nodes[0].value, resolution).unwrap());

    let fast_error = |value: &ComplexMatrix| projective_error_fast(&value.adjoint().mul(target));
    let mut best: (f64, usize) = (fast_error(&nodes[0].value), 0);
    let mut head = 0usize;
    const NODE_CAP: usize = 4_000_000;
    'bfs: while head < nodes.len() && best.0 > epsilon {
        let parent = head;
        head += 1;
        if nodes[parent].len >= max_len {
            continue;
        }
        for letter in [HtLetter::H, HtLetter::T] {
            // canonical pruning: HH = 1, T^8 = phase
            match letter {
                HtLetter::H => {
                    if nodes[parent].len > 0 && nodes[parent].letter == HtLetter::H {
                        continue;
                    }
                }
                HtLetter::T => {
                    let mut runs = 0;
                    let mut probe = parent;
                    while probe != 0 && nodes[probe].letter == HtLetter::T {
                        runs += 1;
                        probe = nodes[probe].parent;
                    }
                    if runs >= 7 {
                        continue;
                    }
                }
            }
            let value = nodes[parent].value.mul(match letter {
                HtLetter::H => &h,
                HtLetter::T => &t,
            });
            let Some(fp) = su2_fingerprint(&value, resolution) else {
                continue;
            };
            if !visited.insert(fp) {
                continue;
            }
            let err = fast_error(&value);
            let idx = nodes.len();
            nodes.push(Node {
                parent,
                letter,
                value,
                len: nodes[parent].len + 1,
            });
            if err < best.0 {
                best = (err, idx);
            }
            if best.0 <= epsilon || nodes.len() >= NODE_CAP {
                break 'bfs;
            }
        }
    }

    let (_, mut idx) = best;
    let mut letters = Vec::new();
    while idx != 0 {
        letters.push(nodes[idx].letter);
        idx = nodes[idx].parent;
    }
    letters.reverse();
    let value = word_value(&letters);
    let (error, phase) = approximation_error_up_to_phase(&value, target)?;
    Ok(HtWord {
        letters,
        value,
        error,
        phase,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits;
    use crate::DEFAULT_TOL;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn t_squared_is_s() {
        assert!(t_gate().mul(&t_gate()).max_abs_diff(&s_gate()) < 1e-15);
    }

    #[test]
    fn hadamard_is_self_inverse() {
        let h = hadamard();
        assert!(h.mul(&h).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn pauli_product_algebra() {
        // σ_j σ_k = δ_{jk} 1 + i Σ_l ε_{jkl} σ_l for all nine pairs.
        let eps = |j: usize, k: usize, l: usize| -> f64 {
            match (j, k, l) {
                (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1.0,
                (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1.0,
                _ => 0.0,
            }
        };
        for j in 1..=3 {
            for k in 1..=3 {
                let product = pauli(j).mul(&pauli(k));
                let mut expected = if j == k {
                    ComplexMatrix::identity(2)
                } else {
                    ComplexMatrix::zeros(2, 2)
                };
                for l in 1..=3 {
                    expected = expected.add(&pauli(l).scale(c(0.0, eps(j, k, l))));
                }
                assert!(product.max_abs_diff(&expected) < 1e-15, "pair ({j},{k})");
            }
        }
    }

    #[test]
    fn all_catalog_gates_unitary() {
        for name in ["X", "Y", "Z", "H", "T", "S", "I", "CNOT", "SWAP", "TOFFOLI"] {
            assert!(standard_gate(name).unwrap().matrix.unitarity_residual() < 1e-12);
        }
        assert!(standard_gate("P(0.37)").unwrap().matrix.unitarity_residual() < 1e-12);
        assert!(standard_gate("Rn(0,0,1,0.5)").unwrap().matrix.unitarity_residual() < 1e-12);
        assert!(standard_gate("Q").is_err());
    }

    #[test]
    fn rz_quarter_turn_is_t_up_to_phase() {
        // T = e^{iπ/8} R_z(π/4)
        let rz = rotation_matrix(&RotationSpec::z(PI / 4.0)).unwrap();
        let t = t_gate().scale(C64::from_polar(1.0, -PI / 8.0));
        assert!(rz.max_abs_diff(&t) < 1e-15);
    }

    #[test]
    fn zero_angle_rotation_is_identity() {
        let r = rotation_matrix(&RotationSpec {
            axis: [1.0, 0.0, 0.0],
            angle: 0.0,
        })
        .unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert!(rotation_matrix(&RotationSpec {
            axis: [0.0, 0.0, 0.0],
            angle: 1.0
        })
        .is_err());
    }

    #[test]
    fn rotation_matches_exponential_oracle() {
        // R_n̂(θ) = exp(-iθ/2 n̂·σ) via eigendecomposition of n̂·σ.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..25 {
            let raw: [f64; 3] = [
                linalg::sample_standard_normal(&mut rng),
                linalg::sample_standard_normal(&mut rng),
                linalg::sample_standard_normal(&mut rng),
            ];
            let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
            let axis = [raw[0] / norm, raw[1] / norm, raw[2] / norm];
            let angle: f64 = rand::Rng::gen_range(&mut rng, -6.0..6.0);
            let spec = RotationSpec { axis, angle };
            let direct = rotation_matrix(&spec).unwrap();
            let mut ns = ComplexMatrix::zeros(2, 2);
            for k in 0..3 {
                ns = ns.add(&pauli(k + 1).scale_re(axis[k]));
            }
            let exp = linalg::exp_i_hermitian(&ns, -angle / 2.0, DEFAULT_TOL).unwrap();
            assert!(direct.max_abs_diff(&exp) < 1e-10);
        }
    }

    #[test]
    fn hth_identity() {
        // HTH = e^{iπ/8}(cos(π/8) 1 - i sin(π/8) X)
        let hth = hadamard().mul(&t_gate()).mul(&hadamard());
        let want = ComplexMatrix::identity(2)
            .scale(c((PI / 8.0).cos(), 0.0))
            .add(&pauli_x().scale(c(0.0, -(PI / 8.0).sin())))
            .scale(C64::from_polar(1.0, PI / 8.0));
        assert!(hth.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn thth_rotation_angle_and_axes() {
        // THTH = e^{iπ/4} R_n̂(θ) with cos(θ/2) = cos²(π/8); HTHT uses the
        // mirrored axis; the two axes are non-parallel.
        let thth = t_gate().mul(&hadamard()).mul(&t_gate()).mul(&hadamard());
        let su2 = thth.scale(C64::from_polar(1.0, -PI / 4.0));
        let cos_half = su2.trace().re / 2.0;
        assert!((cos_half - (PI / 8.0).cos().powi(2)).abs() < 1e-12);

        let norm = (1.0 + (PI / 8.0).cos().powi(2)).sqrt();
        let n_axis = [
            (PI / 8.0).cos() / norm,
            (PI / 8.0).sin() / norm,
            (PI / 8.0).cos() / norm,
        ];
        let m_axis = [n_axis[0], -n_axis[1], n_axis[2]];
        let dot: f64 = n_axis.iter().zip(&m_axis).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1.0 - 1e-6);

        let theta = 2.0 * cos_half.acos();
        let direct = rotation_matrix(&RotationSpec {
            axis: n_axis,
            angle: theta,
        })
        .unwrap()
        .scale(C64::from_polar(1.0, PI / 4.0));
        assert!(direct.max_abs_diff(&thth) < 1e-12);

        let htht = hadamard().mul(&t_gate()).mul(&hadamard()).mul(&t_gate());
        let direct_m = rotation_matrix(&RotationSpec {
            axis: m_axis,
            angle: theta,
        })
        .unwrap()
        .scale(C64::from_polar(1.0, PI / 4.0));
        assert!(direct_m.max_abs_diff(&htht) < 1e-12);
    }

    #[test]
    fn abc_decompose_x_and_identity() {
        let dec = abc_decompose(&pauli_x()).unwrap();
        assert!(dec.reconstruct().max_abs_diff(&pauli_x()) < 1e-9);
        assert!(dec.abc_product().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-9);

        let dec = abc_decompose(&ComplexMatrix::identity(2)).unwrap();
        assert!(dec.reconstruct().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
        assert!(dec.abc_product().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn abc_decompose_haar_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let u = linalg::random_unitary(2, &mut rng);
            let dec = abc_decompose(&u).unwrap();
            assert!(dec.reconstruct().max_abs_diff(&u) < 1e-9);
            assert!(dec.abc_product().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-9);
        }
    }

    #[test]
    fn two_level_single_qubit_gives_one_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = linalg::random_unitary(2, &mut rng);
        let fs = two_level_decompose(&u, DEFAULT_TOL).unwrap();
        assert_eq!(fs.len(), 1);
        assert!(two_level_product(&fs, 2).max_abs_diff(&u) < 1e-12);
    }

    #[test]
    fn two_level_random_eight_by_eight() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = linalg::random_unitary(8, &mut rng);
        let fs = two_level_decompose(&u, DEFAULT_TOL).unwrap();
        assert!(fs.len() <= 28);
        assert!(two_level_product(&fs, 8).max_abs_diff(&u) < 1e-9);
    }

    #[test]
    fn two_level_diagonal_input_gives_diagonal_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let phases: Vec<C64> = (0..8)
            .map(|_| C64::from_polar(1.0, rand::Rng::gen_range(&mut rng, 0.0..2.0 * PI)))
            .collect();
        let u = ComplexMatrix::from_diag(&phases);
        let fs = two_level_decompose(&u, DEFAULT_TOL).unwrap();
        for f in &fs {
            assert!(f.block.get(0, 1).norm() < 1e-12);
            assert!(f.block.get(1, 0).norm() < 1e-12);
        }
        assert!(two_level_product(&fs, 8).max_abs_diff(&u) < 1e-9);
    }

    #[test]
    fn gray_code_template_for_extremal_pair() {
        // |000⟩ ↔ |111⟩: two routing controlled-Xs, the controlled block,
        // two inverse routing steps.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let block = linalg::random_unitary(2, &mut rng);
        let t = TwoLevelUnitary::new(8, 0, 7, block).unwrap();
        let circuit = gray_synthesize(&t, 3).unwrap();
        assert_eq!(circuit.ops().len(), 5);
        let u = circuits::unitary_of(&circuit).unwrap();
        assert!(u.max_abs_diff(&t.embed()) < 1e-9);
    }

    #[test]
    fn gray_code_adjacent_pair_has_single_gate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let block = linalg::random_unitary(2, &mut rng);
        let t = TwoLevelUnitary::new(8, 6, 7, block).unwrap();
        let circuit = gray_synthesize(&t, 3).unwrap();
        assert_eq!(circuit.ops().len(), 1);
        let u = circuits::unitary_of(&circuit).unwrap();
        assert!(u.max_abs_diff(&t.embed()) < 1e-9);
    }

    #[test]
    fn gray_code_random_pairs_match_simulator() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let i = rand::Rng::gen_range(&mut rng, 0..7usize);
            let j = rand::Rng::gen_range(&mut rng, i + 1..8usize);
            let block = linalg::random_unitary(2, &mut rng);
            let t = TwoLevelUnitary::new(8, i, j, block).unwrap();
            let circuit = gray_synthesize(&t, 3).unwrap();
            let u = circuits::unitary_of(&circuit).unwrap();
            assert!(u.max_abs_diff(&t.embed()) < 1e-9, "pair ({i},{j})");
        }
    }

    #[test]
    fn approximation_error_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = linalg::random_unitary(4, &mut rng);
        assert!(approximation_error(&u, &u).unwrap() < 1e-12);
        // σ_max(1 - X) = 2
        let e = approximation_error(&ComplexMatrix::identity(2), &pauli_x()).unwrap();
        assert!((e - 2.0).abs() < 1e-12);
    }

    #[test]
    fn approximation_error_subadditive_under_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let u1 = linalg::random_unitary(2, &mut rng);
            let u2 = linalg::random_unitary(2, &mut rng);
            let v1 = linalg::random_unitary(2, &mut rng);
            let v2 = linalg::random_unitary(2, &mut rng);
            let lhs = approximation_error(&u2.mul(&u1), &v2.mul(&v1)).unwrap();
            let rhs =
                approximation_error(&u1, &v1).unwrap() + approximation_error(&u2, &v2).unwrap();
            assert!(lhs <= rhs + 1e-10);
        }
    }

    #[test]
    fn projective_error_matches_grid_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let u = linalg::random_unitary(2, &mut rng);
            let v = linalg::random_unitary(2, &mut rng);
            let (err, phase) = approximation_error_up_to_phase(&u, &v).unwrap();
            let aligned = u.scale(C64::from_polar(1.0, phase));
            assert!((approximation_error(&aligned, &v).unwrap() - err).abs() < 1e-10);
            let mut grid_best = f64::INFINITY;
            for k in 0..2000 {
                let phi = 2.0 * PI * k as f64 / 2000.0;
                let shifted = u.scale(C64::from_polar(1.0, phi));
                grid_best = grid_best.min(approximation_error(&shifted, &v).unwrap());
            }
            // the closed form is never beaten by the grid, and the grid
            // approaches it to within its own step size
            assert!(err <= grid_best + 1e-9);
            assert!(grid_best <= err + 5e-3);
        }
    }

    #[test]
    fn ht_word_for_t_is_exact() {
        let word = ht_approximate(&t_gate(), 1e-9, 10).unwrap();
        assert_eq!(word.letters_string(), "T");
        assert!(word.error < 1e-12);
    }

    #[test]
    fn ht_approximates_z_rotation() {
        let target = rotation_matrix(&RotationSpec::z(0.3)).unwrap();
        let word = ht_approximate(&target, 0.15, 30).unwrap();
        assert!(word.error <= 0.15, "achieved {}", word.error);
        let aligned = word.value.scale(C64::from_polar(1.0, word.phase));
        assert!(approximation_error(&aligned, &target).unwrap() <= 0.15 + 1e-12);
        // word value matches its letters
        assert!(word_value(&word.letters).max_abs_diff(&word.value) < 1e-12);
    }
}
