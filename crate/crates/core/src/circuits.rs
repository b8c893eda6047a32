//! Circuit representation and simulation.
//!
//! Circuits are ordered lists of gate applications (with 0/1-polarity
//! controls), computational-basis measurements and classically-controlled
//! gates over `n` wires. Wire 0 is the top wire and the most significant bit
//! of the basis label. Alongside the simulators live the three measurement
//! formalisms (general operators, PVM via projectors, POVM), the Neumark
//! dilation and the QFT/Bell/Toffoli circuit builders.

use crate::error::{Error, Result};
use crate::gates::{self, Gate};
use crate::linalg::{ComplexMatrix, MatrixJson};
use crate::states::{DensityMatrix, StateVector};
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Quantum control on a wire with polarity 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Control {
    pub wire: usize,
    pub polarity: u8,
}

/// Classical condition: the last recorded measurement of `wire` equals `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalCondition {
    pub wire: usize,
    pub value: u8,
}

/// One circuit node.
#[derive(Debug, Clone)]
pub enum Op {
    Gate {
        gate: Gate,
        targets: Vec<usize>,
        controls: Vec<Control>,
    },
    Measure {
        wires: Vec<usize>,
    },
    ClassicallyControlled {
        gate: Gate,
        targets: Vec<usize>,
        condition: ClassicalCondition,
    },
}

/// Ordered list of operations over `n_qubits` wires.
#[derive(Debug, Clone)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<Op>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            ops: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    fn check_wires(&self, targets: &[usize], controls: &[Control]) -> Result<()> {
        let mut seen = vec![false; self.n_qubits];
        for &w in targets.iter().chain(controls.iter().map(|c| &c.wire)) {
            if w >= self.n_qubits {
                return Err(Error::WireOutOfRange {
                    wire: w,
                    n_qubits: self.n_qubits,
                });
            }
            if seen[w] {
                return Err(Error::DuplicateWire { wire: w });
            }
            seen[w] = true;
        }
        Ok(())
    }

    pub fn push_gate(&mut self, gate: Gate, targets: Vec<usize>) -> Result<&mut Self> {
        self.push_controlled(gate, targets, Vec::new())
    }

    pub fn push_controlled(
        &mut self,
        gate: Gate,
        targets: Vec<usize>,
        controls: Vec<Control>,
    ) -> Result<&mut Self> {
        if targets.len() != gate.arity {
            return Err(Error::DimensionMismatch(format!(
                "gate {} has arity {}, got {} targets",
                gate.name,
                gate.arity,
                targets.len()
            )));
        }
        if controls.iter().any(|c| c.polarity > 1) {
            return Err(Error::InvalidParameter("control polarity must be 0 or 1".into()));
        }
        self.check_wires(&targets, &controls)?;
        self.ops.push(Op::Gate {
            gate,
            targets,
            controls,
        });
        Ok(self)
    }

    pub fn push_measure(&mut self, wires: Vec<usize>) -> Result<&mut Self> {
        if wires.is_empty() {
            return Err(Error::InvalidParameter("measurement needs wires".into()));
        }
        self.check_wires(&wires, &[])?;
        self.ops.push(Op::Measure { wires });
        Ok(self)
    }

    pub fn push_classical(
        &mut self,
        gate: Gate,
        targets: Vec<usize>,
        condition: ClassicalCondition,
    ) -> Result<&mut Self> {
        if targets.len() != gate.arity {
            return Err(Error::DimensionMismatch(format!(
                "gate {} has arity {}, got {} targets",
                gate.name,
                gate.arity,
                targets.len()
            )));
        }
        if condition.value > 1 {
            return Err(Error::InvalidParameter("condition value must be 0 or 1".into()));
        }
        self.check_wires(&targets, &[])?;
        if condition.wire >= self.n_qubits {
            return Err(Error::WireOutOfRange {
                wire: condition.wire,
                n_qubits: self.n_qubits,
            });
        }
        self.ops.push(Op::ClassicallyControlled {
            gate,
            targets,
            condition,
        });
        Ok(self)
    }

    pub fn has_measurement(&self) -> bool {
        self.ops
            .iter()
            .any(|op| !matches!(op, Op::Gate { .. }))
    }
}

#[inline]
fn wire_bit(n: usize, wire: usize) -> usize {
    n - 1 - wire
}

/// Apply a (controlled) gate matrix to a state-vector buffer in place.
fn apply_gate(
    amps: &mut [C64],
    n: usize,
    gate: &ComplexMatrix,
    targets: &[usize],
    controls: &[Control],
) {
    let k = targets.len();
    let block = 1usize << k;
    let target_bits: Vec<usize> = targets.iter().map(|&w| wire_bit(n, w)).collect();
    let target_mask: usize = target_bits.iter().map(|&b| 1usize << b).sum();
    let ctrl_mask: usize = controls
        .iter()
        .map(|c| 1usize << wire_bit(n, c.wire))
        .sum();
    let ctrl_want: usize = controls
        .iter()
        .filter(|c| c.polarity == 1)
        .map(|c| 1usize << wire_bit(n, c.wire))
        .sum();

    let dim = 1usize << n;
    let mut sub = vec![C64::new(0.0, 0.0); block];
    for base in 0..dim {
        if base & target_mask != 0 {
            continue;
        }
        if base & ctrl_mask != ctrl_want {
            continue;
        }
        // gather the 2^k amplitudes of this block (gate index g has
        // targets[0] as its most significant bit)
        for g in 0..block {
            let mut idx = base;
            for (m, &b) in target_bits.iter().enumerate() {
                if g >> (k - 1 - m) & 1 == 1 {
                    idx |= 1 << b;
                }
            }
            sub[g] = amps[idx];
        }
        for (g_out, out_slot) in (0..block).map(|g| {
            let mut idx = base;
            for (m, &b) in target_bits.iter().enumerate() {
                if g >> (k - 1 - m) & 1 == 1 {
                    idx |= 1 << b;
                }
            }
            (g, idx)
        }) {
            let mut acc = C64::new(0.0, 0.0);
            for g_in in 0..block {
                acc += gate.get(g_out, g_in) * sub[g_in];
            }
            amps[out_slot] = acc;
        }
    }
}

/// Classical bit recorded by a measurement node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasuredBit {
    pub wire: usize,
    pub bit: u8,
}

/// Result of a sampled state-vector simulation.
#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub state: StateVector,
    pub record: Vec<MeasuredBit>,
}

fn last_bit(record: &[MeasuredBit], wire: usize) -> Option<u8> {
    record.iter().rev().find(|m| m.wire == wire).map(|m| m.bit)
}

/// Run a circuit on a pure input state, sampling measurements with the given
/// seed (inverse-CDF on the exact probability vector). Measured wires are
/// kept; their outcomes land in the classical record.
pub fn simulate(circuit: &Circuit, input: &StateVector, seed: u64) -> Result<SimOutcome> {
    let n = circuit.n_qubits;
    if input.dim() != 1 << n {
        return Err(Error::DimensionMismatch(format!(
            "input dimension {} does not match {n} qubits",
            input.dim()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amps = input.amplitudes().to_vec();
    let mut record = Vec::new();
    for op in &circuit.ops {
        match op {
            Op::Gate {
                gate,
                targets,
                controls,
            } => apply_gate(&mut amps, n, &gate.matrix, targets, controls),
            Op::ClassicallyControlled {
                gate,
                targets,
                condition,
            } => {
                let bit = last_bit(&record, condition.wire)
                    .ok_or(Error::UnmeasuredConditionWire {
                        wire: condition.wire,
                    })?;
                if bit == condition.value {
                    apply_gate(&mut amps, n, &gate.matrix, targets, &[]);
                }
            }
            Op::Measure { wires } => {
                let bits: Vec<usize> = wires.iter().map(|&w| wire_bit(n, w)).collect();
                let outcomes = 1usize << wires.len();
                let mut probs = vec![0.0f64; outcomes];
                for (idx, amp) in amps.iter().enumerate() {
                    let mut o = 0usize;
                    for (m, &b) in bits.iter().enumerate() {
                        o |= ((idx >> b) & 1) << (wires.len() - 1 - m);
                    }
                    probs[o] += amp.norm_sqr();
                }
                // inverse CDF
                let draw: f64 = rng.gen();
                let mut acc = 0.0;
                let mut chosen = outcomes - 1;
                for (o, &p) in probs.iter().enumerate() {
                    acc += p;
                    if draw < acc {
                        chosen = o;
                        break;
                    }
                }
                // collapse
                let mut norm_sq = 0.0;
                for (idx, amp) in amps.iter_mut().enumerate() {
                    let mut o = 0usize;
                    for (m, &b) in bits.iter().enumerate() {
                        o |= ((idx >> b) & 1) << (wires.len() - 1 - m);
                    }
                    if o == chosen {
                        norm_sq += amp.norm_sqr();
                    } else {
                        *amp = C64::new(0.0, 0.0);
                    }
                }
                let inv = C64::new(1.0 / norm_sq.sqrt(), 0.0);
                for amp in amps.iter_mut() {
                    *amp *= inv;
                }
                for (m, &w) in wires.iter().enumerate() {
                    record.push(MeasuredBit {
                        wire: w,
                        bit: ((chosen >> (wires.len() - 1 - m)) & 1) as u8,
                    });
                }
            }
        }
    }
    Ok(SimOutcome {
        state: StateVector::new(vec![2; n], amps)?,
        record,
    })
}

/// Result of a density-matrix simulation: no sampling, measurement nodes
/// dephase the state and report their outcome distribution.
#[derive(Debug, Clone)]
pub struct DensitySimOutcome {
    pub state: DensityMatrix,
    /// One probability vector per measurement node, in circuit order.
    pub distributions: Vec<Vec<f64>>,
}

/// Run a circuit on a density matrix. Measurement nodes apply the projective
/// dephasing `ρ → Σ_o P_o ρ P_o` and record the outcome distribution;
/// classically-controlled gates become quantum-controlled on the (already
/// measured, hence dephased) condition wire.
pub fn simulate_density(circuit: &Circuit, input: &DensityMatrix) -> Result<DensitySimOutcome> {
    let n = circuit.n_qubits;
    if input.dim() != 1 << n {
        return Err(Error::DimensionMismatch(format!(
            "input dimension {} does not match {n} qubits",
            input.dim()
        )));
    }
    let dim = 1usize << n;
    let mut rho = input.matrix().clone();
    let mut distributions = Vec::new();
    let mut measured = vec![false; n];
    let apply_conjugation = |rho: &ComplexMatrix, gate: &ComplexMatrix, targets: &[usize], controls: &[Control]| {
        // Build the full-space operator column by column and conjugate.
        let mut full = ComplexMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut e = vec![C64::new(0.0, 0.0); dim];
            e[col] = C64::new(1.0, 0.0);
            apply_gate(&mut e, n, gate, targets, controls);
            for (row, v) in e.into_iter().enumerate() {
                full.set(row, col, v);
            }
        }
        (&(&full * rho) * &full.adjoint(), full)
    };
    for op in &circuit.ops {
        match op {
            Op::Gate {
                gate,
                targets,
                controls,
            } => {
                rho = apply_conjugation(&rho, &gate.matrix, targets, controls).0;
            }
            Op::ClassicallyControlled {
                gate,
                targets,
                condition,
            } => {
                if !measured[condition.wire] {
                    return Err(Error::UnmeasuredConditionWire {
                        wire: condition.wire,
                    });
                }
                // Measurements commute with controls: after the dephasing,
                // conditioning on the record equals a quantum control.
                let controls = vec![Control {
                    wire: condition.wire,
                    polarity: condition.value,
                }];
                rho = apply_conjugation(&rho, &gate.matrix, targets, &controls).0;
            }
            Op::Measure { wires } => {
                let bits: Vec<usize> = wires.iter().map(|&w| wire_bit(n, w)).collect();
                let outcomes = 1usize << wires.len();
                let outcome_of = |idx: usize| {
                    let mut o = 0usize;
                    for (m, &b) in bits.iter().enumerate() {
                        o |= ((idx >> b) & 1) << (wires.len() - 1 - m);
                    }
                    o
                };
                let mut probs = vec![0.0f64; outcomes];
                for idx in 0..dim {
                    probs[outcome_of(idx)] += rho.get(idx, idx).re;
                }
                // dephase: zero every coherence between different outcomes
                let mut next = ComplexMatrix::zeros(dim, dim);
                for r in 0..dim {
                    for ccol in 0..dim {
                        if outcome_of(r) == outcome_of(ccol) {
                            next.set(r, ccol, rho.get(r, ccol));
                        }
                    }
                }
                rho = next;
                distributions.push(probs);
                for &w in wires {
                    measured[w] = true;
                }
            }
        }
    }
    Ok(DensitySimOutcome {
        state: DensityMatrix::new(vec![2; n], rho, 1e-6)?,
        distributions,
    })
}

/// Full unitary of a measurement-free circuit, wire 0 most significant.
pub fn unitary_of(circuit: &Circuit) -> Result<ComplexMatrix> {
    if circuit.has_measurement() {
        return Err(Error::MeasurementInCircuit);
    }
    let n = circuit.n_qubits;
    let dim = 1usize << n;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut e = vec![C64::new(0.0, 0.0); dim];
        e[col] = C64::new(1.0, 0.0);
        for op in &circuit.ops {
            if let Op::Gate {
                gate,
                targets,
                controls,
            } = op
            {
                apply_gate(&mut e, n, &gate.matrix, targets, controls);
            }
        }
        for (row, v) in e.into_iter().enumerate() {
            out.set(row, col, v);
        }
    }
    Ok(out)
}

/// General measurement: operators {M_m} with `Σ M†M = 1`.
#[derive(Debug, Clone)]
pub struct GeneralMeasurement {
    operators: Vec<ComplexMatrix>,
}

impl GeneralMeasurement {
    pub fn new(operators: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidParameter("no measurement operators".into()));
        }
        let d = operators[0].rows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for m in &operators {
            if m.rows() != d || m.cols() != d {
                return Err(Error::DimensionMismatch(
                    "measurement operators must share a square shape".into(),
                ));
            }
            sum = sum.add(&m.adjoint().mul(m));
        }
        let residual = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if !(residual < tol) {
            return Err(Error::IncompleteMeasurement { residual });
        }
        Ok(Self { operators })
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// Projective measurement from a complete orthogonal projector set.
    pub fn projective(projectors: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        for p in &projectors {
            let residual = p.projector_residual();
            if !(residual < tol) {
                return Err(Error::InvalidParameter(format!(
                    "not a projector (residual {residual:.3e})"
                )));
            }
        }
        Self::new(projectors, tol)
    }
}

/// POVM: positive elements {E_m} with `Σ E_m = 1`.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidParameter("no POVM elements".into()));
        }
        let d = elements[0].rows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for e in &elements {
            let residual = e.psd_residual();
            if !(residual < tol) {
                return Err(Error::NotPositiveSemidefinite {
                    min_eigenvalue: -residual,
                });
            }
            sum = sum.add(e);
        }
        let residual = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if !(residual < tol) {
            return Err(Error::IncompleteMeasurement { residual });
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// One branch of a general measurement.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome<S> {
    pub index: usize,
    pub probability: f64,
    /// Post-measurement state; absent when the branch has probability ~0.
    pub post_state: Option<S>,
}

/// All branches of a general measurement on a density matrix:
/// `p(m) = Tr(M†Mρ)`, post state `MρM†/p`.
pub fn measure_general(
    rho: &DensityMatrix,
    meas: &GeneralMeasurement,
) -> Result<Vec<MeasurementOutcome<DensityMatrix>>> {
    let mut out = Vec::with_capacity(meas.operators.len());
    for (index, m) in meas.operators.iter().enumerate() {
        if m.rows() != rho.dim() {
            return Err(Error::DimensionMismatch(
                "measurement operator does not match state dimension".into(),
            ));
        }
        let transformed = &(m * rho.matrix()) * &m.adjoint();
        let probability = transformed.trace().re;
        let post_state = if probability > 1e-12 {
            Some(DensityMatrix::new(
                rho.dims().to_vec(),
                transformed.scale_re(1.0 / probability),
                1e-6,
            )?)
        } else {
            None
        };
        out.push(MeasurementOutcome {
            index,
            probability: probability.max(0.0),
            post_state,
        });
    }
    Ok(out)
}

/// All branches of a general measurement on a pure state:
/// `p(m) = ⟨ψ|M†M|ψ⟩`, post state `M|ψ⟩/√p`.
pub fn measure_general_pure(
    psi: &StateVector,
    meas: &GeneralMeasurement,
) -> Result<Vec<MeasurementOutcome<StateVector>>> {
    let mut out = Vec::with_capacity(meas.operators.len());
    for (index, m) in meas.operators.iter().enumerate() {
        if m.rows() != psi.dim() {
            return Err(Error::DimensionMismatch(
                "measurement operator does not match state dimension".into(),
            ));
        }
        let transformed = m.mul_vec(psi.amplitudes());
        let probability: f64 = transformed.iter().map(|z| z.norm_sqr()).sum();
        let post_state = if probability > 1e-12 {
            Some(StateVector::from_unnormalized(
                psi.dims().to_vec(),
                transformed,
            )?)
        } else {
            None
        };
        out.push(MeasurementOutcome {
            index,
            probability,
            post_state,
        });
    }
    Ok(out)
}

/// `p(m) = Tr(E_m ρ)` for every POVM element.
pub fn povm_probabilities(rho: &DensityMatrix, povm: &Povm) -> Result<Vec<f64>> {
    if povm.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(
            "POVM does not match state dimension".into(),
        ));
    }
    Ok(povm
        .elements
        .iter()
        .map(|e| e.mul(rho.matrix()).trace().re.max(0.0))
        .collect())
}

/// Neumark dilation of a POVM: a projective measurement on system⊗ancilla
/// reproducing the POVM statistics, built from `M_m = √E_m` and the isometry
/// `V|ψ⟩ = Σ_m (M_m|ψ⟩)|m⟩` completed to a unitary.
#[derive(Debug, Clone)]
pub struct NeumarkDilation {
    /// Isometry `d·m × d` with `V†V = 1`.
    pub isometry: ComplexMatrix,
    /// Unitary on the extended space with `U(|ψ⟩⊗|0⟩) = V|ψ⟩`.
    pub unitary: ComplexMatrix,
    /// Projectors `1 ⊗ |m⟩⟨m|` on the extended space.
    pub projectors: Vec<ComplexMatrix>,
    pub system_dim: usize,
    pub ancilla_dim: usize,
}

impl NeumarkDilation {
    /// Probabilities of the dilated projective measurement on `ρ ⊗ |0⟩⟨0|`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.system_dim {
            return Err(Error::DimensionMismatch(
                "state does not match dilation system".into(),
            ));
        }
        let mut anc = ComplexMatrix::zeros(self.ancilla_dim, self.ancilla_dim);
        anc.set(0, 0, C64::new(1.0, 0.0));
        let joint = crate::linalg::kron(rho.matrix(), &anc);
        let evolved = &(&self.unitary * &joint) * &self.unitary.adjoint();
        Ok(self
            .projectors
            .iter()
            .map(|p| p.mul(&evolved).trace().re.max(0.0))
            .collect())
    }
}

pub fn neumark_dilate(povm: &Povm, tol: f64) -> Result<NeumarkDilation> {
    let d = povm.dim();
    let m_count = povm.len();
    let sqrt_elements: Vec<ComplexMatrix> = povm
        .elements
        .iter()
        .map(|e| crate::linalg::matrix_sqrt_psd(e, tol))
        .collect::<Result<_>>()?;
    // isometry columns: V|s⟩ = Σ_m (M_m|s⟩) ⊗ |m⟩
    let mut columns = Vec::with_capacity(d);
    for s in 0..d {
        let mut col = vec![C64::new(0.0, 0.0); d * m_count];
        for (m, sq) in sqrt_elements.iter().enumerate() {
            for a in 0..d {
                col[a * m_count + m] = sq.get(a, s);
            }
        }
        columns.push(col);
    }
    let isometry = ComplexMatrix::from_fn(d * m_count, d, |i, j| columns[j][i]);
    // complete to a unitary whose column s·m_count carries V|s⟩
    let positions: Vec<usize> = (0..d).map(|s| s * m_count).collect();
    let unitary = crate::linalg::unitary_with_prescribed_columns(d * m_count, &positions, &columns)?;
    let projectors = (0..m_count)
        .map(|m| {
            let mut anc = ComplexMatrix::zeros(m_count, m_count);
            anc.set(m, m, C64::new(1.0, 0.0));
            crate::linalg::kron(&ComplexMatrix::identity(d), &anc)
        })
        .collect();
    Ok(NeumarkDilation {
        isometry,
        unitary,
        projectors,
        system_dim: d,
        ancilla_dim: m_count,
    })
}

/// QFT circuit per the textbook layout: per-wire Hadamard plus controlled
/// phase gates `R_k = P(2π/2^k)`, followed by the wire-reversing swaps.
pub fn qft_circuit(n: usize) -> Result<Circuit> {
    let mut circuit = Circuit::new(n);
    for q in 0..n {
        circuit.push_gate(gates::standard_gate("H")?, vec![q])?;
        for k in 2..=(n - q) {
            let phi = 2.0 * PI / (1u64 << k) as f64;
            circuit.push_controlled(
                gates::standard_gate(&format!("P({phi})"))?,
                vec![q],
                vec![Control {
                    wire: q + k - 1,
                    polarity: 1,
                }],
            )?;
        }
    }
    for k in 0..n / 2 {
        circuit.push_gate(gates::standard_gate("SWAP")?, vec![k, n - 1 - k])?;
    }
    Ok(circuit)
}

/// `F[k][j] = e^{i2πjk/N}/√N`.
pub fn qft_matrix(n: usize) -> ComplexMatrix {
    let dim = 1usize << n;
    let scale = 1.0 / (dim as f64).sqrt();
    ComplexMatrix::from_fn(dim, dim, |k, j| {
        C64::from_polar(scale, 2.0 * PI * (j as f64) * (k as f64) / dim as f64)
    })
}

/// Gate count of the QFT circuit with each H, controlled-R and SWAP counted
/// as one gate: `n(n+2)/2` in integer arithmetic.
pub fn qft_gate_count(n: usize) -> usize {
    n * (n + 2) / 2
}

/// Gate count with each SWAP expanded into 3 CNOTs.
pub fn qft_gate_count_expanded(n: usize) -> usize {
    qft_gate_count(n) + 2 * (n / 2)
}

/// H then CNOT: maps |00⟩ to the first Bell state.
pub fn bell_circuit() -> Result<Circuit> {
    let mut c = Circuit::new(2);
    c.push_gate(gates::standard_gate("H")?, vec![0])?;
    c.push_gate(gates::standard_gate("CNOT")?, vec![0, 1])?;
    Ok(c)
}

/// Toffoli as Hadamard, phase, T and CNOT gates.
pub fn toffoli_decomposition_circuit() -> Result<Circuit> {
    let mut c = Circuit::new(3);
    let h = || gates::standard_gate("H");
    let t = || gates::standard_gate("T");
    let tdg = || gates::standard_gate(&format!("P({})", -PI / 4.0));
    let s = || gates::standard_gate("S");
    let cx = || gates::standard_gate("CNOT");
    c.push_gate(h()?, vec![2])?;
    c.push_gate(cx()?, vec![1, 2])?;
    c.push_gate(tdg()?, vec![2])?;
    c.push_gate(cx()?, vec![0, 2])?;
    c.push_gate(t()?, vec![2])?;
    c.push_gate(cx()?, vec![1, 2])?;
    c.push_gate(tdg()?, vec![2])?;
    c.push_gate(cx()?, vec![0, 2])?;
    c.push_gate(tdg()?, vec![1])?;
    c.push_gate(t()?, vec![2])?;
    c.push_gate(cx()?, vec![0, 1])?;
    c.push_gate(h()?, vec![2])?;
    c.push_gate(tdg()?, vec![1])?;
    c.push_gate(cx()?, vec![0, 1])?;
    c.push_gate(t()?, vec![0])?;
    c.push_gate(s()?, vec![1])?;
    Ok(c)
}

/// `C^n(U)` from Toffolis and `n-1` working qubits returned to |0⟩.
///
/// Wire layout: controls `0..n`, working `n..2n-1`, target `2n-1`.
pub fn cn_u_circuit(n_controls: usize, u: &ComplexMatrix) -> Result<Circuit> {
    if n_controls < 2 {
        return Err(Error::InvalidParameter(
            "ancilla construction needs at least two controls".into(),
        ));
    }
    let total = 2 * n_controls;
    let mut c = Circuit::new(total);
    let toffoli = gates::standard_gate("TOFFOLI")?;
    let mut ups = Vec::new();
    c.push_gate(toffoli.clone(), vec![0, 1, n_controls])?;
    ups.push(vec![0, 1, n_controls]);
    for k in 2..n_controls {
        let targets = vec![k, n_controls + k - 2, n_controls + k - 1];
        c.push_gate(toffoli.clone(), targets.clone())?;
        ups.push(targets);
    }
    c.push_controlled(
        Gate::new("CU", 1, u.clone())?,
        vec![total - 1],
        vec![Control {
            wire: 2 * n_controls - 2,
            polarity: 1,
        }],
    )?;
    for targets in ups.into_iter().rev() {
        c.push_gate(toffoli.clone(), targets)?;
    }
    Ok(c)
}

/// JSON form of a circuit operation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OpJson {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub controls: Option<Vec<Control>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wires: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<ClassicalCondition>,
    /// Matrix payload for gates not in the name catalog (name "CU").
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixJson>,
}

/// JSON form of a circuit: `{"n":3,"ops":[...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircuitJson {
    pub n: usize,
    pub ops: Vec<OpJson>,
}

fn gate_from_json(op: &OpJson) -> Result<Gate> {
    let name = op
        .name
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("gate op is missing a name".into()))?;
    if let Some(mj) = &op.matrix {
        let m = mj.to_matrix()?;
        let arity = (m.rows() as f64).log2().round() as usize;
        return Gate::new(name, arity, m);
    }
    gates::standard_gate(name)
}

impl CircuitJson {
    pub fn from_circuit(c: &Circuit) -> Self {
        let ops = c
            .ops
            .iter()
            .map(|op| match op {
                Op::Gate {
                    gate,
                    targets,
                    controls,
                } => OpJson {
                    kind: "gate".into(),
                    name: Some(gate.name.clone()),
                    targets: Some(targets.clone()),
                    controls: if controls.is_empty() {
                        None
                    } else {
                        Some(controls.clone())
                    },
                    wires: None,
                    condition: None,
                    matrix: if gates::standard_gate(&gate.name).is_ok() {
                        None
                    } else {
                        Some(MatrixJson::from_matrix(&gate.matrix))
                    },
                },
                Op::Measure { wires } => OpJson {
                    kind: "measure".into(),
                    name: None,
                    targets: None,
                    controls: None,
                    wires: Some(wires.clone()),
                    condition: None,
                    matrix: None,
                },
                Op::ClassicallyControlled {
                    gate,
                    targets,
                    condition,
                } => OpJson {
                    kind: "cgate".into(),
                    name: Some(gate.name.clone()),
                    targets: Some(targets.clone()),
                    controls: None,
                    wires: None,
                    condition: Some(*condition),
                    matrix: if gates::standard_gate(&gate.name).is_ok() {
                        None
                    } else {
                        Some(MatrixJson::from_matrix(&gate.matrix))
                    },
                },
            })
            .collect();
        Self { n: c.n_qubits, ops }
    }

    pub fn to_circuit(&self) -> Result<Circuit> {
        let mut c = Circuit::new(self.n);
        for op in &self.ops {
            match op.kind.as_str() {
                "gate" => {
                    let gate = gate_from_json(op)?;
                    let targets = op.targets.clone().unwrap_or_default();
                    let controls = op.controls.clone().unwrap_or_default();
                    c.push_controlled(gate, targets, controls)?;
                }
                "measure" => {
                    c.push_measure(op.wires.clone().unwrap_or_default())?;
                }
                "cgate" => {
                    let gate = gate_from_json(op)?;
                    let targets = op.targets.clone().unwrap_or_default();
                    let condition = op.condition.ok_or_else(|| {
                        Error::InvalidParameter("cgate op needs a condition".into())
                    })?;
                    c.push_classical(gate, targets, condition)?;
                }
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown op kind \"{other}\""
                    )))
                }
            }
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::states;
    use crate::DEFAULT_TOL;

    fn c64(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn empty_circuit_is_identity() {
        let c = Circuit::new(2);
        assert!(unitary_of(&c).unwrap().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn single_cnot_matches_matrix() {
        let mut c = Circuit::new(2);
        c.push_gate(gates::standard_gate("CNOT").unwrap(), vec![0, 1])
            .unwrap();
        assert!(unitary_of(&c).unwrap().max_abs_diff(&gates::cnot()) < 1e-15);
        // X on target controlled by wire 0 is the same circuit
        let mut c2 = Circuit::new(2);
        c2.push_controlled(
            gates::standard_gate("X").unwrap(),
            vec![1],
            vec![Control {
                wire: 0,
                polarity: 1,
            }],
        )
        .unwrap();
        assert!(unitary_of(&c2).unwrap().max_abs_diff(&gates::cnot()) < 1e-15);
    }

    #[test]
    fn swap_as_three_cnots() {
        let mut c = Circuit::new(2);
        let cx = gates::standard_gate("CNOT").unwrap();
        c.push_gate(cx.clone(), vec![0, 1]).unwrap();
        c.push_gate(cx.clone(), vec![1, 0]).unwrap();
        c.push_gate(cx, vec![0, 1]).unwrap();
        assert!(unitary_of(&c).unwrap().max_abs_diff(&gates::swap()) < 1e-15);
    }

    #[test]
    fn cnot_and_toffoli_are_involutions() {
        let cx = gates::cnot();
        assert_eq!(cx.mul(&cx), ComplexMatrix::identity(4));
        let tof = gates::toffoli();
        assert_eq!(tof.mul(&tof), ComplexMatrix::identity(8));
    }

    #[test]
    fn hadamard_conjugation_reverses_cnot_control() {
        // (H⊗H)·CNOT·(H⊗H) = CNOT with control on the second qubit
        let h2 = linalg::kron(&gates::hadamard(), &gates::hadamard());
        let conj = &(&h2 * &gates::cnot()) * &h2;
        let mut reversed = Circuit::new(2);
        reversed
            .push_controlled(
                gates::standard_gate("X").unwrap(),
                vec![0],
                vec![Control {
                    wire: 1,
                    polarity: 1,
                }],
            )
            .unwrap();
        let want = unitary_of(&reversed).unwrap();
        assert!(conj.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn bell_circuit_and_inverse() {
        let circuit = bell_circuit().unwrap();
        let input = StateVector::basis(vec![2, 2], 0);
        let out = simulate(&circuit, &input, 0).unwrap();
        let inv = 1.0 / 2.0_f64.sqrt();
        let phi_plus = StateVector::new(
            vec![2, 2],
            vec![c64(inv, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(inv, 0.0)],
        )
        .unwrap();
        assert!((out.state.overlap(&phi_plus) - 1.0).abs() < 1e-12);

        // inverse circuit runs the gates in reverse order (both self-inverse)
        let mut inverse = Circuit::new(2);
        inverse
            .push_gate(gates::standard_gate("CNOT").unwrap(), vec![0, 1])
            .unwrap();
        inverse
            .push_gate(gates::standard_gate("H").unwrap(), vec![0])
            .unwrap();
        let back = simulate(&inverse, &phi_plus, 0).unwrap();
        assert!((back.state.overlap(&StateVector::basis(vec![2, 2], 0)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measurement_collapses_single_qubit() {
        // |ψ⟩ = a|0⟩ + b|1⟩: p(0) = |a|², post-state |0⟩ up to phase.
        let a = 0.6;
        let b = 0.8;
        let psi = StateVector::new(vec![2], vec![c64(a, 0.0), c64(0.0, b)]).unwrap();
        let mut circuit = Circuit::new(1);
        circuit.push_measure(vec![0]).unwrap();
        let mut seen = [0usize; 2];
        for seed in 0..600 {
            let out = simulate(&circuit, &psi, seed).unwrap();
            let bit = out.record[0].bit;
            seen[bit as usize] += 1;
            let expect = StateVector::basis(vec![2], bit as usize);
            assert!((out.state.overlap(&expect) - 1.0).abs() < 1e-12);
        }
        let freq0 = seen[0] as f64 / 600.0;
        assert!((freq0 - a * a).abs() < 0.06, "frequency {freq0}");
    }

    #[test]
    fn density_simulation_matches_unitary_conjugation() {
        let mut circuit = Circuit::new(2);
        circuit
            .push_gate(gates::standard_gate("H").unwrap(), vec![0])
            .unwrap();
        circuit
            .push_controlled(
                gates::standard_gate("X").unwrap(),
                vec![1],
                vec![Control {
                    wire: 0,
                    polarity: 1,
                }],
            )
            .unwrap();
        let rho = states::random_density(vec![2, 2], 3);
        let u = unitary_of(&circuit).unwrap();
        let direct = &(&u * rho.matrix()) * &u.adjoint();
        let sim = simulate_density(&circuit, &rho).unwrap();
        assert!(sim.state.matrix().max_abs_diff(&direct) < 1e-10);
    }

    #[test]
    fn density_simulation_reports_measurement_distributions() {
        // measuring wire 0 of a Bell state: uniform outcomes, coherences gone
        let mut circuit = Circuit::new(2);
        circuit
            .push_gate(gates::standard_gate("H").unwrap(), vec![0])
            .unwrap();
        circuit
            .push_gate(gates::standard_gate("CNOT").unwrap(), vec![0, 1])
            .unwrap();
        circuit.push_measure(vec![0]).unwrap();
        let input = StateVector::basis(vec![2, 2], 0).to_density();
        let out = simulate_density(&circuit, &input).unwrap();
        assert_eq!(out.distributions.len(), 1);
        assert!((out.distributions[0][0] - 0.5).abs() < 1e-12);
        assert!((out.distributions[0][1] - 0.5).abs() < 1e-12);
        // the dephased state is the classically correlated mixture
        let mut want = ComplexMatrix::zeros(4, 4);
        want.set(0, 0, c64(0.5, 0.0));
        want.set(3, 3, c64(0.5, 0.0));
        assert!(out.state.matrix().max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn measurements_commute_with_controls() {
        // controlled-U then measure control ≡ measure control then apply U
        // conditioned on the record, for every seed.
        let u = linalg::random_unitary(2, &mut rand_chacha::ChaCha8Rng::seed_from_u64(5));
        let gate = Gate::new("CU", 1, u).unwrap();
        let mut quantum = Circuit::new(2);
        quantum
            .push_controlled(
                gate.clone(),
                vec![1],
                vec![Control {
                    wire: 0,
                    polarity: 1,
                }],
            )
            .unwrap();
        quantum.push_measure(vec![0]).unwrap();

        let mut classical = Circuit::new(2);
        classical.push_measure(vec![0]).unwrap();
        classical
            .push_classical(
                gate,
                vec![1],
                ClassicalCondition { wire: 0, value: 1 },
            )
            .unwrap();

        let psi = states::random_pure(vec![2, 2], 8);
        for seed in 0..50 {
            let a = simulate(&quantum, &psi, seed).unwrap();
            let b = simulate(&classical, &psi, seed).unwrap();
            assert_eq!(a.record, b.record);
            assert!((a.state.overlap(&b.state) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn pvm_on_plus_state_is_uniform() {
        let ket0 = [c64(1.0, 0.0), c64(0.0, 0.0)];
        let ket1 = [c64(0.0, 0.0), c64(1.0, 0.0)];
        let meas = GeneralMeasurement::projective(
            vec![
                ComplexMatrix::outer(&ket0, &ket0),
                ComplexMatrix::outer(&ket1, &ket1),
            ],
            DEFAULT_TOL,
        )
        .unwrap();
        let plus = StateVector::from_unnormalized(vec![2], vec![c64(1.0, 0.0), c64(1.0, 0.0)])
            .unwrap();
        let outcomes = measure_general_pure(&plus, &meas).unwrap();
        assert!((outcomes[0].probability - 0.5).abs() < 1e-12);
        assert!((outcomes[1].probability - 0.5).abs() < 1e-12);
        let total: f64 = outcomes.iter().map(|o| o.probability).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn povm_probabilities_match_direct_traces() {
        let ket0 = [c64(1.0, 0.0), c64(0.0, 0.0)];
        let ket1 = [c64(0.0, 0.0), c64(1.0, 0.0)];
        let povm = Povm::new(
            vec![
                ComplexMatrix::outer(&ket0, &ket0),
                ComplexMatrix::outer(&ket1, &ket1),
            ],
            DEFAULT_TOL,
        )
        .unwrap();
        let rho = DensityMatrix::new(
            vec![2],
            ComplexMatrix::from_real_rows(&[&[0.75, 0.0], &[0.0, 0.25]]),
            DEFAULT_TOL,
        )
        .unwrap();
        let p = povm_probabilities(&rho, &povm).unwrap();
        assert!((p[0] - 0.75).abs() < 1e-12);
        assert!((p[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn sigma_z_observable_projectors() {
        // outcome m=+1 ↔ |0⟩⟨0|, m=-1 ↔ |1⟩⟨1| via the spectral projectors
        let eig = linalg::hermitian_eig(&gates::pauli_z(), DEFAULT_TOL).unwrap();
        // ascending eigenvalues: first is -1 (|1⟩), second +1 (|0⟩)
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-12);
        let v_minus = eig.eigenvector(0);
        let v_plus = eig.eigenvector(1);
        let p_minus = ComplexMatrix::outer(&v_minus, &v_minus);
        let p_plus = ComplexMatrix::outer(&v_plus, &v_plus);
        let ket0 = [c64(1.0, 0.0), c64(0.0, 0.0)];
        let ket1 = [c64(0.0, 0.0), c64(1.0, 0.0)];
        assert!(p_plus.max_abs_diff(&ComplexMatrix::outer(&ket0, &ket0)) < 1e-12);
        assert!(p_minus.max_abs_diff(&ComplexMatrix::outer(&ket1, &ket1)) < 1e-12);
    }

    #[test]
    fn completeness_forces_unit_total_probability() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        for trial in 0..30 {
            let d = 3;
            // random general measurement from a Haar unitary on a dilated
            // space: M_m = ⟨m|U|0⟩ blocks are automatically complete
            let m_count = 3;
            let u = linalg::random_unitary(d * m_count, &mut rng);
            let mut ops = Vec::new();
            for m in 0..m_count {
                ops.push(ComplexMatrix::from_fn(d, d, |a, s| {
                    u.get(a * m_count + m, s * m_count)
                }));
            }
            let meas = GeneralMeasurement::new(ops, 1e-8).unwrap();
            let rho = states::random_density_with(vec![3], &mut rng);
            let outcomes = measure_general(&rho, &meas).unwrap();
            let total: f64 = outcomes.iter().map(|o| o.probability).sum();
            assert!((total - 1.0).abs() < 1e-10, "trial {trial}: total {total}");
        }
    }

    #[test]
    fn incomplete_measurement_rejected() {
        let ket0 = [c64(1.0, 0.0), c64(0.0, 0.0)];
        let only = vec![ComplexMatrix::outer(&ket0, &ket0)];
        assert!(matches!(
            GeneralMeasurement::new(only, DEFAULT_TOL),
            Err(Error::IncompleteMeasurement { .. })
        ));
    }

    #[test]
    fn neumark_reproduces_projective_povm() {
        let ket0 = [c64(1.0, 0.0), c64(0.0, 0.0)];
        let ket1 = [c64(0.0, 0.0), c64(1.0, 0.0)];
        let povm = Povm::new(
            vec![
                ComplexMatrix::outer(&ket0, &ket0),
                ComplexMatrix::outer(&ket1, &ket1),
            ],
            DEFAULT_TOL,
        )
        .unwrap();
        let dilation = neumark_dilate(&povm, DEFAULT_TOL).unwrap();
        for seed in 0..5 {
            let rho = states::random_density(vec![2], seed);
            let direct = povm_probabilities(&rho, &povm).unwrap();
            let dilated = dilation.probabilities(&rho).unwrap();
            for (a, b) in direct.iter().zip(&dilated) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn neumark_reproduces_trine_povm() {
        // E_k = (2/3)|e_k⟩⟨e_k| at angles 2πk/3
        let elements: Vec<ComplexMatrix> = (0..3)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 3.0;
                let e = [c64(t.cos(), 0.0), c64(t.sin(), 0.0)];
                ComplexMatrix::outer(&e, &e).scale_re(2.0 / 3.0)
            })
            .collect();
        let povm = Povm::new(elements, DEFAULT_TOL).unwrap();
        let dilation = neumark_dilate(&povm, DEFAULT_TOL).unwrap();
        // isometry check
        let vtv = dilation.isometry.adjoint().mul(&dilation.isometry);
        assert!(vtv.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-10);
        assert!(dilation.unitary.unitarity_residual() < 1e-10);
        for seed in 0..5 {
            let rho = states::random_density(vec![2], seed + 10);
            let direct = povm_probabilities(&rho, &povm).unwrap();
            let dilated = dilation.probabilities(&rho).unwrap();
            for (a, b) in direct.iter().zip(&dilated) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn qft_single_qubit_is_hadamard() {
        let c = qft_circuit(1).unwrap();
        assert_eq!(c.ops().len(), 1);
        assert!(unitary_of(&c).unwrap().max_abs_diff(&gates::hadamard()) < 1e-12);
        assert!(qft_matrix(1).max_abs_diff(&gates::hadamard()) < 1e-12);
    }

    #[test]
    fn qft_circuit_matches_matrix_and_count() {
        for n in 1..=6 {
            let c = qft_circuit(n).unwrap();
            let u = unitary_of(&c).unwrap();
            assert!(
                u.max_abs_diff(&qft_matrix(n)) < 1e-9,
                "n={n}: {}",
                u.max_abs_diff(&qft_matrix(n))
            );
            assert_eq!(c.ops().len(), qft_gate_count(n), "n={n}");
            assert_eq!(
                qft_gate_count_expanded(n),
                c.ops().len() + 2 * (n / 2)
            );
        }
    }

    #[test]
    fn qft_of_six_has_textbook_amplitudes() {
        // j = 6 = binary 110 on three qubits
        let n = 3;
        let u = unitary_of(&qft_circuit(n).unwrap()).unwrap();
        let inv = 1.0 / 8.0_f64.sqrt();
        for k in 0..8 {
            let want = C64::from_polar(inv, 2.0 * PI * 6.0 * k as f64 / 8.0);
            assert!((u.get(k, 6) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn qft_is_unitary_up_to_six_qubits() {
        for n in 1..=6 {
            let f = qft_matrix(n);
            assert!(f.unitarity_residual() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn toffoli_decomposition_is_exact() {
        let circuit = toffoli_decomposition_circuit().unwrap();
        let u = unitary_of(&circuit).unwrap();
        assert!(u.max_abs_diff(&gates::toffoli()) < 1e-12);
    }

    #[test]
    fn cn_u_ancilla_construction() {
        // n=3 controls: U applied iff all controls set, ancillas returned to 0.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let u = linalg::random_unitary(2, &mut rng);
        let circuit = cn_u_circuit(3, &u).unwrap();
        assert_eq!(circuit.n_qubits(), 6);
        let full = unitary_of(&circuit).unwrap();
        // check on the ancilla = |00⟩ sector: basis index (c0 c1 c2 0 0 t)
        for c0 in 0..2usize {
            for c1 in 0..2usize {
                for c2 in 0..2usize {
                    for t in 0..2usize {
                        let col = (((c0 * 2 + c1) * 2 + c2) * 4) * 2 + t;
                        for row in 0..64 {
                            let got = full.get(row, col);
                            // expected: same controls and ancilla, target hit
                            // by U iff c0c1c2 = 111
                            let all = c0 == 1 && c1 == 1 && c2 == 1;
                            let want = if all {
                                let base = (((c0 * 2 + c1) * 2 + c2) * 4) * 2;
                                if row == base {
                                    u.get(0, t)
                                } else if row == base + 1 {
                                    u.get(1, t)
                                } else {
                                    c64(0.0, 0.0)
                                }
                            } else if row == col {
                                c64(1.0, 0.0)
                            } else {
                                c64(0.0, 0.0)
                            };
                            assert!(
                                (got - want).norm() < 1e-10,
                                "entry ({row},{col}): {got} vs {want}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn circuit_json_round_trip() {
        let mut c = Circuit::new(3);
        c.push_gate(gates::standard_gate("H").unwrap(), vec![0])
            .unwrap();
        c.push_controlled(
            gates::standard_gate("X").unwrap(),
            vec![2],
            vec![Control {
                wire: 0,
                polarity: 1,
            }],
        )
        .unwrap();
        c.push_measure(vec![0]).unwrap();
        c.push_classical(
            gates::standard_gate("Z").unwrap(),
            vec![1],
            ClassicalCondition { wire: 0, value: 1 },
        )
        .unwrap();
        let json = CircuitJson::from_circuit(&c);
        let text = serde_json::to_string(&json).unwrap();
        let back: CircuitJson = serde_json::from_str(&text).unwrap();
        let c2 = back.to_circuit().unwrap();
        assert_eq!(c2.ops().len(), 4);
        // gate portions agree
        let mut c_gates = Circuit::new(3);
        let mut c2_gates = Circuit::new(3);
        for (orig, round) in c.ops().iter().zip(c2.ops()) {
            if let (
                Op::Gate {
                    gate: g1,
                    targets: t1,
                    controls: k1,
                },
                Op::Gate {
                    gate: g2,
                    targets: t2,
                    controls: k2,
                },
            ) = (orig, round)
            {
                c_gates
                    .push_controlled(g1.clone(), t1.clone(), k1.clone())
                    .unwrap();
                c2_gates
                    .push_controlled(g2.clone(), t2.clone(), k2.clone())
                    .unwrap();
            }
        }
        let u1 = unitary_of(&c_gates).unwrap();
        let u2 = unitary_of(&c2_gates).unwrap();
        assert!(u1.max_abs_diff(&u2) < 1e-12);
    }

    #[test]
    fn wire_validation() {
        let mut c = Circuit::new(2);
        assert!(matches!(
            c.push_gate(gates::standard_gate("H").unwrap(), vec![5]),
            Err(Error::WireOutOfRange { .. })
        ));
        assert!(matches!(
            c.push_gate(gates::standard_gate("CNOT").unwrap(), vec![1, 1]),
            Err(Error::DuplicateWire { .. })
        ));
        let mut ok = Circuit::new(2);
        ok.push_measure(vec![0]).unwrap();
        assert!(unitary_of(&ok).is_err());
    }
}
