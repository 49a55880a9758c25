//! Gates, gate sets, and circuits; assembles the full unitary of a j-qubit
//! circuit and applies circuits to basis states without materializing it.
//!
//! Index convention: qubit 0 is the most-significant bit of a basis-state
//! index, so basis state |x₁…x_j⟩ has index x₁·2^(j−1) + … + x_j. This makes
//! published gadget tables transcribe row-for-row.

use crate::linalg::{CMat, Complex, Tolerance, ONE, ZERO};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap on circuit width; 2^12 × 2^12 complex doubles is the point where
/// dense assembly stops being a desk-scale operation.
pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("overlapping or repeated targets {targets:?} in one moment")]
    OverlappingTargets { targets: Vec<usize> },
    #[error("target {target} out of range for {qubits} qubits")]
    TargetOutOfRange { target: usize, qubits: usize },
    #[error("gate `{gate}` has arity {arity} but got {got} targets")]
    ArityMismatch {
        gate: String,
        arity: usize,
        got: usize,
    },
    #[error("{0} qubits exceeds the {MAX_QUBITS}-qubit resource guard")]
    TooManyQubits(usize),
}

/// A named unitary acting on `arity` qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub arity: usize,
    pub matrix: CMat,
}

impl Gate {
    pub fn new(name: impl Into<String>, matrix: CMat) -> Self {
        let dim = matrix.dim();
        assert!(dim.is_power_of_two() && dim >= 2, "gate dim must be 2^k");
        let arity = dim.trailing_zeros() as usize;
        assert!((1..=4).contains(&arity), "gate arity must be 1..=4");
        debug_assert!(matrix.is_finite());
        Gate {
            name: name.into(),
            arity,
            matrix,
        }
    }

    pub fn unitarity_error(&self) -> f64 {
        self.matrix.unitarity_error()
    }
}

/// A finite set of gates with unique names.
///
/// A set used to build gadgets should contain an entangling gate; sets that
/// do not are still accepted (they are useful on their own), the condition is
/// surfaced through [`GateSet::has_entangler`] instead of an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSet {
    pub name: String,
    gates: Vec<Gate>,
}

impl GateSet {
    pub fn new(name: impl Into<String>, gates: Vec<Gate>) -> Self {
        let mut seen = std::collections::BTreeSet::new();
        for g in &gates {
            assert!(
                seen.insert(g.name.clone()),
                "duplicate gate name {}",
                g.name
            );
        }
        GateSet {
            name: name.into(),
            gates,
        }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn find(&self, name: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.name == name)
    }

    pub fn has_entangler(&self) -> bool {
        self.gates.iter().any(is_entangling)
    }
}

/// One gate application: targets are distinct qubit indices, in gate order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub gate: String,
    pub targets: Vec<usize>,
}

impl Placement {
    pub fn new(gate: impl Into<String>, targets: Vec<usize>) -> Self {
        Placement {
            gate: gate.into(),
            targets,
        }
    }
}

/// A j-qubit circuit as a list of moments; within a moment all target sets
/// are pairwise disjoint and unplaced qubits act as identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub qubits: usize,
    pub moments: Vec<Vec<Placement>>,
}

impl Circuit {
    pub fn new(qubits: usize, moments: Vec<Vec<Placement>>) -> Self {
        Circuit { qubits, moments }
    }

    pub fn empty(qubits: usize) -> Self {
        Circuit {
            qubits,
            moments: Vec::new(),
        }
    }

    pub fn validate(&self, set: &GateSet) -> Result<(), CircuitError> {
        if self.qubits == 0 || self.qubits > MAX_QUBITS {
            return Err(CircuitError::TooManyQubits(self.qubits));
        }
        for moment in &self.moments {
            let mut used = vec![false; self.qubits];
            for p in moment {
                let gate = set
                    .find(&p.gate)
                    .ok_or_else(|| CircuitError::UnknownGate(p.gate.clone()))?;
                if p.targets.len() != gate.arity {
                    return Err(CircuitError::ArityMismatch {
                        gate: p.gate.clone(),
                        arity: gate.arity,
                        got: p.targets.len(),
                    });
                }
                for &t in &p.targets {
                    if t >= self.qubits {
                        return Err(CircuitError::TargetOutOfRange {
                            target: t,
                            qubits: self.qubits,
                        });
                    }
                    if used[t] {
                        return Err(CircuitError::OverlappingTargets {
                            targets: p.targets.clone(),
                        });
                    }
                    used[t] = true;
                }
            }
        }
        Ok(())
    }
}

/// Bit of qubit `q` inside basis index `i` of a `j`-qubit register.
#[inline]
pub fn qubit_bit(index: usize, qubit: usize, qubits: usize) -> usize {
    (index >> (qubits - 1 - qubit)) & 1
}

/// Assembles the full 2^j × 2^j unitary, moment by moment.
///
/// Each moment is built as a tensor product of its gates (placed on the
/// leading wires) conjugated by the index permutation that brings the actual
/// targets to adjacency.
pub fn assemble_unitary(circuit: &Circuit, set: &GateSet) -> Result<CMat, CircuitError> {
    circuit.validate(set)?;
    let j = circuit.qubits;
    let dim = 1usize << j;
    let mut unitary = CMat::identity(dim);
    for moment in &circuit.moments {
        let m = moment_matrix(moment, set, j)?;
        unitary = m.mat_mul(&unitary).expect("same dim");
    }
    Ok(unitary)
}

fn moment_matrix(moment: &[Placement], set: &GateSet, j: usize) -> Result<CMat, CircuitError> {
    let dim = 1usize << j;
    // Tensor factor with all moment gates on the leading wires.
    let mut kron = CMat::identity(1);
    let mut ordered_targets = Vec::new();
    for p in moment {
        let gate = set.find(&p.gate).expect("validated");
        kron = kron.kron(&gate.matrix);
        ordered_targets.extend_from_slice(&p.targets);
    }
    let rest: Vec<usize> = (0..j).filter(|q| !ordered_targets.contains(q)).collect();
    let identity_dim = 1usize << rest.len();
    if identity_dim > 1 {
        kron = kron.kron(&CMat::identity(identity_dim));
    }
    // layout[w] = original qubit sitting on permuted wire w
    let layout: Vec<usize> = ordered_targets.iter().chain(rest.iter()).copied().collect();
    let reindex = |i: usize| -> usize {
        let mut out = 0usize;
        for (wire, &q) in layout.iter().enumerate() {
            out |= qubit_bit(i, q, j) << (j - 1 - wire);
        }
        out
    };
    let mut out = CMat::zero(dim);
    for row in 0..dim {
        let pr = reindex(row);
        for col in 0..dim {
            out.set(row, col, kron.get(pr, reindex(col)));
        }
    }
    Ok(out)
}

/// Applies the circuit to the basis state with index `x` (qubit 0 = MSB)
/// moment by moment, returning the 2^j amplitudes.
pub fn apply_to_basis(
    circuit: &Circuit,
    set: &GateSet,
    x: usize,
) -> Result<Vec<Complex>, CircuitError> {
    circuit.validate(set)?;
    let j = circuit.qubits;
    let dim = 1usize << j;
    assert!(x < dim, "basis index out of range");
    let mut state = vec![ZERO; dim];
    state[x] = ONE;
    for moment in &circuit.moments {
        for p in moment {
            let gate = set.find(&p.gate).expect("validated");
            apply_gate(&mut state, &gate.matrix, &p.targets, j);
        }
    }
    Ok(state)
}

fn apply_gate(state: &mut [Complex], matrix: &CMat, targets: &[usize], j: usize) {
    let k = targets.len();
    let block = 1usize << k;
    // target ℓ carries bit (k−1−ℓ) of the gate's row/column index
    let shifts: Vec<usize> = targets.iter().map(|&q| j - 1 - q).collect();
    let embed = |base: usize, mask: usize| -> usize {
        let mut idx = base;
        for (l, &sh) in shifts.iter().enumerate() {
            idx |= ((mask >> (k - 1 - l)) & 1) << sh;
        }
        idx
    };
    let target_mask: usize = shifts.iter().map(|&sh| 1usize << sh).sum();
    let mut scratch = vec![ZERO; block];
    for base in 0..state.len() {
        if base & target_mask != 0 {
            continue;
        }
        for (m, slot) in scratch.iter_mut().enumerate() {
            *slot = state[embed(base, m)];
        }
        for r in 0..block {
            let mut acc = ZERO;
            for (c, amp) in scratch.iter().enumerate() {
                acc += matrix.get(r, c) * amp;
            }
            state[embed(base, r)] = acc;
        }
    }
}

/// True iff the gate is not a tensor product of single-qubit unitaries.
///
/// Decided by the operator-Schmidt rank across each single-qubit bipartition:
/// the realignment of the gate across (q | rest) has rank 1 exactly when the
/// gate factors there, and rank is tested through its 2×2 minors.
pub fn is_entangling(gate: &Gate) -> bool {
    if gate.arity < 2 {
        return false;
    }
    (0..gate.arity).any(|q| !factors_at(gate, q))
}

fn factors_at(gate: &Gate, q: usize) -> bool {
    let n = gate.arity;
    let rest = n - 1;
    let rows = 4usize;
    let cols = 1usize << (2 * rest);
    let mut realigned = vec![ZERO; rows * cols];
    for r in 0..gate.matrix.dim() {
        for c in 0..gate.matrix.dim() {
            let rq = qubit_bit(r, q, n);
            let cq = qubit_bit(c, q, n);
            let strip = |i: usize| -> usize {
                let mut out = 0usize;
                for w in (0..n).filter(|&w| w != q) {
                    out = (out << 1) | qubit_bit(i, w, n);
                }
                out
            };
            realigned[((rq << 1) | cq) * cols + ((strip(r) << rest) | strip(c))] =
                gate.matrix.get(r, c);
        }
    }
    // rank 1 iff every 2x2 minor vanishes
    let tol = Tolerance::default();
    for r1 in 0..rows {
        for r2 in (r1 + 1)..rows {
            for c1 in 0..cols {
                for c2 in (c1 + 1)..cols {
                    let minor = realigned[r1 * cols + c1] * realigned[r2 * cols + c2]
                        - realigned[r1 * cols + c2] * realigned[r2 * cols + c1];
                    if minor.norm() > 10.0 * tol.eq_eps {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn hs_set() -> GateSet {
        GateSet::new(
            "hs",
            vec![
                catalog::gate("H", &[]).unwrap(),
                catalog::gate("T", &[]).unwrap(),
                catalog::gate("CZ", &[]).unwrap(),
                catalog::gate("CNOT", &[]).unwrap(),
            ],
        )
    }

    #[test]
    fn empty_circuit_is_identity() {
        let u = assemble_unitary(&Circuit::empty(1), &hs_set()).unwrap();
        assert!(u.max_diff(&CMat::identity(2)) < 1e-15);
    }

    #[test]
    fn single_cz_moment() {
        let circ = Circuit::new(2, vec![vec![Placement::new("CZ", vec![0, 1])]]);
        let u = assemble_unitary(&circ, &hs_set()).unwrap();
        let mut expect = CMat::identity(4);
        expect.set(3, 3, -ONE);
        assert!(u.max_diff(&expect) < 1e-15);
    }

    #[test]
    fn endianness_qubit0_is_msb() {
        // CNOT on (0,1): control qubit 0 = MSB, so |10⟩ (index 2) → |11⟩ (index 3)
        let circ = Circuit::new(2, vec![vec![Placement::new("CNOT", vec![0, 1])]]);
        let u = assemble_unitary(&circ, &hs_set()).unwrap();
        assert_eq!(u.get(3, 2), ONE);
        assert_eq!(u.get(2, 2), ZERO);
    }

    #[test]
    fn non_adjacent_and_reversed_targets() {
        // CNOT with control qubit 2, target qubit 0, identity on qubit 1:
        // |001⟩ (index 1) → |101⟩ (index 5)
        let circ = Circuit::new(3, vec![vec![Placement::new("CNOT", vec![2, 0])]]);
        let u = assemble_unitary(&circ, &hs_set()).unwrap();
        assert_eq!(u.get(5, 1), ONE);
        assert_eq!(u.get(1, 5), ONE);
        assert_eq!(u.get(0, 0), ONE);
    }

    #[test]
    fn apply_to_basis_examples() {
        let set = hs_set();
        let state = apply_to_basis(&Circuit::empty(1), &set, 0).unwrap();
        assert_eq!(state, vec![ONE, ZERO]);
        let circ = Circuit::new(1, vec![vec![Placement::new("H", vec![0])]]);
        let state = apply_to_basis(&circ, &set, 0).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((state[0] - c(r, 0.0)).norm() < 1e-15);
        assert!((state[1] - c(r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn path_equivalence_on_a_mixed_circuit() {
        let set = hs_set();
        let circ = Circuit::new(
            3,
            vec![
                vec![Placement::new("H", vec![1]), Placement::new("T", vec![2])],
                vec![Placement::new("CZ", vec![2, 0])],
                vec![Placement::new("CNOT", vec![1, 2])],
            ],
        );
        let u = assemble_unitary(&circ, &set).unwrap();
        for x in 0..8 {
            let state = apply_to_basis(&circ, &set, x).unwrap();
            for (row, amp) in state.iter().enumerate() {
                assert!((u.get(row, x) - amp).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn moment_fusion_invariance() {
        let set = hs_set();
        let fused = Circuit::new(
            2,
            vec![vec![
                Placement::new("H", vec![0]),
                Placement::new("T", vec![1]),
            ]],
        );
        let split = Circuit::new(
            2,
            vec![
                vec![Placement::new("H", vec![0])],
                vec![Placement::new("T", vec![1])],
            ],
        );
        let a = assemble_unitary(&fused, &set).unwrap();
        let b = assemble_unitary(&split, &set).unwrap();
        assert!(a.max_diff(&b) < 1e-14);
    }

    #[test]
    fn validation_errors() {
        let set = hs_set();
        let bad = Circuit::new(2, vec![vec![Placement::new("NOPE", vec![0])]]);
        assert!(matches!(
            assemble_unitary(&bad, &set),
            Err(CircuitError::UnknownGate(_))
        ));
        let overlap = Circuit::new(2, vec![vec![Placement::new("CZ", vec![0, 0])]]);
        assert!(matches!(
            assemble_unitary(&overlap, &set),
            Err(CircuitError::OverlappingTargets { .. })
        ));
        let wide = Circuit::empty(MAX_QUBITS + 1);
        assert!(matches!(
            assemble_unitary(&wide, &set),
            Err(CircuitError::TooManyQubits(_))
        ));
    }

    #[test]
    fn entangling_detection() {
        assert!(is_entangling(&catalog::gate("CZ", &[]).unwrap()));
        let h = catalog::gate("H", &[]).unwrap();
        let hh = Gate::new("HxH", h.matrix.kron(&h.matrix));
        assert!(!is_entangling(&hh));
        // (U†⊗U†) CZ (U⊗U) stays entangling
        let u = catalog::rx(2.0 * std::f64::consts::PI / 3.0);
        let conj = catalog::conjugate_gate(&catalog::gate("CZ", &[]).unwrap(), &u).unwrap();
        assert!(is_entangling(&conj));
        assert!(is_entangling(&catalog::gate("T4", &[]).unwrap()));
        // SWAP is no tensor product of single-qubit gates, so the
        // operator-Schmidt test counts it even though it creates no
        // entanglement from product inputs.
        assert!(is_entangling(&catalog::gate("T2", &[]).unwrap()));
    }
}
