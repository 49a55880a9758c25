//! Post-selection gadgets, their actions, and normalized actions.
//!
//! A j-to-k gadget fixes j−k ancilla input bits and projects j−k output
//! qubits onto fixed bits; what remains is a linear (generally non-unitary)
//! map on 2^k amplitudes. When that map has non-zero determinant, rescaling
//! by the principal 2^k-th root of the determinant lands it in SL(2^k;ℂ).

use crate::circuit::{apply_to_basis, assemble_unitary, Circuit, CircuitError, GateSet};
use crate::linalg::{principal_root, CMat, Complex, Tolerance};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GadgetError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("gadget `{name}` is degenerate: |det A| = {det_norm:.3e}")]
    DegenerateGadget { name: String, det_norm: f64 },
    #[error("gadget `{name}` maps to {k} qubits, expected 1")]
    NotSingleQubit { name: String, k: usize },
    #[error("gadget `{name}` is malformed: {reason}")]
    Malformed { name: String, reason: String },
}

/// A circuit plus ancilla-bit and post-selection-bit assignments.
///
/// `ancilla` maps qubit index → fixed input bit, `postselect` maps qubit
/// index → projected output bit. The two key sets may differ: a gadget can
/// post-select the qubit that carried its input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gadget {
    pub name: String,
    pub circuit: Circuit,
    pub ancilla: BTreeMap<usize, u8>,
    pub postselect: BTreeMap<usize, u8>,
}

impl Gadget {
    pub fn new(
        name: impl Into<String>,
        circuit: Circuit,
        ancilla: BTreeMap<usize, u8>,
        postselect: BTreeMap<usize, u8>,
    ) -> Self {
        Gadget {
            name: name.into(),
            circuit,
            ancilla,
            postselect,
        }
    }

    /// Number of free (non-ancilla) input qubits = number of output qubits.
    pub fn k(&self) -> usize {
        self.circuit.qubits - self.ancilla.len()
    }

    /// Free input qubits in ascending index order.
    pub fn input_qubits(&self) -> Vec<usize> {
        (0..self.circuit.qubits)
            .filter(|q| !self.ancilla.contains_key(q))
            .collect()
    }

    /// Output qubits (not post-selected) in ascending index order.
    pub fn output_qubits(&self) -> Vec<usize> {
        (0..self.circuit.qubits)
            .filter(|q| !self.postselect.contains_key(q))
            .collect()
    }

    pub fn validate(&self) -> Result<(), GadgetError> {
        let j = self.circuit.qubits;
        let malformed = |reason: String| GadgetError::Malformed {
            name: self.name.clone(),
            reason,
        };
        if self.ancilla.len() != self.postselect.len() {
            return Err(malformed(format!(
                "{} ancilla bits vs {} post-selection bits",
                self.ancilla.len(),
                self.postselect.len()
            )));
        }
        if self.ancilla.len() >= j {
            return Err(malformed("no free input qubit remains".into()));
        }
        for (&q, &b) in self.ancilla.iter().chain(self.postselect.iter()) {
            if q >= j {
                return Err(malformed(format!("qubit {q} out of range")));
            }
            if b > 1 {
                return Err(malformed(format!("bit value {b} is not 0/1")));
            }
        }
        Ok(())
    }
}

/// Raw action 𝒜(g), its determinant, and the normalized action when the
/// determinant is away from zero. A degenerate gadget is data here, not an
/// error; promotion to an error happens in [`build_generator_set`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GadgetAction {
    pub raw: CMat,
    pub det_raw: Complex,
    pub normalized: Option<CMat>,
}

/// Projects the assembled circuit unitary onto the fixed ancilla column
/// pattern and post-selected row pattern.
///
/// Entry (r, c) is ⟨out-row r, b| Q |in-col c, a⟩, with input and output
/// basis bits laid out over the free qubits in ascending index order.
pub fn compute_action(
    gadget: &Gadget,
    set: &GateSet,
    tol: &Tolerance,
) -> Result<GadgetAction, GadgetError> {
    gadget.validate()?;
    let unitary = assemble_unitary(&gadget.circuit, set)?;
    let raw = project_action(gadget, |row, col| unitary.get(row, col));
    let det_raw = raw.det();
    let normalized = if det_raw.norm() > tol.det_eps {
        let k = gadget.k() as u32;
        let root = principal_root(det_raw, 1 << k, tol).expect("norm checked");
        Some(raw.scale(root.inv()))
    } else {
        None
    };
    Ok(GadgetAction {
        raw,
        det_raw,
        normalized,
    })
}

/// Same contraction, but each column is produced by applying the circuit to
/// the corresponding basis state. Serves as the independent oracle for
/// [`compute_action`] in tests and in the regression table.
pub fn compute_action_via_basis(
    gadget: &Gadget,
    set: &GateSet,
    tol: &Tolerance,
) -> Result<GadgetAction, GadgetError> {
    gadget.validate()?;
    let j = gadget.circuit.qubits;
    let k = gadget.k();
    let dim = 1usize << k;
    let outputs = gadget.output_qubits();
    let mut raw = CMat::zero(dim);
    for c in 0..dim {
        let x = embed_bits(gadget, &gadget.input_qubits(), &gadget.ancilla, c, j);
        let state = apply_to_basis(&gadget.circuit, set, x)?;
        for r in 0..dim {
            let row = embed_bits(gadget, &outputs, &gadget.postselect, r, j);
            raw.set(r, c, state[row]);
        }
    }
    let det_raw = raw.det();
    let normalized = if det_raw.norm() > tol.det_eps {
        let root = principal_root(det_raw, 1 << (k as u32), tol).expect("norm checked");
        Some(raw.scale(root.inv()))
    } else {
        None
    };
    Ok(GadgetAction {
        raw,
        det_raw,
        normalized,
    })
}

fn project_action(gadget: &Gadget, amp: impl Fn(usize, usize) -> Complex) -> CMat {
    let j = gadget.circuit.qubits;
    let k = gadget.k();
    let dim = 1usize << k;
    let inputs = gadget.input_qubits();
    let outputs = gadget.output_qubits();
    let mut raw = CMat::zero(dim);
    for r in 0..dim {
        let row = embed_bits(gadget, &outputs, &gadget.postselect, r, j);
        for c in 0..dim {
            let col = embed_bits(gadget, &inputs, &gadget.ancilla, c, j);
            raw.set(r, c, amp(row, col));
        }
    }
    raw
}

/// Builds the full j-qubit basis index whose free qubits carry the bits of
/// `packed` (ascending qubit order, first free qubit = most significant) and
/// whose remaining qubits carry the fixed bits.
fn embed_bits(
    gadget: &Gadget,
    free: &[usize],
    fixed: &BTreeMap<usize, u8>,
    packed: usize,
    j: usize,
) -> usize {
    let _ = gadget;
    let mut index = 0usize;
    for (pos, &q) in free.iter().enumerate() {
        let bit = (packed >> (free.len() - 1 - pos)) & 1;
        index |= bit << (j - 1 - q);
    }
    for (&q, &b) in fixed {
        index |= (b as usize) << (j - 1 - q);
    }
    index
}

/// Rescales a raw action by the principal 2^k-th root of its determinant.
pub fn normalize_action(raw: &CMat, k: u32, tol: &Tolerance) -> Result<CMat, GadgetError> {
    let det = raw.det();
    if det.norm() <= tol.det_eps {
        return Err(GadgetError::DegenerateGadget {
            name: String::new(),
            det_norm: det.norm(),
        });
    }
    let root = principal_root(det, 1 << k, tol).expect("norm checked");
    Ok(raw.scale(root.inv()))
}

/// A labeled finite set of unit-determinant 2×2 matrices, with the gadget
/// names it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub elements: Vec<(String, CMat)>,
    pub provenance: Vec<String>,
}

impl GeneratorSet {
    pub fn new(elements: Vec<(String, CMat)>) -> Self {
        let provenance = elements.iter().map(|(l, _)| l.clone()).collect();
        GeneratorSet {
            elements,
            provenance,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Per-element result of the ±inverse matching.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureMatch {
    pub label: String,
    /// Matching element and the sign s with match = s · inverse.
    pub matched_by: Option<(String, i8)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub closed: bool,
    pub matches: Vec<ClosureMatch>,
    pub unmatched: Vec<String>,
}

/// Checks that every element has some element equal to ±its inverse.
///
/// Either sign suffices for ⟨Γ⟩ to contain the true inverse: if h = −ω⁻¹
/// then ω·h = −I and (−I)² = I, so ω⁻¹ = ω·h·h ∈ ⟨Γ⟩. The comparison scale
/// follows the inverse's largest entry: unit-determinant actions of nearly
/// degenerate gadgets have large entries, and their computed inverses only
/// carry eq_eps accuracy relative to that magnitude.
pub fn check_inverse_closure(gamma: &GeneratorSet, tol: &Tolerance) -> ClosureReport {
    let mut matches = Vec::new();
    let mut unmatched = Vec::new();
    for (label, mat) in &gamma.elements {
        let inv = match mat.inverse2(tol) {
            Ok(inv) => inv,
            Err(_) => {
                unmatched.push(label.clone());
                matches.push(ClosureMatch {
                    label: label.clone(),
                    matched_by: None,
                });
                continue;
            }
        };
        let scale = inv
            .entries()
            .iter()
            .map(|z| z.norm())
            .fold(1.0f64, f64::max);
        let mut found = None;
        for (other_label, other) in &gamma.elements {
            if other.max_diff(&inv) <= tol.eq_eps * scale {
                found = Some((other_label.clone(), 1i8));
                break;
            }
            if other.max_diff(&inv.neg()) <= tol.eq_eps * scale {
                found = Some((other_label.clone(), -1i8));
                break;
            }
        }
        if found.is_none() {
            unmatched.push(label.clone());
        }
        matches.push(ClosureMatch {
            label: label.clone(),
            matched_by: found,
        });
    }
    ClosureReport {
        closed: unmatched.is_empty(),
        matches,
        unmatched,
    }
}

/// Computes all normalized actions of single-qubit gadgets, failing loudly on
/// any degenerate or non-single-qubit gadget.
pub fn build_generator_set(
    gadgets: &[Gadget],
    set: &GateSet,
    tol: &Tolerance,
) -> Result<GeneratorSet, GadgetError> {
    let mut elements = Vec::with_capacity(gadgets.len());
    for gadget in gadgets {
        let k = gadget.k();
        if k != 1 {
            return Err(GadgetError::NotSingleQubit {
                name: gadget.name.clone(),
                k,
            });
        }
        let action = compute_action(gadget, set, tol)?;
        match action.normalized {
            Some(normalized) => elements.push((gadget.name.clone(), normalized)),
            None => {
                return Err(GadgetError::DegenerateGadget {
                    name: gadget.name.clone(),
                    det_norm: action.det_raw.norm(),
                })
            }
        }
    }
    Ok(GeneratorSet::new(elements))
}
