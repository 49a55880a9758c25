//! Constructors for every gate, gate set, gadget table, and generator set
//! used by the published analyses, parameterized where the source material
//! is parameterized.
//!
//! Gadget circuits are transcribed wire for wire, including ancilla and
//! post-selection bits. The conjugated families store their circuits over
//! the conjugated gates themselves (`Z~`, `CZ~`, ...), the IQP family over
//! explicit H/T-power/CZ wires so the whole contraction path is exercised.

use crate::circuit::{Circuit, Gate, GateSet, Placement};
use crate::gadget::{build_generator_set, Gadget, GadgetError, GeneratorSet};
use crate::linalg::{CMat, Complex, Tolerance, I, ONE, ZERO};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("no published gadget table for {0}")]
    NoTable(String),
    #[error("theta = {theta} lies outside interval {interval} for {case}")]
    ThetaOutOfInterval {
        theta: f64,
        interval: &'static str,
        case: String,
    },
    #[error("gadget `{name}` is degenerate at this angle: |det A| = {det_norm:.3e}")]
    DegenerateGadget { name: String, det_norm: f64 },
    #[error(transparent)]
    Gadget(#[from] GadgetError),
}

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn re(x: f64) -> Complex {
    Complex::new(x, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> CMat {
        match self {
            Pauli::X => CMat::two(ZERO, ONE, ONE, ZERO),
            Pauli::Y => CMat::two(ZERO, -I, I, ZERO),
            Pauli::Z => CMat::two(ONE, ZERO, ZERO, -ONE),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        }
    }

    pub fn parse(s: &str) -> Option<Pauli> {
        match s {
            "X" => Some(Pauli::X),
            "Y" => Some(Pauli::Y),
            "Z" => Some(Pauli::Z),
            _ => None,
        }
    }
}

pub fn hadamard() -> CMat {
    let r = re(1.0 / SQRT_2);
    CMat::two(r, r, r, -r)
}

/// T^k = diag(1, e^{ikπ/4}).
pub fn t_power(k: u32) -> CMat {
    CMat::two(
        ONE,
        ZERO,
        ZERO,
        Complex::from_polar(1.0, f64::from(k) * FRAC_PI_4),
    )
}

pub fn rx(theta: f64) -> CMat {
    let half = theta / 2.0;
    CMat::two(
        re(half.cos()),
        c(0.0, -half.sin()),
        c(0.0, -half.sin()),
        re(half.cos()),
    )
}

pub fn rz(theta: f64) -> CMat {
    CMat::two(
        Complex::from_polar(1.0, -theta / 2.0),
        ZERO,
        ZERO,
        Complex::from_polar(1.0, theta / 2.0),
    )
}

/// Clifford rotation (I − iP)/√2 about the P axis.
pub fn clifford_rotation(p: Pauli) -> CMat {
    let id = CMat::identity(2);
    let mut out = CMat::zero(2);
    let pm = p.matrix();
    for row in 0..2 {
        for col in 0..2 {
            out.set(
                row,
                col,
                (id.get(row, col) - I * pm.get(row, col)) / re(SQRT_2),
            );
        }
    }
    out
}

/// π rotation about the (P ± Q)/√2 axis: the matrix (P ± Q)/√2 itself.
pub fn theta_pq(p: Pauli, q: Pauli, plus: bool) -> Result<CMat, CatalogError> {
    if p == q {
        return Err(CatalogError::BadParam(format!(
            "theta({}{}{}) needs two distinct Paulis",
            p.name(),
            if plus { "+" } else { "-" },
            q.name()
        )));
    }
    let pm = p.matrix();
    let qm = q.matrix();
    let mut out = CMat::zero(2);
    for row in 0..2 {
        for col in 0..2 {
            let sum = if plus {
                pm.get(row, col) + qm.get(row, col)
            } else {
                pm.get(row, col) - qm.get(row, col)
            };
            out.set(row, col, sum / re(SQRT_2));
        }
    }
    Ok(out)
}

/// Generalized CNOT: C(P,Q) = (I⊗I + P⊗I + I⊗Q − P⊗Q)/2.
pub fn c_pq(p: Pauli, q: Pauli) -> CMat {
    let id = CMat::identity(2);
    let ii = id.kron(&id);
    let pi = p.matrix().kron(&id);
    let iq = id.kron(&q.matrix());
    let pq = p.matrix().kron(&q.matrix());
    let mut out = CMat::zero(4);
    for row in 0..4 {
        for col in 0..4 {
            let v = (ii.get(row, col) + pi.get(row, col) + iq.get(row, col) - pq.get(row, col))
                / re(2.0);
            out.set(row, col, v);
        }
    }
    out
}

pub fn cz() -> CMat {
    let mut m = CMat::identity(4);
    m.set(3, 3, -ONE);
    m
}

pub fn cnot() -> CMat {
    let mut m = CMat::zero(4);
    m.set(0, 0, ONE);
    m.set(1, 1, ONE);
    m.set(2, 3, ONE);
    m.set(3, 2, ONE);
    m
}

/// T_{2k} for 2k qubits: flips every bit of an odd-parity basis state.
pub fn t_2k(half_k: usize) -> CMat {
    let qubits = 2 * half_k;
    let dim = 1usize << qubits;
    let mut m = CMat::zero(dim);
    for x in 0..dim {
        let y = if (x.count_ones() & 1) == 1 {
            x ^ (dim - 1)
        } else {
            x
        };
        m.set(y, x, ONE);
    }
    m
}

/// Named gate constructor.
///
/// Accepted names: `H T S Z X Y CZ CNOT T2 T4 RX RY RZ`, powers `T^k`,
/// parametric `Rx`/`Rz` (one angle), `C(P,Q)`, and `theta(P+Q)`/`theta(P-Q)`.
pub fn gate(name: &str, params: &[f64]) -> Result<Gate, CatalogError> {
    let need_angle = |what: &str| {
        params
            .first()
            .copied()
            .ok_or_else(|| CatalogError::BadParam(format!("{what} takes one angle parameter")))
    };
    let matrix = match name {
        "H" => hadamard(),
        "T" => t_power(1),
        "S" => t_power(2),
        "Z" => Pauli::Z.matrix(),
        "X" => Pauli::X.matrix(),
        "Y" => Pauli::Y.matrix(),
        "CZ" => cz(),
        "CNOT" => cnot(),
        "T2" => t_2k(1),
        "T4" => t_2k(2),
        "RX" => clifford_rotation(Pauli::X),
        "RY" => clifford_rotation(Pauli::Y),
        "RZ" => clifford_rotation(Pauli::Z),
        "Rx" => {
            let theta = need_angle("Rx")?;
            return Ok(Gate::new(format!("Rx({theta})"), rx(theta)));
        }
        "Rz" => {
            let theta = need_angle("Rz")?;
            return Ok(Gate::new(format!("Rz({theta})"), rz(theta)));
        }
        _ => {
            if let Some(k) = name.strip_prefix("T^") {
                let k: u32 = k
                    .parse()
                    .map_err(|_| CatalogError::BadParam(format!("bad T power `{name}`")))?;
                t_power(k % 8)
            } else if let Some(rest) = name.strip_prefix("C(").and_then(|s| s.strip_suffix(')')) {
                let mut parts = rest.split(',');
                let p = parts.next().and_then(Pauli::parse);
                let q = parts.next().and_then(Pauli::parse);
                match (p, q, parts.next()) {
                    (Some(p), Some(q), None) => c_pq(p, q),
                    _ => {
                        return Err(CatalogError::BadParam(format!(
                            "bad Pauli pair in `{name}`"
                        )))
                    }
                }
            } else if let Some(rest) = name
                .strip_prefix("theta(")
                .and_then(|s| s.strip_suffix(')'))
            {
                let (p, q, plus) = if let Some((p, q)) = rest.split_once('+') {
                    (Pauli::parse(p), Pauli::parse(q), true)
                } else if let Some((p, q)) = rest.split_once('-') {
                    (Pauli::parse(p), Pauli::parse(q), false)
                } else {
                    (None, None, true)
                };
                match (p, q) {
                    (Some(p), Some(q)) => theta_pq(p, q, plus)?,
                    _ => return Err(CatalogError::BadParam(format!("bad axis in `{name}`"))),
                }
            } else {
                return Err(CatalogError::UnknownGate(name.into()));
            }
        }
    };
    Ok(Gate::new(name, matrix))
}

/// (U†)^{⊗k} G U^{⊗k}, named `G~`.
pub fn conjugate_gate(gate: &Gate, u: &CMat) -> Result<Gate, CatalogError> {
    if u.dim() != 2 {
        return Err(CatalogError::BadParam(
            "conjugating unitary must be 2x2".into(),
        ));
    }
    let mut u_tensor = CMat::identity(1);
    for _ in 0..gate.arity {
        u_tensor = u_tensor.kron(u);
    }
    let matrix = u_tensor
        .dagger()
        .mat_mul(&gate.matrix)
        .expect("dims agree")
        .mat_mul(&u_tensor)
        .expect("dims agree");
    Ok(Gate::new(format!("{}~", gate.name), matrix))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Iqp,
    Ccc,
    Cz,
    CzZ,
    CzS,
    Fragment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fragment {
    T4P,
    Cpp(Pauli),
    CppPlusP(Pauli),
    CppPlusRp(Pauli),
}

impl Fragment {
    pub fn parse(s: &str) -> Option<Fragment> {
        if s == "T4+P" {
            return Some(Fragment::T4P);
        }
        let (head, tail) = match s.split_once('+') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let p = head
            .strip_prefix("C(")
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|r| {
                let mut it = r.split(',');
                let a = it.next().and_then(Pauli::parse)?;
                let b = it.next().and_then(Pauli::parse)?;
                if a == b && it.next().is_none() {
                    Some(a)
                } else {
                    None
                }
            })?;
        match tail {
            None => Some(Fragment::Cpp(p)),
            // "+P" names the fragment's own Pauli
            Some("P") => Some(Fragment::CppPlusP(p)),
            Some(t) if t == p.name() => Some(Fragment::CppPlusP(p)),
            Some(t) if t == format!("R{}", p.name()) => Some(Fragment::CppPlusRp(p)),
            Some("RP") => Some(Fragment::CppPlusRp(p)),
            _ => None,
        }
    }

    pub fn display(&self) -> String {
        match self {
            Fragment::T4P => "T4+P".into(),
            Fragment::Cpp(p) => format!("C({},{})", p.name(), p.name()),
            Fragment::CppPlusP(p) => format!("C({},{})+{}", p.name(), p.name(), p.name()),
            Fragment::CppPlusRp(p) => format!("C({},{})+R{}", p.name(), p.name(), p.name()),
        }
    }

    /// Generator gates of the fragment, unconjugated.
    pub fn generators(&self) -> Vec<Gate> {
        match self {
            Fragment::T4P => vec![
                gate("T4", &[]).expect("builtin"),
                gate("X", &[]).expect("builtin"),
                gate("Y", &[]).expect("builtin"),
                gate("Z", &[]).expect("builtin"),
            ],
            Fragment::Cpp(p) => vec![Gate::new(
                format!("C({},{})", p.name(), p.name()),
                c_pq(*p, *p),
            )],
            Fragment::CppPlusP(p) => vec![
                Gate::new(format!("C({},{})", p.name(), p.name()), c_pq(*p, *p)),
                Gate::new(p.name(), p.matrix()),
            ],
            Fragment::CppPlusRp(p) => vec![
                Gate::new(format!("C({},{})", p.name(), p.name()), c_pq(*p, *p)),
                Gate::new(format!("R{}", p.name()), clifford_rotation(*p)),
            ],
        }
    }
}

/// A parametric circuit family plus its conjugating unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub fragment: Option<Fragment>,
    /// Conjugating unitary; `None` only for IQP.
    pub u: Option<CMat>,
    /// Rotation angle when the family's table is Rx(θ)-parameterized.
    pub theta: Option<f64>,
}

impl FamilySpec {
    pub fn iqp() -> Self {
        FamilySpec {
            family: Family::Iqp,
            fragment: None,
            u: None,
            theta: None,
        }
    }

    /// The U-CCC family at the canonical table angle U = Rx(2π/3).
    pub fn ccc() -> Self {
        Self::ccc_with(rx(2.0 * PI / 3.0))
    }

    pub fn ccc_with(u: CMat) -> Self {
        FamilySpec {
            family: Family::Ccc,
            fragment: None,
            u: Some(u),
            theta: None,
        }
    }

    pub fn cz(theta: f64) -> Self {
        FamilySpec {
            family: Family::Cz,
            fragment: None,
            u: Some(rx(theta)),
            theta: Some(theta),
        }
    }

    pub fn cz_z(theta: f64) -> Self {
        FamilySpec {
            family: Family::CzZ,
            fragment: None,
            u: Some(rx(theta)),
            theta: Some(theta),
        }
    }

    pub fn cz_s_with(u: CMat) -> Self {
        FamilySpec {
            family: Family::CzS,
            fragment: None,
            u: Some(u),
            theta: None,
        }
    }

    /// The conjugated T₄+𝒫 family at the canonical table choice U = T·Rx(2π/3).
    pub fn t4p() -> Self {
        let u = t_power(1).mat_mul(&rx(2.0 * PI / 3.0)).expect("2x2");
        Self::fragment(Fragment::T4P, u)
    }

    pub fn fragment(fragment: Fragment, u: CMat) -> Self {
        FamilySpec {
            family: Family::Fragment,
            fragment: Some(fragment),
            u: Some(u),
            theta: None,
        }
    }

    /// Any conjugated family with U given by its (α, φ, θ, λ) angles,
    /// U = e^{iα}Rz(φ)Rx(θ)Rz(λ).
    pub fn with_euler_params(
        family: Family,
        fragment: Option<Fragment>,
        alpha: f64,
        phi: f64,
        theta: f64,
        lambda: f64,
    ) -> Result<Self, CatalogError> {
        let u = u_from_euler(alpha, phi, theta, lambda);
        match family {
            Family::Iqp => Err(CatalogError::BadParam(
                "the IQP family takes no conjugating unitary".into(),
            )),
            Family::Ccc => Ok(Self::ccc_with(u)),
            Family::CzS => Ok(Self::cz_s_with(u)),
            Family::Cz | Family::CzZ => Ok(FamilySpec {
                family,
                fragment: None,
                u: Some(u),
                theta: Some(theta),
            }),
            Family::Fragment => {
                let fragment = fragment.ok_or_else(|| {
                    CatalogError::BadParam("fragment family needs a fragment name".into())
                })?;
                Ok(Self::fragment(fragment, u))
            }
        }
    }

    fn u(&self) -> Result<&CMat, CatalogError> {
        self.u
            .as_ref()
            .ok_or_else(|| CatalogError::BadParam("family needs a conjugating unitary".into()))
    }

    pub fn display(&self) -> String {
        match self.family {
            Family::Iqp => "IQP".into(),
            Family::Ccc => "CCC".into(),
            Family::Cz => "CZ".into(),
            Family::CzZ => "CZ+Z".into(),
            Family::CzS => "CZ+S".into(),
            Family::Fragment => self
                .fragment
                .map(|f| f.display())
                .unwrap_or_else(|| "fragment".into()),
        }
    }
}

/// The named gate set of a family, conjugation applied entry-wise.
pub fn gate_set(spec: &FamilySpec) -> Result<GateSet, CatalogError> {
    match spec.family {
        Family::Iqp => {
            let h = hadamard();
            let hth = h
                .mat_mul(&t_power(1))
                .expect("2x2")
                .mat_mul(&h)
                .expect("2x2");
            let hh = h.kron(&h);
            let hhczhh = hh.mat_mul(&cz()).expect("4x4").mat_mul(&hh).expect("4x4");
            Ok(GateSet::new(
                "S_IQP",
                vec![Gate::new("HTH", hth), Gate::new("HHCZHH", hhczhh)],
            ))
        }
        Family::Ccc => {
            let u = spec.u()?;
            Ok(GateSet::new(
                "S_CCC",
                vec![
                    conjugate_gate(&gate("H", &[])?, u)?,
                    conjugate_gate(&gate("S", &[])?, u)?,
                    conjugate_gate(&gate("CZ", &[])?, u)?,
                ],
            ))
        }
        Family::Cz => {
            let u = spec.u()?;
            Ok(GateSet::new(
                "S_CZ",
                vec![conjugate_gate(&gate("CZ", &[])?, u)?],
            ))
        }
        Family::CzZ => {
            let u = spec.u()?;
            Ok(GateSet::new(
                "S_CZ+Z",
                vec![
                    conjugate_gate(&gate("Z", &[])?, u)?,
                    conjugate_gate(&gate("CZ", &[])?, u)?,
                ],
            ))
        }
        Family::CzS => {
            let u = spec.u()?;
            Ok(GateSet::new(
                "S_CZ+S",
                vec![
                    conjugate_gate(&gate("S", &[])?, u)?,
                    conjugate_gate(&gate("CZ", &[])?, u)?,
                ],
            ))
        }
        Family::Fragment => {
            let u = spec.u()?;
            let fragment = spec
                .fragment
                .ok_or_else(|| CatalogError::BadParam("fragment family without fragment".into()))?;
            let gates = fragment
                .generators()
                .iter()
                .map(|g| conjugate_gate(g, u))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(GateSet::new(format!("S_{}", fragment.display()), gates))
        }
    }
}

/// Wire-level gate set for the IQP gadget circuits (explicit H, T powers, CZ).
pub fn iqp_wire_set() -> GateSet {
    GateSet::new(
        "IQP wires",
        vec![
            gate("H", &[]).expect("builtin"),
            gate("T", &[]).expect("builtin"),
            gate("T^3", &[]).expect("builtin"),
            gate("T^4", &[]).expect("builtin"),
            gate("T^7", &[]).expect("builtin"),
            gate("CZ", &[]).expect("builtin"),
        ],
    )
}

/// A gadget table together with the gate set its circuits are written over.
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetTable {
    pub gate_set: GateSet,
    pub gadgets: Vec<Gadget>,
}

fn bits(pairs: &[(usize, u8)]) -> BTreeMap<usize, u8> {
    pairs.iter().copied().collect()
}

fn gadget(
    name: &str,
    qubits: usize,
    moments: Vec<Vec<Placement>>,
    ancilla: &[(usize, u8)],
    postselect: &[(usize, u8)],
) -> Gadget {
    Gadget::new(
        name,
        Circuit::new(qubits, moments),
        bits(ancilla),
        bits(postselect),
    )
}

fn p(gate: &str, targets: &[usize]) -> Placement {
    Placement::new(gate, targets.to_vec())
}

/// Published gadget tables, transcribed wire-for-wire.
pub fn gadget_table(spec: &FamilySpec) -> Result<GadgetTable, CatalogError> {
    match spec.family {
        Family::Iqp => Ok(GadgetTable {
            gate_set: iqp_wire_set(),
            gadgets: vec![
                gadget(
                    "a",
                    1,
                    vec![vec![p("H", &[0])], vec![p("T", &[0])], vec![p("H", &[0])]],
                    &[],
                    &[],
                ),
                gadget(
                    "a_inv",
                    1,
                    vec![vec![p("H", &[0])], vec![p("T^7", &[0])], vec![p("H", &[0])]],
                    &[],
                    &[],
                ),
                gadget(
                    "b",
                    2,
                    vec![
                        vec![p("H", &[0]), p("H", &[1])],
                        vec![p("T", &[0]), p("T^4", &[1])],
                        vec![p("CZ", &[0, 1])],
                        vec![p("H", &[0]), p("H", &[1])],
                    ],
                    &[(1, 0)],
                    &[(0, 0)],
                ),
                gadget(
                    "b_inv",
                    2,
                    vec![
                        vec![p("H", &[0]), p("H", &[1])],
                        vec![p("CZ", &[0, 1])],
                        vec![p("T^4", &[0]), p("T^7", &[1])],
                        vec![p("H", &[0]), p("H", &[1])],
                    ],
                    &[(1, 0)],
                    &[(0, 0)],
                ),
                gadget(
                    "c",
                    2,
                    vec![
                        vec![p("H", &[0]), p("H", &[1])],
                        vec![p("T", &[1])],
                        vec![p("CZ", &[0, 1])],
                        vec![p("H", &[0]), p("H", &[1])],
                    ],
                    &[(1, 0)],
                    &[(1, 0)],
                ),
                gadget(
                    "c_inv",
                    2,
                    vec![
                        vec![p("H", &[0]), p("H", &[1])],
                        vec![p("CZ", &[0, 1])],
                        vec![p("T^4", &[0]), p("T^3", &[1])],
                        vec![p("H", &[0]), p("H", &[1])],
                    ],
                    &[(1, 0)],
                    &[(1, 0)],
                ),
            ],
        }),
        Family::Ccc | Family::CzZ => {
            // Both tables are circuits over {U†ZU, (U†⊗U†)CZ(U⊗U)}.
            let set = gate_set(&FamilySpec {
                family: Family::CzZ,
                fragment: None,
                u: spec.u.clone(),
                theta: spec.theta,
            })?;
            let gadgets = match spec.family {
                Family::Ccc => vec![
                    gadget(
                        "d",
                        2,
                        vec![vec![p("Z~", &[1])], vec![p("CZ~", &[0, 1])]],
                        &[(1, 0)],
                        &[(1, 0)],
                    ),
                    gadget(
                        "d_inv",
                        2,
                        vec![vec![p("Z~", &[0])], vec![p("CZ~", &[0, 1])]],
                        &[(1, 1)],
                        &[(1, 1)],
                    ),
                    gadget(
                        "e",
                        2,
                        vec![vec![p("Z~", &[1])], vec![p("CZ~", &[0, 1])]],
                        &[(1, 0)],
                        &[(0, 0)],
                    ),
                    gadget(
                        "e_inv",
                        2,
                        vec![vec![p("Z~", &[1])], vec![p("CZ~", &[0, 1])]],
                        &[(1, 1)],
                        &[(0, 1)],
                    ),
                    gadget(
                        "f",
                        2,
                        vec![vec![p("Z~", &[0])], vec![p("CZ~", &[0, 1])]],
                        &[(1, 0)],
                        &[(1, 0)],
                    ),
                    gadget(
                        "f_inv",
                        2,
                        vec![vec![p("Z~", &[1])], vec![p("CZ~", &[0, 1])]],
                        &[(1, 1)],
                        &[(1, 1)],
                    ),
                ],
                Family::CzZ => {
                    let three_wire = vec![
                        vec![p("CZ~", &[0, 1]), p("Z~", &[2])],
                        vec![p("Z~", &[0]), p("CZ~", &[1, 2])],
                    ];
                    vec![
                        gadget(
                            "c0",
                            3,
                            three_wire.clone(),
                            &[(0, 0), (1, 0)],
                            &[(1, 0), (2, 0)],
                        ),
                        gadget(
                            "c0_inv",
                            3,
                            three_wire.clone(),
                            &[(1, 0), (2, 1)],
                            &[(0, 1), (1, 0)],
                        ),
                        gadget("c1", 3, three_wire, &[(1, 0), (2, 0)], &[(1, 0), (2, 0)]),
                        gadget(
                            "c1_inv",
                            3,
                            vec![vec![p("CZ~", &[0, 1])], vec![p("CZ~", &[1, 2])]],
                            &[(1, 1), (2, 1)],
                            &[(1, 1), (2, 1)],
                        ),
                        gadget(
                            "c2",
                            3,
                            vec![
                                vec![p("Z~", &[1])],
                                vec![p("CZ~", &[0, 1])],
                                vec![p("CZ~", &[1, 2])],
                            ],
                            &[(1, 0), (2, 0)],
                            &[(1, 0), (2, 0)],
                        ),
                        gadget(
                            "c2_inv",
                            3,
                            vec![
                                vec![p("Z~", &[0]), p("Z~", &[1]), p("Z~", &[2])],
                                vec![p("CZ~", &[0, 1])],
                                vec![p("CZ~", &[1, 2])],
                            ],
                            &[(1, 1), (2, 1)],
                            &[(1, 1), (2, 1)],
                        ),
                        gadget(
                            "c3",
                            2,
                            vec![vec![p("Z~", &[1])], vec![p("CZ~", &[0, 1])]],
                            &[(1, 0)],
                            &[(1, 0)],
                        ),
                        gadget(
                            "c3_inv",
                            2,
                            vec![vec![p("Z~", &[0])], vec![p("CZ~", &[0, 1])]],
                            &[(1, 1)],
                            &[(1, 1)],
                        ),
                        gadget(
                            "c4",
                            2,
                            vec![vec![p("Z~", &[0])], vec![p("CZ~", &[0, 1])]],
                            &[(1, 0)],
                            &[(1, 0)],
                        ),
                        gadget(
                            "c4_inv",
                            2,
                            vec![vec![p("Z~", &[1])], vec![p("CZ~", &[0, 1])]],
                            &[(1, 1)],
                            &[(1, 1)],
                        ),
                    ]
                }
                _ => unreachable!(),
            };
            Ok(GadgetTable {
                gate_set: set,
                gadgets,
            })
        }
        Family::Cz => {
            let set = gate_set(spec)?;
            Ok(GadgetTable {
                gate_set: set,
                gadgets: vec![gadget(
                    "g",
                    3,
                    vec![vec![p("CZ~", &[0, 1])], vec![p("CZ~", &[1, 2])]],
                    &[(1, 0), (2, 1)],
                    &[(1, 1), (2, 0)],
                )],
            })
        }
        Family::Fragment if spec.fragment == Some(Fragment::T4P) => {
            let set = gate_set(spec)?;
            let t4 = |second: Vec<Placement>, first: bool| {
                let t4m = vec![p("T4~", &[0, 1, 2, 3])];
                if first {
                    vec![t4m, second]
                } else {
                    vec![second, t4m]
                }
            };
            Ok(GadgetTable {
                gate_set: set,
                gadgets: vec![
                    gadget(
                        "h",
                        4,
                        t4(
                            vec![p("Z~", &[0]), p("Y~", &[1]), p("Y~", &[2]), p("X~", &[3])],
                            true,
                        ),
                        &[(0, 0), (1, 0), (3, 0)],
                        &[(1, 1), (2, 0), (3, 1)],
                    ),
                    gadget(
                        "h_inv",
                        4,
                        t4(
                            vec![p("Z~", &[0]), p("Y~", &[1]), p("Y~", &[2]), p("X~", &[3])],
                            false,
                        ),
                        &[(1, 0), (2, 0), (3, 0)],
                        &[(0, 1), (2, 1), (3, 0)],
                    ),
                    gadget(
                        "i",
                        4,
                        t4(
                            vec![p("Z~", &[0]), p("X~", &[1]), p("Z~", &[2]), p("X~", &[3])],
                            true,
                        ),
                        &[(1, 1), (2, 0), (3, 0)],
                        &[(1, 0), (2, 0), (3, 0)],
                    ),
                    gadget(
                        "i_inv",
                        4,
                        t4(
                            vec![p("X~", &[0]), p("Z~", &[1]), p("X~", &[2]), p("Z~", &[3])],
                            false,
                        ),
                        &[(1, 1), (2, 0), (3, 0)],
                        &[(1, 0), (2, 0), (3, 0)],
                    ),
                    gadget(
                        "j",
                        4,
                        t4(
                            vec![p("Y~", &[0]), p("X~", &[1]), p("Y~", &[2]), p("X~", &[3])],
                            true,
                        ),
                        &[(1, 0), (2, 0), (3, 0)],
                        &[(1, 0), (2, 0), (3, 0)],
                    ),
                    gadget(
                        "j_inv",
                        4,
                        t4(
                            vec![p("Y~", &[0]), p("X~", &[1]), p("X~", &[2]), p("Y~", &[3])],
                            false,
                        ),
                        &[(1, 1), (2, 1), (3, 1)],
                        &[(1, 1), (2, 1), (3, 1)],
                    ),
                ],
            })
        }
        _ => Err(CatalogError::NoTable(spec.display())),
    }
}

/// Generator-set cases with published tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PublishedCase {
    Iqp,
    Ccc,
    CzzA(f64),
    CzzB(f64),
    T4p,
}

pub fn lattice_distance(x: f64, step: f64) -> f64 {
    let k = (x / step).round();
    (x - k * step).abs()
}

fn select(table: &GadgetTable, names: &[&str]) -> Vec<Gadget> {
    names
        .iter()
        .map(|n| {
            table
                .gadgets
                .iter()
                .find(|g| g.name == *n)
                .expect("table entry")
                .clone()
        })
        .collect()
}

/// Assembles the published generator sets by contracting their gadget tables.
pub fn published_generator_set(
    case: &PublishedCase,
    tol: &Tolerance,
) -> Result<GeneratorSet, CatalogError> {
    match case {
        PublishedCase::Iqp => {
            let table = gadget_table(&FamilySpec::iqp())?;
            Ok(build_generator_set(&table.gadgets, &table.gate_set, tol)?)
        }
        PublishedCase::Ccc => {
            let table = gadget_table(&FamilySpec::ccc())?;
            Ok(build_generator_set(&table.gadgets, &table.gate_set, tol)?)
        }
        PublishedCase::T4p => {
            let table = gadget_table(&FamilySpec::t4p())?;
            Ok(build_generator_set(&table.gadgets, &table.gate_set, tol)?)
        }
        PublishedCase::CzzA(theta) | PublishedCase::CzzB(theta) => {
            let theta = theta.rem_euclid(2.0 * PI);
            let in_a = theta > FRAC_PI_2 && theta < 3.0 * FRAC_PI_2;
            let names: &[&str] = match case {
                PublishedCase::CzzA(_) => {
                    if !in_a {
                        return Err(CatalogError::ThetaOutOfInterval {
                            theta,
                            interval: "(pi/2, 3pi/2)",
                            case: "CZ+Z interval A".into(),
                        });
                    }
                    &[
                        "c0", "c0_inv", "c1", "c1_inv", "c3", "c3_inv", "c4", "c4_inv",
                    ]
                }
                PublishedCase::CzzB(_) => {
                    if in_a {
                        return Err(CatalogError::ThetaOutOfInterval {
                            theta,
                            interval: "[0, pi/2] U [3pi/2, 2pi)",
                            case: "CZ+Z interval B".into(),
                        });
                    }
                    &[
                        "c0", "c0_inv", "c2", "c2_inv", "c3", "c3_inv", "c4", "c4_inv",
                    ]
                }
                _ => unreachable!(),
            };
            // the angle lattice is carved out of both intervals: right at it
            // the two-wire gadgets are singular, and inside the warn band
            // their normalized actions are no longer trustworthy
            if lattice_distance(theta, FRAC_PI_2) <= tol.warn_band {
                return Err(CatalogError::DegenerateGadget {
                    name: "c3".into(),
                    det_norm: theta.cos().abs(),
                });
            }
            let table = gadget_table(&FamilySpec::cz_z(theta))?;
            Ok(build_generator_set(
                &select(&table, names),
                &table.gate_set,
                tol,
            )?)
        }
    }
}

/// The 24 single-qubit Clifford operators modulo phase, as ⟨H,S⟩ words.
pub fn clifford_mod_phase() -> Vec<(String, CMat)> {
    let h = hadamard();
    let s = t_power(2);
    let mut reps: Vec<(String, CMat)> = vec![("I".into(), CMat::identity(2))];
    let mut frontier = reps.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (word, m) in &frontier {
            for (gname, gmat) in [("H", &h), ("S", &s)] {
                let prod = m.mat_mul(gmat).expect("2x2");
                let new_word = if word == "I" {
                    gname.to_string()
                } else {
                    format!("{word}{gname}")
                };
                let known = reps
                    .iter()
                    .chain(next.iter())
                    .any(|(_, r)| phase_aligned_diff(r, &prod) < 1e-9);
                if !known {
                    next.push((new_word, prod));
                }
            }
        }
        reps.extend(next.iter().cloned());
        frontier = next;
    }
    assert_eq!(reps.len(), 24, "single-qubit Clifford group mod phase");
    reps
}

/// Entry-wise distance after aligning global phase on the largest entry.
pub fn phase_aligned_diff(a: &CMat, b: &CMat) -> f64 {
    let pivot = (0..a.dim() * a.dim())
        .max_by(|&i, &j| {
            a.entries()[i]
                .norm()
                .partial_cmp(&a.entries()[j].norm())
                .expect("finite")
        })
        .expect("nonempty");
    let za = a.entries()[pivot];
    let zb = b.entries()[pivot];
    if za.norm() < 1e-12 || zb.norm() < 1e-12 {
        return a.max_diff(b).min(f64::INFINITY);
    }
    let phase = za / za.norm() * (zb / zb.norm()).conj();
    b.scale(phase).max_diff(a)
}

/// The 48-element image of ⟨H,S⟩ after unit-determinant normalization
/// (generated by H̃ = iH/… and S̃ = e^{−iπ/4}S), i.e. the binary octahedral
/// group inside SU(2).
pub fn normalized_clifford_image() -> Vec<CMat> {
    let h_tilde = hadamard().scale(I);
    let s_tilde = t_power(2).scale(Complex::from_polar(1.0, -FRAC_PI_4));
    let mut group = vec![CMat::identity(2)];
    let mut frontier = group.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for m in &frontier {
            for g in [&h_tilde, &s_tilde] {
                let prod = m.mat_mul(g).expect("2x2");
                let known = group
                    .iter()
                    .chain(next.iter())
                    .any(|r| r.max_diff(&prod) < 1e-9);
                if !known {
                    next.push(prod);
                }
            }
        }
        group.extend(next.iter().cloned());
        frontier = next;
    }
    assert_eq!(group.len(), 48, "binary octahedral group");
    group
}

/// e^{iα} Rz(φ) Rx(θ) Rz(λ).
pub fn u_from_euler(alpha: f64, phi: f64, theta: f64, lambda: f64) -> CMat {
    rz(phi)
        .mat_mul(&rx(theta))
        .expect("2x2")
        .mat_mul(&rz(lambda))
        .expect("2x2")
        .scale(Complex::from_polar(1.0, alpha))
}

/// The printed normalized-action matrices and determinant closed forms.
pub mod printed {
    use super::*;

    /// (1/(2e^{iπ/8})) [[1+e^{iπ/4}, 1−e^{iπ/4}], [1−e^{iπ/4}, 1+e^{iπ/4}]]
    pub fn iqp_a() -> CMat {
        let w = Complex::from_polar(1.0, FRAC_PI_4);
        let scale = (re(2.0) * Complex::from_polar(1.0, PI / 8.0)).inv();
        CMat::two(ONE + w, ONE - w, ONE - w, ONE + w).scale(scale)
    }

    /// (1/√2) [[e^{iπ/8}, −e^{iπ/8}], [e^{−iπ/8}, e^{−iπ/8}]]
    pub fn iqp_b() -> CMat {
        let w = Complex::from_polar(1.0, PI / 8.0);
        CMat::two(w, -w, w.conj(), w.conj()).scale(re(1.0 / SQRT_2))
    }

    /// (1/√(1−i)) [[1, e^{iπ/4}], [e^{iπ/4}, 1]]
    pub fn iqp_c() -> CMat {
        let w = Complex::from_polar(1.0, FRAC_PI_4);
        let scale = c(1.0, -1.0).sqrt().inv();
        CMat::two(ONE, w, w, ONE).scale(scale)
    }

    /// (1/(4√2)) [[−5i, 3√3], [−3√3, i]]
    pub fn ccc_d() -> CMat {
        let r3 = 3.0f64.sqrt();
        CMat::two(c(0.0, -5.0), re(3.0 * r3), re(-3.0 * r3), I).scale(re(1.0 / (4.0 * SQRT_2)))
    }

    /// (1/(2√6)) [[5, 3i√3], [i√3, 3]]
    pub fn ccc_e() -> CMat {
        let r3 = 3.0f64.sqrt();
        CMat::two(re(5.0), c(0.0, 3.0 * r3), c(0.0, r3), re(3.0))
            .scale(re(1.0 / (2.0 * 6.0f64.sqrt())))
    }

    /// (1/(4√2)) [[5, −i√3], [i√3, 7]]
    pub fn ccc_f() -> CMat {
        let r3 = 3.0f64.sqrt();
        CMat::two(re(5.0), c(0.0, -r3), c(0.0, r3), re(7.0)).scale(re(1.0 / (4.0 * SQRT_2)))
    }

    /// (1/(2√2)) [[2−i, √3], [−√3, 2+i]]
    pub fn t4p_h() -> CMat {
        let r3 = 3.0f64.sqrt();
        CMat::two(c(2.0, -1.0), re(r3), re(-r3), c(2.0, 1.0)).scale(re(1.0 / (2.0 * SQRT_2)))
    }

    /// (1/√5) [[2−i, 0], [−(2+4i)√3/5, 2+i]]
    ///
    /// The published display garbles the lower row (it breaks det = 1); this
    /// is the unique lower-triangular matrix consistent with the published
    /// β(I) = −4/5, γ(H,I) = −36/125 + 48i/125, and the gadget contraction.
    pub fn t4p_i() -> CMat {
        let r5 = 5.0f64.sqrt();
        let r15 = 15.0f64.sqrt();
        CMat::two(
            c(2.0 / r5, -1.0 / r5),
            ZERO,
            c(-2.0 * r15 / 25.0, -4.0 * r15 / 25.0),
            c(2.0 / r5, 1.0 / r5),
        )
    }

    /// (1/10) [[−3√3·i, −11], [11, −7i/√3]]
    pub fn t4p_j() -> CMat {
        let r3 = 3.0f64.sqrt();
        CMat::two(c(0.0, -3.0 * r3), re(-11.0), re(11.0), c(0.0, -7.0 / r3)).scale(re(0.1))
    }

    pub fn czz_c0(theta: f64) -> CMat {
        let (s, cs) = theta.sin_cos();
        let csc2 = 1.0 / (s * s);
        let half = theta / 2.0;
        CMat::two(
            re((-cs + 2.0 * (2.0 * theta).cos() + (3.0 * theta).cos() + 6.0) * csc2),
            c(0.0, 4.0 * s * cs / (cs - 1.0)),
            c(0.0, 2.0 * s * cs / (half.sin() * half.sin())),
            re(4.0 * (cs + 1.0)),
        )
        .scale(re(0.25))
    }

    /// Raw action of c1 (normalization divides by √det).
    pub fn czz_raw_c1(theta: f64) -> CMat {
        let cs = theta.cos();
        let odd = theta.sin() + 2.0 * (2.0 * theta).sin() + (3.0 * theta).sin();
        CMat::two(
            re(-cs + 2.0 * (2.0 * theta).cos() + (3.0 * theta).cos() + 6.0),
            c(0.0, -odd),
            c(0.0, odd),
            re(-7.0 * cs - 2.0 * (2.0 * theta).cos() - (3.0 * theta).cos() + 2.0),
        )
        .scale(re(0.125))
    }

    pub fn czz_c1(theta: f64) -> CMat {
        let tol = Tolerance::default();
        let det = re(det_c1(theta));
        let root = crate::linalg::principal_root(det, 2, &tol).expect("nonzero in interval A");
        czz_raw_c1(theta).scale(root.inv())
    }

    pub fn czz_raw_c2(theta: f64) -> CMat {
        let cs = theta.cos();
        let s = theta.sin();
        let odd = s - 2.0 * (2.0 * theta).sin() + (3.0 * theta).sin();
        let half = theta / 2.0;
        CMat::two(
            re(7.0 * cs - 2.0 * (2.0 * theta).cos() + (3.0 * theta).cos() + 2.0),
            c(0.0, -odd),
            c(0.0, -8.0 * half.sin() * half.sin() * s * cs),
            re(cs + 2.0 * (2.0 * theta).cos() - (3.0 * theta).cos() + 6.0),
        )
        .scale(re(0.125))
    }

    pub fn czz_c2(theta: f64) -> CMat {
        let tol = Tolerance::default();
        let det = re(det_c2(theta));
        let root = crate::linalg::principal_root(det, 2, &tol).expect("nonzero in interval B");
        czz_raw_c2(theta).scale(root.inv())
    }

    pub fn czz_c3(theta: f64) -> CMat {
        let tol = Tolerance::default();
        let (s, cs) = theta.sin_cos();
        let half = theta / 2.0;
        let sh2 = half.sin() * half.sin();
        let root = crate::linalg::principal_root(re(cs), 2, &tol).expect("away from pi/2 lattice");
        CMat::two(
            re(((2.0 * theta).cos() + 3.0) / 4.0),
            c(0.0, sh2 * s),
            c(0.0, -sh2 * s),
            re((s * s + 2.0 * cs) / 2.0),
        )
        .scale(root.inv())
    }

    pub fn czz_c4(theta: f64) -> CMat {
        let tol = Tolerance::default();
        let (s, cs) = theta.sin_cos();
        let sec = 1.0 / cs;
        let root = crate::linalg::principal_root(re(-cs), 2, &tol).expect("away from pi/2 lattice");
        CMat::two(
            re(-0.5 * ((2.0 * theta).cos() + 3.0) * sec),
            c(0.0, s + theta.tan()),
            c(0.0, -(s + theta.tan())),
            re(0.5 * (4.0 * cs + (2.0 * theta).cos() - 1.0) * sec),
        )
        .scale(root.scale(0.5))
    }

    /// i·Rx(θ)·Z·Rx(−θ) = [[i cosθ, sinθ], [−sinθ, −i cosθ]]
    pub fn cz_lemma_action(theta: f64) -> CMat {
        let (s, cs) = theta.sin_cos();
        CMat::two(c(0.0, cs), re(s), re(-s), c(0.0, -cs))
    }

    pub fn det_c0(theta: f64) -> f64 {
        theta.sin().powi(4) / 4.0
    }

    pub fn det_c1(theta: f64) -> f64 {
        (5.0 - 28.0 * theta.cos()
            - 4.0 * (2.0 * theta).cos()
            - 4.0 * (3.0 * theta).cos()
            - (4.0 * theta).cos())
            / 32.0
    }

    pub fn det_c2(theta: f64) -> f64 {
        (5.0 + 28.0 * theta.cos() - 4.0 * (2.0 * theta).cos() + 4.0 * (3.0 * theta).cos()
            - (4.0 * theta).cos())
            / 32.0
    }

    pub fn det_c3(theta: f64) -> f64 {
        theta.cos()
    }

    pub fn det_c4(theta: f64) -> f64 {
        -theta.cos()
    }

    /// det 𝒜(g) for the CZ-only gadget.
    pub fn det_cz_g(theta: f64) -> f64 {
        -theta.sin().powi(4) / 4.0
    }

    /// Zero loci of det c1 / det c2 inside [0, 2π): 2·atan(√(√2 ∓ 1)).
    pub fn c1_zero() -> f64 {
        2.0 * (SQRT_2 - 1.0).sqrt().atan()
    }

    pub fn c2_zero() -> f64 {
        2.0 * (SQRT_2 + 1.0).sqrt().atan()
    }
}
