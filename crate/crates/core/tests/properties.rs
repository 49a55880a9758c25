//! Property-based invariants for the algebraic core.

use loxodrome_core::catalog;
use loxodrome_core::circuit::{apply_to_basis, assemble_unitary, Circuit, GateSet, Placement};
use loxodrome_core::gadget::compute_action;
use loxodrome_core::linalg::{approx_eq, principal_root, CMat, Complex, Tolerance, ONE};
use proptest::prelude::*;

fn complex_strategy(scale: f64) -> impl Strategy<Value = Complex> {
    (-scale..scale, -scale..scale).prop_map(|(re, im)| Complex::new(re, im))
}

fn cmat_strategy(dim: usize, scale: f64) -> impl Strategy<Value = CMat> {
    prop::collection::vec(complex_strategy(scale), dim * dim).prop_map(move |entries| {
        let mut m = CMat::zero(dim);
        for (i, z) in entries.into_iter().enumerate() {
            m.set(i / dim, i % dim, z);
        }
        m
    })
}

proptest! {
    #[test]
    fn det_is_multiplicative(
        a in cmat_strategy(4, 0.8),
        b in cmat_strategy(4, 0.8),
        c in cmat_strategy(16, 0.5),
        d in cmat_strategy(16, 0.5),
    ) {
        let tol = Tolerance::default();
        for (x, y) in [(a, b), (c, d)] {
            let lhs = x.mat_mul(&y).unwrap().det();
            let rhs = x.det() * y.det();
            prop_assert!((lhs - rhs).norm() <= 100.0 * tol.eq_eps);
        }
    }

    #[test]
    fn principal_root_powers_back(
        z in complex_strategy(1.0),
        n in 1u32..8,
        magnitude in -12f64..3f64,
    ) {
        let tol = Tolerance::default();
        let z = if z.norm() < 1e-3 { z + Complex::new(0.5, 0.0) } else { z };
        let z = z / z.norm() * 10f64.powf(magnitude);
        prop_assume!(z.norm() > tol.det_eps);
        let r = principal_root(z, n, &tol).unwrap();
        let mut back = ONE;
        for _ in 0..n {
            back *= r;
        }
        prop_assert!((back - z).norm() <= 10.0 * tol.eq_eps * z.norm().max(1.0));
    }

    #[test]
    fn trace_is_similarity_invariant(a in cmat_strategy(2, 2.0), w in cmat_strategy(2, 2.0)) {
        let tol = Tolerance::default();
        prop_assume!(w.det().norm() > 1e-2);
        let w_inv = w.inverse2(&tol).unwrap();
        let conj = w.mat_mul(&a).unwrap().mat_mul(&w_inv).unwrap();
        prop_assert!((conj.trace() - a.trace()).norm() <= 100.0 * tol.eq_eps);
    }

    #[test]
    fn approx_eq_margin_is_distance(a in complex_strategy(3.0), b in complex_strategy(3.0)) {
        let tol = Tolerance::default();
        let (eq, margin) = approx_eq(a, b, &tol);
        prop_assert_eq!(eq, (a - b).norm() <= tol.eq_eps);
        prop_assert!((margin - (a - b).norm()).abs() < 1e-15);
    }

    #[test]
    fn moment_split_leaves_unitary_alone(seed in 0u64..500) {
        // split any fused two-placement moment into two sequential moments
        let set = iqp_like_set();
        let (fused, split) = split_pair(seed, &set);
        let a = assemble_unitary(&fused, &set).unwrap();
        let b = assemble_unitary(&split, &set).unwrap();
        let tol = Tolerance::default();
        prop_assert!(a.max_diff(&b) <= 10.0 * tol.eq_eps);
    }
}

fn iqp_like_set() -> GateSet {
    GateSet::new(
        "props",
        vec![
            catalog::gate("H", &[]).unwrap(),
            catalog::gate("T", &[]).unwrap(),
            catalog::gate("CZ", &[]).unwrap(),
            catalog::gate("CNOT", &[]).unwrap(),
        ],
    )
}

fn split_pair(seed: u64, set: &GateSet) -> (Circuit, Circuit) {
    let singles = ["H", "T"];
    let g1 = singles[(seed % 2) as usize];
    let g2 = singles[((seed / 2) % 2) as usize];
    let q1 = (seed / 4) % 3;
    let q2 = (q1 + 1 + (seed / 12) % 2) % 3;
    let fused = Circuit::new(
        3,
        vec![vec![
            Placement::new(g1, vec![q1 as usize]),
            Placement::new(g2, vec![q2 as usize]),
        ]],
    );
    let split = Circuit::new(
        3,
        vec![
            vec![Placement::new(g1, vec![q1 as usize])],
            vec![Placement::new(g2, vec![q2 as usize])],
        ],
    );
    let _ = set;
    (fused, split)
}

/// Serial concatenation of single-qubit gadgets with disjoint post-selection
/// multiplies raw actions.
#[test]
fn gadget_actions_compose_serially() {
    use loxodrome_core::catalog::FamilySpec;
    use loxodrome_core::gadget::Gadget;
    use std::collections::BTreeMap;
    use std::f64::consts::PI;

    let tol = Tolerance::default();
    let table = catalog::gadget_table(&FamilySpec::cz_z(2.0 * PI / 3.0)).unwrap();
    let pick = |name: &str| {
        table
            .gadgets
            .iter()
            .find(|g| g.name == name)
            .unwrap()
            .clone()
    };
    for (first, second) in [("c3", "c4"), ("c4", "c3"), ("c3", "c3_inv")] {
        let g1 = pick(first);
        let g2 = pick(second);
        // g1 acts on wires {0,1}, g2 remapped onto wires {0,2}
        let remap = |c: &Circuit, to: usize| -> Vec<Vec<Placement>> {
            c.moments
                .iter()
                .map(|m| {
                    m.iter()
                        .map(|p| {
                            Placement::new(
                                p.gate.clone(),
                                p.targets
                                    .iter()
                                    .map(|&t| if t == 1 { to } else { t })
                                    .collect(),
                            )
                        })
                        .collect()
                })
                .collect()
        };
        let mut moments = remap(&g1.circuit, 1);
        moments.extend(remap(&g2.circuit, 2));
        let mut ancilla = BTreeMap::new();
        ancilla.insert(1usize, g1.ancilla[&1]);
        ancilla.insert(2usize, g2.ancilla[&1]);
        let mut postselect = BTreeMap::new();
        postselect.insert(1usize, g1.postselect[&1]);
        postselect.insert(2usize, g2.postselect[&1]);
        let chained = Gadget::new(
            format!("{first}.{second}"),
            Circuit::new(3, moments),
            ancilla,
            postselect,
        );
        let a1 = compute_action(&g1, &table.gate_set, &tol).unwrap().raw;
        let a2 = compute_action(&g2, &table.gate_set, &tol).unwrap().raw;
        let chained_action = compute_action(&chained, &table.gate_set, &tol).unwrap().raw;
        let product = a2.mat_mul(&a1).unwrap();
        assert!(
            chained_action.max_diff(&product) <= 100.0 * tol.eq_eps,
            "{first};{second}: {:.3e}",
            chained_action.max_diff(&product)
        );
    }
}

/// Assembled circuit unitaries stay unitary across the catalog tables.
#[test]
fn catalog_assemblies_are_unitary() {
    use loxodrome_core::catalog::FamilySpec;
    let tol = Tolerance::default();
    for spec in [
        FamilySpec::iqp(),
        FamilySpec::ccc(),
        FamilySpec::t4p(),
        FamilySpec::cz_z(1.234),
        FamilySpec::cz(0.777),
    ] {
        let table = catalog::gadget_table(&spec).unwrap();
        for gadget in &table.gadgets {
            let u = assemble_unitary(&gadget.circuit, &table.gate_set).unwrap();
            assert!(u.unitarity_error() <= 10.0 * tol.eq_eps, "{}", gadget.name);
        }
    }
}

/// Path equivalence between dense assembly and basis application on random
/// circuits over a catalog gate set, j ≤ 5.
#[test]
fn assembly_matches_basis_application() {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let tol = Tolerance::default();
    let set = iqp_like_set();
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..60 {
        let qubits = rng.gen_range(1..=5usize);
        let depth = rng.gen_range(0..=4usize);
        let mut moments = Vec::new();
        for _ in 0..depth {
            let gate = set.gates()[rng.gen_range(0..set.gates().len())].clone();
            if gate.arity > qubits {
                continue;
            }
            let mut targets = Vec::new();
            while targets.len() < gate.arity {
                let t = rng.gen_range(0..qubits);
                if !targets.contains(&t) {
                    targets.push(t);
                }
            }
            moments.push(vec![Placement::new(gate.name.clone(), targets)]);
        }
        let circuit = Circuit::new(qubits, moments);
        let u = assemble_unitary(&circuit, &set).unwrap();
        for x in 0..(1usize << qubits) {
            let state = apply_to_basis(&circuit, &set, x).unwrap();
            for (row, amp) in state.iter().enumerate() {
                assert!((u.get(row, x) - amp).norm() <= 100.0 * tol.eq_eps);
            }
        }
    }
}
