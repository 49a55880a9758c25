//! Naive gadget search: enumerate small single-qubit post-selection gadgets
//! over a gate set, pool their normalized actions, and hunt for an
//! inverse-closed subset that the density pipeline certifies.
//!
//! Enumeration order is fully deterministic (qubits, depth, placements,
//! ancilla and post-selection patterns, all ascending), so runs are
//! reproducible across thread counts and resumable from a cursor.

use crate::circuit::{Circuit, GateSet, Placement};
use crate::criterion::{density_pipeline, CriterionReport, Overall, PipelineOptions};
use crate::gadget::{
    build_generator_set, check_inverse_closure, compute_action, Gadget, GeneratorSet,
};
use crate::linalg::{CMat, Tolerance};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::collections::HashSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBounds {
    /// Gadget width j (k = 1 output qubit is fixed).
    pub max_qubits: usize,
    /// Moments per circuit.
    pub max_depth: usize,
    /// Cap on the generator subset handed to the pipeline.
    pub max_set: usize,
    /// Grid for the ±1-canonical action fingerprint.
    pub dedupe_eps: f64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_qubits: 3,
            max_depth: 4,
            max_set: 8,
            dedupe_eps: 1e-6,
        }
    }
}

/// Enumeration coordinates of a candidate, printable as "j.d.circuit.dress".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cursor {
    pub qubits: usize,
    pub depth: usize,
    pub circuit: u64,
    pub dress: u64,
}

impl Cursor {
    pub fn start() -> Self {
        Cursor {
            qubits: 1,
            depth: 0,
            circuit: 0,
            dress: 0,
        }
    }

    pub fn render(&self) -> String {
        format!(
            "{}.{}.{}.{}",
            self.qubits, self.depth, self.circuit, self.dress
        )
    }

    pub fn parse(s: &str) -> Option<Cursor> {
        let mut it = s.split('.');
        let qubits = it.next()?.parse().ok()?;
        let depth = it.next()?.parse().ok()?;
        let circuit = it.next()?.parse().ok()?;
        let dress = it.next()?.parse().ok()?;
        if it.next().is_some() {
            return None;
        }
        Some(Cursor {
            qubits,
            depth,
            circuit,
            dress,
        })
    }
}

fn placements_for(set: &GateSet, qubits: usize) -> Vec<Placement> {
    let mut out = Vec::new();
    for gate in set.gates() {
        if gate.arity > qubits {
            continue;
        }
        let mut targets = vec![0usize; gate.arity];
        ordered_tuples(qubits, gate.arity, &mut targets, 0, &mut |t| {
            out.push(Placement::new(gate.name.clone(), t.to_vec()));
        });
    }
    out
}

/// All non-empty moments (sets of placements with pairwise disjoint
/// targets), in depth-first lexicographic order over placement indices.
fn moments_for(set: &GateSet, qubits: usize) -> Vec<Vec<Placement>> {
    let placements = placements_for(set, qubits);
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn descend(
        placements: &[Placement],
        stack: &mut Vec<usize>,
        from: usize,
        out: &mut Vec<Vec<Placement>>,
    ) {
        for i in from..placements.len() {
            let disjoint = stack.iter().all(|&j| {
                placements[j]
                    .targets
                    .iter()
                    .all(|t| !placements[i].targets.contains(t))
            });
            if !disjoint {
                continue;
            }
            stack.push(i);
            out.push(stack.iter().map(|&j| placements[j].clone()).collect());
            descend(placements, stack, i + 1, out);
            stack.pop();
        }
    }
    descend(&placements, &mut stack, 0, &mut out);
    out
}

fn ordered_tuples(
    n: usize,
    k: usize,
    scratch: &mut [usize],
    pos: usize,
    emit: &mut impl FnMut(&[usize]),
) {
    if pos == k {
        emit(scratch);
        return;
    }
    for v in 0..n {
        if scratch[..pos].contains(&v) {
            continue;
        }
        scratch[pos] = v;
        ordered_tuples(n, k, scratch, pos + 1, emit);
    }
}

/// Ancilla/post-selection dressing index space for a j-qubit, k = 1 gadget:
/// input qubit × ancilla bits × output qubit × post-selection bits.
fn dress_count(qubits: usize) -> u64 {
    let patterns = 1u64 << (qubits - 1);
    (qubits as u64) * patterns * (qubits as u64) * patterns
}

fn dress(qubits: usize, index: u64) -> (BTreeMap<usize, u8>, BTreeMap<usize, u8>) {
    let patterns = 1u64 << (qubits - 1);
    let b_bits = index % patterns;
    let rest = index / patterns;
    let output_q = (rest % qubits as u64) as usize;
    let rest = rest / qubits as u64;
    let a_bits = rest % patterns;
    let input_q = (rest / patterns) as usize;
    let assign = |skip: usize, bits: u64| -> BTreeMap<usize, u8> {
        (0..qubits)
            .filter(|&q| q != skip)
            .enumerate()
            .map(|(pos, q)| (q, ((bits >> pos) & 1) as u8))
            .collect()
    };
    (assign(input_q, a_bits), assign(output_q, b_bits))
}

fn circuit_at(menu: &[Vec<Placement>], depth: usize, mut index: u64) -> Circuit {
    let base = menu.len() as u64;
    let mut moments = Vec::with_capacity(depth);
    for _ in 0..depth {
        let choice = (index % base) as usize;
        index /= base;
        moments.push(menu[choice].clone());
    }
    Circuit::new(0, moments) // qubit count patched by the caller
}

/// Deterministic stream of structurally valid single-qubit-output gadgets.
pub fn enumerate_gadgets<'a>(
    set: &'a GateSet,
    bounds: &'a SearchBounds,
) -> impl Iterator<Item = (Cursor, Gadget)> + 'a {
    EnumState {
        set,
        bounds,
        cursor: Cursor::start(),
        moments: moments_for(set, 1),
        done: false,
    }
}

struct EnumState<'a> {
    set: &'a GateSet,
    bounds: &'a SearchBounds,
    cursor: Cursor,
    moments: Vec<Vec<Placement>>,
    done: bool,
}

impl EnumState<'_> {
    fn circuits_at_depth(&self) -> u64 {
        (self.moments.len() as u64).pow(self.cursor.depth as u32)
    }

    fn advance(&mut self) {
        let circuits = self.circuits_at_depth();
        let c = &mut self.cursor;
        c.dress += 1;
        if c.dress < dress_count(c.qubits) {
            return;
        }
        c.dress = 0;
        c.circuit += 1;
        if c.circuit < circuits {
            return;
        }
        c.circuit = 0;
        c.depth += 1;
        if c.depth <= self.bounds.max_depth && !self.moments.is_empty() {
            return;
        }
        c.depth = 0;
        c.qubits += 1;
        if c.qubits > self.bounds.max_qubits {
            self.done = true;
            return;
        }
        self.moments = moments_for(self.set, c.qubits);
    }

    /// Jumps the stream to a parsed cursor position.
    fn seek(&mut self, to: Cursor) {
        if to.qubits > self.bounds.max_qubits {
            self.done = true;
            return;
        }
        self.cursor = to;
        self.moments = moments_for(self.set, to.qubits);
    }
}

impl Iterator for EnumState<'_> {
    type Item = (Cursor, Gadget);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.done {
                return None;
            }
            if self.moments.is_empty() && self.cursor.depth > 0 {
                // no placements fit this width; only the empty circuit exists
                self.advance();
                continue;
            }
            let cursor = self.cursor;
            let mut circuit = circuit_at(&self.moments, cursor.depth, cursor.circuit);
            circuit.qubits = cursor.qubits;
            let (ancilla, postselect) = dress(cursor.qubits, cursor.dress);
            let gadget = Gadget::new(
                format!("g{}", cursor.render()),
                circuit,
                ancilla,
                postselect,
            );
            self.advance();
            return Some((cursor, gadget));
        }
    }
}

/// ±1-canonical rounded fingerprint of a 2×2 action.
fn fingerprint(m: &CMat, grid: f64) -> [i64; 8] {
    let entries = m.entries();
    let mut sign = 1.0f64;
    for z in entries {
        if z.re.abs() > 100.0 * grid {
            sign = z.re.signum();
            break;
        }
        if z.im.abs() > 100.0 * grid {
            sign = z.im.signum();
            break;
        }
    }
    let mut key = [0i64; 8];
    for (i, z) in entries.iter().enumerate() {
        key[2 * i] = (sign * z.re / grid).round() as i64;
        key[2 * i + 1] = (sign * z.im / grid).round() as i64;
    }
    key
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Witness {
    pub generators: GeneratorSet,
    pub report: CriterionReport,
    pub gadgets: Vec<Gadget>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub witness: Option<Witness>,
    /// Gadget actions evaluated (the budget actually spent).
    pub evaluated: u64,
    /// Cursor of the next unevaluated candidate; feed back to resume.
    pub cursor: String,
    pub pool_size: usize,
    /// Set when the gate set has no entangling gate: the advantage theorem
    /// presumes one, so a witness only certifies the group-theoretic part.
    pub caveat_no_entangler: bool,
}

struct PoolEntry {
    label: String,
    action: CMat,
    gadget: Gadget,
    closed: bool,
}

/// Streams candidates, pools deduplicated invertible normalized actions,
/// and runs the density pipeline on growing ±inverse-closed subsets. Returns
/// the first witness whose cold re-verification is DENSE.
pub fn find_witnesses(
    set: &GateSet,
    bounds: &SearchBounds,
    tol: &Tolerance,
    workers: usize,
    resume: Option<&str>,
) -> SearchOutcome {
    let workers = workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");

    let mut stream = EnumState {
        set,
        bounds,
        cursor: Cursor::start(),
        moments: moments_for(set, 1),
        done: false,
    };
    if let Some(token) = resume.and_then(Cursor::parse) {
        stream.seek(token);
    }

    let mut seen: HashSet<[i64; 8]> = HashSet::new();
    let mut entries: Vec<PoolEntry> = Vec::new();
    let mut evaluated = 0u64;
    let mut next_cursor = stream.cursor;
    let chunk_size = 256;

    loop {
        let chunk: Vec<(Cursor, Gadget)> = stream.by_ref().take(chunk_size).collect();
        if chunk.is_empty() {
            break;
        }
        next_cursor = stream.cursor;
        // per-candidate evaluation is pure; order restored by collect
        let actions: Vec<Option<CMat>> = pool.install(|| {
            use rayon::prelude::*;
            chunk
                .par_iter()
                .map(|(_, gadget)| {
                    compute_action(gadget, set, tol)
                        .ok()
                        .and_then(|a| a.normalized)
                })
                .collect()
        });
        evaluated += chunk.len() as u64;

        for ((_, gadget), action) in chunk.into_iter().zip(actions) {
            let Some(action) = action else { continue };
            let key = fingerprint(&action, bounds.dedupe_eps);
            if !seen.insert(key) {
                continue;
            }
            let label = gadget.name.clone();
            entries.push(PoolEntry {
                label,
                action,
                gadget,
                closed: false,
            });
            let newcomer = entries.len() - 1;
            if !pair_up(&mut entries, newcomer, tol) {
                continue;
            }
            // Closure grew. The three scans are existential in the generator
            // set, so DENSE is monotone under adding generators: test the
            // whole closed sub-pool and, on success, shrink the witness back
            // to the firing pairs plus their ±inverse partners.
            let closed: Vec<usize> = entries
                .iter()
                .enumerate()
                .filter(|(_, e)| e.closed)
                .map(|(i, _)| i)
                .collect();
            let full = GeneratorSet::new(
                closed
                    .iter()
                    .map(|&i| (entries[i].label.clone(), entries[i].action.clone()))
                    .collect(),
            );
            let Ok(report) = density_pipeline(&full, tol, &PipelineOptions::default()) else {
                continue;
            };
            if report.overall != Overall::Dense {
                continue;
            }
            let core_labels: Vec<&String> = report
                .elementary
                .witness
                .iter()
                .chain(report.discrete.witness.iter())
                .chain(report.loxodromic.witness.iter())
                .collect();
            let matches = check_inverse_closure(&full, tol).matches;
            let mut keep: Vec<usize> = Vec::new();
            for &i in &closed {
                let label = &entries[i].label;
                let wanted = core_labels.contains(&label)
                    || matches.iter().any(|m| {
                        core_labels.contains(&&m.label)
                            && m.matched_by.as_ref().is_some_and(|(p, _)| p == label)
                    });
                if wanted {
                    keep.push(i);
                }
            }
            if keep.len() > bounds.max_set {
                continue;
            }
            // cold re-verification from the gadgets themselves
            let gadgets: Vec<Gadget> = keep.iter().map(|&i| entries[i].gadget.clone()).collect();
            let Ok(cold) = build_generator_set(&gadgets, set, tol) else {
                continue;
            };
            if !check_inverse_closure(&cold, tol).closed {
                continue;
            }
            let Ok(cold_report) = density_pipeline(&cold, tol, &PipelineOptions::default()) else {
                continue;
            };
            if cold_report.overall != Overall::Dense {
                continue;
            }
            return SearchOutcome {
                witness: Some(Witness {
                    generators: cold,
                    report: cold_report,
                    gadgets,
                }),
                evaluated,
                cursor: next_cursor.render(),
                pool_size: entries.len(),
                caveat_no_entangler: !set.has_entangler(),
            };
        }
    }

    SearchOutcome {
        witness: None,
        evaluated,
        cursor: next_cursor.render(),
        pool_size: entries.len(),
        caveat_no_entangler: !set.has_entangler(),
    }
}

/// Marks `newcomer` and any partner as closed when the pool contains an
/// element equal to ±newcomer⁻¹. Returns true when the closed set grew.
fn pair_up(entries: &mut [PoolEntry], newcomer: usize, tol: &Tolerance) -> bool {
    let Ok(inv) = entries[newcomer].action.inverse2(tol) else {
        return false;
    };
    let mut grew = false;
    for other in 0..entries.len() {
        let d = entries[other].action.max_diff_up_to_sign(&inv);
        if d <= 10.0 * tol.eq_eps {
            grew |= !entries[other].closed || !entries[newcomer].closed;
            entries[other].closed = true;
            entries[newcomer].closed = true;
        }
    }
    grew
}
