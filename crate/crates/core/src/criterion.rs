//! The SL(2;ℂ) subgroup analysis: trace invariants, the elementarity and
//! discreteness tests, strict loxodromy, and the density pipeline that
//! combines them.
//!
//! All three algorithms are one-sided. `NO` from the elementarity or
//! discreteness scan and `YES` from the loxodromy scan are certificates;
//! `IDK` means the generator-pair tests were silent, not that the property
//! holds. Comparisons are three-valued: verdicts are taken at `eq_eps`,
//! anything landing inside `warn_band` of a threshold is recorded as a
//! near-boundary warning, and the strict `< 1` firings are additionally
//! suppressed inside the warn band so that a borderline quantity can never
//! flip a verdict toward DENSE.

use crate::gadget::{check_inverse_closure, GeneratorSet};
use crate::linalg::{CMat, Complex, LinalgError, Tolerance};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriterionError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("generator set is not closed under ±inverses; unmatched: {unmatched:?}")]
    NotInverseClosed { unmatched: Vec<String> },
    #[error("word depth {0} outside 1..=4")]
    BadWordDepth(usize),
}

/// β(g) = tr²(g) − 4.
pub fn beta(g: &CMat) -> Result<Complex, CriterionError> {
    if g.dim() != 2 {
        return Err(LinalgError::DimMismatch(g.dim(), 2).into());
    }
    let t = g.trace();
    Ok(t * t - Complex::new(4.0, 0.0))
}

/// γ(g, h) = tr(g h g⁻¹ h⁻¹) − 2, with explicit 2×2 inverses.
pub fn gamma(g: &CMat, h: &CMat, tol: &Tolerance) -> Result<Complex, CriterionError> {
    Ok(commutator_trace(g, h, tol)? - Complex::new(2.0, 0.0))
}

pub fn commutator_trace(g: &CMat, h: &CMat, tol: &Tolerance) -> Result<Complex, CriterionError> {
    if g.dim() != 2 {
        return Err(LinalgError::DimMismatch(g.dim(), 2).into());
    }
    let gi = g.inverse2(tol)?;
    let hi = h.inverse2(tol)?;
    let comm = g
        .mat_mul(h)?
        .mat_mul(&gi)
        .expect("dims agree")
        .mat_mul(&hi)
        .expect("dims agree");
    Ok(comm.trace())
}

/// |β(g)| + |γ(g,h)|, the left-hand side of Jørgensen's inequality.
pub fn jorgensen_lhs(g: &CMat, h: &CMat, tol: &Tolerance) -> Result<f64, CriterionError> {
    Ok(beta(g)?.norm() + gamma(g, h, tol)?.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairInvariants {
    pub beta_g: Complex,
    pub beta_h: Complex,
    pub gamma: Complex,
}

pub fn pair_invariants(
    g: &CMat,
    h: &CMat,
    tol: &Tolerance,
) -> Result<PairInvariants, CriterionError> {
    Ok(PairInvariants {
        beta_g: beta(g)?,
        beta_h: beta(h)?,
        gamma: gamma(g, h, tol)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    No,
    Yes,
    Idk,
}

/// A named re-checkable number attached to a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub re: f64,
    pub im: f64,
}

impl Quantity {
    fn complex(name: &str, z: Complex) -> Self {
        Quantity {
            name: name.into(),
            re: z.re,
            im: z.im,
        }
    }

    fn real(name: &str, x: f64) -> Self {
        Quantity {
            name: name.into(),
            re: x,
            im: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    /// Generator labels behind the verdict; empty when IDK.
    pub witness: Vec<String>,
    /// Identifier of the rule that fired (e.g. "J4", "T16", "LOX").
    pub rule: Option<String>,
    /// Distance from the deciding threshold.
    pub margin: f64,
    pub warnings: Vec<String>,
    pub quantities: Vec<Quantity>,
}

impl Verdict {
    fn idk(warnings: Vec<String>) -> Self {
        Verdict {
            outcome: Outcome::Idk,
            witness: Vec::new(),
            rule: None,
            margin: 0.0,
            warnings,
            quantities: Vec::new(),
        }
    }
}

/// Human-readable text of each discreteness rule, keyed by identifier.
pub fn rule_text(rule: &str) -> &'static str {
    match rule {
        "J4" => "|tr^2(g) - 4| + |tr([g,h]) - 2| < 1 on a non-elementary pair",
        "T6" => "tr([g,h]) != 1 and |tr^2(g) - 2| + |tr([g,h]) - 1| < 1",
        "T8" => "tr([g,h]) = 1, tr^2(g) != 2 and |tr^2(g) - 2| <= 1/2",
        "T10" => "tr^2(g) != 1 and |tr^2(g) - 1| + |tr([g,h])| < 1",
        "T12" => "tr^2(g) = 1, tr([g,h]) != 0 and |tr([g,h])| <= 1/2",
        "T14" => "tr^2(g) = 1, tr([g,h]) != 1 and |tr([g,h]) - 1| <= 1/2",
        "T16" => "tr([g,h]) != 1 and |tr^2(g) - tr([g,h])| + |tr([g,h]) - 1| < 1",
        "T18" => "tr([g,h]) = 1, tr^2(g) != 1 and |tr^2(g) - 1| <= 1/2",
        "BR" => "no Baribeau-Ransford elementarity condition holds",
        "LOX" => "tr(g) has non-zero imaginary part",
        _ => "unknown rule",
    }
}

/// Three-valued comparison helpers over one shared warning sink.
struct Gauge<'a> {
    tol: &'a Tolerance,
    warnings: Vec<String>,
}

impl<'a> Gauge<'a> {
    fn new(tol: &'a Tolerance) -> Self {
        Gauge {
            tol,
            warnings: Vec::new(),
        }
    }

    fn note(&mut self, what: String) {
        if self.warnings.len() < 64 {
            self.warnings.push(what);
        }
    }

    /// z = c at eq_eps, warning when the distance sits in the warn band.
    fn eq(&mut self, z: Complex, c: Complex, context: &str) -> bool {
        let d = (z - c).norm();
        if d > self.tol.eq_eps && d <= self.tol.warn_band {
            self.note(format!(
                "{context}: |z - c| = {d:.3e} is inside the warn band"
            ));
        }
        d <= self.tol.eq_eps
    }

    fn ne(&mut self, z: Complex, c: Complex, context: &str) -> bool {
        !self.eq(z, c, context)
    }

    /// Strict `value < threshold` firing, suppressed inside the warn band.
    fn lt(&mut self, value: f64, threshold: f64, context: &str) -> bool {
        let d = (value - threshold).abs();
        if d <= self.tol.warn_band {
            self.note(format!(
                "{context}: {value:.12} is within the warn band of {threshold}"
            ));
            return false;
        }
        value < threshold
    }

    /// Closed `value <= threshold` firing at eq_eps slack.
    fn le(&mut self, value: f64, threshold: f64, context: &str) -> bool {
        let d = (value - threshold).abs();
        if d <= self.tol.warn_band && d > self.tol.eq_eps {
            self.note(format!(
                "{context}: {value:.12} is within the warn band of {threshold}"
            ));
        }
        value <= threshold + self.tol.eq_eps
    }

    /// Real-interval membership |Im z| ≤ eps, Re z inside [lo, hi] widened by eps.
    fn in_interval(&mut self, z: Complex, lo: f64, hi: f64, context: &str) -> bool {
        let inside = z.im.abs() <= self.tol.eq_eps
            && z.re >= lo - self.tol.eq_eps
            && z.re <= hi + self.tol.eq_eps;
        let d = interval_distance(z, lo, hi);
        if !inside && d <= self.tol.warn_band {
            self.note(format!(
                "{context}: point is {d:.3e} outside [{lo}, {hi}], inside the warn band"
            ));
        }
        inside
    }
}

/// L∞ distance of a complex point from a real closed interval.
fn interval_distance(z: Complex, lo: f64, hi: f64) -> f64 {
    let re_out = if z.re < lo {
        lo - z.re
    } else if z.re > hi {
        z.re - hi
    } else {
        0.0
    };
    re_out.max(z.im.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub elementary: bool,
    /// For a NOT_ELEMENTARY pair, the least change to any invariant that
    /// would make some elementarity condition hold.
    pub margin: f64,
    pub invariants: PairInvariants,
    pub warnings: Vec<String>,
}

/// Baribeau–Ransford test: ⟨g,h⟩ is elementary iff one of the three trace
/// conditions holds.
pub fn is_elementary_pair(
    g: &CMat,
    h: &CMat,
    tol: &Tolerance,
) -> Result<PairVerdict, CriterionError> {
    let inv = pair_invariants(g, h, tol)?;
    let mut gauge = Gauge::new(tol);
    let four = Complex::new(-4.0, 0.0);

    let bg_in = gauge.in_interval(inv.beta_g, -4.0, 0.0, "beta(g) in [-4,0]");
    let bh_in = gauge.in_interval(inv.beta_h, -4.0, 0.0, "beta(h) in [-4,0]");
    let gamma_hi = 0.0;
    let gamma_lo = -(inv.beta_g.re * inv.beta_h.re) / 4.0;
    let gamma_lo = gamma_lo.min(gamma_hi);
    let cond_i = bg_in
        && bh_in
        && gauge.in_interval(inv.gamma, gamma_lo, gamma_hi, "gamma in [-bg*bh/4, 0]");

    let cond_ii = gauge.eq(inv.gamma, Complex::new(0.0, 0.0), "gamma = 0");

    let c3a = gauge.eq(inv.beta_g, inv.gamma, "beta(g) = gamma")
        && gauge.eq(inv.beta_h, four, "beta(h) = -4");
    let c3b = gauge.eq(inv.beta_g, four, "beta(g) = -4")
        && gauge.eq(inv.beta_h, inv.gamma, "beta(h) = gamma");
    let c3c =
        gauge.eq(inv.beta_g, four, "beta(g) = -4") && gauge.eq(inv.beta_h, four, "beta(h) = -4");
    let cond_iii = c3a || c3b || c3c;

    let elementary = cond_i || cond_ii || cond_iii;

    // distance-to-flip, the min over conditions of the worst violated part
    let d_i = interval_distance(inv.beta_g, -4.0, 0.0)
        .max(interval_distance(inv.beta_h, -4.0, 0.0))
        .max(interval_distance(inv.gamma, gamma_lo, gamma_hi));
    let d_ii = inv.gamma.norm();
    let d_iii = [
        (inv.beta_g - inv.gamma)
            .norm()
            .max((inv.beta_h - four).norm()),
        (inv.beta_g - four)
            .norm()
            .max((inv.beta_h - inv.gamma).norm()),
        (inv.beta_g - four).norm().max((inv.beta_h - four).norm()),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    let margin = d_i.min(d_ii).min(d_iii);

    Ok(PairVerdict {
        elementary,
        margin,
        invariants: inv,
        warnings: gauge.warnings,
    })
}

fn ordered_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
}

/// Algorithm `IsElementary`: NO with the first NOT_ELEMENTARY ordered pair of
/// generators, IDK otherwise.
pub fn is_elementary(gamma_set: &GeneratorSet, tol: &Tolerance) -> Result<Verdict, CriterionError> {
    let elems = &gamma_set.elements;
    let mut warnings = Vec::new();
    for (i, j) in ordered_pairs(elems.len()) {
        let (gl, g) = &elems[i];
        let (hl, h) = &elems[j];
        let pair = is_elementary_pair(g, h, tol)?;
        warnings.extend(pair.warnings.iter().cloned());
        if !pair.elementary {
            return Ok(Verdict {
                outcome: Outcome::No,
                witness: vec![gl.clone(), hl.clone()],
                rule: Some("BR".into()),
                margin: pair.margin,
                warnings: pair.warnings,
                quantities: vec![
                    Quantity::complex("beta_g", pair.invariants.beta_g),
                    Quantity::complex("beta_h", pair.invariants.beta_h),
                    Quantity::complex("gamma", pair.invariants.gamma),
                ],
            });
        }
    }
    Ok(Verdict::idk(warnings))
}

/// One firing of a discreteness rule; kept for the accumulate mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Firing {
    pub rule: String,
    pub witness: Vec<String>,
    pub quantity: f64,
    pub margin: f64,
}

/// (rule id, deciding quantity, margin, evidence) of a fired line.
type LineFire = (String, f64, f64, Vec<Quantity>);

fn discrete_pair_scan(
    g: &CMat,
    h: &CMat,
    tol: &Tolerance,
) -> Result<(Option<LineFire>, Vec<String>), CriterionError> {
    let one = Complex::new(1.0, 0.0);
    let two = Complex::new(2.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    let mut gauge = Gauge::new(tol);

    let tr_g = g.trace();
    let tr2_g = tr_g * tr_g;
    let tr_comm = commutator_trace(g, h, tol)?;
    let quantities = |lhs_name: &str, lhs: f64| {
        vec![
            Quantity::complex("tr2_g", tr2_g),
            Quantity::complex("tr_comm", tr_comm),
            Quantity::real(lhs_name, lhs),
        ]
    };

    // line 4: Jørgensen on a non-elementary pair
    let pair = is_elementary_pair(g, h, tol)?;
    gauge.warnings.extend(pair.warnings);
    if !pair.elementary {
        let lhs = pair.invariants.beta_g.norm() + pair.invariants.gamma.norm();
        if gauge.lt(lhs, 1.0, "J4") {
            return Ok((
                Some((
                    "J4".into(),
                    lhs,
                    1.0 - lhs,
                    quantities("jorgensen_lhs", lhs),
                )),
                gauge.warnings,
            ));
        }
    }

    // line 6
    if gauge.ne(tr_comm, one, "T6: tr([g,h]) != 1") {
        let lhs = (tr2_g - two).norm() + (tr_comm - one).norm();
        if gauge.lt(lhs, 1.0, "T6") {
            return Ok((
                Some(("T6".into(), lhs, 1.0 - lhs, quantities("tan_i_lhs", lhs))),
                gauge.warnings,
            ));
        }
    }

    // line 8
    if gauge.eq(tr_comm, one, "T8: tr([g,h]) = 1") && gauge.ne(tr2_g, two, "T8: tr^2(g) != 2") {
        let lhs = (tr2_g - two).norm();
        if gauge.le(lhs, 0.5, "T8") {
            return Ok((
                Some(("T8".into(), lhs, 0.5 - lhs, quantities("tan_ii_lhs", lhs))),
                gauge.warnings,
            ));
        }
    }

    // line 10
    if gauge.ne(tr2_g, one, "T10: tr^2(g) != 1") {
        let lhs = (tr2_g - one).norm() + tr_comm.norm();
        if gauge.lt(lhs, 1.0, "T10") {
            return Ok((
                Some(("T10".into(), lhs, 1.0 - lhs, quantities("tan_iii_lhs", lhs))),
                gauge.warnings,
            ));
        }
    }

    // lines 12 and 14
    if gauge.eq(tr2_g, one, "T12/T14: tr^2(g) = 1") {
        if gauge.ne(tr_comm, zero, "T12: tr([g,h]) != 0") {
            let lhs = tr_comm.norm();
            if gauge.le(lhs, 0.5, "T12") {
                return Ok((
                    Some(("T12".into(), lhs, 0.5 - lhs, quantities("tan_iva_lhs", lhs))),
                    gauge.warnings,
                ));
            }
        }
        if gauge.ne(tr_comm, one, "T14: tr([g,h]) != 1") {
            let lhs = (tr_comm - one).norm();
            if gauge.le(lhs, 0.5, "T14") {
                return Ok((
                    Some(("T14".into(), lhs, 0.5 - lhs, quantities("tan_ivb_lhs", lhs))),
                    gauge.warnings,
                ));
            }
        }
    }

    // line 16
    if gauge.ne(tr_comm, one, "T16: tr([g,h]) != 1") {
        let lhs = (tr2_g - tr_comm).norm() + (tr_comm - one).norm();
        if gauge.lt(lhs, 1.0, "T16") {
            return Ok((
                Some(("T16".into(), lhs, 1.0 - lhs, quantities("tan_v_lhs", lhs))),
                gauge.warnings,
            ));
        }
    }

    // line 18
    if gauge.eq(tr_comm, one, "T18: tr([g,h]) = 1") && gauge.ne(tr2_g, one, "T18: tr^2(g) != 1") {
        let lhs = (tr2_g - one).norm();
        if gauge.le(lhs, 0.5, "T18") {
            return Ok((
                Some(("T18".into(), lhs, 0.5 - lhs, quantities("tan_vi_lhs", lhs))),
                gauge.warnings,
            ));
        }
    }

    Ok((None, gauge.warnings))
}

/// Algorithm `IsDiscrete`: NO with the first pair and rule line that fires,
/// IDK otherwise. With `accumulate`, keeps scanning and returns every firing.
pub fn is_discrete_with(
    gamma_set: &GeneratorSet,
    tol: &Tolerance,
    accumulate: bool,
) -> Result<(Verdict, Vec<Firing>), CriterionError> {
    let elems = &gamma_set.elements;
    let mut warnings = Vec::new();
    let mut firings = Vec::new();
    let mut verdict: Option<Verdict> = None;
    for (i, j) in ordered_pairs(elems.len()) {
        let (gl, g) = &elems[i];
        let (hl, h) = &elems[j];
        let (fired, pair_warnings) = discrete_pair_scan(g, h, tol)?;
        if verdict.is_none() {
            warnings.extend(pair_warnings);
        }
        if let Some((rule, quantity, margin, quantities)) = fired {
            let witness = vec![gl.clone(), hl.clone()];
            firings.push(Firing {
                rule: rule.clone(),
                witness: witness.clone(),
                quantity,
                margin,
            });
            if verdict.is_none() {
                verdict = Some(Verdict {
                    outcome: Outcome::No,
                    witness,
                    rule: Some(rule),
                    margin,
                    warnings: std::mem::take(&mut warnings),
                    quantities,
                });
            }
            if !accumulate {
                break;
            }
        }
    }
    Ok((verdict.unwrap_or_else(|| Verdict::idk(warnings)), firings))
}

pub fn is_discrete(gamma_set: &GeneratorSet, tol: &Tolerance) -> Result<Verdict, CriterionError> {
    Ok(is_discrete_with(gamma_set, tol, false)?.0)
}

/// Algorithm `IsLoxodromic`: YES with the first generator whose trace has a
/// non-real part beyond eq_eps.
pub fn is_loxodromic(gamma_set: &GeneratorSet, tol: &Tolerance) -> Verdict {
    let mut warnings = Vec::new();
    for (label, g) in &gamma_set.elements {
        let trace = g.trace();
        let im = trace.im.abs();
        if im > tol.eq_eps {
            if im <= tol.warn_band {
                warnings.push(format!(
                    "LOX: |Im tr({label})| = {im:.3e} is inside the warn band"
                ));
            }
            return Verdict {
                outcome: Outcome::Yes,
                witness: vec![label.clone()],
                rule: Some("LOX".into()),
                margin: im,
                warnings,
                quantities: vec![Quantity::complex("trace", trace)],
            };
        }
    }
    Verdict::idk(warnings)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Overall {
    Dense,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorEvidence {
    pub label: String,
    pub trace: Quantity,
    pub beta: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub elementary: Verdict,
    pub discrete: Verdict,
    pub loxodromic: Verdict,
    pub overall: Overall,
    /// First stage that returned IDK when inconclusive.
    pub stalled_stage: Option<String>,
    pub generators: Vec<GeneratorEvidence>,
    pub all_firings: Vec<Firing>,
    pub word_depth: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    /// Extend the scans to products of generators up to this word length.
    pub word_depth: usize,
    /// Collect every discreteness firing rather than stopping at the first.
    pub accumulate: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            word_depth: 1,
            accumulate: false,
        }
    }
}

/// All words of length ≤ depth over the generators, deduplicated up to a
/// global sign (which no verdict depends on).
pub fn expand_words(gamma_set: &GeneratorSet, depth: usize, tol: &Tolerance) -> GeneratorSet {
    let mut out: Vec<(String, CMat)> = gamma_set.elements.clone();
    let mut frontier: Vec<(String, CMat)> = gamma_set.elements.clone();
    for _ in 1..depth {
        let mut next = Vec::new();
        for (wl, w) in &frontier {
            for (gl, g) in &gamma_set.elements {
                let prod = w.mat_mul(g).expect("2x2");
                let label = format!("{wl}*{gl}");
                let known = out
                    .iter()
                    .chain(next.iter())
                    .any(|(_, m)| m.max_diff_up_to_sign(&prod) <= tol.eq_eps);
                if !known {
                    next.push((label, prod));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    GeneratorSet::new(out)
}

/// The flowchart: inverse-closure guard, then the three scans in order.
/// DENSE exactly when elementarity says NO, discreteness says NO, and
/// loxodromy says YES.
pub fn density_pipeline(
    gamma_set: &GeneratorSet,
    tol: &Tolerance,
    opts: &PipelineOptions,
) -> Result<CriterionReport, CriterionError> {
    if !(1..=4).contains(&opts.word_depth) {
        return Err(CriterionError::BadWordDepth(opts.word_depth));
    }
    let closure = check_inverse_closure(gamma_set, tol);
    if !closure.closed {
        return Err(CriterionError::NotInverseClosed {
            unmatched: closure.unmatched,
        });
    }
    let expanded;
    let scanned: &GeneratorSet = if opts.word_depth > 1 {
        expanded = expand_words(gamma_set, opts.word_depth, tol);
        &expanded
    } else {
        gamma_set
    };

    let elementary = is_elementary(scanned, tol)?;
    let (discrete, all_firings) = is_discrete_with(scanned, tol, opts.accumulate)?;
    let loxodromic = is_loxodromic(scanned, tol);

    let overall = if elementary.outcome == Outcome::No
        && discrete.outcome == Outcome::No
        && loxodromic.outcome == Outcome::Yes
    {
        Overall::Dense
    } else {
        Overall::Inconclusive
    };
    let stalled_stage = match overall {
        Overall::Dense => None,
        Overall::Inconclusive => {
            if elementary.outcome != Outcome::No {
                Some("elementary".into())
            } else if discrete.outcome != Outcome::No {
                Some("discrete".into())
            } else {
                Some("loxodromic".into())
            }
        }
    };
    let generators = scanned
        .elements
        .iter()
        .map(|(label, g)| {
            let trace = g.trace();
            GeneratorEvidence {
                label: label.clone(),
                trace: Quantity::complex("trace", trace),
                beta: Quantity::complex("beta", trace * trace - Complex::new(4.0, 0.0)),
            }
        })
        .collect();

    Ok(CriterionReport {
        elementary,
        discrete,
        loxodromic,
        overall,
        stalled_stage,
        generators,
        all_firings,
        word_depth: opts.word_depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, PublishedCase};
    use crate::linalg::{I, ONE, ZERO};
    use std::f64::consts::{PI, SQRT_2};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn beta_and_gamma_basics() {
        let id = CMat::identity(2);
        assert_eq!(beta(&id).unwrap(), Complex::new(0.0, 0.0));
        assert!(beta(&CMat::identity(4)).is_err());
        let g = CMat::two(Complex::new(2.0, 0.0), ONE, ONE, ONE);
        assert!(gamma(&g, &g, &tol()).unwrap().norm() < 1e-14);
        let sing = CMat::two(ONE, ONE, ONE, ONE);
        assert!(matches!(
            gamma(&sing, &id, &tol()),
            Err(CriterionError::Linalg(LinalgError::Singular(_)))
        ));
    }

    #[test]
    fn iqp_invariants_match_frozen_values() {
        let t = tol();
        let gamma_set = catalog::published_generator_set(&PublishedCase::Iqp, &t).unwrap();
        let find = |l: &str| &gamma_set.elements.iter().find(|(n, _)| n == l).unwrap().1;
        let b = find("b");
        let c = find("c");
        let a = find("a");
        // the printed matrix for B fixes tr^2(B) = 1 + 1/sqrt(2), hence this
        // sign; the Tan quantity below corroborates it
        let beta_b = beta(b).unwrap();
        assert!((beta_b - Complex::new(-3.0 + 1.0 / SQRT_2, 0.0)).norm() < 1e-12);
        let beta_c = beta(c).unwrap();
        assert!((beta_c - Complex::new(-2.0, 2.0)).norm() < 1e-12);
        let gamma_bc = gamma(b, c, &t).unwrap();
        assert!((gamma_bc - Complex::new(-1.0, 1.0)).norm() < 1e-12);
        let tr_comm = commutator_trace(b, a, &t).unwrap();
        assert!((tr_comm - Complex::new(1.0 + 1.0 / SQRT_2, 0.0)).norm() < 1e-12);
        let tr2_b = b.trace() * b.trace();
        let tan16 = (tr2_b - tr_comm).norm() + (tr_comm - ONE).norm();
        assert!((tan16 - 1.0 / SQRT_2).abs() < 1e-12);
        let tr_c = c.trace();
        let expected = Complex::new(2.0, 2.0).sqrt();
        assert!((tr_c - expected).norm() < 1e-12);
    }

    #[test]
    fn elementary_pair_examples() {
        let t = tol();
        let id = CMat::identity(2);
        assert!(is_elementary_pair(&id, &id, &t).unwrap().elementary);
        let gamma_set = catalog::published_generator_set(&PublishedCase::Iqp, &t).unwrap();
        let find = |l: &str| &gamma_set.elements.iter().find(|(n, _)| n == l).unwrap().1;
        let pair = is_elementary_pair(find("b"), find("c"), &t).unwrap();
        assert!(!pair.elementary);
        let ccc = catalog::published_generator_set(&PublishedCase::Ccc, &t).unwrap();
        let find = |l: &str| &ccc.elements.iter().find(|(n, _)| n == l).unwrap().1;
        let pair = is_elementary_pair(find("e"), find("f"), &t).unwrap();
        assert!(!pair.elementary);
        assert!((pair.invariants.beta_g - Complex::new(-4.0 / 3.0, 0.0)).norm() < 1e-12);
        assert!((pair.invariants.beta_h - Complex::new(0.5, 0.0)).norm() < 1e-12);
        assert!((pair.invariants.gamma - Complex::new(0.25, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn is_elementary_scan_witnesses() {
        let t = tol();
        let gamma_set = catalog::published_generator_set(&PublishedCase::Iqp, &t).unwrap();
        let verdict = is_elementary(&gamma_set, &t).unwrap();
        assert_eq!(verdict.outcome, Outcome::No);
        assert_eq!(verdict.witness, vec!["b".to_string(), "c".to_string()]);
        let lone = GeneratorSet::new(vec![("id".into(), CMat::identity(2))]);
        assert_eq!(is_elementary(&lone, &t).unwrap().outcome, Outcome::Idk);
        let t4p = catalog::published_generator_set(&PublishedCase::T4p, &t).unwrap();
        let verdict = is_elementary(&t4p, &t).unwrap();
        assert_eq!(verdict.outcome, Outcome::No);
        assert_eq!(verdict.witness, vec!["h".to_string(), "i".to_string()]);
    }

    #[test]
    fn jorgensen_examples() {
        let t = tol();
        let id = CMat::identity(2);
        assert!(jorgensen_lhs(&id, &id, &t).unwrap() < 1e-14);
        let ccc = catalog::published_generator_set(&PublishedCase::Ccc, &t).unwrap();
        let find = |l: &str| &ccc.elements.iter().find(|(n, _)| n == l).unwrap().1;
        let lhs = jorgensen_lhs(find("f"), find("e"), &t).unwrap();
        assert!((lhs - 0.75).abs() < 1e-12);
    }

    #[test]
    fn discrete_scan_rules() {
        let t = tol();
        let ccc = catalog::published_generator_set(&PublishedCase::Ccc, &t).unwrap();
        let verdict = is_discrete(&ccc, &t).unwrap();
        assert_eq!(verdict.outcome, Outcome::No);
        assert_eq!(verdict.rule.as_deref(), Some("J4"));
        assert_eq!(verdict.witness, vec!["f".to_string(), "e".to_string()]);
        assert!((verdict.margin - 0.25).abs() < 1e-12);

        let iqp = catalog::published_generator_set(&PublishedCase::Iqp, &t).unwrap();
        let verdict = is_discrete(&iqp, &t).unwrap();
        assert_eq!(verdict.outcome, Outcome::No);
        assert_eq!(verdict.rule.as_deref(), Some("T16"));
        assert_eq!(verdict.witness, vec!["b".to_string(), "a".to_string()]);
        assert!((verdict.margin - (1.0 - 1.0 / SQRT_2)).abs() < 1e-12);

        let t4p = catalog::published_generator_set(&PublishedCase::T4p, &t).unwrap();
        let verdict = is_discrete(&t4p, &t).unwrap();
        assert_eq!(verdict.outcome, Outcome::No);
        assert_eq!(verdict.rule.as_deref(), Some("T6"));
        assert_eq!(verdict.witness, vec!["h".to_string(), "i".to_string()]);
        let expected = (409.0f64).sqrt() / 25.0;
        let lhs = verdict
            .quantities
            .iter()
            .find(|q| q.name == "tan_i_lhs")
            .unwrap()
            .re;
        assert!((lhs - expected).abs() < 1e-12);
    }

    /// g = diag(l, 1/l) with |l| = 1 and tr²(g) = t2 ∈ (0, 4);
    /// h = [[1, 1], [bc, 1 + bc]] has det 1, and the commutator trace is
    /// exactly tr([g,h]) = 2 − bc·(tr²(g) − 4).
    fn dialed_pair(t2: f64, tr_comm: f64) -> (CMat, CMat) {
        let l = Complex::new(t2.sqrt() / 2.0, (4.0 - t2).sqrt() / 2.0);
        let bc = Complex::new((2.0 - tr_comm) / (t2 - 4.0), 0.0);
        let g = CMat::two(l, ZERO, ZERO, l.inv());
        let h = CMat::two(ONE, ONE, bc, ONE + bc);
        (g, h)
    }

    #[test]
    fn synthetic_pairs_fire_remaining_tan_lines() {
        // The catalog sets exercise J4, T6 and T16; these dialed
        // pairs cover the rest. Expected commutator traces follow from the
        // closed form in `dialed_pair` and were checked by direct evaluation.
        let t = tol();
        let fire = |t2: f64, tr_comm: f64| {
            let (g, h) = dialed_pair(t2, tr_comm);
            let comm = commutator_trace(&g, &h, &t).unwrap();
            assert!((comm - Complex::new(tr_comm, 0.0)).norm() < 1e-12);
            let set = GeneratorSet::new(vec![
                ("g".into(), g.clone()),
                ("ginv".into(), g.inverse2(&t).unwrap()),
                ("h".into(), h.clone()),
                ("hinv".into(), h.inverse2(&t).unwrap()),
            ]);
            is_discrete(&set, &t).unwrap()
        };

        // T8: tr([g,h]) = 1, tr²(g) = 2.4 so |tr² − 2| = 0.4 ≤ 1/2
        let verdict = fire(2.4, 1.0);
        assert_eq!(verdict.rule.as_deref(), Some("T8"));
        assert_eq!(verdict.witness, vec!["g".to_string(), "h".to_string()]);

        // T10: tr²(g) = 1.3, tr([g,h]) = 0: lhs = 0.3 + 0 < 1
        let verdict = fire(1.3, 0.0);
        assert_eq!(verdict.rule.as_deref(), Some("T10"));

        // T12: tr²(g) = 1 and tr([g,h]) = 0.3: 0 < |0.3| ≤ 1/2
        let verdict = fire(1.0, 0.3);
        assert_eq!(verdict.rule.as_deref(), Some("T12"));

        // T14: tr²(g) = 1 and tr([g,h]) = 0.7: |0.7 − 1| = 0.3 ≤ 1/2
        // (T12 stays silent because |0.7| > 1/2)
        let verdict = fire(1.0, 0.7);
        assert_eq!(verdict.rule.as_deref(), Some("T14"));

        // T18: tr([g,h]) = 1, tr²(g) = 1.4: |tr² − 1| = 0.4 ≤ 1/2
        // (T8 stays silent because |1.4 − 2| = 0.6 > 1/2)
        let verdict = fire(1.4, 1.0);
        assert_eq!(verdict.rule.as_deref(), Some("T18"));
    }

    #[test]
    fn loxodromic_scan() {
        let t = tol();
        let iqp = catalog::published_generator_set(&PublishedCase::Iqp, &t).unwrap();
        let verdict = is_loxodromic(&iqp, &t);
        assert_eq!(verdict.outcome, Outcome::Yes);
        assert_eq!(verdict.witness, vec!["c".to_string()]);
        let ccc = catalog::published_generator_set(&PublishedCase::Ccc, &t).unwrap();
        let verdict = is_loxodromic(&ccc, &t);
        assert_eq!(verdict.outcome, Outcome::Yes);
        assert_eq!(verdict.witness, vec!["d".to_string()]);
        let real = GeneratorSet::new(vec![
            ("x".into(), CMat::two(ONE, ONE, ZERO, ONE)),
            ("xinv".into(), CMat::two(ONE, -ONE, ZERO, ONE)),
        ]);
        assert_eq!(is_loxodromic(&real, &t).outcome, Outcome::Idk);
        let t4p = catalog::published_generator_set(&PublishedCase::T4p, &t).unwrap();
        let verdict = is_loxodromic(&t4p, &t);
        assert_eq!(verdict.witness, vec!["j".to_string()]);
        let tr_j = verdict.quantities[0].im;
        assert!((tr_j.abs() - 8.0 / (5.0 * 3.0f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn pipeline_on_published_sets() {
        let t = tol();
        let opts = PipelineOptions::default();
        for case in [PublishedCase::Iqp, PublishedCase::Ccc, PublishedCase::T4p] {
            let gamma_set = catalog::published_generator_set(&case, &t).unwrap();
            let report = density_pipeline(&gamma_set, &t, &opts).unwrap();
            assert_eq!(report.overall, Overall::Dense, "{case:?}");
        }
        let czz =
            catalog::published_generator_set(&PublishedCase::CzzA(2.0 * PI / 3.0), &t).unwrap();
        let report = density_pipeline(&czz, &t, &opts).unwrap();
        assert_eq!(report.overall, Overall::Dense);
    }

    #[test]
    fn word_depth_upgrades_hidden_loxodromy() {
        // neither generator has a non-real trace, but their product does;
        // the depth-1 scan must stay IDK and the depth-2 scan must find it
        let t = tol();
        let w1 = CMat::two(I, ZERO, ZERO, -I);
        let w2 = CMat::two(ONE, Complex::new(2.0, 0.0), -ONE, -ONE);
        let set = GeneratorSet::new(vec![
            ("w1".into(), w1.clone()),
            ("w1inv".into(), w1.inverse2(&t).unwrap()),
            ("w2".into(), w2.clone()),
            ("w2inv".into(), w2.inverse2(&t).unwrap()),
        ]);
        assert_eq!(is_loxodromic(&set, &t).outcome, Outcome::Idk);
        let report = density_pipeline(
            &set,
            &t,
            &PipelineOptions {
                word_depth: 2,
                accumulate: false,
            },
        )
        .unwrap();
        assert_eq!(report.loxodromic.outcome, Outcome::Yes);
        assert_eq!(report.word_depth, 2);
    }

    #[test]
    fn pipeline_trivial_and_error_paths() {
        let t = tol();
        let opts = PipelineOptions::default();
        let pm = GeneratorSet::new(vec![
            ("id".into(), CMat::identity(2)),
            ("neg".into(), CMat::identity(2).neg()),
        ]);
        let report = density_pipeline(&pm, &t, &opts).unwrap();
        assert_eq!(report.overall, Overall::Inconclusive);
        assert_eq!(report.stalled_stage.as_deref(), Some("elementary"));

        let open = GeneratorSet::new(vec![(
            "t".into(),
            CMat::two(Complex::new(2.0, 0.0), ZERO, ZERO, Complex::new(0.5, 0.0)),
        )]);
        assert!(matches!(
            density_pipeline(&open, &t, &opts),
            Err(CriterionError::NotInverseClosed { .. })
        ));

        let empty = GeneratorSet::new(vec![]);
        let report = density_pipeline(&empty, &t, &opts).unwrap();
        assert_eq!(report.overall, Overall::Inconclusive);
        assert_eq!(report.stalled_stage.as_deref(), Some("elementary"));
    }

    #[test]
    fn gamma_is_symmetric_in_its_arguments() {
        let t = tol();
        let iqp = catalog::published_generator_set(&PublishedCase::Iqp, &t).unwrap();
        for (_, g) in &iqp.elements {
            for (_, h) in &iqp.elements {
                let gh = gamma(g, h, &t).unwrap();
                let hg = gamma(h, g, &t).unwrap();
                assert!((gh - hg).norm() < 100.0 * t.eq_eps);
            }
        }
    }

    #[test]
    fn word_expansion_grows_and_dedupes() {
        let t = tol();
        let x = CMat::two(ZERO, ONE, ONE, ZERO).scale(I); // iX, det 1, order 2 up to sign
        let set = GeneratorSet::new(vec![("ix".into(), x)]);
        let expanded = expand_words(&set, 2, &t);
        // iX * iX = -I, new up to sign (identity not in the original set)
        assert_eq!(expanded.len(), 2);
        let expanded = expand_words(&set, 3, &t);
        // depth 3 adds (-I)(iX) = -iX which dedupes against iX
        assert_eq!(expanded.len(), 2);
    }

    #[test]
    fn sign_flip_leaves_verdicts_alone() {
        let t = tol();
        let opts = PipelineOptions::default();
        let gamma_set = catalog::published_generator_set(&PublishedCase::Iqp, &t).unwrap();
        let report = density_pipeline(&gamma_set, &t, &opts).unwrap();
        for flip_idx in 0..gamma_set.len() {
            let mut flipped = gamma_set.clone();
            flipped.elements[flip_idx].1 = flipped.elements[flip_idx].1.neg();
            let flipped_report = density_pipeline(&flipped, &t, &opts).unwrap();
            assert_eq!(report.overall, flipped_report.overall);
            assert_eq!(report.discrete.rule, flipped_report.discrete.rule);
            assert_eq!(report.discrete.witness, flipped_report.discrete.witness);
            assert_eq!(report.elementary.witness, flipped_report.elementary.witness);
        }
    }
}
