//! File formats: gate sets and gadget lists as structured JSON, plus
//! resolution of `builtin:NAME` references onto the catalog.
//!
//! Complex numbers are always [re, im] pairs; matrices are row-major nested
//! arrays of those pairs. Gate-set files map gate names either to a literal
//! 2^k×2^k matrix or to a builtin constructor with parameters.

use crate::expr::parse_angle;
use anyhow::{anyhow, bail, Context, Result};
use loxodrome_core::catalog::{self, FamilySpec, GadgetTable};
use loxodrome_core::circuit::{Circuit, Gate, GateSet, Placement};
use loxodrome_core::gadget::Gadget;
use loxodrome_core::linalg::{CMat, Complex, Tolerance};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum GateSpec {
    Matrix(Vec<Vec<[f64; 2]>>),
    Builtin {
        builtin: String,
        #[serde(default)]
        params: Vec<serde_json::Value>,
    },
}

#[derive(Debug, Deserialize)]
struct GateSetFile {
    name: String,
    gates: BTreeMap<String, GateSpec>,
}

#[derive(Debug, Deserialize)]
struct PlacementSpec {
    gate: String,
    targets: Vec<usize>,
}

#[derive(Debug, Deserialize)]
struct GadgetSpec {
    name: String,
    qubits: usize,
    #[serde(default)]
    ancilla: BTreeMap<String, u8>,
    #[serde(default)]
    postselect: BTreeMap<String, u8>,
    moments: Vec<Vec<PlacementSpec>>,
}

#[derive(Debug, Deserialize)]
struct GadgetFile {
    gadgets: Vec<GadgetSpec>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| {
        anyhow!(
            "parse error in {} at line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        )
    })
}

fn matrix_from_rows(name: &str, rows: &[Vec<[f64; 2]>]) -> Result<CMat> {
    let dim = rows.len();
    if !dim.is_power_of_two() || !(2..=16).contains(&dim) {
        bail!("gate `{name}`: dimension {dim} is not a supported power of two");
    }
    let mut m = CMat::zero(dim);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != dim {
            bail!(
                "gate `{name}`: row {r} has {} entries, expected {dim}",
                row.len()
            );
        }
        for (c, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                bail!("gate `{name}`: non-finite entry at ({r},{c})");
            }
            m.set(r, c, Complex::new(re, im));
        }
    }
    Ok(m)
}

fn gate_from_spec(name: &str, spec: &GateSpec, tol: &Tolerance) -> Result<Gate> {
    let gate = match spec {
        GateSpec::Matrix(rows) => Gate::new(name, matrix_from_rows(name, rows)?),
        GateSpec::Builtin { builtin, params } => {
            let mut angles = Vec::new();
            for p in params {
                let angle = match p {
                    serde_json::Value::Number(n) => n
                        .as_f64()
                        .ok_or_else(|| anyhow!("bad number in `{name}`"))?,
                    serde_json::Value::String(s) => parse_angle(s)?,
                    _ => bail!("gate `{name}`: parameters must be numbers or angle strings"),
                };
                angles.push(angle);
            }
            let built =
                catalog::gate(builtin, &angles).map_err(|e| anyhow!("gate `{name}`: {e}"))?;
            Gate::new(name, built.matrix)
        }
    };
    let err = gate.unitarity_error();
    if err > 10.0 * tol.eq_eps {
        bail!("gate `{name}` is not unitary: ||U†U - I|| = {err:.3e}");
    }
    Ok(gate)
}

pub fn load_gate_set(path: &Path, tol: &Tolerance) -> Result<GateSet> {
    let file: GateSetFile = read_json(path)?;
    let mut gates = Vec::new();
    for (name, spec) in &file.gates {
        gates.push(gate_from_spec(name, spec, tol)?);
    }
    if gates.is_empty() {
        bail!("gate set `{}` has no gates", file.name);
    }
    Ok(GateSet::new(file.name, gates))
}

pub fn load_gadgets(path: &Path) -> Result<Vec<Gadget>> {
    let file: GadgetFile = read_json(path)?;
    let mut out = Vec::new();
    for spec in file.gadgets {
        let moments = spec
            .moments
            .into_iter()
            .map(|m| {
                m.into_iter()
                    .map(|p| Placement::new(p.gate, p.targets))
                    .collect()
            })
            .collect();
        let parse_bits = |m: BTreeMap<String, u8>| -> Result<BTreeMap<usize, u8>> {
            m.into_iter()
                .map(|(k, v)| {
                    let q: usize = k
                        .parse()
                        .map_err(|_| anyhow!("gadget `{}`: bad qubit key `{k}`", spec.name))?;
                    Ok((q, v))
                })
                .collect()
        };
        let gadget = Gadget::new(
            spec.name.clone(),
            Circuit::new(spec.qubits, moments),
            parse_bits(spec.ancilla)?,
            parse_bits(spec.postselect)?,
        );
        gadget
            .validate()
            .map_err(|e| anyhow!("gadget `{}`: {e}", spec.name))?;
        out.push(gadget);
    }
    Ok(out)
}

/// A reference is either `builtin:NAME` or a file path.
pub enum GateSetRef {
    Builtin(String),
    File(String),
}

pub fn parse_ref(s: &str) -> GateSetRef {
    match s.strip_prefix("builtin:") {
        Some(name) => GateSetRef::Builtin(name.to_string()),
        None => GateSetRef::File(s.to_string()),
    }
}

/// Builds the family spec for a builtin name, consuming --theta/--u.
pub fn builtin_family(name: &str, theta: Option<f64>, u: Option<CMat>) -> Result<FamilySpec> {
    let need_theta =
        || theta.ok_or_else(|| anyhow!("builtin:{name} is parameterized; pass --theta"));
    Ok(match name {
        "iqp" => FamilySpec::iqp(),
        "ccc" => match u {
            Some(u) => FamilySpec::ccc_with(u),
            None => FamilySpec::ccc(),
        },
        "cz" => FamilySpec::cz(need_theta()?),
        "czz" | "czz-a" | "czz-b" => FamilySpec::cz_z(need_theta()?),
        "czs" => {
            let u =
                u.ok_or_else(|| anyhow!("builtin:czs needs --u for its conjugating unitary"))?;
            FamilySpec::cz_s_with(u)
        }
        "t4p" => FamilySpec::t4p(),
        other => {
            if let Some(fragment) = catalog::Fragment::parse(other) {
                let u = u.ok_or_else(|| {
                    anyhow!("builtin:{other} needs --u for its conjugating unitary")
                })?;
                FamilySpec::fragment(fragment, u)
            } else {
                bail!("unknown builtin `{other}`")
            }
        }
    })
}

pub fn builtin_gadget_table(
    name: &str,
    theta: Option<f64>,
    u: Option<CMat>,
) -> Result<GadgetTable> {
    let spec = builtin_family(name, theta, u)?;
    catalog::gadget_table(&spec).map_err(|e| anyhow!("{e}"))
}

/// Builds the published generator set for a builtin case. `czz` picks the
/// interval by θ; `cz` contracts the single CZ-lemma gadget.
pub fn builtin_generator_set(
    name: &str,
    theta: Option<f64>,
    u: Option<CMat>,
    tol: &Tolerance,
) -> Result<loxodrome_core::GeneratorSet> {
    use loxodrome_core::catalog::PublishedCase;
    use std::f64::consts::{FRAC_PI_2, PI};
    let need_theta =
        || theta.ok_or_else(|| anyhow!("builtin:{name} is parameterized; pass --theta"));
    let case = match name {
        "iqp" => PublishedCase::Iqp,
        "ccc" => PublishedCase::Ccc,
        "t4p" => PublishedCase::T4p,
        "czz" => {
            let th = need_theta()?.rem_euclid(2.0 * PI);
            if th > FRAC_PI_2 && th < 3.0 * FRAC_PI_2 {
                PublishedCase::CzzA(th)
            } else {
                PublishedCase::CzzB(th)
            }
        }
        "czz-a" => PublishedCase::CzzA(need_theta()?),
        "czz-b" => PublishedCase::CzzB(need_theta()?),
        _ => {
            // no published Γ table; contract whatever the table holds
            let table = builtin_gadget_table(name, theta, u)?;
            return loxodrome_core::gadget::build_generator_set(
                &table.gadgets,
                &table.gate_set,
                tol,
            )
            .map_err(|e| anyhow!("{e}"));
        }
    };
    catalog::published_generator_set(&case, tol).map_err(|e| anyhow!("{e}"))
}
