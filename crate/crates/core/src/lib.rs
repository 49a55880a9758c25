//! Certification toolkit for post-selected quantum advantage over
//! non-universal gate sets.
//!
//! The pipeline: build post-selection gadgets over a gate set, contract them
//! into normalized SL(2;ℂ) actions, then test whether the generated subgroup
//! is non-elementary, non-discrete, and strictly loxodromic — which certifies
//! that it is dense in SL(2;ℂ) and (conditional on the polynomial hierarchy)
//! that circuits over the gate set admit no efficient weak classical
//! simulation.
//!
//! Modules:
//! - [`linalg`]: small dense complex matrices and tolerance discipline
//! - [`circuit`]: gates, gate sets, circuit assembly and state application
//! - [`gadget`]: post-selection gadgets, actions, normalized actions
//! - [`criterion`]: the elementarity / discreteness / loxodromy scans
//! - [`catalog`]: published gates, gadget tables, and generator sets
//! - [`classify`]: simulable-vs-intractable classification and θ sweeps
//! - [`search`]: exhaustive gadget search for density witnesses

pub mod catalog;
pub mod circuit;
pub mod classify;
pub mod criterion;
pub mod gadget;
pub mod linalg;
pub mod search;

pub use circuit::{Circuit, Gate, GateSet, Placement};
pub use criterion::{CriterionReport, Outcome, Overall, PipelineOptions, Verdict};
pub use gadget::{Gadget, GadgetAction, GeneratorSet};
pub use linalg::{CMat, Complex, Tolerance};
