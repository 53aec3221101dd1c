//! Serializable forms of the core reports. Field names are part of the
//! command-line contract.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use symgt_core::bounds::BoundReport;
use symgt_core::codes::{Counterexample, VerificationWitness};
use symgt_core::sim::{Design, ErrorRateReport};
use symgt_core::{CodeMatrix, ModelKind, TestModel};

pub const TABLE1_HEADER: [&str; 5] = ["m", "p_star", "eta1_star", "eta2_star", "alpha"];
pub const ALPHA_HEADER: [&str; 5] = ["m", "alpha_A", "alpha_S", "alpha_G", "excess_S_over_A"];
pub const BOUND_HEADER: [&str; 5] = ["kind", "exact", "asymptotic", "integer", "rate"];
pub const SWEEP_HEADER: [&str; 6] = ["n", "trials", "successes", "ambiguities", "wrong_sets", "error_rate"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub m: usize,
    pub model: String,
    pub p_star: f64,
    pub eta1_star: usize,
    pub eta2_star: usize,
    pub alpha: f64,
}

impl Table1Row {
    pub fn csv_fields(&self) -> [String; 5] {
        [
            self.m.to_string(),
            format!("{:.3}", self.p_star),
            self.eta1_star.to_string(),
            self.eta2_star.to_string(),
            self.alpha.to_string(),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaRow {
    pub m: usize,
    #[serde(rename = "alpha_A")]
    pub alpha_a: f64,
    #[serde(rename = "alpha_S")]
    pub alpha_s: f64,
    /// Absent under noise, which has no two-threshold channel.
    #[serde(rename = "alpha_G")]
    pub alpha_g: Option<f64>,
    /// `alpha_S / alpha_A - 1`, computed in extended precision.
    #[serde(rename = "excess_S_over_A")]
    pub excess: f64,
}

impl AlphaRow {
    pub fn csv_fields(&self) -> [String; 5] {
        [
            self.m.to_string(),
            self.alpha_a.to_string(),
            self.alpha_s.to_string(),
            self.alpha_g.map(|v| v.to_string()).unwrap_or_default(),
            format!("{:e}", self.excess),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub kind: String,
    pub exact: f64,
    pub asymptotic: f64,
    pub integer: Option<u64>,
    pub rate: Option<f64>,
    pub inputs: BTreeMap<String, f64>,
    pub flags: Vec<String>,
}

impl From<&BoundReport> for BoundRecord {
    fn from(r: &BoundReport) -> Self {
        Self {
            kind: r.kind.name().to_owned(),
            exact: r.exact,
            asymptotic: r.asymptotic,
            integer: r.integer,
            rate: r.rate,
            inputs: r.inputs.iter().map(|&(k, v)| (k.to_owned(), v)).collect(),
            flags: r.flags.iter().map(|f| (*f).to_owned()).collect(),
        }
    }
}

impl BoundRecord {
    pub fn csv_fields(&self) -> [String; 5] {
        [
            self.kind.clone(),
            self.exact.to_string(),
            self.asymptotic.to_string(),
            self.integer.map(|v| v.to_string()).unwrap_or_default(),
            self.rate.map(|v| v.to_string()).unwrap_or_default(),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRecord {
    /// `inclusion`, `collision` or `dependency`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_x: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_y: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sum_x: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sum_y: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<Vec<usize>>,
}

impl CounterexampleRecord {
    pub fn new(cx: &Counterexample, code: &CodeMatrix) -> Self {
        let sums = cx.sums(code);
        let (kind, set_x, set_y, columns) = match cx {
            Counterexample::Inclusion { set_x, set_y } => ("inclusion", Some(set_x), Some(set_y), None),
            Counterexample::Collision { set_x, set_y } => ("collision", Some(set_x), Some(set_y), None),
            Counterexample::Dependency { columns } => ("dependency", None, None, Some(columns)),
        };
        Self {
            kind: kind.to_owned(),
            set_x: set_x.map(|s| s.indices().to_vec()),
            set_y: set_y.map(|s| s.indices().to_vec()),
            sum_x: sums.as_ref().map(|(x, _)| x.to_string()),
            sum_y: sums.as_ref().map(|(_, y)| y.to_string()),
            columns: columns.map(|s| s.indices().to_vec()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub verdict: bool,
    pub property: String,
    pub m: Option<usize>,
    pub counterexample: Option<CounterexampleRecord>,
}

impl WitnessRecord {
    pub fn new(w: &VerificationWitness, code: &CodeMatrix) -> Self {
        Self {
            verdict: w.verdict,
            property: w.property.name().to_owned(),
            m: w.m,
            counterexample: w.counterexample.as_ref().map(|cx| CounterexampleRecord::new(cx, code)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub kind: String,
    pub p: f64,
    pub q: Option<f64>,
    pub eta1: Option<usize>,
    pub eta2: Option<usize>,
}

impl From<&TestModel> for ModelRecord {
    fn from(model: &TestModel) -> Self {
        let (eta1, eta2) = match model.kind {
            ModelKind::Ggt { eta1, eta2 } => (Some(eta1), Some(eta2)),
            _ => (None, None),
        };
        Self { kind: model.kind.family().name().to_owned(), p: model.p, q: model.q, eta1, eta2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationRecord {
    #[serde(rename = "N")]
    pub subjects: usize,
    pub m: usize,
    pub n: usize,
    pub model: ModelRecord,
    pub trials: u64,
    pub seed: u64,
    /// `random_bernoulli` or `fixed`.
    pub design: String,
    pub successes: u64,
    pub ambiguities: u64,
    pub wrong_sets: u64,
    pub error_rate: f64,
}

impl From<&ErrorRateReport> for SimulationRecord {
    fn from(r: &ErrorRateReport) -> Self {
        let c = &r.config;
        Self {
            subjects: c.subjects,
            m: c.m,
            n: c.tests,
            model: ModelRecord::from(&c.model),
            trials: c.trials,
            seed: c.seed,
            design: match c.design {
                Design::RandomBernoulli { .. } => "random_bernoulli",
                Design::Fixed(_) => "fixed",
            }
            .to_owned(),
            successes: r.successes,
            ambiguities: r.ambiguities,
            wrong_sets: r.wrong_sets,
            error_rate: r.error_rate,
        }
    }
}

impl SimulationRecord {
    pub fn csv_fields(&self) -> [String; 6] {
        [
            self.n.to_string(),
            self.trials.to_string(),
            self.successes.to_string(),
            self.ambiguities.to_string(),
            self.wrong_sets.to_string(),
            self.error_rate.to_string(),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeRecord {
    pub decoded: Option<Vec<usize>>,
    /// Number of equally good candidate sets when decoding is ambiguous.
    pub ambiguous: Option<usize>,
}
