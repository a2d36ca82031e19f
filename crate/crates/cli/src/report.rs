//! JSON report schema. Every type round-trips through serde_json bit-exactly.

use std::collections::BTreeMap;

use momenta_core::measures::MeasureKind;
use momenta_core::monotonicity::{BilinearCriterion, CriteriaReport, JcmVerdict};
use momenta_core::operators::{DualDecision, IsometryReport};
use momenta_core::poly::{FactoredPoly, PoleTerm, TwoVarPoly};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    /// The input text exactly as given.
    pub input: String,
    pub config: Config,
    pub outcome: Outcome,
    /// Wall-clock milliseconds; only present with `--timing`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub net_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Outcome {
    Analyze(AnalyzeOutcome),
    Measure(MeasureOutcome),
    Shift(ShiftOutcome),
    Pfrac(PfracOutcome),
    Bessel(BesselOutcome),
    Verify(VerifyOutcome),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "JCM")]
    Jcm,
    #[serde(rename = "JCM-minimal")]
    JcmMinimal,
    #[serde(rename = "NotJCM")]
    NotJcm,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOutcome {
    pub poly: TwoVarPoly,
    pub verdict: Verdict,
    /// Which criterion made the verdict definitive, or why it is not.
    pub justification: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bilinear: Option<BilinearCriterion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criteria: Option<CriteriaReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex_slice: Option<usize>,
    pub net_check: JcmVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure_kind: Option<MeasureKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureOutcome {
    pub poly: TwoVarPoly,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numerator: Option<FactoredPoly>,
    pub kind: MeasureKind,
    pub signed: bool,
    pub min_density: f64,
    pub atoms: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rel_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_csv: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftOutcome {
    pub poly: TwoVarPoly,
    pub isometry: IsometryReport,
    pub dual: DualDecision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfracOutcome {
    pub numerator: FactoredPoly,
    pub denominator: FactoredPoly,
    /// Ascending coefficients of the polynomial part.
    pub quotient: Vec<f64>,
    pub terms: Vec<PoleTerm>,
    /// Largest relative reconstruction error at `x = 0, 0.5, ..., 10`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesselRow {
    pub nu: f64,
    pub z: f64,
    pub i: f64,
    pub j: f64,
    pub terms_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesselOutcome {
    pub rows: Vec<BesselRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub path: String,
    pub kind: MeasureKind,
    pub max_rel_error: f64,
    pub passed: bool,
}

/// Per-command human-readable lines, in a fixed order.
pub fn summary(report: &Report) -> Vec<String> {
    let mut out = Vec::new();
    match &report.outcome {
        Outcome::Analyze(a) => {
            out.push(format!("verdict: {}", verdict_name(a.verdict)));
            out.push(format!("justification: {}", a.justification));
            out.push(format!("net check: {:?} up to order {}", a.net_check.decision, a.net_check.max_order_checked));
            if let Some(w) = a.net_check.witness {
                out.push(format!("witness: beta={:?} alpha={:?} value={:e}", w.beta, w.alpha, w.value));
            }
        }
        Outcome::Measure(m) => {
            out.push(format!("kind: {:?}", m.kind));
            out.push(format!("signed: {}", m.signed));
            out.push(format!("min density: {:e}", m.min_density));
            if let Some(e) = m.max_rel_error {
                out.push(format!("max relative moment error: {e:e}"));
            }
            if let Some(p) = &m.out {
                out.push(format!("measure written to {p}"));
            }
        }
        Outcome::Shift(s) => {
            let (b, c, d) = s.isometry.bcd;
            out.push(format!("(b, c, d) = ({b}, {c}, {d})"));
            let toral: BTreeMap<String, bool> = s.isometry.is_toral_m.iter().map(|(k, v)| (k.to_string(), *v)).collect();
            out.push(format!("toral m-isometry: {toral:?}"));
            out.push(format!("separate 2-isometry: {}", s.isometry.is_separate_2));
            out.push(format!(
                "Cauchy dual {} jointly subnormal",
                if s.dual.decision { "is" } else { "is not" }
            ));
            out.push(format!("method agreement: {} (JCM scan: {:?})", s.dual.method_agreement, s.dual.jcm));
        }
        Outcome::Pfrac(p) => {
            out.push(format!("quotient: {:?}", p.quotient));
            for t in &p.terms {
                out.push(format!("pole {} order {} coefficient {}", t.pole, t.order, t.coeff));
            }
            out.push(format!("residual: {:e}", p.residual));
        }
        Outcome::Bessel(b) => {
            out.push("nu,z,I,J,terms_used".into());
            for r in &b.rows {
                out.push(format!("{},{},{},{},{}", r.nu, r.z, r.i, r.j, r.terms_used));
            }
        }
        Outcome::Verify(v) => {
            out.push(format!("kind: {:?}", v.kind));
            out.push(format!("max relative moment error: {:e}", v.max_rel_error));
        }
    }
    out
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Jcm => "JCM",
        Verdict::JcmMinimal => "JCM-minimal",
        Verdict::NotJcm => "NotJCM",
        Verdict::Inconclusive => "Inconclusive",
    }
}
