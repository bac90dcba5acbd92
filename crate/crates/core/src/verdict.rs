use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::field::{Dense, RatFun};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Map::is_empty", default)]
    pub details: Map<String, Value>,
}

impl Verdict {
    pub fn new(check: impl Into<String>, status: Status) -> Self {
        Verdict { check: check.into(), status, residual: None, details: Map::new() }
    }

    pub fn pass_if(check: impl Into<String>, ok: bool) -> Self {
        Self::new(check, if ok { Status::Pass } else { Status::Fail })
    }

    /// Exact identity check: passes iff `diff` vanishes; otherwise records
    /// the nonzero entries (at most 16).
    pub fn exact(check: impl Into<String>, diff: &Dense<RatFun>) -> Self {
        let mut v = Self::pass_if(check, diff.is_zero());
        if !diff.is_zero() {
            v = v.with("difference", nonzero_entries(diff, 16));
        }
        v
    }

    /// Numeric check: passes iff `residual < tol`.
    pub fn numeric(check: impl Into<String>, residual: f64, tol: f64) -> Self {
        let mut v = Self::pass_if(check, residual.is_finite() && residual < tol);
        v.residual = Some(residual);
        v.with("tolerance", tol)
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

pub fn nonzero_entries(m: &Dense<RatFun>, limit: usize) -> Value {
    let mut out = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let x = m.get(i, j);
            if !x.is_zero() {
                out.push(serde_json::json!({ "row": i, "col": j, "value": x.to_string() }));
                if out.len() == limit {
                    return Value::Array(out);
                }
            }
        }
    }
    Value::Array(out)
}

/// Combines sub-verdicts: fail dominates inconclusive, which dominates pass.
pub fn combine(check: impl Into<String>, parts: Vec<Verdict>) -> Verdict {
    let status = if parts.iter().any(|p| p.status == Status::Fail) {
        Status::Fail
    } else if parts.iter().any(|p| p.status == Status::Inconclusive) {
        Status::Inconclusive
    } else {
        Status::Pass
    };
    let residual =
        parts.iter().filter_map(|p| p.residual).fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
    let mut v = Verdict::new(check, status);
    v.residual = residual;
    v.with("parts", serde_json::to_value(parts).unwrap())
}
