//! Run reports and the exit-code contract.

use std::process::ExitCode;
use std::time::Instant;

use qaffine_core::{Error, Status, Verdict};
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Serialize)]
pub struct VerdictOut {
    pub name: String,
    pub status: Status,
    pub residual: Option<f64>,
    pub details: Map<String, Value>,
}

impl From<Verdict> for VerdictOut {
    fn from(v: Verdict) -> Self {
        VerdictOut { name: v.check, status: v.status, residual: v.residual, details: v.details }
    }
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub verdicts: Vec<VerdictOut>,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub outputs: Map<String, Value>,
    /// Present only with `--timing`, so that reports are reproducible by default.
    pub timing: Option<Timing>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        RunReport { command: command.into(), inputs: Map::new(), verdicts: vec![], outputs: Map::new(), timing: None }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.into(), value.into());
        self
    }

    pub fn output(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.outputs.insert(key.into(), value.into());
        self
    }

    pub fn verdict(&mut self, v: Verdict) -> &mut Self {
        self.verdicts.push(v.into());
        self
    }

    /// Records a computation that could not complete as a failed verdict.
    pub fn failure(&mut self, name: &str, e: &Error) -> &mut Self {
        self.verdict(Verdict::new(name, Status::Fail).with("error", e.to_string()))
    }

    pub fn exit_code(&self) -> u8 {
        if self.verdicts.iter().all(|v| v.status == Status::Pass) {
            0
        } else {
            1
        }
    }

    pub fn print(&self, json: bool) {
        if json {
            println!("{}", serde_json::to_string_pretty(self).expect("report serializes"));
            return;
        }
        println!("{}", self.command);
        for (k, v) in &self.outputs {
            println!("  {k}: {}", human(v));
        }
        for v in &self.verdicts {
            let status = match v.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Inconclusive => "INCONCLUSIVE",
            };
            match v.residual {
                Some(r) => println!("{status:<12} {} (residual {r:.3e})", v.name),
                None => println!("{status:<12} {}", v.name),
            }
            if v.status != Status::Pass {
                for (k, d) in &v.details {
                    println!("    {k}: {}", human(d));
                }
            }
        }
        if let Some(t) = &self.timing {
            println!("  time: {:.3}s", t.seconds);
        }
    }
}

fn human(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Errors caused by the input rather than by the mathematics.
pub fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse { .. }
            | Error::InvalidSpec(_)
            | Error::InvalidChamber(_)
            | Error::InvalidQuiver(_)
            | Error::FrozenVertex(_)
            | Error::Genericity(_)
            | Error::MixedMode
            | Error::Shape(_)
            | Error::UnboundVariable(_)
            | Error::UnexpectedVariable(_)
    )
}

pub struct Run {
    pub json: bool,
    pub timing: bool,
    pub start: Instant,
}

impl Run {
    pub fn finish(&self, result: Result<RunReport, Error>) -> ExitCode {
        match result {
            Ok(mut report) => {
                if self.timing {
                    report.timing = Some(Timing { seconds: self.start.elapsed().as_secs_f64() });
                }
                report.print(self.json);
                ExitCode::from(report.exit_code())
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(if is_input_error(&e) { 2 } else { 1 })
            }
        }
    }
}
