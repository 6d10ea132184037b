//! Run reports: one header plus a list of check records, rendered either as
//! an aligned text table or as JSON with the same fields in the same order.

use groupoid_fourier::FiniteGroupoid;
use serde::Serialize;

/// Integers as integers, everything else in shortest exponent form.
fn number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// A computed value with nothing to compare against.
    Info,
}

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub suite: String,
    pub name: String,
    pub status: Status,
    pub value: f64,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupoidSummary {
    pub arrows: usize,
    pub units: usize,
    /// Unit weights; empty when all weights are 1.
    pub weights: Vec<f64>,
}

impl GroupoidSummary {
    pub fn of(g: &FiniteGroupoid) -> Self {
        GroupoidSummary {
            arrows: g.arrow_count(),
            units: g.unit_count(),
            weights: if g.has_unit_weights() {
                Vec::new()
            } else {
                (0..g.unit_count()).map(|u| g.unit_weight(u)).collect()
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub groupoid: GroupoidSummary,
    pub records: Vec<Record>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub status: &'static str,
}

impl Report {
    pub fn new(command: String, seed: u64, g: &FiniteGroupoid) -> Self {
        Report {
            command,
            seed,
            groupoid: GroupoidSummary::of(g),
            records: Vec::new(),
            warnings: Vec::new(),
            status: "ok",
        }
    }

    pub fn push(&mut self, suite: &str, name: &str, status: Status, value: f64, tol: f64, detail: Option<String>) {
        if status == Status::Fail {
            self.status = "failed";
        }
        self.records.push(Record {
            suite: suite.to_string(),
            name: name.to_string(),
            status,
            value,
            tol,
            detail,
        });
    }

    /// Passes when `value ≤ tol`.
    pub fn at_most(&mut self, suite: &str, name: &str, value: f64, tol: f64) {
        let status = if value <= tol { Status::Pass } else { Status::Fail };
        self.push(suite, name, status, value, tol, None);
    }

    pub fn info(&mut self, suite: &str, name: &str, value: f64, detail: Option<String>) {
        self.push(suite, name, Status::Info, value, 0.0, detail);
    }

    pub fn failed(&self) -> bool {
        self.status != "ok"
    }

    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command   {}\n", self.command));
        out.push_str(&format!("seed      {}\n", self.seed));
        let weights = if self.groupoid.weights.is_empty() {
            "unit weights".to_string()
        } else {
            format!(
                "unit weights [{}]",
                self.groupoid.weights.iter().map(|w| format!("{w}")).collect::<Vec<_>>().join(", ")
            )
        };
        out.push_str(&format!(
            "groupoid  {} arrows, {} units, {weights}\n",
            self.groupoid.arrows, self.groupoid.units
        ));
        let width = self
            .records
            .iter()
            .map(|r| r.suite.len() + r.name.len() + 1)
            .max()
            .unwrap_or(0);
        for r in &self.records {
            let status = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Info => "info",
            };
            let label = format!("{}/{}", r.suite, r.name);
            out.push_str(&format!(
                "{status}  {label:<width$}  value {:<24}  tol {}",
                number(r.value),
                number(r.tol)
            ));
            if let Some(d) = &r.detail {
                out.push_str(&format!("  {d}"));
            }
            out.push('\n');
        }
        for w in &self.warnings {
            out.push_str(&format!("warning   {w}\n"));
        }
        out.push_str(&format!("status    {}\n", self.status));
        out
    }

    pub fn machine(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes") + "\n"
    }
}
