use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Outcome of a single check. Ordered so that the maximum is the worst.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub window: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, status: Status, detail: impl Into<String>) -> Self {
        Check { name: name.into(), status, detail: detail.into(), window: None, witness: None }
    }

    pub fn pass(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check::new(name, Status::Pass, detail)
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>, witness: Value) -> Self {
        Check::new(name, Status::Fail, detail).with_witness(witness)
    }

    pub fn inconclusive(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check::new(name, Status::Inconclusive, detail)
    }

    pub fn with_window(mut self, w: impl Into<String>) -> Self {
        self.window = Some(w.into());
        self
    }

    pub fn with_witness(mut self, w: Value) -> Self {
        self.witness = Some(w);
        self
    }
}

/// Ordered list of checks with an aggregate status.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), checks: Vec::new() }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: Report) {
        for mut c in other.checks {
            if !other.title.is_empty() {
                c.name = format!("{}/{}", other.title, c.name);
            }
            self.checks.push(c);
        }
    }

    pub fn status(&self) -> Status {
        self.checks.iter().map(|c| c.status).max().unwrap_or(Status::Pass)
    }

    pub fn passed(&self) -> bool {
        self.status() == Status::Pass
    }

    pub fn has_failure(&self) -> bool {
        self.status() == Status::Fail
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "title": self.title,
            "status": self.status(),
            "checks": self.checks,
        })
    }
}

/// Folds per-item results into one check: first failure wins, then inconclusive.
pub fn summarize(name: &str, items: Vec<Check>, pass_detail: impl Into<String>) -> Check {
    if let Some(f) = items.iter().find(|c| c.status == Status::Fail) {
        let mut c = f.clone();
        c.name = name.to_string();
        return c;
    }
    let inconclusive = items.iter().filter(|c| c.status == Status::Inconclusive).count();
    if inconclusive > 0 && inconclusive == items.len() {
        let mut c = items[0].clone();
        c.name = name.to_string();
        return c;
    }
    let mut c = Check::pass(name, pass_detail);
    if inconclusive > 0 {
        c.detail = format!("{}; {} items inconclusive at cutoff", c.detail, inconclusive);
    }
    c
}
