//! Machine-readable results shared by the algebra and duality checks.

use serde::Serialize;
use serde_json::Value;

use crate::forms::FormKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Hypotheses not met: computed and reported, nothing asserted.
    NotApplicable,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn is_failure(self) -> bool {
        self == Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Side {
    pub name: String,
    pub dim: usize,
}

impl Side {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        Side {
            name: name.into(),
            dim,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelRow {
    pub l: usize,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<usize>,
    #[serde(rename = "match", skip_serializing_if = "Option::is_none")]
    pub matches: Option<bool>,
}

/// One check on one scenario.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualityReport {
    pub check: String,
    pub scenario: String,
    pub epsilon: i64,
    pub n: usize,
    pub r: usize,
    pub status: Status,
    pub sides: Vec<Side>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equal: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub per_level: Vec<LevelRow>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl DualityReport {
    pub fn new(check: &str, kind: FormKind, n: usize, r: usize) -> Self {
        DualityReport {
            check: check.to_string(),
            scenario: scenario_name(kind, n, r),
            epsilon: kind.epsilon(),
            n,
            r,
            status: Status::Pass,
            sides: Vec::new(),
            equal: None,
            per_level: Vec::new(),
            details: Value::Null,
            notes: Vec::new(),
            elapsed_ms: None,
        }
    }

    pub fn side(&mut self, name: impl Into<String>, dim: usize) {
        self.sides.push(Side::new(name, dim));
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Folds an asserted condition into the status. A not-applicable report
    /// stays not applicable.
    pub fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.notes.push(format!("failed: {}", what.into()));
            if self.status != Status::NotApplicable {
                self.status = Status::Fail;
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        if self.details.is_null() {
            self.details = Value::Object(Default::default());
        }
        let v = serde_json::to_value(value).expect("serializable detail");
        self.details
            .as_object_mut()
            .expect("object")
            .insert(key.to_string(), v);
    }
}

pub fn scenario_name(kind: FormKind, n: usize, r: usize) -> String {
    format!("{}({n}) r={r}", kind.short())
}
