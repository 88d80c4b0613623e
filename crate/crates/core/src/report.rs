//! Report types shared by the suites and the CLI. Everything here serializes
//! deterministically: ordered vectors and `BTreeMap`s only, no timings.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::exactfield::Ring;
use crate::series::{SeriesRing, TruncSeries};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Undecided,
    /// An observation that never affects the verdict.
    Recorded,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// Precision (exclusive exponent bound) the comparison was carried out to.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compared_to: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<i64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub fitted: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, status: Status) -> Self {
        Check {
            name: name.into(),
            status,
            compared_to: None,
            first_mismatch: None,
            fitted: BTreeMap::new(),
            note: None,
        }
    }

    pub fn pass_if(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { Status::Pass } else { Status::Fail })
    }

    /// Compares two series below their common precision. Passes only when
    /// they agree and that precision reaches `required`.
    pub fn series_eq<R: Ring>(
        name: impl Into<String>,
        sr: &SeriesRing<R>,
        lhs: &TruncSeries<R::Elem>,
        rhs: &TruncSeries<R::Elem>,
        required: i64,
    ) -> Result<Self> {
        let mismatch = sr.first_mismatch(lhs, rhs)?;
        let prec = lhs.prec().min(rhs.prec());
        let mut check = Self::pass_if(name, mismatch.is_none() && prec >= required);
        check.compared_to = Some(prec);
        check.first_mismatch = mismatch;
        if mismatch.is_none() && prec < required {
            check.note = Some(format!("precision {prec} below required {required}"));
        }
        Ok(check)
    }

    /// A series that should vanish to precision `required`.
    pub fn series_zero<R: Ring>(name: impl Into<String>, s: &TruncSeries<R::Elem>, required: i64) -> Self {
        let prec = s.prec();
        let mut check = Self::pass_if(name, s.is_zero() && prec >= required);
        check.compared_to = Some(prec);
        check.first_mismatch = s.valuation();
        check
    }

    pub fn with_fitted(mut self, key: &str, value: impl Into<String>) -> Self {
        self.fitted.insert(key.to_string(), value.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn recorded(mut self) -> Self {
        self.status = Status::Recorded;
        self
    }

    /// Required checks decide the verdict; recorded ones do not.
    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub suite: String,
    pub q: u64,
    pub order: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<String>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub fitted: BTreeMap<String, String>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn new(suite: &str, q: u64, order: i64, level: Option<String>, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| !c.failed());
        let mut fitted = BTreeMap::new();
        for c in &checks {
            for (k, v) in &c.fitted {
                fitted.insert(k.clone(), v.clone());
            }
        }
        SuiteReport { schema: SCHEMA, suite: suite.into(), q, order, level, checks, fitted, passed }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn undecided(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Undecided)
    }
}

/// Serialized series: `[exponent, coefficient]` pairs plus metadata.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct SeriesJson {
    pub variable: String,
    pub truncation: i64,
    pub field: String,
    pub terms: Vec<(i64, String)>,
}

impl SeriesJson {
    pub fn new<R: Ring>(sr: &SeriesRing<R>, s: &TruncSeries<R::Elem>, field: &str) -> Self {
        SeriesJson {
            variable: s.var().to_string(),
            truncation: s.prec(),
            field: field.to_string(),
            terms: sr.render_terms(s),
        }
    }
}
