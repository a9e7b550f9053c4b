//! Exact verification records: every checked inequality or identity is kept
//! with the bound it asserts, the claimed side and the computed side.

use serde::{Deserialize, Serialize};

use crate::exactlin::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub bound: String,
    pub claimed: String,
    pub computed: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, bound: impl Into<String>, claimed: String, computed: String, pass: bool) -> bool {
        self.checks.push(Check {
            bound: bound.into(),
            claimed,
            computed,
            pass,
        });
        pass
    }

    /// `computed ≤ claimed`.
    pub fn le(&mut self, bound: impl Into<String>, computed: &Rat, claimed: &Rat) -> bool {
        self.push(bound, claimed.to_string(), computed.to_string(), computed <= claimed)
    }

    /// `computed < claimed`.
    pub fn lt(&mut self, bound: impl Into<String>, computed: &Rat, claimed: &Rat) -> bool {
        self.push(bound, claimed.to_string(), computed.to_string(), computed < claimed)
    }

    /// `computed ≥ claimed`.
    pub fn ge(&mut self, bound: impl Into<String>, computed: &Rat, claimed: &Rat) -> bool {
        self.push(bound, claimed.to_string(), computed.to_string(), computed >= claimed)
    }

    pub fn eq_rat(&mut self, bound: impl Into<String>, computed: &Rat, claimed: &Rat) -> bool {
        self.push(bound, claimed.to_string(), computed.to_string(), computed == claimed)
    }

    /// An exact identity between two objects, recorded as "equal"/"differs".
    pub fn identity(&mut self, bound: impl Into<String>, holds: bool) -> bool {
        let computed = if holds { "equal" } else { "differs" };
        self.push(bound, "equal".into(), computed.into(), holds)
    }

    /// A categorical verdict such as "isometric".
    pub fn verdict(&mut self, bound: impl Into<String>, claimed: &str, computed: &str, pass: bool) -> bool {
        self.push(bound, claimed.into(), computed.into(), pass)
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.notes.extend(other.notes);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}
