//! Validation reports shared by every checker.
//!
//! A report lists violated rules. Each rule appears at most once per
//! operation name and carries the lexicographically first witness found.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Rule identifier, e.g. `associativity`, `CM2`, `D12`, `H-iv`.
    pub rule: String,
    /// Operation name when the rule is instantiated per operation.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub op: Option<String>,
    /// Element indices of the witness tuple.
    pub witness: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rule)?;
        if let Some(op) = &self.op {
            write!(f, "[{op}]")?;
        }
        write!(f, " at {:?}", self.witness)?;
        if let Some(note) = &self.note {
            write!(f, " ({note})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Interpretation flags attached by the checker (e.g. `I-12`).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, rule: impl Into<String>, op: Option<&str>, witness: Vec<usize>) {
        self.violations.push(Violation {
            rule: rule.into(),
            op: op.map(str::to_owned),
            witness,
            note: None,
        });
    }

    pub fn push_note(
        &mut self,
        rule: impl Into<String>,
        op: Option<&str>,
        witness: Vec<usize>,
        note: impl Into<String>,
    ) {
        self.violations.push(Violation {
            rule: rule.into(),
            op: op.map(str::to_owned),
            witness,
            note: Some(note.into()),
        });
    }

    /// Appends another report, prefixing its rule names.
    pub fn absorb(&mut self, prefix: &str, other: ValidationReport) {
        for mut v in other.violations {
            if !prefix.is_empty() {
                v.rule = format!("{prefix}{}", v.rule);
            }
            self.violations.push(v);
        }
        for n in other.notes {
            if !self.notes.contains(&n) {
                self.notes.push(n);
            }
        }
    }

    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    pub fn first(&self, rule: &str) -> Option<&Violation> {
        self.violations.iter().find(|v| v.rule == rule)
    }

    pub fn rules(&self) -> Vec<&str> {
        self.violations.iter().map(|v| v.rule.as_str()).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Runs `check` over the iterator and records the first failing witness.
pub(crate) fn first_failure<I, F>(
    report: &mut ValidationReport,
    rule: &str,
    op: Option<&str>,
    witnesses: I,
    mut check: F,
) -> bool
where
    I: IntoIterator<Item = Vec<usize>>,
    F: FnMut(&[usize]) -> bool,
{
    for w in witnesses {
        if !check(&w) {
            report.push(rule, op, w);
            return false;
        }
    }
    true
}
