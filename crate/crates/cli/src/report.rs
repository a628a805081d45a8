//! Versioned verification report and its plain-text rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// How `computed` is compared against `expected`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// `|computed − expected| ≤ tolerance`.
    Within,
    /// Structural equality, no tolerance.
    Exact,
    /// `computed < expected`.
    Below,
    /// `computed > expected`.
    Above,
}

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// A value stated by the source result.
    Published,
    /// A value computed by an independent reference calculation.
    Oracle,
    /// A value that holds by construction of the model.
    Definitional,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub claim_id: String,
    /// Short description of the claim being checked.
    pub anchor: String,
    pub computed: Value,
    pub expected: Value,
    pub provenance: Provenance,
    pub comparison: Comparison,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Check {
    /// Scalar check within an absolute tolerance.
    pub fn within(id: &str, anchor: &str, computed: f64, expected: f64, tol: f64, prov: Provenance) -> Self {
        Self {
            claim_id: id.into(),
            anchor: anchor.into(),
            computed: num(computed),
            expected: num(expected),
            provenance: prov,
            comparison: Comparison::Within,
            tolerance: Some(tol),
            pass: (computed - expected).abs() <= tol,
        }
    }

    pub fn exact<T: Serialize + PartialEq>(id: &str, anchor: &str, computed: T, expected: T, prov: Provenance) -> Self {
        let pass = computed == expected;
        Self {
            claim_id: id.into(),
            anchor: anchor.into(),
            computed: serde_json::to_value(computed).unwrap_or(Value::Null),
            expected: serde_json::to_value(expected).unwrap_or(Value::Null),
            provenance: prov,
            comparison: Comparison::Exact,
            tolerance: None,
            pass,
        }
    }

    pub fn below(id: &str, anchor: &str, computed: f64, bound: f64, prov: Provenance) -> Self {
        Self {
            claim_id: id.into(),
            anchor: anchor.into(),
            computed: num(computed),
            expected: num(bound),
            provenance: prov,
            comparison: Comparison::Below,
            tolerance: None,
            pass: computed < bound,
        }
    }

    pub fn above(id: &str, anchor: &str, computed: f64, bound: f64, prov: Provenance) -> Self {
        Self {
            claim_id: id.into(),
            anchor: anchor.into(),
            computed: num(computed),
            expected: num(bound),
            provenance: prov,
            comparison: Comparison::Above,
            tolerance: None,
            pass: computed > bound,
        }
    }
}

/// JSON has no NaN or infinity; those become strings.
fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(x.to_string()), Value::Number)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub checks: Vec<Check>,
    /// Free-form lines shown by the text renderer (e.g. a proof narrative).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Section {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub seed: u64,
    /// Sample counts and resolutions, keyed by name.
    pub samples: BTreeMap<String, u64>,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub pass: bool,
    pub metadata: Metadata,
    pub sections: Vec<Section>,
}

impl VerificationReport {
    pub fn new(seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            pass: true,
            metadata: Metadata {
                seed,
                samples: BTreeMap::new(),
                version: env!("CARGO_PKG_VERSION").into(),
            },
            sections: Vec::new(),
        }
    }

    pub fn record_samples(&mut self, key: &str, n: u64) {
        self.metadata.samples.insert(key.into(), n);
    }

    pub fn add(&mut self, section: Section) {
        self.pass &= section.pass();
        self.sections.push(section);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for sec in &self.sections {
            let _ = writeln!(out, "== {} [{}]", sec.name, verdict(sec.pass()));
            for c in &sec.checks {
                let tol = c.tolerance.map(|t| format!(" tol={t:e}")).unwrap_or_default();
                let rel = match c.comparison {
                    Comparison::Within => "≈",
                    Comparison::Exact => "=",
                    Comparison::Below => "<",
                    Comparison::Above => ">",
                };
                let _ = writeln!(
                    out,
                    "  {} {:<34} {} {} {}{} ({:?}; {})",
                    verdict(c.pass),
                    c.claim_id,
                    c.computed,
                    rel,
                    c.expected,
                    tol,
                    c.provenance,
                    c.anchor
                );
            }
            for n in &sec.notes {
                let _ = writeln!(out, "  | {n}");
            }
        }
        let samples: Vec<String> = self.metadata.samples.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(
            out,
            "seed={} {} version={}",
            self.metadata.seed,
            samples.join(" "),
            self.metadata.version
        );
        let _ = writeln!(out, "OVERALL {}", verdict(self.pass));
        out
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}
