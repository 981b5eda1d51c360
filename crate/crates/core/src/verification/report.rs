use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::Value;

use crate::algebra::Modulus;

/// Absolute slack added to floating-point bound checks.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `lhs ≤ rhs + tolerance`
    Le,
    /// `lhs ≥ rhs − tolerance`
    Ge,
    /// `|lhs − rhs| ≤ tolerance`
    Eq,
}

/// How a check's verdict is recomputed.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// Floating-point comparison of `lhs` and `rhs`.
    Float { tolerance: f64 },
    /// `|value| ≤ p^{twice_exponent/2}`, decided by squaring in exact
    /// arithmetic. A missing exponent stands for the bound 0.
    ExactPower {
        value: String,
        p: u32,
        twice_exponent: Option<i64>,
    },
    /// `value ≥ threshold`, both exact rationals.
    ExactAtLeast { value: String, threshold: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub evidence: Evidence,
    /// Set when the bound is our own derivation rather than a stated result.
    pub derived: bool,
    pub passed: bool,
}

impl Check {
    pub fn float(name: impl Into<String>, lhs: f64, relation: Relation, rhs: f64, tolerance: f64) -> Self {
        let mut c = Self {
            name: name.into(),
            lhs,
            relation,
            rhs,
            evidence: Evidence::Float { tolerance },
            derived: false,
            passed: false,
        };
        c.passed = c.recompute();
        c
    }

    /// `|value| ≤ p^{twice_exponent/2}` with the verdict taken exactly.
    pub fn exact_power(name: impl Into<String>, value: &BigRational, p: Modulus, twice_exponent: Option<i64>) -> Self {
        let rhs = match twice_exponent {
            Some(e) => (p.get() as f64).powf(e as f64 / 2.0),
            None => 0.0,
        };
        let mut c = Self {
            name: name.into(),
            lhs: value.abs().to_f64().unwrap_or(f64::NAN),
            relation: Relation::Le,
            rhs,
            evidence: Evidence::ExactPower {
                value: value.to_string(),
                p: p.get(),
                twice_exponent,
            },
            derived: false,
            passed: false,
        };
        c.passed = c.recompute();
        c
    }

    pub fn exact_at_least(name: impl Into<String>, value: &BigRational, threshold: &BigRational) -> Self {
        let mut c = Self {
            name: name.into(),
            lhs: value.to_f64().unwrap_or(f64::NAN),
            relation: Relation::Ge,
            rhs: threshold.to_f64().unwrap_or(f64::NAN),
            evidence: Evidence::ExactAtLeast {
                value: value.to_string(),
                threshold: threshold.to_string(),
            },
            derived: false,
            passed: false,
        };
        c.passed = c.recompute();
        c
    }

    pub fn derived(mut self) -> Self {
        self.derived = true;
        self
    }

    /// The verdict implied by the stored numbers.
    pub fn recompute(&self) -> bool {
        match &self.evidence {
            Evidence::Float { tolerance } => match self.relation {
                Relation::Le => self.lhs <= self.rhs + tolerance,
                Relation::Ge => self.lhs >= self.rhs - tolerance,
                Relation::Eq => (self.lhs - self.rhs).abs() <= *tolerance,
            },
            Evidence::ExactPower { value, p, twice_exponent } => {
                let Ok(v) = value.parse::<BigRational>() else { return false };
                exact_power_bound_holds(&v, *p, *twice_exponent)
            }
            Evidence::ExactAtLeast { value, threshold } => {
                match (value.parse::<BigRational>(), threshold.parse::<BigRational>()) {
                    (Ok(v), Ok(t)) => v >= t,
                    _ => false,
                }
            }
        }
    }
}

/// `|v| ≤ p^{e/2}` exactly, via `v² ≤ p^e`.
pub fn exact_power_bound_holds(v: &BigRational, p: u32, twice_exponent: Option<i64>) -> bool {
    let Some(e) = twice_exponent else {
        return v.is_zero();
    };
    let sq = v * v;
    let base = BigInt::from(p);
    let bound = if e >= 0 {
        BigRational::from_integer(base.pow(e as u32))
    } else {
        BigRational::new(BigInt::from(1), base.pow((-e) as u32))
    };
    sq <= bound
}

/// Outcome of one experiment. Every verdict can be recomputed from the
/// stored checks.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub parameters: BTreeMap<String, Value>,
    pub observed: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            parameters: BTreeMap::new(),
            observed: BTreeMap::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            pass: true,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.parameters.insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn observe(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.observed.insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn check(&mut self, check: Check) -> &mut Self {
        self.pass &= check.passed;
        self.checks.push(check);
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    /// True when every stored verdict matches its recomputation and the
    /// overall verdict is their conjunction.
    pub fn audit(&self) -> bool {
        self.checks.iter().all(|c| c.passed == c.recompute())
            && self.pass == self.checks.iter().all(|c| c.passed)
    }
}
