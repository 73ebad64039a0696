//! Machine-readable output of the command-line tool.
//!
//! One [`OutputRecord`] per invocation. Field order is fixed by the struct
//! definitions and parameters are kept sorted, so serializing a parsed
//! record reproduces the original bytes. Every real number is written as a
//! decimal string with ⌈0.302·P⌉ significant digits, rounded to nearest.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::demo::ViolationWitness;
use crate::series::{CertifiedValue, EnvelopeInterval};
use crate::Real;

pub const FORMAT_VERSION: &str = "envelope-record/1";

/// Significant decimal digits written for a value computed at `precision` bits.
pub fn decimal_digits(precision: u32) -> usize {
    (f64::from(precision) * 0.302).ceil() as usize
}

pub fn format_real(x: &Real, precision: u32) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(decimal_digits(precision)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub format_version: String,
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub precision: u32,
    pub result: Payload,
}

impl OutputRecord {
    pub fn new(command: &str, parameters: BTreeMap<String, String>, precision: u32, result: Payload) -> Self {
        OutputRecord {
            format_version: FORMAT_VERSION.to_string(),
            command: command.to_string(),
            parameters,
            precision,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records always serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Certified {
        value: String,
        lo: String,
        hi: String,
        bound: String,
        error_sign: i32,
        k_used: usize,
    },
    Envelope {
        lo: String,
        hi: String,
        bound: String,
        k_used: usize,
    },
    Coefficients {
        family: String,
        rows: Vec<CoefficientRow>,
    },
    Demo {
        witness_count: usize,
        control_witness_count: usize,
        first: Option<WitnessRecord>,
        witnesses: Vec<WitnessRecord>,
    },
    Verification {
        passed: bool,
        checks: Vec<CheckRecord>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub k: usize,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub x: String,
    pub k: usize,
    pub remainder: String,
    pub next_term_bound: String,
    pub mode: String,
    pub error_estimate: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Payload {
    pub fn certified(v: &CertifiedValue, precision: u32) -> Self {
        Payload::Certified {
            value: format_real(&v.value, precision),
            lo: format_real(&v.lo(), precision),
            hi: format_real(&v.hi(), precision),
            bound: format_real(&v.error_bound, precision),
            error_sign: v.error_sign.as_i32(),
            k_used: v.k_used,
        }
    }

    pub fn envelope(iv: &EnvelopeInterval, precision: u32) -> Self {
        Payload::Envelope {
            lo: format_real(&iv.lo, precision),
            hi: format_real(&iv.hi, precision),
            bound: format_real(&iv.bound, precision),
            k_used: iv.k_used,
        }
    }
}

impl WitnessRecord {
    pub fn new(w: &ViolationWitness, precision: u32) -> Self {
        WitnessRecord {
            x: format_real(&w.x, precision),
            k: w.k,
            remainder: format_real(&w.remainder, precision),
            next_term_bound: format_real(&w.next_term_bound, precision),
            mode: w.mode.name().to_string(),
            error_estimate: format_real(&w.error, precision),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_count() {
        assert_eq!(decimal_digits(256), 78);
        assert_eq!(decimal_digits(64), 20);
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let mut params = BTreeMap::new();
        params.insert("z".to_string(), "10".to_string());
        params.insert("series".to_string(), "binet".to_string());
        let rec = OutputRecord::new(
            "eval",
            params,
            256,
            Payload::Certified {
                value: "1.5".into(),
                lo: "1.4".into(),
                hi: "1.5".into(),
                bound: "1.0e-1".into(),
                error_sign: -1,
                k_used: 3,
            },
        );
        let text = rec.to_json();
        assert_eq!(OutputRecord::from_json(&text).unwrap().to_json(), text);
    }
}
