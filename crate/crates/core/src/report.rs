//! Deterministic rendering of classes and series for reports.
//!
//! Structured output is a stream of (kind, payload) records; series payloads
//! are sorted (exponent-vector, z-power, sector, monomial, rational) tuples
//! with rationals as "p/q" strings. Text output prints the same data
//! human-readably. Both are byte-deterministic for a given input.

use crate::coh::CohClass;
use crate::fan::ExtendedStackyFan;
use crate::num::{show_rat, Rat};
use crate::series::Series;
use num_traits::Zero;
use serde_json::{json, Value};

fn sector_vector(fan: &ExtendedStackyFan, sector: usize) -> Vec<String> {
    fan.boxes[sector].vector.iter().map(|c| c.to_string()).collect()
}

/// A class as a list of [sector vector, monomial, "p/q"] rows.
pub fn class_to_json(fan: &ExtendedStackyFan, class: &CohClass) -> Value {
    let rows: Vec<Value> = class
        .terms
        .iter()
        .map(|((sector, mono), coeff)| {
            json!([sector_vector(fan, *sector), mono, show_rat(coeff)])
        })
        .collect();
    Value::Array(rows)
}

/// A series as sorted [exponents, z, sector vector, monomial, "p/q"] rows.
pub fn series_to_json(fan: &ExtendedStackyFan, series: &Series) -> Value {
    let mut rows: Vec<Value> = Vec::new();
    for ((exps, z), class) in &series.terms {
        let e: Vec<String> = exps.iter().map(show_rat).collect();
        for ((sector, mono), coeff) in &class.terms {
            rows.push(json!([e, z, sector_vector(fan, *sector), mono, show_rat(coeff)]));
        }
    }
    Value::Array(rows)
}

pub fn record(kind: &str, payload: Value) -> Value {
    json!({ "kind": kind, "payload": payload })
}

pub fn rat_strings(v: &[Rat]) -> Vec<String> {
    v.iter().map(show_rat).collect()
}

/// Human-readable class: "3/2 D1 D3^2 1_[-1] + ...".
pub fn class_text(fan: &ExtendedStackyFan, class: &CohClass) -> String {
    if class.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for ((sector, mono), coeff) in &class.terms {
        let mut factors: Vec<String> = Vec::new();
        let c = show_rat(coeff);
        for (i, &e) in mono.iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(format!("D{}", i + 1)),
                _ => factors.push(format!("D{}^{}", i + 1, e)),
            }
        }
        if *sector != 0 {
            factors.push(format!("1_[{}]", sector_vector(fan, *sector).join(",")));
        }
        if factors.is_empty() {
            parts.push(c);
        } else if c == "1" {
            parts.push(factors.join(" "));
        } else if c == "-1" {
            parts.push(format!("-{}", factors.join(" ")));
        } else {
            parts.push(format!("{} {}", c, factors.join(" ")));
        }
    }
    parts.join(" + ").replace("+ -", "- ")
}

/// Human-readable series, one line per (exponent, z) key.
pub fn series_text(fan: &ExtendedStackyFan, series: &Series, var_names: &[String]) -> Vec<String> {
    let mut lines = Vec::new();
    for ((exps, z), class) in &series.terms {
        let mut monomial = String::new();
        for (a, e) in exps.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            if !monomial.is_empty() {
                monomial.push(' ');
            }
            if *e == crate::num::rat(1) {
                monomial.push_str(&var_names[a]);
            } else {
                monomial.push_str(&format!("{}^({})", var_names[a], show_rat(e)));
            }
        }
        if monomial.is_empty() {
            monomial = "1".to_string();
        }
        let zpart = match z {
            0 => String::new(),
            1 => " z".to_string(),
            _ => format!(" z^{}", z),
        };
        lines.push(format!("  {}{}  *  [{}]", monomial, zpart, class_text(fan, class)));
    }
    if lines.is_empty() {
        lines.push("  0".to_string());
    }
    lines
}

/// Variable names y1..y_{r+l}, with y0 first for a bundle.
pub fn variable_names(fan: &ExtendedStackyFan) -> Vec<String> {
    let n = fan.basis_len();
    match fan.p0_index {
        Some(_) => (0..n).map(|a| format!("y{}", a)).collect(),
        None => (1..=n).map(|a| format!("y{}", a)).collect(),
    }
}
