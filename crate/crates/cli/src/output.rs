//! Output formatting. Angles go out in radians with 10 significant digits;
//! every other number keeps full precision.

use std::f64::consts::TAU;

use circle_npd::{Angle, Condition};
use serde::Serialize;
use serde_json::Value;

/// Keys whose numbers (or arrays of numbers) are angles.
const ANGLE_KEYS: &[&str] = &[
    "alpha",
    "alpha_star",
    "theta",
    "theta1",
    "theta2",
    "theta1_tilde",
    "theta2_tilde",
    "optimal_alphas",
    "argmin_cells",
    "pairs",
];

fn round_sig(x: f64) -> f64 {
    format!("{x:.9e}").parse().expect("formatted float parses")
}

/// Ten significant digits; values that round onto `2π` wrap to zero.
fn round_angle(x: f64) -> f64 {
    let r = round_sig(x);
    if r >= round_sig(TAU) {
        0.0
    } else {
        r
    }
}

pub fn fmt_angle(a: Angle) -> String {
    round_angle(a.radians()).to_string()
}

fn round_all(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_f64() {
                *v = Value::from(round_angle(x));
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_all),
        _ => {}
    }
}

fn round_angles(v: &mut Value) {
    match v {
        Value::Object(map) => {
            for (k, child) in map.iter_mut() {
                if ANGLE_KEYS.contains(&k.as_str()) {
                    round_all(child);
                } else {
                    round_angles(child);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_angles),
        _ => {}
    }
}

/// Pretty JSON with angles rounded, newline-terminated.
pub fn json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("result serializes");
    round_angles(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

pub fn condition_kind(c: &Condition) -> &'static str {
    match c {
        Condition::CriticalPointOfF { .. } => "critical_point_of_f",
        Condition::OppositeSigns { .. } => "opposite_signs",
        Condition::ZeroDistanceMatch { .. } => "zero_distance_match",
        Condition::Uncertified { .. } => "uncertified",
    }
}

/// CSV with `#` comment lines ahead of the data.
pub struct Table {
    comments: Vec<String>,
    lines: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            comments: Vec::new(),
            lines: vec![columns.join(",")],
        }
    }

    pub fn comment(&mut self, text: impl Into<String>) {
        self.comments.push(format!("# {}", text.into()));
    }

    /// Starts a second block with its own columns.
    pub fn header(&mut self, columns: &[&str]) {
        self.lines.push(columns.join(","));
    }

    pub fn row<const N: usize>(&mut self, cells: [String; N]) {
        self.lines.push(cells.join(","));
    }

    pub fn finish(self) -> String {
        let mut out = self.comments.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&self.lines.join("\n"));
        out.push('\n');
        out
    }
}
