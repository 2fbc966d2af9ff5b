use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::analysis::ResidualReport;
use crate::frames::SearchOptions;
use crate::topology::{InvariantReport, STVectors};

/// Machine-readable report. Field names are the JSON keys.
#[derive(Debug, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<Value>,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdicts: Option<Verdicts>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub residuals: BTreeMap<String, ResidualOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forbidden_pattern: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub st_frame: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub penalty: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub construction_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate_fit: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polished: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_cases: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame_ricci_diagonal: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub st_vectors: Option<VectorsOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub f_by_case: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants: Option<InvariantsOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fuzz: Option<FuzzOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gallery: Option<Vec<GalleryOutcome>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<GalleryListing>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start_penalties: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorOut>,
    pub exit_code: i32,
}

#[derive(Debug, Default, Serialize)]
pub struct Tolerances {
    pub tol: f64,
    pub tol_mult: f64,
    pub penalty_tol: f64,
}

impl From<&SearchOptions> for Tolerances {
    fn from(o: &SearchOptions) -> Self {
        Self { tol: o.tol, tol_mult: o.tol_mult, penalty_tol: o.penalty_tol }
    }
}

#[derive(Debug, Serialize)]
pub struct Verdicts {
    pub einstein: bool,
    pub weakly_einstein: bool,
    pub identity_ok: bool,
}

#[derive(Debug, Serialize)]
pub struct ResidualOut {
    pub max_abs: f64,
    pub relative: f64,
    pub passes: bool,
    pub matrix: [[f64; 4]; 4],
}

impl From<&ResidualReport<f64>> for ResidualOut {
    fn from(r: &ResidualReport<f64>) -> Self {
        Self { max_abs: r.max_abs, relative: r.relative, passes: r.passes, matrix: *r.matrix.rows() }
    }
}

#[derive(Debug, Serialize)]
pub struct VectorsOut {
    pub a_prime: [f64; 3],
    pub a_dprime: [f64; 3],
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl From<&STVectors<f64>> for VectorsOut {
    fn from(v: &STVectors<f64>) -> Self {
        Self { a_prime: v.a_prime, a_dprime: v.a_dprime, b: v.b, a: v.a }
    }
}

#[derive(Debug, Serialize)]
pub struct InvariantsOut {
    pub chi_density: f64,
    pub p1_density: f64,
    pub orientation: i8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signature: Option<f64>,
    #[serde(rename = "c")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_plus_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_minus_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_equality: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hitchin_ok: Option<bool>,
}

impl From<&InvariantReport<f64>> for InvariantsOut {
    fn from(r: &InvariantReport<f64>) -> Self {
        Self {
            chi_density: r.chi_density,
            p1_density: r.p1_density,
            orientation: r.orientation,
            volume: r.volume,
            chi: r.chi,
            p1: r.p1,
            signature: r.p1.map(|p| p / 3.0),
            c_bound: r.c_bound,
            bound_plus_ok: r.bound_plus_ok,
            bound_minus_ok: r.bound_minus_ok,
            bound_equality: r.bound_equality,
            hitchin_ok: r.hitchin_ok,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FuzzOut {
    pub count: usize,
    pub seed: u64,
    pub max_relative: f64,
    pub mean_relative: f64,
    pub worst_index: usize,
    pub failures: usize,
}

#[derive(Debug, Serialize)]
pub struct GalleryCheck {
    pub check: String,
    pub expected: Value,
    pub actual: Value,
    pub ok: bool,
}

#[derive(Debug, Serialize)]
pub struct GalleryOutcome {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub checks: Vec<GalleryCheck>,
    pub ok: bool,
}

#[derive(Debug, Serialize)]
pub struct GalleryListing {
    pub name: String,
    pub description: String,
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize)]
pub struct ErrorOut {
    pub kind: String,
    pub message: String,
}

/// Renders a floating-point number with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() || x.is_infinite() {
        return "null".to_string();
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// Pretty JSON with two-space indentation, keys in map order, scalar-only
/// arrays on one line and every float at 17 significant digits.
pub fn render_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, 0, &mut out);
    out.push('\n');
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format_f64(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_value(item, indent, out);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                pad(indent + 1, out);
                write_value(item, indent + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                pad(indent + 1, out);
                out.push_str(&serde_json::to_string(key).expect("strings serialize"));
                out.push_str(": ");
                write_value(item, indent + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push('}');
        }
    }
}

fn pad(indent: usize, out: &mut String) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}
