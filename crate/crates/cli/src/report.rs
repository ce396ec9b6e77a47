//! Result records and their JSON/CSV renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::request::{Command, Mode};

/// Tag carried by every result; bump on incompatible layout changes.
pub const SCHEMA: &str = "idm-run/1";

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// `num/den` strings over the least common denominator of `values`.
pub fn common_denominator(values: &[BigRational]) -> Vec<String> {
    let den = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    values.iter().map(|v| format!("{}/{}", v.numer() * (&den / v.denom()), den)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalOut {
    pub lower: f64,
    pub upper: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_rational: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_rational: Option<String>,
}

impl IntervalOut {
    pub fn new(iv: idm_core::Interval) -> Self {
        Self { lower: round12(iv.lower), upper: round12(iv.upper), lower_rational: None, upper_rational: None }
    }

    pub fn with_rationals(mut self, lower: String, upper: String) -> Self {
        self.lower_rational = Some(lower);
        self.upper_rational = Some(upper);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<f64>>>,
    pub s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_check: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<[usize; 2]>,
    /// Category receiving all prior mass at the exact minimum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_vertex: Option<usize>,
    /// Number of categories raised to the water level at the exact maximum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_star: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub water_level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_ub: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_lb: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i2: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell1: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell2: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_coverage: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub checks: BTreeMap<String, bool>,
}

/// One `h(u_i)` summand of an extremal expected entropy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub u: f64,
    pub h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_rational: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_rational: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extremizer {
    pub side: String,
    pub t: Vec<f64>,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    #[serde(rename = "H_exact_lo")]
    pub h_exact_lo: f64,
    #[serde(rename = "H_exact_hi")]
    pub h_exact_hi: f64,
    #[serde(rename = "H_cons_lo")]
    pub h_cons_lo: f64,
    #[serde(rename = "H_cons_hi")]
    pub h_cons_hi: f64,
    #[serde(rename = "H_point_ml")]
    pub h_point_ml: f64,
    #[serde(rename = "H_point_half")]
    pub h_point_half: f64,
    #[serde(rename = "H_plugin")]
    pub h_plugin: f64,
}

pub const SWEEP_COLUMNS: [&str; 8] =
    ["x", "H_exact_lo", "H_exact_hi", "H_cons_lo", "H_cons_hi", "H_point_ml", "H_point_half", "H_plugin"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub schema: String,
    pub command: Command,
    pub input: InputEcho,
    pub intervals: BTreeMap<String, IntervalOut>,
    pub diagnostics: Diagnostics,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extremizers: Vec<Extremizer>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<SweepRow>,
}

impl RunResult {
    pub fn new(command: Command, input: InputEcho) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            command,
            input,
            intervals: BTreeMap::new(),
            diagnostics: Diagnostics::default(),
            extremizers: Vec::new(),
            series: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    /// Sweep results become the series table; anything else one row per interval.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if !self.series.is_empty() {
            out.push_str(&SWEEP_COLUMNS.join(","));
            out.push('\n');
            for r in &self.series {
                let cells = [r.x, r.h_exact_lo, r.h_exact_hi, r.h_cons_lo, r.h_cons_hi, r.h_point_ml, r.h_point_half, r.h_plugin];
                let cells: Vec<String> = cells.iter().map(f64::to_string).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            return out;
        }
        out.push_str("kind,lower,upper,lower_rational,upper_rational\n");
        for (kind, iv) in &self.intervals {
            let _ = writeln!(
                out,
                "{kind},{},{},{},{}",
                iv.lower,
                iv.upper,
                iv.lower_rational.as_deref().unwrap_or(""),
                iv.upper_rational.as_deref().unwrap_or("")
            );
        }
        out
    }
}
