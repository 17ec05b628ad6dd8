//! CSV and JSON encodings. Every real is rounded to 12 significant digits
//! and printed in its shortest round-trip form, so identical inputs give
//! byte-identical files.

use binlattice_core::dynamics::Trajectory;
use binlattice_core::rabi::VerificationReport;
use binlattice_core::resonance::{AnticrossingResult, IprGrid};
use binlattice_core::spectral::SweepTable;
use serde::{Deserialize, Serialize};

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("float formatting round-trips")
}

pub fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    // `-0` would break byte-for-byte comparisons against `0`
    if r == 0.0 {
        "0".to_string()
    } else {
        r.to_string()
    }
}

fn csv_string<I>(header: [&str; 3], rows: I) -> String
where
    I: IntoIterator<Item = [String; 3]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// `epsilon,level_index,energy`, one row per level.
pub fn sweep_csv(table: &SweepTable) -> String {
    let rows = table.epsilon_values.iter().zip(&table.levels).flat_map(|(&eps, levels)| {
        levels
            .iter()
            .enumerate()
            .map(move |(k, &e)| [fmt_num(eps), k.to_string(), fmt_num(e)])
    });
    csv_string(["epsilon", "level_index", "energy"], rows)
}

/// `V,epsilon,ipr`, V-major.
pub fn ipr_csv(grid: &IprGrid) -> String {
    let rows = grid.v_values.iter().zip(&grid.ipr).flat_map(|(&v, row)| {
        grid.epsilon_values
            .iter()
            .zip(row)
            .map(move |(&eps, &x)| [fmt_num(v), fmt_num(eps), fmt_num(x)])
    });
    csv_string(["V", "epsilon", "ipr"], rows)
}

/// `t,site,prob`, time-major.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let rows = traj.times().iter().enumerate().flat_map(|(i, &t)| {
        traj.site_range()
            .map(move |site| [fmt_num(t), site.to_string(), fmt_num(traj.probability(i, site))])
    });
    csv_string(["t", "site", "prob"], rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnticrossReport {
    pub order: u32,
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "F")]
    pub f: f64,
    pub epsilon_star: f64,
    pub gap_min: f64,
    pub shirley_prediction: f64,
    pub evaluations: usize,
    pub half_width: usize,
}

impl From<&AnticrossingResult> for AnticrossReport {
    fn from(r: &AnticrossingResult) -> Self {
        Self {
            order: r.order,
            v: round_sig(r.v),
            f: round_sig(r.f),
            epsilon_star: round_sig(r.epsilon_star),
            gap_min: round_sig(r.gap_min),
            shirley_prediction: round_sig(r.shirley_prediction),
            evaluations: r.evaluations,
            half_width: r.truncation_used.half_width(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShirleyReport {
    pub order: u32,
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "F")]
    pub f: f64,
    pub shift: f64,
    pub predicted_epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub mapping_exact: bool,
    pub fg_offdiag_norm: f64,
    pub parity_commutator_norm: f64,
    pub monodromy_vs_floquet_max_err: f64,
}

impl From<&VerificationReport> for VerifyReport {
    fn from(r: &VerificationReport) -> Self {
        Self {
            mapping_exact: r.mapping_exact,
            fg_offdiag_norm: round_sig(r.fg_offdiag_norm),
            parity_commutator_norm: round_sig(r.parity_commutator_norm),
            monodromy_vs_floquet_max_err: round_sig(r.monodromy_vs_floquet_max_err),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonodromyReport {
    #[serde(rename = "Omega")]
    pub splitting: f64,
    pub omega: f64,
    pub lambda: f64,
    pub step: f64,
    pub quasienergies: [f64; 2],
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types always serialize");
    s.push('\n');
    s
}
