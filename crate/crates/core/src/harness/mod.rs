//! Seeded Monte-Carlo trials, parameter sweeps, theory-curve sweeps and
//! their CSV output.

pub mod config;
pub mod estimate;
pub mod sweep;
pub mod theory_sweep;
pub mod trial;

pub use config::parse_config;
pub use estimate::{estimate_counts, generate_estimate};
pub use sweep::{reaggregate, run_sweep, SummaryRow, SweepOutput, SweepSpec, TrialRow};
pub use theory_sweep::{theory_sweep, TheoryKind, TheoryRow};
pub use trial::{
    relative_error, run_trial, snr_db, TauPolicy, TrialParams, TrialRecord, TrialStatus,
};

/// Formats `v` with 9 significant digits, in the shortest text that parses
/// back to the rounded value. NaN becomes an empty field.
pub fn fmt_sig9(v: f64) -> String {
    if v.is_nan() {
        return String::new();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded = round_sig9(v);
    let mag = rounded.abs();
    if rounded == 0.0 || (1e-5..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// `v` rounded to 9 significant digits.
pub fn round_sig9(v: f64) -> f64 {
    if !v.is_finite() {
        return v;
    }
    format!("{v:.8e}").parse().expect("formatted float parses")
}

/// Inverse of [`fmt_sig9`].
pub fn parse_f64(s: &str) -> Option<f64> {
    let s = s.trim();
    if s.is_empty() {
        Some(f64::NAN)
    } else {
        s.parse().ok()
    }
}

pub(crate) fn fmt_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| fmt_sig9(v))
        .collect::<Vec<_>>()
        .join(";")
}

pub(crate) fn parse_list(s: &str) -> Option<Vec<f64>> {
    s.split(';').map(|p| p.trim().parse().ok()).collect()
}
