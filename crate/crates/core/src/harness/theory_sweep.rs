//! Grids of recovery-theory constants, one CSV row per point.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use super::fmt_sig9;
use crate::error::{Error, Result};
use crate::theory::{delta_bound, nsw_constants, stability_constants, PriorProfile};

pub const THEORY_COLUMNS: [&str; 10] = [
    "figure", "quantity", "series", "alpha", "rho1", "rho2", "rho3", "omega", "value", "reason",
];

pub const T: f64 = 5.0;
/// Fixed `δ_tk` for the stability-constant curves.
pub const STABILITY_DELTA: f64 = 0.5;
pub const NSW_A: f64 = 4.0;
pub const NSW_DELTA_TK: f64 = 0.2;
pub const NSW_DELTA_AK: f64 = 0.15;

const TWO_WEIGHTS: [f64; 2] = [0.5, 0.25];
const SWEEP_ALPHAS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
const FIG2_ALPHAS: [f64; 3] = [0.3, 0.5, 0.8];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoryKind {
    /// Single-weight bound against `ω` for several `α`.
    Fig1a,
    /// Two weights against single weights as `ρ1` varies.
    Fig1b,
    /// Three weights over the `(ρ1, ρ2)` simplex.
    Fig1c,
    /// `D0`, `D1` against `ρ1` at `δ = 0.5`.
    Fig1d,
    /// Block-RIP bound and constants against the standard-RIP baseline.
    Fig2,
}

impl TheoryKind {
    pub const ALL: [TheoryKind; 5] = [
        TheoryKind::Fig1a,
        TheoryKind::Fig1b,
        TheoryKind::Fig1c,
        TheoryKind::Fig1d,
        TheoryKind::Fig2,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            TheoryKind::Fig1a => "fig1a",
            TheoryKind::Fig1b => "fig1b",
            TheoryKind::Fig1c => "fig1c",
            TheoryKind::Fig1d => "fig1d",
            TheoryKind::Fig2 => "fig2",
        }
    }
}

impl fmt::Display for TheoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for TheoryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoryKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown theory sweep `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryRow {
    pub figure: TheoryKind,
    pub quantity: &'static str,
    pub series: String,
    pub alpha: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub rho3: f64,
    /// Swept single weight; NaN when the weights are fixed by the series.
    pub omega: f64,
    pub value: Option<f64>,
    pub reason: String,
}

impl TheoryRow {
    fn new(
        figure: TheoryKind,
        quantity: &'static str,
        series: impl Into<String>,
        alpha: f64,
    ) -> Self {
        Self {
            figure,
            quantity,
            series: series.into(),
            alpha,
            rho1: f64::NAN,
            rho2: f64::NAN,
            rho3: f64::NAN,
            omega: f64::NAN,
            value: None,
            reason: String::new(),
        }
    }

    fn with(mut self, value: Result<f64>) -> Self {
        match value {
            Ok(v) => self.value = Some(v),
            Err(e) => self.reason = e.to_string(),
        }
        self
    }
}

/// `0, 1/m, …, 1` where `m = round(1/step)`.
pub fn unit_grid(step: f64) -> Result<Vec<f64>> {
    let m = (1.0 / step).round();
    if !(step > 0.0 && step <= 1.0) || ((1.0 / step) - m).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "grid step {step} must divide 1"
        )));
    }
    let m = m as usize;
    Ok((0..=m).map(|i| i as f64 / m as f64).collect())
}

fn profile(weights: &[f64], rhos: &[f64], alpha: f64) -> Result<PriorProfile> {
    PriorProfile::new(weights.to_vec(), rhos.to_vec(), vec![alpha; rhos.len()])
}

/// Evaluates the curves of `kind` on a grid of spacing `step` in `[0, 1]`.
pub fn theory_sweep(kind: TheoryKind, step: f64) -> Result<Vec<TheoryRow>> {
    let grid = unit_grid(step)?;
    let mut rows = Vec::new();
    match kind {
        TheoryKind::Fig1a => {
            for alpha in SWEEP_ALPHAS {
                for &omega in &grid {
                    let mut row = TheoryRow::new(kind, "delta_bound", "single", alpha)
                        .with(profile(&[omega], &[1.0], alpha).and_then(|p| delta_bound(T, &p)));
                    (row.rho1, row.omega) = (1.0, omega);
                    rows.push(row);
                }
            }
        }
        TheoryKind::Fig1b | TheoryKind::Fig1d => {
            for alpha in SWEEP_ALPHAS {
                for &rho1 in &grid {
                    let rhos = [rho1, 1.0 - rho1];
                    let series = [
                        ("two_weights", TWO_WEIGHTS),
                        ("single_0.5", [0.5, 0.5]),
                        ("single_0.25", [0.25, 0.25]),
                    ];
                    for (name, weights) in series {
                        let p = profile(&weights, &rhos, alpha);
                        let mut out = if kind == TheoryKind::Fig1b {
                            vec![TheoryRow::new(kind, "delta_bound", name, alpha)
                                .with(p.and_then(|p| delta_bound(T, &p)))]
                        } else {
                            let c = p.and_then(|p| stability_constants(STABILITY_DELTA, T, &p));
                            vec![
                                TheoryRow::new(kind, "D0", name, alpha)
                                    .with(c.clone().map(|c| c.d0)),
                                TheoryRow::new(kind, "D1", name, alpha).with(c.map(|c| c.d1)),
                            ]
                        };
                        for row in &mut out {
                            (row.rho1, row.rho2) = (rhos[0], rhos[1]);
                        }
                        rows.extend(out);
                    }
                }
            }
        }
        TheoryKind::Fig1c => {
            let m = grid.len() - 1;
            for i in 0..=m {
                for j in 0..=m - i {
                    let rhos = [grid[i], grid[j], (m - i - j) as f64 / m as f64];
                    let mut row = TheoryRow::new(kind, "delta_bound", "three_weights", 0.9).with(
                        profile(&[0.9, 0.5, 0.1], &rhos, 0.9).and_then(|p| delta_bound(T, &p)),
                    );
                    (row.rho1, row.rho2, row.rho3) = (rhos[0], rhos[1], rhos[2]);
                    rows.push(row);
                }
            }
        }
        TheoryKind::Fig2 => {
            for alpha in FIG2_ALPHAS {
                for &rho1 in &grid {
                    let rhos = [rho1, 1.0 - rho1];
                    let p = profile(&TWO_WEIGHTS, &rhos, alpha);
                    let stab = p
                        .clone()
                        .and_then(|p| stability_constants(NSW_DELTA_TK, T, &p));
                    let nsw = p
                        .clone()
                        .and_then(|p| nsw_constants(&p, NSW_A, NSW_DELTA_AK, NSW_DELTA_AK));
                    let mut out = vec![
                        TheoryRow::new(kind, "delta_bound", "block_rip", alpha)
                            .with(p.and_then(|p| delta_bound(T, &p))),
                        TheoryRow::new(kind, "delta_bound", "standard_rip", alpha)
                            .with(nsw.clone().map(|c| c.delta_bound)),
                        TheoryRow::new(kind, "D0", "block_rip", alpha)
                            .with(stab.clone().map(|c| c.d0)),
                        TheoryRow::new(kind, "C0", "standard_rip", alpha)
                            .with(nsw.clone().map(|c| c.c0)),
                        TheoryRow::new(kind, "D1", "block_rip", alpha).with(stab.map(|c| c.d1)),
                        TheoryRow::new(kind, "C1", "standard_rip", alpha).with(nsw.map(|c| c.c1)),
                    ];
                    for row in &mut out {
                        (row.rho1, row.rho2) = (rhos[0], rhos[1]);
                    }
                    rows.extend(out);
                }
            }
        }
    }
    Ok(rows)
}

pub fn write_theory_csv<W: Write>(writer: W, rows: &[TheoryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(THEORY_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.figure.tag().to_string(),
            r.quantity.to_string(),
            r.series.clone(),
            fmt_sig9(r.alpha),
            fmt_sig9(r.rho1),
            fmt_sig9(r.rho2),
            fmt_sig9(r.rho3),
            fmt_sig9(r.omega),
            r.value.map(fmt_sig9).unwrap_or_default(),
            r.reason.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
