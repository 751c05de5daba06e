use std::io::{Read, Write};

use super::trial::{run_trial, TauPolicy, TrialParams, TrialRecord, TrialStatus};
use super::{fmt_list, fmt_sig9, parse_f64, parse_list, round_sig9};
use crate::ensembles::Ensemble;
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::solver::Termination;
use crate::theory::PriorProfile;

pub const SUMMARY_COLUMNS: [&str; 17] = [
    "setting",
    "omegas",
    "rhos",
    "alphas",
    "n",
    "N",
    "M",
    "k",
    "block_len",
    "ensemble",
    "sigma",
    "trials",
    "solved",
    "frequency",
    "mean_snr_db",
    "mean_relative_error",
    "mean_iterations",
];

pub const TRIAL_COLUMNS: [&str; 19] = [
    "setting",
    "omegas",
    "rhos",
    "alphas",
    "n",
    "trial",
    "seed",
    "N",
    "M",
    "k",
    "block_len",
    "ensemble",
    "sigma",
    "tau",
    "relative_error",
    "snr_db",
    "exact",
    "iterations",
    "status",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub num_blocks: usize,
    pub block_len: usize,
    pub k: usize,
    pub n_grid: Vec<usize>,
    pub ensemble: Ensemble,
    pub sigma: f64,
    pub tau: TauPolicy,
    /// Prior settings; every one is run at every `n`.
    pub profiles: Vec<PriorProfile>,
    pub trials: usize,
    pub base_seed: u64,
    pub k_hat: Option<usize>,
    pub max_iters: usize,
}

impl SweepSpec {
    pub fn new(
        num_blocks: usize,
        block_len: usize,
        k: usize,
        n_grid: Vec<usize>,
        profiles: Vec<PriorProfile>,
    ) -> Self {
        Self {
            num_blocks,
            block_len,
            k,
            n_grid,
            ensemble: Ensemble::GaussianUnit,
            sigma: 0.0,
            tau: TauPolicy::Auto,
            profiles,
            trials: 50,
            base_seed: 0,
            k_hat: None,
            max_iters: 1000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() || self.profiles.is_empty() {
            return Err(Error::InvalidArgument(
                "sweep grids must be nonempty".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        for p in self.points() {
            p.1.validate()?;
        }
        Ok(())
    }

    /// Grid points in output order: settings outermost, then `n`.
    pub fn points(&self) -> Vec<(usize, TrialParams)> {
        let mut out = Vec::with_capacity(self.profiles.len() * self.n_grid.len());
        for (setting, profile) in self.profiles.iter().enumerate() {
            for &n in &self.n_grid {
                out.push((
                    setting,
                    TrialParams {
                        num_blocks: self.num_blocks,
                        block_len: self.block_len,
                        k: self.k,
                        n,
                        ensemble: self.ensemble,
                        sigma: self.sigma,
                        tau: self.tau,
                        profile: profile.clone(),
                        k_hat: self.k_hat,
                        max_iters: self.max_iters,
                    },
                ));
            }
        }
        out
    }

    pub fn seed(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub setting: usize,
    pub trial: usize,
    pub record: TrialRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub setting: usize,
    pub profile: PriorProfile,
    pub n: usize,
    pub dim: usize,
    pub num_blocks: usize,
    pub k: usize,
    pub block_len: usize,
    pub ensemble: Ensemble,
    pub sigma: f64,
    pub trials: usize,
    /// Trials that reached a solver termination.
    pub solved: usize,
    /// Fraction of all trials recovered exactly.
    pub frequency: f64,
    pub mean_snr_db: f64,
    pub mean_relative_error: f64,
    pub mean_iterations: f64,
}

impl SummaryRow {
    /// Frequency without noise, mean SNR with noise.
    pub fn primary_value(&self) -> f64 {
        if self.sigma == 0.0 {
            self.frequency
        } else {
            self.mean_snr_db
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub summary: Vec<SummaryRow>,
    pub trials: Vec<TrialRow>,
}

/// Runs every trial of every grid point. Trial `j` of each point uses seed
/// `base_seed + j`, so all points see the same signals and matrices.
pub fn run_sweep(spec: &SweepSpec, exec: Execution) -> Result<SweepOutput> {
    spec.validate()?;
    let points = spec.points();
    let jobs = points.len() * spec.trials;
    let records = map_indexed(exec, jobs, |job| {
        let (setting, params) = &points[job / spec.trials];
        let trial = job % spec.trials;
        run_trial(params, spec.seed(trial)).map(|record| TrialRow {
            setting: *setting,
            trial,
            record,
        })
    });
    let trials = records.into_iter().collect::<Result<Vec<_>>>()?;
    let summary = reaggregate(&trials);
    Ok(SweepOutput { summary, trials })
}

/// Groups consecutive trial rows by grid point and summarises each group.
///
/// Means are taken over values rounded to 9 significant digits, so
/// summarising rows read back from a per-trial CSV gives the same numbers
/// as summarising them in memory.
pub fn reaggregate(rows: &[TrialRow]) -> Vec<SummaryRow> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < rows.len() {
        let key = (rows[start].setting, rows[start].record.n);
        let end = rows[start..]
            .iter()
            .position(|r| (r.setting, r.record.n) != key)
            .map_or(rows.len(), |p| start + p);
        out.push(summarize(&rows[start..end]));
        start = end;
    }
    out
}

fn summarize(rows: &[TrialRow]) -> SummaryRow {
    let first = &rows[0].record;
    let solved: Vec<&TrialRecord> = rows
        .iter()
        .map(|r| &r.record)
        .filter(|r| matches!(r.status, TrialStatus::Solved(_)))
        .collect();
    let exact = rows.iter().filter(|r| r.record.exact).count();
    let mean = |f: &dyn Fn(&TrialRecord) -> f64| {
        if solved.is_empty() {
            f64::NAN
        } else {
            solved.iter().map(|r| round_sig9(f(r))).sum::<f64>() / solved.len() as f64
        }
    };
    SummaryRow {
        setting: rows[0].setting,
        profile: first.profile.clone(),
        n: first.n,
        dim: first.dim,
        num_blocks: first.num_blocks,
        k: first.k,
        block_len: first.block_len,
        ensemble: first.ensemble,
        sigma: first.sigma,
        trials: rows.len(),
        solved: solved.len(),
        frequency: exact as f64 / rows.len() as f64,
        mean_snr_db: mean(&|r| r.snr_db),
        mean_relative_error: mean(&|r| r.relative_error),
        mean_iterations: mean(&|r| r.iterations as f64),
    }
}

pub fn write_summary_csv<W: Write>(writer: W, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SUMMARY_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.setting.to_string(),
            fmt_list(r.profile.weights()),
            fmt_list(r.profile.rhos()),
            fmt_list(r.profile.alphas()),
            r.n.to_string(),
            r.dim.to_string(),
            r.num_blocks.to_string(),
            r.k.to_string(),
            r.block_len.to_string(),
            r.ensemble.tag().to_string(),
            fmt_sig9(r.sigma),
            r.trials.to_string(),
            r.solved.to_string(),
            fmt_sig9(r.frequency),
            fmt_sig9(r.mean_snr_db),
            fmt_sig9(r.mean_relative_error),
            fmt_sig9(r.mean_iterations),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trials_csv<W: Write>(writer: W, rows: &[TrialRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TRIAL_COLUMNS)?;
    for row in rows {
        let r = &row.record;
        w.write_record([
            row.setting.to_string(),
            fmt_list(r.profile.weights()),
            fmt_list(r.profile.rhos()),
            fmt_list(r.profile.alphas()),
            r.n.to_string(),
            row.trial.to_string(),
            r.seed.to_string(),
            r.dim.to_string(),
            r.num_blocks.to_string(),
            r.k.to_string(),
            r.block_len.to_string(),
            r.ensemble.tag().to_string(),
            fmt_sig9(r.sigma),
            fmt_sig9(r.tau),
            fmt_sig9(r.relative_error),
            fmt_sig9(r.snr_db),
            r.exact.to_string(),
            r.iterations.to_string(),
            r.status.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a per-trial CSV written by [`write_trials_csv`].
pub fn read_trials_csv<R: Read>(reader: R) -> Result<Vec<TrialRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(TRIAL_COLUMNS.iter().copied()) {
        return Err(Error::InvalidArgument(format!(
            "unexpected per-trial header: {headers:?}"
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let bad = |col: &str| Error::InvalidArgument(format!("line {line}: bad `{col}` value"));
        let field = |col: usize| &rec[col];
        let int = |col: usize| {
            field(col)
                .parse::<usize>()
                .map_err(|_| bad(TRIAL_COLUMNS[col]))
        };
        let float = |col: usize| parse_f64(field(col)).ok_or_else(|| bad(TRIAL_COLUMNS[col]));
        let list = |col: usize| parse_list(field(col)).ok_or_else(|| bad(TRIAL_COLUMNS[col]));
        let profile = PriorProfile::new(list(1)?, list(2)?, list(3)?)?;
        let record = TrialRecord {
            seed: field(6).parse().map_err(|_| bad("seed"))?,
            n: int(4)?,
            ensemble: field(11).parse()?,
            dim: int(7)?,
            num_blocks: int(8)?,
            k: int(9)?,
            block_len: int(10)?,
            sigma: float(12)?,
            profile,
            tau: float(13)?,
            relative_error: float(14)?,
            snr_db: float(15)?,
            exact: field(16).parse().map_err(|_| bad("exact"))?,
            iterations: int(17)?,
            status: parse_status(field(18)),
        };
        rows.push(TrialRow {
            setting: int(0)?,
            trial: int(5)?,
            record,
        });
    }
    Ok(rows)
}

fn parse_status(s: &str) -> TrialStatus {
    match s {
        "eps_converged" => TrialStatus::Solved(Termination::EpsConverged),
        "step_converged" => TrialStatus::Solved(Termination::StepConverged),
        "max_iters" => TrialStatus::Solved(Termination::MaxIters),
        "degenerate" => TrialStatus::Degenerate,
        other => TrialStatus::Failed(other.strip_prefix("failed: ").unwrap_or(other).to_string()),
    }
}
