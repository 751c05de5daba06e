//! Flat `key = value` sweep configuration.
//!
//! ```text
//! # N = M * block_len, checked when given
//! N = 256
//! M = 128
//! block_len = 2
//! k = 10
//! n_grid = 40:100:10        # or 40, 60, 80
//! ensemble = gaussian_unit
//! sigma = 0
//! tau_policy = auto         # fixed:<v> | maxcorr:<c>
//! L = 1
//! omegas = 0.1 | 0.5 | 1    # settings separated by `|`, L entries by `,`
//! rhos = 1
//! alphas = 0.8
//! trials = 50
//! seed = 0
//! ```
//!
//! Every combination of an `alphas`, `rhos` and `omegas` setting becomes one
//! prior profile, with `omegas` varying fastest. A setting with a single
//! entry is repeated `L` times.

use std::collections::HashMap;

use super::sweep::SweepSpec;
use super::trial::TauPolicy;
use crate::ensembles::Ensemble;
use crate::error::{Error, Result};
use crate::theory::PriorProfile;

const KEYS: [&str; 16] = [
    "N",
    "M",
    "block_len",
    "k",
    "n_grid",
    "ensemble",
    "sigma",
    "tau_policy",
    "L",
    "omegas",
    "rhos",
    "alphas",
    "trials",
    "seed",
    "k_hat",
    "max_iters",
];

pub fn parse_config(text: &str) -> Result<SweepSpec> {
    let mut entries: HashMap<&str, (usize, &str)> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line,
            msg: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::Config {
                line,
                msg: format!("unknown key `{key}`"),
            });
        }
        if entries.insert(key, (line, value.trim())).is_some() {
            return Err(Error::Config {
                line,
                msg: format!("duplicate key `{key}`"),
            });
        }
    }
    let cfg = Entries(entries);

    let num_blocks = cfg.required("M", parse_usize)?;
    let block_len = cfg.optional("block_len", parse_usize)?.unwrap_or(1);
    let k = cfg.required("k", parse_usize)?;
    if let Some((line, dim)) = cfg.with_line("N", parse_usize)? {
        if dim != num_blocks * block_len {
            return Err(Error::Config {
                line,
                msg: format!("N = {dim} but M * block_len = {}", num_blocks * block_len),
            });
        }
    }
    let n_grid = cfg.required("n_grid", parse_grid)?;

    let omegas = cfg
        .optional("omegas", parse_settings)?
        .unwrap_or_else(|| vec![vec![1.0]]);
    let rhos = cfg
        .optional("rhos", parse_settings)?
        .unwrap_or_else(|| vec![vec![1.0]]);
    let alphas = cfg
        .optional("alphas", parse_settings)?
        .unwrap_or_else(|| vec![vec![0.5]]);
    let longest = omegas
        .iter()
        .chain(&rhos)
        .chain(&alphas)
        .map(Vec::len)
        .max()
        .unwrap_or(1);
    let (l_line, l) = cfg.with_line("L", parse_usize)?.unwrap_or((0, longest));
    let stretch = |key: &str, settings: Vec<Vec<f64>>| -> Result<Vec<Vec<f64>>> {
        settings
            .into_iter()
            .map(|s| match s.len() {
                1 => Ok(vec![s[0]; l]),
                len if len == l => Ok(s),
                len => Err(Error::Config {
                    line: cfg.line(key).max(l_line),
                    msg: format!("`{key}` setting has {len} entries but L = {l}"),
                }),
            })
            .collect()
    };
    let omegas = stretch("omegas", omegas)?;
    let rhos = stretch("rhos", rhos)?;
    let alphas = stretch("alphas", alphas)?;

    let mut profiles = Vec::new();
    for a in &alphas {
        for r in &rhos {
            for w in &omegas {
                let p = PriorProfile::new(w.clone(), r.clone(), a.clone()).map_err(|e| {
                    Error::Config {
                        line: cfg.line("omegas"),
                        msg: e.to_string(),
                    }
                })?;
                profiles.push(p);
            }
        }
    }

    let mut spec = SweepSpec::new(num_blocks, block_len, k, n_grid, profiles);
    if let Some(e) = cfg.optional("ensemble", |s| {
        s.parse::<Ensemble>().map_err(|e| e.to_string())
    })? {
        spec.ensemble = e;
    }
    if let Some(s) = cfg.optional("sigma", parse_f64)? {
        spec.sigma = s;
    }
    if let Some(t) = cfg.optional("tau_policy", |s| {
        s.parse::<TauPolicy>().map_err(|e| e.to_string())
    })? {
        spec.tau = t;
    }
    if let Some(t) = cfg.optional("trials", parse_usize)? {
        spec.trials = t;
    }
    if let Some(s) = cfg.optional("seed", |s| s.parse::<u64>().map_err(|e| e.to_string()))? {
        spec.base_seed = s;
    }
    spec.k_hat = cfg.optional("k_hat", parse_usize)?;
    if let Some(m) = cfg.optional("max_iters", parse_usize)? {
        spec.max_iters = m;
    }
    spec.validate().map_err(|e| Error::Config {
        line: 0,
        msg: e.to_string(),
    })?;
    Ok(spec)
}

struct Entries<'a>(HashMap<&'a str, (usize, &'a str)>);

impl Entries<'_> {
    fn line(&self, key: &str) -> usize {
        self.0.get(key).map_or(0, |e| e.0)
    }

    fn with_line<T>(
        &self,
        key: &str,
        parse: impl Fn(&str) -> std::result::Result<T, String>,
    ) -> Result<Option<(usize, T)>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(&(line, value)) => {
                parse(value)
                    .map(|v| Some((line, v)))
                    .map_err(|msg| Error::Config {
                        line,
                        msg: format!("`{key}`: {msg}"),
                    })
            }
        }
    }

    fn optional<T>(
        &self,
        key: &str,
        parse: impl Fn(&str) -> std::result::Result<T, String>,
    ) -> Result<Option<T>> {
        Ok(self.with_line(key, parse)?.map(|(_, v)| v))
    }

    fn required<T>(
        &self,
        key: &str,
        parse: impl Fn(&str) -> std::result::Result<T, String>,
    ) -> Result<T> {
        self.optional(key, parse)?.ok_or_else(|| Error::Config {
            line: 0,
            msg: format!("missing required key `{key}`"),
        })
    }
}

fn parse_usize(s: &str) -> std::result::Result<usize, String> {
    s.parse()
        .map_err(|_| format!("`{s}` is not a nonnegative integer"))
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    s.parse().map_err(|_| format!("`{s}` is not a number"))
}

/// `a, b, c` or `start:stop:step` (inclusive of `stop` when it is hit).
fn parse_grid(s: &str) -> std::result::Result<Vec<usize>, String> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let grid: Vec<usize> = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (parse_usize(start)?, parse_usize(stop)?, parse_usize(step)?);
            if step == 0 || stop < start {
                return Err(format!("bad range `{s}`"));
            }
            (start..=stop).step_by(step).collect()
        }
        [_] => s
            .split(',')
            .map(|p| parse_usize(p.trim()))
            .collect::<std::result::Result<_, _>>()?,
        _ => return Err(format!("bad grid `{s}`")),
    };
    if grid.is_empty() {
        return Err("empty grid".into());
    }
    Ok(grid)
}

fn parse_settings(s: &str) -> std::result::Result<Vec<Vec<f64>>, String> {
    s.split('|')
        .map(|setting| setting.split(',').map(|v| parse_f64(v.trim())).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG5A: &str = "\
# weighted vs unweighted
N = 256
M = 128
block_len = 2
k = 10
n_grid = 40:90:10
omegas = 0.1 | 1   # two settings
rhos = 1
alphas = 0.8
trials = 50
seed = 7
";

    #[test]
    fn parses_full_config() {
        let spec = parse_config(FIG5A).unwrap();
        assert_eq!(spec.num_blocks, 128);
        assert_eq!(spec.block_len, 2);
        assert_eq!(spec.n_grid, vec![40, 50, 60, 70, 80, 90]);
        assert_eq!(spec.profiles.len(), 2);
        assert_eq!(spec.profiles[0].weights(), &[0.1]);
        assert_eq!(spec.profiles[1].alphas(), &[0.8]);
        assert_eq!((spec.trials, spec.base_seed), (50, 7));
        assert_eq!(spec.tau, TauPolicy::Auto);
        assert_eq!(spec.ensemble, Ensemble::GaussianUnit);
    }

    #[test]
    fn settings_product_and_broadcast() {
        let text = "M = 64\nk = 5\nn_grid = 20, 30\nL = 2\nomegas = 0.5,0.25 | 0.5\nrhos = 0.5,0.5\nalphas = 0.3 | 0.8\n";
        let spec = parse_config(text).unwrap();
        assert_eq!(spec.profiles.len(), 4);
        assert_eq!(spec.profiles[1].weights(), &[0.5, 0.5]);
        assert_eq!(spec.profiles[2].alphas(), &[0.8, 0.8]);
        assert_eq!(spec.n_grid, vec![20, 30]);
        assert_eq!(spec.block_len, 1);
    }

    #[test]
    fn tau_and_noise() {
        let spec = parse_config(
            "M=8\nk=1\nn_grid=4\nsigma=0.01\ntau_policy=fixed:0.2\nensemble=rademacher\n",
        )
        .unwrap();
        assert_eq!(spec.sigma, 0.01);
        assert_eq!(spec.tau, TauPolicy::Fixed(0.2));
        assert_eq!(spec.ensemble, Ensemble::Rademacher);
    }

    #[test]
    fn errors_carry_lines() {
        let err = parse_config("M = 8\nk = 1\nn_grid = 4\nbogus = 1\n").unwrap_err();
        assert_eq!(
            err,
            Error::Config {
                line: 4,
                msg: "unknown key `bogus`".into()
            }
        );
        assert!(matches!(
            parse_config("M = 8\nM = 9\n"),
            Err(Error::Config { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("M = 8\nk\n"),
            Err(Error::Config { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("M = x\n"),
            Err(Error::Config { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("M = 8\nk = 1\n"),
            Err(Error::Config { .. })
        ));
        assert!(matches!(
            parse_config("N = 10\nM = 8\nk = 1\nn_grid = 4\n"),
            Err(Error::Config { line: 1, .. })
        ));
        assert!(parse_config("M = 8\nk = 1\nn_grid = 4\nL = 2\nomegas = 0.5,0.4,0.3\n").is_err());
        assert!(parse_config("M = 8\nk = 1\nn_grid = 9:4:1\n").is_err());
        assert!(parse_config("M = 8\nk = 1\nn_grid = 4\nomegas = 1.5\n").is_err());
        assert!(parse_config("M = 8\nk = 1\nn_grid = 4\ntrials = 0\n").is_err());
    }
}
