//! Validated run configuration, echoed into every report.

use crate::args::{Common, PresampleArg};
use crate::Failure;
use epsample::data::Generator;
use epsample::{CellKind, PartitionParams, Presample, SampleMethod, TestSetMethod, Tolerance64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "source")]
pub enum Source {
    Generator { generator: Generator },
    Csv { input: PathBuf, x_col: String, y_col: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub data: Source,
    pub method: SampleMethod,
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub b: Option<usize>,
    pub r: f64,
    pub ham_t: usize,
    pub test_set: Option<TestSetMethod>,
    pub cell: String,
    pub seed: u64,
    pub trials: usize,
    pub budget: usize,
    pub exact: bool,
    pub net_size: usize,
    pub fraction: f64,
    pub probes: usize,
    pub presample: Presample,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub timing: bool,
    pub full: bool,
}

fn config_err(e: impl std::fmt::Display) -> Failure {
    Failure::config(e.to_string())
}

pub fn parse_tolerance(s: &str) -> Result<Tolerance64, Failure> {
    let bad = || Failure::config(format!("tolerance must be 'rel,abs' with both positive (got '{s}')"));
    let (rel, abs) = s.split_once(',').ok_or_else(bad)?;
    let rel: f64 = rel.trim().parse().map_err(|_| bad())?;
    let abs: f64 = abs.trim().parse().map_err(|_| bad())?;
    if !rel.is_finite() || !abs.is_finite() {
        return Err(bad());
    }
    Tolerance64::new(rel, abs).ok_or_else(bad)
}

impl RunConfig {
    pub fn from_args(command: &str, a: &Common) -> Result<Self, Failure> {
        let method: SampleMethod = a.method.parse().map_err(config_err)?;
        let cell: CellKind = a.cell.parse().map_err(config_err)?;
        let test_set = a.test_set.as_deref().map(str::parse::<TestSetMethod>).transpose().map_err(config_err)?;
        let data = match &a.input {
            Some(p) => Source::Csv { input: p.clone(), x_col: a.x_col.clone(), y_col: a.y_col.clone() },
            None => Source::Generator { generator: a.generator.parse().map_err(config_err)? },
        };
        let tol = a.tol.as_deref().map(parse_tolerance).transpose()?.unwrap_or_default();
        if a.n == 0 {
            return Err(Failure::config("--n must be positive"));
        }
        if !(0.0..=1.0).contains(&a.fraction) {
            return Err(Failure::config(format!("--fraction must lie in [0, 1] (got {})", a.fraction)));
        }
        if a.ham_t < 2 {
            return Err(Failure::config(format!("--ham-t must be at least 2 (got {})", a.ham_t)));
        }
        Ok(Self {
            command: command.to_string(),
            data,
            method,
            n: a.n,
            k: a.k,
            t: a.t.unwrap_or(a.k),
            b: a.b,
            r: a.r,
            ham_t: a.ham_t,
            test_set,
            cell: cell.label(),
            seed: a.seed,
            trials: 1,
            budget: a.budget,
            exact: a.exact,
            net_size: a.net_size,
            fraction: a.fraction,
            probes: a.probes,
            presample: match a.presample {
                PresampleArg::Auto => Presample::Auto,
                PresampleArg::Always => Presample::Always,
                PresampleArg::Never => Presample::Never,
            },
            rel_tol: tol.rel_tol,
            abs_tol: tol.abs_tol,
            out: a.out.clone(),
            svg: a.svg.clone(),
            timing: !a.no_timing,
            full: a.full,
        })
    }

    pub fn tolerance(&self) -> Tolerance64 {
        Tolerance64::new(self.rel_tol, self.abs_tol).expect("validated")
    }

    pub fn cell_kind(&self) -> CellKind {
        self.cell.parse().expect("validated")
    }

    pub fn params(&self) -> PartitionParams {
        let mut p = PartitionParams::default();
        let kind = self.cell_kind();
        p.mat.kind = kind;
        p.chan.kind = kind;
        if let Some(b) = self.b {
            p.mat.b = b;
            p.chan.b = b;
        }
        if let Some(ts) = self.test_set {
            p.mat.test_set = ts;
            p.chan.test_set = ts;
        }
        p.ham.t = self.ham_t;
        p
    }

    /// Independent generator per purpose: 0 data, 1 construction, 2 evaluation.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::{Cli, Command};
    use clap::Parser;

    fn common(argv: &[&str]) -> Common {
        let mut full = vec!["epsample", "sample"];
        full.extend_from_slice(argv);
        match Cli::parse_from(full).command {
            Command::Sample(c) => c,
            _ => unreachable!(),
        }
    }

    #[test]
    fn defaults_follow_the_experiment_grid() {
        let c = RunConfig::from_args("sample", &common(&[])).unwrap();
        assert_eq!((c.n, c.k, c.t), (100_000, 1000, 1000));
        assert_eq!(c.params().mat.b, 16);
        assert_eq!(c.params().chan.b, 22);
    }

    #[test]
    fn overrides_reach_every_builder() {
        let c = RunConfig::from_args("sample", &common(&["--b", "8", "--test-set", "points", "--cell", "trapezoid"]))
            .unwrap();
        let p = c.params();
        assert_eq!((p.mat.b, p.chan.b), (8, 8));
        assert_eq!(p.mat.test_set, TestSetMethod::Points);
        assert_eq!(p.chan.kind, CellKind::Trapezoid);
    }

    #[test]
    fn bad_values_are_config_errors() {
        for argv in [&["--method", "nope"][..], &["--cell", "hex"], &["--generator", "spiral"], &["--tol", "1e-9"]] {
            let e = RunConfig::from_args("sample", &common(argv)).unwrap_err();
            assert_eq!(e.code, 2, "{argv:?}");
        }
    }

    #[test]
    fn tolerance_pairs() {
        let t = parse_tolerance("1e-6, 1e-10").unwrap();
        assert_eq!((t.rel_tol, t.abs_tol), (1e-6, 1e-10));
        assert!(parse_tolerance("0,1").is_err());
        assert!(parse_tolerance("inf,1").is_err());
    }
}
