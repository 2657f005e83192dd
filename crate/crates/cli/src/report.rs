//! Reports, timing and exit codes.

use crate::config::RunConfig;
use serde::Serialize;
use serde_json::Value;
use std::path::Path;
use std::time::Instant;

pub const SCHEMA_VERSION: u32 = 1;

/// Error with the process exit code it maps to: 2 config, 3 data, 4 invariant.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(msg: impl Into<String>) -> Self {
        Self { code: 2, message: msg.into() }
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Self { code: 3, message: msg.into() }
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Self { code: 4, message: msg.into() }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

impl From<epsample::Error> for Failure {
    fn from(e: epsample::Error) -> Self {
        use epsample::Error::*;
        let code = match e {
            InvalidR(_) | InvalidT { .. } | InvalidK { .. } | InvalidParameter(_) | NonPositiveWeight(_) => 2,
            Io(_) | Schema(_) | TooManyBadRows { .. } | TooFewPoints { .. } | DegenerateLine | TooLarge { .. } => 3,
            EmptyCell | Invariant(_) | NoCrossing => 4,
        };
        Self { code, message: e.to_string() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub seconds: f64,
    /// Peak resident set of the process so far, in kB.
    pub peak_rss_kb: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub config: RunConfig,
    pub metrics: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl Report {
    pub fn new(config: RunConfig, metrics: Value, seconds: f64) -> Self {
        let timing = config.timing.then(|| Timing { seconds, peak_rss_kb: peak_rss_kb() });
        Self { schema: SCHEMA_VERSION, config, metrics, timing }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// To `config.out`, or stdout.
    pub fn emit(&self) -> Result<(), Failure> {
        write_or_print(self.config.out.as_deref(), &self.to_json())
    }
}

pub fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::data(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `VmHWM` from `/proc/self/status`; `None` where unavailable.
pub fn peak_rss_kb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

/// Runs `f` once, then repeats it until at least `min_total` seconds have
/// passed, and returns the first result with the mean duration. `f` must be
/// deterministic for the mean to mean anything.
pub fn timed<R, E>(min_total: f64, mut f: impl FnMut() -> Result<R, E>) -> Result<(R, f64), E> {
    let start = Instant::now();
    let out = f()?;
    let mut runs = 1u32;
    while start.elapsed().as_secs_f64() < min_total && runs < 10_000 {
        std::hint::black_box(f()?);
        runs += 1;
    }
    Ok((out, start.elapsed().as_secs_f64() / runs as f64))
}

/// Removes every `seconds` field, for reports without timing.
pub fn strip_seconds(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("seconds");
            m.values_mut().for_each(strip_seconds);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_seconds),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_codes_by_kind() {
        assert_eq!(Failure::from(epsample::Error::InvalidR(0.5)).code, 2);
        assert_eq!(Failure::from(epsample::Error::Schema("x".into())).code, 3);
        assert_eq!(Failure::from(epsample::Error::TooLarge { got: 9, limit: 1 }).code, 3);
        assert_eq!(Failure::from(epsample::Error::EmptyCell).code, 4);
    }

    #[test]
    fn timed_repeats_fast_work() {
        let mut calls = 0;
        let (v, secs) = timed(0.01, || {
            calls += 1;
            Ok::<_, ()>(7)
        })
        .unwrap();
        assert_eq!(v, 7);
        assert!(calls > 1);
        assert!(secs < 0.01);
    }

    #[test]
    fn seconds_are_stripped_at_any_depth() {
        let mut v = serde_json::json!({"seconds": 1, "a": [{"seconds": 2, "b": 3}]});
        strip_seconds(&mut v);
        assert_eq!(v, serde_json::json!({"a": [{"b": 3}]}));
    }

    #[test]
    fn peak_memory_is_reported_on_linux() {
        if cfg!(target_os = "linux") {
            assert!(peak_rss_kb().unwrap() > 0);
        }
    }
}
