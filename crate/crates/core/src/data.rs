//! Synthetic point generators and CSV ingestion.

use crate::cutting::WeightedLine;
use crate::error::{Error, Result};
use crate::geometry::{Line, Point};
use crate::scalar::Scalar;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Generator {
    /// Unit square.
    #[default]
    Uniform,
    /// `count` Gaussian blobs with centers uniform in `[0.1, 0.9]²`.
    Clusters { count: usize, sigma: f64 },
    /// Ring around `(0.5, 0.5)` with radii in `[0.3, 0.5]`, uniform by area.
    Annulus,
}

impl std::fmt::Display for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Uniform => f.write_str("uniform"),
            Self::Clusters { count, sigma } => write!(f, "clusters:{count}:{sigma}"),
            Self::Annulus => f.write_str("annulus"),
        }
    }
}

impl std::str::FromStr for Generator {
    type Err = Error;

    /// `uniform`, `annulus`, `clusters` or `clusters:<count>:<sigma>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown generator '{s}'"));
        let mut parts = s.split(':');
        match parts.next() {
            Some("uniform") if parts.next().is_none() => Ok(Self::Uniform),
            Some("annulus") if parts.next().is_none() => Ok(Self::Annulus),
            Some("clusters") | Some("gaussian_clusters") => {
                let count = parts.next().map_or(Ok(20), |v| v.parse::<usize>().map_err(|_| bad()))?;
                let sigma = parts.next().map_or(Ok(0.02), |v| v.parse::<f64>().map_err(|_| bad()))?;
                if parts.next().is_some() || count == 0 || !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(bad());
                }
                Ok(Self::Clusters { count, sigma })
            }
            _ => Err(bad()),
        }
    }
}

pub fn generate<T: Scalar, R: Rng + ?Sized>(kind: Generator, n: usize, rng: &mut R) -> Vec<Point<T>> {
    let pt = |x: f64, y: f64| Point::new(T::lit(x), T::lit(y));
    match kind {
        Generator::Uniform => (0..n).map(|_| pt(rng.random(), rng.random())).collect(),
        Generator::Clusters { count, sigma } => {
            let centers: Vec<(f64, f64)> =
                (0..count).map(|_| (rng.random_range(0.1..0.9), rng.random_range(0.1..0.9))).collect();
            let noise = Normal::new(0.0, sigma).expect("sigma is positive");
            (0..n)
                .map(|_| {
                    let (cx, cy) = centers[rng.random_range(0..count)];
                    pt(cx + noise.sample(rng), cy + noise.sample(rng))
                })
                .collect()
        }
        Generator::Annulus => (0..n)
            .map(|_| {
                let r = (rng.random_range(0.09..0.25f64)).sqrt();
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                pt(0.5 + r * theta.cos(), 0.5 + r * theta.sin())
            })
            .collect(),
    }
}

/// Unit-weight lines with slope and intercept uniform in `[-3, 3]`.
pub fn random_lines<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<WeightedLine<T>> {
    (0..n)
        .map(|_| {
            let a = rng.random_range(-3.0..3.0);
            let b = rng.random_range(-3.0..3.0);
            WeightedLine::unit(Line::new(T::lit(a), T::lit(b)))
        })
        .collect()
}

/// Rotates the whole set about the origin by a random angle of magnitude in
/// `[1e-3, 1e-2]` radians and returns the angle. Repeated x-coordinates in
/// gridded data stop producing vertical pairs.
pub fn rotate_small<T: Scalar, R: Rng + ?Sized>(pts: &mut [Point<T>], rng: &mut R) -> f64 {
    let mag: f64 = rng.random_range(1e-3..1e-2);
    let angle = if rng.random_bool(0.5) { mag } else { -mag };
    let (c, s) = (T::lit(angle.cos()), T::lit(angle.sin()));
    for p in pts.iter_mut() {
        *p = p.rotated(c, s);
    }
    angle
}

/// Column by header name or zero-based index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Column {
    Name(String),
    Index(usize),
}

impl From<&str> for Column {
    fn from(s: &str) -> Self {
        s.parse::<usize>().map_or_else(|_| Self::Name(s.to_string()), Self::Index)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ingested<T> {
    pub points: Vec<Point<T>>,
    /// One vector per requested flag column, aligned with `points`.
    pub flags: Vec<Vec<bool>>,
    pub bad_rows: usize,
    pub total_rows: usize,
    pub rotation: f64,
}

fn parse_flag(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "t" | "yes" | "y" => Some(true),
        "0" | "false" | "f" | "no" | "n" | "" => Some(false),
        _ => None,
    }
}

/// Reads points from a CSV file and applies [`rotate_small`].
///
/// A header row is assumed when the x or y field of the first row is not
/// numeric. Rows with unparsable or non-finite coordinates or flags are
/// skipped; more than 1% of them is an error.
pub fn ingest_csv<T: Scalar, R: Rng + ?Sized>(
    path: &Path,
    x_col: &Column,
    y_col: &Column,
    flag_cols: &[Column],
    rng: &mut R,
) -> Result<Ingested<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Schema(format!("{other:?}")),
        })?;
    let mut records = reader.records();
    let first = match records.next() {
        None => return Err(Error::Schema(format!("{} is empty", path.display()))),
        Some(r) => r.map_err(|e| Error::Schema(e.to_string()))?,
    };
    let names: Vec<String> = first.iter().map(str::to_string).collect();
    let resolve = |c: &Column, header: bool| -> Result<usize> {
        match c {
            Column::Index(i) => Ok(*i),
            Column::Name(n) if header => names
                .iter()
                .position(|h| h == n)
                .ok_or_else(|| Error::Schema(format!("no column named '{n}'"))),
            Column::Name(n) => Err(Error::Schema(format!("column '{n}' given by name but the file has no header"))),
        }
    };
    let numeric = |rec: &csv::StringRecord, i: usize| rec.get(i).and_then(|v| v.parse::<f64>().ok());
    let header = {
        let xi = resolve(x_col, true).or_else(|_| resolve(x_col, false));
        let yi = resolve(y_col, true).or_else(|_| resolve(y_col, false));
        match (xi, yi) {
            (Ok(xi), Ok(yi)) => numeric(&first, xi).is_none() || numeric(&first, yi).is_none(),
            _ => true,
        }
    };
    let xi = resolve(x_col, header)?;
    let yi = resolve(y_col, header)?;
    let fi: Vec<usize> = flag_cols.iter().map(|c| resolve(c, header)).collect::<Result<_>>()?;

    let mut out = Ingested { points: Vec::new(), flags: vec![Vec::new(); fi.len()], bad_rows: 0, total_rows: 0, rotation: 0.0 };
    let handle = |rec: &csv::StringRecord, out: &mut Ingested<T>| {
        out.total_rows += 1;
        let p = match (numeric(rec, xi), numeric(rec, yi)) {
            (Some(x), Some(y)) => T::from_f64(x).zip(T::from_f64(y)).and_then(|(x, y)| Point::try_new(x, y)),
            _ => None,
        };
        let flags: Option<Vec<bool>> = fi.iter().map(|&i| rec.get(i).and_then(parse_flag)).collect();
        match (p, flags) {
            (Some(p), Some(flags)) => {
                out.points.push(p);
                for (col, f) in out.flags.iter_mut().zip(flags) {
                    col.push(f);
                }
            }
            _ => out.bad_rows += 1,
        }
    };
    if !header {
        handle(&first, &mut out);
    }
    for rec in records {
        match rec {
            Ok(rec) => handle(&rec, &mut out),
            Err(_) => {
                out.total_rows += 1;
                out.bad_rows += 1;
            }
        }
    }
    if out.total_rows == 0 {
        return Err(Error::Schema(format!("{} has a header but no rows", path.display())));
    }
    if out.bad_rows * 100 > out.total_rows {
        return Err(Error::TooManyBadRows { bad: out.bad_rows, total: out.total_rows });
    }
    out.rotation = rotate_small(&mut out.points, rng);
    Ok(out)
}
