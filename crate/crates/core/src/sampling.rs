//! Weighted samples built from partitions, plus the uniform baseline.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::partition::{build_partition, Partition, PartitionMethod, PartitionParams};
use crate::scalar::{Scalar, Tolerance};
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMethod {
    Random,
    Mat,
    Chan,
    ChanSimple,
    Ham,
    DoubleHam,
}

impl SampleMethod {
    pub const ALL: [SampleMethod; 6] =
        [Self::Random, Self::Mat, Self::Chan, Self::ChanSimple, Self::Ham, Self::DoubleHam];

    pub fn partition_method(self) -> Option<PartitionMethod> {
        match self {
            Self::Random => None,
            Self::Mat => Some(PartitionMethod::Mat),
            Self::Chan => Some(PartitionMethod::Chan),
            Self::ChanSimple => Some(PartitionMethod::ChanSimple),
            Self::Ham => Some(PartitionMethod::Ham),
            Self::DoubleHam => Some(PartitionMethod::DoubleHam),
        }
    }

    pub fn name(self) -> &'static str {
        self.partition_method().map_or("random", |m| m.name())
    }
}

impl From<PartitionMethod> for SampleMethod {
    fn from(m: PartitionMethod) -> Self {
        match m {
            PartitionMethod::Mat => Self::Mat,
            PartitionMethod::Chan => Self::Chan,
            PartitionMethod::ChanSimple => Self::ChanSimple,
            PartitionMethod::Ham => Self::Ham,
            PartitionMethod::DoubleHam => Self::DoubleHam,
        }
    }
}

impl std::fmt::Display for SampleMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SampleMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "random" {
            return Ok(Self::Random);
        }
        s.parse::<PartitionMethod>()
            .map(Self::from)
            .map_err(|_| Error::InvalidParameter(format!("unknown sample method '{s}'")))
    }
}

/// Points with positive weights summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSample<T> {
    pub points: Vec<Point<T>>,
    pub weights: Vec<f64>,
    /// Position of each sample point in the input.
    pub indices: Vec<usize>,
    pub method: SampleMethod,
    /// Requested size; `len()` is the size actually produced.
    pub k: usize,
}

impl<T: Scalar> WeightedSample<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Every input point with weight `1/n`.
    pub fn uniform(pts: &[Point<T>]) -> Self {
        let n = pts.len();
        Self {
            points: pts.to_vec(),
            weights: vec![1.0 / n as f64; n],
            indices: (0..n).collect(),
            method: SampleMethod::Random,
            k: n,
        }
    }
}

/// One uniformly chosen point per cell, weighted by the cell's share of `n`.
pub fn partition_sample<T: Scalar, R: Rng + ?Sized>(
    part: &Partition<T>,
    pts: &[Point<T>],
    rng: &mut R,
) -> Result<WeightedSample<T>> {
    if part.is_empty() {
        return Err(Error::EmptyCell);
    }
    let total: usize = part.cells.iter().map(|c| c.points.len()).sum();
    let mut out = WeightedSample {
        points: Vec::with_capacity(part.len()),
        weights: Vec::with_capacity(part.len()),
        indices: Vec::with_capacity(part.len()),
        method: part.method.into(),
        k: part.t,
    };
    for c in &part.cells {
        if c.points.is_empty() {
            return Err(Error::EmptyCell);
        }
        let i = c.points[rng.random_range(0..c.points.len())];
        out.points.push(pts[i]);
        out.weights.push(c.points.len() as f64 / total as f64);
        out.indices.push(i);
    }
    Ok(out)
}

/// `k` distinct input points, each with weight `1/k`.
pub fn random_sample<T: Scalar, R: Rng + ?Sized>(pts: &[Point<T>], k: usize, rng: &mut R) -> Result<WeightedSample<T>> {
    check_k(pts.len(), k)?;
    let mut indices = sample(rng, pts.len(), k).into_vec();
    indices.sort_unstable();
    Ok(WeightedSample {
        points: indices.iter().map(|&i| pts[i]).collect(),
        weights: vec![1.0 / k as f64; k],
        indices,
        method: SampleMethod::Random,
        k,
    })
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 2 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    Ok(())
}

/// Whether to shrink the input to a random subset before partitioning.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Presample {
    /// Only when `n > 10·k²`.
    #[default]
    Auto,
    Always,
    Never,
}

/// `min(n, ⌈k²/ln k⌉)`
pub fn presample_size(n: usize, k: usize) -> usize {
    let k = k.max(2) as f64;
    let s = (k * k / k.ln()).ceil();
    if s >= n as f64 {
        n
    } else {
        s as usize
    }
}

/// Builds a sample of size `k` (one point per partition cell).
pub fn epsilon_sample<T: Scalar, R: Rng + ?Sized>(
    pts: &[Point<T>],
    k: usize,
    method: SampleMethod,
    params: &PartitionParams,
    presample: Presample,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<WeightedSample<T>> {
    let n = pts.len();
    check_k(n, k)?;
    let Some(pm) = method.partition_method() else {
        return random_sample(pts, k, rng);
    };
    let shrink = match presample {
        Presample::Auto => (n as f64) > 10.0 * (k as f64) * (k as f64),
        Presample::Always => true,
        Presample::Never => false,
    };
    let s = if shrink { presample_size(n, k).max(k) } else { n };
    if s < n {
        let mut sub_idx = sample(rng, n, s).into_vec();
        sub_idx.sort_unstable();
        let sub: Vec<Point<T>> = sub_idx.iter().map(|&i| pts[i]).collect();
        let part = build_partition(pm, &sub, k, params, rng, tol)?;
        let mut out = partition_sample(&part, &sub, rng)?;
        for i in out.indices.iter_mut() {
            *i = sub_idx[*i];
        }
        out.k = k;
        return Ok(out);
    }
    let part = build_partition(pm, pts, k, params, rng, tol)?;
    let mut out = partition_sample(&part, pts, rng)?;
    out.k = k;
    Ok(out)
}

/// Sample size for error `eps` in the plane: `⌈c·ε^(-4/3)·ln(1/ε)^(2/3)⌉`.
pub fn k_for_epsilon(eps: f64, c: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) || !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("need 0 < eps < 1 and c > 0 (got eps={eps}, c={c})")));
    }
    Ok((c * eps.powf(-4.0 / 3.0) * (1.0 / eps).ln().powf(2.0 / 3.0)).ceil() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::PartitionCell;
    use crate::region::ConvexRegion;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uniform(n: usize, seed: u64) -> Vec<Point<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Point::new(rng.random(), rng.random())).collect()
    }

    fn manual(sizes: &[usize]) -> (Partition<f64>, Vec<Point<f64>>) {
        let n: usize = sizes.iter().sum();
        let pts = uniform(n, 9);
        let mut next = 0;
        let cells = sizes
            .iter()
            .map(|&s| {
                let points: Vec<usize> = (next..next + s).collect();
                next += s;
                PartitionCell { region: ConvexRegion::whole_plane(), points }
            })
            .collect();
        let part = Partition {
            cells,
            t: sizes.len(),
            n,
            method: PartitionMethod::Ham,
            stats: Default::default(),
        };
        (part, pts)
    }

    #[test]
    fn one_cell_gives_weight_one() {
        let (part, pts) = manual(&[7]);
        let s = partition_sample(&part, &pts, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.weights, vec![1.0]);
        assert!(s.indices[0] < 7);
    }

    #[test]
    fn weights_follow_cell_sizes() {
        let (part, pts) = manual(&[10, 30]);
        let s = partition_sample(&part, &pts, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(s.weights, vec![0.25, 0.75]);
        assert!(s.indices[0] < 10 && (10..40).contains(&s.indices[1]));
        for (p, &i) in s.points.iter().zip(&s.indices) {
            assert_eq!(*p, pts[i]);
        }
    }

    #[test]
    fn every_method_gives_normalized_samples() {
        let pts = uniform(3000, 2);
        let tol = Tolerance::default();
        for m in SampleMethod::ALL {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let s = epsilon_sample(&pts, 40, m, &PartitionParams::default(), Presample::Never, &mut rng, &tol).unwrap();
            assert!((s.total_weight() - 1.0).abs() < 1e-12, "{m}");
            assert!(s.weights.iter().all(|&w| w > 0.0));
            assert_eq!(s.points.len(), s.weights.len());
            if m == SampleMethod::Random {
                assert_eq!(s.len(), 40);
            } else {
                assert!(s.len() >= 20 && s.len() <= 80, "{m}: {}", s.len());
            }
        }
    }

    #[test]
    fn full_random_sample_is_a_copy() {
        let pts = uniform(50, 4);
        let s = random_sample(&pts, 50, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(s.points, pts);
        assert_eq!(s.indices, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn bad_k_is_rejected() {
        let pts = uniform(10, 0);
        let tol = Tolerance::default();
        for k in [0, 1, 11] {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let r = epsilon_sample(&pts, k, SampleMethod::Ham, &PartitionParams::default(), Presample::Auto, &mut rng, &tol);
            assert!(matches!(r, Err(Error::InvalidK { .. })));
        }
    }

    #[test]
    fn presampling_maps_back_to_input() {
        let pts = uniform(5000, 5);
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = epsilon_sample(&pts, 16, SampleMethod::Ham, &PartitionParams::default(), Presample::Auto, &mut rng, &tol)
            .unwrap();
        assert_eq!(presample_size(5000, 16), 93);
        for (p, &i) in s.points.iter().zip(&s.indices) {
            assert_eq!(*p, pts[i]);
        }
        assert!((s.total_weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn size_law_values() {
        // 0.1: 10^(4/3) = 21.544, ln(10)^(2/3) = 1.7437, product 37.567
        assert_eq!(k_for_epsilon(0.1, 1.0).unwrap(), 38);
        // 0.01: 100^(4/3) = 464.16, ln(100)^(2/3) = 2.7680, product 1284.78
        assert_eq!(k_for_epsilon(0.01, 1.0).unwrap(), 1285);
        assert!(k_for_epsilon(0.0, 1.0).is_err());
        assert!(k_for_epsilon(0.1, 0.0).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in SampleMethod::ALL {
            assert_eq!(m.name().parse::<SampleMethod>().unwrap(), m);
        }
        assert_eq!("double-ham".parse::<SampleMethod>().unwrap(), SampleMethod::DoubleHam);
        assert!("nope".parse::<SampleMethod>().is_err());
    }
}
