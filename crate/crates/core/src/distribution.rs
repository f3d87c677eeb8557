//! Normalized slope multisets `Z_k`, `Z'_k`, `Y_k` and their empirical statistics.

use std::cmp::Ordering;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{GhostError, Result};
use crate::ghost::{GhostContext, WeightIndex};
use crate::prediction::predict_slopes;
use crate::slopes::{derivative_polygon, k_thresholds, stretch_sequence};
use crate::valuation::{int, rat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SampleKind {
    Threshold,
    Derivative,
    Linv,
}

impl SampleKind {
    pub fn label(&self) -> &'static str {
        match self {
            SampleKind::Threshold => "threshold",
            SampleKind::Derivative => "derivative",
            SampleKind::Linv => "linv",
        }
    }
}

impl FromStr for SampleKind {
    type Err = GhostError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "threshold" => Ok(SampleKind::Threshold),
            "derivative" => Ok(SampleKind::Derivative),
            "linv" => Ok(SampleKind::Linv),
            _ => Err(GhostError::InvalidConfig(format!("unknown sample kind {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionSample {
    pub k: WeightIndex,
    pub kind: SampleKind,
    /// Sorted ascending.
    pub values: Vec<Rational>,
    /// Number of values standing in for the exceptional block (LINV with floors included).
    pub floor_entries: u64,
}

impl DistributionSample {
    pub fn new(k: WeightIndex, kind: SampleKind, mut values: Vec<Rational>) -> Self {
        values.sort();
        DistributionSample { k, kind, values, floor_entries: 0 }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The `n`-th power mean; zero for an empty sample.
    pub fn moment(&self, n: u32) -> Rational {
        if self.values.is_empty() {
            return Rational::zero();
        }
        let total: Rational = self.values.iter().map(|v| pow(v, n)).sum();
        total / int(self.values.len() as i64)
    }

    pub fn moments(&self, n_max: u32) -> Vec<(u32, Rational)> {
        (1..=n_max).map(|n| (n, self.moment(n))).collect()
    }

    pub fn max(&self) -> Option<&Rational> {
        self.values.last()
    }
}

fn pow(v: &Rational, n: u32) -> Rational {
    (0..n).fold(Rational::one(), |acc, _| acc * v)
}

/// `2(p+1) / ((p-1) k)`.
pub fn normalization(p: u64, k: u64) -> Rational {
    rat(2 * (p as i64 + 1), (p as i64 - 1) * k as i64)
}

pub fn sample(ctx: &GhostContext, k: WeightIndex, kind: SampleKind) -> Result<DistributionSample> {
    sample_with(ctx, k, kind, false)
}

/// Builds the normalized multiset; `include_floor` adds the exceptional LINV block at its floor.
pub fn sample_with(ctx: &GhostContext, k: WeightIndex, kind: SampleKind, include_floor: bool) -> Result<DistributionSample> {
    let c = normalization(ctx.p(), k.k());
    if ctx.dimensions(k).d_new <= 0 {
        return Ok(DistributionSample::new(k, kind, Vec::new()));
    }
    let m = ctx.global_mult();
    match kind {
        SampleKind::Threshold => {
            let th = k_thresholds(ctx, k)?;
            Ok(DistributionSample::new(k, kind, th.global.iter().map(|v| v * &c).collect()))
        }
        SampleKind::Derivative => {
            let dp = derivative_polygon(ctx, k);
            let doubled: Vec<Rational> = dp.unit_slopes().iter().flat_map(|s| [s.clone(), s.clone()]).collect();
            Ok(DistributionSample::new(k, kind, stretch_sequence(&doubled, m).iter().map(|v| v * &c).collect()))
        }
        SampleKind::Linv => {
            let pred = predict_slopes(ctx, k)?;
            let mut values: Vec<Rational> = pred
                .linv_known
                .iter()
                .flat_map(|(v, mult)| std::iter::repeat_n(-(v * &c), *mult as usize))
                .collect();
            let mut floor_entries = 0;
            if include_floor {
                floor_entries = pred.exceptional_count;
                values.extend(std::iter::repeat_n(-(&pred.linv_floor * &c), floor_entries as usize));
            }
            let mut s = DistributionSample::new(k, kind, values);
            s.floor_entries = floor_entries;
            Ok(s)
        }
    }
}

/// Samples every weight in parallel, preserving input order.
pub fn sample_many(ctx: &GhostContext, ks: &[WeightIndex], kind: SampleKind) -> Result<Vec<DistributionSample>> {
    ks.par_iter().map(|&k| sample(ctx, k, kind)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylReport {
    pub n: u32,
    pub target: Rational,
    /// `|moment - 1/(n+1)|` for each sample, in input order.
    pub distances: Vec<Rational>,
    /// Distances never increase over the second half of the sequence.
    pub trend_decreasing: bool,
}

impl WeylReport {
    pub fn last_distance(&self) -> &Rational {
        self.distances.last().expect("non-empty by construction")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylTable {
    pub ks: Vec<u64>,
    /// `moments[i][n-1]` is the `n`-th moment of sample `i`.
    pub moments: Vec<Vec<Rational>>,
    pub reports: Vec<WeylReport>,
}

pub fn weyl_moments(samples: &[DistributionSample], n_max: u32) -> Result<WeylTable> {
    if samples.len() < 3 {
        return Err(GhostError::Domain(format!("need at least 3 samples, got {}", samples.len())));
    }
    let moments: Vec<Vec<Rational>> = samples.iter().map(|s| (1..=n_max).map(|n| s.moment(n)).collect()).collect();
    let reports = (1..=n_max)
        .map(|n| {
            let target = rat(1, n as i64 + 1);
            let distances: Vec<Rational> = moments.iter().map(|m| (&m[n as usize - 1] - &target).abs()).collect();
            let half = &distances[distances.len() / 2..];
            let trend_decreasing = half.windows(2).all(|w| w[1] <= w[0]);
            WeylReport { n, target, distances, trend_decreasing }
        })
        .collect();
    Ok(WeylTable { ks: samples.iter().map(|s| s.k.k()).collect(), moments, reports })
}

/// `sup_x |F(x) - U(x)|` for the empirical CDF `F` against the uniform CDF on `[0, 1]`.
pub fn discrepancy(values: &[Rational]) -> Result<Rational> {
    if values.is_empty() {
        return Err(GhostError::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort();
    let m = int(sorted.len() as i64);
    let clamp = |v: &Rational| -> Rational {
        if v.is_negative() {
            Rational::zero()
        } else if *v > Rational::one() {
            Rational::one()
        } else {
            v.clone()
        }
    };
    let mut best = Rational::zero();
    for (i, v) in sorted.iter().enumerate() {
        let u = clamp(v);
        let above = int(i as i64 + 1) / &m - &u;
        let below = &u - int(i as i64) / &m;
        for d in [above, below] {
            if d > best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// Entries of `a` left unmatched by equal entries of `b`, both taken as multisets.
pub fn multiset_mismatch(a: &[Rational], b: &[Rational]) -> usize {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    x.sort();
    y.sort();
    let (mut i, mut j, mut matched) = (0, 0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                matched += 1;
                i += 1;
                j += 1;
            }
        }
    }
    x.len() - matched
}

/// `(4⌊log_p k_•⌋ + 10)/(p-1) + 2`.
pub fn z_mismatch_bound(p: u64, k: WeightIndex) -> Rational {
    let lg = crate::valuation::ilog(k.k_bullet(), p) as i64;
    rat(4 * lg + 10, p as i64 - 1) + int(2)
}
