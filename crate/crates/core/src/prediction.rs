//! The `L_j` model, the `K/L/𝓜` estimate pattern, and predicted slopes for `A_1` and L-invariants.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::Result;
use crate::ghost::{GhostContext, WeightIndex};
use crate::polygon::{lower_hull, RationalPolygon};
use crate::slopes::{derivative_polygon, k_thresholds, model_radius, DerivativePolygon, Provenance};
use crate::valuation::{int, rat, Rational, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Gt,
    Ge,
    Eq,
}

impl Relation {
    pub fn symbol(&self) -> &'static str {
        match self {
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictionModel {
    pub k: WeightIndex,
    /// `d = m · d_new`.
    pub d: usize,
    pub global_mult: u64,
    pub m_index: usize,
    pub slopes: Vec<Rational>,
    /// `d_l = m · r_l` for `l = 1..N`.
    pub block: Vec<u64>,
    /// `r_l = s_l` for `l ≥ M`, the model radius `R` below.
    pub r_list: Vec<Rational>,
    pub dagger: Rational,
    pub big_r: Rational,
    pub l_seq: Vec<Rational>,
    pub k_vals: Vec<Rational>,
    /// `pattern[i-1][j-1] = 𝓜_{i,j}`.
    pub pattern: Vec<Vec<Relation>>,
}

impl PredictionModel {
    pub fn n(&self) -> usize {
        self.slopes.len()
    }

    /// `Σ_{l ≥ from} d_l` (1-based `from`).
    pub fn tail(&self, from: usize) -> u64 {
        self.block.iter().skip(from.saturating_sub(1)).sum()
    }

    /// Hull of `{(0,0)} ∪ {(j, -L_j)}`.
    pub fn l_hull(&self) -> Result<RationalPolygon> {
        let mut pts = vec![(0, Valuation::zero())];
        pts.extend(self.l_seq.iter().enumerate().map(|(j, l)| (j as i64 + 1, Valuation::Finite(-l))));
        lower_hull(&pts)
    }

    /// The slope profile the `L_j` hull must have: `-s_N … -s_M` then `-R`.
    pub fn expected_l_profile(&self) -> Vec<(Rational, u64)> {
        let mut out: Vec<(Rational, u64)> =
            (self.m_index..=self.n()).rev().map(|l| (-&self.slopes[l - 1], 2 * self.block[l - 1])).collect();
        let rest = self.d as u64 - 2 * self.tail(self.m_index);
        if rest > 0 {
            out.push((-&self.big_r, rest));
        }
        out
    }

    pub fn eq_positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for l in (self.m_index..=self.n()).rev() {
            let i = self.tail(l) as usize;
            out.push((i, 2 * i));
            if self.d - i != i {
                out.push((self.d - i, 2 * i));
            }
        }
        out.sort();
        out
    }
}

pub fn build_model(ctx: &GhostContext, k: WeightIndex) -> PredictionModel {
    let dp = derivative_polygon(ctx, k);
    let m = ctx.global_mult();
    let (dagger, big_r) = model_radius(ctx, k);
    let n = dp.n();
    let block: Vec<u64> = dp.multiplicities.iter().map(|r| r * m).collect();
    let r_list: Vec<Rational> =
        (1..=n).map(|l| if l >= dp.m_index { dp.s(l).clone() } else { big_r.clone() }).collect();
    let d = (2 * block.iter().sum::<u64>()) as usize;
    let mut l_seq = Vec::with_capacity(d);
    let mut acc = Rational::zero();
    for l in (1..=n).rev() {
        for _ in 0..2 * block[l - 1] {
            acc += &r_list[l - 1];
            l_seq.push(acc.clone());
        }
    }
    let k_vals = (1..=d).map(|i| int((k.k() as i64 - 2) * i as i64)).collect();
    let mut model = PredictionModel {
        k,
        d,
        global_mult: m,
        m_index: dp.m_index,
        slopes: dp.slopes.clone(),
        block,
        r_list,
        dagger,
        big_r,
        l_seq,
        k_vals,
        pattern: Vec::new(),
    };
    model.pattern = build_pattern(&model);
    model
}

fn build_pattern(model: &PredictionModel) -> Vec<Vec<Relation>> {
    let d = model.d;
    let s_m = model.tail(model.m_index) as usize;
    let mut pat = vec![vec![Relation::Ge; d]; d];
    for i in 1..=d {
        for j in 1..=d {
            let strict = i == d || (i <= s_m && j > 2 * i) || (i + s_m >= d && i < d && j > 2 * (d - i));
            if strict {
                pat[i - 1][j - 1] = Relation::Gt;
            }
        }
    }
    for (i, j) in model.eq_positions() {
        pat[i - 1][j - 1] = Relation::Eq;
    }
    pat
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopePrediction {
    pub k: WeightIndex,
    pub a1_known: Vec<(Rational, u64)>,
    pub a1_floor: Rational,
    /// Emitted from thresholds: `-(CS + 1)` over the closed-form block.
    pub linv_known: Vec<(Rational, u64)>,
    /// Emitted from derivative slopes directly: `-s_j - 1` with multiplicity `2 d_j`.
    pub linv_from_slopes: Vec<(Rational, u64)>,
    pub linv_floor: Rational,
    pub exceptional_count: u64,
    /// Central-block size reported by the threshold pipeline.
    pub sweep_block: u64,
}

fn multiset(values: impl IntoIterator<Item = Rational>) -> Vec<(Rational, u64)> {
    let mut map = BTreeMap::new();
    for v in values {
        *map.entry(v).or_insert(0u64) += 1;
    }
    map.into_iter().collect()
}

pub fn predict_slopes(ctx: &GhostContext, k: WeightIndex) -> Result<SlopePrediction> {
    let model = build_model(ctx, k);
    let th = k_thresholds(ctx, k)?;
    let kk = int(k.k() as i64 - 2);
    let known = |f: &dyn Fn(&Rational) -> Rational| -> Vec<(Rational, u64)> {
        let mut v: Vec<(Rational, u64)> =
            (model.m_index..=model.n()).map(|l| (f(&model.slopes[l - 1]), 2 * model.block[l - 1])).collect();
        v.sort();
        v
    };
    let a1_known = known(&|s| &kk - s);
    let linv_from_slopes = known(&|s| -s - int(1));
    let m = th.global_mult as usize;
    let linv_known = multiset(
        th.global
            .iter()
            .enumerate()
            .filter(|(i, _)| th.provenance[i / m] == Provenance::ClosedForm)
            .map(|(_, cs)| -(cs + int(1))),
    );
    let known_total: u64 = linv_known.iter().map(|v| v.1).sum();
    Ok(SlopePrediction {
        k,
        a1_floor: &kk - &model.big_r,
        linv_floor: -&model.big_r - int(1),
        a1_known,
        linv_known,
        linv_from_slopes,
        exceptional_count: model.d as u64 - known_total,
        sweep_block: (th.sweep_count() * m) as u64,
    })
}

/// Subtracts `k - 3` from every slope.
pub fn gs_translate(a1: &[(Rational, u64)], k: u64) -> Vec<(Rational, u64)> {
    let shift = int(k as i64 - 3);
    a1.iter().map(|(v, m)| (v - &shift, *m)).collect()
}

/// `2m((2⌊log_p k_•⌋ + 5)/(p-1) + 1)`.
pub fn exceptional_bound(ctx: &GhostContext, k: WeightIndex) -> Rational {
    let lg = crate::valuation::ilog(k.k_bullet(), ctx.p()) as i64;
    int(2 * ctx.global_mult() as i64) * (rat(2 * lg + 5, ctx.p() as i64 - 1) + int(1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralityReport {
    pub k: WeightIndex,
    /// Known L-invariant slopes with membership in `Z + k/2`.
    pub linv: Vec<(Rational, u64, bool)>,
    /// Derivative slopes with multiplicity and whether the multiplicity rule holds.
    pub derivative: Vec<(Rational, u64, bool)>,
    pub exceptions: u64,
}

pub fn integrality_report(ctx: &GhostContext, k: WeightIndex) -> Result<IntegralityReport> {
    let pred = predict_slopes(ctx, k)?;
    let dp = derivative_polygon(ctx, k);
    let shift = rat(k.k() as i64, 2);
    let linv: Vec<(Rational, u64, bool)> =
        pred.linv_known.iter().map(|(v, m)| (v.clone(), *m, (v - &shift).is_integer())).collect();
    let derivative = derivative_rule(&dp, ctx.a());
    let exceptions = linv.iter().filter(|e| !e.2).map(|e| e.1).sum();
    Ok(IntegralityReport { k, linv, derivative, exceptions })
}

fn derivative_rule(dp: &DerivativePolygon, a: u64) -> Vec<(Rational, u64, bool)> {
    dp.slopes
        .iter()
        .zip(&dp.multiplicities)
        .map(|(s, &r)| {
            let ok = if r == 1 { s.is_integer() } else { r % 2 == 0 && (s - rat(a as i64, 2)).is_integer() };
            (s.clone(), r, ok)
        })
        .collect()
}

/// `y_i(r) = 2 · (sum of the first i global newslopes at radius r)` for `i = 0..d`, from the
/// three-part description extended continuously to window endpoints. Requires `r ≥ R†`.
pub fn y_profile(ctx: &GhostContext, k: WeightIndex, r: &Rational) -> Option<Vec<Rational>> {
    let dp = derivative_polygon(ctx, k);
    let (dagger, _) = model_radius(ctx, k);
    if r < &dagger {
        return None;
    }
    let base = rat(k.k() as i64 - 2, 2);
    let half_new = *dp.breakpoints.last().unwrap_or(&0) as usize;
    let local: Vec<Rational> = match (1..=dp.n()).find(|&i| r <= dp.s(i)) {
        None => vec![base; 2 * half_new],
        Some(i) => {
            let mut out = Vec::new();
            for j in (i..=dp.n()).rev() {
                out.extend(std::iter::repeat_n(&base + r - dp.s(j), dp.r(j) as usize));
            }
            out.extend(std::iter::repeat_n(base.clone(), 2 * dp.breakpoints[i - 1] as usize));
            for j in i..=dp.n() {
                out.extend(std::iter::repeat_n(&base - r + dp.s(j), dp.r(j) as usize));
            }
            out
        }
    };
    let global = crate::slopes::stretch_sequence(&local, ctx.global_mult());
    let mut y = vec![Rational::zero()];
    for s in global {
        let next = y.last().expect("nonempty") + s * int(2);
        y.push(next);
    }
    Some(y)
}
