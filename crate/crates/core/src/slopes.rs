//! k-newslopes, derivative polygons, the near-Steinberg criterion and k-thresholds.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{GhostError, Result};
use crate::ghost::{AnchorProfile, GhostContext, WeightIndex};
use crate::polygon::{assemble, RationalPolygon, ScaledPoints};
use crate::valuation::{floor_to_i64, from_doubled, half, int, rat, weight_distance, Rational, Valuation};

/// A generic weight `w_*` at valuation distance `radius` from `w_anchor`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightPoint {
    pub anchor: WeightIndex,
    pub radius: Valuation,
    pub generic: bool,
}

impl WeightPoint {
    pub fn new(anchor: WeightIndex, radius: Valuation) -> Result<Self> {
        if radius <= Valuation::zero() {
            return Err(GhostError::Domain(format!("radius must be positive, got {radius}")));
        }
        Ok(WeightPoint { anchor, radius, generic: true })
    }

    pub fn at(anchor: WeightIndex) -> Self {
        WeightPoint { anchor, radius: Valuation::Infinity, generic: true }
    }

    /// `v(w_* - w_{k2}) = min(radius, v(w_anchor - w_{k2}))`.
    pub fn distance_to(&self, k2: u64, p: u64) -> Valuation {
        if k2 == self.anchor.k() {
            self.radius.clone()
        } else {
            self.radius.clone().min(weight_distance(self.anchor.k(), k2, p))
        }
    }

    pub fn in_good_region(&self, ctx: &GhostContext) -> bool {
        self.radius > Valuation::from_int(ctx.m_of_k(self.anchor) as i64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivativePolygon {
    pub k: WeightIndex,
    /// `Δ'_{k,l}` for `l = 0..d_new/2`.
    pub raw: Vec<Rational>,
    /// The same quantity evaluated on the `-l` side.
    pub mirror: Vec<Rational>,
    pub hull: RationalPolygon,
    /// `s_1 < … < s_N`.
    pub slopes: Vec<Rational>,
    pub multiplicities: Vec<u64>,
    /// `n_0 = 0 < n_1 < … < n_N = d_new/2`.
    pub breakpoints: Vec<u64>,
    pub m_of_k: u32,
    /// Smallest `i` (1-based) with `s_i > M(k)`, or `N + 1`.
    pub m_index: usize,
}

impl DerivativePolygon {
    pub fn n(&self) -> usize {
        self.slopes.len()
    }

    /// `s_i`, 1-based.
    pub fn s(&self, i: usize) -> &Rational {
        &self.slopes[i - 1]
    }

    /// `r_i`, 1-based.
    pub fn r(&self, i: usize) -> u64 {
        self.multiplicities[i - 1]
    }

    pub fn duality_holds(&self) -> bool {
        self.raw == self.mirror
    }

    /// Multiplicity-one slopes are integers; the others have even multiplicity and lie in `a/2 + Z`.
    pub fn integrality_holds(&self, a: u64) -> bool {
        self.slopes.iter().zip(&self.multiplicities).all(|(s, &r)| {
            if r == 1 {
                s.is_integer()
            } else {
                r % 2 == 0 && (s - rat(a as i64, 2)).is_integer()
            }
        })
    }

    /// Slope of `Δ_k` over `[l, l+1]` for `l = 0..d_new/2`.
    pub fn unit_slopes(&self) -> Vec<Rational> {
        self.hull.slope_sequence()
    }

    pub fn m_of_k_val(&self) -> Rational {
        int(self.m_of_k as i64)
    }
}

/// Number of points used when truncating `G(w_*, t)` for an anchor with `d_iw` given.
pub(crate) fn hull_range(d_iw: i64) -> usize {
    (2 * d_iw + 16) as usize
}

pub fn derivative_polygon(ctx: &GhostContext, k: WeightIndex) -> Arc<DerivativePolygon> {
    if let Some(hit) = ctx.derivative_cache.get(&k.k()) {
        return Arc::clone(&hit);
    }
    let dp = Arc::new(load_persisted(ctx, k).unwrap_or_else(|| {
        let (raw, mirror) = raw_deltas(ctx, k);
        let dp = finish_derivative(ctx, k, raw, mirror);
        persist(ctx, &dp);
        dp
    }));
    ctx.derivative_cache.entry(k.k()).or_insert(dp).clone()
}

fn raw_deltas(ctx: &GhostContext, k: WeightIndex) -> (Vec<Rational>, Vec<Rational>) {
    let dims = ctx.dimensions(k);
    let half_new = (dims.d_new / 2).max(0);
    let mid = dims.d_iw / 2;
    let prof = AnchorProfile::new(ctx, k.k_bullet() as i64, dims.d_iw.max(0) as usize);
    let kk = k.k() as i64 - 2;
    let mut raw = Vec::with_capacity(half_new as usize + 1);
    let mut mirror = Vec::with_capacity(half_new as usize + 1);
    for l in 0..=half_new {
        raw.push(from_doubled(2 * prof.hatted((mid + l) as usize) - kk * l));
        mirror.push(from_doubled(2 * prof.hatted((mid - l) as usize) + kk * l));
    }
    (raw, mirror)
}

fn finish_derivative(ctx: &GhostContext, k: WeightIndex, raw: Vec<Rational>, mirror: Vec<Rational>) -> DerivativePolygon {
    let xs: Vec<i64> = (0..raw.len() as i64).collect();
    let doubled: Vec<i128> = raw
        .iter()
        .map(|r| {
            let n = r.numer().to_i128().expect("Δ' too large");
            if r.denom().is_one() {
                2 * n
            } else {
                n
            }
        })
        .collect();
    let pts = ScaledPoints { xs: &xs, ys: &doubled, ds: None };
    let order: Vec<usize> = (0..xs.len()).collect();
    let hull_idx = pts.hull(&order);
    let points = raw.iter().enumerate().map(|(l, v)| (l as i64, Valuation::Finite(v.clone()))).collect();
    let hull = assemble(points, &xs, &order, &hull_idx, |o, a, b| pts.turn(o, a, b), |i| raw[i].clone());
    let slopes: Vec<Rational> = hull.slopes.iter().map(|s| s.0.clone()).collect();
    let multiplicities: Vec<u64> = hull.slopes.iter().map(|s| s.1).collect();
    let breakpoints = hull.vertices.iter().map(|v| v.0 as u64).collect();
    let m_of_k = ctx.m_of_k(k);
    let m = int(m_of_k as i64);
    let m_index = 1 + slopes.iter().filter(|s| **s <= m).count();
    DerivativePolygon { k, raw, mirror, hull, slopes, multiplicities, breakpoints, m_of_k, m_index }
}

fn persist_path(ctx: &GhostContext, k: WeightIndex) -> Option<std::path::PathBuf> {
    ctx.cache_dir().map(|d| {
        d.join(format!("p{}-a{}-e{}", ctx.p(), ctx.a(), ctx.s_eps())).join(format!("k{}.json", k.k()))
    })
}

fn load_persisted(ctx: &GhostContext, k: WeightIndex) -> Option<DerivativePolygon> {
    let text = std::fs::read_to_string(persist_path(ctx, k)?).ok()?;
    let v: serde_json::Value = serde_json::from_str(&text).ok()?;
    let parse = |key: &str| -> Option<Vec<Rational>> {
        v.get(key)?
            .as_array()?
            .iter()
            .map(|e| e.as_str().and_then(|s| s.parse().ok()))
            .collect()
    };
    let (raw, mirror) = (parse("raw")?, parse("mirror")?);
    (raw.len() as i64 == ctx.dimensions(k).d_new / 2 + 1).then(|| finish_derivative(ctx, k, raw, mirror))
}

fn persist(ctx: &GhostContext, dp: &DerivativePolygon) {
    let Some(path) = persist_path(ctx, dp.k) else { return };
    let strs = |v: &[Rational]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>();
    let body = json!({"k": dp.k.k(), "raw": strs(&dp.raw), "mirror": strs(&dp.mirror)});
    // persistence is best-effort; a failed write only costs recomputation
    if let Some(dir) = path.parent() {
        let _ = std::fs::create_dir_all(dir);
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    if std::fs::write(&tmp, body.to_string()).is_ok() {
        let _ = std::fs::rename(&tmp, &path);
    }
}

/// Def.-style test: `n` lies strictly inside `k2`'s new range and `w_*` is close enough to `w_{k2}`.
pub fn is_near_steinberg(ctx: &GhostContext, n: u64, w: &WeightPoint, k2: WeightIndex) -> bool {
    let dims = ctx.dimensions(k2);
    let n = n as i64;
    if !(dims.d_ur < n && n < dims.d_iw - dims.d_ur) {
        return false;
    }
    let l = (n - dims.d_iw / 2).unsigned_abs() as i64;
    let dp = derivative_polygon(ctx, k2);
    match dp.hull.slope_on(l) {
        Some(step) => w.distance_to(k2.k(), ctx.p()) >= Valuation::Finite(step),
        None => false,
    }
}

/// Indices `n ≤ n_range` that are near-Steinberg for no weight of the class.
pub fn breakpoints_by_criterion(ctx: &GhostContext, w: &WeightPoint, n_range: u64) -> BTreeSet<u64> {
    let top = ctx.last_below_ur(n_range as i64);
    let covers: Vec<(i64, i64)> = (0..=top)
        .into_par_iter()
        .filter_map(|kb| {
            let k2 = ctx.weight_from_bullet(kb as u64);
            let dims = ctx.dimensions(k2);
            if dims.d_new <= 0 {
                return None;
            }
            let dp = derivative_polygon(ctx, k2);
            let v = w.distance_to(k2.k(), ctx.p());
            let unit = dp.unit_slopes();
            let c = unit.partition_point(|s| Valuation::Finite(s.clone()) <= v) as i64;
            let mid = dims.d_iw / 2;
            (c > 0).then_some((mid - c + 1, mid + c - 1))
        })
        .collect();
    let size = n_range as usize + 2;
    let mut diff = vec![0i64; size];
    for (lo, hi) in covers {
        let (lo, hi) = (lo.max(1), hi.min(n_range as i64));
        if lo <= hi {
            diff[lo as usize] += 1;
            diff[hi as usize + 1] -= 1;
        }
    }
    let mut out = BTreeSet::from([0]);
    let mut run = 0;
    for n in 1..=n_range as usize {
        run += diff[n];
        if run == 0 {
            out.insert(n as u64);
        }
    }
    out
}

/// Which side of a radius a hull is taken on; `Exact` ignores the derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Side {
    Exact,
    Left,
    Right,
}

/// Ordinates `Q · v(g_n(w_*))` over a truncated range for one anchor.
struct RadiusEvaluator {
    profile: AnchorProfile,
    xs: Vec<i64>,
}

struct Snapshot {
    hull: Vec<usize>,
    ys: Vec<i128>,
    ds: Vec<i128>,
    q: i128,
    sign: i128,
}

fn to_i128(x: &BigInt) -> Result<i128> {
    x.to_i128().ok_or_else(|| GhostError::Domain("radius denominator too large".into()))
}

impl RadiusEvaluator {
    fn new(ctx: &GhostContext, k: WeightIndex, n_max: usize) -> Self {
        RadiusEvaluator {
            profile: AnchorProfile::new(ctx, k.k_bullet() as i64, n_max),
            xs: (0..=n_max as i64).collect(),
        }
    }

    fn n_max(&self) -> usize {
        self.profile.n_max
    }

    /// Integer ordinates, scale, and the unit interval whose derivative applies on `side`.
    fn ordinates(&self, r: &Rational, side: Side) -> Result<(Vec<i128>, Vec<i128>, i128, i128)> {
        let j0 = floor_to_i64(r) as usize;
        let q = to_i128(r.denom())?;
        let t = to_i128(&(r - int(j0 as i64)).numer().clone())?;
        let (dj, sign) = match side {
            Side::Left if r.is_integer() => (j0.checked_sub(1), -1),
            Side::Left => (Some(j0), -1),
            Side::Right | Side::Exact => (Some(j0), 1),
        };
        let n = self.n_max();
        let mut ys = Vec::with_capacity(n + 1);
        let mut ds = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let y = q * self.profile.base(j0, i) as i128 + t * self.profile.level(j0, i) as i128;
            ys.push(y);
            ds.push(match (side, dj) {
                (Side::Exact, _) | (_, None) => 0,
                (_, Some(j)) => sign * self.profile.level(j, i) as i128,
            });
        }
        Ok((ys, ds, q, sign))
    }

    fn snapshot(&self, r: &Rational, side: Side) -> Result<Snapshot> {
        let (ys, ds, q, sign) = self.ordinates(r, side)?;
        let order: Vec<usize> = (0..=self.n_max()).collect();
        let pts = ScaledPoints { xs: &self.xs, ys: &ys, ds: (side != Side::Exact).then_some(&ds[..]) };
        let hull = pts.hull(&order);
        Ok(Snapshot { hull, ys, ds, q, sign })
    }

    fn polygon(&self, r: &Valuation) -> Result<RationalPolygon> {
        let n = self.n_max();
        let (ys, q): (Vec<Option<i128>>, i128) = match r {
            Valuation::Infinity => ((0..=n).map(|i| self.profile.at_infinity(i).map(i128::from)).collect(), 1),
            Valuation::Finite(r) => {
                let (ys, _, q, _) = self.ordinates(r, Side::Exact)?;
                (ys.into_iter().map(Some).collect(), q)
            }
        };
        let finite: Vec<usize> = (0..=n).filter(|&i| ys[i].is_some()).collect();
        let flat: Vec<i128> = ys.iter().map(|y| y.unwrap_or(0)).collect();
        let pts = ScaledPoints { xs: &self.xs, ys: &flat, ds: None };
        let hull = pts.hull(&finite);
        let big_q = BigInt::from(q);
        let value = |i: usize| Rational::new(BigInt::from(flat[i]), big_q.clone());
        let points = (0..=n)
            .map(|i| (i as i64, ys[i].map_or(Valuation::Infinity, |_| Valuation::Finite(value(i)))))
            .collect();
        Ok(assemble(points, &self.xs, &finite, &hull, |o, a, b| pts.turn(o, a, b), value))
    }
}

impl Snapshot {
    fn segment(&self, x: i64) -> (usize, usize) {
        let i = self.hull.partition_point(|&v| (v as i64) <= x).clamp(1, self.hull.len() - 1);
        (self.hull[i - 1], self.hull[i])
    }

    fn interp(&self, v: &[i128], x: i64) -> Rational {
        let (a, b) = self.segment(x);
        let (xa, xb) = (a as i64, b as i64);
        let num = BigInt::from(v[a]) * BigInt::from(xb - x) + BigInt::from(v[b]) * BigInt::from(x - xa);
        Rational::new(num, BigInt::from(xb - xa))
    }

    fn value(&self, x: i64) -> Rational {
        self.interp(&self.ys, x) / Rational::from_integer(BigInt::from(self.q))
    }

    fn derivative(&self, x: i64) -> Rational {
        self.interp(&self.ds, x) * Rational::from_integer(BigInt::from(self.sign))
    }
}

/// Exact newslope tracker used by the threshold sweep.
struct Sweep {
    eval: RadiusEvaluator,
    memo: HashMap<(Rational, Side), Arc<Snapshot>>,
}

impl Sweep {
    fn snap(&mut self, r: &Rational, side: Side) -> Result<Arc<Snapshot>> {
        if let Some(s) = self.memo.get(&(r.clone(), side)) {
            return Ok(Arc::clone(s));
        }
        let s = Arc::new(self.eval.snapshot(r, side)?);
        self.memo.insert((r.clone(), side), Arc::clone(&s));
        Ok(s)
    }

    /// Breakpoints in `(a, b)` of the concave piecewise-linear `r ↦ h(x, r)`.
    fn breaks(&mut self, x: i64, a: &Rational, b: &Rational, out: &mut Vec<Rational>) -> Result<()> {
        let (sa, sb) = (self.snap(a, Side::Right)?, self.snap(b, Side::Left)?);
        let (ha, da) = (sa.value(x), sa.derivative(x));
        let (hb, db) = (sb.value(x), sb.derivative(x));
        if da == db {
            return Ok(());
        }
        let t = (&hb - &ha + &da * a - &db * b) / (&da - &db);
        let line = &ha + &da * (&t - a);
        let ht = self.snap(&t, Side::Exact)?.value(x);
        if ht == line {
            out.push(t);
            return Ok(());
        }
        self.breaks(x, a, &t, out)?;
        self.breaks(x, &t, b, out)
    }

    fn newslope(&mut self, x: i64, r: &Rational) -> Result<Rational> {
        let s = self.snap(r, Side::Exact)?;
        Ok(s.value(x) - s.value(x - 1))
    }
}

/// Thresholds at newslope indices `ns` (1-based) by exact search over `(0, upper]`.
fn sweep_indices(ctx: &GhostContext, k: WeightIndex, ns: &[u64], upper: i64) -> Result<Vec<Rational>> {
    let dims = ctx.dimensions(k);
    let target = rat(k.k() as i64 - 2, 2);
    let mut sw = Sweep { eval: RadiusEvaluator::new(ctx, k, hull_range(dims.d_iw)), memo: HashMap::new() };
    let mut out = Vec::with_capacity(ns.len());
    for &n in ns {
        let x = dims.d_ur + n as i64;
        let mut crit: BTreeSet<Rational> = (1..=upper).map(int).collect();
        for j in 0..upper {
            let (a, b) = (int(j), int(j + 1));
            for xx in [x - 1, x] {
                let mut found = Vec::new();
                sw.breaks(xx, &a, &b, &mut found)?;
                crit.extend(found.into_iter().filter(|t| t > &Rational::zero()));
            }
        }
        let above = int(upper) + half();
        if sw.newslope(x, &above)? != target {
            return Err(GhostError::Domain(format!("sweep bound {upper} too low for index {n} at k={}", k.k())));
        }
        let crit: Vec<Rational> = crit.into_iter().collect();
        let mut cs = Rational::zero();
        for i in (0..crit.len()).rev() {
            let lo = if i == 0 { Rational::zero() } else { crit[i - 1].clone() };
            let hi = &crit[i];
            let third = (hi - &lo) / int(3);
            let interior_ok = sw.newslope(x, &(&lo + &third))? == target
                && sw.newslope(x, &(&lo + &third * int(2)))? == target;
            let point_ok = sw.newslope(x, hi)? == target;
            if !point_ok {
                cs = hi.clone();
                break;
            }
            if !interior_ok {
                cs = hi.clone();
                break;
            }
        }
        out.push(cs);
    }
    Ok(out)
}

/// `CS_n(k)` by exact search over all radii up to `max(s_N, M(k)) + 1`.
pub fn sweep_threshold(ctx: &GhostContext, k: WeightIndex, n: u64) -> Result<Valuation> {
    let dp = derivative_polygon(ctx, k);
    let dims = ctx.dimensions(k);
    if n == 0 || n as i64 > dims.d_new {
        return Err(GhostError::Domain(format!("newslope index {n} outside 1..={}", dims.d_new)));
    }
    let top = dp.slopes.last().cloned().unwrap_or_else(Rational::zero).max(dp.m_of_k_val());
    let upper = top.ceil().to_integer().to_i64().unwrap_or(i64::MAX) + 1;
    Ok(Valuation::Finite(sweep_indices(ctx, k, &[n], upper)?.remove(0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Sweep,
}

impl Provenance {
    pub fn label(&self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed",
            Provenance::Sweep => "sweep",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdVector {
    pub k: WeightIndex,
    pub local: Vec<Rational>,
    pub provenance: Vec<Provenance>,
    pub global: Vec<Rational>,
    pub global_mult: u64,
}

impl ThresholdVector {
    /// Size of the central block computed by the sweep.
    pub fn sweep_count(&self) -> usize {
        self.provenance.iter().filter(|p| **p == Provenance::Sweep).count()
    }
}

pub fn k_thresholds(ctx: &GhostContext, k: WeightIndex) -> Result<ThresholdVector> {
    let dp = derivative_polygon(ctx, k);
    let d_new = ctx.dimensions(k).d_new.max(0) as u64;
    let half_new = d_new / 2;
    let mut local = vec![Rational::zero(); d_new as usize];
    let mut provenance = vec![Provenance::Sweep; d_new as usize];
    let nb = &dp.breakpoints;
    for j in dp.m_index..=dp.n() {
        let (outer, inner) = (nb[j], nb[j - 1]);
        let left = (half_new - outer + 1)..=(half_new - inner);
        let right = (half_new + inner + 1)..=(half_new + outer);
        for n in left.chain(right) {
            local[n as usize - 1] = dp.s(j).clone();
            provenance[n as usize - 1] = Provenance::ClosedForm;
        }
    }
    let central: Vec<u64> = (1..=d_new).filter(|&n| provenance[n as usize - 1] == Provenance::Sweep).collect();
    if !central.is_empty() {
        let found = sweep_indices(ctx, k, &central, dp.m_of_k as i64 + 1)?;
        for (n, cs) in central.iter().zip(found) {
            local[*n as usize - 1] = cs;
        }
    }
    let m = ctx.global_mult();
    let global = stretch_sequence(&local, m);
    Ok(ThresholdVector { k, local, provenance, global, global_mult: m })
}

/// Repeats each entry `m` times in place, matching the global index blocks.
pub fn stretch_sequence(local: &[Rational], m: u64) -> Vec<Rational> {
    local.iter().flat_map(|v| std::iter::repeat_n(v.clone(), m as usize)).collect()
}

/// Multiplies every multiplicity by `m`.
pub fn global_stretch(local: &[(Rational, u64)], m: u64) -> Vec<(Rational, u64)> {
    local.iter().map(|(v, mult)| (v.clone(), mult * m)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NewslopeSource {
    ClosedForm,
    Hull,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Newslopes {
    pub values: Vec<Rational>,
    pub source: NewslopeSource,
}

/// Three-part closed form, when the radius lies strictly inside a window above `M(k)`.
pub fn closed_form_newslopes(dp: &DerivativePolygon, k: WeightIndex, r: &Rational) -> Option<Vec<Rational>> {
    let base = rat(k.k() as i64 - 2, 2);
    let m = dp.m_of_k_val();
    let d_new = 2 * *dp.breakpoints.last().unwrap_or(&0) as usize;
    let top = dp.slopes.last().cloned().unwrap_or_else(Rational::zero).max(m.clone());
    if r >= &top {
        return Some(vec![base; d_new]);
    }
    if r <= &m {
        return None;
    }
    let i = (1..=dp.n()).find(|&i| r < dp.s(i))?;
    let lower = if i > 1 { dp.s(i - 1).clone().max(m) } else { m };
    if r <= &lower {
        return None;
    }
    let mut out = Vec::with_capacity(d_new);
    for j in (i..=dp.n()).rev() {
        out.extend(std::iter::repeat_n(&base + r - dp.s(j), dp.r(j) as usize));
    }
    out.extend(std::iter::repeat_n(base.clone(), 2 * dp.breakpoints[i - 1] as usize));
    for j in i..=dp.n() {
        out.extend(std::iter::repeat_n(&base - r + dp.s(j), dp.r(j) as usize));
    }
    Some(out)
}

/// Newton polygon of the ghost series at `w_*`, truncated to `n ≤ n_range`, with `(0, 0)` included.
pub fn newton_polygon_at(ctx: &GhostContext, n_range: u64, w: &WeightPoint) -> Result<RationalPolygon> {
    RadiusEvaluator::new(ctx, w.anchor, n_range as usize).polygon(&w.radius)
}

/// All slopes of the ghost Newton polygon at `w_*` over positions `1..=count`.
pub fn first_slopes(ctx: &GhostContext, w: &WeightPoint, count: usize) -> Result<Vec<Rational>> {
    let d_iw = ctx.dimensions(w.anchor).d_iw;
    let range = hull_range(d_iw).max(2 * count + 16);
    let np = newton_polygon_at(ctx, range as u64, w)?;
    Ok(np.slope_sequence().into_iter().take(count).collect())
}

pub fn newslopes_from_hull(ctx: &GhostContext, k: WeightIndex, w: &WeightPoint) -> Result<Vec<Rational>> {
    let dims = ctx.dimensions(w.anchor.max(k));
    let np = newton_polygon_at(ctx, hull_range(dims.d_iw) as u64, w)?;
    let own = ctx.dimensions(k);
    let seq = np.slope_sequence();
    Ok(seq[own.d_ur as usize..(own.d_iw - own.d_ur) as usize].to_vec())
}

/// The `d_new(k)` newslopes at `w_*`, from the closed form where it applies.
pub fn k_newslopes(ctx: &GhostContext, k: WeightIndex, w: &WeightPoint) -> Result<Newslopes> {
    if w.anchor == k {
        if let Valuation::Finite(r) = &w.radius {
            let dp = derivative_polygon(ctx, k);
            if let Some(values) = closed_form_newslopes(&dp, k, r) {
                return Ok(Newslopes { values, source: NewslopeSource::ClosedForm });
            }
        }
    }
    Ok(Newslopes { values: newslopes_from_hull(ctx, k, w)?, source: NewslopeSource::Hull })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeWindow {
    pub radius: Rational,
    pub max_slope: Rational,
    pub min_slope: Rational,
}

/// Test radius `𝐫_i` and the extreme newslopes `S_i`, `R_i` over the disc of that radius.
pub fn slope_window(ctx: &GhostContext, k: WeightIndex, i: usize) -> Result<SlopeWindow> {
    let dp = derivative_polygon(ctx, k);
    if i < dp.m_index || i > dp.n() {
        return Err(GhostError::Domain(format!("window index {i} outside {}..={}", dp.m_index, dp.n())));
    }
    let radius = test_radius(&dp, i);
    let base = rat(k.k() as i64 - 2, 2);
    let s_top = dp.s(dp.n());
    Ok(SlopeWindow {
        max_slope: &base + s_top - &radius,
        min_slope: &base - s_top + &radius,
        radius,
    })
}

fn test_radius(dp: &DerivativePolygon, i: usize) -> Rational {
    let m = dp.m_of_k_val();
    let lower = if i > 1 { dp.s(i - 1).clone().max(m) } else { m };
    let gap = (dp.s(i) - &lower).min(Rational::one());
    lower + gap * half()
}

/// `(R†, R)`: the smallest test radius and the model radius strictly between it and `min(M+1, s_M)`.
pub fn model_radius(ctx: &GhostContext, k: WeightIndex) -> (Rational, Rational) {
    let dp = derivative_polygon(ctx, k);
    let m = dp.m_of_k_val();
    if dp.m_index > dp.n() {
        return (&m + half(), m + rat(3, 4));
    }
    let dagger = test_radius(&dp, dp.m_index);
    let cap = (&m + int(1)).min(dp.s(dp.m_index).clone());
    let r = (&dagger + cap) * half();
    (dagger, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ghost::Mode;

    fn ctx() -> GhostContext {
        GhostContext::new(7, 2, 1, Mode::Exploratory).unwrap()
    }

    #[test]
    fn weight24_derivative_polygon() {
        let c = ctx();
        let dp = derivative_polygon(&c, c.weight(24).unwrap());
        assert_eq!(dp.raw, vec![int(17), int(19), int(25), int(34)]);
        assert_eq!(dp.slopes, vec![int(2), int(6), int(9)]);
        assert_eq!(dp.breakpoints, vec![0, 1, 2, 3]);
        assert_eq!((dp.m_of_k, dp.m_index), (2, 2));
        assert!(dp.duality_holds());
    }

    #[test]
    fn weight24_thresholds() {
        let c = ctx();
        let t = k_thresholds(&c, c.weight(24).unwrap()).unwrap();
        let want: Vec<Rational> = [9, 6, 2, 1, 6, 9].iter().map(|&v| int(v)).collect();
        assert_eq!(t.local, want);
        assert_eq!(t.sweep_count(), 2);
    }

    #[test]
    fn model_radius_weight24() {
        let c = ctx();
        let k = c.weight(24).unwrap();
        assert_eq!(model_radius(&c, k), (rat(5, 2), rat(11, 4)));
        let w = slope_window(&c, k, 3).unwrap();
        assert_eq!((w.radius, w.max_slope, w.min_slope), (rat(13, 2), rat(27, 2), rat(17, 2)));
        assert!(slope_window(&c, k, 1).is_err());
    }
}
