//! Dimension formulas, ghost multiplicities, ghost polynomials and ghost zero sets.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use dashmap::DashMap;

use crate::error::{GhostError, Result};
use crate::slopes::{DerivativePolygon, WeightPoint};
use crate::valuation::{ilog, is_prime, vp_u64, Rational, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Strict,
    Exploratory,
}

impl std::str::FromStr for Mode {
    type Err = GhostError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Mode::Strict),
            "exploratory" => Ok(Mode::Exploratory),
            other => Err(GhostError::InvalidConfig(format!("unknown mode {other:?}"))),
        }
    }
}

/// A weight `k = k_• (p-1) + k_ε` in the fixed congruence class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightIndex {
    k: u64,
    k_bullet: u64,
}

impl WeightIndex {
    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn k_bullet(&self) -> u64 {
        self.k_bullet
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DimensionTriple {
    pub d_iw: i64,
    pub d_ur: i64,
    pub d_new: i64,
}

/// Sparse `k ↦ m_n(k)` for one coefficient `g_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhostPolynomial {
    pub n: u64,
    pub zeros: BTreeMap<u64, u64>,
}

impl GhostPolynomial {
    pub fn degree(&self) -> u64 {
        self.zeros.values().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhostZeroSet {
    pub k: WeightIndex,
    /// Weights of all ghost zeros of `g_1 … g_{d_iw(k)}`, ascending.
    pub zeros: Vec<u64>,
    /// `M(k)`; zero when `k` is the only ghost zero in range.
    pub m_of_k: u32,
}

impl GhostZeroSet {
    /// `M(k) ≤ ⌊log_p k_•⌋ + 3`, reading `log_p 0` as 0.
    pub fn within_bound(&self, p: u64) -> bool {
        self.m_of_k <= ilog(self.k.k_bullet, p) + 3
    }
}

/// Per-level support intervals: `g_n` vanishes exactly at `k_•` in `[lo[n], hi[n]]`.
#[derive(Debug, Default)]
struct SupportTable {
    lo: Vec<i64>,
    hi: Vec<i64>,
    /// Union of supports of `g_1..g_n` as disjoint ascending `k_•` intervals, stored incrementally
    /// as gap boundaries: `gaps[i] = (n, a, b)` means levels `≤ n` leave `(a, b)` uncovered.
    gaps: Vec<(usize, i64, i64)>,
}

pub struct GhostContext {
    p: u64,
    a: u64,
    s_eps: u64,
    k_eps: u64,
    delta: i64,
    t1: i64,
    t2: i64,
    global_mult: u64,
    mode: Mode,
    warnings: Vec<String>,
    k_ceiling: u64,
    cache_dir: Option<PathBuf>,
    support: RwLock<Arc<SupportTable>>,
    pub(crate) derivative_cache: DashMap<u64, Arc<DerivativePolygon>>,
}

impl std::fmt::Debug for GhostContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GhostContext")
            .field("p", &self.p)
            .field("a", &self.a)
            .field("s_eps", &self.s_eps)
            .field("k_eps", &self.k_eps)
            .field("global_mult", &self.global_mult)
            .field("mode", &self.mode)
            .finish()
    }
}

fn rep(x: u64, modulus: u64) -> u64 {
    x % modulus
}

impl GhostContext {
    pub fn new(p: u64, a: u64, s_eps: u64, mode: Mode) -> Result<Self> {
        let bad = |msg: String| Err(GhostError::InvalidConfig(msg));
        if !is_prime(p) {
            return bad(format!("p = {p} is not prime"));
        }
        let strict_ok = p >= 11 && (2..=p - 5).contains(&a);
        let mut warnings = Vec::new();
        match mode {
            Mode::Strict if !strict_ok => {
                return bad(format!("strict mode needs p >= 11 and 2 <= a <= p-5 (got p={p}, a={a})"))
            }
            Mode::Exploratory => {
                if p < 5 || !(1..=p - 4).contains(&a) {
                    return bad(format!("exploratory mode needs p >= 5 and 1 <= a <= p-4 (got p={p}, a={a})"));
                }
                if !strict_ok {
                    warnings.push(format!("p={p}, a={a} lies outside the strict range (p >= 11, 2 <= a <= p-5)"));
                }
            }
            Mode::Strict => {}
        }
        if s_eps > p - 2 {
            return bad(format!("s_eps = {s_eps} must lie in [0, {}]", p - 2));
        }
        let q = p - 1;
        let k_eps = 2 + rep(a + 2 * s_eps, q);
        let as_rep = rep(a + s_eps, q);
        let delta = ((s_eps + as_rep) / q) as i64;
        let (t1, t2) = if a + s_eps < q {
            (s_eps as i64 + delta, (a + s_eps) as i64 + delta + 2)
        } else {
            (as_rep as i64 + delta + 1, (a + s_eps) as i64 + delta + 1)
        };
        Ok(GhostContext {
            p,
            a,
            s_eps,
            k_eps,
            delta,
            t1,
            t2,
            global_mult: 1,
            mode,
            warnings,
            k_ceiling: 1 << 40,
            cache_dir: None,
            support: RwLock::new(Arc::new(SupportTable::default())),
            derivative_cache: DashMap::new(),
        })
    }

    pub fn with_global_mult(mut self, m: u64) -> Result<Self> {
        if m == 0 {
            return Err(GhostError::InvalidConfig("global multiplicity must be >= 1".into()));
        }
        self.global_mult = m;
        Ok(self)
    }

    pub fn with_k_ceiling(mut self, ceiling: u64) -> Self {
        self.k_ceiling = ceiling;
        self
    }

    /// Directory for persisting derivative polygons across runs.
    pub fn with_cache_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cache_dir = Some(dir.into());
        self
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn a(&self) -> u64 {
        self.a
    }
    pub fn s_eps(&self) -> u64 {
        self.s_eps
    }
    pub fn k_eps(&self) -> u64 {
        self.k_eps
    }
    pub fn delta_eps(&self) -> i64 {
        self.delta
    }
    pub fn t1(&self) -> i64 {
        self.t1
    }
    pub fn t2(&self) -> i64 {
        self.t2
    }
    pub fn global_mult(&self) -> u64 {
        self.global_mult
    }
    pub fn mode(&self) -> Mode {
        self.mode
    }
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
    pub(crate) fn cache_dir(&self) -> Option<&PathBuf> {
        self.cache_dir.as_ref()
    }

    pub fn weight(&self, k: u64) -> Result<WeightIndex> {
        let q = self.p - 1;
        if k < 2 || k < self.k_eps || !(k - self.k_eps).is_multiple_of(q) {
            return Err(GhostError::WrongClass { k, k_eps: self.k_eps, modulus: q });
        }
        Ok(WeightIndex { k, k_bullet: (k - self.k_eps) / q })
    }

    pub fn weight_from_bullet(&self, k_bullet: u64) -> WeightIndex {
        WeightIndex { k: k_bullet * (self.p - 1) + self.k_eps, k_bullet }
    }

    /// Weights of the class in `[lo, hi]`.
    pub fn weights_in(&self, lo: u64, hi: u64) -> Vec<WeightIndex> {
        let q = self.p - 1;
        let first = if lo <= self.k_eps { 0 } else { (lo - self.k_eps).div_ceil(q) };
        (first..)
            .map(|b| self.weight_from_bullet(b))
            .take_while(|w| w.k <= hi)
            .collect()
    }

    pub(crate) fn d_iw_b(&self, kb: i64) -> i64 {
        2 * kb + 2 - 2 * self.delta
    }

    pub(crate) fn d_ur_b(&self, kb: i64) -> i64 {
        let m = self.p as i64 + 1;
        let q = (kb - self.t1).div_euclid(m);
        2 * q + 1 + i64::from(kb - m * q >= self.t2)
    }

    pub(crate) fn dims_b(&self, kb: i64) -> (i64, i64) {
        (self.d_iw_b(kb), self.d_ur_b(kb))
    }

    /// `m_n` at `k_•`, for any integer `n`.
    pub(crate) fn mult_b(&self, n: i64, kb: i64) -> i64 {
        let (iw, ur) = self.dims_b(kb);
        if ur < n && n < iw - ur {
            (n - ur).min(iw - ur - n)
        } else {
            0
        }
    }

    pub fn dimensions(&self, k: WeightIndex) -> DimensionTriple {
        let (d_iw, d_ur) = self.dims_b(k.k_bullet as i64);
        DimensionTriple { d_iw, d_ur, d_new: d_iw - 2 * d_ur }
    }

    pub fn ghost_multiplicity(&self, n: u64, k: WeightIndex) -> u64 {
        self.mult_b(n as i64, k.k_bullet as i64) as u64
    }

    /// `g_n` by scanning the class upward until `d_ur(k) ≥ n`.
    pub fn ghost_polynomial(&self, n: u64) -> Result<GhostPolynomial> {
        let mut zeros = BTreeMap::new();
        let mut kb = 0i64;
        loop {
            let w = self.weight_from_bullet(kb as u64);
            if w.k > self.k_ceiling {
                return Err(GhostError::CeilingExceeded { n, ceiling: self.k_ceiling });
            }
            if self.d_ur_b(kb) >= n as i64 {
                break;
            }
            let m = self.mult_b(n as i64, kb);
            if m > 0 {
                zeros.insert(w.k, m as u64);
            }
            kb += 1;
        }
        Ok(GhostPolynomial { n, zeros })
    }

    /// Largest `k_•` with `d_ur(k_•) < n`, or `-1` if none.
    pub(crate) fn last_below_ur(&self, n: i64) -> i64 {
        if self.d_ur_b(0) >= n {
            return -1;
        }
        let mut hi = 1i64;
        while self.d_ur_b(hi) < n {
            hi *= 2;
        }
        let mut lo = hi / 2;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.d_ur_b(mid) < n {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Ghost-zero support of `g_n` as an inclusive `k_•` interval.
    pub fn support_interval(&self, n: u64) -> Option<(u64, u64)> {
        let table = self.support_table(n as usize);
        let (lo, hi) = (table.lo[n as usize], table.hi[n as usize]);
        (lo <= hi).then_some((lo as u64, hi as u64))
    }

    fn support_table(&self, n_max: usize) -> Arc<SupportTable> {
        {
            let t = self.support.read().expect("support table lock poisoned");
            if t.lo.len() > n_max {
                return Arc::clone(&t);
            }
        }
        let mut guard = self.support.write().expect("support table lock poisoned");
        if guard.lo.len() > n_max {
            return Arc::clone(&guard);
        }
        let target = (n_max + 1).max(2 * guard.lo.len());
        let mut lo = vec![0i64; target];
        let mut hi = vec![-1i64; target];
        // Two pointers: d_ur and d_iw - d_ur are both monotone in k_•.
        let mut a = -1i64;
        let mut b = 0i64;
        for n in 1..target as i64 {
            while self.d_ur_b(a + 1) < n {
                a += 1;
            }
            while self.d_iw_b(b) - self.d_ur_b(b) <= n {
                b += 1;
            }
            lo[n as usize] = b;
            hi[n as usize] = a;
        }
        let mut gaps = Vec::new();
        let mut last_hi: Option<i64> = None;
        for n in 1..target {
            if lo[n] > hi[n] {
                continue;
            }
            if let Some(h) = last_hi {
                if lo[n] > h + 1 {
                    gaps.push((n, h, lo[n]));
                }
            }
            last_hi = Some(last_hi.map_or(hi[n], |h| h.max(hi[n])));
        }
        let table = Arc::new(SupportTable { lo, hi, gaps });
        *guard = Arc::clone(&table);
        table
    }

    /// `GZ(k)` as disjoint inclusive `k_•` intervals.
    pub(crate) fn zero_intervals(&self, k: WeightIndex) -> Vec<(i64, i64)> {
        let top = self.d_iw_b(k.k_bullet as i64).max(0) as usize;
        if top == 0 {
            return Vec::new();
        }
        let table = self.support_table(top);
        let first = (1..=top).find(|&n| table.lo[n] <= table.hi[n]);
        let Some(first) = first else { return Vec::new() };
        let end = (first..=top).map(|n| table.hi[n]).max().unwrap_or(-1);
        let mut out = Vec::new();
        let mut start = table.lo[first];
        for &(n, a, b) in &table.gaps {
            if n > top {
                break;
            }
            out.push((start, a));
            start = b;
        }
        out.push((start, end));
        out
    }

    pub fn ghost_zero_set(&self, k: WeightIndex) -> GhostZeroSet {
        let intervals = self.zero_intervals(k);
        let zeros = intervals
            .iter()
            .flat_map(|&(a, b)| a..=b)
            .map(|kb| self.weight_from_bullet(kb as u64).k)
            .collect();
        GhostZeroSet { k, zeros, m_of_k: self.m_of_k_from(k, &intervals) }
    }

    /// `M(k) = max_{k' ∈ GZ(k) \ {k}} v(w_k - w_{k'})`.
    pub fn m_of_k(&self, k: WeightIndex) -> u32 {
        let intervals = self.zero_intervals(k);
        self.m_of_k_from(k, &intervals)
    }

    fn m_of_k_from(&self, k: WeightIndex, intervals: &[(i64, i64)]) -> u32 {
        let kb = k.k_bullet as i64;
        let p = self.p as i64;
        let mut best = 0u32;
        for &(lo, hi) in intervals {
            // highest j such that some k' ≠ k in [lo, hi] has p^j | k' - k
            let mut j = 0u32;
            let mut pj = 1i64;
            loop {
                let t_lo = (lo - kb).div_euclid(pj) + i64::from((lo - kb).rem_euclid(pj) != 0);
                let t_hi = (hi - kb).div_euclid(pj);
                let nonzero = t_lo <= t_hi && !(t_lo == 0 && t_hi == 0);
                if !nonzero {
                    break;
                }
                best = best.max(j + 1);
                match pj.checked_mul(p) {
                    Some(next) => {
                        pj = next;
                        j += 1;
                    }
                    None => break,
                }
            }
        }
        best
    }

    /// Direct `v_p(g_n(w_*))` summed over the zeros of `g_n`.
    pub fn evaluate_ghost_valuation(&self, n: u64, w: &WeightPoint) -> Result<Valuation> {
        let g = self.ghost_polynomial(n)?;
        let mut total = Valuation::zero();
        for (&k2, &m) in &g.zeros {
            let d = w.distance_to(k2, self.p);
            total = &total + &d.scale(m);
        }
        Ok(total)
    }

    /// `v_p(g_{n,k̂}(w_k))`: the valuation at `w_k` with the `(w - w_k)` factor removed.
    pub fn evaluate_hatted(&self, n: u64, k: WeightIndex) -> Result<Rational> {
        let g = self.ghost_polynomial(n)?;
        let mut total = 0i64;
        for (&k2, &m) in &g.zeros {
            if k2 != k.k {
                total += m as i64 * (1 + vp_u64(k2.abs_diff(k.k), self.p) as i64);
            }
        }
        Ok(crate::valuation::int(total))
    }
}

/// Level sums of ghost multiplicities around one anchor weight.
///
/// `level(j, n) = Σ_{k'_• ≡ k_• mod p^j} m_n(k')` for `j < depth`; beyond the depth only the
/// anchor survives. Since `min(r, 1 + v_p(k_• - k'_•)) = Σ_{j ≥ 0} clamp(r - j, 0, 1)` summed up to
/// the distance, `v_p(g_n(w_*)) = Σ_j clamp(r - j, 0, 1) · level(j, n)` for a generic `w_*` at radius `r`.
pub(crate) struct AnchorProfile {
    pub n_max: usize,
    pub depth: usize,
    levels: Vec<Vec<i64>>,
    prefix: Vec<Vec<i64>>,
    anchor: Vec<i64>,
}

impl AnchorProfile {
    pub fn new(ctx: &GhostContext, anchor_kb: i64, n_max: usize) -> Self {
        let kb_top = ctx.last_below_ur(n_max as i64).max(anchor_kb).max(0);
        let p = ctx.p as i64;
        let mut depth = 0usize;
        let mut pj = 1i64;
        while pj <= kb_top {
            pj *= p;
            depth += 1;
        }
        let mut levels = Vec::with_capacity(depth);
        let mut pj = 1i64;
        for _ in 0..depth {
            let start = anchor_kb.rem_euclid(pj);
            let mut bumps = vec![0i64; n_max + 2];
            let mut kb = start;
            while kb <= kb_top {
                let (iw, ur) = ctx.dims_b(kb);
                if iw - 2 * ur > 0 {
                    for (idx, w) in [(ur, 1), (iw / 2, -2), (iw - ur, 1)] {
                        if (idx as usize) <= n_max && idx >= 0 {
                            bumps[idx as usize] += w;
                        }
                    }
                }
                kb += pj;
            }
            let mut row = vec![0i64; n_max + 1];
            let (mut slope, mut value) = (0i64, 0i64);
            for n in 0..=n_max {
                row[n] = value;
                slope += bumps[n];
                value += slope;
            }
            levels.push(row);
            pj *= p;
        }
        let anchor: Vec<i64> = (0..=n_max as i64).map(|n| ctx.mult_b(n, anchor_kb)).collect();
        let mut prefix = vec![vec![0i64; n_max + 1]];
        for j in 0..depth {
            let next = prefix[j].iter().zip(&levels[j]).map(|(a, b)| a + b).collect();
            prefix.push(next);
        }
        AnchorProfile { n_max, depth, levels, prefix, anchor }
    }

    pub fn level(&self, j: usize, n: usize) -> i64 {
        if j < self.depth {
            self.levels[j][n]
        } else {
            self.anchor[n]
        }
    }

    /// `Σ_{j < j0} level(j, n)`.
    pub fn base(&self, j0: usize, n: usize) -> i64 {
        if j0 <= self.depth {
            self.prefix[j0][n]
        } else {
            self.prefix[self.depth][n] + (j0 - self.depth) as i64 * self.anchor[n]
        }
    }

    /// Valuation at the anchor with the anchor's own factor removed.
    pub fn hatted(&self, n: usize) -> i64 {
        self.prefix[self.depth][n] - self.depth as i64 * self.anchor[n]
    }

    /// Valuation at radius `∞`, or `None` if the anchor is a zero of `g_n`.
    pub fn at_infinity(&self, n: usize) -> Option<i64> {
        (self.anchor[n] == 0).then(|| self.prefix[self.depth][n])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> GhostContext {
        GhostContext::new(7, 2, 1, Mode::Exploratory).unwrap()
    }

    #[test]
    fn derived_constants() {
        let c = ctx();
        assert_eq!((c.k_eps(), c.delta_eps(), c.t1(), c.t2()), (6, 0, 1, 5));
        assert!(!c.warnings().is_empty());
        assert!(GhostContext::new(7, 2, 1, Mode::Strict).is_err());
        assert!(GhostContext::new(9, 2, 1, Mode::Exploratory).is_err());
        assert!(GhostContext::new(11, 3, 0, Mode::Strict).unwrap().warnings().is_empty());
    }

    #[test]
    fn weight_class() {
        let c = ctx();
        assert_eq!(c.weight(24).unwrap().k_bullet(), 3);
        assert!(matches!(c.weight(25), Err(GhostError::WrongClass { .. })));
        let ks: Vec<u64> = c.weights_in(10, 30).iter().map(|w| w.k()).collect();
        assert_eq!(ks, vec![12, 18, 24, 30]);
    }

    #[test]
    fn support_matches_scan() {
        let c = ctx();
        for n in 1..60u64 {
            let g = c.ghost_polynomial(n).unwrap();
            let scan = g.zeros.keys().next().map(|&lo| (lo, *g.zeros.keys().last().unwrap()));
            let fast = c.support_interval(n).map(|(a, b)| {
                (c.weight_from_bullet(a).k(), c.weight_from_bullet(b).k())
            });
            assert_eq!(scan, fast, "n = {n}");
            if let Some((lo, hi)) = scan {
                assert_eq!(g.zeros.len() as u64, (hi - lo) / 6 + 1, "support of g_{n} is contiguous");
            }
        }
    }

    #[test]
    fn profile_matches_direct_sum() {
        let c = ctx();
        let k = c.weight(42).unwrap();
        let prof = AnchorProfile::new(&c, k.k_bullet() as i64, 40);
        for n in 1..=40usize {
            assert_eq!(crate::valuation::int(prof.hatted(n)), c.evaluate_hatted(n as u64, k).unwrap());
        }
    }
}
