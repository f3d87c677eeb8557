//! Property suites over the whole pipeline, used by the `verify` command and the test targets.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distribution::{multiset_mismatch, sample, weyl_moments, z_mismatch_bound, SampleKind};
use crate::ghost::{GhostContext, WeightIndex};
use crate::polygon::{dual_graph, lower_hull};
use crate::prediction::{build_model, exceptional_bound, predict_slopes, y_profile, Relation};
use crate::render::{ghost_json, thresholds_json};
use crate::slopes::{
    breakpoints_by_criterion, derivative_polygon, is_near_steinberg, k_thresholds, newslopes_from_hull,
    newton_polygon_at, Provenance, WeightPoint,
};
use crate::valuation::{ilog, int, rat, weight_distance, Rational, Valuation};
use crate::wedge::{char_poly_elementary, expansion_identity_check, formal_wedge_trace, ExactMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Quick,
    Full,
}

impl Scale {
    fn pick<T>(self, quick: T, full: T) -> T {
        match self {
            Scale::Quick => quick,
            Scale::Full => full,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {} ({:.2?}): {}", self.name, self.elapsed, self.detail)
    }
}

type Outcome = std::result::Result<String, String>;

fn timed(name: &'static str, f: impl FnOnce() -> Outcome) -> CheckReport {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    match out {
        Ok(detail) => CheckReport { name, passed: true, detail, elapsed },
        Err(detail) => CheckReport { name, passed: false, detail, elapsed },
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Weights of the class with `k ≤ k_max` and nonzero new dimension.
pub fn new_weights(ctx: &GhostContext, k_max: u64) -> Vec<WeightIndex> {
    ctx.weights_in(ctx.k_eps(), k_max).into_iter().filter(|&k| ctx.dimensions(k).d_new > 0).collect()
}

/// Runs every suite; `seed` drives all sampling.
pub fn run_all(ctx: &GhostContext, scale: Scale, seed: u64) -> Vec<CheckReport> {
    vec![
        ultrametric(ctx, scale, seed),
        dimension_laws(ctx, scale),
        m_bound(ctx, scale),
        multiplicity_symmetry(ctx, scale),
        hull_idempotence(scale, seed),
        dual_graph_laws(scale, seed),
        criterion_oracle(ctx, scale, seed),
        near_steinberg_equivalence(ctx, scale),
        ghost_duality(ctx, scale),
        derivative_integrality(ctx, scale),
        threshold_consistency(ctx, scale),
        delta_bounds(ctx, scale),
        model_hull(ctx, scale),
        pattern_counts(ctx, scale),
        linv_consistency(ctx, scale),
        y_relations(ctx, scale),
        wedge_laws(scale, seed),
        distribution_laws(ctx, scale),
        canonical_rendering(ctx),
    ]
}

pub fn ultrametric(ctx: &GhostContext, scale: Scale, seed: u64) -> CheckReport {
    timed("weight distance is ultrametric and at least 1", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = ctx.p();
        let trials = scale.pick(2_000, 20_000);
        for _ in 0..trials {
            let kb: Vec<u64> = (0..3).map(|_| rng.gen_range(0..5_000)).collect();
            if kb[0] == kb[1] || kb[1] == kb[2] || kb[0] == kb[2] {
                continue;
            }
            let ks: Vec<u64> = kb.iter().map(|&b| ctx.weight_from_bullet(b).k()).collect();
            let d = [
                weight_distance(ks[0], ks[1], p),
                weight_distance(ks[1], ks[2], p),
                weight_distance(ks[0], ks[2], p),
            ];
            let min = d.iter().min().expect("three values");
            ensure(d.iter().filter(|v| *v == min).count() >= 2, || format!("{ks:?} distances {d:?}"))?;
            ensure(d.iter().all(|v| *v >= Valuation::from_int(1)), || format!("{ks:?} distance below 1"))?;
            ensure(weight_distance(ks[1], ks[0], p) == d[0], || format!("{ks:?} asymmetric"))?;
        }
        Ok(format!("{trials} triples"))
    })
}

pub fn dimension_laws(ctx: &GhostContext, scale: Scale) -> CheckReport {
    timed("dimension asymptotics and d_ur periodicity", || {
        let k_max = scale.pick(20_000, 100_000);
        let p = ctx.p() as i64;
        let step = (p * p - 1) as u64;
        let (mut dev_iw, mut dev_new) = (0f64, 0f64);
        for k in ctx.weights_in(ctx.k_eps(), k_max) {
            let dims = ctx.dimensions(k);
            let kk = k.k() as f64;
            dev_iw = dev_iw.max((dims.d_iw as f64 - 2.0 * kk / (p - 1) as f64).abs());
            dev_new = dev_new.max((dims.d_new as f64 - 2.0 * kk / (p + 1) as f64).abs());
            let later = ctx.weight(k.k() + step).map_err(|e| e.to_string())?;
            let jump = ctx.dimensions(later).d_ur - dims.d_ur;
            ensure(jump == 2, || format!("k={} d_ur jump {jump}", k.k()))?;
        }
        let bound = 2.0 * p as f64;
        ensure(dev_iw <= bound && dev_new <= bound, || format!("deviations {dev_iw} / {dev_new} exceed {bound}"))?;
        Ok(format!("k <= {k_max}: max |d_iw - 2k/(p-1)| = {dev_iw:.3}, max |d_new - 2k/(p+1)| = {dev_new:.3}"))
    })
}

pub fn m_bound(ctx: &GhostContext, scale: Scale) -> CheckReport {
    timed("M(k) <= floor(log_p k_bullet) + 3", || {
        let k_max = scale.pick(20_000, 100_000);
        let ws = ctx.weights_in(ctx.k_eps(), k_max);
        let bad: Vec<u64> = ws
            .par_iter()
            .filter(|k| ctx.m_of_k(**k) as u64 > ilog(k.k_bullet(), ctx.p()) as u64 + 3)
            .map(|k| k.k())
            .collect();
        ensure(bad.is_empty(), || format!("violations at {:?}", &bad[..bad.len().min(5)]))?;
        Ok(format!("{} weights up to {k_max}", ws.len()))
    })
}

pub fn multiplicity_symmetry(ctx: &GhostContext, scale: Scale) -> CheckReport {
    timed("m_n(k) = m_{d_iw - n}(k)", || {
        let k_max = scale.pick(1_500, 6_000);
        for k in ctx.weights_in(ctx.k_eps(), k_max) {
            let d = ctx.dimensions(k).d_iw;
            for n in 0..=d.max(0) as u64 {
                let (a, b) = (ctx.ghost_multiplicity(n, k), ctx.ghost_multiplicity(d as u64 - n, k));
                ensure(a == b, || format!("k={} n={n}: {a} vs {b}", k.k()))?;
            }
        }
        Ok(format!("k <= {k_max}"))
    })
}

fn random_points(rng: &mut ChaCha8Rng, len: usize) -> Vec<(i64, Valuation)> {
    (0..len as i64)
        .map(|x| {
            let v = if rng.gen_ratio(1, 10) {
                Valuation::Infinity
            } else {
                Valuation::Finite(rat(rng.gen_range(-40..40), rng.gen_range(1..5)))
            };
            (x, v)
        })
        .collect()
}

pub fn hull_idempotence(scale: Scale, seed: u64) -> CheckReport {
    timed("hull of the vertex set is itself", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
        let trials = scale.pick(300, 3_000);
        for t in 0..trials {
            let len = rng.gen_range(1..25);
            let mut pts = random_points(&mut rng, len);
            pts[0].1 = Valuation::Finite(int(0));
            let hull = lower_hull(&pts).map_err(|e| e.to_string())?;
            let again: Vec<(i64, Valuation)> =
                hull.vertices.iter().map(|(x, y)| (*x, Valuation::Finite(y.clone()))).collect();
            let h2 = lower_hull(&again).map_err(|e| e.to_string())?;
            ensure(h2.vertices == hull.vertices && h2.slopes == hull.slopes, || format!("trial {t}"))?;
            let extent: u64 = hull.slopes.iter().map(|s| s.1).sum();
            ensure(extent == hull.x_extent(), || format!("trial {t}: multiplicities do not cover the extent"))?;
        }
        Ok(format!("{trials} random point sets"))
    })
}

pub fn dual_graph_laws(scale: Scale, seed: u64) -> CheckReport {
    timed("Newton polygon / dual graph duality", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51ed);
        let trials = scale.pick(200, 2_000);
        for t in 0..trials {
            let len = rng.gen_range(2..16);
            let mut pts = random_points(&mut rng, len);
            pts[0].1 = Valuation::Finite(int(rng.gen_range(-5..5)));
            let r_min = int(-60);
            let dg = dual_graph(&pts, &r_min).map_err(|e| e.to_string())?;
            let np = lower_hull(&pts).map_err(|e| e.to_string())?;
            let mut from_np: Vec<(Rational, u64)> =
                np.slopes.iter().filter(|(s, _)| -s > r_min).map(|(s, m)| (-s, *m)).collect();
            from_np.sort();
            ensure(dg.breakpoints() == from_np, || format!("trial {t}: {:?} vs {from_np:?}", dg.breakpoints()))?;
            for seg in &dg.segments {
                let r = match &seg.r_hi {
                    Valuation::Finite(hi) => (&seg.r_lo + hi) / int(2),
                    Valuation::Infinity => &seg.r_lo + int(1),
                };
                let nu = dg.value_at(&r).ok_or_else(|| format!("trial {t}: no segment at {r}"))?;
                let direct = pts
                    .iter()
                    .filter_map(|(x, v)| v.finite().map(|v| v + &r * int(*x)))
                    .min()
                    .expect("a finite coefficient");
                ensure(nu == direct, || format!("trial {t}: nu_{r} = {nu}, direct minimum {direct}"))?;
                let a_n = &pts[seg.slope as usize].1;
                ensure(*a_n == Valuation::Finite(&nu - &r * int(seg.slope)), || {
                    format!("trial {t}: coefficient {} off the dual segment", seg.slope)
                })?;
            }
        }
        Ok(format!("{trials} random coefficient families"))
    })
}

fn sample_radius(rng: &mut ChaCha8Rng, cap: i64) -> Rational {
    let den = rng.gen_range(1..=6);
    rat(rng.gen_range(1..=cap * den), den)
}

/// Compares the breakpoint criterion with hull vertices for `samples` random `(k, radius)`.
pub fn oracle_pairs(ctx: &GhostContext, k_max: u64, samples: usize, seed: u64) -> Outcome {
    let pool = new_weights(ctx, k_max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jobs: Vec<(WeightIndex, Rational)> = (0..samples)
        .map(|_| {
            let k = pool[rng.gen_range(0..pool.len())];
            let cap = ctx.m_of_k(k) as i64 + 4;
            (k, sample_radius(&mut rng, cap))
        })
        .collect();
    let mismatches: Vec<String> = jobs
        .par_iter()
        .filter_map(|(k, r)| {
            let w = WeightPoint::new(*k, Valuation::Finite(r.clone())).ok()?;
            let n_cmp = (ctx.dimensions(*k).d_iw + 10) as u64;
            let np = newton_polygon_at(ctx, 2 * n_cmp + 20, &w).ok()?;
            let hull: BTreeSet<u64> = np.vertex_xs().into_iter().map(|x| x as u64).filter(|&x| x <= n_cmp).collect();
            let crit = breakpoints_by_criterion(ctx, &w, n_cmp);
            (hull != crit).then(|| format!("k={} r={r}", k.k()))
        })
        .collect();
    ensure(mismatches.is_empty(), || format!("{} mismatches, first {:?}", mismatches.len(), mismatches.first()))?;
    Ok(format!("{samples} pairs with k <= {k_max}"))
}

pub fn criterion_oracle(ctx: &GhostContext, scale: Scale, seed: u64) -> CheckReport {
    timed("breakpoint criterion equals hull vertices", || {
        oracle_pairs(ctx, scale.pick(600, 2_000), scale.pick(40, 200), seed)
    })
}

pub fn near_steinberg_equivalence(ctx: &GhostContext, scale: Scale) -> CheckReport {
    timed("derivative breakpoints versus near-Steinberg neighbours", || {
        let ws = new_weights(ctx, scale.pick(400, 1_200));
        ws.par_iter().try_for_each(|&k| {
            let dp = derivative_polygon(ctx, k);
            let dims = ctx.dimensions(k);
            let half = (dims.d_iw / 2) as u64;
            let wk = WeightPoint::at(k);
            let kb = k.k_bullet();
            for l in 0..dp.n().max(1) as u64 {
                if l as usize >= dp.raw.len() - 1 {
                    break;
                }
                let vertex = dp.hull.is_vertex(l as i64);
                let lower = (0..kb).any(|b| is_near_steinberg(ctx, half - l, &wk, ctx.weight_from_bullet(b)));
                let top = ctx.last_below_ur((half + l) as i64).max(kb as i64) as u64;
                let upper = (kb + 1..=top).any(|b| is_near_steinberg(ctx, half + l, &wk, ctx.weight_from_bullet(b)));
                ensure(!vertex == lower && lower == upper, || {
                    format!("k={} l={l}: vertex {vertex}, lower {lower}, upper {upper}", k.k())
                })?;
            }
            Ok::<(), String>(())
        })?;
        Ok(format!("{} weights", ws.len()))
    })
}

pub fn ghost_duality(ctx: &GhostContext, scale: Scale) -> CheckReport {
    timed("ghost duality of hatted valuations", || {
        let fast = new_weights(ctx, scale.pick(1_500, 5_000));
        let bad: Vec<u64> = fast.par_iter().filter(|k| !derivative_polygon(ctx, **k).duality_holds()).map(|k| k.k()).collect();
        ensure(bad.is_empty(), || format!("fails at {:?}", &bad[..bad.len().min(5)]))?;
        // direct sums against the tent-profile engine on small weights
        let direct = new_weights(ctx, scale.pick(150, 400));
        for &k in &direct {
            let dp = derivative_polygon(ctx, k);
            let dims = ctx.dimensions(k);
            let kk = k.k() as i64 - 2;
            for (l, raw) in dp.raw.iter().enumerate() {
                let n = (dims.d_iw / 2) as u64 + l as u64;
                let v = ctx.evaluate_hatted(n, k).map_err(|e| e.to_string())? - rat(kk * l as i64, 2);
                ensure(v == *raw, || format!("k={} l={l}: direct {v} vs profile {raw}", k.k()))?;
            }
        }
        Ok(format!("{} weights via profiles, {} by direct sums", fast.len(), direct.len()))
    })
}

pub fn derivative_integrality(ctx: &GhostContext, scale: Scale) -> CheckReport {
    timed("derivative slope integrality", || {
        let ws = new_weights(ctx, scale.pick(1_500, 5_000));
        let bad: Vec<u64> =
            ws.par_iter().filter(|k| !derivative_polygon(ctx, **k).integrality_holds(ctx.a())).map(|k| k.k()).collect();
        ensure(bad.is_empty(), || format!("fails at {:?}", &bad[..bad.len().min(5)]))?;
        Ok(format!("{} weights", ws.len()))
    })
}

pub fn threshold_consistency(ctx: &GhostContext, scale: Scale) -> CheckReport {
    timed("newslopes lock to (k-2)/2 exactly past each threshold", || {
        let ws = new_weights(ctx, scale.pick(120, 400));
        let eps = rat(1, 97);
        ws.par_iter().try_for_each(|&k| {
            let th = k_thresholds(ctx, k).map_err(|e| e.to_string())?;
            let base = rat(k.k() as i64 - 2, 2);
            for (i, cs) in th.local.iter().enumerate() {
                let above = WeightPoint::new(k, Valuation::Finite(cs + &eps)).map_err(|e| e.to_string())?;
                let ns = newslopes_from_hull(ctx, k, &above).map_err(|e| e.to_string())?;
                ensure(ns[i] == base, || format!("k={} n={}: slope {} above CS = {cs}", k.k(), i + 1, ns[i]))?;
                if *cs > eps {
                    let below = WeightPoint::new(k, Valuation::Finite(cs - &eps)).map_err(|e| e.to_string())?;
                    let ns = newslopes_from_hull(ctx, k, &below).map_err(|e| e.to_string())?;
                    ensure(ns[i] != base, || format!("k={} n={}: locked below CS = {cs}", k.k(), i + 1))?;
                }
            }
            Ok::<(), String>(())
        })?;
        Ok(format!("{} weights", ws.len()))
    })
}

pub fn delta_bounds(ctx: &GhostContext, scale: Scale) -> CheckReport {
    timed("increment bounds on derivative values", || {
        let ws = new_weights(ctx, scale.pick(3_000, 20_000));
        let p = ctx.p() as i64;
        let worst = ws
            .par_iter()
            .map(|&k| {
                let dp = derivative_polygon(ctx, k);
                let mut worst = 0f64;
                for l in 1..dp.raw.len() {
                    let inc = &dp.raw[l] - &dp.raw[l - 1];
                    let lower = rat(3, 2) + rat((p - 1) * (l as i64 - 1), 2);
                    if inc < lower {
                        return Err(format!("k={} l={l}: increment {inc} below {lower}", k.k()));
                    }
                    if p >= 7 {
                        let gap = (&dp.raw[l] - dp.hull.value_at(l as i64).expect("inside hull")).to_f64().unwrap_or(f64::MAX);
                        let cap = 3.0 * ((l as f64).ln() / (p as f64).ln()).powi(2);
                        worst = f64::max(worst, gap - cap);
                        if gap > cap + 1e-9 {
                            return Err(format!("k={} l={l}: gap {gap} above {cap:.4}", k.k()));
                        }
                    }
                }
                Ok(worst)
            })
            .collect::<std::result::Result<Vec<f64>, String>>()?;
        Ok(format!("{} weights, tightest upper margin {:.4}", ws.len(), worst.into_iter().fold(f64::MIN, f64::max)))
    })
}

pub fn model_hull(ctx: &GhostContext, scale: Scale) -> CheckReport {
    timed("L_j hull has the prescribed slope profile", || {
        let ws = new_weights(ctx, scale.pick(1_000, 5_000));
        ws.par_iter().try_for_each(|&k| {
            let model = build_model(ctx, k);
            let hull = model.l_hull().map_err(|e| e.to_string())?;
            ensure(hull.slopes == model.expected_l_profile(), || format!("k={}", k.k()))
        })?;
        Ok(format!("{} weights", ws.len()))
    })
}

pub fn pattern_counts(ctx: &GhostContext, scale: Scale) -> CheckReport {
    timed("estimate pattern: equalities and strict counts per column", || {
        let ws = new_weights(ctx, scale.pick(600, 2_000));
        ws.par_iter().try_for_each(|&k| {
            let model = build_model(ctx, k);
            let eqs = model.eq_positions();
            let blocks = model.n() + 1 - model.m_index;
            let expect = if 2 * model.tail(model.m_index) as usize == model.d { 2 * blocks - 1 } else { 2 * blocks };
            let count = model.pattern.iter().flatten().filter(|r| **r == Relation::Eq).count();
            ensure(count == expect && eqs.len() == expect, || format!("k={}: {count} equalities, expected {expect}", k.k()))?;
            for &(_, j) in &eqs {
                let gt = (0..model.d).filter(|&i| model.pattern[i][j - 1] == Relation::Gt).count();
                ensure(gt == j - 1, || format!("k={} column {j}: {gt} strict entries", k.k()))?;
            }
            Ok::<(), String>(())
        })?;
        Ok(format!("{} weights", ws.len()))
    })
}

/// Known-block slopes equal `-(CS + 1)`, and the exceptional count matches the sweep block.
pub fn linv_pairs(ctx: &GhostContext, ws: &[WeightIndex]) -> Outcome {
    ws.par_iter().try_for_each(|&k| {
        let pred = predict_slopes(ctx, k).map_err(|e| e.to_string())?;
        let mut from_slopes = pred.linv_from_slopes.clone();
        from_slopes.sort();
        ensure(pred.linv_known == from_slopes, || format!("k={}: threshold and slope routes disagree", k.k()))?;
        let th = k_thresholds(ctx, k).map_err(|e| e.to_string())?;
        let m = th.global_mult as usize;
        let mut cs: Vec<Rational> = th
            .global
            .iter()
            .enumerate()
            .filter(|(i, _)| th.provenance[i / m] == Provenance::ClosedForm)
            .map(|(_, v)| -(v + int(1)))
            .collect();
        cs.sort();
        let expanded: Vec<Rational> =
            pred.linv_known.iter().flat_map(|(v, n)| std::iter::repeat_n(v.clone(), *n as usize)).collect();
        ensure(cs == expanded, || format!("k={}: known block differs from -(CS+1)", k.k()))?;
        ensure(pred.exceptional_count == pred.sweep_block, || {
            format!("k={}: exceptional {} vs sweep block {}", k.k(), pred.exceptional_count, pred.sweep_block)
        })?;
        let model = build_model(ctx, k);
        let central: u64 = 2 * (1..model.m_index).map(|l| model.block[l - 1]).sum::<u64>();
        ensure(pred.exceptional_count == central, || format!("k={}: exceptional {} vs 2 sum d_l {central}", k.k(), pred.exceptional_count))?;
        ensure(int(pred.exceptional_count as i64) <= exceptional_bound(ctx, k), || {
            format!("k={}: exceptional {} above the logarithmic bound", k.k(), pred.exceptional_count)
        })
    })?;
    Ok(format!("{} weights", ws.len()))
}

pub fn linv_consistency(ctx: &GhostContext, scale: Scale) -> CheckReport {
    timed("predicted L-invariant slopes against thresholds", || {
        linv_pairs(ctx, &new_weights(ctx, scale.pick(1_500, 5_000)))
    })
}

pub fn y_relations(ctx: &GhostContext, scale: Scale) -> CheckReport {
    timed("y_i functions: symmetry and K_i - L_j identities", || {
        let ws = new_weights(ctx, scale.pick(500, 2_000));
        ws.par_iter().try_for_each(|&k| {
            let model = build_model(ctx, k);
            let d = model.d;
            let kk = int(k.k() as i64 - 2);
            let at = |r: &Rational| y_profile(ctx, k, r).ok_or_else(|| format!("k={}: radius {r} below R-dagger", k.k()));
            for r in [model.dagger.clone(), model.big_r.clone(), &model.big_r + int(100)] {
                let y = at(&r)?;
                ensure(y[d] == &kk * int(d as i64), || format!("k={}: y_d", k.k()))?;
                for i in 1..=d / 2 {
                    ensure(y[d - i] == &y[i] + &kk * int((d - 2 * i) as i64), || format!("k={} i={i}: mirror", k.k()))?;
                }
            }
            let n = model.n();
            for l_prime in model.m_index.max(1)..=n {
                let r = model.r_list[l_prime - 1].clone();
                let y = at(&r)?;
                let j_lo = 2 * model.tail(l_prime + 1) as usize + 1;
                let j_hi = 2 * model.tail(l_prime) as usize;
                for l in 1..=l_prime {
                    let (i_lo, i_hi) = (model.tail(l + 1) as usize + 1, model.tail(l) as usize);
                    for i in i_lo..=i_hi.min(d / 2) {
                        for j in j_lo..=j_hi {
                            let lhs = &y[i] - int(j as i64) * &r;
                            let rhs = &kk * int(i as i64) - &model.l_seq[j - 1];
                            ensure(lhs == rhs, || format!("k={} i={i} j={j} l'={l_prime}: {lhs} vs {rhs}", k.k()))?;
                        }
                    }
                }
            }
            Ok::<(), String>(())
        })?;
        Ok(format!("{} weights", ws.len()))
    })
}

pub fn wedge_laws(scale: Scale, seed: u64) -> CheckReport {
    timed("wedge traces: polarization, e_n, expansion identity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa11ce);
        let trials = scale.pick(6, 20);
        for t in 0..trials {
            let d = 4;
            let b = ExactMatrix::random(d, &mut rng);
            let b2 = ExactMatrix::random(d, &mut rng);
            let x = formal_wedge_trace(&[b.clone(), b2.clone()]).map_err(|e| e.to_string())?;
            let y = formal_wedge_trace(&[b2.clone(), b.clone()]).map_err(|e| e.to_string())?;
            let sum = b.add(&b2).map_err(|e| e.to_string())?;
            let e2 = |m: &ExactMatrix| formal_wedge_trace(&[m.clone(), m.clone()]).map_err(|e| e.to_string());
            ensure(&x + &y == e2(&sum)? - e2(&b)? - e2(&b2)?, || format!("trial {t}: polarization of e_2"))?;
            let e = char_poly_elementary(&b).map_err(|e| e.to_string())?;
            for n in 0..=d {
                let w = formal_wedge_trace(&vec![b.clone(); n]).map_err(|e| e.to_string())?;
                ensure(w == e[n], || format!("trial {t}: e_{n}"))?;
            }
            let dim = rng.gen_range(2..=5usize);
            let a1 = ExactMatrix::random(dim, &mut rng);
            let a2 = ExactMatrix::random(dim, &mut rng);
            let alpha = int(rng.gen_range(1..=9));
            let i = rng.gen_range(1..=dim);
            for j in 0..=2 * i {
                let ok = expansion_identity_check(&alpha, &a1, &a2, i, j).map_err(|e| e.to_string())?;
                ensure(ok, || format!("trial {t}: expansion d={dim} i={i} j={j}"))?;
            }
        }
        Ok(format!("{trials} seeded instances"))
    })
}

pub fn distribution_laws(ctx: &GhostContext, scale: Scale) -> CheckReport {
    timed("Z_k versus Z'_k and moment trend", || {
        let ws = new_weights(ctx, scale.pick(3_000, 20_000));
        ws.par_iter().try_for_each(|&k| {
            let z = sample(ctx, k, SampleKind::Threshold).map_err(|e| e.to_string())?;
            let zp = sample(ctx, k, SampleKind::Derivative).map_err(|e| e.to_string())?;
            let mismatch = multiset_mismatch(&z.values, &zp.values) as i64;
            ensure(int(mismatch) <= z_mismatch_bound(ctx.p(), k) * int(ctx.global_mult() as i64), || {
                format!("k={}: {mismatch} mismatched entries", k.k())
            })?;
            let c = crate::distribution::normalization(ctx.p(), k.k());
            let m_norm = &c * int(ctx.m_of_k(k) as i64);
            let hi_z: Vec<Rational> = z.values.iter().filter(|v| **v > m_norm).cloned().collect();
            let hi_zp: Vec<Rational> = zp.values.iter().filter(|v| **v > m_norm).cloned().collect();
            ensure(hi_z == hi_zp, || format!("k={}: entries above M(k) differ", k.k()))?;
            if let Some(top) = zp.max() {
                for n in 1..=3 {
                    ensure(zp.moment(n) <= top.clone().max(int(1)), || format!("k={}: moment {n} above max", k.k()))?;
                }
            }
            Ok::<(), String>(())
        })?;
        let pick: Vec<WeightIndex> = [ws.len() / 20, ws.len() / 4, ws.len() / 2, ws.len() - 1].iter().map(|&i| ws[i]).collect();
        let samples: Vec<_> = pick.iter().map(|&k| sample(ctx, k, SampleKind::Threshold)).collect::<crate::Result<_>>().map_err(|e| e.to_string())?;
        let table = weyl_moments(&samples, 3).map_err(|e| e.to_string())?;
        for rep in &table.reports {
            ensure(rep.last_distance() < &rep.distances[0], || format!("moment {} shows no trend", rep.n))?;
        }
        Ok(format!("{} weights, trend over k in {:?}", ws.len(), table.ks))
    })
}

pub fn canonical_rendering(ctx: &GhostContext) -> CheckReport {
    timed("rendering is byte-stable", || {
        let polys: Vec<_> = (1..=8).map(|n| ctx.ghost_polynomial(n)).collect::<crate::Result<_>>().map_err(|e| e.to_string())?;
        ensure(ghost_json(&polys) == ghost_json(&polys.clone()), || "ghost JSON differs".into())?;
        let w = new_weights(ctx, 200);
        for k in w {
            let a = thresholds_json(&k_thresholds(ctx, k).map_err(|e| e.to_string())?);
            let b = thresholds_json(&k_thresholds(ctx, k).map_err(|e| e.to_string())?);
            ensure(a == b, || format!("k={}: thresholds JSON differs", k.k()))?;
        }
        Ok("ghost and threshold JSON".into())
    })
}

/// `true` if no report failed.
pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}
