//! Acceptance gate: nine criteria, each with its own time budget, one status line apiece.

use std::time::{Duration, Instant};

use ghost_slopes::distribution::{discrepancy, sample, SampleKind};
use ghost_slopes::render::{ghost_json, ghost_table};
use ghost_slopes::slopes::first_slopes;
use ghost_slopes::valuation::{int, rat};
use ghost_slopes::verify::{linv_pairs, new_weights, oracle_pairs};
use ghost_slopes::wedge::{
    binomial_vandermonde, d_matrix_truncated, linear_system_roundtrip, superfactorial, vandermonde,
    wedge_collapse_check, ExactMatrix, Truncation,
};
use ghost_slopes::{
    derivative_polygon, k_thresholds, GhostContext, GhostPolynomial, Mode, Rational, Valuation, WeightPoint,
};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

type Outcome = Result<String, String>;
type Criterion = (u32, fn() -> Outcome, Duration);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ctx7() -> GhostContext {
    GhostContext::new(7, 2, 1, Mode::Exploratory).expect("valid context")
}

fn ctx11() -> GhostContext {
    GhostContext::new(11, 3, 0, Mode::Strict).expect("valid context")
}

/// Zero data of g_1..g_8 for p = 7, a = 2, s = 1 as `(first k, last k, multiplicity)` runs in steps of 6.
const FIRST_EIGHT: [&[(u64, u64, u64)]; 8] = [
    &[(6, 6, 1)],
    &[(12, 30, 1)],
    &[(18, 30, 2), (36, 54, 1)],
    &[(18, 18, 1), (24, 30, 3), (36, 54, 2), (60, 78, 1)],
    &[(24, 24, 2), (30, 30, 4), (36, 54, 3), (60, 78, 2), (84, 102, 1)],
    &[(24, 24, 1), (30, 30, 3), (36, 54, 4), (60, 78, 3), (84, 102, 2), (108, 126, 1)],
    &[(30, 30, 2), (36, 36, 3), (42, 54, 5), (60, 78, 4), (84, 102, 3), (108, 126, 2), (132, 150, 1)],
    &[
        (30, 30, 1),
        (36, 36, 2),
        (42, 42, 4),
        (48, 54, 6),
        (60, 78, 5),
        (84, 102, 4),
        (108, 126, 3),
        (132, 150, 2),
        (156, 174, 1),
    ],
];

fn expected_polys() -> Vec<GhostPolynomial> {
    FIRST_EIGHT
        .iter()
        .enumerate()
        .map(|(i, runs)| {
            let mut zeros = std::collections::BTreeMap::new();
            for &(lo, hi, m) in runs.iter() {
                for k in (lo..=hi).step_by(6) {
                    zeros.insert(k, m);
                }
            }
            GhostPolynomial { n: i as u64 + 1, zeros }
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let ctx = ctx7();
    let polys: Vec<GhostPolynomial> =
        (1..=8).map(|n| ctx.ghost_polynomial(n)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let want = expected_polys();
    for (got, exp) in polys.iter().zip(&want) {
        check(got == exp, || format!("g_{} differs: {:?}", got.n, got.zeros))?;
    }
    check(ghost_json(&polys) == ghost_json(&want), || "JSON rendering differs".into())?;
    check(polys[3].zeros[&24] == 3 && polys[3].zeros.keys().last() == Some(&78), || "g_4 landmarks".into())?;
    check(polys[7].zeros[&48] == 6 && polys[7].zeros.keys().last() == Some(&174), || "g_8 landmarks".into())?;
    check(ghost_table(&polys[..1]) == "g_1(w) = (w - w_6)\n", || "g_1 table line".into())?;
    Ok("g_1..g_8 match zero for zero".into())
}

fn slopes_at(ctx: &GhostContext, nu: &Rational, count: usize) -> Result<Vec<Rational>, String> {
    let w = WeightPoint::new(ctx.weight(24).map_err(|e| e.to_string())?, Valuation::Finite(nu.clone()))
        .map_err(|e| e.to_string())?;
    first_slopes(ctx, &w, count).map_err(|e| e.to_string())
}

fn criterion_2() -> Outcome {
    let ctx = ctx7();
    let k = ctx.weight(24).map_err(|e| e.to_string())?;
    let dims = ctx.dimensions(k);
    check((dims.d_iw, dims.d_ur, dims.d_new) == (8, 1, 6), || format!("dimensions {dims:?}"))?;
    check(ctx.m_of_k(k) == 2, || format!("M(24) = {}", ctx.m_of_k(k)))?;
    let dp = derivative_polygon(&ctx, k);
    check(dp.raw == [17, 19, 25, 34].map(int), || format!("derivative values {:?}", dp.raw))?;
    check(dp.slopes == [2, 6, 9].map(int), || format!("derivative slopes {:?}", dp.slopes))?;
    let eleven = int(11);
    for nu in [rat(5, 2), int(4), int(7), int(10)] {
        let want: Vec<Rational> = if nu > int(9) {
            vec![int(1), eleven.clone(), eleven.clone(), eleven.clone(), eleven.clone(), eleven.clone(), eleven.clone(), int(22)]
        } else if nu > int(6) {
            let g = int(9) - &nu;
            vec![int(1), &eleven - &g, eleven.clone(), eleven.clone(), eleven.clone(), eleven.clone(), &eleven + &g, int(22)]
        } else {
            let g = int(6) - &nu;
            vec![int(1), int(8) - &g, &eleven - &g, eleven.clone(), eleven.clone(), &eleven + &g, int(14) + &g, int(22)]
        };
        let got = slopes_at(&ctx, &nu, 8)?;
        check(got == want, || format!("nu = {nu}: {got:?}"))?;
    }
    Ok("dimensions, M, derivative table and three slope rows".into())
}

fn criterion_3() -> Outcome {
    let ctx = ctx7();
    let k = ctx.weight(24).map_err(|e| e.to_string())?;
    let th = k_thresholds(&ctx, k).map_err(|e| e.to_string())?;
    check(th.local == [9, 6, 2, 1, 6, 9].map(int), || format!("thresholds {:?}", th.local))?;
    let nu = rat(1, 2);
    let got = slopes_at(&ctx, &nu, 8)?;
    let want: Vec<Rational> = [1, 3, 6, 9, 11, 14, 16, 19].iter().map(|&c| int(c) * &nu).collect();
    check(got == want, || format!("nu = 1/2: {got:?}"))?;
    let nu = rat(3, 2);
    let eta = int(2) - &nu;
    let got = slopes_at(&ctx, &nu, 8)?;
    let want: Vec<Rational> = [(1, 0), (4, 1), (7, 1), (11, 2), (11, 0), (15, 1), (18, 2), (22, 3)]
        .iter()
        .map(|&(c, e)| int(c) - int(e) * &eta)
        .collect();
    check(got == want, || format!("nu = 3/2: {got:?}"))?;
    Ok(format!("thresholds (9,6,2,1,6,9) with {} swept, both slope rows", th.sweep_count()))
}

fn criterion_4() -> Outcome {
    let a = oracle_pairs(&ctx7(), 2_000, 200, SEED)?;
    let b = oracle_pairs(&ctx11(), 2_000, 200, SEED + 1)?;
    Ok(format!("p=7: {a}; p=11: {b}"))
}

fn criterion_5() -> Outcome {
    let mut total = 0;
    let even_a = GhostContext::new(11, 4, 0, Mode::Strict).expect("valid context");
    for ctx in [ctx7(), even_a] {
        for k in new_weights(&ctx, 5_000) {
            let dp = derivative_polygon(&ctx, k);
            check(dp.duality_holds(), || format!("p={} k={}: duality", ctx.p(), k.k()))?;
            check(dp.integrality_holds(ctx.a()), || format!("p={} k={}: integrality", ctx.p(), k.k()))?;
            total += 1;
        }
    }
    Ok(format!("{total} weights over (7,2,1) and (11,4,0), zero exceptions"))
}

fn criterion_6() -> Outcome {
    let ctx = ctx7();
    let ws = ctx.weights_in(ctx.k_eps(), 100_000);
    for &k in &ws {
        let bound = ghost_slopes::valuation::ilog(k.k_bullet(), ctx.p()) + 3;
        check(ctx.m_of_k(k) <= bound, || format!("k={}: M = {} > {bound}", k.k(), ctx.m_of_k(k)))?;
    }
    Ok(format!("{} weights up to 10^5", ws.len()))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut notes = Vec::new();
    for t in 0..20 {
        let d = if t < 14 { rng.gen_range(2..=4usize) } else { rng.gen_range(5..=8usize) };
        let total = if d <= 4 { rng.gen_range(1..=d) } else { rng.gen_range(1..=4usize) };
        let m = rng.gen_range(0..=total);
        let bs: Vec<ExactMatrix> = (0..m).map(|_| ExactMatrix::random(d, &mut rng)).collect();
        let alpha = int(rng.gen_range(1..=9));
        let ok = wedge_collapse_check(&bs, total - m, &alpha, d).map_err(|e| e.to_string())?;
        check(ok, || format!("collapse identity, instance {t} (d={d}, m={m})"))?;
    }
    for d in 1..=10 {
        for j in 1..=d {
            let det = d_matrix_truncated(d, j, Truncation::UpperLeft).and_then(|m| m.det()).map_err(|e| e.to_string())?;
            check(det == int(1), || format!("det D_{d}({j}) = {det}"))?;
            if j % 2 == 0 {
                let det = d_matrix_truncated(d, j, Truncation::Split).and_then(|m| m.det()).map_err(|e| e.to_string())?;
                check(det == int(1), || format!("det D'_{d}({j}) = {det}"))?;
            }
        }
    }
    for _ in 0..20 {
        let d = rng.gen_range(1..=8usize);
        let j = rng.gen_range(1..=d);
        let m: Vec<Rational> = (0..j).map(|_| int(rng.gen_range(-9..=9))).collect();
        let alpha = rat(rng.gen_range(1..=9), rng.gen_range(1..=9));
        check(linear_system_roundtrip(d, j, &alpha, &m).map_err(|e| e.to_string())?, || format!("round trip d={d} j={j}"))?;
    }
    let mut bv_failures = Vec::new();
    for n in 1..=8usize {
        for n0 in 0..=5i64 {
            let xs: Vec<i64> = (0..n as i64).rev().map(|i| n0 + i).collect();
            let bv = binomial_vandermonde(&xs).map_err(|e| e.to_string())?;
            let v = Rational::new(vandermonde(&xs), superfactorial(n));
            check(bv == v, || format!("BV{xs:?} = {bv} but V/prod i! = {v}"))?;
            if bv != int(1) {
                bv_failures.push(format!("n={n} n0={n0}: {bv}"));
            }
        }
    }
    notes.push("collapse identity on 20 instances, det D = det D' = 1 for d <= 10, 20 round trips".to_string());
    if bv_failures.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(format!(
            "{}; BV of descending consecutive arguments is not 1 in {} cases, e.g. {}",
            notes.join("; "),
            bv_failures.len(),
            bv_failures[0]
        ))
    }
}

fn criterion_8() -> Outcome {
    let ctx = ctx7();
    let ks = [1_002u64, 3_000, 6_000, 12_000, 24_000, 49_998];
    let mut rows = Vec::new();
    for &k in &ks {
        let s = sample(&ctx, ctx.weight(k).map_err(|e| e.to_string())?, SampleKind::Threshold).map_err(|e| e.to_string())?;
        let disc = discrepancy(&s.values).map_err(|e| e.to_string())?;
        rows.push((k, s.moment(1), s.moment(2), disc));
    }
    let dist = |m: &Rational, n: i64| (m - rat(1, n + 1)).to_f64().unwrap_or(f64::MAX).abs();
    let (first, last) = (&rows[0], &rows[rows.len() - 1]);
    for (n, pick) in [(1i64, 1usize), (2, 2)] {
        let get = |r: &(u64, Rational, Rational, Rational)| if pick == 1 { r.1.clone() } else { r.2.clone() };
        let (d0, d1) = (dist(&get(first), n), dist(&get(last), n));
        check(d1 < 0.05 && d1 < d0, || format!("moment {n}: distance {d1:.5} at k={}, {d0:.5} at k={}", last.0, first.0))?;
    }
    check(rows.windows(2).all(|w| w[1].3 < w[0].3), || {
        format!("discrepancy not decreasing: {:?}", rows.iter().map(|r| r.3.to_f64().unwrap_or(0.0)).collect::<Vec<_>>())
    })?;
    Ok(format!(
        "k={}: |m1-1/2| = {:.5}, |m2-1/3| = {:.5}, discrepancy {:.5} -> {:.5}",
        last.0,
        dist(&last.1, 1),
        dist(&last.2, 2),
        first.3.to_f64().unwrap_or(0.0),
        last.3.to_f64().unwrap_or(0.0)
    ))
}

fn criterion_9() -> Outcome {
    let ctx = ctx7();
    let pool = new_weights(&ctx, 10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let ks: Vec<_> = (0..50).map(|_| pool[rng.gen_range(0..pool.len())]).collect();
    linv_pairs(&ctx, &ks)
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, criterion_1, Duration::from_secs(1)),
        (2, criterion_2, Duration::from_secs(1)),
        (3, criterion_3, Duration::from_secs(5)),
        (4, criterion_4, Duration::from_secs(60)),
        (5, criterion_5, Duration::from_secs(120)),
        (6, criterion_6, Duration::from_secs(600)),
        (7, criterion_7, Duration::from_secs(30)),
        (8, criterion_8, Duration::from_secs(900)),
        (9, criterion_9, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (id, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {budget:?} budget")),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!("[{}] criterion {id} ({elapsed:.2?} / {budget:?}): {detail}", if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
