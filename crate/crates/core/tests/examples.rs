use ghost_slopes::prediction::{build_model, gs_translate, integrality_report, predict_slopes};
use ghost_slopes::slopes::first_slopes;
use ghost_slopes::valuation::{int, rat};
use ghost_slopes::wedge::{
    binomial_vandermonde, d_matrix, formal_wedge_trace, minor_unit_check, ExactMatrix,
};
use ghost_slopes::*;
use num_bigint::BigInt;

fn ctx() -> GhostContext {
    GhostContext::new(7, 2, 1, Mode::Exploratory).unwrap()
}

fn at(ctx: &GhostContext, k: u64, radius: Rational) -> WeightPoint {
    WeightPoint::new(ctx.weight(k).unwrap(), Valuation::Finite(radius)).unwrap()
}

fn ints(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| int(x)).collect()
}

#[test]
fn valuations_and_distances() {
    assert_eq!(vp_int(&BigInt::from(42), 7), Valuation::from_int(1));
    assert_eq!(vp_int(&BigInt::from(8), 7), Valuation::zero());
    assert!(vp_int(&BigInt::from(0), 7).is_infinite());
    assert_eq!(weight_distance(24, 66, 7), Valuation::from_int(2));
    assert_eq!(weight_distance(24, 18, 7), Valuation::from_int(1));
    assert!(weight_distance(24, 24, 7).is_infinite());
}

#[test]
fn dimensions_and_multiplicities() {
    let c = ctx();
    let d = c.dimensions(c.weight(24).unwrap());
    assert_eq!((d.d_iw, d.d_ur, d.d_new), (8, 1, 6));
    let d = c.dimensions(c.weight(6).unwrap());
    assert_eq!((d.d_iw, d.d_ur, d.d_new), (2, 0, 2));
    assert_eq!(c.ghost_multiplicity(1, c.weight(6).unwrap()), 1);
    assert_eq!(c.ghost_multiplicity(4, c.weight(24).unwrap()), 3);
    assert_eq!(c.ghost_multiplicity(1, c.weight(24).unwrap()), 0);
    assert!(c.weight(25).is_err());
}

#[test]
fn ghost_polynomials() {
    let c = ctx();
    let g2 = c.ghost_polynomial(2).unwrap();
    assert_eq!(g2.zeros.iter().map(|(k, m)| (*k, *m)).collect::<Vec<_>>(), [(12, 1), (18, 1), (24, 1), (30, 1)]);
    assert_eq!(c.ghost_polynomial(8).unwrap().zeros[&48], 6);
    assert_eq!(c.ghost_polynomial(1).unwrap().zeros.keys().copied().collect::<Vec<_>>(), [6]);
    assert_eq!(c.m_of_k(c.weight(24).unwrap()), 2);
}

#[test]
fn hatted_values() {
    let c = ctx();
    let k = c.weight(24).unwrap();
    assert_eq!(c.evaluate_hatted(4, k).unwrap(), int(17));
    assert_eq!(c.evaluate_hatted(5, k).unwrap(), int(30));
}

#[test]
fn hull_examples() {
    let pts: Vec<(i64, Valuation)> = [17, 19, 25, 34].iter().enumerate().map(|(i, &v)| (i as i64, Valuation::from_int(v))).collect();
    assert_eq!(lower_hull(&pts).unwrap().vertex_xs(), [0, 1, 2, 3]);
    let pts = [(0, Valuation::from_int(0)), (1, Valuation::from_int(5)), (2, Valuation::from_int(6))];
    let hull = lower_hull(&pts).unwrap();
    assert_eq!(hull.vertex_xs(), [0, 2]);
    assert_eq!(hull.slopes, [(int(3), 2)]);
    assert!(lower_hull(&[(0, Valuation::from_int(4))]).unwrap().slopes.is_empty());
    assert!(lower_hull(&[]).is_err());
}

#[test]
fn derivative_polygon_at_24() {
    let c = ctx();
    let dp = derivative_polygon(&c, c.weight(24).unwrap());
    assert_eq!(dp.raw, ints(&[17, 19, 25, 34]));
    assert_eq!(dp.slopes, ints(&[2, 6, 9]));
    assert_eq!(dp.multiplicities, [1, 1, 1]);
    assert_eq!(dp.hull.vertex_xs(), [0, 1, 2, 3]);
}

#[test]
fn near_steinberg_examples() {
    let c = ctx();
    let k = c.weight(24).unwrap();
    assert!(is_near_steinberg(&c, 4, &at(&c, 24, int(7)), k));
    assert!(is_near_steinberg(&c, 4, &at(&c, 24, int(9)), k));
    assert!(!is_near_steinberg(&c, 1, &at(&c, 24, int(9)), k));
}

#[test]
fn newslopes_and_thresholds() {
    let c = ctx();
    let k = c.weight(24).unwrap();
    assert_eq!(k_newslopes(&c, k, &at(&c, 24, int(10))).unwrap().values, ints(&[11; 6]));
    assert_eq!(k_newslopes(&c, k, &at(&c, 24, int(7))).unwrap().values, ints(&[9, 11, 11, 11, 11, 13]));
    assert_eq!(k_newslopes(&c, k, &at(&c, 24, rat(3, 2))).unwrap().values[3], int(11));
    let th = k_thresholds(&c, k).unwrap();
    assert_eq!(th.local, ints(&[9, 6, 2, 1, 6, 9]));
    assert_eq!(sweep_threshold(&c, k, 4).unwrap(), Valuation::from_int(1));
    assert_eq!(sweep_threshold(&c, k, 3).unwrap(), Valuation::from_int(2));
    let local: Vec<(Rational, u64)> = th.local.iter().map(|v| (v.clone(), 1)).collect();
    assert_eq!(global_stretch(&local, 1), local);
    let doubled = global_stretch(&local, 2);
    assert_eq!(doubled.iter().map(|e| e.1).sum::<u64>(), 12);
    let first = first_slopes(&c, &at(&c, 24, rat(1, 2)), 8).unwrap();
    assert_eq!(first[0], rat(1, 2));
}

#[test]
fn slope_window_example() {
    let c = ctx();
    let k = c.weight(24).unwrap();
    let w = slope_window(&c, k, 3).unwrap();
    assert_eq!((w.radius, w.max_slope, w.min_slope), (rat(13, 2), rat(27, 2), rat(17, 2)));
    assert!(slope_window(&c, k, 1).is_err());
}

#[test]
fn prediction_at_24() {
    let c = ctx();
    let k = c.weight(24).unwrap();
    let model = build_model(&c, k);
    assert_eq!(model.k_vals, ints(&[22, 44, 66, 88, 110, 132]));
    assert_eq!(model.m_index, 2);
    assert_eq!(model.eq_positions(), [(1, 2), (2, 4), (4, 4), (5, 2)]);
    let pred = predict_slopes(&c, k).unwrap();
    assert_eq!(pred.linv_known, [(int(-10), 2), (int(-7), 2)]);
    assert_eq!(pred.a1_known, [(int(13), 2), (int(16), 2)]);
    assert_eq!(pred.exceptional_count, 2);
    let total: u64 = pred.linv_known.iter().map(|e| e.1).sum::<u64>() + pred.exceptional_count;
    assert_eq!(total, 6);
    let report = integrality_report(&c, k).unwrap();
    assert_eq!(report.exceptions, 0);
    assert!(report.derivative.iter().all(|e| e.2));
    assert_eq!(gs_translate(&[(int(13), 2)], 24), [(int(-8), 2)]);
    assert_eq!(gs_translate(&[(int(0), 1)], 24), [(int(-21), 1)]);
}

#[test]
fn wedge_examples() {
    let b = ExactMatrix::from_ints(2, 2, &[1, 2, 3, 4]).unwrap();
    assert_eq!(formal_wedge_trace(&[b.clone(), b.clone()]).unwrap(), int(-2));
    assert_eq!(formal_wedge_trace(std::slice::from_ref(&b)).unwrap(), int(5));
    assert_eq!(formal_wedge_trace(&vec![ExactMatrix::identity(4); 2]).unwrap(), int(6));
    assert!(formal_wedge_trace(&[b.clone(), b.clone(), b]).is_err());
    assert_eq!(d_matrix(3), ExactMatrix::from_ints(3, 3, &[1, 0, 0, 2, 1, 0, 1, 1, 1]).unwrap());
    assert_eq!(binomial_vandermonde(&[3, 1, 0]).unwrap(), int(-3));
    assert_eq!(binomial_vandermonde(&[17]).unwrap(), int(1));
    assert!(minor_unit_check(6, 2).unwrap());
    assert!(minor_unit_check(8, 4).unwrap());
    assert!(minor_unit_check(6, 6).unwrap());
}

#[test]
fn quick_verification_suite() {
    let reports = ghost_slopes::verify::run_all(&ctx(), ghost_slopes::verify::Scale::Quick, 7);
    for r in &reports {
        assert!(r.passed, "{r}");
    }
}
