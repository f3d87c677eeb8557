use ghost_slopes::distribution::{discrepancy, multiset_mismatch, sample, z_mismatch_bound, SampleKind};
use ghost_slopes::valuation::{int, rat};
use ghost_slopes::wedge::{binomial_vandermonde, superfactorial, vandermonde, ExactMatrix};
use ghost_slopes::*;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn contexts() -> impl Strategy<Value = GhostContext> {
    prop_oneof![
        Just((7u64, 2u64, 1u64)),
        Just((11, 3, 0)),
        Just((11, 4, 0)),
        Just((13, 6, 1)),
        Just((5, 1, 0)),
    ]
    .prop_map(|(p, a, s)| GhostContext::new(p, a, s, Mode::Exploratory).unwrap())
}

fn finite(v: &Valuation) -> Rational {
    v.finite().cloned().unwrap_or_else(|| int(i64::MAX))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_ultrametric(ctx in contexts(), a in 0u64..3000, b in 0u64..3000, c in 0u64..3000) {
        prop_assume!(a != b && b != c && a != c);
        let k = |x| ctx.weight_from_bullet(x).k();
        let p = ctx.p();
        let (ab, bc, ac) = (weight_distance(k(a), k(b), p), weight_distance(k(b), k(c), p), weight_distance(k(a), k(c), p));
        prop_assert!(finite(&ac) >= finite(&ab).min(finite(&bc)));
        prop_assert!(finite(&ab) >= int(1));
    }

    #[test]
    fn dimensions_are_consistent(ctx in contexts(), kb in 0u64..4000) {
        let k = ctx.weight_from_bullet(kb);
        let d = ctx.dimensions(k);
        prop_assert_eq!(d.d_new, d.d_iw - 2 * d.d_ur);
        prop_assert!(d.d_new >= 0);
        prop_assert_eq!(d.d_iw % 2, 0);
        let next = ctx.dimensions(ctx.weight_from_bullet(kb + ctx.p() + 1));
        prop_assert_eq!(next.d_ur - d.d_ur, 2);
    }

    #[test]
    fn multiplicities_are_symmetric(ctx in contexts(), kb in 1u64..2000) {
        let k = ctx.weight_from_bullet(kb);
        let d = ctx.dimensions(k);
        for n in 0..=d.d_iw as u64 {
            prop_assert_eq!(ctx.ghost_multiplicity(n, k), ctx.ghost_multiplicity(d.d_iw as u64 - n, k));
        }
        prop_assert_eq!(ctx.ghost_multiplicity(d.d_iw as u64 / 2, k) as i64, d.d_new / 2);
    }

    #[test]
    fn lower_hull_is_idempotent(ys in proptest::collection::vec(-50i64..50, 1..30)) {
        let pts: Vec<(i64, Valuation)> = ys.iter().enumerate().map(|(i, &y)| (i as i64, Valuation::from_int(y))).collect();
        let hull = lower_hull(&pts).unwrap();
        let again: Vec<(i64, Valuation)> = hull.vertices.iter().map(|(x, y)| (*x, Valuation::Finite(y.clone()))).collect();
        prop_assert_eq!(&lower_hull(&again).unwrap().vertices, &hull.vertices);
        for (i, y) in ys.iter().enumerate() {
            prop_assert!(hull.value_at(i as i64).unwrap() <= int(*y));
        }
        let slopes = hull.slope_sequence();
        prop_assert!(slopes.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn derivative_duality_and_integrality(kb in 0u64..1500) {
        let ctx = GhostContext::new(7, 2, 1, Mode::Exploratory).unwrap();
        let k = ctx.weight_from_bullet(kb);
        prop_assume!(ctx.dimensions(k).d_new > 0);
        let dp = derivative_polygon(&ctx, k);
        prop_assert!(dp.duality_holds());
        prop_assert!(dp.integrality_holds(ctx.a()));
        prop_assert!(dp.slopes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ghost_newton_slopes_lock_above_top_threshold(kb in 1u64..200) {
        let ctx = GhostContext::new(7, 2, 1, Mode::Exploratory).unwrap();
        let k = ctx.weight_from_bullet(kb);
        prop_assume!(ctx.dimensions(k).d_new > 0);
        let th = k_thresholds(&ctx, k).unwrap();
        let top = th.local.iter().max().unwrap().clone() + rat(1, 3);
        let w = WeightPoint::new(k, Valuation::Finite(top)).unwrap();
        let ns = k_newslopes(&ctx, k, &w).unwrap();
        prop_assert!(ns.values.iter().all(|s| *s == rat(k.k() as i64 - 2, 2)));
    }

    #[test]
    fn binomial_vandermonde_matches_product(xs in proptest::collection::vec(-12i64..12, 1..6)) {
        let bv = binomial_vandermonde(&xs).unwrap();
        prop_assert_eq!(bv, Rational::new(vandermonde(&xs), superfactorial(xs.len())));
    }

    #[test]
    fn determinant_is_multiplicative(seed in any::<u64>(), d in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ExactMatrix::random(d, &mut rng);
        let b = ExactMatrix::random(d, &mut rng);
        prop_assert_eq!(a.mul(&b).unwrap().det().unwrap(), a.det().unwrap() * b.det().unwrap());
    }

    #[test]
    fn discrepancy_is_bounded(vals in proptest::collection::vec((0i64..100, 1i64..100), 1..40)) {
        let values: Vec<Rational> = vals.iter().map(|&(n, d)| rat(n, d)).collect();
        let disc = discrepancy(&values).unwrap();
        prop_assert!(disc > Rational::zero() && disc <= int(1));
        prop_assert!(disc >= rat(1, 2 * values.len() as i64));
    }
}

#[test]
fn threshold_and_derivative_samples_nearly_agree() {
    let ctx = GhostContext::new(7, 2, 1, Mode::Exploratory).unwrap();
    for k in [1002u64, 2004, 5004] {
        let w = ctx.weight(k).unwrap();
        let z = sample(&ctx, w, SampleKind::Threshold).unwrap();
        let zp = sample(&ctx, w, SampleKind::Derivative).unwrap();
        assert_eq!(z.len(), zp.len());
        let mismatch = int(multiset_mismatch(&z.values, &zp.values) as i64);
        assert!(mismatch <= z_mismatch_bound(ctx.p(), w), "k={k}: {mismatch} mismatches");
    }
}
