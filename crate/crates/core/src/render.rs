//! Canonical text renderings: compact JSON with sorted keys, plain tables and CSV.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::distribution::DistributionSample;
use crate::ghost::GhostPolynomial;
use crate::polygon::RationalPolygon;
use crate::prediction::SlopePrediction;
use crate::slopes::{Newslopes, NewslopeSource, ThresholdVector};
use crate::valuation::{rat, Rational};

/// Lowest terms; integers carry no denominator.
pub fn rational_str(r: &Rational) -> String {
    r.to_string()
}

fn multiset_json(values: &[(Rational, u64)]) -> Value {
    Value::Array(values.iter().map(|(v, m)| json!([rational_str(v), m])).collect())
}

/// Rounds half away from zero to `digits` decimals.
pub fn decimal(r: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = r.abs() * Rational::from_integer(scale.clone());
    let floor = scaled.floor().to_integer();
    let rounded = if scaled - Rational::from_integer(floor.clone()) >= rat(1, 2) { floor + 1 } else { floor };
    let (whole, frac) = rounded.div_rem(&scale);
    let sign = if r.is_negative() && !(whole.is_zero() && frac.is_zero()) { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{whole}");
    }
    format!("{sign}{whole}.{:0>width$}", frac.to_string(), width = digits as usize)
}

pub fn ghost_json(polys: &[GhostPolynomial]) -> String {
    let arr: Vec<Value> = polys
        .iter()
        .map(|g| {
            let zeros: Vec<Value> = g.zeros.iter().map(|(k, m)| json!({"k": k, "mult": m})).collect();
            json!({"n": g.n, "zeros": zeros})
        })
        .collect();
    Value::Array(arr).to_string()
}

/// One line per polynomial, e.g. `g_3(w) = (w - w_18)^2(w - w_24)^2…`.
pub fn ghost_table(polys: &[GhostPolynomial]) -> String {
    let mut out = String::new();
    for g in polys {
        out.push_str(&format!("g_{}(w) = ", g.n));
        if g.zeros.is_empty() {
            out.push('1');
        }
        for (k, m) in &g.zeros {
            out.push_str(&format!("(w - w_{k})"));
            if *m > 1 {
                out.push_str(&format!("^{m}"));
            }
        }
        out.push('\n');
    }
    out
}

pub fn polygon_json(poly: &RationalPolygon) -> String {
    let vertices: Vec<Value> = poly.vertices.iter().map(|(x, y)| json!([x, rational_str(y)])).collect();
    json!({"vertices": vertices, "slopes": multiset_json(&poly.slopes)}).to_string()
}

pub fn newslopes_json(k: u64, radius: &str, ns: &Newslopes) -> String {
    let source = match ns.source {
        NewslopeSource::ClosedForm => "closed",
        NewslopeSource::Hull => "hull",
    };
    let values: Vec<String> = ns.values.iter().map(rational_str).collect();
    json!({"k": k, "radius": radius, "newslopes": values, "source": source}).to_string()
}

pub fn newslopes_table(k: u64, radius: &str, ns: &Newslopes) -> String {
    let values: Vec<String> = ns.values.iter().map(rational_str).collect();
    format!("k = {k}, radius = {radius}\nnewslopes: {}\n", values.join(", "))
}

pub fn thresholds_json(th: &ThresholdVector) -> String {
    let local: Vec<String> = th.local.iter().map(rational_str).collect();
    let provenance: Vec<&str> = th.provenance.iter().map(|p| p.label()).collect();
    json!({"k": th.k.k(), "local": local, "provenance": provenance, "global_mult": th.global_mult}).to_string()
}

pub fn thresholds_table(th: &ThresholdVector) -> String {
    let mut out = format!("k = {}, global multiplicity {}\n", th.k.k(), th.global_mult);
    for (i, (v, p)) in th.local.iter().zip(&th.provenance).enumerate() {
        out.push_str(&format!("CS_{} = {} ({})\n", i + 1, rational_str(v), p.label()));
    }
    out
}

pub fn predict_json(pred: &SlopePrediction) -> String {
    json!({
        "k": pred.k.k(),
        "linv_known": multiset_json(&pred.linv_known),
        "floor": rational_str(&pred.linv_floor),
        "exceptional": pred.exceptional_count,
    })
    .to_string()
}

pub fn predict_table(pred: &SlopePrediction) -> String {
    let mut out = format!("k = {}\n", pred.k.k());
    for (v, m) in &pred.linv_known {
        out.push_str(&format!("v_p(L) = {} x{}\n", rational_str(v), m));
    }
    out.push_str(&format!("exceptional: {} slopes >= {}\n", pred.exceptional_count, rational_str(&pred.linv_floor)));
    out
}

pub const DIST_CSV_HEADER: &str = "k,kind,n,moment_num,moment_den,target_num,target_den,abs_error_decimal";

/// Moments `1..=n_max` of every sample, with the error column rounded to `digits` decimals.
pub fn dist_csv(samples: &[DistributionSample], n_max: u32, digits: u32) -> String {
    let mut out = String::from(DIST_CSV_HEADER);
    out.push('\n');
    for s in samples {
        for n in 1..=n_max {
            let m = s.moment(n);
            let target = rat(1, n as i64 + 1);
            let err = (&m - &target).abs();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                s.k.k(),
                s.kind.label(),
                n,
                m.numer(),
                m.denom(),
                target.numer(),
                target.denom(),
                decimal(&err, digits)
            ));
        }
    }
    out
}

pub fn dist_json(samples: &[DistributionSample], n_max: u32) -> String {
    let arr: Vec<Value> = samples
        .iter()
        .map(|s| {
            let moments: Vec<String> = (1..=n_max).map(|n| rational_str(&s.moment(n))).collect();
            json!({"k": s.k.k(), "kind": s.kind.label(), "size": s.len(), "moments": moments})
        })
        .collect();
    Value::Array(arr).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ghost::{GhostContext, Mode};
    use crate::valuation::int;

    #[test]
    fn decimals() {
        assert_eq!(decimal(&rat(1, 3), 4), "0.3333");
        assert_eq!(decimal(&rat(2, 3), 2), "0.67");
        assert_eq!(decimal(&rat(-1, 8), 2), "-0.13");
        assert_eq!(decimal(&int(5), 0), "5");
        assert_eq!(decimal(&rat(-1, 1000), 2), "0.00");
    }

    #[test]
    fn ghost_lines() {
        let ctx = GhostContext::new(7, 2, 1, Mode::Exploratory).unwrap();
        let g1 = ctx.ghost_polynomial(1).unwrap();
        assert_eq!(ghost_table(std::slice::from_ref(&g1)), "g_1(w) = (w - w_6)\n");
        assert_eq!(ghost_json(&[g1]), r#"[{"n":1,"zeros":[{"k":6,"mult":1}]}]"#);
        assert_eq!(ghost_json(&[]), "[]");
    }
}
