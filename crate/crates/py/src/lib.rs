//! Python bindings. Rationals cross the boundary as lowest-terms strings.

use ghost_slopes::distribution::{discrepancy as disc, sample, SampleKind};
use ghost_slopes::prediction::predict_slopes;
use ghost_slopes::render::{self, rational_str};
use ghost_slopes::verify::{run_all, Scale};
use ghost_slopes::wedge::{self, ExactMatrix, Truncation};
use ghost_slopes::{
    derivative_polygon, k_newslopes, k_thresholds, GhostContext, GhostError, Mode, Rational, Valuation,
    WeightIndex, WeightPoint,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: GhostError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn strs(values: &[Rational]) -> Vec<String> {
    values.iter().map(rational_str).collect()
}

fn valuation_str(v: &Valuation) -> Option<String> {
    v.finite().map(rational_str)
}

#[pyclass(name = "Context", frozen)]
struct PyContext {
    inner: GhostContext,
}

impl PyContext {
    fn weight(&self, k: u64) -> PyResult<WeightIndex> {
        self.inner.weight(k).map_err(err)
    }
}

#[pymethods]
impl PyContext {
    #[new]
    #[pyo3(signature = (p, a, s_eps, mode = "exploratory", global_mult = 1))]
    fn new(p: u64, a: u64, s_eps: u64, mode: &str, global_mult: u64) -> PyResult<Self> {
        let mode: Mode = mode.parse().map_err(err)?;
        let inner = GhostContext::new(p, a, s_eps, mode).and_then(|c| c.with_global_mult(global_mult)).map_err(err)?;
        Ok(PyContext { inner })
    }

    #[getter]
    fn k_eps(&self) -> u64 {
        self.inner.k_eps()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings().to_vec()
    }

    /// `(d_iw, d_ur, d_new)`.
    fn dimensions(&self, k: u64) -> PyResult<(i64, i64, i64)> {
        let d = self.inner.dimensions(self.weight(k)?);
        Ok((d.d_iw, d.d_ur, d.d_new))
    }

    fn ghost_multiplicity(&self, n: u64, k: u64) -> PyResult<u64> {
        Ok(self.inner.ghost_multiplicity(n, self.weight(k)?))
    }

    /// Zeros of `g_n` as `{k: multiplicity}`.
    fn ghost_zeros(&self, n: u64) -> PyResult<std::collections::BTreeMap<u64, u64>> {
        Ok(self.inner.ghost_polynomial(n).map_err(err)?.zeros)
    }

    fn ghost_json(&self, n: u64) -> PyResult<String> {
        let polys = (1..=n).map(|i| self.inner.ghost_polynomial(i)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        Ok(render::ghost_json(&polys))
    }

    fn m_of_k(&self, k: u64) -> PyResult<u32> {
        Ok(self.inner.m_of_k(self.weight(k)?))
    }

    fn derivative_values(&self, k: u64) -> PyResult<Vec<String>> {
        Ok(strs(&derivative_polygon(&self.inner, self.weight(k)?).raw))
    }

    fn derivative_slopes(&self, k: u64) -> PyResult<Vec<(String, u64)>> {
        let dp = derivative_polygon(&self.inner, self.weight(k)?);
        Ok(dp.slopes.iter().map(rational_str).zip(dp.multiplicities.iter().copied()).collect())
    }

    /// `(values, provenance labels)`.
    fn thresholds(&self, k: u64) -> PyResult<(Vec<String>, Vec<String>)> {
        let th = k_thresholds(&self.inner, self.weight(k)?).map_err(err)?;
        Ok((strs(&th.local), th.provenance.iter().map(|p| p.label().to_string()).collect()))
    }

    /// Newslopes at radius `radius` (integer, `num/den` or `inf`) around `w_k`.
    fn newslopes(&self, k: u64, radius: &str) -> PyResult<Vec<String>> {
        let k = self.weight(k)?;
        let w = WeightPoint::new(k, Valuation::parse(radius).map_err(err)?).map_err(err)?;
        Ok(strs(&k_newslopes(&self.inner, k, &w).map_err(err)?.values))
    }

    fn predict_json(&self, k: u64) -> PyResult<String> {
        Ok(render::predict_json(&predict_slopes(&self.inner, self.weight(k)?).map_err(err)?))
    }

    /// Moments `1..=n_max` of the normalized sample of the given kind.
    #[pyo3(signature = (k, n_max = 2, kind = "threshold"))]
    fn moments(&self, k: u64, n_max: u32, kind: &str) -> PyResult<Vec<String>> {
        let kind: SampleKind = kind.parse().map_err(err)?;
        let s = sample(&self.inner, self.weight(k)?, kind).map_err(err)?;
        Ok((1..=n_max).map(|n| rational_str(&s.moment(n))).collect())
    }

    #[pyo3(signature = (k, kind = "threshold"))]
    fn discrepancy(&self, k: u64, kind: &str) -> PyResult<String> {
        let kind: SampleKind = kind.parse().map_err(err)?;
        let s = sample(&self.inner, self.weight(k)?, kind).map_err(err)?;
        Ok(rational_str(&disc(&s.values).map_err(err)?))
    }

    /// Runs the property suites; returns `(name, passed, detail)` triples.
    #[pyo3(signature = (full = false, seed = 7))]
    fn verify(&self, py: Python<'_>, full: bool, seed: u64) -> Vec<(String, bool, String)> {
        let scale = if full { Scale::Full } else { Scale::Quick };
        py.detach(|| run_all(&self.inner, scale, seed))
            .into_iter()
            .map(|r| (r.name.to_string(), r.passed, r.detail))
            .collect()
    }
}

#[pyfunction]
fn weight_distance(k: u64, k2: u64, p: u64) -> Option<String> {
    valuation_str(&ghost_slopes::weight_distance(k, k2, p))
}

#[pyfunction]
fn binomial_vandermonde(xs: Vec<i64>) -> PyResult<String> {
    Ok(rational_str(&wedge::binomial_vandermonde(&xs).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (d, j, split = false))]
fn d_matrix_det(d: usize, j: usize, split: bool) -> PyResult<String> {
    let mode = if split { Truncation::Split } else { Truncation::UpperLeft };
    let det = wedge::d_matrix_truncated(d, j, mode).and_then(|m| m.det()).map_err(err)?;
    Ok(rational_str(&det))
}

/// Formal wedge trace of square integer matrices given as nested row lists.
#[pyfunction]
fn formal_wedge_trace(mats: Vec<Vec<Vec<i64>>>) -> PyResult<String> {
    let mats = mats
        .iter()
        .map(|rows| {
            let flat: Vec<i64> = rows.iter().flatten().copied().collect();
            ExactMatrix::from_ints(rows.len(), rows.first().map_or(0, Vec::len), &flat)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    Ok(rational_str(&wedge::formal_wedge_trace(&mats).map_err(err)?))
}

#[pymodule]
fn ghost_slopes_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyContext>()?;
    m.add_function(wrap_pyfunction!(weight_distance, m)?)?;
    m.add_function(wrap_pyfunction!(binomial_vandermonde, m)?)?;
    m.add_function(wrap_pyfunction!(d_matrix_det, m)?)?;
    m.add_function(wrap_pyfunction!(formal_wedge_trace, m)?)?;
    Ok(())
}
