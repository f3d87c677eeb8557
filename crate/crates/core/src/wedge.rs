//! Exact linear algebra for formal wedge traces and the `D_d` binomial matrices.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{GhostError, Result};
use crate::valuation::{int, Rational};

/// Brute-force wedge traces are limited to this dimension.
pub const MAX_WEDGE_DIM: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl ExactMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(GhostError::DimensionMismatch(format!("{rows}x{cols} matrix with {} entries", data.len())));
        }
        Ok(ExactMatrix { rows, cols, data })
    }

    pub fn from_ints(rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&e| int(e)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn scalar(d: usize, alpha: &Rational) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m.set(i, i, alpha.clone());
        }
        m
    }

    pub fn identity(d: usize) -> Self {
        Self::scalar(d, &Rational::one())
    }

    /// Square matrix with independent uniform entries in `[-9, 9]`.
    pub fn random<R: Rng>(d: usize, rng: &mut R) -> Self {
        ExactMatrix { rows: d, cols: d, data: (0..d * d).map(|_| int(rng.gen_range(-9..=9))).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != other.rows {
            return Err(GhostError::DimensionMismatch("inner dimensions differ".into()));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let v = (0..self.cols).map(|t| self.get(i, t) * other.get(t, j)).sum();
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(GhostError::DimensionMismatch("shapes differ".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(ExactMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: &Rational) -> ExactMatrix {
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> ExactMatrix {
        let data = rows.iter().flat_map(|&i| cols.iter().map(move |&j| self.get(i, j).clone())).collect();
        ExactMatrix { rows: rows.len(), cols: cols.len(), data }
    }

    /// Determinant by Gaussian elimination over Q.
    pub fn det(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(GhostError::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(piv) = (c..n).find(|&r| !a[r * n + c].is_zero()) else {
                return Ok(Rational::zero());
            };
            if piv != c {
                for t in 0..n {
                    a.swap(piv * n + t, c * n + t);
                }
                det = -det;
            }
            let p = a[c * n + c].clone();
            det *= &p;
            for r in c + 1..n {
                let f = &a[r * n + c] / &p;
                if f.is_zero() {
                    continue;
                }
                for t in c..n {
                    let v = &a[c * n + t] * &f;
                    a[r * n + t] -= v;
                }
            }
        }
        Ok(det)
    }

    /// Solves `self · x = b` for square invertible `self`.
    pub fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        let n = self.rows;
        if !self.is_square() || b.len() != n {
            return Err(GhostError::DimensionMismatch("solve needs a square system".into()));
        }
        let w = n + 1;
        let mut a: Vec<Rational> = Vec::with_capacity(n * w);
        for i in 0..n {
            a.extend((0..n).map(|j| self.get(i, j).clone()));
            a.push(b[i].clone());
        }
        for c in 0..n {
            let piv = (c..n)
                .find(|&r| !a[r * w + c].is_zero())
                .ok_or_else(|| GhostError::Domain("singular system".into()))?;
            for t in 0..w {
                a.swap(piv * w + t, c * w + t);
            }
            let p = a[c * w + c].clone();
            for t in c..w {
                a[c * w + t] /= &p;
            }
            for r in 0..n {
                if r != c && !a[r * w + c].is_zero() {
                    let f = a[r * w + c].clone();
                    for t in c..w {
                        let v = &a[c * w + t] * &f;
                        a[r * w + t] -= v;
                    }
                }
            }
        }
        Ok((0..n).map(|i| a[i * w + n].clone()).collect())
    }
}

/// `C(x, i)` for any integer `x` and `i ≥ 0`; zero when `0 ≤ x < i`.
pub fn binomial(x: i64, i: i64) -> BigInt {
    if i < 0 {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for t in 0..i {
        num *= BigInt::from(x - t);
        den *= BigInt::from(t + 1);
    }
    num / den
}

fn combinations(d: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, d: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            go(i + 1, d, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, d, n, &mut Vec::with_capacity(n), &mut out);
    out
}

/// All permutations of `0..n` with their signs.
fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, i64)>) {
        let n = used.len();
        if cur.len() == n {
            let inversions = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| cur[a] > cur[b]).count();
            out.push((cur.clone(), if inversions % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// `Σ_{i_1<…<i_n} Σ_{σ ∈ S_n} sgn(σ) · t^{(1)}_{i_1, i_σ(1)} ⋯ t^{(n)}_{i_n, i_σ(n)}`.
pub fn formal_wedge_trace(mats: &[ExactMatrix]) -> Result<Rational> {
    let Some(first) = mats.first() else { return Ok(Rational::one()) };
    let d = first.rows();
    if mats.iter().any(|m| !m.is_square() || m.rows() != d) {
        return Err(GhostError::DimensionMismatch("wedge factors must share one square shape".into()));
    }
    if mats.len() > d {
        return Err(GhostError::DimensionMismatch(format!("{} factors exceed dimension {d}", mats.len())));
    }
    if d > MAX_WEDGE_DIM {
        return Err(GhostError::Domain(format!("dimension {d} exceeds the brute-force cap {MAX_WEDGE_DIM}")));
    }
    let n = mats.len();
    let perms = permutations(n);
    let mut total = Rational::zero();
    for idx in combinations(d, n) {
        for (sigma, sign) in &perms {
            let mut term = int(*sign);
            for (l, m) in mats.iter().enumerate() {
                let e = m.get(idx[l], idx[sigma[l]]);
                if e.is_zero() {
                    term = Rational::zero();
                    break;
                }
                term *= e;
            }
            total += term;
        }
    }
    Ok(total)
}

/// Checks that inserting `n` copies of `αI` into `B_1 ∧ … ∧ B_m` in every order-preserving way
/// sums to `C(d-m, n) α^n tr(B_1 ∧ … ∧ B_m)`.
pub fn wedge_collapse_check(bs: &[ExactMatrix], n: usize, alpha: &Rational, d: usize) -> Result<bool> {
    let m = bs.len();
    if m + n > d {
        return Err(GhostError::DimensionMismatch(format!("m + n = {} exceeds d = {d}", m + n)));
    }
    let scalar = ExactMatrix::scalar(d, alpha);
    let mut lhs = Rational::zero();
    for places in combinations(m + n, m) {
        let mut slots = vec![scalar.clone(); m + n];
        for (t, &pos) in places.iter().enumerate() {
            slots[pos] = bs[t].clone();
        }
        lhs += formal_wedge_trace(&slots)?;
    }
    let alpha_n = (0..n).fold(Rational::one(), |acc, _| acc * alpha);
    let rhs = Rational::from_integer(binomial((d - m) as i64, n as i64)) * alpha_n * formal_wedge_trace(bs)?;
    Ok(lhs == rhs)
}

/// `D_d = (C(d-j, d-i))_{1 ≤ i,j ≤ d}`.
pub fn d_matrix(d: usize) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(d, d);
    for i in 1..=d {
        for j in 1..=d {
            m.set(i - 1, j - 1, Rational::from_integer(binomial((d - j) as i64, d as i64 - i as i64)));
        }
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    /// The upper-left `j × j` block.
    UpperLeft,
    /// First `j/2` and last `j/2` rows of the first `j` columns.
    Split,
}

pub fn d_matrix_truncated(d: usize, j: usize, mode: Truncation) -> Result<ExactMatrix> {
    if j == 0 || j > d {
        return Err(GhostError::Domain(format!("truncation size {j} outside 1..={d}")));
    }
    let full = d_matrix(d);
    let cols: Vec<usize> = (0..j).collect();
    let rows: Vec<usize> = match mode {
        Truncation::UpperLeft => (0..j).collect(),
        Truncation::Split if j % 2 == 1 => {
            return Err(GhostError::Domain(format!("split truncation needs even j, got {j}")))
        }
        Truncation::Split => (0..j / 2).chain(d - j / 2..d).collect(),
    };
    Ok(full.select(&rows, &cols))
}

/// `det (C(x_j, i))_{0 ≤ i < n, 1 ≤ j ≤ n}`.
pub fn binomial_vandermonde(xs: &[i64]) -> Result<Rational> {
    let n = xs.len();
    if n == 0 {
        return Ok(Rational::one());
    }
    let mut m = ExactMatrix::zeros(n, n);
    for i in 0..n {
        for (j, &x) in xs.iter().enumerate() {
            m.set(i, j, Rational::from_integer(binomial(x, i as i64)));
        }
    }
    m.det()
}

/// `det (x_j^i) = Π_{a<b} (x_b - x_a)`.
pub fn vandermonde(xs: &[i64]) -> BigInt {
    let mut v = BigInt::one();
    for a in 0..xs.len() {
        for b in a + 1..xs.len() {
            v *= BigInt::from(xs[b] - xs[a]);
        }
    }
    v
}

pub fn superfactorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    let mut fact = BigInt::one();
    for i in 1..n {
        fact *= BigInt::from(i);
        acc *= &fact;
    }
    acc
}

/// The `(j-1) × (j-1)` minor of `D'_d(j)` without its row `j/2` and column `j` is `±1`.
pub fn minor_unit_check(d: usize, j: usize) -> Result<bool> {
    let split = d_matrix_truncated(d, j, Truncation::Split)?;
    let rows: Vec<usize> = (0..j).filter(|&r| r != j / 2 - 1).collect();
    let cols: Vec<usize> = (0..j - 1).collect();
    let det = split.select(&rows, &cols).det()?;
    Ok(det.abs() == Rational::one())
}

/// Forms `α^{-i} F_{i,j} = Σ_l C(d-l, d-i) M^{(l)} α^{-l}` from `m_vec = (M^{(1)}, …, M^{(j)})`,
/// then recovers `M^{(j)}` from the upper-left system and, for even `j`, the split system.
pub fn linear_system_roundtrip(d: usize, j: usize, alpha: &Rational, m_vec: &[Rational]) -> Result<bool> {
    if m_vec.len() != j || j == 0 || j > d || alpha.is_zero() {
        return Err(GhostError::DimensionMismatch("need M^(1..j) with 1 <= j <= d and alpha != 0".into()));
    }
    let dd = d_matrix(d);
    let pow = |e: i64| -> Rational {
        let base = if e >= 0 { alpha.clone() } else { alpha.recip() };
        (0..e.abs()).fold(Rational::one(), |acc, _| acc * &base)
    };
    let x: Vec<Rational> = (1..=j).map(|l| &m_vec[l - 1] * pow(-(l as i64))).collect();
    let y: Vec<Rational> = (0..d).map(|i| (0..j).map(|l| dd.get(i, l) * &x[l]).sum()).collect();
    // the F-values themselves, as a consistency check of the scaling
    let f: Vec<Rational> = (1..=d).map(|i| &y[i - 1] * pow(i as i64)).collect();
    let unscaled: Vec<Rational> = (1..=d).map(|i| &f[i - 1] * pow(-(i as i64))).collect();
    let upper = d_matrix_truncated(d, j, Truncation::UpperLeft)?;
    let sol = upper.solve(&unscaled[..j])?;
    let mut ok = &sol[j - 1] * pow(j as i64) == m_vec[j - 1];
    if j.is_multiple_of(2) {
        let split = d_matrix_truncated(d, j, Truncation::Split)?;
        let rhs: Vec<Rational> = (0..j / 2).chain(d - j / 2..d).map(|i| unscaled[i].clone()).collect();
        let sol = split.solve(&rhs)?;
        ok &= &sol[j - 1] * pow(j as i64) == m_vec[j - 1];
    }
    Ok(ok)
}

/// Elementary symmetric functions `e_0..e_d` of the eigenvalues via Faddeev–LeVerrier.
pub fn char_poly_elementary(a: &ExactMatrix) -> Result<Vec<Rational>> {
    if !a.is_square() {
        return Err(GhostError::DimensionMismatch("characteristic polynomial of a non-square matrix".into()));
    }
    let d = a.rows();
    // c[t] is the coefficient of λ^t in det(λI - A)
    let mut c = vec![Rational::zero(); d + 1];
    c[d] = Rational::one();
    let mut m = ExactMatrix::zeros(d, d);
    for step in 1..=d {
        m = a.mul(&m)?.add(&ExactMatrix::scalar(d, &c[d - step + 1]))?;
        c[d - step] = -a.mul(&m)?.trace() / int(step as i64);
    }
    Ok((0..=d).map(|n| if n % 2 == 0 { c[d - n].clone() } else { -c[d - n].clone() }).collect())
}

/// Compares the `u^j` coefficient of `tr(∧^i(αI + A_1 u + A_2 u²))`, obtained from principal
/// minors and interpolation, with `Σ_l C(d-l, i-l) α^{i-l} M_j^{(l)}`.
pub fn expansion_identity_check(alpha: &Rational, a1: &ExactMatrix, a2: &ExactMatrix, i: usize, j: usize) -> Result<bool> {
    let d = a1.rows();
    if i == 0 || i > d {
        return Err(GhostError::Domain(format!("wedge degree {i} outside 1..={d}")));
    }
    let degree = 2 * i;
    let points: Vec<i64> = (0..=degree as i64).collect();
    let mut values = Vec::with_capacity(points.len());
    for &u in &points {
        let uq = int(u);
        let mu = ExactMatrix::scalar(d, alpha).add(&a1.scale(&uq))?.add(&a2.scale(&(&uq * &uq)))?;
        let mut s = Rational::zero();
        for idx in combinations(d, i) {
            s += mu.select(&idx, &idx).det()?;
        }
        values.push(s);
    }
    let mut vm = ExactMatrix::zeros(points.len(), points.len());
    for (r, &u) in points.iter().enumerate() {
        for c in 0..points.len() {
            vm.set(r, c, int(u.pow(c as u32)));
        }
    }
    let coeffs = vm.solve(&values)?;
    let lhs = coeffs.get(j).cloned().unwrap_or_else(Rational::zero);
    let rhs = if j == 0 {
        Rational::from_integer(binomial(d as i64, i as i64)) * (0..i).fold(Rational::one(), |acc, _| acc * alpha)
    } else {
        let mut total = Rational::zero();
        for l in 1..=j.min(i) {
            let mut m_jl = Rational::zero();
            for comp in compositions(j, l) {
                let mats: Vec<ExactMatrix> = comp.iter().map(|&p| if p == 1 { a1.clone() } else { a2.clone() }).collect();
                m_jl += formal_wedge_trace(&mats)?;
            }
            let alpha_pow = (0..i - l).fold(Rational::one(), |acc, _| acc * alpha);
            total += Rational::from_integer(binomial((d - l) as i64, (i - l) as i64)) * alpha_pow * m_jl;
        }
        total
    };
    Ok(lhs == rhs)
}

/// Ordered compositions of `j` into `l` parts from `{1, 2}`.
fn compositions(j: usize, l: usize) -> Vec<Vec<usize>> {
    if l == 0 {
        return if j == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=2usize.min(j) {
        for mut rest in compositions(j - first, l - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// True for `±1`.
pub fn is_unit(r: &Rational) -> bool {
    r.is_integer() && r.numer().abs().is_one()
}
