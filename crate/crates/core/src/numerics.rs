//! Self-contained complex linear algebra and scalar root finding.
//!
//! This is the kernel every other module builds on: a small complex
//! vector/matrix pair, a one-sided Jacobi SVD used for null-space
//! extraction, bracketed bisection, and a closed-form quartic solver
//! with Newton polishing. No external linear-algebra backend.

use num_complex::Complex64;
use std::fmt;
use std::ops::Index;

/// Singular values below `RANK_TOLERANCE * sigma_max` count as zero.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Default absolute bisection tolerance. The solver brackets on the
/// power-splitting axis, which lives in [0, 1], so an absolute
/// tolerance is scale-free there.
pub const BISECT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum NumericsError {
    /// Two operands that must share a dimension do not.
    DimensionMismatch { left: usize, right: usize },
    /// Bisection was asked to run on an interval without a sign change.
    NoSignChange { lo: f64, hi: f64 },
    /// Root finding on the identically-zero polynomial.
    ZeroPolynomial,
}

impl fmt::Display for NumericsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            Self::NoSignChange { lo, hi } => {
                write!(f, "no sign change on [{lo}, {hi}]")
            }
            Self::ZeroPolynomial => write!(f, "all polynomial coefficients are zero"),
        }
    }
}

impl std::error::Error for NumericsError {}

// ───────────────────────── complex vector ─────────────────────────

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVec {
    entries: Vec<Complex64>,
}

impl CVec {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    pub fn zeros(n: usize) -> Self {
        Self { entries: vec![Complex64::new(0.0, 0.0); n] }
    }

    /// Standard basis vector e_k of length `n`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.entries[k] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> CVec {
        CVec::new(self.entries.iter().map(|z| z * c).collect())
    }

    /// Returns `self / ||self||`; the zero vector is returned unchanged.
    pub fn normalized(&self) -> CVec {
        let n = self.norm();
        if n == 0.0 {
            self.clone()
        } else {
            self.scaled(Complex64::new(1.0 / n, 0.0))
        }
    }

    pub fn sub(&self, rhs: &CVec) -> CVec {
        assert_eq!(self.len(), rhs.len());
        CVec::new(
            self.entries
                .iter()
                .zip(rhs.entries.iter())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Index<usize> for CVec {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.entries[i]
    }
}

/// Hermitian inner product `a^H b` (conjugate on the left argument).
pub fn hermitian_inner(a: &CVec, b: &CVec) -> Result<Complex64, NumericsError> {
    if a.len() != b.len() {
        return Err(NumericsError::DimensionMismatch { left: a.len(), right: b.len() });
    }
    Ok(a.entries
        .iter()
        .zip(b.entries.iter())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

// ───────────────────────── complex matrix ─────────────────────────

/// Dense row-major complex matrix. `cols == 0` is allowed so that an
/// empty null-space basis can be represented.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds the matrix of columns `columns` (all of equal length).
    pub fn from_columns(rows: usize, columns: &[CVec]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    /// Rank-one outer product `u v^H`.
    pub fn outer(u: &CVec, v: &CVec) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> CVec {
        CVec::new((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    pub fn hermitian(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        CMat::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| self.get(i, k) * rhs.get(k, j)).sum()
        })
    }

    pub fn mul_vec(&self, v: &CVec) -> CVec {
        assert_eq!(self.cols, v.len(), "inner dimensions must agree");
        CVec::new(
            (0..self.rows)
                .map(|i| (0..self.cols).map(|k| self.get(i, k) * v[k]).sum())
                .collect(),
        )
    }

    pub fn scaled(&self, c: Complex64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(rhs.data.iter()).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().sqrt()
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        self.svd().singular_values
    }

    /// One-sided Jacobi SVD. Column rotations orthogonalize a working
    /// copy of the matrix while the same rotations accumulate into `v`,
    /// so on exit `self = U diag(s) v^H` with `s` descending.
    pub fn svd(&self) -> Svd {
        let n = self.cols;
        let mut b: Vec<Vec<Complex64>> = (0..n).map(|j| self.column(j).entries.clone()).collect();
        let mut v: Vec<Vec<Complex64>> = (0..n)
            .map(|j| {
                let mut col = vec![Complex64::new(0.0, 0.0); n];
                col[j] = Complex64::new(1.0, 0.0);
                col
            })
            .collect();

        let tol_sq = 1e-30; // relative |b_p^H b_q|^2 threshold for a clean pair
        // columns whose energy sits below the rounding floor of the
        // whole matrix carry no direction information; rotating them
        // against each other never converges and only erodes V
        let floor = f64::EPSILON * f64::EPSILON * self.frobenius_norm_sq();
        for _sweep in 0..64 {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let app: f64 = b[p].iter().map(|z| z.norm_sqr()).sum();
                    let aqq: f64 = b[q].iter().map(|z| z.norm_sqr()).sum();
                    if app <= floor || aqq <= floor {
                        continue;
                    }
                    let apq: Complex64 =
                        b[p].iter().zip(b[q].iter()).map(|(x, y)| x.conj() * y).sum();
                    let mag_sq = apq.norm_sqr();
                    if mag_sq <= tol_sq * app * aqq || mag_sq == 0.0 {
                        continue;
                    }
                    rotated = true;
                    let beta = mag_sq.sqrt();
                    let phase = apq / beta; // e^{j phi}
                    let tau = (aqq - app) / (2.0 * beta);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    // col_p' = c*col_p - s*conj(phase)*col_q
                    // col_q' = s*col_p + c*conj(phase)*col_q
                    let pc = phase.conj();
                    for arr in [&mut b, &mut v] {
                        let (head, tail) = arr.split_at_mut(q);
                        let bp = &mut head[p];
                        let bq = &mut tail[0];
                        for (x, y) in bp.iter_mut().zip(bq.iter_mut()) {
                            let xp = c * *x - s * pc * *y;
                            let xq = s * *x + c * pc * *y;
                            *x = xp;
                            *y = xq;
                        }
                    }
                }
            }
            if !rotated {
                break;
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        let norms: Vec<f64> = b.iter().map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
        order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

        let singular_values: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
        let v_sorted = CMat::from_fn(n, n, |i, j| v[order[j]][i]);
        Svd { singular_values, v: v_sorted }
    }
}

/// Right singular structure of a matrix: descending singular values and
/// the unitary matrix of right singular vectors.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub v: CMat,
}

/// Orthonormal basis of the null space of `h` (right singular vectors
/// whose singular value falls below `RANK_TOLERANCE * sigma_max`).
/// Returns an `N x r0` matrix; `r0 == 0` yields an empty-column matrix.
pub fn null_space_basis(h: &CMat) -> CMat {
    let svd = h.svd();
    let n = h.cols();
    let sigma_max = svd.singular_values.first().copied().unwrap_or(0.0);
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > RANK_TOLERANCE * sigma_max && s > 0.0)
        .count();
    CMat::from_fn(n, n - rank, |i, j| svd.v.get(i, rank + j))
}

// ───────────────────────── root finding ─────────────────────────

/// Bisection for a decreasing function with `f(lo) >= 0 >= f(hi)`.
/// Deterministic: the same inputs always produce the same bits.
pub fn bisect_root(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, NumericsError> {
    let flo = f(lo);
    let fhi = f(hi);
    if flo < 0.0 || fhi > 0.0 {
        return Err(NumericsError::NoSignChange { lo, hi });
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        if (hi - lo) <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval no longer splittable in f64
        }
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn eval_poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

fn eval_dpoly(c: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for k in (1..c.len()).rev() {
        acc = acc * x + c[k] * k as f64;
    }
    acc
}

/// Real roots of a monic-normalizable cubic `x^3 + a2 x^2 + a1 x + a0`.
fn cubic_real_roots(a2: f64, a1: f64, a0: f64) -> Vec<f64> {
    // depressed cubic t^3 + p t + q with x = t - a2/3
    let shift = a2 / 3.0;
    let p = a1 - a2 * a2 / 3.0;
    let q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    let disc = 0.25 * q * q + p * p * p / 27.0;
    if disc > 0.0 {
        // one real root (Cardano, stable branch)
        let sq = disc.sqrt();
        let u = (-0.5 * q + sq).cbrt();
        let w = (-0.5 * q - sq).cbrt();
        vec![u + w - shift]
    } else if p == 0.0 && q == 0.0 {
        vec![-shift]
    } else {
        // three real roots (trigonometric form)
        let m = (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p) / m).clamp(-1.0, 1.0);
        let theta = arg.acos();
        (0..3)
            .map(|k| 2.0 * m * ((theta - 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos() - shift)
            .collect()
    }
}

/// Real roots of `c2 x^2 + c1 x + c0` (c2 != 0), numerically stable.
/// A discriminant that is negative only by rounding error counts as a
/// double root.
fn quadratic_real_roots(c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    let disc = c1 * c1 - 4.0 * c2 * c0;
    let scale = c1 * c1 + (4.0 * c2 * c0).abs();
    if disc < -1e-12 * scale {
        return Vec::new();
    }
    let sq = disc.max(0.0).sqrt();
    let q = -0.5 * (c1 + c1.signum() * sq);
    if q == 0.0 {
        // c1 == 0 and disc == 0 (or c0 == 0): symmetric roots
        let r = (-c0 / c2).max(0.0).sqrt();
        return vec![-r, r];
    }
    vec![q / c2, c0 / q]
}

/// Real roots of the monic quartic `x^4 + a x^3 + b x^2 + c x + d`
/// via Ferrari's factorization into two quadratics.
fn quartic_real_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    // depressed quartic y^4 + p y^2 + q y + r with x = y - a/4
    let shift = a / 4.0;
    let a2 = a * a;
    let p = b - 3.0 * a2 / 8.0;
    let q = c - a * b / 2.0 + a2 * a / 8.0;
    let r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;

    let scale = 1.0_f64.max(p.abs()).max(q.abs()).max(r.abs());
    let mut ys: Vec<f64> = Vec::new();
    if q.abs() <= 1e-14 * scale {
        // biquadratic: y^2 solves z^2 + p z + r
        for z in quadratic_real_roots(1.0, p, r) {
            if z >= -1e-14 * scale {
                let y = z.max(0.0).sqrt();
                ys.push(y);
                ys.push(-y);
            }
        }
    } else {
        // resolvent: z^3 + 2p z^2 + (p^2 - 4r) z - q^2 = 0 with z = alpha^2 > 0
        let zs = cubic_real_roots(2.0 * p, p * p - 4.0 * r, -q * q);
        let z = zs.into_iter().fold(0.0_f64, f64::max);
        if z > 0.0 {
            let alpha = z.sqrt();
            let beta = 0.5 * (p + z - q / alpha);
            let gamma = 0.5 * (p + z + q / alpha);
            // (y^2 + alpha y + beta)(y^2 - alpha y + gamma)
            ys.extend(quadratic_real_roots(1.0, alpha, beta));
            ys.extend(quadratic_real_roots(1.0, -alpha, gamma));
        }
    }
    ys.into_iter().map(|y| y - shift).collect()
}

/// All real roots of the given polynomial that fall in [0, 1], sorted
/// ascending and deduplicated. Coefficients are ascending-degree
/// (`coeffs[k]` multiplies `x^k`) and the degree must be at most 4.
/// Each closed-form candidate is polished with Newton steps.
pub fn poly_roots_real_in_unit(coeffs: &[f64]) -> Result<Vec<f64>, NumericsError> {
    assert!(coeffs.len() <= 5, "degree must be at most 4");
    let max_c = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if coeffs.is_empty() || max_c == 0.0 || !max_c.is_finite() {
        return Err(NumericsError::ZeroPolynomial);
    }
    let c: Vec<f64> = coeffs.iter().map(|x| x / max_c).collect();
    let mut deg = c.len() - 1;
    while deg > 0 && c[deg].abs() <= 1e-13 {
        deg -= 1;
    }
    let c = &c[..=deg];

    let candidates = match deg {
        0 => Vec::new(),
        1 => vec![-c[0] / c[1]],
        2 => quadratic_real_roots(c[2], c[1], c[0]),
        3 => cubic_real_roots(c[2] / c[3], c[1] / c[3], c[0] / c[3]),
        _ => quartic_real_roots(c[3] / c[4], c[2] / c[4], c[1] / c[4], c[0] / c[4]),
    };

    let mut roots: Vec<f64> = Vec::new();
    for cand in candidates {
        if !cand.is_finite() {
            continue;
        }
        let mut x = cand;
        for _ in 0..3 {
            let fx = eval_poly(c, x);
            let dfx = eval_dpoly(c, x);
            if dfx.abs() < 1e-14 {
                break;
            }
            let step = fx / dfx;
            if !step.is_finite() {
                break;
            }
            x -= step;
        }
        if (-1e-9..=1.0 + 1e-9).contains(&x) {
            roots.push(x.clamp(0.0, 1.0));
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    Ok(roots)
}
