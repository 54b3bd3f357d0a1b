//! Complex 2×2 matrices and vectors, plus a pivoted dense solver.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `(sin x, cos x)` from a pure-Rust libm, so results do not depend on
/// whether the optimiser fuses the two calls into the platform `sincos`.
pub fn sin_cos(x: f64) -> (f64, f64) {
    libm::sincos(x)
}

/// `e^{ix}`, bit-reproducible across build profiles and platforms.
pub fn cis(x: f64) -> Complex64 {
    let (s, c) = sin_cos(x);
    Complex64::new(c, s)
}

/// Default absolute threshold on `|det|` below which a 2×2 matrix is treated as singular.
pub const DEFAULT_DET_TOL: f64 = 1e-300;

/// Largest system accepted by [`solve_dense`].
pub const DENSE_MAX_DIM: usize = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C2Matrix(pub [[Complex64; 2]; 2]);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C2Vector(pub [Complex64; 2]);

/// Returns `(I, Z, X, Y)`.
///
/// `Y` follows the real antisymmetric convention `[[0, -1], [1, 0]]`, not the
/// Hermitian Pauli-y.
pub fn pauli_basis() -> (C2Matrix, C2Matrix, C2Matrix, C2Matrix) {
    let i = C2Matrix::identity();
    let z = C2Matrix::real([[1.0, 0.0], [0.0, -1.0]]);
    let x = C2Matrix::real([[0.0, 1.0], [1.0, 0.0]]);
    let y = C2Matrix::real([[0.0, -1.0], [1.0, 0.0]]);
    (i, z, x, y)
}

/// Closes `M(Ω)` under the Caves-Schumaker conjugate: `M(Ω) + M†(−Ω)`.
///
/// `m_pos` and `m_neg` must be the same matrix-valued function evaluated at
/// `+Ω` and `−Ω`.
pub fn cc_close(m_pos: &C2Matrix, m_neg: &C2Matrix) -> C2Matrix {
    *m_pos + m_neg.dagger()
}

impl C2Matrix {
    pub const fn new(entries: [[Complex64; 2]; 2]) -> Self {
        C2Matrix(entries)
    }

    pub fn real(entries: [[f64; 2]; 2]) -> Self {
        C2Matrix([
            [Complex64::from(entries[0][0]), Complex64::from(entries[0][1])],
            [Complex64::from(entries[1][0]), Complex64::from(entries[1][1])],
        ])
    }

    pub const fn zero() -> Self {
        C2Matrix([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub const fn identity() -> Self {
        C2Matrix([[ONE, ZERO], [ZERO, ONE]])
    }

    pub const fn diag(a: Complex64, b: Complex64) -> Self {
        C2Matrix([[a, ZERO], [ZERO, b]])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = &self.0;
        C2Matrix([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::from(s))
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        C2Matrix([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn conj(&self) -> Self {
        let m = &self.0;
        C2Matrix([
            [m[0][0].conj(), m[0][1].conj()],
            [m[1][0].conj(), m[1][1].conj()],
        ])
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        self.transpose().conj()
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Adjugate, so that `a · adj(a) = det(a) · I`.
    pub fn adjugate(&self) -> Self {
        let m = &self.0;
        C2Matrix([[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]])
    }

    /// Closed-form inverse `adj(a) / det(a)`.
    pub fn inverse(&self) -> Result<Self> {
        self.inverse_with_tol(DEFAULT_DET_TOL)
    }

    pub fn inverse_with_tol(&self, det_tol: f64) -> Result<Self> {
        let det = self.det();
        if !(det.norm() > det_tol) {
            return Err(Error::SingularMatrix { det: det.norm() });
        }
        Ok(self.adjugate().scale(det.inv()))
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.is_finite())
    }

    pub fn column(&self, j: usize) -> C2Vector {
        C2Vector([self.0[0][j], self.0[1][j]])
    }

    /// Largest entrywise relative deviation of `self` from `reference`.
    ///
    /// Each entry is compared against the larger of the two magnitudes; entries
    /// that are both exactly zero contribute nothing.
    pub fn max_rel_diff(&self, reference: &C2Matrix) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let (a, b) = (self.0[r][c], reference.0[r][c]);
                let scale = a.norm().max(b.norm());
                if scale > 0.0 {
                    worst = worst.max((a - b).norm() / scale);
                }
            }
        }
        worst
    }

    /// Largest entrywise deviation divided by the largest entry of `reference`.
    pub fn max_scaled_diff(&self, reference: &C2Matrix) -> f64 {
        let scale = reference.max_abs();
        let diff = (*self - *reference).max_abs();
        if scale > 0.0 {
            diff / scale
        } else {
            diff
        }
    }
}

impl Default for C2Matrix {
    fn default() -> Self {
        C2Matrix::zero()
    }
}

impl Index<(usize, usize)> for C2Matrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.0[r][c]
    }
}

impl IndexMut<(usize, usize)> for C2Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.0[r][c]
    }
}

impl Add for C2Matrix {
    type Output = C2Matrix;
    fn add(self, rhs: C2Matrix) -> C2Matrix {
        let (a, b) = (&self.0, &rhs.0);
        C2Matrix([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl AddAssign for C2Matrix {
    fn add_assign(&mut self, rhs: C2Matrix) {
        *self = *self + rhs;
    }
}

impl Sub for C2Matrix {
    type Output = C2Matrix;
    fn sub(self, rhs: C2Matrix) -> C2Matrix {
        self + (-rhs)
    }
}

impl Neg for C2Matrix {
    type Output = C2Matrix;
    fn neg(self) -> C2Matrix {
        self.scale_re(-1.0)
    }
}

impl Mul for C2Matrix {
    type Output = C2Matrix;
    fn mul(self, rhs: C2Matrix) -> C2Matrix {
        let (a, b) = (&self.0, &rhs.0);
        C2Matrix([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Mul<C2Vector> for C2Matrix {
    type Output = C2Vector;
    fn mul(self, v: C2Vector) -> C2Vector {
        let m = &self.0;
        C2Vector([
            m[0][0] * v.0[0] + m[0][1] * v.0[1],
            m[1][0] * v.0[0] + m[1][1] * v.0[1],
        ])
    }
}

impl Mul<Complex64> for C2Matrix {
    type Output = C2Matrix;
    fn mul(self, s: Complex64) -> C2Matrix {
        self.scale(s)
    }
}

impl Mul<f64> for C2Matrix {
    type Output = C2Matrix;
    fn mul(self, s: f64) -> C2Matrix {
        self.scale_re(s)
    }
}

impl C2Vector {
    pub const fn new(a: Complex64, b: Complex64) -> Self {
        C2Vector([a, b])
    }

    pub const fn zero() -> Self {
        C2Vector([ZERO, ZERO])
    }

    pub fn conj(&self) -> Self {
        C2Vector([self.0[0].conj(), self.0[1].conj()])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        C2Vector([self.0[0] * s, self.0[1] * s])
    }

    /// `self† · other`.
    pub fn dot(&self, other: &C2Vector) -> Complex64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    pub fn max_abs(&self) -> f64 {
        self.0[0].norm().max(self.0[1].norm())
    }

    /// Quadratic form `v† M v`.
    pub fn quad_form(&self, m: &C2Matrix) -> Complex64 {
        self.dot(&(*m * *self))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.is_finite())
    }
}

impl Default for C2Vector {
    fn default() -> Self {
        C2Vector::zero()
    }
}

impl Index<usize> for C2Vector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl Add for C2Vector {
    type Output = C2Vector;
    fn add(self, rhs: C2Vector) -> C2Vector {
        C2Vector([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1]])
    }
}

impl Sub for C2Vector {
    type Output = C2Vector;
    fn sub(self, rhs: C2Vector) -> C2Vector {
        C2Vector([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1]])
    }
}

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("matrix is not square".into()));
        }
        Ok(DenseMatrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Writes a 2×2 block with its top-left corner at `(row, col)`.
    pub fn add_block(&mut self, row: usize, col: usize, block: &C2Matrix) {
        for r in 0..2 {
            for c in 0..2 {
                self[(row + r, col + c)] += block.0[r][c];
            }
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|r| {
                self.data[r * self.n..(r + 1) * self.n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.n + c]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.n + c]
    }
}

/// Solves `a · x = y` by Gaussian elimination with partial pivoting.
pub fn solve_dense(a: &DenseMatrix, y: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.dim();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {n}x{n} but right-hand side has {} entries",
            y.len()
        )));
    }
    if n > DENSE_MAX_DIM {
        return Err(Error::DimensionMismatch(format!(
            "dense solver limited to {DENSE_MAX_DIM} unknowns, got {n}"
        )));
    }

    let mut m = a.data.clone();
    let mut rhs = y.to_vec();
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);

    for k in 0..n {
        let (pivot_row, pivot_abs) = (k..n)
            .map(|r| (r, m[r * n + k].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pivot_abs > scale * f64::EPSILON * n as f64) || pivot_abs == 0.0 {
            return Err(Error::SingularMatrix { det: 0.0 });
        }
        if pivot_row != k {
            for c in 0..n {
                m.swap(k * n + c, pivot_row * n + c);
            }
            rhs.swap(k, pivot_row);
        }
        let inv_pivot = m[k * n + k].inv();
        for r in (k + 1)..n {
            let factor = m[r * n + k] * inv_pivot;
            if factor == ZERO {
                continue;
            }
            m[r * n + k] = ZERO;
            for c in (k + 1)..n {
                let upper = m[k * n + c];
                m[r * n + c] -= factor * upper;
            }
            let upper_rhs = rhs[k];
            rhs[r] -= factor * upper_rhs;
        }
    }

    let mut x = vec![ZERO; n];
    for k in (0..n).rev() {
        let tail: Complex64 = ((k + 1)..n).map(|c| m[k * n + c] * x[c]).sum();
        x[k] = (rhs[k] - tail) / m[k * n + k];
    }
    Ok(x)
}
