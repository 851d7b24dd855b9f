//! Small dense linear algebra: symmetric positive-definite matrices with a
//! Cholesky solve, and random orthogonal matrices for seeded problem
//! generation. Dimensions stay small (d <= a few hundred), so O(d^3) is fine.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        Matrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn matvec(&self, x: &Point) -> Point {
        assert_eq!(self.cols, x.dim());
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let mut s = 0.0;
            for j in 0..self.cols {
                s += self.get(i, j) * x[j];
            }
            out[i] = s;
        }
        Point::from(&out)
    }

    pub fn transpose_matvec(&self, x: &Point) -> Point {
        assert_eq!(self.rows, x.dim());
        let mut out = vec![0.0; self.cols];
        for j in 0..self.cols {
            let mut s = 0.0;
            for i in 0..self.rows {
                s += self.get(i, j) * x[i];
            }
            out[j] = s;
        }
        Point::from(&out)
    }

    /// self^T * self.
    pub fn gram(&self) -> Matrix {
        let mut g = Matrix::zeros(self.cols, self.cols);
        for a in 0..self.cols {
            for b in 0..self.cols {
                let mut s = 0.0;
                for i in 0..self.rows {
                    s += self.get(i, a) * self.get(i, b);
                }
                g.set(a, b, s);
            }
        }
        g
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let v = self.get(i, k);
                if v == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += v * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// self - s * I (square matrices).
    pub fn sub_scaled_identity(&self, s: f64) -> Matrix {
        assert_eq!(self.rows, self.cols);
        let mut out = self.clone();
        for i in 0..self.rows {
            let v = out.get(i, i);
            out.set(i, i, v - s);
        }
        out
    }
}

/// Symmetric positive-definite matrix with a cached Cholesky factor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpdMatrix {
    mat: Matrix,
    /// Lower-triangular Cholesky factor, row-major; None when the matrix is
    /// only positive semi-definite (solves then unavailable).
    chol: Option<Matrix>,
}

impl SpdMatrix {
    /// Wraps a symmetric matrix; the Cholesky factor is computed eagerly and
    /// recorded as absent if factorization hits a non-positive pivot.
    pub fn new(mat: Matrix) -> Result<Self> {
        if mat.rows() != mat.cols() {
            return Err(Error::ShapeMismatch("SPD matrix must be square".into()));
        }
        let n = mat.rows();
        for i in 0..n {
            for j in 0..i {
                if (mat.get(i, j) - mat.get(j, i)).abs() > 1e-9 * (1.0 + mat.get(i, j).abs()) {
                    return Err(Error::ShapeMismatch("matrix not symmetric".into()));
                }
            }
        }
        let chol = cholesky(&mat);
        Ok(SpdMatrix { mat, chol })
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn matvec(&self, x: &Point) -> Point {
        self.mat.matvec(x)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.chol.is_some()
    }

    pub fn is_zero(&self) -> bool {
        self.mat.data.iter().all(|v| *v == 0.0)
    }

    /// Solves self * x = b via the Cholesky factor.
    pub fn solve(&self, b: &Point) -> Result<Point> {
        let l = self
            .chol
            .as_ref()
            .ok_or_else(|| Error::OracleUnavailable("matrix is singular".into()))?;
        let n = self.dim();
        // forward: L y = b
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            for j in 0..i {
                s -= l.get(i, j) * y[j];
            }
            y[i] = s / l.get(i, i);
        }
        // backward: L^T x = y
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in (i + 1)..n {
                s -= l.get(j, i) * x[j];
            }
            x[i] = s / l.get(i, i);
        }
        Point::new(x)
    }

    pub fn quadratic_form(&self, x: &Point) -> f64 {
        x.dot(&self.matvec(x))
    }
}

fn cholesky(mat: &Matrix) -> Option<Matrix> {
    let n = mat.rows();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = mat.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l.set(i, j, s.sqrt());
            } else {
                l.set(i, j, s / l.get(j, j));
            }
        }
    }
    Some(l)
}

/// Random orthogonal matrix via Householder QR of a Gaussian matrix.
pub fn random_orthogonal(dim: usize, rng: &mut impl Rng) -> Matrix {
    let mut a = Matrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            // Box-Muller keeps us off extra distribution deps.
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            a.set(
                i,
                j,
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos(),
            );
        }
    }
    let (q, r) = qr(&a);
    // Sign-fix so the distribution is Haar-like and deterministic given rng.
    let mut q = q;
    for j in 0..dim {
        if r.get(j, j) < 0.0 {
            for i in 0..dim {
                let v = q.get(i, j);
                q.set(i, j, -v);
            }
        }
    }
    q
}

fn qr(a: &Matrix) -> (Matrix, Matrix) {
    let n = a.rows();
    let mut q = Matrix::identity(n);
    let mut r = a.clone();
    for k in 0..n {
        // Householder vector for column k.
        let mut norm = 0.0;
        for i in k..n {
            norm += r.get(i, k) * r.get(i, k);
        }
        let norm = norm.sqrt();
        if norm < 1e-300 {
            continue;
        }
        let alpha = if r.get(k, k) >= 0.0 { -norm } else { norm };
        let mut v = vec![0.0; n];
        for i in k..n {
            v[i] = r.get(i, k);
        }
        v[k] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|x| x * x).sum();
        if vnorm_sq < 1e-300 {
            continue;
        }
        // r = (I - 2 v v^T / (v^T v)) r ; q = q (I - 2 v v^T / (v^T v))
        for j in 0..n {
            let mut s = 0.0;
            for i in k..n {
                s += v[i] * r.get(i, j);
            }
            let s = 2.0 * s / vnorm_sq;
            for i in k..n {
                let val = r.get(i, j) - s * v[i];
                r.set(i, j, val);
            }
        }
        for i in 0..n {
            let mut s = 0.0;
            for j in k..n {
                s += q.get(i, j) * v[j];
            }
            let s = 2.0 * s / vnorm_sq;
            for j in k..n {
                let val = q.get(i, j) - s * v[j];
                q.set(i, j, val);
            }
        }
    }
    (q, r)
}

/// SPD matrix with prescribed spectrum: Q^T diag(eigs) Q for random orthogonal Q.
pub fn spd_with_spectrum(eigs: &[f64], rng: &mut impl Rng) -> SpdMatrix {
    let n = eigs.len();
    let q = random_orthogonal(n, rng);
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += q.get(k, i) * eigs[k] * q.get(k, j);
            }
            m.set(i, j, s);
        }
    }
    // Symmetrize away rounding asymmetry.
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m.get(i, j) + m.get(j, i));
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    SpdMatrix::new(m).expect("constructed symmetric matrix")
}

/// Log-spaced eigenvalues in [lo, hi].
pub fn log_spaced_eigs(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            lo * (hi / lo).powf(t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cholesky_solve_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = spd_with_spectrum(&[1.0, 3.0, 10.0], &mut rng);
        let x = Point::from(&[0.3, -1.2, 2.0]);
        let b = a.matvec(&x);
        let x2 = a.solve(&b).unwrap();
        assert!(x.dist(&x2) < 1e-10);
    }

    #[test]
    fn orthogonal_has_unit_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = random_orthogonal(5, &mut rng);
        let g = q.gram();
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (g.get(i, j) - expect).abs() < 1e-10,
                    "gram({i},{j})={}",
                    g.get(i, j)
                );
            }
        }
    }

    #[test]
    fn spectrum_is_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let eigs = [0.5, 2.0, 8.0];
        let a = spd_with_spectrum(&eigs, &mut rng);
        // power iteration for the top eigenvalue
        let mut v = Point::from(&[1.0, 1.0, 1.0]);
        for _ in 0..500 {
            v = a.matvec(&v);
            v = v.scale(1.0 / v.norm());
        }
        let lam = v.dot(&a.matvec(&v));
        assert!((lam - 8.0).abs() < 1e-8);
    }

    #[test]
    fn semidefinite_matrix_reports_no_factor() {
        let m = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let spd = SpdMatrix::new(m).unwrap();
        assert!(!spd.is_positive_definite());
        assert!(spd.solve(&Point::from(&[1.0, 1.0])).is_err());
    }
}
