//! Dense symmetric matrices and a cyclic Jacobi eigensolver.
//!
//! Matrix indices are 0-based. Only the lower triangle is stored, so every
//! `SymMatrix` is exactly symmetric.

use serde::Serialize;

use crate::error::{Error, Result};

/// Default relative tolerance for eigensolves.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Sweep cap for the Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymMatrix {
    order: usize,
    // packed lower triangle, row-major: (i, j) with j <= i at i*(i+1)/2 + j
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        Self { order, data: vec![0.0; order * (order + 1) / 2] }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Build from `f(i, j)` evaluated on the lower triangle only.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(order * (order + 1) / 2);
        for i in 0..order {
            for j in 0..=i {
                data.push(f(i, j));
            }
        }
        Self { order, data }
    }

    /// Build from full rows; the rows must be square and exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: r.len() });
            }
            for j in 0..i {
                if r[j] != rows[j][i] {
                    return Err(Error::InvalidParameter(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    #[inline]
    fn index(i: usize, j: usize) -> usize {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        i * (i + 1) / 2 + j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[Self::index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[Self::index(i, j)] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[Self::index(i, j)] += v;
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.order {
            for j in 0..=i {
                let x = self.get(i, j);
                s += if i == j { x * x } else { 2.0 * x * x };
            }
        }
        s.sqrt()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.order);
        (0..self.order).map(|i| (0..self.order).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }

    /// `x^T M x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mul_vec(x))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.order).map(|i| (0..self.order).map(|j| self.get(i, j)).collect()).collect()
    }

    /// `Q^T M Q` for the matrix `Q` whose columns are `basis`.
    pub fn project(&self, basis: &[Vec<f64>]) -> SymMatrix {
        let images: Vec<Vec<f64>> = basis.iter().map(|b| self.mul_vec(b)).collect();
        SymMatrix::from_fn(basis.len(), |i, j| dot(&basis[i], &images[j]))
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.order, other.order);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigen-decomposition of a symmetric matrix, ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` belongs to `eigenvalues[k]`; unit length, mutually orthogonal.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `max_k ||M v_k - lambda_k v_k||_2`.
    pub residual: f64,
}

impl SpectralResult {
    pub fn largest(&self) -> f64 {
        *self.eigenvalues.last().expect("empty spectrum")
    }
}

/// Full spectrum of `m` by cyclic Jacobi rotations.
///
/// Rotations are applied while an off-diagonal entry is large relative to
/// its two diagonal entries, which resolves small eigenvalues of graded
/// matrices to near full relative precision. The result is rejected when the
/// off-diagonal mass or the eigen-residual exceeds `tol * ||m||_F`.
pub fn symmetric_eigen(m: &SymMatrix, tol: f64) -> Result<SpectralResult> {
    let n = m.order();
    let norm = m.frobenius_norm();
    let mut a = m.to_rows();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();

    let off = |a: &[Vec<f64>]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..i {
                s += 2.0 * a[i][j] * a[i][j];
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p][p];
                let aqq = a[q][q];
                if apq.abs() <= f64::EPSILON * (app.abs() * aqq.abs()).sqrt() || apq.abs() < 1e-300 {
                    a[p][q] = 0.0;
                    a[q][p] = 0.0;
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let g = a[r][p];
                    let h = a[r][q];
                    let rp = g - s * (h + g * tau);
                    let rq = h + s * (g - h * tau);
                    a[r][p] = rp;
                    a[p][r] = rp;
                    a[r][q] = rq;
                    a[q][r] = rq;
                }
                for row in v.iter_mut() {
                    let g = row[p];
                    let h = row[q];
                    row[p] = g - s * (h + g * tau);
                    row[q] = h + s * (g - h * tau);
                }
            }
        }
        sweeps += 1;
        if !rotated {
            break;
        }
        if sweeps >= MAX_SWEEPS {
            let o = off(&a);
            if o > tol * norm {
                return Err(Error::NoConvergence { sweeps, off: o });
            }
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[k][k]).collect();
    let eigenvectors: Vec<Vec<f64>> = order.iter().map(|&k| v.iter().map(|row| row[k]).collect()).collect();

    let residual = eigenvalues
        .iter()
        .zip(&eigenvectors)
        .map(|(&lam, x)| {
            let mx = m.mul_vec(x);
            norm2(&mx.iter().zip(x).map(|(a, b)| a - lam * b).collect::<Vec<_>>())
        })
        .fold(0.0, f64::max);
    if residual > tol * norm.max(f64::MIN_POSITIVE) {
        return Err(Error::NoConvergence { sweeps, off: residual });
    }

    Ok(SpectralResult { eigenvalues, eigenvectors, residual })
}

/// Eigenvalues only, ascending.
pub fn eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    Ok(symmetric_eigen(m, DEFAULT_TOL)?.eigenvalues)
}
