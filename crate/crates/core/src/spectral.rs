//! The Fujiwara Laplacian in operator and matrix form.
//!
//! For lengths `l` with weights `m0`, `m1` the operator acts on vertex
//! functions by
//!
//! ```text
//! (Δφ)(u) = Σ_{v~u} m1(uv) / m0(u) · (φ(u) - φ(v))
//! ```
//!
//! and is self-adjoint for `<φ, ψ> = Σ m0 φ ψ`. In the orthonormal basis
//! `δ_i / sqrt(m0(i))` it is represented by `L = D^{-1/2} L0 D^{-1/2}` with
//! `D = diag(m0)` and `L0` the `m1`-weighted combinatorial Laplacian. Vertex
//! functions `φ` and matrix coordinates `x` are related by `x = D^{1/2} φ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{self, SpectralResult, SymMatrix, DEFAULT_TOL};
use crate::weights::{fujiwara_weights, FujiwaraWeights, LengthFunction};

/// Relative gap below which the first nonzero eigenvalue counts as repeated.
pub const MULTIPLICITY_GAP: f64 = 1e-8;

/// `L0`: diagonal `Σ m1`, off-diagonal `-m1(ij)`. Rows sum to zero.
pub fn assemble_l0(g: &Graph, l: &LengthFunction) -> Result<SymMatrix> {
    let w = fujiwara_weights(g, l)?;
    let mut m = SymMatrix::zeros(g.n());
    for (e, &m1) in g.edges().iter().zip(&w.m1) {
        let (i, j) = (e.u - 1, e.v - 1);
        m.add(i, i, m1);
        m.add(j, j, m1);
        m.set(i, j, -m1);
    }
    Ok(m)
}

fn assemble_with_weights(g: &Graph, w: &FujiwaraWeights) -> SymMatrix {
    let mut m = SymMatrix::zeros(g.n());
    for (e, &m1) in g.edges().iter().zip(&w.m1) {
        let (i, j) = (e.u - 1, e.v - 1);
        m.add(i, i, m1 / w.m0[i]);
        m.add(j, j, m1 / w.m0[j]);
        m.set(i, j, -m1 / (w.m0[i] * w.m0[j]).sqrt());
    }
    m
}

/// Matrix `L = D^{-1/2} L0 D^{-1/2}` of the Fujiwara Laplacian.
pub fn assemble_laplacian(g: &Graph, l: &LengthFunction) -> Result<SymMatrix> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let w = fujiwara_weights(g, l)?;
    Ok(assemble_with_weights(g, &w))
}

/// `Δ_l φ` evaluated directly from the operator definition.
pub fn apply_laplacian(g: &Graph, l: &LengthFunction, phi: &[f64]) -> Result<Vec<f64>> {
    if phi.len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: phi.len() });
    }
    let w = fujiwara_weights(g, l)?;
    let mut out = vec![0.0; g.n()];
    for (e, &m1) in g.edges().iter().zip(&w.m1) {
        let (i, j) = (e.u - 1, e.v - 1);
        let diff = phi[i] - phi[j];
        out[i] += m1 / w.m0[i] * diff;
        out[j] -= m1 / w.m0[j] * diff;
    }
    Ok(out)
}

/// `x = D^{1/2} φ`.
pub fn to_matrix_coords(m0: &[f64], phi: &[f64]) -> Vec<f64> {
    phi.iter().zip(m0).map(|(p, m)| p * m.sqrt()).collect()
}

/// `φ = D^{-1/2} x`.
pub fn to_vertex_function(m0: &[f64], x: &[f64]) -> Vec<f64> {
    x.iter().zip(m0).map(|(p, m)| p / m.sqrt()).collect()
}

/// The zero mode `x0 = (sqrt(m0(i)))_i` in matrix coordinates.
pub fn zero_mode(m0: &[f64]) -> Vec<f64> {
    m0.iter().map(|m| m.sqrt()).collect()
}

/// Full spectrum of the Laplacian matrix, ascending.
pub fn laplacian_spectrum(g: &Graph, l: &LengthFunction, tol: f64) -> Result<SpectralResult> {
    linalg::symmetric_eigen(&assemble_laplacian(g, l)?, tol)
}

/// The first nonzero eigenvalue together with its eigenfunction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstEigen {
    pub value: f64,
    /// Vertex function with `Σ m0 φ² = 1`.
    pub eigenfunction: Vec<f64>,
    /// The next eigenvalue up (`+inf` on two-vertex graphs).
    pub next: f64,
    /// `next - value < MULTIPLICITY_GAP * value`.
    pub degenerate: bool,
}

pub fn first_eigen(g: &Graph, l: &LengthFunction) -> Result<FirstEigen> {
    let w = fujiwara_weights(g, l)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.n() < 2 {
        return Err(Error::InvalidParameter("first nonzero eigenvalue needs at least two vertices".into()));
    }
    let spec = linalg::symmetric_eigen(&assemble_with_weights(g, &w), DEFAULT_TOL)?;
    let value = spec.eigenvalues[1];
    let next = spec.eigenvalues.get(2).copied().unwrap_or(f64::INFINITY);
    Ok(FirstEigen {
        value,
        eigenfunction: to_vertex_function(&w.m0, &spec.eigenvectors[1]),
        next,
        degenerate: next - value < MULTIPLICITY_GAP * value,
    })
}

/// Second-smallest eigenvalue `λ1(G, l)`.
pub fn lambda1(g: &Graph, l: &LengthFunction) -> Result<f64> {
    Ok(first_eigen(g, l)?.value)
}

/// Scale-invariant value `λ1(G, l) · (Σ m0)²`.
pub fn lambda1_normalized(g: &Graph, l: &LengthFunction) -> Result<f64> {
    let total = fujiwara_weights(g, l)?.total_m0;
    Ok(lambda1(g, l)? * total * total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rayleigh {
    pub value: f64,
    /// `Σ m0 φ`; zero when `φ` is orthogonal to constants.
    pub weighted_sum: f64,
    /// `Σ m0 |φ|`, the scale against which `weighted_sum` is judged.
    pub weighted_abs_sum: f64,
}

impl Rayleigh {
    pub fn is_orthogonal(&self, tol: f64) -> bool {
        self.weighted_sum.abs() <= tol * self.weighted_abs_sum
    }
}

/// `Σ m1(uv)(φ(u) - φ(v))² / Σ m0(u) φ(u)²`.
pub fn rayleigh_quotient(g: &Graph, l: &LengthFunction, phi: &[f64]) -> Result<Rayleigh> {
    if phi.len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: phi.len() });
    }
    let w = fujiwara_weights(g, l)?;
    rayleigh_with_weights(g, &w, phi)
}

pub(crate) fn rayleigh_with_weights(g: &Graph, w: &FujiwaraWeights, phi: &[f64]) -> Result<Rayleigh> {
    let num: f64 = g.edges().iter().zip(&w.m1).map(|(e, m1)| m1 * (phi[e.u - 1] - phi[e.v - 1]).powi(2)).sum();
    let den: f64 = phi.iter().zip(&w.m0).map(|(p, m)| m * p * p).sum();
    if den == 0.0 {
        return Err(Error::ZeroFunction);
    }
    Ok(Rayleigh {
        value: num / den,
        weighted_sum: phi.iter().zip(&w.m0).map(|(p, m)| m * p).sum(),
        weighted_abs_sum: phi.iter().zip(&w.m0).map(|(p, m)| m * p.abs()).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::linalg::norm2;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1.0)
    }

    #[test]
    fn uniform_triangle_matrix() {
        let g = Graph::cycle(3).unwrap();
        let m = assemble_laplacian(&g, &LengthFunction::uniform(&g, 1.0 / 6.0)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 36.0 } else { -18.0 };
                assert!(close(m.get(i, j), expect, 1e-14), "({i},{j}) = {}", m.get(i, j));
            }
        }
    }

    #[test]
    fn single_edge_matrix() {
        let g = Graph::path(2).unwrap();
        let m = assemble_laplacian(&g, &LengthFunction::uniform(&g, 0.5)).unwrap();
        assert_eq!(m.to_rows(), vec![vec![4.0, -4.0], vec![-4.0, 4.0]]);
        assert!(close(lambda1(&g, &LengthFunction::uniform(&g, 0.5)).unwrap(), 8.0, 1e-14));
    }

    #[test]
    fn l0_rows_sum_to_zero() {
        let g = crate::graph::named::bowtie();
        let l = LengthFunction::from_values(&g, &[0.3, 1.7, 2.0, 0.11, 5.0, 0.9]).unwrap();
        let l0 = assemble_l0(&g, &l).unwrap();
        for i in 0..g.n() {
            let s: f64 = (0..g.n()).map(|j| l0.get(i, j)).sum();
            assert!(s.abs() <= 1e-15 * l0.frobenius_norm(), "row {i}: {s}");
        }
    }

    #[test]
    fn operator_examples() {
        let g = Graph::cycle(3).unwrap();
        let l = LengthFunction::uniform(&g, 1.0 / 6.0);
        let out = apply_laplacian(&g, &l, &[1.0, -1.0, 0.0]).unwrap();
        for (a, b) in out.iter().zip([54.0, -54.0, 0.0]) {
            assert!(close(*a, b, 1e-13));
        }
        let out = apply_laplacian(&g, &l, &[2.5, 2.5, 2.5]).unwrap();
        assert!(out.iter().all(|x| x.abs() < 1e-12));

        let p3 = Graph::path(3).unwrap();
        let l = LengthFunction::uniform(&p3, 0.25);
        let out = apply_laplacian(&p3, &l, &[1.0, -1.0, 1.0]).unwrap();
        for (a, b) in out.iter().zip([32.0, -32.0, 32.0]) {
            assert!(close(*a, b, 1e-14));
        }
        assert!(matches!(apply_laplacian(&p3, &l, &[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn lambda1_examples() {
        let c3 = Graph::cycle(3).unwrap();
        assert!(close(lambda1(&c3, &LengthFunction::uniform(&c3, 1.0 / 6.0)).unwrap(), 54.0, 1e-12));
        let p3 = Graph::path(3).unwrap();
        let spec = laplacian_spectrum(&p3, &LengthFunction::uniform(&p3, 0.25), DEFAULT_TOL).unwrap();
        for (a, b) in spec.eigenvalues.iter().zip([0.0, 16.0, 32.0]) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn normalized_examples() {
        let c3 = Graph::cycle(3).unwrap();
        assert!(close(lambda1_normalized(&c3, &LengthFunction::uniform(&c3, 1.0)).unwrap(), 54.0, 1e-12));
        let c4 = Graph::cycle(4).unwrap();
        let f = first_eigen(&c4, &LengthFunction::uniform(&c4, 1.0).normalized()).unwrap();
        assert!(close(f.value, 64.0, 1e-12));
        assert!(f.degenerate);
        assert!(close(lambda1_normalized(&c4, &LengthFunction::uniform(&c4, 1.0)).unwrap(), 64.0, 1e-12));
    }

    #[test]
    fn c4_spectrum() {
        let c4 = Graph::cycle(4).unwrap();
        let spec = laplacian_spectrum(&c4, &LengthFunction::uniform(&c4, 1.0 / 8.0), DEFAULT_TOL).unwrap();
        for (a, b) in spec.eigenvalues.iter().zip([0.0, 64.0, 64.0, 128.0]) {
            assert!((a - b).abs() < 1e-11, "{a} vs {b}");
        }
    }

    #[test]
    fn rayleigh_examples() {
        let c3 = Graph::cycle(3).unwrap();
        let l = LengthFunction::uniform(&c3, 1.0 / 6.0);
        let r = rayleigh_quotient(&c3, &l, &[1.0, -1.0, 0.0]).unwrap();
        assert!(close(r.value, 54.0, 1e-14));
        assert!(r.is_orthogonal(1e-14));

        let r = rayleigh_quotient(&c3, &l, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(!r.is_orthogonal(1e-12));

        assert_eq!(rayleigh_quotient(&c3, &l, &[0.0; 3]), Err(Error::ZeroFunction));
    }

    #[test]
    fn eigenfunction_attains_lambda1() {
        let g = crate::graph::named::paw();
        let l = LengthFunction::from_values(&g, &[0.2, 1.3, 0.7, 2.2]).unwrap();
        let f = first_eigen(&g, &l).unwrap();
        let r = rayleigh_quotient(&g, &l, &f.eigenfunction).unwrap();
        assert!(close(r.value, f.value, 1e-12));
        assert!(r.is_orthogonal(1e-10));
        let w = fujiwara_weights(&g, &l).unwrap();
        let norm: f64 = f.eigenfunction.iter().zip(&w.m0).map(|(p, m)| m * p * p).sum();
        assert!(close(norm, 1.0, 1e-12));
    }

    #[test]
    fn zero_mode_is_in_kernel() {
        let g = crate::graph::named::bowtie();
        let l = LengthFunction::from_values(&g, &[0.3, 1.7, 2.0, 0.11, 5.0, 0.9]).unwrap();
        let w = fujiwara_weights(&g, &l).unwrap();
        let m = assemble_laplacian(&g, &l).unwrap();
        assert!(norm2(&m.mul_vec(&zero_mode(&w.m0))) <= 1e-12 * m.frobenius_norm());
    }

    #[test]
    fn disconnected_is_rejected() {
        let g = Graph::new(4, &[(1, 2), (3, 4)]).unwrap();
        let l = LengthFunction::uniform(&g, 1.0);
        assert_eq!(assemble_laplacian(&g, &l), Err(Error::Disconnected));
        assert_eq!(lambda1(&g, &l), Err(Error::Disconnected));
    }

    #[test]
    fn missing_length_propagates() {
        let g = Graph::path(3).unwrap();
        let mut l = LengthFunction::new();
        l.insert(Edge::new(1, 2), 1.0);
        assert!(matches!(lambda1(&g, &l), Err(Error::MissingLength(_))));
    }
}
