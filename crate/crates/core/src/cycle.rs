//! The degenerating length family on `C_n` and its involution symmetry.
//!
//! `l_t` puts length 1 on the edge `(n-1, n)` and `t` on every other edge.
//! As `t -> 0` the first nonzero eigenvalue grows like `t^-1` while all higher
//! eigenvalues grow like `t^-2`; since `Σ m0 = 2(1 + (n-1)t)` stays bounded,
//! the normalized first eigenvalue is unbounded on every cycle.
//!
//! The reflection `ι(i) = n-1-i` (`1 <= i <= n-2`), `ι(n-1) = n` preserves
//! `l_t`, so the Laplacian splits into blocks on the even and odd functions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{fit_loglog_slope, least_squares, LogLogFit};
use crate::graph::{Edge, Graph};
use crate::linalg::{self, dot, norm2, SymMatrix, DEFAULT_TOL};
use crate::spectral::assemble_laplacian;
use crate::weights::{fujiwara_weights, LengthFunction};

/// Accepted range for the fitted `λ1` exponent.
pub const LAMBDA1_SLOPE_RANGE: (f64, f64) = (-1.05, -0.95);
/// Accepted range for the fitted `λ2` exponent.
pub const LAMBDA2_SLOPE_RANGE: (f64, f64) = (-2.1, -1.9);
/// Relative tolerance on `λ1 · t` against `2 / (n - 1)` at the smallest `t`.
pub const LIMIT_REL_TOL: f64 = 0.05;

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("t must be positive and finite, got {t}")))
    }
}

/// `l_t` on `C_n`: `t` everywhere except length 1 on edge `(n-1, n)`.
pub fn cycle_lt(n: usize, t: f64) -> Result<LengthFunction> {
    let g = Graph::cycle(n)?;
    check_t(t)?;
    let long = Edge::new(n - 1, n);
    Ok(g.edges().iter().map(|&e| (e, if e == long { 1.0 } else { t })).collect())
}

/// Images `ι(1), ..., ι(n)` of the reflection preserving `l_t`.
pub fn involution(n: usize) -> Result<Vec<usize>> {
    if n < 3 {
        return Err(Error::CycleTooSmall(n));
    }
    Ok((1..=n)
        .map(|i| match i {
            i if i <= n - 2 => n - 1 - i,
            i if i == n - 1 => n,
            _ => n - 1,
        })
        .collect())
}

/// Laplacian restricted to the `±1` eigenspaces of an involution.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetrySplit {
    pub involution: Vec<usize>,
    pub plus_block: SymMatrix,
    pub minus_block: SymMatrix,
    /// Orthonormal basis of the even subspace, in matrix coordinates.
    pub basis_plus: Vec<Vec<f64>>,
    /// Orthonormal basis of the odd subspace, in matrix coordinates.
    pub basis_minus: Vec<Vec<f64>>,
}

fn validate_involution(g: &Graph, l: &LengthFunction, iota: &[usize]) -> Result<()> {
    let n = g.n();
    if iota.len() != n {
        return Err(Error::InvalidInvolution(format!("expected {n} images, got {}", iota.len())));
    }
    if let Some(&bad) = iota.iter().find(|&&x| x == 0 || x > n) {
        return Err(Error::InvalidInvolution(format!("image {bad} out of range")));
    }
    for i in 1..=n {
        if iota[iota[i - 1] - 1] != i {
            return Err(Error::InvalidInvolution(format!("ι(ι({i})) != {i}")));
        }
    }
    for e in g.edges() {
        let (a, b) = (iota[e.u - 1], iota[e.v - 1]);
        if !g.has_edge(a, b) {
            return Err(Error::InvalidInvolution(format!("edge {e} maps to non-edge ({a}, {b})")));
        }
        let image = Edge::new(a, b);
        let (la, lb) = (l.get(e).ok_or(Error::MissingLength(*e))?, l.get(&image).ok_or(Error::MissingLength(image))?);
        if (la - lb).abs() > 1e-12 * la.abs().max(lb.abs()) {
            return Err(Error::InvalidInvolution(format!("length of {e} is {la} but of {image} is {lb}")));
        }
    }
    Ok(())
}

/// Block-diagonalize the Laplacian along the `±1` eigenspaces of `iota`.
///
/// Basis vectors are `(e_i ± e_ι(i)) / sqrt(2)` for `i < ι(i)` and `e_i` for
/// fixed points (even block only), ordered by `i`. In vertex-function terms
/// these are the normalized `δ_i / sqrt(m0(i)) ± δ_ι(i) / sqrt(m0(ι(i)))`.
pub fn symmetry_split(g: &Graph, l: &LengthFunction, iota: &[usize]) -> Result<SymmetrySplit> {
    validate_involution(g, l, iota)?;
    let n = g.n();
    let lap = assemble_laplacian(g, l)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis_plus = Vec::new();
    let mut basis_minus = Vec::new();
    for i in 1..=n {
        let j = iota[i - 1];
        if i == j {
            let mut b = vec![0.0; n];
            b[i - 1] = 1.0;
            basis_plus.push(b);
        } else if i < j {
            let mut p = vec![0.0; n];
            let mut m = vec![0.0; n];
            p[i - 1] = h;
            p[j - 1] = h;
            m[i - 1] = h;
            m[j - 1] = -h;
            basis_plus.push(p);
            basis_minus.push(m);
        }
    }
    Ok(SymmetrySplit {
        involution: iota.to_vec(),
        plus_block: lap.project(&basis_plus),
        minus_block: lap.project(&basis_minus),
        basis_plus,
        basis_minus,
    })
}

/// The involution acting on matrix coordinates `x = D^{1/2} φ`.
pub fn involution_operator(g: &Graph, l: &LengthFunction, iota: &[usize]) -> Result<SymMatrix> {
    validate_involution(g, l, iota)?;
    let m0 = fujiwara_weights(g, l)?.m0;
    let mut p = SymMatrix::zeros(g.n());
    for u in 1..=g.n() {
        let w = iota[u - 1];
        p.set(u - 1, w - 1, (m0[u - 1] / m0[w - 1]).sqrt());
    }
    Ok(p)
}

/// Largest absolute entry of `P L - L P`, with `P` from [`involution_operator`].
pub fn commutator_max(g: &Graph, l: &LengthFunction, iota: &[usize]) -> Result<f64> {
    let p = involution_operator(g, l, iota)?.to_rows();
    let lap = assemble_laplacian(g, l)?.to_rows();
    let n = g.n();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let pl: f64 = (0..n).map(|k| p[i][k] * lap[k][j]).sum();
            let lp: f64 = (0..n).map(|k| lap[i][k] * p[k][j]).sum();
            worst = worst.max((pl - lp).abs());
        }
    }
    Ok(worst)
}

/// Max difference between two spectra compared as sorted multisets.
pub fn multiset_distance(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Some(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

fn check_even(n: usize) -> Result<()> {
    if n >= 4 && n.is_multiple_of(2) {
        Ok(())
    } else {
        Err(Error::OddCycle(n))
    }
}

/// Closed-form even and odd blocks of the `l_t` Laplacian for even `n`.
///
/// Both are tridiagonal of order `n/2` in their first `n/2 - 1` rows, with
/// diagonal `1/t²` (last tridiagonal entry `1/t² ∓ 1/(2t²)`), off-diagonal
/// `-1/(2t²)`, a corner coupling `∓ 1/(t sqrt(2t) sqrt(1+t))` between the
/// first and last rows, and last diagonal entry `1/t ∓ 1/(1+t)`.
pub fn explicit_pm_blocks(n: usize, t: f64) -> Result<(SymMatrix, SymMatrix)> {
    check_even(n)?;
    check_t(t)?;
    let k = n / 2 - 1;
    let inv2 = 1.0 / (t * t);
    let corner = 1.0 / (t * (2.0 * t).sqrt() * (1.0 + t).sqrt());
    let block = |sign: f64| {
        let mut m = SymMatrix::zeros(k + 1);
        for i in 0..k {
            m.set(i, i, inv2);
            if i + 1 < k {
                m.set(i + 1, i, -0.5 * inv2);
            }
        }
        m.add(k - 1, k - 1, -sign * 0.5 * inv2);
        m.set(k, 0, -sign * corner);
        m.set(k, k, 1.0 / t - sign / (1.0 + t));
        m
    };
    Ok((block(1.0), block(-1.0)))
}

/// Test vectors for the two blocks (length `n/2` each).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProofVectors {
    /// Approximate lowest eigenvector of the odd block.
    pub v1: Vec<f64>,
    /// Kernel vector of the even block.
    pub v0: Vec<f64>,
    /// Even-block vector orthogonal to `v0`.
    pub w: Vec<f64>,
}

pub fn proof_vectors(n: usize, t: f64) -> Result<ProofVectors> {
    check_even(n)?;
    check_t(t)?;
    let k = n / 2 - 1;
    let s = (2.0 * t).sqrt();
    let r = (1.0 + t).sqrt();
    let nf = n as f64;
    let mut v1: Vec<f64> = (1..=k).map(|i| (nf - 1.0 - 2.0 * i as f64) * s / (nf - 1.0)).collect();
    v1.push(-1.0);
    let mut v0 = vec![s; k];
    v0.push(r);
    let mut w = vec![2.0 * r; k];
    w.push(-(nf - 2.0) * s);
    Ok(ProofVectors { v1, v0, w })
}

/// `||e||` where the lowest unit eigenvector of the odd block is
/// `± v1/||v1|| + e`, sign chosen to minimize `||e||`.
pub fn v1_deviation(n: usize, t: f64) -> Result<f64> {
    let (_, minus) = explicit_pm_blocks(n, t)?;
    let v1 = proof_vectors(n, t)?.v1;
    let spec = linalg::symmetric_eigen(&minus, DEFAULT_TOL)?;
    let x = &spec.eigenvectors[0];
    let nv = norm2(&v1);
    let sign = dot(x, &v1).signum();
    Ok(norm2(&x.iter().zip(&v1).map(|(a, b)| sign * a - b / nv).collect::<Vec<_>>()))
}

/// The `t^-2` coefficient matrices of the two Rayleigh-quotient expansions.
///
/// `A` (order `n/2 - 1`) is the path Laplacian scaled by 1/2 plus
/// `e_1 e_1^T / 2 + e_k e_k^T`; it is positive definite. `B` (order `n/2`)
/// is the form `2x² + 2x u_1 + Σ (u_i² - u_i u_{i+1}) + u_k² / 2` and is
/// positive semidefinite with a one-dimensional kernel.
pub fn coefficient_matrices(n: usize) -> Result<(SymMatrix, SymMatrix)> {
    check_even(n)?;
    let k = n / 2 - 1;

    let mut a = SymMatrix::zeros(k);
    for i in 0..k.saturating_sub(1) {
        a.add(i, i, 0.5);
        a.add(i + 1, i + 1, 0.5);
        a.set(i + 1, i, -0.5);
    }
    a.add(0, 0, 0.5);
    a.add(k - 1, k - 1, 1.0);

    let mut b = SymMatrix::zeros(k + 1);
    b.set(0, 0, 2.0);
    b.set(1, 0, 1.0);
    for i in 1..=k {
        b.set(i, i, if i < k { 1.0 } else { 0.5 });
        if i < k {
            b.set(i + 1, i, -0.5);
        }
    }
    Ok((a, b))
}

/// One sample of the sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub t: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda_max: f64,
    pub lambda1_t: f64,
    pub total_m0: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepConfig {
    /// Largest-`t` samples left out of the fits (pre-asymptotic regime).
    pub drop_largest: usize,
    pub tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { drop_largest: 2, tol: DEFAULT_TOL }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub n: usize,
    pub t_grid: Vec<f64>,
    pub records: Vec<SweepRecord>,
    /// `(t, reason)` for samples whose eigensolve failed.
    pub skipped: Vec<(f64, String)>,
    pub dropped_for_fit: usize,
    pub lambda1_fit: LogLogFit,
    pub lambda2_fit: LogLogFit,
    /// `lim λ1·t` extrapolated by a linear fit of `λ1·t` against `t`.
    pub limit_estimate: f64,
    /// The predicted limit `2 / (n - 1)`.
    pub limit_target: f64,
    pub lambda1_slope_ok: bool,
    pub lambda2_slope_ok: bool,
    /// `λ1·t` at the smallest `t` within `LIMIT_REL_TOL` of the target.
    pub limit_ok: bool,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.lambda1_slope_ok && self.lambda2_slope_ok && self.limit_ok
    }
}

/// `per_decade` geometric points per decade from `hi` down to `lo`, inclusive.
pub fn geometric_grid(hi: f64, lo: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let steps = (decades * per_decade as f64).round() as usize;
    (0..=steps).map(|i| hi * 10f64.powf(-(i as f64) / per_decade as f64)).collect()
}

/// Ten points per decade from `1e-1` down to `1e-6`.
pub fn default_t_grid() -> Vec<f64> {
    geometric_grid(1e-1, 1e-6, 10)
}

fn in_range(x: f64, (lo, hi): (f64, f64)) -> bool {
    (lo..=hi).contains(&x)
}

/// Spectra of `C_n` with `l_t` along a decreasing grid, with fitted exponents.
pub fn sweep_asymptotics(n: usize, t_grid: &[f64], config: &SweepConfig) -> Result<SweepReport> {
    let g = Graph::cycle(n)?;
    if t_grid.iter().any(|&t| !(t > 0.0 && t <= 0.1)) {
        return Err(Error::InvalidParameter("t grid must lie in (0, 0.1]".into()));
    }
    if t_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("t grid must be strictly decreasing".into()));
    }

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for &t in t_grid {
        let l = cycle_lt(n, t)?;
        let lap = assemble_laplacian(&g, &l)?;
        match linalg::symmetric_eigen(&lap, config.tol) {
            Ok(spec) => {
                let ev = &spec.eigenvalues;
                records.push(SweepRecord {
                    t,
                    lambda1: ev[1],
                    lambda2: ev[2],
                    lambda_max: spec.largest(),
                    lambda1_t: ev[1] * t,
                    total_m0: fujiwara_weights(&g, &l)?.total_m0,
                });
            }
            Err(e) => skipped.push((t, e.to_string())),
        }
    }

    let fitted = records.get(config.drop_largest..).unwrap_or(&[]);
    let lambda1_fit = fit_loglog_slope(&fitted.iter().map(|r| (r.t, r.lambda1)).collect::<Vec<_>>())?;
    let lambda2_fit = fit_loglog_slope(&fitted.iter().map(|r| (r.t, r.lambda2)).collect::<Vec<_>>())?;
    let (_, limit_estimate) = least_squares(&fitted.iter().map(|r| (r.t, r.lambda1_t)).collect::<Vec<_>>());
    let limit_target = 2.0 / (n as f64 - 1.0);
    let last = fitted.last().expect("fit succeeded on at least 3 records");

    Ok(SweepReport {
        n,
        t_grid: t_grid.to_vec(),
        lambda1_slope_ok: in_range(lambda1_fit.slope, LAMBDA1_SLOPE_RANGE),
        lambda2_slope_ok: in_range(lambda2_fit.slope, LAMBDA2_SLOPE_RANGE),
        limit_ok: (last.lambda1_t - limit_target).abs() <= LIMIT_REL_TOL * limit_target,
        records,
        skipped,
        dropped_for_fit: config.drop_largest,
        lambda1_fit,
        lambda2_fit,
        limit_estimate,
        limit_target,
    })
}
