//! Pendant attachment and contraction, vertex cuts, and the checks that
//! relate the spectra before and after each operation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{fit_loglog_slope, LogLogFit};
use crate::graph::{Edge, Graph};
use crate::linalg::{self, SymMatrix, DEFAULT_TOL};
use crate::spectral::{assemble_laplacian, first_eigen, rayleigh_quotient, Rayleigh};
use crate::weights::{fujiwara_weights, LengthFunction};

/// Accepted range for the log-log slope of the divergent eigenvalue.
pub const LARGEST_SLOPE_RANGE: (f64, f64) = (-2.1, -1.9);
/// At the smallest `t`, `|λ̃_k - λ_k| <= FINITE_REL_TOL * (1 + λ_k)`.
pub const FINITE_REL_TOL: f64 = 1e-2;
/// Deviations below `NOISE_REL * (1 + λ_max)` count as converged to rounding.
pub const NOISE_REL: f64 = 1e-9;
/// Slack on the `sqrt(t)` decay ratio between consecutive grid points.
pub const DECAY_SLACK: f64 = 1.5;

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("pendant length must be positive and finite, got {t}")))
    }
}

/// Join a new vertex `n + 1` to `at` by an edge of length `t`.
pub fn attach_pendant(g: &Graph, l: &LengthFunction, at: usize, t: f64) -> Result<(Graph, LengthFunction)> {
    g.check_vertex(at)?;
    check_t(t)?;
    let n = g.n();
    let mut pairs: Vec<_> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    pairs.push((at, n + 1));
    let g2 = Graph::new(n + 1, &pairs)?;
    let mut l2 = l.clone();
    l2.insert(Edge::new(at, n + 1), t);
    Ok((g2, l2))
}

/// Result of removing a pendant vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contraction {
    pub graph: Graph,
    pub lengths: LengthFunction,
    /// `relabel[v - 1]` is the new label of old vertex `v` (`None` for the pendant).
    pub relabel: Vec<Option<usize>>,
}

pub fn contract_pendant(g: &Graph, l: &LengthFunction, pendant: usize) -> Result<Contraction> {
    g.check_vertex(pendant)?;
    let degree = g.degree(pendant);
    if degree != 1 {
        return Err(Error::NotPendant { vertex: pendant, degree });
    }
    let relabel: Vec<Option<usize>> = (1..=g.n())
        .map(|v| match v.cmp(&pendant) {
            std::cmp::Ordering::Less => Some(v),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(v - 1),
        })
        .collect();
    let map = |v: usize| relabel[v - 1].expect("pendant edge filtered out");
    let mut pairs = Vec::new();
    let mut lengths = LengthFunction::new();
    for e in g.edges().iter().filter(|e| !e.contains(pendant)) {
        let image = Edge::new(map(e.u), map(e.v));
        pairs.push((image.u, image.v));
        if let Some(x) = l.get(e) {
            lengths.insert(image, x);
        }
    }
    Ok(Contraction { graph: Graph::new(g.n() - 1, &pairs)?, lengths, relabel })
}

/// Deviations of the perturbed Laplacian from its truncated expansion.
///
/// The base vertex `at` is moved to label `n` first and the pendant is
/// `n + 1`, so `α = m0(n)` of the base graph. The two `remainder` fields
/// are the bracketed `1 - t/α` and `1 - t/(2α)` corrections with the
/// leading factors divided out; both are `O(t²)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub t: f64,
    pub alpha: f64,
    /// `|L̃_{n+1,n+1} - 1/t²|`.
    pub corner_deviation: f64,
    /// `(L̃_{nn} - L_{nn}) α t - (1 - t/α)`.
    pub diagonal_remainder: f64,
    /// `-L̃_{n,n+1} sqrt(α) t^{3/2} - (1 - t/(2α))`.
    pub coupling_remainder: f64,
    /// `|L̃_{n,n+1} + α^{-1/2} t^{-3/2} (1 - t/(2α))|`.
    pub coupling_deviation: f64,
    /// `max_{i<n} |L̃_{i,n} - L_{i,n}|`, which is `O(t)`.
    pub column_deviation: f64,
    /// `max_{i<n} |L̃_{i,n+1}|`, zero since only `n` touches the pendant.
    pub pendant_column_max: f64,
    /// `max_{i,j<n} |L̃_{ij} - L_{ij}|`, zero since those weights are unchanged.
    pub block_deviation: f64,
}

pub fn verify_perturbed_structure(g: &Graph, l: &LengthFunction, at: usize, t: f64) -> Result<StructureReport> {
    g.check_vertex(at)?;
    check_t(t)?;
    let n = g.n();
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.swap(at - 1, n - 1);
    let g = g.relabel(&perm)?;
    let l: LengthFunction = l.iter().map(|(e, x)| (Edge::new(perm[e.u - 1], perm[e.v - 1]), x)).collect();

    let base = assemble_laplacian(&g, &l)?;
    let (g2, l2) = attach_pendant(&g, &l, n, t)?;
    let pert = assemble_laplacian(&g2, &l2)?;
    let alpha = fujiwara_weights(&g, &l)?.m0[n - 1];

    let (a, b) = (n - 1, n);
    let lnn = pert.get(a, a);
    let lnp = pert.get(a, b);
    let mut column_deviation: f64 = 0.0;
    let mut pendant_column_max: f64 = 0.0;
    let mut block_deviation: f64 = 0.0;
    for i in 0..a {
        column_deviation = column_deviation.max((pert.get(i, a) - base.get(i, a)).abs());
        pendant_column_max = pendant_column_max.max(pert.get(i, b).abs());
        for j in 0..=i {
            block_deviation = block_deviation.max((pert.get(i, j) - base.get(i, j)).abs());
        }
    }
    Ok(StructureReport {
        t,
        alpha,
        corner_deviation: (pert.get(b, b) - 1.0 / (t * t)).abs(),
        diagonal_remainder: (lnn - base.get(a, a)) * alpha * t - (1.0 - t / alpha),
        coupling_remainder: -lnp * alpha.sqrt() * t.powf(1.5) - (1.0 - t / (2.0 * alpha)),
        coupling_deviation: (lnp + (1.0 - t / (2.0 * alpha)) / (alpha.sqrt() * t.powf(1.5))).abs(),
        column_deviation,
        pendant_column_max,
        block_deviation,
    })
}

/// The 2×2 block that carries the divergent eigenvalue, with its closed-form
/// eigenpairs (ascending; eigenvectors not normalized).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SBlock {
    pub matrix: SymMatrix,
    pub eigenvalues: [f64; 2],
    pub eigenvectors: [[f64; 2]; 2],
}

pub fn s_block(alpha: f64, t: f64) -> Result<SBlock> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    check_t(t)?;
    let mut m = SymMatrix::zeros(2);
    m.set(0, 0, 1.0 / (alpha * t));
    m.set(1, 0, -1.0 / (alpha.sqrt() * t.powf(1.5)));
    m.set(1, 1, 1.0 / (t * t));
    let r = (t / alpha).sqrt();
    Ok(SBlock { matrix: m, eigenvalues: [0.0, (alpha + t) / (alpha * t * t)], eigenvectors: [[1.0, r], [-r, 1.0]] })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    pub t: f64,
    /// `λ̃_1(t)`.
    pub lambda1: f64,
    /// `|λ̃_k(t) - λ_k|` for `k = 0..n`.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    /// The extra eigenvalue `λ̃_n(t)`, which diverges.
    pub largest: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub at: usize,
    /// Spectrum of the normalized base graph.
    pub base_spectrum: Vec<f64>,
    pub records: Vec<ConvergenceRecord>,
    pub skipped: Vec<(f64, String)>,
    /// `max_t max_deviation / sqrt(t)`.
    pub sqrt_constant: f64,
    pub largest_fit: Option<LogLogFit>,
    /// Every `|λ̃_k - λ_k| <= FINITE_REL_TOL (1 + λ_k)` at the smallest `t`.
    pub finite_ok: bool,
    /// Consecutive max deviations shrink at least like `sqrt(t)` (up to
    /// `DECAY_SLACK`) or are already below the rounding floor.
    pub decay_ok: bool,
    pub largest_slope_ok: bool,
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        self.finite_ok && self.decay_ok && self.largest_slope_ok
    }
}

/// Track the spectrum of `G` plus a pendant of length `t` at `at` against
/// the spectrum of `G`, with `l` normalized first and `t` left as given.
pub fn eigen_convergence_check(g: &Graph, l: &LengthFunction, at: usize, t_grid: &[f64]) -> Result<ConvergenceReport> {
    g.check_vertex(at)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("t grid must be non-empty and strictly decreasing".into()));
    }
    for &t in t_grid {
        check_t(t)?;
    }
    let l = l.normalized();
    let base_spectrum = linalg::eigenvalues(&assemble_laplacian(g, &l)?)?;
    let n = g.n();

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for &t in t_grid {
        let (g2, l2) = attach_pendant(g, &l, at, t)?;
        match linalg::eigenvalues(&assemble_laplacian(&g2, &l2)?) {
            Ok(ev) => {
                let deviations: Vec<f64> = (0..n).map(|k| (ev[k] - base_spectrum[k]).abs()).collect();
                records.push(ConvergenceRecord {
                    t,
                    lambda1: ev[1],
                    max_deviation: deviations.iter().copied().fold(0.0, f64::max),
                    deviations,
                    largest: ev[n],
                });
            }
            Err(e) => skipped.push((t, e.to_string())),
        }
    }

    let sqrt_constant = records.iter().map(|r| r.max_deviation / r.t.sqrt()).fold(0.0, f64::max);
    let largest_fit = fit_loglog_slope(&records.iter().map(|r| (r.t, r.largest)).collect::<Vec<_>>()).ok();
    let finite_ok = records
        .last()
        .is_some_and(|r| r.deviations.iter().zip(&base_spectrum).all(|(d, lam)| *d <= FINITE_REL_TOL * (1.0 + lam)));
    let floor = NOISE_REL * (1.0 + base_spectrum.last().copied().unwrap_or(0.0));
    let decay_ok = records.windows(2).all(|w| {
        let bound = w[0].max_deviation * (w[1].t / w[0].t).sqrt() * DECAY_SLACK;
        w[1].max_deviation <= bound.max(floor)
    });
    let largest_slope_ok =
        largest_fit.is_some_and(|f| (LARGEST_SLOPE_RANGE.0..=LARGEST_SLOPE_RANGE.1).contains(&f.slope));

    Ok(ConvergenceReport {
        at,
        base_spectrum,
        records,
        skipped,
        sqrt_constant,
        largest_fit,
        finite_ok,
        decay_ok,
        largest_slope_ok,
    })
}

fn check_cut(g: &Graph, at: usize, keep: Edge) -> Result<()> {
    g.check_vertex(at)?;
    let degree = g.degree(at);
    if degree < 2 {
        return Err(Error::DegreeTooSmall { vertex: at, degree });
    }
    if !keep.contains(at) || !g.has_edge(keep.u, keep.v) {
        return Err(Error::EdgeNotIncident { edge: keep, vertex: at });
    }
    Ok(())
}

/// Image of edge `e` of `g` in the cut graph: edges at `at` other than `keep`
/// move to the clone `n + 1`.
pub fn cut_edge_image(g: &Graph, at: usize, keep: Edge, e: Edge) -> Edge {
    if e.contains(at) && e != keep {
        Edge::new(e.other(at), g.n() + 1)
    } else {
        e
    }
}

/// Split `at` into `at` (keeping only `keep`) and a clone `n + 1` that takes
/// the remaining edges. Fails if the result is disconnected.
pub fn cut_at_vertex(g: &Graph, at: usize, keep: Edge) -> Result<Graph> {
    check_cut(g, at, keep)?;
    let pairs: Vec<_> = g
        .edges()
        .iter()
        .map(|&e| {
            let im = cut_edge_image(g, at, keep, e);
            (im.u, im.v)
        })
        .collect();
    let cut = Graph::new(g.n() + 1, &pairs)?;
    if !cut.is_connected() {
        return Err(Error::InvalidCut { vertex: at, keep });
    }
    Ok(cut)
}

/// [`cut_at_vertex`] with lengths carried along the edge bijection.
pub fn cut_with_lengths(g: &Graph, l: &LengthFunction, at: usize, keep: Edge) -> Result<(Graph, LengthFunction)> {
    let cut = cut_at_vertex(g, at, keep)?;
    let lengths = g
        .edges()
        .iter()
        .map(|&e| Ok((cut_edge_image(g, at, keep, e), l.get(&e).ok_or(Error::MissingLength(e))?)))
        .collect::<Result<LengthFunction>>()?;
    Ok((cut, lengths))
}

/// Extend a vertex function on `g` to the cut graph by `φ(clone) = φ(at)`.
pub fn extend_across_cut(g: &Graph, at: usize, phi: &[f64]) -> Result<Vec<f64>> {
    if phi.len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: phi.len() });
    }
    g.check_vertex(at)?;
    let mut out = phi.to_vec();
    out.push(phi[at - 1]);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutCheck {
    pub before: f64,
    pub after: f64,
    /// `after <= before + 1e-10 * before`.
    pub holds: bool,
}

pub fn cut_monotonicity_check(g: &Graph, l: &LengthFunction, at: usize, keep: Edge) -> Result<CutCheck> {
    let (cut, lc) = cut_with_lengths(g, l, at, keep)?;
    let before = first_eigen(g, l)?.value;
    let after = first_eigen(&cut, &lc)?.value;
    Ok(CutCheck { before, after, holds: after <= before + 1e-10 * before })
}

/// Rayleigh quotients of `φ` on `g` and of its extension on the cut graph.
pub fn extension_quotients(
    g: &Graph,
    l: &LengthFunction,
    at: usize,
    keep: Edge,
    phi: &[f64],
) -> Result<(Rayleigh, Rayleigh)> {
    let (cut, lc) = cut_with_lengths(g, l, at, keep)?;
    let on_g = rayleigh_quotient(g, l, phi)?;
    let on_cut = rayleigh_quotient(&cut, &lc, &extend_across_cut(g, at, phi)?)?;
    Ok((on_g, on_cut))
}

/// Residual of the numerical eigensolve of `s_block` against the closed form,
/// relative to the nonzero eigenvalue.
pub fn s_block_discrepancy(alpha: f64, t: f64) -> Result<f64> {
    let s = s_block(alpha, t)?;
    let ev = linalg::symmetric_eigen(&s.matrix, DEFAULT_TOL)?.eigenvalues;
    let big = s.eigenvalues[1];
    Ok(((ev[0] - s.eigenvalues[0]).abs()).max((ev[1] - big).abs()) / big)
}
