//! Seeded random instances for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::weights::LengthFunction;

pub const LENGTH_RANGE: (f64, f64) = (0.1, 10.0);

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Log-uniform sample from `[lo, hi]`.
pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

/// Independent log-uniform lengths in `LENGTH_RANGE` for every edge of `g`.
pub fn random_lengths<R: Rng>(g: &Graph, rng: &mut R) -> LengthFunction {
    g.edges().iter().map(|&e| (e, log_uniform(rng, LENGTH_RANGE.0, LENGTH_RANGE.1))).collect()
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("edge probability must lie in (0, 1], got {p}")))
    }
}

fn sample_gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    let mut pairs = Vec::new();
    for u in 1..=n {
        for v in u + 1..=n {
            if rng.gen_bool(p) {
                pairs.push((u, v));
            }
        }
    }
    Graph::new(n, &pairs)
}

/// `G(n, p)` conditioned on being connected (rejection sampling).
pub fn random_connected_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 vertices, got {n}")));
    }
    check_probability(p)?;
    loop {
        let g = sample_gnp(n, p, rng)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
}

/// Connected `G(n, p)` that also contains a cycle.
pub fn random_cyclic_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    if n < 3 {
        return Err(Error::CycleTooSmall(n));
    }
    check_probability(p)?;
    loop {
        let g = random_connected_graph(n, p, rng)?;
        if !g.is_tree() {
            return Ok(g);
        }
    }
}

/// A random vertex-count in `lo..=hi`, a connected graph on it and lengths.
pub fn random_instance<R: Rng>(lo: usize, hi: usize, rng: &mut R) -> Result<(Graph, LengthFunction)> {
    let n = rng.gen_range(lo..=hi);
    let g = random_connected_graph(n, 0.5, rng)?;
    let l = random_lengths(&g, rng);
    Ok((g, l))
}
