//! Edge-length functions and the vertex/edge weights they induce.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

/// Positive length per edge, keyed by canonical edge.
///
/// Serializes as a list of `[u, v, length]` triples in edge order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LengthFunction {
    lengths: BTreeMap<Edge, f64>,
}

impl LengthFunction {
    pub fn new() -> Self {
        Self::default()
    }

    /// Same length on every edge of `g`.
    pub fn uniform(g: &Graph, length: f64) -> Self {
        g.edges().iter().map(|&e| (e, length)).collect()
    }

    /// Lengths aligned with `g.edges()`.
    pub fn from_values(g: &Graph, values: &[f64]) -> Result<Self> {
        if values.len() != g.edge_count() {
            return Err(Error::DimensionMismatch { expected: g.edge_count(), got: values.len() });
        }
        Ok(g.edges().iter().copied().zip(values.iter().copied()).collect())
    }

    pub fn insert(&mut self, e: Edge, length: f64) -> Option<f64> {
        self.lengths.insert(e, length)
    }

    pub fn remove(&mut self, e: &Edge) -> Option<f64> {
        self.lengths.remove(e)
    }

    pub fn get(&self, e: &Edge) -> Option<f64> {
        self.lengths.get(e).copied()
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Edge, f64)> + '_ {
        self.lengths.iter().map(|(e, l)| (*e, *l))
    }

    /// Sum of all edge lengths.
    pub fn total(&self) -> f64 {
        self.lengths.values().sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.iter().map(|(e, l)| (e, c * l)).collect()
    }

    /// Rescale so that `2 * sum(l) = 1`, i.e. the vertex weights sum to one.
    pub fn normalized(&self) -> Self {
        self.scaled(1.0 / (2.0 * self.total()))
    }

    /// Lengths in `g.edges()` order, validated for presence and positivity.
    pub fn values_for(&self, g: &Graph) -> Result<Vec<f64>> {
        g.edges()
            .iter()
            .map(|e| {
                let l = self.get(e).ok_or(Error::MissingLength(*e))?;
                if l > 0.0 && l.is_finite() {
                    Ok(l)
                } else {
                    Err(Error::NonPositiveLength { edge: *e, length: l })
                }
            })
            .collect()
    }
}

impl Serialize for LengthFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.lengths.iter().map(|(e, l)| (e.u, e.v, *l)))
    }
}

impl<'de> Deserialize<'de> for LengthFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let triples = Vec::<(usize, usize, f64)>::deserialize(d)?;
        let mut out = LengthFunction::new();
        for (u, v, l) in triples {
            if u == v {
                return Err(serde::de::Error::custom(format!("loop at vertex {u}")));
            }
            if out.insert(Edge::new(u, v), l).is_some() {
                return Err(serde::de::Error::custom(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(out)
    }
}

impl FromIterator<(Edge, f64)> for LengthFunction {
    fn from_iter<I: IntoIterator<Item = (Edge, f64)>>(iter: I) -> Self {
        Self { lengths: iter.into_iter().collect() }
    }
}

/// `l / (2 * sum(l))`.
pub fn normalize_lengths(l: &LengthFunction) -> LengthFunction {
    l.normalized()
}

/// Fujiwara weights: `m0(u)` is the sum of lengths at `u`, `m1(e) = 1 / l(e)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FujiwaraWeights {
    /// Indexed by `vertex - 1`.
    pub m0: Vec<f64>,
    /// Aligned with `Graph::edges()`.
    pub m1: Vec<f64>,
    pub total_m0: f64,
}

pub fn fujiwara_weights(g: &Graph, l: &LengthFunction) -> Result<FujiwaraWeights> {
    let lengths = l.values_for(g)?;
    let mut m0 = vec![0.0; g.n()];
    for (e, &len) in g.edges().iter().zip(&lengths) {
        m0[e.u - 1] += len;
        m0[e.v - 1] += len;
    }
    let m1 = lengths.iter().map(|len| 1.0 / len).collect();
    let total_m0 = m0.iter().sum();
    Ok(FujiwaraWeights { m0, m1, total_m0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn uniform_triangle() {
        let g = Graph::cycle(3).unwrap();
        let w = fujiwara_weights(&g, &LengthFunction::uniform(&g, 1.0 / 6.0)).unwrap();
        for m in &w.m0 {
            assert!(rel(*m, 1.0 / 3.0) < 1e-15);
        }
        for m in &w.m1 {
            assert!(rel(*m, 6.0) < 1e-15);
        }
        assert!(rel(w.total_m0, 1.0) < 1e-15);
    }

    #[test]
    fn path_weights() {
        let g = Graph::path(3).unwrap();
        let l = LengthFunction::from_values(&g, &[1.0, 2.0]).unwrap();
        let w = fujiwara_weights(&g, &l).unwrap();
        assert_eq!(w.m0, vec![1.0, 3.0, 2.0]);
        assert_eq!(w.m1, vec![1.0, 0.5]);
    }

    #[test]
    fn missing_and_nonpositive_lengths() {
        let g = Graph::path(3).unwrap();
        let mut l = LengthFunction::new();
        l.insert(Edge::new(1, 2), 1.0);
        assert_eq!(fujiwara_weights(&g, &l), Err(Error::MissingLength(Edge::new(2, 3))));
        l.insert(Edge::new(2, 3), 0.0);
        assert!(matches!(fujiwara_weights(&g, &l), Err(Error::NonPositiveLength { .. })));
        l.insert(Edge::new(2, 3), f64::NAN);
        assert!(matches!(fujiwara_weights(&g, &l), Err(Error::NonPositiveLength { .. })));
    }

    #[test]
    fn normalization_examples() {
        let g = Graph::cycle(3).unwrap();
        let l = LengthFunction::uniform(&g, 1.0).normalized();
        assert!(l.iter().all(|(_, x)| rel(x, 1.0 / 6.0) < 1e-15));

        let edge = Graph::path(2).unwrap();
        let l = LengthFunction::uniform(&edge, 5.0).normalized();
        assert_eq!(l.get(&Edge::new(1, 2)), Some(0.5));
    }

    #[test]
    fn normalization_is_idempotent() {
        let g = Graph::path(4).unwrap();
        let l = LengthFunction::from_values(&g, &[0.3, 7.0, 1.25]).unwrap();
        let once = normalize_lengths(&l);
        let twice = normalize_lengths(&once);
        for ((_, a), (_, b)) in once.iter().zip(twice.iter()) {
            assert!(rel(a, b) < 1e-15);
        }
        let w = fujiwara_weights(&g, &once).unwrap();
        assert!(rel(w.total_m0, 1.0) < 1e-14);
    }
}
