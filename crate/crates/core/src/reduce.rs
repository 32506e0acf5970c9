//! Reduce a graph with a cycle to one of its shortest cycles by repeatedly
//! cutting and contracting the vertex farthest from that cycle.
//!
//! Neither operation increases the supremum of the normalized first
//! eigenvalue, so the chain of steps bounds it below by that of the cycle.
//! Every step is annotated with numerical evidence on a random length
//! function: a cut must not raise `λ1`, and the spectrum of the graph with a
//! short pendant must converge to that of the contracted graph.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::random::{random_lengths, rng_from_seed};
use crate::surgery::{contract_pendant, cut_at_vertex, cut_monotonicity_check, eigen_convergence_check, CutCheck};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Cut,
    Contract,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractEvidence {
    /// Vertex of the contracted graph the pendant was attached to.
    pub attached_at: usize,
    pub t_grid: Vec<f64>,
    /// `max_k |λ̃_k(t) - λ_k|` per grid point.
    pub max_deviations: Vec<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepEvidence {
    Cut(CutCheck),
    Contract(ContractEvidence),
}

impl StepEvidence {
    pub fn passed(&self) -> bool {
        match self {
            StepEvidence::Cut(c) => c.holds,
            StepEvidence::Contract(c) => c.passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurgeryStep {
    pub kind: StepKind,
    /// Acted-on vertex, in the labels of the graph before the step.
    pub vertex: usize,
    /// Edge that stays on `vertex` (cuts only); the clone is `n + 1`.
    pub kept_edge: Option<Edge>,
    pub evidence: StepEvidence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionTrace {
    pub initial: Graph,
    /// The shortest cycle being kept, in the initial labels.
    pub cycle: Vec<usize>,
    pub steps: Vec<SurgeryStep>,
    pub final_graph: Graph,
    /// The kept cycle in the final labels.
    pub final_cycle: Vec<usize>,
}

impl ReductionTrace {
    pub fn all_checks_passed(&self) -> bool {
        self.steps.iter().all(|s| s.evidence.passed())
    }

    /// Apply the recorded steps to `initial` again.
    pub fn replay(&self) -> Result<Graph> {
        let mut g = self.initial.clone();
        for s in &self.steps {
            g = match s.kind {
                StepKind::Cut => {
                    let keep =
                        s.kept_edge.ok_or_else(|| Error::InvalidParameter("cut step without kept edge".into()))?;
                    cut_at_vertex(&g, s.vertex, keep)?
                }
                StepKind::Contract => {
                    let l = crate::weights::LengthFunction::uniform(&g, 1.0);
                    contract_pendant(&g, &l, s.vertex)?.graph
                }
            };
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReduceConfig {
    /// Seed for the random length functions used as step evidence.
    pub seed: u64,
    /// Pendant lengths for the contraction evidence.
    pub t_grid: Vec<f64>,
}

impl Default for ReduceConfig {
    fn default() -> Self {
        Self { seed: 0x5eed, t_grid: vec![1e-4, 1e-5, 1e-6] }
    }
}

/// Connected with every vertex of degree 2.
pub fn is_cycle_graph(g: &Graph) -> bool {
    g.n() >= 3 && g.is_connected() && (1..=g.n()).all(|v| g.degree(v) == 2)
}

/// Exact number of steps [`reduce_to_cycle`] takes on a connected graph with
/// `n` vertices, `m` edges and girth `girth`: `m - n` cuts, each adding a
/// vertex, and one contraction per vertex beyond the cycle.
pub fn reduction_step_count(n: usize, m: usize, girth: usize) -> usize {
    2 * (m - n) + (n - girth)
}

pub fn reduce_to_cycle(g: &Graph) -> Result<ReductionTrace> {
    reduce_to_cycle_with(g, &ReduceConfig::default())
}

pub fn reduce_to_cycle_with(g: &Graph, config: &ReduceConfig) -> Result<ReductionTrace> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let cycle = g.find_cycle().ok_or(Error::NoCycle)?;
    let mut rng = rng_from_seed(config.seed);
    let mut cur = g.clone();
    let mut cyc = cycle.clone();
    let mut steps = Vec::new();

    while cur.n() > cyc.len() {
        let dist = cur.distance_to_cycle(&cyc)?;
        let d = |v: usize| dist[v - 1].expect("connected graph");
        let u = (1..=cur.n()).max_by(|&a, &b| d(a).cmp(&d(b)).then(b.cmp(&a))).expect("non-empty graph");

        if cur.degree(u) >= 2 {
            let candidates: Vec<Edge> =
                cur.incident_edges(u).into_iter().filter(|e| d(e.other(u)) + 1 == d(u)).collect();
            let l = random_lengths(&cur, &mut rng);
            let mut done = None;
            for keep in candidates {
                match cut_monotonicity_check(&cur, &l, u, keep) {
                    Ok(check) => {
                        done = Some((cut_at_vertex(&cur, u, keep)?, keep, check));
                        break;
                    }
                    Err(Error::InvalidCut { .. }) => continue,
                    Err(e) => return Err(e),
                }
            }
            let (next, keep, check) = done.ok_or(Error::InvalidCut { vertex: u, keep: cur.incident_edges(u)[0] })?;
            steps.push(SurgeryStep {
                kind: StepKind::Cut,
                vertex: u,
                kept_edge: Some(keep),
                evidence: StepEvidence::Cut(check),
            });
            cur = next;
        }

        let l = random_lengths(&cur, &mut rng);
        let neighbour = cur.neighbors(u)[0];
        let contraction = contract_pendant(&cur, &l, u)?;
        let map = |v: usize| contraction.relabel[v - 1].expect("cycle vertices are never contracted");
        let attached_at = map(neighbour);
        let report = eigen_convergence_check(&contraction.graph, &contraction.lengths, attached_at, &config.t_grid)?;
        steps.push(SurgeryStep {
            kind: StepKind::Contract,
            vertex: u,
            kept_edge: None,
            evidence: StepEvidence::Contract(ContractEvidence {
                attached_at,
                t_grid: config.t_grid.clone(),
                max_deviations: report.records.iter().map(|r| r.max_deviation).collect(),
                passed: report.passed(),
            }),
        });
        cyc = cyc.iter().map(|&v| map(v)).collect();
        cur = contraction.graph;
    }

    if !is_cycle_graph(&cur) {
        return Err(Error::InvalidParameter("reduction did not end at a cycle".into()));
    }
    Ok(ReductionTrace { initial: g.clone(), cycle, steps, final_graph: cur, final_cycle: cyc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;
    use crate::random::random_cyclic_graph;

    fn kinds(t: &ReductionTrace) -> Vec<StepKind> {
        t.steps.iter().map(|s| s.kind).collect()
    }

    #[test]
    fn paw_contracts_once() {
        let t = reduce_to_cycle(&named::paw()).unwrap();
        assert_eq!(kinds(&t), vec![StepKind::Contract]);
        assert_eq!(t.steps[0].vertex, 4);
        assert_eq!(t.final_graph, Graph::cycle(3).unwrap());
        assert!(t.all_checks_passed());
    }

    #[test]
    fn tail_contracts_twice() {
        let t = reduce_to_cycle(&named::triangle_with_tail()).unwrap();
        assert_eq!(kinds(&t), vec![StepKind::Contract, StepKind::Contract]);
        assert_eq!(t.steps[0].vertex, 5);
        assert_eq!(t.steps[1].vertex, 4);
        assert!(t.all_checks_passed());
    }

    #[test]
    fn bowtie_cuts_then_contracts() {
        let t = reduce_to_cycle(&named::bowtie()).unwrap();
        assert_eq!(t.cycle, vec![1, 2, 3]);
        assert_eq!(kinds(&t), vec![StepKind::Cut, StepKind::Contract, StepKind::Contract, StepKind::Contract]);
        assert_eq!(t.steps[0].vertex, 4);
        assert_eq!(t.steps[0].kept_edge, Some(Edge::new(3, 4)));
        assert_eq!(t.final_graph, Graph::cycle(3).unwrap());
        assert_eq!(t.final_cycle, vec![1, 2, 3]);
        assert!(t.all_checks_passed());
        assert_eq!(t.replay().unwrap(), t.final_graph);
    }

    #[test]
    fn square_with_pendant() {
        let t = reduce_to_cycle(&named::square_with_pendant()).unwrap();
        assert_eq!(kinds(&t), vec![StepKind::Contract]);
        assert_eq!(t.final_graph, Graph::cycle(4).unwrap());
    }

    #[test]
    fn complete_graph_k4() {
        let k4 = Graph::new(4, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap();
        let t = reduce_to_cycle(&k4).unwrap();
        assert_eq!(t.steps.len(), reduction_step_count(4, 6, 3));
        assert_eq!(t.steps.len(), 5);
        assert!(is_cycle_graph(&t.final_graph));
        assert!(t.all_checks_passed());
    }

    #[test]
    fn trees_and_disconnected_graphs_are_rejected() {
        assert_eq!(reduce_to_cycle(&Graph::path(4).unwrap()).unwrap_err(), Error::NoCycle);
        let two = Graph::new(6, &[(1, 2), (2, 3), (1, 3), (4, 5)]).unwrap();
        assert_eq!(reduce_to_cycle(&two).unwrap_err(), Error::Disconnected);
    }

    #[test]
    fn random_graphs_reduce_to_their_girth_cycle() {
        let mut rng = rng_from_seed(17);
        for _ in 0..30 {
            let g = random_cyclic_graph(7, 0.4, &mut rng).unwrap();
            let t = reduce_to_cycle(&g).unwrap();
            let girth = g.girth().unwrap();
            assert_eq!(t.final_graph.n(), girth);
            assert!(is_cycle_graph(&t.final_graph));
            assert_eq!(t.steps.len(), reduction_step_count(g.n(), g.edge_count(), girth));
            assert_eq!(t.replay().unwrap(), t.final_graph);
            assert!(t.all_checks_passed(), "{g:?}");
            for w in t.final_cycle.windows(2) {
                assert!(t.final_graph.has_edge(w[0], w[1]));
            }
        }
    }
}
