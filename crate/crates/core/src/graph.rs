//! Simple undirected graphs with 1-indexed vertices.
//!
//! Edges are stored canonically (`u < v`) and sorted, so two graphs built
//! from the same edge set compare equal regardless of input order.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
}

impl Edge {
    /// Canonical edge between `a` and `b`. Panics on a loop.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "loop edge ({a}, {a})");
        Self { u: a.min(b), v: a.max(b) }
    }

    pub fn contains(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint that is not `x`.
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    // 0-indexed vertex -> sorted 1-indexed neighbours
    adj: Vec<Vec<usize>>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Graph", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("edges", &self.edges)?;
        st.end()
    }
}

impl Graph {
    /// Build a simple graph on vertices `1..=n`.
    ///
    /// Loops, repeated edges (in either orientation) and out-of-range labels
    /// are rejected. Disconnected graphs are accepted; see [`Graph::is_connected`].
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut edges = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            for x in [a, b] {
                if x == 0 || x > n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if a == b {
                return Err(Error::Loop(a));
            }
            edges.push(Edge::new(a, b));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0]));
        }
        Ok(Self::from_canonical(n, edges))
    }

    fn from_canonical(n: usize, edges: Vec<Edge>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            adj[e.u - 1].push(e.v);
            adj[e.v - 1].push(e.u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Self { n, edges, adj }
    }

    /// The cycle `C_n`: edges `(i, i+1)` for `1 <= i < n` and `(1, n)`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::CycleTooSmall(n));
        }
        let mut pairs: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        pairs.push((1, n));
        Self::new(n, &pairs)
    }

    /// The path `1 - 2 - ... - n`.
    pub fn path(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("path needs at least one vertex".into()));
        }
        let pairs: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        Self::new(n, &pairs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical, lexicographically sorted edge list.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v - 1]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v - 1].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.edges.binary_search(&Edge::new(a, b)).is_ok()
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        (1..=self.n).contains(&v)
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if self.contains_vertex(v) {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    /// Edges incident to `v`, in canonical order.
    pub fn incident_edges(&self, v: usize) -> Vec<Edge> {
        self.neighbors(v).iter().map(|&w| Edge::new(v, w)).collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.bfs(&[1]).iter().all(Option::is_some)
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edges.len() + 1 == self.n
    }

    /// Hop distances from the nearest of `sources`; `None` when unreachable.
    fn bfs(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s - 1].is_none() {
                dist[s - 1] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(x) = queue.pop_front() {
            let d = dist[x - 1].unwrap();
            for &y in self.neighbors(x) {
                if dist[y - 1].is_none() {
                    dist[y - 1] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Length of a shortest cycle, or `None` for a forest.
    pub fn girth(&self) -> Option<usize> {
        // shortest a-b path avoiding edge ab, over all edges
        let mut best: Option<usize> = None;
        for e in &self.edges {
            let mut dist = vec![usize::MAX; self.n];
            let mut queue = VecDeque::from([e.u]);
            dist[e.u - 1] = 0;
            while let Some(x) = queue.pop_front() {
                if x == e.v {
                    break;
                }
                for &y in self.neighbors(x) {
                    if (x == e.u && y == e.v) || dist[y - 1] != usize::MAX {
                        continue;
                    }
                    dist[y - 1] = dist[x - 1] + 1;
                    queue.push_back(y);
                }
            }
            if dist[e.v - 1] != usize::MAX {
                let len = dist[e.v - 1] + 1;
                best = Some(best.map_or(len, |b| b.min(len)));
            }
        }
        best
    }

    /// A shortest cycle as an ordered vertex sequence, or `None` for trees.
    ///
    /// Among all shortest cycles the one with the lexicographically smallest
    /// sorted vertex set is returned. The sequence starts at its smallest
    /// vertex and proceeds towards the smaller of that vertex's two cycle
    /// neighbours.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        let g = self.girth()?;
        for s in 1..=self.n {
            let mut search = CycleSearch::new(self, s, g);
            search.dfs(s);
            if let Some(mut cyc) = search.best_cycle {
                if cyc[1] > cyc[g - 1] {
                    cyc[1..].reverse();
                }
                return Some(cyc);
            }
        }
        unreachable!("girth {g} found but no cycle of that length")
    }

    /// Hop distance from each vertex to the nearest vertex of `cycle`,
    /// indexed by `vertex - 1`. Edge lengths are ignored.
    pub fn distance_to_cycle(&self, cycle: &[usize]) -> Result<Vec<Option<usize>>> {
        for &c in cycle {
            self.check_vertex(c)?;
        }
        Ok(self.bfs(cycle))
    }

    /// Relabel vertices: vertex `v` becomes `perm[v - 1]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: perm.len() });
        }
        let pairs: Vec<_> = self.edges.iter().map(|e| (perm[e.u - 1], perm[e.v - 1])).collect();
        Self::new(self.n, &pairs)
    }
}

/// Exhaustive search for shortest cycles whose minimum vertex is `start`.
struct CycleSearch<'a> {
    graph: &'a Graph,
    start: usize,
    girth: usize,
    // hop distance to `start` inside the subgraph on vertices >= start
    dist: Vec<usize>,
    path: Vec<usize>,
    on_path: Vec<bool>,
    best_key: Option<Vec<usize>>,
    best_cycle: Option<Vec<usize>>,
}

impl<'a> CycleSearch<'a> {
    fn new(graph: &'a Graph, start: usize, girth: usize) -> Self {
        let n = graph.n;
        let mut dist = vec![usize::MAX; n];
        dist[start - 1] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &y in graph.neighbors(x) {
                if y > start && dist[y - 1] == usize::MAX {
                    dist[y - 1] = dist[x - 1] + 1;
                    queue.push_back(y);
                }
            }
        }
        Self {
            graph,
            start,
            girth,
            dist,
            path: Vec::with_capacity(girth),
            on_path: vec![false; n],
            best_key: None,
            best_cycle: None,
        }
    }

    fn dfs(&mut self, x: usize) {
        self.path.push(x);
        self.on_path[x - 1] = true;
        let k = self.path.len();
        if k == self.girth {
            if self.graph.has_edge(x, self.start) {
                let mut key = self.path.clone();
                key.sort_unstable();
                if self.best_key.as_ref().is_none_or(|b| key < *b) {
                    self.best_key = Some(key);
                    self.best_cycle = Some(self.path.clone());
                }
            }
        } else {
            let remaining = self.girth - k;
            for &y in self.graph.neighbors(x) {
                if y > self.start && !self.on_path[y - 1] && self.dist[y - 1] <= remaining {
                    self.dfs(y);
                }
            }
        }
        self.path.pop();
        self.on_path[x - 1] = false;
    }
}

/// Convenience constructors for the small graphs used throughout the tests.
pub mod named {
    use super::Graph;

    /// Triangle 1-2-3 with pendant vertex 4 attached at 3.
    pub fn paw() -> Graph {
        Graph::new(4, &[(1, 2), (2, 3), (1, 3), (3, 4)]).unwrap()
    }

    /// Two triangles sharing vertex 3.
    pub fn bowtie() -> Graph {
        Graph::new(5, &[(1, 2), (2, 3), (1, 3), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    /// Triangle 1-2-3 with the tail 3-4-5.
    pub fn triangle_with_tail() -> Graph {
        Graph::new(5, &[(1, 2), (2, 3), (1, 3), (3, 4), (4, 5)]).unwrap()
    }

    /// `C_4` with pendant vertex 5 attached at 4.
    pub fn square_with_pendant() -> Graph {
        Graph::new(5, &[(1, 2), (2, 3), (3, 4), (1, 4), (4, 5)]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    fn pairs(g: &Graph) -> Vec<(usize, usize)> {
        g.edges().iter().map(|e| (e.u, e.v)).collect()
    }

    #[test]
    fn canonicalizes_triangle() {
        let g = Graph::new(3, &[(1, 2), (2, 3), (3, 1)]).unwrap();
        assert_eq!(pairs(&g), vec![(1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn rejects_loop_duplicate_and_range() {
        assert_eq!(Graph::new(2, &[(1, 1)]), Err(Error::Loop(1)));
        assert_eq!(Graph::new(4, &[(1, 2), (2, 1)]), Err(Error::DuplicateEdge(Edge::new(1, 2))));
        assert!(matches!(Graph::new(3, &[(1, 4)]), Err(Error::VertexOutOfRange { vertex: 4, n: 3 })));
        assert!(matches!(Graph::new(3, &[(0, 1)]), Err(Error::VertexOutOfRange { vertex: 0, .. })));
    }

    #[test]
    fn disconnected_graph_is_built_but_flagged() {
        let g = Graph::new(4, &[(1, 2), (3, 4)]).unwrap();
        assert!(!g.is_connected());
    }

    #[test]
    fn cycle_graphs() {
        assert_eq!(pairs(&Graph::cycle(3).unwrap()), vec![(1, 2), (1, 3), (2, 3)]);
        assert_eq!(pairs(&Graph::cycle(4).unwrap()), vec![(1, 2), (1, 4), (2, 3), (3, 4)]);
        assert_eq!(Graph::cycle(2), Err(Error::CycleTooSmall(2)));
    }

    #[test]
    fn find_cycle_examples() {
        assert_eq!(paw().find_cycle(), Some(vec![1, 2, 3]));
        assert_eq!(Graph::path(4).unwrap().find_cycle(), None);
        assert_eq!(Graph::cycle(6).unwrap().find_cycle(), Some(vec![1, 2, 3, 4, 5, 6]));
        assert_eq!(bowtie().find_cycle(), Some(vec![1, 2, 3]));
    }

    #[test]
    fn find_cycle_prefers_lexicographically_smallest_set() {
        // two 4-cycles {1,2,3,4} and {1,2,5,6} plus a long detour; girth 4
        let g = Graph::new(6, &[(1, 2), (2, 3), (3, 4), (1, 4), (2, 5), (5, 6), (1, 6)]).unwrap();
        assert_eq!(g.find_cycle(), Some(vec![1, 2, 3, 4]));
        // relabel so that the other square wins
        let g = Graph::new(6, &[(1, 2), (2, 5), (5, 6), (1, 6), (2, 3), (3, 4), (1, 4)]).unwrap();
        let c = g.find_cycle().unwrap();
        let mut set = c.clone();
        set.sort_unstable();
        assert_eq!(set, vec![1, 2, 3, 4]);
        assert_eq!(c[0], 1);
        assert!(c[1] < c[3]);
    }

    #[test]
    fn find_cycle_is_a_cycle_of_girth_length() {
        // Petersen graph, girth 5
        let outer: Vec<_> = (1..=5).map(|i| (i, i % 5 + 1)).collect();
        let spokes: Vec<_> = (1..=5).map(|i| (i, i + 5)).collect();
        let inner: Vec<_> = (0..5).map(|i| (6 + i, 6 + (i + 2) % 5)).collect();
        let all: Vec<_> = outer.into_iter().chain(spokes).chain(inner).collect();
        let g = Graph::new(10, &all).unwrap();
        assert_eq!(g.girth(), Some(5));
        let c = g.find_cycle().unwrap();
        assert_eq!(c, vec![1, 2, 3, 4, 5]);
        for i in 0..c.len() {
            assert!(g.has_edge(c[i], c[(i + 1) % c.len()]));
        }
    }

    #[test]
    fn distance_examples() {
        let d = paw().distance_to_cycle(&[1, 2, 3]).unwrap();
        assert_eq!(d, vec![Some(0), Some(0), Some(0), Some(1)]);
        let d = triangle_with_tail().distance_to_cycle(&[1, 2, 3]).unwrap();
        assert_eq!(d[4], Some(2));
        let c4 = Graph::cycle(4).unwrap();
        assert!(c4.distance_to_cycle(&[1, 2, 3, 4]).unwrap().iter().all(|d| *d == Some(0)));
        assert!(paw().distance_to_cycle(&[1, 9]).is_err());
    }

    #[test]
    fn trees_have_no_cycle() {
        let star = Graph::new(5, &[(1, 2), (1, 3), (1, 4), (1, 5)]).unwrap();
        assert!(star.is_tree());
        assert_eq!(star.find_cycle(), None);
        assert!(!paw().is_tree());
    }
}
