//! Core graph representation and elementary set operations.
//!
//! Graphs are simple and undirected, with dense vertex ids `0..n`. Adjacency
//! lists are kept sorted so that every traversal in the crate is
//! deterministic. All types are immutable values after construction; deleting
//! vertices produces a fresh graph together with a [`VertexRemap`] describing
//! how ids moved.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {v} out of range (graph has {n} vertices)")]
    VertexOutOfRange { v: u32, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("edge {0}-{1} not present in graph")]
    MissingEdge(u32, u32),
    #[error("sets must be disjoint: vertex {0} is in both")]
    NotDisjoint(u32),
    #[error("{0}")]
    Invalid(String),
}

/// Simple undirected graph with sorted adjacency lists.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    edge_count: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={})", self.vertex_count(), self.edge_count)
    }
}

impl Graph {
    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], edge_count: 0 }
    }

    /// Builds a graph from an edge list. Duplicate edges are collapsed;
    /// self-loops are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut adj: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            for &w in &[u, v] {
                if w as usize >= n {
                    return Err(GraphError::VertexOutOfRange { v: w, n });
                }
            }
            adj[u as usize].insert(v);
            adj[v as usize].insert(u);
        }
        let adj: Vec<Vec<u32>> = adj.into_iter().map(|s| s.into_iter().collect()).collect();
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        Ok(Graph { adj, edge_count })
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        0..self.adj.len() as u32
    }

    /// Iterates over all edges as pairs `(u, v)` with `u < v`, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, nbrs)| {
            let u = u as u32;
            nbrs.iter().copied().filter(move |&v| u < v).map(move |v| (u, v))
        })
    }

    pub fn average_degree(&self) -> f64 {
        if self.adj.is_empty() {
            0.0
        } else {
            2.0 * self.edge_count as f64 / self.adj.len() as f64
        }
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn check_vertex(&self, v: u32) -> Result<(), GraphError> {
        if (v as usize) < self.adj.len() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { v, n: self.adj.len() })
        }
    }

    /// External neighborhood of `a`: vertices outside `a` with a neighbor in
    /// `a`, optionally intersected with `restrict_to`.
    pub fn external_neighborhood(
        &self,
        a: &VertexSet,
        restrict_to: Option<&VertexSet>,
    ) -> Result<VertexSet, GraphError> {
        a.check_against(self)?;
        if let Some(r) = restrict_to {
            r.check_against(self)?;
        }
        let mut out = BTreeSet::new();
        for v in a.iter() {
            for &w in self.neighbors(v) {
                if !a.contains(w) {
                    if let Some(r) = restrict_to {
                        if !r.contains(w) {
                            continue;
                        }
                    }
                    out.insert(w);
                }
            }
        }
        Ok(VertexSet::from_set(out))
    }

    /// All vertices at distance at most `radius` from `a` in the graph with
    /// `avoid` deleted. Contains `a` itself; `a` must be disjoint from `avoid`.
    pub fn ball(
        &self,
        a: &VertexSet,
        radius: usize,
        avoid: &VertexSet,
    ) -> Result<VertexSet, GraphError> {
        a.check_against(self)?;
        avoid.check_against(self)?;
        if let Some(v) = a.iter().find(|&v| avoid.contains(v)) {
            return Err(GraphError::NotDisjoint(v));
        }
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut frontier: Vec<u32> = a.iter().collect();
        for &v in &frontier {
            seen[v as usize] = true;
        }
        for _ in 0..radius {
            let mut next = Vec::new();
            for &v in &frontier {
                for &w in self.neighbors(v) {
                    if !seen[w as usize] && !avoid.contains(w) {
                        seen[w as usize] = true;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(VertexSet::from_iter(
            (0..n as u32).filter(|&v| seen[v as usize]),
        ))
    }

    /// Deletes the vertices in `a`, re-densifying ids. Returns the new graph
    /// and the id remapping.
    pub fn delete_vertices(&self, a: &VertexSet) -> Result<(Graph, VertexRemap), GraphError> {
        a.check_against(self)?;
        let n = self.vertex_count();
        let mut old_to_new = vec![None; n];
        let mut new_to_old = Vec::with_capacity(n - a.len());
        for v in 0..n as u32 {
            if !a.contains(v) {
                old_to_new[v as usize] = Some(new_to_old.len() as u32);
                new_to_old.push(v);
            }
        }
        let mut adj = vec![Vec::new(); new_to_old.len()];
        for (new_id, &old_id) in new_to_old.iter().enumerate() {
            adj[new_id] = self
                .neighbors(old_id)
                .iter()
                .filter_map(|&w| old_to_new[w as usize])
                .collect();
        }
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        Ok((
            Graph { adj, edge_count },
            VertexRemap { new_to_old, old_to_new },
        ))
    }

    /// Deletes the edges in `mask`, preserving vertex ids.
    pub fn delete_edges(&self, mask: &EdgeMask) -> Result<Graph, GraphError> {
        for &(u, v) in mask.iter() {
            self.check_vertex(u)?;
            self.check_vertex(v)?;
            if !self.has_edge(u, v) {
                return Err(GraphError::MissingEdge(u, v));
            }
        }
        let mut adj = self.adj.clone();
        for &(u, v) in mask.iter() {
            adj[u as usize].retain(|&w| w != v);
            adj[v as usize].retain(|&w| w != u);
        }
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        Ok(Graph { adj, edge_count })
    }

    /// Induced subgraph on `keep`, returned with its remap into `self`.
    pub fn induced(&self, keep: &VertexSet) -> Result<(Graph, VertexRemap), GraphError> {
        let all = VertexSet::from_iter(self.vertices());
        self.delete_vertices(&all.minus(keep))
    }

    /// Two-coloring of a bipartite graph: `side[v]` in {0, 1}, or `None` if
    /// some component contains an odd cycle. Isolated vertices get side 0.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        let n = self.vertex_count();
        let mut side = vec![u8::MAX; n];
        for start in 0..n as u32 {
            if side[start as usize] != u8::MAX {
                continue;
            }
            side[start as usize] = 0;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &w in self.neighbors(u) {
                    if side[w as usize] == u8::MAX {
                        side[w as usize] = 1 - side[u as usize];
                        queue.push_back(w);
                    } else if side[w as usize] == side[u as usize] {
                        return None;
                    }
                }
            }
        }
        Some(side)
    }
}

/// A set of vertex ids, stored sorted for deterministic iteration.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexSet {
    members: BTreeSet<u32>,
}

impl VertexSet {
    pub fn new() -> Self {
        VertexSet { members: BTreeSet::new() }
    }

    pub fn from_set(members: BTreeSet<u32>) -> Self {
        VertexSet { members }
    }

    pub fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        VertexSet { members: iter.into_iter().collect() }
    }

    pub fn singleton(v: u32) -> Self {
        Self::from_iter([v])
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.members.contains(&v)
    }

    pub fn insert(&mut self, v: u32) -> bool {
        self.members.insert(v)
    }

    pub fn remove(&mut self, v: u32) -> bool {
        self.members.remove(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.members.iter().copied()
    }

    pub fn first(&self) -> Option<u32> {
        self.members.iter().next().copied()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet { members: self.members.union(&other.members).copied().collect() }
    }

    pub fn minus(&self, other: &VertexSet) -> VertexSet {
        VertexSet { members: self.members.difference(&other.members).copied().collect() }
    }

    pub fn intersect(&self, other: &VertexSet) -> VertexSet {
        VertexSet { members: self.members.intersection(&other.members).copied().collect() }
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.members.is_disjoint(&other.members)
    }

    pub fn extend<I: IntoIterator<Item = u32>>(&mut self, iter: I) {
        self.members.extend(iter);
    }

    /// Membership mask for fast lookups during traversals.
    pub fn to_mark(&self, n: usize) -> Vec<bool> {
        let mut mark = vec![false; n];
        for v in self.iter() {
            mark[v as usize] = true;
        }
        mark
    }

    pub fn check_against(&self, g: &Graph) -> Result<(), GraphError> {
        match self.members.iter().next_back() {
            Some(&v) => g.check_vertex(v),
            None => Ok(()),
        }
    }
}

impl FromIterator<u32> for VertexSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        VertexSet::from_iter(iter)
    }
}

/// A path as an ordered sequence of distinct vertices. The sequence is the
/// source of truth; its length in edges is `vertex count - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    vertices: Vec<u32>,
}

impl Path {
    /// Wraps a vertex sequence without validation. Prefer [`Path::checked`]
    /// at module boundaries.
    pub fn new(vertices: Vec<u32>) -> Self {
        debug_assert!(!vertices.is_empty());
        Path { vertices }
    }

    /// Validates adjacency and distinctness against `g`.
    pub fn checked(vertices: Vec<u32>, g: &Graph) -> Result<Self, GraphError> {
        let p = Path::new(vertices);
        p.validate(g)?;
        Ok(p)
    }

    pub fn validate(&self, g: &Graph) -> Result<(), GraphError> {
        if self.vertices.is_empty() {
            return Err(GraphError::Invalid("empty path".into()));
        }
        let mut seen = BTreeSet::new();
        for &v in &self.vertices {
            g.check_vertex(v)?;
            if !seen.insert(v) {
                return Err(GraphError::Invalid(format!("repeated vertex {v} in path")));
            }
        }
        for w in self.vertices.windows(2) {
            if !g.has_edge(w[0], w[1]) {
                return Err(GraphError::MissingEdge(w[0], w[1]));
            }
        }
        Ok(())
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> u32 {
        self.vertices[0]
    }

    pub fn last(&self) -> u32 {
        *self.vertices.last().unwrap()
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn interior(&self) -> &[u32] {
        if self.vertices.len() <= 2 {
            &[]
        } else {
            &self.vertices[1..self.vertices.len() - 1]
        }
    }

    pub fn contains(&self, v: u32) -> bool {
        self.vertices.contains(&v)
    }

    pub fn reversed(&self) -> Path {
        let mut v = self.vertices.clone();
        v.reverse();
        Path::new(v)
    }

    pub fn vertex_set(&self) -> VertexSet {
        VertexSet::from_iter(self.vertices.iter().copied())
    }

    /// Concatenates with `next`, which must start where `self` ends.
    pub fn join(&self, next: &Path) -> Path {
        assert_eq!(self.last(), next.first(), "paths do not share a junction");
        let mut v = self.vertices.clone();
        v.extend_from_slice(&next.vertices[1..]);
        Path::new(v)
    }
}

/// A set of removed edges, stored as unordered pairs with `u < v`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeMask {
    removed: BTreeSet<(u32, u32)>,
}

impl EdgeMask {
    pub fn new() -> Self {
        EdgeMask::default()
    }

    pub fn from_iter<I: IntoIterator<Item = (u32, u32)>>(iter: I) -> Self {
        EdgeMask {
            removed: iter
                .into_iter()
                .map(|(u, v)| (u.min(v), u.max(v)))
                .collect(),
        }
    }

    pub fn insert(&mut self, u: u32, v: u32) {
        self.removed.insert((u.min(v), u.max(v)));
    }

    pub fn contains(&self, u: u32, v: u32) -> bool {
        self.removed.contains(&(u.min(v), u.max(v)))
    }

    pub fn len(&self) -> usize {
        self.removed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.removed.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(u32, u32)> {
        self.removed.iter()
    }
}

/// Id translation produced by vertex deletion: `new_to_old[new] = old`, and
/// `old_to_new[old]` is `None` for deleted vertices.
#[derive(Clone, Debug)]
pub struct VertexRemap {
    pub new_to_old: Vec<u32>,
    pub old_to_new: Vec<Option<u32>>,
}

impl VertexRemap {
    /// Identity remap on `n` vertices.
    pub fn identity(n: usize) -> Self {
        VertexRemap {
            new_to_old: (0..n as u32).collect(),
            old_to_new: (0..n as u32).map(Some).collect(),
        }
    }

    pub fn to_old(&self, new_id: u32) -> u32 {
        self.new_to_old[new_id as usize]
    }

    pub fn to_new(&self, old_id: u32) -> Option<u32> {
        self.old_to_new[old_id as usize]
    }

    /// Lifts a path in the new graph back to original ids.
    pub fn lift_path(&self, p: &Path) -> Path {
        Path::new(p.vertices().iter().map(|&v| self.to_old(v)).collect())
    }

    pub fn lift_set(&self, s: &VertexSet) -> VertexSet {
        VertexSet::from_iter(s.iter().map(|v| self.to_old(v)))
    }

    /// Composes with an inner remap: `self` maps mid->old, `inner` maps
    /// new->mid; the result maps new->old.
    pub fn compose(&self, inner: &VertexRemap) -> VertexRemap {
        let new_to_old: Vec<u32> =
            inner.new_to_old.iter().map(|&mid| self.to_old(mid)).collect();
        let mut old_to_new = vec![None; self.old_to_new.len()];
        for (new_id, &old_id) in new_to_old.iter().enumerate() {
            old_to_new[old_id as usize] = Some(new_id as u32);
        }
        VertexRemap { new_to_old, old_to_new }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    fn triangle() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn path4() -> Graph {
        Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    #[test]
    fn symmetry_after_construction() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4), (1, 0)]).unwrap();
        for u in g.vertices() {
            for &v in g.neighbors(u) {
                assert!(g.has_edge(v, u));
            }
        }
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn self_loop_rejected() {
        assert_eq!(
            Graph::from_edges(2, [(0, 0)]).unwrap_err(),
            GraphError::SelfLoop(0)
        );
    }

    #[test]
    fn external_neighborhood_triangle() {
        let g = triangle();
        let n = g
            .external_neighborhood(&VertexSet::singleton(0), None)
            .unwrap();
        assert_eq!(n, VertexSet::from_iter([1, 2]));
        let all = VertexSet::from_iter([0, 1, 2]);
        assert!(g.external_neighborhood(&all, None).unwrap().is_empty());
    }

    #[test]
    fn external_neighborhood_restricted() {
        let g = path4();
        let n = g
            .external_neighborhood(
                &VertexSet::singleton(1),
                Some(&VertexSet::singleton(3)),
            )
            .unwrap();
        assert!(n.is_empty());
    }

    #[test]
    fn ball_radius_zero_and_growth() {
        let g = path4();
        let a = VertexSet::singleton(0);
        let none = VertexSet::new();
        assert_eq!(g.ball(&a, 0, &none).unwrap(), a);
        assert_eq!(
            g.ball(&a, 2, &none).unwrap(),
            VertexSet::from_iter([0, 1, 2])
        );
        assert_eq!(
            g.ball(&a, 3, &VertexSet::singleton(1)).unwrap(),
            VertexSet::singleton(0)
        );
    }

    #[test]
    fn ball_monotone_and_fixed_point() {
        let g = generate::hypercube(4).unwrap();
        let a = VertexSet::from_iter([0, 5]);
        let avoid = VertexSet::from_iter([1, 2]);
        let mut prev = g.ball(&a, 0, &avoid).unwrap();
        for r in 1..=g.vertex_count() {
            let cur = g.ball(&a, r, &avoid).unwrap();
            assert!(prev.minus(&cur).is_empty(), "ball shrank at radius {r}");
            prev = cur;
        }
        let fixed = g.ball(&a, g.vertex_count(), &avoid).unwrap();
        assert_eq!(fixed, g.ball(&a, g.vertex_count() + 1, &avoid).unwrap());
    }

    #[test]
    fn neighborhood_is_ball_one_minus_a() {
        let g = generate::gnp(40, 0.15, 11).unwrap();
        let a = VertexSet::from_iter([0, 3, 17]);
        let nbh = g.external_neighborhood(&a, None).unwrap();
        let ball = g.ball(&a, 1, &VertexSet::new()).unwrap();
        assert_eq!(nbh, ball.minus(&a));
    }

    #[test]
    fn delete_vertex_from_triangle() {
        let (h, remap) = triangle().delete_vertices(&VertexSet::singleton(2)).unwrap();
        assert_eq!(h.vertex_count(), 2);
        assert_eq!(h.edge_count(), 1);
        assert_eq!(remap.to_old(0), 0);
        assert_eq!(remap.to_new(2), None);
    }

    #[test]
    fn delete_edge_from_triangle() {
        let h = triangle()
            .delete_edges(&EdgeMask::from_iter([(2, 0)]))
            .unwrap();
        assert_eq!(h.edge_count(), 2);
        assert!(!h.has_edge(0, 2));
        assert!(h.has_edge(0, 1));
    }

    #[test]
    fn delete_nothing_is_identity() {
        let g = triangle();
        let (h, remap) = g.delete_vertices(&VertexSet::new()).unwrap();
        assert_eq!(g, h);
        assert_eq!(remap.new_to_old, vec![0, 1, 2]);
    }

    #[test]
    fn deletion_orders_commute_up_to_remap() {
        let g = generate::gnp(30, 0.2, 5).unwrap();
        let vs = VertexSet::from_iter([2, 7, 19]);
        let mask = EdgeMask::from_iter(
            g.edges().filter(|&(u, v)| u % 7 == 0 && !vs.contains(u) && !vs.contains(v)),
        );
        let a = g.delete_edges(&mask).unwrap().delete_vertices(&vs).unwrap().0;
        let (h, remap) = g.delete_vertices(&vs).unwrap();
        let mapped = EdgeMask::from_iter(mask.iter().map(|&(u, v)| {
            (remap.to_new(u).unwrap(), remap.to_new(v).unwrap())
        }));
        let b = h.delete_edges(&mapped).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn path_validation() {
        let g = path4();
        assert!(Path::checked(vec![0, 1, 2, 3], &g).is_ok());
        assert!(Path::checked(vec![0, 2], &g).is_err());
        assert!(Path::checked(vec![0, 1, 0], &g).is_err());
        let p = Path::checked(vec![1, 2, 3], &g).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.interior(), &[2]);
    }

    #[test]
    fn remap_compose() {
        let g = generate::cycle(6).unwrap();
        let (h, r1) = g.delete_vertices(&VertexSet::singleton(0)).unwrap();
        let (_k, r2) = h.delete_vertices(&VertexSet::singleton(0)).unwrap();
        let c = r1.compose(&r2);
        // h's vertex 0 was g's vertex 1; k's vertex 0 was h's vertex 1 = g's 2.
        assert_eq!(c.to_old(0), 2);
        assert_eq!(c.to_new(1), None);
    }

    #[test]
    fn bipartition_detects_sides() {
        let g = generate::complete_bipartite(3, 4).unwrap();
        let side = g.bipartition().unwrap();
        for (u, v) in g.edges() {
            assert_ne!(side[u as usize], side[v as usize]);
        }
        assert!(triangle().bipartition().is_none());
    }
}
