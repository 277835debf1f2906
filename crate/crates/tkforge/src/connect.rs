//! Short paths between vertex sets avoiding a forbidden set, and families of
//! pairwise disjoint such paths.
//!
//! A path "between A and B" here always means: one endpoint in each set and
//! no other vertex of either set on the path. `connect` finds a shortest such
//! path by breadth-first search from the whole of A, so its output length is
//! exactly the set-to-set distance under that constraint.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{Graph, GraphError, Path, VertexSet};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConnectError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
    #[error("no path within length cap {cap}: shortest has length {shortest}")]
    LengthExceeded { cap: usize, shortest: usize },
    #[error("endpoint sets are disconnected in the pruned graph")]
    Disconnected,
}

/// A request to connect `a` to `b` avoiding `avoid`.
#[derive(Debug, Clone)]
pub struct ConnectRequest {
    pub a: VertexSet,
    pub b: VertexSet,
    pub avoid: VertexSet,
    pub length_cap: usize,
    /// Lower bound both endpoint sets are required to meet; callers that rely
    /// on expansion guarantees set it to the scale their avoid budget assumes.
    pub x_floor: usize,
}

impl ConnectRequest {
    pub fn new(a: VertexSet, b: VertexSet, avoid: VertexSet, length_cap: usize) -> Self {
        ConnectRequest { a, b, avoid, length_cap, x_floor: 1 }
    }

    fn validate(&self, g: &Graph) -> Result<(), ConnectError> {
        self.a.check_against(g)?;
        self.b.check_against(g)?;
        self.avoid.check_against(g)?;
        if self.a.is_empty() || self.b.is_empty() {
            return Err(ConnectError::InvalidRequest("endpoint sets must be nonempty".into()));
        }
        if !self.a.is_disjoint(&self.b) {
            return Err(ConnectError::InvalidRequest("endpoint sets must be disjoint".into()));
        }
        if !self.avoid.is_disjoint(&self.a) || !self.avoid.is_disjoint(&self.b) {
            return Err(ConnectError::InvalidRequest(
                "avoid set must be disjoint from both endpoint sets".into(),
            ));
        }
        if self.a.len() < self.x_floor || self.b.len() < self.x_floor {
            return Err(ConnectError::InvalidRequest(format!(
                "endpoint sets smaller than the declared floor {}",
                self.x_floor
            )));
        }
        Ok(())
    }
}

/// Length guarantee scale for connections under an admissible avoid budget:
/// `ceil((100/eps1) * ln^3(15n/(eps2 d)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthBound {
    pub n: usize,
    pub d: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub value: usize,
}

impl LengthBound {
    pub fn new(n: usize, d: f64, eps1: f64, eps2: f64) -> Self {
        let l = (15.0 * n as f64 / (eps2 * d)).ln();
        let value = ((100.0 / eps1) * l.powi(3)).ceil().max(1.0) as usize;
        LengthBound { n, d, eps1, eps2, value }
    }

    /// Largest avoid-set size the guarantee tolerates at endpoint scale `x`.
    pub fn avoid_budget(&self, x: usize) -> f64 {
        let l = (15.0 * self.n as f64 / (self.eps2 * self.d)).ln();
        self.eps1 * x as f64 / (4.0 * l * l)
    }
}

/// Shortest path with one endpoint in `a`, the other in `b`, no other vertex
/// of either set, and no vertex of `avoid`.
pub fn connect(g: &Graph, req: &ConnectRequest) -> Result<Path, ConnectError> {
    req.validate(g)?;
    let n = g.vertex_count();
    let avoid = req.avoid.to_mark(n);
    let a_mark = req.a.to_mark(n);
    let b_mark = req.b.to_mark(n);
    let mut parent: Vec<u32> = vec![u32::MAX; n];
    let mut dist: Vec<u32> = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for v in req.a.iter() {
        dist[v as usize] = 0;
        queue.push_back(v);
    }
    let mut hit: Option<(u32, u32)> = None; // (b-vertex, predecessor)
    'bfs: while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        for &w in g.neighbors(u) {
            if avoid[w as usize] {
                continue;
            }
            if b_mark[w as usize] {
                hit = Some((w, u));
                break 'bfs;
            }
            if a_mark[w as usize] || dist[w as usize] != u32::MAX {
                continue;
            }
            dist[w as usize] = du + 1;
            parent[w as usize] = u;
            queue.push_back(w);
        }
    }
    let Some((end, pred)) = hit else {
        return Err(ConnectError::Disconnected);
    };
    let mut rev = vec![end, pred];
    let mut cur = pred;
    while dist[cur as usize] != 0 {
        cur = parent[cur as usize];
        rev.push(cur);
    }
    rev.reverse();
    let path = Path::new(rev);
    if path.len() > req.length_cap {
        return Err(ConnectError::LengthExceeded { cap: req.length_cap, shortest: path.len() });
    }
    debug_assert!(path.validate(g).is_ok());
    Ok(path)
}

/// Result of a disjoint-family harvest: the paths found plus how many were
/// requested but not found.
#[derive(Debug, Clone)]
pub struct DisjointFamily {
    pub paths: Vec<Path>,
    pub shortfall: usize,
    pub stop_reason: Option<ConnectError>,
}

impl DisjointFamily {
    pub fn complete(&self) -> bool {
        self.shortfall == 0
    }
}

/// Greedily harvests up to `count` pairwise vertex-disjoint paths between `a`
/// and `b`, each found vertex joining the avoid set for the rest of the
/// harvest. Partial results are reported, not errors.
pub fn connect_many_disjoint(
    g: &Graph,
    a: &VertexSet,
    b: &VertexSet,
    avoid: &VertexSet,
    count: usize,
    length_cap: usize,
) -> Result<DisjointFamily, ConnectError> {
    let mut rest_a = a.clone();
    let mut rest_b = b.clone();
    let mut used = avoid.clone();
    let mut paths = Vec::new();
    let mut stop_reason = None;
    while paths.len() < count {
        if rest_a.is_empty() || rest_b.is_empty() {
            break;
        }
        let req = ConnectRequest::new(rest_a.clone(), rest_b.clone(), used.clone(), length_cap);
        match connect(g, &req) {
            Ok(p) => {
                for &v in p.vertices() {
                    used.insert(v);
                    rest_a.remove(v);
                    rest_b.remove(v);
                }
                paths.push(p);
            }
            Err(e @ (ConnectError::Disconnected | ConnectError::LengthExceeded { .. })) => {
                stop_reason = Some(e);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let shortfall = count - paths.len();
    Ok(DisjointFamily { paths, shortfall, stop_reason })
}

/// Largest subfamily of equal length; ties broken toward the shorter length.
/// Fails (returning the best candidate) if the largest is below `minimum`.
pub fn equal_length_subfamily(paths: &[Path], minimum: usize) -> Result<Vec<Path>, Vec<Path>> {
    let mut by_len: BTreeMap<usize, Vec<&Path>> = BTreeMap::new();
    for p in paths {
        by_len.entry(p.len()).or_default().push(p);
    }
    let best = by_len
        .iter()
        .max_by(|(la, pa), (lb, pb)| pa.len().cmp(&pb.len()).then(lb.cmp(la)))
        .map(|(_, ps)| ps.iter().map(|&p| p.clone()).collect::<Vec<_>>())
        .unwrap_or_default();
    if best.len() >= minimum {
        Ok(best)
    } else {
        Err(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    fn vs<I: IntoIterator<Item = u32>>(i: I) -> VertexSet {
        VertexSet::from_iter(i)
    }

    #[test]
    fn adjacent_endpoints() {
        let g = generate::cycle(4).unwrap();
        let req = ConnectRequest::new(vs([0]), vs([1]), vs([]), 1);
        let p = connect(&g, &req).unwrap();
        assert_eq!(p.vertices(), &[0, 1]);
    }

    #[test]
    fn forced_detour_on_cycle() {
        let g = generate::cycle(8).unwrap();
        let req = ConnectRequest::new(vs([0]), vs([4]), vs([1]), 10);
        let p = connect(&g, &req).unwrap();
        assert_eq!(p.vertices(), &[0, 7, 6, 5, 4]);
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn length_cap_reports_shortest() {
        let g = generate::cycle(8).unwrap();
        let req = ConnectRequest::new(vs([0]), vs([4]), vs([1]), 3);
        assert_eq!(
            connect(&g, &req).unwrap_err(),
            ConnectError::LengthExceeded { cap: 3, shortest: 4 }
        );
    }

    #[test]
    fn disconnection_detected() {
        let g = generate::cycle(8).unwrap();
        let req = ConnectRequest::new(vs([0]), vs([4]), vs([1, 7]), 10);
        assert_eq!(connect(&g, &req).unwrap_err(), ConnectError::Disconnected);
    }

    #[test]
    fn no_other_vertices_of_a_or_b() {
        // a = {0, 2}: the path may not pass through 2 when starting at 0.
        let g = generate::cycle(6).unwrap();
        let req = ConnectRequest::new(vs([0, 2]), vs([3]), vs([]), 10);
        let p = connect(&g, &req).unwrap();
        assert_eq!(p.vertices(), &[2, 3]);
    }

    #[test]
    fn invalid_requests_rejected() {
        let g = generate::cycle(6).unwrap();
        let overlap = ConnectRequest::new(vs([0, 1]), vs([1, 2]), vs([]), 5);
        assert!(matches!(connect(&g, &overlap), Err(ConnectError::InvalidRequest(_))));
        let tainted = ConnectRequest::new(vs([0]), vs([3]), vs([0]), 5);
        assert!(matches!(connect(&g, &tainted), Err(ConnectError::InvalidRequest(_))));
    }

    #[test]
    fn matching_in_complete_bipartite() {
        let g = generate::complete_bipartite(6, 6).unwrap();
        let fam =
            connect_many_disjoint(&g, &vs([0, 1, 2]), &vs([6, 7, 8]), &vs([]), 3, 4).unwrap();
        assert!(fam.complete());
        assert!(fam.paths.iter().all(|p| p.len() == 1));
    }

    #[test]
    fn singleton_endpoints_cap_family_size() {
        let g = generate::cycle(8).unwrap();
        let fam = connect_many_disjoint(&g, &vs([0]), &vs([4]), &vs([]), 2, 10).unwrap();
        assert_eq!(fam.paths.len(), 1);
        assert_eq!(fam.shortfall, 1);
    }

    #[test]
    fn family_disjointness_at_scale() {
        let g = generate::random_regular(400, 8, 9).unwrap();
        let a = vs(0..40);
        let b = vs(100..140);
        let fam = connect_many_disjoint(&g, &a, &b, &vs([]), 10, 12).unwrap();
        assert!(fam.complete(), "wanted 10 paths, got {}", fam.paths.len());
        let mut seen = VertexSet::new();
        for p in &fam.paths {
            p.validate(&g).unwrap();
            assert!(a.contains(p.first()) && b.contains(p.last()));
            for &v in p.vertices() {
                assert!(seen.insert(v), "vertex {v} reused across the family");
            }
        }
    }

    #[test]
    fn equal_length_selection_rules() {
        let g = generate::cycle(12).unwrap();
        let mk = |k: usize, start: u32| {
            Path::new((start..=start + k as u32).collect())
        };
        // lengths 3, 3, 5
        let paths = vec![mk(3, 0), mk(3, 4), mk(5, 4)];
        let fam = equal_length_subfamily(&paths, 2).unwrap();
        assert_eq!(fam.len(), 2);
        assert!(fam.iter().all(|p| p.len() == 3));
        // lengths 3, 5: no pair
        assert!(equal_length_subfamily(&paths[1..], 2).is_err());
        // tie 4,4 vs 6,6: shorter wins
        let tied = vec![mk(4, 0), mk(4, 5), mk(6, 0), mk(6, 1)];
        let fam = equal_length_subfamily(&tied, 2).unwrap();
        assert!(fam.iter().all(|p| p.len() == 4));
        let _ = g;
    }
}
