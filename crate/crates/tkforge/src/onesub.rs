//! Randomized construction of 1-subdivisions from dense asymmetric bipartite
//! configurations, and the dense-regime entry point built on it.
//!
//! Given disjoint sets U, W where every U-vertex has at least `d` neighbors
//! in W, sampling a density-`p` subset of W and keeping the U-vertices that
//! still see many sampled vertices produces, with constant probability per
//! retry, a vertex whose sampled neighborhood is fully "wired": every pair of
//! it is served by a distinct connector vertex. Those pairs are the branch
//! paths of a 1-subdivision.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cert::SubdivisionCertificate;
use crate::graph::{Graph, Path, VertexSet};

#[derive(Debug, Error, PartialEq)]
pub enum OnesubError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("retries exhausted after {retries} attempts: {summary}")]
    RetriesExhausted { retries: u32, summary: String },
    #[error("too sparse for dense case: derived order {ell} below the floor of 20")]
    TooSparse { ell: usize },
}

/// A dense asymmetric bipartite configuration.
#[derive(Debug, Clone)]
pub struct AsymmetricInstance {
    pub u_side: VertexSet,
    pub w_side: VertexSet,
    /// Promised minimum degree from `u_side` into `w_side`.
    pub d: usize,
    /// Per-element sampling probability.
    pub p: f64,
    /// Order of the subdivision the instance is good for.
    pub ell: usize,
}

impl AsymmetricInstance {
    /// Derives `p` and `ell` from the sets and the degree promise, then caps
    /// an oversized U. Validates the structural preconditions against `g`.
    pub fn new(
        g: &Graph,
        u_side: VertexSet,
        w_side: VertexSet,
        d: usize,
    ) -> Result<Self, OnesubError> {
        if !u_side.is_disjoint(&w_side) {
            return Err(OnesubError::InvalidInstance("U and W must be disjoint".into()));
        }
        if u_side.is_empty() || w_side.is_empty() {
            return Err(OnesubError::InvalidInstance("U and W must be nonempty".into()));
        }
        if d < 40 {
            return Err(OnesubError::InvalidInstance(format!(
                "degree promise d={d} below the floor of 40"
            )));
        }
        let w_mark = w_side.to_mark(g.vertex_count());
        for u in u_side.iter() {
            let deg_into = g.neighbors(u).iter().filter(|&&x| w_mark[x as usize]).count();
            if deg_into < d {
                return Err(OnesubError::InvalidInstance(format!(
                    "vertex {u} has only {deg_into} neighbors in W, promised {d}"
                )));
            }
        }
        let inst = Self::derive(u_side, w_side, d);
        if inst.ell < 20 {
            return Err(OnesubError::InvalidInstance(format!(
                "derived order {} below the floor of 20",
                inst.ell
            )));
        }
        Ok(inst)
    }

    fn derive(u_side: VertexSet, w_side: VertexSet, d: usize) -> Self {
        let raw = AsymmetricInstance {
            p: (u_side.len() as f64).sqrt() / (4.0 * w_side.len() as f64),
            ell: ((d as f64) * (u_side.len() as f64).sqrt() / (8.0 * w_side.len() as f64)).ceil()
                as usize,
            u_side,
            w_side,
            d,
        };
        cap_u(raw)
    }
}

/// Replaces an oversized U (more than `16|W|^2` vertices) by its lowest-id
/// members of exactly that size; the order then becomes `ceil(d/2)`.
pub fn cap_u(inst: AsymmetricInstance) -> AsymmetricInstance {
    let limit = 16 * inst.w_side.len() * inst.w_side.len();
    if inst.u_side.len() <= limit {
        return inst;
    }
    let u_side = VertexSet::from_iter(inst.u_side.iter().take(limit));
    AsymmetricInstance {
        p: (u_side.len() as f64).sqrt() / (4.0 * inst.w_side.len() as f64),
        ell: (inst.d as f64 / 2.0).ceil() as usize,
        u_side,
        w_side: inst.w_side,
        d: inst.d,
    }
}

/// Which filter a failed retry died on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RetryFailure {
    SampleTooLarge { got: usize, cap: usize },
    SurvivorsTooFew { got: usize, need: usize },
    NoUnusedApex,
    ApexNeighborhoodSmall { got: usize, need: usize },
    PairNotWired { x: u32, y: u32 },
}

impl std::fmt::Display for RetryFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RetryFailure::SampleTooLarge { got, cap } => {
                write!(f, "sampled W' too large ({got} > {cap})")
            }
            RetryFailure::SurvivorsTooFew { got, need } => {
                write!(f, "U' too small ({got} < {need})")
            }
            RetryFailure::NoUnusedApex => write!(f, "every surviving vertex is a connector"),
            RetryFailure::ApexNeighborhoodSmall { got, need } => {
                write!(f, "apex sees only {got} sampled vertices, need {need}")
            }
            RetryFailure::PairNotWired { x, y } => {
                write!(f, "pair {x},{y} has no connector in the maximal wiring")
            }
        }
    }
}

/// Runs the sampling construction. Retries are driven by sub-seeds of `seed`;
/// the first success wins.
pub fn find_onesub_asymmetric(
    g: &Graph,
    inst: &AsymmetricInstance,
    seed: u64,
    max_retries: u32,
) -> Result<SubdivisionCertificate, OnesubError> {
    if inst.ell < 20 {
        return Err(OnesubError::InvalidInstance(format!(
            "instance order {} below the floor of 20",
            inst.ell
        )));
    }
    let mut diagnostics: Vec<String> = Vec::new();
    for retry in 0..max_retries {
        let retry_seed = crate::derive_seed(seed, 0x15 ^ ((retry as u64) << 8));
        match attempt(g, inst, retry_seed) {
            Ok(cert) => return Ok(cert),
            Err(fail) => diagnostics.push(format!("retry {retry}: {fail}")),
        }
    }
    Err(OnesubError::RetriesExhausted {
        retries: max_retries,
        summary: diagnostics.join("; "),
    })
}

fn attempt(
    g: &Graph,
    inst: &AsymmetricInstance,
    seed: u64,
) -> Result<SubdivisionCertificate, RetryFailure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.vertex_count();
    // sample W' element-wise with probability p
    let sampled: Vec<u32> = inst
        .w_side
        .iter()
        .filter(|_| rng.gen_bool(inst.p.min(1.0)))
        .collect();
    let sample_cap = (2.0 * inst.p * inst.w_side.len() as f64).floor() as usize;
    if sampled.len() > sample_cap {
        return Err(RetryFailure::SampleTooLarge { got: sampled.len(), cap: sample_cap });
    }
    let sampled_mark = VertexSet::from_iter(sampled.iter().copied()).to_mark(n);
    // survivors: U-vertices that still see at least p*d/2 sampled vertices
    let survivor_floor = inst.p * inst.d as f64 / 2.0;
    let survivors: Vec<u32> = inst
        .u_side
        .iter()
        .filter(|&u| {
            let hits = g.neighbors(u).iter().filter(|&&w| sampled_mark[w as usize]).count();
            hits as f64 >= survivor_floor
        })
        .collect();
    let survivor_need = inst.u_side.len().div_ceil(4);
    if survivors.len() < survivor_need {
        return Err(RetryFailure::SurvivorsTooFew {
            got: survivors.len(),
            need: survivor_need,
        });
    }
    // maximal wiring: pairs of sampled vertices in lexicographic order, each
    // taking its lowest-id unused common neighbor among the survivors
    let survivor_mark = VertexSet::from_iter(survivors.iter().copied()).to_mark(n);
    let mut used = vec![false; n];
    let mut wiring: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for (i, &x) in sampled.iter().enumerate() {
        for &y in &sampled[i + 1..] {
            if let Some(c) = lowest_common_connector(g, x, y, &survivor_mark, &used) {
                used[c as usize] = true;
                wiring.insert((x.min(y), x.max(y)), c);
            }
        }
    }
    // an unused survivor becomes the apex; its sampled neighborhood must be
    // big enough and fully wired
    let apex = survivors
        .iter()
        .copied()
        .find(|&u| !used[u as usize])
        .ok_or(RetryFailure::NoUnusedApex)?;
    let apex_nbhd: Vec<u32> = g
        .neighbors(apex)
        .iter()
        .copied()
        .filter(|&w| sampled_mark[w as usize])
        .collect();
    if apex_nbhd.len() < inst.ell {
        return Err(RetryFailure::ApexNeighborhoodSmall {
            got: apex_nbhd.len(),
            need: inst.ell,
        });
    }
    let cores: Vec<u32> = apex_nbhd.iter().copied().take(inst.ell).collect();
    let mut paths = Vec::new();
    for (i, &x) in cores.iter().enumerate() {
        for &y in &cores[i + 1..] {
            let key = (x.min(y), x.max(y));
            let &c = wiring.get(&key).ok_or(RetryFailure::PairNotWired { x, y })?;
            paths.push(Path::new(vec![key.0, c, key.1]));
        }
    }
    Ok(SubdivisionCertificate::new(cores, 1, paths).expect("wiring yields a valid structure"))
}

fn lowest_common_connector(
    g: &Graph,
    x: u32,
    y: u32,
    survivor_mark: &[bool],
    used: &[bool],
) -> Option<u32> {
    // sorted-list intersection
    let (mut a, mut b) = (g.neighbors(x).iter().peekable(), g.neighbors(y).iter().peekable());
    while let (Some(&&u), Some(&&v)) = (a.peek(), b.peek()) {
        match u.cmp(&v) {
            std::cmp::Ordering::Less => {
                a.next();
            }
            std::cmp::Ordering::Greater => {
                b.next();
            }
            std::cmp::Ordering::Equal => {
                if survivor_mark[u as usize] && !used[u as usize] {
                    return Some(u);
                }
                a.next();
                b.next();
            }
        }
    }
    None
}

/// Dense-regime entry point: derives an asymmetric instance from a dense
/// graph and delegates. The achieved order is whatever the derived instance
/// supports; it is reported, never inflated.
pub fn find_onesub_dense(
    g: &Graph,
    seed: u64,
    max_retries: u32,
) -> Result<SubdivisionCertificate, OnesubError> {
    let alpha_n = g.average_degree();
    if alpha_n < 160.0 {
        // even a perfectly asymmetric split cannot reach the order floor
        return Err(OnesubError::TooSparse {
            ell: (alpha_n / 8.0).ceil() as usize,
        });
    }
    let degree_floor = alpha_n / 2.0;
    let high: VertexSet = g
        .vertices()
        .filter(|&v| g.degree(v) as f64 >= degree_floor)
        .collect();
    let rest = VertexSet::from_iter(g.vertices()).minus(&high);
    let into_floor = (alpha_n / 4.0).ceil() as usize;
    let instance = match instance_from(g, &high, &rest, into_floor) {
        Some(inst) => inst,
        None => {
            // high-degree vertices see too little of the complement; split a
            // bipartition in half instead and keep the side-crossing promise
            let (left, right) = split_sides(g);
            let filtered: VertexSet = left
                .iter()
                .filter(|&u| {
                    g.neighbors(u).iter().filter(|&&w| right.contains(w)).count() >= into_floor
                })
                .collect();
            instance_from(g, &filtered, &right, into_floor).ok_or(OnesubError::TooSparse {
                ell: 0,
            })?
        }
    };
    let inst = AsymmetricInstance::derive(instance.0, instance.1, instance.2);
    if inst.ell < 20 {
        return Err(OnesubError::TooSparse { ell: inst.ell });
    }
    if inst.d < 40 {
        return Err(OnesubError::TooSparse { ell: inst.ell.min(inst.d / 2) });
    }
    find_onesub_asymmetric(g, &inst, seed, max_retries)
}

/// Checks the degree promise of (U, W) and returns the witnessed minimum.
fn instance_from(
    g: &Graph,
    u_side: &VertexSet,
    w_side: &VertexSet,
    floor: usize,
) -> Option<(VertexSet, VertexSet, usize)> {
    if u_side.is_empty() || w_side.is_empty() || !u_side.is_disjoint(w_side) {
        return None;
    }
    let w_mark = w_side.to_mark(g.vertex_count());
    let mut min_into = usize::MAX;
    for u in u_side.iter() {
        let deg = g.neighbors(u).iter().filter(|&&x| w_mark[x as usize]).count();
        if deg < floor {
            return None;
        }
        min_into = min_into.min(deg);
    }
    Some((u_side.clone(), w_side.clone(), min_into))
}

/// Splits the vertex set along the bipartition when there is one, otherwise
/// down the middle by id.
fn split_sides(g: &Graph) -> (VertexSet, VertexSet) {
    if let Some(side) = g.bipartition() {
        let left = g.vertices().filter(|&v| side[v as usize] == 0).collect();
        let right = g.vertices().filter(|&v| side[v as usize] == 1).collect();
        (left, right)
    } else {
        let half = g.vertex_count() as u32 / 2;
        let left = (0..half).collect();
        let right = (half..g.vertex_count() as u32).collect();
        (left, right)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cert::verify;
    use crate::generate;

    #[test]
    fn cap_leaves_small_u_alone() {
        let u: VertexSet = (0..100).collect();
        let w: VertexSet = (100..110).collect();
        let inst = AsymmetricInstance::derive(u.clone(), w, 50);
        assert_eq!(inst.u_side, u); // 100 <= 1600
    }

    #[test]
    fn cap_truncates_and_resets_order() {
        let u: VertexSet = (0..2000).collect();
        let w: VertexSet = (2000..2010).collect();
        let inst = AsymmetricInstance::derive(u, w, 50);
        assert_eq!(inst.u_side.len(), 1600);
        assert_eq!(inst.ell, 25);
        assert!((inst.p - 1.0).abs() < 1e-12); // sqrt(1600)/(4*10)
    }

    #[test]
    fn cap_boundary_is_exclusive() {
        let u: VertexSet = (0..1600).collect();
        let w: VertexSet = (1600..1610).collect();
        let inst = AsymmetricInstance::derive(u.clone(), w, 50);
        assert_eq!(inst.u_side, u); // exactly 16|W|^2 stays
    }

    #[test]
    fn instance_rejects_small_order() {
        let g = generate::complete_bipartite(100, 50).unwrap();
        let u: VertexSet = (0..100).collect();
        let w: VertexSet = (100..150).collect();
        // ell = ceil(50*10/400) = 2 < 20
        assert!(matches!(
            AsymmetricInstance::new(&g, u, w, 50),
            Err(OnesubError::InvalidInstance(_))
        ));
    }

    #[test]
    fn asymmetric_success_and_determinism() {
        // the order formula is capped by sqrt(|U|)/8, so reaching the floor
        // of 20 takes |U| = 25600; with d = |W| = 40 the sampling probability
        // is exactly 1 and every retry is the same deterministic attempt
        let g = generate::complete_bipartite(25600, 40).unwrap();
        let u: VertexSet = (0..25600).collect();
        let w: VertexSet = (25600..25640).collect();
        let inst = AsymmetricInstance::new(&g, u, w, 40).unwrap();
        assert_eq!(inst.ell, 20); // ceil(40*160/(8*40))
        assert!((inst.p - 1.0).abs() < 1e-12);
        let cert = find_onesub_asymmetric(&g, &inst, 7, 20).unwrap();
        assert_eq!(cert.order(), 20);
        assert_eq!(cert.internal_vertices_per_path(), 1);
        verify(&g, &cert).unwrap();
        let again = find_onesub_asymmetric(&g, &inst, 7, 20).unwrap();
        assert_eq!(cert, again);
    }

    #[test]
    fn degenerate_sample_fails_the_retry_and_resamples() {
        let g = generate::complete_bipartite(30, 10).unwrap();
        let inst = AsymmetricInstance {
            u_side: (0..30).collect(),
            w_side: (30..40).collect(),
            d: 10,
            p: 0.0, // every sample is empty
            ell: 20,
        };
        let err = find_onesub_asymmetric(&g, &inst, 5, 3).unwrap_err();
        match err {
            OnesubError::RetriesExhausted { retries, summary } => {
                assert_eq!(retries, 3);
                assert!(summary.contains("retry 0") && summary.contains("retry 2"));
            }
            other => panic!("expected retry exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn dense_rejects_sparse_graphs() {
        let g = generate::random_regular(200, 8, 1).unwrap();
        assert!(matches!(
            find_onesub_dense(&g, 3, 5),
            Err(OnesubError::TooSparse { .. })
        ));
    }

    #[test]
    fn dense_reports_honest_failure_at_small_scale() {
        // dense but too small: the derived instance cannot reach order 20
        let g = generate::complete(400).unwrap();
        assert!(matches!(
            find_onesub_dense(&g, 3, 5),
            Err(OnesubError::TooSparse { .. })
        ));
    }
}
