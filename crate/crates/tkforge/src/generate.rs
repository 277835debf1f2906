//! Graph generators. Random kinds take an explicit seed and are fully
//! deterministic given it.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

pub fn complete(n: usize) -> Result<Graph, GenerateError> {
    let edges = (0..n as u32)
        .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)));
    Ok(Graph::from_edges(n, edges).unwrap())
}

/// Complete bipartite graph with sides `0..a` and `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> Result<Graph, GenerateError> {
    let n = a + b;
    let edges = (0..a as u32)
        .flat_map(|u| (a as u32..n as u32).map(move |v| (u, v)));
    Ok(Graph::from_edges(n, edges).unwrap())
}

pub fn cycle(n: usize) -> Result<Graph, GenerateError> {
    if n < 3 {
        return Err(GenerateError::Infeasible(format!("cycle needs n >= 3, got {n}")));
    }
    let edges = (0..n as u32).map(|u| (u, (u + 1) % n as u32));
    Ok(Graph::from_edges(n, edges).unwrap())
}

/// Hypercube on `2^dim` vertices; vertices adjacent iff ids differ in one bit.
pub fn hypercube(dim: u32) -> Result<Graph, GenerateError> {
    if dim > 20 {
        return Err(GenerateError::Infeasible(format!("hypercube dimension {dim} too large")));
    }
    let n = 1usize << dim;
    let edges = (0..n as u32).flat_map(move |u| {
        (0..dim).filter_map(move |b| {
            let v = u ^ (1 << b);
            (u < v).then_some((u, v))
        })
    });
    Ok(Graph::from_edges(n, edges).unwrap())
}

/// Erdos-Renyi graph: each pair is an edge independently with probability `p`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Graph, GenerateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GenerateError::Infeasible(format!("probability {p} outside [0,1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_edges(n, edges).unwrap())
}

/// Random `d`-regular graph via stub pairing with resampling of unsuitable
/// pairs. Requires `n*d` even and `d < n`.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, GenerateError> {
    if n * d % 2 != 0 {
        return Err(GenerateError::Infeasible(format!(
            "random_regular needs n*d even, got n={n} d={d}"
        )));
    }
    if d >= n {
        return Err(GenerateError::Infeasible(format!(
            "random_regular needs d < n, got n={n} d={d}"
        )));
    }
    if d == 0 {
        return Ok(Graph::empty(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..200 {
        let mut stubs: Vec<u32> = (0..n as u32).flat_map(|v| std::iter::repeat(v).take(d)).collect();
        stubs.shuffle(&mut rng);
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut edges: Vec<(u32, u32)> = Vec::with_capacity(n * d / 2);
        while !stubs.is_empty() {
            // Draw a partner for the last stub; a bounded number of rejected
            // draws before restarting keeps the loop from stalling near the end.
            let u = *stubs.last().unwrap();
            let mut found = None;
            for _ in 0..100 {
                let j = rng.gen_range(0..stubs.len() - 1);
                let v = stubs[j];
                if v != u && !adj[u as usize].contains(&v) {
                    found = Some(j);
                    break;
                }
            }
            let Some(j) = found else { continue 'attempt };
            let v = stubs[j];
            stubs.swap_remove(j);
            // u may have moved if swap_remove relocated the tail element.
            let ui = stubs.iter().rposition(|&s| s == u).unwrap();
            stubs.swap_remove(ui);
            adj[u as usize].push(v);
            adj[v as usize].push(u);
            edges.push((u, v));
        }
        return Ok(Graph::from_edges(n, edges).unwrap());
    }
    Err(GenerateError::Infeasible(format!(
        "could not realize a simple {d}-regular graph on {n} vertices"
    )))
}

/// Named generator dispatch used by the command line.
pub fn by_name(kind: &str, params: &[usize], seed: Option<u64>) -> Result<Graph, GenerateError> {
    let need_seed = || {
        seed.ok_or_else(|| GenerateError::Infeasible(format!("generator {kind} requires a seed")))
    };
    let arg = |i: usize| -> Result<usize, GenerateError> {
        params.get(i).copied().ok_or_else(|| {
            GenerateError::Infeasible(format!("generator {kind} missing parameter {i}"))
        })
    };
    match kind {
        "complete" => complete(arg(0)?),
        "complete_bipartite" => complete_bipartite(arg(0)?, arg(1)?),
        "cycle" => cycle(arg(0)?),
        "hypercube" => hypercube(arg(0)? as u32),
        "gnp" => {
            // probability is passed as a permille value on the CLI
            let p = arg(1)? as f64 / 1000.0;
            gnp(arg(0)?, p, need_seed()?)
        }
        "random_regular" => random_regular(arg(0)?, arg(1)?, need_seed()?),
        other => Err(GenerateError::Infeasible(format!("unknown generator '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_bipartite_counts() {
        let g = complete_bipartite(3, 3).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.edge_count(), 9);
        assert!(g.bipartition().is_some());
    }

    #[test]
    fn hypercube_counts() {
        let g = hypercube(4).unwrap();
        assert_eq!(g.vertex_count(), 16);
        assert_eq!(g.edge_count(), 32);
        assert!(g.vertices().all(|v| g.degree(v) == 4));
    }

    #[test]
    fn gnp_pinned_seed() {
        let g = gnp(100, 0.5, 7).unwrap();
        // frozen for this generator and seed; average degree 2m/n = 49.56
        assert_eq!(g.edge_count(), 2478);
        assert!(g.average_degree() >= 39.0 && g.average_degree() <= 60.0);
        assert_eq!(gnp(100, 0.5, 7).unwrap(), g);
    }

    #[test]
    fn random_regular_is_regular_and_deterministic() {
        let g = random_regular(400, 8, 3).unwrap();
        assert!(g.vertices().all(|v| g.degree(v) == 8));
        assert_eq!(random_regular(400, 8, 3).unwrap(), g);
        let h = random_regular(400, 8, 4).unwrap();
        assert_ne!(g, h);
    }

    #[test]
    fn random_regular_rejects_odd_total() {
        assert!(matches!(
            random_regular(5, 3, 0),
            Err(GenerateError::Infeasible(_))
        ));
    }
}
