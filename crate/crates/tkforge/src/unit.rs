//! Units: a core vertex with equal-length spokes fanning out to disjoint
//! leaf stars. The interior (core, spokes, star centers) is what a unit
//! spends; the boundary (star leaves) is what everything else connects to.
//!
//! Units are assembled by harvesting a two-phase star forest and then growing
//! a maximal system of leaf-pool-to-leaf-pool paths until some phase-1 star
//! accumulates enough partners with paths of a common length.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::connect::{self, ConnectError, ConnectRequest};
use crate::graph::{Graph, GraphError, Path, VertexSet};
use crate::profile::ParamProfile;

#[derive(Debug, Error, PartialEq)]
pub enum UnitError {
    #[error("no vertex of degree {need} outside the avoid set (max available {have})")]
    NoStarCenter { need: usize, have: usize },
    #[error("star forest failed in phase {phase} at star {index}: {cause}")]
    ForestFailed { phase: u8, index: usize, cause: String },
    #[error("shape infeasible: {0}")]
    ShapeInfeasible(String),
    #[error("no hub emerged: best phase-1 star had {best_hub} partners, needed {threshold}")]
    NoHub { best_hub: usize, threshold: usize },
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
    #[error("connector error: {0}")]
    Connect(#[from] ConnectError),
    #[error("emitted unit failed validation: {0}")]
    InvariantBroken(String),
}

/// Target dimensions of a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitShape {
    /// Spoke count.
    pub h0: usize,
    /// Leaves per star.
    pub h1: usize,
    /// Strict upper bound on spoke length.
    pub ell_bound: usize,
}

impl UnitShape {
    pub fn new(h0: usize, h1: usize, ell_bound: usize) -> Self {
        UnitShape { h0, h1, ell_bound }
    }
}

/// A star: center plus its claimed leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Star {
    pub center: u32,
    pub leaves: Vec<u32>,
}

impl Star {
    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        std::iter::once(self.center).chain(self.leaves.iter().copied())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarPhase {
    /// Large stars: hub candidates.
    Large,
    /// Medium stars: spoke targets.
    Medium,
}

/// Pairwise vertex-disjoint stars harvested in two phases.
#[derive(Debug, Clone, Default)]
pub struct StarForest {
    pub stars: Vec<(Star, StarPhase)>,
}

impl StarForest {
    pub fn phase(&self, phase: StarPhase) -> impl Iterator<Item = (usize, &Star)> {
        self.stars
            .iter()
            .enumerate()
            .filter(move |(_, (_, p))| *p == phase)
            .map(|(i, (s, _))| (i, s))
    }

    pub fn vertex_set(&self) -> VertexSet {
        let mut s = VertexSet::new();
        for (star, _) in &self.stars {
            s.extend(star.vertices());
        }
        s
    }
}

/// Picks the maximum-degree vertex outside `avoid` (ties toward the lowest
/// id) and claims its lowest-id available neighbors as leaves.
pub fn harvest_star(
    g: &Graph,
    avoid: &VertexSet,
    leaf_count: usize,
) -> Result<Star, UnitError> {
    let mark = avoid.to_mark(g.vertex_count());
    let mut best: Option<(usize, u32)> = None;
    for v in g.vertices() {
        if mark[v as usize] {
            continue;
        }
        let deg = g.neighbors(v).iter().filter(|&&w| !mark[w as usize]).count();
        let better = match best {
            None => true,
            Some((bd, _)) => deg > bd,
        };
        if better {
            best = Some((deg, v));
        }
    }
    match best {
        Some((deg, center)) if deg >= leaf_count => {
            let leaves: Vec<u32> = g
                .neighbors(center)
                .iter()
                .copied()
                .filter(|&w| !mark[w as usize])
                .take(leaf_count)
                .collect();
            Ok(Star { center, leaves })
        }
        Some((deg, _)) => Err(UnitError::NoStarCenter { need: leaf_count, have: deg }),
        None => Err(UnitError::NoStarCenter { need: leaf_count, have: 0 }),
    }
}

/// Harvests `phase1.0` stars with `phase1.1` leaves, then `phase2.0` stars
/// with `phase2.1` leaves, every harvested vertex joining the avoid set for
/// the remaining harvests.
pub fn build_star_forest(
    g: &Graph,
    avoid: &VertexSet,
    phase1: (usize, usize),
    phase2: (usize, usize),
) -> Result<StarForest, UnitError> {
    if phase1.1 < phase2.1 {
        return Err(UnitError::ShapeInfeasible(format!(
            "phase-1 stars ({}) must be at least as large as phase-2 stars ({})",
            phase1.1, phase2.1
        )));
    }
    let mut forest = StarForest::default();
    let mut blocked = avoid.clone();
    for (phase_no, (count, leaves), tag) in
        [(1u8, phase1, StarPhase::Large), (2u8, phase2, StarPhase::Medium)]
    {
        for index in 0..count {
            let star = harvest_star(g, &blocked, leaves).map_err(|e| UnitError::ForestFailed {
                phase: phase_no,
                index,
                cause: e.to_string(),
            })?;
            blocked.extend(star.vertices());
            forest.stars.push((star, tag));
        }
    }
    Ok(forest)
}

/// A core vertex with `h0` equal-length spokes, each ending at the center of
/// its own leaf star.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unit {
    core: u32,
    /// `spokes[i]` runs from the core to `stars[i].center`.
    spokes: Vec<Path>,
    stars: Vec<Star>,
}

impl Unit {
    pub fn new(core: u32, spokes: Vec<Path>, stars: Vec<Star>) -> Self {
        Unit { core, spokes, stars }
    }

    pub fn core(&self) -> u32 {
        self.core
    }

    pub fn h0(&self) -> usize {
        self.spokes.len()
    }

    pub fn spokes(&self) -> &[Path] {
        &self.spokes
    }

    pub fn stars(&self) -> &[Star] {
        &self.stars
    }

    /// Common spoke length.
    pub fn spoke_length(&self) -> usize {
        self.spokes.first().map_or(0, Path::len)
    }

    /// Core, spoke vertices, and star centers.
    pub fn interior(&self) -> VertexSet {
        let mut s = VertexSet::singleton(self.core);
        for spoke in &self.spokes {
            s.extend(spoke.vertices().iter().copied());
        }
        s
    }

    /// Star leaves.
    pub fn boundary(&self) -> VertexSet {
        let mut s = VertexSet::new();
        for star in &self.stars {
            s.extend(star.leaves.iter().copied());
        }
        s
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.interior().union(&self.boundary())
    }

    /// Index of the star owning `leaf`.
    pub fn star_of_leaf(&self, leaf: u32) -> Option<usize> {
        self.stars.iter().position(|s| s.leaves.contains(&leaf))
    }

    /// Path from the core through spoke `idx` to `leaf` of that spoke's star.
    pub fn core_to_leaf(&self, idx: usize, leaf: u32) -> Path {
        debug_assert!(self.stars[idx].leaves.contains(&leaf));
        let mut verts = self.spokes[idx].vertices().to_vec();
        verts.push(leaf);
        Path::new(verts)
    }

    /// Unit with the given spoke/star bundles removed.
    pub fn without_stars(&self, drop: &BTreeSet<usize>) -> Unit {
        let keep = |i: &usize| !drop.contains(i);
        Unit {
            core: self.core,
            spokes: self
                .spokes
                .iter()
                .enumerate()
                .filter(|(i, _)| keep(i))
                .map(|(_, p)| p.clone())
                .collect(),
            stars: self
                .stars
                .iter()
                .enumerate()
                .filter(|(i, _)| keep(i))
                .map(|(_, s)| s.clone())
                .collect(),
        }
    }

    /// Unit keeping only the first `count` spoke/star bundles.
    pub fn truncated(&self, count: usize) -> Unit {
        Unit {
            core: self.core,
            spokes: self.spokes[..count.min(self.spokes.len())].to_vec(),
            stars: self.stars[..count.min(self.stars.len())].to_vec(),
        }
    }

    /// Leaves reachable from the core through spokes untouched by `avoid`
    /// (the leaf itself must also be clear).
    pub fn usable_boundary(&self, avoid: &VertexSet) -> VertexSet {
        let mut out = VertexSet::new();
        for (i, spoke) in self.spokes.iter().enumerate() {
            if spoke.vertices()[1..].iter().any(|&v| avoid.contains(v)) {
                continue;
            }
            out.extend(self.stars[i].leaves.iter().copied().filter(|&l| !avoid.contains(l)));
        }
        out
    }

    /// Checks every unit invariant: spoke structure and equal length below
    /// the bound, star sizes, disjointness, and avoidance of `avoid`.
    pub fn validate(
        &self,
        g: &Graph,
        h1: usize,
        ell_bound: usize,
        avoid: &VertexSet,
    ) -> Result<(), UnitError> {
        let fail = |msg: String| Err(UnitError::InvariantBroken(msg));
        if self.spokes.is_empty() || self.spokes.len() != self.stars.len() {
            return fail("spoke and star counts differ or are zero".into());
        }
        let s = self.spoke_length();
        if s < 1 || s >= ell_bound {
            return fail(format!("spoke length {s} outside [1, {ell_bound})"));
        }
        let mut spoke_vertices = VertexSet::singleton(self.core);
        for (spoke, star) in self.spokes.iter().zip(&self.stars) {
            if spoke.len() != s {
                return fail(format!("spoke lengths differ: {} vs {s}", spoke.len()));
            }
            if spoke.first() != self.core {
                return fail(format!("spoke does not start at the core {}", self.core));
            }
            if spoke.last() != star.center {
                return fail("spoke does not end at its star center".into());
            }
            if let Err(e) = spoke.validate(g) {
                return fail(format!("spoke invalid: {e}"));
            }
            for &v in &spoke.vertices()[1..] {
                if !spoke_vertices.insert(v) {
                    return fail(format!("spokes share non-core vertex {v}"));
                }
            }
        }
        let mut leaves = VertexSet::new();
        for star in &self.stars {
            if star.leaves.len() != h1 {
                return fail(format!(
                    "star at {} has {} leaves, expected {h1}",
                    star.center,
                    star.leaves.len()
                ));
            }
            for &l in &star.leaves {
                if !g.has_edge(star.center, l) {
                    return fail(format!("star edge {}-{l} missing", star.center));
                }
                if !leaves.insert(l) {
                    return fail(format!("leaf {l} shared between stars"));
                }
            }
        }
        if !leaves.is_disjoint(&spoke_vertices) {
            return fail("a leaf lies on a spoke".into());
        }
        let interior = self.interior();
        if interior.len() > self.spokes.len() * ell_bound + 1 {
            return fail(format!(
                "interior has {} vertices, exceeding {}",
                interior.len(),
                self.spokes.len() * ell_bound + 1
            ));
        }
        let all = interior.union(&leaves);
        if let Some(v) = all.iter().find(|&v| avoid.contains(v)) {
            return fail(format!("unit touches avoided vertex {v}"));
        }
        Ok(())
    }
}

/// Builds a unit of the given shape in `g - avoid`.
///
/// Star forest first; then the pools of unused phase-1 and phase-2 leaves are
/// connected repeatedly (each found path consuming its endpoints and claiming
/// its vertices) and each path is attributed to its star pair. When a phase-1
/// star reaches the hub threshold of distinct partners, an equal-raw-length
/// subfamily of at least `h0` of its paths is sought; success turns the hub
/// center into the core, the paths into spokes, and the partner stars
/// (trimmed to `h1` surviving leaves) into the unit's stars.
pub fn assemble_unit(
    g: &Graph,
    avoid: &VertexSet,
    shape: UnitShape,
    profile: &ParamProfile,
) -> Result<Unit, UnitError> {
    if shape.ell_bound < 4 {
        return Err(UnitError::ShapeInfeasible(format!(
            "spokes run center-leaf-...-leaf-center, so ell_bound must be at least 4, got {}",
            shape.ell_bound
        )));
    }
    let raw_cap = profile.unit_connect_cap.min(shape.ell_bound - 3);
    if raw_cap == 0 {
        return Err(UnitError::ShapeInfeasible("connector cap collapsed to zero".into()));
    }
    if profile.unit_phase2_leaves < shape.h1 {
        return Err(UnitError::ShapeInfeasible(format!(
            "phase-2 stars carry {} leaves but the shape needs h1 = {}",
            profile.unit_phase2_leaves, shape.h1
        )));
    }
    let threshold = profile.unit_hub_threshold.max(shape.h0);
    let forest = build_star_forest(
        g,
        avoid,
        (profile.unit_phase1_count, profile.unit_phase1_leaves),
        (profile.unit_phase2_count, profile.unit_phase2_leaves),
    )?;

    let mut pool1: BTreeMap<u32, usize> = BTreeMap::new();
    let mut pool2: BTreeMap<u32, usize> = BTreeMap::new();
    let mut centers = VertexSet::new();
    for (i, (star, phase)) in forest.stars.iter().enumerate() {
        centers.insert(star.center);
        let pool = match phase {
            StarPhase::Large => &mut pool1,
            StarPhase::Medium => &mut pool2,
        };
        for &l in &star.leaves {
            pool.insert(l, i);
        }
    }

    let mut used = VertexSet::new();
    let mut pairs: BTreeMap<(usize, usize), Path> = BTreeMap::new();
    let mut partners: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    let mut best_hub = 0usize;

    loop {
        if pool1.is_empty() || pool2.is_empty() {
            break;
        }
        let req = ConnectRequest::new(
            pool1.keys().copied().collect(),
            pool2.keys().copied().collect(),
            avoid.union(&centers).union(&used),
            raw_cap,
        );
        let path = match connect::connect(g, &req) {
            Ok(p) => p,
            Err(ConnectError::Disconnected | ConnectError::LengthExceeded { .. }) => break,
            Err(e) => return Err(e.into()),
        };
        let (a, b) = (path.first(), path.last());
        let i = pool1.remove(&a).expect("path starts in the phase-1 pool");
        let j = pool2.remove(&b).expect("path ends in the phase-2 pool");
        used.extend(path.vertices().iter().copied());
        let hub_size = {
            let set = partners.entry(i).or_default();
            if let std::collections::btree_map::Entry::Vacant(e) = pairs.entry((i, j)) {
                e.insert(path);
                set.insert(j);
            }
            set.len()
        };
        best_hub = best_hub.max(hub_size);
        if hub_size >= threshold {
            if let Some(unit) =
                try_emit(g, &forest, &pairs, i, shape, &used)
            {
                unit.validate(g, shape.h1, shape.ell_bound, avoid)
                    .map_err(|e| UnitError::InvariantBroken(e.to_string()))?;
                return Ok(unit);
            }
        }
    }
    Err(UnitError::NoHub { best_hub, threshold })
}

/// Attempts to emit a unit around hub `i`: partners with enough surviving
/// leaves, an equal-length subfamily of their paths, spokes and trimmed stars.
fn try_emit(
    g: &Graph,
    forest: &StarForest,
    pairs: &BTreeMap<(usize, usize), Path>,
    i: usize,
    shape: UnitShape,
    used: &VertexSet,
) -> Option<Unit> {
    let hub = &forest.stars[i].0;
    let mut viable: Vec<(usize, Path)> = Vec::new();
    let mut survivors: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for (&(pi, pj), path) in pairs.range((i, 0)..(i + 1, 0)) {
        debug_assert_eq!(pi, i);
        let star = &forest.stars[pj].0;
        let alive: Vec<u32> = star
            .leaves
            .iter()
            .copied()
            .filter(|&l| !used.contains(l))
            .collect();
        if alive.len() >= shape.h1 {
            survivors.insert(pj, alive);
            viable.push((pj, path.clone()));
        }
    }
    if viable.len() < shape.h0 {
        return None;
    }
    let raw_paths: Vec<Path> = viable.iter().map(|(_, p)| p.clone()).collect();
    let family = connect::equal_length_subfamily(&raw_paths, shape.h0).ok()?;
    let family_len = family[0].len();
    let mut chosen: Vec<(usize, &Path)> = viable
        .iter()
        .filter(|(_, p)| p.len() == family_len)
        .map(|(j, p)| (*j, p))
        .collect();
    chosen.sort_by_key(|(j, _)| *j);
    chosen.truncate(shape.h0);
    if chosen.len() < shape.h0 {
        return None;
    }
    let mut spokes = Vec::with_capacity(shape.h0);
    let mut stars = Vec::with_capacity(shape.h0);
    for (j, raw) in chosen {
        let star = &forest.stars[j].0;
        let mut verts = Vec::with_capacity(raw.len() + 3);
        verts.push(hub.center);
        verts.extend_from_slice(raw.vertices());
        verts.push(star.center);
        spokes.push(Path::new(verts));
        let mut leaves = survivors[&j].clone();
        leaves.truncate(shape.h1);
        stars.push(Star { center: star.center, leaves });
    }
    let unit = Unit::new(hub.center, spokes, stars);
    debug_assert!(unit.spokes.iter().all(|s| s.validate(g).is_ok()));
    Some(unit)
}
