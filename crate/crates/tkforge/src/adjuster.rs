//! Adjusters: two units joined by a family of core-to-core paths whose
//! lengths form a step-2 arithmetic progression. Routing through an adjuster
//! buys the freedom to tune a path's length in steps of two within the
//! progression's span.
//!
//! The simple builder produces a two-path adjuster (lengths L and L+2) from
//! three freshly built units; chaining composes simple adjusters end to end,
//! gaining one progression step per link, until the length lands in a target
//! window.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::cert::SubdivisionCertificate;
use crate::connect::{self, ConnectError, ConnectRequest};
use crate::graph::{Graph, GraphError, Path, VertexSet};
use crate::onesub::{self, OnesubError};
use crate::profile::ParamProfile;
use crate::unit::{assemble_unit, Unit, UnitError, UnitShape};

#[derive(Debug, Error, PartialEq)]
pub enum AdjusterError {
    #[error("unit building failed at stage '{stage}': {source}")]
    Unit { stage: &'static str, source: UnitError },
    #[error("family harvest failed: {0}")]
    FamilyHarvest(String),
    #[error("connector failed at stage '{stage}': {source}")]
    Connect { stage: &'static str, source: ConnectError },
    #[error("both cases exhausted: {0}")]
    CasesExhausted(String),
    #[error("a dense 1-subdivision surfaced while filtering endpoints")]
    EarlyOnesub(SubdivisionCertificate),
    #[error("window [{lo}, {hi}] narrower than the per-step cap {step_cap}")]
    InvalidWindow { lo: usize, hi: usize, step_cap: usize },
    #[error("chain length {length} overshot the window top {hi}")]
    Overshoot { length: usize, hi: usize },
    #[error("step grew the length by {got}, cap is {cap}")]
    StepTooLarge { got: usize, cap: usize },
    #[error("unit trimming at stage '{stage}' dropped below the required spoke count")]
    TrimExhausted { stage: String },
    #[error("emitted adjuster failed validation: {0}")]
    InvariantBroken(String),
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
}

/// Two units plus a step-2 length progression of core-to-core paths.
#[derive(Debug, Clone, PartialEq)]
pub struct Adjuster {
    pub v1: u32,
    pub v2: u32,
    pub f1: Unit,
    pub f2: Unit,
    /// Unit-size factor relative to the profile's base spoke count.
    pub z: f64,
    pub a_set: VertexSet,
    /// Sorted by length ascending; lengths are `l', l'+2, ..., l'+2k`.
    pub paths: Vec<Path>,
}

impl Adjuster {
    /// Progression step count; the path count is `k() + 1`.
    pub fn k(&self) -> usize {
        self.paths.len() - 1
    }

    /// Length of the longest path.
    pub fn length(&self) -> usize {
        self.paths.last().map_or(0, Path::len)
    }

    pub fn shortest(&self) -> usize {
        self.paths.first().map_or(0, Path::len)
    }

    /// The vertices the adjuster occupies besides unit boundaries.
    pub fn perimeter(&self) -> VertexSet {
        self.a_set.union(&self.f1.interior()).union(&self.f2.interior())
    }

    /// Picks the progression path of exactly `len` edges, if present.
    pub fn path_of_length(&self, len: usize) -> Option<&Path> {
        self.paths.iter().find(|p| p.len() == len)
    }

    /// Checks every adjuster invariant against `g`; `base_h0` is the unit
    /// scale the `z` factor is measured against.
    pub fn validate(
        &self,
        g: &Graph,
        profile: &ParamProfile,
        caller_avoid: &VertexSet,
    ) -> Result<(), AdjusterError> {
        let fail = |msg: String| Err(AdjusterError::InvariantBroken(msg));
        if self.paths.is_empty() {
            return fail("no paths".into());
        }
        let shortest = self.paths[0].len();
        for (i, p) in self.paths.iter().enumerate() {
            if p.len() != shortest + 2 * i {
                return fail(format!(
                    "lengths break the step-2 progression at index {i}: {} vs {}",
                    p.len(),
                    shortest + 2 * i
                ));
            }
            if p.first() != self.v1 || p.last() != self.v2 {
                return fail(format!("path {i} does not join {} to {}", self.v1, self.v2));
            }
            if let Err(e) = p.validate(g) {
                return fail(format!("path {i} invalid: {e}"));
            }
            for &v in p.interior() {
                if !self.a_set.contains(v) {
                    return fail(format!("path {i} leaves the A-set at vertex {v}"));
                }
            }
        }
        if self.a_set.len() > 2 * self.length() {
            return fail(format!(
                "A-set has {} vertices, exceeding twice the length {}",
                self.a_set.len(),
                self.length()
            ));
        }
        for (name, unit, core) in [("first", &self.f1, self.v1), ("second", &self.f2, self.v2)] {
            if unit.core() != core {
                return fail(format!("{name} unit core mismatch"));
            }
            if let Err(e) =
                unit.validate(g, profile.unit_h1, profile.unit_spoke_bound, caller_avoid)
            {
                return fail(format!("{name} unit invalid: {e}"));
            }
            if !self.a_set.is_disjoint(&unit.vertex_set()) {
                return fail(format!("A-set touches the {name} unit"));
            }
        }
        if !self.f1.interior().is_disjoint(&self.f2.interior()) {
            return fail("unit interiors intersect".into());
        }
        let min_h0 = self.f1.h0().min(self.f2.h0());
        if min_h0 < profile.adj_h0_base {
            return fail(format!(
                "units trimmed below the base spoke count: {min_h0} < {}",
                profile.adj_h0_base
            ));
        }
        let z = unit_factor(min_h0, profile.adj_h0_base);
        if (z - self.z).abs() > 1e-9 || !(1.0..=3.0).contains(&self.z) {
            return fail(format!("z factor {} inconsistent with spoke counts", self.z));
        }
        if let Some(v) = self.perimeter().iter().find(|&v| caller_avoid.contains(v)) {
            return fail(format!("perimeter touches avoided vertex {v}"));
        }
        Ok(())
    }
}

fn unit_factor(h0: usize, base: usize) -> f64 {
    (h0 as f64 / base.max(1) as f64).min(3.0)
}

/// Debug dump of the adjuster's structure as text.
pub fn describe(adj: &Adjuster) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    writeln!(
        s,
        "adjuster {} -> {}: k={}, length={}, z={:.2}",
        adj.v1,
        adj.v2,
        adj.k(),
        adj.length(),
        adj.z
    )
    .unwrap();
    writeln!(s, "  lengths: {:?}", adj.paths.iter().map(Path::len).collect::<Vec<_>>()).unwrap();
    writeln!(s, "  |A| = {}, perimeter = {}", adj.a_set.len(), adj.perimeter().len()).unwrap();
    writeln!(
        s,
        "  units: {} spokes x length {} / {} spokes x length {}",
        adj.f1.h0(),
        adj.f1.spoke_length(),
        adj.f2.h0(),
        adj.f2.spoke_length()
    )
    .unwrap();
    s
}

fn adj_unit_shape(profile: &ParamProfile) -> UnitShape {
    UnitShape::new(profile.adj_unit_h0, profile.unit_h1, profile.unit_spoke_bound)
}

/// Builds a two-path adjuster in `g - avoid`: three units, a disjoint family
/// of boundary-to-boundary paths, and one of two route surgeries producing a
/// pair of core-to-core paths whose lengths differ by exactly two.
///
/// The family is harvested one first-unit star at a time: both surgeries want
/// two equal-length paths leaving one star, and concentrating a star's whole
/// leaf set makes such a pair a pigeonhole consequence rather than a
/// coincidence.
pub fn build_simple_adjuster(
    g: &Graph,
    avoid: &VertexSet,
    profile: &ParamProfile,
) -> Result<Adjuster, AdjusterError> {
    let shape = adj_unit_shape(profile);
    let stage = |stage, source| AdjusterError::Unit { stage, source };
    let f1 = assemble_unit(g, avoid, shape, profile).map_err(|e| stage("first unit", e))?;
    let w0 = avoid.union(&f1.vertex_set());
    let f2 = assemble_unit(g, &w0, shape, profile).map_err(|e| stage("second unit", e))?;
    let w1 = w0.union(&f2.vertex_set());
    let f3 = assemble_unit(g, &w1, shape, profile).map_err(|e| stage("spare unit", e))?;

    let forbidden = avoid
        .union(&f1.interior())
        .union(&f2.interior())
        .union(&f3.interior());
    let all_boundaries = f1.boundary().union(&f2.boundary()).union(&f3.boundary());

    let mut all_paths: Vec<Path> = Vec::new();
    let mut used = VertexSet::new();
    let mut last_failure =
        AdjusterError::CasesExhausted("no equal-length class was usable".into());
    // harvest star against star: within one pair every path has the same
    // parity, so a handful of paths pins two of equal length
    for star in f1.stars() {
        for target_star in f2.stars() {
            let sources: VertexSet =
                star.leaves.iter().copied().filter(|&l| !used.contains(l)).collect();
            let targets: VertexSet = target_star
                .leaves
                .iter()
                .copied()
                .filter(|&l| !used.contains(l))
                .collect();
            if sources.is_empty() || targets.is_empty() {
                continue;
            }
            // other stars' leaves are off limits so no harvested path can
            // cost a unit a spoke later
            let shielded = all_boundaries.minus(&sources).minus(&targets);
            let harvest = connect::connect_many_disjoint(
                g,
                &sources,
                &targets,
                &forbidden.union(&used).union(&shielded),
                profile.adj_family_count.min(sources.len()).min(targets.len()),
                profile.adj_family_cap,
            )
            .map_err(|e| AdjusterError::Connect { stage: "family harvest", source: e })?;
            if harvest.paths.is_empty() {
                continue;
            }
            for p in &harvest.paths {
                used.extend(p.vertices().iter().copied());
            }
            all_paths.extend(harvest.paths);
            // classes over everything harvested so far, biggest first, ties
            // toward the shorter length
            for class in length_classes(&all_paths) {
                if class.len() < 2 {
                    continue;
                }
                let by_endpoint: BTreeMap<u32, &Path> =
                    class.iter().map(|&p| (p.first(), p)).collect();
                let b_set: VertexSet = by_endpoint.keys().copied().collect();
                if let Some(adj) =
                    case_one(g, avoid, profile, &f1, &f2, &forbidden, &by_endpoint, &b_set)
                {
                    return Ok(adj);
                }
                match case_two(g, avoid, profile, &f1, &f2, &f3, &forbidden, &by_endpoint, &b_set)
                {
                    Ok(adj) => return Ok(adj),
                    Err(e @ AdjusterError::EarlyOnesub(_)) => return Err(e),
                    Err(e) => last_failure = e,
                }
            }
        }
    }
    if connect::equal_length_subfamily(&all_paths, profile.adj_family_min_equal).is_err() {
        return Err(AdjusterError::FamilyHarvest(format!(
            "largest equal-length subfamily below {} ({} paths harvested)",
            profile.adj_family_min_equal,
            all_paths.len()
        )));
    }
    Err(last_failure)
}

fn length_classes(paths: &[Path]) -> Vec<Vec<&Path>> {
    let mut by_len: BTreeMap<usize, Vec<&Path>> = BTreeMap::new();
    for p in paths {
        by_len.entry(p.len()).or_default().push(p);
    }
    let mut classes: Vec<(usize, Vec<&Path>)> = by_len.into_iter().collect();
    classes.sort_by(|(la, pa), (lb, pb)| pb.len().cmp(&pa.len()).then(la.cmp(lb)));
    classes.into_iter().map(|(_, c)| c).collect()
}

/// Looks for an outside vertex adjacent to two family endpoints on the first
/// unit's boundary and routes both ways around it.
#[allow(clippy::too_many_arguments)]
fn case_one(
    g: &Graph,
    avoid: &VertexSet,
    profile: &ParamProfile,
    f1: &Unit,
    f2: &Unit,
    forbidden: &VertexSet,
    by_endpoint: &BTreeMap<u32, &Path>,
    b_set: &VertexSet,
) -> Option<Adjuster> {
    let unit_vertices = f1.vertex_set().union(&f2.vertex_set());
    for w in g.vertices() {
        if forbidden.contains(w) || unit_vertices.contains(w) {
            continue;
        }
        let hits: Vec<u32> = g
            .neighbors(w)
            .iter()
            .copied()
            .filter(|x| b_set.contains(*x))
            .collect();
        if hits.len() < 2 {
            continue;
        }
        for (ai, &wa) in hits.iter().enumerate() {
            for &wb in &hits[ai + 1..] {
                // route two goes through w and the second path, so w must
                // stay off that path; the family is disjoint, so w lies on at
                // most one of them
                let (w1, w2) = if by_endpoint[&wb].contains(w) { (wb, wa) } else { (wa, wb) };
                if by_endpoint[&w2].contains(w) {
                    continue;
                }
                if let Some(adj) =
                    try_case_one_pair(g, avoid, profile, f1, f2, by_endpoint, w, w1, w2)
                {
                    return Some(adj);
                }
            }
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn try_case_one_pair(
    g: &Graph,
    avoid: &VertexSet,
    profile: &ParamProfile,
    f1: &Unit,
    f2: &Unit,
    by_endpoint: &BTreeMap<u32, &Path>,
    w: u32,
    w1: u32,
    w2: u32,
) -> Option<Adjuster> {
    let p1 = by_endpoint[&w1];
    let p2 = by_endpoint[&w2];
    let i1 = f1.star_of_leaf(w1)?;
    let i2 = f1.star_of_leaf(w2)?;
    let q1 = f1.core_to_leaf(i1, w1);
    let (b1, b2) = (p1.last(), p2.last());
    let j1 = f2.star_of_leaf(b1)?;
    let j2 = f2.star_of_leaf(b2)?;
    let r1 = f2.core_to_leaf(j1, b1).reversed();
    let r2 = f2.core_to_leaf(j2, b2).reversed();

    let route_short = q1.join(p1).join(&r1);
    let route_long = q1.join(&Path::new(vec![w1, w, w2])).join(p2).join(&r2);
    debug_assert_eq!(route_long.len(), route_short.len() + 2);

    let f1_trim = drop_with_spare(f1, &[i1, i2]);
    let f2_trim = drop_with_spare(f2, &[j1, j2]);
    finish_two_route_adjuster(
        g,
        avoid,
        profile,
        f1_trim,
        f2_trim,
        route_short,
        route_long,
    )
}

/// Trims the named spoke/star bundles; when both names coincide, the
/// lowest-id spare spoke goes too.
fn drop_with_spare(unit: &Unit, named: &[usize]) -> Unit {
    let mut drop: BTreeSet<usize> = named.iter().copied().collect();
    if drop.len() < named.len() {
        if let Some(spare) = (0..unit.h0()).find(|i| !drop.contains(i)) {
            drop.insert(spare);
        }
    }
    unit.without_stars(&drop)
}

/// Shared tail of both cases: sweep unit stars hit by the route vertices,
/// assemble, and validate.
fn finish_two_route_adjuster(
    g: &Graph,
    avoid: &VertexSet,
    profile: &ParamProfile,
    f_left: Unit,
    f_right: Unit,
    route_short: Path,
    route_long: Path,
) -> Option<Adjuster> {
    let v1 = route_short.first();
    let v2 = route_short.last();
    let mut a_set = route_short.vertex_set().union(&route_long.vertex_set());
    a_set.remove(v1);
    a_set.remove(v2);
    let f_left = sweep_collisions(&f_left, &a_set);
    let f_right = sweep_collisions(&f_right, &a_set);
    let min_h0 = f_left.h0().min(f_right.h0());
    if min_h0 < profile.adj_h0_base {
        return None;
    }
    if route_long.len() > profile.adj_cap + 2 {
        return None;
    }
    let adj = Adjuster {
        v1,
        v2,
        z: unit_factor(min_h0, profile.adj_h0_base),
        f1: f_left,
        f2: f_right,
        a_set,
        paths: vec![route_short, route_long],
    };
    adj.validate(g, profile, avoid).ok()?;
    Some(adj)
}

/// Drops every spoke/star bundle that intersects `hit`.
fn sweep_collisions(unit: &Unit, hit: &VertexSet) -> Unit {
    let mut drop = BTreeSet::new();
    for i in 0..unit.h0() {
        let touches_spoke =
            unit.spokes()[i].vertices().iter().any(|&v| hit.contains(v));
        let touches_star = unit.stars()[i].vertices().any(|v| hit.contains(v));
        if touches_spoke || touches_star {
            drop.insert(i);
        }
    }
    if drop.is_empty() {
        unit.clone()
    } else {
        unit.without_stars(&drop)
    }
}

/// Endpoint filtering and the detour through the spare unit.
#[allow(clippy::too_many_arguments)]
fn case_two(
    g: &Graph,
    avoid: &VertexSet,
    profile: &ParamProfile,
    f1: &Unit,
    f2: &Unit,
    f3: &Unit,
    forbidden: &VertexSet,
    by_endpoint: &BTreeMap<u32, &Path>,
    b_set: &VertexSet,
) -> Result<Adjuster, AdjusterError> {
    // keep endpoints with under half their degree into the forbidden set
    let mut b_prime: VertexSet = b_set
        .iter()
        .filter(|&v| {
            let into = g.neighbors(v).iter().filter(|&&x| forbidden.contains(x)).count();
            2 * into < g.degree(v)
        })
        .collect();
    if b_prime.len() < profile.case2_min_endpoints {
        let heavy = b_set.minus(&b_prime);
        return Err(dichotomy(g, &heavy, forbidden, profile, b_set.len()));
    }

    // everything the kept endpoints' paths use is off limits for the detour,
    // and so are the output units' boundaries (grazing them would cost spokes)
    let mut blocked = forbidden.union(&f1.boundary()).union(&f2.boundary());
    for v in b_prime.iter() {
        blocked.extend(by_endpoint[&v].vertices().iter().copied());
    }
    let spare_pool = f3.boundary().minus(&blocked);
    if spare_pool.is_empty() {
        return Err(AdjusterError::CasesExhausted("spare boundary fully blocked".into()));
    }

    // the detour needs two kept endpoints hanging off one interior vertex of
    // the first unit; its star center serves for every same-star pair
    let mut last = AdjusterError::CasesExhausted(format!(
        "no same-star pair among the {} kept endpoints",
        b_prime.len()
    ));
    for (si, star) in f1.stars().iter().enumerate() {
        let kept: Vec<u32> =
            star.leaves.iter().copied().filter(|&l| b_prime.contains(l)).collect();
        if kept.len() < 2 {
            continue;
        }
        let _ = si;
        for &w1 in &kept {
            for &w2 in &kept {
                if w1 == w2 {
                    continue;
                }
                match try_case_two_pair(
                    g, avoid, profile, f1, f2, f3, &blocked, &spare_pool, by_endpoint,
                    star.center, w1, w2,
                ) {
                    Ok(adj) => return Ok(adj),
                    Err(e) => last = e,
                }
            }
        }
    }
    Err(last)
}

/// One detour attempt: leave `w1` for an outside vertex, reach the spare
/// unit, and come back through either `w1`'s path or `w1 - x - w2`'s path.
#[allow(clippy::too_many_arguments)]
fn try_case_two_pair(
    g: &Graph,
    avoid: &VertexSet,
    profile: &ParamProfile,
    f1: &Unit,
    f2: &Unit,
    f3: &Unit,
    blocked: &VertexSet,
    spare_pool: &VertexSet,
    by_endpoint: &BTreeMap<u32, &Path>,
    x: u32,
    w1: u32,
    w2: u32,
) -> Result<Adjuster, AdjusterError> {
    let exits: VertexSet = g
        .neighbors(w1)
        .iter()
        .copied()
        .filter(|&u| !blocked.contains(u))
        .collect();
    if exits.is_empty() {
        return Err(AdjusterError::CasesExhausted(format!(
            "endpoint {w1} has no exit outside the blocked set"
        )));
    }
    let touching = exits.intersect(spare_pool);
    let approach: Path = if let Some(u) = touching.first() {
        Path::new(vec![u])
    } else {
        let req = ConnectRequest::new(
            exits,
            spare_pool.clone(),
            blocked.clone(),
            profile.chain_connect_cap,
        );
        connect::connect(g, &req)
            .map_err(|e| AdjusterError::Connect { stage: "spare approach", source: e })?
    };
    let u = approach.first();
    let f3_leaf = approach.last();
    let p_w1 = by_endpoint[&w1];
    let p_w2 = by_endpoint[&w2];
    let j3 = f3.star_of_leaf(f3_leaf).expect("approach ends on the spare boundary");
    let q3 = f3.core_to_leaf(j3, f3_leaf);
    let (b1, b2) = (p_w1.last(), p_w2.last());
    let j1 = f2.star_of_leaf(b1).expect("family paths end on the second boundary");
    let j2 = f2.star_of_leaf(b2).expect("family paths end on the second boundary");
    let q4 = f2.core_to_leaf(j1, b1).reversed();
    let q5 = f2.core_to_leaf(j2, b2).reversed();

    let stem = q3.join(&approach.reversed());
    let route_short = stem.join(&Path::new(vec![u, w1])).join(p_w1).join(&q4);
    let route_long = stem.join(&Path::new(vec![u, w1, x, w2])).join(p_w2).join(&q5);
    debug_assert_eq!(route_long.len(), route_short.len() + 2);

    // the spare unit loses its approach star and anything the two family
    // paths graze; the second unit loses its two exit stars
    let mut f3_drop: BTreeSet<usize> = BTreeSet::from([j3]);
    for i in 0..f3.h0() {
        if f3.stars()[i]
            .leaves
            .iter()
            .any(|&l| p_w1.contains(l) || p_w2.contains(l))
        {
            f3_drop.insert(i);
        }
    }
    let f3_trim = f3.without_stars(&f3_drop);
    let f2_trim = drop_with_spare(f2, &[j1, j2]);
    finish_two_route_adjuster(g, avoid, profile, f3_trim, f2_trim, route_short, route_long)
        .ok_or_else(|| {
            AdjusterError::CasesExhausted("spare-unit route failed validation".into())
        })
}

/// The filtered-out endpoints all point into the forbidden set; if that
/// configuration is dense enough it yields a 1-subdivision instead of an
/// adjuster, short-circuiting the caller.
fn dichotomy(
    g: &Graph,
    heavy: &VertexSet,
    forbidden: &VertexSet,
    profile: &ParamProfile,
    family_size: usize,
) -> AdjusterError {
    if !heavy.is_empty() {
        let d = heavy
            .iter()
            .map(|v| g.neighbors(v).iter().filter(|&&x| forbidden.contains(x)).count())
            .min()
            .unwrap_or(0);
        if let Ok(inst) =
            onesub::AsymmetricInstance::new(g, heavy.clone(), forbidden.clone(), d)
        {
            match onesub::find_onesub_asymmetric(g, &inst, 0x0d1c, profile.dense_retries) {
                Ok(cert) => return AdjusterError::EarlyOnesub(cert),
                Err(OnesubError::RetriesExhausted { .. }) => {}
                Err(_) => {}
            }
        }
    }
    AdjusterError::CasesExhausted(format!(
        "endpoint filter left too few of the {family_size} family endpoints"
    ))
}

/// Chains simple adjusters until the length enters `[lo, hi]`.
///
/// Each link: build a fresh simple adjuster avoiding everything so far,
/// bridge the old second unit's boundary to the fresh first unit's boundary,
/// compose path families (one extra progression step per link), and trim the
/// surviving outer units clear of the accumulated path vertices.
pub fn chain_adjusters(
    g: &Graph,
    avoid: &VertexSet,
    profile: &ParamProfile,
    target_window: (usize, usize),
) -> Result<Adjuster, AdjusterError> {
    let (lo, hi) = target_window;
    if hi < lo + profile.chain_step_cap {
        return Err(AdjusterError::InvalidWindow { lo, hi, step_cap: profile.chain_step_cap });
    }
    let mut cur = build_simple_adjuster(g, avoid, profile)?;
    if cur.length() > hi {
        return Err(AdjusterError::Overshoot { length: cur.length(), hi });
    }
    if cur.length() >= lo {
        // already inside the window; hand it back untouched
        return Ok(cur);
    }
    while cur.length() < lo {
        let prev_len = cur.length();
        // both outer boundaries stay protected for the whole link, so the
        // fresh structures and the bridge cannot graze the surviving units
        let protect = cur.f1.boundary().union(&cur.f2.boundary());
        let blocked = avoid.union(&cur.perimeter()).union(&protect);
        let fresh = build_simple_adjuster(g, &blocked, profile)?;

        let hop_avoid = avoid
            .union(&cur.perimeter())
            .union(&cur.f1.boundary())
            .union(&fresh.perimeter())
            .union(&fresh.f2.boundary());
        let from = cur.f2.boundary().minus(&hop_avoid);
        let to = fresh.f1.boundary().minus(&hop_avoid).minus(&from);
        if from.is_empty() || to.is_empty() {
            return Err(AdjusterError::TrimExhausted {
                stage: "bridge endpoints eroded".into(),
            });
        }
        let req = ConnectRequest::new(from, to, hop_avoid, profile.chain_connect_cap);
        let hop = connect::connect(g, &req)
            .map_err(|e| AdjusterError::Connect { stage: "bridge", source: e })?;

        let y = hop.first();
        let x = hop.last();
        let jy = cur.f2.star_of_leaf(y).expect("bridge starts on the old boundary");
        let jx = fresh.f1.star_of_leaf(x).expect("bridge ends on the fresh boundary");
        let bridge = cur
            .f2
            .core_to_leaf(jy, y)
            .join(&hop)
            .join(&fresh.f1.core_to_leaf(jx, x).reversed());

        // one composed path per target length: reuse the old progression with
        // the fresh short path, plus one extra step from the fresh long path
        let mut paths = Vec::with_capacity(cur.paths.len() + 1);
        for old in &cur.paths {
            paths.push(old.join(&bridge).join(&fresh.paths[0]));
        }
        paths.push(cur.paths.last().unwrap().join(&bridge).join(&fresh.paths[1]));

        let mut a_set = VertexSet::new();
        for p in &paths {
            a_set.extend(p.vertices().iter().copied());
        }
        let v1 = cur.v1;
        let v2 = fresh.v2;
        a_set.remove(v1);
        a_set.remove(v2);

        let pre = (cur.f1.h0(), fresh.f2.h0());
        let f_left = sweep_collisions(&cur.f1, &a_set);
        let f_right = sweep_collisions(&fresh.f2, &a_set);
        let floor = 2 * profile.adj_h0_base;
        if f_left.h0() < floor || f_right.h0() < floor {
            return Err(AdjusterError::TrimExhausted {
                stage: format!(
                    "outer units at {}/{} spokes (were {}/{}) against floor {floor}",
                    f_left.h0(),
                    f_right.h0(),
                    pre.0,
                    pre.1
                ),
            });
        }
        let min_h0 = f_left.h0().min(f_right.h0());
        cur = Adjuster {
            v1,
            v2,
            z: unit_factor(min_h0, profile.adj_h0_base),
            f1: f_left,
            f2: f_right,
            a_set,
            paths,
        };
        let step = cur.length() - prev_len;
        if step > profile.chain_step_cap {
            return Err(AdjusterError::StepTooLarge { got: step, cap: profile.chain_step_cap });
        }
        if cur.length() > hi {
            return Err(AdjusterError::Overshoot { length: cur.length(), hi });
        }
    }
    // normalize: keep the longest chain_k+1 paths (the window holds for the
    // longest one) and trim the units to the factor-2 spoke count
    let keep = profile.chain_k.min(cur.k()) + 1;
    let start = cur.paths.len() - keep;
    cur.paths.drain(..start);
    cur.a_set = {
        let mut s = VertexSet::new();
        for p in &cur.paths {
            s.extend(p.vertices().iter().copied());
        }
        s.remove(cur.v1);
        s.remove(cur.v2);
        s
    };
    cur.f1 = cur.f1.truncated(2 * profile.adj_h0_base);
    cur.f2 = cur.f2.truncated(2 * profile.adj_h0_base);
    cur.z = unit_factor(cur.f1.h0().min(cur.f2.h0()), profile.adj_h0_base);
    cur.validate(g, profile, avoid)
        .map_err(|e| AdjusterError::InvariantBroken(format!("final chain: {e}")))?;
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    fn test_profile() -> ParamProfile {
        ParamProfile::s0()
    }

    #[test]
    fn simple_adjuster_on_hypercube() {
        let g = generate::hypercube(12).unwrap();
        let profile = test_profile();
        let avoid = VertexSet::new();
        let adj = build_simple_adjuster(&g, &avoid, &profile).unwrap();
        adj.validate(&g, &profile, &avoid).unwrap();
        assert_eq!(adj.k(), 1);
        assert_eq!(adj.length(), adj.shortest() + 2);
        assert!(adj.length() <= profile.adj_cap + 2);
        assert!(adj.a_set.len() <= 2 * adj.length());
    }

    #[test]
    fn simple_adjuster_respects_avoid() {
        let g = generate::random_regular(4096, 16, 5).unwrap();
        let profile = test_profile();
        let avoid: VertexSet = (0..64).collect();
        let adj = build_simple_adjuster(&g, &avoid, &profile).unwrap();
        adj.validate(&g, &profile, &avoid).unwrap();
        assert!(adj.perimeter().is_disjoint(&avoid));
    }

    #[test]
    fn adjuster_length_and_perimeter_accessors() {
        let g = generate::hypercube(12).unwrap();
        let profile = test_profile();
        let adj = build_simple_adjuster(&g, &VertexSet::new(), &profile).unwrap();
        assert_eq!(adj.length(), adj.paths.last().unwrap().len());
        let per = adj.perimeter();
        assert!(adj.a_set.iter().all(|v| per.contains(v)));
        assert!(adj.f1.interior().iter().all(|v| per.contains(v)));
        let text = describe(&adj);
        assert!(text.contains("k=1"));
    }

    #[test]
    fn chain_immediate_window_returns_unchanged() {
        let g = generate::hypercube(12).unwrap();
        let profile = test_profile();
        let simple = build_simple_adjuster(&g, &VertexSet::new(), &profile).unwrap();
        let len = simple.length();
        let mut p2 = profile.clone();
        p2.chain_step_cap = 10;
        let chained = chain_adjusters(&g, &VertexSet::new(), &p2, (len, len + 10)).unwrap();
        assert_eq!(chained.k(), 1);
        assert_eq!(chained.length(), len);
    }

    #[test]
    fn chain_window_validation() {
        let g = generate::hypercube(10).unwrap();
        let profile = test_profile();
        assert!(matches!(
            chain_adjusters(&g, &VertexSet::new(), &profile, (100, 101)),
            Err(AdjusterError::InvalidWindow { .. })
        ));
    }

    #[test]
    fn chain_reaches_a_window() {
        let g = generate::random_regular(4096, 16, 11).unwrap();
        let mut profile = test_profile();
        profile.chain_step_cap = 40;
        let avoid = VertexSet::new();
        let adj = chain_adjusters(&g, &avoid, &profile, (60, 120)).unwrap();
        adj.validate(&g, &profile, &avoid).unwrap();
        assert!(adj.length() >= 60 && adj.length() <= 120);
        assert!(adj.k() >= 2);
        assert!((adj.z - 2.0).abs() < 1e-9);
    }
}
