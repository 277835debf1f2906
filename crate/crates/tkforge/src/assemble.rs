//! Exact-length core-to-core paths through chained adjusters, the greedy
//! top-level construction of a balanced subdivision, and the regime
//! dispatcher that routes a graph to the dense, sparse, or expander pipeline.

use std::fmt;

use crate::adjuster::{self, Adjuster, AdjusterError};
use crate::cert::{self, SubdivisionCertificate};
use crate::connect::{self, ConnectRequest};
use crate::expansion::{self, ExpanderParams, SearchBudget};
use crate::graph::{Graph, Path, VertexSet};
use crate::onesub;
use crate::profile::ParamProfile;
use crate::unit::{assemble_unit, Unit, UnitShape};

/// A stage-labelled failure tree; printing is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub stage: String,
    pub reason: String,
    pub causes: Vec<Failure>,
}

impl Failure {
    pub fn new(stage: impl Into<String>, reason: impl Into<String>) -> Self {
        Failure { stage: stage.into(), reason: reason.into(), causes: Vec::new() }
    }

    pub fn with_causes(
        stage: impl Into<String>,
        reason: impl Into<String>,
        causes: Vec<Failure>,
    ) -> Self {
        Failure { stage: stage.into(), reason: reason.into(), causes }
    }

    fn render(&self, indent: usize, out: &mut String) {
        use std::fmt::Write as _;
        let pad = "  ".repeat(indent);
        let _ = writeln!(out, "{pad}{}: {}", self.stage, self.reason);
        for c in &self.causes {
            c.render(indent + 1, out);
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render(0, &mut s);
        f.write_str(s.trim_end())
    }
}

impl std::error::Error for Failure {}

/// Outcome of an exact-length path attempt; failures carry the vertices the
/// attempt consumed so a retry can steer clear of them.
#[derive(Debug)]
pub struct ExactPathFailure {
    pub failure: Failure,
    pub consumed: VertexSet,
    pub early: Option<SubdivisionCertificate>,
}

impl ExactPathFailure {
    fn plain(failure: Failure) -> Self {
        ExactPathFailure { failure, consumed: VertexSet::new(), early: None }
    }
}

/// Finds a path of exactly `target_len` edges between the cores of two units
/// in `g - avoid`.
///
/// A chained adjuster is built clear of everything, both unit boundaries are
/// connected to the adjuster's two ends, and the progression path that closes
/// the residual length exactly is spliced in.
pub fn exact_length_path(
    g: &Graph,
    avoid: &VertexSet,
    f1: &Unit,
    f2: &Unit,
    target_len: usize,
    profile: &ParamProfile,
) -> Result<Path, Box<ExactPathFailure>> {
    let fail = |stage: &str, reason: String| {
        Box::new(ExactPathFailure::plain(Failure::new(stage, reason)))
    };
    let (v1, v2) = (f1.core(), f2.core());
    if avoid.contains(v1) || avoid.contains(v2) {
        return Err(fail("preconditions", "a core vertex is inside the avoid set".into()));
    }
    if let Some(side) = g.bipartition() {
        let same_side = side[v1 as usize] == side[v2 as usize];
        let even_target = target_len % 2 == 0;
        if same_side != even_target {
            return Err(fail(
                "parity",
                format!(
                    "target length {target_len} has the wrong parity for cores on {} sides",
                    if same_side { "the same" } else { "opposite" }
                ),
            ));
        }
    }
    let eroded = f1.interior().union(&f2.interior()).intersect(avoid).len();
    if eroded > profile.erosion_budget {
        return Err(fail(
            "erosion",
            format!("avoid set meets the unit interiors in {eroded} vertices, budget {}",
                profile.erosion_budget),
        ));
    }

    let interiors = f1.interior().union(&f2.interior());
    // the chain must stay clear of both units entirely, boundaries included,
    // so the later connectors find their pools intact
    let chain_blocked = avoid
        .union(&interiors)
        .union(&f1.boundary())
        .union(&f2.boundary());
    let (s1, s2) = (f1.spoke_length(), f2.spoke_length());
    // window placed so that the maximum possible residual is exactly
    // reachable: minimal overhead is one edge per connector plus the two
    // shortest possible adjuster spokes (length 3) on each side
    let max_residual = target_len.saturating_sub(s1 + s2 + 12);
    let lo = max_residual;
    let hi = lo + profile.chain_step_cap;
    let chain = match adjuster::chain_adjusters(g, &chain_blocked, profile, (lo, hi)) {
        Ok(c) => c,
        Err(AdjusterError::EarlyOnesub(cert)) => {
            return Err(Box::new(ExactPathFailure {
                failure: Failure::new("adjuster chain", "dense 1-subdivision short-circuit"),
                consumed: VertexSet::new(),
                early: Some(cert),
            }));
        }
        Err(e) => {
            return Err(fail("adjuster chain", e.to_string()));
        }
    };

    let consumed = chain.perimeter();
    let fail_consumed = |stage: &str, reason: String| {
        Box::new(ExactPathFailure {
            failure: Failure::new(stage, reason),
            consumed: consumed.clone(),
            early: None,
        })
    };

    let q1_avoid = avoid
        .union(&interiors)
        .union(&f2.boundary())
        .union(&chain.perimeter());
    let x1_pool = f1.usable_boundary(avoid).minus(&q1_avoid);
    let y1_pool = chain.f1.boundary().minus(&q1_avoid);
    if x1_pool.is_empty() || y1_pool.is_empty() {
        return Err(fail_consumed("approach", "first boundary pool eroded away".into()));
    }
    let q1 = connect::connect(
        g,
        &ConnectRequest::new(x1_pool, y1_pool, q1_avoid, profile.chain_connect_cap),
    )
    .map_err(|e| fail_consumed("approach", format!("first connector: {e}")))?;
    let q2_avoid = avoid
        .union(&interiors)
        .union(&f1.boundary())
        .union(&chain.perimeter())
        .union(&q1.vertex_set());
    let x2_pool = f2.usable_boundary(avoid).minus(&q2_avoid);
    let y2_pool = chain.f2.boundary().minus(&q2_avoid);
    if x2_pool.is_empty() || y2_pool.is_empty() {
        return Err(fail_consumed("approach", "second boundary pool eroded away".into()));
    }
    let q2 = connect::connect(
        g,
        &ConnectRequest::new(x2_pool, y2_pool, q2_avoid, profile.chain_connect_cap),
    )
    .map_err(|e| fail_consumed("approach", format!("second connector: {e}")))?;

    splice(g, avoid, f1, f2, &chain, &q1, &q2, target_len).map_err(|f| {
        Box::new(ExactPathFailure { failure: f, consumed, early: None })
    })
}

/// Assembles core -> boundary -> adjuster -> boundary -> core and closes the
/// residual with the right progression path.
#[allow(clippy::too_many_arguments)]
fn splice(
    g: &Graph,
    avoid: &VertexSet,
    f1: &Unit,
    f2: &Unit,
    chain: &Adjuster,
    q1: &Path,
    q2: &Path,
    target_len: usize,
) -> Result<Path, Failure> {
    let r1 = {
        let leaf = q1.first();
        let idx = f1.star_of_leaf(leaf).expect("connector starts on the first boundary");
        f1.core_to_leaf(idx, leaf)
    };
    let s1 = {
        let leaf = q1.last();
        let idx = chain.f1.star_of_leaf(leaf).expect("connector ends on the adjuster boundary");
        chain.f1.core_to_leaf(idx, leaf).reversed()
    };
    let s2 = {
        let leaf = q2.last();
        let idx = chain.f2.star_of_leaf(leaf).expect("connector ends on the adjuster boundary");
        chain.f2.core_to_leaf(idx, leaf)
    };
    let r2 = {
        let leaf = q2.first();
        let idx = f2.star_of_leaf(leaf).expect("connector starts on the second boundary");
        f2.core_to_leaf(idx, leaf).reversed()
    };
    let overhead = r1.len() + q1.len() + s1.len() + s2.len() + q2.len() + r2.len();
    if overhead > target_len {
        return Err(Failure::new(
            "span",
            format!("fixed pieces already use {overhead} of {target_len} edges"),
        ));
    }
    let residual = target_len - overhead;
    if residual % 2 != chain.shortest() % 2 {
        return Err(Failure::new(
            "parity",
            format!(
                "residual {residual} cannot match the progression parity {}",
                chain.shortest() % 2
            ),
        ));
    }
    if residual < chain.shortest() || residual > chain.length() {
        return Err(Failure::new(
            "span",
            format!(
                "residual {residual} outside the progression [{}, {}]",
                chain.shortest(),
                chain.length()
            ),
        ));
    }
    let middle = chain
        .path_of_length(residual)
        .expect("progression covers every length of its parity in range");
    let full = r1
        .join(q1)
        .join(&s1)
        .join(middle)
        .join(&s2)
        .join(&q2.reversed())
        .join(&r2);
    debug_assert_eq!(full.len(), target_len);
    full.validate(g)
        .map_err(|e| Failure::new("assembly", format!("spliced path invalid: {e}")))?;
    if let Some(v) = full.interior().iter().find(|&&v| avoid.contains(v)) {
        return Err(Failure::new("assembly", format!("spliced path touches avoided vertex {v}")));
    }
    Ok(full)
}

/// Result of the top-level construction.
#[derive(Debug)]
pub struct BuildOutcome {
    pub certificate: SubdivisionCertificate,
    /// Set when the certificate came from the dense short-circuit rather than
    /// the assembly itself.
    pub early_dense: bool,
}

/// Builds the balanced subdivision in a bipartite graph: seed twice the
/// needed units, keep the ones whose cores share a side, then connect every
/// core pair with an exact-length path while a shared ledger keeps all paths
/// internally disjoint and clear of the other units' interiors.
pub fn build_balanced_subdivision(
    g: &Graph,
    profile: &ParamProfile,
    seed: u64,
    retries: u32,
) -> Result<BuildOutcome, Failure> {
    let _ = seed;
    profile
        .validate()
        .map_err(|e| Failure::new("profile", e.to_string()))?;
    profile
        .feasible_for(g.vertex_count(), g.average_degree())
        .map_err(|e| Failure::new("profile", e.to_string()))?;
    let side = g
        .bipartition()
        .ok_or_else(|| Failure::new("preconditions", "graph is not bipartite"))?;
    let t = profile.target_t;
    let shape = UnitShape::new(profile.main_unit_h0, profile.unit_h1, profile.unit_spoke_bound);

    // seed 2t units with pairwise disjoint interiors
    let mut units: Vec<Unit> = Vec::with_capacity(2 * t);
    let mut claimed = VertexSet::new();
    for i in 0..2 * t {
        let unit = assemble_unit(g, &claimed, shape, profile)
            .map_err(|e| Failure::new(format!("unit {i}"), e.to_string()))?;
        claimed = claimed.union(&unit.interior());
        units.push(unit);
    }
    // keep t cores from one side
    let zeros: Vec<Unit> =
        units.iter().filter(|u| side[u.core() as usize] == 0).cloned().collect();
    let ones: Vec<Unit> =
        units.iter().filter(|u| side[u.core() as usize] == 1).cloned().collect();
    let chosen: Vec<Unit> = if zeros.len() >= t { zeros } else { ones }
        .into_iter()
        .take(t)
        .collect();
    if chosen.len() < t {
        return Err(Failure::new(
            "unit seeding",
            format!("could not seat {t} cores on one side"),
        ));
    }

    let mut paths: Vec<((usize, usize), Path)> = Vec::new();
    for i in 0..t {
        for j in i + 1..t {
            match connect_pair(g, profile, &chosen, &paths, i, j, retries)? {
                PairOutcome::Connected(path) => paths.push(((i, j), path)),
                PairOutcome::EarlyDense(cert) => {
                    cert::verify(g, &cert)
                        .map_err(|e| Failure::new("verification", e.to_string()))?;
                    return Ok(BuildOutcome { certificate: cert, early_dense: true });
                }
            }
        }
    }
    let cores: Vec<u32> = chosen.iter().map(Unit::core).collect();
    let cert = SubdivisionCertificate::new(
        cores,
        profile.target_ell - 1,
        paths.into_iter().map(|(_, p)| p),
    )
    .map_err(|e| Failure::new("certificate", e.to_string()))?;
    cert::verify(g, &cert)
        .map_err(|e| Failure::new("verification", e.to_string()))?;
    Ok(BuildOutcome { certificate: cert, early_dense: false })
}

enum PairOutcome {
    Connected(Path),
    /// A dense 1-subdivision surfaced while building an adjuster.
    EarlyDense(SubdivisionCertificate),
}

/// Ledger for one pair: all prior path vertices except the two live cores,
/// plus every other unit's interior.
fn pair_ledger(
    chosen: &[Unit],
    paths: &[((usize, usize), Path)],
    i: usize,
    j: usize,
) -> VertexSet {
    let (vi, vj) = (chosen[i].core(), chosen[j].core());
    let mut w = VertexSet::new();
    for (_, p) in paths {
        w.extend(p.vertices().iter().copied());
    }
    w.remove(vi);
    w.remove(vj);
    for (q, unit) in chosen.iter().enumerate() {
        if q != i && q != j {
            w = w.union(&unit.interior());
        }
    }
    w
}

fn connect_pair(
    g: &Graph,
    profile: &ParamProfile,
    chosen: &[Unit],
    paths: &[((usize, usize), Path)],
    i: usize,
    j: usize,
    retries: u32,
) -> Result<PairOutcome, Failure> {
    let ledger = pair_ledger(chosen, paths, i, j);
    let mut taboo = VertexSet::new();
    let mut attempts: Vec<Failure> = Vec::new();
    for attempt in 0..=retries {
        let avoid = ledger.union(&taboo);
        match exact_length_path(g, &avoid, &chosen[i], &chosen[j], profile.target_ell, profile) {
            Ok(p) => {
                debug_assert!(p.interior().iter().all(|&v| !ledger.contains(v)));
                return Ok(PairOutcome::Connected(p));
            }
            Err(f) => {
                if let Some(cert) = f.early {
                    return Ok(PairOutcome::EarlyDense(cert));
                }
                // a failed attempt's scaffolding becomes taboo so the retry
                // builds somewhere else
                taboo = taboo.union(&f.consumed);
                attempts.push(Failure::with_causes(
                    format!("attempt {attempt}"),
                    f.failure.reason.clone(),
                    vec![f.failure],
                ));
            }
        }
    }
    Err(Failure::with_causes(
        format!("pair {i},{j}"),
        format!("every attempt failed ({} tried)", attempts.len()),
        attempts,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Auto,
    Dense,
    Expander,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Mode::Auto),
            "dense" => Ok(Mode::Dense),
            "expander" => Ok(Mode::Expander),
            other => Err(format!("unknown mode '{other}'")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub profile: ParamProfile,
    pub mode: Mode,
    pub retries: u32,
    pub budget: SearchBudget,
}

impl PipelineConfig {
    pub fn new(profile: ParamProfile) -> Self {
        PipelineConfig {
            profile,
            mode: Mode::Auto,
            retries: 0,
            budget: SearchBudget::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchTaken {
    Dense,
    Expander,
    EarlyDense,
}

impl fmt::Display for BranchTaken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BranchTaken::Dense => "dense",
            BranchTaken::Expander => "expander",
            BranchTaken::EarlyDense => "early-dense",
        })
    }
}

#[derive(Debug)]
pub struct FindOutcome {
    pub certificate: SubdivisionCertificate,
    pub branch: BranchTaken,
}

/// Dispatcher: extract an expander subgraph, then route by its density.
/// Certificates found in the extracted subgraph are lifted back to the host
/// graph's ids and re-verified there.
pub fn find_subdivision(
    g: &Graph,
    config: &PipelineConfig,
    seed: u64,
) -> Result<FindOutcome, Failure> {
    let profile = &config.profile;
    profile
        .feasible_for(g.vertex_count(), g.average_degree())
        .map_err(|e| Failure::new("profile", e.to_string()))?;
    let params = ExpanderParams::new(profile.eps1, profile.eps2, g.average_degree());
    let budget = SearchBudget { seed: crate::derive_seed(seed, 0xe8), ..config.budget };
    let extraction = expansion::extract_expander(g, g.average_degree(), &params, &budget)
        .map_err(|e| Failure::new("extraction", e.to_string()))?;
    let h = &extraction.graph;
    let remap = &extraction.remap;
    let mut branch_failures: Vec<Failure> = Vec::new();

    let dense_enough =
        h.average_degree() >= profile.density_threshold * h.vertex_count() as f64;
    if config.mode == Mode::Dense || (config.mode == Mode::Auto && dense_enough) {
        match onesub::find_onesub_dense(h, crate::derive_seed(seed, 0xde), profile.dense_retries)
        {
            Ok(cert) => {
                let lifted = cert.map_ids(|v| remap.to_old(v));
                cert::verify(g, &lifted)
                    .map_err(|e| Failure::new("verification", e.to_string()))?;
                return Ok(FindOutcome { certificate: lifted, branch: BranchTaken::Dense });
            }
            Err(e) => {
                branch_failures.push(Failure::new("dense branch", e.to_string()));
                if config.mode == Mode::Dense {
                    return Err(Failure::with_causes(
                        "find",
                        "dense branch failed",
                        branch_failures,
                    ));
                }
            }
        }
    }
    if h.average_degree() < profile.sparse_degree_floor {
        branch_failures.push(Failure::new(
            "sparse branch",
            format!(
                "extracted average degree {:.2} is below {}: sparse regime, external result, out of scope",
                h.average_degree(),
                profile.sparse_degree_floor
            ),
        ));
        return Err(Failure::with_causes("find", "no runnable branch", branch_failures));
    }
    match build_balanced_subdivision(h, profile, crate::derive_seed(seed, 0xba), config.retries) {
        Ok(out) => {
            let lifted = out.certificate.map_ids(|v| remap.to_old(v));
            cert::verify(g, &lifted)
                .map_err(|e| Failure::new("verification", e.to_string()))?;
            let branch =
                if out.early_dense { BranchTaken::EarlyDense } else { BranchTaken::Expander };
            Ok(FindOutcome { certificate: lifted, branch })
        }
        Err(f) => {
            branch_failures.push(f);
            Err(Failure::with_causes("find", "all branches failed", branch_failures))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    #[test]
    fn failure_tree_prints_deterministically() {
        let f = Failure::with_causes(
            "find",
            "all branches failed",
            vec![
                Failure::new("dense branch", "too sparse"),
                Failure::with_causes(
                    "pair 0,1",
                    "every attempt failed",
                    vec![Failure::new("span", "residual 7 outside [3, 5]")],
                ),
            ],
        );
        let text = f.to_string();
        assert_eq!(
            text,
            "find: all branches failed\n  dense branch: too sparse\n  pair 0,1: every attempt failed\n    span: residual 7 outside [3, 5]"
        );
    }

    #[test]
    fn parity_precheck_fires() {
        let g = generate::hypercube(8).unwrap();
        let profile = ParamProfile::s0();
        // hand units around two cores on opposite sides: vertex 0 and vertex 1
        let u0 = Unit::new(
            0,
            vec![Path::new(vec![0, 1])],
            vec![crate::unit::Star { center: 1, leaves: vec![3] }],
        );
        let u1 = Unit::new(
            7,
            vec![Path::new(vec![7, 6])],
            vec![crate::unit::Star { center: 6, leaves: vec![4] }],
        );
        // cores 0 (parity even) and 7 (parity odd): opposite sides, even target
        let err = exact_length_path(&g, &VertexSet::new(), &u0, &u1, 360, &profile).unwrap_err();
        assert_eq!(err.failure.stage, "parity");
    }

    #[test]
    fn profile_guard_rejects_small_graphs() {
        let g = generate::complete(5).unwrap();
        let config = PipelineConfig::new(ParamProfile::builtin("paper").unwrap());
        let err = find_subdivision(&g, &config, 1).unwrap_err();
        assert_eq!(err.stage, "profile");
        assert!(err.reason.contains("n < K*d"), "reason was: {}", err.reason);
    }

    #[test]
    fn sparse_regime_is_reported_out_of_scope() {
        let mut profile = ParamProfile::s0();
        profile.sparse_degree_floor = 100.0; // force the sparse verdict
        let g = generate::random_regular(512, 8, 3).unwrap();
        let config = PipelineConfig::new(profile);
        let err = find_subdivision(&g, &config, 1).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("sparse regime, external result, out of scope"), "got: {text}");
    }
}
