//! Scale profiles: every tunable constant of the pipeline in one place.
//!
//! The construction is parameterized by a family of scale knobs (star counts,
//! hub thresholds, length caps, chain windows, avoid-set budgets). The
//! `s0` profile is tuned for graphs with a few thousand vertices and degrees
//! in the 8-32 range. The `paper` profile records the asymptotic parameter
//! choices the construction is modeled on; its feasibility guard rejects any
//! graph a desk machine could hold, so it exists for documentation and for
//! exercising the guard itself.
//!
//! Profiles serialize as `key=value` text, one pair per line.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProfileError {
    #[error("line {line}: malformed profile entry '{entry}'")]
    Malformed { line: usize, entry: String },
    #[error("unknown profile key '{0}'")]
    UnknownKey(String),
    #[error("profile invalid: {0}")]
    Invalid(String),
    #[error("unknown builtin profile '{0}'")]
    UnknownBuiltin(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum Infeasibility {
    #[error("profile infeasible: n < K*d (n={n}, K={k}, d={d})")]
    TooSmall { n: usize, k: f64, d: f64 },
    #[error("profile infeasible: average degree {avg:.2} below floor {floor:.2}")]
    DegreeFloor { avg: f64, floor: f64 },
}

/// All scalar knobs of the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamProfile {
    pub name: String,
    /// Instance scale the profile is tuned for.
    pub n: usize,
    pub d: f64,
    pub eps1: f64,
    pub eps2: f64,
    /// Largeness constant: a graph is admissible only if n >= k_large * d.
    pub k_large: f64,
    /// Base length scale all caps are commented against.
    pub m: usize,
    /// Branch vertex count of the target subdivision.
    pub target_t: usize,
    /// Edge length of every branch path in the target subdivision (even).
    pub target_ell: usize,

    // unit construction
    pub unit_phase1_count: usize,
    pub unit_phase1_leaves: usize,
    pub unit_phase2_count: usize,
    pub unit_phase2_leaves: usize,
    pub unit_hub_threshold: usize,
    pub unit_connect_cap: usize,
    pub unit_h1: usize,
    pub unit_spoke_bound: usize,
    /// Spoke count of the units seeding the final assembly.
    pub main_unit_h0: usize,

    // adjuster construction
    pub adj_h0_base: usize,
    pub adj_unit_h0: usize,
    pub adj_family_count: usize,
    pub adj_family_min_equal: usize,
    pub adj_family_cap: usize,
    pub adj_cap: usize,
    pub case2_min_endpoints: usize,

    // adjuster chaining
    pub chain_lo: usize,
    pub chain_hi: usize,
    pub chain_step_cap: usize,
    pub chain_connect_cap: usize,
    pub chain_k: usize,
    pub chain_k_floor: usize,

    // assembly
    pub erosion_budget: usize,
    pub density_threshold: f64,
    pub sparse_degree_floor: f64,

    // search budgets
    pub exhaustive_n: usize,
    pub sample_rounds: u64,
    pub dense_retries: u32,
}

impl ParamProfile {
    /// Desk-scale default profile.
    pub fn s0() -> Self {
        ParamProfile {
            name: "s0".into(),
            n: 8192,
            d: 16.0,
            eps1: 0.001,
            eps2: 0.2,
            k_large: 4.0,
            m: 3,
            target_t: 3,
            target_ell: 500,
            unit_phase1_count: 5,
            unit_phase1_leaves: 10,
            unit_phase2_count: 32,
            unit_phase2_leaves: 8,
            unit_hub_threshold: 5,
            unit_connect_cap: 2,
            unit_h1: 4,
            unit_spoke_bound: 6,
            main_unit_h0: 3,
            adj_h0_base: 1,
            adj_unit_h0: 4,
            adj_family_count: 16,
            adj_family_min_equal: 2,
            adj_family_cap: 5,
            adj_cap: 60,
            case2_min_endpoints: 2,
            chain_lo: 200,
            chain_hi: 240,
            chain_step_cap: 40,
            chain_connect_cap: 5,
            chain_k: 64,
            chain_k_floor: 2,
            erosion_budget: 8,
            density_threshold: 0.25,
            sparse_degree_floor: 6.0,
            exhaustive_n: 20,
            sample_rounds: 200,
            dense_retries: 20,
        }
    }

    /// The asymptotic parameter regime the construction is modeled on,
    /// instantiated for a given (n, d). Not runnable at desk scale: the
    /// largeness guard rejects every graph that fits in memory.
    pub fn paper(n: usize, d: f64) -> Self {
        let m = (n as f64 / d.max(1.0)).ln().powi(4).floor().max(1.0);
        let sd = d.sqrt();
        let cap = |x: f64| x.min(1e15).max(1.0) as usize;
        ParamProfile {
            name: "paper".into(),
            n,
            d,
            eps1: 0.001,
            eps2: 0.2,
            k_large: 1e9,
            m: m as usize,
            target_t: cap(sd * m),
            target_ell: cap(80.0 * m.powi(3)),
            unit_phase1_count: cap(m.powi(40)),
            unit_phase1_leaves: cap(d / m.powi(5)),
            unit_phase2_count: cap(sd * m.powi(49)),
            unit_phase2_leaves: cap(sd * m.powi(24)),
            unit_hub_threshold: cap(sd * m.powi(8)),
            unit_connect_cap: cap(2.0 * m),
            unit_h1: cap(sd * m.powi(22)),
            unit_spoke_bound: cap(10.0 * m),
            main_unit_h0: cap(sd * m.powi(6) + 1.0),
            adj_h0_base: cap(sd * m.powi(6)),
            adj_unit_h0: cap(3.0 * sd * m.powi(6) + 2.0),
            adj_family_count: cap(d * m.powi(26)),
            adj_family_min_equal: cap(d * m.powi(25)),
            adj_family_cap: cap(m),
            adj_cap: cap(50.0 * m),
            case2_min_endpoints: 2,
            chain_lo: cap(80.0 * m.powi(3)),
            chain_hi: cap(80.0 * m.powi(3) + 80.0 * m),
            chain_step_cap: cap(80.0 * m),
            chain_connect_cap: cap(m),
            chain_k: cap(m * m),
            chain_k_floor: cap(m * m),
            erosion_budget: cap(sd * m.powi(5)),
            density_threshold: 0.25,
            sparse_degree_floor: 6.0,
            exhaustive_n: 20,
            sample_rounds: 200,
            dense_retries: 20,
        }
    }

    pub fn builtin(name: &str) -> Result<Self, ProfileError> {
        match name {
            "s0" => Ok(Self::s0()),
            "paper" => Ok(Self::paper(1 << 40, 1e6)),
            other => Err(ProfileError::UnknownBuiltin(other.into())),
        }
    }

    /// Checks the profile's internal consistency.
    pub fn validate(&self) -> Result<(), ProfileError> {
        let req = |cond: bool, msg: &str| {
            if cond {
                Ok(())
            } else {
                Err(ProfileError::Invalid(msg.into()))
            }
        };
        req(self.eps1 > 0.0 && self.eps1 < 1.0, "eps1 must be in (0,1)")?;
        req(self.eps2 > 0.0 && self.eps2 < 1.0, "eps2 must be in (0,1)")?;
        req(self.target_ell % 2 == 0, "target_ell must be even")?;
        req(self.target_t >= 2, "target_t must be at least 2")?;
        req(
            self.unit_phase1_leaves >= self.unit_phase2_leaves,
            "phase-1 stars must be at least as large as phase-2 stars",
        )?;
        req(
            self.unit_phase2_leaves >= self.unit_h1,
            "phase-2 stars must have at least h1 leaves",
        )?;
        req(
            self.unit_spoke_bound >= self.unit_connect_cap + 3,
            "spoke bound too small for the unit connect cap",
        )?;
        req(
            self.chain_hi >= self.chain_lo + self.chain_step_cap,
            "chain window narrower than the per-step cap",
        )?;
        req(self.adj_unit_h0 >= 2 * self.adj_h0_base + 2, "adjuster units too small to trim")?;
        req(
            self.main_unit_h0 + 1 >= self.target_t,
            "main units need a spoke per incident branch path",
        )?;
        req(self.adj_family_min_equal >= 2, "need at least two equal-length family paths")?;
        Ok(())
    }

    /// Largeness guard for running the pipeline on a graph of order `n` and
    /// average degree `avg`.
    pub fn feasible_for(&self, n: usize, avg: f64) -> Result<(), Infeasibility> {
        let d = avg.max(1.0);
        if (n as f64) < self.k_large * d {
            return Err(Infeasibility::TooSmall { n, k: self.k_large, d });
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            writeln!(s, "{k}={v}").unwrap();
        }
        s
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("name", self.name.clone()),
            ("n", self.n.to_string()),
            ("d", self.d.to_string()),
            ("eps1", self.eps1.to_string()),
            ("eps2", self.eps2.to_string()),
            ("k_large", self.k_large.to_string()),
            ("m", self.m.to_string()),
            ("target_t", self.target_t.to_string()),
            ("target_ell", self.target_ell.to_string()),
            ("unit_phase1_count", self.unit_phase1_count.to_string()),
            ("unit_phase1_leaves", self.unit_phase1_leaves.to_string()),
            ("unit_phase2_count", self.unit_phase2_count.to_string()),
            ("unit_phase2_leaves", self.unit_phase2_leaves.to_string()),
            ("unit_hub_threshold", self.unit_hub_threshold.to_string()),
            ("unit_connect_cap", self.unit_connect_cap.to_string()),
            ("unit_h1", self.unit_h1.to_string()),
            ("unit_spoke_bound", self.unit_spoke_bound.to_string()),
            ("main_unit_h0", self.main_unit_h0.to_string()),
            ("adj_h0_base", self.adj_h0_base.to_string()),
            ("adj_unit_h0", self.adj_unit_h0.to_string()),
            ("adj_family_count", self.adj_family_count.to_string()),
            ("adj_family_min_equal", self.adj_family_min_equal.to_string()),
            ("adj_family_cap", self.adj_family_cap.to_string()),
            ("adj_cap", self.adj_cap.to_string()),
            ("case2_min_endpoints", self.case2_min_endpoints.to_string()),
            ("chain_lo", self.chain_lo.to_string()),
            ("chain_hi", self.chain_hi.to_string()),
            ("chain_step_cap", self.chain_step_cap.to_string()),
            ("chain_connect_cap", self.chain_connect_cap.to_string()),
            ("chain_k", self.chain_k.to_string()),
            ("chain_k_floor", self.chain_k_floor.to_string()),
            ("erosion_budget", self.erosion_budget.to_string()),
            ("density_threshold", self.density_threshold.to_string()),
            ("sparse_degree_floor", self.sparse_degree_floor.to_string()),
            ("exhaustive_n", self.exhaustive_n.to_string()),
            ("sample_rounds", self.sample_rounds.to_string()),
            ("dense_retries", self.dense_retries.to_string()),
        ]
    }

    /// Parses `key=value` text. Unspecified keys default to the `s0` values.
    pub fn from_text(text: &str) -> Result<Self, ProfileError> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content.split_once('=').ok_or_else(|| ProfileError::Malformed {
                line,
                entry: content.to_string(),
            })?;
            map.insert(k.trim().to_string(), (line, v.trim().to_string()));
        }
        let mut p = Self::s0();
        for (key, (line, value)) in &map {
            let bad = || ProfileError::Malformed { line: *line, entry: format!("{key}={value}") };
            macro_rules! num {
                ($field:ident) => {
                    p.$field = value.parse().map_err(|_| bad())?
                };
            }
            match key.as_str() {
                "name" => p.name = value.clone(),
                "n" => num!(n),
                "d" => num!(d),
                "eps1" => num!(eps1),
                "eps2" => num!(eps2),
                "k_large" => num!(k_large),
                "m" => num!(m),
                "target_t" => num!(target_t),
                "target_ell" => num!(target_ell),
                "unit_phase1_count" => num!(unit_phase1_count),
                "unit_phase1_leaves" => num!(unit_phase1_leaves),
                "unit_phase2_count" => num!(unit_phase2_count),
                "unit_phase2_leaves" => num!(unit_phase2_leaves),
                "unit_hub_threshold" => num!(unit_hub_threshold),
                "unit_connect_cap" => num!(unit_connect_cap),
                "unit_h1" => num!(unit_h1),
                "unit_spoke_bound" => num!(unit_spoke_bound),
                "main_unit_h0" => num!(main_unit_h0),
                "adj_h0_base" => num!(adj_h0_base),
                "adj_unit_h0" => num!(adj_unit_h0),
                "adj_family_count" => num!(adj_family_count),
                "adj_family_min_equal" => num!(adj_family_min_equal),
                "adj_family_cap" => num!(adj_family_cap),
                "adj_cap" => num!(adj_cap),
                "case2_min_endpoints" => num!(case2_min_endpoints),
                "chain_lo" => num!(chain_lo),
                "chain_hi" => num!(chain_hi),
                "chain_step_cap" => num!(chain_step_cap),
                "chain_connect_cap" => num!(chain_connect_cap),
                "chain_k" => num!(chain_k),
                "chain_k_floor" => num!(chain_k_floor),
                "erosion_budget" => num!(erosion_budget),
                "density_threshold" => num!(density_threshold),
                "sparse_degree_floor" => num!(sparse_degree_floor),
                "exhaustive_n" => num!(exhaustive_n),
                "sample_rounds" => num!(sample_rounds),
                "dense_retries" => num!(dense_retries),
                other => return Err(ProfileError::UnknownKey(other.into())),
            }
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s0_is_valid_and_round_trips() {
        let p = ParamProfile::s0();
        p.validate().unwrap();
        let text = p.to_text();
        assert_eq!(ParamProfile::from_text(&text).unwrap(), p);
    }

    #[test]
    fn paper_profile_rejects_small_graphs() {
        let p = ParamProfile::builtin("paper").unwrap();
        assert!(matches!(p.feasible_for(5, 4.0), Err(Infeasibility::TooSmall { .. })));
    }

    #[test]
    fn partial_text_overrides_defaults() {
        let p = ParamProfile::from_text("target_t=4\n# tweak\nchain_lo=100\nchain_hi=200\n").unwrap();
        assert_eq!(p.target_t, 4);
        assert_eq!(p.chain_lo, 100);
        assert_eq!(p.unit_h1, ParamProfile::s0().unit_h1);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(matches!(
            ParamProfile::from_text("nonsense=3"),
            Err(ProfileError::UnknownKey(_))
        ));
    }
}
