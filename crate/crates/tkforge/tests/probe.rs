//! Scratch diagnostics; run explicitly with --ignored --nocapture.

use tkforge::expansion::{extract_expander, ExpanderParams, SearchBudget};
use tkforge::generate;
use tkforge::graph::VertexSet;
use tkforge::profile::ParamProfile;
use tkforge::unit::{assemble_unit, UnitShape};

#[test]
#[ignore]
fn probe_unit_assembly_on_extracted() {
    let g = generate::random_regular(8192, 16, 42).unwrap();
    let profile = ParamProfile::s0();
    let params = ExpanderParams::new(profile.eps1, profile.eps2, g.average_degree());
    let ex = extract_expander(&g, g.average_degree(), &params, &SearchBudget::default()).unwrap();
    let h = ex.graph;
    eprintln!(
        "extracted: n={} m={} avg={:.2} min={} max={}",
        h.vertex_count(),
        h.edge_count(),
        h.average_degree(),
        h.min_degree(),
        h.max_degree()
    );
    let shape = UnitShape::new(profile.adj_unit_h0, profile.unit_h1, profile.unit_spoke_bound);
    let mut avoid = VertexSet::new();
    let mut ok = 0;
    for i in 0..30 {
        match assemble_unit(&h, &avoid, shape, &profile) {
            Ok(u) => {
                ok += 1;
                avoid = avoid.union(&u.interior());
                eprintln!("unit {i}: ok, spoke len {}, interior {}", u.spoke_length(), u.interior().len());
            }
            Err(e) => eprintln!("unit {i}: FAIL {e}"),
        }
    }
    eprintln!("{ok}/30 units");
}

#[test]
#[ignore]
fn probe_e2e_sweep() {
    let profile = ParamProfile::s0();
    let mut ok = 0;
    for seed in 1..=10u64 {
        let g = generate::random_regular(8192, 16, seed).unwrap();
        let params = ExpanderParams::new(profile.eps1, profile.eps2, g.average_degree());
        let ex =
            extract_expander(&g, g.average_degree(), &params, &SearchBudget::default()).unwrap();
        let t0 = std::time::Instant::now();
        match tkforge::assemble::build_balanced_subdivision(&ex.graph, &profile, seed, 0) {
            Ok(out) => {
                ok += 1;
                let lifted = out.certificate.map_ids(|v| ex.remap.to_old(v));
                tkforge::cert::verify(&g, &lifted).unwrap();
                eprintln!("seed {seed}: OK in {:?}", t0.elapsed());
            }
            Err(f) => eprintln!("seed {seed}: FAIL in {:?}: {}", t0.elapsed(), f.to_string().lines().last().unwrap_or("")),
        }
    }
    eprintln!("sweep: {ok}/10");
}

#[test]
#[ignore]
fn probe_simple_adjuster_on_extracted() {
    let profile = ParamProfile::s0();
    let g = generate::random_regular(8192, 16, 1).unwrap();
    let params = ExpanderParams::new(profile.eps1, profile.eps2, g.average_degree());
    let ex = extract_expander(&g, g.average_degree(), &params, &SearchBudget::default()).unwrap();
    let mut avoid = VertexSet::new();
    for i in 0..6 {
        eprintln!("adjuster {i}:");
        match tkforge::adjuster::build_simple_adjuster(&ex.graph, &avoid, &profile) {
            Ok(adj) => {
                eprintln!("  OK len={} |A|={}", adj.length(), adj.a_set.len());
                avoid = avoid.union(&adj.perimeter());
            }
            Err(e) => eprintln!("  FAIL: {e}"),
        }
    }
}

#[test]
#[ignore]
fn probe_unit_adj_sweep() {
    let profile = ParamProfile::s0();
    let (mut u_ok, mut a_ok, mut c_ok) = (0, 0, 0);
    for seed in 1..=20u64 {
        let g = generate::random_regular(4096, 16, seed).unwrap();
        let shape = UnitShape::new(profile.main_unit_h0, profile.unit_h1, profile.unit_spoke_bound);
        match assemble_unit(&g, &VertexSet::new(), shape, &profile) {
            Ok(u) => {
                u.validate(&g, profile.unit_h1, profile.unit_spoke_bound, &VertexSet::new()).unwrap();
                u_ok += 1;
            }
            Err(e) => eprintln!("seed {seed} unit: {e}"),
        }
        match tkforge::adjuster::build_simple_adjuster(&g, &VertexSet::new(), &profile) {
            Ok(adj) => {
                adj.validate(&g, &profile, &VertexSet::new()).unwrap();
                a_ok += 1;
            }
            Err(e) => eprintln!("seed {seed} simple: {e}"),
        }
        match tkforge::adjuster::chain_adjusters(
            &g,
            &VertexSet::new(),
            &profile,
            (profile.chain_lo, profile.chain_hi),
        ) {
            Ok(adj) => {
                adj.validate(&g, &profile, &VertexSet::new()).unwrap();
                assert!(adj.length() >= profile.chain_lo && adj.length() <= profile.chain_hi);
                c_ok += 1;
            }
            Err(e) => eprintln!("seed {seed} chain: {e}"),
        }
    }
    eprintln!("units {u_ok}/20, simple {a_ok}/20, chains {c_ok}/20");
}
