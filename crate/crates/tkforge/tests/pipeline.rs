//! End-to-end runs of the construction pipeline on mid-sized graphs.

use tkforge::assemble::{build_balanced_subdivision, find_subdivision, BranchTaken, PipelineConfig};
use tkforge::cert;
use tkforge::expansion::{extract_expander, ExpanderParams, SearchBudget};
use tkforge::generate;
use tkforge::profile::ParamProfile;

#[test]
fn balanced_subdivision_on_extracted_expander() {
    let g = generate::random_regular(8192, 16, 42).unwrap();
    let profile = ParamProfile::s0();
    let params = ExpanderParams::new(profile.eps1, profile.eps2, g.average_degree());
    let extraction =
        extract_expander(&g, g.average_degree(), &params, &SearchBudget::default()).unwrap();
    let h = &extraction.graph;
    assert!(h.bipartition().is_some());
    let out = build_balanced_subdivision(h, &profile, 7, 0).expect("assembly should succeed");
    let cert_h = out.certificate;
    assert_eq!(cert_h.order(), profile.target_t);
    assert_eq!(cert_h.internal_vertices_per_path(), profile.target_ell - 1);
    cert::verify(h, &cert_h).unwrap();
    // lift to the host graph and verify there too
    let lifted = cert_h.map_ids(|v| extraction.remap.to_old(v));
    cert::verify(&g, &lifted).unwrap();
}

#[test]
fn dispatcher_runs_expander_branch() {
    let g = generate::random_regular(8192, 16, 3).unwrap();
    let config = PipelineConfig::new(ParamProfile::s0());
    let out = find_subdivision(&g, &config, 5).expect("pipeline should succeed");
    assert_eq!(out.branch, BranchTaken::Expander);
    cert::verify(&g, &out.certificate).unwrap();
}
