//! Constructing balanced clique subdivisions in graphs that expand.
//!
//! The crate walks the whole road from raw graphs to independently verified
//! certificates:
//!
//! - [`graph`], [`generate`], [`io`]: representation, generators, text formats;
//! - [`expansion`]: the sublinear expansion rate, violator search, and
//!   extraction of a bipartite expander subgraph;
//! - [`connect`]: short set-to-set paths avoiding forbidden vertices;
//! - [`onesub`]: randomized 1-subdivisions from dense asymmetric bipartite
//!   configurations;
//! - [`unit`], [`adjuster`]: the two structural gadgets — rooted star bundles
//!   and length-adjustable path families;
//! - [`assemble`]: exact-length core-to-core paths and the greedy top-level
//!   construction, plus the regime dispatcher;
//! - [`cert`]: the certificate model, verifier, brute-force oracle, and text
//!   format;
//! - [`profile`]: every scale knob in one place.
//!
//! Everything randomized takes an explicit seed; identical inputs give
//! identical outputs, byte for byte.

pub mod adjuster;
pub mod assemble;
pub mod cert;
pub mod connect;
pub mod expansion;
pub mod generate;
pub mod graph;
pub mod io;
pub mod onesub;
pub mod profile;
pub mod unit;

pub use graph::{EdgeMask, Graph, Path, VertexRemap, VertexSet};
pub use profile::ParamProfile;

/// Splits a seed into a stream of independent sub-seeds, so that stages of
/// the pipeline draw from unrelated generators.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    // splitmix64 step
    let mut z = seed ^ tag.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
