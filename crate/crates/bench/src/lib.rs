//! Shared fixtures for the benchmarks.

pub use planar_vcsp;

use planar_vcsp::{Language, WeightedRelation};

/// The three-label language with a χ relation and a swap δ.
pub fn chi_delta() -> Language {
    let chi = WeightedRelation::crisp(3, 2, &[&[0, 0], &[1, 0], &[2, 1]]);
    let delta = WeightedRelation::crisp(3, 2, &[&[0, 1], &[1, 0]]);
    Language::from_pairs(3, vec![("chi", chi), ("delta", delta)]).expect("valid language")
}
