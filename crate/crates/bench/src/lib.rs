//! Fixed inputs shared by the benchmarks.

use qtop_core::catalog::{CatalogSpace, CatalogTag};
use qtop_core::domains::FinPoset;
use qtop_core::quasimetric::{powerset_qm, QMetric};
use qtop_core::FiniteSpace;

/// The quasi-metric on `P(k)` with `k` bits.
pub fn powerset_metric(k: usize) -> QMetric {
    powerset_qm(k)
}

/// A truncated ω+1 with the Alexandroff topology.
pub fn omega_space(depth: usize) -> FiniteSpace {
    CatalogSpace::new(CatalogTag::OmegaPlusOneAlexandroff, depth).to_finite()
}

/// `k` copies of the diamond stacked on top of each other.
pub fn stacked_diamonds(k: usize) -> FinPoset {
    let n = 3 * k + 1;
    FinPoset::from_fn(n, |x, y| {
        if x == y {
            return true;
        }
        let (lx, ly) = (x.div_ceil(3), y.div_ceil(3));
        lx < ly || (lx == ly && x % 3 == 0)
    })
    .expect("stacked diamonds form a poset")
}
