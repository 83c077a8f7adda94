//! Benchmark fixtures shared by the criterion targets.

use freeconv::analytic::{uniform_grid, RationalR};
use freeconv::scalar::ratio;
use freeconv::{CumulantSequence, Rational};

/// Cumulants `κ_n = (-1)^n n / (n + 1)` as exact rationals.
pub fn rational_cumulants(order: usize) -> CumulantSequence<Rational> {
    let values = (1..=order as i64)
        .map(|n| ratio(if n % 2 == 0 { n } else { -n }, n + 1))
        .collect();
    CumulantSequence::new(values).expect("nonempty")
}

/// Semicircle ⊞ free Poisson(1/2) and a grid covering its support.
pub fn sum_model(points: usize) -> (RationalR, Vec<f64>) {
    let r = RationalR::semicircle(1.0)
        .and_then(|sc| Ok(sc.plus(&RationalR::free_poisson(0.5)?)))
        .expect("valid model");
    let (lo, hi) = r.support_bound();
    (r, uniform_grid(lo, hi, points))
}
