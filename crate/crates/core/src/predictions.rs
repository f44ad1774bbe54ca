//! The benchmarks observed counts are compared with.

use crate::count::{psi_sieve, sieving_set};
use crate::dickman::{DickmanTable, U_MAX};
use crate::float::{exp, floor, ln};
use crate::primes::PrimeSet;
use crate::{Budget, Descriptor, Result, EXP_GAMMA};

/// `u_P = ∏_{p∈E} (1 − 1/p)^{-1}` with `E` the primes `≤ x` outside `P`.
pub fn u_of(p: &PrimeSet, x: u64, budget: &Budget) -> Result<f64> {
    let e = sieving_set(x, p, budget)?;
    Ok(1.0 / PrimeSet::with_parts(x, e, Descriptor::ExplicitList).euler_product())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredictionReport {
    pub x: u64,
    pub u_p: f64,
    /// `x ∏_{p∈E}(1 − 1/p)`.
    pub expected: f64,
    /// `e^γ x / u_P`.
    pub hall_upper: f64,
    /// `x ρ(u_P)`; zero when `u_P` is beyond the tabulated range.
    pub hildebrand_lower: f64,
    pub observed: u64,
    /// `observed / expected`.
    pub ratio: f64,
}

/// Fills every benchmark for `Ψ(x;P)`.
pub fn benchmark(
    x: u64,
    p: &PrimeSet,
    table: &DickmanTable,
    budget: &Budget,
) -> Result<PredictionReport> {
    let u_p = u_of(p, x, budget)?;
    let observed = psi_sieve(x, p, budget)?.value;
    let xf = x as f64;
    let expected = xf / u_p;
    let rho = if u_p <= table.u_max() {
        table.eval(u_p)
    } else if u_p <= U_MAX {
        DickmanTable::with_default_step(u_p)?.eval(u_p)
    } else {
        0.0
    };
    Ok(PredictionReport {
        x,
        u_p,
        expected,
        hall_upper: EXP_GAMMA * xf / u_p,
        hildebrand_lower: xf * rho,
        observed,
        ratio: observed as f64 / expected,
    })
}

/// `⌊x^{1/u}⌋`, exact when `u` is an integer.
pub fn root_floor(x: u64, u: f64) -> u64 {
    let mut r = floor(exp(ln(x as f64) / u)) as u64;
    if u == floor(u) && u >= 1.0 {
        let k = u as u32;
        let fits = |r: u64| r.checked_pow(k).is_some_and(|v| v <= x);
        while r > 0 && !fits(r) {
            r -= 1;
        }
        while fits(r + 1) {
            r += 1;
        }
    }
    r
}

/// The extremal family `P = {p ≤ x^{1/u}}`.
pub fn smooth_family(x: u64, u: f64, budget: &Budget) -> Result<PrimeSet> {
    let y = root_floor(x, u);
    PrimeSet::range(0, y, x, budget)
}

/// `u ρ(u) (1 − 1/v)`: the limiting ratio for the large-plus-medium family.
pub fn large_medium_ratio(u: f64, v: f64, table: &DickmanTable) -> f64 {
    u * table.eval(u) * (1.0 - 1.0 / v)
}
