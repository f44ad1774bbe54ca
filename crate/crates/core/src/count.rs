//! Exact counts of unsieved integers.
//!
//! `Ψ(x;P)` counts `n ≤ x` all of whose prime factors lie in `P`; equivalently
//! the survivors in `[1, x]` after crossing out multiples of every prime in
//! `E`, the primes `≤ x` outside `P`. `n = 1` always survives.

use alloc::vec::Vec;
use core::time::Duration;

use crate::exact::{ReciprocalAccumulator, SumValue};
use crate::float::{ln, sqrt, NeumaierSum};
use crate::primes::{difference, sieve_primes, PrimeSet};
use crate::segment::{count_survivors, for_each_segment};
use crate::{Budget, Error, Result, EXP_GAMMA};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    IntervalSieve,
    SmoothDfs,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountResult {
    pub value: u64,
    pub method: Method,
    pub x: u64,
    /// Left at zero here; callers that time the work fill it in.
    pub elapsed: Duration,
}

impl CountResult {
    fn new(value: u64, method: Method, x: u64) -> Self {
        CountResult {
            value,
            method,
            x,
            elapsed: Duration::ZERO,
        }
    }
}

/// Logarithmic-weight sum `Σ 1/n` over survivors.
pub type LogWeightResult = SumValue;

/// Survivor-count limit for exact logarithmic-weight sums.
pub const EXACT_TERMS: usize = 100_000;
/// Denominator size limit (bits) for exact logarithmic-weight sums.
pub const EXACT_DEN_BITS: u64 = 1 << 16;

fn check_sieve(x: u64, budget: &Budget) -> Result<()> {
    if x > budget.sieve_ceiling || x > u32::MAX as u64 {
        return Err(Error::BudgetExceeded {
            what: "sieve interval end",
            requested: x,
            ceiling: budget.sieve_ceiling.min(u32::MAX as u64),
        });
    }
    Ok(())
}

/// Members of `P` that are `≤ x`.
fn allowed(p: &PrimeSet, x: u64) -> &[u32] {
    p.slice_in(0, x)
}

/// `E`: primes `≤ x` not in `P`.
pub fn sieving_set(x: u64, p: &PrimeSet, budget: &Budget) -> Result<Vec<u32>> {
    check_sieve(x, budget)?;
    Ok(difference(
        &sieve_primes(x, budget.segment_len),
        allowed(p, x),
    ))
}

/// `Ψ(x;P)` by crossing out multiples of `E` over a segmented array.
pub fn psi_sieve(x: u64, p: &PrimeSet, budget: &Budget) -> Result<CountResult> {
    let e = sieving_set(x, p, budget)?;
    Ok(CountResult::new(
        count_survivors(0, x, &e, budget.segment_len),
        Method::IntervalSieve,
        x,
    ))
}

/// Sorted survivors `n ≤ x` (starting with 1), by the sieve.
pub fn survivors_sieve(x: u64, p: &PrimeSet, budget: &Budget) -> Result<Vec<u64>> {
    let e = sieving_set(x, p, budget)?;
    let mut out = Vec::new();
    for_each_segment(0, x, &e, budget.segment_len, |base, alive| {
        out.extend(
            alive
                .iter()
                .enumerate()
                .filter(|(_, &a)| a != 0)
                .map(|(i, _)| base + i as u64),
        );
    });
    Ok(out)
}

/// `S(T0, T0+x; E)`: integers in `(T0, T0+x]` with no prime factor in `E`.
pub fn interval_count(t0: u64, x: u64, e: &PrimeSet, budget: &Budget) -> Result<CountResult> {
    let hi = t0.checked_add(x).ok_or(Error::Overflow("interval end"))?;
    if x > budget.sieve_ceiling {
        return Err(Error::BudgetExceeded {
            what: "interval length",
            requested: x,
            ceiling: budget.sieve_ceiling,
        });
    }
    Ok(CountResult::new(
        count_survivors(t0, hi, e.members(), budget.segment_len),
        Method::IntervalSieve,
        x,
    ))
}

struct Dfs<'a> {
    primes: &'a [u32],
    x: u64,
    nodes: u64,
    limit: u64,
}

impl Dfs<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::ExplosionGuard { budget: self.limit });
        }
        Ok(())
    }

    /// Number of `P`-smooth `n·m ≤ x` with `n` using primes from index `i` on,
    /// not counting `m` itself.
    fn count(&mut self, m: u64, i: usize) -> Result<u64> {
        self.tick()?;
        let limit = self.x / m;
        let mut total = 0u64;
        for j in i..self.primes.len() {
            let p = self.primes[j] as u64;
            if p > limit {
                break;
            }
            if p > limit / p {
                // m·p cannot be extended by any prime ≥ p: each remaining
                // prime up to x/m contributes exactly one product.
                let end = self.primes.partition_point(|&q| (q as u64) <= limit);
                total += (end - j) as u64;
                break;
            }
            let mut mp = m * p;
            while mp <= self.x {
                total += 1 + self.count(mp, j + 1)?;
                match mp.checked_mul(p) {
                    Some(next) => mp = next,
                    None => break,
                }
            }
        }
        Ok(total)
    }

    fn collect(&mut self, m: u64, i: usize, out: &mut Vec<u64>) -> Result<()> {
        self.tick()?;
        out.push(m);
        for j in i..self.primes.len() {
            let p = self.primes[j] as u64;
            if p > self.x / m {
                break;
            }
            self.collect(m * p, j, out)?;
        }
        Ok(())
    }

    /// Squarefree products of exactly `k` further primes with index ≥ `i`.
    fn count_k(&mut self, m: u64, i: usize, k: u32) -> Result<u64> {
        self.tick()?;
        let limit = self.x / m;
        if k == 1 {
            let end = self.primes.partition_point(|&q| (q as u64) <= limit);
            return Ok(end.saturating_sub(i) as u64);
        }
        let mut total = 0;
        for j in i..self.primes.len() {
            let p = self.primes[j] as u64;
            // the k primes are at least p, p+1, ...; p^k ≤ limit is necessary
            match p.checked_pow(k) {
                Some(pk) if pk <= limit => {}
                _ => break,
            }
            total += self.count_k(m * p, j + 1, k - 1)?;
        }
        Ok(total)
    }
}

/// `Ψ(x;P)` by depth-first enumeration of `P`-smooth products.
pub fn psi_dfs(x: u64, p: &PrimeSet, budget: &Budget) -> Result<CountResult> {
    if x == 0 {
        return Ok(CountResult::new(0, Method::SmoothDfs, 0));
    }
    let mut dfs = Dfs {
        primes: allowed(p, x),
        x,
        nodes: 0,
        limit: budget.dfs_nodes,
    };
    let v = 1 + dfs.count(1, 0)?;
    Ok(CountResult::new(v, Method::SmoothDfs, x))
}

/// Sorted survivors `n ≤ x` by enumeration.
pub fn survivors_dfs(x: u64, p: &PrimeSet, budget: &Budget) -> Result<Vec<u64>> {
    if x == 0 {
        return Ok(Vec::new());
    }
    let mut dfs = Dfs {
        primes: allowed(p, x),
        x,
        nodes: 0,
        limit: budget.dfs_nodes,
    };
    let mut out = Vec::new();
    dfs.collect(1, 0, &mut out)?;
    out.sort_unstable();
    Ok(out)
}

/// `Ψ_k(x;P)`: squarefree `n ≤ x` with exactly `k` prime factors, all in `P`.
pub fn psi_k(x: u64, p: &PrimeSet, k: u32, budget: &Budget) -> Result<CountResult> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let mut dfs = Dfs {
        primes: allowed(p, x),
        x: x.max(1),
        nodes: 0,
        limit: budget.dfs_nodes,
    };
    let v = if x == 0 { 0 } else { dfs.count_k(1, 0, k)? };
    Ok(CountResult::new(v, Method::SmoothDfs, x))
}

/// `√x + slack · (2k/(k−1)!) (Σ_{p∈P} 1/p)^{k−1} x / log x`.
pub fn psi_k_upper_bound(x: u64, p: &PrimeSet, k: u32, slack: f64) -> f64 {
    let xf = x as f64;
    let s = p.reciprocal_sum(0.0, xf).approx;
    let fact = crate::float::gamma(k as usize); // (k-1)!
    sqrt(xf) + slack * (2.0 * k as f64 / fact) * libm::pow(s, k as f64 - 1.0) * xf / ln(xf)
}

/// `Σ 1/n` over survivors `n ≤ x`; exact while there are at most
/// [`EXACT_TERMS`] survivors and the common denominator stays under
/// [`EXACT_DEN_BITS`] bits.
pub fn log_weight_sum(x: u64, p: &PrimeSet, budget: &Budget) -> Result<LogWeightResult> {
    let survivors = survivors_sieve(x, p, budget)?;
    Ok(weights_of(&survivors))
}

pub fn weights_of(survivors: &[u64]) -> LogWeightResult {
    let mut acc = if survivors.len() <= EXACT_TERMS {
        ReciprocalAccumulator::new(EXACT_TERMS, EXACT_DEN_BITS)
    } else {
        ReciprocalAccumulator::approximate()
    };
    for &n in survivors {
        acc.add(1, n);
    }
    acc.finish()
}

/// Largest `|LHS − RHS|` of
/// `Σ_{n≤t} 1/n = Ψ(t)/t + ∫_1^t Ψ(τ)/τ² dτ`
/// over `grid` geometrically spaced `t ∈ [1, x]` (always including `x`), with
/// the integral taken exactly over the steps of `Ψ`.
pub fn mean_identity_residual(x: u64, p: &PrimeSet, grid: usize, budget: &Budget) -> Result<f64> {
    if grid < 10 {
        return Err(Error::invalid("grid must have at least 10 points"));
    }
    if x <= 1 {
        return Ok(0.0);
    }
    let survivors = survivors_sieve(x, p, budget)?;
    Ok(identity_residual(&survivors, x, grid))
}

pub fn identity_residual(survivors: &[u64], x: u64, grid: usize) -> f64 {
    let lx = ln(x as f64);
    let mut points: Vec<f64> = (0..grid)
        .map(|i| crate::float::exp(lx * (i + 1) as f64 / grid as f64))
        .collect();
    points[grid - 1] = x as f64;
    let mut lhs = NeumaierSum::new();
    let mut integral = NeumaierSum::new();
    let mut worst = 0.0f64;
    let mut idx = 0usize; // survivors consumed
    for t in points {
        while idx < survivors.len() && (survivors[idx] as f64) <= t {
            if idx > 0 {
                // Ψ = idx on [s_{idx-1}, s_idx)
                let a = survivors[idx - 1] as f64;
                let b = survivors[idx] as f64;
                integral.add(idx as f64 * (1.0 / a - 1.0 / b));
            }
            lhs.add(1.0 / survivors[idx] as f64);
            idx += 1;
        }
        if idx == 0 {
            continue;
        }
        let last = survivors[idx - 1] as f64;
        let tail = idx as f64 * (1.0 / last - 1.0 / t);
        let rhs = idx as f64 / t + integral.value() + tail;
        worst = worst.max((lhs.value() - rhs).abs());
    }
    worst
}

/// Slack constants for the logarithmic-weight sandwich
/// `∏_E(1−1/p)/lower ≤ (1/log x)Σ1/n ≤ upper·e^γ ∏_E(1−1/p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SandwichSlack {
    pub lower: f64,
    pub upper: f64,
}

impl Default for SandwichSlack {
    fn default() -> Self {
        SandwichSlack {
            lower: 1.1,
            upper: 1.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SandwichReport {
    pub x: u64,
    pub euler_product: f64,
    /// `(1/log x)·Σ 1/n`.
    pub middle: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub holds: bool,
}

pub fn log_weight_sandwich(
    x: u64,
    p: &PrimeSet,
    slack: SandwichSlack,
    budget: &Budget,
) -> Result<SandwichReport> {
    let e = sieving_set(x, p, budget)?;
    let ep = PrimeSet::with_parts(x, e, crate::Descriptor::ExplicitList).euler_product();
    let middle = log_weight_sum(x, p, budget)?.approx / ln(x as f64);
    let lower_bound = ep / slack.lower;
    let upper_bound = slack.upper * EXP_GAMMA * ep;
    Ok(SandwichReport {
        x,
        euler_product: ep,
        middle,
        lower_bound,
        upper_bound,
        holds: lower_bound <= middle && middle <= upper_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::primes_up_to;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn b() -> Budget {
        Budget::default()
    }

    fn set(x: u64, l: &[u64]) -> PrimeSet {
        PrimeSet::from_list(x, l).unwrap()
    }

    fn smooth_brute(x: u64, allowed: &[u64]) -> Vec<u64> {
        (1..=x)
            .filter(|&n| {
                let mut m = n;
                let mut d = 2;
                while d * d <= m {
                    while m % d == 0 {
                        if !allowed.contains(&d) {
                            return false;
                        }
                        m /= d;
                    }
                    d += 1;
                }
                m == 1 || allowed.contains(&m)
            })
            .collect()
    }

    #[test]
    fn psi_small_examples() {
        let p = set(30, &[2, 3, 5]);
        assert_eq!(psi_sieve(30, &p, &b()).unwrap().value, 18);
        assert_eq!(psi_dfs(30, &p, &b()).unwrap().value, 18);
        assert_eq!(smooth_brute(30, &[2, 3, 5]).len(), 18);
        let all = primes_up_to(100, &b()).unwrap();
        assert_eq!(psi_sieve(100, &all, &b()).unwrap().value, 100);
        assert_eq!(psi_dfs(100, &all, &b()).unwrap().value, 100);
        let none = PrimeSet::empty(100);
        assert_eq!(psi_sieve(100, &none, &b()).unwrap().value, 1);
        assert_eq!(psi_dfs(100, &none, &b()).unwrap().value, 1);
    }

    #[test]
    fn psi_dfs_edge_cases() {
        let two = set(1_000_000, &[2]);
        assert_eq!(psi_dfs(1_000_000, &two, &b()).unwrap().value, 20);
        assert_eq!(psi_dfs(1, &two, &b()).unwrap().value, 1);
        let tight = Budget {
            dfs_nodes: 3,
            ..Budget::default()
        };
        let p = primes_up_to(1000, &b()).unwrap();
        assert!(matches!(
            psi_dfs(1000, &p, &tight),
            Err(Error::ExplosionGuard { budget: 3 })
        ));
    }

    #[test]
    fn survivors_agree_with_brute_force() {
        let p = set(500, &[2, 7, 13, 101, 211, 499]);
        let want = smooth_brute(500, &[2, 7, 13, 101, 211, 499]);
        assert_eq!(survivors_sieve(500, &p, &b()).unwrap(), want);
        assert_eq!(survivors_dfs(500, &p, &b()).unwrap(), want);
    }

    #[test]
    fn interval_counts() {
        let e = set(7, &[2, 3, 5, 7]);
        assert_eq!(interval_count(10, 10, &e, &b()).unwrap().value, 4);
        assert_eq!(interval_count(10, 0, &e, &b()).unwrap().value, 0);
        let p = set(1000, &[3, 11, 101]);
        let e = p.complement_within(1000, &b()).unwrap();
        assert_eq!(
            interval_count(0, 1000, &e, &b()).unwrap().value,
            psi_sieve(1000, &p, &b()).unwrap().value
        );
    }

    #[test]
    fn psi_k_examples() {
        let p = set(30, &[2, 3, 5]);
        assert_eq!(psi_k(30, &p, 2, &b()).unwrap().value, 3);
        assert_eq!(psi_k(30, &p, 3, &b()).unwrap().value, 1);
        assert_eq!(psi_k(30, &p, 1, &b()).unwrap().value, 3);
        assert_eq!(psi_k(4, &p, 1, &b()).unwrap().value, 2);
        assert!(psi_k(30, &p, 0, &b()).is_err());
    }

    #[test]
    fn psi_k_matches_brute_force() {
        let p = primes_up_to(300, &b()).unwrap();
        for k in 1..=4u32 {
            let want = (1..=3000u64)
                .filter(|&n| {
                    let mut m = n;
                    let mut count = 0;
                    for d in 2..=n {
                        if m % d == 0 {
                            m /= d;
                            if m % d == 0 || d > 300 {
                                return false;
                            }
                            count += 1;
                        }
                        if m == 1 {
                            break;
                        }
                    }
                    count == k
                })
                .count() as u64;
            assert_eq!(psi_k(3000, &p, k, &b()).unwrap().value, want, "k={k}");
        }
    }

    #[test]
    fn log_weights() {
        let w = log_weight_sum(10, &set(10, &[2, 3]), &b()).unwrap();
        assert_eq!(
            w.exact.unwrap(),
            BigRational::new(BigInt::from(179), BigInt::from(72))
        );
        let one = log_weight_sum(5, &PrimeSet::empty(5), &b()).unwrap();
        assert_eq!(
            one.exact.unwrap(),
            BigRational::from_integer(BigInt::from(1))
        );
        let tiny = log_weight_sum(1, &set(7, &[2, 3]), &b()).unwrap();
        assert_eq!(tiny.approx, 1.0);
    }

    #[test]
    fn identity_holds_to_rounding() {
        let p = set(30, &[2, 3, 5]);
        assert!(mean_identity_residual(30, &p, 10, &b()).unwrap() <= 1e-12);
        assert_eq!(mean_identity_residual(1, &p, 10, &b()).unwrap(), 0.0);
        assert!(mean_identity_residual(30, &p, 5, &b()).is_err());
    }

    #[test]
    fn sandwich_on_all_primes() {
        let all = primes_up_to(10_000, &b()).unwrap();
        let r = log_weight_sandwich(10_000, &all, SandwichSlack::default(), &b()).unwrap();
        assert_eq!(r.euler_product, 1.0);
        assert!(r.holds, "{r:?}");
    }
}
