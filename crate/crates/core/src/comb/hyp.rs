use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::rep::rep_table;
use super::window::{cmp_root, cmp_root_ev, product_masses};
use super::wset::WeightedIntegerSet;
use crate::exact::{floor_exp, k_range, ratio_to_f64, rational_from_f64, SumValue};
use crate::float::ln;
use crate::primes::sieve_primes;
use crate::{Budget, Descriptor, Error, PrimeSet, Result};

/// `S >= (1 + lambda) / u`, exactly when `S` is exact.
fn mass_condition(s: &SumValue, lambda: f64, u: f64) -> Result<bool> {
    let lhs_need = rational_from_f64(1.0 + lambda)?;
    let uq = rational_from_f64(u)?;
    Ok(match &s.exact {
        Some(q) => q * uq >= lhs_need,
        None => (s.approx - s.error_bound) * u >= 1.0 + lambda,
    })
}

/// One `(k, n)` cell of the integer hypothesis scan.
#[derive(Clone, Debug, PartialEq)]
pub struct HypARow {
    pub k: u64,
    pub n: u64,
    /// `Σ 1/(a_1...a_k)` over ordered tuples with `a_1+...+a_k = n`.
    pub lhs: f64,
    pub lhs_error: f64,
    pub lhs_exact: Option<BigRational>,
    /// `lhs * N / S^k`.
    pub implied_alpha: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypAReport {
    pub big_n: u64,
    pub u: f64,
    pub v: f64,
    pub lambda2: f64,
    /// `S = Σ 1/a`.
    pub reciprocal_sum: SumValue,
    /// `S >= (1 + lambda2) / u`.
    pub precondition_holds: bool,
    pub rows: Vec<HypARow>,
    /// Row with the largest implied constant, if any `lhs` is positive.
    pub best: Option<usize>,
}

impl HypAReport {
    pub fn best_row(&self) -> Option<&HypARow> {
        self.best.map(|i| &self.rows[i])
    }

    /// No admissible `(k, n)` carries any weight.
    pub fn failed(&self) -> bool {
        self.best.is_none()
    }
}

/// Scans `k ∈ [u, ev]` and `n ∈ [N-k, N]` for the weighted representation
/// sum of `A`, reporting every cell and the one with the largest implied
/// constant `α = lhs·N/S^k`.
pub fn hyp_a_check(a: &WeightedIntegerSet, lambda2: f64) -> Result<HypAReport> {
    let ks = k_range(a.u(), a.v())?;
    let s = a.reciprocal_sum();
    let precondition_holds = mass_condition(&s, lambda2, a.u())?;
    let big_n = a.n();
    let mut rows = Vec::new();
    if !a.is_empty() && ks.start() <= ks.end() {
        let table = rep_table(a.elements(), *ks.end() as u32, big_n)?;
        for k in ks.clone() {
            let layer = table.layer(k as u32);
            let s_k = libm::pow(s.approx, k as f64);
            for n in big_n.saturating_sub(k)..=big_n {
                let lhs = layer.weighted(n);
                rows.push(HypARow {
                    k,
                    n,
                    lhs,
                    lhs_error: layer.weighted_error(n),
                    lhs_exact: layer.weighted_exact(n),
                    implied_alpha: lhs * big_n as f64 / s_k,
                });
            }
        }
    }
    let best = argmax_positive(rows.iter().map(|r| (r.lhs, r.implied_alpha)));
    Ok(HypAReport {
        big_n,
        u: a.u(),
        v: a.v(),
        lambda2,
        reciprocal_sum: s,
        precondition_holds,
        rows,
        best,
    })
}

fn argmax_positive(it: impl Iterator<Item = (f64, f64)>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, (lhs, score)) in it.enumerate() {
        if lhs > 0.0 && best.is_none_or(|(_, b)| score > b) {
            best = Some((i, score));
        }
    }
    best.map(|(i, _)| i)
}

/// `|{(b_1..b_k) ∈ B^k : N-k <= b_1+...+b_k <= N}|` for `k ∈ [u, ev]`.
pub fn thm71_count(b: &WeightedIntegerSet, k: u64) -> Result<BigUint> {
    let ks = k_range(b.u(), b.v())?;
    if !ks.contains(&k) {
        return Err(Error::invalid(format!(
            "k={k} is outside [u, ev] = {}..={}",
            ks.start(),
            ks.end()
        )));
    }
    let big_n = b.n();
    if b.is_empty() {
        return Ok(BigUint::default());
    }
    let t = rep_table(b.elements(), k as u32, big_n)?;
    Ok(t.top().count_sum(big_n.saturating_sub(k), big_n))
}

/// One `k` of the prime hypothesis scan.
#[derive(Clone, Debug, PartialEq)]
pub struct HypPRow {
    pub k: u64,
    /// `Σ 1/(p_1...p_k)` over ordered tuples with `(1-δ)x < p_1...p_k < x`.
    pub lhs: SumValue,
    pub tuples: u128,
    /// `lhs · log x / (δ · S^k)`.
    pub implied_pi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypPReport {
    pub x: u64,
    pub u: f64,
    pub v: f64,
    pub delta: f64,
    pub lambda1: f64,
    pub reciprocal_sum: SumValue,
    /// `S >= (1 + lambda1) / u`.
    pub mass_condition: bool,
    /// `x^{-1/(3ev)} <= δ <= 1/2`.
    pub delta_in_range: bool,
    /// Products count when `window_floor < p_1...p_k < x`.
    pub window_floor: u64,
    pub rows: Vec<HypPRow>,
    pub best: Option<usize>,
}

impl HypPReport {
    pub fn precondition_holds(&self) -> bool {
        self.mass_condition && self.delta_in_range
    }

    pub fn best_row(&self) -> Option<&HypPRow> {
        self.best.map(|i| &self.rows[i])
    }
}

/// `P ⊂ (x^{1/ev}, x^{1/u}]`, decided exactly where possible.
fn check_prime_range(p: &PrimeSet, x: u64, u: f64, v: f64) -> Result<()> {
    for &q in p.members() {
        let q = q as u64;
        if cmp_root_ev(q, x, v)? != Ordering::Greater || cmp_root(q, x, u)? == Ordering::Greater {
            return Err(Error::invalid(format!(
                "prime {q} is outside (x^(1/ev), x^(1/u)]"
            )));
        }
    }
    Ok(())
}

/// All primes in `(x^{1/ev}, x^{1/u}]`, the largest set the prime
/// hypothesis admits.
pub fn hypothesis_primes(x: u64, u: f64, v: f64, budget: &Budget) -> Result<PrimeSet> {
    if !(u >= 1.0 && v >= u && v.is_finite()) {
        return Err(Error::invalid("need 1 <= u <= v"));
    }
    let top = crate::predictions::root_floor(x, u).saturating_add(1);
    let within = PrimeSet::range(0, top, x.max(top), budget)?;
    let mut members = Vec::new();
    for &q in within.members() {
        let q64 = q as u64;
        if cmp_root_ev(q64, x, v)? == Ordering::Greater && cmp_root(q64, x, u)? != Ordering::Greater
        {
            members.push(q);
        }
    }
    Ok(PrimeSet::with_parts(x, members, Descriptor::ExplicitList))
}

/// For each `k ∈ [u, ev]`, the exact weight of ordered prime tuples with
/// product in `((1-δ)x, x)`, and the implied constant.
pub fn hyp_p_check(
    p: &PrimeSet,
    x: u64,
    u: f64,
    v: f64,
    delta: f64,
    lambda1: f64,
    budget: &Budget,
) -> Result<HypPReport> {
    if !(u >= 1.0 && v >= u && v.is_finite()) {
        return Err(Error::invalid("need 1 <= u <= v"));
    }
    if !(delta > 0.0 && delta < 1.0) || x < 2 {
        return Err(Error::invalid("need 0 < δ < 1 and x >= 2"));
    }
    check_prime_range(p, x, u, v)?;
    let ks = k_range(u, v)?;
    let s = p.reciprocal_sum_all();
    let mass_ok = mass_condition(&s, lambda1, u)?;
    let ev = core::f64::consts::E * v;
    let delta_in_range = delta <= 0.5 && delta >= crate::float::exp(-ln(x as f64) / (3.0 * ev));
    // floor((1-δ)x), exact since δ is dyadic.
    let one = BigRational::from_integer(BigInt::from(1));
    let lower = ((one - rational_from_f64(delta)?) * BigRational::from_integer(BigInt::from(x)))
        .floor()
        .to_integer()
        .to_u64()
        .ok_or(Error::Overflow("window floor"))?;
    let primes: Vec<u64> = p.members().iter().map(|&q| q as u64).collect();
    let depth = *ks.end() as usize;
    let masses = if primes.is_empty() || depth == 0 {
        Vec::new()
    } else {
        product_masses(&primes, depth, lower, x - 1, budget)?
    };
    let mut rows = Vec::new();
    for k in ks {
        let (lhs, tuples) = masses
            .get(k as usize)
            .cloned()
            .unwrap_or_else(|| (SumValue::zero(), 0));
        let implied_pi = lhs.approx * ln(x as f64) / (delta * libm::pow(s.approx, k as f64));
        rows.push(HypPRow {
            k,
            lhs,
            tuples,
            implied_pi,
        });
    }
    let best = argmax_positive(rows.iter().map(|r| (r.lhs.approx, r.implied_pi)));
    Ok(HypPReport {
        x,
        u,
        v,
        delta,
        lambda1,
        reciprocal_sum: s,
        mass_condition: mass_ok,
        delta_in_range,
        window_floor: lower,
        rows,
        best,
    })
}

/// Largest `N` accepted by [`a_to_primes`].
pub const A_TO_PRIMES_MAX_N: u64 = 21;

/// Primes in `⋃_{a∈A} (e^a, e^{a+1})`, with bound `floor(e^{N+1})`.
pub fn a_to_primes(a: &WeightedIntegerSet, budget: &Budget) -> Result<PrimeSet> {
    if a.n() > A_TO_PRIMES_MAX_N {
        return Err(Error::BudgetExceeded {
            what: "exponential cells N",
            requested: a.n(),
            ceiling: A_TO_PRIMES_MAX_N,
        });
    }
    let bound = floor_exp(a.n() as u32 + 1)?;
    let cells: Vec<(u64, u64)> = a
        .elements()
        .iter()
        .map(|&c| Ok((floor_exp(c as u32)?, floor_exp(c as u32 + 1)?)))
        .collect::<Result<_>>()?;
    let top = cells.last().map_or(0, |c| c.1);
    if top > budget.prime_ceiling || top > u32::MAX as u64 {
        return Err(Error::BudgetExceeded {
            what: "prime sieve bound",
            requested: top,
            ceiling: budget.prime_ceiling.min(u32::MAX as u64),
        });
    }
    let members: Vec<u32> = if cells.is_empty() {
        Vec::new()
    } else {
        // e^c is irrational, so the open cell is (floor(e^c), floor(e^{c+1})].
        sieve_primes(top, budget.segment_len)
            .into_iter()
            .filter(|&q| {
                let q = q as u64;
                let i = cells.partition_point(|c| c.1 < q);
                i < cells.len() && q > cells[i].0
            })
            .collect()
    };
    Ok(PrimeSet::with_parts(
        bound,
        members,
        Descriptor::ExpCells {
            cells: a.elements().to_vec(),
        },
    ))
}

/// Discretization of a prime set into integer cells `[ρ^a, ρ^{a+1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimeCells {
    /// `ρ = 1 + δ/(2ev)`.
    pub rho: f64,
    /// `floor(log_ρ x - ev)`.
    pub big_n: u64,
    /// `(a, S_a)` for every `a ∈ [N/ev + 1, N/u]`.
    pub cells: Vec<(u64, f64)>,
    /// Cells with `S_a >= η/(4a log(ev)) · Σ 1/p`.
    pub a: WeightedIntegerSet,
    /// Share of `Σ 1/p` carried by the selected cells.
    pub captured: f64,
}

/// The prime-to-integer discretization with `η = min(1, λ2)`.
pub fn primes_to_a(
    p: &PrimeSet,
    x: u64,
    u: f64,
    v: f64,
    delta: f64,
    lambda2: f64,
) -> Result<PrimeCells> {
    if !(u >= 1.0 && v >= u && v.is_finite()) {
        return Err(Error::invalid("need 1 <= u <= v"));
    }
    if !(delta > 0.0 && delta < 1.0 && lambda2 > 0.0) {
        return Err(Error::invalid("need 0 < δ < 1 and λ2 > 0"));
    }
    let ev = core::f64::consts::E * v;
    let rho = 1.0 + delta / (2.0 * ev);
    let l_rho = libm::log(rho);
    let n_real = ln(x as f64) / l_rho - ev;
    if n_real < 1.0 {
        return Err(Error::invalid("x too small for the chosen δ and v"));
    }
    let big_n = n_real as u64;
    let a_lo = crate::float::ceil(big_n as f64 / ev + 1.0) as u64;
    let a_hi = crate::float::floor(big_n as f64 / u) as u64;
    let eta = lambda2.min(1.0);
    let total = p.reciprocal_sum_all().approx;
    let width = a_hi.saturating_sub(a_lo) as usize + 1;
    let mut sums = alloc::vec![0.0f64; if a_lo <= a_hi { width } else { 0 }];
    for &q in p.members() {
        let c = (ln(q as f64) / l_rho) as u64;
        if c >= a_lo && c <= a_hi {
            sums[(c - a_lo) as usize] += 1.0 / q as f64;
        }
    }
    let mut cells = Vec::with_capacity(sums.len());
    let mut chosen = Vec::new();
    let mut captured = 0.0;
    for (i, &s_a) in sums.iter().enumerate() {
        let a = a_lo + i as u64;
        cells.push((a, s_a));
        if s_a > 0.0 && s_a >= eta / (4.0 * a as f64 * ln(ev)) * total {
            chosen.push(a);
            captured += s_a;
        }
    }
    Ok(PrimeCells {
        rho,
        big_n,
        cells,
        a: WeightedIntegerSet::new(big_n, u, v, &chosen)?,
        captured: if total > 0.0 { captured / total } else { 0.0 },
    })
}

/// `|Σ_P 1/p - Σ_A 1/a| / Σ_A 1/a`.
pub fn realization_gap(a: &WeightedIntegerSet, p: &PrimeSet) -> f64 {
    let sa = a.reciprocal_sum();
    let sp = p.reciprocal_sum_all();
    let sa_v = sa.exact.as_ref().map_or(sa.approx, ratio_to_f64);
    (sp.approx - sa_v).abs() / sa_v
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Weighted sums over ordered pairs by direct double loop.
    fn pair_sum(a: &[u64], n: u64) -> BigRational {
        let mut s = BigRational::zero();
        for &x in a {
            for &y in a {
                if x + y == n {
                    s += BigRational::new(BigInt::one(), BigInt::from(x * y));
                }
            }
        }
        s
    }

    #[test]
    fn full_interval_hundred() {
        let a = WeightedIntegerSet::full_interval(100, 1.0, 1.0).unwrap();
        let r = hyp_a_check(&a, 0.0).unwrap();
        let k1: Vec<_> = r.rows.iter().filter(|row| row.k == 1).collect();
        assert_eq!(k1.len(), 2);
        assert_eq!(k1[0].lhs_exact, Some(rat(1, 99)));
        assert_eq!(k1[1].lhs_exact, Some(rat(1, 100)));
        for row in r.rows.iter().filter(|row| row.k == 2) {
            let want = pair_sum(a.elements(), row.n);
            let got = row
                .lhs_exact
                .clone()
                .unwrap_or_else(|| rational_from_f64(row.lhs).unwrap());
            assert!((ratio_to_f64(&got) - ratio_to_f64(&want)).abs() <= 1e-15);
        }
        // The largest implied constant sits at k = 2, n = 100.
        let best = r.best_row().unwrap();
        assert_eq!((best.k, best.n), (2, 100));
        assert!(r.precondition_holds);
    }

    #[test]
    fn obstruction_has_no_sums() {
        let a = WeightedIntegerSet::new(100, 2.0, 2.0, &(34..=48).collect::<Vec<_>>()).unwrap();
        let r = hyp_a_check(&a, 0.0).unwrap();
        assert!(r.rows.iter().all(|row| row.lhs == 0.0));
        assert!(r.failed());
        let a = WeightedIntegerSet::new(10, 1.0, 1.0, &[6]).unwrap();
        assert!(hyp_a_check(&a, 0.0).unwrap().failed());
    }

    #[test]
    fn thm71_small() {
        let b = WeightedIntegerSet::new(12, 2.0, 2.0, &[3, 4, 5]).unwrap();
        assert_eq!(thm71_count(&b, 3).unwrap(), BigUint::from(17u32));
        let mut brute = 0;
        for x in 3..=5u64 {
            for y in 3..=5 {
                for z in 3..=5 {
                    if (9..=12).contains(&(x + y + z)) {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(brute, 17);
        assert!(thm71_count(&b, 1).is_err());
        let b = WeightedIntegerSet::new(12, 1.0, 1.0, &[12]).unwrap();
        assert_eq!(thm71_count(&b, 1).unwrap(), BigUint::one());
    }

    #[test]
    fn hyp_p_single_prime() {
        let budget = Budget::default();
        let p = PrimeSet::from_list(110, &[101]).unwrap();
        let r = hyp_p_check(&p, 110, 1.0, 1.0, 0.5, 0.0, &budget).unwrap();
        assert_eq!(r.rows[0].k, 1);
        assert_eq!(r.rows[0].lhs.exact, Some(rat(1, 101)));
        assert_eq!(r.rows[1].lhs.exact, Some(BigRational::zero()));
        assert_eq!(r.best_row().unwrap().k, 1);
        // At x = 101 the strict upper end excludes the prime itself.
        let r = hyp_p_check(&p, 101, 1.0, 1.0, 0.5, 0.0, &budget).unwrap();
        assert!(r.best.is_none());
    }

    #[test]
    fn a_to_primes_cells() {
        let budget = Budget::default();
        let a = WeightedIntegerSet::new(4, 2.0, 2.0, &[2]).unwrap();
        let p = a_to_primes(&a, &budget).unwrap();
        assert_eq!(p.members(), &[11, 13, 17, 19]);
        let a = WeightedIntegerSet::new(4, 2.0, 2.0, &[]).unwrap();
        assert!(a_to_primes(&a, &budget).unwrap().is_empty());
        let a = WeightedIntegerSet::new(22, 2.0, 2.0, &[]).unwrap();
        assert!(matches!(
            a_to_primes(&a, &budget),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn primes_to_cells_covers_mass() {
        let budget = Budget::default();
        let x = 1_000_000_000u64;
        let v = 1.5;
        let lo = libm::pow(x as f64, 1.0 / (core::f64::consts::E * v)) as u64 + 1;
        let p = PrimeSet::range(lo, 40_000, 40_000, &budget).unwrap();
        let c = primes_to_a(&p, x, 1.5, v, 0.5, 1.0).unwrap();
        assert!((c.rho - (1.0 + 0.5 / (2.0 * core::f64::consts::E * v))).abs() < 1e-15);
        assert!(!c.a.is_empty());
        assert!(c.captured > 0.9 && c.captured <= 1.0 + 1e-12);
    }

    #[test]
    fn hypothesis_primes_range() {
        // 110^(1/e) ≈ 5.63.
        let p = hypothesis_primes(110, 1.0, 1.0, &Budget::default()).unwrap();
        assert_eq!(p.members().first(), Some(&7));
        assert_eq!(p.members().last(), Some(&109));
        // 10^4^(1/2) = 100 is included, 10^4^(1/(2e)) ≈ 5.44.
        let p = hypothesis_primes(10_000, 2.0, 2.0, &Budget::default()).unwrap();
        assert_eq!(p.members().first(), Some(&7));
        assert_eq!(p.members().last(), Some(&97));
    }
}
