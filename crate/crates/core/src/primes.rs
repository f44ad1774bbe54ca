//! Prime generation and the structured prime sets `P` (with complement `E`).

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::{Integer, Roots};
use num_rational::BigRational;

use crate::exact::{coprime_reciprocal_sum, ratio_to_f64, SumValue};
use crate::float::{ln_1p, NeumaierSum, UNIT_ROUNDOFF};
use crate::{Budget, Error, Result};

/// Deterministic Miller–Rabin for every `u64` (the base set is valid far
/// beyond `2^64`).
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for &a in &BASES {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes `<= x` by a segmented odd-only sieve of Eratosthenes.
pub fn sieve_primes(x: u64, segment_len: usize) -> Vec<u32> {
    assert!(x <= u32::MAX as u64, "prime sieve limited to u32 range");
    if x < 2 {
        return Vec::new();
    }
    let root = x.sqrt();
    // Small sieve for base primes up to sqrt(x).
    let mut small = vec![true; root as usize + 1];
    let mut base = Vec::new();
    for i in 2..=root as usize {
        if small[i] {
            base.push(i as u64);
            let mut j = i * i;
            while j <= root as usize {
                small[j] = false;
                j += i;
            }
        }
    }
    let estimate = if x > 10 {
        (x as f64 / (crate::float::ln(x as f64) - 1.1)) as usize
    } else {
        4
    };
    let mut out = Vec::with_capacity(estimate);
    out.push(2u32);
    // Odd number 2i+1 lives at index i; segment covers indices [lo, hi).
    let seg = segment_len.max(1024) as u64;
    let total = (x - 1) / 2 + 1; // indices 0..total cover odd numbers <= x
    let mut buf = vec![true; seg as usize];
    let mut lo = 1u64; // index 1 <-> 3
    while lo < total {
        let hi = (lo + seg).min(total);
        let len = (hi - lo) as usize;
        buf[..len].iter_mut().for_each(|b| *b = true);
        for &p in base.iter().skip(1) {
            let p2 = p * p;
            if p2 > 2 * hi + 1 {
                break;
            }
            // first odd multiple >= max(p^2, 2lo+1)
            let start_val = p2.max((2 * lo + 1).div_ceil(p) * p);
            let start_val = if start_val % 2 == 0 {
                start_val + p
            } else {
                start_val
            };
            let mut i = (start_val - 1) / 2;
            while i < hi {
                buf[(i - lo) as usize] = false;
                i += p;
            }
        }
        for (k, &alive) in buf[..len].iter().enumerate() {
            if alive {
                out.push((2 * (lo + k as u64) + 1) as u32);
            }
        }
        lo = hi;
    }
    out
}

/// How a [`PrimeSet`] was built.
#[derive(Clone, Debug, PartialEq)]
pub enum Descriptor {
    ExplicitList,
    /// Primes in `(lo, hi]`.
    Range {
        lo: u64,
        hi: u64,
    },
    /// `⋃_{1≤m≤N−1} {x^{m/(N+1)} < p < x^{m/N}}`, plus `{p ≤ x^{1/N²}}` when
    /// augmented.
    PowerIntervalUnion {
        x: u64,
        n: u32,
        augmented: bool,
    },
    /// Primes `≡ a (mod q)` in `(lo, hi]`.
    Congruence {
        q: u64,
        a: u64,
        lo: u64,
        hi: u64,
    },
    Complement {
        of: Box<Descriptor>,
        within: u64,
    },
    Union(Box<Descriptor>, Box<Descriptor>),
    Intersection(Box<Descriptor>, Box<Descriptor>),
    /// Primes in `⋃_{a∈A} (e^a, e^{a+1})`.
    ExpCells {
        cells: Vec<u64>,
    },
    /// `{x^{1/v} < p ≤ x^{1/u}} ∪ {x^{1−1/v} < p ≤ x}`.
    SmallAndLarge {
        x: u64,
        u: f64,
        v: f64,
    },
}

/// A finite set of primes, all `<= bound_x`, sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimeSet {
    bound_x: u64,
    members: Vec<u32>,
    descriptor: Descriptor,
}

fn check_prime_budget(x: u64, budget: &Budget) -> Result<()> {
    if x > budget.prime_ceiling || x > u32::MAX as u64 {
        return Err(Error::BudgetExceeded {
            what: "prime sieve bound",
            requested: x,
            ceiling: budget.prime_ceiling.min(u32::MAX as u64),
        });
    }
    Ok(())
}

/// All primes `<= x`.
pub fn primes_up_to(x: u64, budget: &Budget) -> Result<PrimeSet> {
    check_prime_budget(x, budget)?;
    Ok(PrimeSet {
        bound_x: x,
        members: sieve_primes(x, budget.segment_len),
        descriptor: Descriptor::Range { lo: 0, hi: x },
    })
}

/// `floor(b^(1/k))` for `b` given as a big integer.
fn floor_root(b: &BigUint, k: u32) -> u64 {
    let r = b.nth_root(k);
    r.try_into().unwrap_or(u64::MAX)
}

/// Smallest integer `c` with `c^k >= b`.
fn ceil_root(b: &BigUint, k: u32) -> u64 {
    let r = b.nth_root(k);
    let c = if num_traits::pow(r.clone(), k as usize) == *b {
        r
    } else {
        r + 1u32
    };
    c.try_into().unwrap_or(u64::MAX)
}

/// Integer bounds `(lo, hi)` with `x^{m/(N+1)} < p < x^{m/N}  <=>  lo < p < hi`.
pub fn power_interval_bounds(x: u64, n: u32, m: u32) -> (u64, u64) {
    let xm = num_traits::pow(BigUint::from(x), m as usize);
    (floor_root(&xm, n + 1), ceil_root(&xm, n))
}

impl PrimeSet {
    /// Empty set bounded by `bound_x`.
    pub fn empty(bound_x: u64) -> Self {
        PrimeSet {
            bound_x,
            members: Vec::new(),
            descriptor: Descriptor::ExplicitList,
        }
    }

    /// Validate an explicit list: every entry must be prime and `<= bound_x`.
    /// Order and duplicates are normalized.
    pub fn from_list(bound_x: u64, list: &[u64]) -> Result<Self> {
        let mut members = Vec::with_capacity(list.len());
        for &p in list {
            if !is_prime(p) {
                return Err(Error::invalid(alloc::format!("{p} is not prime")));
            }
            if p > bound_x {
                return Err(Error::invalid(alloc::format!(
                    "{p} exceeds bound {bound_x}"
                )));
            }
            members.push(p as u32);
        }
        members.sort_unstable();
        members.dedup();
        Ok(PrimeSet {
            bound_x,
            members,
            descriptor: Descriptor::ExplicitList,
        })
    }

    /// Primes in `(lo, hi]`, bounded by `bound_x >= hi`.
    pub fn range(lo: u64, hi: u64, bound_x: u64, budget: &Budget) -> Result<Self> {
        if hi > bound_x {
            return Err(Error::invalid("range end exceeds bound"));
        }
        check_prime_budget(hi, budget)?;
        let members = sieve_primes(hi, budget.segment_len)
            .into_iter()
            .filter(|&p| p as u64 > lo)
            .collect();
        Ok(PrimeSet {
            bound_x,
            members,
            descriptor: Descriptor::Range { lo, hi },
        })
    }

    /// The power-interval family; boundaries are decided by exact integer
    /// powers.
    pub fn from_power_intervals(x: u64, n: u32, augmented: bool, budget: &Budget) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("N must be at least 2"));
        }
        if x < 16 {
            return Err(Error::invalid("x must be at least 16"));
        }
        let bounds: Vec<(u64, u64)> = (1..n).map(|m| power_interval_bounds(x, n, m)).collect();
        let small_cut = if augmented {
            floor_root(&BigUint::from(x), n * n)
        } else {
            0
        };
        let top = bounds
            .iter()
            .map(|&(_, hi)| hi.saturating_sub(1))
            .max()
            .unwrap_or(0)
            .max(small_cut);
        check_prime_budget(top, budget)?;
        let members = sieve_primes(top, budget.segment_len)
            .into_iter()
            .filter(|&p| {
                let p = p as u64;
                p <= small_cut || bounds.iter().any(|&(lo, hi)| lo < p && p < hi)
            })
            .collect();
        Ok(PrimeSet {
            bound_x: x,
            members,
            descriptor: Descriptor::PowerIntervalUnion { x, n, augmented },
        })
    }

    /// Primes `p <= x` with `p ≡ a (mod q)`.
    pub fn from_congruence(x: u64, q: u64, a: u64, budget: &Budget) -> Result<Self> {
        if q < 2 {
            return Err(Error::invalid("modulus must be at least 2"));
        }
        let a = a % q;
        if a.gcd(&q) != 1 {
            return Err(Error::InvalidResidue { a, q });
        }
        check_prime_budget(x, budget)?;
        let members = sieve_primes(x, budget.segment_len)
            .into_iter()
            .filter(|&p| p as u64 % q == a)
            .collect();
        Ok(PrimeSet {
            bound_x: x,
            members,
            descriptor: Descriptor::Congruence { q, a, lo: 0, hi: x },
        })
    }

    /// `{x^{1/v} < p ≤ x^{1/u}} ∪ {x^{1−1/v} < p ≤ x}`, with the real
    /// exponents resolved in floating point and then checked exactly where
    /// the boundary is an integer power.
    pub fn small_and_large(x: u64, u: f64, v: f64, budget: &Budget) -> Result<Self> {
        if !(u >= 1.0 && v >= u) {
            return Err(Error::invalid("need 1 <= u <= v"));
        }
        check_prime_budget(x, budget)?;
        let lx = crate::float::ln(x as f64);
        let cut = |e: f64| crate::float::floor(crate::float::exp(lx * e) + 1e-9) as u64;
        let (a, b, c) = (cut(1.0 / v), cut(1.0 / u), cut(1.0 - 1.0 / v));
        let members = sieve_primes(x, budget.segment_len)
            .into_iter()
            .filter(|&p| {
                let p = p as u64;
                (a < p && p <= b) || c < p
            })
            .collect();
        Ok(PrimeSet {
            bound_x: x,
            members,
            descriptor: Descriptor::SmallAndLarge { x, u, v },
        })
    }

    /// `E = {p <= x} \ P`.
    pub fn complement_within(&self, x: u64, budget: &Budget) -> Result<Self> {
        if self.bound_x > x {
            return Err(Error::invalid("complement bound below the set's bound"));
        }
        check_prime_budget(x, budget)?;
        let all = sieve_primes(x, budget.segment_len);
        Ok(PrimeSet {
            bound_x: x,
            members: difference(&all, &self.members),
            descriptor: Descriptor::Complement {
                of: Box::new(self.descriptor.clone()),
                within: x,
            },
        })
    }

    pub fn union(&self, other: &PrimeSet) -> PrimeSet {
        let mut members = Vec::with_capacity(self.len() + other.len());
        let (a, b) = (&self.members, &other.members);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(&p), Some(&q)) if p == q => {
                    i += 1;
                    j += 1;
                    p
                }
                (Some(&p), Some(&q)) if p < q => {
                    i += 1;
                    p
                }
                (Some(_), Some(&q)) => {
                    j += 1;
                    q
                }
                (Some(&p), None) => {
                    i += 1;
                    p
                }
                (None, Some(&q)) => {
                    j += 1;
                    q
                }
                (None, None) => unreachable!(),
            };
            members.push(next);
        }
        PrimeSet {
            bound_x: self.bound_x.max(other.bound_x),
            members,
            descriptor: Descriptor::Union(
                Box::new(self.descriptor.clone()),
                Box::new(other.descriptor.clone()),
            ),
        }
    }

    pub fn intersection(&self, other: &PrimeSet) -> PrimeSet {
        let members = self
            .members
            .iter()
            .copied()
            .filter(|p| other.members.binary_search(p).is_ok())
            .collect();
        PrimeSet {
            bound_x: self.bound_x.min(other.bound_x),
            members,
            descriptor: Descriptor::Intersection(
                Box::new(self.descriptor.clone()),
                Box::new(other.descriptor.clone()),
            ),
        }
    }

    /// Members in `(lo, hi]` as a new set.
    pub fn restrict(&self, lo: u64, hi: u64) -> PrimeSet {
        PrimeSet {
            bound_x: self.bound_x,
            members: self.slice_in(lo, hi).to_vec(),
            descriptor: Descriptor::Intersection(
                Box::new(self.descriptor.clone()),
                Box::new(Descriptor::Range { lo, hi }),
            ),
        }
    }

    pub(crate) fn with_parts(bound_x: u64, members: Vec<u32>, descriptor: Descriptor) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        PrimeSet {
            bound_x,
            members,
            descriptor,
        }
    }

    pub fn bound_x(&self) -> u64 {
        self.bound_x
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: u64) -> bool {
        p <= u32::MAX as u64 && self.members.binary_search(&(p as u32)).is_ok()
    }

    /// Members in `(lo, hi]`.
    pub fn slice_in(&self, lo: u64, hi: u64) -> &[u32] {
        let a = self.members.partition_point(|&p| (p as u64) <= lo);
        let b = self.members.partition_point(|&p| (p as u64) <= hi);
        &self.members[a..b.max(a)]
    }

    /// Count of members in `(lo, hi]`.
    pub fn count_in(&self, lo: u64, hi: u64) -> usize {
        self.slice_in(lo, hi).len()
    }

    /// `Σ 1/p` over members in the real interval `(lo, hi]`; exact while there
    /// are at most `10^4` terms.
    pub fn reciprocal_sum(&self, lo: f64, hi: f64) -> SumValue {
        let terms: Vec<u64> = self
            .members
            .iter()
            .map(|&p| p as u64)
            .filter(|&p| (p as f64) > lo && (p as f64) <= hi)
            .collect();
        sum_of_prime_reciprocals(&terms)
    }

    /// `Σ 1/p` over all members.
    pub fn reciprocal_sum_all(&self) -> SumValue {
        let terms: Vec<u64> = self.members.iter().map(|&p| p as u64).collect();
        sum_of_prime_reciprocals(&terms)
    }

    /// `∏ (1 − 1/p)` over members, via compensated summed logarithms.
    pub fn euler_product(&self) -> f64 {
        let s: NeumaierSum = self
            .members
            .iter()
            .map(|&p| ln_1p(-1.0 / p as f64))
            .collect();
        crate::float::exp(s.value())
    }

    /// 64-bit FNV-1a over the members, each as 8 little-endian bytes.
    pub fn checksum(&self) -> u64 {
        fnv1a_u64s(self.members.iter().map(|&p| p as u64))
    }

    /// Members as little-endian 64-bit deltas (first delta from zero).
    pub fn delta_dump(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 * self.members.len());
        let mut prev = 0u64;
        for &p in &self.members {
            out.extend_from_slice(&(p as u64 - prev).to_le_bytes());
            prev = p as u64;
        }
        out
    }

    /// Inverse of [`PrimeSet::delta_dump`]; members are re-verified.
    pub fn from_delta_dump(bound_x: u64, bytes: &[u8]) -> Result<Self> {
        if !bytes.len().is_multiple_of(8) {
            return Err(Error::invalid("delta dump length is not a multiple of 8"));
        }
        let mut acc = 0u64;
        let mut list = Vec::with_capacity(bytes.len() / 8);
        for chunk in bytes.chunks_exact(8) {
            let d = u64::from_le_bytes(chunk.try_into().expect("8 bytes"));
            if d == 0 && !list.is_empty() {
                return Err(Error::invalid("duplicate member in dump"));
            }
            acc = acc.checked_add(d).ok_or(Error::Overflow("delta dump"))?;
            list.push(acc);
        }
        PrimeSet::from_list(bound_x, &list)
    }

    /// Checks every documented invariant; used by tests and the CLI.
    pub fn verify(&self) -> bool {
        self.members.windows(2).all(|w| w[0] < w[1])
            && self
                .members
                .iter()
                .all(|&p| (p as u64) <= self.bound_x && is_prime(p as u64))
    }
}

fn sum_of_prime_reciprocals(terms: &[u64]) -> SumValue {
    const EXACT_LIMIT: usize = 10_000;
    let float: NeumaierSum = terms.iter().map(|&p| 1.0 / p as f64).collect();
    if terms.len() <= EXACT_LIMIT {
        let exact: BigRational = coprime_reciprocal_sum(terms);
        let approx = ratio_to_f64(&exact);
        SumValue {
            approx,
            error_bound: approx * UNIT_ROUNDOFF,
            exact: Some(exact),
            terms: terms.len(),
        }
    } else {
        SumValue {
            exact: None,
            approx: float.value(),
            error_bound: float.error_bound() + 2.0 * UNIT_ROUNDOFF * float.value(),
            terms: terms.len(),
        }
    }
}

/// Sorted difference `a \ b` of sorted slices.
pub(crate) fn difference(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().saturating_sub(b.len()));
    let mut j = 0;
    for &p in a {
        while j < b.len() && b[j] < p {
            j += 1;
        }
        if j < b.len() && b[j] == p {
            continue;
        }
        out.push(p);
    }
    out
}

pub fn fnv1a_u64s(values: impl IntoIterator<Item = u64>) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for v in values {
        for b in v.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn trial_division(n: u64) -> bool {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    }

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn primes_up_to_small_cases() {
        let p = primes_up_to(10, &b()).unwrap();
        assert_eq!(p.members(), &[2, 3, 5, 7]);
        assert_eq!(primes_up_to(2, &b()).unwrap().members(), &[2]);
        let p30 = primes_up_to(30, &b()).unwrap();
        assert_eq!(p30.len(), 10);
        assert_eq!(*p30.members().last().unwrap(), 29);
    }

    #[test]
    fn segmented_sieve_matches_trial_division_across_segments() {
        let budget = Budget {
            segment_len: 1024,
            ..Budget::default()
        };
        let got = primes_up_to(50_000, &budget).unwrap();
        let want: Vec<u32> = (0..=50_000u32)
            .filter(|&n| trial_division(n as u64))
            .collect();
        assert_eq!(got.members(), want.as_slice());
    }

    #[test]
    fn budget_is_enforced() {
        let small = Budget {
            prime_ceiling: 100,
            ..Budget::default()
        };
        assert!(matches!(
            primes_up_to(101, &small),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn miller_rabin_agrees_with_trial_division() {
        for n in 0..20_000u64 {
            assert_eq!(is_prime(n), trial_division(n), "n={n}");
        }
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2,3,5,7
    }

    #[test]
    fn power_intervals_match_direct_filter() {
        let p = PrimeSet::from_power_intervals(10_000, 2, false, &b()).unwrap();
        // (10^{4/3}, 10^2): 21.54.. < p < 100
        let want: Vec<u32> = (22..100u32).filter(|&n| trial_division(n as u64)).collect();
        assert_eq!(p.members(), want.as_slice());
        assert_eq!(p.len(), 17);
    }

    #[test]
    fn power_intervals_tiny_and_empty() {
        let p = PrimeSet::from_power_intervals(16, 2, false, &b()).unwrap();
        assert_eq!(p.members(), &[3]);
        // x = 16, N = 5: intervals (16^{m/6}, 16^{m/5}) contain no primes.
        let e = PrimeSet::from_power_intervals(16, 5, false, &b()).unwrap();
        assert!(e.members().iter().all(|&p| {
            (1..5).any(|m| {
                let (lo, hi) = power_interval_bounds(16, 5, m);
                lo < p as u64 && (p as u64) < hi
            })
        }));
    }

    #[test]
    fn power_interval_boundaries_are_strict() {
        // x = 2^12, N = 3: x^{1/3} = 16, x^{1/4} = 8, x^{2/3} = 256, x^{1/2} = 64.
        assert_eq!(power_interval_bounds(4096, 3, 1), (8, 16));
        assert_eq!(power_interval_bounds(4096, 3, 2), (64, 256));
        // x = 7^6: x^{1/2} = 343 is not prime but x^{1/3} = 49, x^{1/6}... use
        // x = 11^4 with N = 4, m = 1: x^{1/4} = 11 is prime and must be excluded.
        let p = PrimeSet::from_power_intervals(14_641, 4, false, &b()).unwrap();
        assert!(!p.contains(11));
        let (lo, hi) = power_interval_bounds(14_641, 4, 1);
        assert_eq!(hi, 11);
        assert!(lo < 7);
        assert!(p.contains(7));
    }

    #[test]
    fn augmented_family_adds_small_primes() {
        let plain = PrimeSet::from_power_intervals(1 << 24, 2, false, &b()).unwrap();
        let aug = PrimeSet::from_power_intervals(1 << 24, 2, true, &b()).unwrap();
        // x^{1/4} = 64
        assert!(aug.contains(61) && !plain.contains(61));
        assert!(!aug.contains(67) || plain.contains(67));
    }

    #[test]
    fn congruence_sets() {
        let p = PrimeSet::from_congruence(30, 4, 1, &b()).unwrap();
        assert_eq!(p.members(), &[5, 13, 17, 29]);
        let p = PrimeSet::from_congruence(30, 4, 3, &b()).unwrap();
        assert_eq!(p.members(), &[3, 7, 11, 19, 23]);
        assert!(PrimeSet::from_congruence(3, 5, 1, &b()).unwrap().is_empty());
        assert_eq!(
            PrimeSet::from_congruence(30, 6, 3, &b()),
            Err(Error::InvalidResidue { a: 3, q: 6 })
        );
    }

    #[test]
    fn complements() {
        let p = PrimeSet::from_list(10, &[2, 3, 5]).unwrap();
        assert_eq!(p.complement_within(10, &b()).unwrap().members(), &[7]);
        let e = PrimeSet::empty(10).complement_within(10, &b()).unwrap();
        assert_eq!(e.members(), &[2, 3, 5, 7]);
        let all = primes_up_to(10, &b()).unwrap();
        assert!(all.complement_within(10, &b()).unwrap().is_empty());
        assert!(p.complement_within(5, &b()).is_err());
    }

    #[test]
    fn reciprocal_sums() {
        let p = PrimeSet::from_list(10, &[2, 3, 5]).unwrap();
        let s = p.reciprocal_sum(0.0, 10.0);
        assert_eq!(
            s.exact.unwrap(),
            BigRational::new(BigInt::from(31), BigInt::from(30))
        );
        assert_eq!(PrimeSet::empty(10).reciprocal_sum(0.0, 10.0).approx, 0.0);
        let two = PrimeSet::from_list(10, &[2]).unwrap();
        assert_eq!(two.reciprocal_sum(2.0, 10.0).approx, 0.0);
    }

    #[test]
    fn euler_products() {
        let e = PrimeSet::from_list(30, &[7, 11, 13, 17, 19, 23, 29]).unwrap();
        // exact: (6·10·12·16·18·22·28)/(7·11·13·17·19·23·29)
        let exact = (6.0 * 10.0 * 12.0 * 16.0 * 18.0 * 22.0 * 28.0)
            / (7.0 * 11.0 * 13.0 * 17.0 * 19.0 * 23.0 * 29.0);
        assert!((e.euler_product() - exact).abs() < 1e-15);
        assert!((e.euler_product() - 0.592_302_086_632_320_9).abs() < 1e-14);
        assert_eq!(PrimeSet::empty(5).euler_product(), 1.0);
        assert_eq!(PrimeSet::from_list(5, &[2]).unwrap().euler_product(), 0.5);
    }

    #[test]
    fn delta_dump_round_trip() {
        let p = primes_up_to(1000, &b()).unwrap();
        let back = PrimeSet::from_delta_dump(1000, &p.delta_dump()).unwrap();
        assert_eq!(back.members(), p.members());
        assert_eq!(back.checksum(), p.checksum());
    }

    #[test]
    fn fnv_reference_value() {
        // FNV-1a of the eight zero bytes.
        assert_eq!(fnv1a_u64s([0u64]), 0xa8c7_f832_281a_39c5);
        assert_eq!(fnv1a_u64s([]), 0xcbf2_9ce4_8422_2325);
    }
}
