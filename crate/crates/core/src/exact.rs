//! Exact arithmetic helpers: a certified enclosure of Euler's number, exact
//! comparisons against it, and reciprocal-sum accumulators that stay exact
//! while the denominator is affordable.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::float::{NeumaierSum, UNIT_ROUNDOFF};
use crate::{Error, Result};

/// The first 50 decimals of Euler's number (truncated, so this is a lower
/// bound and adding one unit in the last place gives an upper bound).
pub const E_DIGITS_50: &str = "2.71828182845904523536028747135266249775724709369995";

/// Closed rational interval `[lo, hi]` known to contain a real number.
#[derive(Clone, Debug, PartialEq)]
pub struct Enclosure {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Enclosure {
    pub fn point(q: BigRational) -> Self {
        Enclosure {
            lo: q.clone(),
            hi: q,
        }
    }

    /// Euler's number to 50 digits, width `1e-50`.
    pub fn euler_e() -> Self {
        let (int, frac) = E_DIGITS_50.split_once('.').expect("decimal point");
        let digits: BigInt = alloc::format!("{int}{frac}").parse().expect("digits");
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        let lo = BigRational::new(digits.clone(), scale.clone());
        let hi = BigRational::new(digits + 1, scale);
        Enclosure { lo, hi }
    }

    /// `e * v` for a positive `v`.
    pub fn e_times(v: f64) -> Result<Self> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid("v must be positive and finite"));
        }
        Ok(Enclosure::euler_e().scale(&rational_from_f64(v)?))
    }

    /// Multiply by a nonnegative rational.
    pub fn scale(&self, k: &BigRational) -> Self {
        debug_assert!(!k.is_negative_sign());
        Enclosure {
            lo: &self.lo * k,
            hi: &self.hi * k,
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Certified comparison of the enclosed number against `q`.
    pub fn cmp_rational(&self, q: &BigRational) -> Option<Ordering> {
        if &self.hi < q {
            Some(Ordering::Less)
        } else if &self.lo > q {
            Some(Ordering::Greater)
        } else if self.lo == self.hi {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certified floor, or `None` when an integer lies inside the enclosure.
    pub fn floor(&self) -> Option<BigInt> {
        let a = self.lo.floor().to_integer();
        let b = self.hi.floor().to_integer();
        if a == b && (self.lo == self.hi || !self.hi.is_integer()) {
            Some(a)
        } else {
            None
        }
    }

    /// Certified ceiling, or `None` when an integer lies inside the enclosure.
    pub fn ceil(&self) -> Option<BigInt> {
        let a = self.lo.ceil().to_integer();
        let b = self.hi.ceil().to_integer();
        if a == b && (self.lo == self.hi || !self.lo.is_integer()) {
            Some(a)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&((&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))))
    }
}

trait SignExt {
    fn is_negative_sign(&self) -> bool;
}

impl SignExt for BigRational {
    fn is_negative_sign(&self) -> bool {
        self.numer().sign() == num_bigint::Sign::Minus
    }
}

/// Exact conversion of a finite `f64` (every finite double is a dyadic
/// rational).
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::invalid("non-finite float"))
}

pub fn ratio_to_f64(q: &BigRational) -> f64 {
    // Shift so that both parts fit comfortably before converting.
    let n = q.numer();
    let d = q.denom();
    if n.is_zero() {
        return 0.0;
    }
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift = 64 - (nb - db);
    let (num, den) = if shift > 0 {
        (n << (shift as usize), d.clone())
    } else {
        (n.clone(), d << ((-shift) as usize))
    };
    let qi = &num / &den;
    let mant = qi.to_f64().unwrap_or(f64::NAN);
    libm::scalbn(mant, -(shift.clamp(-4000, 4000) as i32))
}

/// `floor(e^a)` for a small nonnegative integer `a`, certified through the
/// 50-digit enclosure of `e`.
pub fn floor_exp(a: u32) -> Result<u64> {
    let e = Enclosure::euler_e();
    let lo = num_traits::pow(e.lo, a as usize);
    let hi = num_traits::pow(e.hi, a as usize);
    let enc = Enclosure { lo, hi };
    let f = enc
        .floor()
        .ok_or_else(|| Error::BoundaryTie(alloc::format!("floor(e^{a})")))?;
    f.to_u64().ok_or(Error::Overflow("floor_exp"))
}

/// `floor(e * v)` certified.
pub fn floor_ev(v: f64) -> Result<u64> {
    let enc = Enclosure::e_times(v)?;
    let f = enc
        .floor()
        .ok_or_else(|| Error::BoundaryTie(alloc::format!("floor(e*{v})")))?;
    f.to_u64().ok_or(Error::Overflow("floor_ev"))
}

/// Integers in the real interval `[u, ev]`, i.e. `ceil(u)..=floor(e v)`.
pub fn k_range(u: f64, v: f64) -> Result<core::ops::RangeInclusive<u64>> {
    let lo = crate::float::ceil(u).max(1.0) as u64;
    let hi = floor_ev(v)?;
    Ok(lo..=hi)
}

/// Sum of reciprocals of pairwise coprime integers (e.g. distinct primes);
/// the product-tree result is already in lowest terms.
pub fn coprime_reciprocal_sum(ms: &[u64]) -> BigRational {
    fn tree(ms: &[u64]) -> (BigUint, BigUint) {
        match ms.len() {
            0 => (BigUint::zero(), BigUint::one()),
            1 => (BigUint::one(), BigUint::from(ms[0])),
            n => {
                let (a, b) = tree(&ms[..n / 2]);
                let (c, d) = tree(&ms[n / 2..]);
                (&a * &d + &c * &b, b * d)
            }
        }
    }
    let (n, d) = tree(ms);
    BigRational::new_raw(BigInt::from(n), BigInt::from(d))
}

/// Result of summing many positive terms `c / m`.
#[derive(Clone, Debug, PartialEq)]
pub struct SumValue {
    /// Exact value when it stayed affordable.
    pub exact: Option<BigRational>,
    pub approx: f64,
    /// Bound on `|approx - true value|`.
    pub error_bound: f64,
    pub terms: usize,
}

impl SumValue {
    pub fn zero() -> Self {
        SumValue {
            exact: Some(BigRational::zero()),
            approx: 0.0,
            error_bound: 0.0,
            terms: 0,
        }
    }

    /// Numerator and denominator as decimal strings, when exact.
    pub fn exact_parts(&self) -> Option<(alloc::string::String, alloc::string::String)> {
        self.exact
            .as_ref()
            .map(|q| (q.numer().to_string(), q.denom().to_string()))
    }
}

/// Accumulates `c / m` exactly in least-common-multiple form while the
/// denominator stays under `max_den_bits`, with a compensated float shadow
/// that is always kept.
#[derive(Clone, Debug)]
pub struct ReciprocalAccumulator {
    float: NeumaierSum,
    rounding: f64,
    exact: Option<(BigUint, BigUint)>,
    max_den_bits: u64,
    max_terms: usize,
}

impl ReciprocalAccumulator {
    pub const DEFAULT_DEN_BITS: u64 = 1 << 14;

    pub fn new(max_terms: usize, max_den_bits: u64) -> Self {
        ReciprocalAccumulator {
            float: NeumaierSum::new(),
            rounding: 0.0,
            exact: Some((BigUint::zero(), BigUint::one())),
            max_den_bits,
            max_terms,
        }
    }

    /// Float-only accumulator.
    pub fn approximate() -> Self {
        let mut acc = Self::new(0, 0);
        acc.exact = None;
        acc
    }

    pub fn add(&mut self, c: u64, m: u64) {
        debug_assert!(m > 0);
        let term = c as f64 / m as f64;
        self.float.add(term);
        // c and m each round once, the division once more.
        self.rounding += 3.0 * UNIT_ROUNDOFF * term;
        if self.float.terms() > self.max_terms {
            self.exact = None;
        }
        if let Some((num, den)) = self.exact.as_mut() {
            let r = (&*den % m).to_u64().expect("remainder below m");
            let g = r.gcd(&m);
            let mg = m / g;
            let den_g = &*den / g;
            *num = &*num * mg + den_g * c;
            *den *= mg;
            if den.bits() > self.max_den_bits {
                self.exact = None;
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn approx(&self) -> f64 {
        self.float.value()
    }

    pub fn finish(self) -> SumValue {
        let exact = self
            .exact
            .map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)));
        let approx = match &exact {
            Some(q) => ratio_to_f64(q),
            None => self.float.value(),
        };
        let error_bound = if exact.is_some() {
            approx.abs() * UNIT_ROUNDOFF
        } else {
            self.float.error_bound() + self.rounding
        };
        SumValue {
            exact,
            approx,
            error_bound,
            terms: self.float.terms(),
        }
    }
}

/// Parse "n/d" or "n" into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::invalid(alloc::format!("not a rational: {s}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            if let Some((ip, fp)) = s.split_once('.') {
                let digits: BigInt = alloc::format!("{ip}{fp}").parse().map_err(|_| bad())?;
                let scale = num_traits::pow(BigInt::from(10u32), fp.len());
                Ok(BigRational::new(digits, scale))
            } else {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(BigRational::from_integer(n))
            }
        }
    }
}

/// Collect reduced `f64` approximations of a slice of rationals.
pub fn to_f64_vec(qs: &[BigRational]) -> Vec<f64> {
    qs.iter().map(ratio_to_f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn e_enclosure_brackets_e() {
        let e = Enclosure::euler_e();
        assert!(e.lo < e.hi);
        assert_eq!(e.to_f64(), core::f64::consts::E);
        assert_eq!(e.floor(), Some(BigInt::from(2)));
    }

    #[test]
    fn floor_exp_small_powers() {
        assert_eq!(floor_exp(0).unwrap(), 1);
        assert_eq!(floor_exp(2).unwrap(), 7);
        assert_eq!(floor_exp(3).unwrap(), 20);
        assert_eq!(floor_exp(21).unwrap(), 1_318_815_734);
    }

    #[test]
    fn k_range_uses_floor_of_ev() {
        assert_eq!(k_range(1.0, 1.0).unwrap(), 1..=2);
        assert_eq!(k_range(2.0, 2.0).unwrap(), 2..=5);
        assert_eq!(k_range(1.5, 3.0).unwrap(), 2..=8);
    }

    #[test]
    fn accumulator_exact_and_float_agree() {
        let mut acc = ReciprocalAccumulator::new(100, 4096);
        for n in [1u64, 2, 3, 4, 6, 8, 9] {
            acc.add(1, n);
        }
        let s = acc.finish();
        assert_eq!(s.exact, Some(q(179, 72)));
        assert!((s.approx - 179.0 / 72.0).abs() < 1e-15);
    }

    #[test]
    fn accumulator_drops_exact_past_cap() {
        let mut acc = ReciprocalAccumulator::new(1000, 64);
        for p in [
            2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
        ] {
            acc.add(1, p);
        }
        assert!(!acc.is_exact());
        let s = acc.finish();
        assert!(s.exact.is_none());
        assert!(s.error_bound > 0.0 && s.error_bound < 1e-14);
    }

    #[test]
    fn coprime_sum_is_reduced() {
        let s = coprime_reciprocal_sum(&[2, 3, 5]);
        assert_eq!(s, q(31, 30));
        assert_eq!(s.denom(), &BigInt::from(30));
    }

    #[test]
    fn ratio_to_f64_handles_huge_parts() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let r = BigRational::new(big.clone() * 3, big * 7);
        assert!((ratio_to_f64(&r) - 3.0 / 7.0).abs() < 1e-16);
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("3/9").unwrap(), q(1, 3));
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert!(parse_rational("1/0").is_err());
    }
}
