use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::exact::{parse_rational, ratio_to_f64, Enclosure};
use crate::float::{ln_1p, NeumaierSum};
use crate::{Error, Result};

/// A finite union of disjoint open intervals `(α_i, β_i)` with rational
/// endpoints, `0 < α_1 < β_1 <= α_2 < ... < β_m <= 1`.
///
/// Intervals that merely touch stay separate: their common endpoint is not
/// in the set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpenIntervalSet {
    intervals: Vec<(BigRational, BigRational)>,
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl OpenIntervalSet {
    pub fn empty() -> Self {
        OpenIntervalSet {
            intervals: Vec::new(),
        }
    }

    /// Sorts, merges overlapping intervals and validates the range.
    pub fn new(mut intervals: Vec<(BigRational, BigRational)>) -> Result<Self> {
        for (a, b) in &intervals {
            if !(a.is_positive() && a < b && *b <= BigRational::one()) {
                return Err(Error::invalid(format!(
                    "interval ({a}, {b}) must satisfy 0 < α < β <= 1"
                )));
            }
        }
        intervals.sort();
        let mut out: Vec<(BigRational, BigRational)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match out.last_mut() {
                Some(last) if a < last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => out.push((a, b)),
            }
        }
        Ok(OpenIntervalSet { intervals: out })
    }

    /// From `"a,b"` pairs separated by `;`, each endpoint a decimal or
    /// `n/d` rational.
    pub fn parse(s: &str) -> Result<Self> {
        let mut v = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let part = part.trim_start_matches('(').trim_end_matches(')');
            let (a, b) = part
                .split_once(',')
                .ok_or_else(|| Error::invalid(format!("expected 'a,b' in {part}")))?;
            v.push((parse_rational(a)?, parse_rational(b)?));
        }
        Self::new(v)
    }

    /// `T_N = ⋃_{j=1}^{N} (j/(N+1), j/N)`.
    pub fn t_family(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("N must be positive"));
        }
        let n = n as i64;
        Self::new((1..=n).map(|j| (q(j, n + 1), q(j, n))).collect())
    }

    pub fn intervals(&self) -> &[(BigRational, BigRational)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, t: &BigRational) -> bool {
        let i = self.intervals.partition_point(|(a, _)| a < t);
        i > 0 && *t < self.intervals[i - 1].1
    }

    pub fn contains_f64(&self, t: f64) -> bool {
        match BigRational::from_float(t) {
            Some(r) => self.contains(&r),
            None => false,
        }
    }

    /// `∫_T dt/t = Σ log(β_i/α_i)`, each term through `log1p((β-α)/α)`.
    pub fn mass(&self) -> f64 {
        self.intervals
            .iter()
            .map(|(a, b)| ln_1p(ratio_to_f64(&((b - a) / a))))
            .collect::<NeumaierSum>()
            .value()
    }

    /// The ratios `β_i/α_i` whose logarithms sum to the mass.
    pub fn mass_ratios(&self) -> Vec<BigRational> {
        self.intervals.iter().map(|(a, b)| b / a).collect()
    }

    /// `T ∩ (lo, hi)`.
    pub fn clip(&self, lo: &BigRational, hi: &BigRational) -> Self {
        let intervals = self
            .intervals
            .iter()
            .filter_map(|(a, b)| {
                let a2 = if a > lo { a.clone() } else { lo.clone() };
                let b2 = if b < hi { b.clone() } else { hi.clone() };
                (a2 < b2).then_some((a2, b2))
            })
            .collect();
        OpenIntervalSet { intervals }
    }

    /// `T ⊆ (lo, hi)` (equivalently every `α_i >= lo`, `β_i <= hi`).
    pub fn within(&self, lo: &BigRational, hi: &BigRational) -> bool {
        self.intervals.iter().all(|(a, b)| a >= lo && b <= hi)
    }

    /// Smallest left endpoint.
    pub fn inf(&self) -> Option<&BigRational> {
        self.intervals.first().map(|i| &i.0)
    }

    /// Largest right endpoint.
    pub fn sup(&self) -> Option<&BigRational> {
        self.intervals.last().map(|i| &i.1)
    }

    /// Every interval satisfies `1/(ev) <= α` and `β <= 1/u`, decided
    /// through the enclosure of `e`.
    pub fn within_ev(&self, u: f64, v: f64) -> Result<bool> {
        let ev = Enclosure::e_times(v)?;
        let uq = crate::exact::rational_from_f64(u)?;
        for (a, b) in &self.intervals {
            // α >= 1/(ev)  <=>  α·ev >= 1
            match ev.scale(a).cmp_rational(&BigRational::one()) {
                Some(Ordering::Less) => return Ok(false),
                Some(_) => {}
                None => {
                    return Err(Error::BoundaryTie(format!("{a} against 1/(e*{v})")));
                }
            }
            if b * &uq > BigRational::one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Endpoints as decimal strings `n/d`.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|(a, b)| format!("({a},{b})"))
            .collect();
        parts.join(";")
    }

    pub fn to_f64_pairs(&self) -> Vec<(f64, f64)> {
        self.intervals
            .iter()
            .map(|(a, b)| (ratio_to_f64(a), ratio_to_f64(b)))
            .collect()
    }
}

impl Default for OpenIntervalSet {
    fn default() -> Self {
        Self::empty()
    }
}
