use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::exact::{rational_from_f64, Enclosure, ReciprocalAccumulator, SumValue};
use crate::{Error, Result};

/// A set `A` of integers in `(N/(ev), N/u]`, with `N`, `u`, `v` attached.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedIntegerSet {
    n: u64,
    u: f64,
    v: f64,
    elements: Vec<u64>,
}

fn check_uv(u: f64, v: f64) -> Result<()> {
    if !(u >= 1.0 && v >= u && v.is_finite()) {
        return Err(Error::invalid("need 1 <= u <= v"));
    }
    Ok(())
}

/// Exact admissibility of `a` for `(N/(ev), N/u]`.
fn admissible(n: u64, u: &BigRational, ev: &Enclosure, a: u64) -> Result<bool> {
    let aq = BigRational::from_integer(BigInt::from(a));
    let nq = BigRational::from_integer(BigInt::from(n));
    if &aq * u > nq {
        return Ok(false);
    }
    match ev.scale(&aq).cmp_rational(&nq) {
        Some(Ordering::Greater) => Ok(true),
        Some(_) => Ok(false),
        None => Err(Error::BoundaryTie(alloc::format!(
            "{a}·e·v against N={n} within the enclosure of e"
        ))),
    }
}

impl WeightedIntegerSet {
    /// Validates membership of every element exactly.
    pub fn new(n: u64, u: f64, v: f64, elements: &[u64]) -> Result<Self> {
        check_uv(u, v)?;
        let uq = rational_from_f64(u)?;
        let ev = Enclosure::e_times(v)?;
        let mut el = elements.to_vec();
        el.sort_unstable();
        el.dedup();
        for &a in &el {
            if !admissible(n, &uq, &ev, a)? {
                return Err(Error::invalid(alloc::format!(
                    "{a} is outside (N/(ev), N/u] for N={n}, u={u}, v={v}"
                )));
            }
        }
        Ok(WeightedIntegerSet {
            n,
            u,
            v,
            elements: el,
        })
    }

    /// Smallest and largest admissible integers, or `None` when the range is
    /// empty.
    pub fn admissible_range(n: u64, u: f64, v: f64) -> Result<Option<(u64, u64)>> {
        check_uv(u, v)?;
        let uq = rational_from_f64(u)?;
        let ev = Enclosure::e_times(v)?;
        let guess_lo = (n as f64 / (core::f64::consts::E * v)) as u64;
        let guess_hi = (n as f64 / u) as u64;
        let mut lo = guess_lo.saturating_sub(2).max(1);
        while lo <= guess_hi + 2 && !admissible(n, &uq, &ev, lo)? {
            lo += 1;
        }
        let mut hi = guess_hi + 2;
        while hi >= lo && !admissible(n, &uq, &ev, hi)? {
            hi -= 1;
        }
        if hi < lo || !admissible(n, &uq, &ev, lo)? {
            return Ok(None);
        }
        Ok(Some((lo, hi)))
    }

    /// Every integer in `(N/(ev), N/u]`.
    pub fn full_interval(n: u64, u: f64, v: f64) -> Result<Self> {
        let elements = match Self::admissible_range(n, u, v)? {
            Some((lo, hi)) => (lo..=hi).collect(),
            None => Vec::new(),
        };
        Ok(WeightedIntegerSet { n, u, v, elements })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `Σ 1/a`, exact for up to `10^4` elements.
    pub fn reciprocal_sum(&self) -> SumValue {
        let mut acc = ReciprocalAccumulator::new(10_000, 1 << 16);
        for &a in &self.elements {
            acc.add(1, a);
        }
        acc.finish()
    }
}
