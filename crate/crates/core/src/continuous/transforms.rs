use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::intervals::OpenIntervalSet;
use crate::comb::WeightedIntegerSet;
use crate::exact::Enclosure;
use crate::{Error, Result};

/// Integer set obtained from `T` by shrinking each interval by `2ev/N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Discretized {
    pub set: WeightedIntegerSet,
    /// Indices of intervals of `T` that contribute no integer.
    pub empty_intervals: Vec<usize>,
    pub mass: f64,
    pub reciprocal_sum: f64,
    /// `|Σ 1/a - ∫_T dt/t|`.
    pub discrepancy: f64,
}

/// Union of the cells `(a/N, (a+1)/N)` over `a ∈ A`.
#[derive(Clone, Debug, PartialEq)]
pub struct Continuized {
    pub set: OpenIntervalSet,
    pub mass: f64,
    pub reciprocal_sum: f64,
    pub discrepancy: f64,
}

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `A = ∪ {a : α_i N + 2ev < a < β_i N - 2ev}` for `T ⊆ (1/(ev), 1/u]`.
///
/// `2ev` is replaced by the upper end of its rational enclosure, so an
/// integer is kept only when both strict inequalities are certified.
pub fn t_to_a(t: &OpenIntervalSet, big_n: u64, u: f64, v: f64) -> Result<Discretized> {
    if !(u >= 1.0 && v >= u && v.is_finite()) {
        return Err(Error::invalid("need 1 <= u <= v"));
    }
    if !t.within_ev(u, v)? {
        return Err(Error::invalid("T must lie in (1/(ev), 1/u]"));
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let margin = Enclosure::e_times(v)?.scale(&two).hi;
    let nq = int(big_n);
    let mut elements = Vec::new();
    let mut empty_intervals = Vec::new();
    for (i, (a, b)) in t.intervals().iter().enumerate() {
        // Smallest integer strictly above αN + margin.
        let lo: BigInt = (a * &nq + &margin).floor().to_integer() + 1;
        // Largest integer strictly below βN - margin.
        let hi: BigInt = (b * &nq - &margin).ceil().to_integer() - 1;
        if lo > hi {
            empty_intervals.push(i);
            continue;
        }
        let lo = lo.to_u64().ok_or(Error::Overflow("discretized element"))?;
        let hi = hi.to_u64().ok_or(Error::Overflow("discretized element"))?;
        elements.extend(lo..=hi);
    }
    let set = WeightedIntegerSet::new(big_n, u, v, &elements)?;
    let mass = t.mass();
    let reciprocal_sum = set.reciprocal_sum().approx;
    Ok(Discretized {
        set,
        empty_intervals,
        mass,
        reciprocal_sum,
        discrepancy: (reciprocal_sum - mass).abs(),
    })
}

/// `T = ∪_{a ∈ A} (a/N, (a+1)/N)`. An element `a = N` has its cell above
/// `1` and contributes nothing.
pub fn a_to_t(a: &WeightedIntegerSet) -> Result<Continuized> {
    let big_n = a.n();
    let cells: Vec<(BigRational, BigRational)> = a
        .elements()
        .iter()
        .filter(|&&x| x < big_n)
        .map(|&x| {
            let lo = BigRational::new(BigInt::from(x), BigInt::from(big_n));
            let hi = BigRational::new(BigInt::from(x + 1), BigInt::from(big_n));
            (lo, hi)
        })
        .collect();
    let set = OpenIntervalSet::new(cells)?;
    let mass = set.mass();
    let reciprocal_sum = a.reciprocal_sum().approx;
    Ok(Continuized {
        set,
        mass,
        reciprocal_sum,
        discrepancy: (reciprocal_sum - mass).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shrink_example() {
        let t = OpenIntervalSet::parse("0.2,0.4").unwrap();
        let d = t_to_a(&t, 1000, 2.0, 2.0).unwrap();
        let want: Vec<u64> = (211..=389).collect();
        assert_eq!(d.set.elements(), &want[..]);
        assert!(d.empty_intervals.is_empty());
    }

    #[test]
    fn single_cell() {
        let a = WeightedIntegerSet::new(10, 2.0, 2.0, &[5]).unwrap();
        let c = a_to_t(&a).unwrap();
        assert_eq!(c.set.describe(), "(1/2,3/5)");
        assert!((c.mass - libm::log(1.2)).abs() < 1e-15);
        assert!((c.discrepancy - (0.2 - libm::log(1.2))).abs() < 1e-15);
    }

    #[test]
    fn round_trip_shrinks() {
        let t = OpenIntervalSet::parse("0.2,0.3;0.31,0.45").unwrap();
        let d = t_to_a(&t, 2000, 2.0, 2.0).unwrap();
        let back = a_to_t(&d.set).unwrap().set;
        for (a, b) in back.intervals() {
            let mid = (a + b) / BigRational::from_integer(BigInt::from(2));
            assert!(t.contains(&mid));
            assert!(t.contains(a) || t.intervals().iter().any(|(x, y)| x <= a && b <= y));
        }
    }

    #[test]
    fn tiny_interval_reports_empty() {
        let t = OpenIntervalSet::parse("0.2,0.201;0.3,0.4").unwrap();
        let d = t_to_a(&t, 1000, 2.0, 2.0).unwrap();
        assert_eq!(d.empty_intervals, alloc::vec![0]);
    }
}
