use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::intervals::OpenIntervalSet;
use crate::{Error, Result};

/// Largest number of components a sum set may reach.
pub const MAX_COMPONENTS: usize = 1_000_000;

/// Largest `k` accepted by [`reachable_one`].
pub const MAX_REACH_K: u32 = 64;

/// Verdict of the exact reachability search.
#[derive(Clone, Debug, PartialEq)]
pub enum Reachability {
    /// `t_1 + ... + t_k = 1` with every `t_i ∈ T`; `k` is the smallest such.
    Reachable { k: u32, witness: Vec<BigRational> },
    /// `1` is not a sum of `k` elements of `T` for any `k <= up_to`.
    Unreachable { up_to: u32 },
}

impl Reachability {
    pub fn is_reachable(&self) -> bool {
        matches!(self, Reachability::Reachable { .. })
    }
}

/// `T` and its `j`-fold sum sets as open integer intervals over a common
/// denominator `D` (so `1` is the integer `D`).
pub(crate) struct SumLayers {
    pub den: u128,
    pub base: Vec<(u128, u128)>,
    /// `layers[j - 1]` is the part of `jT` below `1`, plus at most one
    /// component containing `1`.
    pub layers: Vec<Vec<(u128, u128)>>,
}

fn common_denominator(t: &OpenIntervalSet, k_max: u32) -> Result<(u128, Vec<(u128, u128)>)> {
    let mut d = BigUint::one();
    for (a, b) in t.intervals() {
        for r in [a, b] {
            d = d.lcm(&r.denom().magnitude().clone());
        }
    }
    let too_big = || Error::invalid("common denominator of T is too large for exact sum sets");
    let den = d.to_u128().ok_or_else(too_big)?;
    // Sums of up to k_max endpoints below 2 must fit.
    if den.checked_mul(2 * k_max as u128 + 2).is_none() {
        return Err(too_big());
    }
    let scale = |r: &BigRational| -> u128 {
        let v = r.numer() * (BigInt::from(den) / r.denom());
        v.to_u128().expect("endpoint fits")
    };
    let base = t
        .intervals()
        .iter()
        .map(|(a, b)| (scale(a), scale(b)))
        .collect();
    Ok((den, base))
}

/// Union of open intervals; overlapping ones merge, touching ones do not.
fn normalize(mut v: Vec<(u128, u128)>) -> Vec<(u128, u128)> {
    v.sort_unstable();
    let mut out: Vec<(u128, u128)> = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a < last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn containing(layer: &[(u128, u128)], s: u128) -> Option<usize> {
    let i = layer.partition_point(|&(a, _)| a < s);
    (i > 0 && s < layer[i - 1].1).then(|| i - 1)
}

impl SumLayers {
    /// Builds `jT` for `j = 1..=k_max`, stopping at the first `j` whose sum
    /// set contains `1`.
    pub fn build(t: &OpenIntervalSet, k_max: u32) -> Result<(Self, Option<u32>)> {
        let (den, base) = common_denominator(t, k_max)?;
        let mut layers: Vec<Vec<(u128, u128)>> = Vec::new();
        let mut cur: Vec<(u128, u128)> = base.clone();
        for j in 1..=k_max {
            if j > 1 {
                let prev = &layers[j as usize - 2];
                let mut sums = Vec::with_capacity(prev.len() * base.len());
                for &(a, b) in prev {
                    for &(c, d) in &base {
                        // Sums starting at or above 1 can never come back.
                        if a + c < den {
                            sums.push((a + c, b + d));
                        }
                    }
                }
                cur = normalize(sums);
                if cur.len() > MAX_COMPONENTS {
                    return Err(Error::IntervalBlowup {
                        components: cur.len(),
                    });
                }
            }
            cur.retain(|&(a, _)| a < den);
            let hit = containing(&cur, den).is_some();
            layers.push(core::mem::take(&mut cur));
            if hit {
                return Ok((SumLayers { den, base, layers }, Some(j)));
            }
        }
        Ok((SumLayers { den, base, layers }, None))
    }

    fn rat(&self, n: u128) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(self.den))
    }

    /// Writes `1` as a sum of `k` elements of `T`, preferring the equal split
    /// `s/j` at every step.
    pub fn witness(&self, k: u32) -> Vec<BigRational> {
        let mut out = Vec::with_capacity(k as usize);
        let mut s = BigRational::one();
        for j in (1..=k).rev() {
            if j == 1 {
                out.push(s.clone());
                break;
            }
            let prev = &self.layers[j as usize - 2];
            let equal = &s / BigRational::from_integer(BigInt::from(j));
            let mut choice = None;
            'search: for &(c, d) in &self.base {
                let (c, d) = (self.rat(c), self.rat(d));
                for &(e, f) in prev {
                    let (e, f) = (self.rat(e), self.rat(f));
                    // t ∈ (c, d) with s - t ∈ (e, f).
                    let lo = if c > &s - &f { c.clone() } else { &s - &f };
                    let hi = if d < &s - &e { d.clone() } else { &s - &e };
                    if lo < hi {
                        let t = if lo < equal && equal < hi {
                            equal.clone()
                        } else {
                            (&lo + &hi) / BigRational::from_integer(BigInt::from(2))
                        };
                        choice = Some(t);
                        break 'search;
                    }
                }
            }
            let t = choice.expect("s lies in jT, so a split exists");
            s = &s - &t;
            out.push(t);
        }
        out
    }
}

/// Exact decision whether `1 = t_1 + ... + t_k` with `t_i ∈ T` for some
/// `k <= k_max`, by building the sum sets `jT` as unions of open intervals.
pub fn reachable_one(t: &OpenIntervalSet, k_max: u32) -> Result<Reachability> {
    if k_max == 0 || k_max > MAX_REACH_K {
        return Err(Error::invalid("k_max must lie in 1..=64"));
    }
    if t.is_empty() {
        return Ok(Reachability::Unreachable { up_to: k_max });
    }
    let (layers, hit) = SumLayers::build(t, k_max)?;
    Ok(match hit {
        Some(k) => Reachability::Reachable {
            k,
            witness: layers.witness(k),
        },
        None => Reachability::Unreachable { up_to: k_max },
    })
}

/// Whether `1 ∈ kT` for this exact `k`.
pub fn one_in_k_fold(t: &OpenIntervalSet, k: u32) -> Result<bool> {
    if t.is_empty() {
        return Ok(false);
    }
    let (den, base) = common_denominator(t, k)?;
    let mut cur = base.clone();
    for _ in 1..k {
        let mut sums = Vec::with_capacity(cur.len() * base.len());
        for &(a, b) in &cur {
            for &(c, d) in &base {
                if a + c < den {
                    sums.push((a + c, b + d));
                }
            }
        }
        cur = normalize(sums);
        if cur.len() > MAX_COMPONENTS {
            return Err(Error::IntervalBlowup {
                components: cur.len(),
            });
        }
    }
    Ok(containing(&cur, den).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn check_witness(t: &OpenIntervalSet, r: &Reachability) {
        if let Reachability::Reachable { k, witness } = r {
            assert_eq!(witness.len(), *k as usize);
            let s: BigRational = witness.iter().fold(BigRational::zero(), |a, b| a + b);
            assert_eq!(s, BigRational::one());
            assert!(witness.iter().all(|w| t.contains(w)));
        }
    }

    #[test]
    fn symmetric_interval() {
        let t = OpenIntervalSet::parse("0.2,0.4").unwrap();
        let r = reachable_one(&t, 10).unwrap();
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        assert_eq!(
            r,
            Reachability::Reachable {
                k: 3,
                witness: alloc::vec![third.clone(), third.clone(), third]
            }
        );
    }

    #[test]
    fn t_family_unreachable() {
        for n in 2..=6 {
            let t = OpenIntervalSet::t_family(n).unwrap();
            assert_eq!(
                reachable_one(&t, 32).unwrap(),
                Reachability::Unreachable { up_to: 32 }
            );
        }
    }

    #[test]
    fn upper_half_unreachable() {
        let t = OpenIntervalSet::parse("1/2,1").unwrap();
        assert!(!reachable_one(&t, 64).unwrap().is_reachable());
        let t = OpenIntervalSet::parse("1/2,1/1").unwrap();
        assert!(!one_in_k_fold(&t, 2).unwrap());
    }

    /// Brute force: enumerate index tuples and add interval endpoints.
    fn brute(t: &OpenIntervalSet, k_max: u32) -> Option<u32> {
        let iv = t.intervals();
        for k in 1..=k_max {
            let mut idx = alloc::vec![0usize; k as usize];
            loop {
                let lo: BigRational = idx.iter().fold(BigRational::zero(), |a, &i| a + &iv[i].0);
                let hi: BigRational = idx.iter().fold(BigRational::zero(), |a, &i| a + &iv[i].1);
                if lo < BigRational::one() && BigRational::one() < hi {
                    return Some(k);
                }
                let mut d = 0;
                loop {
                    if d == idx.len() {
                        break;
                    }
                    idx[d] += 1;
                    if idx[d] < iv.len() {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
                if d == idx.len() {
                    break;
                }
            }
        }
        None
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = crate::rng::SplitMix64::new(21);
        for _ in 0..100 {
            let m = 1 + rng.below(3);
            let mut v = alloc::vec::Vec::new();
            for _ in 0..m {
                let a = 1 + rng.below(58);
                let len = 1 + rng.below(5);
                let b = (a + len).min(60);
                v.push((
                    BigRational::new(BigInt::from(a), BigInt::from(60)),
                    BigRational::new(BigInt::from(b), BigInt::from(60)),
                ));
            }
            let t = OpenIntervalSet::new(v).unwrap();
            let r = reachable_one(&t, 8).unwrap();
            match brute(&t, 8) {
                Some(k) => assert!(matches!(r, Reachability::Reachable { k: kk, .. } if kk == k)),
                None => assert_eq!(r, Reachability::Unreachable { up_to: 8 }),
            }
            check_witness(&t, &r);
        }
    }
}
