use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::float::{gamma, UNIT_ROUNDOFF};
use crate::{Error, Result};

/// Ceiling on the total number of table cells over all layers.
pub const REP_CELLS: u64 = 1 << 26;

/// Exact weighted sums are kept while `bits(lcm) * k` stays below this.
pub const EXACT_WEIGHT_BITS: u64 = 4096;

/// Exact weighted sums are kept while the convolution work stays below this.
pub const EXACT_WEIGHT_WORK: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq)]
enum Counts {
    Small(Vec<u128>),
    Big(Vec<BigUint>),
}

/// Representation data of `j`-fold sums for one `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct RepLayer {
    j: u32,
    lo: u64,
    len: usize,
    counts: Counts,
    weighted: Vec<f64>,
    rel_error: f64,
    /// Integer numerators over `den`, when exact sums were affordable.
    exact: Option<(Vec<BigUint>, BigUint)>,
}

impl RepLayer {
    pub fn j(&self) -> u32 {
        self.j
    }

    /// The `n` this layer tracks (empty when `lo > hi`).
    #[allow(clippy::reversed_empty_ranges)]
    pub fn range(&self) -> RangeInclusive<u64> {
        if self.len == 0 {
            1..=0
        } else {
            self.lo..=self.lo + self.len as u64 - 1
        }
    }

    fn index(&self, n: u64) -> Option<usize> {
        if n < self.lo {
            return None;
        }
        let i = (n - self.lo) as usize;
        (i < self.len).then_some(i)
    }

    /// `r(n)`, the number of ordered tuples summing to `n`.
    pub fn count(&self, n: u64) -> BigUint {
        match (self.index(n), &self.counts) {
            (None, _) => BigUint::zero(),
            (Some(i), Counts::Small(c)) => BigUint::from(c[i]),
            (Some(i), Counts::Big(c)) => c[i].clone(),
        }
    }

    /// `r(n)` when it fits in 128 bits.
    pub fn count_u128(&self, n: u64) -> Option<u128> {
        match (self.index(n), &self.counts) {
            (None, _) => Some(0),
            (Some(i), Counts::Small(c)) => Some(c[i]),
            (Some(i), Counts::Big(c)) => c[i].to_u128(),
        }
    }

    /// `Σ r(n)` over `lo..=hi`.
    pub fn count_sum(&self, lo: u64, hi: u64) -> BigUint {
        let mut s = BigUint::zero();
        let mut small: u128 = 0;
        for n in lo.max(self.lo)..=hi {
            let Some(i) = self.index(n) else { break };
            match &self.counts {
                Counts::Small(c) => match small.checked_add(c[i]) {
                    Some(t) => small = t,
                    None => {
                        s += small;
                        small = c[i];
                    }
                },
                Counts::Big(c) => s += &c[i],
            }
        }
        s + small
    }

    /// Sum over tuples with sum `n` of `1/(a_1 ... a_j)`, rounded.
    pub fn weighted(&self, n: u64) -> f64 {
        self.index(n).map_or(0.0, |i| self.weighted[i])
    }

    /// Bound on the absolute error of [`RepLayer::weighted`].
    pub fn weighted_error(&self, n: u64) -> f64 {
        let w = self.weighted(n);
        w * self.rel_error / (1.0 - self.rel_error)
    }

    /// Relative error bound shared by every weighted entry.
    pub fn rel_error(&self) -> f64 {
        self.rel_error
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// The weighted sum as an exact rational, when it was kept.
    pub fn weighted_exact(&self, n: u64) -> Option<BigRational> {
        let (num, den) = self.exact.as_ref()?;
        let v = match self.index(n) {
            Some(i) => num[i].clone(),
            None => BigUint::zero(),
        };
        Some(BigRational::new(BigInt::from(v), BigInt::from(den.clone())))
    }
}

/// Representation counts `r_{jA}(n)` and weighted sums for every
/// `1 <= j <= k` and `n <= cap`, over ordered tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct RepTable {
    elements: Vec<u64>,
    k: u32,
    cap: u64,
    layers: Vec<RepLayer>,
}

impl RepTable {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    /// Layer `j` for `1 <= j <= k`.
    pub fn layer(&self, j: u32) -> &RepLayer {
        &self.layers[j as usize - 1]
    }

    pub fn top(&self) -> &RepLayer {
        self.layers.last().expect("k >= 1")
    }

    pub fn count(&self, n: u64) -> BigUint {
        self.top().count(n)
    }

    pub fn weighted(&self, n: u64) -> f64 {
        self.top().weighted(n)
    }

    pub fn weighted_exact(&self, n: u64) -> Option<BigRational> {
        self.top().weighted_exact(n)
    }
}

fn layer_span(a_min: u64, a_max: u64, j: u32, cap: u64) -> (u64, usize) {
    let lo = a_min.saturating_mul(j as u64);
    let hi = a_max.saturating_mul(j as u64).min(cap);
    if lo > hi {
        (lo, 0)
    } else {
        (lo, (hi - lo + 1) as usize)
    }
}

fn fits_u128(base: usize, j: u32) -> bool {
    let mut t: u128 = 1;
    for _ in 0..j {
        match t.checked_mul(base as u128) {
            Some(v) => t = v,
            None => return false,
        }
    }
    true
}

/// Builds the table by `k - 1` truncated self-convolutions.
pub fn rep_table(a: &[u64], k: u32, cap: u64) -> Result<RepTable> {
    rep_table_with(a, k, cap, EXACT_WEIGHT_WORK)
}

/// As [`rep_table`], keeping exact weighted sums while the convolution work
/// stays below `exact_work`.
pub fn rep_table_with(a: &[u64], k: u32, cap: u64, exact_work: u64) -> Result<RepTable> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let mut el = a.to_vec();
    el.sort_unstable();
    el.dedup();
    if el.first() == Some(&0) {
        return Err(Error::invalid("elements must be positive"));
    }
    let (a_min, a_max) = match (el.first(), el.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (1, 0),
    };
    let mut cells: u64 = 0;
    let mut work: u64 = 0;
    for j in 1..=k {
        let (_, len) = if el.is_empty() {
            (0, 0)
        } else {
            layer_span(a_min, a_max, j, cap)
        };
        cells += len as u64;
        work = work.saturating_add((len as u64).saturating_mul(el.len() as u64));
    }
    if cells > REP_CELLS {
        return Err(Error::BudgetExceeded {
            what: "representation table cells",
            requested: cells,
            ceiling: REP_CELLS,
        });
    }
    let lcm = el
        .iter()
        .fold(BigUint::one(), |l, &x| l.lcm(&BigUint::from(x)));
    let exact_ok = !el.is_empty()
        && work <= exact_work
        && lcm.bits().saturating_mul(k as u64) <= EXACT_WEIGHT_BITS;
    let int_w: Vec<BigUint> = if exact_ok {
        el.iter().map(|&x| &lcm / x).collect()
    } else {
        Vec::new()
    };
    let float_w: Vec<f64> = el.iter().map(|&x| 1.0 / x as f64).collect();
    let step = gamma(el.len() + 2);

    let mut layers: Vec<RepLayer> = Vec::with_capacity(k as usize);
    for j in 1..=k {
        let (lo, len) = if el.is_empty() {
            (0, 0)
        } else {
            layer_span(a_min, a_max, j, cap)
        };
        let layer = if j == 1 {
            let mut w = vec![0.0; len];
            let mut c = vec![0u128; len];
            let mut ex = vec![BigUint::zero(); if exact_ok { len } else { 0 }];
            for (i, &x) in el.iter().enumerate() {
                if x > cap {
                    break;
                }
                let idx = (x - lo) as usize;
                c[idx] = 1;
                w[idx] = float_w[i];
                if exact_ok {
                    ex[idx] = int_w[i].clone();
                }
            }
            RepLayer {
                j,
                lo,
                len,
                counts: Counts::Small(c),
                weighted: w,
                rel_error: UNIT_ROUNDOFF,
                exact: exact_ok.then(|| (ex, lcm.clone())),
            }
        } else {
            let prev = &layers[j as usize - 2];
            convolve(prev, &el, &float_w, &int_w, j, lo, len, step)
        };
        layers.push(layer);
    }
    Ok(RepTable {
        elements: el,
        k,
        cap,
        layers,
    })
}

#[allow(clippy::too_many_arguments)]
fn convolve(
    prev: &RepLayer,
    el: &[u64],
    float_w: &[f64],
    int_w: &[BigUint],
    j: u32,
    lo: u64,
    len: usize,
    step: f64,
) -> RepLayer {
    let hi_excl = lo + len as u64;
    let mut w = vec![0.0f64; len];
    // Positions of prev that land inside this layer for element `x`.
    let spans = |x: u64| -> Option<(usize, usize, usize)> {
        let start = prev.lo + x;
        if len == 0 || prev.len == 0 || start >= hi_excl {
            return None;
        }
        let out0 = (start - lo) as usize;
        let n = prev.len.min(len - out0);
        Some((0, out0, n))
    };
    for (i, &x) in el.iter().enumerate() {
        let Some((p0, o0, n)) = spans(x) else {
            continue;
        };
        let wx = float_w[i];
        let src = &prev.weighted[p0..p0 + n];
        for (dst, &s) in w[o0..o0 + n].iter_mut().zip(src) {
            *dst += s * wx;
        }
    }
    let counts = if fits_u128(el.len(), j) {
        let Counts::Small(pc) = &prev.counts else {
            unreachable!("smaller layers fit when this one does")
        };
        let mut c = vec![0u128; len];
        for &x in el {
            let Some((p0, o0, n)) = spans(x) else {
                continue;
            };
            for (dst, &s) in c[o0..o0 + n].iter_mut().zip(&pc[p0..p0 + n]) {
                *dst += s;
            }
        }
        Counts::Small(c)
    } else {
        let pc: Vec<BigUint> = match &prev.counts {
            Counts::Small(c) => c.iter().map(|&v| BigUint::from(v)).collect(),
            Counts::Big(c) => c.clone(),
        };
        let mut c = vec![BigUint::zero(); len];
        for &x in el {
            let Some((p0, o0, n)) = spans(x) else {
                continue;
            };
            for (dst, s) in c[o0..o0 + n].iter_mut().zip(&pc[p0..p0 + n]) {
                *dst += s;
            }
        }
        Counts::Big(c)
    };
    let exact = prev.exact.as_ref().map(|(pn, pd)| {
        let mut num = vec![BigUint::zero(); len];
        for (i, &x) in el.iter().enumerate() {
            let Some((p0, o0, n)) = spans(x) else {
                continue;
            };
            for (dst, s) in num[o0..o0 + n].iter_mut().zip(&pn[p0..p0 + n]) {
                if !s.is_zero() {
                    *dst += s * &int_w[i];
                }
            }
        }
        let den = pd * (&int_w[0] * el[0]);
        (num, den)
    });
    RepLayer {
        j,
        lo,
        len,
        counts,
        weighted: w,
        rel_error: (1.0 + prev.rel_error) * (1.0 + step) - 1.0,
        exact,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;

    fn brute(a: &[u64], k: u32) -> BTreeMap<u64, (u64, BigRational)> {
        let mut out = BTreeMap::new();
        let mut idx = vec![0usize; k as usize];
        loop {
            let s: u64 = idx.iter().map(|&i| a[i]).sum();
            let p: u64 = idx.iter().map(|&i| a[i]).product();
            let e = out.entry(s).or_insert((0u64, BigRational::zero()));
            e.0 += 1;
            e.1 += BigRational::new(BigInt::one(), BigInt::from(p));
            let mut d = 0;
            loop {
                if d == idx.len() {
                    return out;
                }
                idx[d] += 1;
                if idx[d] < a.len() {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    }

    #[test]
    fn two_three_pairs() {
        let t = rep_table(&[2, 3], 2, 100).unwrap();
        assert_eq!(t.count(4), BigUint::from(1u32));
        assert_eq!(t.count(5), BigUint::from(2u32));
        assert_eq!(t.count(6), BigUint::from(1u32));
        assert_eq!(t.count(7), BigUint::zero());
        assert_eq!(
            t.weighted_exact(5),
            Some(BigRational::new(BigInt::one(), BigInt::from(3)))
        );
        assert!((t.weighted(5) - 1.0 / 3.0).abs() <= t.top().weighted_error(5) + 1e-300);
    }

    #[test]
    fn singleton_and_small() {
        let t = rep_table(&[7], 5, 1000).unwrap();
        assert_eq!(t.count(35), BigUint::one());
        assert_eq!(t.top().count_sum(0, 1000), BigUint::one());
        let t = rep_table(&[1, 2], 2, 10).unwrap();
        assert_eq!(t.count(3), BigUint::from(2u32));
    }

    #[test]
    fn matches_enumeration() {
        let mut rng = crate::rng::SplitMix64::new(11);
        for _ in 0..60 {
            let size = 1 + rng.below(6) as usize;
            let mut a: Vec<u64> = (0..size).map(|_| 1 + rng.below(20)).collect();
            a.sort_unstable();
            a.dedup();
            let k = 1 + rng.below(4) as u32;
            let t = rep_table(&a, k, u64::MAX / 4).unwrap();
            for (n, (c, w)) in brute(&a, k) {
                assert_eq!(t.count(n), BigUint::from(c));
                assert_eq!(t.weighted_exact(n), Some(w));
            }
        }
    }

    #[test]
    fn cap_truncates_and_totals() {
        let a = [3u64, 4, 5];
        let t = rep_table(&a, 3, 12).unwrap();
        // Tuples with sum <= 12 among the 27.
        let all = brute(&a, 3);
        let want: u64 = all.range(..=12).map(|(_, v)| v.0).sum();
        assert_eq!(t.top().count_sum(0, 12), BigUint::from(want));
        assert_eq!(t.count(13), BigUint::zero());
    }

    #[test]
    fn big_counts_escalate() {
        let a: Vec<u64> = (1..=300).collect();
        let t = rep_table_with(&a, 17, 5100, 0).unwrap();
        assert!(t.top().count_u128(2558).is_none());
        // Central count exceeds 2^128 yet the total is exactly 300^17.
        let total = t.top().count_sum(0, 5100);
        assert_eq!(total, num_traits::pow(BigUint::from(300u32), 17));
    }
}
