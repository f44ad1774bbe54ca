use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::rep::rep_table;
use crate::exact::rational_from_f64;
use crate::{Error, Result};

/// Largest set a generalized progression may enumerate.
pub const GAP_ELEMENTS: u64 = 1_000_000;

fn sorted_unique(mut v: Vec<i64>) -> Vec<i64> {
    v.sort_unstable();
    v.dedup();
    v
}

/// `A + B`.
pub fn sumset(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x + y);
        }
    }
    sorted_unique(out)
}

/// `{a + b : (a, b) ∈ E}`, with `E ⊆ A × B` checked.
pub fn restricted_sumset(a: &[i64], b: &[i64], e: &[(i64, i64)]) -> Result<Vec<i64>> {
    let sa = sorted_unique(a.to_vec());
    let sb = sorted_unique(b.to_vec());
    let mut out = Vec::with_capacity(e.len());
    for &(x, y) in e {
        if sa.binary_search(&x).is_err() || sb.binary_search(&y).is_err() {
            return Err(Error::invalid(format!("pair ({x}, {y}) is not in A × B")));
        }
        out.push(x + y);
    }
    Ok(sorted_unique(out))
}

/// `r_{2B}(s)` for every `s ∈ 2B`.
pub fn pair_counts(b: &[i64]) -> BTreeMap<i64, u64> {
    let mut r = BTreeMap::new();
    for &x in b {
        for &y in b {
            *r.entry(x + y).or_insert(0) += 1;
        }
    }
    r
}

/// Pairs whose sum is popular: `r_{2B}(b1 + b2) >= δ²|B|²/|2B|`.
#[derive(Clone, Debug, PartialEq)]
pub struct PopularPairSet {
    pub base: Vec<i64>,
    pub delta: f64,
    pub pairs: Vec<(i64, i64)>,
    /// `|2B|`.
    pub sumset_size: usize,
    /// `|B +_E B|`.
    pub restricted_size: usize,
}

impl PopularPairSet {
    /// `|E| >= (1 - δ²)|B|²`, decided exactly.
    pub fn bound_holds(&self) -> bool {
        let d = rational_from_f64(self.delta).expect("finite δ");
        let b2 = BigRational::from_integer(BigInt::from(self.base.len() as u64).pow(2));
        let one = BigRational::from_integer(BigInt::from(1));
        BigRational::from_integer(BigInt::from(self.pairs.len() as u64)) >= (one - &d * &d) * b2
    }
}

pub fn popular_pairs(b: &[i64], delta: f64) -> Result<PopularPairSet> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("need 0 < δ < 1"));
    }
    let base = sorted_unique(b.to_vec());
    let r = pair_counts(&base);
    let two_b = r.len() as u64;
    let d = rational_from_f64(delta)?;
    let need = &d * &d * BigRational::from_integer(BigInt::from(base.len() as u64).pow(2));
    // r >= δ²|B|²/|2B|  <=>  r·|2B| >= δ²|B|².
    let popular: BTreeMap<i64, bool> = r
        .iter()
        .map(|(&s, &c)| {
            (
                s,
                BigRational::from_integer(BigInt::from(c * two_b)) >= need,
            )
        })
        .collect();
    let mut pairs = Vec::new();
    let mut sums = Vec::new();
    for &x in &base {
        for &y in &base {
            if popular[&(x + y)] {
                pairs.push((x, y));
                sums.push(x + y);
            }
        }
    }
    Ok(PopularPairSet {
        restricted_size: sorted_unique(sums).len(),
        sumset_size: r.len(),
        base,
        delta,
        pairs,
    })
}

/// `{x0 + Σ l_j x_j : |l_j| <= L_j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gap {
    pub x0: i64,
    pub steps: Vec<i64>,
    pub bounds: Vec<u64>,
}

/// Values `base + Σ l_j steps_j` over `|l_j| <= lims_j`, sorted and distinct.
fn box_values(base: i64, steps: &[i64], lims: &[u64]) -> Result<Vec<i64>> {
    let size = lims
        .iter()
        .try_fold(1u64, |acc, &l| acc.checked_mul(2 * l + 1))
        .unwrap_or(u64::MAX);
    if size > GAP_ELEMENTS {
        return Err(Error::BudgetExceeded {
            what: "progression elements",
            requested: size,
            ceiling: GAP_ELEMENTS,
        });
    }
    let mut vals = alloc::vec![base];
    for (&x, &l) in steps.iter().zip(lims) {
        let l = l as i64;
        let mut next = Vec::with_capacity(vals.len() * (2 * l as usize + 1));
        for &v in &vals {
            for i in -l..=l {
                next.push(v + i * x);
            }
        }
        vals = next;
    }
    Ok(sorted_unique(vals))
}

impl Gap {
    pub fn new(x0: i64, steps: Vec<i64>, bounds: Vec<u64>) -> Result<Self> {
        if steps.len() != bounds.len() {
            return Err(Error::invalid("one bound per step"));
        }
        Ok(Gap { x0, steps, bounds })
    }

    pub fn rank(&self) -> usize {
        self.steps.len()
    }

    /// `∏ (2L_j + 1)`, the number of coefficient vectors.
    pub fn volume(&self) -> u64 {
        self.bounds
            .iter()
            .try_fold(1u64, |acc, &l| acc.checked_mul(2 * l + 1))
            .unwrap_or(u64::MAX)
    }

    /// Distinct elements, sorted.
    pub fn elements(&self) -> Result<Vec<i64>> {
        box_values(self.x0, &self.steps, &self.bounds)
    }

    /// Every coefficient vector gives a different element.
    pub fn is_proper(&self) -> Result<bool> {
        Ok(self.elements()?.len() as u64 == self.volume())
    }

    pub fn contains(&self, n: i64) -> Result<bool> {
        Ok(self.elements()?.binary_search(&n).is_ok())
    }
}

/// Outcome of checking `r_{kP}(n) >= (δ|P|)^{k-1}` on `Q_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct GapRepReport {
    pub k: u32,
    pub delta: f64,
    /// `1 - 3 δ^{1/d}`.
    pub rho: f64,
    /// `|P|`, distinct elements.
    pub size: usize,
    /// `(δ|P|)^{k-1}`.
    pub bound: f64,
    /// `|Q_k|`, distinct elements.
    pub q_size: usize,
    /// `min_{n ∈ Q_k} r_{kP}(n) / bound`.
    pub min_ratio: f64,
    pub argmin: i64,
}

impl GapRepReport {
    pub fn holds(&self) -> bool {
        self.min_ratio >= 1.0
    }
}

/// Exact representation counts of `kP` on `Q_k = {k x0 + Σ l_j x_j :
/// |l_j| <= ρ k L_j}` against `(δ|P|)^{k-1}`.
pub fn gap_rep_check(p: &Gap, k: u32, delta: f64) -> Result<GapRepReport> {
    let d = p.rank();
    if d == 0 || d > 3 {
        return Err(Error::PreconditionFail(format!(
            "rank {d} is outside 1..=3"
        )));
    }
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let six_d = libm::pow(6.0, d as f64);
    if !(delta > 0.0 && delta * six_d < 1.0) {
        return Err(Error::PreconditionFail(format!(
            "δ={delta} is outside (0, 1/6^{d})"
        )));
    }
    let rho = 1.0 - 3.0 * libm::pow(delta, 1.0 / d as f64);
    if rho < 0.5 {
        return Err(Error::PreconditionFail(format!("ρ = {rho} < 1/2")));
    }
    let el = p.elements()?;
    let min = el[0];
    let shift = 1 - min;
    let shifted: Vec<u64> = el.iter().map(|&e| (e + shift) as u64).collect();
    let max = *shifted.last().expect("nonempty");
    let table = rep_table(&shifted, k, max * k as u64)?;
    let lims: Vec<u64> = p
        .bounds
        .iter()
        .map(|&l| crate::float::floor(rho * k as f64 * l as f64) as u64)
        .collect();
    let q = box_values(k as i64 * p.x0, &p.steps, &lims)?;
    let bound = libm::pow(delta * el.len() as f64, (k - 1) as f64);
    let mut min_ratio = f64::INFINITY;
    let mut argmin = q[0];
    for &n in &q {
        let idx = n + k as i64 * shift;
        let r = if idx < 0 {
            0.0
        } else {
            table.count(idx as u64).to_f64().unwrap_or(f64::INFINITY)
        };
        let ratio = r / bound;
        if ratio < min_ratio {
            min_ratio = ratio;
            argmin = n;
        }
    }
    Ok(GapRepReport {
        k,
        delta,
        rho,
        size: el.len(),
        bound,
        q_size: q.len(),
        min_ratio,
        argmin,
    })
}
