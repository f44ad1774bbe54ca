use alloc::vec::Vec;

use super::conv::{simplex_integrals, IntegralEstimate};
use super::intervals::OpenIntervalSet;
use crate::exact::k_range;
use crate::float::UNIT_ROUNDOFF;
use crate::{Error, Result};

/// One `k` of the continuous hypothesis scan.
#[derive(Clone, Debug, PartialEq)]
pub struct HypTRow {
    pub k: u64,
    pub integral: IntegralEstimate,
    /// `integral / mass(T)^k`.
    pub implied_tau: f64,
    /// The same ratio from the certified lower bound.
    pub implied_tau_lo: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypTReport {
    pub u: f64,
    pub v: f64,
    pub lambda3: f64,
    pub resolution: usize,
    /// `∫_T dt/t`.
    pub mass: f64,
    /// `mass >= (1 + lambda3) / u`.
    pub precondition_holds: bool,
    pub rows: Vec<HypTRow>,
    /// Row with the largest implied `τ`, if any integral is positive.
    pub best: Option<usize>,
}

impl HypTReport {
    pub fn best_row(&self) -> Option<&HypTRow> {
        self.best.map(|i| &self.rows[i])
    }

    pub fn failed(&self) -> bool {
        self.best.is_none()
    }
}

/// Scans integers `k ∈ [u, ev]` with `k >= 2` and reports the simplex
/// integral of `T ⊆ (1/(ev), 1/u)` and the implied `τ` for each.
///
/// `k = 1` is skipped: it would need `1 ∈ T`, impossible for `T ⊆ (0, 1)`.
pub fn hyp_t_check(
    t: &OpenIntervalSet,
    u: f64,
    v: f64,
    lambda3: f64,
    m: usize,
) -> Result<HypTReport> {
    if !(u >= 1.0 && v >= u && v.is_finite()) {
        return Err(Error::invalid("need 1 <= u <= v"));
    }
    if !t.within_ev(u, v)? {
        return Err(Error::PreconditionFail(alloc::format!(
            "T = {} is not inside (1/(ev), 1/u)",
            t.describe()
        )));
    }
    let mass = t.mass();
    let precondition_holds = mass * (1.0 - 8.0 * UNIT_ROUNDOFF) * u >= 1.0 + lambda3;
    let ks = k_range(u, v)?;
    let k_lo = (*ks.start()).max(2);
    let k_hi = *ks.end();
    let mut rows = Vec::new();
    if k_lo <= k_hi && !t.is_empty() {
        for est in simplex_integrals(t, k_hi as u32, m)? {
            let k = est.k as u64;
            if k < k_lo {
                continue;
            }
            let mk = libm::pow(mass, k as f64);
            rows.push(HypTRow {
                k,
                implied_tau: est.value / mk,
                implied_tau_lo: est.lo / mk,
                integral: est,
            });
        }
    }
    let best = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.integral.value > 0.0)
        .max_by(|a, b| a.1.implied_tau.total_cmp(&b.1.implied_tau))
        .map(|(i, _)| i);
    Ok(HypTReport {
        u,
        v,
        lambda3,
        resolution: m,
        mass,
        precondition_holds,
        rows,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_interval_k2() {
        // T = (0.37, 1) at u = v = 1: only k = 2, with f_2(1) = 2 log(0.63/0.37).
        let t = OpenIntervalSet::parse("0.37,1").unwrap();
        let r = hyp_t_check(&t, 1.0, 1.0, 0.0, 100_000).unwrap();
        assert_eq!(r.rows.len(), 1);
        let row = r.best_row().unwrap();
        assert_eq!(row.k, 2);
        let want = 2.0 * libm::log(0.63 / 0.37);
        assert!(row.integral.lo <= want && want <= row.integral.hi);
        // Any T inside (1/e, 1) has mass below 1.
        assert!(!r.precondition_holds);
    }

    #[test]
    fn obstruction_family_gives_zero() {
        let t = OpenIntervalSet::t_family(4).unwrap();
        let t = t.clip(
            &crate::exact::rational_from_f64(0.37).unwrap(),
            &num_rational::BigRational::from_integer(1.into()),
        );
        let r = hyp_t_check(&t, 1.0, 1.0, 0.0, 4096).unwrap();
        assert!(r.failed());
        assert!(r.rows.iter().all(|row| row.integral.exact_zero));
    }

    #[test]
    fn outside_range_is_rejected() {
        let t = OpenIntervalSet::parse("0.1,0.5").unwrap();
        assert!(matches!(
            hyp_t_check(&t, 1.0, 1.0, 0.0, 4096),
            Err(Error::PreconditionFail(_))
        ));
    }
}
