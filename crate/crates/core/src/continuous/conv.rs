use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::fft::convolve;
use super::intervals::OpenIntervalSet;
use super::reach::one_in_k_fold;
use crate::exact::{ratio_to_f64, rational_from_f64};
use crate::float::{gamma, ln_1p, NeumaierSum, UNIT_ROUNDOFF};
use crate::{Error, Result};

/// Smallest grid accepted by the convolution engine.
pub const MIN_RESOLUTION: usize = 1000;

/// Largest grid accepted by the convolution engine.
pub const MAX_RESOLUTION: usize = 1 << 22;

/// Relative error of one bin mass (a log1p of a rounded ratio).
const BIN_REL: f64 = 8.0 * UNIT_ROUNDOFF;

/// The measure `dt/t` restricted to `T`, binned on `[l/M, (l+1)/M)`.
pub(crate) struct Binned {
    pub masses: Vec<f64>,
    /// Lower and upper bounds on the density `1_T(t)/t` over each bin.
    pub dens_lo: Vec<f64>,
    pub dens_hi: Vec<f64>,
}

fn floor_scaled(r: &BigRational, m: usize) -> usize {
    (r * BigRational::from_integer(BigInt::from(m)))
        .floor()
        .to_integer()
        .to_usize()
        .expect("endpoint within (0, 1]")
}

fn bin_edge(l: usize, m: usize) -> BigRational {
    BigRational::new(BigInt::from(l), BigInt::from(m))
}

/// `log(b/a)` for rationals `0 < a < b`.
fn log_ratio(a: &BigRational, b: &BigRational) -> f64 {
    ln_1p(ratio_to_f64(&((b - a) / a)))
}

pub(crate) fn bin(t: &OpenIntervalSet, m: usize, len: usize) -> Binned {
    let mut masses = vec![0.0; len];
    let mut dens_lo = vec![0.0; len];
    let mut dens_hi = vec![0.0; len];
    // Covered length of bins that some interval only partly covers; the
    // intervals are disjoint, so a bin is covered almost everywhere exactly
    // when these lengths add up to 1/M.
    let mut partial: BTreeMap<usize, BigRational> = BTreeMap::new();
    let width = bin_edge(1, m);
    for (a, b) in t.intervals() {
        let ia = floor_scaled(a, m);
        let ib = floor_scaled(b, m);
        for l in ia..=ib.min(len - 1) {
            let inner = l > ia && l < ib;
            if inner {
                masses[l] += ln_1p(1.0 / l as f64);
                dens_lo[l] = m as f64 / (l + 1) as f64;
                dens_hi[l] = m as f64 / l as f64;
                continue;
            }
            let lo_edge = bin_edge(l, m);
            let hi_edge = bin_edge(l + 1, m);
            let lo = if a > &lo_edge { a.clone() } else { lo_edge };
            let hi = if b < &hi_edge { b.clone() } else { hi_edge };
            if lo >= hi {
                continue;
            }
            masses[l] += log_ratio(&lo, &hi);
            *partial
                .entry(l)
                .or_insert_with(|| BigRational::from_integer(BigInt::from(0))) += &hi - &lo;
            dens_hi[l] = if l == 0 {
                f64::INFINITY
            } else {
                m as f64 / l as f64
            };
        }
    }
    for (l, covered) in partial {
        if covered == width {
            dens_lo[l] = m as f64 / (l + 1) as f64;
        }
    }
    Binned {
        masses,
        dens_lo,
        dens_hi,
    }
}

/// `f_k(1)` with certified bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralEstimate {
    pub k: u32,
    pub resolution: usize,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    /// `(hi - lo) / 2`.
    pub error_bar: f64,
    /// `1` is not a `k`-fold sum of `T`, so the integral is exactly zero.
    pub exact_zero: bool,
}

impl IntegralEstimate {
    fn zero(k: u32, m: usize) -> Self {
        IntegralEstimate {
            k,
            resolution: m,
            value: 0.0,
            lo: 0.0,
            hi: 0.0,
            error_bar: 0.0,
            exact_zero: true,
        }
    }

    fn from_bounds(k: u32, m: usize, lo: f64, hi: f64) -> Self {
        IntegralEstimate {
            k,
            resolution: m,
            value: 0.5 * (lo + hi),
            lo,
            hi,
            error_bar: 0.5 * (hi - lo),
            exact_zero: false,
        }
    }
}

fn check_resolution(m: usize) -> Result<()> {
    if !(MIN_RESOLUTION..=MAX_RESOLUTION).contains(&m) {
        return Err(Error::invalid(format!(
            "resolution must lie in {MIN_RESOLUTION}..={MAX_RESOLUTION}"
        )));
    }
    Ok(())
}

/// Bounds on `f_j` over each bin, pushed one convolution further.
fn step(masses: &[f64], lo: &[f64], hi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let len = lo.len();
    // s - t with s in bin i and t in bin l lies in bin i-l-1 or i-l.
    let mut h = vec![0.0; len];
    let mut g = vec![0.0; len];
    for q in 0..len {
        let prev_hi = if q == 0 { 0.0 } else { hi[q - 1] };
        let prev_lo = if q == 0 { 0.0 } else { lo[q - 1] };
        h[q] = prev_hi.max(hi[q]);
        g[q] = prev_lo.min(lo[q]);
    }
    let (ch, eh) = convolve(masses, &h, len);
    let (cl, el) = convolve(masses, &g, len);
    let up = 1.0 + BIN_REL;
    let down = 1.0 - BIN_REL;
    let new_hi = ch.iter().map(|&v| (v + eh) * up).collect();
    let new_lo = cl.iter().map(|&v| ((v - el) * down).max(0.0)).collect();
    (new_hi, new_lo)
}

/// Bounds on `f_k(1) = ∫ f_{k-1}(1 - t) dμ(t)`.
fn value_at_one(masses: &[f64], lo: &[f64], hi: &[f64], m: usize) -> (f64, f64) {
    let mut s_lo = NeumaierSum::new();
    let mut s_hi = NeumaierSum::new();
    for l in 0..=m.min(masses.len() - 1) {
        if masses[l] == 0.0 {
            continue;
        }
        let a = m - l;
        let (h1, l1) = (hi[a], lo[a]);
        let (h0, l0) = if a == 0 {
            (0.0, 0.0)
        } else {
            (hi[a - 1], lo[a - 1])
        };
        s_hi.add(masses[l] * h0.max(h1));
        s_lo.add(masses[l] * l0.min(l1));
    }
    let g = gamma(m + 2) + BIN_REL;
    let hi_v = s_hi.value() * (1.0 + g) + s_hi.error_bound();
    let lo_v = (s_lo.value() * (1.0 - g) - s_lo.error_bound()).max(0.0);
    (lo_v, hi_v)
}

/// `f_k(1)` for every `k` in `2..=k_max`, where `f_1 = 1_T(t)/t` and
/// `f_{j+1} = f_j * f_1`, on a grid of `M` bins per unit.
///
/// Returns an exact zero whenever `1` is certified not to be a `k`-fold sum.
pub fn simplex_integrals(
    t: &OpenIntervalSet,
    k_max: u32,
    m: usize,
) -> Result<Vec<IntegralEstimate>> {
    check_resolution(m)?;
    if k_max < 2 {
        return Err(Error::invalid("k must be at least 2"));
    }
    let len = m + 1;
    let mut out = Vec::with_capacity(k_max as usize - 1);
    if t.is_empty() {
        return Ok((2..=k_max).map(|k| IntegralEstimate::zero(k, m)).collect());
    }
    let binned = bin(t, m, len);
    if binned.dens_hi[0] > 0.0 {
        return Err(Error::ResolutionTooCoarse {
            error_bar: f64::INFINITY,
            tolerance: 0.0,
        });
    }
    let mut lo = binned.dens_lo.clone();
    let mut hi = binned.dens_hi.clone();
    for k in 2..=k_max {
        if k > 2 {
            let (h, l) = step(&binned.masses, &lo, &hi);
            hi = h;
            lo = l;
        }
        let zero = matches!(one_in_k_fold(t, k), Ok(false));
        if zero {
            out.push(IntegralEstimate::zero(k, m));
            continue;
        }
        let (v_lo, v_hi) = value_at_one(&binned.masses, &lo, &hi, m);
        out.push(IntegralEstimate::from_bounds(k, m, v_lo, v_hi));
    }
    Ok(out)
}

/// The simplex integral `∫ dt_1...dt_{k-1}/(t_1...t_k)` over `t_i ∈ T` with
/// `t_1 + ... + t_k = 1`, i.e. `f_k(1)`, with a certified error bar.
pub fn simplex_integral_conv(
    t: &OpenIntervalSet,
    k: u32,
    m: usize,
    tolerance: Option<f64>,
) -> Result<IntegralEstimate> {
    let est = simplex_integrals(t, k, m)?.pop().expect("k >= 2");
    if let Some(tol) = tolerance {
        if est.error_bar > tol {
            return Err(Error::ResolutionTooCoarse {
                error_bar: est.error_bar,
                tolerance: tol,
            });
        }
    }
    Ok(est)
}

/// Masses of the `k`-fold product of `dt/t` on `T`, indexed by the sum `J`
/// of bin indices: a tuple counted at `J` has its sum in `[J/M, (J+k)/M)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MassDensityGrid {
    pub resolution: usize,
    pub k: u32,
    pub values: Vec<f64>,
    /// Uniform bound on the absolute error of each entry.
    pub error: f64,
}

impl MassDensityGrid {
    pub fn support_max(&self) -> f64 {
        (self.values.len() + self.k as usize) as f64 / self.resolution as f64
    }

    pub fn total_mass(&self) -> f64 {
        self.values.iter().copied().collect::<NeumaierSum>().value()
    }

    /// `MDG1`, then `M`, `k` and the entry count as little-endian `u64`,
    /// then `s_max`, the total mass, the error bound and the entries as
    /// little-endian `f64`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER + 8 * self.values.len());
        out.extend_from_slice(b"MDG1");
        out.extend_from_slice(&(self.resolution as u64).to_le_bytes());
        out.extend_from_slice(&(self.k as u64).to_le_bytes());
        out.extend_from_slice(&(self.values.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.support_max().to_le_bytes());
        out.extend_from_slice(&self.total_mass().to_le_bytes());
        out.extend_from_slice(&self.error.to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = || Error::invalid("malformed grid bytes");
        if bytes.len() < HEADER || &bytes[..4] != b"MDG1" {
            return Err(bad());
        }
        let word = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
        let n = word(20) as usize;
        if bytes.len() != HEADER + 8 * n {
            return Err(bad());
        }
        Ok(MassDensityGrid {
            resolution: word(4) as usize,
            k: word(12) as u32,
            error: f64::from_bits(word(44)),
            values: (0..n)
                .map(|i| f64::from_bits(word(HEADER + 8 * i)))
                .collect(),
        })
    }
}

const HEADER: usize = 52;

/// The `k`-fold mass grid, truncated to index sums `J < len` when given.
pub fn mass_grid(
    t: &OpenIntervalSet,
    k: u32,
    m: usize,
    len: Option<usize>,
) -> Result<MassDensityGrid> {
    check_resolution(m)?;
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let full = k as usize * m + 1;
    let len = len.unwrap_or(full).min(full);
    let binned = bin(t, m, m + 1);
    let base: Vec<f64> = binned.masses.iter().take(len).copied().collect();
    let mut cur = base.clone();
    cur.resize(len, 0.0);
    let mut err = cur.iter().fold(0.0f64, |a, &v| a.max(v)) * BIN_REL;
    let base_total: f64 = base.iter().sum::<f64>() * (1.0 + BIN_REL) * (1.0 + gamma(base.len()));
    for _ in 1..k {
        let (next, e) = convolve(&cur, &base, len);
        // Carried error: err·Σbase, base error on the carried masses, FFT error.
        let cur_max = next.iter().fold(0.0f64, |a, &v| a.max(v));
        err = err * base_total + cur_max * BIN_REL + e;
        cur = next;
    }
    Ok(MassDensityGrid {
        resolution: m,
        k,
        values: cur,
        error: err,
    })
}

/// Outcome of the continuous window pigeonhole.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowSearch {
    pub ell: u32,
    /// `floor(evw)`.
    pub ell_max: u32,
    pub resolution: usize,
    /// Bounds on the `ell`-fold mass of tuples with sum in `(w - 1/v, w]`.
    pub mass_lo: f64,
    pub mass_hi: f64,
    /// `∫_T dt/t`.
    pub t_mass: f64,
    /// `mass(T)^ell / (evw)`.
    pub guarantee: f64,
}

impl WindowSearch {
    pub fn mass(&self) -> f64 {
        0.5 * (self.mass_lo + self.mass_hi)
    }

    pub fn guarantee_holds(&self) -> bool {
        self.mass_lo >= self.guarantee
    }
}

/// Finds `ell <= evw` whose `ell`-fold sums of `T ⊆ (1/(ev), 1/v]` fall in
/// `(w - 1/v, w]` with mass at least `mass(T)^ell / (evw)`, refining the grid
/// until that is certified.
pub fn window_search(t: &OpenIntervalSet, v: f64, w: f64) -> Result<WindowSearch> {
    if !(v >= 1.0 && v.is_finite()) {
        return Err(Error::invalid("v must be at least 1"));
    }
    if t.is_empty() {
        return Err(Error::invalid("T must be nonempty"));
    }
    if !t.within_ev(v, v)? {
        return Err(Error::invalid("T must lie in (1/(ev), 1/v]"));
    }
    if w * v < 1.0 {
        return Err(Error::invalid("need w >= 1/v"));
    }
    let ev = core::f64::consts::E * v;
    let evw = ev * w;
    let ell_max = crate::float::floor(evw) as u32;
    let t_mass = t.mass();
    let wq = rational_from_f64(w)?;
    let lq = &wq - BigRational::new(BigInt::from(1), BigInt::from(1)) / rational_from_f64(v)?;
    let mut best: Option<WindowSearch> = None;
    let mut m = 1usize << 12;
    while m <= 1 << 18 {
        let floor_w = floor_scaled_signed(&wq, m);
        let floor_l = floor_scaled_signed(&lq, m);
        let len = (floor_w + 1).max(0) as usize;
        let binned = bin(t, m, m + 1);
        let base: Vec<f64> = binned.masses.iter().take(len.max(1)).copied().collect();
        let base_total: f64 =
            binned.masses.iter().sum::<f64>() * (1.0 + BIN_REL) * (1.0 + gamma(m));
        let mut cur = base.clone();
        cur.resize(len.max(1), 0.0);
        let mut err = cur.iter().fold(0.0f64, |a, &x| a.max(x)) * BIN_REL;
        let mut pick: Option<WindowSearch> = None;
        for ell in 1..=ell_max.max(1) {
            if ell > 1 {
                let (next, e) = convolve(&cur, &base, len.max(1));
                let cmax = next.iter().fold(0.0f64, |a, &x| a.max(x));
                err = err * base_total + cmax * BIN_REL + e;
                cur = next;
            }
            let mut certain = NeumaierSum::new();
            let mut possible = NeumaierSum::new();
            let mut n_possible = 0usize;
            for (j, &val) in cur.iter().enumerate() {
                let j = j as i64;
                let e = ell as i64;
                if j <= floor_w && j + e > floor_l {
                    possible.add(val);
                    n_possible += 1;
                    if j > floor_l && j + e <= floor_w {
                        certain.add(val);
                    }
                }
            }
            let slack = err * n_possible as f64;
            let lo =
                (certain.value() * (1.0 - gamma(n_possible + 1)) - certain.error_bound() - slack)
                    .max(0.0);
            let hi =
                possible.value() * (1.0 + gamma(n_possible + 1)) + possible.error_bound() + slack;
            let guarantee = libm::pow(t_mass * (1.0 + 1e-14), ell as f64) / evw * (1.0 + 1e-14);
            let cand = WindowSearch {
                ell,
                ell_max,
                resolution: m,
                mass_lo: lo,
                mass_hi: hi,
                t_mass,
                guarantee,
            };
            let better = match &pick {
                None => true,
                Some(p) => cand.mass_lo / cand.guarantee > p.mass_lo / p.guarantee,
            };
            if better {
                pick = Some(cand);
            }
        }
        let pick = pick.expect("at least one ell");
        let done = pick.guarantee_holds();
        best = Some(pick);
        if done {
            break;
        }
        m <<= 2;
    }
    let best = best.expect("one pass");
    if !best.guarantee_holds() {
        return Err(Error::DiscretizationInconclusive(format!(
            "window mass lower bound {:e} below {:e} at the finest grid",
            best.mass_lo, best.guarantee
        )));
    }
    Ok(best)
}

fn floor_scaled_signed(r: &BigRational, m: usize) -> i64 {
    (r * BigRational::from_integer(BigInt::from(m)))
        .floor()
        .to_integer()
        .to_i64()
        .expect("small window")
}
