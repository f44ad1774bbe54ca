use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigUint;

use crate::exact::{ReciprocalAccumulator, SumValue};
use crate::float::{gamma, ln, NeumaierSum, UNIT_ROUNDOFF};
use crate::{Budget, Error, PrimeSet, Result};

/// Tuple count up to which window masses are enumerated exactly.
pub const EXACT_TUPLES: u64 = 1_000_000;

/// Largest `floor(x/y)` accepted by [`window_best_k`].
pub const MAX_WINDOW_K: u64 = 4096;

const MIN_BINS_LOG2: u32 = 12;
const MAX_BINS_LOG2: u32 = 20;
const PASS_WORK: u64 = 200_000_000;

/// `v = m * 2^e` with `m` odd, for finite positive `v`.
fn dyadic(v: f64) -> (u64, i32) {
    let bits = v.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    let tz = m.trailing_zeros();
    (m >> tz, e + tz as i32)
}

/// Outcome of the weighted window pigeonhole.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowBest {
    pub k: u64,
    /// Largest `k` with a possible hit, at most `floor(x/y)`.
    pub k_max: u64,
    /// Weight of `k`-tuples with sum in `(x - z, x]`.
    pub mass: f64,
    /// `mass / (Σw)^k`, with certified bounds.
    pub beta: f64,
    pub beta_lo: f64,
    pub beta_hi: f64,
    pub total_weight: f64,
    /// The returned `k` provably maximizes `β_k`.
    pub certified_argmax: bool,
    /// Window membership was decided tuple by tuple in exact arithmetic.
    pub exact: bool,
    /// Bin width of the final discretized pass (0 when exact).
    pub bin_width: f64,
}

impl WindowBest {
    /// Certified check of `β_k >= y/x`.
    pub fn guarantee_holds(&self, x: f64, y: f64) -> bool {
        self.beta_lo >= (y / x) * (1.0 + 2.0 * UNIT_ROUNDOFF)
    }
}

struct Scaled {
    b: Vec<u128>,
    x: u128,
    lower: u128,
}

fn scale(b: &[f64], x: f64, z: f64, k_max: u64) -> Result<Scaled> {
    let mut parts: Vec<(u64, i32)> = b.iter().map(|&v| dyadic(v)).collect();
    parts.push(dyadic(x));
    parts.push(dyadic(z));
    let e_min = parts.iter().map(|p| p.1).min().expect("nonempty");
    let k_bits = 64 - k_max.leading_zeros();
    let mut ints = Vec::with_capacity(parts.len());
    for (m, e) in parts {
        let sh = (e - e_min) as u32;
        if sh + 64 - m.leading_zeros() + k_bits > 126 {
            return Err(Error::invalid(
                "dynamic range of B, x and z too wide for exact window arithmetic",
            ));
        }
        ints.push((m as u128) << sh);
    }
    let zi = ints.pop().expect("z");
    let xi = ints.pop().expect("x");
    Ok(Scaled {
        b: ints,
        x: xi,
        lower: xi - zi,
    })
}

/// Per-`k` certified bounds on `β_k`.
struct Pass {
    lo: Vec<f64>,
    hi: Vec<f64>,
    mid: Vec<f64>,
}

fn exact_pass(sc: &Scaled, w: &[f64], k_max: usize, only: Option<usize>) -> Pass {
    let n = w.len();
    let mut sums: Vec<NeumaierSum> = vec![NeumaierSum::new(); k_max + 1];
    let depth_max = only.unwrap_or(k_max);
    // Iterative DFS over prefixes, pruning once the partial sum exceeds x.
    let mut idx: Vec<usize> = Vec::with_capacity(depth_max);
    let mut psum: Vec<u128> = vec![0];
    let mut pw: Vec<f64> = vec![1.0];
    let mut next = 0usize;
    loop {
        if next < n && idx.len() < depth_max {
            let s = psum[psum.len() - 1] + sc.b[next];
            if s <= sc.x {
                let wt = pw[pw.len() - 1] * w[next];
                idx.push(next);
                psum.push(s);
                pw.push(wt);
                let d = idx.len();
                if s > sc.lower && only.is_none_or(|o| o == d) {
                    sums[d].add(wt);
                }
                next = 0;
                continue;
            }
            next += 1;
            continue;
        }
        match idx.pop() {
            Some(i) => {
                psum.pop();
                pw.pop();
                next = i + 1;
            }
            None => break,
        }
    }
    let mut out = Pass {
        lo: vec![0.0; k_max + 1],
        hi: vec![0.0; k_max + 1],
        mid: vec![0.0; k_max + 1],
    };
    for k in 1..=k_max {
        let s = sums[k].value();
        let rel = gamma(k * (n + 2));
        let eb = sums[k].error_bound();
        out.mid[k] = s;
        out.lo[k] = (s * (1.0 - rel) - eb).max(0.0);
        out.hi[k] = s * (1.0 + rel) + eb;
    }
    out
}

fn binned_pass(sc: &Scaled, w: &[f64], k_max: usize, shift: u32) -> Pass {
    let n = w.len();
    let jmax = (sc.x >> shift) as usize;
    let delta: u128 = 1u128 << shift;
    let mut g = vec![0.0f64; jmax + 1];
    let mut used: Vec<usize> = Vec::new();
    for (i, &b) in sc.b.iter().enumerate() {
        let bin = (b >> shift) as usize;
        if g[bin] == 0.0 {
            used.push(bin);
        }
        g[bin] += w[i];
    }
    used.sort_unstable();
    let nb = used.len();
    let rel_step = (1.0 + gamma(2 * n + 1)) * (1.0 + gamma(nb + 1)) - 1.0;
    let mut out = Pass {
        lo: vec![0.0; k_max + 1],
        hi: vec![0.0; k_max + 1],
        mid: vec![0.0; k_max + 1],
    };
    let mut cur = vec![0.0f64; jmax + 1];
    cur[0] = 1.0;
    let mut rel = 0.0f64;
    for k in 1..=k_max {
        let mut nxt = vec![0.0f64; jmax + 1];
        let first = cur.iter().position(|&v| v != 0.0);
        if let Some(first) = first {
            for &bin in &used {
                let gb = g[bin];
                if first + bin > jmax {
                    break;
                }
                for j in first..=jmax - bin {
                    let c = cur[j];
                    if c != 0.0 {
                        nxt[j + bin] += c * gb;
                    }
                }
            }
        }
        cur = nxt;
        rel = (1.0 + rel) * (1.0 + rel_step) - 1.0;
        let spread = (k as u128) * (delta - 1);
        let mut certain = NeumaierSum::new();
        let mut possible = NeumaierSum::new();
        for (j, &m) in cur.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let base = (j as u128) << shift;
            let top = base + spread;
            if top > sc.lower && base <= sc.x {
                possible.add(m);
                if base > sc.lower && top <= sc.x {
                    certain.add(m);
                }
            }
        }
        let total_rel = (1.0 + rel) * (1.0 + gamma(jmax + 1)) - 1.0;
        out.lo[k] = (certain.value() * (1.0 - total_rel) - certain.error_bound()).max(0.0);
        out.hi[k] = possible.value() * (1.0 + total_rel) + possible.error_bound();
        out.mid[k] = 0.5 * (certain.value() + possible.value());
    }
    out
}

fn argmax_lo(p: &Pass, k_max: usize) -> (usize, bool) {
    let mut best = 1;
    for k in 2..=k_max {
        if p.lo[k] > p.lo[best] {
            best = k;
        }
    }
    let certified = (1..=k_max).all(|k| k == best || p.hi[k] <= p.lo[best]);
    (best, certified)
}

fn tuple_total(n: u64, k_max: u64) -> u64 {
    let mut total: u64 = 0;
    let mut t: u64 = 1;
    for _ in 0..k_max {
        t = t.saturating_mul(n);
        total = total.saturating_add(t);
    }
    total
}

/// Finds `k <= x/y` maximizing the normalized weight `β_k` of `k`-tuples of
/// `B ⊂ (y, z]` whose sum lies in `(x - z, x]`.
///
/// Window membership is exact (all inputs are dyadic rationals). Masses are
/// floating point with certified bounds; small instances are enumerated
/// tuple by tuple, larger ones run a binned dynamic program whose bins are
/// refined until the maximizing `k` is certified or the work budget is spent.
pub fn window_best_k(b: &[f64], w: &[f64], x: f64, y: f64, z: f64) -> Result<WindowBest> {
    if b.is_empty() || b.len() != w.len() {
        return Err(Error::invalid(
            "B must be nonempty with one weight per element",
        ));
    }
    if !(y > 0.0 && y < z && z <= x && x.is_finite()) {
        return Err(Error::invalid("need 0 < y < z <= x"));
    }
    if b.iter().any(|&v| !(v > y && v <= z)) {
        return Err(Error::invalid("every element of B must lie in (y, z]"));
    }
    if w.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::invalid("weights must be positive and finite"));
    }
    let k_bound = crate::float::floor(x / y) as u64;
    if k_bound > MAX_WINDOW_K {
        return Err(Error::BudgetExceeded {
            what: "window tuple length x/y",
            requested: k_bound,
            ceiling: MAX_WINDOW_K,
        });
    }
    let sc = scale(b, x, z, k_bound.max(1))?;
    // Sums of k elements exceed k*min(B); nothing beyond that can land.
    let b_min = *sc.b.iter().min().expect("nonempty");
    let mut k_max = 0usize;
    while (k_max as u128 + 1) * b_min <= sc.x && (k_max as u64) < k_bound.max(1) {
        k_max += 1;
    }
    let k_max = k_max.max(1);
    let total = w.iter().copied().collect::<NeumaierSum>().value();
    let wn: Vec<f64> = w.iter().map(|&v| v / total).collect();

    let n = b.len() as u64;
    let (pass, exact, bin_width) = if tuple_total(n, k_max as u64) <= EXACT_TUPLES {
        (exact_pass(&sc, &wn, k_max, None), true, 0.0)
    } else {
        let bits = 128 - sc.x.leading_zeros();
        let mut shift = bits.saturating_sub(MIN_BINS_LOG2);
        let mut pass = binned_pass(&sc, &wn, k_max, shift);
        loop {
            let (_, certified) = argmax_lo(&pass, k_max);
            if certified || shift == 0 || bits - shift >= MAX_BINS_LOG2 {
                break;
            }
            let next = shift.saturating_sub(2);
            let bins = ((sc.x >> next) + 1) as u64;
            if bins
                .saturating_mul(k_max as u64)
                .saturating_mul(n.min(bins))
                > PASS_WORK
            {
                break;
            }
            shift = next;
            pass = binned_pass(&sc, &wn, k_max, shift);
        }
        let width = libm::ldexp(1.0, shift as i32) * lsb_unit(b, x, z);
        (pass, false, width)
    };
    let (mut k, mut certified) = argmax_lo(&pass, k_max);
    let mut lo = pass.lo[k];
    let mut hi = pass.hi[k];
    let mut mid = pass.mid[k];
    let mut exact_here = exact;
    if !exact && n.checked_pow(k as u32).is_some_and(|t| t <= EXACT_TUPLES) {
        let v = exact_pass(&sc, &wn, k_max, Some(k));
        debug_assert!(v.hi[k] >= pass.lo[k] && v.lo[k] <= pass.hi[k]);
        lo = v.lo[k];
        hi = v.hi[k];
        mid = v.mid[k];
        exact_here = true;
        certified = (1..=k_max).all(|j| j == k || pass.hi[j] <= lo);
    }
    if exact {
        k = argmax_lo(&pass, k_max).0;
    }
    let res = WindowBest {
        k: k as u64,
        k_max: k_max as u64,
        mass: mid * libm::pow(total, k as f64),
        beta: mid,
        beta_lo: lo,
        beta_hi: hi,
        total_weight: total,
        certified_argmax: certified,
        exact: exact_here,
        bin_width,
    };
    if !res.guarantee_holds(x, y) {
        return Err(Error::DiscretizationInconclusive(alloc::format!(
            "best certified lower bound {lo:e} at k={k} is below y/x={:e}",
            y / x
        )));
    }
    Ok(res)
}

fn lsb_unit(b: &[f64], x: f64, z: f64) -> f64 {
    let e = b
        .iter()
        .chain([x, z].iter())
        .map(|&v| dyadic(v).1)
        .min()
        .expect("nonempty");
    libm::ldexp(1.0, e)
}

/// Sign of `q - x^{1/u}` for `q, x >= 1`: exact for integer `u`, through
/// logarithms otherwise with ties reported.
pub(crate) fn cmp_root(q: u64, x: u64, u: f64) -> Result<Ordering> {
    if u == crate::float::floor(u) && u <= 64.0 {
        let qu = num_traits::pow(BigUint::from(q), u as usize);
        return Ok(qu.cmp(&BigUint::from(x)));
    }
    let d = u * ln(q as f64) - ln(x as f64);
    if d.abs() <= 1e-11 * (1.0 + ln(x as f64)) {
        return Err(Error::BoundaryTie(alloc::format!(
            "{q} against {x}^(1/{u})"
        )));
    }
    Ok(if d > 0.0 {
        Ordering::Greater
    } else {
        Ordering::Less
    })
}

/// Sign of `q - x^{1/(ev)}`, through logarithms with ties reported.
pub(crate) fn cmp_root_ev(q: u64, x: u64, v: f64) -> Result<Ordering> {
    let d = core::f64::consts::E * v * ln(q as f64) - ln(x as f64);
    if d.abs() <= 1e-11 * (1.0 + ln(x as f64)) {
        return Err(Error::BoundaryTie(alloc::format!(
            "{q} against {x}^(1/(e*{v}))"
        )));
    }
    Ok(if d > 0.0 {
        Ordering::Greater
    } else {
        Ordering::Less
    })
}

/// `floor(X * x^{-1/u})`; the window is `prod > this`.
fn window_floor(big_x: u64, x: u64, u: f64) -> Result<u64> {
    if u == crate::float::floor(u) && u <= 64.0 {
        // Largest t with t^u * x <= X^u.
        let xu = num_traits::pow(BigUint::from(big_x), u as usize);
        let (mut lo, mut hi) = (0u64, big_x);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if num_traits::pow(BigUint::from(mid), u as usize) * x <= xu {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        return Ok(lo);
    }
    let t = big_x as f64 * crate::float::exp(-ln(x as f64) / u);
    let f = crate::float::floor(t);
    if (t - f).min(f + 1.0 - t) <= 1e-12 * t.max(1.0) {
        return Err(Error::BoundaryTie(alloc::format!(
            "{big_x}*{x}^(-1/{u}) is too close to an integer"
        )));
    }
    Ok(f as u64)
}

/// Weights `Σ 1/(q_1...q_l)` and counts of ordered `l`-tuples from sorted
/// `primes` with `lower < q_1...q_l <= upper`, for every `l <= max_depth`
/// (index 0 unused). Enumerates multisets and weights them by their number
/// of orderings.
pub(crate) fn product_masses(
    primes: &[u64],
    max_depth: usize,
    lower: u64,
    upper: u64,
    budget: &Budget,
) -> Result<Vec<(SumValue, u128)>> {
    let mut accs: Vec<ReciprocalAccumulator> = (0..=max_depth)
        .map(|_| {
            ReciprocalAccumulator::new(crate::count::EXACT_TERMS, crate::count::EXACT_DEN_BITS)
        })
        .collect();
    let mut tuples = vec![0u128; max_depth + 1];
    let mut nodes: u64 = 0;
    // Multisets as nondecreasing index sequences; `coef` counts orderings.
    struct Frame {
        idx: usize,
        prod: u64,
        coef: u128,
        run: u32,
    }
    let mut stack: Vec<Frame> = Vec::new();
    let mut next = 0usize;
    loop {
        let depth = stack.len();
        let (prod, coef, last, run) = match stack.last() {
            Some(f) => (f.prod, f.coef, Some(f.idx), f.run),
            None => (1, 1, None, 0),
        };
        if depth < max_depth && next < primes.len() {
            let q = primes[next];
            if let Some(np) = prod.checked_mul(q).filter(|&np| np <= upper) {
                nodes += 1;
                if nodes > budget.dfs_nodes {
                    return Err(Error::ExplosionGuard {
                        budget: budget.dfs_nodes,
                    });
                }
                let new_run = if last == Some(next) { run + 1 } else { 1 };
                let new_coef = coef
                    .checked_mul(depth as u128 + 1)
                    .ok_or(Error::Overflow("ordering count"))?
                    / new_run as u128;
                let ell = depth + 1;
                if np > lower {
                    let mut c = new_coef;
                    while c > 0 {
                        let part = c.min(u64::MAX as u128);
                        accs[ell].add(part as u64, np);
                        c -= part;
                    }
                    tuples[ell] += new_coef;
                }
                stack.push(Frame {
                    idx: next,
                    prod: np,
                    coef: new_coef,
                    run: new_run,
                });
                continue;
            }
            // Larger primes only make the product bigger.
            next = primes.len();
            continue;
        }
        match stack.pop() {
            Some(f) => next = f.idx + 1,
            None => break,
        }
    }
    Ok(accs.into_iter().map(|a| a.finish()).zip(tuples).collect())
}

/// One row of [`ProductWindow`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProductRow {
    pub ell: u64,
    /// `Σ 1/(q_1...q_ell)` over ordered tuples in the window.
    pub mass: SumValue,
    /// `mass / S^ell`.
    pub ratio: f64,
    pub tuples: u128,
}

/// Outcome of the prime-product window search.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductWindow {
    pub ell: u64,
    /// `K = ev log X / log x`.
    pub k_bound: f64,
    /// `S = Σ 1/q`.
    pub reciprocal_sum: f64,
    /// Products `q_1...q_ell` count when `window_floor < prod <= X`.
    pub window_floor: u64,
    pub rows: Vec<ProductRow>,
    /// `1 <= u <= v <= log x / e`.
    pub parameters_in_range: bool,
}

impl ProductWindow {
    pub fn best(&self) -> &ProductRow {
        &self.rows[self.ell as usize - 1]
    }

    /// Certified check of `mass >= S^ell / K` at the returned `ell`.
    pub fn guarantee_holds(&self) -> bool {
        let r = self.best();
        let s_pow = libm::pow(self.reciprocal_sum, r.ell as f64);
        let need = s_pow / self.k_bound * (1.0 + 1e-12);
        r.mass.approx - r.mass.error_bound >= need
    }
}

/// For primes `P ⊂ (x^{1/ev}, x^{1/u}]` and `X >= x^{1/u}`, finds
/// `ell <= K` maximizing the weight `Σ 1/(q_1...q_ell)` of ordered tuples
/// with `X x^{-1/u} < q_1...q_ell <= X`, relative to `S^ell`.
pub fn prime_product_window(
    p: &PrimeSet,
    x: u64,
    u: f64,
    v: f64,
    big_x: u64,
    budget: &Budget,
) -> Result<ProductWindow> {
    if !(u >= 1.0 && v >= u && v.is_finite()) {
        return Err(Error::invalid("need 1 <= u <= v"));
    }
    if p.is_empty() {
        return Err(Error::invalid("P must be nonempty"));
    }
    if x < 2 {
        return Err(Error::invalid("x must be at least 2"));
    }
    for &q in p.members() {
        let q = q as u64;
        if cmp_root_ev(q, x, v)? != Ordering::Greater || cmp_root(q, x, u)? == Ordering::Greater {
            return Err(Error::invalid(alloc::format!(
                "prime {q} is outside (x^(1/ev), x^(1/u)]"
            )));
        }
    }
    if cmp_root(big_x, x, u)? == Ordering::Less {
        return Err(Error::invalid("X must be at least x^(1/u)"));
    }
    let parameters_in_range = v <= ln(x as f64) / core::f64::consts::E;
    let k_bound = core::f64::consts::E * v * ln(big_x as f64) / ln(x as f64);
    let ell_max = crate::float::floor(k_bound).max(1.0) as usize;
    let floor_t = window_floor(big_x, x, u)?;
    let primes: Vec<u64> = p.members().iter().map(|&q| q as u64).collect();
    let s = p.reciprocal_sum_all().approx;

    let masses = product_masses(&primes, ell_max, floor_t, big_x, budget)?;
    let mut rows = Vec::with_capacity(ell_max);
    for (ell, (mass, tuples)) in masses.into_iter().enumerate().skip(1) {
        let ratio = mass.approx / libm::pow(s, ell as f64);
        rows.push(ProductRow {
            ell: ell as u64,
            mass,
            ratio,
            tuples,
        });
    }
    let mut best = 0;
    for (i, r) in rows.iter().enumerate() {
        if r.ratio > rows[best].ratio {
            best = i;
        }
    }
    Ok(ProductWindow {
        ell: best as u64 + 1,
        k_bound,
        reciprocal_sum: s,
        window_floor: floor_t,
        rows,
        parameters_in_range,
    })
}
