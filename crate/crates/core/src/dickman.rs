//! The Dickman–de Bruijn function `ρ`: `ρ = 1` on `[0, 1]` and
//! `uρ'(u) = −ρ(u−1)` for `u ≥ 1`.
//!
//! Values are tabulated one unit interval at a time from
//! `ρ(u) = ρ(n) − ∫_n^u ρ(t−1)/t dt`, with the integrand read from the
//! previous unit interval by cubic interpolation that never crosses an
//! integer (where `ρ` loses smoothness). Stepping forward from `ρ(n)`
//! subtracts nearly equal numbers once `ρ` decays, so each interval is
//! instead anchored at its right end and filled leftwards.

use alloc::vec::Vec;

use crate::float::NeumaierSum;
use crate::{Error, Result};

/// Largest argument supported.
pub const U_MAX: f64 = 50.0;

#[derive(Clone, Debug, PartialEq)]
pub struct DickmanTable {
    /// Nodes per unit interval; the grid step is `1/per_unit`.
    per_unit: usize,
    values: Vec<f64>,
    u_max: f64,
    /// Largest relative disagreement at an integer between the value reached
    /// by filling a cell leftwards and the anchor of the previous cell.
    joint_mismatch: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson quadrature on `[a, b]` to absolute accuracy `eps`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn go(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            return left + right + delta / 15.0;
        }
        go(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
            + go(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    go(f, a, b, fa, fm, fb, whole, eps, 12)
}

impl DickmanTable {
    /// Table on `[0, u_max]` with grid step `1/per_unit`.
    pub fn new(u_max: f64, per_unit: usize) -> Result<Self> {
        if !(0.0..=U_MAX).contains(&u_max) {
            return Err(Error::invalid("u_max must lie in [0, 50]"));
        }
        if per_unit < 4 {
            return Err(Error::invalid("need at least 4 nodes per unit interval"));
        }
        let cells = crate::float::ceil(u_max).max(1.0) as usize;
        let h = 1.0 / per_unit as f64;
        let mut values = Vec::with_capacity(cells * per_unit + 1);
        values.resize(per_unit + 1, 1.0);
        let mut table = DickmanTable {
            per_unit,
            values,
            u_max,
            joint_mismatch: 0.0,
        };
        // Cell [n, n+1] is anchored at its right end by
        //   n·ρ(n+1) = ∫_n^{n+1} (s−n) ρ(s−1)/s ds
        // and filled leftwards by ρ(u) = ρ(n+1) + ∫_u^{n+1} ρ(s−1)/s ds, so
        // that only positive quantities are ever added.
        let mut mismatch = 0.0f64;
        for n in 1..cells {
            let nodes: Vec<(f64, f64)> = (0..per_unit)
                .map(|j| {
                    let i = n * per_unit + j;
                    ((i as f64) * h, ((i + 1) as f64) * h)
                })
                .collect();
            let scale = table.values[n * per_unit] * h / (n + 1) as f64;
            let eps = scale * 1e-14;
            let anchor_sum: NeumaierSum = nodes
                .iter()
                .map(|&(a, b)| {
                    let f = |s: f64| (s - n as f64) * table.interp(s - 1.0, n - 1) / s;
                    adaptive_simpson(&f, a, b, eps)
                })
                .collect();
            let right = anchor_sum.value() / n as f64;
            let mut cell = Vec::with_capacity(per_unit + 1);
            cell.push(right);
            let mut acc = NeumaierSum::new();
            acc.add(right);
            for &(a, b) in nodes.iter().rev() {
                let f = |s: f64| table.interp(s - 1.0, n - 1) / s;
                acc.add(adaptive_simpson(&f, a, b, eps));
                cell.push(acc.value());
            }
            let left = cell.pop().expect("cell has nodes");
            let joint = table.values[n * per_unit];
            mismatch = mismatch.max(((left - joint) / joint).abs());
            cell.reverse();
            table.values.extend_from_slice(&cell);
        }
        table.joint_mismatch = mismatch;
        Ok(table)
    }

    /// Table with the default step `10^{-4}`.
    pub fn with_default_step(u_max: f64) -> Result<Self> {
        Self::new(u_max, 10_000)
    }

    pub fn step(&self) -> f64 {
        1.0 / self.per_unit as f64
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn joint_mismatch(&self) -> f64 {
        self.joint_mismatch
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Cubic interpolation at `t`, using only nodes of the unit cell
    /// `[cell, cell+1]`.
    fn interp(&self, t: f64, cell: usize) -> f64 {
        if t <= 1.0 {
            return 1.0;
        }
        let k = self.per_unit;
        let base = cell * k;
        let pos = t * k as f64 - base as f64; // in [0, k]
        let j = (crate::float::floor(pos) as isize - 1).clamp(0, k as isize - 3) as usize;
        let x = pos - j as f64;
        let y = &self.values[base + j..base + j + 4];
        // Lagrange weights at nodes 0, 1, 2, 3.
        let w0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
        let w1 = x * (x - 2.0) * (x - 3.0) / 2.0;
        let w2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
        let w3 = x * (x - 1.0) * (x - 2.0) / 6.0;
        w0 * y[0] + w1 * y[1] + w2 * y[2] + w3 * y[3]
    }

    /// `ρ(u)` for `0 ≤ u ≤ u_max`; negative arguments give 0.
    pub fn eval(&self, u: f64) -> f64 {
        if u < 0.0 {
            return 0.0;
        }
        if u <= 1.0 {
            return 1.0;
        }
        assert!(u <= self.u_max + 1e-12, "u beyond table range");
        let cell = (crate::float::floor(u) as usize).min(self.values.len() / self.per_unit - 1);
        let cell = if u == cell as f64 && cell > 0 {
            cell - 1
        } else {
            cell
        };
        self.interp(u, cell)
    }
}

/// `ρ(u)` to relative accuracy `tol`, by halving the grid step until two
/// successive tables agree.
pub fn dickman_rho(u: f64, tol: f64) -> Result<f64> {
    if !(0.0..=U_MAX).contains(&u) {
        return Err(Error::invalid("u must lie in [0, 50]"));
    }
    if !(tol >= 1e-12) {
        return Err(Error::invalid("tolerance must be at least 1e-12"));
    }
    if u <= 1.0 {
        return Ok(1.0);
    }
    let mut per_unit = 64;
    let mut prev = DickmanTable::new(u, per_unit)?.eval(u);
    for _ in 0..10 {
        per_unit *= 2;
        let cur = DickmanTable::new(u, per_unit)?.eval(u);
        if (cur - prev).abs() <= tol * cur.abs() {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::ToleranceUnreachable { tol })
}
