//! Radix-2 FFT convolution of nonnegative real sequences with an a priori
//! bound on the rounding error.

use alloc::vec;
use alloc::vec::Vec;

use crate::float::{gamma, sqrt, UNIT_ROUNDOFF};

/// Below this many products the convolution is done directly.
const DIRECT_WORK: usize = 1 << 16;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct C {
    re: f64,
    im: f64,
}

impl C {
    fn mul(self, o: C) -> C {
        C {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

fn fft_in_place(buf: &mut [C], twiddles: &[C], inverse: bool) {
    let n = buf.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let mut w = twiddles[k * stride];
                if inverse {
                    w.im = -w.im;
                }
                let a = buf[start + k];
                let b = buf[start + k + len / 2].mul(w);
                buf[start + k] = C {
                    re: a.re + b.re,
                    im: a.im + b.im,
                };
                buf[start + k + len / 2] = C {
                    re: a.re - b.re,
                    im: a.im - b.im,
                };
            }
        }
        len <<= 1;
    }
}

fn twiddles(n: usize) -> Vec<C> {
    (0..n / 2)
        .map(|j| {
            let ang = -2.0 * core::f64::consts::PI * j as f64 / n as f64;
            C {
                re: libm::cos(ang),
                im: libm::sin(ang),
            }
        })
        .collect()
}

/// `c = a * b` truncated to `out_len` entries, with a bound on
/// `max_i |c_i - exact_i|`. Inputs must be nonnegative.
pub fn convolve(a: &[f64], b: &[f64], out_len: usize) -> (Vec<f64>, f64) {
    if a.is_empty() || b.is_empty() || out_len == 0 {
        return (vec![0.0; out_len], 0.0);
    }
    let full = a.len() + b.len() - 1;
    let out_len_eff = out_len.min(full);
    if a.len().min(b.len()).saturating_mul(out_len_eff) <= DIRECT_WORK * 4
        || a.len().saturating_mul(b.len()) <= DIRECT_WORK
    {
        return direct(a, b, out_len);
    }
    let need = a.len().min(out_len) + b.len().min(out_len) - 1;
    let n = need.next_power_of_two();
    let tw = twiddles(n);
    let mut fa = vec![C::default(); n];
    let mut fb = vec![C::default(); n];
    for (d, &s) in fa.iter_mut().zip(a.iter().take(out_len)) {
        d.re = s;
    }
    for (d, &s) in fb.iter_mut().zip(b.iter().take(out_len)) {
        d.re = s;
    }
    fft_in_place(&mut fa, &tw, false);
    fft_in_place(&mut fb, &tw, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = x.mul(*y);
    }
    fft_in_place(&mut fa, &tw, true);
    let scale = 1.0 / n as f64;
    let mut out: Vec<f64> = fa
        .iter()
        .take(out_len)
        .map(|c| (c.re * scale).max(0.0))
        .collect();
    out.resize(out_len, 0.0);

    let norms = |v: &[f64]| {
        let v = &v[..v.len().min(out_len)];
        let l1: f64 = v.iter().sum();
        let l2 = sqrt(v.iter().map(|x| x * x).sum::<f64>());
        (l1 * (1.0 + gamma(v.len())), l2 * (1.0 + gamma(v.len() + 1)))
    };
    let (a1, a2) = norms(a);
    let (b1, b2) = norms(b);
    let u = UNIT_ROUNDOFF;
    let mu = 10.0 * u;
    let eta = mu + gamma(4) * (core::f64::consts::SQRT_2 + mu);
    let levels = n.trailing_zeros() as f64;
    let eps_f = levels * eta / (1.0 - levels * eta);
    let bound = 1.01 * (3.0 * eps_f + 4.0 * u) * (a2 * b1 + a1 * b2);
    (out, bound)
}

fn direct(a: &[f64], b: &[f64], out_len: usize) -> (Vec<f64>, f64) {
    let mut out = vec![0.0; out_len];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 || i >= out_len {
            continue;
        }
        let n = b.len().min(out_len - i);
        for (d, &y) in out[i..i + n].iter_mut().zip(&b[..n]) {
            *d += x * y;
        }
    }
    let terms = a.len().min(b.len()) + 1;
    let g = gamma(terms);
    let max = out.iter().copied().fold(0.0, f64::max);
    (out, max * g / (1.0 - g))
}
