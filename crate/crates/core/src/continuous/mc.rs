use alloc::vec::Vec;

use super::intervals::OpenIntervalSet;
use crate::float::{ln, sqrt, NeumaierSum};
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Samples per substream. Substream `i` is seeded from `(seed, i)`, so the
/// estimate does not depend on how chunks are scheduled.
pub const CHUNK: u64 = 1 << 16;

/// A Monte Carlo mean with its standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// `|value - x| <= sigmas · std_err`.
    pub fn agrees_with(&self, x: f64, sigmas: f64) -> bool {
        (self.value - x).abs() <= sigmas * self.std_err
    }
}

/// Draws from the probability measure `dt/(t·mass(T))` on `T`.
struct Sampler {
    lo: Vec<f64>,
    log_ratio: Vec<f64>,
    cumulative: Vec<f64>,
    mass: f64,
}

impl Sampler {
    fn new(t: &OpenIntervalSet) -> Self {
        let pairs = t.to_f64_pairs();
        let lo: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let log_ratio: Vec<f64> = pairs.iter().map(|p| ln(p.1 / p.0)).collect();
        let mut cumulative = Vec::with_capacity(pairs.len());
        let mut acc = 0.0;
        for w in &log_ratio {
            acc += w;
            cumulative.push(acc);
        }
        Sampler {
            lo,
            log_ratio,
            cumulative,
            mass: t.mass(),
        }
    }

    fn draw(&self, rng: &mut SplitMix64) -> f64 {
        let total = *self.cumulative.last().expect("nonempty");
        let r = rng.next_f64() * total;
        let i = self
            .cumulative
            .partition_point(|&c| c <= r)
            .min(self.lo.len() - 1);
        self.lo[i] * crate::float::exp(rng.next_f64() * self.log_ratio[i])
    }
}

fn run(samples: u64, seed: u64, mut one: impl FnMut(&mut SplitMix64) -> f64) -> McEstimate {
    let mut sum = NeumaierSum::new();
    let mut sq = NeumaierSum::new();
    let mut done = 0u64;
    let mut chunk = 0u64;
    while done < samples {
        let n = CHUNK.min(samples - done);
        let mut rng = SplitMix64::substream(seed, chunk);
        for _ in 0..n {
            let x = one(&mut rng);
            sum.add(x);
            sq.add(x * x);
        }
        done += n;
        chunk += 1;
    }
    let n = samples as f64;
    let mean = sum.value() / n;
    let var = if samples > 1 {
        ((sq.value() - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    McEstimate {
        value: mean,
        std_err: sqrt(var / n),
        samples,
        seed,
    }
}

/// Importance-sampled `f_k(1)`: draw `t_1..t_{k-1}` from normalized `dt/t`
/// on `T` and average `mass(T)^{k-1} · 1_T(t_k) / t_k` at `t_k = 1 - Σ t_i`.
pub fn simplex_integral_mc(
    t: &OpenIntervalSet,
    k: u32,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if k < 2 {
        return Err(Error::invalid("k must be at least 2"));
    }
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    if t.is_empty() {
        return Ok(run(samples, seed, |_| 0.0));
    }
    let s = Sampler::new(t);
    let scale = libm::pow(s.mass, (k - 1) as f64);
    Ok(run(samples, seed, |rng| {
        let mut rest = 1.0;
        for _ in 1..k {
            rest -= s.draw(rng);
        }
        if rest > 0.0 && t.contains_f64(rest) {
            scale / rest
        } else {
            0.0
        }
    }))
}

/// Sampled `ell`-fold mass of tuples from `T` whose sum lies in `(lo, hi]`.
pub fn window_mass_mc(
    t: &OpenIntervalSet,
    ell: u32,
    lo: f64,
    hi: f64,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if ell == 0 || samples == 0 || t.is_empty() {
        return Err(Error::invalid("need ell >= 1, samples >= 1 and nonempty T"));
    }
    let s = Sampler::new(t);
    let scale = libm::pow(s.mass, ell as f64);
    Ok(run(samples, seed, |rng| {
        let sum: f64 = (0..ell).map(|_| s.draw(rng)).sum();
        if sum > lo && sum <= hi {
            scale
        } else {
            0.0
        }
    }))
}
