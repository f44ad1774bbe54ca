//! The twelve acceptance criteria. Each prints one PASS or FAIL line with its
//! measured values; the process fails if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use unsieved::report::Report;
use unsieved::{run, ExperimentConfig, Format, Status, EXPERIMENTS};
use unsieved_core::comb::{
    gap_rep_check, prime_product_window, thm71_count, window_best_k, Gap, WeightedIntegerSet,
};
use unsieved_core::continuous::{
    reachable_one, simplex_integral_conv, simplex_integral_mc, window_search, OpenIntervalSet,
};
use unsieved_core::count::{
    log_weight_sandwich, psi_dfs, psi_k, psi_sieve, survivors_dfs, survivors_sieve, SandwichSlack,
};
use unsieved_core::dickman::{dickman_rho, DickmanTable};
use unsieved_core::predictions::smooth_family;
use unsieved_core::primes::{primes_up_to, sieve_primes};
use unsieved_core::rng::SplitMix64;
use unsieved_core::{Budget, Error, PrimeSet};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Smallest prime factor of every `n <= x`, by trial division over primes.
fn smallest_factors(x: usize) -> Vec<u32> {
    let mut spf = vec![0u32; x + 1];
    for n in 2..=x {
        if spf[n] == 0 {
            let mut m = n;
            while m <= x {
                if spf[m] == 0 {
                    spf[m] = n as u32;
                }
                m += n;
            }
        }
    }
    spf
}

/// Survivors `n <= x` by factoring each `n` completely.
fn survivors_brute(x: usize, spf: &[u32], allowed: &[bool]) -> Vec<u64> {
    (1..=x)
        .filter(|&n| {
            let mut m = n;
            while m > 1 {
                let p = spf[m] as usize;
                if !allowed[p] {
                    return false;
                }
                m /= p;
            }
            true
        })
        .map(|n| n as u64)
        .collect()
}

fn random_prime_set(rng: &mut SplitMix64, x: u64, primes: &[u32]) -> PrimeSet {
    let cut = 2 + rng.below(x - 1);
    let density = rng.next_f64();
    let members: Vec<u64> = primes
        .iter()
        .map(|&p| p as u64)
        .filter(|&p| p <= cut && rng.chance(density))
        .collect();
    PrimeSet::from_list(x, &members).unwrap()
}

fn c01_oracle_suite() -> Outcome {
    let start = Instant::now();
    let x = 100_000u64;
    let b = Budget::default();
    let spf = smallest_factors(x as usize);
    let primes = sieve_primes(x, 1 << 16);
    let mut rng = SplitMix64::new(1);
    let mut bad = 0;
    for _ in 0..200 {
        let p = random_prime_set(&mut rng, x, &primes);
        let mut allowed = vec![false; x as usize + 1];
        for &q in p.members() {
            allowed[q as usize] = true;
        }
        // The sorted survivor list fixes Ψ(t) for every t <= x.
        let brute = survivors_brute(x as usize, &spf, &allowed);
        if survivors_sieve(x, &p, &b).unwrap() != brute
            || survivors_dfs(x, &p, &b).unwrap() != brute
        {
            bad += 1;
            continue;
        }
        for _ in 0..5 {
            let t = 1 + rng.below(x);
            let want = brute.partition_point(|&n| n <= t) as u64;
            if psi_sieve(t, &p, &b).unwrap().value != want
                || psi_dfs(t, &p, &b).unwrap().value != want
            {
                bad += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        bad == 0 && start.elapsed() < Duration::from_secs(120),
        format!("200 sets, {bad} discrepancies, {secs:.1} s"),
    )
}

fn c02_small_counts() -> Outcome {
    let b = Budget::default();
    let p = PrimeSet::from_list(30, &[2, 3, 5]).unwrap();
    let spf = smallest_factors(30);
    let mut allowed = vec![false; 31];
    for q in [2, 3, 5] {
        allowed[q] = true;
    }
    let brute = survivors_brute(30, &spf, &allowed).len() as u64;
    let psi = psi_sieve(30, &p, &b).unwrap().value;
    // Squarefree with two prime factors from {2,3,5}: 6, 10, 15.
    let brute_k2 = (1..=30u32)
        .filter(|&n| [(2, 3), (2, 5), (3, 5)].iter().any(|&(a, c)| a * c == n))
        .count() as u64;
    let psi2 = psi_k(30, &p, 2, &b).unwrap().value;
    let mut all_ok = true;
    for x in [1u64, 2, 10, 97, 1000, 65_536] {
        let all = primes_up_to(x, &b).unwrap();
        all_ok &= psi_sieve(x, &all, &b).unwrap().value == x;
        all_ok &= psi_sieve(x, &PrimeSet::empty(x), &b).unwrap().value == 1;
        all_ok &= psi_dfs(x, &PrimeSet::empty(x), &b).unwrap().value == 1;
    }
    check(
        psi == 18 && brute == 18 && psi2 == 3 && brute_k2 == 3 && all_ok,
        format!("psi(30)={psi} (brute {brute}), psi_2(30)={psi2}, all/none identities {all_ok}"),
    )
}

fn c03_dickman() -> Outcome {
    let rho2 = dickman_rho(2.0, 1e-12).unwrap();
    let err2 = (rho2 - (1.0 - std::f64::consts::LN_2)).abs();
    let coarse = DickmanTable::new(4.0, 1000).unwrap();
    let fine = DickmanTable::new(4.0, 10_000).unwrap();
    let err3 = (coarse.eval(3.0) - fine.eval(3.0)).abs();
    let r = run(&ExperimentConfig::new("dickman")).unwrap();
    let resid = r.derived["max_ode_residual"].as_f64().unwrap();
    check(
        err2 <= 1e-9 && err3 <= 1e-6 && resid <= 1e-6 && r.rows.len() == 100,
        format!("|rho(2)-(1-log 2)|={err2:.2e}, rho(3) vs 10x grid {err3:.2e}, ODE residual {resid:.2e} over {} points", r.rows.len()),
    )
}

fn c04_hildebrand() -> Outcome {
    let start = Instant::now();
    let b = Budget::default();
    let x = 100_000_000u64;
    let mut parts = Vec::new();
    let mut ok = true;
    for u in [2.0, 2.5, 3.0] {
        let p = smooth_family(x, u, &b).unwrap();
        let psi = psi_sieve(x, &p, &b).unwrap().value as f64;
        let rho = dickman_rho(u, 1e-10).unwrap();
        let rel = (psi / x as f64 - rho).abs() / rho;
        ok &= rel <= 0.15;
        parts.push(format!("u={u}: {rel:.3}"));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 300.0;
    check(
        ok,
        format!(
            "|psi/x-rho|/rho at 1e8 ({}) vs 0.15, {secs:.1} s",
            parts.join(", ")
        ),
    )
}

fn c05_sandwich() -> Outcome {
    let b = Budget::default();
    let x = 1_000_000u64;
    let primes = sieve_primes(x, 1 << 16);
    let mut rng = SplitMix64::new(5);
    let mut violations = 0;
    let mut worst = (f64::INFINITY, 0.0f64);
    for _ in 0..50 {
        let p = random_prime_set(&mut rng, x, &primes);
        let r = log_weight_sandwich(x, &p, SandwichSlack::default(), &b).unwrap();
        if !r.holds {
            violations += 1;
        }
        worst.0 = worst.0.min(r.middle / r.lower_bound);
        worst.1 = worst.1.max(r.middle / r.upper_bound);
    }
    check(
        violations == 0,
        format!(
            "50 sets, {violations} violations; min middle/lower {:.3}, max middle/upper {:.3}",
            worst.0, worst.1
        ),
    )
}

fn c06_counterexample() -> Outcome {
    let cfg = ExperimentConfig::new("counterexample")
        .with("xs", "1e5,1e6,1e7,1e8")
        .with("n", 3);
    let r = run(&cfg).unwrap();
    let col = r.column_f64("normalized").unwrap();
    let decreasing = col.windows(2).all(|w| w[1] < w[0]);
    let shown: Vec<String> = col.iter().map(|v| format!("{v:.3}")).collect();
    check(
        decreasing,
        format!(
            "psi*log x*u_P/x = [{}], strictly decreasing: {decreasing}",
            shown.join(", ")
        ),
    )
}

/// Ordered `k`-tuples from `b` with sum in `[n-k, n]`.
fn tuples_brute(b: &[u64], k: u32, n: u64) -> u64 {
    let mut count = 0;
    let mut idx = vec![0usize; k as usize];
    loop {
        let s: u64 = idx.iter().map(|&i| b[i]).sum();
        if s + k as u64 >= n && s <= n {
            count += 1;
        }
        let mut d = 0;
        loop {
            if d == idx.len() {
                return count;
            }
            idx[d] += 1;
            if idx[d] < b.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

fn c07_tuple_count() -> Outcome {
    let b = WeightedIntegerSet::new(12, 2.0, 2.0, &[3, 4, 5]).unwrap();
    let pinned = thm71_count(&b, 3).unwrap();
    let mut rng = SplitMix64::new(7);
    let (mut cases, mut bad) = (0, 0);
    while cases < 500 {
        let n = 10 + rng.below(90);
        let (u, v) = (1.0, 2.0);
        let Some((lo, hi)) = WeightedIntegerSet::admissible_range(n, u, v).unwrap() else {
            continue;
        };
        let size = 1 + rng.below(8) as usize;
        let mut el: Vec<u64> = (0..size).map(|_| rng.range_inclusive(lo, hi)).collect();
        el.sort_unstable();
        el.dedup();
        let k = 1 + rng.below(4) as u32;
        let set = WeightedIntegerSet::new(n, u, v, &el).unwrap();
        let dp = thm71_count(&set, k as u64).unwrap();
        cases += 1;
        if dp != BigUint::from(tuples_brute(&el, k, n)) {
            bad += 1;
        }
    }
    check(
        pinned == BigUint::from(17u32) && bad == 0,
        format!("count(B={{3,4,5}}, N=12, k=3)={pinned}; DP vs enumeration: {bad} mismatches in {cases}"),
    )
}

fn c08_guarantees() -> Outcome {
    let b = Budget::default();
    let mut rng = SplitMix64::new(8);
    let mut fails = [0usize; 3];

    for _ in 0..100 {
        let y = 0.5 + rng.next_f64();
        let z = y * (1.2 + rng.next_f64());
        let x = z * (1.0 + 8.0 * rng.next_f64());
        let n = 1 + rng.below(30) as usize;
        let el: Vec<f64> = (0..n)
            .map(|_| y + (z - y) * (0.01 + 0.99 * rng.next_f64()))
            .collect();
        let w: Vec<f64> = (0..n).map(|_| 0.1 + rng.next_f64()).collect();
        let r = window_best_k(&el, &w, x, y, z).unwrap();
        if !r.guarantee_holds(x, y) {
            fails[0] += 1;
        }
    }

    let x: u64 = 1_000_000;
    let primes = sieve_primes(x, 1 << 16);
    let mut done = 0;
    while done < 100 {
        let u = [1.0, 1.5, 2.0][rng.below(3) as usize];
        let v = u + 1.5 * rng.next_f64();
        let lo = (x as f64).powf(1.0 / (std::f64::consts::E * v)) as u64 + 1;
        let hi = (x as f64).powf(1.0 / u) as u64;
        let mut pick: Vec<u64> = primes
            .iter()
            .map(|&q| q as u64)
            .filter(|&q| q > lo && q < hi && q <= 5000 && rng.chance(0.3))
            .take(10)
            .collect();
        if pick.is_empty() {
            continue;
        }
        pick.sort_unstable();
        let p = PrimeSet::from_list(hi, &pick).unwrap();
        let big_x = (hi + 1) * (1 + rng.below(50));
        match prime_product_window(&p, x, u, v, big_x, &b) {
            Ok(r) => {
                done += 1;
                if !r.guarantee_holds() {
                    fails[1] += 1;
                }
            }
            Err(Error::BoundaryTie(_)) => continue,
            Err(e) => return Err(format!("prime product window: {e}")),
        }
    }

    for case in 0..100u64 {
        let v = [1.0, 1.5, 2.0, 3.0][(case % 4) as usize];
        let lo = (1000.0 / (std::f64::consts::E * v)).ceil() as u64 + 1;
        let hi = (1000.0 / v).floor() as u64;
        let parts = rng.range_inclusive(1, 3);
        let mut iv = Vec::new();
        for _ in 0..parts {
            let a = rng.range_inclusive(lo, hi - 1);
            let c = rng.range_inclusive(a + 1, hi);
            iv.push((
                num_rational::BigRational::new(a.into(), 1000.into()),
                num_rational::BigRational::new(c.into(), 1000.into()),
            ));
        }
        let t = OpenIntervalSet::new(iv).unwrap();
        let w = (1.0 + 2.0 * rng.next_f64()) / v;
        match window_search(&t, v, w) {
            Ok(r) if r.guarantee_holds() => {}
            _ => fails[2] += 1,
        }
    }
    check(
        fails == [0, 0, 0],
        format!(
            "violations over 100 cases each: weighted window {}, prime products {}, continuous window {}",
            fails[0], fails[1], fails[2]
        ),
    )
}

fn c09_gap() -> Outcome {
    let mut rng = SplitMix64::new(9);
    let (mut cases, mut bad) = (0, 0);
    let mut min_ratio = f64::INFINITY;
    while cases < 50 {
        let d = 1 + rng.below(2) as usize;
        let steps: Vec<i64> = (0..d).map(|_| 1 + rng.below(40) as i64).collect();
        let bounds: Vec<u64> = (0..d).map(|_| 1 + rng.below(6)).collect();
        let g = Gap::new(rng.below(20) as i64 - 10, steps, bounds).unwrap();
        if !g.is_proper().unwrap() {
            continue;
        }
        let delta = 6f64.powi(-(d as i32)) * (0.05 + 0.9 * rng.next_f64());
        let k = 1 + rng.below(4) as u32;
        let r = gap_rep_check(&g, k, delta).unwrap();
        cases += 1;
        min_ratio = min_ratio.min(r.min_ratio);
        if !r.holds() {
            bad += 1;
        }
    }
    check(
        bad == 0,
        format!("{cases} proper GAPs of rank <= 2, {bad} below bound, min ratio {min_ratio:.3}"),
    )
}

fn c10_continuous() -> Outcome {
    let t = OpenIntervalSet::parse("0.3,0.6").unwrap();
    let want = 2.0 * 1.5f64.ln();
    let conv = simplex_integral_conv(&t, 2, 100_000, None).unwrap();
    let err = (conv.value - want).abs();
    let mc = simplex_integral_mc(&t, 2, 1_000_000, 10).unwrap();
    let mc_ok = mc.agrees_with(conv.value, 3.0);
    let t2 = OpenIntervalSet::t_family(2).unwrap();
    let unreachable = !reachable_one(&t2, 32).unwrap().is_reachable();
    let zeros = (2..=32).all(|k| {
        let e = simplex_integral_conv(&t2, k, 4096, None).unwrap();
        e.exact_zero && e.value == 0.0
    });
    check(
        err <= 1e-3 && mc_ok && unreachable && zeros,
        format!(
            "conv {:.6} vs 2 log 1.5 (err {err:.1e}), MC {:.5} +- {:.5}, T_2 unreachable to 32: {unreachable}, exact zeros: {zeros}",
            conv.value, mc.value, mc.std_err
        ),
    )
}

fn c11_pipeline() -> Outcome {
    let big = run(&ExperimentConfig::new("pipeline").with("n", 10_000)).unwrap();
    let gap = big.derived["a_t_relative_gap"].as_f64().unwrap();
    let small = run(&ExperimentConfig::new("pipeline").with("n", 20)).unwrap();
    let pg = small.derived["p_realization_gap"].as_f64().unwrap();
    let bound = small.derived["p_gap_bound"].as_f64().unwrap();
    check(
        gap <= 0.10 && pg <= bound,
        format!(
            "A/T gap at N=1e4 {gap:.2e} (<= 0.10); realization gap at N=20 {pg:.3} (<= {bound})"
        ),
    )
}

/// Runs `cfg`, then re-runs it from the config echoed in each rendering.
fn reruns_identical(cfg: &ExperimentConfig) -> bool {
    let r = run(cfg).unwrap();
    let json = r.render(Format::Json).unwrap();
    let csv = r.render(Format::Csv).unwrap();
    let from_json = ExperimentConfig::from_echo(&Report::from_json(&json).unwrap().config).unwrap();
    let from_csv = ExperimentConfig::from_echo(&Report::config_from_csv(&csv).unwrap()).unwrap();
    let again_json = run(&from_json).unwrap().render(Format::Json).unwrap();
    let again_csv = run(&from_csv).unwrap().render(Format::Csv).unwrap();
    again_json == json && again_csv == csv
}

fn c12_reproducibility() -> Outcome {
    let mut bad = Vec::new();
    for e in EXPERIMENTS {
        let mut cfg = ExperimentConfig::new(e.name);
        cfg.seed = 12;
        if e.name == "hyp-t" {
            cfg = cfg
                .with("t", "0.3,0.6")
                .with("v", 2)
                .with("mc_samples", 50_000);
        }
        if !reruns_identical(&cfg) {
            bad.push(e.name);
        }
    }
    let status_ok = run(&ExperimentConfig::new("psi")).unwrap().status == Status::Ok;
    check(
        bad.is_empty() && status_ok,
        format!(
            "{} experiments re-run from echoed JSON and CSV configs; differing: {bad:?}",
            EXPERIMENTS.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("exact-count oracle suite", c01_oracle_suite),
        ("small exact counts", c02_small_counts),
        ("Dickman rho", c03_dickman),
        ("Hildebrand extremal family", c04_hildebrand),
        ("logarithmic-weight sandwich", c05_sandwich),
        ("counterexample decay", c06_counterexample),
        ("tuple counter", c07_tuple_count),
        ("window guarantees", c08_guarantees),
        ("GAP representation bound", c09_gap),
        ("continuous engine", c10_continuous),
        ("equivalence pipeline", c11_pipeline),
        ("reproducibility", c12_reproducibility),
    ];
    // Panic messages are reported on the criterion's own line.
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {:2} PASS {name} [{secs:.1} s]: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:2} FAIL {name} [{secs:.1} s]: {d}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
