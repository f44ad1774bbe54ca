//! Committed reports for runs whose values have no closed form. Each one is
//! regenerated from its own echoed config and compared: integers exactly,
//! floats within a relative band. Counts are also recomputed by the
//! depth-first enumerator, independently of the sieve the experiments use.

use serde_json::Value;
use unsieved::sets::prime_set;
use unsieved::{run, ExperimentConfig, Report};
use unsieved_core::count::psi_dfs;
use unsieved_core::primes::sieve_primes;
use unsieved_core::Budget;

const FLOAT_BAND: f64 = 1e-9;

fn golden(text: &str) -> Report {
    Report::from_json(text).unwrap()
}

fn same_value(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) if x.is_f64() || y.is_f64() => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            (x - y).abs() <= FLOAT_BAND * x.abs().max(y.abs())
        }
        _ => a == b,
    }
}

/// Re-runs the report's config and checks it against the committed values.
fn rerun_matches(g: &Report) {
    let cfg = ExperimentConfig::from_echo(&g.config).unwrap();
    let r = run(&cfg).unwrap();
    assert_eq!(r.columns, g.columns);
    assert_eq!(r.status, g.status);
    assert_eq!(r.checksums, g.checksums);
    assert_eq!(r.rows.len(), g.rows.len());
    for (ra, ga) in r.rows.iter().zip(&g.rows) {
        for ((a, b), col) in ra.iter().zip(ga).zip(&g.columns) {
            assert!(
                same_value(a, b),
                "{}: column {col}: {a} vs {b}",
                g.experiment
            );
        }
    }
    for (k, v) in &g.derived {
        assert!(same_value(&r.derived[k], v), "derived {k}");
    }
}

fn u64_col(r: &Report, name: &str) -> Vec<u64> {
    r.column(name)
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect()
}

fn congruence_case(text: &str) {
    let g = golden(text);
    rerun_matches(&g);
    let q: u64 = g.config["q"].parse().unwrap();
    let b = Budget::default();
    for (t, psi) in u64_col(&g, "t").into_iter().zip(u64_col(&g, "psi")) {
        let p = prime_set(&format!("congruence:{q},1"), t, &b).unwrap();
        assert_eq!(psi_dfs(t, &p, &b).unwrap().value, psi, "q={q} t={t}");
    }
}

#[test]
fn congruence_q5() {
    congruence_case(include_str!("golden/congruence-q5.json"));
}

#[test]
fn congruence_q11() {
    congruence_case(include_str!("golden/congruence-q11.json"));
}

#[test]
fn congruence_q23() {
    congruence_case(include_str!("golden/congruence-q23.json"));
}

/// `π(hi) − π(lo)` from a plain sieve of Eratosthenes.
fn prime_count(lo: u64, hi: u64) -> u64 {
    let mut composite = vec![false; hi as usize + 1];
    let mut count = 0;
    for n in 2..=hi as usize {
        if composite[n] {
            continue;
        }
        if n as u64 > lo {
            count += 1;
        }
        let mut m = n * n;
        while m <= hi as usize {
            composite[m] = true;
            m += n;
        }
    }
    count
}

fn friedlander_split(text: &str, small: (u64, u64), large_from: u64) {
    let g = golden(text);
    rerun_matches(&g);
    let x: u64 = u64_col(&g, "x")[0];
    let b = Budget::default();
    let q = prime_set(&format!("range:{},{}", small.0, small.1), x, &b).unwrap();
    assert_eq!(
        psi_dfs(x, &q, &b).unwrap().value,
        u64_col(&g, "psi_medium")[0]
    );
    assert_eq!(prime_count(large_from, x), u64_col(&g, "large_primes")[0]);
    assert_eq!(
        u64_col(&g, "psi")[0],
        u64_col(&g, "psi_medium")[0] + u64_col(&g, "large_primes")[0]
    );
}

#[test]
fn friedlander_2_8() {
    // x = 10^8: x^(1/8) = 10, x^(1/2) = 10^4, x^(7/8) = 10^7.
    friedlander_split(
        include_str!("golden/friedlander-2-8.json"),
        (10, 10_000),
        10_000_000,
    );
}

#[test]
fn friedlander_3_30() {
    // x^(1/30) = 10^(4/15) = 1.847.., x^(1/3) = 464.15.., x^(29/30) = 10^(116/15) = 5.41e7.
    let root = 1e8f64.powf(29.0 / 30.0).floor() as u64;
    friedlander_split(include_str!("golden/friedlander-3-30.json"), (1, 464), root);
}

#[test]
fn friedlander_u1_counts_primes_plus_one() {
    let g = golden(include_str!("golden/friedlander-1-2.json"));
    rerun_matches(&g);
    // Every prime above 10^3 is in P and no product of two fits below 10^6.
    assert_eq!(u64_col(&g, "psi")[0], prime_count(1000, 1_000_000) + 1);
    assert_eq!(u64_col(&g, "psi")[0], 78_498 - 168 + 1);
}

#[test]
fn counterexample_n3() {
    let g = golden(include_str!("golden/counterexample-n3.json"));
    rerun_matches(&g);
    let b = Budget::default();
    let rows = u64_col(&g, "x")
        .into_iter()
        .zip(u64_col(&g, "psi"))
        .zip(u64_col(&g, "members"));
    for ((x, psi), members) in rows {
        let p = prime_set("power:3", x, &b).unwrap();
        assert_eq!(psi_dfs(x, &p, &b).unwrap().value, psi, "x={x}");
        // Primes in x^{m/4} < p < x^{m/3}, m = 1, 2, by exact integer powers.
        let want = sieve_primes(x, 1 << 16)
            .into_iter()
            .map(u128::from)
            .filter(|&q| {
                (1..=2u32).any(|m| q.pow(4) > (x as u128).pow(m) && q.pow(3) < (x as u128).pow(m))
            })
            .count() as u64;
        assert_eq!(members, want, "x={x}");
    }
}
