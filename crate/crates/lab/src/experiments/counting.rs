//! Counting experiments: Ψ, the benchmarks, the counterexample families and
//! the Dickman table.

use rayon::prelude::*;
use serde_json::{json, Value};
use unsieved_core::count::{
    log_weight_sum, mean_identity_residual, psi_dfs, psi_k, psi_sieve, survivors_dfs,
};
use unsieved_core::dickman::{dickman_rho, DickmanTable, U_MAX};
use unsieved_core::exact::SumValue;
use unsieved_core::float::{ln, ln_1p, NeumaierSum};
use unsieved_core::predictions::{benchmark, large_medium_ratio, u_of};
use unsieved_core::primes::primes_up_to;
use unsieved_core::{PrimeSet, EXP_GAMMA};

use crate::config::ExperimentConfig;
use crate::error::{config_err, LabResult};
use crate::report::{num, Report, Status};
use crate::sets::{prime_set, prime_set_json};

fn exact_cols(s: &SumValue) -> (Value, Value) {
    match s.exact_parts() {
        Some((n, d)) => (json!(n), json!(d)),
        None => (Value::Null, Value::Null),
    }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Runs `f` over `items` on `jobs` threads, keeping input order.
fn map_jobs<T: Sync, R: Send>(
    jobs: usize,
    items: &[T],
    f: impl Fn(&T) -> R + Sync + Send,
) -> LabResult<Vec<R>> {
    if jobs <= 1 {
        return Ok(items.iter().map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| config_err(e.to_string()))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

pub const PSI_KEYS: &[(&str, &str)] = &[
    ("x", "10000"),
    ("set", "all"),
    ("k", "none"),
    ("check", "false"),
    ("log_weight", "false"),
];

pub fn psi(cfg: &ExperimentConfig) -> LabResult<Report> {
    let b = cfg.budget;
    let x = cfg.u64("x")?;
    let p = prime_set(cfg.str("set")?, x, &b)?;
    let mut r = Report::new(
        cfg,
        &[
            "x",
            "set_checksum",
            "method",
            "value",
            "exact_num",
            "exact_den",
        ],
    );
    r.checksum("P", p.checksum());
    r.derive("set", prime_set_json(&p));
    let sum = format!("{:#018x}", p.checksum());
    match cfg.str("k")? {
        "none" => {
            let s = psi_sieve(x, &p, &b)?.value;
            r.push_row(vec![
                json!(x),
                json!(sum),
                json!("interval-sieve"),
                json!(s),
                Value::Null,
                Value::Null,
            ]);
            if cfg.bool("check")? {
                let d = psi_dfs(x, &p, &b)?.value;
                r.push_row(vec![
                    json!(x),
                    json!(sum),
                    json!("smooth-dfs"),
                    json!(d),
                    Value::Null,
                    Value::Null,
                ]);
                if d != s {
                    r.flag(Status::InvariantViolation);
                    r.note(format!("sieve count {s} differs from enumeration {d}"));
                }
            }
        }
        k => {
            let k = crate::config::parse_u64("k", k)?;
            let k = u32::try_from(k).map_err(|_| config_err("k too large"))?;
            let v = psi_k(x, &p, k, &b)?.value;
            r.push_row(vec![
                json!(x),
                json!(sum),
                json!(format!("omega-at-most-{k}")),
                json!(v),
                Value::Null,
                Value::Null,
            ]);
        }
    }
    if cfg.bool("log_weight")? {
        let w = log_weight_sum(x, &p, &b)?;
        let (n, d) = exact_cols(&w);
        r.push_row(vec![
            json!(x),
            json!(sum),
            json!("log-weight"),
            num(w.approx),
            n,
            d,
        ]);
        r.derive("log_weight_error_bound", num(w.error_bound));
        let residual = mean_identity_residual(x, &p, 64, &b)?;
        r.derive("identity_residual", num(residual));
        if !(residual <= 1e-9) {
            r.flag(Status::InvariantViolation);
            r.note(format!(
                "summation identity residual {residual:e} above 1e-9"
            ));
        }
    }
    Ok(r)
}

pub const BENCHMARK_KEYS: &[(&str, &str)] = &[
    ("xs", "1000000"),
    ("set", "smooth:3"),
    ("hall_slack", "1.1"),
];

pub fn run_benchmark(cfg: &ExperimentConfig) -> LabResult<Report> {
    let b = cfg.budget;
    let xs = cfg.u64_list("xs")?;
    let spec = cfg.str("set")?.to_string();
    let slack = cfg.f64("hall_slack")?;
    let smooth_u: Option<f64> = spec.strip_prefix("smooth:").and_then(|u| u.parse().ok());
    let mut r = Report::new(
        cfg,
        &[
            "x",
            "set_checksum",
            "u_p",
            "expected",
            "hall_upper",
            "hildebrand_lower",
            "observed",
            "ratio",
            "observed_over_x",
            "rho_u",
        ],
    );
    let table = DickmanTable::with_default_step(smooth_u.map_or(2.0, |u| (u + 1.0).min(U_MAX)))?;
    let mut hall_ok = true;
    for &x in &xs {
        let p = prime_set(&spec, x, &b)?;
        let rep = benchmark(x, &p, &table, &b)?;
        hall_ok &= rep.ratio <= slack * EXP_GAMMA;
        r.checksum(&format!("P@{x}"), p.checksum());
        r.push_row(vec![
            json!(x),
            json!(format!("{:#018x}", p.checksum())),
            num(rep.u_p),
            num(rep.expected),
            num(rep.hall_upper),
            num(rep.hildebrand_lower),
            json!(rep.observed),
            num(rep.ratio),
            num(rep.observed as f64 / x as f64),
            smooth_u.map_or(Value::Null, |u| num(table.eval(u))),
        ]);
    }
    r.derive("hall_bound", num(slack * EXP_GAMMA));
    r.derive("hall_bound_holds", hall_ok);
    Ok(r)
}

pub const COUNTEREXAMPLE_KEYS: &[(&str, &str)] = &[
    ("xs", "100000,1000000,10000000"),
    ("n", "3"),
    ("augmented", "false"),
];

pub fn counterexample(cfg: &ExperimentConfig) -> LabResult<Report> {
    let b = cfg.budget;
    let xs = cfg.u64_list("xs")?;
    let n = u32::try_from(cfg.u64("n")?).map_err(|_| config_err("n too large"))?;
    let aug = cfg.bool("augmented")?;
    let rows = map_jobs(
        cfg.jobs,
        &xs,
        |&x| -> LabResult<(u64, PrimeSet, u64, f64)> {
            let p = PrimeSet::from_power_intervals(x, n, aug, &b)?;
            let psi = psi_sieve(x, &p, &b)?.value;
            let u_p = u_of(&p, x, &b)?;
            Ok((x, p, psi, u_p))
        },
    )?;
    let mut r = Report::new(
        cfg,
        &[
            "x",
            "members",
            "set_checksum",
            "psi",
            "u_p",
            "expected",
            "normalized",
            "observed_over_expected",
        ],
    );
    let mut norm = Vec::new();
    let mut obs = Vec::new();
    for row in rows {
        let (x, p, psi, u_p) = row?;
        let xf = x as f64;
        let normalized = psi as f64 * ln(xf) * u_p / xf;
        let ratio = psi as f64 * u_p / xf;
        norm.push(normalized);
        obs.push(ratio);
        r.checksum(&format!("P@{x}"), p.checksum());
        r.push_row(vec![
            json!(x),
            json!(p.len()),
            json!(format!("{:#018x}", p.checksum())),
            json!(psi),
            num(u_p),
            num(xf / u_p),
            num(normalized),
            num(ratio),
        ]);
    }
    r.derive("normalized_strictly_decreasing", strictly_decreasing(&norm));
    r.derive(
        "observed_over_expected_strictly_decreasing",
        strictly_decreasing(&obs),
    );
    r.note("normalized = psi * log x * u_P / x; observed_over_expected = psi * u_P / x");
    Ok(r)
}

pub const CONGRUENCE_KEYS: &[(&str, &str)] = &[
    ("x", "1000000"),
    ("q", "5"),
    ("a", "1"),
    ("u", "4"),
    ("grid", "12"),
];

pub fn congruence(cfg: &ExperimentConfig) -> LabResult<Report> {
    let b = cfg.budget;
    let x = cfg.u64("x")?;
    let q = cfg.u64("q")?;
    let a = cfg.u64("a")?;
    let u = cfg.f64("u")?;
    let grid = cfg.u64("grid")? as usize;
    if !(u > 1.0) || grid < 2 {
        return Err(config_err("need u > 1 and grid >= 2"));
    }
    let p = PrimeSet::from_congruence(x, q, a, &b)?;
    let mut survivors = survivors_dfs(x, &p, &b)?;
    survivors.sort_unstable();
    let all = primes_up_to(x, &b)?;
    let lx = ln(x as f64);
    let mut ts: Vec<u64> = (0..grid)
        .map(|i| {
            let e = 1.0 / u + (1.0 - 1.0 / u) * i as f64 / (grid - 1) as f64;
            (unsieved_core::float::exp(e * lx).round() as u64).clamp(1, x)
        })
        .collect();
    ts.dedup();
    let mut r = Report::new(
        cfg,
        &[
            "t",
            "psi",
            "psi_over_t",
            "euler_product_e",
            "ratio",
            "normalized",
        ],
    );
    r.checksum("P", p.checksum());
    let mut log_prod = NeumaierSum::new();
    let mut next = 0usize;
    let members = all.members();
    let mut worst = 0.0f64;
    for &t in &ts {
        while next < members.len() && members[next] as u64 <= t {
            let pr = members[next] as u64;
            if !p.contains(pr) {
                log_prod.add(ln_1p(-1.0 / pr as f64));
            }
            next += 1;
        }
        let prod = unsieved_core::float::exp(log_prod.value());
        let count = survivors.partition_point(|&n| n <= t) as u64;
        let density = count as f64 / t as f64;
        let ratio = density / prod;
        worst = worst.max(ratio * q as f64);
        r.push_row(vec![
            json!(t),
            json!(count),
            num(density),
            num(prod),
            num(ratio),
            num(ratio * q as f64),
        ]);
    }
    r.derive("max_normalized", num(worst));
    r.note("ratio = (psi(t)/t) / prod_{p in E, p <= t}(1 - 1/p); normalized = q * ratio");
    Ok(r)
}

pub const FRIEDLANDER_KEYS: &[(&str, &str)] =
    &[("x", "1000000"), ("u", "2"), ("v", "8"), ("band", "0.25")];

pub fn friedlander(cfg: &ExperimentConfig) -> LabResult<Report> {
    let b = cfg.budget;
    let x = cfg.u64("x")?;
    let u = cfg.f64("u")?;
    let v = cfg.f64("v")?;
    let band = cfg.f64("band")?;
    let p = PrimeSet::small_and_large(x, u, v, &b)?;
    let psi = psi_sieve(x, &p, &b)?.value;
    let u_p = u_of(&p, x, &b)?;
    let expected = x as f64 / u_p;
    let measured = psi as f64 / expected;
    let table = DickmanTable::with_default_step((u + 1.0).min(U_MAX))?;
    let predicted = large_medium_ratio(u, v, &table);
    let gap = (measured / predicted - 1.0).abs();
    let mut r = Report::new(
        cfg,
        &[
            "x",
            "u",
            "v",
            "psi",
            "psi_medium",
            "large_primes",
            "u_p",
            "expected",
            "measured_ratio",
            "predicted_ratio",
            "relative_gap",
        ],
    );
    r.checksum("P", p.checksum());
    let (psi_medium, large) = if u >= 2.0 && v >= 2.0 {
        // Medium primes are <= sqrt(x) and large ones above it; any product
        // involving a large prime and anything else exceeds x.
        let root = unsieved_core::predictions::root_floor(x, 2.0);
        let q = p.restrict(0, root);
        let large = p.count_in(root, x) as u64;
        let pm = psi_sieve(x, &q, &b)?.value;
        if pm + large != psi {
            r.flag(Status::InvariantViolation);
            r.note(format!("psi {psi} != psi_medium {pm} + large {large}"));
        }
        r.derive("decomposition_holds", pm + large == psi);
        (json!(pm), json!(large))
    } else {
        r.note("decomposition into medium and large primes needs u >= 2 and v >= 2");
        (Value::Null, Value::Null)
    };
    r.push_row(vec![
        json!(x),
        num(u),
        num(v),
        json!(psi),
        psi_medium,
        large,
        num(u_p),
        num(expected),
        num(measured),
        num(predicted),
        num(gap),
    ]);
    r.derive("within_band", gap <= band);
    Ok(r)
}

pub const DICKMAN_KEYS: &[(&str, &str)] = &[
    ("u_max", "10"),
    ("points", "100"),
    ("tol", "1e-10"),
    ("per_unit", "10000"),
];

pub fn dickman(cfg: &ExperimentConfig) -> LabResult<Report> {
    let u_max = cfg.f64("u_max")?;
    let points = cfg.u64("points")? as usize;
    let tol = cfg.f64("tol")?;
    let per_unit = cfg.u64("per_unit")? as usize;
    if !(u_max > 1.0 && u_max <= U_MAX) || points == 0 {
        return Err(config_err(format!(
            "need 1 < u_max <= {U_MAX} and points >= 1"
        )));
    }
    let table = DickmanTable::new(u_max + 1e-3, per_unit)?;
    let mut r = Report::new(cfg, &["u", "rho", "rho_tol", "ode_residual"]);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for i in 0..points {
        let u = 1.0 + (u_max - 1.0) * (i as f64 + 0.5) / points as f64;
        let rho = table.eval(u);
        let deriv = (table.eval(u + h) - table.eval(u - h)) / (2.0 * h);
        let prev = table.eval(u - 1.0);
        let residual = (u * deriv + prev).abs() / prev;
        worst = worst.max(residual);
        r.push_row(vec![
            num(u),
            num(rho),
            num(dickman_rho(u, tol)?),
            num(residual),
        ]);
    }
    let rho2 = table.eval(2.0);
    r.derive("rho_2", num(rho2));
    r.derive(
        "rho_2_error",
        num((rho2 - (1.0 - core::f64::consts::LN_2)).abs()),
    );
    r.derive("max_ode_residual", num(worst));
    r.derive("joint_mismatch", num(table.joint_mismatch()));
    if !(worst <= 1e-6) {
        r.flag(Status::InvariantViolation);
        r.note(format!("delay equation residual {worst:e} above 1e-6"));
    }
    Ok(r)
}
