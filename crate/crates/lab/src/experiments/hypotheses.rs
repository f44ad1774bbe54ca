//! The three hypothesis checkers and the pipeline between them.

use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};
use unsieved_core::comb::{
    a_to_primes, hyp_a_check, hyp_p_check, hypothesis_primes, realization_gap, HypAReport,
    WeightedIntegerSet, A_TO_PRIMES_MAX_N,
};
use unsieved_core::continuous::{
    a_to_t, hyp_t_check, reachable_one, simplex_integral_mc, t_to_a, HypTReport, OpenIntervalSet,
    Reachability,
};
use unsieved_core::exact::{floor_exp, rational_from_f64};
use unsieved_core::Budget;

use crate::config::ExperimentConfig;
use crate::error::{config_err, LabResult};
use crate::report::{num, Report, Status};
use crate::sets::{
    integer_checksum, integer_set, interval_set, interval_set_json, prime_set, prime_set_json,
};

fn exact_pair(q: Option<&num_rational::BigRational>) -> (Value, Value) {
    match q {
        Some(q) => (json!(q.numer().to_string()), json!(q.denom().to_string())),
        None => (Value::Null, Value::Null),
    }
}

pub const HYP_A_KEYS: &[(&str, &str)] = &[
    ("n", "1000"),
    ("u", "1"),
    ("v", "1"),
    ("lambda2", "0"),
    ("set", "full"),
];

fn push_hyp_a(r: &mut Report, a: &WeightedIntegerSet, rep: &HypAReport) {
    for row in &rep.rows {
        let (n, d) = exact_pair(row.lhs_exact.as_ref());
        r.push_row(vec![
            json!(row.k),
            json!(row.n),
            num(row.lhs),
            num(row.lhs_error),
            n,
            d,
            num(row.implied_alpha),
        ]);
    }
    r.checksum("A", integer_checksum(a));
    r.derive("size", a.len());
    r.derive("reciprocal_sum", num(rep.reciprocal_sum.approx));
    r.derive("precondition_holds", rep.precondition_holds);
    if let Some(b) = rep.best_row() {
        r.derive("best_k", b.k);
        r.derive("best_n", b.n);
        r.derive("best_alpha", num(b.implied_alpha));
    }
    r.derive("failed", rep.failed());
    if !rep.precondition_holds {
        r.flag(Status::PreconditionFail);
    }
}

pub fn hyp_a(cfg: &ExperimentConfig) -> LabResult<Report> {
    let (n, u, v) = (cfg.u64("n")?, cfg.f64("u")?, cfg.f64("v")?);
    let a = integer_set(cfg.str("set")?, n, u, v)?;
    let rep = hyp_a_check(&a, cfg.f64("lambda2")?)?;
    let mut r = Report::new(
        cfg,
        &[
            "k",
            "n",
            "lhs",
            "lhs_error",
            "lhs_num",
            "lhs_den",
            "implied_alpha",
        ],
    );
    push_hyp_a(&mut r, &a, &rep);
    Ok(r)
}

pub const HYP_P_KEYS: &[(&str, &str)] = &[
    ("x", "100000"),
    ("u", "1.5"),
    ("v", "1.5"),
    ("delta", "0.5"),
    ("lambda1", "0"),
    ("set", "window"),
];

pub fn hyp_p(cfg: &ExperimentConfig) -> LabResult<Report> {
    let b = cfg.budget;
    let (x, u, v) = (cfg.u64("x")?, cfg.f64("u")?, cfg.f64("v")?);
    let spec = match cfg.str("set")? {
        "window" => format!("window:{u},{v}"),
        s => s.to_string(),
    };
    let p = prime_set(&spec, x, &b)?;
    let rep = hyp_p_check(&p, x, u, v, cfg.f64("delta")?, cfg.f64("lambda1")?, &b)?;
    let mut r = Report::new(
        cfg,
        &[
            "k",
            "lhs",
            "lhs_error",
            "lhs_num",
            "lhs_den",
            "tuples",
            "implied_pi",
        ],
    );
    for row in &rep.rows {
        let (n, d) = exact_pair(row.lhs.exact.as_ref());
        r.push_row(vec![
            json!(row.k),
            num(row.lhs.approx),
            num(row.lhs.error_bound),
            n,
            d,
            json!(row.tuples.to_string()),
            num(row.implied_pi),
        ]);
    }
    r.checksum("P", p.checksum());
    r.derive("set", prime_set_json(&p));
    r.derive("reciprocal_sum", num(rep.reciprocal_sum.approx));
    r.derive("mass_condition", rep.mass_condition);
    r.derive("delta_in_range", rep.delta_in_range);
    r.derive("window_floor", rep.window_floor);
    if let Some(best) = rep.best_row() {
        r.derive("best_k", best.k);
        r.derive("best_pi", num(best.implied_pi));
    }
    if !rep.precondition_holds() {
        r.flag(Status::PreconditionFail);
    }
    Ok(r)
}

pub const HYP_T_KEYS: &[(&str, &str)] = &[
    ("t", "0.37,1"),
    ("u", "1"),
    ("v", "1"),
    ("lambda3", "0"),
    ("m", "65536"),
    ("reach_k", "32"),
    ("mc_samples", "0"),
];

fn reach_json(r: &Reachability) -> Value {
    match r {
        Reachability::Reachable { k, witness } => json!({
            "reachable": true,
            "k": k,
            "witness": witness.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        }),
        Reachability::Unreachable { up_to } => json!({"reachable": false, "up_to": up_to}),
    }
}

fn push_hyp_t(r: &mut Report, rep: &HypTReport) {
    r.derive("mass", num(rep.mass));
    r.derive("precondition_holds", rep.precondition_holds);
    if let Some(b) = rep.best_row() {
        r.derive("best_k", b.k);
        r.derive("best_tau", num(b.implied_tau));
    }
    r.derive("failed", rep.failed());
    if !rep.precondition_holds {
        r.flag(Status::PreconditionFail);
    }
}

pub fn hyp_t(cfg: &ExperimentConfig) -> LabResult<Report> {
    let t = interval_set(cfg.str("t")?)?;
    let (u, v) = (cfg.f64("u")?, cfg.f64("v")?);
    let m = cfg.u64("m")? as usize;
    let reach_k =
        u32::try_from(cfg.u64("reach_k")?).map_err(|_| config_err("reach_k too large"))?;
    let samples = cfg.u64("mc_samples")?;
    let rep = hyp_t_check(&t, u, v, cfg.f64("lambda3")?, m)?;
    let mut r = Report::new(
        cfg,
        &[
            "k",
            "integral",
            "lo",
            "hi",
            "error_bar",
            "exact_zero",
            "implied_tau",
            "mc_value",
            "mc_std_err",
        ],
    );
    for row in &rep.rows {
        let (mv, ms) = if samples > 0 {
            let mc = simplex_integral_mc(&t, row.k as u32, samples, cfg.seed.wrapping_add(row.k))?;
            (num(mc.value), num(mc.std_err))
        } else {
            (Value::Null, Value::Null)
        };
        let e = &row.integral;
        r.push_row(vec![
            json!(row.k),
            num(e.value),
            num(e.lo),
            num(e.hi),
            num(e.error_bar),
            json!(e.exact_zero),
            num(row.implied_tau),
            mv,
            ms,
        ]);
    }
    r.derive("t", interval_set_json(&t));
    r.derive("reachability", reach_json(&reachable_one(&t, reach_k)?));
    push_hyp_t(&mut r, &rep);
    Ok(r)
}

pub const PIPELINE_KEYS: &[(&str, &str)] = &[
    ("kind", "a"),
    ("n", "10000"),
    ("u", "2"),
    ("v", "2"),
    ("lambda", "0"),
    ("set", "full"),
    ("t", "T_2"),
    ("m", "65536"),
    ("delta", "0.5"),
    ("p_dfs_nodes", "20000000"),
];

/// `T ∩ (0, 1/u)`, so a continuized set fits the continuous hypothesis.
fn clip_top(t: &OpenIntervalSet, u: f64) -> LabResult<OpenIntervalSet> {
    let top = num_rational::BigRational::one() / rational_from_f64(u)?;
    let zero = num_rational::BigRational::from_integer(BigInt::from(0));
    Ok(t.clip(&zero, &top))
}

pub fn pipeline(cfg: &ExperimentConfig) -> LabResult<Report> {
    let (n, u, v) = (cfg.u64("n")?, cfg.f64("u")?, cfg.f64("v")?);
    let lambda = cfg.f64("lambda")?;
    let m = cfg.u64("m")? as usize;
    let mut r = Report::new(
        cfg,
        &["side", "k", "n", "value", "implied_constant", "detail"],
    );
    let (a, t) = match cfg.str("kind")? {
        "a" => {
            let a = integer_set(cfg.str("set")?, n, u, v)?;
            let c = a_to_t(&a)?;
            r.derive("transform_mass_discrepancy", num(c.discrepancy));
            (a, c.set)
        }
        "t" => {
            let t = interval_set(cfg.str("t")?)?;
            let d = t_to_a(&t, n, u, v)?;
            r.derive("transform_mass_discrepancy", num(d.discrepancy));
            r.derive("transform_empty_intervals", json!(d.empty_intervals));
            (d.set, t)
        }
        other => return Err(config_err(format!("kind must be a or t, got {other:?}"))),
    };
    r.derive("v2_over_n", num(v * v / n as f64));
    let t = clip_top(&t, u)?;
    r.checksum("A", integer_checksum(&a));

    let ra = hyp_a_check(&a, lambda)?;
    let best_a = ra.best_row().cloned();
    match &best_a {
        Some(b) => r.push_row(vec![
            json!("A"),
            json!(b.k),
            json!(b.n),
            num(b.lhs),
            num(b.implied_alpha),
            json!("best (k, n)"),
        ]),
        None => r.push_row(vec![
            json!("A"),
            Value::Null,
            Value::Null,
            num(0.0),
            num(0.0),
            json!("no weight at any (k, n)"),
        ]),
    }
    r.derive("a_precondition_holds", ra.precondition_holds);
    r.derive("a_reciprocal_sum", num(ra.reciprocal_sum.approx));

    let rt = if t.is_empty() {
        None
    } else {
        Some(hyp_t_check(&t, u, v, lambda, m)?)
    };
    let mut tau_same_k = None;
    if let Some(rt) = &rt {
        r.derive("t_mass", num(rt.mass));
        r.derive("t_precondition_holds", rt.precondition_holds);
        if let Some(b) = &best_a {
            if let Some(row) = rt.rows.iter().find(|row| row.k == b.k) {
                tau_same_k = Some(row.implied_tau);
                r.push_row(vec![
                    json!("T"),
                    json!(row.k),
                    Value::Null,
                    num(row.integral.value),
                    num(row.implied_tau),
                    json!(format!(
                        "same k as A, error bar {:e}",
                        row.integral.error_bar
                    )),
                ]);
            }
        }
        match rt.best_row() {
            Some(row) => r.push_row(vec![
                json!("T"),
                json!(row.k),
                Value::Null,
                num(row.integral.value),
                num(row.implied_tau),
                json!("best k"),
            ]),
            None => r.push_row(vec![
                json!("T"),
                Value::Null,
                Value::Null,
                num(0.0),
                num(0.0),
                json!("no k reaches 1"),
            ]),
        }
    } else {
        r.push_row(vec![
            json!("T"),
            Value::Null,
            Value::Null,
            num(0.0),
            num(0.0),
            json!("empty set"),
        ]);
    }
    if let (Some(b), Some(tau)) = (&best_a, tau_same_k) {
        r.derive("a_t_relative_gap", num((b.implied_alpha - tau).abs() / tau));
    }

    if n <= A_TO_PRIMES_MAX_N && !a.is_empty() {
        let pb = Budget {
            dfs_nodes: cfg.u64("p_dfs_nodes")?,
            ..cfg.budget
        };
        let p = a_to_primes(&a, &cfg.budget)?;
        let gap = realization_gap(&a, &p);
        let bound = 5.0 * v * v / n as f64;
        r.checksum("P", p.checksum());
        r.derive("p_set", prime_set_json(&p));
        r.derive("p_realization_gap", num(gap));
        r.derive("p_gap_bound", num(bound));
        r.derive("p_gap_within_bound", gap <= bound);
        let x = floor_exp(n as u32 + 1)?;
        let delta = cfg.f64("delta")?;
        // Cells near N/u reach past x^(1/u); test only the admissible part.
        let checked = hypothesis_primes(x, u, v, &cfg.budget)
            .map(|h| p.intersection(&h))
            .and_then(|q| {
                r.derive("p_dropped_outside_range", json!(p.len() - q.len()));
                hyp_p_check(&q, x, u, v, delta, lambda, &pb)
            });
        match checked {
            Ok(rp) => match rp.best_row() {
                Some(row) => r.push_row(vec![
                    json!("P"),
                    json!(row.k),
                    Value::Null,
                    num(row.lhs.approx),
                    num(row.implied_pi),
                    json!(format!("x = {x}")),
                ]),
                None => r.push_row(vec![
                    json!("P"),
                    Value::Null,
                    Value::Null,
                    num(0.0),
                    num(0.0),
                    json!(format!("x = {x}, empty window")),
                ]),
            },
            Err(e) => r.push_row(vec![
                json!("P"),
                Value::Null,
                Value::Null,
                Value::Null,
                Value::Null,
                json!(format!("not run: {e}")),
            ]),
        }
    } else {
        r.note(format!(
            "prime side needs 1 <= N <= {A_TO_PRIMES_MAX_N} and nonempty A"
        ));
    }
    if !ra.precondition_holds {
        r.flag(Status::PreconditionFail);
    }
    Ok(r)
}
