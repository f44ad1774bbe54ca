//! Text specs for prime sets, integer sets and interval sets, and their JSON
//! forms.

use serde_json::{json, Value};
use unsieved_core::comb::{hypothesis_primes, WeightedIntegerSet};
use unsieved_core::continuous::OpenIntervalSet;
use unsieved_core::predictions::smooth_family;
use unsieved_core::primes::{fnv1a_u64s, primes_up_to};
use unsieved_core::{Budget, Descriptor, PrimeSet};

use crate::config::parse_u64;
use crate::error::{config_err, LabResult};

fn nums(key: &str, s: &str) -> LabResult<Vec<u64>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| parse_u64(key, p))
        .collect()
}

fn reals(s: &str) -> LabResult<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| config_err(format!("{p:?} is not a number")))
        })
        .collect()
}

fn arity<T>(v: Vec<T>, n: usize, spec: &str) -> LabResult<Vec<T>> {
    if v.len() == n {
        Ok(v)
    } else {
        Err(config_err(format!("{spec:?} needs {n} values")))
    }
}

/// Builds the prime set named by `spec` at scale `x`:
///
/// - `all`, `none`
/// - `list:2,3,5`
/// - `range:lo,hi` for `lo < p <= hi`
/// - `power:N` or `power:N:aug`
/// - `congruence:q,a`
/// - `smooth:u` for `p <= x^{1/u}`
/// - `small-large:u,v`
/// - `window:u,v` for `x^{1/ev} < p <= x^{1/u}`
pub fn prime_set(spec: &str, x: u64, budget: &Budget) -> LabResult<PrimeSet> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let set = match kind {
        "all" => primes_up_to(x, budget)?,
        "none" => PrimeSet::empty(x),
        "list" => PrimeSet::from_list(x, &nums("set", arg)?)?,
        "range" => {
            let v = arity(nums("set", arg)?, 2, spec)?;
            PrimeSet::range(v[0], v[1].min(x), x, budget)?
        }
        "power" => {
            let (n, aug) = match arg.split_once(':') {
                Some((n, "aug")) => (n, true),
                None => (arg, false),
                Some(_) => return Err(config_err(format!("bad power spec {spec:?}"))),
            };
            let n = parse_u64("set", n)?;
            let n = u32::try_from(n).map_err(|_| config_err("N too large"))?;
            PrimeSet::from_power_intervals(x, n, aug, budget)?
        }
        "congruence" => {
            let v = arity(nums("set", arg)?, 2, spec)?;
            PrimeSet::from_congruence(x, v[0], v[1], budget)?
        }
        "smooth" => smooth_family(x, arity(reals(arg)?, 1, spec)?[0], budget)?,
        "small-large" => {
            let v = arity(reals(arg)?, 2, spec)?;
            PrimeSet::small_and_large(x, v[0], v[1], budget)?
        }
        "window" => {
            let v = arity(reals(arg)?, 2, spec)?;
            hypothesis_primes(x, v[0], v[1], budget)?
        }
        _ => return Err(config_err(format!("unknown prime set {spec:?}"))),
    };
    Ok(set)
}

/// Builds `A ⊂ (N/(ev), N/u]` from `full`, `list:a,b,..` or `multiples:d`.
pub fn integer_set(spec: &str, n: u64, u: f64, v: f64) -> LabResult<WeightedIntegerSet> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let set = match kind {
        "full" => WeightedIntegerSet::full_interval(n, u, v)?,
        "list" => WeightedIntegerSet::new(n, u, v, &nums("set", arg)?)?,
        "multiples" => {
            let d = parse_u64("set", arg)?;
            if d == 0 {
                return Err(config_err("multiples:0 is empty"));
            }
            let full = WeightedIntegerSet::full_interval(n, u, v)?;
            let el: Vec<u64> = full
                .elements()
                .iter()
                .copied()
                .filter(|a| a % d == 0)
                .collect();
            WeightedIntegerSet::new(n, u, v, &el)?
        }
        _ => return Err(config_err(format!("unknown integer set {spec:?}"))),
    };
    Ok(set)
}

/// `"a,b;c,d"` or `T_N` for the obstruction family.
pub fn interval_set(spec: &str) -> LabResult<OpenIntervalSet> {
    if let Some(n) = spec.strip_prefix("T_") {
        let n = parse_u64("t", n)?;
        let n = u32::try_from(n).map_err(|_| config_err("N too large"))?;
        return Ok(OpenIntervalSet::t_family(n)?);
    }
    Ok(OpenIntervalSet::parse(spec)?)
}

pub fn integer_checksum(a: &WeightedIntegerSet) -> u64 {
    fnv1a_u64s(a.elements().iter().copied())
}

pub fn descriptor_json(d: &Descriptor) -> Value {
    match d {
        Descriptor::ExplicitList => json!({"kind": "explicit-list"}),
        Descriptor::Range { lo, hi } => json!({"kind": "range", "lo": lo, "hi": hi}),
        Descriptor::PowerIntervalUnion { x, n, augmented } => {
            json!({"kind": "power-interval-union", "x": x, "n": n, "augmented": augmented})
        }
        Descriptor::Congruence { q, a, lo, hi } => {
            json!({"kind": "congruence", "q": q, "a": a, "lo": lo, "hi": hi})
        }
        Descriptor::Complement { of, within } => {
            json!({"kind": "complement", "of": descriptor_json(of), "within": within})
        }
        Descriptor::Union(a, b) => {
            json!({"kind": "union", "parts": [descriptor_json(a), descriptor_json(b)]})
        }
        Descriptor::Intersection(a, b) => {
            json!({"kind": "intersection", "parts": [descriptor_json(a), descriptor_json(b)]})
        }
        Descriptor::ExpCells { cells } => json!({"kind": "exp-cells", "cells": cells}),
        Descriptor::SmallAndLarge { x, u, v } => {
            json!({"kind": "small-and-large", "x": x, "u": u, "v": v})
        }
    }
}

/// `{bound_x, descriptor, count, checksum}`.
pub fn prime_set_json(p: &PrimeSet) -> Value {
    json!({
        "bound_x": p.bound_x(),
        "descriptor": descriptor_json(p.descriptor()),
        "count": p.len(),
        "checksum": format!("{:#018x}", p.checksum()),
    })
}

/// `[{num_a, den_a, num_b, den_b}]`.
pub fn interval_set_json(t: &OpenIntervalSet) -> Value {
    Value::Array(
        t.intervals()
            .iter()
            .map(|(a, b)| {
                json!({
                    "num_a": a.numer().to_string(),
                    "den_a": a.denom().to_string(),
                    "num_b": b.numer().to_string(),
                    "den_b": b.denom().to_string(),
                })
            })
            .collect(),
    )
}

pub fn interval_set_from_json(v: &Value) -> LabResult<OpenIntervalSet> {
    let bad = || config_err("interval JSON must be [{num_a, den_a, num_b, den_b}]");
    let arr = v.as_array().ok_or_else(bad)?;
    let mut spec = Vec::with_capacity(arr.len());
    for item in arr {
        let field = |k: &str| -> LabResult<String> {
            match item.get(k) {
                Some(Value::String(s)) => Ok(s.clone()),
                Some(Value::Number(n)) => Ok(n.to_string()),
                _ => Err(bad()),
            }
        };
        spec.push(format!(
            "{}/{},{}/{}",
            field("num_a")?,
            field("den_a")?,
            field("num_b")?,
            field("den_b")?
        ));
    }
    if spec.is_empty() {
        return Ok(OpenIntervalSet::empty());
    }
    Ok(OpenIntervalSet::parse(&spec.join(";"))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_specs() {
        let b = Budget::default();
        assert_eq!(prime_set("list:2,3,5", 30, &b).unwrap().len(), 3);
        assert_eq!(prime_set("all", 30, &b).unwrap().len(), 10);
        assert_eq!(
            prime_set("range:10,30", 30, &b).unwrap().members(),
            &[11, 13, 17, 19, 23, 29]
        );
        assert_eq!(
            prime_set("congruence:3,1", 30, &b).unwrap().members(),
            &[7, 13, 19]
        );
        assert_eq!(prime_set("smooth:2", 100, &b).unwrap().len(), 4);
        assert!(prime_set("power:3:aug", 1000, &b).is_ok());
        assert!(prime_set("bogus", 30, &b).is_err());
        assert!(prime_set("range:1", 30, &b).is_err());
    }

    #[test]
    fn integer_specs() {
        let a = integer_set("multiples:10", 100, 1.0, 1.0).unwrap();
        assert_eq!(a.elements(), &[40, 50, 60, 70, 80, 90, 100]);
        assert!(integer_set("list:5", 100, 1.0, 1.0).is_err());
    }

    #[test]
    fn interval_json_round_trip() {
        let t = interval_set("T_3").unwrap();
        let back = interval_set_from_json(&interval_set_json(&t)).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn prime_set_json_shape() {
        let p = prime_set("list:2,3,5", 30, &Budget::default()).unwrap();
        let j = prime_set_json(&p);
        assert_eq!(j["count"], 3);
        assert_eq!(j["bound_x"], 30);
        assert_eq!(j["descriptor"]["kind"], "explicit-list");
    }
}
