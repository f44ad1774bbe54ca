//! Experiment registry and dispatch.

mod counting;
mod hypotheses;

use crate::config::ExperimentConfig;
use crate::error::{config_err, LabResult};
use crate::report::Report;

pub struct Experiment {
    pub name: &'static str,
    pub about: &'static str,
    /// Accepted parameters with their defaults.
    pub keys: &'static [(&'static str, &'static str)],
    run: fn(&ExperimentConfig) -> LabResult<Report>,
}

pub const EXPERIMENTS: &[Experiment] = &[
    Experiment {
        name: "psi",
        about: "count integers <= x with all prime factors in P",
        keys: counting::PSI_KEYS,
        run: counting::psi,
    },
    Experiment {
        name: "benchmark",
        about: "compare counts with the sieve, Hall and Dickman benchmarks",
        keys: counting::BENCHMARK_KEYS,
        run: counting::run_benchmark,
    },
    Experiment {
        name: "counterexample",
        about: "power-interval family across x",
        keys: counting::COUNTEREXAMPLE_KEYS,
        run: counting::counterexample,
    },
    Experiment {
        name: "congruence",
        about: "primes in one residue class across a t-grid",
        keys: counting::CONGRUENCE_KEYS,
        run: counting::congruence,
    },
    Experiment {
        name: "friedlander",
        about: "small and large primes against u rho(u) (1 - 1/v)",
        keys: counting::FRIEDLANDER_KEYS,
        run: counting::friedlander,
    },
    Experiment {
        name: "hyp-a",
        about: "weighted integer sums landing near N",
        keys: hypotheses::HYP_A_KEYS,
        run: hypotheses::hyp_a,
    },
    Experiment {
        name: "hyp-p",
        about: "prime products in a window below x",
        keys: hypotheses::HYP_P_KEYS,
        run: hypotheses::hyp_p,
    },
    Experiment {
        name: "hyp-t",
        about: "simplex integrals of an open set with measure dt/t",
        keys: hypotheses::HYP_T_KEYS,
        run: hypotheses::hyp_t,
    },
    Experiment {
        name: "pipeline",
        about: "one instance through the integer, continuous and prime checkers",
        keys: hypotheses::PIPELINE_KEYS,
        run: hypotheses::pipeline,
    },
    Experiment {
        name: "dickman",
        about: "Dickman rho table and its delay equation residual",
        keys: counting::DICKMAN_KEYS,
        run: counting::dickman,
    },
];

pub fn find(name: &str) -> LabResult<&'static Experiment> {
    EXPERIMENTS
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| config_err(format!("unknown experiment {name:?}")))
}

/// Validates the configuration, fills defaults and runs the experiment.
pub fn run(cfg: &ExperimentConfig) -> LabResult<Report> {
    let exp = find(&cfg.experiment)?;
    let mut cfg = cfg.clone();
    cfg.resolve(exp.keys)?;
    (exp.run)(&cfg)
}
