//! Finite unions of open intervals in `(0, 1]` with the measure `dt/t`:
//! reachability of `1` as a `k`-fold sum, simplex integrals, window masses
//! and transfers to integer sets.

pub mod conv;
pub(crate) mod fft;
pub mod hyp_t;
pub mod intervals;
pub mod mc;
pub mod reach;
pub mod transforms;

pub use conv::{
    mass_grid, simplex_integral_conv, simplex_integrals, window_search, IntegralEstimate,
    MassDensityGrid, WindowSearch, MAX_RESOLUTION, MIN_RESOLUTION,
};
pub use hyp_t::{hyp_t_check, HypTReport, HypTRow};
pub use intervals::OpenIntervalSet;
pub use mc::{simplex_integral_mc, window_mass_mc, McEstimate, CHUNK};
pub use reach::{one_in_k_fold, reachable_one, Reachability, MAX_COMPONENTS, MAX_REACH_K};
pub use transforms::{a_to_t, t_to_a, Continuized, Discretized};
