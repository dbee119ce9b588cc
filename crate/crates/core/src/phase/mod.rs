//! Wigner functions on the flat phase space ℝ².

pub mod criteria;
pub mod grid;
pub mod mixture;
pub mod moyal;

pub use criteria::{
    criterion_w_binomial, criterion_w_limit, criterion_w_pure, criterion_w_trace_sqrt, grid_tolerances,
    run_all_phase, w_gate_conditions, PhaseContext, DEFAULT_M_MAX,
};
pub use grid::{build_tatarskij, fock_mixture, fock_wigner, phase_trace, GridSpec, PhaseGrid};
pub use mixture::{
    binomial_limit, mixture_criteria, mixture_star_power, mixture_sums, mixture_verdict, LimitBehaviour,
    MixtureSums, OrthogonalMixture,
};
pub use moyal::{moyal_star, star_power, StarOutput, StarProduct};
