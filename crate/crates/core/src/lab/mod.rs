//! Denseness experiments: targets, input samplers and convergence studies.

mod sampler;
mod study;
mod target;

pub use sampler::{cell_rng, Purpose, Sampler, SamplerKind};
pub use study::{
    fit_approximant, risk_convergence_check, run_study, sup_gap_estimate, sup_gap_grid, CellMetrics,
    CellRecord, ConvergenceReport, KernelFamily, RiskCheck, Schedule, StudyConfig,
    DEFAULT_GRID_RESOLUTION, DEFAULT_SAMPLE_SIZES, RISK_CHECK_SLACK,
};
pub use target::{make_target, Domain, Step, TargetFunction, TargetKind};
