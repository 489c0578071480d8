//! Time evolution: the stepwise dephasing model, the Lindblad master
//! equation and its quantum-state-diffusion unraveling.

mod histogram;
mod lindblad;
mod master;
pub mod rk;
mod qsd;
mod survival;
mod toy;

pub use histogram::{magnetization_distribution, magnetization_distribution_full, BinEdges, MagnetizationHistogram};
pub use lindblad::{
    build_closed_model, build_dephasing_model, build_thermal_model, Environment, LindbladModel, OperatorMode,
    Representation, MAX_DICKE_QUBITS,
};
pub use master::{
    integrate_master, integrate_master_observed, integrate_master_with, EvolutionResult, MasterDiagnostics,
    MasterOptions,
};
pub use qsd::{
    ensemble_average, qsd_step_bound, qsd_trajectory, simulate_trajectories, trajectory_seed, ObservableStats,
    QsdOptions, Trajectory, TrajectoryDiagnostics, TrajectoryEnsemble,
};
pub use survival::{fit_decay_rate, DecayFit, SurvivalSeries, MIN_FIT_POINTS};
pub use toy::{
    survival_closed_form, survival_recurrence, toy_evolve, toy_step, toy_survival_series, ToyModelParams,
    ToyWarning, TOY_LEAKAGE_TOL,
};
