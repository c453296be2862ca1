//! Safe switching among libraries of discrete-time movement primitives.
//!
//! A primitive is a contracting map `f_p` with a quadratic Lyapunov function
//! and a certified sublevel-set basin. [`certificates`] turns a library into
//! an average dwell-time budget under which switching keeps the state inside
//! every basin; [`simulation`] and [`walker`] exercise those budgets.

pub mod certificates;
pub mod error;
pub mod linalg;
pub mod primitives;
pub mod schema;
pub mod seed;
pub mod simulation;
pub mod surrogate;
pub mod switching;
pub mod walker;

pub use certificates::{
    dwell_time_bound, estimate_disturbance_margin, feasibility_check, mu_analytic, mu_grid,
    omega_analytic, omega_grid, synthesize_certificate, BoundMethod, Certificate, SynthesisOptions,
    SynthesisOutcome,
};
pub use error::{Error, Result};
pub use primitives::{
    certify_basin, eval_map, lyapunov_value, verify_contraction, Primitive, PrimitiveLibrary,
    PrimitiveMap, QuadraticLyapunov,
};
pub use schema::{library_fingerprint, load_library, LibraryDocument, PrimitiveDocument};
pub use simulation::{
    empirical_trapping_level, monte_carlo, run, safety_monitor, CampaignConfig, CampaignReport,
    DisturbanceSequence, SafetyReport, Trace,
};
pub use switching::{
    admit_switch, count_switches, heading_policy, validate_dwell_time, Decision, DwellTimeBudget,
    Supervisor, SwitchingSignal,
};
pub use walker::{
    heading_estimate, impedance_force, integrate_stride_force, load_scenario, run_scenario,
    stride_update, LeaderModel, Pose, ScenarioTrace, StrideForce, StridePrimitive, WalkerMode,
    WalkerScenario,
};
