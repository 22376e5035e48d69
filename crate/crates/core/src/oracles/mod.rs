//! Independent computations that certify the closed-form multiplier norms.

pub mod davis_garsia;
pub mod equivalence;
pub mod primal;
pub mod prop1;
pub mod samplers;

pub use davis_garsia::{davis_garsia_objective, davis_garsia_solve, DavisGarsiaOptions, DecompositionPair, SolveStatus};
pub use equivalence::{equivalence_report, muller_pair, Equivalence, EquivalenceConfig, EquivalenceReport, EquivalenceRow};
pub use primal::{
    adapted_primal_pairing, necessity_probe, primal_pairing, primal_ratio_search, NecessityProbe, RatioProblem,
    RatioSearchStats, SamplerConfig,
};
pub use prop1::{prop1_dual_value, DualFieldBuilder, Prop1Value, SignAssignment, SignStrategy, SpaceTag};
