//! The inequality registry, its constants and the suite runner.

mod constants;
mod fixtures;
mod registry;
mod suite;

pub use constants::{C2Variant, ConstantTable};
pub use fixtures::{Fixture, FIXTURE_NAMES};
pub use registry::{
    verify_inequality, CheckParams, MollifierKind, Verifier, CHECK_IDS, CONVERGENCE_LEVEL, DEVIATION_NODES, MARCHAUD_NODES_PER_OCTAVE,
    ORACLE_SIGMAS, VP_CONVERGENCE_SIGMA,
};
pub use suite::{default_spaces, run_suite, run_suite_with, sort_reports, suite_points, SpaceSpec, SuiteRanges};
