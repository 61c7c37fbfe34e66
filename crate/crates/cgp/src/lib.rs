//! Cartesian Genetic Programming with phenotypic insertion and deletion
//! mutations.
//!
//! The crate provides:
//! - a single-row CGP representation with backward-search decoding and
//!   bit-parallel boolean / real-valued execution ([`genotype`], [`program`]),
//! - point mutation, single active-gene mutation, and the phenotypic
//!   insertion/deletion operators ([`mutation`]),
//! - a (1+lambda) evolutionary algorithm with neutral drift ([`evolution`]),
//! - boolean-circuit and symbolic-regression benchmarks ([`problems`]),
//! - Mann-Whitney U significance testing and grid-cell aggregation
//!   ([`stats`]),
//! - a seeded, parallel experiment harness behind the `cgp` binary
//!   ([`harness`]).

pub mod bitword;
pub mod error;
pub mod evolution;
pub mod function_set;
pub mod genotype;
pub mod geometry;
pub mod harness;
pub mod mutation;
pub mod problems;
pub mod program;
pub mod stats;

pub use error::{CgpError, Result};
pub use evolution::{run, EvolutionParams, RunRecord};
pub use function_set::{BoolFn, FunctionKind, FunctionSet, RealFn};
pub use genotype::{random_genotype, Genotype};
pub use geometry::{genotype_length, Geometry};
pub use mutation::{
    breed_offspring, deletion, insertion, point_mutation, single_active_gene_mutation,
    MutationParams,
};
pub use problems::{
    boolean_fitness, make_boolean_problem, make_regression_problem, regression_fitness, Problem,
};
pub use program::{decode, execute_boolean, execute_real, DecodedProgram};
pub use stats::{mann_whitney_u, summarize_cell, GridCellSummary, Marker, Metric};
