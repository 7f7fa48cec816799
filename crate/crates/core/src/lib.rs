//! Finite-structure locality toolkit.
//!
//! Finite relational structures over the universe `{0, …, n−1}`, their
//! Gaifman graphs and radius-`m` balls, censuses of ball types, a brute-force
//! first-order evaluator with native distance atoms, Ehrenfeucht–Fraïssé game
//! search with an independent type-refinement decider, Hanf-condition
//! checkers, and generators for the graph families used in the classical
//! inexpressibility arguments (parity, connectivity, planarity).

pub mod ball_types;
pub mod canon;
pub mod ef;
pub mod error;
pub mod families;
pub mod format;
pub mod gaifman;
pub mod hanf;
pub mod iso;
pub mod logic;
pub mod structure;

pub use ball_types::{census, census_compare, component_type, BallType, Census, CensusComparison, Radius};
pub use canon::{canonical_code, CanonicalCode};
pub use ef::{
    distinguishing_rank, distinguishing_sentence, duplicator_wins, m_equiv, m_equiv_with, refine_types_oracle,
    EfVerdict, GameConfig, RankVerdict,
};
pub use error::{Error, Result};
pub use gaifman::{ball, components, degree_bound, distance, gaifman_graph, max_ball_size, Distance, GaifmanGraph};
pub use hanf::{
    hanf_pair_check, hanf_sequence_check, threshold_experiment, HanfCertificate, HanfVerdict, SequenceConfig,
    SequenceReport, SeriesClass, ThresholdReport,
};
pub use iso::{iso_check, iso_check_with_limit, DEFAULT_ISO_LIMIT};
pub use logic::{evaluate, quantifier_rank, Formula, Var};
pub use structure::{disjoint_union, induced_substructure, validate, FiniteStructure, PointedStructure, Signature};

/// Universe elements are plain indices into `0..size`.
pub type Element = usize;
