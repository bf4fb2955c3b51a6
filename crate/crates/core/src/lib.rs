//! Exact mixed moments for ε-independent random variables: mixtures of
//! classical and free independence prescribed by a graph.
//!
//! The mixed moment `φ(a_1⋯a_n)` of variables living in algebras
//! `i(1), …, i(n)` is computed three ways:
//!
//! * as a sum of products of free (or classical) cumulants over the
//!   ε-non-crossing partitions `NC^ε[𝐢]` ([`moments::mixed_moment_cumulant`]);
//! * from the defining vanishing condition by recursive centering
//!   ([`moments::mixed_moment_by_definition`]);
//! * for the generators of a right-angled Artin group, as the canonical trace
//!   of a group-algebra element ([`group::generator_mixed_moment`]).
//!
//! All arithmetic is exact ([`scalar::Scalar`] is an arbitrary-precision
//! rational).

pub mod crosscheck;
pub mod cumulants;
pub mod distribution;
pub mod epsilon;
pub mod error;
pub mod group;
pub mod joint;
pub mod moments;
pub mod nc_epsilon;
pub mod partition;
pub mod scalar;

pub use cumulants::{CumulantKind, CumulantTable, MomentSequence, TableSet};
pub use distribution::{Distribution, DistributionSpec};
pub use epsilon::{is_admissible_tuple, EpsilonMatrix, GraphSpec, LabelledGraph};
pub use error::{Error, Result};
pub use group::{GroupAlgebraElement, GroupWord};
pub use partition::{IndexTuple, SetPartition};
pub use scalar::Scalar;

/// Largest ground set the exhaustive partition enumerations accept by default
/// (Bell(12) ≈ 4.2 million).
pub const DEFAULT_ENUMERATION_CAP: usize = 12;

/// Word length cap for the centering-recursion evaluator.
pub const DEFAULT_DEFINITION_CAP: usize = 10;

/// Word length cap for the `2^n` sign-pattern expansion in the group model.
pub const DEFAULT_GROUP_WORD_CAP: usize = 14;
