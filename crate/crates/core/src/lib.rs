//! Hypercube circuit codes of spread `k`.
//!
//! A `(d, k)` circuit code is a cycle in the `d`-cube whose vertices stay at
//! least `min(cycle distance, k)` apart in the cube. Codes are handled as
//! transition words (the coordinate flipped at each step), see
//! [`TransitionSequence`].
//!
//! - [`model`]: transition-word algebra, vertex walks, `delta`.
//! - [`verify`]: spread checking, bit runs, structural audits.
//! - [`canon`]: canonical forms under rotation and relabeling.
//! - [`search`]: exhaustive maximum-length search and enumeration.

pub mod canon;
pub mod error;
pub mod model;
pub mod search;
pub mod verify;

pub use canon::{are_isomorphic, canonical_form, classify, CanonicalForm, IsomorphismClass};
pub use error::{Error, ErrorCategory, Result};
pub use model::{
    cyclic_code_distance, delta, expand_vertices, hamming_distance, is_closed, CodeParams, Label,
    ParitySet, Segment, TransitionSequence, Vertex, VertexWalk, MAX_DIMENSION,
};
pub use search::{
    enumerate_max, family_symmetric_max, max_length, search, symmetric_max, Enumeration,
    SearchMode, SearchOptions, SearchOutcome, SearchRecord,
};
pub use verify::{
    audit_delta_inequalities, bit_runs, brute_force_check, check_singleton_property, check_spread,
    in_family, is_symmetric, normalize_to_bitrun_form, BetaBreach, BitRunForm, BitRunReport,
    DeltaFinding, DeltaRule, SpreadVerdict, ViolationReport,
};
