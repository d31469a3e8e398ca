//! Configured size bounds. Operations that would exceed one of these return
//! [`Error::BoundExceeded`](crate::Error::BoundExceeded) instead of running.

/// Largest `n` accepted by [`pi`](crate::pi) (2^n elements).
pub const PI_MAX_N: usize = 12;

/// Largest structure for which automorphism groups are enumerated.
pub const AUTOMORPHISM_MAX_N: usize = 10;

/// Longest word accepted by `phi`: images are subsets of `{1..n}` held
/// as 64-bit masks, so `Π_n` itself need not be built.
pub const PHI_MAX_LEN: usize = 63;

/// Largest element count for which [`gen_posets`](crate::gen::gen_posets) runs.
pub const GEN_MAX_N: usize = 8;

/// Upper bound on |W^n_m(A)| for a materialized enumeration.
pub const WORD_ENUM_LIMIT: u128 = 2_000_000;

/// Default search-node budget for arrow decisions.
pub const DEFAULT_NODE_LIMIT: u64 = 20_000_000;

/// Default cap on the number of linear extensions walked by witness checks.
pub const DEFAULT_EXTENSION_LIMIT: u64 = 4_000_000;

/// Largest number of colors accepted by the arrow solver.
pub const MAX_COLORS: usize = 16;

/// Environment variable overriding [`DEFAULT_NODE_LIMIT`] in the CLI.
pub const NODE_LIMIT_ENV: &str = "RAMSEY_NODE_LIMIT";

/// Largest `n` for which the powerset lattice tables are materialized.
pub const POWERSET_LATTICE_MAX_N: usize = 8;
