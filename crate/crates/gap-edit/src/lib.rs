//! Gap edit distance with preprocessing.
//!
//! Decides whether two strings are within edit distance k (CLOSE) or far
//! beyond it (FAR) after preprocessing one or both strings, reading far less
//! than the whole unpreprocessed input on typical queries. The machinery: a
//! randomized precision tree carrying per-node additive error budgets,
//! subsampled fingerprint tables answering matching queries, shifted
//! self-distance queries over the preprocessed string, and a precision
//! sampling combiner that recombines child estimates without inflating the
//! additive error.
//!
//! Start with the `examples/` directory: `quickstart` builds an index and
//! queries a pair end to end; the other examples each exercise one
//! subsystem. The `gap-edit` binary exposes the same pipeline as a CLI.

pub mod error;
pub mod params;
pub mod prf;
pub mod psl;
pub mod text;
pub mod tree;

pub use error::{GapError, Result};
pub use params::{Params, Side};
pub use text::{Text, BOTTOM};
