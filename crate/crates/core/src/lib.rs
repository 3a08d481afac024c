//! Exact certification toolkit for Galois-conjugate, nonisomorphic
//! arithmetic lattices in `PU(n,1)` built from diagonal hermitian forms over
//! CM extensions of totally real number fields.
//!
//! Every verdict is computed with exact rational arithmetic. Numeric
//! approximations appear only as search heuristics whose output is verified
//! exactly before it is trusted.

pub mod arith;
pub mod cert;
pub mod error;
pub mod field;
pub mod fingerprint;
pub mod groups;
pub mod hermitian;
pub mod local;

pub use error::{Error, Result};
