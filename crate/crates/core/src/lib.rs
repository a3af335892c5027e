//! Exact computation of the irreducible-representation dimension multisets
//! of the classical groups SL_n, Sp_n, O_n and U_n over length-two
//! principal ideal local rings, together with an independent
//! Dixon-Schneider character-degree oracle for cross-validation.
//!
//! The central claim these computations exercise: the dimension multiset
//! of `C(O_2)` depends on the ring `O` only through the cardinality of its
//! residue field, so the Galois ring of characteristic p^2 and F_q[t]/t^2
//! produce identical multisets whenever their residue fields agree.

pub mod config;
pub mod error;
pub mod field;
pub mod group;
pub mod jordan;
pub mod lie;
pub mod mat;
pub mod oracle;
pub mod par;
pub mod ring;

pub use config::{Budgets, Family};
pub use error::{Error, Result};
