//! Shift spaces defined by finite forbidden-block sets.
//!
//! Allowed words are counted three independent ways: pruned enumeration
//! ([`enumerate`]), path counting in the higher-block automaton
//! ([`transfer`]), and exact linear recurrences ([`recurrence`]).
//! Topological entropy comes from the dominant root of the characteristic
//! polynomial of the `T(m,k)` family ([`spectral`]) or from the Perron root
//! of the transfer matrix, and [`design`] runs the construction backwards to
//! pick parameters for a requested entropy.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod design;
pub mod enumerate;
pub mod error;
pub mod recurrence;
pub mod shift;
pub mod spectral;
pub mod transfer;

pub use error::{Error, Result};
pub use shift::{Block, ForbiddenSet, ShiftSpaceSpec, Symbol, TmkParams};
