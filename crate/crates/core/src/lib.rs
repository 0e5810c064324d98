//! Integrability exponents of pushforward measures under polynomial maps.
//!
//! The crate is organised in three layers:
//!
//! * an exact symbolic engine ([`poly`], [`simplex`], [`lct`], [`invariants`])
//!   computing Jacobian ideals, log-canonical thresholds of monomial ideals
//!   and the closed-form relations between ε★, lct, δ★ and k★;
//! * a real-field Monte Carlo engine ([`real`]) that samples pushforward
//!   measures and fits tail and Fourier-decay exponents;
//! * a p-adic engine ([`padic`]) that computes exact ball masses of
//!   pushforward measures over ℤ_p by cylinder enumeration.
//!
//! [`mapspec`], [`report`] and [`verify`] glue the engines to the command
//! line and to the Python bindings.

pub mod invariants;
pub mod lct;
pub mod mapspec;
pub mod padic;
pub mod poly;
pub mod real;
pub mod report;
pub mod simplex;
pub mod value;
pub mod verify;

pub use lct::{FieldValidity, Lct, MonomialIdeal, ResolutionData};
pub use poly::{ExponentVector, PolyMap, Polynomial, Rational};
pub use value::{BoundKind, BoundedValue, ExponentValue};
