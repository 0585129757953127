//! Exact invariants of special fibers of arithmetic surfaces.
//!
//! A special fiber is described combinatorially: components with their
//! multiplicities, arithmetic genera and self-intersections, together with
//! the pairwise intersection numbers. From that data this crate computes,
//! in exact rational arithmetic,
//!
//! - the negated intersection matrix `M` and its Moore–Penrose
//!   pseudoinverse `M⁺` ([`linalg`]),
//! - the vertical divisors `V_D`, `Φ(Z)`, `V_l` and `U_D` and the local
//!   Néron pairing ([`divisor`]),
//! - the local lower bound `β_D` for the self-intersection of the relative
//!   dualizing sheaf and relative-semipositivity certificates
//!   ([`invariants`]),
//! - formal sums `Σ q_p·log p` over places ([`global`]).
//!
//! [`catalog`] generates the standard example fibers (banana fibers, the
//! semistable genus-2 types, `X₁(N)` and Fermat fibers) and [`audit`]
//! compares engine values with published reference values.

pub mod audit;
pub mod catalog;
pub mod divisor;
pub mod document;
pub mod error;
pub mod fiber;
pub mod global;
pub mod invariants;
pub mod linalg;
pub mod rational;

pub use divisor::{FiberAnalysis, GammaVector, VerticalDivisor};
pub use error::{Error, Result};
pub use fiber::{Component, DualGraph, HorizontalIncidence, SpecialFiber, ValidationReport};
pub use global::{FormalLogSum, GlobalModel, Place};
pub use invariants::{BetaPath, BetaReport, SemipositivityCertificate};
pub use linalg::{PseudoinverseResult, RatMatrix};
pub use rational::Rat;
