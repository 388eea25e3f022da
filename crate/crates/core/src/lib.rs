//! Influence, noise stability and adversarial robustness of voting methods.
//!
//! A two-candidate voting method is a map `f: {-1,1}^n -> {-1,1}`. This crate
//! represents such maps either as bit-packed truth tables
//! ([`BooleanFunction`]) or as structured generators ([`Method`]) that can be
//! evaluated at any size, and provides:
//!
//! * pivotal counts, influences and Banzhaf indices ([`power`]),
//! * exact and Monte Carlo noise stability under independent vote
//!   corruption ([`stability`]),
//! * Hamming-neighbourhood geometry and adversarial vulnerability counts
//!   ([`geometry`]),
//! * k-candidate plurality stability and Condorcet analysis ([`multi`]),
//! * two-tier (electoral college) simulation ([`electoral`]).
//!
//! Heavy kernels run on rayon when the `parallel` feature is enabled (the
//! default) and fall back to sequential loops otherwise. Results never depend
//! on the worker count.

pub mod bits;
pub mod cube;
pub mod electoral;
pub mod error;
pub mod exact;
pub mod exec;
pub mod function;
pub mod geometry;
pub mod method;
pub mod multi;
pub mod power;
pub mod rng;
pub mod stability;

pub use cube::{BiasedMeasure, VoteVector};
pub use error::{Error, Result};
pub use exact::ExactValue;
pub use exec::Exec;
pub use function::BooleanFunction;
pub use method::{Method, MethodSpec, Partition, TieStatus, UnEra, N_DENSE};
