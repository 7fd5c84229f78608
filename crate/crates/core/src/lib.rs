//! Exact real arithmetic built on rational-interval predomain bases.
//!
//! Elements of a predomain base are finite approximations; ideal elements
//! (for instance real numbers) are increasing chains of base elements. Order
//! between ideal elements is classical, so comparisons are exposed as
//! budgeted probes rather than booleans.

pub mod completion;
pub mod error;
pub mod funcspace;
pub mod gen;
pub mod interval;
pub mod newton;
pub mod numerics;
pub mod predomain;
pub mod reals;
pub mod selftest;

pub use completion::{Chain, ProbeResult};
pub use error::DomainError;
pub use interval::{IntervalBase, IntervalQ, Separation};
pub use numerics::Rational;
pub use reals::Real;
