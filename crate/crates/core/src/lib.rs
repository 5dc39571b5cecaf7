//! Arithmetic in the ring `E_p^(m)` of `m x m` integer matrices whose row `i`
//! is reduced modulo `p^i` and whose entry `(i, j)` below the diagonal is a
//! multiple of `p^(i-j)`, together with public-key constructions built on
//! it and the attacks that break their weak keys.
//!
//! This is research code. Nothing here is constant time.

pub mod action;
pub mod attack;
pub mod center;
pub mod codec;
pub mod dp;
pub mod error;
pub mod numtheory;
pub mod oracle;
pub mod params;
pub mod ring;
pub mod sap;

pub use action::{act, ActionVector};
pub use center::{CentralElement, HPolynomial, SamplingConfig};
pub use error::{Error, Result};
pub use params::RingParams;
pub use ring::RingElement;
