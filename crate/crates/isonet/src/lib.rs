//! Discrete isothermic nets and their Darboux transforms in the quaternionic
//! model.
//!
//! The crate builds up from quaternion algebra ([`quat`]) through discrete
//! polarised curves with their flat connections, monodromy and resonance
//! theory ([`curve`]), the explicitly solvable case of uniformly sampled
//! circles ([`circle`]), 2D isothermic nets with Christoffel and Darboux
//! transforms ([`net`]), to closed-form surface families — bubbletons, cmc
//! bubbletons and isothermic tori — with their continuum limits ([`gallery`]).
//!
//! All types are immutable value types (mutation is explicit and local), so
//! everything here is safe to share across threads; sweeps are sequential
//! only where the recurrence itself is.

pub mod circle;
pub mod curve;
pub mod error;
pub mod gallery;
pub mod net;
pub mod quat;
pub mod report;

pub use error::{Error, Result};
pub use quat::{cross_ratio, Quaternion};
