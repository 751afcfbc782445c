//! Error type shared by all modules.

/// Errors produced by the net and curve algebra.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A quaternion that must be inverted is zero (or numerically indistinguishable from it).
    #[error("quaternion with squared norm {norm_sqr:.3e} is not invertible")]
    ZeroDivisor { norm_sqr: f64 },

    /// A polarisation value on some edge vanishes.
    #[error("polarisation mu vanishes on edge {edge}")]
    VanishingMu { edge: usize },

    /// Mismatched point/edge counts when assembling a curve or net.
    #[error("{0}")]
    DomainMismatch(String),

    /// Consecutive curve points coincide, so edge differences cannot be inverted.
    #[error("degenerate edge at vertex {vertex}: consecutive points coincide")]
    DegenerateEdge { vertex: usize },

    /// A periodic curve fails to match itself across one period.
    #[error("stored points violate periodicity at vertex {vertex} (deviation {deviation:.3e})")]
    NotClosed { vertex: usize, deviation: f64 },

    /// Both components of a Riccati state vanish.
    #[error("riccati state (a, b) = (0, 0) is projectively meaningless")]
    DegenerateState,

    /// The Darboux transform passes through infinity (b became zero) at a curve vertex.
    #[error("darboux transform passes through infinity at vertex {vertex}")]
    TransformBlowUp { vertex: usize },

    /// The Darboux transform passes through infinity at a grid vertex.
    #[error("darboux transform passes through infinity at grid vertex ({m}, {n})")]
    TransformBlowUpAt { m: usize, n: usize },

    /// Riccati propagation around a quad is inconsistent, i.e. the input net is not isothermic.
    #[error("flat-connection consistency fails on quad ({m}, {n}) with residual {residual:.3e}")]
    FlatnessViolation { m: usize, n: usize, residual: f64 },

    /// A monodromy matrix was requested for a non-periodic curve.
    #[error("monodromy requires a periodic curve")]
    NotPeriodic,

    /// The monodromy matrix is numerically zero.
    #[error("monodromy matrix is degenerate (max entry norm {max_norm:.3e})")]
    Degenerate { max_norm: f64 },

    /// The resonance formula hits the tangent pole k/(rho M) = 1/2.
    #[error(
        "resonance mode k = {k} hits the tangent pole for cover {rho} and {m_subdiv} subdivisions"
    )]
    TanPole { k: u32, rho: u32, m_subdiv: u32 },

    /// A closed form that assumes a real multiplier exponent was evaluated where it is imaginary.
    #[error("closed form requires real s = sqrt(1 - 4 nu alpha); got s^2 = {s_sqr:.6e} < 0")]
    NonRealS { s_sqr: f64 },

    /// The explicit cylinder parametrisation requires a negative spectral parameter.
    #[error("closed-form cylinder parametrisation requires nu < 0; got nu = {nu:.6e}")]
    NegativeNuRequired { nu: f64 },

    /// The cmc initial-condition radicand is negative.
    #[error("cmc initial condition is imaginary (radicand {radicand:.6e} < 0)")]
    ImaginaryC2 { radicand: f64 },

    /// The requested cmc initial point does not exist for this spectral parameter.
    #[error("no cmc initial point exists for nu = {nu:.6e} (requires nu > 1/4 or nu < 0)")]
    CmcWindowViolated { nu: f64 },

    /// No torus radii match the requested resonance modes.
    #[error(
        "no matching torus radii: p^2 = {p_sqr:.6e}, q^2 = {q_sqr:.6e} must both lie in (0, 1)"
    )]
    NoMatchingTorus { p_sqr: f64, q_sqr: f64 },

    /// The 3-sphere initial-condition solver found no sign change in its scan range.
    #[error("no root of |f(0,0)|^2 - 1 found in the scan range")]
    NoRoot,

    /// No fourth point closes the Bianchi quadrilateral within tolerance.
    #[error(
        "no Bianchi quadrilateral: first-edge conditions unsatisfiable (residual {residual:.3e})"
    )]
    NoBianchiQuad { residual: f64 },

    /// Identical spectral parameters cannot form a Bianchi quadrilateral.
    #[error("permutability requires two distinct nonzero spectral parameters")]
    InvalidSpectralPair,

    /// The net fails the one-form closure test, so it is not isothermic.
    #[error(
        "net is not isothermic: closure residual {residual:.3e} exceeds tolerance {tolerance:.3e}"
    )]
    NotIsothermic { residual: f64, tolerance: f64 },

    /// Invalid construction parameter.
    #[error("{0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
