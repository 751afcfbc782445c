//! Closed-form Darboux theory of uniformly sampled discrete circles.
//!
//! A rho-fold cover of the discrete circle `f_m = j r e^{2 pi i m / M}` with
//! constant polarisation `1/mu = alpha |1 - e^{2 pi i / M}|^2` admits an
//! explicit general solution of the linearised Riccati recurrence, an explicit
//! set of resonance points, and — at resonance — explicit closed Darboux
//! transforms living in the same jk-plane.

use num_complex::Complex64;

use crate::curve::{DiscreteCurve, PolarisedDomain1D, RiccatiState};
use crate::error::{Error, Result};
use crate::quat::{Quaternion, TOL_ZERO};

/// A rho-fold cover of a uniformly sampled circle with constant polarisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleSpec {
    radius: f64,
    subdivisions: u32,
    cover: u32,
    alpha: f64,
}

impl CircleSpec {
    /// `subdivisions` must exceed 2 and `alpha` must be nonzero;
    /// `alpha = radius^2` gives the arc-length polarisation.
    pub fn new(radius: f64, subdivisions: u32, cover: u32, alpha: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::InvalidParameter(
                "circle radius must be positive".into(),
            ));
        }
        if subdivisions <= 2 {
            return Err(Error::InvalidParameter(
                "circle subdivision count must exceed 2".into(),
            ));
        }
        if cover == 0 {
            return Err(Error::InvalidParameter(
                "cover count must be positive".into(),
            ));
        }
        if alpha == 0.0 {
            return Err(Error::InvalidParameter(
                "polarisation scale alpha must be nonzero".into(),
            ));
        }
        Ok(CircleSpec {
            radius,
            subdivisions,
            cover,
            alpha,
        })
    }

    /// Arc-length polarised circle (`alpha = r^2`).
    pub fn arc_length(radius: f64, subdivisions: u32, cover: u32) -> Result<Self> {
        Self::new(radius, subdivisions, cover, radius * radius)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn subdivisions(&self) -> u32 {
        self.subdivisions
    }

    pub fn cover(&self) -> u32 {
        self.cover
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Period of the covered curve, `rho * M`.
    pub fn period(&self) -> usize {
        (self.cover as usize) * (self.subdivisions as usize)
    }

    /// The constant edge polarisation `mu` with `1/mu = alpha |1 - e^{2 pi i/M}|^2`.
    pub fn mu(&self) -> f64 {
        let m = self.subdivisions as f64;
        1.0 / (self.alpha * 4.0 * (std::f64::consts::PI / m).sin().powi(2))
    }

    /// `f_m = j r e^{2 pi i m / M}`.
    pub fn point(&self, m: i64) -> Quaternion {
        let theta = 2.0 * std::f64::consts::PI * (m as f64) / (self.subdivisions as f64);
        Quaternion::J * Quaternion::from_complex(Complex64::from_polar(self.radius, theta))
    }

    /// The covered circle as a periodic polarised curve.
    pub fn curve(&self) -> DiscreteCurve {
        let period = self.period();
        let points: Vec<Quaternion> = (0..period as i64).map(|m| self.point(m)).collect();
        let domain = PolarisedDomain1D::periodic(vec![self.mu(); period])
            .expect("validated spec always yields a valid domain");
        DiscreteCurve::new(domain, points).expect("circle points are distinct for M > 2")
    }

    /// The resonance point `nu = (1/4 alpha)(1 - cot^2(pi/M) tan^2(k pi / rho M))`.
    ///
    /// Fails at the tangent pole `k/(rho M) = 1/2 (mod 1)`.
    pub fn resonance_nu(&self, k: u32) -> Result<f64> {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "resonance mode k must be positive".into(),
            ));
        }
        let rho_m = self.period() as u64;
        if (2 * k as u64) % (2 * rho_m) == rho_m {
            return Err(Error::TanPole {
                k,
                rho: self.cover,
                m_subdiv: self.subdivisions,
            });
        }
        let m = self.subdivisions as f64;
        let angle = (k as f64) * std::f64::consts::PI / (rho_m as f64);
        let cot = 1.0 / (std::f64::consts::PI / m).tan();
        Ok((1.0 - cot * cot * angle.tan().powi(2)) / (4.0 * self.alpha))
    }

    /// General solution basis of the circle recurrence at vertex `m`.
    ///
    /// `s = sqrt(1 - 4 nu alpha)` is taken on the principal branch, so the
    /// basis is well-defined (complex) for every real `nu`.
    pub fn solution_basis(&self, nu: f64, m: i32) -> SolutionBasis {
        let s = Complex64::new(1.0 - 4.0 * nu * self.alpha, 0.0).sqrt();
        let phase =
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / (self.subdivisions as f64));
        let one = Complex64::new(1.0, 0.0);
        let half = Complex64::new(0.5, 0.0);
        let root0_plus = half * (phase.conj() * (one + s) + (one - s));
        let root0_minus = half * (phase.conj() * (one - s) + (one + s));
        let root1_plus = half * (phase * (one - s) + (one + s));
        let root1_minus = half * (phase * (one + s) + (one - s));
        SolutionBasis {
            a0_plus: root0_plus.powi(m),
            a0_minus: root0_minus.powi(m),
            a1_plus: root1_plus.powi(m),
            a1_minus: root1_minus.powi(m),
        }
    }

    /// Phase exponent `k pi / (rho M)` of the resonance mode `k`.
    fn mode_angle(&self, k: u32) -> f64 {
        (k as f64) * std::f64::consts::PI / (self.period() as f64)
    }

    /// `sin((rho +/- k) pi / (rho M))` — the pair of weights in all resonance
    /// closed forms.
    fn mode_sines(&self, k: u32) -> (f64, f64) {
        let rho = self.cover as f64;
        let kk = k as f64;
        let base = std::f64::consts::PI / (self.period() as f64);
        (((rho + kk) * base).sin(), ((rho - kk) * base).sin())
    }

    /// Initial Riccati state at m = 0 for the resonance-mode solution with
    /// quaternionic constants `c_plus`, `c_minus`:
    /// `a_0 = c+ + c-` and `b_0 = (1/2r) csc(pi/M) sec(k pi/rho M) j (S+ c+ + S- c-)`.
    pub fn initial_state(
        &self,
        k: u32,
        c_plus: Quaternion,
        c_minus: Quaternion,
    ) -> Result<RiccatiState> {
        self.resonance_nu(k)?;
        let (s_plus, s_minus) = self.mode_sines(k);
        let a = c_plus + c_minus;
        let beta = Quaternion::J * (c_plus * s_plus + c_minus * s_minus);
        let csc = 1.0 / (std::f64::consts::PI / (self.subdivisions as f64)).sin();
        let sec = 1.0 / self.mode_angle(k).cos();
        let b = beta * (csc * sec / (2.0 * self.radius));
        RiccatiState::new(a, b)
    }

    /// The closed Darboux transform of the circle staying in the jk-plane,
    /// with resonance mode `k` and constants `c+ = j`, `c- = j c2`:
    ///
    /// ```text
    /// f_hat_m = -j r e^{2 pi i m/M} (e^{-i k pi m/rho M} S+ c2 + e^{i k pi m/rho M} S-)
    ///                             / (e^{-i k pi m/rho M} S- c2 + e^{i k pi m/rho M} S+)
    /// ```
    pub fn closed_darboux(&self, k: u32, c2: Complex64, m: i64) -> Result<Quaternion> {
        let nu = self.resonance_nu(k)?;
        let s_sqr = 1.0 - 4.0 * nu * self.alpha;
        if s_sqr < 0.0 {
            return Err(Error::NonRealS { s_sqr });
        }
        let (s_plus, s_minus) = self.mode_sines(k);
        let phase = Complex64::from_polar(1.0, self.mode_angle(k) * (m as f64));
        let num = s_plus * c2 / phase + s_minus * phase;
        let den = s_minus * c2 / phase + s_plus * phase;
        let scale = num.norm().max(den.norm()).max(1.0);
        if den.norm() <= TOL_ZERO * scale {
            return Err(Error::TransformBlowUp {
                vertex: m.rem_euclid(self.period() as i64) as usize,
            });
        }
        let orbit = Complex64::from_polar(
            self.radius,
            2.0 * std::f64::consts::PI * (m as f64) / (self.subdivisions as f64),
        );
        Ok(Quaternion::from_complex_pair(
            Complex64::new(0.0, 0.0),
            -orbit * num / den,
        ))
    }
}

/// The four scalar basis sequences of the general circle solution, evaluated
/// at one vertex. The general solution combines them with four complex
/// constants as `a = a0+ c0 + a0- c1 + j (a1+ c2 + a1- c3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionBasis {
    pub a0_plus: Complex64,
    pub a0_minus: Complex64,
    pub a1_plus: Complex64,
    pub a1_minus: Complex64,
}

impl SolutionBasis {
    pub fn combine(&self, c: [Complex64; 4]) -> Quaternion {
        let upper = self.a0_plus * c[0] + self.a0_minus * c[1];
        let lower = self.a1_plus * c[2] + self.a1_minus * c[3];
        Quaternion::from_complex(upper) + Quaternion::J * Quaternion::from_complex(lower)
    }
}
