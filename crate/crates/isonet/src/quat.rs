//! Quaternion algebra and the quaternionic cross-ratio.
//!
//! All geometry in this crate lives in the quaternions H = span{1, i, j, k},
//! with points, connection coefficients and matrix entries all represented by
//! the same [`Quaternion`] value type. Complex numbers embed as `re + im*i`;
//! the embedding does not commute with `j`: for complex `z` one has
//! `j z = conj(z) j`, which is what makes the closed-form solutions in the
//! rest of the crate work.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative threshold below which a quaternion counts as zero for inversion.
///
/// Near-zero differences are hard errors, not warnings: degenerate quads and
/// collapsed edges have no meaning in this geometry.
pub const TOL_ZERO: f64 = 1e-13;

/// A quaternion `w + x*i + y*j + z*k`.
///
/// Plain value record; no unit-norm constraint is imposed — normalisation is
/// the caller's job.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Quaternion::new(w, 0.0, 0.0, 0.0)
    }

    /// Embeds a complex number as `re + im*i`.
    pub fn from_complex(c: Complex64) -> Self {
        Quaternion::new(c.re, c.im, 0.0, 0.0)
    }

    /// Builds `c0 + j*c1` from a pair of complex numbers.
    ///
    /// Every quaternion decomposes uniquely this way; see [`Self::complex_pair`].
    pub fn from_complex_pair(c0: Complex64, c1: Complex64) -> Self {
        // j*(u + v*i) = u*j - v*k
        Quaternion::new(c0.re, c0.im, c1.re, -c1.im)
    }

    /// Splits `self` as `c0 + j*c1`.
    pub fn complex_pair(&self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.w, self.x),
            Complex64::new(self.y, -self.z),
        )
    }

    pub fn conj(&self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest absolute component; cheap size estimate used in tolerances.
    pub fn max_abs(&self) -> f64 {
        self.w
            .abs()
            .max(self.x.abs())
            .max(self.y.abs())
            .max(self.z.abs())
    }

    /// Multiplicative inverse `conj(q) / |q|^2`.
    ///
    /// Fails with [`Error::ZeroDivisor`] when `|q| <= TOL_ZERO * max(scale, 1)`.
    /// `scale` is the magnitude of the surrounding data; pass `1.0` when no
    /// context is available.
    pub fn inverse_scaled(&self, scale: f64) -> Result<Quaternion> {
        let n2 = self.norm_sqr();
        let floor = TOL_ZERO * scale.max(1.0);
        if n2 <= floor * floor {
            return Err(Error::ZeroDivisor { norm_sqr: n2 });
        }
        Ok(self.conj() / n2)
    }

    pub fn inverse(&self) -> Result<Quaternion> {
        self.inverse_scaled(1.0)
    }

    pub fn is_zero(&self, scale: f64) -> bool {
        self.norm() <= TOL_ZERO * scale.max(1.0)
    }

    /// Distance to the nearest real multiple of 1, i.e. the imaginary magnitude.
    pub fn imag_norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w + rhs.w,
            self.x + rhs.x,
            self.y + rhs.y,
            self.z + rhs.z,
        )
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w - rhs.w,
            self.x - rhs.x,
            self.y - rhs.y,
            self.z - rhs.z,
        )
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    /// Hamilton product; noncommutative, `i*j = k`, `j*k = i`, `k*i = j`.
    fn mul(self, r: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w * r.w - self.x * r.x - self.y * r.y - self.z * r.z,
            self.w * r.x + self.x * r.w + self.y * r.z - self.z * r.y,
            self.w * r.y - self.x * r.z + self.y * r.w + self.z * r.x,
            self.w * r.z + self.x * r.y - self.y * r.x + self.z * r.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, s: f64) -> Quaternion {
        Quaternion::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

/// The quaternionic cross-ratio
/// `(f_i - f_j)(f_j - f_k)^{-1}(f_k - f_l)(f_l - f_i)^{-1}`,
/// in exactly this factor order (the value depends on it).
///
/// Fails with [`Error::ZeroDivisor`] when an inverted difference degenerates
/// relative to the scale of the four input points.
pub fn cross_ratio(
    f_i: Quaternion,
    f_j: Quaternion,
    f_k: Quaternion,
    f_l: Quaternion,
) -> Result<Quaternion> {
    let scale = f_i.norm().max(f_j.norm()).max(f_k.norm()).max(f_l.norm());
    let jk = (f_j - f_k).inverse_scaled(scale)?;
    let li = (f_l - f_i).inverse_scaled(scale)?;
    Ok((f_i - f_j) * jk * (f_k - f_l) * li)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_quat_eq(p: Quaternion, q: Quaternion, eps: f64) {
        assert_abs_diff_eq!(p.w, q.w, epsilon = eps);
        assert_abs_diff_eq!(p.x, q.x, epsilon = eps);
        assert_abs_diff_eq!(p.y, q.y, epsilon = eps);
        assert_abs_diff_eq!(p.z, q.z, epsilon = eps);
    }

    fn random_quat(rng: &mut impl Rng) -> Quaternion {
        Quaternion::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        )
    }

    #[test]
    fn identity_and_defining_relations() {
        let q = Quaternion::new(0.3, -1.2, 0.7, 2.0);
        assert_eq!(Quaternion::ONE * q, q);
        assert_eq!(q * Quaternion::ONE, q);
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::K, Quaternion::I);
        assert_eq!(Quaternion::K * Quaternion::I, Quaternion::J);
        assert_eq!(Quaternion::J * Quaternion::I, -Quaternion::K);
    }

    #[test]
    fn j_conjugates_complex_phases() {
        // j e^{i theta} = e^{-i theta} j, checked componentwise at theta = 0.7:
        // j (c + s i) = c j + s (j i) = c j - s k.
        let theta: f64 = 0.7;
        let (s, c) = theta.sin_cos();
        let lhs = Quaternion::J * Quaternion::from_complex(Complex64::new(c, s));
        let rhs = Quaternion::from_complex(Complex64::new(c, -s)) * Quaternion::J;
        let expected = Quaternion::new(0.0, 0.0, c, -s);
        assert_quat_eq(lhs, expected, 1e-15);
        assert_quat_eq(rhs, expected, 1e-15);
    }

    #[test]
    fn complex_pair_round_trip() {
        let q = Quaternion::new(0.4, -0.9, 1.3, -0.2);
        let (c0, c1) = q.complex_pair();
        assert_quat_eq(Quaternion::from_complex_pair(c0, c1), q, 0.0);
        // j * z = conj(z) * j for the embedded copy of C
        let z = Complex64::new(-0.3, 1.1);
        assert_quat_eq(
            Quaternion::J * Quaternion::from_complex(z),
            Quaternion::from_complex(z.conj()) * Quaternion::J,
            1e-15,
        );
    }

    #[test]
    fn inverse_examples() {
        assert_quat_eq(Quaternion::ONE.inverse().unwrap(), Quaternion::ONE, 0.0);
        assert_quat_eq(Quaternion::J.inverse().unwrap(), -Quaternion::J, 0.0);
        // inv(1 + i + j + k) = (1 - i - j - k)/4, by conj/|.|^2 by hand
        let q = Quaternion::new(1.0, 1.0, 1.0, 1.0);
        assert_quat_eq(
            q.inverse().unwrap(),
            Quaternion::new(0.25, -0.25, -0.25, -0.25),
            1e-16,
        );
        assert!(matches!(
            Quaternion::ZERO.inverse(),
            Err(Error::ZeroDivisor { .. })
        ));
    }

    #[test]
    fn inverse_is_two_sided() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let q = random_quat(&mut rng);
            if q.norm() < 1e-3 {
                continue;
            }
            let inv = q.inverse().unwrap();
            assert_quat_eq(q * inv, Quaternion::ONE, 1e-13);
            assert_quat_eq(inv * q, Quaternion::ONE, 1e-13);
        }
    }

    #[test]
    fn associativity_and_norm_multiplicativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let p = random_quat(&mut rng);
            let q = random_quat(&mut rng);
            let r = random_quat(&mut rng);
            let lhs = (p * q) * r;
            let rhs = p * (q * r);
            let scale = lhs.norm().max(1.0);
            assert!((lhs - rhs).norm() <= 1e-12 * scale);

            let n_prod = (p * q).norm_sqr();
            let n_fact = p.norm_sqr() * q.norm_sqr();
            assert!((n_prod - n_fact).abs() <= 1e-12 * n_fact.max(1.0));
        }
    }

    #[test]
    fn cross_ratio_collinear_points() {
        // (0, 1, 2, 3) on the real axis: (-1)(-1)^{-1}(-1)(3)^{-1} = -1/3
        let cr = cross_ratio(
            Quaternion::real(0.0),
            Quaternion::real(1.0),
            Quaternion::real(2.0),
            Quaternion::real(3.0),
        )
        .unwrap();
        assert_quat_eq(cr, Quaternion::real(-1.0 / 3.0), 1e-15);
    }

    #[test]
    fn cross_ratio_unit_square_is_harmonic() {
        let cr = cross_ratio(
            Quaternion::ZERO,
            Quaternion::ONE,
            Quaternion::ONE + Quaternion::I,
            Quaternion::I,
        )
        .unwrap();
        assert_quat_eq(cr, Quaternion::real(-1.0), 1e-15);
    }

    #[test]
    fn cross_ratio_mobius_invariance() {
        // invariant under simultaneous translation and nonzero real scaling
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let pts: Vec<Quaternion> = (0..4).map(|_| random_quat(&mut rng)).collect();
            let base = match cross_ratio(pts[0], pts[1], pts[2], pts[3]) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let c = random_quat(&mut rng);
            let s = rng.gen_range(0.25..4.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let translated = cross_ratio(pts[0] + c, pts[1] + c, pts[2] + c, pts[3] + c).unwrap();
            let scaled = cross_ratio(pts[0] * s, pts[1] * s, pts[2] * s, pts[3] * s).unwrap();
            assert!((translated - base).norm() <= 1e-10 * base.norm().max(1.0));
            assert!((scaled - base).norm() <= 1e-10 * base.norm().max(1.0));
        }
    }

    #[test]
    fn cross_ratio_rejects_degenerate_quads() {
        let p = Quaternion::new(0.1, 0.2, 0.3, 0.4);
        assert!(matches!(
            cross_ratio(Quaternion::ZERO, p, p, Quaternion::ONE),
            Err(Error::ZeroDivisor { .. })
        ));
    }
}
