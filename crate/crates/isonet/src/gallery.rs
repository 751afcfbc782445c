//! Explicit surface families: discrete surfaces of revolution, circular
//! cylinders and their bubbleton transforms (isothermic and cmc), homogeneous
//! tori and their closed Darboux transforms, and the continuum limits of the
//! resonance data.
//!
//! Every closed form here doubles as an oracle for the generic Riccati sweep
//! in [`crate::net::darboux_surface`]; the two routes agree pointwise and the
//! test suites assert it.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::circle::CircleSpec;
use crate::curve::RiccatiState;
use crate::error::{Error, Result};
use crate::net::{IsothermicNet, PolarisedDomain2D};
use crate::quat::{cross_ratio, Quaternion, TOL_ZERO};
use crate::report::{CheckReport, CmcReport};

/// `|1 - e^{2 pi i / M}|^2 = 4 sin^2(pi / M)`.
fn gap_sqr(subdivisions: u32) -> f64 {
    4.0 * (PI / subdivisions as f64).sin().powi(2)
}

/// A discrete circular cylinder `f = i n/N + j e^{2 pi i m/M}` over a
/// rho-fold cover in m, with rows `n_min ..= n_max` and a chosen resonance
/// mode k for its transforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderSpec {
    pub subdivisions: u32,
    pub profile_step: i32,
    pub cover: u32,
    pub mode: u32,
    pub n_min: i64,
    pub n_max: i64,
}

impl CylinderSpec {
    pub fn new(
        subdivisions: u32,
        profile_step: i32,
        cover: u32,
        mode: u32,
        n_min: i64,
        n_max: i64,
    ) -> Result<Self> {
        if subdivisions <= 2 {
            return Err(Error::InvalidParameter(
                "cylinder needs more than 2 subdivisions".into(),
            ));
        }
        if profile_step == 0 {
            return Err(Error::InvalidParameter(
                "profile step N must be nonzero".into(),
            ));
        }
        if cover == 0 || mode == 0 {
            return Err(Error::InvalidParameter(
                "cover and mode must be positive".into(),
            ));
        }
        if n_min >= n_max {
            return Err(Error::InvalidParameter(
                "row range must contain at least one edge".into(),
            ));
        }
        Ok(CylinderSpec {
            subdivisions,
            profile_step,
            cover,
            mode,
            n_min,
            n_max,
        })
    }

    /// Columns of the generated nets: one full period plus the closing vertex.
    pub fn column_count(&self) -> usize {
        self.period() + 1
    }

    pub fn row_count(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn period(&self) -> usize {
        (self.cover as usize) * (self.subdivisions as usize)
    }

    /// Grid row index of the paper coordinate n.
    pub fn row_of(&self, n: i64) -> usize {
        (n - self.n_min) as usize
    }

    /// The resonance value `nu = 1/4 (1 - cot^2(pi/M) tan^2(k pi / rho M))`.
    pub fn resonance_nu(&self) -> Result<f64> {
        cylinder_resonance(self.subdivisions, self.cover, self.mode)
    }

    /// Profile height `q_n = n / N`.
    pub fn height(&self, n: i64) -> f64 {
        n as f64 / self.profile_step as f64
    }

    /// `f_{m,n} = i q_n + j e^{2 pi i m / M}`.
    pub fn point(&self, m: i64, n: i64) -> Quaternion {
        let theta = 2.0 * PI * m as f64 / self.subdivisions as f64;
        Quaternion::I * self.height(n)
            + Quaternion::J * Quaternion::from_complex(Complex64::from_polar(1.0, theta))
    }

    /// The dual surface `f* = i q_n - j e^{2 pi i m / M}`, i.e. the Christoffel
    /// transform translated so that `|f* - f|^2 = 4` everywhere (the parallel
    /// cmc surface for H = 1/2).
    pub fn dual_point(&self, m: i64, n: i64) -> Quaternion {
        let theta = 2.0 * PI * m as f64 / self.subdivisions as f64;
        Quaternion::I * self.height(n)
            - Quaternion::J * Quaternion::from_complex(Complex64::from_polar(1.0, theta))
    }

    fn domain(&self) -> PolarisedDomain2D {
        let cols = self.column_count();
        let rows = self.row_count();
        let mu_m = vec![1.0 / gap_sqr(self.subdivisions); cols - 1];
        // 1/mu_n = -(q_n - q_{n+1})^2 = -1/N^2
        let mu_n = vec![-(self.profile_step as f64).powi(2); rows - 1];
        PolarisedDomain2D::new(cols, rows, mu_m, mu_n, Some(self.period()), None)
            .expect("validated spec yields a valid domain")
    }

    /// The base cylinder net.
    pub fn net(&self) -> IsothermicNet {
        IsothermicNet::from_fn(self.domain(), |m, n| {
            self.point(m as i64, n as i64 + self.n_min)
        })
    }

    /// The dual cylinder net (parallel cmc surface).
    pub fn dual_net(&self) -> IsothermicNet {
        IsothermicNet::from_fn(self.domain(), |m, n| {
            self.dual_point(m as i64, n as i64 + self.n_min)
        })
    }

    /// The circle spec of every m-curvature line (radius 1, alpha = 1).
    pub fn circle(&self) -> CircleSpec {
        CircleSpec::new(1.0, self.subdivisions, self.cover, 1.0)
            .expect("validated spec yields a valid circle")
    }
}

/// Initial-condition constant of the closed bubbleton forms: the transforms
/// use `c+ = j` and `c- = j c2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbletonParams {
    pub c2: Complex64,
}

/// A discrete surface of revolution `f = i q_n + j p_n e^{2 pi i m/M}` over a
/// `cover`-fold angular period, with the polarisation normalised to
/// `1/mu_m = |1 - e^{2 pi i/M}|^2`.
pub fn surface_of_revolution(
    p_profile: &[f64],
    q_profile: &[f64],
    subdivisions: u32,
    cover: u32,
) -> Result<IsothermicNet> {
    if subdivisions <= 2 || cover == 0 {
        return Err(Error::InvalidParameter(
            "need M > 2 and a positive cover".into(),
        ));
    }
    if p_profile.len() != q_profile.len() || p_profile.len() < 2 {
        return Err(Error::InvalidParameter(
            "profiles must have equal length at least 2".into(),
        ));
    }
    if p_profile.iter().any(|&p| p <= 0.0) {
        return Err(Error::InvalidParameter(
            "profile radii must be positive".into(),
        ));
    }
    let period = (cover as usize) * (subdivisions as usize);
    let cols = period + 1;
    let rows = p_profile.len();
    let mu_m = vec![1.0 / gap_sqr(subdivisions); cols - 1];
    let mut mu_n = Vec::with_capacity(rows - 1);
    for r in 0..rows - 1 {
        let dp = p_profile[r] - p_profile[r + 1];
        let dq = q_profile[r] - q_profile[r + 1];
        let denom = dp * dp + dq * dq;
        if denom == 0.0 {
            return Err(Error::DegenerateEdge { vertex: r });
        }
        mu_n.push(-p_profile[r] * p_profile[r + 1] / denom);
    }
    let domain = PolarisedDomain2D::new(cols, rows, mu_m, mu_n, Some(period), None)?;
    Ok(IsothermicNet::from_fn(domain, |m, n| {
        let theta = 2.0 * PI * m as f64 / subdivisions as f64;
        Quaternion::I * q_profile[n]
            + Quaternion::J * Quaternion::from_complex(Complex64::from_polar(p_profile[n], theta))
    }))
}

/// Resonance value of the circular cylinder's curvature circles:
/// `nu = 1/4 (1 - cot^2(pi/M) tan^2(k pi / rho M))`.
pub fn cylinder_resonance(subdivisions: u32, cover: u32, mode: u32) -> Result<f64> {
    CircleSpec::new(1.0, subdivisions, cover, 1.0)?.resonance_nu(mode)
}

/// Mode phase data shared by the bubbleton closed forms:
/// `A_m = e^{i k pi m / rho M} + e^{-i k pi m / rho M} c2` and
/// `B_m = e^{i k pi m / rho M} S+ + e^{-i k pi m / rho M} S- c2`.
fn bubbleton_ab(spec: &CylinderSpec, c2: Complex64, m: i64) -> (Complex64, Complex64) {
    let period = spec.period() as f64;
    let rho = spec.cover as f64;
    let k = spec.mode as f64;
    let s_plus = ((rho + k) * PI / period).sin();
    let s_minus = ((rho - k) * PI / period).sin();
    let phase = Complex64::from_polar(1.0, k * PI * m as f64 / period);
    let a = phase + c2 / phase;
    let b = s_plus * phase + s_minus * c2 / phase;
    (a, b)
}

/// The closed-form bubbleton `f_hat = f + (T0 + j T1) / C` at one vertex.
///
/// Requires a negative spectral parameter (the resonance value for the given
/// mode), which holds exactly when `mode > cover` for large enough M.
pub fn bubbleton_closed_form(
    spec: &CylinderSpec,
    params: &BubbletonParams,
    m: i64,
    n: i64,
) -> Result<Quaternion> {
    let nu = spec.resonance_nu()?;
    if nu >= 0.0 {
        return Err(Error::NegativeNuRequired { nu });
    }
    let sigma = (-nu).sqrt();
    let (a, b) = bubbleton_ab(spec, params.c2, m);
    let a2 = a.norm_sqr();
    let b2 = b.norm_sqr();
    let big_n = spec.profile_step as f64;
    // normalise the two n-th powers by the larger one; every term below is
    // homogeneous of degree 2n in them, so the ratio (T0 + j T1)/C is unchanged
    let t_raw = (big_n - sigma).powi(n as i32);
    let u_raw = (big_n + sigma).powi(n as i32);
    let w = t_raw.abs().max(u_raw.abs());
    let t = t_raw / w;
    let u = u_raw / w;
    let period = spec.period() as f64;
    let cos_diff =
        (2.0 * PI / spec.subdivisions as f64).cos() - (2.0 * spec.mode as f64 * PI / period).cos();
    let c = 2.0 * (t + u) * (t + u) * b2 + (t - u) * (t - u) * a2 * cos_diff;
    let t0 = Complex64::new(0.0, 1.0 / sigma) * (t * t - u * u) * (2.0 * b2 + a2 * cos_diff);
    let angular = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / spec.subdivisions as f64);
    let t1 = -16.0
        * angular
        * t
        * u
        * (PI / spec.subdivisions as f64).sin()
        * (spec.mode as f64 * PI / period).cos()
        * a
        * b.conj();
    let scale = t0.norm().max(t1.norm()).max(1.0);
    if c.abs() <= TOL_ZERO * scale {
        return Err(Error::TransformBlowUpAt {
            m: m.rem_euclid(spec.period() as i64) as usize,
            n: (n - spec.n_min).max(0) as usize,
        });
    }
    Ok(spec.point(m, n) + Quaternion::from_complex_pair(t0 / c, t1 / c))
}

/// Closed-form Riccati state of the bubbleton solution at one vertex;
/// feeding the `(0, n_min)` state into the generic grid sweep reproduces
/// [`bubbleton_net`] exactly.
pub fn bubbleton_state(
    spec: &CylinderSpec,
    params: &BubbletonParams,
    m: i64,
    n: i64,
) -> Result<RiccatiState> {
    let nu = spec.resonance_nu()?;
    if nu >= 0.0 {
        return Err(Error::NegativeNuRequired { nu });
    }
    let sigma = (-nu).sqrt();
    let (a, b) = bubbleton_ab(spec, params.c2, m);
    let period = spec.period() as f64;
    let sin_m = (PI / spec.subdivisions as f64).sin();
    let cos_k = (spec.mode as f64 * PI / period).cos();
    let kappa = 1.0 / (2.0 * sigma * sin_m * cos_k);
    // gamma^+- = 1/2 P^m (j A_m +- i kappa B_m), P = e^{-i pi/M} cos(pi/M) sec(k pi/rho M)
    let p = Complex64::from_polar(1.0, -PI * m as f64 / spec.subdivisions as f64)
        * ((PI / spec.subdivisions as f64).cos() / cos_k);
    let p_m = p.powi(m as i32);
    let j_a = Quaternion::J * Quaternion::from_complex(p_m.conj() * a);
    let i_b = Quaternion::I * Quaternion::from_complex(p_m * b) * kappa;
    // P^m j = j conj(P^m): pull the prefactor through the j before combining
    let gamma_plus = (j_a + i_b) * 0.5;
    let gamma_minus = (j_a - i_b) * 0.5;
    let u_plus = (1.0 + sigma / spec.profile_step as f64).powi(n as i32);
    let u_minus = (1.0 - sigma / spec.profile_step as f64).powi(n as i32);
    let a_state = gamma_plus * u_plus + gamma_minus * u_minus;
    let b_state = Quaternion::I * (gamma_plus * u_plus - gamma_minus * u_minus) * sigma;
    RiccatiState::new(a_state, b_state)
}

/// The closed-form bubbleton net over the spec's full grid.
pub fn bubbleton_net(spec: &CylinderSpec, params: &BubbletonParams) -> Result<IsothermicNet> {
    let domain_net = spec.net();
    let mut points = Vec::with_capacity(spec.column_count() * spec.row_count());
    for n in 0..spec.row_count() {
        for m in 0..spec.column_count() {
            points.push(bubbleton_closed_form(
                spec,
                params,
                m as i64,
                n as i64 + spec.n_min,
            )?);
        }
    }
    IsothermicNet::new(domain_net.domain().clone(), points)
}

/// Whether an initial point satisfying the cmc distance condition exists:
/// `nu > 1/4` or `nu < 0`.
pub fn cmc_spectral_window(nu: f64) -> bool {
    !(0.0..=0.25).contains(&nu)
}

/// Both sign branches of the cmc initial constant
/// `c2 = +- sqrt(cos(2 pi/M) - cos(2 k pi/rho M)) / (sqrt 2 sin((rho-k) pi/rho M))`.
pub fn cmc_initial_c2(subdivisions: u32, cover: u32, mode: u32) -> Result<(f64, f64)> {
    if mode == cover {
        return Err(Error::InvalidParameter(
            "mode k = cover rho makes the cmc initial condition degenerate".into(),
        ));
    }
    let period = (cover as f64) * (subdivisions as f64);
    let radicand = (2.0 * PI / subdivisions as f64).cos() - (2.0 * mode as f64 * PI / period).cos();
    if radicand < 0.0 {
        return Err(Error::ImaginaryC2 { radicand });
    }
    let denom = 2.0_f64.sqrt() * ((cover as f64 - mode as f64) * PI / period).sin();
    let value = radicand.sqrt() / denom;
    Ok((value, -value))
}

/// The three cmc identities of a Darboux pair `(net, net_hat)` with parallel
/// surface `net_star`, mean curvature `h` and spectral parameter `nu`:
/// `|f* - f|^2 = 1/H^2` at every vertex, the Darboux cross-ratio of
/// `(f, f*)` at `H^2` on every edge, and
/// `|f_hat - f*|^2 = (1/H^2)(1 - H^2/nu)` at every vertex.
pub fn cmc_verify(
    net: &IsothermicNet,
    net_star: &IsothermicNet,
    net_hat: &IsothermicNet,
    h: f64,
    nu: f64,
    tol: f64,
) -> Result<CmcReport> {
    let (mc, nc) = (net.domain().m_count(), net.domain().n_count());
    let h2 = h * h;
    let mut parallel = Vec::with_capacity(mc * nc);
    let mut distance = Vec::with_capacity(mc * nc);
    for n in 0..nc {
        for m in 0..mc {
            let d_star = (net_star.point(m, n) - net.point(m, n)).norm_sqr();
            parallel.push(((m, n), (d_star - 1.0 / h2).abs()));
            let d_hat = (net_hat.point(m, n) - net_star.point(m, n)).norm_sqr();
            distance.push(((m, n), (d_hat - (1.0 - h2 / nu) / h2).abs()));
        }
    }
    let mut darboux = Vec::new();
    for n in 0..nc {
        for m in 0..mc - 1 {
            let cr = cross_ratio(
                net.point(m, n),
                net.point(m + 1, n),
                net_star.point(m + 1, n),
                net_star.point(m, n),
            )?;
            let target = Quaternion::real(h2 / net.domain().mu_m(m));
            darboux.push(((m, n), (cr - target).norm()));
        }
    }
    for n in 0..nc - 1 {
        for m in 0..mc {
            let cr = cross_ratio(
                net.point(m, n),
                net.point(m, n + 1),
                net_star.point(m, n + 1),
                net_star.point(m, n),
            )?;
            let target = Quaternion::real(h2 / net.domain().mu_n(n));
            darboux.push(((m, n), (cr - target).norm()));
        }
    }
    Ok(CmcReport {
        parallel_distance: CheckReport::from_residuals("cmc-parallel-distance", tol, parallel),
        parallel_darboux: CheckReport::from_residuals("cmc-parallel-darboux", tol, darboux),
        cmc_distance: CheckReport::from_residuals("cmc-transform-distance", tol, distance),
    })
}

/// A homogeneous torus `f = q e^{2 pi i n/N} + j p e^{2 pi i m/M}` in the unit
/// 3-sphere, covered `cover1`-fold in m and `cover2`-fold in n, with resonance
/// modes chosen for both curvature-circle families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusSpec {
    pub m_subdiv: u32,
    pub n_subdiv: u32,
    pub cover1: u32,
    pub cover2: u32,
    pub mode1: u32,
    pub mode2: u32,
    pub p: f64,
    pub q: f64,
}

impl TorusSpec {
    /// Builds the spec whose radii make the two families' resonance values
    /// coincide; returns it together with the common spectral parameter.
    pub fn matched(
        mode1: u32,
        cover1: u32,
        mode2: u32,
        cover2: u32,
        m_subdiv: u32,
        n_subdiv: u32,
    ) -> Result<(TorusSpec, f64)> {
        let (p, q, nu) = torus_pq(mode1, cover1, mode2, cover2, m_subdiv, n_subdiv)?;
        Ok((
            TorusSpec {
                m_subdiv,
                n_subdiv,
                cover1,
                cover2,
                mode1,
                mode2,
                p,
                q,
            },
            nu,
        ))
    }

    pub fn period_m(&self) -> usize {
        (self.cover1 as usize) * (self.m_subdiv as usize)
    }

    pub fn period_n(&self) -> usize {
        (self.cover2 as usize) * (self.n_subdiv as usize)
    }

    /// `f_{m,n} = q e^{2 pi i n/N} + j p e^{2 pi i m/M}`.
    pub fn point(&self, m: i64, n: i64) -> Quaternion {
        let ring = Complex64::from_polar(self.q, 2.0 * PI * n as f64 / self.n_subdiv as f64);
        let circle = Complex64::from_polar(self.p, 2.0 * PI * m as f64 / self.m_subdiv as f64);
        Quaternion::from_complex_pair(ring, circle)
    }

    fn domain(&self) -> PolarisedDomain2D {
        let cols = self.period_m() + 1;
        let rows = self.period_n() + 1;
        let mu_m = vec![1.0 / (self.p * self.p * gap_sqr(self.m_subdiv)); cols - 1];
        let mu_n = vec![-1.0 / (self.q * self.q * gap_sqr(self.n_subdiv)); rows - 1];
        PolarisedDomain2D::new(
            cols,
            rows,
            mu_m,
            mu_n,
            Some(self.period_m()),
            Some(self.period_n()),
        )
        .expect("validated spec yields a valid domain")
    }

    /// The base torus net over one full period plus closing row and column.
    pub fn net(&self) -> IsothermicNet {
        IsothermicNet::from_fn(self.domain(), |m, n| self.point(m as i64, n as i64))
    }
}

/// Radii and common spectral parameter matching the two resonance modes of a
/// homogeneous torus: returns `(p, q, nu)` with `p^2 + q^2 = 1`.
pub fn torus_pq(
    mode1: u32,
    cover1: u32,
    mode2: u32,
    cover2: u32,
    m_subdiv: u32,
    n_subdiv: u32,
) -> Result<(f64, f64, f64)> {
    for (subdiv, cover, mode) in [(m_subdiv, cover1, mode1), (n_subdiv, cover2, mode2)] {
        if subdiv <= 2 || cover == 0 || mode == 0 {
            return Err(Error::InvalidParameter(
                "torus needs M, N > 2 and positive modes".into(),
            ));
        }
        let period = (cover as u64) * (subdiv as u64);
        if (2 * mode as u64) % (2 * period) == period {
            return Err(Error::TanPole {
                k: mode,
                rho: cover,
                m_subdiv: subdiv,
            });
        }
    }
    let x = ((PI / m_subdiv as f64).tan().recip()
        * (mode1 as f64 * PI / (cover1 as f64 * m_subdiv as f64)).tan())
    .powi(2);
    let y = ((PI / n_subdiv as f64).tan().recip()
        * (mode2 as f64 * PI / (cover2 as f64 * n_subdiv as f64)).tan())
    .powi(2);
    let p_sqr = (1.0 - x) / (y - x);
    let q_sqr = (1.0 - y) / (x - y);
    if !(0.0..1.0).contains(&p_sqr) || !(0.0..1.0).contains(&q_sqr) || p_sqr == 0.0 || q_sqr == 0.0
    {
        return Err(Error::NoMatchingTorus { p_sqr, q_sqr });
    }
    Ok((p_sqr.sqrt(), q_sqr.sqrt(), (y - x) / 4.0))
}

/// The closed Darboux transform of the homogeneous torus at one vertex, for
/// arbitrary quaternionic constants `c_plus`, `c_minus`.
///
/// Only unit phase factors enter: the real growth factors of the underlying
/// Riccati solution cancel in `a b^{-1}` and are never materialised.
pub fn torus_closed_form(
    spec: &TorusSpec,
    c_plus: Quaternion,
    c_minus: Quaternion,
    m: i64,
    n: i64,
) -> Result<Quaternion> {
    let theta1 = spec.mode1 as f64 * PI / spec.period_m() as f64;
    let phi1 = PI / spec.m_subdiv as f64;
    let theta2 = spec.mode2 as f64 * PI / spec.period_n() as f64;
    let phi2 = PI / spec.n_subdiv as f64;
    let s1_plus = ((spec.cover1 as f64 + spec.mode1 as f64) * PI / spec.period_m() as f64).sin();
    let s1_minus = ((spec.cover1 as f64 - spec.mode1 as f64) * PI / spec.period_m() as f64).sin();
    let s2_plus = ((spec.cover2 as f64 + spec.mode2 as f64) * PI / spec.period_n() as f64).sin();
    let s2_minus = ((spec.cover2 as f64 - spec.mode2 as f64) * PI / spec.period_n() as f64).sin();

    let e1 = Quaternion::from_complex(Complex64::from_polar(1.0, theta1 * m as f64));
    let e1c = Quaternion::from_complex(Complex64::from_polar(1.0, -theta1 * m as f64));
    let alpha = e1c * c_plus + e1 * c_minus;
    let beta = Quaternion::J * (e1c * c_plus * s1_plus + e1 * c_minus * s1_minus);
    let coef = (spec.q / spec.p) * phi2.sin() * theta2.cos() / (phi1.sin() * theta1.cos());
    let gamma_plus = alpha * s2_minus + beta * coef;
    let gamma_minus = alpha * s2_plus + beta * coef;

    let e2 = Quaternion::from_complex(Complex64::from_polar(1.0, theta2 * n as f64));
    let e2c = Quaternion::from_complex(Complex64::from_polar(1.0, -theta2 * n as f64));
    let x = e2 * gamma_plus - e2c * gamma_minus;
    let y = e2 * gamma_plus * s2_plus - e2c * gamma_minus * s2_minus;
    let scale = x.norm().max(y.norm()).max(1.0);
    let y_inv = y
        .inverse_scaled(scale)
        .map_err(|_| Error::TransformBlowUpAt {
            m: m.rem_euclid(spec.period_m() as i64) as usize,
            n: n.rem_euclid(spec.period_n() as i64) as usize,
        })?;

    let left = Quaternion::from_complex(
        Complex64::from_polar(1.0, -phi1 * m as f64) * Complex64::from_polar(1.0, phi2 * n as f64),
    );
    let right = Quaternion::from_complex(
        Complex64::from_polar(1.0, phi1 * m as f64) * Complex64::from_polar(1.0, phi2 * n as f64),
    );
    let prefactor = -2.0 * spec.q * phi2.sin() * theta2.cos();
    Ok(spec.point(m, n) + prefactor * (left * x * y_inv * right))
}

/// The closed-form torus transform over the spec's full grid.
pub fn torus_transform_net(
    spec: &TorusSpec,
    c_plus: Quaternion,
    c_minus: Quaternion,
) -> Result<IsothermicNet> {
    let domain = spec.net().domain().clone();
    let mut points = Vec::with_capacity(domain.m_count() * domain.n_count());
    for n in 0..domain.n_count() {
        for m in 0..domain.m_count() {
            points.push(torus_closed_form(
                spec, c_plus, c_minus, m as i64, n as i64,
            )?);
        }
    }
    IsothermicNet::new(domain, points)
}

/// Closed-form Riccati state of the torus solution on the base circle row
/// (n = 0), for the generic-sweep oracle tests.
pub fn torus_initial_state(
    spec: &TorusSpec,
    c_plus: Quaternion,
    c_minus: Quaternion,
) -> Result<RiccatiState> {
    let circle = CircleSpec::new(spec.p, spec.m_subdiv, spec.cover1, spec.p * spec.p)?;
    circle.initial_state(spec.mode1, c_plus, c_minus)
}

/// All values `r2` in the scan range `[-10, 10]` for which the transform with
/// `c+ = c_real + j r2`, `c- = 1` starts on the unit 3-sphere. Sign changes of
/// `|f_hat(0,0)|^2 - 1` on a 0.05 grid are bisected to 1e-12.
pub fn s3_initial_solver(spec: &TorusSpec, c_real: f64) -> Result<Vec<f64>> {
    let g = |r2: f64| -> Option<f64> {
        let c_plus = Quaternion::new(c_real, 0.0, r2, 0.0);
        torus_closed_form(spec, c_plus, Quaternion::ONE, 0, 0)
            .ok()
            .map(|f| f.norm_sqr() - 1.0)
    };
    let mut roots = Vec::new();
    let steps = 400;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=steps {
        let r2 = -10.0 + 0.05 * i as f64;
        let Some(value) = g(r2) else {
            prev = None;
            continue;
        };
        if value == 0.0 {
            roots.push(r2);
            prev = Some((r2, value));
            continue;
        }
        if let Some((r_prev, v_prev)) = prev {
            if v_prev * value < 0.0 {
                let (mut lo, mut hi) = (r_prev, r2);
                let mut v_lo = v_prev;
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if hi - lo < 1e-12 {
                        break;
                    }
                    match g(mid) {
                        Some(v_mid) => {
                            if v_lo * v_mid <= 0.0 {
                                hi = mid;
                            } else {
                                lo = mid;
                                v_lo = v_mid;
                            }
                        }
                        None => break,
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
        }
        prev = Some((r2, value));
    }
    if roots.is_empty() {
        return Err(Error::NoRoot);
    }
    Ok(roots)
}

/// Continuum limit of the circle resonance values: `(rho^2 - k^2) / (4 rho^2)`.
pub fn resonance_limit(mode: u32, cover: u32) -> f64 {
    let k = mode as f64;
    let rho = cover as f64;
    (rho * rho - k * k) / (4.0 * rho * rho)
}

/// Continuum limit of the matched torus spectral parameter:
/// `(k2^2/rho2^2 - k1^2/rho1^2) / 4`.
pub fn torus_nu_limit(mode1: u32, cover1: u32, mode2: u32, cover2: u32) -> f64 {
    let k1 = mode1 as f64 / cover1 as f64;
    let k2 = mode2 as f64 / cover2 as f64;
    (k2 * k2 - k1 * k1) / 4.0
}

/// Continuum limits of the torus radius combinations:
/// `1 - 4 nu p^2 -> k1^2/rho1^2` and `1 + 4 nu q^2 -> k2^2/rho2^2`.
pub fn torus_radii_limits(mode1: u32, cover1: u32, mode2: u32, cover2: u32) -> (f64, f64) {
    let k1 = mode1 as f64 / cover1 as f64;
    let k2 = mode2 as f64 / cover2 as f64;
    (k1 * k1, k2 * k2)
}

/// Discrete resonance values and their distance to the continuum limit at a
/// doubling sequence of subdivision counts.
pub fn resonance_convergence(
    mode: u32,
    cover: u32,
    alpha: f64,
    subdivision_counts: &[u32],
) -> Result<Vec<(u32, f64, f64)>> {
    let limit = resonance_limit(mode, cover) / alpha;
    let mut rows = Vec::with_capacity(subdivision_counts.len());
    for &m in subdivision_counts {
        let nu = CircleSpec::new(1.0, m, cover, alpha)?.resonance_nu(mode)?;
        rows.push((m, nu, (nu - limit).abs()));
    }
    Ok(rows)
}

/// One row of the torus convergence table: discrete values and their distance
/// to the continuum limits at subdivision count `size` (M = N).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusConvergenceRow {
    pub size: u32,
    pub nu: f64,
    pub nu_error: f64,
    pub radius1_value: f64,
    pub radius1_error: f64,
    pub radius2_value: f64,
    pub radius2_error: f64,
}

/// Convergence of the torus spectral parameter and radius combinations to
/// their continuum limits for M = N in `sizes`.
pub fn torus_convergence(
    mode1: u32,
    cover1: u32,
    mode2: u32,
    cover2: u32,
    sizes: &[u32],
) -> Result<Vec<TorusConvergenceRow>> {
    let nu_limit = torus_nu_limit(mode1, cover1, mode2, cover2);
    let (r1_limit, r2_limit) = torus_radii_limits(mode1, cover1, mode2, cover2);
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let (p, q, nu) = torus_pq(mode1, cover1, mode2, cover2, size, size)?;
        let r1 = 1.0 - 4.0 * nu * p * p;
        let r2 = 1.0 + 4.0 * nu * q * q;
        rows.push(TorusConvergenceRow {
            size,
            nu,
            nu_error: (nu - nu_limit).abs(),
            radius1_value: r1,
            radius1_error: (r1 - r1_limit).abs(),
            radius2_value: r2,
            radius2_error: (r2 - r2_limit).abs(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::CircleSpec;
    use crate::net::{
        darboux_surface, s3_check, verify_isothermic, verify_periodicity, GridDirection,
    };

    fn fig3_small() -> (CylinderSpec, BubbletonParams) {
        // scaled-down bubbleton: same mode structure as the M = 40 example
        let spec = CylinderSpec::new(12, 5, 1, 2, -4, 4).unwrap();
        let params = BubbletonParams {
            c2: Complex64::new(-10.0, 0.0),
        };
        (spec, params)
    }

    #[test]
    fn revolution_specialises_to_cylinder() {
        let n_rows = 7usize;
        let q: Vec<f64> = (0..n_rows).map(|r| r as f64 / 5.0).collect();
        let p = vec![1.0; n_rows];
        let net = surface_of_revolution(&p, &q, 9, 1).unwrap();
        let spec = CylinderSpec::new(9, 5, 1, 2, 0, (n_rows - 1) as i64).unwrap();
        let cyl = spec.net();
        for n in 0..n_rows {
            for m in 0..net.domain().m_count() {
                assert!((net.point(m, n) - cyl.point(m, n)).norm() < 1e-14);
            }
        }
        assert!((net.domain().mu_n(0) - cyl.domain().mu_n(0)).abs() < 1e-10);
    }

    #[test]
    fn revolution_is_isothermic_and_matches_printed_cross_ratio() {
        let p = vec![1.0, 1.3, 1.7, 1.6, 1.1];
        let q = vec![0.0, 0.2, 0.55, 0.9, 1.3];
        let net = surface_of_revolution(&p, &q, 11, 1).unwrap();
        let report = verify_isothermic(&net, 1e-12);
        assert!(report.pass, "residual {}", report.max_residual);

        // printed formula for the quad cross-ratio at (0, 0)
        let cr = cross_ratio(
            net.point(0, 0),
            net.point(1, 0),
            net.point(1, 1),
            net.point(0, 1),
        )
        .unwrap();
        let dp = p[0] - p[1];
        let dq = q[0] - q[1];
        let expected = -p[0] * p[1] / (dp * dp + dq * dq) * gap_sqr(11);
        assert!((cr - Quaternion::real(expected)).norm() < 1e-13);
    }

    #[test]
    fn cylinder_resonance_values() {
        assert!(cylinder_resonance(17, 3, 3).unwrap().abs() < 1e-15);
        assert!((cylinder_resonance(3, 2, 5).unwrap() - 2.0 / 9.0).abs() < 1e-13);
        assert!(cylinder_resonance(40, 1, 2).unwrap() < 0.0);
    }

    #[test]
    fn bubbleton_requires_negative_nu() {
        // k < rho gives 0 < nu < 1/4: the closed form must refuse
        let spec = CylinderSpec::new(12, 5, 2, 1, 0, 3).unwrap();
        let params = BubbletonParams {
            c2: Complex64::new(1.5, 0.0),
        };
        assert!(matches!(
            bubbleton_closed_form(&spec, &params, 0, 0),
            Err(Error::NegativeNuRequired { .. })
        ));
    }

    #[test]
    fn bubbleton_row0_is_the_circle_transform() {
        let (spec, params) = fig3_small();
        for m in 0..=spec.period() as i64 {
            let surface = bubbleton_closed_form(&spec, &params, m, 0).unwrap();
            let circle = spec
                .circle()
                .closed_darboux(spec.mode, params.c2, m)
                .unwrap();
            assert!((surface - circle).norm() < 1e-13);
        }
    }

    #[test]
    fn bubbleton_matches_generic_sweep() {
        let (spec, params) = fig3_small();
        let nu = spec.resonance_nu().unwrap();
        let closed = bubbleton_net(&spec, &params).unwrap();
        let init = bubbleton_state(&spec, &params, 0, spec.n_min).unwrap();
        let swept = darboux_surface(&spec.net(), nu, &init, (0, 0), 1e-9).unwrap();
        let mut worst = 0.0_f64;
        for n in 0..spec.row_count() {
            for m in 0..spec.column_count() {
                worst = worst.max((closed.point(m, n) - swept.point(m, n)).norm());
            }
        }
        assert!(worst < 1e-9, "max deviation {worst}");

        // and from the circle initial state at the base row of the paper grid
        let init0 = spec
            .circle()
            .initial_state(
                spec.mode,
                Quaternion::J,
                Quaternion::J * Quaternion::from_complex(params.c2),
            )
            .unwrap();
        let swept0 = darboux_surface(&spec.net(), nu, &init0, (0, spec.row_of(0)), 1e-9).unwrap();
        let mut worst0 = 0.0_f64;
        for n in 0..spec.row_count() {
            for m in 0..spec.column_count() {
                worst0 = worst0.max((closed.point(m, n) - swept0.point(m, n)).norm());
            }
        }
        assert!(worst0 < 1e-9, "max deviation from base-row init {worst0}");
    }

    #[test]
    fn bubbleton_closes_in_m() {
        let (spec, params) = fig3_small();
        let net = bubbleton_net(&spec, &params).unwrap();
        let report =
            verify_periodicity(&net, GridDirection::M, spec.period(), spec.row_of(0), 1e-9)
                .unwrap();
        assert!(
            report.pass(),
            "full {} line {}",
            report.full_grid.max_residual,
            report.single_line.max_residual
        );
    }

    #[test]
    fn cmc_window() {
        assert!(!cmc_spectral_window(2.0 / 9.0));
        assert!(cmc_spectral_window(-0.75));
        assert!(cmc_spectral_window(0.3));
        // resonance values for 0 < k < rho stay inside (0, 1/4): never cmc
        for rho in 2u32..=5 {
            for k in 1..rho {
                for m in (10u32..=100).step_by(10) {
                    let nu = cylinder_resonance(m, rho, k).unwrap();
                    assert!(nu > 0.0 && nu < 0.25, "nu = {nu} at k={k} rho={rho} M={m}");
                    assert!(!cmc_spectral_window(nu));
                }
            }
        }
    }

    #[test]
    fn cmc_initial_c2_branches() {
        let (plus, minus) = cmc_initial_c2(40, 1, 2).unwrap();
        assert!(plus.is_finite() && minus.is_finite());
        assert!(plus * minus < 0.0, "branches have opposite signs");
        assert!(matches!(
            cmc_initial_c2(40, 1, 1),
            Err(Error::InvalidParameter(_))
        ));
        // k < rho: radicand negative
        assert!(matches!(
            cmc_initial_c2(40, 3, 2),
            Err(Error::ImaginaryC2 { .. })
        ));
    }

    #[test]
    fn cmc_identities_hold_for_both_branches() {
        let spec = CylinderSpec::new(12, 5, 1, 2, -3, 3).unwrap();
        let nu = spec.resonance_nu().unwrap();
        let (c2a, c2b) = cmc_initial_c2(spec.subdivisions, spec.cover, spec.mode).unwrap();
        for c2 in [c2a, c2b] {
            let params = BubbletonParams {
                c2: Complex64::new(c2, 0.0),
            };
            let hat = bubbleton_net(&spec, &params).unwrap();
            let report = cmc_verify(&spec.net(), &spec.dual_net(), &hat, 0.5, nu, 1e-9).unwrap();
            assert!(
                report.parallel_distance.pass,
                "|f*-f|^2 residual {}",
                report.parallel_distance.max_residual
            );
            assert!(
                report.parallel_darboux.pass,
                "darboux residual {}",
                report.parallel_darboux.max_residual
            );
            assert!(
                report.cmc_distance.pass,
                "cmc distance residual {}",
                report.cmc_distance.max_residual
            );
        }
        // a generic constant does not satisfy the distance identity anywhere
        let generic = BubbletonParams {
            c2: Complex64::new(-10.0, 0.0),
        };
        let hat = bubbleton_net(&spec, &generic).unwrap();
        let report = cmc_verify(&spec.net(), &spec.dual_net(), &hat, 0.5, nu, 1e-9).unwrap();
        assert!(report.cmc_distance.max_residual > 0.5);
    }

    #[test]
    fn homogeneous_torus_lies_on_sphere_and_is_arc_length_polarised() {
        let (spec, _nu) = TorusSpec::matched(4, 3, 2, 3, 12, 12).unwrap();
        assert!((spec.p * spec.p + spec.q * spec.q - 1.0).abs() < 1e-12);
        let net = spec.net();
        let s3 = s3_check(&net, 1e-12);
        assert!(s3.grid.pass, "sphere residual {}", s3.grid.max_residual);
        // |df_m|^2 = 1/mu_m and |df_n|^2 = -1/mu_n
        let dfm = (net.point(0, 0) - net.point(1, 0)).norm_sqr();
        assert!((dfm - 1.0 / net.domain().mu_m(0)).abs() < 1e-13);
        let dfn = (net.point(0, 0) - net.point(0, 1)).norm_sqr();
        assert!((dfn + 1.0 / net.domain().mu_n(0)).abs() < 1e-13);
        // printed cross-ratio value
        let cr = cross_ratio(
            net.point(0, 0),
            net.point(1, 0),
            net.point(1, 1),
            net.point(0, 1),
        )
        .unwrap();
        let expected = -spec.p * spec.p * gap_sqr(12) / (spec.q * spec.q * gap_sqr(12));
        assert!((cr - Quaternion::real(expected)).norm() < 1e-12);
        let report = verify_isothermic(&net, 1e-11);
        assert!(report.pass, "residual {}", report.max_residual);
    }

    #[test]
    fn torus_pq_cross_checks() {
        let (p, q, nu) = torus_pq(4, 3, 2, 3, 40, 40).unwrap();
        assert!((p * p + q * q - 1.0).abs() < 1e-14);
        // nu agrees with both families' resonance values
        let nu1 = CircleSpec::new(p, 40, 3, p * p)
            .unwrap()
            .resonance_nu(4)
            .unwrap();
        let nu2 = CircleSpec::new(q, 40, 3, -q * q)
            .unwrap()
            .resonance_nu(2)
            .unwrap();
        assert!((nu - nu1).abs() < 1e-12 && (nu - nu2).abs() < 1e-12);
        // mismatched modes can fail to embed
        assert!(matches!(
            torus_pq(2, 1, 3, 1, 40, 40),
            Err(Error::NoMatchingTorus { .. })
        ));
    }

    #[test]
    fn torus_closed_form_matches_generic_sweep() {
        let (spec, nu) = TorusSpec::matched(4, 3, 2, 3, 12, 12).unwrap();
        let c_plus = Quaternion::new(0.45, 0.0, 0.3, 0.0);
        let c_minus = Quaternion::ONE;
        let closed = torus_transform_net(&spec, c_plus, c_minus).unwrap();
        let init = torus_initial_state(&spec, c_plus, c_minus).unwrap();
        let swept = darboux_surface(&spec.net(), nu, &init, (0, 0), 1e-9).unwrap();
        let mut worst = 0.0_f64;
        for n in 0..closed.domain().n_count() {
            for m in 0..closed.domain().m_count() {
                worst = worst.max((closed.point(m, n) - swept.point(m, n)).norm());
            }
        }
        assert!(worst < 1e-9, "max deviation {worst}");
    }

    #[test]
    fn torus_closed_form_row0_reduces_to_circle_data() {
        let (spec, _nu) = TorusSpec::matched(4, 3, 2, 3, 12, 12).unwrap();
        let c_plus = Quaternion::new(0.45, 0.0, 0.3, 0.0);
        let c_minus = Quaternion::ONE;
        // along n = 0 the offset a b^{-1} is the generic circle expression
        // 2 p sin(pi/M) cos(k1 pi/rho1 M) e^{-i pi m/M} alpha_m beta_m^{-1} e^{i pi m/M}
        let theta1 = spec.mode1 as f64 * PI / spec.period_m() as f64;
        let s1p = ((spec.cover1 as f64 + spec.mode1 as f64) * PI / spec.period_m() as f64).sin();
        let s1m = ((spec.cover1 as f64 - spec.mode1 as f64) * PI / spec.period_m() as f64).sin();
        for m in 0..=spec.period_m() as i64 {
            let e1 = Quaternion::from_complex(Complex64::from_polar(1.0, theta1 * m as f64));
            let e1c = Quaternion::from_complex(Complex64::from_polar(1.0, -theta1 * m as f64));
            let alpha = e1c * c_plus + e1 * c_minus;
            let beta = Quaternion::J * (e1c * c_plus * s1p + e1 * c_minus * s1m);
            let phase = Quaternion::from_complex(Complex64::from_polar(
                1.0,
                PI * m as f64 / spec.m_subdiv as f64,
            ));
            let offset = 2.0
                * spec.p
                * (PI / spec.m_subdiv as f64).sin()
                * theta1.cos()
                * (phase.conj() * alpha * beta.inverse().unwrap() * phase);
            let expected = spec.point(m, 0) + offset;
            let value = torus_closed_form(&spec, c_plus, c_minus, m, 0).unwrap();
            assert!((value - expected).norm() < 1e-11);
        }
    }

    #[test]
    fn s3_solver_finds_roots_small_spec() {
        let (spec, _nu) = TorusSpec::matched(4, 3, 2, 3, 12, 12).unwrap();
        let roots = s3_initial_solver(&spec, 0.45).unwrap();
        assert!(!roots.is_empty());
        for r2 in &roots {
            let c_plus = Quaternion::new(0.45, 0.0, *r2, 0.0);
            let f0 = torus_closed_form(&spec, c_plus, Quaternion::ONE, 0, 0).unwrap();
            assert!((f0.norm_sqr() - 1.0).abs() < 1e-10, "root {r2}");
        }
        // a transform started on the sphere stays on it
        let c_plus = Quaternion::new(0.45, 0.0, roots[roots.len() - 1], 0.0);
        let net = torus_transform_net(&spec, c_plus, Quaternion::ONE).unwrap();
        let s3 = s3_check(&net, 1e-9);
        assert!(s3.grid.pass, "sphere residual {}", s3.grid.max_residual);
    }

    #[test]
    fn s3_solver_reports_missing_roots() {
        let (spec, _nu) = TorusSpec::matched(4, 3, 2, 3, 12, 12).unwrap();
        assert!(matches!(s3_initial_solver(&spec, 2.0), Err(Error::NoRoot)));
    }

    #[test]
    fn continuum_limits() {
        assert!((resonance_limit(2, 1) + 0.75).abs() < 1e-15);
        assert!((torus_nu_limit(4, 3, 2, 3) + 1.0 / 3.0).abs() < 1e-15);
        let rows = resonance_convergence(2, 1, 1.0, &[40, 80, 160, 320]).unwrap();
        for pair in rows.windows(2) {
            assert!(pair[1].2 < pair[0].2, "error not decreasing: {pair:?}");
        }
        assert!(rows.last().unwrap().2 < 1e-3);

        let torus_rows = torus_convergence(4, 3, 2, 3, &[40, 80, 160, 320]).unwrap();
        let last = torus_rows.last().unwrap();
        assert!(last.nu_error < 1e-3);
        assert!(last.radius1_error < 1e-3 && last.radius2_error < 1e-3);
        let (r1, r2) = torus_radii_limits(4, 3, 2, 3);
        assert!((r1 - 16.0 / 9.0).abs() < 1e-15 && (r2 - 4.0 / 9.0).abs() < 1e-15);
    }
}
