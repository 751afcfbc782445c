//! Discrete polarised curves and their Darboux transforms.
//!
//! A polarised curve is a quaternion-valued map on a 1D lattice whose
//! unoriented edges carry a nonzero real polarisation `1/mu`. The difference
//! convention is fixed once and used everywhere:
//!
//! ```text
//! dX_{ij} := X_i - X_j
//! ```
//!
//! so the edge form of the dual curve is `df*_{ij} = (1/mu_{ij}) df_{ij}^{-1}`
//! and the linearised Riccati recurrence on an oriented edge (i -> j) reads
//!
//! ```text
//! a_j = a_i + df_{ij} b_i,      b_j = b_i + nu df*_{ij} a_i,
//! ```
//!
//! with the evolving Darboux transform `f_hat = f + a b^{-1}`.

use crate::error::{Error, Result};
use crate::quat::{cross_ratio, Quaternion, TOL_ZERO};
use crate::report::CheckReport;

/// Relative tolerance for the stored-duplicate check of periodic curves.
const TOL_CLOSE: f64 = 1e-9;

/// A 1D lattice with a nonzero real polarisation value per unoriented edge.
///
/// Open domains have `mu.len() + 1` vertices. Periodic domains identify vertex
/// `i` with `i + period`; their `mu` holds one full period of edge values and
/// lookups wrap around.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarisedDomain1D {
    mu: Vec<f64>,
    period: Option<usize>,
}

impl PolarisedDomain1D {
    pub fn open(mu: Vec<f64>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::InvalidParameter(
                "an open polarised domain needs at least one edge".into(),
            ));
        }
        Self::check_mu(&mu)?;
        Ok(PolarisedDomain1D { mu, period: None })
    }

    pub fn periodic(mu: Vec<f64>) -> Result<Self> {
        if mu.len() < 2 {
            return Err(Error::InvalidParameter(
                "a periodic polarised domain needs period at least 2".into(),
            ));
        }
        Self::check_mu(&mu)?;
        let period = Some(mu.len());
        Ok(PolarisedDomain1D { mu, period })
    }

    /// Constant polarisation over `edges` edges.
    pub fn constant(mu: f64, edges: usize, periodic: bool) -> Result<Self> {
        let values = vec![mu; edges];
        if periodic {
            Self::periodic(values)
        } else {
            Self::open(values)
        }
    }

    fn check_mu(mu: &[f64]) -> Result<()> {
        for (edge, &value) in mu.iter().enumerate() {
            if value == 0.0 || !value.is_finite() {
                return Err(Error::VanishingMu { edge });
            }
        }
        Ok(())
    }

    /// Number of stored vertices: `period` when periodic, `edges + 1` otherwise.
    pub fn vertex_count(&self) -> usize {
        match self.period {
            Some(p) => p,
            None => self.mu.len() + 1,
        }
    }

    /// Number of distinct edges (one period when periodic).
    pub fn edge_count(&self) -> usize {
        self.mu.len()
    }

    pub fn is_periodic(&self) -> bool {
        self.period.is_some()
    }

    pub fn period(&self) -> Option<usize> {
        self.period
    }

    /// Polarisation of the unoriented edge `(e, e+1)`, wrapping on periodic domains.
    pub fn mu(&self, edge: usize) -> f64 {
        match self.period {
            Some(p) => self.mu[edge % p],
            None => self.mu[edge],
        }
    }

    pub fn mu_values(&self) -> &[f64] {
        &self.mu
    }
}

/// A quaternion-valued map on a polarised 1D domain with invertible edge
/// differences.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurve {
    domain: PolarisedDomain1D,
    points: Vec<Quaternion>,
}

impl DiscreteCurve {
    /// Validates counts, edge nondegeneracy and (for periodic domains) that any
    /// stored points beyond one period agree with their wrapped counterparts.
    pub fn new(domain: PolarisedDomain1D, points: Vec<Quaternion>) -> Result<Self> {
        match domain.period() {
            None => {
                if points.len() != domain.vertex_count() {
                    return Err(Error::DomainMismatch(format!(
                        "open domain expects {} points, got {}",
                        domain.vertex_count(),
                        points.len()
                    )));
                }
            }
            Some(p) => {
                if points.len() < p {
                    return Err(Error::DomainMismatch(format!(
                        "periodic domain expects at least {} points, got {}",
                        p,
                        points.len()
                    )));
                }
            }
        }
        let curve = DiscreteCurve { domain, points };
        let scale = curve.scale();
        if let Some(p) = curve.domain.period() {
            for i in p..curve.points.len() {
                let deviation = (curve.points[i] - curve.points[i - p]).norm();
                if deviation > TOL_CLOSE * scale.max(1.0) {
                    return Err(Error::NotClosed {
                        vertex: i,
                        deviation,
                    });
                }
            }
        }
        for e in 0..curve.domain.edge_count() {
            if (curve.point(e) - curve.point(e + 1)).is_zero(scale) {
                return Err(Error::DegenerateEdge { vertex: e });
            }
        }
        Ok(curve)
    }

    pub fn domain(&self) -> &PolarisedDomain1D {
        &self.domain
    }

    pub fn points(&self) -> &[Quaternion] {
        &self.points
    }

    /// Point at vertex `i`; indices beyond the stored range wrap on periodic
    /// domains.
    pub fn point(&self, i: usize) -> Quaternion {
        if i < self.points.len() {
            self.points[i]
        } else if let Some(p) = self.domain.period() {
            self.points[i % p]
        } else {
            panic!(
                "vertex {i} out of range for open curve of {} points",
                self.points.len()
            )
        }
    }

    /// Edge difference `df_{e,e+1} = f_e - f_{e+1}`.
    pub fn diff(&self, e: usize) -> Quaternion {
        self.point(e) - self.point(e + 1)
    }

    /// Dual edge difference `df*_{e,e+1} = (1/mu) df^{-1}`.
    pub fn dual_diff(&self, e: usize) -> Result<Quaternion> {
        let df = self.diff(e);
        Ok(df.inverse_scaled(self.scale())? / self.domain.mu(e))
    }

    /// Largest point magnitude; the reference scale for degeneracy tests.
    pub fn scale(&self) -> f64 {
        self.points.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }
}

/// The pair `(a, b)` propagated by the linearised Riccati recurrence; its
/// projective value `f + a b^{-1}` is the evolving Darboux transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiState {
    pub a: Quaternion,
    pub b: Quaternion,
}

impl RiccatiState {
    pub fn new(a: Quaternion, b: Quaternion) -> Result<Self> {
        let scale = a.norm().max(b.norm());
        if scale <= TOL_ZERO {
            return Err(Error::DegenerateState);
        }
        Ok(RiccatiState { a, b })
    }

    /// The transform offset `a b^{-1}`; fails when the state passes through
    /// infinity.
    pub fn offset(&self) -> Result<Quaternion> {
        let scale = self.a.norm().max(self.b.norm());
        let b_inv = self
            .b
            .inverse_scaled(scale)
            .map_err(|_| Error::DegenerateState)?;
        Ok(self.a * b_inv)
    }
}

/// A 2-by-2 quaternionic matrix acting on column pairs by left multiplication,
/// with the usual right-scalar freedom of the quaternionic projective line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QMatrix2 {
    pub m00: Quaternion,
    pub m01: Quaternion,
    pub m10: Quaternion,
    pub m11: Quaternion,
}

impl QMatrix2 {
    pub const IDENTITY: QMatrix2 = QMatrix2 {
        m00: Quaternion::ONE,
        m01: Quaternion::ZERO,
        m10: Quaternion::ZERO,
        m11: Quaternion::ONE,
    };

    pub fn new(m00: Quaternion, m01: Quaternion, m10: Quaternion, m11: Quaternion) -> Self {
        QMatrix2 { m00, m01, m10, m11 }
    }

    pub fn apply(&self, v: (Quaternion, Quaternion)) -> (Quaternion, Quaternion) {
        (
            self.m00 * v.0 + self.m01 * v.1,
            self.m10 * v.0 + self.m11 * v.1,
        )
    }

    pub fn compose(&self, rhs: &QMatrix2) -> QMatrix2 {
        QMatrix2 {
            m00: self.m00 * rhs.m00 + self.m01 * rhs.m10,
            m01: self.m00 * rhs.m01 + self.m01 * rhs.m11,
            m10: self.m10 * rhs.m00 + self.m11 * rhs.m10,
            m11: self.m10 * rhs.m01 + self.m11 * rhs.m11,
        }
    }

    pub fn scale(&self, s: f64) -> QMatrix2 {
        QMatrix2 {
            m00: self.m00 * s,
            m01: self.m01 * s,
            m10: self.m10 * s,
            m11: self.m11 * s,
        }
    }

    /// Max entry norm.
    pub fn max_norm(&self) -> f64 {
        self.m00
            .norm()
            .max(self.m01.norm())
            .max(self.m10.norm())
            .max(self.m11.norm())
    }

    /// `max |(self/s - Id)_{uv}|` — distance to the real scalar multiple `s * Id`.
    pub fn identity_residual(&self, s: f64) -> f64 {
        if s == 0.0 {
            return f64::INFINITY;
        }
        let scaled = self.scale(1.0 / s);
        (scaled.m00 - Quaternion::ONE)
            .norm()
            .max(scaled.m01.norm())
            .max(scaled.m10.norm())
            .max((scaled.m11 - Quaternion::ONE).norm())
    }
}

impl std::ops::Mul for QMatrix2 {
    type Output = QMatrix2;
    fn mul(self, rhs: QMatrix2) -> QMatrix2 {
        self.compose(&rhs)
    }
}

/// The dual curve, integrated from `f*_0 = 0` via `df*_{ij} = (1/mu) df^{-1}`.
///
/// Duality is defined only up to translations and homotheties; the base point
/// choice fixes the translation. A periodic input yields the dual over one
/// full period plus the closing vertex, on an open domain — the dual of a
/// closed curve need not close.
pub fn dual_curve(curve: &DiscreteCurve) -> Result<DiscreteCurve> {
    let edges = curve.domain().edge_count();
    let mut points = Vec::with_capacity(edges + 1);
    points.push(Quaternion::ZERO);
    for e in 0..edges {
        let step = curve.dual_diff(e)?;
        // df*_{e,e+1} = f*_e - f*_{e+1}
        let next = points[e] - step;
        points.push(next);
    }
    let mu: Vec<f64> = (0..edges).map(|e| curve.domain().mu(e)).collect();
    DiscreteCurve::new(PolarisedDomain1D::open(mu)?, points)
}

/// The connection `D(lambda)` on the oriented edge `(e, e+1)`, transporting
/// fibre `e` to fibre `e+1`:
/// `Id + [[0, df_{ij}], [lambda df*_{ij}, 0]]` with `i = e`, `j = e+1`.
pub fn connection_d(curve: &DiscreteCurve, lambda: f64, edge: usize) -> Result<QMatrix2> {
    let df = curve.diff(edge);
    let dfs = curve.dual_diff(edge)?;
    Ok(QMatrix2::new(
        Quaternion::ONE,
        df,
        dfs * lambda,
        Quaternion::ONE,
    ))
}

/// The gauged connection `r(lambda)` on the oriented edge `(e, e+1)`:
///
/// ```text
/// r(lambda)_{ji} = Id + lambda [[ f_j df*_{ij}, -f_j df*_{ij} f_i ],
///                               [ df*_{ij},     -df*_{ij} f_i    ]]
/// ```
///
/// Projectively this is `pi_i + ((mu - lambda)/mu) pi_j`: it fixes lifts of
/// `f_i` and scales lifts of `f_j`.
pub fn connection_r(curve: &DiscreteCurve, lambda: f64, edge: usize) -> Result<QMatrix2> {
    let f_i = curve.point(edge);
    let f_j = curve.point(edge + 1);
    let dfs = curve.dual_diff(edge)?;
    Ok(transport_r(f_i, f_j, dfs, lambda))
}

/// `r(lambda)` built directly from endpoint values and the dual edge form;
/// shared with the 2D machinery where the edge form is the closed one-form.
pub(crate) fn transport_r(
    f_i: Quaternion,
    f_j: Quaternion,
    dual_diff: Quaternion,
    lambda: f64,
) -> QMatrix2 {
    QMatrix2::new(
        Quaternion::ONE + lambda * (f_j * dual_diff),
        -lambda * (f_j * dual_diff * f_i),
        lambda * dual_diff,
        Quaternion::ONE - lambda * (dual_diff * f_i),
    )
}

/// One Riccati step along the oriented edge from vertex `from` to the adjacent
/// vertex `to`.
pub fn riccati_step(
    curve: &DiscreteCurve,
    nu: f64,
    from: usize,
    to: usize,
    state: &RiccatiState,
) -> Result<RiccatiState> {
    if !(to == from + 1 || from == to + 1) {
        return Err(Error::InvalidParameter(format!(
            "riccati step needs adjacent vertices, got {from} -> {to}"
        )));
    }
    let edge = from.min(to);
    let df = curve.point(from) - curve.point(to);
    let dfs = df.inverse_scaled(curve.scale())? / curve.domain().mu(edge);
    Ok(step_state(df, dfs, nu, state))
}

pub(crate) fn step_state(
    df: Quaternion,
    dual_diff: Quaternion,
    nu: f64,
    state: &RiccatiState,
) -> RiccatiState {
    RiccatiState {
        a: state.a + df * state.b,
        b: state.b + nu * (dual_diff * state.a),
    }
}

/// Riccati states at vertices `0..=steps`, propagated from `init` at vertex 0.
pub fn riccati_sweep(
    curve: &DiscreteCurve,
    nu: f64,
    init: &RiccatiState,
    steps: usize,
) -> Result<Vec<RiccatiState>> {
    let mut states = Vec::with_capacity(steps + 1);
    states.push(*init);
    for e in 0..steps {
        let next = riccati_step(curve, nu, e, e + 1, states.last().unwrap())?;
        states.push(next);
    }
    Ok(states)
}

/// The Darboux transform of `curve` with spectral parameter `nu` and initial
/// Riccati state `init` at vertex 0.
///
/// The result lives on an open domain covering every stored vertex (one full
/// period plus the closing vertex for periodic inputs, so closure can be
/// measured rather than assumed). Fails with [`Error::TransformBlowUp`] at the
/// first vertex where `b` degenerates — the transform passes through infinity.
pub fn darboux_transform_curve(
    curve: &DiscreteCurve,
    nu: f64,
    init: &RiccatiState,
) -> Result<DiscreteCurve> {
    let out_vertices = match curve.domain().period() {
        Some(p) => p + 1,
        None => curve.domain().vertex_count(),
    };
    let states = riccati_sweep(curve, nu, init, out_vertices - 1)?;
    let mut points = Vec::with_capacity(out_vertices);
    for (i, state) in states.iter().enumerate() {
        let offset = state
            .offset()
            .map_err(|_| Error::TransformBlowUp { vertex: i })?;
        points.push(curve.point(i) + offset);
    }
    let mu: Vec<f64> = (0..out_vertices - 1)
        .map(|e| curve.domain().mu(e))
        .collect();
    DiscreteCurve::new(PolarisedDomain1D::open(mu)?, points)
}

/// Per-edge residual of the Darboux pair condition
/// `cr(f_i, f_j, f_hat_j, f_hat_i) = nu / mu_{ij}`.
pub fn verify_darboux_pair(
    curve: &DiscreteCurve,
    transform: &DiscreteCurve,
    nu: f64,
    tol: f64,
) -> Result<CheckReport> {
    let edges = transform.domain().edge_count();
    if !curve.domain().is_periodic() && edges > curve.domain().edge_count() {
        return Err(Error::DomainMismatch(format!(
            "transform spans {} edges but the open base curve has only {}",
            edges,
            curve.domain().edge_count()
        )));
    }
    let mut residuals = Vec::with_capacity(edges);
    for e in 0..edges {
        let cr = cross_ratio(
            curve.point(e),
            curve.point(e + 1),
            transform.point(e + 1),
            transform.point(e),
        )?;
        let target = Quaternion::real(nu / curve.domain().mu(e));
        residuals.push(((e, 0), (cr - target).norm()));
    }
    Ok(CheckReport::from_residuals(
        "darboux-cross-ratio",
        tol,
        residuals,
    ))
}

/// The monodromy matrix: the ordered product of `r(nu)` over one period,
/// with the factor on edge `(0, 1)` acting first, so the product maps the
/// fibre over vertex 0 to itself.
pub fn monodromy_matrix(curve: &DiscreteCurve, nu: f64) -> Result<QMatrix2> {
    let period = curve.domain().period().ok_or(Error::NotPeriodic)?;
    let mut acc = QMatrix2::IDENTITY;
    for e in 0..period {
        acc = connection_r(curve, nu, e)?.compose(&acc);
    }
    Ok(acc)
}

/// Whether `mat` is a nonzero real scalar multiple of the identity, i.e.
/// projectively trivial over the quaternions.
///
/// The scalar is read off as the real part of the top-left entry; the residual
/// compared against `tol` is `max |mat/s - Id|`.
pub fn is_resonance(mat: &QMatrix2, tol: f64) -> Result<bool> {
    let max_norm = mat.max_norm();
    if max_norm <= TOL_ZERO {
        return Err(Error::Degenerate { max_norm });
    }
    let s = mat.m00.w;
    if s.abs() <= TOL_ZERO * max_norm {
        return Ok(false);
    }
    Ok(mat.identity_residual(s) < tol)
}

/// Affine fixed points `z` (so the invariant line is `(z, 1)^t H`) of the
/// projective action of `mat`, found by damped Newton iteration on
/// `F(z) = m00 z + m01 - z (m10 z + m11)` from a fixed grid of seeds.
///
/// A projectively generic matrix has exactly two; a projectively trivial one
/// fixes every line, and the seeds themselves come back (callers should test
/// with [`is_resonance`] first). Lines through infinity (`b = 0`) are not
/// searched for.
pub fn invariant_lines(mat: &QMatrix2) -> Vec<Quaternion> {
    let residual = |z: Quaternion| mat.m00 * z + mat.m01 - z * (mat.m10 * z + mat.m11);
    let scale = mat.max_norm().max(1.0);
    let seeds = [
        Quaternion::new(0.5, 0.0, 0.0, 0.0),
        Quaternion::new(-0.5, 0.3, 0.0, 0.0),
        Quaternion::new(0.0, 0.0, 1.0, 0.0),
        Quaternion::new(0.0, 0.0, -1.0, 0.3),
        Quaternion::new(1.3, -0.7, 0.4, 0.9),
        Quaternion::new(-2.0, 1.5, -0.6, 0.1),
        Quaternion::new(0.1, 0.8, 2.0, -1.2),
        Quaternion::new(3.0, 0.0, -2.0, 0.5),
    ];
    let mut roots: Vec<Quaternion> = Vec::new();
    for seed in seeds {
        let mut z = seed;
        let mut converged = false;
        for _ in 0..80 {
            let f = residual(z);
            if f.norm() <= 1e-12 * scale * z.norm_sqr().max(1.0) {
                converged = true;
                break;
            }
            // Jacobian of F at z as a real-linear map on H:
            // dF(d) = m00 d - d (m10 z + m11) - z m10 d
            let right = mat.m10 * z + mat.m11;
            let basis = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];
            let mut jac = [[0.0_f64; 4]; 4];
            for (col, e) in basis.iter().enumerate() {
                let col_q = mat.m00 * *e - *e * right - z * mat.m10 * *e;
                jac[0][col] = col_q.w;
                jac[1][col] = col_q.x;
                jac[2][col] = col_q.y;
                jac[3][col] = col_q.z;
            }
            let rhs = [-f.w, -f.x, -f.y, -f.z];
            let Some(delta) = solve4(jac, rhs) else { break };
            let step = Quaternion::new(delta[0], delta[1], delta[2], delta[3]);
            if !step.norm().is_finite() {
                break;
            }
            z = z + step;
        }
        if converged {
            let fresh = roots
                .iter()
                .all(|r| (*r - z).norm() > 1e-6 * (1.0 + z.norm()));
            if fresh {
                roots.push(z);
            }
        }
    }
    roots
}

/// Gaussian elimination with partial pivoting for the 4x4 Newton systems.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let pivot =
            (col..4).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let lead = a[col];
        for row in col + 1..4 {
            let factor = a[row][col] / lead[col];
            for (entry, l) in a[row].iter_mut().zip(lead.iter()).skip(col) {
                *entry -= factor * l;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let mut sum = b[row];
        for k in row + 1..4 {
            sum -= a[row][k] * x[k];
        }
        x[row] = sum / a[row][row];
    }
    Some(x)
}
