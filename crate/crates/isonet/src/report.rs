//! Verification reports.
//!
//! Every verification operation reduces to a named maximum residual compared
//! against a tolerance, together with the worst-offending vertex or quad.
//! Reports never round: the residuals they carry are exactly the values the
//! checks computed.

use serde::Serialize;

/// Outcome of one verification check.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Grid index (m, n) of the worst offender; curves use (vertex, 0).
    pub worst: Option<(usize, usize)>,
}

impl CheckReport {
    /// Folds `(index, residual)` pairs into a report. An empty iterator passes
    /// with residual zero.
    pub fn from_residuals<I>(name: &str, tolerance: f64, residuals: I) -> CheckReport
    where
        I: IntoIterator<Item = ((usize, usize), f64)>,
    {
        let mut max_residual = 0.0_f64;
        let mut worst = None;
        for (idx, r) in residuals {
            if r > max_residual || worst.is_none() {
                max_residual = r;
                worst = Some(idx);
            }
        }
        CheckReport {
            name: name.to_owned(),
            max_residual,
            tolerance,
            pass: max_residual < tolerance,
            worst,
        }
    }
}

/// Closure residuals of a transformed net in one lattice direction, over the
/// full grid and over the single row (or column) through the base vertex.
///
/// Closure of one curvature line is equivalent to closure of the whole family,
/// so the two residuals pass or fail together; reporting both makes that
/// reduction observable.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodicityReport {
    pub full_grid: CheckReport,
    pub single_line: CheckReport,
}

impl PeriodicityReport {
    pub fn pass(&self) -> bool {
        self.full_grid.pass && self.single_line.pass
    }
}

/// Deviation of a net from the unit 3-sphere, over the grid and at the base
/// vertex alone. Membership propagates from a single vertex, which is why the
/// base value is singled out.
#[derive(Debug, Clone, Serialize)]
pub struct S3Report {
    pub grid: CheckReport,
    pub base_vertex_residual: f64,
}

/// Cross-ratio residuals of both families around a Bianchi quadrilateral of
/// curves: `(f1, f12)` against `nu2` and `(f2, f12)` against `nu1`.
#[derive(Debug, Clone, Serialize)]
pub struct PermutabilityReport {
    pub family1: CheckReport,
    pub family2: CheckReport,
}

impl PermutabilityReport {
    pub fn pass(&self) -> bool {
        self.family1.pass && self.family2.pass
    }
}

/// The three identities characterising a cmc Darboux pair: constant parallel
/// distance of (f, f*), the Darboux cross-ratio of (f, f*) at nu = H^2, and
/// the constant distance of (f_hat, f*).
#[derive(Debug, Clone, Serialize)]
pub struct CmcReport {
    pub parallel_distance: CheckReport,
    pub parallel_darboux: CheckReport,
    pub cmc_distance: CheckReport,
}

impl CmcReport {
    pub fn pass(&self) -> bool {
        self.parallel_distance.pass && self.parallel_darboux.pass && self.cmc_distance.pass
    }
}
