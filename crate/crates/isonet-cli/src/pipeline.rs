//! Job execution: build the requested family, verify it, export meshes.

use std::path::PathBuf;

use crate::config::{CmcBranch, Family, JobConfig, Projection};
use crate::error::{CliError, Result};
use crate::mesh::{write_atomic, QuadMesh};
use isonet::curve::RiccatiState;
use isonet::gallery::{
    bubbleton_net, cmc_initial_c2, cmc_spectral_window, cmc_verify, s3_initial_solver,
    surface_of_revolution, torus_transform_net, BubbletonParams, CylinderSpec, TorusSpec,
};
use isonet::net::{
    darboux_surface, s3_check, verify_isothermic, verify_periodicity, GridDirection, IsothermicNet,
};
use isonet::quat::{cross_ratio, Quaternion};
use isonet::report::CheckReport;

/// Everything a job produced: verification reports, written files, and
/// human-readable notes (solved constants and the like).
#[derive(Debug, Default)]
pub struct JobOutput {
    pub reports: Vec<CheckReport>,
    pub written: Vec<PathBuf>,
    pub notes: Vec<String>,
}

impl JobOutput {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

fn renamed(mut report: CheckReport, name: &str) -> CheckReport {
    report.name = name.to_owned();
    report
}

/// Residual of the Darboux pair condition `cr = nu/mu` over every m- and
/// n-edge of the pair.
fn darboux_law_report(
    base: &IsothermicNet,
    transform: &IsothermicNet,
    nu: f64,
    tol: f64,
) -> Result<CheckReport> {
    let (mc, nc) = (base.domain().m_count(), base.domain().n_count());
    let mut residuals = Vec::new();
    for n in 0..nc {
        for m in 0..mc - 1 {
            let cr = cross_ratio(
                base.point(m, n),
                base.point(m + 1, n),
                transform.point(m + 1, n),
                transform.point(m, n),
            )
            .map_err(CliError::Core)?;
            let target = Quaternion::real(nu / base.domain().mu_m(m));
            residuals.push(((m, n), (cr - target).norm()));
        }
    }
    for n in 0..nc - 1 {
        for m in 0..mc {
            let cr = cross_ratio(
                base.point(m, n),
                base.point(m, n + 1),
                transform.point(m, n + 1),
                transform.point(m, n),
            )
            .map_err(CliError::Core)?;
            let target = Quaternion::real(nu / base.domain().mu_n(n));
            residuals.push(((m, n), (cr - target).norm()));
        }
    }
    Ok(CheckReport::from_residuals(
        "darboux-cross-ratio",
        tol,
        residuals,
    ))
}

fn export(
    output: &mut JobOutput,
    net: &IsothermicNet,
    path: &Option<PathBuf>,
    projection: Projection,
    ply: bool,
) -> Result<()> {
    let Some(path) = path else { return Ok(()) };
    let mesh = QuadMesh::from_net(net, projection)?;
    write_atomic(path, &mesh.to_obj())?;
    output.written.push(path.clone());
    if ply {
        let ply_path = path.with_extension("ply");
        write_atomic(&ply_path, &mesh.to_ply())?;
        output.written.push(ply_path);
    }
    Ok(())
}

/// Builds the configured family, runs its verification suite, and (when
/// `write_files` is set) exports the meshes and the JSON report.
pub fn run_job(config: &JobConfig, write_files: bool) -> Result<JobOutput> {
    let mut output = JobOutput::default();
    let tol = config.tolerance;

    match config.family {
        Family::Bubbleton | Family::CmcBubbleton => {
            let spec = CylinderSpec::new(
                config.subdivisions,
                config.profile_step,
                config.cover,
                config.mode,
                config.n_min,
                config.n_max,
            )?;
            let nu = spec.resonance_nu()?;
            let c2 = if config.family == Family::CmcBubbleton {
                // a numerically-zero resonance value (mode = cover) is outside
                // the window even when rounding puts it at -1e-17
                if !cmc_spectral_window(nu) || nu.abs() < 1e-12 {
                    return Err(CliError::CmcWindow { nu });
                }
                let (plus, minus) = cmc_initial_c2(config.subdivisions, config.cover, config.mode)?;
                let picked = match config.cmc_branch {
                    CmcBranch::Plus => plus,
                    CmcBranch::Minus => minus,
                };
                output
                    .notes
                    .push(format!("cmc initial constant c2 = {picked}"));
                num_complex::Complex64::new(picked, 0.0)
            } else {
                config.c2
            };
            output.notes.push(format!("spectral parameter nu = {nu}"));
            let base = spec.net();
            let transform = bubbleton_net(&spec, &BubbletonParams { c2 })?;

            output
                .reports
                .push(renamed(verify_isothermic(&base, tol), "base-isothermic"));
            output.reports.push(renamed(
                verify_isothermic(&transform, tol),
                "transform-isothermic",
            ));
            let periodicity = verify_periodicity(
                &transform,
                GridDirection::M,
                spec.period(),
                spec.row_of(0),
                tol,
            )?;
            output.reports.push(periodicity.single_line);
            output.reports.push(periodicity.full_grid);
            output
                .reports
                .push(darboux_law_report(&base, &transform, nu, tol)?);
            if config.family == Family::CmcBubbleton {
                let cmc = cmc_verify(&base, &spec.dual_net(), &transform, 0.5, nu, tol)?;
                output.reports.push(cmc.parallel_distance);
                output.reports.push(cmc.parallel_darboux);
                output.reports.push(cmc.cmc_distance);
            }
            if write_files {
                export(
                    &mut output,
                    &base,
                    &config.base_obj,
                    config.projection,
                    config.ply,
                )?;
                export(
                    &mut output,
                    &transform,
                    &config.transform_obj,
                    config.projection,
                    config.ply,
                )?;
            }
        }
        Family::Torus => {
            let (spec, nu) = TorusSpec::matched(
                config.mode1,
                config.cover1,
                config.mode2,
                config.cover2,
                config.m_subdiv,
                config.n_subdiv,
            )?;
            output.notes.push(format!(
                "matched radii p = {}, q = {}, nu = {nu}",
                spec.p, spec.q
            ));
            let (c_plus, c_minus) = match (config.c_plus, config.c_minus) {
                (Some(cp), Some(cm)) => (cp, cm),
                _ => {
                    let roots = s3_initial_solver(&spec, config.c_real)?;
                    let r2 = *roots.get(config.root_index).ok_or_else(|| {
                        CliError::Config(format!(
                            "root_index {} out of range: solver found {} roots ({:?})",
                            config.root_index,
                            roots.len(),
                            roots
                        ))
                    })?;
                    output.notes.push(format!(
                        "sphere initial condition r2 = {r2} (roots: {roots:?})"
                    ));
                    (
                        Quaternion::new(config.c_real, 0.0, r2, 0.0),
                        Quaternion::ONE,
                    )
                }
            };
            let base = spec.net();
            let transform = torus_transform_net(&spec, c_plus, c_minus)?;
            output
                .reports
                .push(renamed(verify_isothermic(&base, tol), "base-isothermic"));
            output.reports.push(renamed(
                verify_isothermic(&transform, tol),
                "transform-isothermic",
            ));
            let around = verify_periodicity(&transform, GridDirection::M, spec.period_m(), 0, tol)?;
            output
                .reports
                .push(renamed(around.single_line, "periodicity-m-single-line"));
            output
                .reports
                .push(renamed(around.full_grid, "periodicity-m-full-grid"));
            let along = verify_periodicity(&transform, GridDirection::N, spec.period_n(), 0, tol)?;
            output
                .reports
                .push(renamed(along.single_line, "periodicity-n-single-line"));
            output
                .reports
                .push(renamed(along.full_grid, "periodicity-n-full-grid"));
            output
                .reports
                .push(darboux_law_report(&base, &transform, nu, tol)?);
            output
                .reports
                .push(renamed(s3_check(&base, tol).grid, "base-s3-membership"));
            output.reports.push(renamed(
                s3_check(&transform, tol).grid,
                "transform-s3-membership",
            ));
            if write_files {
                export(
                    &mut output,
                    &base,
                    &config.base_obj,
                    config.projection,
                    config.ply,
                )?;
                export(
                    &mut output,
                    &transform,
                    &config.transform_obj,
                    config.projection,
                    config.ply,
                )?;
            }
        }
        Family::Revolution => {
            let base = surface_of_revolution(
                &config.p_profile,
                &config.q_profile,
                config.subdivisions,
                config.cover,
            )?;
            output
                .reports
                .push(renamed(verify_isothermic(&base, tol), "base-isothermic"));
            let period = (config.cover as usize) * (config.subdivisions as usize);
            let closure = verify_periodicity(&base, GridDirection::M, period, 0, tol)?;
            output.reports.push(closure.full_grid);
            if write_files {
                export(
                    &mut output,
                    &base,
                    &config.base_obj,
                    config.projection,
                    config.ply,
                )?;
            }
        }
        Family::CustomDarboux => {
            let base = surface_of_revolution(
                &config.p_profile,
                &config.q_profile,
                config.subdivisions,
                config.cover,
            )?;
            let nu = config
                .nu
                .ok_or_else(|| CliError::Config("custom-darboux requires the 'nu' key".into()))?;
            let init = RiccatiState::new(config.init_a, config.init_b)?;
            let transform = darboux_surface(&base, nu, &init, (config.base_m, config.base_n), tol)?;
            output
                .reports
                .push(renamed(verify_isothermic(&base, tol), "base-isothermic"));
            output.reports.push(renamed(
                verify_isothermic(&transform, tol),
                "transform-isothermic",
            ));
            output
                .reports
                .push(darboux_law_report(&base, &transform, nu, tol)?);
            if write_files {
                export(
                    &mut output,
                    &base,
                    &config.base_obj,
                    config.projection,
                    config.ply,
                )?;
                export(
                    &mut output,
                    &transform,
                    &config.transform_obj,
                    config.projection,
                    config.ply,
                )?;
            }
        }
    }

    if write_files {
        if let Some(path) = &config.report_json {
            write_atomic(path, &reports_to_json(&output.reports)?)?;
            output.written.push(path.clone());
        }
    }
    Ok(output)
}

/// Mesh-file verification: with only vertex positions and quad faces
/// available (no polarisation), the checkable core of isothermicity is that
/// every face has a real cross-ratio (equivalently, is concircular).
pub fn verify_mesh(mesh: &QuadMesh, tol: f64) -> CheckReport {
    let mut residuals = Vec::with_capacity(mesh.faces.len());
    for (index, face) in mesh.faces.iter().enumerate() {
        let residual = match cross_ratio(
            mesh.vertex_quat(face[0]),
            mesh.vertex_quat(face[1]),
            mesh.vertex_quat(face[2]),
            mesh.vertex_quat(face[3]),
        ) {
            Ok(cr) => cr.imag_norm() / cr.norm().max(1e-300),
            Err(_) => f64::INFINITY,
        };
        residuals.push(((index, 0), residual));
    }
    CheckReport::from_residuals("face-cross-ratio-real", tol, residuals)
}

pub fn reports_to_json(reports: &[CheckReport]) -> Result<String> {
    serde_json::to_string_pretty(reports)
        .map_err(|e| CliError::Config(format!("report serialisation failed: {e}")))
}

pub fn print_reports(reports: &[CheckReport]) {
    for report in reports {
        let status = if report.pass { "PASS" } else { "FAIL" };
        let worst = report
            .worst
            .map(|(m, n)| format!(" worst at ({m}, {n})"))
            .unwrap_or_default();
        println!(
            "{status} {:<28} max residual {:.3e} (tolerance {:.1e}){worst}",
            report.name, report.max_residual, report.tolerance
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bubbleton_job_passes_and_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let config = JobConfig {
            family: Family::Bubbleton,
            subdivisions: 12,
            profile_step: 5,
            mode: 2,
            n_min: -4,
            n_max: 4,
            base_obj: Some(dir.path().join("base.obj")),
            transform_obj: Some(dir.path().join("bubbleton.obj")),
            report_json: Some(dir.path().join("report.json")),
            ..JobConfig::default()
        };
        let output = run_job(&config, true).unwrap();
        assert!(output.all_pass());
        assert_eq!(output.written.len(), 3);
        let first = std::fs::read(dir.path().join("bubbleton.obj")).unwrap();
        run_job(&config, true).unwrap();
        let second = std::fs::read(dir.path().join("bubbleton.obj")).unwrap();
        assert_eq!(first, second, "export must be byte-identical across runs");
    }

    #[test]
    fn cmc_job_rejects_sub_window_modes() {
        // mode = cover gives nu = 0
        let config = JobConfig {
            family: Family::CmcBubbleton,
            subdivisions: 12,
            mode: 1,
            cover: 1,
            n_min: -2,
            n_max: 2,
            ..JobConfig::default()
        };
        assert!(matches!(
            run_job(&config, false),
            Err(CliError::CmcWindow { .. })
        ));
        // 0 < mode < cover gives 0 < nu < 1/4
        let config = JobConfig {
            family: Family::CmcBubbleton,
            subdivisions: 12,
            mode: 1,
            cover: 2,
            n_min: -2,
            n_max: 2,
            ..JobConfig::default()
        };
        assert!(matches!(
            run_job(&config, false),
            Err(CliError::CmcWindow { .. })
        ));
    }

    #[test]
    fn mesh_verification_flags_perturbed_vertices() {
        let spec = CylinderSpec::new(8, 4, 1, 2, 0, 3).unwrap();
        let mesh = QuadMesh::from_net(&spec.net(), Projection::None).unwrap();
        let clean = verify_mesh(&mesh, 1e-9);
        assert!(clean.pass, "clean mesh residual {}", clean.max_residual);

        let mut bent = mesh.clone();
        bent.vertices[9][2] += 1e-3;
        let report = verify_mesh(&bent, 1e-9);
        assert!(!report.pass);
        let worst_face = report.worst.unwrap().0;
        assert!(bent.faces[worst_face].contains(&9));
    }
}
