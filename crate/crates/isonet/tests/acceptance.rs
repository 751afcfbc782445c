//! Acceptance suite: every criterion runs at its stated tolerance and prints
//! one summary line (run with `--nocapture` to see them alongside the
//! harness's own pass/fail output).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use isonet::circle::CircleSpec;
use isonet::curve::RiccatiState;
use isonet::gallery::{
    bubbleton_net, bubbleton_state, cmc_initial_c2, cmc_spectral_window, cmc_verify,
    cylinder_resonance, resonance_convergence, resonance_limit, s3_initial_solver,
    surface_of_revolution, torus_convergence, torus_nu_limit, torus_radii_limits,
    torus_transform_net, BubbletonParams, CylinderSpec, TorusSpec,
};
use isonet::net::{
    christoffel, darboux_surface, permutability_check, s3_check, verify_flatness,
    verify_isothermic, verify_periodicity, GridDirection, IsothermicNet,
};
use isonet::quat::{cross_ratio, Quaternion};

fn fig3_spec() -> (CylinderSpec, BubbletonParams, f64) {
    let spec = CylinderSpec::new(40, 5, 1, 2, -15, 15).unwrap();
    let params = BubbletonParams {
        c2: Complex64::new(-10.0, 0.0),
    };
    let nu = spec.resonance_nu().unwrap();
    (spec, params, nu)
}

fn fig3_pair() -> (
    CylinderSpec,
    f64,
    IsothermicNet,
    IsothermicNet,
    IsothermicNet,
) {
    let (spec, params, nu) = fig3_spec();
    let base = spec.net();
    let closed = bubbleton_net(&spec, &params).unwrap();
    let init = bubbleton_state(&spec, &params, 0, spec.n_min).unwrap();
    let swept = darboux_surface(&base, nu, &init, (0, 0), 1e-9).unwrap();
    (spec, nu, base, closed, swept)
}

#[test]
fn criterion_1_resonance_regression() {
    let spec = CircleSpec::new(1.0, 3, 2, 1.0).unwrap();
    let nu = spec.resonance_nu(5).unwrap();
    let err = (nu - 2.0 / 9.0).abs();
    assert!(err < 1e-12, "nu = {nu}, error {err}");
    println!("criterion 1 PASS: resonance nu(5, 2, 3, 1) = 2/9, |error| = {err:.2e}");
}

#[test]
fn criterion_2_bubbleton_oracle_equivalence() {
    let (_spec, _nu, _base, closed, swept) = fig3_pair();
    let mut worst = 0.0_f64;
    for n in 0..closed.domain().n_count() {
        for m in 0..closed.domain().m_count() {
            worst = worst.max((closed.point(m, n) - swept.point(m, n)).norm());
        }
    }
    assert!(worst < 1e-9, "max deviation {worst}");
    println!("criterion 2 PASS: closed form vs riccati sweep, max deviation {worst:.2e}");
}

#[test]
fn criterion_3_periodicity_reduction() {
    let (spec, nu, base, closed, _swept) = fig3_pair();
    let at_resonance = verify_periodicity(
        &closed,
        GridDirection::M,
        spec.period(),
        spec.row_of(0),
        1e-9,
    )
    .unwrap();
    assert!(
        at_resonance.single_line.pass && at_resonance.full_grid.pass,
        "row residual {}, grid residual {}",
        at_resonance.single_line.max_residual,
        at_resonance.full_grid.max_residual
    );

    let init = bubbleton_state(
        &spec,
        &BubbletonParams {
            c2: Complex64::new(-10.0, 0.0),
        },
        0,
        spec.n_min,
    )
    .unwrap();
    let shifted = darboux_surface(&base, nu + 0.01, &init, (0, 0), 1e-9).unwrap();
    let off = verify_periodicity(
        &shifted,
        GridDirection::M,
        spec.period(),
        spec.row_of(0),
        1e-9,
    )
    .unwrap();
    assert!(
        off.single_line.max_residual > 1e-3 && off.full_grid.max_residual > 1e-3,
        "off-resonance residuals too small: row {}, grid {}",
        off.single_line.max_residual,
        off.full_grid.max_residual
    );
    println!(
        "criterion 3 PASS: closure at resonance (row {:.2e}, grid {:.2e}); both exceed 1e-3 off resonance (row {:.2e}, grid {:.2e})",
        at_resonance.single_line.max_residual,
        at_resonance.full_grid.max_residual,
        off.single_line.max_residual,
        off.full_grid.max_residual
    );
}

#[test]
fn criterion_4_darboux_cross_ratio_law() {
    let (_spec, nu, base, closed, _swept) = fig3_pair();
    let (mc, nc) = (base.domain().m_count(), base.domain().n_count());
    let mut worst = 0.0_f64;
    for n in 0..nc {
        for m in 0..mc - 1 {
            let cr = cross_ratio(
                base.point(m, n),
                base.point(m + 1, n),
                closed.point(m + 1, n),
                closed.point(m, n),
            )
            .unwrap();
            let target = Quaternion::real(nu / base.domain().mu_m(m));
            worst = worst.max((cr - target).norm());
        }
    }
    for n in 0..nc - 1 {
        for m in 0..mc {
            let cr = cross_ratio(
                base.point(m, n),
                base.point(m, n + 1),
                closed.point(m, n + 1),
                closed.point(m, n),
            )
            .unwrap();
            let target = Quaternion::real(nu / base.domain().mu_n(n));
            worst = worst.max((cr - target).norm());
        }
    }
    assert!(worst < 1e-10, "worst edge residual {worst}");
    println!("criterion 4 PASS: cr = nu/mu on every m- and n-edge, worst residual {worst:.2e}");
}

#[test]
fn criterion_5_cmc_identities() {
    let spec = CylinderSpec::new(40, 5, 1, 2, -15, 15).unwrap();
    let nu = spec.resonance_nu().unwrap();
    let base = spec.net();
    let dual = spec.dual_net();

    // |f* - f|^2 = 4 at every vertex
    let mut worst_parallel = 0.0_f64;
    for n in 0..base.domain().n_count() {
        for m in 0..base.domain().m_count() {
            worst_parallel =
                worst_parallel.max(((dual.point(m, n) - base.point(m, n)).norm_sqr() - 4.0).abs());
        }
    }
    assert!(
        worst_parallel < 1e-12,
        "parallel distance residual {worst_parallel}"
    );

    // both cmc initial-condition branches satisfy the distance identity everywhere
    let branches = cmc_initial_c2(spec.subdivisions, spec.cover, spec.mode).unwrap();
    let mut worst_cmc = 0.0_f64;
    for c2 in [branches.0, branches.1] {
        let hat = bubbleton_net(
            &spec,
            &BubbletonParams {
                c2: Complex64::new(c2, 0.0),
            },
        )
        .unwrap();
        let report = cmc_verify(&base, &dual, &hat, 0.5, nu, 1e-9).unwrap();
        assert!(
            report.cmc_distance.pass,
            "branch c2 = {c2}: residual {}",
            report.cmc_distance.max_residual
        );
        assert!(report.parallel_distance.pass && report.parallel_darboux.pass);
        worst_cmc = worst_cmc.max(report.cmc_distance.max_residual);
    }

    // no resonance value with 0 < k < rho enters the cmc window
    let mut scanned = 0usize;
    for rho in 2u32..=6 {
        for k in 1..rho {
            for m_subdiv in 10u32..=100 {
                let nu_k = cylinder_resonance(m_subdiv, rho, k).unwrap();
                assert!(
                    nu_k > 0.0 && nu_k < 0.25 && !cmc_spectral_window(nu_k),
                    "counterexample at k={k}, rho={rho}, M={m_subdiv}: nu = {nu_k}"
                );
                scanned += 1;
            }
        }
    }
    println!(
        "criterion 5 PASS: |f*-f|^2 = 4 ({worst_parallel:.2e}); cmc distance identity both branches ({worst_cmc:.2e}); {scanned} sub-window resonances rejected"
    );
}

#[test]
fn criterion_6_torus_reproduction() {
    let targets = [(40u32, 40u32, 0.385119_f64), (160, 40, 0.384212)];
    let mut reported = Vec::new();
    for (m_subdiv, n_subdiv, expected) in targets {
        let (spec, _nu) = TorusSpec::matched(4, 3, 2, 3, m_subdiv, n_subdiv).unwrap();
        let roots = s3_initial_solver(&spec, 0.45).unwrap();
        let nearest = roots
            .iter()
            .copied()
            .min_by(|a, b| {
                (a - expected)
                    .abs()
                    .partial_cmp(&(b - expected).abs())
                    .unwrap()
            })
            .unwrap();
        let err = (nearest - expected).abs();
        assert!(
            err < 1e-5,
            "M={m_subdiv}, N={n_subdiv}: r2 = {nearest}, expected {expected}"
        );

        let net = torus_transform_net(
            &spec,
            Quaternion::new(0.45, 0.0, nearest, 0.0),
            Quaternion::ONE,
        )
        .unwrap();
        let sphere = s3_check(&net, 1e-9);
        assert!(
            sphere.grid.pass,
            "sphere residual {}",
            sphere.grid.max_residual
        );
        let around = verify_periodicity(&net, GridDirection::M, spec.period_m(), 0, 1e-9).unwrap();
        let along = verify_periodicity(&net, GridDirection::N, spec.period_n(), 0, 1e-9).unwrap();
        assert!(
            around.pass() && along.pass(),
            "closure residuals m: {}, n: {}",
            around.full_grid.max_residual,
            along.full_grid.max_residual
        );
        reported.push((m_subdiv, n_subdiv, nearest, err, sphere.grid.max_residual));
    }
    for (m, n, r2, err, sph) in reported {
        println!(
            "criterion 6 PASS: M={m}, N={n}: r2 = {r2:.6} (|error| = {err:.2e}), sphere residual {sph:.2e}, torus closes both ways"
        );
    }
}

#[test]
fn criterion_7_continuum_limits() {
    let sizes = [40u32, 80, 160, 320];
    let rows = resonance_convergence(2, 1, 1.0, &sizes).unwrap();
    for pair in rows.windows(2) {
        assert!(
            pair[1].2 < pair[0].2,
            "resonance error not strictly decreasing: {pair:?}"
        );
    }
    let final_err = rows.last().unwrap().2;
    assert!(final_err < 1e-3, "error at M = 320: {final_err}");
    assert!((resonance_limit(2, 1) + 0.75).abs() < 1e-15);

    let torus_rows = torus_convergence(4, 3, 2, 3, &sizes).unwrap();
    let last = torus_rows.last().unwrap();
    assert!(last.nu_error < 1e-3, "torus nu error {}", last.nu_error);
    assert!(
        last.radius1_error < 1e-3 && last.radius2_error < 1e-3,
        "radius errors {} / {}",
        last.radius1_error,
        last.radius2_error
    );
    let (r1, r2) = torus_radii_limits(4, 3, 2, 3);
    assert!((torus_nu_limit(4, 3, 2, 3) + 1.0 / 3.0).abs() < 1e-15);
    assert!((r1 - 16.0 / 9.0).abs() < 1e-15 && (r2 - 4.0 / 9.0).abs() < 1e-15);
    println!(
        "criterion 7 PASS: resonance error decreasing to {final_err:.2e} at M = 320; torus errors nu {:.2e}, radii {:.2e} / {:.2e}",
        last.nu_error, last.radius1_error, last.radius2_error
    );
}

#[test]
fn criterion_8_permutability() {
    // the unit circle's first two nontrivial resonance modes (mode k = rho
    // gives nu = 0, whose transform is a constant point, not a curve)
    let spec = CircleSpec::new(1.0, 12, 1, 1.0).unwrap();
    let curve = spec.curve();
    let nu1 = spec.resonance_nu(2).unwrap();
    let nu2 = spec.resonance_nu(3).unwrap();
    let init1 = RiccatiState::new(Quaternion::J + Quaternion::K * 0.3, Quaternion::ONE).unwrap();
    let init2 = RiccatiState::new(
        Quaternion::J * 0.5 - Quaternion::I,
        Quaternion::ONE + Quaternion::K * 0.2,
    )
    .unwrap();
    let quad = permutability_check(&curve, nu1, nu2, &init1, &init2, 1e-9).unwrap();
    assert!(
        quad.report.family1.pass && quad.report.family2.pass,
        "family residuals {} / {}",
        quad.report.family1.max_residual,
        quad.report.family2.max_residual
    );
    println!(
        "criterion 8 PASS: Bianchi quadrilateral closes; family residuals {:.2e} / {:.2e}",
        quad.report.family1.max_residual, quad.report.family2.max_residual
    );
}

#[test]
fn criterion_9_property_suites() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let rand_quat = |rng: &mut ChaCha8Rng| {
        Quaternion::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        )
    };

    // quaternion algebra
    for _ in 0..1000 {
        let p = rand_quat(&mut rng);
        let q = rand_quat(&mut rng);
        let r = rand_quat(&mut rng);
        let assoc = ((p * q) * r - p * (q * r)).norm();
        assert!(assoc <= 1e-12 * ((p * q) * r).norm().max(1.0));
        let mult = ((p * q).norm_sqr() - p.norm_sqr() * q.norm_sqr()).abs();
        assert!(mult <= 1e-12 * (p.norm_sqr() * q.norm_sqr()).max(1.0));
    }
    for _ in 0..200 {
        let pts = [
            rand_quat(&mut rng),
            rand_quat(&mut rng),
            rand_quat(&mut rng),
            rand_quat(&mut rng),
        ];
        let Ok(base) = cross_ratio(pts[0], pts[1], pts[2], pts[3]) else {
            continue;
        };
        let c = rand_quat(&mut rng);
        let s = rng.gen_range(0.3..3.0);
        let t = cross_ratio(pts[0] + c, pts[1] + c, pts[2] + c, pts[3] + c).unwrap();
        let u = cross_ratio(pts[0] * s, pts[1] * s, pts[2] * s, pts[3] * s).unwrap();
        assert!((t - base).norm() < 1e-10 * base.norm().max(1.0));
        assert!((u - base).norm() < 1e-10 * base.norm().max(1.0));
    }

    // every generated family is flat for arbitrary spectral values, its
    // Christoffel transform is an involution up to similarity, and the dual
    // satisfies the same factorised cross-ratio condition
    let (cyl, params, _nu) = fig3_spec();
    let profile_p = [1.0, 1.25, 1.6, 1.45, 1.2, 1.0];
    let profile_q = [0.0, 0.3, 0.7, 1.15, 1.5, 1.8];
    let (torus, _tnu) = TorusSpec::matched(4, 3, 2, 3, 12, 12).unwrap();
    let nets: Vec<(&str, IsothermicNet)> = vec![
        ("cylinder", cyl.net()),
        ("bubbleton", bubbleton_net(&cyl, &params).unwrap()),
        (
            "revolution",
            surface_of_revolution(&profile_p, &profile_q, 14, 1).unwrap(),
        ),
        ("torus", torus.net()),
        (
            "torus-transform",
            torus_transform_net(
                &torus,
                Quaternion::new(0.45, 0.0, 0.3, 0.0),
                Quaternion::ONE,
            )
            .unwrap(),
        ),
    ];
    let mut worst_flat = 0.0_f64;
    for (name, net) in &nets {
        for _ in 0..5 {
            let lambda = rng.gen_range(-2.0..2.0);
            let report = verify_flatness(net, lambda, 1e-10).unwrap();
            assert!(
                report.pass,
                "{name}: flatness residual {} at lambda {lambda}",
                report.max_residual
            );
            worst_flat = worst_flat.max(report.max_residual);
        }
    }

    let mut worst_involution = 0.0_f64;
    let mut worst_dual_cr = 0.0_f64;
    for (name, net) in &nets {
        let dual = christoffel(net, 1e-8).unwrap();
        let dual_cr = verify_isothermic(&dual, 1e-10);
        assert!(
            dual_cr.pass,
            "{name}: dual cross-ratio residual {}",
            dual_cr.max_residual
        );
        worst_dual_cr = worst_dual_cr.max(dual_cr.max_residual);
        let back = christoffel(&dual, 1e-8).unwrap();
        let shift = back.point(0, 0) - net.point(0, 0);
        let mut dev = 0.0_f64;
        for n in 0..net.domain().n_count() {
            for m in 0..net.domain().m_count() {
                dev = dev.max((back.point(m, n) - net.point(m, n) - shift).norm());
            }
        }
        assert!(dev < 1e-9, "{name}: double dual deviates by {dev}");
        worst_involution = worst_involution.max(dev);
    }
    println!(
        "criterion 9 PASS: algebra properties hold; flatness {worst_flat:.2e}; christoffel involution {worst_involution:.2e}; dual cross-ratios {worst_dual_cr:.2e}"
    );
}
