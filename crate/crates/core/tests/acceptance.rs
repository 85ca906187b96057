//! Acceptance suite: one test per claim under verification, each
//! printing a PASS line with the measured quantities.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use polyrod::bar::Bar1DProblem;
use polyrod::buckling::{
    buckling_experiment, critical_load_estimate, euler_force, straight_state_force,
};
use polyrod::convexity::{
    falsify_convexity, falsify_rank_one, polyconvexity_witness, reflection_counterexample,
    RankOneSampling,
};
use polyrod::elastica::ElasticaProblem;
use polyrod::energy::{random_rotation, EnergyModel, ModelKind};
use polyrod::schwarz::{convergence_rate_fit, monolithic_solve, schwarz_solve, SubdomainSpec};
use polyrod::tensor::Mat3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pass(criterion: usize, detail: &str) {
    println!("ACCEPTANCE {criterion}: PASS — {detail}");
}

fn neo() -> EnergyModel {
    EnergyModel::new(ModelKind::NeoHookeanEq3, 4.0, 2.0).unwrap()
}

fn lambda_grid() -> Vec<f64> {
    (1..20)
        .map(|i| i as f64 * 0.05)
        .filter(|l| (l - 0.5).abs() >= 1e-3)
        .collect()
}

fn random_admissible(rng: &mut ChaCha8Rng, j_lo: f64, j_hi: f64) -> Mat3 {
    loop {
        let mut e = [0.0; 9];
        for v in e.iter_mut() {
            *v = rng.gen_range(-2.0..2.0);
        }
        let f = Mat3::new(e);
        let j = f.det();
        if j >= j_lo && j <= j_hi {
            return f;
        }
    }
}

#[test]
fn criterion_1_counterexample_reproduction() {
    let report = reflection_counterexample(4.0, 2.0, &lambda_grid()).unwrap();
    assert!(report.w_f1.abs() <= 1e-12, "W(F1) = {}", report.w_f1);
    assert!(report.w_f2.abs() <= 1e-12, "W(F2) = {}", report.w_f2);
    assert_eq!(report.points.len(), 18);
    for p in &report.points {
        assert!(p.energy > 0.0, "W(F_lambda) must be positive at {}", p.lambda);
        assert!(p.violated, "convexity must be violated at {}", p.lambda);
    }
    let at_075 = report
        .points
        .iter()
        .find(|p| (p.lambda - 0.75).abs() < 1e-12)
        .unwrap();
    assert!(
        (at_075.energy - 2.61485).abs() <= 1e-4,
        "W at 0.75: {}",
        at_075.energy
    );
    pass(1, &format!(
        "18/18 grid points violated; W(F1)={:.1e}, W(F2)={:.1e}, W(F_0.75)={:.6}",
        report.w_f1, report.w_f2, at_075.energy
    ));
}

#[test]
fn criterion_2_closed_form_algebra() {
    let report = reflection_counterexample(4.0, 2.0, &lambda_grid()).unwrap();
    let mut max_dj: f64 = 0.0;
    let mut max_dtrc: f64 = 0.0;
    for p in &report.points {
        max_dj = max_dj.max((p.j - p.j_closed_form).abs());
        max_dtrc = max_dtrc.max((p.tr_c - p.tr_c_closed_form).abs());
    }
    assert!(max_dj <= 1e-12, "max |J - (2λ-1)²| = {max_dj}");
    assert!(max_dtrc <= 1e-12, "max |trC - (2(2λ-1)²+1)| = {max_dtrc}");
    pass(2, &format!("max |ΔJ|={max_dj:.2e}, max |ΔtrC|={max_dtrc:.2e} over the grid"));
}

#[test]
fn criterion_3_frame_invariance() {
    let model = neo();
    let mut rot_rng = ChaCha8Rng::seed_from_u64(301);
    let mut f_rng = ChaCha8Rng::seed_from_u64(302);
    let rotations: Vec<Mat3> = (0..100).map(|_| random_rotation(&mut rot_rng)).collect();
    let states: Vec<Mat3> = (0..100).map(|_| random_admissible(&mut f_rng, 0.2, 5.0)).collect();
    let mut max_dev: f64 = 0.0;
    for q in &rotations {
        for f in &states {
            let d = model.frame_invariance_probe(f, q).unwrap();
            max_dev = max_dev.max(d);
        }
    }
    assert!(max_dev <= 1e-10, "max |W(QF) - W(F)| = {max_dev}");
    pass(3, &format!("max |W(QF)-W(F)| = {max_dev:.2e} over 100×100 probes"));
}

#[test]
fn criterion_4_growth_condition() {
    let model = neo();
    // 50 log-spaced points on (1e-6, 1]
    let path: Vec<Mat3> = (0..50)
        .map(|i| {
            let t = 10f64.powf(-6.0 * (49 - i) as f64 / 49.0);
            Mat3::diag(t, 1.0, 1.0)
        })
        .collect();
    let energies = model.growth_probe(&path).unwrap();
    for w in energies.windows(2) {
        assert!(w[0] > w[1], "W must strictly decrease toward t = 1");
    }
    let w_at_1e6 = energies[0];
    assert!(w_at_1e6 > 1e4, "W(1e-6) = {w_at_1e6}");
    pass(4, &format!("W strictly decreasing on 50 points; W(t=1e-6) = {w_at_1e6:.4e} > 1e4"));
}

#[test]
fn criterion_5_polyconvexity_evidence() {
    let n = 100_000;
    let r1 = falsify_rank_one(&neo(), 7, n, RankOneSampling::Isotropic);
    assert!(r1.violation.is_none(), "rank-one violation on the model under test");

    let witness = polyconvexity_witness(4.0, 2.0, 7, n);
    assert!(witness.clean(), "witness violations: {witness:?}");

    let svk = EnergyModel::new(ModelKind::StVenantKirchhoff, 4.0, 2.0).unwrap();
    let svk_out = falsify_rank_one(&svk, 7, n, RankOneSampling::CompressionBiased);
    assert!(svk_out.violation.is_some(), "SVK negative control found no violation");

    let quad = EnergyModel::new(ModelKind::ConvexQuadratic, 4.0, 2.0).unwrap();
    assert!(falsify_convexity(&quad, 7, n).violation.is_none());
    assert!(falsify_rank_one(&quad, 7, n, RankOneSampling::Isotropic)
        .violation
        .is_none());

    pass(5, &format!(
        "neo-Hookean: 0 rank-one violations in {n}; witness clean in {n}; \
         SVK violation at sample {}; convex control clean",
        svk_out.samples_run
    ));
}

#[test]
fn criterion_6_stress_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(600);
    let mut worst: f64 = 0.0;
    for kind in [
        ModelKind::NeoHookeanEq3,
        ModelKind::ConvexQuadratic,
        ModelKind::StVenantKirchhoff,
    ] {
        let model = EnergyModel::new(kind, 4.0, 2.0).unwrap();
        for _ in 0..100 {
            let f = random_admissible(&mut rng, 0.5, 2.0);
            let pa = model.stress_analytic(&f).unwrap();
            let pf = model.stress_fd(&f).unwrap();
            let rel = (pa - pf).frobenius_norm() / 1.0f64.max(pf.frobenius_norm());
            assert!(rel <= 1e-6, "{kind:?}: relative deviation {rel}");
            worst = worst.max(rel);
        }
    }
    pass(6, &format!("analytic vs FD stress: worst relative deviation {worst:.2e} over 300 states"));
}

#[test]
fn criterion_7_schwarz_convergence_stable_regime() {
    let p = Bar1DProblem {
        n_elements: 40,
        length: 1.0,
        area: 1.0,
        model: neo(),
        left_disp: 0.0,
        right_disp: 0.1,
    };
    let mono = monolithic_solve(&p, &p.initial_state(), 1e-11, 200).unwrap();
    assert!(mono.converged);

    let tol = 1e-10;
    let mut rhos = Vec::new();
    let mut deviation_20 = f64::NAN;
    for overlap in [0.2, 0.4] {
        let spec = SubdomainSpec::uniform(41, 2, overlap).unwrap();
        let (x, trace) =
            schwarz_solve(&p, &spec, &p.initial_state(), tol, 500, Some(&mono.x)).unwrap();
        let deviation = x
            .iter()
            .zip(mono.x.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if overlap == 0.2 {
            assert!(deviation <= 1e-9, "deviation from monolithic: {deviation}");
            deviation_20 = deviation;
        }
        let fit = convergence_rate_fit(&trace).unwrap();
        assert!(fit.rho > 0.0 && fit.rho < 1.0, "rho = {}", fit.rho);
        assert!(fit.r_squared >= 0.95, "r² = {}", fit.r_squared);
        rhos.push(fit.rho);
    }
    assert!(rhos[1] < rhos[0], "rho must shrink with larger overlap: {rhos:?}");
    pass(7, &format!(
        "deviation {deviation_20:.2e}; rho(20%)={:.3}, rho(40%)={:.3}",
        rhos[0], rhos[1]
    ));
}

#[test]
fn criterion_8_euler_oracle() {
    let rod = |n_nodes: usize, length: f64| ElasticaProblem {
        n_nodes,
        length,
        k_s: 1e4,
        k_b: 1.0,
        end_shortening: 0.0,
    };

    let p1 = rod(64, 1.0);
    let f1 = straight_state_force(&p1, critical_load_estimate(&p1).unwrap());
    let euler = euler_force(&p1);
    let rel = (f1 - euler).abs() / euler;
    assert!(rel <= 0.05, "critical force {f1} vs Euler {euler} (rel {rel})");

    let p2 = rod(64, 2.0);
    let f2 = straight_state_force(&p2, critical_load_estimate(&p2).unwrap());
    let ratio = f1 / f2;
    assert!(
        (ratio - 4.0).abs() / 4.0 <= 0.10,
        "1/L² scaling: force ratio {ratio} (expected 4)"
    );
    pass(8, &format!(
        "critical force {f1:.4} vs Euler {euler:.4} (rel {rel:.2e}); L-doubling force ratio {ratio:.3}"
    ));
}

#[test]
fn criterion_9_schwarz_misses_buckling() {
    let mut p = ElasticaProblem {
        n_nodes: 64,
        length: 1.0,
        k_s: 1e4,
        k_b: 1.0,
        end_shortening: 0.0,
    };
    let d_crit = critical_load_estimate(&p).unwrap();
    p.end_shortening = 1.5 * d_crit;
    let spec = SubdomainSpec::uniform(64, 2, 0.2).unwrap();
    let report = buckling_experiment(&p, &spec, 0).unwrap();

    assert!(report.window_ok);
    // (a) two distinct buckled equilibria, mirror images, equal energy
    assert!(report.buckled_plus.converged && report.buckled_minus.converged);
    assert!(report.buckled_plus.max_deflection > 10.0 * report.deflection_tol);
    assert!(report.buckled_minus.max_deflection > 10.0 * report.deflection_tol);
    assert!(
        report.branch_energy_gap <= 1e-8,
        "branch energy gap {}",
        report.branch_energy_gap
    );
    assert!(
        report.mirror_asymmetry <= 1e-6,
        "mirror asymmetry {}",
        report.mirror_asymmetry
    );
    assert!(report.buckled_plus.min_eigenvalue > 0.0);
    assert!(report.buckled_minus.min_eigenvalue > 0.0);
    // (b) the straight state is a saddle
    assert!(report.straight_min_eigenvalue < 0.0);
    // (c) Schwarz stays straight and energetically above the buckled minima
    assert!(
        report.schwarz.max_deflection < report.deflection_tol,
        "Schwarz deflection {}",
        report.schwarz.max_deflection
    );
    assert!(
        report.schwarz_energy_excess > 0.0,
        "Schwarz energy excess {}",
        report.schwarz_energy_excess
    );
    assert!(report.discrepancy_exhibited);
    pass(9, &format!(
        "buckled deflection ±{:.3e} (gap {:.1e}, asym {:.1e}); straight min-eig {:.3e}; \
         Schwarz deflection {:.1e}, energy excess {:.3e}",
        report.buckled_plus.max_deflection,
        report.branch_energy_gap,
        report.mirror_asymmetry,
        report.straight_min_eigenvalue,
        report.schwarz.max_deflection,
        report.schwarz_energy_excess
    ));
}

#[test]
fn criterion_10_determinism() {
    // library level: identical seeds give identical certificates
    let a = falsify_convexity(&neo(), 42, 50_000);
    let b = falsify_convexity(&neo(), 42, 50_000);
    assert_eq!(a.violation, b.violation);
    assert_eq!(
        serde_json::to_string(&a.violation).unwrap(),
        serde_json::to_string(&b.violation).unwrap()
    );

    // command level: bit-identical JSON reports, duration aside
    let bin = env!("CARGO_BIN_EXE_polyrod");
    let strip = |raw: &[u8]| {
        let mut v: serde_json::Value = serde_json::from_slice(raw).unwrap();
        v["manifest"]
            .as_object_mut()
            .unwrap()
            .remove("duration_ms")
            .unwrap();
        serde_json::to_string(&v).unwrap()
    };
    for args in [
        vec!["counterexample"],
        vec!["falsify", "--model", "neo-hookean-eq3", "--test", "convexity", "--samples", "20000"],
        vec!["schwarz", "--elements", "20"],
    ] {
        let run = || {
            let out = std::process::Command::new(bin).args(&args).output().unwrap();
            assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
            strip(&out.stdout)
        };
        assert_eq!(run(), run(), "non-deterministic output for {args:?}");
    }
    pass(10, "repeated commands produce bit-identical JSON (duration excluded)");
}
