//! Falsification machinery for convexity and rank-one convexity, plus a
//! polyconvexity witness in the lifted (F, δ) variables.
//!
//! Every randomized search is seeded and indexed: probe i draws from a
//! stream derived from (seed, i), so results are identical regardless of
//! how the loop is scheduled, and "first violation" always means lowest
//! probe index.

use crate::energy::{EnergyModel, ModelKind};
use crate::tensor::{det_along_rank_one, Mat3, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Minimum admissible determinant for probe endpoints.
pub const J_MIN: f64 = 0.05;
/// Upper determinant bound for witness segments.
pub const J_MAX: f64 = 10.0;

/// Violation tolerance: 1e-9 · max(1, |rhs|).
pub fn tol_conv(rhs: f64) -> f64 {
    1e-9 * 1.0f64.max(rhs.abs())
}

/// A segment in matrix space on which the convexity inequality is tested.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SegmentProbe {
    pub f1: Mat3,
    pub f2: Mat3,
    pub lambda: f64,
}

impl SegmentProbe {
    pub fn blended(&self) -> Mat3 {
        self.f1.scale(self.lambda) + self.f2.scale(1.0 - self.lambda)
    }
}

/// Certificate that W(λF₁+(1-λ)F₂) > λW(F₁)+(1-λ)W(F₂).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConvexityViolation {
    pub model: String,
    pub kappa: f64,
    pub mu: f64,
    pub f1: Mat3,
    pub f2: Mat3,
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// rhs − lhs; negative for a violation.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SegmentVerdict {
    Holds,
    Violated(ConvexityViolation),
    /// Blended point left the energy's domain (J ≤ 0); not a violation.
    Undefined,
}

/// Tests the convexity inequality on one segment.
///
/// Both endpoints must be evaluable; a blended point with J ≤ 0 maps to
/// `Undefined` rather than an error, mirroring the counterexample where
/// two admissible endpoints bracket an inadmissible midsegment.
pub fn convexity_on_segment(model: &EnergyModel, probe: &SegmentProbe) -> SegmentVerdict {
    let w1 = model
        .energy(&probe.f1)
        .expect("segment endpoint must be admissible");
    let w2 = model
        .energy(&probe.f2)
        .expect("segment endpoint must be admissible");
    let rhs = probe.lambda * w1 + (1.0 - probe.lambda) * w2;
    match model.energy(&probe.blended()) {
        Err(_) => SegmentVerdict::Undefined,
        Ok(lhs) => {
            if lhs > rhs + tol_conv(rhs) {
                SegmentVerdict::Violated(ConvexityViolation {
                    model: model.kind.name().into(),
                    kappa: model.kappa,
                    mu: model.mu,
                    f1: probe.f1,
                    f2: probe.f2,
                    lambda: probe.lambda,
                    lhs,
                    rhs,
                    margin: rhs - lhs,
                })
            } else {
                SegmentVerdict::Holds
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Deterministic counterexample: F1 = I, F2 = diag(-1,-1,1)

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CounterexamplePoint {
    pub lambda: f64,
    pub j: f64,
    pub j_closed_form: f64,
    pub tr_c: f64,
    pub tr_c_closed_form: f64,
    pub energy: f64,
    pub violated: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub kappa: f64,
    pub mu: f64,
    pub w_f1: f64,
    pub w_f2: f64,
    pub points: Vec<CounterexamplePoint>,
    pub excluded_lambdas: Vec<f64>,
    pub all_violated: bool,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum CounterexampleError {
    #[error("lambda {0} too close to 1/2 (within 1e-3), where the blend is singular")]
    LambdaNearHalf(f64),
    #[error("lambda {0} outside (0, 1)")]
    LambdaOutOfRange(f64),
    #[error(transparent)]
    Model(#[from] crate::energy::ModelError),
}

pub fn counterexample_endpoints() -> (Mat3, Mat3) {
    (Mat3::identity(), Mat3::diag(-1.0, -1.0, 1.0))
}

/// Reproduces the deterministic nonconvexity counterexample on a λ grid.
///
/// Grid points within 1e-3 of 1/2 are rejected (the caller is expected
/// to pre-filter; the CLI auto-excludes them with a note).
pub fn reflection_counterexample(
    kappa: f64,
    mu: f64,
    lambda_grid: &[f64],
) -> Result<CounterexampleReport, CounterexampleError> {
    let model = EnergyModel::new(ModelKind::NeoHookeanEq3, kappa, mu)?;
    let (f1, f2) = counterexample_endpoints();
    let w_f1 = model.energy(&f1).expect("J(F1) = 1");
    let w_f2 = model.energy(&f2).expect("J(F2) = 1");

    let mut points = Vec::with_capacity(lambda_grid.len());
    for &lambda in lambda_grid {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(CounterexampleError::LambdaOutOfRange(lambda));
        }
        if (lambda - 0.5).abs() < 1e-3 {
            return Err(CounterexampleError::LambdaNearHalf(lambda));
        }
        let probe = SegmentProbe { f1, f2, lambda };
        let fl = probe.blended();
        let j = fl.det();
        let tr_c = crate::tensor::right_cauchy_green(&fl).trace();
        let t = 2.0 * lambda - 1.0;
        let energy = model.energy(&fl).expect("J(F_lambda) > 0 away from 1/2");
        let violated = matches!(convexity_on_segment(&model, &probe), SegmentVerdict::Violated(_));
        points.push(CounterexamplePoint {
            lambda,
            j,
            j_closed_form: t * t,
            tr_c,
            tr_c_closed_form: 2.0 * t * t + 1.0,
            energy,
            violated,
        });
    }
    let all_violated = !points.is_empty() && points.iter().all(|p| p.violated);
    Ok(CounterexampleReport {
        kappa,
        mu,
        w_f1,
        w_f2,
        points,
        excluded_lambdas: Vec::new(),
        all_violated,
    })
}

// ---------------------------------------------------------------------------
// Seeded randomized falsifiers

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FalsifyOutcome {
    pub samples_run: u64,
    pub undefined_count: u64,
    pub violation: Option<ConvexityViolation>,
}

fn probe_rng(seed: u64, index: u64) -> ChaCha8Rng {
    // independent stream per probe index
    ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn random_mat3(rng: &mut ChaCha8Rng) -> Mat3 {
    let mut e = [0.0; 9];
    for v in e.iter_mut() {
        *v = rng.gen_range(-2.0..2.0);
    }
    Mat3::new(e)
}

fn random_admissible(rng: &mut ChaCha8Rng, j_lo: f64, j_hi: f64) -> Mat3 {
    loop {
        let f = random_mat3(rng);
        let j = f.det();
        if j >= j_lo && j <= j_hi {
            return f;
        }
    }
}

fn unit_normal3(rng: &mut ChaCha8Rng) -> Vec3 {
    use crate::energy::rand_normal::sample_standard_normal;
    loop {
        let v = [
            sample_standard_normal(rng),
            sample_standard_normal(rng),
            sample_standard_normal(rng),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-8 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Draws one segment probe: endpoints with entries uniform on [-2, 2],
/// redrawn until both determinants exceed `J_MIN`; λ uniform on
/// (0.05, 0.95). Every fourth probe pairs a random F with its image
/// under the half-turn diag(-1,-1,1), the family the deterministic
/// counterexample lives in.
fn draw_segment_probe(rng: &mut ChaCha8Rng, index: u64) -> SegmentProbe {
    let f1 = random_admissible(rng, J_MIN, f64::INFINITY);
    let f2 = if index % 4 == 0 {
        Mat3::diag(-1.0, -1.0, 1.0) * f1
    } else {
        random_admissible(rng, J_MIN, f64::INFINITY)
    };
    let lambda = rng.gen_range(0.05..0.95);
    SegmentProbe { f1, f2, lambda }
}

/// Searches for a convexity violation over `n_samples` seeded probes.
/// Returns the lowest-index violation, or none.
pub fn falsify_convexity(model: &EnergyModel, seed: u64, n_samples: u64) -> FalsifyOutcome {
    let mut undefined = 0u64;
    for i in 0..n_samples {
        let mut rng = probe_rng(seed, i);
        let probe = draw_segment_probe(&mut rng, i);
        match convexity_on_segment(model, &probe) {
            SegmentVerdict::Holds => {}
            SegmentVerdict::Undefined => undefined += 1,
            SegmentVerdict::Violated(v) => {
                return FalsifyOutcome {
                    samples_run: i + 1,
                    undefined_count: undefined,
                    violation: Some(v),
                }
            }
        }
    }
    FalsifyOutcome {
        samples_run: n_samples,
        undefined_count: undefined,
        violation: None,
    }
}

/// Sampling law for rank-one probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankOneSampling {
    /// Base states with J in [0.2, 5], isotropic rank-one directions.
    Isotropic,
    /// Base states diag(t,1,1)+noise with t in (0.05, 0.5) and directions
    /// near e1⊗e1; targets the compressive regime where SVK fails.
    CompressionBiased,
}

/// A segment along the rank-one line f + s·a⊗b.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RankOneProbe {
    pub f: Mat3,
    pub a: Vec3,
    pub b: Vec3,
    pub s1: f64,
    pub s2: f64,
    pub lambda: f64,
}

impl RankOneProbe {
    pub fn at(&self, s: f64) -> Mat3 {
        self.f + Mat3::outer(self.a, self.b).scale(s)
    }
}

fn perturb_direction(rng: &mut ChaCha8Rng, base: Vec3, eps: f64) -> Vec3 {
    let n = unit_normal3(rng);
    let v = [base[0] + eps * n[0], base[1] + eps * n[1], base[2] + eps * n[2]];
    let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / len, v[1] / len, v[2] / len]
}

/// Draws a rank-one probe whose endpoints both satisfy det ≥ J_MIN.
/// Affinity of det along rank-one lines guarantees the whole segment
/// stays admissible.
fn draw_rank_one_probe(rng: &mut ChaCha8Rng, sampling: RankOneSampling) -> Option<RankOneProbe> {
    let (f, a, b) = match sampling {
        RankOneSampling::Isotropic => {
            let f = random_admissible(rng, 0.2, 5.0);
            (f, unit_normal3(rng), unit_normal3(rng))
        }
        RankOneSampling::CompressionBiased => {
            let t = rng.gen_range(0.05..0.5);
            let mut f = Mat3::diag(t, 1.0, 1.0);
            for k in 0..9 {
                f.0[k] += rng.gen_range(-0.01..0.01);
            }
            if f.det() < J_MIN {
                return None;
            }
            let e1 = [1.0, 0.0, 0.0];
            (f, perturb_direction(rng, e1, 0.05), perturb_direction(rng, e1, 0.05))
        }
    };
    // det(f + s a⊗b) = c0 + c1 s; keep both endpoints at det ≥ J_MIN.
    let (c0, c1) = det_along_rank_one(&f, a, b);
    let (lo, hi) = if c1.abs() < 1e-12 {
        (-2.0, 2.0)
    } else {
        let s_bound = (J_MIN - c0) / c1;
        if c1 > 0.0 {
            (s_bound.max(-2.0), 2.0)
        } else {
            (-2.0, s_bound.min(2.0))
        }
    };
    if !(hi - lo > 1e-6) {
        return None;
    }
    let s1 = rng.gen_range(lo..hi);
    let s2 = rng.gen_range(lo..hi);
    if (s1 - s2).abs() < 1e-9 {
        return None;
    }
    let lambda = rng.gen_range(0.05..0.95);
    Some(RankOneProbe { f, a, b, s1, s2, lambda })
}

/// Tests the convexity inequality restricted to rank-one segments.
pub fn falsify_rank_one(
    model: &EnergyModel,
    seed: u64,
    n_samples: u64,
    sampling: RankOneSampling,
) -> FalsifyOutcome {
    let mut undefined = 0u64;
    for i in 0..n_samples {
        let mut rng = probe_rng(seed, i);
        let Some(probe) = draw_rank_one_probe(&mut rng, sampling) else {
            continue;
        };
        let seg = SegmentProbe {
            f1: probe.at(probe.s1),
            f2: probe.at(probe.s2),
            lambda: probe.lambda,
        };
        match convexity_on_segment(model, &seg) {
            SegmentVerdict::Holds => {}
            SegmentVerdict::Undefined => undefined += 1,
            SegmentVerdict::Violated(v) => {
                return FalsifyOutcome {
                    samples_run: i + 1,
                    undefined_count: undefined,
                    violation: Some(v),
                }
            }
        }
    }
    FalsifyOutcome {
        samples_run: n_samples,
        undefined_count: undefined,
        violation: None,
    }
}

// ---------------------------------------------------------------------------
// Polyconvexity witness

/// Volumetric lift g_vol(δ) = κ/4 (δ² − 2 ln δ − 1).
pub fn g_vol(kappa: f64, delta: f64) -> f64 {
    kappa / 4.0 * (delta * delta - 2.0 * delta.ln() - 1.0)
}

/// Isochoric lift g_iso(F, δ) = μ/2 (δ^{-2/3} ‖F‖² − 3), δ the lifted
/// determinant variable.
pub fn g_iso(mu: f64, f: &Mat3, delta: f64) -> f64 {
    mu / 2.0 * (delta.powf(-2.0 / 3.0) * f.frobenius_norm_sq() - 3.0)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessReport {
    pub kappa: f64,
    pub mu: f64,
    pub samples: u64,
    pub vol_violations: u64,
    pub iso_violations: u64,
}

impl WitnessReport {
    pub fn clean(&self) -> bool {
        self.vol_violations == 0 && self.iso_violations == 0
    }
}

/// Midpoint-convexity check of the lifted decomposition W = g_vol(J) +
/// g_iso(F, δ): the volumetric part on random δ segments in
/// (J_MIN, J_MAX), the isochoric part on random segments in the joint
/// 10-dimensional (F, δ) variable.
pub fn polyconvexity_witness(kappa: f64, mu: f64, seed: u64, n_samples: u64) -> WitnessReport {
    let mut vol_violations = 0u64;
    let mut iso_violations = 0u64;
    for i in 0..n_samples {
        let mut rng = probe_rng(seed, i);

        let d1 = rng.gen_range(J_MIN..J_MAX);
        let d2 = rng.gen_range(J_MIN..J_MAX);
        let mid = g_vol(kappa, 0.5 * (d1 + d2));
        let chord = 0.5 * (g_vol(kappa, d1) + g_vol(kappa, d2));
        if mid > chord + tol_conv(chord) {
            vol_violations += 1;
        }

        let f1 = random_mat3(&mut rng);
        let f2 = random_mat3(&mut rng);
        let e1 = rng.gen_range(J_MIN..J_MAX);
        let e2 = rng.gen_range(J_MIN..J_MAX);
        let fm = f1.scale(0.5) + f2.scale(0.5);
        let mid = g_iso(mu, &fm, 0.5 * (e1 + e2));
        let chord = 0.5 * (g_iso(mu, &f1, e1) + g_iso(mu, &f2, e2));
        if mid > chord + tol_conv(chord) {
            iso_violations += 1;
        }
    }
    WitnessReport {
        kappa,
        mu,
        samples: n_samples,
        vol_violations,
        iso_violations,
    }
}
