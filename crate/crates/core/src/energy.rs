//! Stored-energy densities W(F), their first Piola-Kirchhoff stresses,
//! and the physical sanity probes (frame invariance, growth as det F → 0⁺).
//!
//! Three models are kept side by side: the compressible neo-Hookean
//! energy under test, a convex quadratic control (not frame invariant,
//! bounded under compression), and St. Venant-Kirchhoff as the known
//! rank-one-convexity-violating negative control.

use crate::tensor::{right_cauchy_green, Mat3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const EPS_CBRT: f64 = 6.055454452393343e-6; // f64::EPSILON^(1/3)

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    NeoHookeanEq3,
    ConvexQuadratic,
    StVenantKirchhoff,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::NeoHookeanEq3 => "neo-hookean-eq3",
            ModelKind::ConvexQuadratic => "convex-quadratic",
            ModelKind::StVenantKirchhoff => "svk",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "neo-hookean-eq3" => Some(ModelKind::NeoHookeanEq3),
            "convex-quadratic" => Some(ModelKind::ConvexQuadratic),
            "svk" => Some(ModelKind::StVenantKirchhoff),
            _ => None,
        }
    }
}

/// Energy evaluated at a non-positive determinant.
#[derive(Clone, Copy, Debug, Error, PartialEq)]
#[error("stored energy undefined at J = {j} (requires det F > 0)")]
pub struct EvalDomainError {
    pub j: f64,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("bulk modulus must be positive, got {0}")]
    NonPositiveKappa(f64),
    #[error("shear modulus must be positive, got {0}")]
    NonPositiveMu(f64),
    #[error("unknown model name `{0}`")]
    UnknownName(String),
}

/// Stored-energy density with bulk modulus `kappa` and shear modulus `mu`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyModel {
    pub kind: ModelKind,
    pub kappa: f64,
    pub mu: f64,
}

impl EnergyModel {
    pub fn new(kind: ModelKind, kappa: f64, mu: f64) -> Result<Self, ModelError> {
        if !(kappa > 0.0) {
            return Err(ModelError::NonPositiveKappa(kappa));
        }
        if !(mu > 0.0) {
            return Err(ModelError::NonPositiveMu(mu));
        }
        Ok(EnergyModel { kind, kappa, mu })
    }

    pub fn from_name(name: &str, kappa: f64, mu: f64) -> Result<Self, ModelError> {
        let kind = ModelKind::from_name(name).ok_or_else(|| ModelError::UnknownName(name.into()))?;
        EnergyModel::new(kind, kappa, mu)
    }

    /// First Lamé parameter for the SVK model, λ = κ − 2μ/3.
    pub fn lame_lambda(&self) -> f64 {
        self.kappa - 2.0 * self.mu / 3.0
    }

    /// W(F).
    pub fn energy(&self, f: &Mat3) -> Result<f64, EvalDomainError> {
        match self.kind {
            ModelKind::NeoHookeanEq3 => {
                let j = f.det();
                if j <= 0.0 {
                    return Err(EvalDomainError { j });
                }
                let trc = f.frobenius_norm_sq();
                let vol = self.kappa / 4.0 * (j * j - 2.0 * j.ln() - 1.0);
                let iso = self.mu / 2.0 * (j.powf(-2.0 / 3.0) * trc - 3.0);
                Ok(vol + iso)
            }
            ModelKind::ConvexQuadratic => Ok(0.5 * (*f - Mat3::identity()).frobenius_norm_sq()),
            ModelKind::StVenantKirchhoff => {
                let c = right_cauchy_green(f);
                let e = (c - Mat3::identity()).scale(0.5);
                let tr_e = e.trace();
                let tr_e2 = (e * e).trace();
                Ok(0.5 * self.lame_lambda() * tr_e * tr_e + self.mu * tr_e2)
            }
        }
    }

    /// First Piola-Kirchhoff stress P = ∂W/∂F by central differences of W.
    ///
    /// Step h = eps^{1/3} · max(1, ‖f‖_F). Reference oracle for
    /// [`EnergyModel::stress_analytic`].
    pub fn stress_fd(&self, f: &Mat3) -> Result<Mat3, EvalDomainError> {
        let h = EPS_CBRT * 1.0f64.max(f.frobenius_norm());
        let mut p = Mat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let mut fp = *f;
                fp.set(i, j, f.get(i, j) + h);
                let mut fm = *f;
                fm.set(i, j, f.get(i, j) - h);
                let wp = self.energy(&fp)?;
                let wm = self.energy(&fm)?;
                p.set(i, j, (wp - wm) / (2.0 * h));
            }
        }
        Ok(p)
    }

    /// Closed-form first Piola-Kirchhoff stress, using ∂J/∂F = cof F.
    pub fn stress_analytic(&self, f: &Mat3) -> Result<Mat3, EvalDomainError> {
        match self.kind {
            ModelKind::NeoHookeanEq3 => {
                let j = f.det();
                if j <= 0.0 {
                    return Err(EvalDomainError { j });
                }
                let cof = f.cofactor();
                let trc = f.frobenius_norm_sq();
                let jm23 = j.powf(-2.0 / 3.0);
                let vol = cof.scale(self.kappa / 4.0 * (2.0 * j - 2.0 / j));
                let iso = cof
                    .scale(-(2.0 / 3.0) * jm23 * trc / j)
                    .add_scaled(f, 2.0 * jm23)
                    .scale(self.mu / 2.0);
                Ok(vol + iso)
            }
            ModelKind::ConvexQuadratic => Ok(*f - Mat3::identity()),
            ModelKind::StVenantKirchhoff => {
                // P = F·S with S = λ tr(E) I + 2μ E
                let c = right_cauchy_green(f);
                let e = (c - Mat3::identity()).scale(0.5);
                let s = Mat3::identity().scale(self.lame_lambda() * e.trace()) + e.scale(2.0 * self.mu);
                Ok(*f * s)
            }
        }
    }

    /// |W(q·f) − W(f)| for a rotation q.
    ///
    /// Rejects q if it fails the orthogonality/orientation check at 1e-10.
    pub fn frame_invariance_probe(&self, f: &Mat3, q: &Mat3) -> Result<f64, ProbeError> {
        let qtq = right_cauchy_green(q);
        let defect = (qtq - Mat3::identity()).frobenius_norm();
        if defect > 1e-10 || (q.det() - 1.0).abs() > 1e-10 {
            return Err(ProbeError::NotARotation { defect });
        }
        let w0 = self.energy(f)?;
        let w1 = self.energy(&(*q * *f))?;
        Ok((w1 - w0).abs())
    }

    /// W along a path of deformation gradients (typically det → 0⁺).
    pub fn growth_probe(&self, path: &[Mat3]) -> Result<Vec<f64>, EvalDomainError> {
        path.iter().map(|f| self.energy(f)).collect()
    }
}

#[derive(Clone, Copy, Debug, Error, PartialEq)]
pub enum ProbeError {
    #[error("q is not a rotation (orthogonality defect {defect})")]
    NotARotation { defect: f64 },
    #[error(transparent)]
    Domain(#[from] EvalDomainError),
}

impl Mat3 {
    fn add_scaled(&self, other: &Mat3, s: f64) -> Mat3 {
        let mut m = self.0;
        for (e, o) in m.iter_mut().zip(other.0.iter()) {
            *e += s * o;
        }
        Mat3(m)
    }
}

/// Uniform random rotation from a normalized Gaussian quaternion.
pub fn random_rotation(rng: &mut impl rand::Rng) -> Mat3 {
    use rand_normal::sample_standard_normal;
    let q = [
        sample_standard_normal(rng),
        sample_standard_normal(rng),
        sample_standard_normal(rng),
        sample_standard_normal(rng),
    ];
    let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
    let (w, x, y, z) = (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
    Mat3::new([
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    ])
}

pub(crate) mod rand_normal {
    // Box-Muller; avoids pulling rand_distr for one distribution.
    pub fn sample_standard_normal(rng: &mut impl rand::Rng) -> f64 {
        loop {
            let u1: f64 = rng.gen::<f64>();
            let u2: f64 = rng.gen::<f64>();
            if u1 > 1e-300 {
                return (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
            }
        }
    }
}
