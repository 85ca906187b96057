//! Small dense 3x3 tensor algebra used by every energy evaluation.
//!
//! Deformation gradients, right Cauchy-Green tensors and cofactor
//! matrices all live here. Storage is a flat row-major `[f64; 9]`;
//! determinants are computed by cofactor expansion, which is exact
//! enough at this size.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

pub type Vec3 = [f64; 3];

/// 3x3 real matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat3(pub [f64; 9]);

impl Mat3 {
    pub fn new(entries: [f64; 9]) -> Self {
        assert!(
            entries.iter().all(|e| e.is_finite()),
            "Mat3 entries must be finite"
        );
        Mat3(entries)
    }

    pub fn zeros() -> Self {
        Mat3([0.0; 9])
    }

    pub fn identity() -> Self {
        Mat3([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0])
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Mat3([a, 0.0, 0.0, 0.0, b, 0.0, 0.0, 0.0, c])
    }

    /// Rank-one matrix a ⊗ b.
    pub fn outer(a: Vec3, b: Vec3) -> Self {
        let mut m = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                m[3 * i + j] = a[i] * b[j];
            }
        }
        Mat3(m)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[3 * i + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.0[3 * i + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat3([m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]])
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = self.0;
        for e in m.iter_mut() {
            *e *= s;
        }
        Mat3(m)
    }

    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[4] + self.0[8]
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.0.iter().map(|e| e * e).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().sqrt()
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
            + m[2] * (m[3] * m[7] - m[4] * m[6])
    }

    /// Cofactor matrix; satisfies m · cof(m)ᵀ = det(m) · I.
    pub fn cofactor(&self) -> Self {
        let m = &self.0;
        Mat3([
            m[4] * m[8] - m[5] * m[7],
            -(m[3] * m[8] - m[5] * m[6]),
            m[3] * m[7] - m[4] * m[6],
            -(m[1] * m[8] - m[2] * m[7]),
            m[0] * m[8] - m[2] * m[6],
            -(m[0] * m[7] - m[1] * m[6]),
            m[1] * m[5] - m[2] * m[4],
            -(m[0] * m[5] - m[2] * m[3]),
            m[0] * m[4] - m[1] * m[3],
        ])
    }

    pub fn mat_vec(&self, v: Vec3) -> Vec3 {
        let m = &self.0;
        [
            m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
            m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
            m[6] * v[0] + m[7] * v[1] + m[8] * v[2],
        ]
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, rhs: Mat3) -> Mat3 {
        let mut m = self.0;
        for (e, r) in m.iter_mut().zip(rhs.0.iter()) {
            *e += r;
        }
        Mat3(m)
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, rhs: Mat3) -> Mat3 {
        let mut m = self.0;
        for (e, r) in m.iter_mut().zip(rhs.0.iter()) {
            *e -= r;
        }
        Mat3(m)
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        let mut out = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += self.get(i, k) * rhs.get(k, j);
                }
                out[3 * i + j] = s;
            }
        }
        Mat3(out)
    }
}

/// C = FᵀF, symmetric positive semidefinite.
pub fn right_cauchy_green(f: &Mat3) -> Mat3 {
    f.transpose() * *f
}

pub fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Coefficients (c0, c1) of the affine map s ↦ det(f + s·a⊗b).
///
/// The determinant is affine along rank-one lines:
/// det(f + s·a⊗b) = det(f) + s·aᵀ cof(f) b.
pub fn det_along_rank_one(f: &Mat3, a: Vec3, b: Vec3) -> (f64, f64) {
    let c0 = f.det();
    let c1 = dot3(a, f.cofactor().mat_vec(b));
    (c0, c1)
}
