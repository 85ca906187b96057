//! 1D finite-strain bar under prescribed end displacements.
//!
//! Element kinematics are laterally constrained, F = diag(F_ax, 1, 1)
//! with F_ax = 1 + Δu/h, so the full 3D stored energy is exercised by a
//! one-dimensional unknown field.

use crate::energy::{EnergyModel, EvalDomainError};
use crate::schwarz::NodalProblem;
use crate::solver::Objective;
use crate::tensor::Mat3;

#[derive(Clone, Debug)]
pub struct Bar1DProblem {
    pub n_elements: usize,
    pub length: f64,
    pub area: f64,
    pub model: EnergyModel,
    pub left_disp: f64,
    pub right_disp: f64,
}

impl Bar1DProblem {
    pub fn h(&self) -> f64 {
        self.length / self.n_elements as f64
    }

    pub fn n_nodes(&self) -> usize {
        self.n_elements + 1
    }

    /// Total potential energy Σ W(diag(F_ax, 1, 1)) · area · h.
    pub fn total_energy(&self, u: &[f64]) -> Result<f64, EvalDomainError> {
        assert_eq!(u.len(), self.n_nodes());
        let h = self.h();
        let mut total = 0.0;
        for e in 0..self.n_elements {
            let stretch = 1.0 + (u[e + 1] - u[e]) / h;
            if stretch <= 0.0 {
                return Err(EvalDomainError { j: stretch });
            }
            let w = self.model.energy(&Mat3::diag(stretch, 1.0, 1.0))?;
            total += w * self.area * h;
        }
        Ok(total)
    }

    /// Zero displacement with boundary values applied.
    pub fn initial_state(&self) -> Vec<f64> {
        let mut u = vec![0.0; self.n_nodes()];
        u[0] = self.left_disp;
        *u.last_mut().unwrap() = self.right_disp;
        u
    }

    /// Uniform-stretch configuration matching the boundary data; the
    /// exact minimizer for a homogeneous bar.
    pub fn uniform_stretch_state(&self) -> Vec<f64> {
        let n = self.n_nodes();
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                self.left_disp + t * (self.right_disp - self.left_disp)
            })
            .collect()
    }

    pub fn objective(&self) -> Objective<'_> {
        let n = self.n_nodes();
        let mut fixed = vec![false; n];
        fixed[0] = true;
        fixed[n - 1] = true;
        Objective::new(n, fixed, move |u: &[f64]| {
            self.total_energy(u).unwrap_or(f64::INFINITY)
        })
    }
}

impl NodalProblem for Bar1DProblem {
    fn n_nodes(&self) -> usize {
        Bar1DProblem::n_nodes(self)
    }

    fn dofs_per_node(&self) -> usize {
        1
    }

    fn is_boundary_node(&self, node: usize) -> bool {
        node == 0 || node == self.n_elements
    }

    fn energy(&self, x: &[f64]) -> f64 {
        self.total_energy(x).unwrap_or(f64::INFINITY)
    }
}
