//! Regularized Newton minimization with finite-difference derivatives.
//!
//! All problems here are small (≤ ~400 free coordinates), so dense
//! symmetric factorizations and eigen-decompositions are used throughout.

use crate::energy::EPS_CBRT;
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Objective over a flat configuration vector with a fixed-coordinate
/// mask. Fixed coordinates take their values from the initial iterate
/// and are never modified by the solver.
pub struct Objective<'a> {
    pub dim: usize,
    pub fixed: Vec<bool>,
    eval: Box<dyn Fn(&[f64]) -> f64 + 'a>,
}

impl<'a> Objective<'a> {
    pub fn new(dim: usize, fixed: Vec<bool>, eval: impl Fn(&[f64]) -> f64 + 'a) -> Self {
        assert_eq!(fixed.len(), dim);
        Objective {
            dim,
            fixed,
            eval: Box::new(eval),
        }
    }

    pub fn energy(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub fn free_indices(&self) -> Vec<usize> {
        (0..self.dim).filter(|&i| !self.fixed[i]).collect()
    }
}

#[derive(Clone, Debug, Error)]
pub enum SolverError {
    #[error("non-finite energy at a probe point (coordinate {coord})")]
    NonFiniteEnergy { coord: usize },
    #[error("non-finite energy at the initial iterate")]
    NonFiniteStart,
}

/// Central-difference gradient, h = eps^{1/3}·max(1, |x_i|) per
/// coordinate; entries at fixed coordinates are zero.
pub fn gradient_fd(obj: &Objective, x: &[f64]) -> Result<Vec<f64>, SolverError> {
    let mut g = vec![0.0; obj.dim];
    let mut xp = x.to_vec();
    for i in 0..obj.dim {
        if obj.fixed[i] {
            continue;
        }
        let h = EPS_CBRT * 1.0f64.max(x[i].abs());
        xp[i] = x[i] + h;
        let fp = obj.energy(&xp);
        xp[i] = x[i] - h;
        let fm = obj.energy(&xp);
        xp[i] = x[i];
        if !fp.is_finite() || !fm.is_finite() {
            return Err(SolverError::NonFiniteEnergy { coord: i });
        }
        g[i] = (fp - fm) / (2.0 * h);
    }
    Ok(g)
}

/// Symmetrized central-difference Hessian over the free coordinates.
pub fn hessian_fd(obj: &Objective, x: &[f64]) -> Result<DMatrix<f64>, SolverError> {
    let free = obj.free_indices();
    let n = free.len();
    let mut h = DMatrix::zeros(n, n);
    let mut xp = x.to_vec();
    for (col, &j) in free.iter().enumerate() {
        let step = EPS_CBRT * 1.0f64.max(x[j].abs());
        xp[j] = x[j] + step;
        let gp = gradient_fd(obj, &xp)?;
        xp[j] = x[j] - step;
        let gm = gradient_fd(obj, &xp)?;
        xp[j] = x[j];
        for (row, &i) in free.iter().enumerate() {
            h[(row, col)] = (gp[i] - gm[i]) / (2.0 * step);
        }
    }
    // symmetrize
    let ht = h.transpose();
    Ok((h + ht) * 0.5)
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub x: Vec<f64>,
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Smallest eigenvalue of the unregularized reduced Hessian at the
    /// final iterate.
    pub min_eigenvalue: f64,
}

pub const DEFAULT_TOL_GRAD: f64 = 1e-10;

fn reduced(g: &[f64], free: &[usize]) -> DVector<f64> {
    DVector::from_iterator(free.len(), free.iter().map(|&i| g[i]))
}

fn free_grad_norm(g: &[f64], free: &[usize]) -> f64 {
    free.iter().map(|&i| g[i] * g[i]).sum::<f64>().sqrt()
}

/// Solves (H + τI) d = −g with τ escalated ×10 from 1e-8·‖H‖ until the
/// shifted matrix admits a Cholesky factorization.
fn regularized_step(h: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let n = h.nrows();
    let scale = h.amax().max(1e-300);
    // reject factorizations of barely-positive shifts, which produce
    // steps of unusable length
    let pivot_floor = (1e-8 * scale).sqrt();
    let well_conditioned = |ch: &nalgebra::Cholesky<f64, nalgebra::Dyn>| {
        (0..n).all(|i| ch.l_dirty()[(i, i)] >= pivot_floor)
    };
    if let Some(ch) = nalgebra::Cholesky::new(h.clone()) {
        if well_conditioned(&ch) {
            return ch.solve(&(-g));
        }
    }
    let mut tau = 1e-8 * scale;
    loop {
        let shifted = h + DMatrix::identity(n, n) * tau;
        if let Some(ch) = nalgebra::Cholesky::new(shifted) {
            if well_conditioned(&ch) {
                return ch.solve(&(-g));
            }
        }
        tau *= 10.0;
    }
}

/// Regularized Newton with Armijo backtracking (factor 0.5, c = 1e-4).
///
/// Fixed coordinates keep the values they have in `x0`. Line-search
/// failure (α < 1e-12) or iteration exhaustion returns
/// `converged = false` rather than an error.
pub fn newton_minimize(
    obj: &Objective,
    x0: &[f64],
    tol_grad: f64,
    max_iter: usize,
) -> Result<SolveResult, SolverError> {
    let free = obj.free_indices();
    let mut x = x0.to_vec();
    let mut energy = obj.energy(&x);
    if !energy.is_finite() {
        return Err(SolverError::NonFiniteStart);
    }

    let mut converged = false;
    let mut iterations = 0;
    let mut grad_norm;
    loop {
        let g = gradient_fd(obj, &x)?;
        grad_norm = free_grad_norm(&g, &free);
        if grad_norm <= tol_grad {
            converged = true;
            break;
        }
        if iterations >= max_iter || free.is_empty() {
            break;
        }
        iterations += 1;

        let h = hessian_fd(obj, &x)?;
        let gr = reduced(&g, &free);
        let d = regularized_step(&h, &gr);
        let slope = gr.dot(&d);

        // Armijo backtracking
        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha >= 1e-12 {
            let mut trial = x.clone();
            for (k, &i) in free.iter().enumerate() {
                trial[i] = x[i] + alpha * d[k];
            }
            let e_trial = obj.energy(&trial);
            // The slack term keeps the search usable once predicted
            // decreases drop below energy-evaluation roundoff; without it
            // the last few digits of the minimizer are unreachable.
            let slack = 1e-14 * (1.0 + energy.abs());
            if e_trial.is_finite() && e_trial <= energy + 1e-4 * alpha * slope + slack {
                x = trial;
                energy = e_trial;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break; // line-search failure; report unconverged
        }
    }

    let min_eigenvalue = if free.is_empty() {
        f64::INFINITY
    } else {
        let h = hessian_fd(obj, &x)?;
        let eig = nalgebra::SymmetricEigen::new(h);
        eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    };

    Ok(SolveResult {
        x,
        energy,
        grad_norm,
        iterations,
        converged,
        min_eigenvalue,
    })
}

/// The k smallest eigenvalues of the reduced Hessian, ascending.
pub fn stability_spectrum(obj: &Objective, x: &[f64], k: usize) -> Result<Vec<f64>, SolverError> {
    let h = hessian_fd(obj, x)?;
    let eig = nalgebra::SymmetricEigen::new(h);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals.truncate(k);
    Ok(vals)
}
