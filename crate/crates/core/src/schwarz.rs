//! Multiplicative Schwarz alternation over overlapping node ranges.
//!
//! One sweep visits the subdomains left to right; within a subdomain
//! every node outside it is frozen at its current value (Dirichlet data
//! on the overlap closure) and the interior is minimized with Newton.
//! The sweep order is fixed: ordering sensitivity is not under test.

use crate::solver::{newton_minimize, Objective, SolveResult, SolverError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A nodal minimization problem the Schwarz loop can decompose.
pub trait NodalProblem {
    fn n_nodes(&self) -> usize;
    fn dofs_per_node(&self) -> usize;
    /// Nodes carrying the problem's own boundary conditions; always fixed.
    fn is_boundary_node(&self, node: usize) -> bool;
    /// Total energy of a full configuration; +inf outside the domain.
    fn energy(&self, x: &[f64]) -> f64;

    fn dim(&self) -> usize {
        self.n_nodes() * self.dofs_per_node()
    }
}

/// Overlapping decomposition of the node index range, inclusive ranges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdomainSpec {
    pub ranges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SpecError {
    #[error("decomposition must contain at least one subdomain")]
    Empty,
    #[error("subdomain ({0}, {1}) is malformed")]
    BadRange(usize, usize),
    #[error("subdomains do not cover all {0} nodes")]
    NotCovering(usize),
    #[error("consecutive subdomains share {found} nodes; at least {required} required")]
    InsufficientOverlap { found: usize, required: usize },
    #[error("requested overlap of {0} nodes is below the 2-node minimum")]
    OverlapTooSmall(usize),
}

impl SubdomainSpec {
    pub fn new(ranges: Vec<(usize, usize)>, n_nodes: usize) -> Result<Self, SpecError> {
        let spec = SubdomainSpec { ranges };
        spec.validate(n_nodes)?;
        Ok(spec)
    }

    /// K near-equal subdomains; `overlap_frac` of the chunk length is
    /// shared between neighbours (at least 2 nodes).
    pub fn uniform(n_nodes: usize, k: usize, overlap_frac: f64) -> Result<Self, SpecError> {
        if k == 0 {
            return Err(SpecError::Empty);
        }
        if k == 1 {
            return SubdomainSpec::new(vec![(0, n_nodes - 1)], n_nodes);
        }
        let chunk = (n_nodes - 1) as f64 / k as f64;
        let overlap_nodes = (overlap_frac * chunk).round() as usize;
        if overlap_nodes < 2 {
            return Err(SpecError::OverlapTooSmall(overlap_nodes));
        }
        let half = overlap_nodes.div_ceil(2);
        let cut = |i: usize| ((i as f64) * chunk).round() as usize;
        let mut ranges = Vec::with_capacity(k);
        for i in 0..k {
            let start = if i == 0 { 0 } else { cut(i).saturating_sub(half) };
            let end = if i == k - 1 {
                n_nodes - 1
            } else {
                (cut(i + 1) + half).min(n_nodes - 1)
            };
            ranges.push((start, end));
        }
        SubdomainSpec::new(ranges, n_nodes)
    }

    pub fn validate(&self, n_nodes: usize) -> Result<(), SpecError> {
        if self.ranges.is_empty() {
            return Err(SpecError::Empty);
        }
        let mut covered = vec![false; n_nodes];
        for &(s, e) in &self.ranges {
            if s >= e || e >= n_nodes {
                return Err(SpecError::BadRange(s, e));
            }
            for c in covered.iter_mut().take(e + 1).skip(s) {
                *c = true;
            }
        }
        if !covered.iter().all(|&c| c) {
            return Err(SpecError::NotCovering(n_nodes));
        }
        for w in self.ranges.windows(2) {
            let (_, e0) = w[0];
            let (s1, _) = w[1];
            let shared = if e0 >= s1 { e0 - s1 + 1 } else { 0 };
            if shared < 2 {
                return Err(SpecError::InsufficientOverlap {
                    found: shared,
                    required: 2,
                });
            }
        }
        Ok(())
    }

    /// Reference-length spans of the subdomains, given the node spacing.
    pub fn span_lengths(&self, h: f64) -> Vec<f64> {
        self.ranges.iter().map(|&(s, e)| (e - s) as f64 * h).collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRecord {
    pub sweep: usize,
    pub update_norm: f64,
    pub energy: f64,
    pub error: Option<f64>,
}

/// Per-sweep history of an alternating solve.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SchwarzTrace {
    pub sweeps: Vec<SweepRecord>,
}

impl SchwarzTrace {
    pub fn converged_in(&self, tol: f64) -> bool {
        self.sweeps.last().is_some_and(|s| s.update_norm <= tol)
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Full-domain Newton solve with only the problem's own boundary
/// conditions fixed; the reference the Schwarz iteration is judged
/// against.
pub fn monolithic_solve<P: NodalProblem>(
    problem: &P,
    x0: &[f64],
    tol_grad: f64,
    max_iter: usize,
) -> Result<SolveResult, SolverError> {
    let dofs = problem.dofs_per_node();
    let mut fixed = vec![false; problem.dim()];
    for node in 0..problem.n_nodes() {
        if problem.is_boundary_node(node) {
            for d in 0..dofs {
                fixed[node * dofs + d] = true;
            }
        }
    }
    let obj = Objective::new(problem.dim(), fixed, |x: &[f64]| problem.energy(x));
    newton_minimize(&obj, x0, tol_grad, max_iter)
}

/// Multiplicative Schwarz alternation. Returns the final configuration
/// and the sweep trace; `reference` (typically the monolithic solution)
/// feeds the per-sweep error column.
pub fn schwarz_solve<P: NodalProblem>(
    problem: &P,
    subdomains: &SubdomainSpec,
    x0: &[f64],
    tol_schwarz: f64,
    max_sweeps: usize,
    reference: Option<&[f64]>,
) -> Result<(Vec<f64>, SchwarzTrace), SolverError> {
    subdomains
        .validate(problem.n_nodes())
        .expect("subdomain spec must be valid for the problem");
    let dofs = problem.dofs_per_node();
    let mut x = x0.to_vec();
    let mut trace = SchwarzTrace::default();

    for sweep in 1..=max_sweeps {
        let before = x.clone();
        for &(s, e) in &subdomains.ranges {
            let mut fixed = vec![true; problem.dim()];
            for node in (s + 1)..e {
                if !problem.is_boundary_node(node) {
                    for d in 0..dofs {
                        fixed[node * dofs + d] = false;
                    }
                }
            }
            let obj = Objective::new(problem.dim(), fixed, |x: &[f64]| problem.energy(x));
            // Local solves must be tighter than the sweep tolerance or the
            // alternation stagnates at a fixed point offset of roughly
            // local_tol / k_min from the monolithic solution.
            let local_tol = (tol_schwarz * 0.1).min(crate::solver::DEFAULT_TOL_GRAD);
            let local = newton_minimize(&obj, &x, local_tol, 200)?;
            x = local.x;
        }
        let update_norm = max_abs_diff(&x, &before);
        trace.sweeps.push(SweepRecord {
            sweep,
            update_norm,
            energy: problem.energy(&x),
            error: reference.map(|r| max_abs_diff(&x, r)),
        });
        if update_norm <= tol_schwarz {
            break;
        }
    }
    Ok((x, trace))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub rho: f64,
    pub r_squared: f64,
    pub sweeps_used: usize,
}

#[derive(Clone, Debug, Error, PartialEq)]
#[error("need at least 5 pre-stagnation sweeps with error > 1e-13, found {0}")]
pub struct FitError(pub usize);

/// Least-squares fit of ln(error_k) = ln C + k·ln ρ over the sweeps
/// whose error is above stagnation (1e-13).
pub fn convergence_rate_fit(trace: &SchwarzTrace) -> Result<RateFit, FitError> {
    let pts: Vec<(f64, f64)> = trace
        .sweeps
        .iter()
        .filter_map(|s| s.error.filter(|&e| e > 1e-13).map(|e| (s.sweep as f64, e.ln())))
        .collect();
    if pts.len() < 5 {
        return Err(FitError(pts.len()));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(RateFit {
        rho: slope.exp(),
        r_squared,
        sweeps_used: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bar::Bar1DProblem;
    use crate::energy::{EnergyModel, ModelKind};
    use approx::assert_abs_diff_eq;

    fn bar(n_elements: usize, stretch: f64) -> Bar1DProblem {
        Bar1DProblem {
            n_elements,
            length: 1.0,
            area: 1.0,
            model: EnergyModel::new(ModelKind::NeoHookeanEq3, 4.0, 2.0).unwrap(),
            left_disp: 0.0,
            right_disp: stretch,
        }
    }

    #[test]
    fn uniform_spec_covers_and_overlaps() {
        let spec = SubdomainSpec::uniform(41, 2, 0.2).unwrap();
        assert_eq!(spec.ranges.len(), 2);
        spec.validate(41).unwrap();
        let (_, e0) = spec.ranges[0];
        let (s1, _) = spec.ranges[1];
        assert!(e0 - s1 + 1 >= 2);
    }

    #[test]
    fn zero_overlap_is_rejected() {
        assert!(matches!(
            SubdomainSpec::uniform(41, 2, 0.0),
            Err(SpecError::OverlapTooSmall(_))
        ));
    }

    #[test]
    fn gap_is_rejected() {
        let err = SubdomainSpec::new(vec![(0, 10), (20, 40)], 41).unwrap_err();
        assert!(matches!(err, SpecError::InsufficientOverlap { .. } | SpecError::NotCovering(_)));
    }

    #[test]
    fn monolithic_bar_reaches_uniform_stretch() {
        let p = bar(12, 0.1);
        let r = monolithic_solve(&p, &p.initial_state(), 1e-10, 100).unwrap();
        assert!(r.converged);
        let exact = p.uniform_stretch_state();
        assert!(max_abs_diff(&r.x, &exact) <= 1e-8);
        assert!(r.min_eigenvalue > 0.0);
    }

    #[test]
    fn monolithic_solution_is_a_schwarz_fixed_point() {
        let p = bar(12, 0.1);
        let mono = monolithic_solve(&p, &p.initial_state(), 1e-10, 100).unwrap();
        let spec = SubdomainSpec::uniform(13, 2, 0.4).unwrap();
        let (_, trace) = schwarz_solve(&p, &spec, &mono.x, 1e-8, 5, Some(&mono.x)).unwrap();
        assert_eq!(trace.sweeps.len(), 1);
        assert!(trace.sweeps[0].update_norm <= 1e-8);
    }

    #[test]
    fn schwarz_converges_to_monolithic_on_bar() {
        let p = bar(20, 0.1);
        let mono = monolithic_solve(&p, &p.initial_state(), 1e-11, 100).unwrap();
        let spec = SubdomainSpec::uniform(21, 2, 0.2).unwrap();
        let (x, trace) =
            schwarz_solve(&p, &spec, &p.initial_state(), 1e-10, 200, Some(&mono.x)).unwrap();
        assert!(trace.converged_in(1e-10));
        assert!(max_abs_diff(&x, &mono.x) <= 1e-8);
    }

    #[test]
    fn single_subdomain_matches_monolithic_in_one_sweep() {
        let p = bar(10, 0.1);
        let mono = monolithic_solve(&p, &p.initial_state(), 1e-10, 100).unwrap();
        let spec = SubdomainSpec::uniform(11, 1, 0.2).unwrap();
        let (x, _) = schwarz_solve(&p, &spec, &p.initial_state(), 1e-9, 10, None).unwrap();
        assert!(max_abs_diff(&x, &mono.x) <= 1e-8);
    }

    #[test]
    fn rate_fit_recovers_synthetic_decay() {
        let mut trace = SchwarzTrace::default();
        for k in 1..=10 {
            trace.sweeps.push(SweepRecord {
                sweep: k,
                update_norm: 0.0,
                energy: 0.0,
                error: Some(0.5f64.powi(k as i32)),
            });
        }
        let fit = convergence_rate_fit(&trace).unwrap();
        assert_abs_diff_eq!(fit.rho, 0.5, epsilon = 1e-6);
        assert!(fit.r_squared > 0.999999);
    }

    #[test]
    fn rate_fit_needs_enough_sweeps() {
        let trace = SchwarzTrace::default();
        assert_eq!(convergence_rate_fit(&trace), Err(FitError(0)));
    }

    #[test]
    fn bar_decay_is_geometric_and_overlap_helps() {
        let p = bar(40, 0.1);
        let mono = monolithic_solve(&p, &p.initial_state(), 1e-12, 100).unwrap();
        let mut rhos = Vec::new();
        for overlap in [0.2, 0.4] {
            let spec = SubdomainSpec::uniform(41, 2, overlap).unwrap();
            let (_, trace) =
                schwarz_solve(&p, &spec, &p.initial_state(), 1e-12, 300, Some(&mono.x)).unwrap();
            let fit = convergence_rate_fit(&trace).unwrap();
            assert!(fit.rho > 0.0 && fit.rho < 1.0, "rho = {}", fit.rho);
            assert!(fit.r_squared >= 0.95, "r² = {}", fit.r_squared);
            rhos.push(fit.rho);
        }
        assert!(rhos[1] < rhos[0], "larger overlap should converge faster: {rhos:?}");
    }
}
