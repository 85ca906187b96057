//! Discrete elastica: a chain of extensible segments with bending
//! stiffness at interior joints, pinned at both ends. The compressed
//! straight state loses stability at the Euler load π²·k_b/L².

use crate::schwarz::NodalProblem;
use crate::solver::Objective;

#[derive(Clone, Debug)]
pub struct ElasticaProblem {
    pub n_nodes: usize,
    pub length: f64,
    /// Axial (stretch) stiffness, force units.
    pub k_s: f64,
    /// Bending stiffness, force·length² units; plays EI.
    pub k_b: f64,
    /// Imposed axial compression of the right support.
    pub end_shortening: f64,
}

impl ElasticaProblem {
    pub fn h(&self) -> f64 {
        self.length / (self.n_nodes - 1) as f64
    }

    pub fn dim(&self) -> usize {
        2 * self.n_nodes
    }

    /// Stretch + bending energy of a configuration of 2D node positions
    /// (interleaved x0, y0, x1, y1, ...). Coincident consecutive nodes
    /// make the turning angle ill-defined and map to +inf.
    pub fn total_energy(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim());
        let n = self.n_nodes;
        let h = self.h();
        let mut energy = 0.0;

        let mut seg = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let dx = x[2 * (i + 1)] - x[2 * i];
            let dy = x[2 * (i + 1) + 1] - x[2 * i + 1];
            let len = (dx * dx + dy * dy).sqrt();
            if len <= 0.0 {
                return f64::INFINITY;
            }
            let strain = len / h - 1.0;
            energy += 0.5 * self.k_s * h * strain * strain;
            seg.push((dx, dy));
        }
        for i in 0..n - 2 {
            let (ax, ay) = seg[i];
            let (bx, by) = seg[i + 1];
            let cross = ax * by - ay * bx;
            let dot = ax * bx + ay * by;
            let theta = cross.atan2(dot);
            energy += 0.5 * self.k_b * theta * theta / h;
        }
        energy
    }

    /// Uniformly compressed straight configuration along the x-axis.
    pub fn straight_state(&self) -> Vec<f64> {
        let n = self.n_nodes;
        let factor = 1.0 - self.end_shortening / self.length;
        let mut x = vec![0.0; self.dim()];
        for i in 0..n {
            x[2 * i] = i as f64 * self.h() * factor;
        }
        x
    }

    /// Adds a transverse half-sine of the given amplitude, zero at the
    /// supports; overlaps the first buckling mode.
    pub fn with_half_sine(&self, base: &[f64], amplitude: f64) -> Vec<f64> {
        let n = self.n_nodes;
        let mut x = base.to_vec();
        for i in 0..n {
            let t = i as f64 / (n - 1) as f64;
            x[2 * i + 1] += amplitude * (std::f64::consts::PI * t).sin();
        }
        x
    }

    /// Largest |y| over all nodes.
    pub fn max_deflection(&self, x: &[f64]) -> f64 {
        (0..self.n_nodes)
            .map(|i| x[2 * i + 1].abs())
            .fold(0.0, f64::max)
    }

    /// Objective with both supports fixed; `axial_only` additionally
    /// freezes every transverse coordinate (used for the straight
    /// compressed reference state).
    pub fn objective(&self, axial_only: bool) -> Objective<'_> {
        let n = self.n_nodes;
        let mut fixed = vec![false; self.dim()];
        fixed[0] = true;
        fixed[1] = true;
        fixed[2 * (n - 1)] = true;
        fixed[2 * (n - 1) + 1] = true;
        if axial_only {
            for i in 0..n {
                fixed[2 * i + 1] = true;
            }
        }
        Objective::new(self.dim(), fixed, move |x: &[f64]| self.total_energy(x))
    }
}

impl NodalProblem for ElasticaProblem {
    fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    fn dofs_per_node(&self) -> usize {
        2
    }

    fn is_boundary_node(&self, node: usize) -> bool {
        node == 0 || node == self.n_nodes - 1
    }

    fn energy(&self, x: &[f64]) -> f64 {
        self.total_energy(x)
    }
}
