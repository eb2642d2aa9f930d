//! Radial potential profiles on the compactified coordinate.
//!
//! A U(n)-invariant metric in the fixed Kähler class is described by a
//! potential u(ρ), ρ = log|z|², with u′ ∈ (0, 1). The reference profile
//! u₀ = log(1 + e^ρ) (u₀′ = x, the compactified coordinate
//! x = e^ρ/(1+e^ρ)) is kept analytically and only the deviation
//! p = u − u₀ is stored on the grid: u itself diverges like −log(1−x)
//! at the far end, while p extends to a smooth function on [0, 1] for
//! any metric in the class. All ρ-derivatives are exact in the
//! reference part and fourth-order finite differences in p.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("metric positivity fails at node {node} (x = {x:.4}), t = {time:.4}: {what}")]
    MetricDegenerate {
        node: usize,
        x: f64,
        time: f64,
        what: String,
    },
    #[error("time step underflow at t = {time:.4} (CFL)")]
    CflFailure { time: f64 },
    #[error("bad flow configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Curvature(#[from] crate::tensor::CurvatureError),
}

/// ρ-derivatives of the potential at one node, plus the regularized
/// metric ratios used by the flow equation.
#[derive(Clone, Copy, Debug, Default)]
pub struct PotentialDerivs {
    pub x: f64,
    /// u′, u″, u‴, u⁗ with respect to ρ.
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
    pub u4: f64,
    /// u′/x = 1 + (1−x)p_x, finite on the whole closed interval.
    pub ratio1: f64,
    /// u″/(x(1−x)) = 1 + (1−2x)p_x + x(1−x)p_xx, likewise finite.
    pub ratio2: f64,
}

/// Fornberg weights: coefficients of the m-th derivative at `z` from
/// samples at `grid` points. Exact for polynomials up to the window size.
fn fornberg_weights(z: f64, grid: &[f64], m: usize) -> Vec<f64> {
    let nd = grid.len();
    let mut c = vec![vec![0.0; m + 1]; nd];
    let mut c1 = 1.0;
    let mut c4 = grid[0] - z;
    c[0][0] = 1.0;
    for i in 1..nd {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = grid[i] - z;
        for j in 0..i {
            let c3 = grid[i] - grid[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Stencil table for derivative orders 1..=4 on a uniform grid, windows
/// of nine nodes shifted at the boundary (order ≥ 5 everywhere).
#[derive(Clone, Debug)]
pub struct StencilTable {
    window: usize,
    /// weights[m-1][node] = (start, w[0..window])
    weights: Vec<Vec<(usize, Vec<f64>)>>,
}

impl StencilTable {
    pub fn new(nodes: usize) -> Self {
        let window = 9.min(nodes + 1);
        let h = 1.0 / nodes as f64;
        let mut weights = Vec::with_capacity(4);
        for m in 1..=4 {
            let mut per_node = Vec::with_capacity(nodes + 1);
            for j in 0..=nodes {
                let start = j
                    .saturating_sub(window / 2)
                    .min(nodes + 1 - window);
                let grid: Vec<f64> = (0..window).map(|k| (start + k) as f64 * h).collect();
                let w = fornberg_weights(j as f64 * h, &grid, m);
                per_node.push((start, w));
            }
            weights.push(per_node);
        }
        Self { window, weights }
    }

    /// m-th x-derivative of the sampled values at node j.
    #[inline]
    pub fn derivative(&self, values: &[f64], m: usize, j: usize) -> f64 {
        let (start, w) = &self.weights[m - 1][j];
        let mut acc = 0.0;
        for k in 0..self.window {
            acc += w[k] * values[start + k];
        }
        acc
    }
}

/// A radial potential profile: the complex dimension, the grid size and
/// the deviation p from the reference profile at the N+1 nodes.
#[derive(Clone, Debug)]
pub struct RadialPotential {
    n: usize,
    nodes: usize,
    dev: Vec<f64>,
    stencils: StencilTable,
}

impl RadialPotential {
    /// The reference profile itself (zero deviation): u = log(1 + e^ρ).
    pub fn fs(n: usize, nodes: usize) -> Result<Self, FlowError> {
        Self::from_deviation(n, nodes, vec![0.0; nodes + 1])
    }

    /// Bump-modulated sinusoidal perturbation of the reference profile:
    /// p(x) = amplitude · b(x) · sin(mode·π·x + φ) with b = (4x(1−x))⁴
    /// and φ a seeded phase, so distinct seeds give distinct profiles in
    /// the same family. Metric positivity is validated.
    pub fn perturbed(
        n: usize,
        nodes: usize,
        amplitude: f64,
        mode: usize,
        seed: u64,
    ) -> Result<Self, FlowError> {
        use rand::{Rng, SeedableRng};
        let phase = if amplitude == 0.0 {
            0.0
        } else {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            rng.gen::<f64>() * 2.0 * std::f64::consts::PI
        };
        let dev = (0..=nodes)
            .map(|j| {
                let x = j as f64 / nodes as f64;
                let b = (4.0 * x * (1.0 - x)).powi(4);
                amplitude * b * (mode as f64 * std::f64::consts::PI * x + phase).sin()
            })
            .collect();
        Self::from_deviation(n, nodes, dev)
    }

    /// Wrap a deviation profile, validating dimensions and positivity.
    pub fn from_deviation(n: usize, nodes: usize, dev: Vec<f64>) -> Result<Self, FlowError> {
        if n < 2 {
            return Err(FlowError::BadConfig(format!(
                "complex dimension must be at least 2, got {n}"
            )));
        }
        if nodes < 16 || nodes % 2 != 0 {
            return Err(FlowError::BadConfig(format!(
                "grid size must be even and at least 16, got {nodes}"
            )));
        }
        if dev.len() != nodes + 1 {
            return Err(FlowError::BadConfig(format!(
                "deviation has {} values, expected {}",
                dev.len(),
                nodes + 1
            )));
        }
        let p = Self {
            n,
            nodes,
            dev,
            stencils: StencilTable::new(nodes),
        };
        p.validate_metric(0.0)?;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 / self.nodes as f64
    }

    pub fn deviation(&self) -> &[f64] {
        &self.dev
    }

    pub fn stencils(&self) -> &StencilTable {
        &self.stencils
    }

    /// Replace the deviation values (same grid), without re-validating.
    pub(crate) fn with_deviation(&self, dev: Vec<f64>) -> Self {
        Self {
            n: self.n,
            nodes: self.nodes,
            dev,
            stencils: self.stencils.clone(),
        }
    }

    /// ρ-derivatives u′..u⁗ and metric ratios at node j.
    ///
    /// With w = x(1−x) and T = w·d/dx the chain rule gives
    /// u⁽ᵐ⁾ = reference part + Tᵐp; the reference parts are x, w, ww′
    /// and w(w′² + ww″) respectively (w″ = −2, w‴ = 0).
    pub fn derivs(&self, j: usize) -> PotentialDerivs {
        let x = self.x(j);
        let w = x * (1.0 - x);
        let wp = 1.0 - 2.0 * x;
        let wpp = -2.0;
        let p1 = self.stencils.derivative(&self.dev, 1, j);
        let p2 = self.stencils.derivative(&self.dev, 2, j);
        let p3 = self.stencils.derivative(&self.dev, 3, j);
        let p4 = self.stencils.derivative(&self.dev, 4, j);
        let t1 = w * p1;
        let t2 = w * (wp * p1 + w * p2);
        let g = (wp * wp + w * wpp) * p1 + 3.0 * w * wp * p2 + w * w * p3;
        let t3 = w * g;
        let gp = 3.0 * wp * wpp * p1
            + 4.0 * (wp * wp + w * wpp) * p2
            + 5.0 * w * wp * p3
            + w * w * p4;
        let t4 = w * (wp * g + w * gp);
        PotentialDerivs {
            x,
            u1: x + t1,
            u2: w + t2,
            u3: w * wp + t3,
            u4: w * (wp * wp + w * wpp) + t4,
            ratio1: 1.0 + (1.0 - x) * p1,
            ratio2: 1.0 + wp * p1 + w * p2,
        }
    }

    /// Kähler positivity: u′ > 0 and u″ > 0 on the open interval, i.e.
    /// both regularized ratios positive at every node.
    pub fn validate_metric(&self, time: f64) -> Result<(), FlowError> {
        for j in 0..=self.nodes {
            let d = self.derivs(j);
            if d.ratio1 <= 0.0 || d.ratio2 <= 0.0 {
                let what = if d.ratio1 <= 0.0 {
                    format!("u'/x = {:.4e}", d.ratio1)
                } else {
                    format!("u''/(x(1-x)) = {:.4e}", d.ratio2)
                };
                return Err(FlowError::MetricDegenerate {
                    node: j,
                    x: d.x,
                    time,
                    what,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_reproduces_centered_second_derivative() {
        let grid = [-1.0, 0.0, 1.0];
        let w = fornberg_weights(0.0, &grid, 2);
        assert!((w[0] - 1.0).abs() < 1e-14);
        assert!((w[1] + 2.0).abs() < 1e-14);
        assert!((w[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn stencils_differentiate_polynomials_exactly() {
        let nodes = 32;
        let st = StencilTable::new(nodes);
        // x^5 has exact derivatives under a 9-point stencil.
        let vals: Vec<f64> = (0..=nodes)
            .map(|j| (j as f64 / nodes as f64).powi(5))
            .collect();
        for j in [0, 1, 4, 16, 29, 31, 32] {
            let x = j as f64 / nodes as f64;
            let d1 = st.derivative(&vals, 1, j);
            let d4 = st.derivative(&vals, 4, j);
            assert!((d1 - 5.0 * x.powi(4)).abs() < 1e-9, "d1 at {j}");
            assert!((d4 - 120.0 * x).abs() < 1e-6, "d4 at {j}");
        }
    }

    #[test]
    fn fs_profile_matches_closed_forms() {
        let p = RadialPotential::fs(2, 64).unwrap();
        for j in 0..=64 {
            let d = p.derivs(j);
            let x = d.x;
            let w = x * (1.0 - x);
            assert!((d.u1 - x).abs() < 1e-14);
            assert!((d.u2 - w).abs() < 1e-14);
            assert!((d.u3 - w * (1.0 - 2.0 * x)).abs() < 1e-14);
            assert!((d.u4 - w * (1.0 - 6.0 * x + 6.0 * x * x)).abs() < 1e-13);
            assert!((d.ratio1 - 1.0).abs() < 1e-14);
            assert!((d.ratio2 - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn smooth_deviation_derivatives_converge_at_fourth_order() {
        // p(x) = sin(2πx)·(x(1−x))²: analytic first and second
        // derivatives, error should fall by well over 2⁴ per doubling.
        let tau = 2.0 * std::f64::consts::PI;
        let reference = |x: f64| {
            let q = (x * (1.0 - x)).powi(2);
            let qp = 2.0 * (x - x * x) * (1.0 - 2.0 * x);
            let qpp = 2.0 * ((1.0 - 2.0 * x).powi(2) - 2.0 * (x - x * x));
            let s = (tau * x).sin();
            let sp = tau * (tau * x).cos();
            let spp = -tau * tau * s;
            (sp * q + s * qp, spp * q + 2.0 * sp * qp + s * qpp)
        };
        let make = |nodes: usize| {
            let dev: Vec<f64> = (0..=nodes)
                .map(|j| {
                    let x = j as f64 / nodes as f64;
                    (tau * x).sin() * (x * (1.0 - x)).powi(2)
                })
                .collect();
            RadialPotential::from_deviation(2, nodes, dev).unwrap()
        };
        let mut errs = Vec::new();
        for nodes in [32usize, 64, 128] {
            let p = make(nodes);
            let j = nodes / 4; // x = 0.25
            let (d1_ref, d2_ref) = reference(0.25);
            let d1 = p.stencils.derivative(p.deviation(), 1, j);
            let d2 = p.stencils.derivative(p.deviation(), 2, j);
            errs.push(((d1 - d1_ref).abs()).max((d2 - d2_ref).abs() / 10.0));
        }
        assert!(errs[1] < errs[0] / 12.0, "{errs:?}");
        assert!(errs[2] < errs[1] / 12.0, "{errs:?}");
    }

    #[test]
    fn gross_perturbation_is_degenerate() {
        match RadialPotential::perturbed(2, 128, 10.0, 1, 1) {
            Err(FlowError::MetricDegenerate { .. }) => {}
            other => panic!("expected MetricDegenerate, got {other:?}"),
        }
    }

    #[test]
    fn zero_amplitude_is_exactly_fs() {
        let a = RadialPotential::perturbed(2, 128, 0.0, 5, 9).unwrap();
        let b = RadialPotential::fs(2, 128).unwrap();
        assert_eq!(a.deviation(), b.deviation());
    }

    #[test]
    fn modest_perturbation_is_valid() {
        let p = RadialPotential::perturbed(2, 128, 0.05, 2, 1).unwrap();
        p.validate_metric(0.0).unwrap();
        assert!(p.deviation().iter().any(|v| v.abs() > 1e-4));
    }
}
