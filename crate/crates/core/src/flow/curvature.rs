//! Curvature of a radial potential at a grid node.
//!
//! At the representative point z = (e^{ρ/2}, 0, …, 0) the isotropy group
//! U(n−1) forces the unitary-frame curvature of a U(n)-invariant metric
//! into four component types:
//!
//! * `a_rad`  — R(ε₁, ε̄₁, ε₁, ε̄₁), the radial holomorphic sectional;
//! * `b_rt`   — R(ε₁, ε̄₁, ε_a, ε̄_a), radial–transverse bisectional;
//! * `c_tan`  — R(ε_a, ε̄_a, ε_a, ε̄_a), the transverse holomorphic
//!   sectional, always equal to 2·d_tt;
//! * `d_tt`   — R(ε_a, ε̄_a, ε_b, ε̄_b), a ≠ b, present for n ≥ 3.
//!
//! Every balanced entry is one of these; unbalanced entries vanish.
//! The closed forms in ρ-derivatives follow from
//! R_{i j̄ k l̄} = −∂_k∂_l̄ g_{i j̄} + g^{p q̄}(∂_k g_{i q̄})(∂_l̄ g_{p j̄}):
//!
//!   a_rad = (−(u⁗ − 2u‴ + u″) + (u‴ − u″)²/u″) / (u″)²
//!   b_rt  = (−(u‴ − 2u″ + u′) + (u″ − u′)²/u′) / (u″·u′)
//!   d_tt  = −(u″ − u′)/(u′)²
//!
//! For the reference profile these evaluate to (2, 1, 1): the constant
//! curvature model with holomorphic sectional curvature 2.

use num_complex::Complex64;

use super::potential::{FlowError, RadialPotential};
use crate::tensor::KahlerCurvatureTensor;

/// Unitary-frame curvature components at one node.
#[derive(Clone, Copy, Debug)]
pub struct NodeCurvature {
    pub n: usize,
    pub a_rad: f64,
    pub b_rt: f64,
    pub d_tt: f64,
}

impl NodeCurvature {
    pub fn c_tan(&self) -> f64 {
        2.0 * self.d_tt
    }

    /// Frame Ricci eigenvalue in the radial direction.
    pub fn ricci_radial(&self) -> f64 {
        self.a_rad + (self.n as f64 - 1.0) * self.b_rt
    }

    /// Frame Ricci eigenvalue in any transverse direction.
    pub fn ricci_transverse(&self) -> f64 {
        self.b_rt + self.n as f64 * self.d_tt
    }

    pub fn ricci_min(&self) -> f64 {
        self.ricci_radial().min(self.ricci_transverse())
    }

    pub fn scalar(&self) -> f64 {
        self.ricci_radial() + (self.n as f64 - 1.0) * self.ricci_transverse()
    }

    /// Rescale frame components (curvature of λg is 1/λ times that of g).
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            a_rad: s * self.a_rad,
            b_rt: s * self.b_rt,
            d_tt: s * self.d_tt,
        }
    }

    /// Holomorphic sectional curvature along a direction with radial
    /// weight m = |v₁|²: f(m) = a·m² + 4b·m(1−m) + 2d·(1−m)². The
    /// minimum over the segment is exact.
    pub fn holsec_min(&self) -> f64 {
        let (a, b, d) = (self.a_rad, self.b_rt, self.d_tt);
        let f = |m: f64| a * m * m + 4.0 * b * m * (1.0 - m) + 2.0 * d * (1.0 - m) * (1.0 - m);
        let mut best = f(0.0).min(f(1.0));
        // f(m) = αm² + βm + γ with α = a − 4b + 2d, β = 4b − 4d.
        let alpha = a - 4.0 * b + 2.0 * d;
        if alpha > 0.0 {
            let m = -(4.0 * b - 4.0 * d) / (2.0 * alpha);
            if m > 0.0 && m < 1.0 {
                best = best.min(f(m));
            }
        }
        best
    }

    /// Minimum orthogonal bisectional curvature. With s = |X₁|²,
    /// t = |Y₁|², orthogonality pins the cross terms and the objective
    /// becomes bilinear in (s, t); the exact minimum over the feasible
    /// region is a vertex/edge minimum:
    /// min(b, (a+2d)/4) for n = 2, additionally d for n ≥ 3.
    pub fn orthbis_min(&self) -> f64 {
        let corner = (self.a_rad + 2.0 * self.d_tt) / 4.0;
        let m = self.b_rt.min(corner);
        if self.n >= 3 {
            m.min(self.d_tt)
        } else {
            m
        }
    }

    /// Pinching ratio minimum over unit pairs (X, Y). By invariance the
    /// objective depends on s = |X₁|², t = |Y₁|², m = |⟨X_t, Y_t⟩| and a
    /// relative phase entering only through γ = ±√(st)·m:
    ///
    ///   num = a·st + b(s(1−t) + t(1−s) ± 2√(st)m) + d((1−s)(1−t) + m²)
    ///   den = 1 + st + m² ± 2√(st)m
    ///
    /// For n = 2, m is pinned at √((1−s)(1−t)); for n ≥ 3 it ranges over
    /// [0, √((1−s)(1−t))]. A shrinking-grid search is exact to ~1e−7 on
    /// these smooth low-dimensional landscapes.
    pub fn mu_star(&self) -> f64 {
        let (a, b, d) = (self.a_rad, self.b_rt, self.d_tt);
        let nfree = self.n >= 3;
        let ratio = |s: f64, t: f64, fm: f64| -> f64 {
            let mmax = ((1.0 - s) * (1.0 - t)).max(0.0).sqrt();
            let m = if nfree { fm * mmax } else { mmax };
            let base_num = a * s * t
                + b * (s * (1.0 - t) + t * (1.0 - s))
                + d * ((1.0 - s) * (1.0 - t) + m * m);
            let base_den = 1.0 + s * t + m * m;
            let g = (s * t).sqrt() * m;
            let r_plus = (base_num + 2.0 * b * g) / (base_den + 2.0 * g);
            let r_minus = (base_num - 2.0 * b * g) / (base_den - 2.0 * g);
            r_plus.min(r_minus)
        };
        let mut best = f64::INFINITY;
        let mut center = (0.5, 0.5, 0.5);
        let mut half = 0.5;
        let steps = 12usize;
        for round in 0..4 {
            let (cs, ct, cf) = center;
            let lo = |c: f64| (c - half).max(0.0);
            let hi = |c: f64| (c + half).min(1.0);
            let mut local_best = f64::INFINITY;
            let mut local_arg = center;
            for is in 0..=steps {
                let s = lo(cs) + (hi(cs) - lo(cs)) * is as f64 / steps as f64;
                for it in 0..=steps {
                    let t = lo(ct) + (hi(ct) - lo(ct)) * it as f64 / steps as f64;
                    let fms = if nfree { steps } else { 0 };
                    for ifm in 0..=fms {
                        let fm = if nfree {
                            lo(cf) + (hi(cf) - lo(cf)) * ifm as f64 / fms.max(1) as f64
                        } else {
                            1.0
                        };
                        let v = ratio(s, t, fm);
                        if v < local_best {
                            local_best = v;
                            local_arg = (s, t, fm);
                        }
                    }
                }
            }
            best = best.min(local_best);
            center = local_arg;
            half *= if round == 0 { 0.12 } else { 0.25 };
        }
        best
    }

    /// Assemble the full unitary-frame tensor with these components.
    pub fn to_tensor(&self) -> KahlerCurvatureTensor {
        let n = self.n;
        let flat = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;
        let mut e = vec![Complex64::new(0.0, 0.0); n * n * n * n];
        e[flat(0, 0, 0, 0)] = Complex64::new(self.a_rad, 0.0);
        for a in 1..n {
            for &idx in &[
                flat(0, 0, a, a),
                flat(a, a, 0, 0),
                flat(0, a, a, 0),
                flat(a, 0, 0, a),
            ] {
                e[idx] = Complex64::new(self.b_rt, 0.0);
            }
        }
        for a in 1..n {
            for b in 1..n {
                // d_tt · (δ_{ab}δ_{cd} + δ_{ad}δ_{cb}) over transverse slots
                e[flat(a, a, b, b)] += Complex64::new(self.d_tt, 0.0);
                e[flat(a, b, b, a)] += Complex64::new(self.d_tt, 0.0);
            }
        }
        KahlerCurvatureTensor::from_entries(e, n).expect("structure tensor is symmetric")
    }
}

/// Curvature components of the metric g_u itself at node j (for the
/// reference profile: (2, 1, 1) at every node).
///
/// Boundary nodes are evaluated by one-sided fourth-order extrapolation
/// of the interior component profiles; the components extend smoothly
/// across both ends for any metric in the class.
pub fn node_curvature_raw(p: &RadialPotential, j: usize) -> Result<NodeCurvature, FlowError> {
    let nodes = p.nodes();
    if j == 0 || j == nodes {
        let pick = |k: usize| -> Result<NodeCurvature, FlowError> {
            node_curvature_interior(p, k)
        };
        let idx: Vec<usize> = if j == 0 {
            (1..=5).collect()
        } else {
            (nodes - 5..=nodes - 1).rev().collect()
        };
        let w = [5.0, -10.0, 10.0, -5.0, 1.0];
        let mut a = 0.0;
        let mut b = 0.0;
        let mut d = 0.0;
        for (wk, &k) in w.iter().zip(idx.iter()) {
            let c = pick(k)?;
            a += wk * c.a_rad;
            b += wk * c.b_rt;
            d += wk * c.d_tt;
        }
        return Ok(NodeCurvature {
            n: p.dim(),
            a_rad: a,
            b_rt: b,
            d_tt: d,
        });
    }
    node_curvature_interior(p, j)
}

fn node_curvature_interior(p: &RadialPotential, j: usize) -> Result<NodeCurvature, FlowError> {
    let d = p.derivs(j);
    if d.ratio1 <= 0.0 || d.ratio2 <= 0.0 {
        return Err(FlowError::MetricDegenerate {
            node: j,
            x: d.x,
            time: f64::NAN,
            what: "metric positivity lost".into(),
        });
    }
    let (u1, u2, u3, u4) = (d.u1, d.u2, d.u3, d.u4);
    let a_rad = (-(u4 - 2.0 * u3 + u2) + (u3 - u2) * (u3 - u2) / u2) / (u2 * u2);
    let b_rt = (-(u3 - 2.0 * u2 + u1) + (u2 - u1) * (u2 - u1) / u1) / (u2 * u1);
    let d_tt = -(u2 - u1) / (u1 * u1);
    Ok(NodeCurvature {
        n: p.dim(),
        a_rad,
        b_rt,
        d_tt,
    })
}

/// Full unitary-frame curvature tensor of g_u at node j.
pub fn curvature_from_potential(
    p: &RadialPotential,
    j: usize,
) -> Result<KahlerCurvatureTensor, FlowError> {
    Ok(node_curvature_raw(p, j)?.to_tensor())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{self, MinimizeOptions};

    #[test]
    fn fs_components_are_constant() {
        let p = RadialPotential::fs(2, 64).unwrap();
        for j in 0..=64 {
            let c = node_curvature_raw(&p, j).unwrap();
            assert!((c.a_rad - 2.0).abs() < 1e-10, "node {j}: {}", c.a_rad);
            assert!((c.b_rt - 1.0).abs() < 1e-10, "node {j}: {}", c.b_rt);
            assert!((c.d_tt - 1.0).abs() < 1e-10, "node {j}: {}", c.d_tt);
        }
    }

    #[test]
    fn fs_tensor_matches_constant_curvature_model() {
        let p = RadialPotential::fs(2, 64).unwrap();
        let t = curvature_from_potential(&p, 32).unwrap();
        let want = KahlerCurvatureTensor::constant_curvature(2, 2.0).unwrap();
        for (a, b) in t.entries().iter().zip(want.entries()) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn fs_ricci_is_n_plus_one() {
        let p = RadialPotential::fs(3, 128).unwrap();
        for j in [0, 1, 17, 64, 127, 128] {
            let t = curvature_from_potential(&p, j).unwrap();
            let (ricci, scalar) = t.traces();
            for i in 0..3 {
                assert!((ricci[(i, i)].re - 4.0).abs() < 1e-8, "node {j}");
            }
            assert!((scalar - 12.0).abs() < 1e-7);
        }
    }

    #[test]
    fn closed_form_extrema_match_generic_optimizers() {
        // Perturbed profile, a few nodes: the structure-tensor closed
        // forms must agree with the generic direction searches.
        let p = RadialPotential::perturbed(2, 64, 0.012, 3, 5).unwrap();
        let opts = MinimizeOptions::default();
        for j in [9, 23, 33, 50] {
            let c = node_curvature_raw(&p, j).unwrap();
            let t = c.to_tensor();
            let (h, _) = bounds::min_holomorphic_sectional(&t, &opts).unwrap();
            assert!((h - c.holsec_min()).abs() < 1e-8, "holsec node {j}");
            let (ob, _) = bounds::min_orthogonal_bisectional(&t, &opts).unwrap();
            assert!((ob - c.orthbis_min()).abs() < 1e-8, "orthbis node {j}");
            let (mu, _) = bounds::pinching_mu_star(&t, &opts).unwrap();
            assert!((mu - c.mu_star()).abs() < 1e-6, "mu node {j}: {mu} vs {}", c.mu_star());
        }
    }

    #[test]
    fn closed_form_extrema_match_optimizers_n3() {
        let p = RadialPotential::perturbed(3, 64, 0.015, 2, 7).unwrap();
        let opts = MinimizeOptions::default();
        for j in [16, 40] {
            let c = node_curvature_raw(&p, j).unwrap();
            let t = c.to_tensor();
            let (h, _) = bounds::min_holomorphic_sectional(&t, &opts).unwrap();
            assert!((h - c.holsec_min()).abs() < 1e-8, "holsec node {j}");
            let (ob, _) = bounds::min_orthogonal_bisectional(&t, &opts).unwrap();
            assert!((ob - c.orthbis_min()).abs() < 1e-8, "orthbis node {j}");
            let (mu, _) = bounds::pinching_mu_star(&t, &opts).unwrap();
            assert!((mu - c.mu_star()).abs() < 1e-6, "mu node {j}");
        }
    }

    #[test]
    fn structure_tensor_scalar_matches_contraction() {
        let p = RadialPotential::perturbed(2, 64, 0.008, 4, 2).unwrap();
        for j in [5, 32, 60] {
            let c = node_curvature_raw(&p, j).unwrap();
            let t = c.to_tensor();
            assert!((t.scalar() - c.scalar()).abs() < 1e-10);
        }
    }
}
