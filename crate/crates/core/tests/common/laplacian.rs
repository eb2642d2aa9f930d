//! Coordinate-space rough Laplacian of an invariant curvature field.
//!
//! Independent oracle for the flow↔reaction consistency probe: the
//! frame components (a_rad, b_rt, d_tt)(x) are lifted to coordinate
//! components T_{i j̄ k l̄}(z) around a probe point, differentiated
//! covariantly with analytic Christoffels (the metric and its first
//! derivatives have closed forms in u′, u″, u‴), and contracted with
//! g⁻¹. Everything here works with the physical (volume-normalized)
//! metric.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use krflab::flow::{node_curvature_raw, RadialPotential};
use krflab::tensor::KahlerCurvatureTensor;

pub struct InvariantField {
    n: usize,
    nodes: usize,
    /// Physical frame components per node.
    pub a_rad: Vec<f64>,
    pub b_rt: Vec<f64>,
    pub d_tt: Vec<f64>,
    /// Physical potential derivatives per node: U′, U″, U‴.
    u1: Vec<f64>,
    u2: Vec<f64>,
    u3: Vec<f64>,
}

impl InvariantField {
    pub fn new(p: &RadialPotential) -> Self {
        let n = p.dim();
        let nodes = p.nodes();
        let scale = 1.0 / (n as f64 + 1.0);
        let mut out = Self {
            n,
            nodes,
            a_rad: Vec::new(),
            b_rt: Vec::new(),
            d_tt: Vec::new(),
            u1: Vec::new(),
            u2: Vec::new(),
            u3: Vec::new(),
        };
        for j in 0..=nodes {
            let c = node_curvature_raw(p, j).unwrap().scaled(scale);
            out.a_rad.push(c.a_rad);
            out.b_rt.push(c.b_rt);
            out.d_tt.push(c.d_tt);
            let d = p.derivs(j);
            out.u1.push((n as f64 + 1.0) * d.u1);
            out.u2.push((n as f64 + 1.0) * d.u2);
            out.u3.push((n as f64 + 1.0) * d.u3);
        }
        out
    }

    /// Degree-6 Lagrange interpolation of a node profile.
    fn interp(&self, values: &[f64], x: f64) -> f64 {
        let nn = self.nodes;
        let h = 1.0 / nn as f64;
        let center = ((x / h).round() as isize).clamp(0, nn as isize) as usize;
        let start = center.saturating_sub(3).min(nn - 6);
        let mut acc = 0.0;
        for a in 0..7 {
            let xa = (start + a) as f64 * h;
            let mut w = 1.0;
            for b in 0..7 {
                if a != b {
                    let xb = (start + b) as f64 * h;
                    w *= (x - xb) / (xa - xb);
                }
            }
            acc += w * values[start + a];
        }
        acc
    }

    fn x_of(&self, z: &DVector<Complex64>) -> f64 {
        let s: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        s / (1.0 + s)
    }

    /// Physical metric g_{i j̄}(z).
    pub fn metric(&self, z: &DVector<Complex64>) -> DMatrix<Complex64> {
        let n = self.n;
        let s: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        let x = s / (1.0 + s);
        let u1 = self.interp(&self.u1, x);
        let u2 = self.interp(&self.u2, x);
        DMatrix::from_fn(n, n, |i, j| {
            let mut v = Complex64::new(0.0, 0.0);
            if i == j {
                v += Complex64::new(u1 / s, 0.0);
            }
            v += z[i].conj() * z[j] * ((u2 - u1) / (s * s));
            v
        })
    }

    fn metric_inverse(&self, z: &DVector<Complex64>) -> DMatrix<Complex64> {
        let n = self.n;
        let s: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        let x = s / (1.0 + s);
        let u1 = self.interp(&self.u1, x);
        let u2 = self.interp(&self.u2, x);
        let b = (u2 - u1) / u2;
        DMatrix::from_fn(n, n, |i, j| {
            let mut v = Complex64::new(0.0, 0.0);
            if i == j {
                v += Complex64::new(s / u1, 0.0);
            }
            v -= (s / u1) * b * z[i].conj() * z[j] / s;
            v
        })
    }

    /// ∂_p g_{i l̄}(z), analytic.
    fn dg(&self, z: &DVector<Complex64>) -> Vec<DMatrix<Complex64>> {
        let n = self.n;
        let s: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        let x = s / (1.0 + s);
        let u1 = self.interp(&self.u1, x);
        let u2 = self.interp(&self.u2, x);
        let u3 = self.interp(&self.u3, x);
        let pp = u2 - u1;
        let qq = u3 - 3.0 * u2 + 2.0 * u1;
        (0..n)
            .map(|p| {
                DMatrix::from_fn(n, n, |i, l| {
                    let mut v = Complex64::new(0.0, 0.0);
                    if i == l {
                        v += z[p].conj() * (pp / (s * s));
                    }
                    if l == p {
                        v += z[i].conj() * (pp / (s * s));
                    }
                    v += z[p].conj() * z[i].conj() * z[l] * (qq / (s * s * s));
                    v
                })
            })
            .collect()
    }

    /// Christoffels Γ^m_{p i} = g^{m l̄} ∂_p g_{i l̄}.
    pub fn gamma(&self, z: &DVector<Complex64>) -> Vec<DMatrix<Complex64>> {
        let n = self.n;
        let inv = self.metric_inverse(z);
        let dg = self.dg(z);
        (0..n)
            .map(|p| {
                DMatrix::from_fn(n, n, |m, i| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for l in 0..n {
                        // The matrix of g^{m l̄} is conj(G⁻¹): the
                        // defining pairing contracts barred with barred.
                        acc += inv[(m, l)].conj() * dg[p][(i, l)];
                    }
                    acc
                })
            })
            .collect()
    }

    /// Coordinate components of the invariant tensor field at z.
    pub fn tensor_coords(&self, z: &DVector<Complex64>) -> Vec<Complex64> {
        let n = self.n;
        let s: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        let x = self.x_of(z);
        let frame = krflab::flow::NodeCurvature {
            n,
            a_rad: self.interp(&self.a_rad, x),
            b_rt: self.interp(&self.b_rt, x),
            d_tt: self.interp(&self.d_tt, x),
        }
        .to_tensor();
        // Frame vectors: f₁ = √(s/U″)·v, f_a = √(s/U′)·(completion), with
        // v the radial direction. Coordinate components are the frame
        // components transformed by F⁻¹ (frame-choice independent).
        let u1 = self.interp(&self.u1, x);
        let u2 = self.interp(&self.u2, x);
        let v = z / Complex64::new(z.norm(), 0.0);
        let u = krflab::linalg::unitary_from_first_column(&v);
        let mut f = u;
        for i in 0..n {
            f[(i, 0)] *= Complex64::new((s / u2).sqrt(), 0.0);
            for a in 1..n {
                f[(i, a)] *= Complex64::new((s / u1).sqrt(), 0.0);
            }
        }
        let finv = f.try_inverse().expect("frame is invertible");
        frame.unitary_transform(&finv).entries().to_vec()
    }

    /// Both one-sided rough Laplacians of the field at the probe point
    /// (g^{pq̄}∇_p∇_q̄ T and g^{pq̄}∇_q̄∇_p T), as frame components.
    pub fn laplacian_frame(
        &self,
        z0: &DVector<Complex64>,
        h: f64,
    ) -> (KahlerCurvatureTensor, KahlerCurvatureTensor) {
        let n = self.n;
        let len = n * n * n * n;
        let flat = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;

        let displace = |z: &DVector<Complex64>, p: usize, re: f64, im: f64| {
            let mut w = z.clone();
            w[p] += Complex64::new(re, im);
            w
        };
        // Holomorphic / antiholomorphic derivatives of the coordinate
        // tensor field by central differences.
        let d_t = |z: &DVector<Complex64>, p: usize, bar: bool| -> Vec<Complex64> {
            let tpr = self.tensor_coords(&displace(z, p, h, 0.0));
            let tmr = self.tensor_coords(&displace(z, p, -h, 0.0));
            let tpi = self.tensor_coords(&displace(z, p, 0.0, h));
            let tmi = self.tensor_coords(&displace(z, p, 0.0, -h));
            (0..len)
                .map(|a| {
                    let dre = (tpr[a] - tmr[a]) / (2.0 * h);
                    let dim = (tpi[a] - tmi[a]) / (2.0 * h);
                    if bar {
                        0.5 * (dre + Complex64::new(0.0, 1.0) * dim)
                    } else {
                        0.5 * (dre - Complex64::new(0.0, 1.0) * dim)
                    }
                })
                .collect()
        };

        // ∇_p T: correct the unbarred slots with Γ(z).
        let nabla_p = |z: &DVector<Complex64>, p: usize| -> Vec<Complex64> {
            let mut out = d_t(z, p, false);
            let t = self.tensor_coords(z);
            let gamma = self.gamma(z);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let mut corr = Complex64::new(0.0, 0.0);
                            for m in 0..n {
                                corr += gamma[p][(m, i)] * t[flat(m, j, k, l)];
                                corr += gamma[p][(m, k)] * t[flat(i, j, m, l)];
                            }
                            out[flat(i, j, k, l)] -= corr;
                        }
                    }
                }
            }
            out
        };
        // ∇_q̄ T: correct the barred slots with conj(Γ(z)).
        let nabla_qbar = |z: &DVector<Complex64>, q: usize| -> Vec<Complex64> {
            let mut out = d_t(z, q, true);
            let t = self.tensor_coords(z);
            let gamma = self.gamma(z);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let mut corr = Complex64::new(0.0, 0.0);
                            for m in 0..n {
                                corr += gamma[q][(m, j)].conj() * t[flat(i, m, k, l)];
                                corr += gamma[q][(m, l)].conj() * t[flat(i, j, k, m)];
                            }
                            out[flat(i, j, k, l)] -= corr;
                        }
                    }
                }
            }
            out
        };

        let ginv0 = self.metric_inverse(z0);
        let gamma0 = self.gamma(z0);
        let mut lap_pq = vec![Complex64::new(0.0, 0.0); len];
        let mut lap_qp = vec![Complex64::new(0.0, 0.0); len];
        for p in 0..n {
            for q in 0..n {
                let w = ginv0[(q, p)]; // g^{p q̄} pairs slot p with q̄
                if w.norm() < 1e-14 {
                    continue;
                }
                // ∇_q̄ (∇_p T) at z0: FD of the ∇_p field in z_q (anti-
                // holomorphic), then barred-slot and no p-slot correction
                // (mixed Christoffels vanish on Kähler manifolds).
                let vp_pr = nabla_p(&displace(z0, q, h, 0.0), p);
                let vp_mr = nabla_p(&displace(z0, q, -h, 0.0), p);
                let vp_pi = nabla_p(&displace(z0, q, 0.0, h), p);
                let vp_mi = nabla_p(&displace(z0, q, 0.0, -h), p);
                let vp0 = nabla_p(z0, p);
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            for l in 0..n {
                                let a = flat(i, j, k, l);
                                let dre = (vp_pr[a] - vp_mr[a]) / (2.0 * h);
                                let dim = (vp_pi[a] - vp_mi[a]) / (2.0 * h);
                                let mut dbar = 0.5 * (dre + Complex64::new(0.0, 1.0) * dim);
                                for m in 0..n {
                                    dbar -= gamma0[q][(m, j)].conj() * vp0[flat(i, m, k, l)];
                                    dbar -= gamma0[q][(m, l)].conj() * vp0[flat(i, j, k, m)];
                                }
                                lap_qp[a] += w * dbar;
                            }
                        }
                    }
                }
                // ∇_p (∇_q̄ T) at z0.
                let vq_pr = nabla_qbar(&displace(z0, p, h, 0.0), q);
                let vq_mr = nabla_qbar(&displace(z0, p, -h, 0.0), q);
                let vq_pi = nabla_qbar(&displace(z0, p, 0.0, h), q);
                let vq_mi = nabla_qbar(&displace(z0, p, 0.0, -h), q);
                let vq0 = nabla_qbar(z0, q);
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            for l in 0..n {
                                let a = flat(i, j, k, l);
                                let dre = (vq_pr[a] - vq_mr[a]) / (2.0 * h);
                                let dim = (vq_pi[a] - vq_mi[a]) / (2.0 * h);
                                let mut dhol = 0.5 * (dre - Complex64::new(0.0, 1.0) * dim);
                                for m in 0..n {
                                    dhol -= gamma0[p][(m, i)] * vq0[flat(m, j, k, l)];
                                    dhol -= gamma0[p][(m, k)] * vq0[flat(i, j, m, l)];
                                }
                                lap_pq[a] += w * dhol;
                            }
                        }
                    }
                }
            }
        }
        // Back to frame components at z0.
        let to_frame = |coords: Vec<Complex64>| -> KahlerCurvatureTensor {
            let s: f64 = z0.iter().map(|w| w.norm_sqr()).sum();
            let x = self.x_of(z0);
            let u1 = self.interp(&self.u1, x);
            let u2 = self.interp(&self.u2, x);
            let v = z0 / Complex64::new(z0.norm(), 0.0);
            let u = krflab::linalg::unitary_from_first_column(&v);
            let mut f = u;
            for i in 0..n {
                f[(i, 0)] *= Complex64::new((s / u2).sqrt(), 0.0);
                for a in 1..n {
                    f[(i, a)] *= Complex64::new((s / u1).sqrt(), 0.0);
                }
            }
            let raw = KahlerCurvatureTensor::symmetrize(&coords, n);
            // The Laplacian of a symmetric field stays symmetric up to FD
            // noise; project before wrapping.
            KahlerCurvatureTensor::from_entries(raw, n)
                .unwrap()
                .unitary_transform(&f)
        };
        (to_frame(lap_pq), to_frame(lap_qp))
    }
}
