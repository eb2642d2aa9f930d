//! Shared independent oracles for the integration tests.
//!
//! Everything here deliberately avoids the production search/extraction
//! paths: brute-force grids for extremal directions, direct contraction
//! sums for trace identities, and hand-built tight pinched instances
//! with known certificates.

pub mod laplacian;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use krflab::tensor::KahlerCurvatureTensor;

pub fn cvec(parts: &[(f64, f64)]) -> DVector<Complex64> {
    DVector::from_vec(parts.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
}

/// Unit vectors in ℂ² sweeping magnitude and relative phase, covering
/// the sphere modulo an overall phase (which no curvature value sees).
pub fn sphere_grid_c2(steps: usize) -> Vec<DVector<Complex64>> {
    let mut out = Vec::with_capacity((steps + 1) * steps);
    for a in 0..=steps {
        let theta = std::f64::consts::FRAC_PI_2 * a as f64 / steps as f64;
        for b in 0..steps {
            let phi = 2.0 * std::f64::consts::PI * b as f64 / steps as f64;
            out.push(cvec(&[
                (theta.cos(), 0.0),
                (theta.sin() * phi.cos(), theta.sin() * phi.sin()),
            ]));
        }
    }
    out
}

/// Brute-force minimum holomorphic sectional over a dense grid (n = 2).
pub fn brute_min_holsec_c2(r: &KahlerCurvatureTensor, steps: usize) -> f64 {
    sphere_grid_c2(steps)
        .iter()
        .map(|v| r.bisectional(v, v))
        .fold(f64::INFINITY, f64::min)
}

/// Brute-force minimum orthogonal bisectional over pairs (n = 2). The
/// orthogonal complement of X is unique up to a phase that R(X,X̄,Y,Ȳ)
/// never sees, so the search space is X alone (two parameters); a
/// shrinking local grid polishes the coarse minimum.
pub fn brute_min_orthbis_c2(r: &KahlerCurvatureTensor, steps: usize) -> f64 {
    let value = |theta: f64, phi: f64| -> f64 {
        let x = cvec(&[
            (theta.cos(), 0.0),
            (theta.sin() * phi.cos(), theta.sin() * phi.sin()),
        ]);
        let y = cvec(&[
            (-(x[1].conj()).re, -(x[1].conj()).im),
            ((x[0].conj()).re, (x[0].conj()).im),
        ]);
        r.bisectional(&x, &y)
    };
    let mut best = f64::INFINITY;
    let mut arg = (0.0, 0.0);
    for a in 0..=steps {
        let theta = std::f64::consts::FRAC_PI_2 * a as f64 / steps as f64;
        for b in 0..steps {
            let phi = 2.0 * std::f64::consts::PI * b as f64 / steps as f64;
            let v = value(theta, phi);
            if v < best {
                best = v;
                arg = (theta, phi);
            }
        }
    }
    // Shrinking refinement.
    let mut half = (std::f64::consts::FRAC_PI_2 / steps as f64, std::f64::consts::PI / steps as f64);
    for _ in 0..6 {
        let (c0, c1) = arg;
        for a in -4i32..=4 {
            for b in -4i32..=4 {
                let v = value(c0 + half.0 * a as f64 / 4.0, c1 + half.1 * b as f64 / 4.0);
                if v < best {
                    best = v;
                    arg = (c0 + half.0 * a as f64 / 4.0, c1 + half.1 * b as f64 / 4.0);
                }
            }
        }
        half = (half.0 * 0.3, half.1 * 0.3);
    }
    best
}

/// Brute-force pinching ratio minimum over free unit pairs (n = 2):
/// four effective parameters (each vector's magnitude split and
/// internal relative phase), coarse grid plus shrinking refinement.
pub fn brute_mu_star_c2(r: &KahlerCurvatureTensor, steps: usize) -> f64 {
    let gg = krflab::tensor::GgTensor::new(2);
    let value = |p: [f64; 4]| -> f64 {
        let x = cvec(&[
            (p[0].cos(), 0.0),
            (p[0].sin() * p[1].cos(), p[0].sin() * p[1].sin()),
        ]);
        let y = cvec(&[
            (p[2].cos(), 0.0),
            (p[2].sin() * p[3].cos(), p[2].sin() * p[3].sin()),
        ]);
        r.bisectional(&x, &y) / gg.bisectional(&x, &y)
    };
    let mut best = f64::INFINITY;
    let mut arg = [0.0f64; 4];
    let h = std::f64::consts::FRAC_PI_2 / steps as f64;
    for a in 0..=steps {
        for b in 0..(2 * steps) {
            for c in 0..=steps {
                for d in 0..(2 * steps) {
                    let p = [
                        a as f64 * h,
                        b as f64 * 2.0 * h,
                        c as f64 * h,
                        d as f64 * 2.0 * h,
                    ];
                    let v = value(p);
                    if v < best {
                        best = v;
                        arg = p;
                    }
                }
            }
        }
    }
    let mut half = h;
    for _ in 0..7 {
        let center = arg;
        for a in -3i32..=3 {
            for b in -3i32..=3 {
                for c in -3i32..=3 {
                    for d in -3i32..=3 {
                        let p = [
                            center[0] + half * a as f64 / 3.0,
                            center[1] + half * b as f64 / 3.0,
                            center[2] + half * c as f64 / 3.0,
                            center[3] + half * d as f64 / 3.0,
                        ];
                        let v = value(p);
                        if v < best {
                            best = v;
                            arg = p;
                        }
                    }
                }
            }
        }
        half *= 0.3;
    }
    best
}

/// g-trace of a tensor-shaped array: Σ_{i,k} T_{i ī k k̄}.
pub fn full_trace(t: &KahlerCurvatureTensor) -> f64 {
    let n = t.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += t.get(i, i, k, k).re;
        }
    }
    acc
}

/// Partial g-trace over the second index pair: Σ_k T_{i j̄ k k̄}.
pub fn partial_trace(t: &KahlerCurvatureTensor) -> DMatrix<Complex64> {
    let n = t.dim();
    DMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| t.get(i, j, k, k)).sum::<Complex64>()
    })
}

/// Real inner product Re tr(A B†) of two matrices.
pub fn mat_inner(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x * y.conj()).re).sum()
}

/// Scalar trace identity residual:
/// tr(Φ(R)) + 2⟨Ric − I, Ric⟩ − (|Ric|² − scalar).
pub fn scalar_identity_residual(r: &KahlerCurvatureTensor) -> f64 {
    let phi = krflab::reaction::reaction_term(r);
    let (ricci, scalar) = r.traces();
    let n = r.dim();
    let id = DMatrix::<Complex64>::identity(n, n);
    let ricci_minus_id = &ricci - &id;
    let lhs = full_trace(&phi) + 2.0 * mat_inner(&ricci_minus_id, &ricci);
    let rhs = mat_inner(&ricci, &ricci) - scalar;
    lhs - rhs
}

/// Ricci trace identity residual (matrix of residuals):
/// Σ_k Φ(R)_{i j̄ k k̄} + Σ_{kl} R_{i j̄ k l̄}(Ric−I)_{l k̄}
///   − [Σ_{kl} R_{i j̄ k l̄}Ric_{l k̄} − (Ric²)_{i j̄}].
pub fn ricci_identity_residual(r: &KahlerCurvatureTensor) -> f64 {
    let n = r.dim();
    let phi = krflab::reaction::reaction_term(r);
    let (ricci, _) = r.traces();
    let contract = |m: &DMatrix<Complex64>| -> DMatrix<Complex64> {
        DMatrix::from_fn(n, n, |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                for l in 0..n {
                    acc += r.get(i, j, k, l) * m[(l, k)];
                }
            }
            acc
        })
    };
    let id = DMatrix::<Complex64>::identity(n, n);
    let lhs = partial_trace(&phi) + contract(&(&ricci - &id));
    let rhs = contract(&ricci) - &ricci * &ricci;
    (lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Orbit-sum (not average) of a single spike: an integer-valued element
/// of the symmetry subspace, used by the exact polarization checks.
pub fn orbit_spike(n: usize, idx: [usize; 4], imaginary: bool) -> Option<KahlerCurvatureTensor> {
    let v = if imaginary {
        Complex64::new(0.0, 1.0)
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut raw = vec![Complex64::new(0.0, 0.0); n * n * n * n];
    let flat = |i: [usize; 4]| ((i[0] * n + i[1]) * n + i[2]) * n + i[3];
    raw[flat(idx)] = v;
    let sym = KahlerCurvatureTensor::symmetrize(&raw, n);
    // Scale back to the orbit sum so entries are (half-)integers; a
    // spike whose orbit cancels (pure-imaginary diagonal) gives zero.
    let summed: Vec<Complex64> = sym.into_iter().map(|z| z * 8.0).collect();
    let t = KahlerCurvatureTensor::from_entries(summed, n).ok()?;
    if t.max_abs() == 0.0 {
        None
    } else {
        Some(t)
    }
}

/// All nonzero orbit-sum generators for dimension n.
pub fn symmetric_generators(n: usize) -> Vec<KahlerCurvatureTensor> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    for imag in [false, true] {
                        if let Some(t) = orbit_spike(n, [i, j, k, l], imag) {
                            out.push(t);
                        }
                    }
                }
            }
        }
    }
    out
}

/// A tight pinched instance: unitary-conjugated FS(c) with the pure
/// holomorphic-sectional entry at e₁ lowered by d. For 0 < d < 2c the
/// pinching constant is exactly (c−d)/2 with certificate U·e₁, and the
/// orthogonal bisectional minimum stays positive.
pub struct TightInstance {
    pub tensor: KahlerCurvatureTensor,
    pub mu_star: f64,
    pub direction: DVector<Complex64>,
    pub c: f64,
    pub d: f64,
}

pub fn tight_instance(n: usize, c: f64, d: f64, seed: u64) -> TightInstance {
    use rand::{Rng, SeedableRng};
    let mut raw = KahlerCurvatureTensor::constant_curvature(n, c)
        .unwrap()
        .entries()
        .to_vec();
    raw[0] -= Complex64::new(d, 0.0); // entry (1,1̄,1,1̄)
    let base = KahlerCurvatureTensor::from_entries(raw, n).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let v = DVector::from_fn(n, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let v = &v / Complex64::new(v.norm(), 0.0);
    let u = krflab::linalg::unitary_from_first_column(&v);
    // Components in the frame whose first vector is v: the certificate
    // direction of the conjugated tensor is v itself.
    let tensor = base.unitary_transform(&u.adjoint());
    TightInstance {
        tensor,
        mu_star: 0.5 * (c - d),
        direction: v,
        c,
        d,
    }
}
