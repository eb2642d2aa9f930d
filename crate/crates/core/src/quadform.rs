//! Block quadratic forms on ℂⁿ×ℂⁿ and the trace inequality they obey.
//!
//! The forms here have the shape
//!
//!   Q(x, y) = A_{i j̄} xⁱx̄ʲ + C_{k l̄} yᵏȳˡ + 2Re(B_{ij} xⁱyʲ + B̃_{i j̄} xⁱȳʲ)
//!
//! with A, C Hermitian. When Q ≥ 0 everywhere, the blocks satisfy
//! Re tr(A·C) ≥ Σ|B_{ij}|² + Σ|B̃_{i j̄}|². The module provides a PSD
//! test, the inequality check, a PSD-by-construction sampler for fuzzing,
//! and the assembly of the second-variation form of a pinched curvature
//! tensor at a null direction.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::min_eigenvalue_sym;
use crate::tensor::KahlerCurvatureTensor;

/// PSD test threshold on the least eigenvalue of the real Gram matrix.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum QuadFormError {
    #[error("A and C must be Hermitian (violation {0:.3e})")]
    NotHermitian(f64),
    #[error("form is not positive semidefinite (least eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("direction does not certify a zero minimum: sectional value {value:.3e}, first variation {gradient:.3e}")]
    NotAtMinimum { value: f64, gradient: f64 },
}

/// A quadratic form in the block shape above.
#[derive(Clone, Debug)]
pub struct BlockQuadraticForm {
    pub n: usize,
    pub a: DMatrix<Complex64>,
    pub c: DMatrix<Complex64>,
    pub b: DMatrix<Complex64>,
    pub btilde: DMatrix<Complex64>,
}

impl BlockQuadraticForm {
    pub fn new(
        a: DMatrix<Complex64>,
        c: DMatrix<Complex64>,
        b: DMatrix<Complex64>,
        btilde: DMatrix<Complex64>,
    ) -> Result<Self, QuadFormError> {
        let n = a.nrows();
        let herm = |m: &DMatrix<Complex64>| -> f64 {
            let mut worst: f64 = 0.0;
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
                }
            }
            worst
        };
        let v = herm(&a).max(herm(&c));
        if v > 1e-12 {
            return Err(QuadFormError::NotHermitian(v));
        }
        Ok(Self { n, a, c, b, btilde })
    }

    /// Evaluate Q(x, y); real by construction.
    pub fn evaluate(&self, x: &DVector<Complex64>, y: &DVector<Complex64>) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.a[(i, j)] * x[i] * x[j].conj()).re;
                acc += (self.c[(i, j)] * y[i] * y[j].conj()).re;
                acc += 2.0 * (self.b[(i, j)] * x[i] * y[j]).re;
                acc += 2.0 * (self.btilde[(i, j)] * x[i] * y[j].conj()).re;
            }
        }
        acc
    }

    /// Real symmetric Gram matrix of Q over (Re x, Im x, Re y, Im y),
    /// built by polarization of the evaluator.
    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.n;
        let dim = 4 * n;
        let unit = |a: usize| -> (DVector<Complex64>, DVector<Complex64>) {
            let mut x = DVector::zeros(n);
            let mut y = DVector::zeros(n);
            match a / n {
                0 => x[a % n] = Complex64::new(1.0, 0.0),
                1 => x[a % n] = Complex64::new(0.0, 1.0),
                2 => y[a % n] = Complex64::new(1.0, 0.0),
                _ => y[a % n] = Complex64::new(0.0, 1.0),
            }
            (x, y)
        };
        let mut diag = vec![0.0; dim];
        for (a, d) in diag.iter_mut().enumerate() {
            let (x, y) = unit(a);
            *d = self.evaluate(&x, &y);
        }
        let mut g = DMatrix::zeros(dim, dim);
        for a in 0..dim {
            g[(a, a)] = diag[a];
            let (xa, ya) = unit(a);
            for b in (a + 1)..dim {
                let (xb, yb) = unit(b);
                let q = self.evaluate(&(&xa + &xb), &(&ya + &yb));
                let off = 0.5 * (q - diag[a] - diag[b]);
                g[(a, b)] = off;
                g[(b, a)] = off;
            }
        }
        g
    }
}

/// Least eigenvalue test of the real Gram matrix of Q.
pub fn is_psd(form: &BlockQuadraticForm) -> bool {
    min_eigenvalue_sym(&form.gram()) >= -PSD_TOL
}

/// Outcome of the trace inequality on a PSD form.
#[derive(Clone, Copy, Debug)]
pub struct TraceInequality {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// For PSD forms: Re tr(A·C) ≥ Σ|B_{ij}|² + Σ|B̃_{i j̄}|².
pub fn lemma21_check(form: &BlockQuadraticForm) -> Result<TraceInequality, QuadFormError> {
    let least = min_eigenvalue_sym(&form.gram());
    if least < -PSD_TOL {
        return Err(QuadFormError::NotPsd(least));
    }
    Ok(trace_inequality(form))
}

/// The two sides of the inequality, without the PSD precondition check.
pub fn trace_inequality(form: &BlockQuadraticForm) -> TraceInequality {
    let lhs = (&form.a * &form.c).trace().re;
    let rhs: f64 = form.b.iter().map(|z| z.norm_sqr()).sum::<f64>()
        + form.btilde.iter().map(|z| z.norm_sqr()).sum::<f64>();
    TraceInequality {
        lhs,
        rhs,
        holds: lhs >= rhs - PSD_TOL,
    }
}

/// PSD-by-construction sample with matching x- and y-quadratics.
///
/// Each draw adds squared linear forms in mirrored pairs
/// (|αᵀx + βᵀȳ|² with |αᵀy + βᵀx̄|², and |αᵀx + βᵀy|² with
/// |βᵀx + αᵀy|²), which populates both cross blocks while keeping
/// A = C. That is the hypothesis class the second-variation assembly
/// produces, and on it the trace inequality is sharp but never
/// violated. With fully independent blocks it can fail: the rank-one
/// form |x₁ + ȳ₂|² has tr(A·C) = 0 against |B|² = 1 (see the tests),
/// so the matching-quadratic structure is part of the hypothesis, not
/// a convenience.
pub fn sample_psd_form(n: usize, seed: u64) -> BlockQuadraticForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, n);
    let mut btilde = DMatrix::zeros(n, n);
    let randv = |rng: &mut ChaCha8Rng| {
        DVector::from_fn(n, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        })
    };
    let pairs = 2 * n;
    for r in 0..pairs {
        let alpha = randv(&mut rng);
        let beta = randv(&mut rng);
        if r % 2 == 0 {
            // |αᵀx + βᵀȳ|² + |αᵀy + βᵀx̄|²:
            // A = C += αᾱᵀ + β̄βᵀ patterns, B += αβ̄ᵀ + β̄αᵀ patterns.
            for i in 0..n {
                for j in 0..n {
                    a[(i, j)] += alpha[i] * alpha[j].conj() + beta[i].conj() * beta[j];
                    b[(i, j)] += alpha[i] * beta[j].conj() + beta[i].conj() * alpha[j];
                }
            }
        } else {
            // |αᵀx + βᵀy|² + |βᵀx + αᵀy|²:
            // A = C += αᾱᵀ + ββ̄ᵀ patterns, B̃ += αβ̄ᵀ + βᾱᵀ patterns.
            for i in 0..n {
                for j in 0..n {
                    a[(i, j)] += alpha[i] * alpha[j].conj() + beta[i] * beta[j].conj();
                    btilde[(i, j)] += alpha[i] * beta[j].conj() + beta[i] * alpha[j].conj();
                }
            }
        }
    }
    let c = a.clone();
    BlockQuadraticForm::new(a, c, b, btilde).expect("hermitian by construction")
}

/// Assemble the second-variation form of a pinched tensor S at a
/// direction e₁ certifying holsec_min(S) = 0.
///
/// In a frame where the certificate is the first basis vector, the
/// blocks read off the displayed expansion of
/// ∂²/∂ε² S(e₁+εx, ·, e₁+εy, ·):
/// A_{i j̄} = S_{i j̄ 1 1̄}, C_{k l̄} = S_{1 1̄ k l̄},
/// B_{ik} = S_{i 1̄ k 1̄}, B̃_{i l̄} = S_{i 1̄ 1 l̄}.
pub fn second_variation_form(
    s: &KahlerCurvatureTensor,
    e1: &DVector<Complex64>,
) -> Result<BlockQuadraticForm, QuadFormError> {
    let n = s.dim();
    let scale = 1.0 + s.max_abs();
    let value = s.bisectional(e1, e1) / e1.norm_squared().powi(2);
    // First variation: 4 Re(S_{i 1̄ 1 1̄} x̄^i); must vanish at a minimum.
    let u = crate::linalg::unitary_from_first_column(&(e1 / Complex64::new(e1.norm(), 0.0)));
    let sr = s.unitary_transform(&u);
    let grad: f64 = (1..n).map(|i| sr.get(i, 0, 0, 0).norm()).sum();
    if value.abs() > 1e-6 * scale || grad > 1e-5 * scale {
        return Err(QuadFormError::NotAtMinimum {
            value,
            gradient: grad,
        });
    }
    let mut a = DMatrix::zeros(n, n);
    let mut c = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, n);
    let mut btilde = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = sr.get(i, j, 0, 0);
            c[(i, j)] = sr.get(0, 0, i, j);
            b[(i, j)] = sr.get(i, 0, j, 0);
            btilde[(i, j)] = sr.get(i, 0, 0, j);
        }
    }
    BlockQuadraticForm::new(a, c, b, btilde)
}
