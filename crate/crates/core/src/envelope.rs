//! Comparison envelopes μ(t) from the maximum-principle arguments.
//!
//! Each family is the closed-form solution of a scalar reaction ODE; a
//! simulated curvature bound is expected to stay on the good side of its
//! envelope. [`solve_envelope_ode`] integrates the same right-hand sides
//! numerically and is the independent oracle for the closed forms.
//!
//! Families and their ODEs (μ is the envelope variable):
//!
//! * `ScalarLower`   μ′ = −μ,                μ(0) = min(R_min(0), 0)
//! * `RicciLower`    μ′ = −μ(μ+1),           bound is −μ(t)
//! * `HolSecLower`   μ′ = 2μ² − μ,           μ(0) = μ₀ < 0
//! * `LogisticPinch` μ′ = μ(2ν − (n+1)μ − 1), 0 < μ(0) < a = (2ν−1)/(n+1)
//!
//! `ScalarUpper` is the one non-autonomous bound, h₀eᵗ + n.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rk45::{self, Rk45Options, Rk45Solution};

#[derive(Debug, Error)]
pub enum EnvelopeError {
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("initial pinching value out of range: {0}")]
    InvalidMu0(f64),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error(transparent)]
    Integration(#[from] rk45::Rk45Error),
}

/// Scalar-curvature lower envelope min(R_min(0), 0)·e^{−t}.
///
/// Positive starting bounds clamp to the zero envelope: only nonpositive
/// lower bounds are constrained by this family.
pub fn scalar_lower_envelope(r_min0: f64, t: f64) -> Result<f64, EnvelopeError> {
    if t < 0.0 {
        return Err(EnvelopeError::NegativeTime(t));
    }
    Ok(r_min0.min(0.0) * (-t).exp())
}

/// Scalar-curvature upper envelope h₀·eᵗ + n, with h₀ the initial
/// maximum of R − n + F.
pub fn scalar_upper_envelope(h0: f64, n: usize, t: f64) -> Result<f64, EnvelopeError> {
    if t < 0.0 {
        return Err(EnvelopeError::NegativeTime(t));
    }
    Ok(h0 * t.exp() + n as f64)
}

/// Ricci pinching profile μ(t) = C/(eᵗ − C), C = μ₀/(μ₀+1), solving
/// μ′ + μ(μ+1) = 0. The Ricci lower bound it certifies is −μ(t).
pub fn ricci_mu(mu0: f64, t: f64) -> Result<f64, EnvelopeError> {
    if mu0 <= 0.0 {
        return Err(EnvelopeError::InvalidMu0(mu0));
    }
    if t < 0.0 {
        return Err(EnvelopeError::NegativeTime(t));
    }
    let c = mu0 / (mu0 + 1.0);
    Ok(c / (t.exp() - c))
}

/// Holomorphic-sectional lower envelope μ(t) = 1/(2 + (1/μ₀ − 2)eᵗ) for
/// μ₀ < 0, solving μ′ = 2μ² − μ; rises monotonically to 0⁻.
pub fn holsec_mu(mu0: f64, t: f64) -> Result<f64, EnvelopeError> {
    if mu0 >= 0.0 {
        return Err(EnvelopeError::InvalidMu0(mu0));
    }
    if t < 0.0 {
        return Err(EnvelopeError::NegativeTime(t));
    }
    Ok(1.0 / (2.0 + (1.0 / mu0 - 2.0) * t.exp()))
}

/// Pinching rate for the logistic envelope: a = (2ν−1)/(n+1).
pub fn logistic_rate(nu: f64, n: usize) -> f64 {
    (2.0 * nu - 1.0) / (n as f64 + 1.0)
}

/// Logistic pinching envelope: the solution of
/// μ′ = μ(2ν − (n+1)μ − 1) with μ(0) = μ₀ ∈ (0, a), strictly increasing
/// to a = (2ν−1)/(n+1):
///
///   μ(t) = a·C·e^{rt}/(C·e^{rt} + 1),  r = 2ν − 1,  C = μ₀/(a − μ₀).
///
/// C is fixed by the initial condition; the growth rate r = (n+1)·a is
/// fixed by the ODE. (A commonly printed variant with rate a and
/// C = μ₀/(1 − μ₀) satisfies neither; see `logistic_alt_printed_c`.)
pub fn logistic_mu(mu0: f64, nu: f64, n: usize, t: f64) -> Result<f64, EnvelopeError> {
    let a = logistic_rate(nu, n);
    if nu <= 0.5 {
        return Err(EnvelopeError::ParamOutOfRange(format!(
            "nu must exceed 1/2, got {nu}"
        )));
    }
    if !(mu0 > 0.0 && mu0 < a) {
        return Err(EnvelopeError::ParamOutOfRange(format!(
            "mu0 must lie in (0, a) = (0, {a}), got {mu0}"
        )));
    }
    if t < 0.0 {
        return Err(EnvelopeError::NegativeTime(t));
    }
    let r = 2.0 * nu - 1.0;
    let c = mu0 / (a - mu0);
    let e = (r * t).exp();
    Ok(a * c * e / (c * e + 1.0))
}

/// The alternative printed constant μ₀/(1 − μ₀) for the logistic family.
/// It does not satisfy μ(0) = μ₀ unless a = 1; both constants are carried
/// in serialized envelope metadata so downstream consumers can see the
/// discrepancy rather than silently trusting one form.
pub fn logistic_alt_printed_c(mu0: f64) -> f64 {
    mu0 / (1.0 - mu0)
}

/// Time at which the linear envelope μ₀ + ν²t/(n−1) crosses zero:
/// t* = −μ₀(n−1)/ν². Nonpositive μ₀ only; μ₀ = 0 crosses immediately.
pub fn positivity_crossing_time(mu0: f64, nu: f64, n: usize) -> Result<f64, EnvelopeError> {
    if n < 2 {
        return Err(EnvelopeError::ParamOutOfRange(format!(
            "n must be at least 2, got {n}"
        )));
    }
    if nu <= 0.0 {
        return Err(EnvelopeError::ParamOutOfRange(format!(
            "nu must be positive, got {nu}"
        )));
    }
    if mu0 > 0.0 {
        return Err(EnvelopeError::ParamOutOfRange(format!(
            "mu0 must be nonpositive, got {mu0}"
        )));
    }
    Ok(-mu0 * (n as f64 - 1.0) / (nu * nu))
}

/// A comparison envelope with its parameters and derived constants.
///
/// `evaluate(t)` returns the signed bound a simulated quantity is
/// compared against (for `RicciLower` that is −μ(t)).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum ComparisonEnvelope {
    ScalarLower {
        r_min0: f64,
    },
    ScalarUpper {
        h0: f64,
        n: usize,
    },
    RicciLower {
        mu0: f64,
        /// Derived constant C = μ₀/(μ₀+1).
        c: f64,
    },
    HolSecLower {
        mu0: f64,
    },
    LogisticPinch {
        mu0: f64,
        nu: f64,
        n: usize,
        /// Derived limit a = (2ν−1)/(n+1).
        a: f64,
        /// Derived constant C = μ₀/(a−μ₀), fixed by μ(0) = μ₀.
        c: f64,
        /// Alternative printed constant μ₀/(1−μ₀); carried for
        /// comparison, not used by `evaluate`.
        c_alt_printed: f64,
    },
}

impl ComparisonEnvelope {
    pub fn scalar_lower(r_min0: f64) -> Self {
        Self::ScalarLower { r_min0 }
    }

    pub fn scalar_upper(h0: f64, n: usize) -> Self {
        Self::ScalarUpper { h0, n }
    }

    pub fn ricci_lower(mu0: f64) -> Result<Self, EnvelopeError> {
        if mu0 <= 0.0 {
            return Err(EnvelopeError::InvalidMu0(mu0));
        }
        Ok(Self::RicciLower {
            mu0,
            c: mu0 / (mu0 + 1.0),
        })
    }

    pub fn holsec_lower(mu0: f64) -> Result<Self, EnvelopeError> {
        if mu0 >= 0.0 {
            return Err(EnvelopeError::InvalidMu0(mu0));
        }
        Ok(Self::HolSecLower { mu0 })
    }

    pub fn logistic_pinch(mu0: f64, nu: f64, n: usize) -> Result<Self, EnvelopeError> {
        // Validates the parameter ranges.
        logistic_mu(mu0, nu, n, 0.0)?;
        let a = logistic_rate(nu, n);
        Ok(Self::LogisticPinch {
            mu0,
            nu,
            n,
            a,
            c: mu0 / (a - mu0),
            c_alt_printed: logistic_alt_printed_c(mu0),
        })
    }

    /// The signed bound at time t.
    pub fn evaluate(&self, t: f64) -> Result<f64, EnvelopeError> {
        match *self {
            Self::ScalarLower { r_min0 } => scalar_lower_envelope(r_min0, t),
            Self::ScalarUpper { h0, n } => scalar_upper_envelope(h0, n, t),
            Self::RicciLower { mu0, .. } => Ok(-ricci_mu(mu0, t)?),
            Self::HolSecLower { mu0 } => holsec_mu(mu0, t),
            Self::LogisticPinch { mu0, nu, n, .. } => logistic_mu(mu0, nu, n, t),
        }
    }

    /// The reaction ODE right-hand side μ′ = f(μ) for the families that
    /// have one (`ScalarUpper` does not; its bound is non-autonomous).
    pub fn ode_rhs(&self) -> Result<Box<dyn Fn(f64) -> f64>, EnvelopeError> {
        match *self {
            Self::ScalarLower { .. } => Ok(Box::new(|mu| -mu)),
            Self::RicciLower { .. } => Ok(Box::new(|mu| -mu * (mu + 1.0))),
            Self::HolSecLower { .. } => Ok(Box::new(|mu| 2.0 * mu * mu - mu)),
            Self::LogisticPinch { nu, n, .. } => {
                Ok(Box::new(move |mu| {
                    mu * (2.0 * nu - (n as f64 + 1.0) * mu - 1.0)
                }))
            }
            Self::ScalarUpper { .. } => Err(EnvelopeError::ParamOutOfRange(
                "the scalar upper bound has no autonomous envelope ODE".into(),
            )),
        }
    }

    /// Initial value of the envelope variable μ (not the signed bound).
    pub fn mu_initial(&self) -> Result<f64, EnvelopeError> {
        match *self {
            Self::ScalarLower { r_min0 } => Ok(r_min0.min(0.0)),
            Self::RicciLower { mu0, .. } => Ok(mu0),
            Self::HolSecLower { mu0 } => Ok(mu0),
            Self::LogisticPinch { mu0, .. } => Ok(mu0),
            Self::ScalarUpper { .. } => Err(EnvelopeError::ParamOutOfRange(
                "the scalar upper bound has no autonomous envelope ODE".into(),
            )),
        }
    }

    /// Closed-form value of the envelope variable μ at time t.
    pub fn mu_closed_form(&self, t: f64) -> Result<f64, EnvelopeError> {
        match *self {
            Self::ScalarLower { r_min0 } => Ok(r_min0.min(0.0) * (-t).exp()),
            Self::RicciLower { mu0, .. } => ricci_mu(mu0, t),
            Self::HolSecLower { mu0 } => holsec_mu(mu0, t),
            Self::LogisticPinch { mu0, nu, n, .. } => logistic_mu(mu0, nu, n, t),
            Self::ScalarUpper { .. } => Err(EnvelopeError::ParamOutOfRange(
                "the scalar upper bound has no autonomous envelope ODE".into(),
            )),
        }
    }
}

/// Integrate the envelope's reaction ODE with the adaptive RK(4/5) pair.
///
/// The returned mesh is the independent numerical oracle for the closed
/// forms; agreement within ~10·tol over the span is the contract.
pub fn solve_envelope_ode(
    env: &ComparisonEnvelope,
    t_span: (f64, f64),
    tol: f64,
) -> Result<Rk45Solution, EnvelopeError> {
    let rhs = env.ode_rhs()?;
    let mu0 = env.mu_initial()?;
    // The step cap keeps the Hermite dense output comfortably below the
    // requested tolerance when sampling between mesh points.
    let opts = Rk45Options {
        tol,
        h_max: 0.005,
        ..Default::default()
    };
    Ok(rk45::integrate(
        |_, y, dy| dy[0] = rhs(y[0]),
        t_span,
        &[mu0],
        &opts,
    )?)
}
