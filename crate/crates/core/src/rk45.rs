//! Adaptive embedded Runge–Kutta integrator (Dormand–Prince 5(4)).
//!
//! One integrator serves the comparison-ODE oracle and the pointwise
//! curvature reaction ODE. States are flat `f64` slices; dense output is
//! cubic Hermite interpolation between accepted steps, which is accurate
//! to the same order as the embedded error estimate over the tolerances
//! used here.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Rk45Error {
    #[error("step size underflow at t = {t:.6e} (stiffness guard)")]
    StepUnderflow { t: f64 },
    #[error("step budget of {0} exceeded")]
    StepBudget(usize),
}

#[derive(Clone, Copy, Debug)]
pub struct Rk45Options {
    /// Local error tolerance (used as both absolute and relative).
    pub tol: f64,
    /// Smallest allowed step before declaring stiffness.
    pub h_min: f64,
    /// Largest allowed step. The cubic Hermite dense output is only
    /// fourth order in the step, so callers that sample between mesh
    /// points keep this small even when the integrator could stride.
    pub h_max: f64,
    /// Hard cap on accepted + rejected steps.
    pub max_steps: usize,
}

impl Default for Rk45Options {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            h_min: 1e-14,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

/// Accepted mesh with states and derivatives, supporting dense sampling.
#[derive(Clone, Debug)]
pub struct Rk45Solution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub derivs: Vec<Vec<f64>>,
}

impl Rk45Solution {
    /// Cubic Hermite sample at `t` (clamped to the integrated span).
    pub fn sample(&self, t: f64) -> Vec<f64> {
        let times = &self.times;
        let t = t.clamp(times[0], *times.last().unwrap());
        let seg = match times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.states[i].clone(),
            Err(i) => i.saturating_sub(1).min(times.len() - 2),
        };
        let (t0, t1) = (times[seg], times[seg + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (y0, y1) = (&self.states[seg], &self.states[seg + 1]);
        let (d0, d1) = (&self.derivs[seg], &self.derivs[seg + 1]);
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        (0..y0.len())
            .map(|i| h00 * y0[i] + h10 * h * d0[i] + h01 * y1[i] + h11 * h * d1[i])
            .collect()
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().unwrap()
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate y' = f(t, y) over `t_span`, recording every accepted step.
pub fn integrate<F>(
    f: F,
    t_span: (f64, f64),
    y0: &[f64],
    opts: &Rk45Options,
) -> Result<Rk45Solution, Rk45Error>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let (t0, t_end) = t_span;
    let dim = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut dy = vec![0.0; dim];
    f(t, &y, &mut dy);

    let mut sol = Rk45Solution {
        times: vec![t],
        states: vec![y.clone()],
        derivs: vec![dy.clone()],
    };
    if (t_end - t0).abs() == 0.0 {
        return Ok(sol);
    }

    let mut h = ((t_end - t0) / 100.0)
        .abs()
        .min(0.1)
        .min(opts.h_max)
        .max(opts.h_min * 10.0);
    let mut k = vec![vec![0.0; dim]; 7];
    k[0].copy_from_slice(&dy);
    let mut steps = 0usize;

    while t < t_end {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Rk45Error::StepBudget(opts.max_steps));
        }
        h = h.min(t_end - t);
        // Stage evaluations.
        for s in 0..6 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate().take(s + 1) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..dim {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            let ts = t + C[s] * h;
            let (head, tail) = k.split_at_mut(s + 1);
            let _ = head;
            f(ts, &ys, &mut tail[0]);
        }
        // 5th-order solution is the last stage's argument (FSAL).
        let mut y5 = y.clone();
        for (j, kj) in k.iter().enumerate().take(6) {
            let a = A[5][j];
            if a != 0.0 {
                for i in 0..dim {
                    y5[i] += h * a * kj[i];
                }
            }
        }
        // k7 = f(t+h, y5); reuse tail slot.
        let mut k7 = vec![0.0; dim];
        f(t + h, &y5, &mut k7);
        // Embedded 4th-order estimate and scaled error.
        let mut err2 = 0.0;
        for i in 0..dim {
            let mut y4i = y[i];
            for (j, kj) in k.iter().enumerate().take(6) {
                y4i += h * B4[j] * kj[i];
            }
            y4i += h * B4[6] * k7[i];
            let sc = opts.tol + opts.tol * y[i].abs().max(y5[i].abs());
            let e = (y5[i] - y4i) / sc;
            err2 += e * e;
        }
        let err = (err2 / dim as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y = y5;
            k[0].copy_from_slice(&k7);
            sol.times.push(t);
            sol.states.push(y.clone());
            sol.derivs.push(k7.clone());
            let factor = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
            h = (h * factor).min(opts.h_max);
        } else {
            let factor = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            h *= factor;
        }
        if h < opts.h_min {
            return Err(Rk45Error::StepUnderflow { t });
        }
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_matches_closed_form() {
        let sol = integrate(
            |_, y, dy| dy[0] = -y[0],
            (0.0, 5.0),
            &[1.0],
            &Rk45Options {
                tol: 1e-10,
                h_max: 0.02,
                ..Default::default()
            },
        )
        .unwrap();
        for t in [0.5, 1.0, 2.5, 5.0] {
            let got = sol.sample(t)[0];
            assert!((got - (-t).exp()).abs() < 1e-9, "t={t}: {got}");
        }
    }

    #[test]
    fn logistic_ode_long_run() {
        // y' = y(1 - 3y) approaches 1/3.
        let sol = integrate(
            |_, y, dy| dy[0] = y[0] * (1.0 - 3.0 * y[0]),
            (0.0, 60.0),
            &[0.1],
            &Rk45Options {
                tol: 1e-10,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((sol.final_state()[0] - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn stiffness_guard_fires_on_blowup() {
        // y' = y² from y(0)=1 blows up at t=1; the integrator must give up
        // rather than loop forever.
        let res = integrate(
            |_, y, dy| dy[0] = y[0] * y[0],
            (0.0, 2.0),
            &[1.0],
            &Rk45Options {
                tol: 1e-8,
                h_min: 1e-12,
                max_steps: 100_000,
                ..Default::default()
            },
        );
        assert!(res.is_err());
    }
}
