//! Method-of-lines driver for the reduced normalized flow.
//!
//! The stored profile u keeps the fixed class u′ ∈ (0, 1); the physical
//! evolving metric is (n+1)·g_u, so the reference profile is the
//! stationary point with Ric = g, scalar curvature n and pinching
//! constant 1/(n+1). At the potential level the normalized flow reduces
//! to
//!
//!   ∂p/∂t = (1/(n+1))·[(n−1)·log(u′/x) + log(u″/(x(1−x)))] + p
//!
//! with p the deviation from the reference profile. Both logarithm
//! arguments are the regularized metric ratios, finite up to the
//! boundary, so the right-hand side needs no special casing at the ends.
//!
//! Space is discretized with the fourth-order stencils of the potential
//! grid; time stepping is explicit RK4 under a parabolic step limit
//! Δt = safety·Δx²/max(diffusion coefficient), recomputed every step.

use serde::{Deserialize, Serialize};

use super::curvature::{node_curvature_raw, NodeCurvature};
use super::potential::{FlowError, RadialPotential, StencilTable};
use crate::envelope;

/// Initial data families for a run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    Fs,
    Perturbed {
        amplitude: f64,
        mode: usize,
        seed: u64,
    },
}

/// Configuration of one flow run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlowConfig {
    pub n: usize,
    #[serde(rename = "N")]
    pub nodes: usize,
    pub t_end: f64,
    #[serde(default = "default_safety")]
    pub safety: f64,
    #[serde(default = "default_cadence")]
    pub cadence: f64,
    pub init: InitialData,
    /// Record per-node curvature fields at output times.
    #[serde(default)]
    pub record_fields: bool,
}

fn default_safety() -> f64 {
    0.2
}

fn default_cadence() -> f64 {
    0.25
}

/// One output row of a trajectory: bounds over nodes (of the physical
/// metric), the h/F diagnostics and the envelope predictions seeded
/// from t = 0.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub scalar_min: f64,
    pub scalar_max: f64,
    pub ricci_min: f64,
    pub holsec_min: f64,
    pub orthbis_min: f64,
    pub mu_star: f64,
    pub h_max: f64,
    pub int_f: f64,
    pub env_scalar: f64,
    pub env_ricci: f64,
    pub env_holsec: f64,
}

impl TrajectoryRow {
    pub const CSV_HEADER: &'static str = "t,scalar_min,scalar_max,ricci_min,holsec_min,orthbis_min,mu_star,h_max,int_F,env_scalar,env_ricci,env_holsec";

    pub fn csv_values(&self) -> [f64; 12] {
        [
            self.t,
            self.scalar_min,
            self.scalar_max,
            self.ricci_min,
            self.holsec_min,
            self.orthbis_min,
            self.mu_star,
            self.h_max,
            self.int_f,
            self.env_scalar,
            self.env_ricci,
            self.env_holsec,
        ]
    }
}

/// Bound trajectories next to their envelope predictions.
#[derive(Clone, Debug, Default)]
pub struct TrajectoryRecord {
    pub rows: Vec<TrajectoryRow>,
}

impl TrajectoryRecord {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }
}

/// Per-node fields at one output time (physical normalization).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldFrame {
    pub t: f64,
    pub x: Vec<f64>,
    pub a_rad: Vec<f64>,
    pub b_rt: Vec<f64>,
    pub d_tt: Vec<f64>,
    pub scalar: Vec<f64>,
    pub f: Vec<f64>,
    pub deviation: Vec<f64>,
}

/// Result of a flow run.
#[derive(Clone, Debug)]
pub struct FlowRun {
    pub record: TrajectoryRecord,
    pub fields: Option<Vec<FieldFrame>>,
}

/// A potential at a time, with the derived diagnostic fields.
#[derive(Clone, Debug)]
pub struct FlowState {
    pub t: f64,
    pub potential: RadialPotential,
}

impl FlowState {
    /// Physical (volume-normalized) curvature components at a node.
    pub fn physical_curvature(&self, j: usize) -> Result<NodeCurvature, FlowError> {
        let scale = 1.0 / (self.potential.dim() as f64 + 1.0);
        Ok(node_curvature_raw(&self.potential, j)?.scaled(scale))
    }

    /// Potential velocity φ̇ (physical normalization) at every node.
    pub fn phi_dot(&self) -> Result<Vec<f64>, FlowError> {
        let n = self.potential.dim() as f64;
        Ok(rhs_field(
            self.potential.deviation(),
            self.potential.stencils(),
            self.potential.dim(),
            self.potential.nodes(),
            self.t,
        )?
        .into_iter()
        .map(|v| (n + 1.0) * v)
        .collect())
    }

    /// The gradient-energy field F = |∇φ̇|² and its maximum companion
    /// h = R − n + F; returns (F field, max h).
    pub fn h_functional(&self) -> Result<(Vec<f64>, f64), FlowError> {
        let p = &self.potential;
        let n = p.dim() as f64;
        let phi_dot = self.phi_dot()?;
        let st = p.stencils();
        let mut f_field = Vec::with_capacity(p.nodes() + 1);
        let mut h_max = f64::NEG_INFINITY;
        for j in 0..=p.nodes() {
            let d = p.derivs(j);
            let w = d.x * (1.0 - d.x);
            let dphi = st.derivative(&phi_dot, 1, j);
            // |∇φ̇|² = (∂_ρ φ̇)²/U″ = w·(∂_x φ̇)²/((n+1)·ratio2).
            let f = w * dphi * dphi / ((n + 1.0) * d.ratio2);
            let scalar = self.physical_curvature(j)?.scalar();
            h_max = h_max.max(scalar - n + f);
            f_field.push(f);
        }
        Ok((f_field, h_max))
    }

    /// ∫ F dV over the manifold with the reduced volume element,
    /// composite-Simpson in x (the grid size is even by construction):
    /// dV reduces to c_n · ratio2 · (x·ratio1)^{n−1} dx with
    /// c_n = πⁿ(n+1)ⁿ/(n−1)!.
    pub fn integral_f(&self) -> Result<f64, FlowError> {
        let p = &self.potential;
        let n = p.dim();
        let (f_field, _) = self.h_functional()?;
        let mut integrand = Vec::with_capacity(p.nodes() + 1);
        for j in 0..=p.nodes() {
            let d = p.derivs(j);
            let weight = d.ratio2 * (d.x * d.ratio1).powi(n as i32 - 1);
            integrand.push(f_field[j] * weight);
        }
        let mut fact = 1.0;
        for k in 1..n {
            fact *= k as f64;
        }
        let c_n = std::f64::consts::PI.powi(n as i32) * (n as f64 + 1.0).powi(n as i32) / fact;
        Ok(c_n * simpson(&integrand, 1.0 / p.nodes() as f64))
    }
}

fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    debug_assert!(n % 2 == 0);
    let mut acc = values[0] + values[n];
    for (j, v) in values.iter().enumerate().take(n).skip(1) {
        acc += if j % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// Flow right-hand side ∂p/∂t at every node; errors if the metric left
/// the Kähler cone at this state.
fn rhs_field(
    dev: &[f64],
    st: &StencilTable,
    n: usize,
    nodes: usize,
    time: f64,
) -> Result<Vec<f64>, FlowError> {
    let nf = n as f64;
    let mut out = Vec::with_capacity(nodes + 1);
    for j in 0..=nodes {
        let x = j as f64 / nodes as f64;
        let w = x * (1.0 - x);
        let wp = 1.0 - 2.0 * x;
        let p1 = st.derivative(dev, 1, j);
        let p2 = st.derivative(dev, 2, j);
        let r1 = 1.0 + (1.0 - x) * p1;
        let r2 = 1.0 + wp * p1 + w * p2;
        if r1 <= 0.0 || r2 <= 0.0 {
            return Err(FlowError::MetricDegenerate {
                node: j,
                x,
                time,
                what: format!("u'/x = {r1:.4e}, u''/(x(1-x)) = {r2:.4e}"),
            });
        }
        out.push(((nf - 1.0) * r1.ln() + r2.ln()) / (nf + 1.0) + dev[j]);
    }
    Ok(out)
}

/// Largest stable step under the parabolic limit: the diffusion
/// coefficient of the linearized equation is w/((n+1)·ratio2).
fn cfl_step(
    dev: &[f64],
    st: &StencilTable,
    n: usize,
    nodes: usize,
    safety: f64,
) -> f64 {
    let nf = n as f64;
    let dx = 1.0 / nodes as f64;
    let mut dmax: f64 = 1e-12;
    for j in 0..=nodes {
        let x = j as f64 / nodes as f64;
        let w = x * (1.0 - x);
        let wp = 1.0 - 2.0 * x;
        let p1 = st.derivative(dev, 1, j);
        let p2 = st.derivative(dev, 2, j);
        let r2 = 1.0 + wp * p1 + w * p2;
        if r2 > 0.0 {
            dmax = dmax.max(w / ((nf + 1.0) * r2));
        }
    }
    safety * dx * dx / dmax
}

fn build_initial(config: &FlowConfig) -> Result<RadialPotential, FlowError> {
    match config.init {
        InitialData::Fs => RadialPotential::fs(config.n, config.nodes),
        InitialData::Perturbed {
            amplitude,
            mode,
            seed,
        } => RadialPotential::perturbed(config.n, config.nodes, amplitude, mode, seed),
    }
}

/// Run the reduced flow, recording bounds, diagnostics and envelope
/// predictions at each output time.
pub fn run_flow(config: &FlowConfig) -> Result<FlowRun, FlowError> {
    if config.t_end <= 0.0 {
        return Err(FlowError::BadConfig("t_end must be positive".into()));
    }
    if !(config.safety > 0.0 && config.safety <= 1.0) {
        return Err(FlowError::BadConfig(
            "safety factor must lie in (0, 1]".into(),
        ));
    }
    if config.cadence <= 0.0 {
        return Err(FlowError::BadConfig("cadence must be positive".into()));
    }
    let base = build_initial(config)?;
    let nodes = config.nodes;
    let n = config.n;
    let st = base.stencils().clone();
    let mut dev = base.deviation().to_vec();
    let mut t = 0.0f64;

    let mut record = TrajectoryRecord::default();
    let mut fields = if config.record_fields {
        Some(Vec::new())
    } else {
        None
    };
    let mut seeds: Option<(f64, f64, f64)> = None; // scalar_min0, ricci_min0, holsec_min0

    let mut emit = |t: f64, dev: &[f64]| -> Result<(), FlowError> {
        let state = FlowState {
            t,
            potential: base.with_deviation(dev.to_vec()),
        };
        let mut scalar_min = f64::INFINITY;
        let mut scalar_max = f64::NEG_INFINITY;
        let mut ricci_min = f64::INFINITY;
        let mut holsec_min = f64::INFINITY;
        let mut orthbis_min = f64::INFINITY;
        let mut mu_star = f64::INFINITY;
        let mut frame = FieldFrame {
            t,
            x: Vec::new(),
            a_rad: Vec::new(),
            b_rt: Vec::new(),
            d_tt: Vec::new(),
            scalar: Vec::new(),
            f: Vec::new(),
            deviation: dev.to_vec(),
        };
        for j in 0..=nodes {
            let c = state.physical_curvature(j)?;
            let s = c.scalar();
            scalar_min = scalar_min.min(s);
            scalar_max = scalar_max.max(s);
            ricci_min = ricci_min.min(c.ricci_min());
            holsec_min = holsec_min.min(c.holsec_min());
            orthbis_min = orthbis_min.min(c.orthbis_min());
            mu_star = mu_star.min(c.mu_star());
            if fields.is_some() {
                frame.x.push(state.potential.x(j));
                frame.a_rad.push(c.a_rad);
                frame.b_rt.push(c.b_rt);
                frame.d_tt.push(c.d_tt);
                frame.scalar.push(s);
            }
        }
        let (f_field, h_max) = state.h_functional()?;
        let int_f = state.integral_f()?;
        if fields.is_some() {
            frame.f = f_field;
        }
        let (s0, r0, h0) = *seeds.get_or_insert((scalar_min, ricci_min, holsec_min));
        let env_scalar = envelope::scalar_lower_envelope(s0, t).unwrap_or(f64::NAN);
        let env_ricci = if r0 < 0.0 {
            -envelope::ricci_mu(-r0, t).unwrap_or(f64::NAN)
        } else {
            0.0
        };
        let env_holsec = if h0 < 0.0 {
            envelope::holsec_mu(h0, t).unwrap_or(f64::NAN)
        } else {
            0.0
        };
        record.rows.push(TrajectoryRow {
            t,
            scalar_min,
            scalar_max,
            ricci_min,
            holsec_min,
            orthbis_min,
            mu_star,
            h_max,
            int_f,
            env_scalar,
            env_ricci,
            env_holsec,
        });
        if let Some(fr) = fields.as_mut() {
            fr.push(frame);
        }
        Ok(())
    };

    emit(t, &dev)?;
    let mut next_out = config.cadence.min(config.t_end);

    while t < config.t_end - 1e-12 {
        let dt_cfl = cfl_step(&dev, &st, n, nodes, config.safety);
        let dt = dt_cfl.min(next_out - t).min(config.t_end - t);
        if dt < 1e-12 {
            return Err(FlowError::CflFailure { time: t });
        }
        // Classical RK4.
        let k1 = rhs_field(&dev, &st, n, nodes, t)?;
        let y2: Vec<f64> = dev
            .iter()
            .zip(&k1)
            .map(|(y, k)| y + 0.5 * dt * k)
            .collect();
        let k2 = rhs_field(&y2, &st, n, nodes, t + 0.5 * dt)?;
        let y3: Vec<f64> = dev
            .iter()
            .zip(&k2)
            .map(|(y, k)| y + 0.5 * dt * k)
            .collect();
        let k3 = rhs_field(&y3, &st, n, nodes, t + 0.5 * dt)?;
        let y4: Vec<f64> = dev.iter().zip(&k3).map(|(y, k)| y + dt * k).collect();
        let k4 = rhs_field(&y4, &st, n, nodes, t + dt)?;
        for j in 0..=nodes {
            dev[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        t += dt;
        if (t - next_out).abs() < 1e-12 || t >= config.t_end - 1e-12 {
            emit(t, &dev)?;
            next_out = (next_out + config.cadence).min(config.t_end);
        }
    }
    Ok(FlowRun {
        record,
        fields,
    })
}
