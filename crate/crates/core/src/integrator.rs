//! Method-of-lines integration of the beam system: second-order finite
//! differences in space, classical RK4 in time, step control driven by the
//! CFL limit and by the relative growth of the state's sup norm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::model::{PhysicalParams, SourceModel};
use crate::series::{Sample, TimeSeries};

/// Nodal unknowns `(v, p, v_t, p_t)` at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub v: Field,
    pub p: Field,
    pub vt: Field,
    pub pt: Field,
}

impl StateVector {
    pub fn zeros(grid: &Grid) -> Self {
        Self { v: grid.zeros(), p: grid.zeros(), vt: grid.zeros(), pt: grid.zeros() }
    }

    fn parts(&self) -> [&Field; 4] {
        [&self.v, &self.p, &self.vt, &self.pt]
    }

    fn parts_mut(&mut self) -> [&mut Field; 4] {
        [&mut self.v, &mut self.p, &mut self.vt, &mut self.pt]
    }

    pub fn is_finite(&self) -> bool {
        self.parts().iter().all(|f| f.is_finite())
    }

    /// Largest absolute nodal value over all four fields.
    pub fn linf(&self) -> f64 {
        self.parts()
            .iter()
            .flat_map(|f| f.iter())
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// `self = base + h·k`
    fn set_axpy(&mut self, base: &StateVector, h: f64, k: &StateVector) {
        for ((out, b), k) in self.parts_mut().into_iter().zip(base.parts()).zip(k.parts()) {
            for ((o, b), k) in out.iter_mut().zip(b.iter()).zip(k.iter()) {
                *o = b + h * k;
            }
        }
    }

    /// Maximum nodal distance to `other` across all four fields.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.parts()
            .iter()
            .zip(other.parts())
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// Spatially discretized system with its coefficients and source.
#[derive(Debug, Clone, Copy)]
pub struct BeamSystem {
    pub grid: Grid,
    pub params: PhysicalParams,
    pub source: SourceModel,
}

impl BeamSystem {
    pub fn new(grid: Grid, params: PhysicalParams, source: SourceModel) -> Self {
        Self { grid, params, source }
    }

    /// Time derivative of `state`.
    pub fn rhs(&self, state: &StateVector) -> StateVector {
        let mut out = StateVector::zeros(&self.grid);
        let mut scratch = Scratch::new(&self.grid);
        self.rhs_into(state, &mut out, &mut scratch);
        out
    }

    fn rhs_into(&self, state: &StateVector, out: &mut StateVector, scratch: &mut Scratch) {
        let PhysicalParams { alpha, beta, lambda1, lambda2, .. } = self.params;
        let c = self.params.coupling();
        self.grid.dxx_into(&state.v, &mut scratch.vxx);
        self.grid.dxx_into(&state.p, &mut scratch.pxx);
        let n = self.grid.nodes();
        out.v[0] = 0.0;
        out.p[0] = 0.0;
        out.vt[0] = 0.0;
        out.pt[0] = 0.0;
        for j in 1..n {
            let f1 = self.source.force(state.v[j], state.p[j]);
            let (vxx, pxx) = (scratch.vxx[j], scratch.pxx[j]);
            out.v[j] = state.vt[j];
            out.p[j] = state.pt[j];
            out.vt[j] = alpha * vxx - c * pxx - lambda1 * state.vt[j] + f1;
            out.pt[j] = beta * pxx - c * vxx - lambda2 * state.pt[j] - f1;
        }
    }

    /// One classical RK4 step. Non-finite output is left for the caller to
    /// detect via [`StateVector::is_finite`].
    pub fn step_rk4(&self, state: &StateVector, dt: f64) -> StateVector {
        let mut rk = Rk4::new(&self.grid);
        let mut out = state.clone();
        rk.step(self, state, dt, &mut out);
        out
    }

    /// `n` fixed steps of size `dt`.
    pub fn integrate_fixed(&self, state: &StateVector, dt: f64, n: usize) -> StateVector {
        let mut rk = Rk4::new(&self.grid);
        let mut cur = state.clone();
        let mut next = state.clone();
        for _ in 0..n {
            rk.step(self, &cur, dt, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        cur
    }

    /// CFL-limited step `cfl·dx/c_max`.
    pub fn cfl_step(&self, cfl: f64) -> f64 {
        cfl * self.grid.dx() / self.params.max_wave_speed()
    }

    /// Diagnostics of `state` at time `t`.
    pub fn sample(&self, t: f64, state: &StateVector) -> Sample {
        let g = &self.grid;
        let PhysicalParams { beta, gamma, lambda1, lambda2, .. } = self.params;
        let acc = self.rhs(state);
        let mix: Vec<f64> = state.v.iter().zip(state.p.iter()).map(|(v, p)| gamma * v - p).collect();
        let n = g.nodes();
        let mut potential = vec![0.0; n];
        let mut work = vec![0.0; n];
        for j in 0..n {
            let (v, p) = (state.v[j], state.p[j]);
            let (f1, f2, i) = self.source.eval(v, p);
            potential[j] = i;
            work[j] = v * f1 + p * f2;
        }
        let grad_v = g.grad_norm_sq(&state.v);
        let grad_p = g.grad_norm_sq(&state.p);
        let grad_mix = g.grad_norm_sq(&mix);
        let kinetic_v = g.l2_norm_sq(&state.vt);
        let kinetic_p = g.l2_norm_sq(&state.pt);
        let mass_v = g.l2_norm_sq(&state.v);
        let mass_p = g.l2_norm_sq(&state.p);
        let cross_v = g.inner(&state.v, &state.vt);
        let cross_p = g.inner(&state.p, &state.pt);
        let psi = g.integrate(&potential);
        let stiffness = self.params.alpha1() * grad_v + beta * grad_mix;
        Sample {
            t,
            energy: 0.5 * (stiffness + kinetic_v + kinetic_p) - psi,
            dissipation: -lambda1 * kinetic_v - lambda2 * kinetic_p,
            psi,
            grad_v,
            grad_p,
            grad_mix,
            stiffness,
            kinetic_v,
            kinetic_p,
            mass_v,
            mass_p,
            cross: cross_v + cross_p,
            damped_cross: lambda1 * cross_v + lambda2 * cross_p,
            damped_mass: lambda1 * mass_v + lambda2 * mass_p,
            accel_inner: g.inner(&state.v, &acc.vt) + g.inner(&state.p, &acc.pt),
            source_work: g.integrate(&work),
            linf_v: g.linf(&state.v),
            linf_p: g.linf(&state.p),
            linf_state: state.linf(),
        }
    }
}

struct Scratch {
    vxx: Vec<f64>,
    pxx: Vec<f64>,
}

impl Scratch {
    fn new(grid: &Grid) -> Self {
        Self { vxx: vec![0.0; grid.nodes()], pxx: vec![0.0; grid.nodes()] }
    }
}

/// Reusable RK4 stage storage.
struct Rk4 {
    k: [StateVector; 4],
    stage: StateVector,
    scratch: Scratch,
}

impl Rk4 {
    fn new(grid: &Grid) -> Self {
        let z = StateVector::zeros(grid);
        Self {
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            stage: z,
            scratch: Scratch::new(grid),
        }
    }

    fn step(&mut self, sys: &BeamSystem, y: &StateVector, dt: f64, out: &mut StateVector) {
        let [k1, k2, k3, k4] = &mut self.k;
        sys.rhs_into(y, k1, &mut self.scratch);
        self.stage.set_axpy(y, 0.5 * dt, k1);
        sys.rhs_into(&self.stage, k2, &mut self.scratch);
        self.stage.set_axpy(y, 0.5 * dt, k2);
        sys.rhs_into(&self.stage, k3, &mut self.scratch);
        self.stage.set_axpy(y, dt, k3);
        sys.rhs_into(&self.stage, k4, &mut self.scratch);
        let h = dt / 6.0;
        let (ys, a, b, c, d) = (y.parts(), k1.parts(), k2.parts(), k3.parts(), k4.parts());
        for (i, o) in out.parts_mut().into_iter().enumerate() {
            let (y, a, b, c, d) = (ys[i], a[i], b[i], c[i], d[i]);
            for j in 0..o.len() {
                o[j] = y[j] + h * (a[j] + 2.0 * (b[j] + c[j]) + d[j]);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    /// Initial and largest step candidate.
    pub dt0: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub blowup_threshold: f64,
    pub dt_min: f64,
    /// Record one sample every this many accepted steps.
    pub sample_stride: usize,
    /// A step whose relative sup-norm change exceeds this is rejected and retried at half size.
    pub max_growth: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt0: 1e-2,
            cfl: 0.5,
            t_end: 1.0,
            blowup_threshold: 1e6,
            dt_min: 1e-12,
            sample_stride: 1,
            max_growth: 0.02,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.dt0 > 0.0 && self.dt0.is_finite()) {
            problems.push(format!("dt0 must be > 0 (got {})", self.dt0));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            problems.push(format!("cfl must lie in (0, 1) (got {})", self.cfl));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            problems.push(format!("t_end must be > 0 (got {})", self.t_end));
        }
        if !(self.blowup_threshold > 0.0) {
            problems.push(format!("blowup_threshold must be > 0 (got {})", self.blowup_threshold));
        }
        if !(self.dt_min > 0.0) {
            problems.push(format!("dt_min must be > 0 (got {})", self.dt_min));
        }
        if self.sample_stride == 0 {
            problems.push("sample_stride must be >= 1".into());
        }
        if !(self.max_growth > 0.0) {
            problems.push(format!("max_growth must be > 0 (got {})", self.max_growth));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::SimConfig(problems.join("; ")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    ThresholdExceeded,
    StepUnderflow,
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupEvent {
    pub t_blow: f64,
    pub trigger: Trigger,
    /// Sup norm of the last finite state.
    pub final_linf: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub series: TimeSeries,
    pub blowup: Option<BlowupEvent>,
    pub final_state: StateVector,
    pub final_time: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Integrates from `t = 0` until `config.t_end` or a blow-up event.
pub fn run(system: &BeamSystem, initial: &StateVector, config: &SimConfig) -> Result<RunOutput> {
    config.validate()?;
    let grid = &system.grid;
    if initial.v.len() != grid.nodes() {
        return Err(Error::SimConfig("initial state does not match grid".into()));
    }
    if !initial.is_finite() {
        return Err(Error::SimConfig("initial state is not finite".into()));
    }
    let mut state = initial.clone();
    // Dirichlet nodes are pinned regardless of the supplied data.
    state.v[0] = 0.0;
    state.p[0] = 0.0;

    let dt_cfl = system.cfl_step(config.cfl);
    let mut candidate = config.dt0.min(dt_cfl);
    let mut rk = Rk4::new(grid);
    let mut trial = state.clone();
    let mut series = TimeSeries::default();
    let mut t = 0.0;
    let mut linf = state.linf();
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut blowup = None;
    series.push(system.sample(t, &state));

    if linf >= config.blowup_threshold {
        blowup = Some(BlowupEvent { t_blow: 0.0, trigger: Trigger::ThresholdExceeded, final_linf: linf });
    }

    while blowup.is_none() && t < config.t_end {
        if candidate < config.dt_min {
            blowup = Some(BlowupEvent { t_blow: t, trigger: Trigger::StepUnderflow, final_linf: linf });
            break;
        }
        let remaining = config.t_end - t;
        let truncated = candidate >= remaining;
        let dt = if truncated { remaining } else { candidate };
        rk.step(system, &state, dt, &mut trial);
        if !trial.is_finite() {
            blowup = Some(BlowupEvent { t_blow: t + dt, trigger: Trigger::NonFinite, final_linf: linf });
            break;
        }
        let new_linf = trial.linf();
        let growth = if linf > 0.0 { (new_linf - linf).abs() / linf } else { 0.0 };
        if growth > config.max_growth {
            candidate = 0.5 * dt;
            rejected += 1;
            continue;
        }
        std::mem::swap(&mut state, &mut trial);
        t = if truncated { config.t_end } else { t + dt };
        linf = new_linf;
        accepted += 1;
        if !truncated && growth < 0.25 * config.max_growth {
            candidate = (2.0 * candidate).min(config.dt0).min(dt_cfl);
        }
        if linf >= config.blowup_threshold {
            series.push(system.sample(t, &state));
            blowup = Some(BlowupEvent { t_blow: t, trigger: Trigger::ThresholdExceeded, final_linf: linf });
            break;
        }
        if accepted.is_multiple_of(config.sample_stride) || t >= config.t_end {
            series.push(system.sample(t, &state));
        }
    }

    Ok(RunOutput {
        series,
        blowup,
        final_state: state,
        final_time: t,
        accepted_steps: accepted,
        rejected_steps: rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FieldSpec, InitialData};
    use std::f64::consts::PI;

    fn linear(gamma: f64, lambda: f64, cells: usize) -> BeamSystem {
        BeamSystem::new(
            Grid::new(1.0, cells).unwrap(),
            PhysicalParams::new(1.0, 1.0, gamma, lambda, lambda),
            SourceModel::null(8.0),
        )
    }

    fn mode_state(sys: &BeamSystem) -> StateVector {
        InitialData { v0: FieldSpec::sine(1.0), ..Default::default() }.to_state(&sys.grid).unwrap()
    }

    #[test]
    fn zero_state_has_zero_rhs_and_stays_zero() {
        let sys = linear(0.3, 0.1, 32);
        let z = StateVector::zeros(&sys.grid);
        assert_eq!(sys.rhs(&z), z);
        assert_eq!(sys.step_rk4(&z, 1e-2), z);
    }

    #[test]
    fn rhs_acceleration_of_mode() {
        let sys = linear(0.0, 0.0, 128);
        let s = mode_state(&sys);
        let acc = sys.rhs(&s);
        let k2 = (PI / 2.0).powi(2);
        let err = (0..sys.grid.nodes()).map(|j| (acc.vt[j] + k2 * s.v[j]).abs()).fold(0.0, f64::max);
        assert!(err < 1e-4, "{err}");
        assert_eq!(acc.v, s.vt);
    }

    #[test]
    fn rhs_isolates_damping() {
        let sys = linear(0.0, 0.7, 64);
        let mut s = StateVector::zeros(&sys.grid);
        s.vt = sys.grid.field_from_fn(|x| 2.0 * (PI * x / 2.0).sin());
        let acc = sys.rhs(&s);
        for j in 0..sys.grid.nodes() {
            assert_eq!(acc.vt[j], -0.7 * s.vt[j]);
        }
    }

    #[test]
    fn rejects_bad_config() {
        let sys = linear(0.0, 0.0, 16);
        let s = StateVector::zeros(&sys.grid);
        let bad = SimConfig { cfl: 1.0, ..Default::default() };
        assert!(matches!(run(&sys, &s, &bad), Err(Error::SimConfig(_))));
        let bad = SimConfig { dt0: 0.0, sample_stride: 0, ..Default::default() };
        let msg = run(&sys, &s, &bad).unwrap_err().to_string();
        assert!(msg.contains("dt0") && msg.contains("sample_stride"), "{msg}");
    }

    #[test]
    fn zero_run_stays_zero() {
        let sys = linear(0.0, 0.0, 16);
        let s = StateVector::zeros(&sys.grid);
        let out = run(&sys, &s, &SimConfig::default()).unwrap();
        assert!(out.blowup.is_none());
        assert_eq!(out.final_time, 1.0);
        assert!(out.series.samples().iter().all(|s| s.energy == 0.0 && s.linf_state == 0.0));
    }

    #[test]
    fn full_period_returns_to_start() {
        let sys = linear(0.0, 0.0, 64);
        let s = mode_state(&sys);
        let period = 2.0 * PI / (PI / 2.0);
        let n = 2000;
        let end = sys.integrate_fixed(&s, period / n as f64, n);
        // Dominated by the O(dx²) dispersion of the discrete frequency.
        assert!(end.max_abs_diff(&s) < 5e-3, "{}", end.max_abs_diff(&s));
    }

    #[test]
    fn time_reversal_recovers_initial_state() {
        let sys = linear(0.3, 0.0, 64);
        let mut s = mode_state(&sys);
        s.pt = sys.grid.field_from_fn(|x| 0.5 * (3.0 * PI * x / 2.0).sin());
        let dt = sys.cfl_step(0.5);
        let n = 300;
        let mut fwd = sys.integrate_fixed(&s, dt, n);
        for f in [&mut fwd.vt, &mut fwd.pt] {
            f.iter_mut().for_each(|x| *x = -*x);
        }
        let mut back = sys.integrate_fixed(&fwd, dt, n);
        for f in [&mut back.vt, &mut back.pt] {
            f.iter_mut().for_each(|x| *x = -*x);
        }
        assert!(back.max_abs_diff(&s) < 1e-8, "{}", back.max_abs_diff(&s));
    }

    #[test]
    fn dirichlet_nodes_stay_zero_and_energy_decays() {
        let sys = linear(0.3, 0.5, 64);
        let s = mode_state(&sys);
        let cfg = SimConfig { t_end: 1.0, ..Default::default() };
        let out = run(&sys, &s, &cfg).unwrap();
        assert_eq!(out.final_state.v[0], 0.0);
        assert_eq!(out.final_state.p[0], 0.0);
        let e0 = out.series.samples()[0].energy;
        for w in out.series.samples().windows(2) {
            assert!(w[1].energy <= w[0].energy + 1e-8 * (1.0 + e0.abs()));
        }
    }

    #[test]
    fn small_nonlinear_run_dissipates() {
        let grid = Grid::new(1.0, 64).unwrap();
        let sys = BeamSystem::new(grid, PhysicalParams::new(1.0, 1.0, 0.2, 0.3, 0.1), SourceModel::power_difference(1.0, 4.0));
        let s = InitialData { v0: FieldSpec::sine(0.5), p1: FieldSpec::sine(-0.3), ..Default::default() }
            .to_state(&grid)
            .unwrap();
        let out = run(&sys, &s, &SimConfig { t_end: 2.0, ..Default::default() }).unwrap();
        assert!(out.blowup.is_none());
        let e0 = out.series.samples()[0].energy;
        for w in out.series.samples().windows(2) {
            assert!(w[1].energy <= w[0].energy + 1e-8 * (1.0 + e0.abs()));
        }
    }

    #[test]
    fn large_data_blows_up() {
        let grid = Grid::new(1.0, 64).unwrap();
        let sys = BeamSystem::new(grid, PhysicalParams::new(1.0, 1.0, 0.0, 0.1, 0.1), SourceModel::power_difference(1.0, 8.0));
        let s = InitialData { v0: FieldSpec::sine(2.0), ..Default::default() }.to_state(&grid).unwrap();
        let out = run(&sys, &s, &SimConfig::default()).unwrap();
        let ev = out.blowup.expect("blow-up");
        assert_eq!(ev.trigger, Trigger::ThresholdExceeded);
        assert!(ev.t_blow > 0.0 && ev.t_blow < 1.0);
        assert!(out.rejected_steps > 0);
    }

    #[test]
    fn step_underflow_is_reported() {
        let grid = Grid::new(1.0, 32).unwrap();
        let sys = BeamSystem::new(grid, PhysicalParams::new(1.0, 1.0, 0.0, 0.0, 0.0), SourceModel::power_difference(1.0, 8.0));
        let s = InitialData { v0: FieldSpec::sine(2.0), ..Default::default() }.to_state(&grid).unwrap();
        let cfg = SimConfig { blowup_threshold: 1e300, dt_min: 1e-6, ..Default::default() };
        let ev = run(&sys, &s, &cfg).unwrap().blowup.unwrap();
        assert_eq!(ev.trigger, Trigger::StepUnderflow);
        assert!(ev.final_linf.is_finite());
    }
}
