//! The subcommand pipelines, usable without the binary.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, LowerBoundParams};
use crate::certificates::{self, Certificate, CertificateError};
use crate::error::{Error, Result};
use crate::integrator::{run, RunOutput};
use crate::series::TimeSeries;
use crate::verification::{self, richardson, Level};

use super::config::Config;
use super::output::{
    convergence_csv, series_csv, write_file, CertificateSection, ConvergenceSection, LowerBoundSection, RunReport,
    RunSummary,
};

/// Exit status of a completed command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Usage,
    Infeasible,
    BoundViolated,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Usage => 1,
            Status::Infeasible => 3,
            Status::BoundViolated => 4,
        }
    }
}

/// Relative tolerance on sample-to-sample energy increase.
pub const ENERGY_TOL: f64 = 1e-8;
/// Relative tolerance on the discrete dissipation identity.
pub const DISSIPATION_TOL: f64 = 1e-5;
/// Relative tolerance on the ψ differential inequality.
pub const PSI_ODE_TOL: f64 = 1e-4;
/// Relative tolerance on the coercivity estimate.
pub const COERCIVITY_TOL: f64 = 1e-6;

fn seconds(start: Instant) -> f64 {
    start.elapsed().as_secs_f64()
}

/// Size of the terms making up `E` at each sample.
fn energy_scale(series: &TimeSeries) -> Vec<f64> {
    series.samples().iter().map(|s| 1.0 + s.stiffness + s.kinetic() + s.psi.abs()).collect()
}

pub fn energy_nonincreasing(series: &TimeSeries) -> bool {
    let scale = energy_scale(series);
    series
        .samples()
        .windows(2)
        .zip(&scale)
        .all(|(w, sc)| w[1].energy <= w[0].energy + ENERGY_TOL * sc)
}

/// Samples before the one at which a blow-up threshold was crossed.
pub fn pre_blowup(out: &RunOutput) -> TimeSeries {
    let samples = out.series.samples();
    match out.blowup {
        Some(_) if samples.len() > 1 => TimeSeries::new(samples[..samples.len() - 1].to_vec()),
        _ => out.series.clone(),
    }
}

pub struct Simulation {
    pub out: RunOutput,
    pub residuals: Option<Vec<f64>>,
    pub report: RunReport,
}

/// Runs the configured problem and fills the run-related report sections.
pub fn simulate(cfg: &Config, command: &str) -> Result<Simulation> {
    let mut report = RunReport::new(command, cfg);
    let start = Instant::now();
    let system = cfg.system()?;
    let out = run(&system, &cfg.initial_state()?, &cfg.time)?;
    report.timings.insert("simulate".into(), seconds(start));
    let residuals = certificates::dissipation_residuals(&out.series).ok();
    report.run = Some(RunSummary {
        accepted_steps: out.accepted_steps,
        rejected_steps: out.rejected_steps,
        final_time: out.final_time,
        samples: out.series.len(),
        dissipation_residual: residuals.as_ref().map(|r| r.iter().copied().fold(0.0, f64::max)),
    });
    report.blowup = out.blowup;
    report.flag("energy_nonincreasing", energy_nonincreasing(&out.series));
    // Differencing E across a blow-up measures the step size, not the scheme.
    if let (Some(r), None) = (&residuals, out.blowup) {
        let scale = energy_scale(&out.series);
        report.flag("dissipation_identity", r.iter().zip(&scale).all(|(r, s)| *r <= DISSIPATION_TOL * s));
    }
    Ok(Simulation { out, residuals, report })
}

pub fn certify_series(cfg: &Config, series: &TimeSeries) -> std::result::Result<Certificate, CertificateError> {
    let p = &cfg.physics;
    certificates::certify(series, cfg.source.eta, p.lambda1, p.lambda2, cfg.certificate.lambda_cert)
}

fn certificate_section(
    report: &mut RunReport,
    out: &RunOutput,
    cert: &std::result::Result<Certificate, CertificateError>,
) {
    match cert {
        Ok(c) => {
            report.flag("certificate_feasible", true);
            report.flag("horizon_consistent", c.report.horizon_consistent);
            report.flag("lemma31_ok", c.flags.lemma31_ok);
            report.flag("lemma32_ok", c.flags.lemma32_ok);
            report.flag("Q_nonneg_ok", c.flags.q_nonneg_ok);
            report.flag("G_concave_ok", c.flags.g_concave_ok);
            if let Some(b) = out.blowup {
                report.flag("t_blow_le_t_m", b.t_blow <= c.report.t_m);
            }
            report.certificate = Some(CertificateSection {
                status: "feasible".into(),
                reason: None,
                report: Some(c.report),
                inequalities: Some(c.flags),
            });
        }
        Err(e) => {
            report.flag("certificate_feasible", false);
            report.certificate = Some(CertificateSection {
                status: "infeasible".into(),
                reason: Some(e.to_string()),
                report: None,
                inequalities: None,
            });
        }
    }
}

pub struct Certified {
    pub sim: Simulation,
    pub certificate: std::result::Result<Certificate, CertificateError>,
}

pub fn certify(cfg: &Config) -> Result<Certified> {
    let mut sim = simulate(cfg, "certify")?;
    let start = Instant::now();
    let series = pre_blowup(&sim.out);
    let certificate = certify_series(cfg, &series);
    sim.report.timings.insert("certify".into(), seconds(start));
    certificate_section(&mut sim.report, &sim.out, &certificate);
    Ok(Certified { sim, certificate })
}

pub struct Bounded {
    pub params: Option<LowerBoundParams>,
    pub report: Option<bounds::LowerBoundReport>,
    pub reason: Option<String>,
}

pub fn lower_bound(cfg: &Config) -> Result<Bounded> {
    let grid = cfg.grid()?;
    let source = cfg.source_model();
    let psi0 = bounds::psi(&cfg.initial_state()?, &source, &grid);
    let params = match LowerBoundParams::new(&cfg.params(), &source, grid.length()) {
        Ok(p) => p,
        Err(e) => return Ok(Bounded { params: None, report: None, reason: Some(e.to_string()) }),
    };
    Ok(match bounds::lower_bound_tstar(psi0, &params) {
        Ok(r) => Bounded { params: Some(params), report: Some(r), reason: None },
        Err(e) => Bounded { params: Some(params), report: None, reason: Some(e.to_string()) },
    })
}

fn lower_bound_section(report: &mut RunReport, lb: &Bounded, series: Option<&TimeSeries>) {
    let mut psi_ode_violation = None;
    if let (Some(params), Some(series)) = (&lb.params, series) {
        if let Ok(v) = bounds::check_psi_ode(series, params) {
            let scale = series.samples().iter().map(|s| params.rate(s.psi)).fold(1.0, f64::max);
            report.flag("psi_ode_ok", v <= PSI_ODE_TOL * scale);
            psi_ode_violation = Some(v);
        }
        if bounds::coercivity_excess(series, params).is_some() {
            report.flag("coercivity_ok", bounds::coercivity_holds(series, params, COERCIVITY_TOL));
        }
    }
    report.lower_bound = Some(LowerBoundSection {
        status: if lb.report.is_some() { "ok".into() } else { "undefined".into() },
        reason: lb.reason.clone(),
        params: lb.params,
        report: lb.report,
        psi_ode_violation,
    });
}

/// Whether `t_blow ≥ T*` for a run; `None` without a blow-up or a finite bound.
pub fn blowup_respects_bound(out: &RunOutput, lb: &Bounded) -> Option<bool> {
    match (out.blowup, lb.report) {
        (Some(b), Some(r)) if !r.infinite => Some(b.t_blow >= r.t_star),
        _ => None,
    }
}

fn write_outputs(dir: &Path, sim: &Simulation, aug: Option<&[certificates::Augmented]>, cfg: &Config) -> Result<()> {
    let csv = series_csv(&sim.out.series, sim.residuals.as_deref(), aug, cfg.output.stride);
    write_file(&dir.join("series.csv"), &csv)?;
    write_file(&dir.join("report.toml"), &sim.report.to_toml())
}

/// `F`, `F′`, `G` for the CSV: the certificate's own rows, padded to the
/// full series when the crossing sample was left out.
fn csv_augmented(series: &TimeSeries, cert: &Certificate) -> Vec<certificates::Augmented> {
    if cert.augmented.len() == series.len() {
        return cert.augmented.clone();
    }
    certificates::f_of_t(series, &cert.report.params).unwrap_or_else(|_| cert.augmented.clone())
}

pub fn run_simulate(cfg: &Config, out_dir: &Path) -> Result<Status> {
    let mut sim = simulate(cfg, "simulate")?;
    // F, F′ and G are filled in whenever a certificate exists for the run.
    let cert = certify_series(cfg, &pre_blowup(&sim.out)).ok();
    let aug = cert.as_ref().map(|c| csv_augmented(&sim.out.series, c));
    sim.report.timings.insert("total".into(), sim.report.timings["simulate"]);
    write_outputs(out_dir, &sim, aug.as_deref(), cfg)?;
    Ok(Status::Ok)
}

pub fn run_certify(cfg: &Config, out_dir: &Path) -> Result<Status> {
    let c = certify(cfg)?;
    let aug = c.certificate.as_ref().ok().map(|cert| csv_augmented(&c.sim.out.series, cert));
    write_outputs(out_dir, &c.sim, aug.as_deref(), cfg)?;
    Ok(match c.certificate {
        Ok(_) => Status::Ok,
        Err(e) => {
            eprintln!("certificate: {e}");
            Status::Infeasible
        }
    })
}

pub fn run_lowerbound(cfg: &Config, out_dir: &Path, with_sim: bool) -> Result<Status> {
    let start = Instant::now();
    let lb = lower_bound(cfg)?;
    let elapsed = seconds(start);
    if !with_sim {
        let mut report = RunReport::new("lowerbound", cfg);
        report.timings.insert("lower_bound".into(), elapsed);
        lower_bound_section(&mut report, &lb, None);
        write_file(&out_dir.join("report.toml"), &report.to_toml())?;
        return Ok(Status::Ok);
    }
    let mut sim = simulate(cfg, "lowerbound")?;
    sim.report.timings.insert("lower_bound".into(), elapsed);
    lower_bound_section(&mut sim.report, &lb, Some(&pre_blowup(&sim.out)));
    let respected = blowup_respects_bound(&sim.out, &lb);
    if let Some(ok) = respected {
        sim.report.flag("t_blow_ge_T_star", ok);
    }
    write_outputs(out_dir, &sim, None, cfg)?;
    if respected == Some(false) {
        eprintln!("lower bound violated: t_blow below T_star");
        return Ok(Status::BoundViolated);
    }
    Ok(Status::Ok)
}

/// Spatial and temporal studies for linear problems; self-convergence of
/// the blow-up time otherwise.
pub fn convergence(cfg: &Config, levels: usize) -> Result<RunReport> {
    if levels < 2 {
        return Err(Error::Config("--levels must be at least 2".into()));
    }
    let mut report = RunReport::new("convergence", cfg);
    let start = Instant::now();
    let params = cfg.params();
    let source = cfg.source_model();
    let section = if source.is_null() {
        let init = cfg.initial_data()?;
        let t = cfg.time.t_end;
        let spatial = verification::spatial_study(
            &params,
            &source,
            cfg.domain.length,
            &init,
            cfg.domain.cells,
            levels,
            t,
            cfg.time.cfl,
        )?;
        let temporal = verification::temporal_study(&params, &source, &cfg.grid()?, &init, levels, t, cfg.time.cfl)?;
        let within = |o: &[f64], lo: f64, hi: f64| o.iter().all(|&x| x >= lo && x <= hi);
        report.flag("spatial_order_2", within(&spatial.orders, 1.7, 2.3));
        report.flag("temporal_order_4", within(&temporal.orders, 12f64.log2(), 20f64.log2()));
        ConvergenceSection { spatial: Some(spatial), temporal: Some(temporal), t_blow_levels: None, t_blow_richardson: None }
    } else {
        let points: Vec<Config> = (0..levels)
            .map(|i| {
                let mut c = cfg.clone();
                c.domain.cells = cfg.domain.cells << i;
                c
            })
            .collect();
        let runs: Vec<Result<RunOutput>> = points
            .par_iter()
            .map(|c| run(&c.system()?, &c.initial_state()?, &c.time))
            .collect();
        let mut t_levels = Vec::with_capacity(levels);
        for (c, r) in points.iter().zip(runs) {
            let r = r?;
            let b = r
                .blowup
                .ok_or_else(|| Error::Config(format!("no blow-up at N = {} before t_end", c.domain.cells)))?;
            t_levels.push(Level { cells: c.domain.cells, value: b.t_blow });
        }
        let rich = richardson(&t_levels, None, Some(2.0))?;
        let n = t_levels.len();
        let gap = (t_levels[n - 1].value - t_levels[n - 2].value).abs() / t_levels[n - 1].value;
        report.flag("t_blow_gap_below_5pct", gap < 0.05);
        ConvergenceSection { spatial: None, temporal: None, t_blow_levels: Some(t_levels), t_blow_richardson: Some(rich) }
    };
    report.convergence = Some(section);
    report.timings.insert("convergence".into(), seconds(start));
    Ok(report)
}

pub fn run_convergence(cfg: &Config, out_dir: &Path, levels: usize) -> Result<Status> {
    let report = convergence(cfg, levels)?;
    let section = report.convergence.as_ref().expect("convergence section");
    write_file(&out_dir.join("convergence.csv"), &convergence_csv(section))?;
    write_file(&out_dir.join("report.toml"), &report.to_toml())?;
    Ok(Status::Ok)
}

/// Values to sweep; an absent key keeps the base configuration's value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepGrid {
    pub a: Vec<f64>,
    pub eta: Vec<f64>,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
}

impl SweepGrid {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Cartesian product in the order `a`, `eta`, `lambda1`, `lambda2`.
    pub fn points(&self, base: &Config) -> Result<Vec<Config>> {
        let or = |v: &[f64], d: f64| if v.is_empty() { vec![d] } else { v.to_vec() };
        let mut out = Vec::new();
        for &a in &or(&self.a, base.source.a) {
            for &eta in &or(&self.eta, base.source.eta) {
                for &l1 in &or(&self.lambda1, base.physics.lambda1) {
                    for &l2 in &or(&self.lambda2, base.physics.lambda2) {
                        let mut c = base.clone();
                        c.source.a = a;
                        c.source.eta = eta;
                        c.physics.lambda1 = l1;
                        c.physics.lambda2 = l2;
                        c.refresh_growth();
                        c.output.dir = base.output.dir.join(format!("point_{:04}", out.len()));
                        c.validate()?;
                        out.push(c);
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub point: usize,
    pub a: f64,
    pub eta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub t_blow: f64,
    pub t_m: f64,
    pub t_star: f64,
}

fn sweep_point(index: usize, cfg: &Config) -> Result<SweepRow> {
    let c = certify(cfg)?;
    let mut sim = c.sim;
    let lb = lower_bound(cfg)?;
    lower_bound_section(&mut sim.report, &lb, Some(&pre_blowup(&sim.out)));
    if let Some(ok) = blowup_respects_bound(&sim.out, &lb) {
        sim.report.flag("t_blow_ge_T_star", ok);
    }
    sim.report.command = "sweep".into();
    let aug = c.certificate.as_ref().ok().map(|cert| csv_augmented(&sim.out.series, cert));
    write_outputs(&cfg.output.dir, &sim, aug.as_deref(), cfg)?;
    Ok(SweepRow {
        point: index,
        a: cfg.source.a,
        eta: cfg.source.eta,
        lambda1: cfg.physics.lambda1,
        lambda2: cfg.physics.lambda2,
        t_blow: sim.out.blowup.map_or(f64::NAN, |b| b.t_blow),
        t_m: c.certificate.as_ref().map_or(f64::NAN, |c| c.report.t_m),
        t_star: lb.report.map_or(f64::NAN, |r| r.t_star),
    })
}

pub fn sweep(base: &Config, grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    let points = grid.points(base)?;
    points.par_iter().enumerate().map(|(i, c)| sweep_point(i, c)).collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    use super::output::fmt_num;
    let mut out = String::from("point,a,eta,lambda1,lambda2,t_blow,t_m,T_star\n");
    for r in rows {
        let vals = [r.a, r.eta, r.lambda1, r.lambda2, r.t_blow, r.t_m, r.t_star].map(fmt_num);
        out.push_str(&format!("{},{}\n", r.point, vals.join(",")));
    }
    out
}

pub fn run_sweep(base: &Config, out_dir: &Path, grid_path: &Path) -> Result<Status> {
    let grid = SweepGrid::from_file(grid_path)?;
    let mut base = base.clone();
    base.output.dir = PathBuf::from(out_dir);
    let rows = sweep(&base, &grid)?;
    write_file(&out_dir.join("summary.csv"), &sweep_csv(&rows))?;
    Ok(Status::Ok)
}
