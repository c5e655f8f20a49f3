//! CSV series and TOML run reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::bounds::{LowerBoundParams, LowerBoundReport};
use crate::certificates::{Augmented, CertificateReport, InequalityFlags};
use crate::error::{Error, Result};
use crate::integrator::BlowupEvent;
use crate::series::TimeSeries;
use crate::verification::{ConvergenceStudy, Level, RichardsonReport};

use super::config::Config;

pub const CSV_HEADER: [&str; 11] =
    ["t", "E", "diss_residual", "linf_v", "linf_p", "l2_v", "l2_p", "F", "Fprime", "G", "psi"];

/// Fixed 17-significant-digit scientific notation; `nan`/`inf` spelled out.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// Series as CSV text. `residuals` and `augmented`, when present, line up
/// with the samples; missing values are written as `nan`.
pub fn series_csv(
    series: &TimeSeries,
    residuals: Option<&[f64]>,
    augmented: Option<&[Augmented]>,
    stride: usize,
) -> String {
    let mut out = CSV_HEADER.join(",");
    out.push('\n');
    let n = series.len();
    for (i, s) in series.samples().iter().enumerate() {
        if i % stride != 0 && i + 1 != n {
            continue;
        }
        let res = residuals.and_then(|r| r.get(i)).copied().unwrap_or(f64::NAN);
        let aug = augmented.and_then(|a| a.get(i));
        let row = [
            s.t,
            s.energy,
            res,
            s.linf_v,
            s.linf_p,
            s.mass_v.sqrt(),
            s.mass_p.sqrt(),
            aug.map_or(f64::NAN, |a| a.f),
            aug.map_or(f64::NAN, |a| a.f_prime),
            aug.map_or(f64::NAN, |a| a.g),
            s.psi,
        ];
        let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub final_time: f64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dissipation_residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateSection {
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<CertificateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inequalities: Option<InequalityFlags>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundSection {
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<LowerBoundParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<LowerBoundReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_ode_violation: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spatial: Option<ConvergenceStudy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temporal: Option<ConvergenceStudy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_blow_levels: Option<Vec<Level>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_blow_richardson: Option<RichardsonReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub config: Config,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<RunSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blowup: Option<BlowupEvent>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<LowerBoundSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceSection>,
    pub invariant_flags: BTreeMap<String, bool>,
    /// Wall-clock seconds per phase.
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(command: &str, config: &Config) -> Self {
        Self {
            command: command.into(),
            config: config.clone(),
            run: None,
            blowup: None,
            certificate: None,
            lower_bound: None,
            convergence: None,
            invariant_flags: BTreeMap::new(),
            timings: BTreeMap::new(),
        }
    }

    /// Records a named check. Each name may be recorded once.
    pub fn flag(&mut self, name: &str, ok: bool) {
        let previous = self.invariant_flags.insert(name.into(), ok);
        debug_assert!(previous.is_none(), "flag {name} recorded twice");
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report serializes")
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.display().to_string(), source })?;
    }
    std::fs::write(path, contents).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Convergence levels as CSV: `study,cells,dt,steps,error`.
pub fn convergence_csv(section: &ConvergenceSection) -> String {
    let mut out = String::from("study,cells,dt,steps,error\n");
    for (name, study) in [("spatial", &section.spatial), ("temporal", &section.temporal)] {
        if let Some(study) = study {
            for l in &study.levels {
                let _ = writeln!(out, "{name},{},{},{},{}", l.cells, fmt_num(l.dt), l.steps, fmt_num(l.error));
            }
        }
    }
    if let Some(levels) = &section.t_blow_levels {
        for l in levels {
            let _ = writeln!(out, "t_blow,{},nan,0,{}", l.cells, fmt_num(l.value));
        }
    }
    out
}
