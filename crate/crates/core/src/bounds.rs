//! Lower bound on the blow-up time from the growth of `ψ(t) = ∫I(v, p)`.
//!
//! Along a solution `ψ′ ≤ c₁ψ + c₂Σψ^{β_i}` with `c₁ = 2/m` and
//! `c₂ = A(2/m)^r`, so the solution cannot blow up before
//! `T* = ∫_{ψ(0)}^∞ dy / (c₁y + c₂Σy^{β_i})`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::integrator::StateVector;
use crate::model::{PhysicalParams, SourceModel};
use crate::series::{derivative, TimeSeries};

/// Absolute accuracy requested from each quadrature piece.
pub const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundParams {
    pub m: f64,
    #[serde(rename = "Cp")]
    pub cp: f64,
    pub d: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub r: f64,
    pub exponents: [f64; 4],
}

impl LowerBoundParams {
    pub fn new(params: &PhysicalParams, source: &SourceModel, length: f64) -> Result<Self> {
        let m = params.alpha1().min(params.beta).min(1.0);
        let cp = (2.0 * length / std::f64::consts::PI).powi(2);
        Self::from_constants(m, cp, source.d, source.exponents)
    }

    pub fn from_constants(m: f64, cp: f64, d: f64, exponents: [f64; 4]) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::LowerBound(format!("m = {m} must be positive")));
        }
        if !(d >= 0.0) || !(cp > 0.0) {
            return Err(Error::LowerBound(format!("need d >= 0 and Cp > 0, got d = {d}, Cp = {cp}")));
        }
        if let Some(b) = exponents.iter().find(|b| !(**b >= 1.0)) {
            return Err(Error::LowerBound(format!("growth exponent {b} below 1")));
        }
        let a = d * d * exponents.iter().map(|&b| cp.powf(b)).fold(0.0, f64::max);
        let r = exponents.iter().copied().fold(1.0, f64::max);
        Ok(Self { m, cp, d, a, r, exponents })
    }

    /// Reduced form with explicit `c₁`, `c₂`: `m = 2/c₁` and `A` such that
    /// `A(2/m)^r = c₂`.
    pub fn reduced(c1: f64, c2: f64, exponents: [f64; 4]) -> Result<Self> {
        let r = exponents.iter().copied().fold(1.0, f64::max);
        let m = 2.0 / c1;
        let mut lb = Self::from_constants(m, 1.0, 0.0, exponents)?;
        lb.a = c2 / c1.powf(r);
        Ok(lb)
    }

    pub fn c1(&self) -> f64 {
        2.0 / self.m
    }

    pub fn c2(&self) -> f64 {
        self.a * self.c1().powf(self.r)
    }

    /// Right side of the differential inequality for `ψ′`.
    pub fn rate(&self, psi: f64) -> f64 {
        let psi = psi.max(0.0);
        self.c1() * psi + self.c2() * self.exponents.iter().map(|&b| psi.powf(b)).sum::<f64>()
    }

    /// `y^r / (c₁y + c₂Σy^{β_i})`, written so it stays finite for huge `y`.
    fn scaled(&self, y: f64) -> f64 {
        let (c1, c2, r) = (self.c1(), self.c2(), self.r);
        1.0 / (c1 * y.powf(1.0 - r) + c2 * self.exponents.iter().map(|&b| y.powf(b - r)).sum::<f64>())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub psi0: f64,
    /// `f64::INFINITY` when the integral diverges.
    #[serde(rename = "T_star")]
    pub t_star: f64,
    pub infinite: bool,
    pub quadrature_error: f64,
}

pub fn psi(state: &StateVector, source: &SourceModel, grid: &Grid) -> f64 {
    let i: Vec<f64> = state.v.iter().zip(state.p.iter()).map(|(&v, &p)| source.potential(v, p)).collect();
    grid.integrate(&i)
}

pub fn lower_bound_tstar(psi0: f64, lb: &LowerBoundParams) -> Result<LowerBoundReport> {
    if !(psi0 > 0.0) || !psi0.is_finite() {
        return Err(Error::LowerBound(format!("psi(0) = {psi0} must be positive")));
    }
    let n_r = lb.exponents.iter().filter(|&&b| b == lb.r).count() as f64;
    if lb.r <= 1.0 || lb.c2() == 0.0 {
        return Ok(LowerBoundReport { psi0, t_star: f64::INFINITY, infinite: true, quadrature_error: 0.0 });
    }
    let y_split = (10.0 * psi0).max(10.0);
    // y = e^s on [ψ(0), Y]: integrand y/g(y), smooth on any scale
    let head = quadrature::integrate(
        |s: f64| {
            let y = s.exp();
            y.powf(1.0 - lb.r) * lb.scaled(y)
        },
        psi0.ln(),
        y_split.ln(),
        QUAD_TOL,
    );
    // u = y^{1−r}/(r−1) maps [Y, ∞) onto [0, U]; dy = −y^r du
    let rm1 = lb.r - 1.0;
    let u_max = y_split.powf(-rm1) / rm1;
    let tail = quadrature::integrate(
        |u: f64| {
            if u <= 0.0 {
                1.0 / (lb.c2() * n_r)
            } else {
                lb.scaled((rm1 * u).powf(-1.0 / rm1))
            }
        },
        0.0,
        u_max,
        QUAD_TOL,
    );
    let tail_bound = u_max / (lb.c2() * n_r);
    let tail_value = tail.integral.min(tail_bound);
    let t_star = head.integral + tail_value;
    if !(t_star > 0.0) || !t_star.is_finite() {
        return Err(Error::LowerBound(format!("quadrature failed: {t_star}")));
    }
    Ok(LowerBoundReport {
        psi0,
        t_star,
        infinite: false,
        quadrature_error: head.error_estimate + tail.error_estimate,
    })
}

/// `max(ψ′ − rate(ψ))` over the samples, with `ψ′` from [`derivative`].
pub fn check_psi_ode(series: &TimeSeries, lb: &LowerBoundParams) -> Result<f64> {
    if series.len() < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: series.len() });
    }
    let psi = series.column(|s| s.psi);
    let dpsi = derivative(&series.times(), &psi);
    Ok(dpsi.iter().zip(&psi).map(|(d, &y)| d - lb.rate(y)).fold(f64::NEG_INFINITY, f64::max))
}

/// `max(m·(‖v_x‖² + ‖γv_x − p_x‖² + ‖v_t‖² + ‖p_t‖²) − 2ψ)` over samples with
/// `E ≤ 0`; `None` when no such sample exists.
pub fn coercivity_excess(series: &TimeSeries, lb: &LowerBoundParams) -> Option<f64> {
    series
        .samples()
        .iter()
        .filter(|s| s.energy <= 0.0)
        .map(|s| lb.m * (s.grad_v + s.grad_mix + s.kinetic()) - 2.0 * s.psi)
        .reduce(f64::max)
}

/// Relative form of [`coercivity_excess`]: every sample with `E ≤ 0`
/// satisfies `m·(...) ≤ 2ψ(1 + rel_tol)`.
pub fn coercivity_holds(series: &TimeSeries, lb: &LowerBoundParams, rel_tol: f64) -> bool {
    series
        .samples()
        .iter()
        .filter(|s| s.energy <= 0.0)
        .all(|s| lb.m * (s.grad_v + s.grad_mix + s.kinetic()) <= 2.0 * s.psi * (1.0 + rel_tol))
}
