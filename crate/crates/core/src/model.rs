//! Physical coefficients of the normalized beam system, the built-in source
//! families and initial data descriptors.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::integrator::StateVector;

/// Coefficients of
/// `v_tt − α v_xx + γβ p_xx + λ₁ v_t = f₁`, `p_tt − β p_xx + γβ v_xx + λ₂ p_t = f₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl PhysicalParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, lambda1: f64, lambda2: f64) -> Self {
        Self { alpha, beta, gamma, lambda1, lambda2 }
    }

    /// `α₁ = α − γ²β`; must be positive for the energy to be coercive.
    pub fn alpha1(&self) -> f64 {
        self.alpha - self.gamma * self.gamma * self.beta
    }

    /// Coupling coefficient `γβ` of the off-diagonal second derivatives.
    pub fn coupling(&self) -> f64 {
        self.gamma * self.beta
    }

    /// Largest characteristic speed of the linear part: square root of the
    /// top eigenvalue of `[[α, −γβ], [−γβ, β]]`.
    pub fn max_wave_speed(&self) -> f64 {
        let mean = 0.5 * (self.alpha + self.beta);
        let half_gap = 0.5 * (self.alpha - self.beta);
        let c = self.coupling();
        (mean + (half_gap * half_gap + c * c).sqrt()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    /// `I = (a/η)|v − p|^η`, `f₁ = a|v − p|^{η−2}(v − p)`, `f₂ = −f₁`.
    PowerDifference,
    Null,
}

/// A source family together with its growth data: the exponent `η` of the
/// superhomogeneity condition `∫(v f₁ + p f₂ − η I) ≥ 0` and the constants
/// `d`, `β₁..β₄` of `|f₁| ≤ d(|v|^β₁ + |p|^β₂)`, `|f₂| ≤ d(|v|^β₃ + |p|^β₄)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    pub kind: SourceKind,
    pub a: f64,
    pub eta: f64,
    pub d: f64,
    pub exponents: [f64; 4],
}

impl SourceModel {
    /// Power-difference source with its certified growth data `d = a·2^{η−2}`,
    /// `β_i = η − 1` (from `|v − p|^{η−1} ≤ 2^{η−2}(|v|^{η−1} + |p|^{η−1})`).
    pub fn power_difference(a: f64, eta: f64) -> Self {
        Self {
            kind: SourceKind::PowerDifference,
            a,
            eta,
            d: a * 2f64.powf(eta - 2.0),
            exponents: [eta - 1.0; 4],
        }
    }

    pub fn null(eta: f64) -> Self {
        Self { kind: SourceKind::Null, a: 0.0, eta, d: 0.0, exponents: [1.0; 4] }
    }

    /// Replaces the growth data used by the lower bound.
    pub fn with_growth(mut self, d: f64, exponents: [f64; 4]) -> Self {
        self.d = d;
        self.exponents = exponents;
        self
    }

    /// `(f₁, f₂, I)` at a point.
    #[inline]
    pub fn eval(&self, v: f64, p: f64) -> (f64, f64, f64) {
        match self.kind {
            SourceKind::Null => (0.0, 0.0, 0.0),
            SourceKind::PowerDifference => {
                let w = v - p;
                if w == 0.0 {
                    return (0.0, 0.0, 0.0);
                }
                let aw = w.abs();
                let pow = aw.powf(self.eta - 2.0);
                let f1 = self.a * pow * w;
                (f1, -f1, self.a / self.eta * pow * aw * aw)
            }
        }
    }

    /// `f₁` alone; `f₂ = −f₁` for both built-in families.
    #[inline]
    pub fn force(&self, v: f64, p: f64) -> f64 {
        match self.kind {
            SourceKind::Null => 0.0,
            SourceKind::PowerDifference => {
                let w = v - p;
                if w == 0.0 {
                    0.0
                } else {
                    self.a * w.abs().powf(self.eta - 2.0) * w
                }
            }
        }
    }

    #[inline]
    pub fn potential(&self, v: f64, p: f64) -> f64 {
        self.eval(v, p).2
    }

    pub fn is_null(&self) -> bool {
        self.kind == SourceKind::Null || self.a == 0.0
    }
}

/// Free-function form of [`SourceModel::eval`].
pub fn eval_sources(source: &SourceModel, v: f64, p: f64) -> (f64, f64, f64) {
    source.eval(v, p)
}

/// Trapezoid quadrature of `v f₁ + p f₂ − η I`; nonnegative whenever the
/// superhomogeneity hypothesis holds on these fields.
pub fn check_g2(source: &SourceModel, v: &[f64], p: &[f64], grid: &Grid) -> f64 {
    let integrand: Vec<f64> = v
        .iter()
        .zip(p)
        .map(|(&v, &p)| {
            let (f1, f2, i) = source.eval(v, p);
            v * f1 + p * f2 - source.eta * i
        })
        .collect();
    grid.integrate(&integrand)
}

/// A single violated constraint.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFinite(&'static str),
    AlphaNotPositive(f64),
    BetaNotPositive(f64),
    Lambda1Negative(f64),
    Lambda2Negative(f64),
    Alpha1NotPositive(f64),
    EtaTooSmall(f64),
    AmplitudeNegative(f64),
    GrowthConstantNegative(f64),
    GrowthExponentBelowOne { index: usize, value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite(name) => write!(f, "`{name}` must be finite"),
            Violation::AlphaNotPositive(x) => write!(f, "alpha must be > 0 (got {x})"),
            Violation::BetaNotPositive(x) => write!(f, "beta must be > 0 (got {x})"),
            Violation::Lambda1Negative(x) => write!(f, "lambda1 must be >= 0 (got {x})"),
            Violation::Lambda2Negative(x) => write!(f, "lambda2 must be >= 0 (got {x})"),
            Violation::Alpha1NotPositive(x) => {
                write!(f, "alpha1 = alpha - gamma^2*beta must be > 0 (got {x})")
            }
            Violation::EtaTooSmall(x) => write!(f, "source exponent eta must be > 2 (got {x})"),
            Violation::AmplitudeNegative(x) => write!(f, "source amplitude a must be >= 0 (got {x})"),
            Violation::GrowthConstantNegative(x) => {
                write!(f, "growth constant d must be >= 0 (got {x})")
            }
            Violation::GrowthExponentBelowOne { index, value } => {
                write!(f, "growth exponent beta_{} must be >= 1 (got {value})", index + 1)
            }
        }
    }
}

/// Outcome of [`validate_params`]: every violated constraint, in check order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Validation {
    pub violations: Vec<Violation>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::Invalid(self.violations))
        }
    }
}

pub fn validate_params(params: &PhysicalParams, source: &SourceModel) -> Validation {
    let mut out = Vec::new();
    let finite = [
        ("alpha", params.alpha),
        ("beta", params.beta),
        ("gamma", params.gamma),
        ("lambda1", params.lambda1),
        ("lambda2", params.lambda2),
        ("a", source.a),
        ("eta", source.eta),
        ("d", source.d),
    ];
    for (name, x) in finite {
        if !x.is_finite() {
            out.push(Violation::NonFinite(name));
        }
    }
    if !(params.alpha > 0.0) {
        out.push(Violation::AlphaNotPositive(params.alpha));
    }
    if !(params.beta > 0.0) {
        out.push(Violation::BetaNotPositive(params.beta));
    }
    if !(params.lambda1 >= 0.0) {
        out.push(Violation::Lambda1Negative(params.lambda1));
    }
    if !(params.lambda2 >= 0.0) {
        out.push(Violation::Lambda2Negative(params.lambda2));
    }
    if !(params.alpha1() > 0.0) {
        out.push(Violation::Alpha1NotPositive(params.alpha1()));
    }
    if !(source.eta > 2.0) {
        out.push(Violation::EtaTooSmall(source.eta));
    }
    if !(source.a >= 0.0) {
        out.push(Violation::AmplitudeNegative(source.a));
    }
    if !(source.d >= 0.0) {
        out.push(Violation::GrowthConstantNegative(source.d));
    }
    for (index, &value) in source.exponents.iter().enumerate() {
        if !(value >= 1.0) {
            out.push(Violation::GrowthExponentBelowOne { index, value });
        }
    }
    Validation { violations: out }
}

/// Descriptor for one of the four initial fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    #[default]
    Zero,
    /// `amplitude · sin(k_j x)` with `k_j = π(2j − 1)/(2L)`; compatible with
    /// both boundary conditions.
    Sine {
        amplitude: f64,
        #[serde(default = "default_mode")]
        mode: usize,
    },
    /// Explicit nodal values, validated against the boundary conditions.
    Values { values: Vec<f64> },
}

fn default_mode() -> usize {
    1
}

/// Wavenumber of mode `j ≥ 1` of `d²/dx²` with `u(0) = u_x(L) = 0`.
pub fn mode_wavenumber(j: usize, length: f64) -> f64 {
    PI * (2 * j - 1) as f64 / (2.0 * length)
}

impl FieldSpec {
    pub fn sine(amplitude: f64) -> Self {
        FieldSpec::Sine { amplitude, mode: 1 }
    }

    fn materialize(&self, name: &'static str, grid: &Grid, displacement: bool) -> Result<Field> {
        match self {
            FieldSpec::Zero => Ok(grid.zeros()),
            FieldSpec::Sine { amplitude, mode } => {
                if *mode == 0 {
                    return Err(Error::InitialData { field: name, reason: "mode index starts at 1".into() });
                }
                if !amplitude.is_finite() {
                    return Err(Error::InitialData { field: name, reason: "amplitude must be finite".into() });
                }
                let k = mode_wavenumber(*mode, grid.length());
                Ok(grid.field_from_fn(|x| amplitude * (k * x).sin()))
            }
            FieldSpec::Values { values } => {
                let field = grid
                    .field(values.clone())
                    .map_err(|e| Error::InitialData { field: name, reason: e.to_string() })?;
                check_compatible(name, &field, grid, displacement)?;
                Ok(field)
            }
        }
    }
}

/// Checks `u(0) = 0` and, for displacements, a vanishing second-order
/// one-sided derivative at `x = L`, both relative to the field magnitude.
fn check_compatible(name: &'static str, u: &Field, grid: &Grid, displacement: bool) -> Result<()> {
    if !u.is_finite() {
        return Err(Error::InitialData { field: name, reason: "non-finite value".into() });
    }
    let scale = 1.0 + grid.linf(u);
    let dx = grid.dx();
    let l = grid.length();
    if u[0].abs() > 1e-12 * scale {
        return Err(Error::InitialData {
            field: name,
            reason: format!("left boundary value {} violates u(0) = 0", u[0]),
        });
    }
    if displacement {
        let n = grid.cells();
        let slope = (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * dx);
        if slope.abs() > scale * dx / (l * l) {
            return Err(Error::InitialData {
                field: name,
                reason: format!("right boundary slope {slope} violates u_x(L) = 0"),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    #[serde(default)]
    pub v0: FieldSpec,
    #[serde(default)]
    pub v1: FieldSpec,
    #[serde(default)]
    pub p0: FieldSpec,
    #[serde(default)]
    pub p1: FieldSpec,
}

impl InitialData {
    pub fn to_state(&self, grid: &Grid) -> Result<StateVector> {
        Ok(StateVector {
            v: self.v0.materialize("v0", grid, true)?,
            p: self.p0.materialize("p0", grid, true)?,
            vt: self.v1.materialize("v1", grid, false)?,
            pt: self.p1.materialize("p1", grid, false)?,
        })
    }
}
