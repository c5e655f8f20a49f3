//! Concavity certificate for blow-up under negative initial energy.
//!
//! With `F(t) = ½(‖v‖² + ‖p‖²) + ½L(t) + ½b(t + t₀)²` and `G = F^{−σ}`, a
//! feasible parameter set `(ε, σ, b, t₀, T)` makes `G` concave with
//! `G′(0) < 0`, so `F` must become infinite no later than
//! `t_m = F(0) / (σ F′(0))`.
//!
//! `L(t) = ∫₀ᵗ∫(λ₁v² + λ₂p²) + (T − t)∫(λ₁v₀² + λ₂p₀²)` depends on the
//! existence horizon `T`, which in turn has to dominate `t_m`. Since `t_m` is
//! affine in `T` the horizon is resolved in closed form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::integrator::{BeamSystem, StateVector};
use crate::series::{derivative, Sample, TimeSeries};

/// Relative tolerance for the sampled inequality checks.
pub const INEQUALITY_TOL: f64 = 1e-6;

/// Default resolution of the `(ε, σ)` search.
pub const SEARCH_POINTS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub t: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub source_integral: f64,
}

impl From<&Sample> for EnergySample {
    fn from(s: &Sample) -> Self {
        Self { t: s.t, energy: s.energy, dissipation: s.dissipation, source_integral: s.psi }
    }
}

pub fn energy(system: &BeamSystem, state: &StateVector) -> EnergySample {
    EnergySample::from(&system.sample(0.0, state))
}

/// Per-sample `|dE/dt − (−λ₁‖v_t‖² − λ₂‖p_t‖²)|` with `dE/dt` from
/// [`derivative`].
pub fn dissipation_residuals(series: &TimeSeries) -> Result<Vec<f64>> {
    if series.len() < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: series.len() });
    }
    let de = derivative(&series.times(), &series.column(|s| s.energy));
    Ok(de.iter().zip(series.samples()).map(|(d, s)| (d - s.dissipation).abs()).collect())
}

pub fn dissipation_residual(series: &TimeSeries) -> Result<f64> {
    Ok(dissipation_residuals(series)?.into_iter().fold(0.0, f64::max))
}

/// Initial-data quantities the parameter selection depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateInputs {
    pub eta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `E(0)`; must be negative.
    pub e0: f64,
    /// `∫(v₀v₁ + p₀p₁)`
    pub cross0: f64,
    /// `∫(λ₁v₀² + λ₂p₀²)`
    pub l0_rate: f64,
    /// `½(‖v₀‖² + ‖p₀‖²)`
    pub mass0: f64,
}

impl CertificateInputs {
    pub fn from_sample(s: &Sample, eta: f64, lambda1: f64, lambda2: f64) -> Self {
        Self {
            eta,
            lambda1,
            lambda2,
            e0: s.energy,
            cross0: s.cross,
            l0_rate: s.damped_mass,
            mass0: 0.5 * s.mass(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    EpsilonRange,
    SigmaRange,
    KPositive,
    BSmall,
    FprimePositive,
    Horizon,
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Constraint::EpsilonRange => "0 < epsilon < eta/2",
            Constraint::SigmaRange => "0 < sigma < (eta - 2 epsilon)/(2(1 + epsilon))",
            Constraint::KPositive => "k = eta - 4 lambda (sigma+1)(1+1/epsilon) > 0",
            Constraint::BSmall => "-k E(0) - 2b(sigma+1)(1+1/epsilon) >= 0",
            Constraint::FprimePositive => "F'(0) = cross0 + b t0 > 0",
            Constraint::Horizon => "existence horizon T >= t_m",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertificateError {
    #[error("certificate requires negative initial energy, got E(0) = {0}")]
    NonNegativeEnergy(f64),
    #[error("infeasible: {constraint} ({detail})")]
    Infeasible { constraint: Constraint, detail: String },
    #[error("corrupted series: {0}")]
    Corrupted(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateParams {
    pub epsilon: f64,
    pub sigma: f64,
    pub lambda_cert: f64,
    pub k: f64,
    pub b: f64,
    pub t0: f64,
    pub t_horizon: f64,
}

/// `(σ + 1)(1 + 1/ε)`
fn young(epsilon: f64, sigma: f64) -> f64 {
    (sigma + 1.0) * (1.0 + 1.0 / epsilon)
}

pub fn k_value(eta: f64, epsilon: f64, sigma: f64, lambda_cert: f64) -> f64 {
    eta - 4.0 * lambda_cert * young(epsilon, sigma)
}

pub fn sigma_max(eta: f64, epsilon: f64) -> f64 {
    (eta - 2.0 * epsilon) / (2.0 * (1.0 + epsilon))
}

/// Whether some `(ε, σ)` in the open admissible region gives `k > 0`.
/// The supremum of `k` is approached as `σ → 0`, `ε → η/2`, giving
/// `η > 4λ(1 + 2/η)`; for `λ = 1` that is `η > 2 + 2√3`.
pub fn k_can_be_positive(eta: f64, lambda_cert: f64) -> bool {
    eta > 2.0 && eta > 4.0 * lambda_cert * (1.0 + 2.0 / eta)
}

impl CertificateParams {
    /// Signed margins of the five defining constraints, positive when satisfied.
    pub fn margins(&self, inputs: &CertificateInputs) -> [(Constraint, f64); 5] {
        let eta = inputs.eta;
        let eps = self.epsilon;
        let y = young(eps, self.sigma);
        [
            (Constraint::EpsilonRange, eps.min(0.5 * eta - eps)),
            (Constraint::SigmaRange, self.sigma.min(sigma_max(eta, eps) - self.sigma)),
            (Constraint::KPositive, self.k),
            (Constraint::BSmall, -self.k * inputs.e0 - 2.0 * self.b * y),
            (Constraint::FprimePositive, inputs.cross0 + self.b * self.t0),
        ]
    }

    pub fn fprime0(&self, inputs: &CertificateInputs) -> f64 {
        inputs.cross0 + self.b * self.t0
    }

    pub fn f0(&self, inputs: &CertificateInputs) -> f64 {
        inputs.mass0 + 0.5 * self.t_horizon * inputs.l0_rate + 0.5 * self.b * self.t0 * self.t0
    }
}

pub fn select_parameters(inputs: &CertificateInputs) -> Result<CertificateParams, CertificateError> {
    select_parameters_with(inputs, 1.0, SEARCH_POINTS)
}

/// Chooses `(ε, σ)` on an interior grid of the admissible region, then
/// `b` at half its admissible maximum, `t₀`, and the smallest consistent
/// horizon `T`.
///
/// The grid point maximises `σ·b`, which is what both the horizon condition
/// `σF′(0) > ½∫(λ₁v₀² + λ₂p₀²)` and the size of `t_m` depend on; maximising
/// `k` alone drives `σ` to zero.
pub fn select_parameters_with(
    inputs: &CertificateInputs,
    lambda_cert: f64,
    points: usize,
) -> Result<CertificateParams, CertificateError> {
    let eta = inputs.eta;
    let e0 = inputs.e0;
    if !(e0 < 0.0) {
        return Err(CertificateError::NonNegativeEnergy(e0));
    }
    if !k_can_be_positive(eta, lambda_cert) {
        return Err(CertificateError::Infeasible {
            constraint: Constraint::KPositive,
            detail: format!(
                "eta = {eta} must exceed 4 lambda (1 + 2/eta) = {}",
                4.0 * lambda_cert * (1.0 + 2.0 / eta)
            ),
        });
    }
    let n = points.max(2);
    let mut best: Option<(f64, f64, f64, f64)> = None;
    for i in 1..n {
        let eps = 0.5 * eta * i as f64 / n as f64;
        let smax = sigma_max(eta, eps);
        for j in 1..n {
            let sigma = smax * j as f64 / n as f64;
            let k = k_value(eta, eps, sigma, lambda_cert);
            if k <= 0.0 {
                // k decreases in σ
                break;
            }
            let score = sigma * k / young(eps, sigma);
            if best.is_none_or(|(s, ..)| score > s) {
                best = Some((score, eps, sigma, k));
            }
        }
    }
    let (_, epsilon, sigma, k) = best.ok_or_else(|| CertificateError::Infeasible {
        constraint: Constraint::KPositive,
        detail: format!("no grid point with k > 0 at resolution {n}"),
    })?;
    let b = -k * e0 / (4.0 * young(epsilon, sigma));
    let t0 = if inputs.cross0 < 0.0 { (-2.0 * inputs.cross0 / b).max(1.0) } else { 1.0 };
    let fprime0 = inputs.cross0 + b * t0;
    let denom = sigma * fprime0 - 0.5 * inputs.l0_rate;
    if !(denom > 0.0) {
        return Err(CertificateError::Infeasible {
            constraint: Constraint::Horizon,
            detail: format!(
                "sigma F'(0) = {} does not exceed L0_rate/2 = {}",
                sigma * fprime0,
                0.5 * inputs.l0_rate
            ),
        });
    }
    let t_star = (inputs.mass0 + 0.5 * b * t0 * t0) / denom;
    Ok(CertificateParams {
        epsilon,
        sigma,
        lambda_cert,
        k,
        b,
        t0,
        t_horizon: t_star * (1.0 + 1e-9),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub params: CertificateParams,
    #[serde(rename = "F0")]
    pub f0: f64,
    #[serde(rename = "Fprime0")]
    pub fprime0: f64,
    pub t_m: f64,
    pub feasible: bool,
    pub horizon_consistent: bool,
}

/// `t_m = −G(0)/G′(0) = F(0)/(σF′(0))`.
pub fn upper_bound_tm(
    f0: f64,
    fprime0: f64,
    params: &CertificateParams,
) -> Result<CertificateReport, CertificateError> {
    if !(fprime0 > 0.0) {
        return Err(CertificateError::Infeasible {
            constraint: Constraint::FprimePositive,
            detail: format!("F'(0) = {fprime0}"),
        });
    }
    if !(f0 > 0.0) {
        return Err(CertificateError::Corrupted(format!("F(0) = {f0}")));
    }
    let t_m = f0 / (params.sigma * fprime0);
    Ok(CertificateReport {
        params: *params,
        f0,
        fprime0,
        t_m,
        feasible: true,
        horizon_consistent: params.t_horizon >= t_m,
    })
}

/// Certificate functionals at one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Augmented {
    pub t: f64,
    pub l: f64,
    pub l_prime: f64,
    pub l_second: f64,
    pub f: f64,
    pub f_prime: f64,
    pub f_second: f64,
    pub g: f64,
    pub g_prime: f64,
    pub g_second: f64,
    /// `F F″ − (σ + 1)(F′)²`
    pub q: f64,
}

/// Evaluates `L`, `F`, `G` and their derivatives along `series`. The time
/// integral inside `L` is a running trapezoid over the samples; `F″` uses
/// the sampled accelerations rather than differencing `F`.
pub fn f_of_t(series: &TimeSeries, c: &CertificateParams) -> Result<Vec<Augmented>, CertificateError> {
    let first = series.first().ok_or_else(|| CertificateError::Corrupted("empty series".into()))?;
    let l0_rate = first.damped_mass;
    let sigma = c.sigma;
    let mut running = 0.0;
    let mut prev: Option<&Sample> = None;
    let mut out = Vec::with_capacity(series.len());
    for s in series.samples() {
        if let Some(p) = prev {
            running += 0.5 * (s.t - p.t) * (s.damped_mass + p.damped_mass);
        }
        prev = Some(s);
        let shifted = s.t + c.t0;
        let l = running + (c.t_horizon - s.t) * l0_rate;
        let l_prime = s.damped_mass - l0_rate;
        let l_second = 2.0 * s.damped_cross;
        let f = 0.5 * s.mass() + 0.5 * l + 0.5 * c.b * shifted * shifted;
        if !(f > 0.0) || !f.is_finite() {
            return Err(CertificateError::Corrupted(format!("F = {f} at t = {}", s.t)));
        }
        let f_prime = s.cross + 0.5 * l_prime + c.b * shifted;
        let f_second = s.accel_inner + s.kinetic() + 0.5 * l_second + c.b;
        let q = f * f_second - (sigma + 1.0) * f_prime * f_prime;
        let g = f.powf(-sigma);
        out.push(Augmented {
            t: s.t,
            l,
            l_prime,
            l_second,
            f,
            f_prime,
            f_second,
            g,
            g_prime: -sigma * g / f * f_prime,
            g_second: -sigma * g / (f * f) * q,
            q,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityFlags {
    pub lemma31_ok: bool,
    pub lemma32_ok: bool,
    #[serde(rename = "Q_nonneg_ok")]
    pub q_nonneg_ok: bool,
    #[serde(rename = "G_concave_ok")]
    pub g_concave_ok: bool,
    /// Smallest normalized slack of each check over all samples; negative
    /// beyond `-INEQUALITY_TOL` means failure.
    pub worst_lemma31: f64,
    pub worst_lemma32: f64,
    pub worst_q: f64,
    pub worst_g: f64,
}

impl InequalityFlags {
    pub fn all_ok(&self) -> bool {
        self.lemma31_ok && self.lemma32_ok && self.q_nonneg_ok && self.g_concave_ok
    }
}

/// Checks, at every sample:
/// - the lower estimate of `∫(v v_tt + p p_tt)` in terms of the energy,
/// - the Young/Cauchy–Schwarz bound
///   `(F′)² ≤ F[(1+ε)(‖v_t‖²+‖p_t‖²) + 2(1+1/ε)(b − 2λE)]`,
/// - `Q ≥ 0`,
/// - `G″ ≤ 0` together with the secant bound `G(t) ≤ G(0) + tG′(0)`.
pub fn check_inequalities(
    series: &TimeSeries,
    aug: &[Augmented],
    c: &CertificateParams,
    eta: f64,
) -> Result<InequalityFlags, CertificateError> {
    let first = series.first().ok_or_else(|| CertificateError::Corrupted("empty series".into()))?;
    if !(first.energy < 0.0) {
        return Err(CertificateError::NonNegativeEnergy(first.energy));
    }
    if aug.len() != series.len() {
        return Err(CertificateError::Corrupted("augmented series length mismatch".into()));
    }
    let (eps, sigma, lam) = (c.epsilon, c.sigma, c.lambda_cert);
    let (g0, gp0) = (aug[0].g, aug[0].g_prime);
    let mut worst = [f64::INFINITY; 4];
    for (s, a) in series.samples().iter().zip(aug) {
        let kin = s.kinetic();
        // lower bound on ∫(v v_tt + p p_tt)
        let lhs = s.accel_inner;
        let rhs = (0.5 * eta - 1.0) * s.stiffness - s.damped_cross + 0.5 * eta * kin - eta * s.energy;
        let scale = lhs.abs()
            + (0.5 * eta - 1.0) * s.stiffness
            + s.damped_cross.abs()
            + 0.5 * eta * kin
            + eta * s.energy.abs();
        worst[0] = worst[0].min((lhs - rhs) / scale.max(f64::MIN_POSITIVE));

        let lhs = a.f_prime * a.f_prime;
        let bracket = (1.0 + eps) * kin + 2.0 * (1.0 + 1.0 / eps) * (c.b - 2.0 * lam * s.energy);
        let rhs = a.f * bracket;
        worst[1] = worst[1].min((rhs - lhs) / (lhs.abs() + rhs.abs()).max(f64::MIN_POSITIVE));

        let qscale = a.f * a.f_second.abs() + (sigma + 1.0) * a.f_prime * a.f_prime;
        worst[2] = worst[2].min(a.q / qscale.max(f64::MIN_POSITIVE));

        // G″ has the sign of −Q; the secant bound is checked on its own.
        let gscale = sigma * a.g / (a.f * a.f) * qscale;
        let curvature = -a.g_second / gscale.max(f64::MIN_POSITIVE);
        let secant = (g0 + a.t * gp0 - a.g) / g0;
        worst[3] = worst[3].min(curvature.min(secant));
    }
    let ok = |w: f64| w >= -INEQUALITY_TOL;
    Ok(InequalityFlags {
        lemma31_ok: ok(worst[0]),
        lemma32_ok: ok(worst[1]),
        q_nonneg_ok: ok(worst[2]),
        g_concave_ok: ok(worst[3]),
        worst_lemma31: worst[0],
        worst_lemma32: worst[1],
        worst_q: worst[2],
        worst_g: worst[3],
    })
}

/// Everything the certify pipeline produces for one run.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub inputs: CertificateInputs,
    pub report: CertificateReport,
    pub augmented: Vec<Augmented>,
    pub flags: InequalityFlags,
}

/// Selection, functionals, `t_m` and inequality checks in one call.
pub fn certify(
    series: &TimeSeries,
    eta: f64,
    lambda1: f64,
    lambda2: f64,
    lambda_cert: f64,
) -> Result<Certificate, CertificateError> {
    let first = series.first().ok_or_else(|| CertificateError::Corrupted("empty series".into()))?;
    let inputs = CertificateInputs::from_sample(first, eta, lambda1, lambda2);
    let params = select_parameters_with(&inputs, lambda_cert, SEARCH_POINTS)?;
    let augmented = f_of_t(series, &params)?;
    let report = upper_bound_tm(augmented[0].f, augmented[0].f_prime, &params)?;
    let flags = check_inequalities(series, &augmented, &params, eta)?;
    Ok(Certificate { inputs, report, augmented, flags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inputs(eta: f64, e0: f64) -> CertificateInputs {
        CertificateInputs { eta, lambda1: 0.1, lambda2: 0.1, e0, cross0: 0.0, l0_rate: 0.0, mass0: 1.0 }
    }

    #[test]
    fn candidate_for_eta_eight() {
        let k = k_value(8.0, 2.0, 1.0 / 6.0, 1.0);
        assert!((k - 1.0).abs() < 1e-15, "{k}");
        assert!(1.0 / 6.0 < sigma_max(8.0, 2.0));
        // −k E0 = 2 b (σ+1)(1+1/ε) with E0 = −1 → b_max = 2/7
        let b_max = 1.0 / (2.0 * young(2.0, 1.0 / 6.0));
        assert!((b_max - 2.0 / 7.0).abs() < 1e-15);
        assert!((b_max / 2.0 - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn eta_four_is_infeasible() {
        assert!(!k_can_be_positive(4.0, 1.0));
        assert!(k_can_be_positive(2.0 + 2.0 * 3f64.sqrt() + 1e-9, 1.0));
        assert!(!k_can_be_positive(2.0 + 2.0 * 3f64.sqrt() - 1e-9, 1.0));
        match select_parameters(&inputs(4.0, -1.0)) {
            Err(CertificateError::Infeasible { constraint: Constraint::KPositive, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn refuses_nonnegative_energy() {
        assert_eq!(select_parameters(&inputs(8.0, 0.0)), Err(CertificateError::NonNegativeEnergy(0.0)));
    }

    #[test]
    fn selection_reaches_half_admissible_b() {
        let inp = inputs(8.0, -1.0);
        let c = select_parameters(&inp).unwrap();
        let y = young(c.epsilon, c.sigma);
        assert!((-c.k * inp.e0 - 2.0 * c.b * y - 0.5 * (-c.k * inp.e0)).abs() < 1e-12);
        assert_eq!(c.t0, 1.0);
        assert!(c.epsilon >= 1.0);
    }

    #[test]
    fn horizon_failure_is_named() {
        let inp = CertificateInputs { l0_rate: 1e6, ..inputs(8.0, -1.0) };
        match select_parameters(&inp) {
            Err(CertificateError::Infeasible { constraint: Constraint::Horizon, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tm_formula() {
        let c = CertificateParams {
            epsilon: 2.0,
            sigma: 1.0 / 6.0,
            lambda_cert: 1.0,
            k: 1.0,
            b: 1.0 / 7.0,
            t0: 1.0,
            t_horizon: 100.0,
        };
        let r = upper_bound_tm(1.0, 2.0, &c).unwrap();
        assert!((r.t_m - 3.0).abs() < 1e-15);
        assert!(r.horizon_consistent);
        // zero cross term: F′(0) = b t₀ = 1/7, t_m = 7 F(0)/σ
        let r = upper_bound_tm(0.8, c.b * c.t0, &c).unwrap();
        assert!((r.t_m - 7.0 * 0.8 / c.sigma).abs() < 1e-12);
        assert!(upper_bound_tm(1.0, 0.0, &c).is_err());
        // −G(0)/G′(0) with G = F^{−σ}, G′ = −σF^{−σ−1}F′
        let (f0, fp0) = (1.7, 0.3);
        let g0 = f64::powf(f0, -c.sigma);
        let gp0 = -c.sigma * f64::powf(f0, -c.sigma - 1.0) * fp0;
        let r = upper_bound_tm(f0, fp0, &c).unwrap();
        assert!((-g0 / gp0 - r.t_m).abs() < 1e-12 * r.t_m);
    }

    fn zero_sample(t: f64) -> Sample {
        Sample {
            t,
            energy: -1.0,
            dissipation: 0.0,
            psi: 0.0,
            grad_v: 0.0,
            grad_p: 0.0,
            grad_mix: 0.0,
            stiffness: 0.0,
            kinetic_v: 0.0,
            kinetic_p: 0.0,
            mass_v: 0.0,
            mass_p: 0.0,
            cross: 0.0,
            damped_cross: 0.0,
            damped_mass: 0.0,
            accel_inner: 0.0,
            source_work: 0.0,
            linf_v: 0.0,
            linf_p: 0.0,
            linf_state: 0.0,
        }
    }

    #[test]
    fn only_b_term_survives_on_zero_fields() {
        let series = TimeSeries::new((1..=10).map(|i| zero_sample(0.1 * i as f64)).collect());
        let c = CertificateParams {
            epsilon: 2.0,
            sigma: 0.25,
            lambda_cert: 1.0,
            k: 1.0,
            b: 2.0,
            t0: 0.0,
            t_horizon: 3.0,
        };
        let aug = f_of_t(&series, &c).unwrap();
        for a in &aug {
            assert!((a.f - a.t * a.t).abs() < 1e-14);
            assert!((a.g - a.t.powf(-0.5)).abs() < 1e-12);
            assert!((a.g * a.f.powf(c.sigma) - 1.0).abs() < 1e-14);
        }
        assert_eq!(aug[0].l_prime, 0.0);
    }

    #[test]
    fn dissipation_needs_three_samples() {
        let series = TimeSeries::new(vec![zero_sample(0.0), zero_sample(1.0)]);
        assert!(matches!(dissipation_residual(&series), Err(Error::TooFewSamples { .. })));
    }

    proptest! {
        #[test]
        fn selected_params_satisfy_constraints(
            eta in 5.5f64..20.0,
            e0 in -50.0f64..-0.01,
            cross0 in -2.0f64..2.0,
            mass0 in 0.01f64..5.0,
        ) {
            let inp = CertificateInputs { eta, lambda1: 0.0, lambda2: 0.0, e0, cross0, l0_rate: 0.0, mass0 };
            let c = select_parameters_with(&inp, 1.0, 60).unwrap();
            for (name, m) in c.margins(&inp) {
                prop_assert!(m >= 1e-12, "{name}: {m}");
            }
            let r = upper_bound_tm(c.f0(&inp), c.fprime0(&inp), &c).unwrap();
            prop_assert!(r.t_m > 0.0);
            prop_assert!(r.horizon_consistent);
        }
    }
}
