//! Sampled diagnostics of a run.

use serde::{Deserialize, Serialize};

/// Every quadrature the energy, certificate and lower-bound checks need,
/// evaluated on one state. Norms are squared trapezoid norms; gradient terms
/// use the cell-difference form that pairs with the time-stepping stencil.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    /// `½(α₁‖v_x‖² + β‖γv_x − p_x‖² + ‖v_t‖² + ‖p_t‖²) − ∫I`
    pub energy: f64,
    /// `−λ₁‖v_t‖² − λ₂‖p_t‖²`
    pub dissipation: f64,
    /// `∫I(v, p)`
    pub psi: f64,
    pub grad_v: f64,
    pub grad_p: f64,
    /// `‖γv_x − p_x‖²`
    pub grad_mix: f64,
    /// `α₁‖v_x‖² + β‖γv_x − p_x‖²`
    pub stiffness: f64,
    pub kinetic_v: f64,
    pub kinetic_p: f64,
    pub mass_v: f64,
    pub mass_p: f64,
    /// `∫(v v_t + p p_t)`
    pub cross: f64,
    /// `∫(λ₁ v v_t + λ₂ p p_t)`
    pub damped_cross: f64,
    /// `∫(λ₁ v² + λ₂ p²)`
    pub damped_mass: f64,
    /// `∫(v v_tt + p p_tt)` with the accelerations of the discrete system.
    pub accel_inner: f64,
    /// `∫(v f₁ + p f₂)`
    pub source_work: f64,
    pub linf_v: f64,
    pub linf_p: f64,
    pub linf_state: f64,
}

impl Sample {
    /// `‖v_t‖² + ‖p_t‖²`
    pub fn kinetic(&self) -> f64 {
        self.kinetic_v + self.kinetic_p
    }

    /// `‖v‖² + ‖p‖²`
    pub fn mass(&self) -> f64 {
        self.mass_v + self.mass_p
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    samples: Vec<Sample>,
}

impl TimeSeries {
    pub fn new(samples: Vec<Sample>) -> Self {
        Self { samples }
    }

    pub fn push(&mut self, s: Sample) {
        self.samples.push(s);
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn column(&self, f: impl Fn(&Sample) -> f64) -> Vec<f64> {
        self.samples.iter().map(f).collect()
    }
}

/// Second-order derivative of samples on a nonuniform time grid: three-point
/// central formula in the interior, three-point one-sided at both ends.
/// Requires at least three strictly increasing times.
pub fn derivative(t: &[f64], y: &[f64]) -> Vec<f64> {
    assert_eq!(t.len(), y.len());
    let n = t.len();
    assert!(n >= 3, "need at least three samples");
    let three = |i0: usize, at: usize| {
        let (t0, t1, t2) = (t[i0], t[i0 + 1], t[i0 + 2]);
        let x = t[at];
        // derivative of the Lagrange interpolant through the three points
        let l0 = (2.0 * x - t1 - t2) / ((t0 - t1) * (t0 - t2));
        let l1 = (2.0 * x - t0 - t2) / ((t1 - t0) * (t1 - t2));
        let l2 = (2.0 * x - t0 - t1) / ((t2 - t0) * (t2 - t1));
        l0 * y[i0] + l1 * y[i0 + 1] + l2 * y[i0 + 2]
    };
    let mut out = Vec::with_capacity(n);
    out.push(three(0, 0));
    for i in 1..n - 1 {
        out.push(three(i - 1, i));
    }
    out.push(three(n - 3, n - 1));
    out
}
