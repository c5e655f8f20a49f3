//! Uniform nodal grid on `(0, L)` with the mixed boundary conditions
//! `u(0) = 0`, `u_x(L) = 0`, plus the discrete operators and quadratures every
//! functional in the crate is built from.
//!
//! All integrals over `(0, L)` use the composite trapezoid rule. Gradient
//! energies use the cell-difference form [`Grid::grad_inner`], which is the
//! exact summation-by-parts partner of [`Grid::dxx`]:
//! `-inner(dxx u, w) == grad_inner(u, w)` whenever `u(0) = w(0) = 0`.

use std::f64::consts::PI;
use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};

/// Smallest admissible number of cells.
pub const MIN_CELLS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    length: f64,
    cells: usize,
    dx: f64,
}

impl Grid {
    pub fn new(length: f64, cells: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Grid(format!("domain length must be positive, got {length}")));
        }
        if cells < MIN_CELLS {
            return Err(Error::Grid(format!("need at least {MIN_CELLS} cells, got {cells}")));
        }
        Ok(Self { length, cells, dx: length / cells as f64 })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn nodes(&self) -> usize {
        self.cells + 1
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx
    }

    /// Optimal Poincaré constant for `g(0) = 0` on `(0, L)`: `(2L/π)²`.
    pub fn poincare_constant(&self) -> f64 {
        (2.0 * self.length / PI).powi(2)
    }

    pub fn zeros(&self) -> Field {
        Field(vec![0.0; self.nodes()])
    }

    pub fn field_from_fn(&self, f: impl Fn(f64) -> f64) -> Field {
        Field((0..self.nodes()).map(|j| f(self.x(j))).collect())
    }

    /// Wraps nodal `values`, checking the length against this grid.
    pub fn field(&self, values: Vec<f64>) -> Result<Field> {
        if values.len() != self.nodes() {
            return Err(Error::Grid(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                self.nodes()
            )));
        }
        Ok(Field(values))
    }

    #[inline]
    fn check(&self, u: &[f64]) {
        assert_eq!(u.len(), self.nodes(), "field length does not match grid");
    }

    /// Second difference with `u(0) = 0` (node 0 is treated as zero and its
    /// output pinned to zero) and a mirror ghost `u_{N+1} = u_{N-1}` at `x = L`.
    pub fn dxx(&self, u: &[f64]) -> Field {
        let mut out = vec![0.0; self.nodes()];
        self.dxx_into(u, &mut out);
        Field(out)
    }

    /// Allocation-free form of [`Grid::dxx`].
    pub fn dxx_into(&self, u: &[f64], out: &mut [f64]) {
        self.check(u);
        self.check(out);
        let n = self.cells;
        let inv = 1.0 / (self.dx * self.dx);
        out[0] = 0.0;
        let mut left = 0.0;
        for j in 1..n {
            let mid = u[j];
            let right = u[j + 1];
            out[j] = (right - 2.0 * mid + left) * inv;
            left = mid;
        }
        // n >= MIN_CELLS, so n - 1 >= 1 and `left` is never the pinned node here.
        out[n] = 2.0 * (u[n - 1] - u[n]) * inv;
    }

    fn trapezoid(&self, mut term: impl FnMut(usize) -> f64) -> f64 {
        let n = self.cells;
        let mut sum = 0.5 * (term(0) + term(n));
        for j in 1..n {
            sum += term(j);
        }
        sum * self.dx
    }

    /// Trapezoid quadrature of an arbitrary nodal integrand.
    pub fn integrate(&self, u: &[f64]) -> f64 {
        self.check(u);
        self.trapezoid(|j| u[j])
    }

    pub fn l2_norm_sq(&self, u: &[f64]) -> f64 {
        self.check(u);
        self.trapezoid(|j| u[j] * u[j])
    }

    pub fn inner(&self, u: &[f64], w: &[f64]) -> f64 {
        self.check(u);
        self.check(w);
        self.trapezoid(|j| u[j] * w[j])
    }

    pub fn linf(&self, u: &[f64]) -> f64 {
        self.check(u);
        u.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Cell-difference gradient inner product `Σ (Δu)(Δw)/dx` with the
    /// Dirichlet node read as zero.
    pub fn grad_inner(&self, u: &[f64], w: &[f64]) -> f64 {
        self.check(u);
        self.check(w);
        let mut sum = u[1] * w[1];
        for j in 1..self.cells {
            sum += (u[j + 1] - u[j]) * (w[j + 1] - w[j]);
        }
        sum / self.dx
    }

    pub fn grad_norm_sq(&self, u: &[f64]) -> f64 {
        self.grad_inner(u, u)
    }

    /// Nodal first derivative: central in the interior, second-order one-sided
    /// at both ends. Diagnostic only; the time stepper never calls this.
    pub fn dx_forward_field(&self, u: &[f64]) -> Field {
        self.check(u);
        let n = self.cells;
        let h2 = 2.0 * self.dx;
        let mut out = vec![0.0; self.nodes()];
        out[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / h2;
        for j in 1..n {
            out[j] = (u[j + 1] - u[j - 1]) / h2;
        }
        out[n] = (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / h2;
        Field(out)
    }
}

/// Nodal values on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field(Vec<f64>);

impl Field {
    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl Deref for Field {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Field {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Field> for Vec<f64> {
    fn from(f: Field) -> Self {
        f.0
    }
}
