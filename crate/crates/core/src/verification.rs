//! Reference solutions for the linear problem and convergence utilities.
//!
//! `sin(k_j x)` with `k_j = π(2j − 1)/(2L)` diagonalises both `∂²/∂x²` and
//! the discrete second difference under `u(0) = u_x(L) = 0`; the discrete
//! eigenvalue is `−(2/dx)² sin²(k_j dx/2)`. Each mode then evolves by a
//! 4×4 linear system which is integrated exactly by its matrix exponential.

use nalgebra::{Complex, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::integrator::{BeamSystem, StateVector};
use crate::model::{mode_wavenumber, FieldSpec, InitialData, PhysicalParams, SourceModel};

/// Modal coordinates `(v̂, p̂, v̂_t, p̂_t)`.
pub type ModalState = [f64; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spectrum {
    /// `k²`, the PDE itself.
    Continuum,
    /// Eigenvalue of the discrete operator on a given grid.
    SemiDiscrete,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalSystem {
    pub j: usize,
    pub k: f64,
    /// `k²` or its discrete counterpart.
    pub mu: f64,
    pub matrix: Matrix4<f64>,
    /// `‖sin(kx)‖²` in the matching quadrature.
    pub norm_sq: f64,
    params: PhysicalParams,
}

impl ModalSystem {
    pub fn continuum(params: &PhysicalParams, j: usize, length: f64) -> Self {
        let k = mode_wavenumber(j, length);
        Self::with_eigenvalue(params, j, k, k * k, 0.5 * length)
    }

    pub fn semi_discrete(params: &PhysicalParams, j: usize, grid: &Grid) -> Self {
        let k = mode_wavenumber(j, grid.length());
        let dx = grid.dx();
        let mu = (2.0 / dx * (0.5 * k * dx).sin()).powi(2);
        let norm_sq = grid.l2_norm_sq(&grid.field_from_fn(|x| (k * x).sin()));
        Self::with_eigenvalue(params, j, k, mu, norm_sq)
    }

    pub fn new(params: &PhysicalParams, j: usize, grid: &Grid, spectrum: Spectrum) -> Self {
        match spectrum {
            Spectrum::Continuum => Self::continuum(params, j, grid.length()),
            Spectrum::SemiDiscrete => Self::semi_discrete(params, j, grid),
        }
    }

    fn with_eigenvalue(params: &PhysicalParams, j: usize, k: f64, mu: f64, norm_sq: f64) -> Self {
        let PhysicalParams { alpha, beta, lambda1, lambda2, .. } = *params;
        let c = params.coupling();
        #[rustfmt::skip]
        let matrix = Matrix4::new(
            0.0,         0.0,        1.0,      0.0,
            0.0,         0.0,        0.0,      1.0,
            -alpha * mu, c * mu,     -lambda1, 0.0,
            c * mu,      -beta * mu, 0.0,      -lambda2,
        );
        Self { j, k, mu, matrix, norm_sq, params: *params }
    }

    pub fn propagator(&self, t: f64) -> Matrix4<f64> {
        (self.matrix * t).exp()
    }

    pub fn evolve(&self, y0: ModalState, t: f64) -> ModalState {
        let y = self.propagator(t) * Vector4::from(y0);
        [y[0], y[1], y[2], y[3]]
    }

    /// Energy carried by `y·sin(kx)`.
    pub fn energy(&self, y: ModalState) -> f64 {
        let PhysicalParams { alpha, beta, .. } = self.params;
        let c = self.params.coupling();
        let [v, p, vt, pt] = y;
        let stiff = self.mu * (alpha * v * v - 2.0 * c * v * p + beta * p * p);
        0.5 * self.norm_sq * (stiff + vt * vt + pt * pt)
    }

    pub fn eigenvalues(&self) -> Vec<Complex<f64>> {
        self.matrix.complex_eigenvalues().iter().copied().collect()
    }
}

fn require_linear(source: &SourceModel, what: &str) -> Result<()> {
    if source.is_null() {
        Ok(())
    } else {
        Err(Error::Verification(format!("{what} needs the null source")))
    }
}

/// Standing wave `amplitude·cos(√α k t)·sin(kx)` of the decoupled, undamped
/// problem.
pub fn analytic_mode(
    grid: &Grid,
    params: &PhysicalParams,
    source: &SourceModel,
    j: usize,
    amplitude: f64,
    t: f64,
) -> Result<StateVector> {
    require_linear(source, "analytic_mode")?;
    if params.gamma != 0.0 || params.lambda1 != 0.0 || params.lambda2 != 0.0 {
        return Err(Error::Verification("analytic_mode needs gamma = lambda1 = lambda2 = 0".into()));
    }
    if j == 0 {
        return Err(Error::Verification("mode index starts at 1".into()));
    }
    let k = mode_wavenumber(j, grid.length());
    let w = params.alpha.sqrt() * k;
    let (c, s) = ((w * t).cos(), (w * t).sin());
    Ok(StateVector {
        v: grid.field_from_fn(|x| amplitude * c * (k * x).sin()),
        p: grid.zeros(),
        vt: grid.field_from_fn(|x| -amplitude * w * s * (k * x).sin()),
        pt: grid.zeros(),
    })
}

/// Modal coordinates of initial data built from sine modes. Components of
/// the same mode index are merged.
pub fn modal_initial(initial: &InitialData) -> Result<Vec<(usize, ModalState)>> {
    let mut modes: Vec<(usize, ModalState)> = Vec::new();
    for (slot, spec) in [&initial.v0, &initial.p0, &initial.v1, &initial.p1].into_iter().enumerate() {
        match spec {
            FieldSpec::Zero => {}
            FieldSpec::Sine { amplitude, mode } => {
                if *mode == 0 {
                    return Err(Error::Verification("mode index starts at 1".into()));
                }
                match modes.iter_mut().find(|(j, _)| j == mode) {
                    Some((_, y)) => y[slot] += amplitude,
                    None => {
                        let mut y = [0.0; 4];
                        y[slot] = *amplitude;
                        modes.push((*mode, y));
                    }
                }
            }
            FieldSpec::Values { .. } => {
                return Err(Error::Verification("modal reference needs sine-mode initial data".into()))
            }
        }
    }
    modes.sort_by_key(|(j, _)| *j);
    Ok(modes)
}

/// Exact-in-time superposition of the given modes at time `t`.
pub fn modal_reference(
    grid: &Grid,
    params: &PhysicalParams,
    source: &SourceModel,
    modes: &[(usize, ModalState)],
    t: f64,
    spectrum: Spectrum,
) -> Result<StateVector> {
    require_linear(source, "modal_reference")?;
    let mut out = StateVector::zeros(grid);
    for &(j, y0) in modes {
        if j == 0 {
            return Err(Error::Verification("mode index starts at 1".into()));
        }
        let sys = ModalSystem::new(params, j, grid, spectrum);
        let [v, p, vt, pt] = sys.evolve(y0, t);
        for n in 0..grid.nodes() {
            let s = (sys.k * grid.x(n)).sin();
            out.v[n] += v * s;
            out.p[n] += p * s;
            out.vt[n] += vt * s;
            out.pt[n] += pt * s;
        }
    }
    Ok(out)
}

/// Total modal energy, exact for sums of distinct modes by orthogonality.
pub fn modal_energy(
    grid: &Grid,
    params: &PhysicalParams,
    modes: &[(usize, ModalState)],
    t: f64,
    spectrum: Spectrum,
) -> f64 {
    modes
        .iter()
        .map(|&(j, y0)| {
            let sys = ModalSystem::new(params, j, grid, spectrum);
            sys.energy(sys.evolve(y0, t))
        })
        .sum()
}

/// `sqrt(‖v − v_ref‖² + ‖p − p_ref‖²)`
pub fn displacement_error(grid: &Grid, a: &StateVector, b: &StateVector) -> f64 {
    let dv: Vec<f64> = a.v.iter().zip(b.v.iter()).map(|(x, y)| x - y).collect();
    let dp: Vec<f64> = a.p.iter().zip(b.p.iter()).map(|(x, y)| x - y).collect();
    (grid.l2_norm_sq(&dv) + grid.l2_norm_sq(&dp)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceLevel {
    pub cells: usize,
    pub dt: f64,
    pub steps: usize,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub levels: Vec<ConvergenceLevel>,
    /// `log₂(e_i / e_{i+1})` for consecutive levels.
    pub orders: Vec<f64>,
}

impl ConvergenceStudy {
    fn from_levels(levels: Vec<ConvergenceLevel>) -> Self {
        let orders = levels.windows(2).map(|w| (w[0].error / w[1].error).log2()).collect();
        Self { levels, orders }
    }
}

fn fixed_run(
    system: &BeamSystem,
    initial: &StateVector,
    t_end: f64,
    steps: usize,
) -> StateVector {
    system.integrate_fixed(initial, t_end / steps as f64, steps)
}

/// Grid refinement `base_cells·2^i`, `i < levels`, against the exact
/// solution of the PDE at `t_end`. The step is CFL-limited on every level.
#[allow(clippy::too_many_arguments)]
pub fn spatial_study(
    params: &PhysicalParams,
    source: &SourceModel,
    length: f64,
    initial: &InitialData,
    base_cells: usize,
    levels: usize,
    t_end: f64,
    cfl: f64,
) -> Result<ConvergenceStudy> {
    let modes = modal_initial(initial)?;
    let mut out = Vec::with_capacity(levels);
    for i in 0..levels {
        let grid = Grid::new(length, base_cells << i)?;
        let system = BeamSystem::new(grid, *params, *source);
        let steps = (t_end / system.cfl_step(cfl)).ceil().max(1.0) as usize;
        let u0 = modal_reference(&grid, params, source, &modes, 0.0, Spectrum::Continuum)?;
        let exact = modal_reference(&grid, params, source, &modes, t_end, Spectrum::Continuum)?;
        let u = fixed_run(&system, &u0, t_end, steps);
        out.push(ConvergenceLevel {
            cells: grid.cells(),
            dt: t_end / steps as f64,
            steps,
            error: displacement_error(&grid, &u, &exact),
        });
    }
    Ok(ConvergenceStudy::from_levels(out))
}

/// Step halving on a fixed grid against the time-exact solution of the
/// spatially discrete system, so the spatial error does not enter.
pub fn temporal_study(
    params: &PhysicalParams,
    source: &SourceModel,
    grid: &Grid,
    initial: &InitialData,
    levels: usize,
    t_end: f64,
    cfl: f64,
) -> Result<ConvergenceStudy> {
    let modes = modal_initial(initial)?;
    let system = BeamSystem::new(*grid, *params, *source);
    let u0 = modal_reference(grid, params, source, &modes, 0.0, Spectrum::SemiDiscrete)?;
    let exact = modal_reference(grid, params, source, &modes, t_end, Spectrum::SemiDiscrete)?;
    let base = (t_end / system.cfl_step(cfl)).ceil().max(1.0) as usize;
    let out = (0..levels)
        .map(|i| {
            let steps = base << i;
            let u = fixed_run(&system, &u0, t_end, steps);
            ConvergenceLevel {
                cells: grid.cells(),
                dt: t_end / steps as f64,
                steps,
                error: displacement_error(grid, &u, &exact),
            }
        })
        .collect();
    Ok(ConvergenceStudy::from_levels(out))
}

/// One resolution's value of a scalar observable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub cells: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RichardsonReport {
    /// `None` when the differences vanish or are not ordered.
    pub order: Option<f64>,
    pub extrapolated: f64,
    pub degenerate: bool,
}

/// Order and extrapolated value from levels refined by a factor of two.
///
/// With `exact` the order comes from the last two errors; otherwise three
/// levels give it from successive differences. With only two levels and no
/// reference, `assumed_order` is used for the extrapolation.
pub fn richardson(levels: &[Level], exact: Option<f64>, assumed_order: Option<f64>) -> Result<RichardsonReport> {
    if levels.len() < 2 {
        return Err(Error::Verification("richardson needs at least two levels".into()));
    }
    if let Some(w) = levels.windows(2).find(|w| w[1].cells != 2 * w[0].cells) {
        return Err(Error::Verification(format!(
            "levels must double the cell count, got {} then {}",
            w[0].cells, w[1].cells
        )));
    }
    let n = levels.len();
    let (qc, qf) = (levels[n - 2].value, levels[n - 1].value);
    let valid = |p: f64| p.is_finite() && p > 0.0;
    let order = match exact {
        Some(e) => {
            let (ec, ef) = ((qc - e).abs(), (qf - e).abs());
            (ec > 0.0 && ef > 0.0).then(|| (ec / ef).log2()).filter(|p| p.is_finite())
        }
        None if n >= 3 => {
            let q0 = levels[n - 3].value;
            let (d1, d2) = (q0 - qc, qc - qf);
            (d1 != 0.0 && d2 != 0.0 && d1.signum() == d2.signum())
                .then(|| (d1 / d2).log2())
                .filter(|p| p.is_finite())
        }
        None => None,
    };
    let two_level = exact.is_none() && n < 3;
    let (used, degenerate) = if two_level {
        (assumed_order, assumed_order.is_none() || qc == qf)
    } else {
        (order, order.is_none())
    };
    let extrapolated = match used {
        Some(p) if valid(p) => qf + (qf - qc) / (2f64.powf(p) - 1.0),
        _ => qf,
    };
    Ok(RichardsonReport { order, extrapolated, degenerate })
}
