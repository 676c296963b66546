//! Method-of-lines solver for the Navier-Stokes-Fourier system in the frame
//! moving with the shock speed.

mod rhs;
mod run;

use serde::{Deserialize, Serialize};

use crate::ansatz::CompositeAnsatz;
use crate::error::{NsfError, Result};
use crate::exec::Exec;
use crate::numerics::trapezoid;

pub use rhs::{check_positive, rhs, stable_dt};
pub use run::{Simulation, Snapshot};

/// Uniform grid `xi_min + i h`, `i < n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub xi_min: f64,
    pub xi_max: f64,
    pub n: usize,
    pub h: f64,
}

impl Grid {
    pub fn new(xi_min: f64, xi_max: f64, n: usize) -> Result<Self> {
        if n < 16 {
            return Err(NsfError::Precondition(format!("grid needs at least 16 points, got {n}")));
        }
        if !(xi_max > xi_min) || !xi_min.is_finite() || !xi_max.is_finite() {
            return Err(NsfError::Precondition(format!("bad grid interval [{xi_min}, {xi_max}]")));
        }
        Ok(Self {
            xi_min,
            xi_max,
            n,
            h: (xi_max - xi_min) / (n - 1) as f64,
        })
    }

    /// Keeps `xi_min` and rounds the point count so the spacing is as close to `h` as possible.
    pub fn with_spacing(xi_min: f64, xi_max: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(NsfError::Domain { what: "h", value: h });
        }
        let n = ((xi_max - xi_min) / h).round() as usize + 1;
        Self::new(xi_min, xi_max, n)
    }

    /// Domain for a run to `t_end`: the left end trails the fastest leftward
    /// wave by `50 + 10 sqrt(t_end)`, the right end clears the shock tail (plus a margin) and
    /// `xi = 0` is a grid point.
    pub fn auto_sized(ansatz: &CompositeAnsatz, t_end: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(NsfError::Domain { what: "h", value: h });
        }
        let g = &ansatz.gas;
        let m = &ansatz.ends.minus;
        let reach = (g.lambda1(m.v, m.theta)?.abs() + ansatz.sigma) * t_end;
        let tail = ansatz.shock.extent(1e-9) + 10.0;
        // the viscous layers at the rarefaction edge spread like sqrt(t)
        let left = (reach + 50.0 + 10.0 * t_end.sqrt()).max(tail);
        let right = tail.max(50.0);
        let kl = (left / h).ceil() as usize;
        let kr = (right / h).ceil() as usize;
        Self::new(-(kl as f64) * h, kr as f64 * h, kl + kr + 1)
    }

    #[inline]
    pub fn xi(&self, i: usize) -> f64 {
        self.xi_min + self.h * i as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.xi(i)).collect()
    }

    /// Indices whose abscissae lie in `[a, b]`.
    pub fn index_range(&self, a: f64, b: f64) -> std::ops::Range<usize> {
        let lo = ((a - self.xi_min) / self.h).ceil().max(0.0) as usize;
        let hi = (((b - self.xi_min) / self.h).floor() + 1.0).clamp(0.0, self.n as f64) as usize;
        lo.min(hi)..hi
    }

    /// Same interval with the spacing halved.
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n - 1,
            h: self.h / 2.0,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub theta: Vec<f64>,
    pub t: f64,
}

impl Field {
    pub fn zeros(n: usize, t: f64) -> Self {
        Self {
            v: vec![0.0; n],
            u: vec![0.0; n],
            theta: vec![0.0; n],
            t,
        }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Component-wise sup distance.
    pub fn max_dist(&self, other: &Field) -> f64 {
        (0..self.len()).fold(0.0f64, |m, i| {
            m.max((self.v[i] - other.v[i]).abs())
                .max((self.u[i] - other.u[i]).abs())
                .max((self.theta[i] - other.theta[i]).abs())
        })
    }

    /// Every other sample: restriction of a [`Grid::refined`] field.
    pub fn coarsened(&self) -> Self {
        let pick = |x: &[f64]| x.iter().step_by(2).copied().collect();
        Self {
            v: pick(&self.v),
            u: pick(&self.u),
            theta: pick(&self.theta),
            t: self.t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub cfl_hyp: f64,
    pub cfl_diff: f64,
    pub t_end: f64,
    /// Time between diagnostics rows.
    pub output_every: f64,
    /// Used as is instead of the stability-limited step.
    pub fixed_dt: Option<f64>,
    pub boundary_tol: f64,
    pub snapshot_times: Vec<f64>,
    /// Weight amplitude; `sqrt(delta_S)` when absent.
    pub lambda_weight: Option<f64>,
    /// Also integrate the error terms of the ansatz at each output.
    pub source_budget: bool,
    /// Evolve the shift; when false `X` stays at 0.
    pub track_shift: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl_hyp: 0.4,
            cfl_diff: 0.4,
            t_end: 100.0,
            output_every: 1.0,
            fixed_dt: None,
            boundary_tol: 1e-6,
            snapshot_times: Vec::new(),
            lambda_weight: None,
            source_budget: true,
            track_shift: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        for (what, c) in [("cfl_hyp", self.cfl_hyp), ("cfl_diff", self.cfl_diff)] {
            if !(c > 0.0 && c <= 1.0) {
                return Err(NsfError::Domain { what, value: c });
            }
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(NsfError::Domain { what: "t_end", value: self.t_end });
        }
        if !(self.output_every > 0.0) {
            return Err(NsfError::Domain { what: "output_every", value: self.output_every });
        }
        if let Some(dt) = self.fixed_dt {
            if !(dt > 0.0) {
                return Err(NsfError::Domain { what: "fixed_dt", value: dt });
            }
        }
        if !(self.boundary_tol > 0.0) {
            return Err(NsfError::Domain { what: "boundary_tol", value: self.boundary_tol });
        }
        if let Some(l) = self.lambda_weight {
            if !(l > 0.0) {
                return Err(NsfError::Domain { what: "lambda_weight", value: l });
            }
        }
        Ok(())
    }
}

/// Gaussian bumps `A_k exp(-(xi - center)^2 / width^2)` added to `(v, u, theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Perturbation {
    pub amplitude: [f64; 3],
    pub center: f64,
    pub width: f64,
}

impl Default for Perturbation {
    fn default() -> Self {
        Self {
            amplitude: [0.01; 3],
            center: 0.0,
            width: 5.0,
        }
    }
}

impl Perturbation {
    pub fn zero() -> Self {
        Self {
            amplitude: [0.0; 3],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) {
            return Err(NsfError::Domain { what: "width", value: self.width });
        }
        if self.amplitude.iter().any(|a| !a.is_finite()) || !self.center.is_finite() {
            return Err(NsfError::Precondition("perturbation must be finite".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn bump(&self, xi: f64) -> f64 {
        let z = (xi - self.center) / self.width;
        (-z * z).exp()
    }

    /// Closed-form `H^1(R)` norm of the three bumps together:
    /// `|A| (pi/2)^(1/4) sqrt(w) sqrt(1 + 1/w^2)`.
    pub fn h1_norm(&self) -> f64 {
        let w = self.width;
        let a2: f64 = self.amplitude.iter().map(|a| a * a).sum();
        a2.sqrt() * (std::f64::consts::PI / 2.0).powf(0.25) * w.sqrt() * (1.0 + 1.0 / (w * w)).sqrt()
    }

    /// The same norm by trapezoid quadrature on `grid`.
    pub fn h1_norm_on(&self, grid: &Grid) -> f64 {
        let w2 = self.width * self.width;
        let vals: Vec<f64> = (0..grid.n)
            .map(|i| {
                let xi = grid.xi(i);
                let b = self.bump(xi);
                let db = -2.0 * (xi - self.center) / w2 * b;
                b * b + db * db
            })
            .collect();
        let a2: f64 = self.amplitude.iter().map(|a| a * a).sum();
        (a2 * trapezoid(&vals, grid.h)).sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct InitialData {
    pub field: Field,
    pub h1_norm: f64,
}

/// Ansatz at `t = 0`, `X = 0` plus the perturbation, with the boundary values
/// pinned to the far-field states.
pub fn initial_data(ansatz: &CompositeAnsatz, grid: &Grid, pert: &Perturbation, exec: Exec) -> Result<InitialData> {
    pert.validate()?;
    let mut field = ansatz.field(0.0, 0.0, grid, exec);
    let [av, au, at] = pert.amplitude;
    if av != 0.0 || au != 0.0 || at != 0.0 {
        for i in 0..grid.n {
            let b = pert.bump(grid.xi(i));
            field.v[i] += av * b;
            field.u[i] += au * b;
            field.theta[i] += at * b;
        }
    }
    pin_boundaries(&mut field, ansatz);
    check_positive(&field)?;
    Ok(InitialData {
        field,
        h1_norm: pert.h1_norm(),
    })
}

pub(crate) fn pin_boundaries(field: &mut Field, ansatz: &CompositeAnsatz) {
    let n = field.len();
    let (l, r) = (&ansatz.ends.minus, &ansatz.ends.plus);
    field.v[0] = l.v;
    field.u[0] = l.u;
    field.theta[0] = l.theta;
    field.v[n - 1] = r.v;
    field.u[n - 1] = r.u;
    field.theta[n - 1] = r.theta;
}
