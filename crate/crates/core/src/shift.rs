//! Weight function, the constant `M` and the shift ODE.

use serde::Serialize;

use crate::ansatz::{CompositeAnsatz, FramePart};
use crate::exec::Exec;
use crate::gas::{EndStates, GasParams};
use crate::profiles::shock::ShockProfile;
use crate::solver::{Field, Grid};

/// `a(xi) = 1 + (lambda / delta_S) (v^S(xi) - v^*)`.
#[derive(Debug, Clone, Copy)]
pub struct WeightFn<'a> {
    pub lambda: f64,
    pub profile: &'a ShockProfile,
    pub delta_s: f64,
}

impl<'a> WeightFn<'a> {
    /// `lambda = sqrt(delta_S)` when `lambda` is `None`.
    pub fn new(profile: &'a ShockProfile, lambda: Option<f64>) -> Self {
        let delta_s = profile.delta_s;
        Self {
            lambda: lambda.unwrap_or(delta_s.sqrt()),
            profile,
            delta_s,
        }
    }

    #[inline]
    pub fn a(&self, xi: f64) -> f64 {
        if self.delta_s == 0.0 {
            return 1.0;
        }
        let s = self.profile.eval(xi);
        1.0 + self.lambda / self.delta_s * (s.v - self.profile.left.v)
    }

    #[inline]
    pub fn a_prime(&self, xi: f64) -> f64 {
        if self.delta_s == 0.0 {
            return 0.0;
        }
        self.lambda / self.delta_s * self.profile.eval(xi).dv
    }
}

fn m_formula(gas: &GasParams, p: f64, v: f64, sig: f64) -> f64 {
    let alpha = gas.gamma * (gas.gamma + 1.0) * p / (2.0 * v * v * sig);
    let gm1 = gas.gamma - 1.0;
    1.5 / (sig * sig) * alpha * (1.0 + 2.0 * gas.kappa * gm1 * gm1 / (gas.mu * gas.r * gas.gamma))
}

/// `M = 3 alpha* / (2 sigma*^2) (1 + 2 kappa (gamma-1)^2 / (mu R gamma))`,
/// with `alpha* = gamma (gamma+1) p* / (2 v*^2 sigma*)` and `sigma*` the sound
/// speed of the state behind the shock.
pub fn m_constant(gas: &GasParams, ends: &EndStates) -> f64 {
    let s = &ends.starstar;
    let p = gas.p(s.v, s.theta);
    m_formula(gas, p, s.v, (gas.gamma * p / s.v).sqrt())
}

/// The other normalisation, `gamma (gamma+1) p* / (2 v*^2 sigma*^3) (1 + ...)`:
/// two thirds of [`m_constant`].
pub fn m_constant_alt(gas: &GasParams, ends: &EndStates) -> f64 {
    let s = &ends.starstar;
    let p = gas.p(s.v, s.theta);
    let sig = (gas.gamma * p / s.v).sqrt();
    let gm1 = gas.gamma - 1.0;
    gas.gamma * (gas.gamma + 1.0) * p / (2.0 * s.v * s.v * sig.powi(3))
        * (1.0 + 2.0 * gas.kappa * gm1 * gm1 / (gas.mu * gas.r * gas.gamma))
}

/// Grid indices where the shifted shock derivatives can be nonzero.
pub fn shock_window(grid: &Grid, profile: &ShockProfile, shift: f64) -> std::ops::Range<usize> {
    if profile.is_trivial() {
        return 0..0;
    }
    let w = profile.axis.x0.abs().max(profile.axis.last().abs());
    grid.index_range(shift - w, shift + w)
}

/// Frame parts of the ansatz at one time on a contiguous index range.
#[derive(Debug, Clone, Default)]
pub struct FrameCache {
    pub t: f64,
    pub start: usize,
    pub parts: Vec<FramePart>,
}

impl FrameCache {
    pub fn build(ansatz: &CompositeAnsatz, t: f64, grid: &Grid, range: std::ops::Range<usize>, exec: Exec) -> Self {
        let start = range.start;
        let parts = exec.map(range.len(), |k| ansatz.frame_part(t, grid.xi(start + k)));
        Self { t, start, parts }
    }

    #[inline]
    fn get(&self, t: f64, i: usize) -> Option<&FramePart> {
        if t != self.t || i < self.start {
            return None;
        }
        self.parts.get(i - self.start)
    }
}

/// Right-hand side of the shift ODE for the current field.
pub fn shift_rhs(
    gas: &GasParams,
    field: &Field,
    ansatz: &CompositeAnsatz,
    weight: &WeightFn,
    m: f64,
    shift: f64,
    grid: &Grid,
) -> f64 {
    shift_rhs_cached(gas, field, ansatz, weight, m, shift, grid, None)
}

/// [`shift_rhs`] reusing precomputed frame parts where the cache covers the
/// window at the field's time.
#[allow(clippy::too_many_arguments)]
pub fn shift_rhs_cached(
    gas: &GasParams,
    field: &Field,
    ansatz: &CompositeAnsatz,
    weight: &WeightFn,
    m: f64,
    shift: f64,
    grid: &Grid,
    cache: Option<&FrameCache>,
) -> f64 {
    if weight.delta_s == 0.0 {
        return 0.0;
    }
    let range = shock_window(grid, &ansatz.shock, shift);
    if range.is_empty() {
        return 0.0;
    }
    let cv = gas.cv();
    let t = field.t;
    let (lo, hi) = (range.start, range.end);
    let mut acc = 0.0;
    for i in lo..hi {
        let xi = grid.xi(i);
        let e = match cache.and_then(|c| c.get(t, i)) {
            Some(f) => ansatz.with_shock(f, xi, shift),
            None => ansatz.eval(t, xi, shift),
        };
        let [vs_x, us_x, ts_x] = e.shock_xi;
        let a = 1.0 + weight.lambda / weight.delta_s * (e.shock[0] - ansatz.shock.left.v);
        let pbar = gas.p(e.v, e.theta);
        let f = a
            * (us_x * (field.u[i] - e.u)
                + cv * ts_x * (field.theta[i] - e.theta) / e.theta
                + pbar * vs_x * (field.v[i] - e.v) / e.v);
        let wq = if i == lo || i + 1 == hi { 0.5 } else { 1.0 };
        acc += wq * f;
    }
    -m / weight.delta_s * acc * grid.h
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftPoint {
    pub t: f64,
    pub x: f64,
    pub xdot: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ShiftState {
    pub x: f64,
    pub xdot: f64,
    pub history: Vec<ShiftPoint>,
}

impl ShiftState {
    pub fn record(&mut self, t: f64) {
        self.history.push(ShiftPoint {
            t,
            x: self.x,
            xdot: self.xdot,
        });
    }
}
