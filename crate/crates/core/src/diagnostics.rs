//! Relative entropy, the good functionals, gaps and the Poincaré checker.

use serde::Serialize;

use crate::ansatz::{AnsatzEval, CompositeAnsatz};
use crate::error::{require_positive, NsfError, Result};
use crate::exec::Exec;
use crate::gas::{GasParams, PrimState};
use crate::numerics::{gradient, trapezoid};
use crate::shift::WeightFn;
use crate::solver::{Field, Grid};

/// `Phi(z) = z - 1 - ln z`.
#[inline]
pub fn phi(z: f64) -> f64 {
    z - 1.0 - z.ln()
}

#[inline]
fn eta(gas: &GasParams, v: f64, u: f64, th: f64, vb: f64, ub: f64, thb: f64) -> f64 {
    gas.r * phi(v / vb) + gas.cv() * phi(th / thb) + (u - ub) * (u - ub) / (2.0 * thb)
}

/// `eta(U | Ubar) = R Phi(v/vbar) + cv Phi(theta/thetabar) + (u-ubar)^2 / (2 thetabar)`.
pub fn relative_entropy_density(gas: &GasParams, state: &PrimState, reference: &PrimState) -> Result<f64> {
    require_positive("v", state.v)?;
    require_positive("theta", state.theta)?;
    require_positive("v_ref", reference.v)?;
    require_positive("theta_ref", reference.theta)?;
    Ok(eta(gas, state.v, state.u, state.theta, reference.v, reference.u, reference.theta))
}

/// One diagnostics row; the field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Xdot")]
    pub xdot: f64,
    #[serde(rename = "E_weighted")]
    pub e_weighted: f64,
    #[serde(rename = "E_plain")]
    pub e_plain: f64,
    #[serde(rename = "G_S")]
    pub g_s: f64,
    #[serde(rename = "G_R")]
    pub g_r: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "G_aprime")]
    pub g_aprime: f64,
    pub sup_gap: f64,
    pub l2_gap: f64,
}

impl DiagnosticsRecord {
    pub const COLUMNS: [&'static str; 11] = [
        "t", "X", "Xdot", "E_weighted", "E_plain", "G_S", "G_R", "D", "G_aprime", "sup_gap", "l2_gap",
    ];

    pub fn values(&self) -> [f64; 11] {
        [
            self.t,
            self.x,
            self.xdot,
            self.e_weighted,
            self.e_plain,
            self.g_s,
            self.g_r,
            self.d,
            self.g_aprime,
            self.sup_gap,
            self.l2_gap,
        ]
    }
}

/// Everything the functionals need from one evaluation pass.
#[derive(Debug, Clone)]
pub struct GapFields {
    pub bar: Vec<AnsatzEval>,
    pub dv: Vec<f64>,
    pub du: Vec<f64>,
    pub dtheta: Vec<f64>,
}

impl GapFields {
    pub fn new(field: &Field, ansatz: &CompositeAnsatz, shift: f64, grid: &Grid, exec: Exec) -> Self {
        let bar = ansatz.eval_grid(field.t, shift, grid, exec);
        let dv = (0..grid.n).map(|i| field.v[i] - bar[i].v).collect();
        let du = (0..grid.n).map(|i| field.u[i] - bar[i].u).collect();
        let dtheta = (0..grid.n).map(|i| field.theta[i] - bar[i].theta).collect();
        Self { bar, dv, du, dtheta }
    }

    pub fn sup(&self) -> f64 {
        (0..self.dv.len()).fold(0.0f64, |m, i| m.max(self.dv[i].abs()).max(self.du[i].abs()).max(self.dtheta[i].abs()))
    }

    pub fn l2_u(&self, h: f64) -> f64 {
        trapezoid(&self.du.iter().map(|x| x * x).collect::<Vec<_>>(), h).sqrt()
    }

    pub fn l2_theta(&self, h: f64) -> f64 {
        trapezoid(&self.dtheta.iter().map(|x| x * x).collect::<Vec<_>>(), h).sqrt()
    }
}

/// All functionals at the field's time for shift `X` (and its current rate).
pub fn functionals(
    gas: &GasParams,
    field: &Field,
    ansatz: &CompositeAnsatz,
    weight: &WeightFn,
    shift: f64,
    shift_rate: f64,
    grid: &Grid,
    exec: Exec,
) -> DiagnosticsRecord {
    let gaps = GapFields::new(field, ansatz, shift, grid, exec);
    functionals_from(gas, field, &gaps, ansatz, weight, shift, shift_rate, grid)
}

#[allow(clippy::too_many_arguments)]
pub fn functionals_from(
    gas: &GasParams,
    field: &Field,
    gaps: &GapFields,
    ansatz: &CompositeAnsatz,
    weight: &WeightFn,
    shift: f64,
    shift_rate: f64,
    grid: &Grid,
) -> DiagnosticsRecord {
    let n = grid.n;
    let h = grid.h;
    let ddu = gradient(&gaps.du, h);
    let ddth = gradient(&gaps.dtheta, h);
    let lam_over = if weight.delta_s > 0.0 { weight.lambda / weight.delta_s } else { 0.0 };
    let v_ref = ansatz.shock.left.v;
    let mut cols = vec![[0.0; 8]; n];
    for i in 0..n {
        let b = &gaps.bar[i];
        let (v, u, th) = (field.v[i], field.u[i], field.theta[i]);
        let e = eta(gas, v, u, th, b.v, b.u, b.theta);
        let a = 1.0 + lam_over * (b.shock[0] - v_ref);
        let ap = lam_over * b.shock_xi[0];
        let (dv, du, dt) = (gaps.dv[i], gaps.du[i], gaps.dtheta[i]);
        cols[i] = [
            a * b.theta * e,
            e,
            b.shock_xi[0].abs() * (dv * dv + du * du + dt * dt),
            b.rare_vx.abs() * (dv * dv + dt * dt),
            a * (gas.mu / v * ddu[i] * ddu[i] + gas.kappa / (v * th) * ddth[i] * ddth[i]),
            ap * b.theta * e,
            dv * dv + du * du + dt * dt,
            0.0,
        ];
    }
    let q = |k: usize| trapezoid(&cols.iter().map(|c| c[k]).collect::<Vec<_>>(), h);
    DiagnosticsRecord {
        t: field.t,
        x: shift,
        xdot: shift_rate,
        e_weighted: q(0),
        e_plain: q(1),
        g_s: q(2),
        g_r: q(3),
        d: q(4),
        g_aprime: ansatz.sigma * q(5),
        sup_gap: gaps.sup(),
        l2_gap: q(6).sqrt(),
    }
}

/// Component-wise `max |U - Ubar|` over the grid.
pub fn sup_gap(field: &Field, ansatz: &CompositeAnsatz, shift: f64, grid: &Grid, exec: Exec) -> f64 {
    let bar = ansatz.eval_grid(field.t, shift, grid, exec);
    bar.iter().enumerate().fold(0.0f64, |m, (i, b)| {
        m.max((field.v[i] - b.v).abs())
            .max((field.u[i] - b.u).abs())
            .max((field.theta[i] - b.theta).abs())
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoincareResult {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub degenerate: bool,
    pub holds: bool,
}

pub const POINCARE_SLACK: f64 = 1e-6;

/// `int |f - mean f|^2` against `1/2 int y(1-y) |f'|^2` for samples of `f` on a
/// uniform grid over `[0, 1]`.
pub fn poincare_check(f: &[f64]) -> Result<PoincareResult> {
    let n = f.len();
    if n < 1001 {
        return Err(NsfError::Precondition(format!("need at least 1001 samples, got {n}")));
    }
    let h = 1.0 / (n - 1) as f64;
    let mean = trapezoid(f, h);
    let lhs = trapezoid(&f.iter().map(|x| (x - mean) * (x - mean)).collect::<Vec<_>>(), h);
    let df = gradient(f, h);
    let w: Vec<f64> = (0..n)
        .map(|i| {
            let y = i as f64 * h;
            y * (1.0 - y) * df[i] * df[i]
        })
        .collect();
    let rhs = 0.5 * trapezoid(&w, h);
    if rhs <= f64::MIN_POSITIVE {
        let holds = lhs <= 1e-12;
        return Ok(PoincareResult {
            lhs,
            rhs,
            ratio: if holds { 0.0 } else { f64::INFINITY },
            degenerate: true,
            holds,
        });
    }
    let ratio = lhs / rhs;
    Ok(PoincareResult {
        lhs,
        rhs,
        ratio,
        degenerate: false,
        holds: ratio <= 1.0 + POINCARE_SLACK,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyDecayReport {
    pub e_initial: f64,
    pub e_final: f64,
    pub e_change: f64,
    /// Output intervals where `E_weighted` grew by more than the source budget.
    pub violations: usize,
    pub worst_excess: f64,
    pub total_budget: f64,
    pub xdot_final: f64,
    pub xdot_max: f64,
    pub x_over_t: f64,
    pub sup_gap_final: f64,
    pub sup_gap_max: f64,
}

impl EntropyDecayReport {
    pub fn xdot_ratio(&self) -> f64 {
        if self.xdot_max == 0.0 {
            0.0
        } else {
            self.xdot_final.abs() / self.xdot_max
        }
    }

    pub fn sup_gap_ratio(&self) -> f64 {
        if self.sup_gap_max == 0.0 {
            0.0
        } else {
            self.sup_gap_final / self.sup_gap_max
        }
    }
}

/// Net decay of the weighted entropy along a run. `source_rates[k]` is the
/// source-term bound at `records[k].t`; it is integrated between outputs.
pub fn entropy_decay_check(records: &[DiagnosticsRecord], source_rates: &[f64]) -> Result<EntropyDecayReport> {
    if records.len() < 3 {
        return Err(NsfError::Precondition(format!("need at least 3 records, got {}", records.len())));
    }
    if source_rates.len() != records.len() {
        return Err(NsfError::Precondition("one source rate per record".into()));
    }
    let (first, last) = (records[0], records[records.len() - 1]);
    let mut violations = 0;
    let mut worst = 0.0f64;
    let mut total = 0.0;
    for k in 1..records.len() {
        let dt = records[k].t - records[k - 1].t;
        let budget = 0.5 * dt * (source_rates[k] + source_rates[k - 1]);
        total += budget;
        let excess = records[k].e_weighted - records[k - 1].e_weighted - budget;
        if excess > 0.0 {
            violations += 1;
            worst = worst.max(excess);
        }
    }
    let xdot_max = records.iter().fold(0.0f64, |m, r| m.max(r.xdot.abs()));
    let sup_gap_max = records.iter().fold(0.0f64, |m, r| m.max(r.sup_gap));
    Ok(EntropyDecayReport {
        e_initial: first.e_weighted,
        e_final: last.e_weighted,
        e_change: last.e_weighted - first.e_weighted,
        violations,
        worst_excess: worst,
        total_budget: total,
        xdot_final: last.xdot,
        xdot_max,
        x_over_t: if last.t > 0.0 { last.x / last.t } else { 0.0 },
        sup_gap_final: last.sup_gap,
        sup_gap_max,
    })
}
