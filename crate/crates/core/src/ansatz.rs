//! Shifted superposition of the three waves in the shock frame:
//! `(R + C)(t, xi + sigma t) + S(xi - X) - (star + starstar)`.

use serde::Serialize;

use crate::error::Result;
use crate::exec::Exec;
use crate::gas::{ContactBranch, EndStates, GasParams, PrimState, WaveStrengths};
use crate::numerics::trapezoid;
use crate::profiles::contact::{solve_contact_profile, ContactProfile};
use crate::profiles::rarefaction::RarefactionWave;
use crate::profiles::shock::{solve_shock_profile, ShockProfile, ShockSolveOptions};
use crate::solver::{rhs, Field, Grid};

/// Construction controls for [`CompositeAnsatz::build`].
#[derive(Debug, Clone, Copy)]
pub struct AnsatzOptions {
    pub branch: ContactBranch,
    pub contact_half_width: f64,
    pub contact_n: usize,
    pub shock: ShockSolveOptions,
}

impl Default for AnsatzOptions {
    fn default() -> Self {
        Self {
            branch: ContactBranch::default(),
            contact_half_width: 20.0,
            contact_n: 4001,
            shock: ShockSolveOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompositeAnsatz {
    pub gas: GasParams,
    pub ends: EndStates,
    pub shock: ShockProfile,
    pub contact: ContactProfile,
    pub rarefaction: RarefactionWave,
    pub sigma: f64,
}

/// Ansatz values, their `xi`-derivatives and the per-wave pieces used by the
/// shift and the diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnsatzEval {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
    pub dv: f64,
    pub du: f64,
    pub dtheta: f64,
    pub rare: [f64; 3],
    pub contact: [f64; 3],
    pub shock: [f64; 3],
    /// Shock derivatives `(v^S, u^S, theta^S)_xi` at `xi - X`.
    pub shock_xi: [f64; 3],
    /// `v^R_x` at `xi + sigma t`.
    pub rare_vx: f64,
}

/// Rarefaction plus contact offsets `(R - star) + (C - starstar)` and their
/// derivatives, with the raw wave values kept for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FramePart {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
    pub dv: f64,
    pub du: f64,
    pub dtheta: f64,
    pub rare: [f64; 3],
    pub contact: [f64; 3],
    pub rare_vx: f64,
}

impl CompositeAnsatz {
    pub fn build(gas: &GasParams, plus: &PrimState, strengths: &WaveStrengths, opts: AnsatzOptions) -> Result<Self> {
        let ends = gas.build_end_states(plus, strengths, opts.branch)?;
        let shock = if strengths.delta_s > 0.0 {
            solve_shock_profile(gas, &ends.starstar, &ends.plus, ends.sigma, opts.shock)?
        } else {
            ShockProfile::constant(gas, &ends.plus, ends.sigma)
        };
        let contact = solve_contact_profile(
            gas,
            ends.star.theta,
            ends.starstar.theta,
            ends.p_star_cd,
            ends.star.u,
            opts.contact_half_width,
            opts.contact_n,
        )?;
        let rarefaction = RarefactionWave::new(gas, &ends.minus, &ends.star)?;
        Ok(Self {
            gas: *gas,
            ends,
            shock,
            contact,
            rarefaction,
            sigma: ends.sigma,
        })
    }

    /// Rarefaction and contact contributions at `(t, xi)`: the part of the
    /// ansatz that does not depend on the shift.
    pub fn frame_part(&self, t: f64, xi: f64) -> FramePart {
        let x = xi + self.sigma * t;
        let (st, ss) = (&self.ends.star, &self.ends.starstar);
        let mut f = FramePart {
            rare: [st.v, st.u, st.theta],
            contact: [ss.v, ss.u, ss.theta],
            ..Default::default()
        };
        // trivial waves contribute exactly nothing
        if !self.rarefaction.is_trivial() {
            let r = self.rarefaction.approx(t, x);
            f.v += r.v - st.v;
            f.u += r.u - st.u;
            f.theta += r.theta - st.theta;
            f.dv += r.vx;
            f.du += r.ux;
            f.dtheta += r.thetax;
            f.rare = [r.v, r.u, r.theta];
            f.rare_vx = r.vx;
        }
        if !self.contact.is_trivial() {
            let c = self.contact.eval(t, x);
            f.v += c.v - ss.v;
            f.u += c.u - ss.u;
            f.theta += c.theta - ss.theta;
            f.dv += c.vx;
            f.du += c.ux;
            f.dtheta += c.thetax;
            f.contact = [c.v, c.u, c.theta];
        }
        f
    }

    /// Adds the shock at `xi - shift` to a frame part.
    #[inline]
    pub fn with_shock(&self, f: &FramePart, xi: f64, shift: f64) -> AnsatzEval {
        let s = self.shock.eval(xi - shift);
        AnsatzEval {
            v: s.v + f.v,
            u: s.u + f.u,
            theta: s.theta + f.theta,
            dv: s.dv + f.dv,
            du: s.du + f.du,
            dtheta: s.dtheta + f.dtheta,
            rare: f.rare,
            contact: f.contact,
            shock: [s.v, s.u, s.theta],
            shock_xi: [s.dv, s.du, s.dtheta],
            rare_vx: f.rare_vx,
        }
    }

    pub fn eval(&self, t: f64, xi: f64, shift: f64) -> AnsatzEval {
        self.with_shock(&self.frame_part(t, xi), xi, shift)
    }

    pub fn eval_grid(&self, t: f64, shift: f64, grid: &Grid, exec: Exec) -> Vec<AnsatzEval> {
        exec.map(grid.n, |i| self.eval(t, grid.xi(i), shift))
    }

    /// Ansatz sampled as a [`Field`], with the boundary values pinned to the end states.
    pub fn field(&self, t: f64, shift: f64, grid: &Grid, exec: Exec) -> Field {
        let mut f = Field::zeros(grid.n, t);
        exec.fill3(&mut f.v, &mut f.u, &mut f.theta, |i| {
            let e = self.eval(t, grid.xi(i), shift);
            (e.v, e.u, e.theta)
        });
        f
    }

    /// Largest distance of the far-field ansatz from its end states at the two
    /// boundary points of `grid`.
    pub fn boundary_defect(&self, t: f64, shift: f64, grid: &Grid) -> f64 {
        let l = self.eval(t, grid.xi_min, shift);
        let r = self.eval(t, grid.xi_max, shift);
        let dl = PrimState::new(l.v, l.u, l.theta).max_dist(&self.ends.minus);
        let dr = PrimState::new(r.v, r.u, r.theta).max_dist(&self.ends.plus);
        dl.max(dr)
    }
}

/// Residual fields of the ansatz system and their norms.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzResidual {
    pub mass: Vec<f64>,
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
    pub norms: ResidualNorms,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ResidualNorms {
    pub mass_sup: f64,
    pub q1_l2: f64,
    pub q1_sup: f64,
    pub q2_l2: f64,
    pub q2_sup: f64,
}

const RESIDUAL_DT: f64 = 1e-5;

/// Error terms `Q1`, `Q2` (and the mass defect, which should vanish) of the
/// ansatz at `(t, X, Xdot)`: two-sided time differences with `dt = 1e-5` and
/// the solver's spatial stencil.
pub fn ansatz_residual(ans: &CompositeAnsatz, t: f64, shift: f64, shift_rate: f64, grid: &Grid, exec: Exec) -> AnsatzResidual {
    let dt = RESIDUAL_DT;
    let cur = ans.eval_grid(t, shift, grid, exec);
    let fwd = ans.field(t + dt, shift + shift_rate * dt, grid, exec);
    let bwd = ans.field(t - dt, shift - shift_rate * dt, grid, exec);
    let mut here = Field::zeros(grid.n, t);
    for (i, e) in cur.iter().enumerate() {
        here.v[i] = e.v;
        here.u[i] = e.u;
        here.theta[i] = e.theta;
    }
    let mut d = Field::zeros(grid.n, t);
    rhs(&ans.gas, &here, ans.sigma, grid, &mut d, exec);
    let cv = ans.gas.cv();
    let n = grid.n;
    let (mut mass, mut q1, mut q2) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    exec.fill3(&mut mass, &mut q1, &mut q2, |i| {
        if i == 0 || i + 1 == n {
            return (0.0, 0.0, 0.0);
        }
        let s = &cur[i].shock_xi;
        let vt = (fwd.v[i] - bwd.v[i]) / (2.0 * dt);
        let ut = (fwd.u[i] - bwd.u[i]) / (2.0 * dt);
        let tt = (fwd.theta[i] - bwd.theta[i]) / (2.0 * dt);
        (
            vt + shift_rate * s[0] - d.v[i],
            ut + shift_rate * s[1] - d.u[i],
            cv * (tt + shift_rate * s[2] - d.theta[i]),
        )
    });
    let sup = |f: &[f64]| f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let l2 = |f: &[f64]| trapezoid(&f.iter().map(|x| x * x).collect::<Vec<_>>(), grid.h).sqrt();
    let norms = ResidualNorms {
        mass_sup: sup(&mass),
        q1_l2: l2(&q1),
        q1_sup: sup(&q1),
        q2_l2: l2(&q2),
        q2_sup: sup(&q2),
    };
    AnsatzResidual { mass, q1, q2, norms }
}
