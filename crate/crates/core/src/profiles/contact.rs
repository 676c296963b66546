//! Viscous 2-contact wave built on the self-similar temperature profile
//! `Theta(eta)`, `eta = x / sqrt(1+t)`, solving `a_c (Theta'/Theta)' + (eta/2) Theta' = 0`.

use serde::Serialize;

use crate::error::{require_positive, NsfError, Result};
use crate::gas::GasParams;
use crate::numerics::{hermite, solve_tridiagonal, UniformAxis};

const NEWTON_TOL: f64 = 1e-10;
const MAX_NEWTON: usize = 200;
const TAIL_TOL: f64 = 1e-12;
const MAX_ENLARGE: usize = 4;

#[derive(Debug, Clone)]
pub struct ContactProfile {
    pub gas: GasParams,
    pub theta_left: f64,
    pub theta_right: f64,
    pub p_star: f64,
    pub u_star: f64,
    /// Diffusivity `(gamma-1) kappa p_* / (R^2 gamma)`.
    pub a_c: f64,
    pub axis: UniformAxis,
    pub theta: Vec<f64>,
    pub dtheta: Vec<f64>,
    pub d2theta: Vec<f64>,
    /// Max-norm of the discrete BVP residual at convergence.
    pub residual: f64,
}

/// Contact wave values with first and second space derivatives and time derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ContactSample {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
    pub vx: f64,
    pub ux: f64,
    pub thetax: f64,
    pub vxx: f64,
    pub uxx: f64,
    pub thetaxx: f64,
    pub vt: f64,
    pub ut: f64,
    pub thetat: f64,
}

pub fn contact_diffusivity(gas: &GasParams, p_star: f64) -> f64 {
    (gas.gamma - 1.0) * gas.kappa * p_star / (gas.r * gas.r * gas.gamma)
}

/// Discrete residual of the log-form ODE; returns the max norm.
fn residual(phi: &[f64], eta: &UniformAxis, a_c: f64, out: &mut [f64]) -> f64 {
    let h = eta.h;
    let n = phi.len();
    let mut worst = 0.0f64;
    for i in 1..n - 1 {
        let r = a_c * (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (h * h)
            + 0.5 * eta.at(i) * phi[i].exp() * (phi[i + 1] - phi[i - 1]) / (2.0 * h);
        out[i] = r;
        worst = worst.max(r.abs());
    }
    worst
}

fn newton(theta_left: f64, theta_right: f64, a_c: f64, axis: &UniformAxis) -> Result<(Vec<f64>, f64)> {
    let n = axis.n;
    let h = axis.h;
    let mut phi: Vec<f64> = (0..n)
        .map(|i| {
            let e = axis.at(i);
            (theta_left + (theta_right - theta_left) * 0.5 * (1.0 + e.tanh())).ln()
        })
        .collect();
    phi[0] = theta_left.ln();
    phi[n - 1] = theta_right.ln();
    let m = n - 2;
    let mut f = vec![0.0; n];
    let mut trial = phi.clone();
    let mut norm = residual(&phi, axis, a_c, &mut f);
    let (mut sub, mut diag, mut sup, mut rhs) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    for _ in 0..MAX_NEWTON {
        if norm < NEWTON_TOL {
            return Ok((phi, norm));
        }
        for k in 0..m {
            let i = k + 1;
            let c = 0.5 * axis.at(i) * phi[i].exp();
            sub[k] = a_c / (h * h) - c / (2.0 * h);
            sup[k] = a_c / (h * h) + c / (2.0 * h);
            diag[k] = -2.0 * a_c / (h * h) + c * (phi[i + 1] - phi[i - 1]) / (2.0 * h);
            rhs[k] = -f[i];
        }
        if !solve_tridiagonal(&sub, &diag, &sup, &mut rhs) {
            return Err(NsfError::NonConvergence("singular contact Jacobian".into()));
        }
        let mut step = 1.0;
        loop {
            for k in 0..m {
                trial[k + 1] = phi[k + 1] + step * rhs[k];
            }
            let trial_norm = residual(&trial, axis, a_c, &mut f);
            if trial_norm < norm || step < 1e-6 {
                phi.copy_from_slice(&trial);
                norm = trial_norm;
                break;
            }
            step *= 0.5;
        }
    }
    if norm < NEWTON_TOL {
        Ok((phi, norm))
    } else {
        Err(NsfError::NonConvergence(format!(
            "contact BVP residual {norm:e} after {MAX_NEWTON} Newton iterations"
        )))
    }
}

/// Fourth-order centered slope of `phi`, second order next to the ends.
fn log_slope(phi: &[f64], h: f64) -> Vec<f64> {
    let n = phi.len();
    let mut d = vec![0.0; n];
    for i in 0..n {
        d[i] = if i >= 2 && i + 2 < n {
            (-phi[i + 2] + 8.0 * phi[i + 1] - 8.0 * phi[i - 1] + phi[i - 2]) / (12.0 * h)
        } else if i >= 1 && i + 1 < n {
            (phi[i + 1] - phi[i - 1]) / (2.0 * h)
        } else if i == 0 {
            (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * h)
        } else {
            (3.0 * phi[n - 1] - 4.0 * phi[n - 2] + phi[n - 3]) / (2.0 * h)
        };
    }
    d
}

/// `L` defaults to 20 and `n` to 4001; both are enlarged when the tail is not flat.
pub fn solve_contact_profile(
    gas: &GasParams,
    theta_left: f64,
    theta_right: f64,
    p_star: f64,
    u_star: f64,
    half_width: f64,
    n: usize,
) -> Result<ContactProfile> {
    gas.validate()?;
    require_positive("theta_left", theta_left)?;
    require_positive("theta_right", theta_right)?;
    require_positive("p_star", p_star)?;
    require_positive("L", half_width)?;
    if n < 5 {
        return Err(NsfError::Precondition(format!("contact grid needs n >= 5, got {n}")));
    }
    let a_c = contact_diffusivity(gas, p_star);
    let (mut l, mut n) = (half_width, n);
    if theta_left == theta_right {
        let axis = UniformAxis::new(-l, l, n);
        return Ok(ContactProfile {
            gas: *gas,
            theta_left,
            theta_right,
            p_star,
            u_star,
            a_c,
            axis,
            theta: vec![theta_left; n],
            dtheta: vec![0.0; n],
            d2theta: vec![0.0; n],
            residual: 0.0,
        });
    }
    for _ in 0..=MAX_ENLARGE {
        let axis = UniformAxis::new(-l, l, n);
        let (phi, res) = newton(theta_left, theta_right, a_c, &axis)?;
        let theta = monotone_clean(phi.iter().map(|p| p.exp()).collect(), theta_right > theta_left)?;
        let sign = (theta_right - theta_left).signum();
        // flat tails carry rounding-level slopes of either sign
        let dtheta: Vec<f64> = log_slope(&phi, axis.h)
            .iter()
            .zip(&theta)
            .map(|(d, t)| if d * sign < 0.0 { 0.0 } else { d * t })
            .collect();
        let d2theta = (0..n)
            .map(|i| theta_second(a_c, axis.at(i), theta[i], dtheta[i]))
            .collect();
        if dtheta[0].abs() < TAIL_TOL && dtheta[n - 1].abs() < TAIL_TOL {
            return Ok(ContactProfile {
                gas: *gas,
                theta_left,
                theta_right,
                p_star,
                u_star,
                a_c,
                axis,
                theta,
                dtheta,
                d2theta,
                residual: res,
            });
        }
        l *= 1.5;
        n = ((n - 1) as f64 * 1.5).round() as usize + 1;
    }
    Err(NsfError::NonConvergence(format!(
        "contact tail still steep at L = {l}"
    )))
}

fn monotone_clean(mut theta: Vec<f64>, increasing: bool) -> Result<Vec<f64>> {
    for i in 1..theta.len() {
        let back = if increasing { theta[i - 1] - theta[i] } else { theta[i] - theta[i - 1] };
        if back > 1e-13 {
            return Err(NsfError::Monotonicity(format!("contact profile reverses at node {i}")));
        }
        if back > 0.0 {
            theta[i] = theta[i - 1];
        }
    }
    Ok(theta)
}

/// `Theta''` from the ODE given `Theta` and `Theta'`.
#[inline]
fn theta_second(a_c: f64, eta: f64, th: f64, dth: f64) -> f64 {
    dth * dth / th - eta * th * dth / (2.0 * a_c)
}

impl ContactProfile {
    pub fn is_trivial(&self) -> bool {
        self.theta_left == self.theta_right
    }

    /// `(Theta, Theta', Theta'')` at `eta`; constant states outside `[-L, L]`.
    pub fn similarity(&self, eta: f64) -> (f64, f64, f64) {
        if self.is_trivial() {
            return (self.theta_left, 0.0, 0.0);
        }
        let Some((i, s)) = self.axis.locate(eta) else {
            return if eta < 0.0 {
                (self.theta_left, 0.0, 0.0)
            } else {
                (self.theta_right, 0.0, 0.0)
            };
        };
        let (h, j) = (self.axis.h, i + 1);
        let th = hermite(s, h, self.theta[i], self.theta[j], self.dtheta[i], self.dtheta[j]);
        let dth = hermite(s, h, self.dtheta[i], self.dtheta[j], self.d2theta[i], self.d2theta[j]);
        (th, dth, theta_second(self.a_c, eta, th, dth))
    }

    pub fn eval(&self, t: f64, x: f64) -> ContactSample {
        let g = &self.gas;
        let tau = 1.0 + t;
        let rt = tau.sqrt();
        let eta = x / rt;
        let (th, d1, d2) = self.similarity(eta);
        let rp = g.r / self.p_star;
        let cu = (g.gamma - 1.0) * g.kappa / (g.r * g.gamma);
        let ux = -0.5 * rp * eta * d1 / tau;
        ContactSample {
            v: rp * th,
            u: self.u_star + cu * d1 / (th * rt),
            theta: th,
            vx: rp * d1 / rt,
            ux,
            thetax: d1 / rt,
            vxx: rp * d2 / tau,
            uxx: -0.5 * rp * (d1 + eta * d2) / (tau * rt),
            thetaxx: d2 / tau,
            vt: ux,
            ut: -0.5 * cu / (tau * rt) * (d1 / th - eta * eta * d1 / (2.0 * self.a_c)),
            thetat: -0.5 * eta * d1 / tau,
        }
    }

    /// Error terms `Q1 = u_t - mu (u_x/v)_x` and `Q2 = -mu u_x^2 / v` at one point.
    pub fn sources(&self, t: f64, x: f64) -> (f64, f64) {
        let mu = self.gas.mu;
        let c = self.eval(t, x);
        let q1 = c.ut - mu * (c.uxx / c.v - c.ux * c.vx / (c.v * c.v));
        let q2 = -mu * c.ux * c.ux / c.v;
        (q1, q2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContactResidual {
    pub t: f64,
    pub sup_q1: f64,
    pub sup_q2: f64,
}

/// Sup-norms of the contact error terms at time `t`, sampled on the profile nodes.
pub fn contact_residual(profile: &ContactProfile, t: f64) -> ContactResidual {
    let rt = (1.0 + t).sqrt();
    let (mut q1, mut q2) = (0.0f64, 0.0f64);
    if !profile.is_trivial() {
        for eta in profile.axis.points() {
            let (a, b) = profile.sources(t, eta * rt);
            q1 = q1.max(a.abs());
            q2 = q2.max(b.abs());
        }
    }
    ContactResidual { t, sup_q1: q1, sup_q2: q2 }
}

/// Least-squares log-log slopes of `sup Q1` and `sup Q2` against `1+t`.
pub fn contact_decay_slopes(profile: &ContactProfile, times: &[f64]) -> (f64, f64) {
    let x: Vec<f64> = times.iter().map(|t| (1.0 + t).ln()).collect();
    let rs: Vec<ContactResidual> = times.iter().map(|&t| contact_residual(profile, t)).collect();
    let y1: Vec<f64> = rs.iter().map(|r| r.sup_q1.ln()).collect();
    let y2: Vec<f64> = rs.iter().map(|r| r.sup_q2.ln()).collect();
    (
        crate::numerics::fit_slope(&x, &y1),
        crate::numerics::fit_slope(&x, &y2),
    )
}
