//! Viscous 3-shock traveling wave.
//!
//! The profile is the heteroclinic orbit of the planar ODE for `(v, theta)`
//! leaving the saddle `(v^*, theta^*)` and entering the stable node
//! `(v_+, theta_+)`. The velocity follows from the mass relation
//! `u = u^* - sigma (v - v^*)`.

use crate::error::{NsfError, Result};
use crate::gas::{GasParams, PrimState};
use crate::numerics::{fit_slope, hermite, hermite_slope, UniformAxis};

const LAUNCH_OFFSET: f64 = 1e-8;
const ARRIVAL_TOL: f64 = 1e-10;
const RK_TOL: f64 = 1e-12;
const MAX_STEP: f64 = 0.25;
const MAX_STEPS: usize = 2_000_000;
/// Absolute deviation from the end states at which the stored window stops.
const EDGE_TOL: f64 = 1e-14;
const DEFAULT_SPACING: f64 = 0.02;

/// The `(v, theta)` vector field of the traveling-wave system.
#[derive(Debug, Clone, Copy)]
pub struct ShockOde {
    pub gas: GasParams,
    pub plus: PrimState,
    pub sigma: f64,
}

impl ShockOde {
    #[inline]
    pub fn rhs(&self, v: f64, theta: f64) -> [f64; 2] {
        let g = &self.gas;
        let (s, p) = (self.sigma, &self.plus);
        let p_plus = g.p(p.v, p.theta);
        let dv = v - p.v;
        let g1 = (g.p(v, theta) - p_plus) + s * s * dv;
        let g2 = g.cv() * (theta - p.theta) + p_plus * dv - 0.5 * s * s * dv * dv;
        [-v * g1 / (g.mu * s), -s * v * g2 / g.kappa]
    }

    #[inline]
    pub fn jacobian(&self, v: f64, theta: f64) -> [[f64; 2]; 2] {
        let g = &self.gas;
        let (s, p) = (self.sigma, &self.plus);
        let p_plus = g.p(p.v, p.theta);
        let dv = v - p.v;
        let pv = g.p(v, theta);
        let g1 = (pv - p_plus) + s * s * dv;
        let g2 = g.cv() * (theta - p.theta) + p_plus * dv - 0.5 * s * s * dv * dv;
        [
            [-(g1 - pv + s * s * v) / (g.mu * s), -g.r / (g.mu * s)],
            [
                -s * (g2 + v * (p_plus - s * s * dv)) / g.kappa,
                -s * v * g.cv() / g.kappa,
            ],
        ]
    }

    /// `d/dxi` of the vector field along a trajectory, i.e. `J f`.
    #[inline]
    fn second(&self, v: f64, theta: f64, f: [f64; 2]) -> [f64; 2] {
        let j = self.jacobian(v, theta);
        [j[0][0] * f[0] + j[0][1] * f[1], j[1][0] * f[0] + j[1][1] * f[1]]
    }

    fn rk4(&self, y: [f64; 2], h: f64) -> [f64; 2] {
        let k1 = self.rhs(y[0], y[1]);
        let k2 = self.rhs(y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]);
        let k3 = self.rhs(y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]);
        let k4 = self.rhs(y[0] + h * k3[0], y[1] + h * k3[1]);
        [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]
    }
}

/// Eigenvalues (ascending) of a real 2x2 matrix with real spectrum.
fn eigen2(j: [[f64; 2]; 2]) -> Option<[f64; 2]> {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = 0.25 * tr * tr - det;
    if disc < 0.0 {
        return None;
    }
    let r = disc.sqrt();
    Some([0.5 * tr - r, 0.5 * tr + r])
}

/// Window and sampling controls. `None` picks the window from the tail decay
/// and a spacing of 0.02.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShockSolveOptions {
    pub xi_half_width: Option<f64>,
    pub n_samples: Option<usize>,
}

/// Sampled viscous shock with first and second derivatives.
#[derive(Debug, Clone)]
pub struct ShockProfile {
    pub gas: GasParams,
    pub left: PrimState,
    pub right: PrimState,
    pub sigma: f64,
    pub delta_s: f64,
    pub axis: UniformAxis,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub theta: Vec<f64>,
    pub dv: Vec<f64>,
    pub du: Vec<f64>,
    pub dtheta: Vec<f64>,
    pub d2v: Vec<f64>,
    pub d2theta: Vec<f64>,
}

/// Point evaluation of a [`ShockProfile`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ShockSample {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
    pub dv: f64,
    pub du: f64,
    pub dtheta: f64,
    pub d2v: f64,
    pub d2u: f64,
    pub d2theta: f64,
}

impl ShockSample {
    fn constant(s: &PrimState) -> Self {
        Self {
            v: s.v,
            u: s.u,
            theta: s.theta,
            ..Default::default()
        }
    }
}

struct Node {
    xi: f64,
    y: [f64; 2],
    f: [f64; 2],
}

pub fn solve_shock_profile(
    gas: &GasParams,
    left: &PrimState,
    plus: &PrimState,
    sigma: f64,
    opts: ShockSolveOptions,
) -> Result<ShockProfile> {
    gas.validate()?;
    left.validate()?;
    plus.validate()?;
    let delta = plus.v - left.v;
    if delta == 0.0 && left.max_dist(plus) == 0.0 {
        return Ok(ShockProfile::constant(gas, plus, sigma));
    }
    if delta < 0.0 {
        return Err(NsfError::Precondition(format!("3-shock needs v^* < v_+, got delta = {delta}")));
    }
    let res = gas.rh_residual(left, plus, sigma);
    if res.iter().any(|r| !(r.abs() < 1e-10)) {
        return Err(NsfError::Precondition(format!("end states violate RH: {res:?}")));
    }

    let ode = ShockOde { gas: *gas, plus: *plus, sigma };
    let jl = ode.jacobian(left.v, left.theta);
    let [lam_s, lam_u] = eigen2(jl)
        .ok_or_else(|| NsfError::NonConvergence("complex spectrum at the left state".into()))?;
    if !(lam_u > 0.0 && lam_s < 0.0) {
        return Err(NsfError::NoAdmissibleShock(format!(
            "left state is not a saddle: eigenvalues {lam_s}, {lam_u}"
        )));
    }
    let mut e = [jl[0][1], lam_u - jl[0][0]];
    let scale = e[0].abs().max(e[1].abs());
    e = [e[0] / scale, e[1] / scale];
    if e[0] < 0.0 {
        e = [-e[0], -e[1]];
    }
    let [_, lam_slow] = eigen2(ode.jacobian(plus.v, plus.theta))
        .ok_or_else(|| NsfError::NonConvergence("complex spectrum at the right state".into()))?;
    if !(lam_slow < 0.0) {
        return Err(NsfError::NoAdmissibleShock(format!("right state is not a stable node: {lam_slow}")));
    }
    let eps = LAUNCH_OFFSET * delta;
    let settle = (ARRIVAL_TOL * delta / EDGE_TOL).max(1.0).ln() / -lam_slow;
    let y0 = [left.v + eps * e[0], left.theta + eps * e[1]];

    let dev_plus = |y: &[f64; 2]| (y[0] - plus.v).abs().max((y[1] - plus.theta).abs());
    let dev_left = |y: &[f64; 2]| (y[0] - left.v).abs().max((y[1] - left.theta).abs());
    let mut nodes = vec![Node { xi: 0.0, y: y0, f: ode.rhs(y0[0], y0[1]) }];
    let mut h = 0.01 / lam_u.max(1.0);
    let mut arrived_at = None;
    let step = |nodes: &mut Vec<Node>, h: &mut f64| -> Result<()> {
        let last = nodes.last().unwrap();
        let (xi, y) = (last.xi, last.y);
        for _ in 0..60 {
            let full = ode.rk4(y, *h);
            let half = ode.rk4(ode.rk4(y, 0.5 * *h), 0.5 * *h);
            let err = (half[0] - full[0]).abs().max((half[1] - full[1]).abs()) / 15.0;
            // relative to the distance from the nearer rest point, floored at rounding level
            let dist = dev_left(&half).min(dev_plus(&half));
            let tol = (RK_TOL * dist).max(4.0 * f64::EPSILON * half[0].abs().max(half[1].abs()));
            let factor = if err == 0.0 { 4.0 } else { (0.9 * (tol / err).powf(0.2)).clamp(0.2, 4.0) };
            if err <= tol {
                let yn = [half[0] + (half[0] - full[0]) / 15.0, half[1] + (half[1] - full[1]) / 15.0];
                if !(yn[0] > 0.0 && yn[1] > 0.0) {
                    break;
                }
                nodes.push(Node { xi: xi + *h, y: yn, f: ode.rhs(yn[0], yn[1]) });
                *h = (*h * factor).min(MAX_STEP);
                return Ok(());
            }
            *h *= factor;
        }
        Err(NonConv::step(xi))
    };
    while arrived_at.is_none() || dev_plus(&nodes.last().unwrap().y) > EDGE_TOL {
        if nodes.len() > MAX_STEPS {
            if arrived_at.is_some() {
                break;
            }
            return Err(NsfError::NonConvergence(format!(
                "plus state not reached within {MAX_STEPS} steps"
            )));
        }
        step(&mut nodes, &mut h)?;
        let last = nodes.last().unwrap();
        if arrived_at.is_none() && dev_plus(&last.y) < ARRIVAL_TOL * delta {
            arrived_at = Some(last.xi);
        }
        if let Some(xa) = arrived_at {
            // past the predicted decay length the orbit sits at rounding level
            if last.xi > xa + 1.5 * settle {
                break;
            }
        }
        if last.y[0] > plus.v + delta || last.y[0] < left.v - delta {
            return Err(NsfError::NonConvergence(format!(
                "orbit left the shock range at xi = {}",
                last.xi
            )));
        }
    }

    let v_mid = 0.5 * (left.v + plus.v);
    let xi_mid = find_crossing(&nodes, v_mid).ok_or_else(|| {
        NsfError::Monotonicity("profile volume never crosses the midpoint".into())
    })?;

    let xi_left = if eps > EDGE_TOL { -(eps / EDGE_TOL).ln() / lam_u } else { 0.0 };
    let xi_end = nodes.last().unwrap().xi;
    let half_width = match opts.xi_half_width {
        Some(w) if w > 0.0 => w,
        Some(w) => return Err(NsfError::Domain { what: "xi_half_width", value: w }),
        None => (xi_mid - xi_left).max(xi_end - xi_mid),
    };
    // a requested window wider than the integrated orbit continues along the stable node
    while xi_mid + half_width > nodes.last().unwrap().xi {
        if nodes.len() > 2 * MAX_STEPS {
            return Err(NsfError::NonConvergence("xi budget exhausted".into()));
        }
        step(&mut nodes, &mut h)?;
    }
    let n = match opts.n_samples {
        Some(n) if n >= 2 => n,
        Some(n) => return Err(NsfError::Precondition(format!("n_samples = {n} < 2"))),
        None => (2.0 * half_width / DEFAULT_SPACING).ceil() as usize + 1,
    };
    let axis = UniformAxis::new(-half_width, half_width, n);

    let mut prof = ShockProfile {
        gas: *gas,
        left: *left,
        right: *plus,
        sigma,
        delta_s: delta,
        axis,
        v: Vec::with_capacity(n),
        u: Vec::with_capacity(n),
        theta: Vec::with_capacity(n),
        dv: Vec::with_capacity(n),
        du: Vec::with_capacity(n),
        dtheta: Vec::with_capacity(n),
        d2v: Vec::with_capacity(n),
        d2theta: Vec::with_capacity(n),
    };
    let mut k = 0;
    for i in 0..n {
        let xi = xi_mid + axis.at(i);
        let y = if xi <= 0.0 {
            let a = eps * (lam_u * xi).exp();
            [left.v + a * e[0], left.theta + a * e[1]]
        } else {
            while k + 2 < nodes.len() && nodes[k + 1].xi < xi {
                k += 1;
            }
            let (a, b) = (&nodes[k], &nodes[k + 1]);
            let hc = b.xi - a.xi;
            let s = ((xi - a.xi) / hc).clamp(0.0, 1.0);
            [
                hermite(s, hc, a.y[0], b.y[0], a.f[0], b.f[0]),
                hermite(s, hc, a.y[1], b.y[1], a.f[1], b.f[1]),
            ]
        };
        let f = ode.rhs(y[0], y[1]);
        let f2 = ode.second(y[0], y[1], f);
        prof.v.push(y[0]);
        prof.theta.push(y[1]);
        prof.u.push(left.u - sigma * (y[0] - left.v));
        prof.dv.push(f[0]);
        prof.dtheta.push(f[1]);
        prof.du.push(-sigma * f[0]);
        prof.d2v.push(f2[0]);
        prof.d2theta.push(f2[1]);
    }
    prof.clean_rounding_noise()?;
    prof.check_monotone()?;
    Ok(prof)
}

struct NonConv;

impl NonConv {
    fn step(xi: f64) -> NsfError {
        NsfError::NonConvergence(format!("step size collapsed at xi = {xi}"))
    }
}

/// Position where the Hermite interpolant of the node volumes equals `target`.
fn find_crossing(nodes: &[Node], target: f64) -> Option<f64> {
    let k = nodes.windows(2).position(|w| w[0].y[0] <= target && w[1].y[0] >= target)?;
    let (a, b) = (&nodes[k], &nodes[k + 1]);
    let hc = b.xi - a.xi;
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if hermite(mid, hc, a.y[0], b.y[0], a.f[0], b.f[0]) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(a.xi + 0.5 * (lo + hi) * hc)
}

impl ShockProfile {
    /// Trivial profile for `delta_S = 0`.
    pub fn constant(gas: &GasParams, state: &PrimState, sigma: f64) -> Self {
        let n = 2;
        Self {
            gas: *gas,
            left: *state,
            right: *state,
            sigma,
            delta_s: 0.0,
            axis: UniformAxis::new(-1.0, 1.0, n),
            v: vec![state.v; n],
            u: vec![state.u; n],
            theta: vec![state.theta; n],
            dv: vec![0.0; n],
            du: vec![0.0; n],
            dtheta: vec![0.0; n],
            d2v: vec![0.0; n],
            d2theta: vec![0.0; n],
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.delta_s == 0.0
    }

    pub fn xi(&self) -> Vec<f64> {
        self.axis.points()
    }

    /// Deep in the tails consecutive samples differ by less than an ulp and
    /// the vector field is pure rounding; flatten that jitter so the stored
    /// samples and slopes are monotone.
    fn clean_rounding_noise(&mut self) -> Result<()> {
        const NOISE: f64 = 1e-13;
        let near = ARRIVAL_TOL * self.delta_s;
        for i in 0..self.v.len() {
            let (l, r) = (&self.left, &self.right);
            let dev = (self.v[i] - l.v)
                .abs()
                .max((self.theta[i] - l.theta).abs())
                .min((self.v[i] - r.v).abs().max((self.theta[i] - r.theta).abs()));
            if dev < near {
                if self.dv[i] < 0.0 {
                    self.dv[i] = 0.0;
                    self.du[i] = 0.0;
                }
                if self.dtheta[i] > 0.0 {
                    self.dtheta[i] = 0.0;
                }
            }
        }
        for i in 1..self.v.len() {
            let (dv, dt) = (self.v[i - 1] - self.v[i], self.theta[i] - self.theta[i - 1]);
            if dv > NOISE || dt > NOISE {
                return Err(NsfError::Monotonicity(format!("profile reverses at xi = {}", self.axis.at(i))));
            }
            if dv > 0.0 {
                self.v[i] = self.v[i - 1];
                self.u[i] = self.u[i - 1];
            }
            if dt > 0.0 {
                self.theta[i] = self.theta[i - 1];
            }
        }
        Ok(())
    }

    fn check_monotone(&self) -> Result<()> {
        let near = ARRIVAL_TOL * self.delta_s;
        let h = self.axis.h;
        for i in 0..self.v.len() {
            if i > 0 && self.v[i] < self.v[i - 1] {
                return Err(NsfError::Monotonicity(format!("v decreases at xi = {}", self.axis.at(i))));
            }
            if self.dv[i] < 0.0 || self.dtheta[i] > 0.0 {
                return Err(NsfError::Monotonicity(format!("slope sign flips at xi = {}", self.axis.at(i))));
            }
            let away = (self.v[i] - self.left.v).abs() > near && (self.right.v - self.v[i]).abs() > near;
            if !away {
                continue;
            }
            if !(self.dv[i] > 0.0 && self.dtheta[i] < 0.0 && self.du[i] < 0.0) {
                return Err(NsfError::Monotonicity(format!(
                    "derivative signs at xi = {}: dv = {}, du = {}, dtheta = {}",
                    self.axis.at(i),
                    self.dv[i],
                    self.du[i],
                    self.dtheta[i]
                )));
            }
            // strict growth is only resolvable once the increment clears rounding
            if i > 0 && self.dv[i] * h > 1e3 * f64::EPSILON * self.v[i] && self.v[i] <= self.v[i - 1] {
                return Err(NsfError::Monotonicity(format!("v not increasing at xi = {}", self.axis.at(i))));
            }
        }
        Ok(())
    }

    /// Values and derivatives at `xi`; endpoint states with zero derivatives
    /// outside the stored window.
    pub fn eval(&self, xi: f64) -> ShockSample {
        if self.is_trivial() {
            return ShockSample::constant(&self.right);
        }
        let Some((i, s)) = self.axis.locate(xi) else {
            return if xi < 0.0 {
                ShockSample::constant(&self.left)
            } else {
                ShockSample::constant(&self.right)
            };
        };
        let h = self.axis.h;
        let j = i + 1;
        let v = hermite(s, h, self.v[i], self.v[j], self.dv[i], self.dv[j]);
        let theta = hermite(s, h, self.theta[i], self.theta[j], self.dtheta[i], self.dtheta[j]);
        let dv = hermite(s, h, self.dv[i], self.dv[j], self.d2v[i], self.d2v[j]);
        let dtheta = hermite(s, h, self.dtheta[i], self.dtheta[j], self.d2theta[i], self.d2theta[j]);
        let d2v = hermite_slope(s, h, self.dv[i], self.dv[j], self.d2v[i], self.d2v[j]);
        let d2theta = hermite_slope(s, h, self.dtheta[i], self.dtheta[j], self.d2theta[i], self.d2theta[j]);
        let sg = self.sigma;
        ShockSample {
            v,
            u: self.left.u - sg * (v - self.left.v),
            theta,
            dv,
            du: -sg * dv,
            dtheta,
            d2v,
            d2u: -sg * d2v,
            d2theta,
        }
    }

    /// Largest `|xi|` at which the profile still deviates from its end state
    /// by more than `tol` in any component.
    pub fn extent(&self, tol: f64) -> f64 {
        if self.is_trivial() {
            return 0.0;
        }
        let dev = |i: usize, s: &PrimState| {
            (self.v[i] - s.v)
                .abs()
                .max((self.u[i] - s.u).abs())
                .max((self.theta[i] - s.theta).abs())
        };
        let n = self.v.len();
        let first = (0..n).find(|&i| dev(i, &self.left) > tol).unwrap_or(0);
        let last = (0..n).rev().find(|&i| dev(i, &self.right) > tol).unwrap_or(n - 1);
        self.axis.at(first).abs().max(self.axis.at(last).abs())
    }

    /// Residuals of the integrated momentum and energy relations at each sample.
    pub fn first_integral_residual(&self) -> f64 {
        let g = &self.gas;
        let (r, s) = (&self.right, self.sigma);
        let p_r = g.p(r.v, r.theta);
        let e_r = g.cv() * r.theta + 0.5 * r.u * r.u;
        let mut worst = 0.0f64;
        for i in 0..self.v.len() {
            let (v, u, th) = (self.v[i], self.u[i], self.theta[i]);
            let p = g.p(v, th);
            let mom = g.mu * self.du[i] / v - (-s * (u - r.u) + (p - p_r));
            let e = g.cv() * th + 0.5 * u * u;
            let en = g.kappa * self.dtheta[i] / v + g.mu * u * self.du[i] / v - (-s * (e - e_r) + (p * u - p_r * r.u));
            worst = worst.max(mom.abs()).max(en.abs());
        }
        worst
    }
}

/// `sigma^* alpha^* mu R gamma / (mu R gamma + kappa (gamma-1)^2)` at `state`.
pub fn sharp_diffusion_limit(gas: &GasParams, state: &PrimState) -> f64 {
    let g = gas.gamma;
    let p = gas.p(state.v, state.theta);
    let sigma_alpha = g * (g + 1.0) * p / (2.0 * state.v * state.v);
    let num = gas.mu * gas.r * g;
    sigma_alpha * num / (num + gas.kappa * (g - 1.0).powi(2))
}

/// Summary of the scaling estimates satisfied by a shock profile.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ShockLemmaReport {
    pub delta_s: f64,
    /// `sup |u_xi + sigma^* v_xi| / sup |v_xi|`.
    pub ratio_u: f64,
    /// `sup |theta_xi + (gamma-1) p^*/R v_xi| / sup |v_xi|`.
    pub ratio_theta: f64,
    /// Fitted `c` in `|v - v^*| ~ exp(c delta_S xi)` for `xi -> -inf`.
    pub tail_rate_left: f64,
    /// Fitted `c` in `|v - v_+| ~ exp(-c delta_S xi)` for `xi -> +inf`.
    pub tail_rate_right: f64,
    /// `sup |v_xixi| / (delta_S sup |v_xi|)`.
    pub second_derivative_ratio: f64,
    /// `|sigma - sigma^*| / delta_S`.
    pub sigma_gap: f64,
    /// `sup |v_xi| / delta_S^2`.
    pub slope_scale: f64,
}

impl ShockLemmaReport {
    pub fn all_finite(&self) -> bool {
        [
            self.ratio_u,
            self.ratio_theta,
            self.tail_rate_left,
            self.tail_rate_right,
            self.second_derivative_ratio,
            self.sigma_gap,
            self.slope_scale,
        ]
        .iter()
        .all(|x| x.is_finite())
    }
}

pub fn check_shock_lemma(profile: &ShockProfile) -> ShockLemmaReport {
    let d = profile.delta_s;
    if profile.is_trivial() {
        return ShockLemmaReport {
            delta_s: 0.0,
            ratio_u: 0.0,
            ratio_theta: 0.0,
            tail_rate_left: 0.0,
            tail_rate_right: 0.0,
            second_derivative_ratio: 0.0,
            sigma_gap: 0.0,
            slope_scale: 0.0,
        };
    }
    let g = &profile.gas;
    let l = &profile.left;
    let p_star = g.p(l.v, l.theta);
    let sigma_star = g.sound_speed(l.v, l.theta);
    let k_theta = (g.gamma - 1.0) * p_star / g.r;
    let sup = |f: &dyn Fn(usize) -> f64| (0..profile.v.len()).fold(0.0f64, |m, i| m.max(f(i).abs()));
    let sup_dv = sup(&|i| profile.dv[i]);
    let ratio_u = sup(&|i| profile.du[i] + sigma_star * profile.dv[i]) / sup_dv;
    let ratio_theta = sup(&|i| profile.dtheta[i] + k_theta * profile.dv[i]) / sup_dv;
    let sup_d2v = sup(&|i| profile.d2v[i]);

    let fit_tail = |target: f64, sign: f64| {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for i in 0..profile.v.len() {
            let xi = profile.axis.at(i);
            let dev = (profile.v[i] - target).abs();
            if sign * xi > 0.0 && dev > 1e-9 * d && dev < 1e-4 * d {
                xs.push(xi);
                ys.push(dev.ln());
            }
        }
        if xs.len() < 2 {
            return f64::NAN;
        }
        -sign * fit_slope(&xs, &ys) / d
    };

    ShockLemmaReport {
        delta_s: d,
        ratio_u,
        ratio_theta,
        tail_rate_left: fit_tail(l.v, -1.0),
        tail_rate_right: fit_tail(profile.right.v, 1.0),
        second_derivative_ratio: sup_d2v / (d * sup_dv),
        sigma_gap: (profile.sigma - sigma_star).abs() / d,
        slope_scale: sup_dv / (d * d),
    }
}

/// Chord-difference statistics for one shock strength.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SharpDiffusionRow {
    pub delta_s: f64,
    /// Chord difference over `delta_S` at the midpoint `xi = 0`.
    pub chord_mid: f64,
    /// `sup |chord / delta_S - limit| / limit` over interior samples.
    pub max_rel_error: f64,
    /// `sup |chord - limit (v_+ - v^*)| / delta_S^2`.
    pub scaled_defect: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SharpDiffusionReport {
    pub limit: f64,
    pub rows: Vec<SharpDiffusionRow>,
    /// Relative error strictly decreasing along the (decreasing) strength list.
    pub error_decreasing: bool,
}

/// Chord difference `(p-p_+)/(v-v_+) - (p-p^*)/(v-v^*)` along a profile,
/// sampled where `v` stays `1e-4 delta_S` away from both end volumes.
pub fn chord_differences(profile: &ShockProfile) -> Vec<(f64, f64)> {
    let g = &profile.gas;
    let (l, r) = (&profile.left, &profile.right);
    let (pl, pr) = (g.p(l.v, l.theta), g.p(r.v, r.theta));
    let floor = 1e-4 * profile.delta_s;
    (0..profile.v.len())
        .filter_map(|i| {
            let v = profile.v[i];
            if (v - l.v).min(r.v - v) < floor {
                return None;
            }
            let p = g.p(v, profile.theta[i]);
            Some((profile.axis.at(i), (p - pr) / (v - r.v) - (p - pl) / (v - l.v)))
        })
        .collect()
}

pub fn check_sharp_diffusion(gas: &GasParams, plus: &PrimState, deltas: &[f64]) -> Result<SharpDiffusionReport> {
    let limit = sharp_diffusion_limit(gas, plus);
    let mut rows = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let (left, sigma) = gas.shock3_curve(plus, plus.v - d)?;
        let prof = solve_shock_profile(gas, &left, plus, sigma, ShockSolveOptions::default())?;
        let chords = chord_differences(&prof);
        let mid = prof.eval(0.0);
        let p = gas.p(mid.v, mid.theta);
        let (pl, pr) = (gas.p(left.v, left.theta), gas.p(plus.v, plus.theta));
        let chord_mid = ((p - pr) / (mid.v - plus.v) - (p - pl) / (mid.v - left.v)) / d;
        let max_rel_error = chords
            .iter()
            .fold(0.0f64, |m, &(_, c)| m.max((c / d - limit).abs() / limit));
        let scaled_defect = chords.iter().fold(0.0f64, |m, &(_, c)| m.max((c - limit * d).abs())) / (d * d);
        rows.push(SharpDiffusionRow {
            delta_s: d,
            chord_mid,
            max_rel_error,
            scaled_defect,
        });
    }
    let error_decreasing = rows.windows(2).all(|w| w[1].max_rel_error < w[0].max_rel_error);
    Ok(SharpDiffusionReport {
        limit,
        rows,
        error_decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn baseline(delta: f64) -> ShockProfile {
        let g = GasParams::baseline();
        let plus = PrimState::new(1.0, 0.0, 1.0);
        let (left, sigma) = g.shock3_curve(&plus, 1.0 - delta).unwrap();
        solve_shock_profile(&g, &left, &plus, sigma, ShockSolveOptions::default()).unwrap()
    }

    #[test]
    fn left_state_is_saddle_and_right_state_is_node() {
        let g = GasParams::baseline();
        let plus = PrimState::new(1.0, 0.0, 1.0);
        let (left, sigma) = g.shock3_curve(&plus, 0.8).unwrap();
        let ode = ShockOde { gas: g, plus, sigma };
        let [a, b] = eigen2(ode.jacobian(left.v, left.theta)).unwrap();
        assert!(a < 0.0 && b > 0.0);
        let [c, d] = eigen2(ode.jacobian(plus.v, plus.theta)).unwrap();
        assert!(c < 0.0 && d < 0.0);
        let f = ode.rhs(left.v, left.theta);
        assert!(f[0].abs() < 1e-12 && f[1].abs() < 1e-12);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let g = GasParams::baseline();
        let plus = PrimState::new(1.0, 0.0, 1.0);
        let ode = ShockOde { gas: g, plus, sigma: 1.4 };
        let (v, th) = (0.93, 1.05);
        let j = ode.jacobian(v, th);
        let h = 1e-6;
        for c in 0..2 {
            let (dv, dt) = if c == 0 { (h, 0.0) } else { (0.0, h) };
            let fp = ode.rhs(v + dv, th + dt);
            let fm = ode.rhs(v - dv, th - dt);
            for r in 0..2 {
                assert!((j[r][c] - (fp[r] - fm[r]) / (2.0 * h)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn baseline_profile_shape() {
        let p = baseline(0.1);
        let s0 = p.eval(0.0);
        assert_relative_eq!(s0.v, 0.95, epsilon = 1e-12);
        assert_relative_eq!(s0.u, 0.069337, epsilon = 1e-6);
        assert!(p.v.windows(2).all(|w| w[1] >= w[0]));
        assert!(p.u.windows(2).all(|w| w[1] <= w[0]));
        assert!(p.theta.windows(2).all(|w| w[1] <= w[0]));
        assert!(p.left.max_dist(&PrimState::new(p.v[0], p.u[0], p.theta[0])) < 1e-8);
        let n = p.v.len() - 1;
        assert!(p.right.max_dist(&PrimState::new(p.v[n], p.u[n], p.theta[n])) < 1e-8);
        let far = p.eval(-1e6);
        assert_eq!((far.v, far.dv), (p.left.v, 0.0));
        assert_eq!(p.eval(1e6).theta, p.right.theta);
    }

    #[test]
    fn first_integrals_hold() {
        for d in [0.2, 0.05] {
            assert!(baseline(d).first_integral_residual() < 1e-8);
        }
    }

    #[test]
    fn interpolated_slope_matches_finite_difference() {
        let p = baseline(0.1);
        let h = p.axis.h;
        let mut worst = 0.0f64;
        for i in (1..p.v.len() - 2).step_by(37) {
            let xm = p.axis.at(i) + 0.5 * h;
            let fd = (p.v[i + 1] - p.v[i]) / h;
            worst = worst.max((p.eval(xm).dv - fd).abs());
        }
        let sup_d3 = 0.01 * 0.01; // crude bound on v''' for delta = 0.1
        assert!(worst < sup_d3 * h * h, "worst {worst}");
    }

    #[test]
    fn second_derivative_is_consistent() {
        let p = baseline(0.1);
        let dx = 1e-3;
        for xi in [-20.0, -3.0, 0.0, 4.5, 30.0] {
            let fd = (p.eval(xi + dx).dv - p.eval(xi - dx).dv) / (2.0 * dx);
            assert!((fd - p.eval(xi).d2v).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_strength_is_constant() {
        let g = GasParams::baseline();
        let plus = PrimState::new(1.0, 0.0, 1.0);
        let p = solve_shock_profile(&g, &plus, &plus, 1.29, ShockSolveOptions::default()).unwrap();
        assert!(p.is_trivial());
        assert_eq!(p.eval(0.3), ShockSample::constant(&plus));
        let r = check_shock_lemma(&p);
        assert_eq!(r.ratio_u, 0.0);
        assert_eq!(r.ratio_theta, 0.0);
    }

    #[test]
    fn bad_end_states_rejected() {
        let g = GasParams::baseline();
        let plus = PrimState::new(1.0, 0.0, 1.0);
        let (mut left, sigma) = g.shock3_curve(&plus, 0.9).unwrap();
        left.theta += 1e-3;
        let r = solve_shock_profile(&g, &left, &plus, sigma, ShockSolveOptions::default());
        assert!(matches!(r, Err(NsfError::Precondition(_))));
    }

    #[test]
    fn fixed_window_respected() {
        let g = GasParams::baseline();
        let plus = PrimState::new(1.0, 0.0, 1.0);
        let (left, sigma) = g.shock3_curve(&plus, 0.9).unwrap();
        let opts = ShockSolveOptions {
            xi_half_width: Some(400.0),
            n_samples: Some(8001),
        };
        let p = solve_shock_profile(&g, &left, &plus, sigma, opts).unwrap();
        assert_eq!(p.v.len(), 8001);
        assert_eq!(p.axis.x0, -400.0);
        let q = baseline(0.1);
        assert!((p.eval(1.3).v - q.eval(1.3).v).abs() < 1e-9);
    }

    #[test]
    fn lemma_report_is_sane() {
        let r = check_shock_lemma(&baseline(0.1));
        assert!(r.all_finite());
        assert!(r.tail_rate_left > 0.0 && r.tail_rate_right > 0.0);
        assert!(r.ratio_u < 1.0 && r.ratio_theta < 1.0);
    }

    #[test]
    fn sharp_limit_closed_form() {
        let l = sharp_diffusion_limit(&GasParams::baseline(), &PrimState::new(1.0, 0.0, 1.0));
        assert_relative_eq!(l, 20.0 / 9.0 * 15.0 / 19.0, epsilon = 1e-14);
        assert_relative_eq!(l, 1.754386, epsilon = 1e-6);
    }
}
