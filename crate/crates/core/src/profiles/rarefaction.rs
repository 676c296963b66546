//! Smooth approximate 1-rarefaction: the smooth Burgers solution at time `1+t`
//! mapped through `lambda_1 = w` on the common isentrope and 1-Riemann invariant.

use serde::Serialize;

use crate::error::{NsfError, Result};
use crate::gas::{GasParams, PrimState};
use crate::numerics::safeguarded_newton;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RarefactionWave {
    pub gas: GasParams,
    pub minus: PrimState,
    pub star: PrimState,
    pub w_minus: f64,
    pub w_star: f64,
    pub s_bar: f64,
    pub z_bar: f64,
    /// `p v^gamma` on the isentrope.
    pub k: f64,
}

/// Smooth Burgers solution with its space derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurgersSample {
    pub w: f64,
    pub wx: f64,
    pub wxx: f64,
    /// Foot of the characteristic through `(t, x)`.
    pub x0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RarefactionSample {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
    pub vx: f64,
    pub ux: f64,
    pub thetax: f64,
    pub uxx: f64,
    pub vt: f64,
    pub ut: f64,
    pub thetat: f64,
}

impl RarefactionSample {
    fn constant(s: &PrimState) -> Self {
        Self {
            v: s.v,
            u: s.u,
            theta: s.theta,
            ..Default::default()
        }
    }

    pub fn state(&self) -> PrimState {
        PrimState::new(self.v, self.u, self.theta)
    }
}

/// Solves `x = x0 + w0(x0) t` with `w0 = (w_*+w_-)/2 + (w_*-w_-)/2 tanh(x0)`.
pub fn burgers_smooth(w_minus: f64, w_star: f64, t: f64, x: f64) -> BurgersSample {
    let mid = 0.5 * (w_star + w_minus);
    let amp = 0.5 * (w_star - w_minus);
    if amp == 0.0 {
        return BurgersSample { w: mid, wx: 0.0, wxx: 0.0, x0: x - mid * t };
    }
    let w0 = |y: f64| mid + amp * y.tanh();
    let dw0 = |y: f64| {
        let c = y.cosh();
        amp / (c * c)
    };
    let wmax = w_minus.abs().max(w_star.abs());
    let (lo, hi) = (x - wmax * t - 1.0, x + wmax * t + 1.0);
    let g = |y: f64| (y + w0(y) * t - x, 1.0 + dw0(y) * t);
    // the map is strictly increasing, so the bracket always holds a unique root
    let x0 = safeguarded_newton(g, lo, hi, x - mid * t, 1e-13, 200).unwrap_or_else(|| bisect(g, lo, hi));
    let th = x0.tanh();
    let d1 = amp * (1.0 - th * th);
    let d2 = -2.0 * th * d1;
    let den = 1.0 + t * d1;
    BurgersSample {
        w: w0(x0),
        wx: d1 / den,
        wxx: d2 / (den * den * den),
        x0,
    }
}

fn bisect(g: impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid).0 < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl RarefactionWave {
    pub fn new(gas: &GasParams, minus: &PrimState, star: &PrimState) -> Result<Self> {
        minus.validate()?;
        star.validate()?;
        let s_bar = gas.entropy(star.v, star.theta)?;
        let s_m = gas.entropy(minus.v, minus.theta)?;
        let z_bar = gas.riemann_invariant_z1(star.v, star.u, s_bar)?;
        let z_m = gas.riemann_invariant_z1(minus.v, minus.u, s_bar)?;
        if (s_m - s_bar).abs() > 1e-10 || (z_m - z_bar).abs() > 1e-10 {
            return Err(NsfError::Precondition("minus and star are not on one 1-rarefaction curve".into()));
        }
        let w_minus = -gas.sound_speed(minus.v, minus.theta);
        let w_star = -gas.sound_speed(star.v, star.theta);
        if w_minus > w_star {
            return Err(NsfError::Precondition(format!(
                "1-rarefaction needs w_- <= w_*, got {w_minus} > {w_star}"
            )));
        }
        Ok(Self {
            gas: *gas,
            minus: *minus,
            star: *star,
            w_minus,
            w_star,
            s_bar,
            z_bar,
            k: gas.isentrope_constant(s_bar),
        })
    }

    pub fn delta_r(&self) -> f64 {
        (self.star.v - self.minus.v).abs()
    }

    pub fn is_trivial(&self) -> bool {
        self.w_minus == self.w_star
    }

    /// The state on the isentrope with `lambda_1 = w`.
    pub fn state_for_speed(&self, w: f64) -> PrimState {
        let g = &self.gas;
        let v = (g.gamma * self.k / (w * w)).powf(1.0 / (g.gamma + 1.0));
        let theta = self.k * v.powf(1.0 - g.gamma) / g.r;
        let f = 2.0 * (g.gamma * self.k).sqrt() / (g.gamma - 1.0) * v.powf(-(g.gamma - 1.0) / 2.0);
        PrimState::new(v, self.z_bar - f, theta)
    }

    /// Smooth approximate wave at time `t` (Burgers evaluated at `1+t`).
    pub fn approx(&self, t: f64, x: f64) -> RarefactionSample {
        if self.is_trivial() {
            return RarefactionSample::constant(&self.star);
        }
        // beyond these abscissae the characteristic foot has |x0| > 20 and tanh saturates
        let tau = 1.0 + t;
        if x > self.w_star * tau + 20.0 {
            return RarefactionSample::constant(&self.star);
        }
        if x < self.w_minus * tau - 20.0 {
            return RarefactionSample::constant(&self.minus);
        }
        let b = burgers_smooth(self.w_minus, self.w_star, tau, x);
        let s = self.state_for_speed(b.w);
        let gp1 = self.gas.gamma + 1.0;
        let ux = 2.0 * s.v * b.wx / gp1;
        let vx = -2.0 * s.v * b.wx / (gp1 * b.w);
        let wt = -b.w * b.wx;
        let vt = -2.0 * s.v * wt / (gp1 * b.w);
        RarefactionSample {
            v: s.v,
            u: s.u,
            theta: s.theta,
            vx,
            ux,
            thetax: -(self.gas.gamma - 1.0) * s.theta * vx / s.v,
            uxx: 2.0 * (vx * b.wx + s.v * b.wxx) / gp1,
            vt,
            ut: 2.0 * s.v * wt / gp1,
            thetat: -(self.gas.gamma - 1.0) * s.theta * vt / s.v,
        }
    }

    /// Self-similar inviscid fan.
    pub fn exact_fan(&self, t: f64, x: f64) -> Result<PrimState> {
        if !(t > 0.0) {
            return Err(NsfError::Domain { what: "t", value: t });
        }
        if x <= self.w_minus * t {
            return Ok(self.minus);
        }
        if x >= self.w_star * t {
            return Ok(self.star);
        }
        Ok(self.state_for_speed(x / t))
    }

    /// `sup_x |approx - fan|` over the grid `x0 + i h`, `i < n`.
    pub fn sup_gap_to_fan(&self, t: f64, x0: f64, h: f64, n: usize) -> Result<f64> {
        let mut worst = 0.0f64;
        for i in 0..n {
            let x = x0 + h * i as f64;
            worst = worst.max(self.approx(t, x).state().max_dist(&self.exact_fan(t, x)?));
        }
        Ok(worst)
    }

    /// `sup_x max(|v_x|, |u_x|, |theta_x|)` on a grid covering the wave at time `t`.
    pub fn sup_derivative(&self, t: f64) -> f64 {
        let tau = 1.0 + t;
        let (a, b) = (self.w_minus * tau - 12.0, self.w_star * tau + 12.0);
        let n = 20_000;
        let h = (b - a) / n as f64;
        (0..=n).fold(0.0f64, |m, i| {
            let s = self.approx(t, a + h * i as f64);
            m.max(s.vx.abs()).max(s.ux.abs()).max(s.thetax.abs())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::{ContactBranch, WaveStrengths};

    fn wave(delta_r: f64) -> RarefactionWave {
        let g = GasParams::baseline();
        let e = g
            .build_end_states(
                &PrimState::new(1.0, 0.0, 1.0),
                &WaveStrengths::new(delta_r, 0.1, 0.1),
                ContactBranch::default(),
            )
            .unwrap();
        RarefactionWave::new(&g, &e.minus, &e.star).unwrap()
    }

    #[test]
    fn burgers_examples() {
        assert!((burgers_smooth(-1.4, -1.2, 0.0, 0.0).w + 1.3).abs() < 1e-15);
        let b = burgers_smooth(-1.4, -1.2, 10.0, -13.0);
        assert!((-13.0 - b.x0 - b.w * 10.0).abs() < 1e-12);
        assert!((burgers_smooth(-1.4, -1.2, 5.0, -1e3).w + 1.4).abs() < 1e-14);
        assert!((burgers_smooth(-1.4, -1.2, 5.0, 1e3).w + 1.2).abs() < 1e-14);
    }

    #[test]
    fn burgers_derivatives_match_differences() {
        let (t, h) = (7.0, 1e-5);
        for x in [-12.0, -9.0, -8.0] {
            let b = burgers_smooth(-1.4, -1.2, t, x);
            let p = burgers_smooth(-1.4, -1.2, t, x + h);
            let m = burgers_smooth(-1.4, -1.2, t, x - h);
            assert!(((p.w - m.w) / (2.0 * h) - b.wx).abs() < 1e-8);
            assert!(((p.wx - m.wx) / (2.0 * h) - b.wxx).abs() < 1e-7);
            // w_t + w w_x = 0
            let tp = burgers_smooth(-1.4, -1.2, t + h, x).w;
            let tm = burgers_smooth(-1.4, -1.2, t - h, x).w;
            assert!(((tp - tm) / (2.0 * h) + b.w * b.wx).abs() < 1e-8);
        }
    }

    #[test]
    fn inversion_matches_newton() {
        let r = wave(0.1);
        let g = r.gas;
        for w in [r.w_minus, 0.5 * (r.w_minus + r.w_star), r.w_star] {
            let s = r.state_for_speed(w);
            assert!((g.lambda1(s.v, s.theta).unwrap() - w).abs() < 1e-12);
            // independent inversion: Newton on lambda_1(v, theta(v)) = w
            let th = |v: f64| r.k * v.powf(1.0 - g.gamma) / g.r;
            let f = |v: f64| {
                let h = 1e-7;
                let l = |v: f64| -g.sound_speed(v, th(v));
                (l(v) - w, (l(v + h) - l(v - h)) / (2.0 * h))
            };
            let v = safeguarded_newton(f, 0.3, 3.0, 1.0, 1e-14, 200).unwrap();
            assert!((v - s.v).abs() < 1e-10);
        }
    }

    #[test]
    fn limits_and_invariants() {
        let r = wave(0.1);
        let g = r.gas;
        assert!(r.approx(0.0, -60.0).state().max_dist(&r.minus) < 1e-12);
        assert!(r.approx(0.0, 60.0).state().max_dist(&r.star) < 1e-12);
        for t in [0.0, 3.0, 40.0] {
            for k in 0..50 {
                let x = -80.0 + 1.7 * k as f64;
                let s = r.approx(t, x);
                assert!((g.entropy(s.v, s.theta).unwrap() - r.s_bar).abs() < 1e-10);
                assert!((g.riemann_invariant_z1(s.v, s.u, r.s_bar).unwrap() - r.z_bar).abs() < 1e-10);
                assert!(s.ux >= 0.0 && s.vx >= 0.0 && s.thetax <= 0.0);
            }
        }
    }

    #[test]
    fn euler_equations_hold() {
        let r = wave(0.1);
        let g = r.gas;
        let (t, h) = (4.0, 1e-5);
        for x in [-9.0, -6.5, -5.0] {
            let s = r.approx(t, x);
            let px = (g.p(r.approx(t, x + h).v, r.approx(t, x + h).theta)
                - g.p(r.approx(t, x - h).v, r.approx(t, x - h).theta))
                / (2.0 * h);
            assert!((s.vt - s.ux).abs() < 1e-12);
            assert!((s.ut + px).abs() < 1e-8);
            assert!((g.cv() * s.thetat + g.p(s.v, s.theta) * s.ux).abs() < 1e-10);
            let ut = (r.approx(t + h, x).u - r.approx(t - h, x).u) / (2.0 * h);
            assert!((ut - s.ut).abs() < 1e-8);
        }
    }

    #[test]
    fn far_field_shortcut_is_seamless() {
        let r = wave(0.1);
        for t in [0.0, 9.0, 120.0] {
            let tau = 1.0 + t;
            for x in [r.w_star * tau + 20.0 + 1e-9, r.w_minus * tau - 20.0 - 1e-9] {
                let b = burgers_smooth(r.w_minus, r.w_star, tau, x);
                let s = r.state_for_speed(b.w);
                let a = r.approx(t, x);
                let d = a.state().max_dist(&s);
                assert!(d < 1e-14, "t {t} x {x} d {d:e}");
            }
        }
    }

    #[test]
    fn fan_edges() {
        let r = wave(0.1);
        let t = 5.0;
        assert_eq!(r.exact_fan(t, r.w_minus * t - 1.0).unwrap(), r.minus);
        assert!(r.exact_fan(t, r.w_star * t).unwrap().max_dist(&r.star) < 1e-14);
        assert!(r.exact_fan(0.0, 1.0).is_err());
    }

    #[test]
    fn gap_to_fan_decays() {
        let r = wave(0.1);
        let grid = |t: f64| (r.w_minus * t - 30.0, 0.01, ((r.w_star - r.w_minus) * t / 0.01) as usize + 6001);
        let (a, h, n) = grid(10.0);
        let g10 = r.sup_gap_to_fan(10.0, a, h, n).unwrap();
        let (a, h, n) = grid(100.0);
        let g100 = r.sup_gap_to_fan(100.0, a, h, n).unwrap();
        assert!(g100 < 0.5 * g10, "{g10} {g100}");
    }
}
