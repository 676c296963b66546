//! Ideal polytropic gas: thermodynamics, characteristic speeds, the 1-rarefaction,
//! 2-contact and 3-shock curves, and the four-state generic Riemann configuration.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, NsfError, Result};

/// Thermodynamic and transport constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParams {
    pub r: f64,
    pub gamma: f64,
    pub mu: f64,
    pub kappa: f64,
}

/// Primitive state: specific volume, velocity, temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimState {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
}

impl PrimState {
    pub const fn new(v: f64, u: f64, theta: f64) -> Self {
        Self { v, u, theta }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("v", self.v)?;
        require_positive("theta", self.theta)?;
        if !self.u.is_finite() {
            return Err(NsfError::Domain { what: "u", value: self.u });
        }
        Ok(())
    }

    /// Component-wise max distance.
    pub fn max_dist(&self, other: &PrimState) -> f64 {
        (self.v - other.v)
            .abs()
            .max((self.u - other.u).abs())
            .max((self.theta - other.theta).abs())
    }
}

/// Wave strengths measured as volume jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveStrengths {
    pub delta_r: f64,
    pub delta_c: f64,
    pub delta_s: f64,
    #[serde(default = "default_delta_max")]
    pub delta_max: f64,
}

fn default_delta_max() -> f64 {
    0.3
}

impl WaveStrengths {
    pub fn new(delta_r: f64, delta_c: f64, delta_s: f64) -> Self {
        Self {
            delta_r,
            delta_c,
            delta_s,
            delta_max: default_delta_max(),
        }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn shock_only(delta_s: f64) -> Self {
        Self::new(0.0, 0.0, delta_s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, d) in [
            ("delta_r", self.delta_r),
            ("delta_c", self.delta_c),
            ("delta_s", self.delta_s),
        ] {
            if !(d >= 0.0 && d <= self.delta_max) {
                return Err(NsfError::Precondition(format!(
                    "{name} = {d} outside [0, {}]",
                    self.delta_max
                )));
            }
        }
        Ok(())
    }
}

/// Which side of the 2-contact curve the intermediate state `star` sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactBranch {
    /// `v_* = v^* - delta_C` (colder left state).
    #[default]
    SmallerVolume,
    /// `v_* = v^* + delta_C`.
    LargerVolume,
}

/// The generic Riemann configuration `minus -R1- star -CD2- starstar -S3- plus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndStates {
    pub minus: PrimState,
    pub star: PrimState,
    pub starstar: PrimState,
    pub plus: PrimState,
    /// 3-shock speed.
    pub sigma: f64,
    /// Sound speed `sqrt(gamma p / v)` at `starstar`.
    pub sigma_star: f64,
    /// Common pressure across the contact.
    pub p_star_cd: f64,
    pub strengths: WaveStrengths,
}

/// Flat JSON form of [`EndStates`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndStatesRecord {
    pub v_minus: f64,
    pub u_minus: f64,
    pub theta_minus: f64,
    pub v_star: f64,
    pub u_star: f64,
    pub theta_star: f64,
    pub v_starstar: f64,
    pub u_starstar: f64,
    pub theta_starstar: f64,
    pub v_plus: f64,
    pub u_plus: f64,
    pub theta_plus: f64,
    pub sigma: f64,
    pub sigma_star: f64,
    pub p_star_cd: f64,
}

impl EndStates {
    pub fn to_record(&self) -> EndStatesRecord {
        let (m, s, ss, p) = (self.minus, self.star, self.starstar, self.plus);
        EndStatesRecord {
            v_minus: m.v,
            u_minus: m.u,
            theta_minus: m.theta,
            v_star: s.v,
            u_star: s.u,
            theta_star: s.theta,
            v_starstar: ss.v,
            u_starstar: ss.u,
            theta_starstar: ss.theta,
            v_plus: p.v,
            u_plus: p.u,
            theta_plus: p.theta,
            sigma: self.sigma,
            sigma_star: self.sigma_star,
            p_star_cd: self.p_star_cd,
        }
    }
}

impl Default for GasParams {
    fn default() -> Self {
        Self::baseline()
    }
}

impl GasParams {
    pub fn new(r: f64, gamma: f64, mu: f64, kappa: f64) -> Result<Self> {
        let g = Self { r, gamma, mu, kappa };
        g.validate()?;
        Ok(g)
    }

    /// Monatomic gas with unit constants: `gamma = 5/3`, `R = mu = kappa = 1`.
    pub fn baseline() -> Self {
        Self {
            r: 1.0,
            gamma: 5.0 / 3.0,
            mu: 1.0,
            kappa: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("R", self.r)?;
        require_positive("mu", self.mu)?;
        require_positive("kappa", self.kappa)?;
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return Err(NsfError::Domain {
                what: "gamma - 1",
                value: self.gamma - 1.0,
            });
        }
        Ok(())
    }

    /// `R / (gamma - 1)`, the specific heat at constant volume.
    #[inline]
    pub fn cv(&self) -> f64 {
        self.r / (self.gamma - 1.0)
    }

    /// Pressure without domain checks; for inner loops on validated fields.
    #[inline]
    pub fn p(&self, v: f64, theta: f64) -> f64 {
        self.r * theta / v
    }

    pub fn pressure(&self, v: f64, theta: f64) -> Result<f64> {
        check_vt(v, theta)?;
        Ok(self.p(v, theta))
    }

    /// Physical entropy with the free constant chosen so that `s(1, 1) = 0`.
    pub fn entropy(&self, v: f64, theta: f64) -> Result<f64> {
        check_vt(v, theta)?;
        Ok(self.cv() * (theta * v.powf(self.gamma - 1.0)).ln())
    }

    #[inline]
    pub fn sound_speed(&self, v: f64, theta: f64) -> f64 {
        (self.gamma * self.r * theta).sqrt() / v
    }

    pub fn lambda1(&self, v: f64, theta: f64) -> Result<f64> {
        check_vt(v, theta)?;
        Ok(-self.sound_speed(v, theta))
    }

    pub fn lambda3(&self, v: f64, theta: f64) -> Result<f64> {
        check_vt(v, theta)?;
        Ok(self.sound_speed(v, theta))
    }

    /// `K = p v^gamma` on the isentrope with entropy `s`.
    pub fn isentrope_constant(&self, s: f64) -> f64 {
        self.r * (s / self.cv()).exp()
    }

    /// Antiderivative of `lambda_1(s, .)` in `v` with zero integration constant.
    fn lambda1_antiderivative(&self, k: f64, v: f64) -> f64 {
        let g = self.gamma;
        2.0 * (g * k).sqrt() / (g - 1.0) * v.powf(-(g - 1.0) / 2.0)
    }

    /// 1-Riemann invariant `z_1 = u + int^v lambda_1(s, v') dv'` on the isentrope `s_bar`.
    pub fn riemann_invariant_z1(&self, v: f64, u: f64, s_bar: f64) -> Result<f64> {
        require_positive("v", v)?;
        let k = self.isentrope_constant(s_bar);
        Ok(u + self.lambda1_antiderivative(k, v))
    }

    /// State on the 1-rarefaction curve through `right` at volume `v < v_right`.
    pub fn rarefaction1_curve(&self, right: &PrimState, v: f64) -> Result<PrimState> {
        right.validate()?;
        require_positive("v", v)?;
        if v > right.v {
            return Err(NsfError::Precondition(format!(
                "1-rarefaction curve needs v <= v_R, got v = {v}, v_R = {}",
                right.v
            )));
        }
        let k = self.r * right.theta * right.v.powf(self.gamma - 1.0);
        let theta = right.theta * (right.v / v).powf(self.gamma - 1.0);
        let u = right.u - (self.lambda1_antiderivative(k, v) - self.lambda1_antiderivative(k, right.v));
        Ok(PrimState::new(v, u, theta))
    }

    /// State on the 2-contact curve through `right`: same velocity and pressure.
    pub fn contact2_curve(&self, right: &PrimState, v: f64) -> Result<PrimState> {
        right.validate()?;
        require_positive("v", v)?;
        let p = self.p(right.v, right.theta);
        Ok(PrimState::new(v, right.u, p * v / self.r))
    }

    /// Left state and speed of the admissible 3-shock with right state `right`
    /// and left volume `v < v_right`.
    pub fn shock3_curve(&self, right: &PrimState, v: f64) -> Result<(PrimState, f64)> {
        right.validate()?;
        require_positive("v", v)?;
        if v >= right.v {
            return Err(NsfError::NoAdmissibleShock(format!(
                "need v < v_R, got v = {v}, v_R = {}",
                right.v
            )));
        }
        let cv = self.cv();
        let p_r = self.p(right.v, right.theta);
        let jump = right.v - v;
        // Hugoniot locus: cv (theta_R - theta) + (p_R + R theta / v) jump / 2 = 0
        let coeff = cv - self.r * jump / (2.0 * v);
        if coeff <= 0.0 {
            return Err(NsfError::NoAdmissibleShock(format!(
                "v = {v} beyond the maximal compression {}",
                right.v * (self.gamma - 1.0) / (self.gamma + 1.0)
            )));
        }
        let theta = (cv * right.theta + 0.5 * p_r * jump) / coeff;
        let p = self.p(v, theta);
        let sigma = ((p - p_r) / jump).sqrt();
        let u = right.u + sigma * jump;
        Ok((PrimState::new(v, u, theta), sigma))
    }

    /// Left-hand sides of the three Rankine-Hugoniot relations (mass, momentum, energy).
    pub fn rh_residual(&self, left: &PrimState, right: &PrimState, sigma: f64) -> [f64; 3] {
        let (pl, pr) = (self.p(left.v, left.theta), self.p(right.v, right.theta));
        let el = self.cv() * left.theta + 0.5 * left.u * left.u;
        let er = self.cv() * right.theta + 0.5 * right.u * right.u;
        [
            -sigma * (right.v - left.v) - (right.u - left.u),
            -sigma * (right.u - left.u) + (pr - pl),
            -sigma * (er - el) + (pr * right.u - pl * left.u),
        ]
    }

    /// Walks the wave curves from `plus`: S3 by `delta_S`, CD2 by `delta_C`, R1 by `delta_R`.
    pub fn build_end_states(
        &self,
        plus: &PrimState,
        strengths: &WaveStrengths,
        branch: ContactBranch,
    ) -> Result<EndStates> {
        self.validate()?;
        plus.validate()?;
        strengths.validate()?;

        let (starstar, sigma) = if strengths.delta_s > 0.0 {
            self.shock3_curve(plus, plus.v - strengths.delta_s)?
        } else {
            (*plus, self.sound_speed(plus.v, plus.theta))
        };

        let v_star = match branch {
            ContactBranch::SmallerVolume => starstar.v - strengths.delta_c,
            ContactBranch::LargerVolume => starstar.v + strengths.delta_c,
        };
        require_positive("v_star", v_star)?;
        let star = self.contact2_curve(&starstar, v_star)?;

        let v_minus = star.v - strengths.delta_r;
        require_positive("v_minus", v_minus)?;
        let minus = self.rarefaction1_curve(&star, v_minus)?;

        let p_star_cd = self.p(starstar.v, starstar.theta);
        let ends = EndStates {
            minus,
            star,
            starstar,
            plus: *plus,
            sigma,
            sigma_star: self.sound_speed(starstar.v, starstar.theta),
            p_star_cd,
            strengths: *strengths,
        };
        self.check_end_states(&ends)?;
        Ok(ends)
    }

    /// Verifies the curve memberships and, for a genuine shock, the Lax condition.
    pub fn check_end_states(&self, e: &EndStates) -> Result<()> {
        if e.strengths.delta_s > 0.0 {
            let res = self.rh_residual(&e.starstar, &e.plus, e.sigma);
            let worst = res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
            if worst >= 1e-10 {
                return Err(NsfError::Precondition(format!("RH residual {worst:e}")));
            }
            let l_plus = self.sound_speed(e.plus.v, e.plus.theta);
            let l_ss = self.sound_speed(e.starstar.v, e.starstar.theta);
            if !(l_plus < e.sigma && e.sigma < l_ss) {
                return Err(NsfError::NoAdmissibleShock(format!(
                    "Lax condition fails: {l_plus} < {} < {l_ss}",
                    e.sigma
                )));
            }
        }
        let p_ss = self.p(e.starstar.v, e.starstar.theta);
        let p_s = self.p(e.star.v, e.star.theta);
        if e.star.u != e.starstar.u || (p_s - p_ss).abs() > 1e-13 * p_ss {
            return Err(NsfError::Precondition("star not on CD2(starstar)".into()));
        }
        let s_m = self.entropy(e.minus.v, e.minus.theta)?;
        let s_s = self.entropy(e.star.v, e.star.theta)?;
        let z_m = self.riemann_invariant_z1(e.minus.v, e.minus.u, s_s)?;
        let z_s = self.riemann_invariant_z1(e.star.v, e.star.u, s_s)?;
        if (s_m - s_s).abs() > 1e-12 || (z_m - z_s).abs() > 1e-12 {
            return Err(NsfError::Precondition("minus not on R1(star)".into()));
        }
        Ok(())
    }
}

fn check_vt(v: f64, theta: f64) -> Result<()> {
    require_positive("v", v)?;
    require_positive("theta", theta)
}
