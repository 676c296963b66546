use crate::error::{NsfError, Result};
use crate::exec::Exec;
use crate::gas::GasParams;

use super::{Field, Grid, SolverConfig};

/// Semi-discrete right-hand side in the frame moving with speed `sigma`.
/// Boundary rows are zero.
pub fn rhs(gas: &GasParams, field: &Field, sigma: f64, grid: &Grid, out: &mut Field, exec: Exec) {
    let n = grid.n;
    let (v, u, th) = (&field.v[..], &field.u[..], &field.theta[..]);
    let (r, mu, kappa) = (gas.r, gas.mu, gas.kappa);
    let inv_cv = 1.0 / gas.cv();
    let h = grid.h;
    let (i2h, ih2) = (0.5 / h, 1.0 / (h * h));
    out.t = field.t;
    exec.fill3(&mut out.v, &mut out.u, &mut out.theta, |i| {
        if i == 0 || i + 1 == n {
            return (0.0, 0.0, 0.0);
        }
        let (vl, vc, vr) = (v[i - 1], v[i], v[i + 1]);
        let (ul, uc, ur) = (u[i - 1], u[i], u[i + 1]);
        let (tl, tc, tr) = (th[i - 1], th[i], th[i + 1]);
        let vx = (vr - vl) * i2h;
        let ux = (ur - ul) * i2h;
        let tx = (tr - tl) * i2h;
        let pc = r * tc / vc;
        let px = (r * tr / vr - r * tl / vl) * i2h;
        let (ivp, ivm) = (2.0 / (vc + vr), 2.0 / (vl + vc));
        let visc = mu * ((ur - uc) * ivp - (uc - ul) * ivm) * ih2;
        let heat = kappa * ((tr - tc) * ivp - (tc - tl) * ivm) * ih2;
        (
            sigma * vx + ux,
            sigma * ux - px + visc,
            sigma * tx + (-pc * ux + heat + mu * ux * ux / vc) * inv_cv,
        )
    });
}

/// First nonpositive or non-finite volume or temperature, scanning left to right.
pub fn check_positive(field: &Field) -> Result<()> {
    for i in 0..field.len() {
        for (what, x) in [("v", field.v[i]), ("theta", field.theta[i])] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(NsfError::Positivity {
                    t: field.t,
                    index: i,
                    what,
                    value: x,
                });
            }
        }
        if !field.u[i].is_finite() {
            return Err(NsfError::Positivity {
                t: field.t,
                index: i,
                what: "u",
                value: field.u[i],
            });
        }
    }
    Ok(())
}

/// `min(cfl_hyp h / (max lambda_3 + sigma), cfl_diff h^2 min v / max(mu, kappa/cv))`.
pub fn stable_dt(gas: &GasParams, field: &Field, sigma: f64, grid: &Grid, cfg: &SolverConfig) -> f64 {
    let (mut lam, mut vmin) = (0.0f64, f64::INFINITY);
    for i in 0..field.len() {
        let (v, th) = (field.v[i], field.theta[i]);
        lam = lam.max((gas.gamma * gas.r * th).sqrt() / v);
        vmin = vmin.min(v);
    }
    let h = grid.h;
    let nu = gas.mu.max(gas.kappa * (gas.gamma - 1.0) / gas.r);
    let hyp = cfg.cfl_hyp * h / (lam + sigma.abs());
    let diff = cfg.cfl_diff * h * h * vmin / nu;
    hyp.min(diff)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(0.0, 2.0 * std::f64::consts::PI, 401).unwrap()
    }

    #[test]
    fn constant_state_is_steady() {
        let g = grid();
        let gas = GasParams::baseline();
        let mut f = Field::zeros(g.n, 0.0);
        f.v.fill(1.3);
        f.u.fill(-0.2);
        f.theta.fill(0.7);
        let mut d = Field::zeros(g.n, 0.0);
        rhs(&gas, &f, 1.1, &g, &mut d, Exec::Parallel);
        assert!(d.v.iter().chain(&d.u).chain(&d.theta).all(|&x| x == 0.0));
    }

    fn manufactured(n: usize) -> f64 {
        // v = 1 + 0.1 sin, u = 0, theta = 1: the exact rhs by hand
        let g = Grid::new(0.0, 2.0 * std::f64::consts::PI, n).unwrap();
        let gas = GasParams::new(1.0, 1.4, 0.7, 1.3).unwrap();
        let sigma = 0.9;
        let mut f = Field::zeros(n, 0.0);
        for i in 0..n {
            f.v[i] = 1.0 + 0.1 * g.xi(i).sin();
            f.theta[i] = 1.0;
        }
        let mut d = Field::zeros(n, 0.0);
        rhs(&gas, &f, sigma, &g, &mut d, Exec::Sequential);
        let mut err = 0.0f64;
        for i in 1..n - 1 {
            let x = g.xi(i);
            let v = 1.0 + 0.1 * x.sin();
            let vx = 0.1 * x.cos();
            let ev = sigma * vx;
            let eu = gas.r * vx / (v * v);
            err = err.max((d.v[i] - ev).abs()).max((d.u[i] - eu).abs()).max(d.theta[i].abs());
        }
        err
    }

    #[test]
    fn manufactured_solution_second_order() {
        let (e1, e2) = (manufactured(101), manufactured(201));
        let order = (e1 / e2).log2();
        assert!((1.9..2.1).contains(&order), "order {order}");
    }

    #[test]
    fn positivity_reports_first_offender() {
        let mut f = Field::zeros(5, 2.0);
        f.v.fill(1.0);
        f.theta.fill(1.0);
        assert!(check_positive(&f).is_ok());
        f.theta[3] = -0.1;
        f.v[4] = 0.0;
        match check_positive(&f) {
            Err(NsfError::Positivity { t, index, what, .. }) => {
                assert_eq!((t, index, what), (2.0, 3, "theta"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dt_limits() {
        let g = Grid::new(0.0, 1.0, 101).unwrap();
        let gas = GasParams::baseline();
        let mut f = Field::zeros(g.n, 0.0);
        f.v.fill(1.0);
        f.theta.fill(1.0);
        let cfg = SolverConfig::default();
        let dt = stable_dt(&gas, &f, 1.0, &g, &cfg);
        let hyp = 0.4 * 0.01 / ((5.0f64 / 3.0).sqrt() + 1.0);
        assert!((dt - (0.4 * 1e-4f64).min(hyp)).abs() < 1e-15);
    }
}
