use crate::ansatz::{ansatz_residual, CompositeAnsatz, ResidualNorms};
use crate::diagnostics::{entropy_decay_check, functionals_from, DiagnosticsRecord, EntropyDecayReport, GapFields};
use crate::error::{NsfError, Result};
use crate::exec::Exec;
use crate::shift::{m_constant, shift_rhs, shift_rhs_cached, shock_window, FrameCache, ShiftState, WeightFn};

use super::{check_positive, initial_data, pin_boundaries, rhs, stable_dt, Field, Grid, Perturbation, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub x: f64,
    pub field: Field,
}

/// One run: the field, the shift and everything recorded along the way.
/// After an error the field is the last accepted state.
pub struct Simulation<'a> {
    pub ansatz: &'a CompositeAnsatz,
    pub grid: Grid,
    pub config: SolverConfig,
    pub exec: Exec,
    pub field: Field,
    pub shift: ShiftState,
    pub weight: WeightFn<'a>,
    pub m: f64,
    pub h1_norm: f64,
    pub steps: usize,
    pub max_boundary: f64,
    pub records: Vec<DiagnosticsRecord>,
    pub source_rates: Vec<f64>,
    pub residuals: Vec<(f64, ResidualNorms)>,
    pub snapshots: Vec<Snapshot>,
    k: [Field; 4],
    stage: Field,
    half: FrameCache,
    full: FrameCache,
}

fn combine(out: &mut Field, base: &Field, terms: &[(&Field, f64)], exec: Exec) {
    exec.fill3(&mut out.v, &mut out.u, &mut out.theta, |i| {
        let (mut v, mut u, mut th) = (base.v[i], base.u[i], base.theta[i]);
        for (k, c) in terms {
            v += c * k.v[i];
            u += c * k.u[i];
            th += c * k.theta[i];
        }
        (v, u, th)
    });
}

impl<'a> Simulation<'a> {
    pub fn new(ansatz: &'a CompositeAnsatz, grid: Grid, config: SolverConfig, pert: &Perturbation, exec: Exec) -> Result<Self> {
        config.validate()?;
        let init = initial_data(ansatz, &grid, pert, exec)?;
        let weight = WeightFn::new(&ansatz.shock, config.lambda_weight);
        let m = m_constant(&ansatz.gas, &ansatz.ends);
        let n = grid.n;
        let mut sim = Self {
            ansatz,
            grid,
            config,
            exec,
            field: init.field,
            shift: ShiftState::default(),
            weight,
            m,
            h1_norm: init.h1_norm,
            steps: 0,
            max_boundary: 0.0,
            records: Vec::new(),
            source_rates: Vec::new(),
            residuals: Vec::new(),
            snapshots: Vec::new(),
            k: std::array::from_fn(|_| Field::zeros(n, 0.0)),
            stage: Field::zeros(n, 0.0),
            half: FrameCache::default(),
            full: FrameCache::default(),
        };
        sim.shift.xdot = sim.shift_rate(&sim.field, 0.0);
        sim.check_boundary()?;
        Ok(sim)
    }

    fn shift_rate(&self, field: &Field, x: f64) -> f64 {
        if !self.config.track_shift {
            return 0.0;
        }
        shift_rhs(&self.ansatz.gas, field, self.ansatz, &self.weight, self.m, x, &self.grid)
    }

    fn check_boundary(&mut self) -> Result<()> {
        let f = &self.field;
        let n = f.len();
        let (l, r) = (&self.ansatz.ends.minus, &self.ansatz.ends.plus);
        let dl = (f.v[1] - l.v).abs().max((f.u[1] - l.u).abs()).max((f.theta[1] - l.theta).abs());
        let dr = (f.v[n - 2] - r.v).abs().max((f.u[n - 2] - r.u).abs()).max((f.theta[n - 2] - r.theta).abs());
        self.max_boundary = self.max_boundary.max(dl).max(dr);
        if self.max_boundary > self.config.boundary_tol {
            return Err(NsfError::BoundaryContamination(format!(
                "|U - U_end| = {:.3e} next to the {} boundary at t = {}",
                dl.max(dr),
                if dl >= dr { "left" } else { "right" },
                f.t
            )));
        }
        Ok(())
    }

    /// The stability-limited step for the current field (or the fixed step).
    pub fn dt(&self) -> f64 {
        self.config
            .fixed_dt
            .unwrap_or_else(|| stable_dt(&self.ansatz.gas, &self.field, self.ansatz.sigma, &self.grid, &self.config))
    }

    /// One RK4 step of the field and the shift together.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        let gas = &self.ansatz.gas;
        let sigma = self.ansatz.sigma;
        let exec = self.exec;
        let (t0, x0) = (self.field.t, self.shift.x);
        let mut xd = [self.shift.xdot, 0.0, 0.0, 0.0];
        if self.config.track_shift && self.weight.delta_s > 0.0 {
            // the rarefaction and contact parts only depend on time: two stage times per step
            let win = shock_window(&self.grid, &self.ansatz.shock, x0);
            let pad = 8 + ((4.0 * dt * self.shift.xdot.abs()) / self.grid.h).ceil() as usize;
            let range = win.start.saturating_sub(pad)..(win.end + pad).min(self.grid.n);
            self.half = FrameCache::build(self.ansatz, t0 + 0.5 * dt, &self.grid, range.clone(), exec);
            self.full = FrameCache::build(self.ansatz, t0 + dt, &self.grid, range, exec);
        }
        let [k1, k2, k3, k4] = &mut self.k;
        rhs(gas, &self.field, sigma, &self.grid, k1, exec);
        for (s, c) in [(1usize, 0.5), (2, 0.5), (3, 1.0)] {
            let prev = match s {
                1 => &*k1,
                2 => &*k2,
                _ => &*k3,
            };
            combine(&mut self.stage, &self.field, &[(prev, c * dt)], exec);
            self.stage.t = t0 + c * dt;
            pin_boundaries(&mut self.stage, self.ansatz);
            check_positive(&self.stage)?;
            let xs = x0 + c * dt * xd[s - 1];
            xd[s] = if self.config.track_shift {
                let cache = if s == 3 { &self.full } else { &self.half };
                shift_rhs_cached(gas, &self.stage, self.ansatz, &self.weight, self.m, xs, &self.grid, Some(cache))
            } else {
                0.0
            };
            let out = match s {
                1 => &mut *k2,
                2 => &mut *k3,
                _ => &mut *k4,
            };
            rhs(gas, &self.stage, sigma, &self.grid, out, exec);
        }
        let w = dt / 6.0;
        combine(
            &mut self.stage,
            &self.field,
            &[(&*k1, w), (&*k2, 2.0 * w), (&*k3, 2.0 * w), (&*k4, w)],
            exec,
        );
        self.stage.t = t0 + dt;
        pin_boundaries(&mut self.stage, self.ansatz);
        check_positive(&self.stage)?;
        let x1 = x0 + w * (xd[0] + 2.0 * xd[1] + 2.0 * xd[2] + xd[3]);
        std::mem::swap(&mut self.field, &mut self.stage);
        self.shift.x = x1;
        self.shift.xdot = if self.config.track_shift {
            shift_rhs_cached(gas, &self.field, self.ansatz, &self.weight, self.m, x1, &self.grid, Some(&self.full))
        } else {
            0.0
        };
        self.steps += 1;
        self.check_boundary()
    }

    /// Steps until `field.t == t` exactly, shortening the last step.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        while self.field.t < t {
            let dt = self.dt();
            let rem = t - self.field.t;
            if rem <= dt * (1.0 + 1e-9) {
                self.step(rem)?;
                self.field.t = t;
            } else {
                self.step(dt)?;
            }
        }
        Ok(())
    }

    /// Diagnostics (and the source-term rate) at the current state.
    pub fn record(&mut self) {
        let gaps = GapFields::new(&self.field, self.ansatz, self.shift.x, &self.grid, self.exec);
        let rec = functionals_from(
            &self.ansatz.gas,
            &self.field,
            &gaps,
            self.ansatz,
            &self.weight,
            self.shift.x,
            self.shift.xdot,
            &self.grid,
        );
        let rate = if self.config.source_budget {
            let res = ansatz_residual(self.ansatz, self.field.t, self.shift.x, self.shift.xdot, &self.grid, self.exec);
            let tmin = gaps.bar.iter().fold(f64::INFINITY, |m, b| m.min(b.theta));
            let h = self.grid.h;
            self.residuals.push((self.field.t, res.norms));
            (1.0 + self.weight.lambda) * (res.norms.q1_l2 * gaps.l2_u(h) + res.norms.q2_l2 * gaps.l2_theta(h) / tmin)
        } else {
            0.0
        };
        self.shift.record(self.field.t);
        self.records.push(rec);
        self.source_rates.push(rate);
    }

    fn event_times(&self) -> Vec<(f64, bool, bool)> {
        let c = &self.config;
        let mut ev: Vec<(f64, bool, bool)> = Vec::new();
        let mut k = 1usize;
        loop {
            let t = (k as f64 * c.output_every).min(c.t_end);
            ev.push((t, true, false));
            if t >= c.t_end {
                break;
            }
            k += 1;
        }
        for &s in &c.snapshot_times {
            if s > 0.0 && s <= c.t_end {
                ev.push((s, false, true));
            }
        }
        ev.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, bool, bool)> = Vec::new();
        for e in ev {
            match merged.last_mut() {
                Some(last) if (e.0 - last.0).abs() <= 1e-12 * e.0.max(1.0) => {
                    last.1 |= e.1;
                    last.2 |= e.2;
                }
                _ => merged.push(e),
            }
        }
        merged
    }

    /// Runs to `t_end`, recording at every output time and snapshotting at the
    /// requested times (and at `t = 0` when 0 is requested).
    pub fn run(&mut self) -> Result<()> {
        if self.records.is_empty() {
            self.record();
            if self.config.snapshot_times.contains(&0.0) {
                self.snapshot();
            }
        }
        for (t, out, snap) in self.event_times() {
            if t <= self.field.t {
                continue;
            }
            self.advance_to(t)?;
            if out {
                self.record();
            }
            if snap {
                self.snapshot();
            }
        }
        Ok(())
    }

    pub fn snapshot(&mut self) {
        self.snapshots.push(Snapshot {
            x: self.shift.x,
            field: self.field.clone(),
        });
    }

    pub fn decay_report(&self) -> Result<EntropyDecayReport> {
        entropy_decay_check(&self.records, &self.source_rates)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::AnsatzOptions;
    use crate::gas::{GasParams, PrimState, WaveStrengths};

    fn ansatz(d: WaveStrengths) -> CompositeAnsatz {
        CompositeAnsatz::build(&GasParams::baseline(), &PrimState::new(1.0, 0.0, 1.0), &d, AnsatzOptions::default()).unwrap()
    }

    #[test]
    fn null_case_is_frozen() {
        let a = ansatz(WaveStrengths::zero());
        let g = Grid::with_spacing(-30.0, 30.0, 0.1).unwrap();
        let cfg = SolverConfig {
            t_end: 1.0,
            output_every: 0.25,
            ..Default::default()
        };
        let mut s = Simulation::new(&a, g, cfg, &Perturbation::zero(), Exec::Sequential).unwrap();
        let f0 = s.field.clone();
        for _ in 0..20 {
            let dt = s.dt();
            s.step(dt).unwrap();
            assert!(s.field.max_dist(&f0) <= 1e-12);
        }
        s.run().unwrap();
        assert_eq!(s.shift.x, 0.0);
        assert_eq!(s.records.len(), 5);
    }

    #[test]
    fn outputs_land_on_schedule() {
        let a = ansatz(WaveStrengths::shock_only(0.1));
        let g = Grid::auto_sized(&a, 1.0, 0.2).unwrap();
        let cfg = SolverConfig {
            t_end: 1.0,
            output_every: 0.3,
            snapshot_times: vec![0.0, 0.5],
            ..Default::default()
        };
        let mut s = Simulation::new(&a, g, cfg, &Perturbation::default(), Exec::Parallel).unwrap();
        s.run().unwrap();
        let ts: Vec<f64> = s.records.iter().map(|r| r.t).collect();
        assert_eq!(ts.len(), 5);
        for (t, e) in ts.iter().zip([0.0, 0.3, 0.6, 0.9, 1.0]) {
            assert!((t - e).abs() < 1e-12);
        }
        assert_eq!(s.snapshots.len(), 2);
        assert_eq!(s.snapshots[1].field.t, 0.5);
        assert_eq!(s.shift.history.len(), 5);
    }

    #[test]
    fn positivity_failure_keeps_last_state() {
        let a = ansatz(WaveStrengths::zero());
        let g = Grid::with_spacing(-10.0, 10.0, 0.1).unwrap();
        let cfg = SolverConfig {
            t_end: 1.0,
            fixed_dt: Some(0.5),
            ..Default::default()
        };
        let p = Perturbation {
            amplitude: [0.0, 0.5, 0.0],
            width: 0.3,
            ..Default::default()
        };
        let mut s = Simulation::new(&a, g, cfg, &p, Exec::Sequential).unwrap();
        let before = s.field.clone();
        let err = s.step(0.5).unwrap_err();
        assert!(matches!(err, NsfError::Positivity { .. }), "{err:?}");
        assert_eq!(s.field, before);
    }

    #[test]
    fn boundary_contamination_is_flagged() {
        let a = ansatz(WaveStrengths::zero());
        let g = Grid::with_spacing(-30.0, 30.0, 0.1).unwrap();
        let cfg = SolverConfig {
            t_end: 20.0,
            ..Default::default()
        };
        let mut s = Simulation::new(&a, g, cfg, &Perturbation::default(), Exec::Sequential).unwrap();
        assert!(matches!(s.run(), Err(NsfError::BoundaryContamination(_))));
    }
}
