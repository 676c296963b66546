use nsfwave_core::ansatz::{AnsatzOptions, CompositeAnsatz};
use nsfwave_core::solver::{Grid, Perturbation, Simulation, SolverConfig};
use nsfwave_core::{Exec, GasParams, PrimState, WaveStrengths};

fn ansatz(d: WaveStrengths) -> CompositeAnsatz {
    CompositeAnsatz::build(&GasParams::baseline(), &PrimState::new(1.0, 0.0, 1.0), &d, AnsatzOptions::default()).unwrap()
}

fn short(t_end: f64) -> SolverConfig {
    SolverConfig {
        t_end,
        output_every: 0.5,
        ..Default::default()
    }
}

#[test]
fn sequential_and_parallel_runs_are_bitwise_equal() {
    let a = ansatz(WaveStrengths::new(0.1, 0.1, 0.1));
    let grid = Grid::auto_sized(&a, 2.0, 0.2).unwrap();
    let run = |exec| {
        let mut sim = Simulation::new(&a, grid, short(2.0), &Perturbation::default(), exec).unwrap();
        sim.run().unwrap();
        (sim.field, sim.shift.x, sim.records)
    };
    let (fs, xs, rs) = run(Exec::Sequential);
    let (fp, xp, rp) = run(Exec::Parallel);
    assert_eq!(fs.v, fp.v);
    assert_eq!(fs.u, fp.u);
    assert_eq!(fs.theta, fp.theta);
    assert_eq!(xs.to_bits(), xp.to_bits());
    assert_eq!(rs, rp);
}

fn sums(f: &nsfwave_core::solver::Field, h: f64) -> (f64, f64) {
    (f.v.iter().sum::<f64>() * h, f.u.iter().sum::<f64>() * h)
}

// across a quiet domain the boundary fluxes cancel by the jump conditions
#[test]
fn perturbed_shock_conserves_mass_and_momentum() {
    let a = ansatz(WaveStrengths::shock_only(0.1));
    let grid = Grid::auto_sized(&a, 5.0, 0.1).unwrap();
    let mut sim = Simulation::new(&a, grid, short(5.0), &Perturbation::default(), Exec::Parallel).unwrap();
    let (m0, p0) = sums(&sim.field, grid.h);
    sim.run().unwrap();
    let (m1, p1) = sums(&sim.field, grid.h);
    assert!((m1 - m0).abs() < 1e-8, "mass drift {}", m1 - m0);
    assert!((p1 - p0).abs() < 1e-8, "momentum drift {}", p1 - p0);
}

#[test]
fn steady_shock_drift_is_second_order() {
    let a = ansatz(WaveStrengths::shock_only(0.2));
    let drift = |h| {
        let grid = Grid::auto_sized(&a, 2.0, h).unwrap();
        let cfg = SolverConfig {
            source_budget: false,
            ..short(2.0)
        };
        let mut sim = Simulation::new(&a, grid, cfg, &Perturbation::zero(), Exec::Parallel).unwrap();
        let f0 = sim.field.clone();
        sim.run().unwrap();
        sim.field.max_dist(&f0)
    };
    let (d1, d2) = (drift(0.2), drift(0.1));
    let order = (d1 / d2).log2();
    assert!((1.8..=2.2).contains(&order), "drift {d1:e} -> {d2:e}");
}

#[test]
fn shift_stays_small_for_small_perturbation() {
    let a = ansatz(WaveStrengths::shock_only(0.1));
    let grid = Grid::auto_sized(&a, 5.0, 0.2).unwrap();
    let mut sim = Simulation::new(&a, grid, short(5.0), &Perturbation::default(), Exec::Parallel).unwrap();
    sim.run().unwrap();
    assert!(sim.shift.x.abs() < 0.5);
    assert!(sim.records.iter().all(|r| r.e_weighted >= 0.0 && r.e_plain >= 0.0));
}
