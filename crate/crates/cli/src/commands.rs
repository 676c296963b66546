//! The four subcommands. Each writes its files under `out` and returns the
//! human log on stdout; failures map to exit codes in `main`.

use std::fs;
use std::path::Path;
use std::time::Instant;

use nsfwave_core::ansatz::{AnsatzOptions, CompositeAnsatz};
use nsfwave_core::checks::{run_checks, CheckOptions};
use nsfwave_core::io::{contact_table, diagnostics_table, rarefaction_table, shock_table, snapshot_table, CsvTable};
use nsfwave_core::profiles::contact::contact_decay_slopes;
use nsfwave_core::profiles::shock::check_shock_lemma;
use nsfwave_core::profiles::{solve_contact_profile, solve_shock_profile, RarefactionWave, ShockProfile};
use nsfwave_core::shift::m_constant_alt;
use nsfwave_core::solver::{Grid, Simulation};
use nsfwave_core::{EndStates, Exec, NsfError};
use serde_json::{json, Value};

use crate::config::RunConfig;

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Construction(String),
    Positivity(String),
    Boundary(String),
    Checks(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Construction(_) => 3,
            Failure::Positivity(_) => 4,
            Failure::Boundary(_) => 5,
            Failure::Checks(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Construction(m) | Failure::Positivity(m) | Failure::Boundary(m) | Failure::Checks(m) => m,
        }
    }
}

fn construction(e: impl ToString) -> Failure {
    Failure::Construction(e.to_string())
}

pub struct Ctx<'a> {
    pub cfg: &'a RunConfig,
    pub hash: String,
    pub out: &'a Path,
    pub exec: Exec,
}

impl Ctx<'_> {
    fn csv(&self, name: &str, table: CsvTable) -> Result<(), Failure> {
        let table = table.meta("config_hash", &self.hash);
        table.save(&self.out.join(name)).map_err(construction)?;
        println!("wrote {}", self.out.join(name).display());
        Ok(())
    }

    fn json(&self, name: &str, mut body: Value) -> Result<(), Failure> {
        body["config_hash"] = Value::String(self.hash.clone());
        let text = serde_json::to_string_pretty(&body).expect("json serializes");
        fs::write(self.out.join(name), text + "\n").map_err(construction)?;
        println!("wrote {}", self.out.join(name).display());
        Ok(())
    }

    fn ends(&self) -> Result<EndStates, Failure> {
        let c = self.cfg;
        c.gas
            .build_end_states(&c.plus_state, &c.strengths, c.contact_branch)
            .map_err(construction)
    }

    fn ansatz(&self) -> Result<CompositeAnsatz, Failure> {
        let c = self.cfg;
        let opts = AnsatzOptions {
            branch: c.contact_branch,
            contact_half_width: c.profile.contact_half_width,
            contact_n: c.profile.contact_points,
            ..Default::default()
        };
        CompositeAnsatz::build(&c.gas, &c.plus_state, &c.strengths, opts).map_err(construction)
    }
}

pub fn riemann(ctx: &Ctx) -> Result<(), Failure> {
    let g = &ctx.cfg.gas;
    let e = ctx.ends()?;
    let rh = g.rh_residual(&e.starstar, &e.plus, e.sigma).iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let (lam_l, lam_r) = (
        g.lambda3(e.starstar.v, e.starstar.theta).map_err(construction)?,
        g.lambda3(e.plus.v, e.plus.theta).map_err(construction)?,
    );
    let lax = e.strengths.delta_s == 0.0 || (lam_r < e.sigma && e.sigma < lam_l);
    println!("sigma = {:.12}  RH residual = {rh:.3e}  Lax: {lax}", e.sigma);
    for (name, s) in [("minus", e.minus), ("star", e.star), ("starstar", e.starstar), ("plus", e.plus)] {
        println!("{name:>9}: v = {:.12}  u = {:.12}  theta = {:.12}", s.v, s.u, s.theta);
    }
    ctx.json(
        "riemann.json",
        json!({
            "config": ctx.cfg,
            "end_states": e.to_record(),
            "rh_residual": rh,
            "lax": { "holds": lax, "lambda3_left": lam_l, "lambda3_right": lam_r },
        }),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    Shock,
    Contact,
    Rarefaction,
}

fn monotone(xs: &[f64], increasing: bool) -> bool {
    xs.windows(2).all(|w| if increasing { w[1] >= w[0] } else { w[1] <= w[0] })
}

pub fn profile(ctx: &Ctx, which: Which) -> Result<(), Failure> {
    let c = ctx.cfg;
    let e = ctx.ends()?;
    match which {
        Which::Shock => {
            let p = if e.strengths.delta_s > 0.0 {
                solve_shock_profile(&c.gas, &e.starstar, &e.plus, e.sigma, Default::default()).map_err(construction)?
            } else {
                ShockProfile::constant(&c.gas, &e.plus, e.sigma)
            };
            let mono = monotone(&p.v, true) && monotone(&p.u, false) && monotone(&p.theta, false);
            let fi = p.first_integral_residual();
            let lemma = check_shock_lemma(&p);
            let passed = mono && fi < 1e-8 && lemma.all_finite();
            println!("shock profile: {} samples, monotone {mono}, first-integral residual {fi:.3e}", p.v.len());
            ctx.csv("shock_profile.csv", shock_table(&p))?;
            ctx.json(
                "shock_report.json",
                json!({ "passed": passed, "monotone": mono, "first_integral_residual": fi, "scaling": lemma }),
            )
        }
        Which::Contact => {
            let (pr, n) = (&c.profile, c.profile.contact_points);
            let p = solve_contact_profile(&c.gas, e.star.theta, e.starstar.theta, e.p_star_cd, e.star.u, pr.contact_half_width, n)
                .map_err(construction)?;
            let times: Vec<f64> = (0..=9).map(|k| 5.0 * 10f64.powf(k as f64 / 9.0)).collect();
            let (s1, s2) = if p.is_trivial() { (f64::NAN, f64::NAN) } else { contact_decay_slopes(&p, &times) };
            let mono = monotone(&p.theta, e.starstar.theta >= e.star.theta);
            let passed = p.residual < 1e-8 && mono;
            println!("contact profile: residual {:.3e}, slopes Q1 {s1:.4} Q2 {s2:.4}", p.residual);
            ctx.csv("contact_profile.csv", contact_table(&p))?;
            ctx.json(
                "contact_report.json",
                json!({
                    "passed": passed,
                    "trivial": p.is_trivial(),
                    "monotone": mono,
                    "bvp_residual": p.residual,
                    "a_c": p.a_c,
                    "slope_q1": finite_or_null(s1),
                    "slope_q2": finite_or_null(s2),
                }),
            )
        }
        Which::Rarefaction => {
            let r = RarefactionWave::new(&c.gas, &e.minus, &e.star).map_err(construction)?;
            let times = &c.profile.rarefaction_times;
            let sups: Vec<f64> = times.iter().map(|&t| r.sup_derivative(t)).collect();
            let decreasing = sups.windows(2).all(|w| w[1] <= w[0]);
            let mut gaps = Vec::new();
            for &t in times.iter().filter(|&&t| t > 0.0) {
                let a = r.w_minus * t - 30.0;
                let n = ((r.w_star - r.w_minus) * t / 0.01) as usize + 6001;
                gaps.push(json!({ "t": t, "sup_gap_to_fan": r.sup_gap_to_fan(t, a, 0.01, n).map_err(construction)? }));
            }
            for (t, s) in times.iter().zip(&sups) {
                println!("rarefaction t = {t}: sup derivative {s:.6e}");
            }
            ctx.csv("rarefaction_profile.csv", rarefaction_table(&r, times, c.profile.rarefaction_points))?;
            ctx.json(
                "rarefaction_report.json",
                json!({
                    "passed": decreasing,
                    "delta_r": r.delta_r(),
                    "times": times,
                    "sup_derivative": sups,
                    "sup_derivative_decreasing": decreasing,
                    "fan_gap": gaps,
                }),
            )
        }
    }
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn simulate(ctx: &Ctx, gnuplot: bool) -> Result<(), Failure> {
    let c = ctx.cfg;
    let clock = Instant::now();
    let ansatz = ctx.ansatz()?;
    let grid = match (c.grid.xi_min, c.grid.xi_max) {
        (Some(a), Some(b)) => Grid::with_spacing(a, b, c.grid.h),
        _ => Grid::auto_sized(&ansatz, c.solver.t_end, c.grid.h),
    }
    .map_err(|e| Failure::Config(e.to_string()))?;
    println!("grid [{}, {}] with {} points, h = {}", grid.xi_min, grid.xi_max, grid.n, grid.h);
    let mut sim = Simulation::new(&ansatz, grid, c.solver.clone(), &c.perturbation, ctx.exec).map_err(|e| match e {
        NsfError::BoundaryContamination(m) => Failure::Boundary(format!("boundary precheck: {m}")),
        NsfError::Positivity { .. } => Failure::Positivity(format!("initial data: {e}")),
        other => construction(other),
    })?;
    let outcome = sim.run();
    ctx.csv("diagnostics.csv", diagnostics_table(&sim.records))?;
    if let Err(e) = outcome {
        return Err(match e {
            NsfError::Positivity { .. } => {
                ctx.csv("failure_snapshot.csv", snapshot_table(&sim.field, &ansatz, sim.shift.x, &grid, ctx.exec))?;
                Failure::Positivity(e.to_string())
            }
            NsfError::BoundaryContamination(m) => Failure::Boundary(m),
            other => construction(other),
        });
    }
    for s in &sim.snapshots {
        let name = format!("snapshot_t{}.csv", fmt_time(s.field.t));
        ctx.csv(&name, snapshot_table(&s.field, &ansatz, s.x, &grid, ctx.exec))?;
    }
    let last = sim.records.last().copied().unwrap_or_default();
    let report = sim.decay_report().ok();
    let flags = report.as_ref().map(|r| {
        json!({
            "sup_gap_ratio_le_0_2": r.sup_gap_ratio() <= 0.2,
            "xdot_ratio_le_0_1": r.xdot_ratio() <= 0.1,
            "x_over_t_le_0_05": r.x_over_t.abs() <= 0.05,
            "entropy_decreased": r.e_final < r.e_initial,
            "positivity_and_boundary": true,
        })
    });
    let wall = clock.elapsed().as_secs_f64();
    println!(
        "t = {}: {} steps, sup_gap {:.4e}, X {:.4e}, Xdot {:.4e}, E_weighted {:.4e}, {wall:.1} s",
        sim.field.t, sim.steps, last.sup_gap, last.x, last.xdot, last.e_weighted
    );
    if gnuplot {
        let script = format!(
            "# config_hash {}\nset datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\nset logscale y\n\
             plot 'diagnostics.csv' using 1:10 with lines, '' using 1:4 with lines, '' using 1:($3 < 0 ? -$3 : $3) with lines title '|Xdot|'\n",
            ctx.hash
        );
        fs::write(ctx.out.join("plot.gp"), script).map_err(construction)?;
        println!("wrote {}", ctx.out.join("plot.gp").display());
    }
    ctx.json(
        "summary.json",
        json!({
            "config": c,
            "end_states": ansatz.ends.to_record(),
            "grid": grid,
            "m": sim.m,
            "m_alt": m_constant_alt(&ansatz.gas, &ansatz.ends),
            "perturbation_h1_norm": sim.h1_norm,
            "steps": sim.steps,
            "max_boundary_defect": sim.max_boundary,
            "final": last,
            "entropy_report": report,
            "flags": flags,
            "wall_clock_s": wall,
        }),
    )
}

fn fmt_time(t: f64) -> String {
    let s = format!("{t:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

pub fn check(ctx: &Ctx) -> Result<(), Failure> {
    let c = ctx.cfg;
    let opts = CheckOptions {
        seed: c.seed,
        gas: c.gas,
        plus: c.plus_state,
        reversed_poincare: c.reversed_poincare,
    };
    let report = run_checks(&opts, ctx.exec).map_err(construction)?;
    for s in &report.suites {
        println!("{} {}: {}", if s.passed { "PASS" } else { "FAIL" }, s.name, s.summary);
    }
    ctx.json("check.json", json!({ "report": report }))?;
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.suites.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect();
        Err(Failure::Checks(format!("failed suites: {}", failed.join(", "))))
    }
}
