//! The `run`, `sweep`, `compare-oracles` and `reproduce` subcommands.

use crate::compute::compute;
use crate::config::{Axis, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{create_dir, fmt_real, write_file, write_series};
use rayon::prelude::*;
use rtn_geometry::dynamics::{evolve_analytic, evolve_ode};
use rtn_geometry::oracles::{markov_limit_f, mc_f, ode_f, McConfig};
use rtn_geometry::{CoherenceModel, NoiseParams, TimeGrid, C64};
use std::io::Write;
use std::path::Path;

/// Writes the time series to `out/run.csv`, or to stdout without `out`.
pub fn run(cfg: &RunConfig, out: Option<&Path>) -> Result<()> {
    let series = compute(cfg)?;
    match out {
        Some(dir) => {
            create_dir(dir)?;
            write_file(&dir.join("run.csv"), |w| write_series(w, cfg, &series))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_series(&mut lock, cfg, &series)
                .and_then(|_| lock.flush())
                .map_err(CliError::io("<stdout>"))
        }
    }
}

/// Final-time summary of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub file: String,
    pub t: f64,
    pub phi_e: f64,
    pub phi_e_u: f64,
    pub n: f64,
    pub l: f64,
}

/// Runs `base` once per value of `axis`, writing `<axis>=<value>.csv` and
/// `summary.csv` into `dir`.
pub fn sweep(base: &RunConfig, axis: Axis, values: &[f64], dir: &Path) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::Config("sweep values must be distinct".into()));
    }
    let configs = sorted
        .iter()
        .map(|&v| {
            let mut c = base.clone();
            c.set_axis(axis, v);
            c.validate()?;
            Ok((v, c))
        })
        .collect::<Result<Vec<_>>>()?;
    create_dir(dir)?;

    let points = configs
        .par_iter()
        .map(|(v, c)| {
            let series = compute(c)?;
            let file = format!("{}={v}.csv", axis.name());
            write_file(&dir.join(&file), |w| write_series(w, c, &series))?;
            let last = series.rows.last().expect("grid has samples");
            Ok(SweepPoint { value: *v, file, t: last.t, phi_e: last.phi_e, phi_e_u: last.phi_e_u, n: last.n, l: last.l })
        })
        .collect::<Vec<Result<SweepPoint>>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    write_file(&dir.join("summary.csv"), |w| {
        writeln!(w, "# rtngeo {} sweep over {}", env!("CARGO_PKG_VERSION"), axis.name())?;
        w.write_all(base.metadata().as_bytes())?;
        writeln!(w, "{},file,t,Phi_e,Phi_e_U,N,L", axis.name())?;
        for p in &points {
            let nums = [p.t, p.phi_e, p.phi_e_u, p.n, p.l].map(fmt_real).join(",");
            writeln!(w, "{},{},{nums}", fmt_real(p.value), p.file)?;
        }
        Ok(())
    })?;
    Ok(points)
}

/// One line of the oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub quantity: &'static str,
    pub max_dev: f64,
    /// What is held against `limit`: the deviation itself, or for Monte
    /// Carlo the deviation in units of the standard error.
    pub score: f64,
    pub limit: f64,
    pub note: String,
}

impl Comparison {
    pub fn pass(&self) -> bool {
        self.score <= self.limit
    }

    fn absolute(quantity: &'static str, max_dev: f64, limit: f64, note: String) -> Self {
        Self { quantity, max_dev, score: max_dev, limit, note }
    }
}

/// Above this `κ/max(λ, ν)` the model is also checked against the
/// memoryless closed form.
pub const MEMORYLESS_RATIO: f64 = 1e5;

/// Compares the analytic route with the ODE oracle and, where applicable,
/// the memoryless closed form and the Monte Carlo average.
///
/// `fault` shifts the first residue before comparing, to check that a
/// corrupted decomposition is caught.
pub fn compare_oracles(cfg: &RunConfig, fault: Option<f64>) -> Result<Vec<Comparison>> {
    cfg.validate()?;
    let p = cfg.noise;
    let grid = cfg.grid()?;
    let mut out = Vec::new();
    let max_dev = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);

    if !p.kappa.is_finite() {
        if fault.is_some() {
            return Err(CliError::Config("fault injection needs a finite kappa".into()));
        }
        let dt = McConfig::max_dt(&p);
        let n = (cfg.t_max / dt).ceil() as usize + 1;
        let mc_grid = TimeGrid::uniform(cfg.t_max, n)?;
        let est = mc_f(&p, &McConfig::new(cfg.mc_traj, cfg.seed, dt, &p)?, &mc_grid)?;
        let (mut dev, mut z, mut se_max) = (0.0f64, 0.0f64, 0.0f64);
        for ((t, mean), se) in est.t.iter().zip(&est.mean).zip(&est.std_err) {
            let d = (mean - markov_limit_f(&p, *t)).norm();
            dev = dev.max(d);
            se_max = se_max.max(*se);
            z = z.max(if *se > 0.0 { d / se } else if d > 1e-12 { f64::INFINITY } else { 0.0 });
        }
        out.push(Comparison {
            quantity: "F monte-carlo-vs-memoryless",
            max_dev: dev,
            score: z,
            limit: 3.0,
            note: format!("{} trajectories, max standard error {se_max:.3e}, score in standard errors", est.n_traj),
        });
        return Ok(out);
    }

    let model = CoherenceModel::new(p, grid.t_max())?;
    let ode = ode_f(&p, &grid)?;
    match &model {
        CoherenceModel::Modes(m) => {
            let m = match fault {
                Some(d) => m.with_residue_fault(0, C64::new(d, 0.0)),
                None => m.clone(),
            };
            let analytic = grid.samples().iter().map(|&t| m.evaluate_f(t)).collect::<rtn_geometry::Result<Vec<_>>>()?;
            out.push(Comparison::absolute("F analytic-vs-ode", max_dev(&analytic, &ode), 1e-6, String::new()));
            let exact = evolve_analytic(&m, &cfg.system, &grid)?;
            let numeric = evolve_ode(&m, &cfg.system, &grid)?;
            let dev = exact
                .bloch()
                .zip(numeric.trajectory.bloch())
                .flat_map(|(x, y)| (0..3).map(move |i| (x.vector()[i] - y.vector()[i]).abs()))
                .fold(0.0, f64::max);
            out.push(Comparison::absolute(
                "bloch analytic-vs-ode",
                dev,
                1e-6,
                format!("{:?} route", numeric.route).to_lowercase(),
            ));
        }
        CoherenceModel::Ode(_) => {
            if fault.is_some() {
                return Err(CliError::Config("fault injection needs a nondegenerate mode decomposition".into()));
            }
            out.push(Comparison::absolute(
                "F analytic-vs-ode",
                0.0,
                1e-6,
                "modes degenerate; F is evaluated by the ODE route".into(),
            ));
        }
    }

    if p.kappa >= MEMORYLESS_RATIO * p.lambda.max(p.nu) {
        let limit = NoiseParams { kappa: f64::INFINITY, ..p };
        let closed: Vec<C64> = grid.samples().iter().map(|&t| markov_limit_f(&limit, t)).collect();
        let model_f = grid
            .samples()
            .iter()
            .map(|&t| rtn_geometry::CoherenceSource::f_and_df(&model, t).map(|(f, _)| f))
            .collect::<rtn_geometry::Result<Vec<_>>>()?;
        out.push(Comparison::absolute("F analytic-vs-memoryless", max_dev(&model_f, &closed), 1e-3, String::new()));
    }
    Ok(out)
}

pub fn print_comparisons<W: Write>(w: &mut W, rows: &[Comparison]) -> std::io::Result<()> {
    writeln!(w, "{:<30} {:>12} {:>12} {:>10}  result", "quantity", "max_dev", "score", "limit")?;
    for c in rows {
        writeln!(
            w,
            "{:<30} {:>12.3e} {:>12.3e} {:>10.1e}  {}{}",
            c.quantity,
            c.max_dev,
            c.score,
            c.limit,
            if c.pass() { "PASS" } else { "FAIL" },
            if c.note.is_empty() { String::new() } else { format!("  ({})", c.note) }
        )?;
    }
    Ok(())
}

/// Figure presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    Fig1a,
    Fig1b,
    Fig2a,
    Fig2b,
    Fig3,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1a => "fig1a",
            Figure::Fig1b => "fig1b",
            Figure::Fig2a => "fig2a",
            Figure::Fig2b => "fig2b",
            Figure::Fig3 => "fig3",
        }
    }

    /// Noise strengths (in units of λ) covered by the figure.
    pub fn nus(self) -> &'static [f64] {
        match self {
            Figure::Fig1a | Figure::Fig2a => &[0.5],
            Figure::Fig1b | Figure::Fig2b => &[2.0],
            Figure::Fig3 => &[0.5, 2.0],
        }
    }
}

pub const PRESET_A: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

/// Preset base: λ = κ = 1, ω₀ = 0, θ = π/2, t ∈ [0, 15] with 1501 samples.
/// Only the column selection is taken from `user`.
pub fn preset(user: &RunConfig, nu: f64) -> RunConfig {
    let mut cfg = RunConfig { columns: user.columns.clone(), ..RunConfig::default() };
    cfg.noise = NoiseParams { nu, lambda: 1.0, kappa: 1.0, a: 0.0 };
    cfg.system.omega0 = 0.0;
    cfg.system.theta = std::f64::consts::FRAC_PI_2;
    cfg.system.bloch0 = None;
    cfg.t_max = 15.0;
    cfg.n_samples = 1501;
    cfg
}

/// Writes one CSV per `a` value (and a summary) for each regime of the
/// figure. A single-regime figure writes to `out/<fig>/`, `fig3` to
/// `out/fig3/nu=<nu>/`.
pub fn reproduce(figure: Figure, user: &RunConfig, out: &Path) -> Result<Vec<SweepPoint>> {
    let root = out.join(figure.name());
    let mut all = Vec::new();
    for &nu in figure.nus() {
        let dir = if figure.nus().len() > 1 { root.join(format!("nu={nu}")) } else { root.clone() };
        all.extend(sweep(&preset(user, nu), Axis::A, &PRESET_A, &dir)?);
    }
    Ok(all)
}
