//! Independent references for the decoherence factor.
//!
//! * [`ode_f`] integrates the third-order linear ODE whose characteristic
//!   polynomial is the denominator of `F(p)`. [`OdeCoherence`] wraps it as a
//!   [`CoherenceSource`] for parameter sets where the mode expansion is
//!   degenerate.
//! * [`mc_f`] averages `e^{iΘ(t)}`, `Θ = ∫ξ`, over explicit telegraph
//!   trajectories in the memoryless limit.
//! * [`markov_limit_f`] is the closed form of that limit.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;

use crate::decoherence::CoherenceSource;
use crate::error::{Error, Result};
use crate::model::{NoiseParams, TimeGrid};
use crate::ode::{integrate, Tolerance};
use crate::C64;

/// Tolerance of the `F` ODE.
pub const ODE_F_TOL: Tolerance = Tolerance::new(1e-10, 1e-13);

/// `(F, F', F'')` at `t = 0`, read off the large-`p` expansion
/// `F(p) = 1/p + iaν/p² − ν²/p³ + …`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeInitialData {
    pub f: C64,
    pub df: C64,
    pub d2f: C64,
}

impl OdeInitialData {
    pub fn new(params: &NoiseParams) -> Self {
        Self {
            f: C64::new(1.0, 0.0),
            df: C64::new(0.0, params.a * params.nu),
            d2f: C64::new(-params.nu * params.nu, 0.0),
        }
    }

    fn state(&self) -> [f64; 6] {
        [self.f.re, self.f.im, self.df.re, self.df.im, self.d2f.re, self.d2f.im]
    }
}

/// `F''' = -κF'' - (2κλ + ν²)F' - κν² F`, split into real and imaginary
/// parts.
fn f_rhs(params: &NoiseParams) -> impl Fn(f64, &[f64; 6]) -> [f64; 6] {
    let k = params.kappa;
    let c1 = 2.0 * params.kappa * params.lambda + params.nu * params.nu;
    let c0 = params.kappa * params.nu * params.nu;
    move |_, y| {
        [
            y[2],
            y[3],
            y[4],
            y[5],
            -k * y[4] - c1 * y[2] - c0 * y[0],
            -k * y[5] - c1 * y[3] - c0 * y[1],
        ]
    }
}

fn finite_kappa(params: &NoiseParams) -> Result<()> {
    params.validate()?;
    if params.is_memoryless() {
        return Err(Error::Unsupported("the F ODE needs a finite kappa"));
    }
    Ok(())
}

/// `(F, F')` on `grid` from the third-order ODE.
pub fn ode_f_with_derivative(params: &NoiseParams, grid: &TimeGrid) -> Result<Vec<(C64, C64)>> {
    finite_kappa(params)?;
    let rhs = f_rhs(params);
    let mut y = OdeInitialData::new(params).state();
    let mut t = 0.0;
    let mut h = None;
    let mut out = Vec::with_capacity(grid.len());
    for &tk in grid.samples() {
        let (yk, hk) = integrate(&rhs, t, y, tk, ODE_F_TOL, h)?;
        if hk > 0.0 {
            h = Some(hk);
        }
        y = yk;
        t = tk;
        out.push((C64::new(y[0], y[1]), C64::new(y[2], y[3])));
    }
    Ok(out)
}

/// `F` on `grid` from the third-order ODE.
pub fn ode_f(params: &NoiseParams, grid: &TimeGrid) -> Result<Vec<C64>> {
    Ok(ode_f_with_derivative(params, grid)?.into_iter().map(|(f, _)| f).collect())
}

/// ODE-backed [`CoherenceSource`].
///
/// The state is stored at evenly spaced checkpoints on `[0, t_max]`; a
/// query integrates forward from the nearest checkpoint at or below `t`.
#[derive(Debug, Clone)]
pub struct OdeCoherence {
    params: NoiseParams,
    spacing: f64,
    checkpoints: Vec<[f64; 6]>,
}

const CHECKPOINTS: usize = 256;

impl OdeCoherence {
    pub fn new(params: NoiseParams, t_max: f64) -> Result<Self> {
        finite_kappa(&params)?;
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidParameter { field: "t_max", value: t_max, reason: "must be finite and > 0" });
        }
        let spacing = t_max / CHECKPOINTS as f64;
        let rhs = f_rhs(&params);
        let mut y = OdeInitialData::new(&params).state();
        let mut checkpoints = Vec::with_capacity(CHECKPOINTS + 1);
        checkpoints.push(y);
        let mut h = None;
        for k in 0..CHECKPOINTS {
            let (yk, hk) = integrate(&rhs, k as f64 * spacing, y, (k + 1) as f64 * spacing, ODE_F_TOL, h)?;
            h = Some(hk);
            y = yk;
            checkpoints.push(y);
        }
        Ok(Self { params, spacing, checkpoints })
    }
}

impl CoherenceSource for OdeCoherence {
    fn params(&self) -> NoiseParams {
        self.params
    }

    fn f_and_df(&self, t: f64) -> Result<(C64, C64)> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter { field: "t", value: t, reason: "must be finite and >= 0" });
        }
        let k = ((t / self.spacing).floor() as usize).min(self.checkpoints.len() - 1);
        let t0 = k as f64 * self.spacing;
        let (y, _) = integrate(f_rhs(&self.params), t0, self.checkpoints[k], t.max(t0), ODE_F_TOL, None)?;
        Ok((C64::new(y[0], y[1]), C64::new(y[2], y[3])))
    }
}

/// Memoryless-limit decoherence factor for any `a`:
/// `e^{-λt}[cosh Ωt + (λ + iaν) sinh(Ωt)/Ω]`, `Ω = √(λ² − ν²)`, continued
/// to `cos`/`sin` for `ν > λ` and to `1 + (λ + iaν)t` at `Ω = 0`.
pub fn markov_limit_f(params: &NoiseParams, t: f64) -> C64 {
    let lambda = params.lambda;
    let b = C64::new(lambda, params.a * params.nu);
    let w2 = lambda * lambda - params.nu * params.nu;
    let (even, odd) = if w2 > 0.0 {
        let w = w2.sqrt();
        let up = ((w - lambda) * t).exp();
        let down = (-(w + lambda) * t).exp();
        (0.5 * (up + down), 0.5 * (up - down) / w)
    } else if w2 < 0.0 {
        let w = (-w2).sqrt();
        let damp = (-lambda * t).exp();
        (damp * (w * t).cos(), damp * (w * t).sin() / w)
    } else {
        let damp = (-lambda * t).exp();
        (damp, damp * t)
    };
    b * odd + even
}

/// The real memoryless-limit factor for the equilibrium environment.
pub fn closed_form_markov_f(params: &NoiseParams, t: f64) -> Result<f64> {
    if params.a != 0.0 {
        return Err(Error::InvalidParameter {
            field: "a",
            value: params.a,
            reason: "the real closed form needs a = 0; use markov_limit_f",
        });
    }
    Ok(markov_limit_f(params, t).re)
}

/// Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_traj: usize,
    pub seed: u64,
    /// Largest allowed spacing of the output grid.
    pub dt: f64,
}

impl McConfig {
    /// `dt` is bounded by `0.01 / max(λ, ν)`.
    pub fn new(n_traj: usize, seed: u64, dt: f64, params: &NoiseParams) -> Result<Self> {
        let c = Self { n_traj, seed, dt };
        c.validate(params)?;
        Ok(c)
    }

    /// The largest admissible `dt` for `params`.
    pub fn max_dt(params: &NoiseParams) -> f64 {
        0.01 / params.lambda.max(params.nu)
    }

    pub fn validate(&self, params: &NoiseParams) -> Result<()> {
        if self.n_traj == 0 {
            return Err(Error::InvalidParameter { field: "n_traj", value: 0.0, reason: "must be >= 1" });
        }
        if !(self.dt > 0.0 && self.dt <= Self::max_dt(params) * (1.0 + 1e-12)) {
            return Err(Error::InvalidParameter {
                field: "dt",
                value: self.dt,
                reason: "must lie in (0, 0.01 / max(lambda, nu)]",
            });
        }
        Ok(())
    }
}

/// Ensemble mean of `e^{iΘ(t)}` with its standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub t: Vec<f64>,
    pub mean: Vec<C64>,
    /// Standard error of the complex mean, `√(Var Re + Var Im)/√n`.
    pub std_err: Vec<f64>,
    pub n_traj: usize,
}

/// Trajectories per work item. Fixed so the reduction order, and hence the
/// floating-point result, does not depend on the thread count.
const CHUNK: usize = 1024;

#[derive(Clone, Copy, Default)]
struct Moments {
    re: f64,
    im: f64,
    re2: f64,
    im2: f64,
}

/// Monte Carlo estimate of `F` in the memoryless limit.
///
/// Each trajectory starts at `ξ(0) = +ν` with probability `(1 + a)/2`,
/// flips sign after exponential waiting times of rate `λ`, and contributes
/// `e^{+iΘ(t)}`; with this sign `F'(0) = i⟨ξ(0)⟩ = iaν`. Phases are
/// integrated exactly between jumps. Trajectory `i` draws from stream `i`
/// of a ChaCha generator keyed by the master seed.
pub fn mc_f(params: &NoiseParams, mc: &McConfig, grid: &TimeGrid) -> Result<McEstimate> {
    params.validate()?;
    if !params.is_memoryless() {
        return Err(Error::Unsupported("Monte Carlo only covers the memoryless limit (kappa = inf)"));
    }
    mc.validate(params)?;
    let spacing = grid.samples().windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if spacing > mc.dt * (1.0 + 1e-9) {
        return Err(Error::InvalidParameter {
            field: "dt",
            value: spacing,
            reason: "output grid is coarser than the configured dt",
        });
    }

    let times = grid.samples();
    let n_chunks = mc.n_traj.div_ceil(CHUNK);
    let partials: Vec<Vec<Moments>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![Moments::default(); times.len()];
            let end = ((c + 1) * CHUNK).min(mc.n_traj);
            for i in c * CHUNK..end {
                run_trajectory(params, mc.seed, i as u64, times, &mut acc);
            }
            acc
        })
        .collect();

    let mut total = vec![Moments::default(); times.len()];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            t.re += p.re;
            t.im += p.im;
            t.re2 += p.re2;
            t.im2 += p.im2;
        }
    }

    let n = mc.n_traj as f64;
    let mut mean = Vec::with_capacity(times.len());
    let mut std_err = Vec::with_capacity(times.len());
    for m in &total {
        let mu = C64::new(m.re / n, m.im / n);
        let var = if mc.n_traj > 1 {
            ((m.re2 - n * mu.re * mu.re) + (m.im2 - n * mu.im * mu.im)).max(0.0) / (n - 1.0)
        } else {
            0.0
        };
        mean.push(mu);
        std_err.push((var / n).sqrt());
    }
    Ok(McEstimate { t: times.to_vec(), mean, std_err, n_traj: mc.n_traj })
}

fn run_trajectory(params: &NoiseParams, seed: u64, index: u64, times: &[f64], acc: &mut [Moments]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let p_up = 0.5 * (1.0 + params.a);
    let mut xi = if rng.random::<f64>() < p_up { params.nu } else { -params.nu };
    let waiting = (params.lambda > 0.0).then(|| Exp::new(params.lambda).expect("positive rate"));
    let draw = |rng: &mut ChaCha8Rng| waiting.as_ref().map_or(f64::INFINITY, |w| w.sample(rng));

    let mut t_last = 0.0;
    let mut theta = 0.0;
    let mut next_jump = draw(&mut rng);
    for (&t, m) in times.iter().zip(acc.iter_mut()) {
        while next_jump <= t {
            theta += xi * (next_jump - t_last);
            t_last = next_jump;
            xi = -xi;
            next_jump += draw(&mut rng);
        }
        let phase = theta + xi * (t - t_last);
        let (s, c) = phase.sin_cos();
        m.re += c;
        m.im += s;
        m.re2 += c * c;
        m.im2 += s * s;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoherence::decompose;
    use approx::assert_abs_diff_eq;

    fn params(nu: f64, lambda: f64, kappa: f64, a: f64) -> NoiseParams {
        NoiseParams::new(nu, lambda, kappa, a).unwrap()
    }

    #[test]
    fn initial_data() {
        let d = OdeInitialData::new(&params(2.0, 1.0, 1.0, 0.5));
        assert_eq!(d.f, C64::new(1.0, 0.0));
        assert_eq!(d.df, C64::new(0.0, 1.0));
        assert_eq!(d.d2f, C64::new(-4.0, 0.0));
    }

    #[test]
    fn ode_static_noise() {
        let p = params(2.0, 0.0, 1.0, 1.0);
        let grid = TimeGrid::uniform(10.0, 101).unwrap();
        for (t, f) in grid.samples().iter().zip(ode_f(&p, &grid).unwrap()) {
            assert!((f - C64::new(0.0, 2.0 * t).exp()).norm() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn ode_equilibrium_is_real() {
        let p = params(2.0, 1.0, 1.0, 0.0);
        let grid = TimeGrid::uniform(15.0, 151).unwrap();
        assert!(ode_f(&p, &grid).unwrap().iter().all(|f| f.im.abs() < 1e-9));
    }

    #[test]
    fn ode_matches_modes() {
        let p = params(2.0, 1.0, 1.0, 0.5);
        let modes = decompose(p).unwrap();
        let grid = TimeGrid::uniform(15.0, 301).unwrap();
        for (t, f) in grid.samples().iter().zip(ode_f(&p, &grid).unwrap()) {
            assert!((f - modes.evaluate_f(*t).unwrap()).norm() < 1e-8);
        }
    }

    #[test]
    fn ode_coherence_matches_modes_off_checkpoint() {
        let p = params(0.5, 1.0, 1.0, -0.5);
        let modes = decompose(p).unwrap();
        let ode = OdeCoherence::new(p, 15.0).unwrap();
        for t in [0.0, 0.0123, 3.3, 7.77, 14.999, 15.0] {
            let (f, df) = ode.f_and_df(t).unwrap();
            let (g, dg) = modes.f_and_df(t).unwrap();
            assert!((f - g).norm() < 1e-9 && (df - dg).norm() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn closed_form_values() {
        let p = params(0.5, 1.0, f64::INFINITY, 0.0);
        assert_eq!(closed_form_markov_f(&p, 0.0).unwrap(), 1.0);
        // nu = lambda: e^{-1} (1 + 1)
        let p = params(1.0, 1.0, f64::INFINITY, 0.0);
        assert_abs_diff_eq!(closed_form_markov_f(&p, 1.0).unwrap(), 2.0 * (-1.0f64).exp(), epsilon = 1e-15);
        assert!(closed_form_markov_f(&params(1.0, 1.0, 1.0, 0.3), 1.0).is_err());
    }

    #[test]
    fn closed_form_zeros_for_strong_noise() {
        // nu = 2 lambda: F vanishes where tan(wt) = -w/lambda, w = sqrt(3).
        let p = params(2.0, 1.0, f64::INFINITY, 0.0);
        let w = 3f64.sqrt();
        let t0 = (PI - w.atan()) / w;
        assert!(closed_form_markov_f(&p, t0).unwrap().abs() < 1e-15);
        assert!(closed_form_markov_f(&p, t0 - 0.01).unwrap() > 0.0);
        assert!(closed_form_markov_f(&p, t0 + 0.01).unwrap() < 0.0);
    }

    #[test]
    fn closed_form_is_continuous_across_critical_damping() {
        for t in [0.5, 2.0, 7.0] {
            let at = markov_limit_f(&params(1.0, 1.0, f64::INFINITY, 0.5), t);
            let below = markov_limit_f(&params(1.0 - 1e-7, 1.0, f64::INFINITY, 0.5), t);
            let above = markov_limit_f(&params(1.0 + 1e-7, 1.0, f64::INFINITY, 0.5), t);
            assert!((at - below).norm() < 1e-6 && (at - above).norm() < 1e-6);
        }
    }

    use std::f64::consts::PI;

    fn mc(n: usize, seed: u64, p: &NoiseParams) -> McConfig {
        McConfig::new(n, seed, McConfig::max_dt(p), p).unwrap()
    }

    #[test]
    fn mc_static_polarized_has_no_variance() {
        let p = params(2.0, 0.0, f64::INFINITY, 1.0);
        let grid = TimeGrid::uniform(5.0, 1001).unwrap();
        let est = mc_f(&p, &mc(50, 7, &p), &grid).unwrap();
        for ((t, m), se) in est.t.iter().zip(&est.mean).zip(&est.std_err) {
            assert!((m - C64::new(0.0, 2.0 * t).exp()).norm() < 1e-12);
            assert!(*se < 1e-7);
        }
    }

    #[test]
    fn mc_static_unpolarized_averages_to_cosine() {
        let p = params(2.0, 0.0, f64::INFINITY, 0.0);
        let grid = TimeGrid::uniform(3.0, 601).unwrap();
        let est = mc_f(&p, &mc(20_000, 11, &p), &grid).unwrap();
        for ((t, m), se) in est.t.iter().zip(&est.mean).zip(&est.std_err) {
            assert!((m - C64::new((2.0 * t).cos(), 0.0)).norm() < 4.0 * se + 1e-12, "t = {t}");
        }
    }

    #[test]
    fn mc_is_deterministic_across_thread_counts() {
        let p = params(0.5, 1.0, f64::INFINITY, 0.3);
        let grid = TimeGrid::uniform(2.0, 201).unwrap();
        let cfg = mc(3000, 99, &p);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| mc_f(&p, &cfg, &grid).unwrap());
        let b = four.install(|| mc_f(&p, &cfg, &grid).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn mc_rejects_finite_kappa_and_coarse_grids() {
        let p = params(0.5, 1.0, 1.0, 0.0);
        let cfg = McConfig { n_traj: 10, seed: 0, dt: 0.01 };
        let grid = TimeGrid::uniform(1.0, 101).unwrap();
        assert!(matches!(mc_f(&p, &cfg, &grid), Err(Error::Unsupported(_))));

        let p = params(2.0, 1.0, f64::INFINITY, 0.0);
        assert!(McConfig::new(10, 0, 0.01, &p).is_err());
        let cfg = McConfig::new(10, 0, 0.005, &p).unwrap();
        assert!(mc_f(&p, &cfg, &TimeGrid::uniform(1.0, 11).unwrap()).is_err());
        assert!(McConfig::new(0, 0, 0.005, &p).is_err());
    }
}
