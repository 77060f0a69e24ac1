//! Geometric phases of the dephased qubit.
//!
//! For a pure initial state `cos(θ/2)|e⟩ + sin(θ/2)|g⟩` the total phase
//! splits into the Pancharatnam phase `Φ_P = arg⟨Ψ(0)|Ψ(t)⟩` and the
//! effective phase `Φ_e = ∫(ω₀ − s) cos²θ₊ dτ`, where `|Ψ(t)⟩` is the
//! eigenvector of `ρ(t)` with the larger eigenvalue. Mixed initial states
//! use the interferometric sum over both eigenvectors.

use crate::decoherence::{sample, shift_and_rate, wrap_angle, CoherenceSample, CoherenceSource};
use crate::dynamics::{pure_state_mixing, spectral, BlochState, SpectralState, Trajectory};
use crate::error::{Error, Result};
use crate::model::{norm3, SystemConfig, TimeGrid, PURITY_TOL};
use crate::quad::adaptive_simpson;
use crate::C64;

/// Overlaps and weights below this are treated as zero; the phase is then
/// undefined.
pub const OVERLAP_TOL: f64 = 1e-12;

/// Absolute tolerance of the adaptive quadrature on each grid interval.
pub const PANEL_TOL: f64 = 1e-9;

/// Phases of a pure initial state at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBreakdown {
    pub t: f64,
    /// Principal value of `arg⟨Ψ(0)|Ψ(t)⟩`; `None` when the overlap vanishes.
    pub phi_p: Option<f64>,
    /// `phi_p` continued along the time series.
    pub phi_p_branch: Option<f64>,
    pub phi_e: f64,
    /// Effective phase without noise, `ω₀t cos²(θ/2)`.
    pub phi_e_u: f64,
    pub delta_phi_e: f64,
    /// `phi_p_branch + phi_e`.
    pub phi_g: Option<f64>,
    /// `phi_g` reduced to `(−π, π]`.
    pub phi_g_principal: Option<f64>,
}

/// Terms of the mixed-state phase `arg Σ± r± e^{i(φ± + ψ±)}` at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedPhaseTerms {
    pub t: f64,
    /// `|√(ε±(0) ε±(t)) ⟨Ψ±(0)|Ψ±(t)⟩|`.
    pub r_plus: f64,
    pub r_minus: f64,
    /// `arg⟨Ψ±(0)|Ψ±(t)⟩`, zero where the overlap vanishes.
    pub varphi_plus: f64,
    pub varphi_minus: f64,
    /// `∫(ω₀ − s)|C±e|² dτ`.
    pub psi_plus: f64,
    pub psi_minus: f64,
    /// Principal value of the total phase; `None` when the sum vanishes.
    pub phi_g: Option<f64>,
}

/// Effective phase on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectivePhase {
    pub values: Vec<f64>,
    /// Total width of neighbourhoods of zeros of `F` where the integrand
    /// diverged and was left out.
    pub excluded_width: f64,
}

fn require_pure(config: &SystemConfig) -> Result<f64> {
    config.validate()?;
    config
        .pure_theta()
        .ok_or(Error::Unsupported("pure-state phases need an initial polar angle"))
}

/// `⟨Ψ(0)|Ψ(t)⟩` for `|Ψ(t)⟩ = e^{−iΘ}cos θ₊|e⟩ + sin θ₊|g⟩`,
/// `e^{−iΘ} = e^{−iω₀t} F*/|F|`.
fn pure_overlap(theta: f64, omega0: f64, s: &CoherenceSample) -> Option<C64> {
    let (_, cos_tp, sin_tp) = pure_state_mixing(theta, s.abs_f);
    let (sh, ch) = (0.5 * theta).sin_cos();
    let excited = ch * cos_tp;
    let mut overlap = C64::new(sh * sin_tp, 0.0);
    if excited != 0.0 {
        if s.abs_f == 0.0 {
            return None;
        }
        overlap += excited * C64::from_polar(1.0, -omega0 * s.t) * s.f.conj() / s.abs_f;
    }
    (overlap.norm() >= OVERLAP_TOL).then_some(overlap)
}

/// Pancharatnam phase at one sample, `None` when the overlap vanishes.
pub fn pancharatnam_phase(config: &SystemConfig, sample: &CoherenceSample) -> Result<Option<f64>> {
    let theta = require_pure(config)?;
    Ok(pure_overlap(theta, config.omega0, sample).map(|o| o.arg()))
}

/// Accumulates `∫₀ᵗ g` at each grid time, one adaptive quadrature per
/// interval.
fn accumulate<G: FnMut(f64) -> f64>(mut g: G, grid: &TimeGrid) -> (Vec<f64>, f64) {
    let mut values = Vec::with_capacity(grid.len());
    let (mut acc, mut excluded, mut prev) = (0.0, 0.0, 0.0);
    for &t in grid.samples() {
        if t > prev {
            let q = adaptive_simpson(&mut g, prev, t, PANEL_TOL, (t - prev) * 1e-9);
            acc += q.value;
            excluded += q.excluded_width;
            prev = t;
        }
        values.push(acc);
    }
    (values, excluded)
}

/// `Φ_e(t) = ∫₀ᵗ (ω₀ − s) cos²θ₊ dτ` at every grid time.
pub fn effective_phase<S: CoherenceSource + ?Sized>(
    source: &S,
    config: &SystemConfig,
    grid: &TimeGrid,
) -> Result<EffectivePhase> {
    let theta = require_pure(config)?;
    let omega0 = config.omega0;
    let integrand = |tau: f64| match source.f_and_df(tau) {
        Ok((f, df)) => {
            let sr = shift_and_rate(f, df);
            let (_, c, _) = pure_state_mixing(theta, f.norm());
            (omega0 - sr.s) * c * c
        }
        Err(_) => f64::NAN,
    };
    let (values, excluded_width) = accumulate(integrand, grid);
    Ok(EffectivePhase { values, excluded_width })
}

/// All pure-state phases on a grid.
pub fn total_phase_pure<S: CoherenceSource + ?Sized>(
    source: &S,
    config: &SystemConfig,
    grid: &TimeGrid,
) -> Result<Vec<PhaseBreakdown>> {
    let theta = require_pure(config)?;
    let samples = sample(source, grid)?;
    let effective = effective_phase(source, config, grid)?;
    let weight_u = (0.5 * theta).cos().powi(2);

    let mut branch: Option<f64> = None;
    let out = samples
        .iter()
        .zip(effective.values)
        .map(|(s, phi_e)| {
            let phi_p = pure_overlap(theta, config.omega0, s).map(|o| o.arg());
            let phi_p_branch = phi_p.map(|p| {
                let b = match branch {
                    Some(prev) => prev + wrap_angle(p - prev),
                    None => p,
                };
                branch = Some(b);
                b
            });
            let phi_e_u = config.omega0 * s.t * weight_u;
            let phi_g = phi_p_branch.map(|p| p + phi_e);
            PhaseBreakdown {
                t: s.t,
                phi_p,
                phi_p_branch,
                phi_e,
                phi_e_u,
                delta_phi_e: phi_e - phi_e_u,
                phi_g,
                phi_g_principal: phi_g.map(wrap_angle),
            }
        })
        .collect();
    Ok(out)
}

fn overlap(a: &SpectralState, b: &SpectralState, plus: bool) -> C64 {
    if plus {
        a.c_plus_e.conj() * b.c_plus_e + a.c_plus_g.conj() * b.c_plus_g
    } else {
        a.c_minus_e.conj() * b.c_minus_e + a.c_minus_g.conj() * b.c_minus_g
    }
}

/// Mixed-state geometric phase along a trajectory produced from `config`.
///
/// Eigenvectors come from diagonalising the Bloch vector at each time, so
/// this route shares no formulas with [`total_phase_pure`]. An initial state
/// with `1 − |r(0)| < 10⁻¹²` is treated as pure (`ε₋(0) = 0`).
pub fn total_phase_mixed<S: CoherenceSource + ?Sized>(
    source: &S,
    config: &SystemConfig,
    trajectory: &Trajectory,
) -> Result<Vec<MixedPhaseTerms>> {
    config.validate()?;
    let omega0 = config.omega0;
    let r0 = config.initial_bloch();
    let z0 = C64::new(r0[0], r0[1]);
    let pure = 1.0 - norm3(r0) < PURITY_TOL;
    let mut initial = spectral(&BlochState::new(0.0, r0));
    if pure {
        initial.eps_plus = 1.0;
        initial.eps_minus = 0.0;
    }

    let weight = |tau: f64, plus: bool| -> f64 {
        let Ok((f, df)) = source.f_and_df(tau) else {
            return f64::NAN;
        };
        let z = z0 * C64::from_polar(1.0, omega0 * tau) * f;
        let sp = spectral(&BlochState::new(tau, [z.re, z.im, r0[2]]));
        let w = if plus { sp.weight_plus_e() } else { sp.weight_minus_e() };
        (omega0 - shift_and_rate(f, df).s) * w
    };
    let grid = TimeGrid::from_samples(trajectory.points.iter().map(|p| p.bloch.t).collect())?;
    let (psi_plus, _) = accumulate(|tau| weight(tau, true), &grid);
    let psi_minus = if pure { vec![0.0; grid.len()] } else { accumulate(|tau| weight(tau, false), &grid).0 };

    let out = trajectory
        .points
        .iter()
        .zip(psi_plus.iter().zip(&psi_minus))
        .map(|(p, (&psi_p, &psi_m))| {
            let sp = &p.spectral;
            let term = |plus: bool, psi: f64| -> (f64, f64, C64) {
                let (e0, et) = if plus { (initial.eps_plus, sp.eps_plus) } else { (initial.eps_minus, sp.eps_minus) };
                let o = overlap(&initial, sp, plus);
                let r = (e0 * et).sqrt() * o.norm();
                let varphi = if o.norm() >= OVERLAP_TOL { o.arg() } else { 0.0 };
                (r, varphi, C64::from_polar(r, varphi + psi))
            };
            let (r_plus, varphi_plus, zp) = term(true, psi_p);
            let (r_minus, varphi_minus, zm) = term(false, psi_m);
            let total = zp + zm;
            let defined = (r_plus >= OVERLAP_TOL || r_minus >= OVERLAP_TOL) && total.norm() >= OVERLAP_TOL;
            MixedPhaseTerms {
                t: p.bloch.t,
                r_plus,
                r_minus,
                varphi_plus,
                varphi_minus,
                psi_plus: psi_p,
                psi_minus: psi_m,
                phi_g: defined.then(|| total.arg()),
            }
        })
        .collect();
    Ok(out)
}
