//! Bloch-vector evolution, spectral decomposition of `ρ(t)` and path length.
//!
//! Pure dephasing leaves `r_z` untouched and multiplies the transverse part
//! `r_x + i r_y` by `e^{iω₀t} F(t)`. Equivalently the transverse part obeys
//!
//! ```text
//! dr_x/dt = -γ r_x - (ω₀ - s) r_y
//! dr_y/dt = (ω₀ - s) r_x - γ r_y
//! ```
//!
//! which [`evolve_ode`] integrates directly.

use crate::decoherence::{sample, CoherenceSample, CoherenceSource};
use crate::error::Result;
use crate::model::{norm3, SystemConfig, TimeGrid};
use crate::ode::{integrate, Tolerance};
use crate::oracles::ode_f_with_derivative;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub t: f64,
    pub r_x: f64,
    pub r_y: f64,
    pub r_z: f64,
}

impl BlochState {
    pub fn new(t: f64, r: [f64; 3]) -> Self {
        Self { t, r_x: r[0], r_y: r[1], r_z: r[2] }
    }

    pub fn vector(&self) -> [f64; 3] {
        [self.r_x, self.r_y, self.r_z]
    }

    pub fn norm(&self) -> f64 {
        norm3(self.vector())
    }

    /// `r_x + i r_y`, i.e. `2ρ_ge`.
    pub fn transverse(&self) -> C64 {
        C64::new(self.r_x, self.r_y)
    }

    pub fn purity(&self) -> f64 {
        0.5 * (1.0 + self.norm().powi(2))
    }
}

/// Eigen-decomposition of `ρ = ½(I + r·σ)` in the `{|e⟩, |g⟩}` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralState {
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub c_plus_e: C64,
    pub c_plus_g: C64,
    pub c_minus_e: C64,
    pub c_minus_g: C64,
    /// Mixing angle of the larger eigenvector, for runs that start from a
    /// pure `theta` state.
    pub theta_plus: Option<f64>,
}

impl SpectralState {
    /// `|C_{+e}|²`, the weight of `|e⟩` in the larger eigenvector.
    pub fn weight_plus_e(&self) -> f64 {
        self.c_plus_e.norm_sqr()
    }

    pub fn weight_minus_e(&self) -> f64 {
        self.c_minus_e.norm_sqr()
    }
}

/// Diagonalises `ρ` given its Bloch vector.
///
/// The eigenvector for `ε_± = ½(1 ± |r|)` is proportional to
/// `(r_x − i r_y, ±|r| − r_z)`. On the `z` axis that expression is `0/0`;
/// there the basis states are returned: `|e⟩` for the larger eigenvalue when
/// `r_z ≥ 0` (including `r = 0`), `|g⟩` when `r_z < 0`.
pub fn spectral(state: &BlochState) -> SpectralState {
    let r = state.norm();
    let eps_plus = 0.5 * (1.0 + r);
    let eps_minus = 1.0 - eps_plus;
    let perp2 = state.r_x * state.r_x + state.r_y * state.r_y;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);

    if perp2 == 0.0 {
        let (plus, minus) = if state.r_z >= 0.0 { ((one, zero), (zero, one)) } else { ((zero, one), (one, zero)) };
        return SpectralState {
            eps_plus,
            eps_minus,
            c_plus_e: plus.0,
            c_plus_g: plus.1,
            c_minus_e: minus.0,
            c_minus_g: minus.1,
            theta_plus: None,
        };
    }

    let rz = state.r_z;
    // ±|r| − r_z without cancellation
    let g_plus = if rz > 0.0 { perp2 / (r + rz) } else { r - rz };
    let g_minus = if rz < 0.0 { -perp2 / (r - rz) } else { -(r + rz) };
    let zc = C64::new(state.r_x, -state.r_y);
    let n_plus = (g_plus * g_plus + perp2).sqrt();
    let n_minus = (g_minus * g_minus + perp2).sqrt();
    SpectralState {
        eps_plus,
        eps_minus,
        c_plus_e: zc / n_plus,
        c_plus_g: C64::new(g_plus / n_plus, 0.0),
        c_minus_e: zc / n_minus,
        c_minus_g: C64::new(g_minus / n_minus, 0.0),
        theta_plus: None,
    }
}

/// Larger eigenvalue and mixing angle for the pure initial state
/// `cos(θ/2)|e⟩ + sin(θ/2)|g⟩` after dephasing with `|F|`:
/// `ε₊ = ½[1 + √(cos²θ + sin²θ|F|²)]`, and `(cos θ₊, sin θ₊)` the real
/// coefficients of the evolved state. Returns `(ε₊, cos θ₊, sin θ₊)`.
pub fn pure_state_mixing(theta: f64, abs_f: f64) -> (f64, f64, f64) {
    let (sin_t, cos_t) = theta.sin_cos();
    let perp = sin_t * abs_f;
    let r = (cos_t * cos_t + perp * perp).sqrt();
    let eps_plus = 0.5 * (1.0 + r);
    // 2ε₊ − 1 − cos θ, rewritten to avoid cancellation when cos θ > 0
    let g = if cos_t > 0.0 { perp * perp / (r + cos_t) } else { r - cos_t };
    let norm = (g * g + perp * perp).sqrt();
    if norm == 0.0 {
        return if cos_t >= 0.0 { (eps_plus, 1.0, 0.0) } else { (eps_plus, 0.0, 1.0) };
    }
    (eps_plus, perp / norm, g / norm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub bloch: BlochState,
    pub coherence: CoherenceSample,
    pub spectral: SpectralState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    /// Cumulative Euclidean arc length of the Bloch path.
    pub path_length: Vec<f64>,
}

impl Trajectory {
    fn assemble(config: &SystemConfig, coherence: Vec<CoherenceSample>, bloch: Vec<BlochState>) -> Self {
        let theta = config.pure_theta();
        let points: Vec<TrajectoryPoint> = coherence
            .into_iter()
            .zip(bloch)
            .map(|(c, b)| {
                let mut spectral = spectral(&b);
                if let Some(theta) = theta {
                    let (_, cos_tp, sin_tp) = pure_state_mixing(theta, c.abs_f);
                    spectral.theta_plus = Some(sin_tp.atan2(cos_tp));
                }
                TrajectoryPoint { bloch: b, coherence: c, spectral }
            })
            .collect();
        let states: Vec<BlochState> = points.iter().map(|p| p.bloch).collect();
        let path_length = path_length(&states);
        Self { points, path_length }
    }

    pub fn bloch(&self) -> impl Iterator<Item = &BlochState> {
        self.points.iter().map(|p| &p.bloch)
    }

    pub fn coherence(&self) -> Vec<CoherenceSample> {
        self.points.iter().map(|p| p.coherence).collect()
    }
}

/// Closed-form evolution: `r_x + i r_y = (r_x(0) + i r_y(0)) e^{iω₀t} F(t)`,
/// `r_z` constant.
pub fn evolve_analytic<S: CoherenceSource + ?Sized>(
    source: &S,
    config: &SystemConfig,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    config.validate()?;
    let coherence = sample(source, grid)?;
    let r0 = config.initial_bloch();
    let z0 = C64::new(r0[0], r0[1]);
    let bloch = coherence
        .iter()
        .map(|c| {
            let z = z0 * C64::from_polar(1.0, config.omega0 * c.t) * c.f;
            BlochState::new(c.t, [z.re, z.im, r0[2]])
        })
        .collect();
    Ok(Trajectory::assemble(config, coherence, bloch))
}

/// Tolerance of the Bloch-equation integration.
pub const BLOCH_TOL: Tolerance = Tolerance::new(1e-9, 1e-12);

/// Below this `|F|` on the grid, the Bloch equations have a near-singular
/// `F'/F` and the coherence itself is integrated instead.
pub const BLOCH_ROUTE_MIN_ABS_F: f64 = 1e-2;

/// Which equations [`evolve_ode`] integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeRoute {
    /// The Bloch equations with `s(t)`, `γ(t)` coefficients.
    Bloch,
    /// The third-order ODE for `F`, rotated by `e^{iω₀t}`.
    Coherence,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeEvolution {
    pub trajectory: Trajectory,
    pub route: OdeRoute,
}

/// Numerical evolution of the Bloch equations.
///
/// Falls back to integrating the coherence when `F` comes close to zero on
/// the grid or the Bloch integration fails.
pub fn evolve_ode<S: CoherenceSource + ?Sized>(
    source: &S,
    config: &SystemConfig,
    grid: &TimeGrid,
) -> Result<OdeEvolution> {
    config.validate()?;
    let coherence = sample(source, grid)?;
    let r0 = config.initial_bloch();
    let min_abs_f = coherence.iter().map(|c| c.abs_f).fold(f64::INFINITY, f64::min);

    if min_abs_f >= BLOCH_ROUTE_MIN_ABS_F {
        if let Ok(bloch) = integrate_bloch(source, config, grid, r0) {
            return Ok(OdeEvolution {
                trajectory: Trajectory::assemble(config, coherence, bloch),
                route: OdeRoute::Bloch,
            });
        }
    }

    let z0 = C64::new(r0[0], r0[1]);
    let bloch = ode_f_with_derivative(&source.params(), grid)?
        .into_iter()
        .zip(grid.samples())
        .map(|((f, _), &t)| {
            let z = z0 * C64::from_polar(1.0, config.omega0 * t) * f;
            BlochState::new(t, [z.re, z.im, r0[2]])
        })
        .collect();
    Ok(OdeEvolution {
        trajectory: Trajectory::assemble(config, coherence, bloch),
        route: OdeRoute::Coherence,
    })
}

fn integrate_bloch<S: CoherenceSource + ?Sized>(
    source: &S,
    config: &SystemConfig,
    grid: &TimeGrid,
    r0: [f64; 3],
) -> Result<Vec<BlochState>> {
    let omega0 = config.omega0;
    let rhs = |t: f64, y: &[f64; 3]| {
        let Ok((f, df)) = source.f_and_df(t) else {
            return [f64::NAN; 3];
        };
        let ratio = df / f;
        let (gamma, w) = (-ratio.re, omega0 + ratio.im);
        [-gamma * y[0] - w * y[1], w * y[0] - gamma * y[1], 0.0]
    };
    let mut y = r0;
    let mut t = 0.0;
    let mut h = None;
    let mut out = Vec::with_capacity(grid.len());
    for &tk in grid.samples() {
        let (yk, hk) = integrate(&rhs, t, y, tk, BLOCH_TOL, h)?;
        if hk > 0.0 {
            h = Some(hk);
        }
        y = yk;
        t = tk;
        out.push(BlochState::new(t, y));
    }
    Ok(out)
}

fn chord(a: &BlochState, b: &BlochState) -> f64 {
    let d = [b.r_x - a.r_x, b.r_y - a.r_y, b.r_z - a.r_z];
    norm3(d)
}

/// Cumulative arc length `L(t) = ∫|dr/dτ| dτ` along sampled states.
///
/// Samples are taken in pairs of intervals: the two-chord sum is
/// Richardson-extrapolated against the single chord spanning both,
/// `L ≈ fine + (fine − coarse)/3`. The sample in the middle of a pair gets
/// its share in proportion to its chord. A trailing unpaired interval uses
/// its plain chord. Every increment is nonnegative, so `L` never decreases.
pub fn path_length(states: &[BlochState]) -> Vec<f64> {
    let mut out = Vec::with_capacity(states.len());
    if states.is_empty() {
        return out;
    }
    out.push(0.0);
    let mut acc = 0.0;
    let mut k = 0;
    while k + 2 < states.len() {
        let first = chord(&states[k], &states[k + 1]);
        let second = chord(&states[k + 1], &states[k + 2]);
        let fine = first + second;
        let coarse = chord(&states[k], &states[k + 2]);
        let extrapolated = fine + (fine - coarse) / 3.0;
        let mid = if fine > 0.0 { extrapolated * first / fine } else { 0.0 };
        out.push(acc + mid);
        acc += extrapolated;
        out.push(acc);
        k += 2;
    }
    if k + 1 < states.len() {
        acc += chord(&states[k], &states[k + 1]);
        out.push(acc);
    }
    out
}
