//! The decoherence factor `F(t)` and the quantities derived from it.
//!
//! The Laplace transform of `F` is the rational function
//!
//! ```text
//!        p² + κp + 2κλ + iaν(p + κ)
//! F(p) = ----------------------------
//!        p³ + κp² + (2κλ + ν²)p + κν²
//! ```
//!
//! so, for simple poles, `F(t) = Σ_j R_j e^{p_j t}` with `p_j` the roots of
//! the denominator and `R_j = N(p_j) / D'(p_j)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{NoiseParams, TimeGrid};
use crate::oracles::OdeCoherence;
use crate::C64;

/// Below this modulus `F` is treated as zero: `s` and `γ` are reported as
/// infinities and the sample is flagged.
pub const ZERO_TOL: f64 = 1e-12;

/// Roots closer than this (relative to the largest root) make the residue
/// expansion degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Evaluates `p³ + c2 p² + c1 p + c0`.
pub fn cubic_eval(c2: f64, c1: f64, c0: f64, p: C64) -> C64 {
    ((p + c2) * p + c1) * p + c0
}

fn cubic_deriv(c2: f64, c1: f64, p: C64) -> C64 {
    (p * 3.0 + 2.0 * c2) * p + c1
}

/// Residual scale used to judge root quality: the largest term of the
/// polynomial at `p`.
fn term_scale(c2: f64, c1: f64, c0: f64, p: C64) -> f64 {
    let m = p.norm();
    (m * m * m).max(c2.abs() * m * m).max(c1.abs() * m).max(c0.abs())
}

fn newton_polish(c2: f64, c1: f64, c0: f64, mut p: C64) -> C64 {
    let mut res = cubic_eval(c2, c1, c0, p).norm();
    for _ in 0..4 {
        let d = cubic_deriv(c2, c1, p);
        if d.norm() == 0.0 {
            break;
        }
        let q = p - cubic_eval(c2, c1, c0, p) / d;
        let r = cubic_eval(c2, c1, c0, q).norm();
        // also stops on NaN
        if r.partial_cmp(&res) != Some(std::cmp::Ordering::Less) {
            break;
        }
        p = q;
        res = r;
    }
    p
}

fn real_newton(c2: f64, c1: f64, c0: f64, mut x: f64) -> f64 {
    let f = |x: f64| ((x + c2) * x + c1) * x + c0;
    let mut res = f(x).abs();
    for _ in 0..8 {
        let d = (3.0 * x + 2.0 * c2) * x + c1;
        if d == 0.0 {
            break;
        }
        let y = x - f(x) / d;
        let r = f(y).abs();
        // also stops on NaN
        if r.partial_cmp(&res) != Some(std::cmp::Ordering::Less) {
            break;
        }
        x = y;
        res = r;
    }
    x
}

/// Roots of `p² + b1 p + b0`, complex ones as an exact conjugate pair with
/// the positive imaginary part first.
fn quadratic_roots(b1: f64, b0: f64) -> [C64; 2] {
    let disc = b1 * b1 - 4.0 * b0;
    if disc < 0.0 {
        let re = -0.5 * b1;
        let im = 0.5 * (-disc).sqrt();
        [C64::new(re, im), C64::new(re, -im)]
    } else {
        let q = -0.5 * (b1 + b1.signum() * disc.sqrt());
        if q == 0.0 {
            [C64::new(0.0, 0.0), C64::new(0.0, 0.0)]
        } else {
            [C64::new(q, 0.0), C64::new(b0 / q, 0.0)]
        }
    }
}

/// One real root of the cubic, preferring the largest in magnitude.
fn real_root(c2: f64, c1: f64, c0: f64) -> f64 {
    let shift = c2 / 3.0;
    let p = c1 - c2 * shift;
    let q = 2.0 * shift * shift * shift - shift * c1 + c0;
    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;
    let x = if disc > 0.0 {
        let u = (-half_q - half_q.signum() * disc.sqrt()).cbrt();
        if u == 0.0 {
            0.0
        } else {
            u - third_p / u
        }
    } else if third_p == 0.0 {
        0.0
    } else {
        let m = 2.0 * (-third_p).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (phi - 2.0 * PI * k as f64 / 3.0).cos())
            .max_by(|x, y| (x - shift).abs().total_cmp(&(y - shift).abs()))
            .expect("three trigonometric roots")
    };
    x - shift
}

/// The three roots of `p³ + c2 p² + c1 p + c0`.
///
/// A real root is found in closed form and Newton-polished; the remaining
/// quadratic is deflated out and solved stably, and the result is polished
/// on the full cubic. Complex roots are returned as an exact conjugate pair,
/// ordered `[real, +im, -im]`; three real roots come out in descending order.
pub fn cubic_roots(c2: f64, c1: f64, c0: f64) -> [C64; 3] {
    let r = real_newton(c2, c1, c0, real_root(c2, c1, c0));

    // Forward deflation is stable when r is the smallest root, division
    // deflation when it is the largest. Try both and keep the better set.
    let forward = {
        let b1 = c2 + r;
        (b1, c1 + r * b1)
    };
    let candidates = if r != 0.0 {
        let b0 = -c0 / r;
        vec![forward, ((b0 - c1) / r, b0)]
    } else {
        vec![forward]
    };

    let mut best: Option<([C64; 3], f64)> = None;
    for (b1, b0) in candidates {
        let [q1, q2] = quadratic_roots(b1, b0);
        let roots = if q1.im != 0.0 {
            let p = newton_polish(c2, c1, c0, q1);
            let p = C64::new(p.re, p.im.abs());
            [C64::new(r, 0.0), p, p.conj()]
        } else {
            let mut rs = [
                r,
                newton_polish(c2, c1, c0, q1).re,
                newton_polish(c2, c1, c0, q2).re,
            ];
            rs.sort_by(|a, b| b.total_cmp(a));
            rs.map(|x| C64::new(x, 0.0))
        };
        let worst = roots
            .iter()
            .map(|&p| cubic_eval(c2, c1, c0, p).norm() / term_scale(c2, c1, c0, p).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        if best.as_ref().is_none_or(|(_, w)| worst < *w) {
            best = Some((roots, worst));
        }
    }
    best.expect("at least one deflation candidate").0
}

/// `F(t)` as a sum of three damped exponentials.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeDecomposition {
    params: NoiseParams,
    roots: [C64; 3],
    residues: [C64; 3],
    min_separation: f64,
    degenerate: bool,
    real_valued: bool,
}

impl ModeDecomposition {
    /// Builds the decomposition. Degenerate root sets are returned with the
    /// flag set; evaluation then refuses and the caller should use
    /// [`CoherenceModel`], which falls back to the ODE route.
    pub fn new(params: NoiseParams) -> Result<Self> {
        params.validate()?;
        if params.is_memoryless() {
            return Err(Error::Unsupported(
                "the mode decomposition needs a finite kappa; use the closed-form or Monte Carlo route",
            ));
        }
        let NoiseParams { nu, lambda, kappa, a } = params;
        let c2 = kappa;
        let c1 = 2.0 * kappa * lambda + nu * nu;
        let c0 = kappa * nu * nu;
        let roots = cubic_roots(c2, c1, c0);

        let scale = roots.iter().map(|p| p.norm()).fold(0.0, f64::max);
        let mut min_separation = f64::INFINITY;
        for i in 0..3 {
            for j in i + 1..3 {
                min_separation = min_separation.min((roots[i] - roots[j]).norm());
            }
        }
        let degenerate = min_separation < DEGENERACY_TOL * scale;

        let shift = C64::new(0.0, a * nu);
        let numerator = |p: C64| (p + kappa) * p + 2.0 * kappa * lambda + shift * (p + kappa);
        let residues = std::array::from_fn(|j| {
            let mut dprime = C64::new(1.0, 0.0);
            for k in 0..3 {
                if k != j {
                    dprime *= roots[j] - roots[k];
                }
            }
            numerator(roots[j]) / dprime
        });

        Ok(Self {
            params,
            roots,
            residues,
            min_separation,
            degenerate,
            real_valued: a == 0.0 || nu == 0.0,
        })
    }

    pub fn roots(&self) -> [C64; 3] {
        self.roots
    }

    pub fn residues(&self) -> [C64; 3] {
        self.residues
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn min_separation(&self) -> f64 {
        self.min_separation
    }

    /// `Σ_j R_j p_j^k`, the k-th derivative of `F` at zero.
    pub fn moment(&self, k: u32) -> C64 {
        self.roots
            .iter()
            .zip(&self.residues)
            .map(|(p, r)| r * p.powu(k))
            .sum()
    }

    /// Scale against which the k-th moment rule is judged.
    pub fn moment_scale(&self, k: u32) -> f64 {
        self.roots
            .iter()
            .zip(&self.residues)
            .map(|(p, r)| r.norm() * p.norm().powi(k as i32))
            .sum::<f64>()
            .max(1.0)
    }

    /// Returns a copy with residue `j` shifted by `delta`. Only useful for
    /// exercising the oracle comparison with a known fault.
    pub fn with_residue_fault(&self, j: usize, delta: C64) -> Self {
        let mut out = self.clone();
        out.residues[j] += delta;
        out.real_valued = false;
        out
    }

    fn check(&self, t: f64) -> Result<()> {
        if self.degenerate {
            return Err(Error::DegenerateModes { separation: self.min_separation });
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter { field: "t", value: t, reason: "must be finite and >= 0" });
        }
        Ok(())
    }

    fn realify(&self, z: C64) -> C64 {
        if self.real_valued {
            C64::new(z.re, 0.0)
        } else {
            z
        }
    }

    /// `F(t) = Σ R_j e^{p_j t}`.
    pub fn evaluate_f(&self, t: f64) -> Result<C64> {
        self.check(t)?;
        let f = self
            .roots
            .iter()
            .zip(&self.residues)
            .map(|(p, r)| r * (p * t).exp())
            .sum();
        Ok(self.realify(f))
    }

    /// `F'(t) = Σ R_j p_j e^{p_j t}`.
    pub fn evaluate_df(&self, t: f64) -> Result<C64> {
        self.check(t)?;
        let df = self
            .roots
            .iter()
            .zip(&self.residues)
            .map(|(p, r)| r * p * (p * t).exp())
            .sum();
        Ok(self.realify(df))
    }

    /// Frequency shift and decoherence rate at `t`.
    pub fn shift_and_rate(&self, t: f64) -> Result<ShiftRate> {
        let (f, df) = self.f_and_df(t)?;
        Ok(shift_and_rate(f, df))
    }
}

/// Builds the mode decomposition for `params`.
pub fn decompose(params: NoiseParams) -> Result<ModeDecomposition> {
    ModeDecomposition::new(params)
}

/// Anything that can produce `F(t)` and `F'(t)` at arbitrary `t ≥ 0`.
pub trait CoherenceSource: Sync {
    fn f_and_df(&self, t: f64) -> Result<(C64, C64)>;

    fn params(&self) -> NoiseParams;
}

impl CoherenceSource for ModeDecomposition {
    fn f_and_df(&self, t: f64) -> Result<(C64, C64)> {
        self.check(t)?;
        let mut f = C64::new(0.0, 0.0);
        let mut df = C64::new(0.0, 0.0);
        for (p, r) in self.roots.iter().zip(&self.residues) {
            let term = r * (p * t).exp();
            f += term;
            df += term * p;
        }
        Ok((self.realify(f), self.realify(df)))
    }

    fn params(&self) -> NoiseParams {
        self.params
    }
}

/// The exact decoherence factor, from modes when they are well separated
/// and from the third-order ODE otherwise.
#[derive(Debug, Clone)]
pub enum CoherenceModel {
    Modes(ModeDecomposition),
    Ode(OdeCoherence),
}

impl CoherenceModel {
    /// `t_max` bounds the times the ODE fallback will be asked about.
    pub fn new(params: NoiseParams, t_max: f64) -> Result<Self> {
        let modes = ModeDecomposition::new(params)?;
        if modes.is_degenerate() {
            Ok(Self::Ode(OdeCoherence::new(params, t_max)?))
        } else {
            Ok(Self::Modes(modes))
        }
    }
}

impl CoherenceSource for CoherenceModel {
    fn f_and_df(&self, t: f64) -> Result<(C64, C64)> {
        match self {
            Self::Modes(m) => m.f_and_df(t),
            Self::Ode(o) => o.f_and_df(t),
        }
    }

    fn params(&self) -> NoiseParams {
        match self {
            Self::Modes(m) => m.params,
            Self::Ode(o) => o.params(),
        }
    }
}

/// Frequency shift `s = -Im(F'/F)` and rate `γ = -Re(F'/F)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftRate {
    pub s: f64,
    pub gamma: f64,
    pub near_zero: bool,
}

pub fn shift_and_rate(f: C64, df: C64) -> ShiftRate {
    if f.norm() <= ZERO_TOL {
        // F' conj(F) carries the sign of F'/F without dividing by |F|².
        let dir = df * f.conj();
        let sign = |x: f64| if x < 0.0 { -1.0 } else { 1.0 };
        return ShiftRate {
            // a real F has no frequency shift even at its zeros
            s: if dir.im == 0.0 { 0.0 } else { -sign(dir.im) * f64::INFINITY },
            gamma: -sign(dir.re) * f64::INFINITY,
            near_zero: true,
        };
    }
    let ratio = df / f;
    ShiftRate { s: -ratio.im, gamma: -ratio.re, near_zero: false }
}

/// One time sample of the decoherence factor and its derived quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceSample {
    pub t: f64,
    pub f: C64,
    pub df: C64,
    pub abs_f: f64,
    /// Continuously unwrapped argument of `F`, zero at `t = 0`.
    pub phi: f64,
    pub s: f64,
    pub gamma: f64,
    pub near_zero: bool,
}

/// Reduces an angle to `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Relative size of the imaginary part below which an `F` sample counts as
/// real for zero-crossing detection.
const REAL_TOL: f64 = 1e-10;

fn is_real(f: C64) -> bool {
    f.im.abs() <= REAL_TOL * f.norm()
}

/// Unwraps `arg F` along a series of samples.
///
/// Samples with `|F| ≤ ZERO_TOL` hold the previous phase. When a real `F`
/// changes sign between samples the phase jumps by exactly `π`: `+π` from
/// positive to negative and `-π` back, so real `F` always has `φ ∈ {0, π}`.
/// A wrapped jump of `π` between samples that is not such a crossing means
/// the series is too coarse and is refused.
pub fn unwrap_phase(fs: &[C64]) -> Result<Vec<f64>> {
    let mut phi = Vec::with_capacity(fs.len());
    let mut reference: Option<usize> = None;
    for (k, &f) in fs.iter().enumerate() {
        if f.norm() <= ZERO_TOL {
            phi.push(reference.map_or(0.0, |r| phi[r]));
            continue;
        }
        let Some(r) = reference else {
            phi.push(0.0);
            reference = Some(k);
            continue;
        };
        let prev = fs[r];
        let jump = if is_real(prev) && is_real(f) && prev.re.signum() != f.re.signum() {
            if prev.re > 0.0 {
                PI
            } else {
                -PI
            }
        } else {
            let d = wrap_angle(f.arg() - prev.arg());
            if d.abs() >= PI - 1e-9 {
                return Err(Error::Undersampled { index: k, jump: d });
            }
            d
        };
        phi.push(phi[r] + jump);
        reference = Some(k);
    }
    Ok(phi)
}

/// Samples `F`, `F'`, `s`, `γ` and the unwrapped phase on `grid`.
pub fn sample<S: CoherenceSource + ?Sized>(
    source: &S,
    grid: &TimeGrid,
) -> Result<Vec<CoherenceSample>> {
    let values = grid
        .samples()
        .iter()
        .map(|&t| source.f_and_df(t))
        .collect::<Result<Vec<_>>>()?;
    let fs: Vec<C64> = values.iter().map(|(f, _)| *f).collect();
    let phis = unwrap_phase(&fs)?;
    Ok(grid
        .samples()
        .iter()
        .zip(values)
        .zip(phis)
        .map(|((&t, (f, df)), phi)| {
            let sr = shift_and_rate(f, df);
            CoherenceSample {
                t,
                f,
                df,
                abs_f: f.norm(),
                phi,
                s: sr.s,
                gamma: sr.gamma,
                near_zero: sr.near_zero,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(nu: f64, lambda: f64, kappa: f64, a: f64) -> NoiseParams {
        NoiseParams::new(nu, lambda, kappa, a).unwrap()
    }

    fn assert_root_set(got: [C64; 3], want: [C64; 3], tol: f64) {
        for w in want {
            assert!(
                got.iter().any(|g| (g - w).norm() < tol),
                "missing root {w} in {got:?}"
            );
        }
    }

    #[test]
    fn factorable_cubics() {
        let r = cubic_roots(1.0, 1.0, 1.0);
        assert_root_set(r, [C64::new(-1.0, 0.0), C64::i(), -C64::i()], 1e-14);
        assert_eq!(r[1], r[2].conj());

        // lambda = 0: (p + kappa)(p^2 + nu^2)
        let r = cubic_roots(1.0, 4.0, 4.0);
        assert_root_set(r, [C64::new(-1.0, 0.0), C64::new(0.0, 2.0), C64::new(0.0, -2.0)], 1e-14);

        // three real roots: (p + 1)(p + 2)(p + 3)
        let r = cubic_roots(6.0, 11.0, 6.0);
        assert_root_set(r, [-1.0, -2.0, -3.0].map(|x| C64::new(x, 0.0)), 1e-13);
        assert!(r.windows(2).all(|w| w[0].re >= w[1].re));
    }

    #[test]
    fn residual_bound_after_polish() {
        for (c2, c1, c0) in [(1.0, 6.0, 4.0), (1.0, 2.25, 0.25), (10.0, 24.0, 40.0), (0.5, 5.0, 2.0), (3.0, 3.0, 1.0)] {
            for p in cubic_roots(c2, c1, c0) {
                let res = cubic_eval(c2, c1, c0, p).norm();
                assert!(res <= 1e-10 * p.norm().powi(3).max(1.0), "{c2} {c1} {c0}: {p} -> {res}");
            }
        }
    }

    #[test]
    fn widely_separated_scales() {
        // kappa = 1e6 puts one root near -1e6 and two near the O(1)
        // memoryless pair.
        let (c2, c1, c0) = (1e6, 2e6 + 0.25, 0.25e6);
        for p in cubic_roots(c2, c1, c0) {
            let res = cubic_eval(c2, c1, c0, p).norm();
            assert!(res <= 1e-14 * term_scale(c2, c1, c0, p), "{p}: {res}");
        }
    }

    #[test]
    fn zero_constant_term() {
        let r = cubic_roots(1.0, 2.0, 0.0);
        assert!(r.iter().any(|p| p.norm() < 1e-15));
    }

    #[test]
    fn static_noise_fully_polarized() {
        // lambda = 0, a = 1: N = (p+κ)(p+iν) cancels against D, leaving
        // the single mode e^{iνt}.
        let m = decompose(params(2.0, 0.0, 1.0, 1.0)).unwrap();
        for (p, r) in m.roots().iter().zip(m.residues()) {
            if (p - C64::new(0.0, 2.0)).norm() < 1e-12 {
                assert_abs_diff_eq!(r.re, 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(r.im, 0.0, epsilon = 1e-12);
            } else {
                assert!(r.norm() < 1e-12, "spurious residue {r} on {p}");
            }
        }
        for t in [0.0, 0.3, 1.7, 5.0] {
            let f = m.evaluate_f(t).unwrap();
            assert!((f - C64::new(0.0, 2.0 * t).exp()).norm() < 1e-12);
            let df = m.evaluate_df(t).unwrap();
            assert!((df - C64::new(0.0, 2.0) * C64::new(0.0, 2.0 * t).exp()).norm() < 1e-12);
        }
    }

    #[test]
    fn equilibrium_is_conjugation_closed() {
        let m = decompose(params(2.0, 1.0, 1.0, 0.0)).unwrap();
        let roots = m.roots();
        let res = m.residues();
        for j in 0..3 {
            let k = (0..3).find(|&k| (roots[k] - roots[j].conj()).norm() < 1e-12).unwrap();
            assert!((res[k] - res[j].conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn initial_values() {
        let m = decompose(params(2.0, 1.0, 1.0, 1.0)).unwrap();
        assert!((m.evaluate_f(0.0).unwrap() - 1.0).norm() < 1e-14);
        assert!((m.evaluate_df(0.0).unwrap() - C64::new(0.0, 2.0)).norm() < 1e-12);
        let m = decompose(params(2.0, 1.0, 1.0, 0.0)).unwrap();
        assert!(m.evaluate_df(0.0).unwrap().norm() < 1e-12);
    }

    #[test]
    fn shift_and_rate_at_origin() {
        for a in [-1.0, -0.3, 0.0, 0.5, 1.0] {
            let m = decompose(params(2.0, 1.0, 1.0, a)).unwrap();
            let sr = m.shift_and_rate(0.0).unwrap();
            assert_abs_diff_eq!(sr.s, -a * 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(sr.gamma, 0.0, epsilon = 1e-12);
            assert!(!sr.near_zero);
        }
    }

    #[test]
    fn near_zero_is_flagged() {
        let sr = shift_and_rate(C64::new(1e-13, 0.0), C64::new(-2.0, 0.5));
        assert!(sr.near_zero);
        assert_eq!(sr.gamma, f64::INFINITY);
        assert_eq!(sr.s, -f64::INFINITY);
        let real = shift_and_rate(C64::new(-1e-13, 0.0), C64::new(-2.0, 0.0));
        assert_eq!(real.s, 0.0);
    }

    #[test]
    fn degenerate_modes_refuse_evaluation() {
        // nu = 0, kappa = 8 lambda: p (p^2 + 8p + 16) has a double root at -4.
        let m = decompose(params(0.0, 1.0, 8.0, 0.0)).unwrap();
        assert!(m.is_degenerate());
        assert!(matches!(m.evaluate_f(1.0), Err(Error::DegenerateModes { .. })));
        assert!(matches!(m.evaluate_df(1.0), Err(Error::DegenerateModes { .. })));
    }

    #[test]
    fn degenerate_parameters_route_through_ode() {
        let p = params(0.0, 1.0, 8.0, 0.0);
        let model = CoherenceModel::new(p, 5.0).unwrap();
        assert!(matches!(model, CoherenceModel::Ode(_)));
        let (f, df) = model.f_and_df(3.0).unwrap();
        assert!((f - 1.0).norm() < 1e-9);
        assert!(df.norm() < 1e-9);
    }

    #[test]
    fn memoryless_kappa_is_rejected() {
        let p = params(0.5, 1.0, f64::INFINITY, 0.0);
        assert!(matches!(decompose(p), Err(Error::Unsupported(_))));
    }

    #[test]
    fn unwrap_linear_phase() {
        let fs: Vec<C64> = (0..200).map(|k| C64::new(0.0, 0.1 * k as f64).exp()).collect();
        let phi = unwrap_phase(&fs).unwrap();
        for (k, p) in phi.iter().enumerate() {
            assert_abs_diff_eq!(*p, 0.1 * k as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn unwrap_constant_and_positive_real() {
        assert!(unwrap_phase(&[C64::new(1.0, 0.0); 10]).unwrap().iter().all(|p| *p == 0.0));
        let fs: Vec<C64> = (0..10).map(|k| C64::new(1.0 / (1.0 + k as f64), 0.0)).collect();
        assert!(unwrap_phase(&fs).unwrap().iter().all(|p| *p == 0.0));
    }

    #[test]
    fn unwrap_real_zero_crossings() {
        let fs: Vec<C64> = [1.0, 0.5, -0.2, -0.4, 0.0, 0.3, -0.1]
            .iter()
            .map(|&x| C64::new(x, 0.0))
            .collect();
        let phi = unwrap_phase(&fs).unwrap();
        assert_eq!(phi, vec![0.0, 0.0, PI, PI, PI, 0.0, PI]);
    }

    #[test]
    fn unwrap_refuses_undersampled_series() {
        // a purely real sign flip is a zero crossing, not undersampling
        let flip = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)];
        assert_eq!(unwrap_phase(&flip).unwrap(), vec![0.0, PI]);
        let bad = [C64::new(1.0, 0.5), C64::new(-1.0, -0.5)];
        assert!(matches!(unwrap_phase(&bad), Err(Error::Undersampled { index: 1, .. })));
    }
}
