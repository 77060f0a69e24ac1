//! Trace distance and the time-resolved non-Markovianity of the dephasing
//! map.
//!
//! For pure dephasing the trace distance of the optimal pair
//! `½(|e⟩ ± |g⟩)(⟨e| ± ⟨g|)` is `|F(t)|`, and `γ|F| = −d|F|/dt`. The measure
//! `N(t) = −∫_{γ<0} γ|F| dτ` is therefore the sum of the rises of `|F|`
//! over the intervals where it increases.

use crate::decoherence::CoherenceSample;
use crate::dynamics::BlochState;
use crate::C64;

/// `½ tr|ρ₁ − ρ₂| = |r₁ − r₂|/2` for qubit states.
pub fn trace_distance(rho1: &BlochState, rho2: &BlochState) -> f64 {
    let d = [rho1.r_x - rho2.r_x, rho1.r_y - rho2.r_y, rho1.r_z - rho2.r_z];
    0.5 * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonMarkovReport {
    pub t: Vec<f64>,
    /// `N(t)` at each sample.
    pub n_t: Vec<f64>,
    /// Intervals on which `|F|` increases, with refined endpoints.
    pub revival_intervals: Vec<(f64, f64)>,
    /// Trace distance of the optimal pair at each sample.
    pub d_opt: Vec<f64>,
    pub warnings: Vec<String>,
}

impl NonMarkovReport {
    pub fn total(&self) -> f64 {
        self.n_t.last().copied().unwrap_or(0.0)
    }
}

/// Cubic Hermite interpolant of `F` on `[t0, t1]`.
struct Hermite {
    t0: f64,
    h: f64,
    f0: C64,
    f1: C64,
    m0: C64,
    m1: C64,
}

impl Hermite {
    fn new(a: &CoherenceSample, b: &CoherenceSample) -> Self {
        let h = b.t - a.t;
        Self { t0: a.t, h, f0: a.f, f1: b.f, m0: a.df * h, m1: b.df * h }
    }

    fn value_and_slope(&self, t: f64) -> (C64, C64) {
        let u = (t - self.t0) / self.h;
        let (u2, u3) = (u * u, u * u * u);
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let value = self.f0 * h00 + self.m0 * h10 + self.f1 * h01 + self.m1 * h11;
        let d00 = 6.0 * u2 - 6.0 * u;
        let d10 = 3.0 * u2 - 4.0 * u + 1.0;
        let d01 = -d00;
        let d11 = 3.0 * u2 - 2.0 * u;
        let slope = (self.f0 * d00 + self.m0 * d10 + self.f1 * d01 + self.m1 * d11) / self.h;
        (value, slope)
    }

    /// `½ d|H|²/dt`.
    fn growth(&self, t: f64) -> f64 {
        let (v, d) = self.value_and_slope(t);
        (d * v.conj()).re
    }

    /// Locates the sign change of `growth` by bisection and returns the
    /// time and `|F|` there.
    fn extremum(&self, rising: bool) -> (f64, f64) {
        let (mut lo, mut hi) = (self.t0, self.t0 + self.h);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (self.growth(mid) > 0.0) == rising {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        (t, self.value_and_slope(t).0.norm())
    }
}

/// Rises of `|F|` up to this size are rounding noise and are ignored.
pub const RISE_TOL: f64 = 1e-12;

/// Computes `N(t)` from coherence samples (with derivatives).
///
/// Extrema of `|F|` between samples are refined on a cubic Hermite
/// interpolant of `F`. Rises below [`RISE_TOL`] are dropped. Revivals shorter than two grid steps are reported in
/// `warnings`, since the grid may miss others like them.
pub fn non_markovianity(samples: &[CoherenceSample]) -> NonMarkovReport {
    let mut report = NonMarkovReport {
        t: samples.iter().map(|s| s.t).collect(),
        n_t: Vec::with_capacity(samples.len()),
        revival_intervals: Vec::new(),
        d_opt: samples
            .iter()
            .map(|s| {
                let plus = BlochState::new(s.t, [s.f.re, s.f.im, 0.0]);
                let minus = BlochState::new(s.t, [-s.f.re, -s.f.im, 0.0]);
                trace_distance(&plus, &minus)
            })
            .collect(),
        warnings: Vec::new(),
    };
    let rising = |s: &CoherenceSample| (s.df * s.f.conj()).re > 0.0;

    let mut completed = 0.0;
    // start time and |F| of the current revival
    let mut open: Option<(f64, f64)> = None;
    for (k, s) in samples.iter().enumerate() {
        if k > 0 {
            let prev = &samples[k - 1];
            let (was, is) = (open.is_some(), rising(s));
            if was != is {
                let (t_x, abs_x) = Hermite::new(prev, s).extremum(!was);
                if was {
                    let (t0, abs0) = open.take().unwrap();
                    if abs_x - abs0 > RISE_TOL {
                        completed += abs_x - abs0;
                        close(&mut report, samples, k, t0, t_x);
                    }
                } else {
                    open = Some((t_x, abs_x));
                }
            }
        } else if rising(s) {
            open = Some((s.t, s.abs_f));
        }
        let rise = open.map_or(0.0, |(_, abs0)| s.abs_f - abs0);
        report.n_t.push(completed + if rise > RISE_TOL { rise } else { 0.0 });
    }
    if let (Some((t0, abs0)), Some(last)) = (open, samples.last()) {
        if last.abs_f - abs0 > RISE_TOL {
            close(&mut report, samples, samples.len() - 1, t0, last.t);
        }
    }
    report
}

fn close(report: &mut NonMarkovReport, samples: &[CoherenceSample], k: usize, start: f64, end: f64) {
    report.revival_intervals.push((start, end));
    let step = if k > 0 { samples[k].t - samples[k - 1].t } else { 0.0 };
    if end - start < 2.0 * step {
        report.warnings.push(format!("revival on [{start:.6}, {end:.6}] spans less than two grid steps"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoherence::{decompose, sample, CoherenceSource};
    use crate::model::{NoiseParams, TimeGrid};
    use crate::quad::adaptive_simpson;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn report(nu: f64, kappa: f64, a: f64, t_max: f64, n: usize) -> (crate::ModeDecomposition, NonMarkovReport) {
        let m = decompose(NoiseParams::new(nu, 1.0, kappa, a).unwrap()).unwrap();
        let grid = TimeGrid::uniform(t_max, n).unwrap();
        let r = non_markovianity(&sample(&m, &grid).unwrap());
        (m, r)
    }

    #[test]
    fn trace_distance_bounds() {
        let a = BlochState::new(0.0, [0.0, 0.0, 1.0]);
        let b = BlochState::new(0.0, [0.0, 0.0, -1.0]);
        assert_eq!(trace_distance(&a, &a), 0.0);
        assert_eq!(trace_distance(&a, &b), 1.0);
    }

    #[test]
    fn optimal_pair_distance_is_abs_f() {
        let (_, r) = report(2.0, 1.0, 0.5, 15.0, 301);
        let (m, _) = report(2.0, 1.0, 0.5, 15.0, 2);
        for (t, d) in r.t.iter().zip(&r.d_opt) {
            assert!((d - m.evaluate_f(*t).unwrap().norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_decay_has_no_revivals() {
        let (_, r) = report(0.5, 1e6, 0.0, 15.0, 1501);
        assert_eq!(r.n_t[0], 0.0);
        assert!(r.revival_intervals.is_empty());
        assert!(r.total() < 1e-8);
    }

    #[test]
    fn matches_direct_quadrature() {
        for a in [0.0, 0.5, 1.0] {
            let (m, r) = report(2.0, 1.0, a, 15.0, 1501);
            let rate = |t: f64| {
                let (f, df) = m.f_and_df(t).unwrap();
                let abs = f.norm();
                if abs == 0.0 { 0.0 } else { ((df * f.conj()).re / abs).max(0.0) }
            };
            let mut direct = 0.0;
            for w in r.t.windows(2) {
                direct += adaptive_simpson(rate, w[0], w[1], 1e-13, 1e-15).value;
            }
            assert!((r.total() - direct).abs() < 1e-8, "a={a}: {} vs {direct}", r.total());
            assert!(r.n_t.windows(2).all(|w| w[1] >= w[0]));
            assert!(r.warnings.is_empty());
        }
    }

    #[test]
    fn constant_coherence_is_markovian() {
        let (_, r) = report(0.0, 1.0, 0.0, 10.0, 101);
        assert!(r.revival_intervals.is_empty());
        assert_eq!(r.total(), 0.0);
    }

    #[test]
    fn coarse_grid_warns() {
        let (_, r) = report(6.0, 1.0, 0.0, 15.0, 60);
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn random_pairs_never_beat_the_optimal_pair() {
        let m = decompose(NoiseParams::new(2.0, 1.0, 1.0, 0.5).unwrap()).unwrap();
        let grid = TimeGrid::uniform(15.0, 1501).unwrap();
        let samples = sample(&m, &grid).unwrap();
        let optimal = non_markovianity(&samples).total();
        let omega0 = 0.7;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut random_point = || loop {
            let r = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            if r.iter().map(|x: &f64| x * x).sum::<f64>() <= 1.0 {
                return r;
            }
        };
        let mut best = 0.0f64;
        for _ in 0..200 {
            let (p, q) = (random_point(), random_point());
            let distance = |s: &CoherenceSample, r: [f64; 3]| {
                let z = C64::new(r[0], r[1]) * C64::from_polar(1.0, omega0 * s.t) * s.f;
                BlochState::new(s.t, [z.re, z.im, r[2]])
            };
            let d: Vec<f64> = samples.iter().map(|s| trace_distance(&distance(s, p), &distance(s, q))).collect();
            let growth: f64 = d.windows(2).map(|w| (w[1] - w[0]).max(0.0)).sum();
            best = best.max(growth);
        }
        assert!(best > 0.0);
        assert!(best <= optimal + 1e-9, "{best} > {optimal}");
    }
}
