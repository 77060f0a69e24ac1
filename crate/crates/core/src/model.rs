//! Parameter records, validation and time grids.
//!
//! All rates are angular frequencies or inverse times in one common unit.
//! The CLI uses `λ = 1` as the unit of time.

use crate::error::{Error, Result};

/// The telegraph-noise environment.
///
/// `ξ(t)` jumps between `±nu` at rate `lambda`; the memory kernel is
/// `κ e^{-κ(t-t')}` and `a` biases the initial value of the noise,
/// `P(ξ(0) = ±ν) = (1 ± a)/2`. `a = 0` is the stationary environment and
/// `kappa → ∞` the memoryless one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub nu: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub a: f64,
}

impl NoiseParams {
    pub fn new(nu: f64, lambda: f64, kappa: f64, a: f64) -> Result<Self> {
        let p = Self { nu, lambda, kappa, a };
        p.validate()?;
        Ok(p)
    }

    /// Checks every field. `kappa = +inf` is accepted and denotes the
    /// memoryless limit, which only the closed-form and Monte Carlo routes
    /// support.
    pub fn validate(&self) -> Result<()> {
        check_finite_nonneg("nu", self.nu)?;
        check_finite_nonneg("lambda", self.lambda)?;
        if self.kappa.is_nan() || self.kappa <= 0.0 {
            return Err(Error::InvalidParameter {
                field: "kappa",
                value: self.kappa,
                reason: "must be > 0",
            });
        }
        if !(self.a.is_finite() && (-1.0..=1.0).contains(&self.a)) {
            return Err(Error::InvalidParameter {
                field: "a",
                value: self.a,
                reason: "must lie in [-1, 1]",
            });
        }
        if self.nu == 0.0 && self.lambda == 0.0 {
            return Err(Error::InvalidParameter {
                field: "lambda",
                value: self.lambda,
                reason: "nu and lambda cannot both be zero",
            });
        }
        Ok(())
    }

    pub fn is_memoryless(&self) -> bool {
        self.kappa.is_infinite()
    }

    /// Same environment with the sign of the nonequilibrium parameter flipped.
    pub fn mirrored(&self) -> Self {
        Self { a: -self.a, ..*self }
    }
}

fn check_finite_nonneg(field: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter { field, value, reason: "must be finite" });
    }
    if value < 0.0 {
        return Err(Error::InvalidParameter { field, value, reason: "must be >= 0" });
    }
    Ok(())
}

/// The qubit: intrinsic frequency and initial state.
///
/// A pure initial state is given by its polar angle `theta`, i.e.
/// `r(0) = (sin θ, 0, cos θ)`. Setting `bloch0` overrides `theta` with an
/// arbitrary (possibly mixed) initial Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub omega0: f64,
    pub theta: f64,
    pub bloch0: Option<[f64; 3]>,
}

/// Initial states closer than this to the Bloch sphere are treated as pure.
pub const PURITY_TOL: f64 = 1e-12;

impl SystemConfig {
    pub fn pure(omega0: f64, theta: f64) -> Result<Self> {
        let c = Self { omega0, theta, bloch0: None };
        c.validate()?;
        Ok(c)
    }

    pub fn mixed(omega0: f64, bloch0: [f64; 3]) -> Result<Self> {
        let c = Self { omega0, theta: 0.0, bloch0: Some(bloch0) };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.omega0.is_finite() {
            return Err(Error::InvalidParameter {
                field: "omega0",
                value: self.omega0,
                reason: "must be finite",
            });
        }
        match self.bloch0 {
            None => {
                if !(self.theta.is_finite()
                    && (0.0..=std::f64::consts::PI).contains(&self.theta))
                {
                    return Err(Error::InvalidParameter {
                        field: "theta",
                        value: self.theta,
                        reason: "must lie in [0, pi]",
                    });
                }
            }
            Some(r) => {
                if r.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidParameter {
                        field: "bloch0",
                        value: f64::NAN,
                        reason: "components must be finite",
                    });
                }
                let norm = norm3(r);
                if norm > 1.0 + PURITY_TOL {
                    return Err(Error::InvalidParameter {
                        field: "bloch0",
                        value: norm,
                        reason: "|r(0)| must not exceed 1",
                    });
                }
            }
        }
        Ok(())
    }

    pub fn initial_bloch(&self) -> [f64; 3] {
        match self.bloch0 {
            Some(r) => r,
            None => [self.theta.sin(), 0.0, self.theta.cos()],
        }
    }

    /// The polar angle when the run starts from the `theta` pure state.
    pub fn pure_theta(&self) -> Option<f64> {
        match self.bloch0 {
            None => Some(self.theta),
            Some(_) => None,
        }
    }

    pub fn is_pure(&self) -> bool {
        1.0 - norm3(self.initial_bloch()) < PURITY_TOL
    }
}

pub(crate) fn norm3(r: [f64; 3]) -> f64 {
    (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt()
}

/// Validates both records together.
pub fn validate(
    params: NoiseParams,
    config: SystemConfig,
) -> Result<(NoiseParams, SystemConfig)> {
    params.validate()?;
    config.validate()?;
    Ok((params, config))
}

/// Strictly increasing sample times starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    samples: Vec<f64>,
}

impl TimeGrid {
    /// `n` equally spaced samples on `[0, t_max]`.
    pub fn uniform(t_max: f64, n: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidParameter {
                field: "t_max",
                value: t_max,
                reason: "must be finite and > 0",
            });
        }
        if n < 2 {
            return Err(Error::InvalidGrid("need at least two samples"));
        }
        let step = t_max / (n - 1) as f64;
        let mut samples: Vec<f64> = (0..n).map(|k| k as f64 * step).collect();
        samples[n - 1] = t_max;
        Ok(Self { samples })
    }

    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidGrid("need at least two samples"));
        }
        if samples[0] != 0.0 {
            return Err(Error::InvalidGrid("first sample must be 0"));
        }
        if samples.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid("samples must be finite"));
        }
        if samples.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("samples must be strictly increasing"));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn t_max(&self) -> f64 {
        *self.samples.last().expect("grid has at least two samples")
    }
}

/// `n` equally spaced samples on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, n: usize) -> Result<TimeGrid> {
    TimeGrid::uniform(t_max, n)
}
