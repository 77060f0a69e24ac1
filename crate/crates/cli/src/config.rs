//! Run configuration: flat `key=value` text with dotted section prefixes.
//!
//! ```text
//! # comments start with '#'
//! [noise]
//! nu = 2
//! kappa = inf
//! system.theta = pi/2
//! ```
//!
//! A `[section]` header prefixes the keys that follow it. Numbers accept
//! `inf` and multiples of `pi` such as `pi/2` or `0.25*pi`.

use crate::error::{CliError, Result};
use rtn_geometry::{NoiseParams, SystemConfig, TimeGrid};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// One output column of the time-series CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    T,
    ReF,
    ImF,
    AbsF,
    Phi,
    S,
    Gamma,
    Rx,
    Ry,
    Rz,
    EpsPlus,
    PhiP,
    PhiE,
    PhiG,
    DeltaPhiE,
    N,
    L,
    NearZeroFlag,
    PhiEU,
    PhiPBranch,
    PhiGPrincipal,
}

impl Column {
    /// Columns written when the config selects none.
    pub const DEFAULT: [Column; 18] = [
        Column::T,
        Column::ReF,
        Column::ImF,
        Column::AbsF,
        Column::Phi,
        Column::S,
        Column::Gamma,
        Column::Rx,
        Column::Ry,
        Column::Rz,
        Column::EpsPlus,
        Column::PhiP,
        Column::PhiE,
        Column::PhiG,
        Column::DeltaPhiE,
        Column::N,
        Column::L,
        Column::NearZeroFlag,
    ];

    pub const EXTRA: [Column; 3] = [Column::PhiEU, Column::PhiPBranch, Column::PhiGPrincipal];

    pub fn name(self) -> &'static str {
        match self {
            Column::T => "t",
            Column::ReF => "re_F",
            Column::ImF => "im_F",
            Column::AbsF => "abs_F",
            Column::Phi => "phi",
            Column::S => "s",
            Column::Gamma => "gamma",
            Column::Rx => "r_x",
            Column::Ry => "r_y",
            Column::Rz => "r_z",
            Column::EpsPlus => "eps_plus",
            Column::PhiP => "Phi_P",
            Column::PhiE => "Phi_e",
            Column::PhiG => "Phi_g",
            Column::DeltaPhiE => "delta_Phi_e",
            Column::N => "N",
            Column::L => "L",
            Column::NearZeroFlag => "near_zero_flag",
            Column::PhiEU => "Phi_e_U",
            Column::PhiPBranch => "Phi_P_branch",
            Column::PhiGPrincipal => "Phi_g_principal",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::DEFAULT
            .iter()
            .chain(&Self::EXTRA)
            .copied()
            .find(|c| c.name() == name)
            .ok_or_else(|| CliError::Config(format!("unknown column '{name}'")))
    }
}

/// Parameters that a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    A,
    Nu,
    Kappa,
    Lambda,
    Theta,
    Omega0,
}

impl Axis {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "a" => Axis::A,
            "nu" => Axis::Nu,
            "kappa" => Axis::Kappa,
            "lambda" => Axis::Lambda,
            "theta" => Axis::Theta,
            "omega0" => Axis::Omega0,
            _ => {
                return Err(CliError::Config(format!(
                    "unknown sweep axis '{name}' (expected a, nu, kappa, lambda, theta or omega0)"
                )))
            }
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::A => "a",
            Axis::Nu => "nu",
            Axis::Kappa => "kappa",
            Axis::Lambda => "lambda",
            Axis::Theta => "theta",
            Axis::Omega0 => "omega0",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub noise: NoiseParams,
    pub system: SystemConfig,
    pub t_max: f64,
    pub n_samples: usize,
    pub columns: Vec<Column>,
    pub seed: u64,
    pub mc_traj: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            noise: NoiseParams { nu: 0.5, lambda: 1.0, kappa: 1.0, a: 0.0 },
            system: SystemConfig { omega0: 0.0, theta: PI / 2.0, bloch0: None },
            t_max: 15.0,
            n_samples: 1501,
            columns: Column::DEFAULT.to_vec(),
            seed: 0,
            mc_traj: 100_000,
        }
    }
}

/// Parses a real number, allowing `inf` and `[k*]pi[/d]`.
pub fn parse_real(text: &str) -> Result<f64> {
    let s = text.trim();
    let bad = || CliError::Config(format!("cannot parse '{text}' as a number"));
    if let Ok(x) = s.parse::<f64>() {
        return Ok(x);
    }
    let (sign, s) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s),
    };
    let (numer, denom) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (s, 1.0),
    };
    let factor = match numer.strip_suffix("pi") {
        Some("") => 1.0,
        Some(k) => k.trim().trim_end_matches('*').trim().parse::<f64>().map_err(|_| bad())?,
        None => return Err(bad()),
    };
    Ok(sign * factor * PI / denom)
}

fn parse_count(key: &str, text: &str) -> Result<u64> {
    let x = parse_real(text)?;
    if x < 0.0 || x.fract() != 0.0 || x > u64::MAX as f64 {
        return Err(CliError::Config(format!("{key} must be a nonnegative integer, got '{text}'")));
    }
    Ok(x as u64)
}

/// Splits config text into `section.key -> value` pairs.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", i + 1)))?;
        let key = key.trim();
        let full = if section.is_empty() || key.contains('.') { key.to_string() } else { format!("{section}.{key}") };
        out.insert(full, value.trim().to_string());
    }
    Ok(out)
}

impl RunConfig {
    /// Builds a config from defaults overridden by `pairs`.
    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self> {
        let mut cfg = Self::default();
        for (key, value) in pairs {
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "noise.nu" => self.noise.nu = parse_real(value)?,
            "noise.lambda" => self.noise.lambda = parse_real(value)?,
            "noise.kappa" => self.noise.kappa = parse_real(value)?,
            "noise.a" => self.noise.a = parse_real(value)?,
            "system.omega0" => self.system.omega0 = parse_real(value)?,
            "system.theta" => self.system.theta = parse_real(value)?,
            "system.bloch0" => {
                let parts = value.split(',').map(parse_real).collect::<Result<Vec<f64>>>()?;
                let r: [f64; 3] = parts
                    .try_into()
                    .map_err(|_| CliError::Config("system.bloch0 needs three comma-separated components".into()))?;
                self.system.bloch0 = Some(r);
            }
            "grid.t_max" => self.t_max = parse_real(value)?,
            "grid.n" => self.n_samples = parse_count(key, value)? as usize,
            "output.columns" => {
                self.columns = value.split(',').map(|c| Column::parse(c.trim())).collect::<Result<_>>()?;
            }
            "run.seed" => self.seed = parse_count(key, value)?,
            "oracle.mc_traj" => self.mc_traj = parse_count(key, value)? as usize,
            _ => return Err(CliError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn set_axis(&mut self, axis: Axis, value: f64) {
        match axis {
            Axis::A => self.noise.a = value,
            Axis::Nu => self.noise.nu = value,
            Axis::Kappa => self.noise.kappa = value,
            Axis::Lambda => self.noise.lambda = value,
            Axis::Theta => self.system.theta = value,
            Axis::Omega0 => self.system.omega0 = value,
        }
    }

    pub fn validate(&self) -> Result<()> {
        rtn_geometry::model::validate(self.noise, self.system)?;
        self.grid()?;
        if self.columns.is_empty() {
            return Err(CliError::Config("output.columns selects no columns".into()));
        }
        if self.mc_traj == 0 {
            return Err(CliError::Config("oracle.mc_traj must be at least 1".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        Ok(TimeGrid::uniform(self.t_max, self.n_samples)?)
    }

    /// `# key = value` lines recording every parameter.
    pub fn metadata(&self) -> String {
        let mut s = String::new();
        let n = &self.noise;
        let _ = writeln!(s, "# noise.nu = {:?}", n.nu);
        let _ = writeln!(s, "# noise.lambda = {:?}", n.lambda);
        let _ = writeln!(s, "# noise.kappa = {:?}", n.kappa);
        let _ = writeln!(s, "# noise.a = {:?}", n.a);
        let _ = writeln!(s, "# system.omega0 = {:?}", self.system.omega0);
        match self.system.bloch0 {
            Some(r) => {
                let _ = writeln!(s, "# system.bloch0 = {:?},{:?},{:?}", r[0], r[1], r[2]);
            }
            None => {
                let _ = writeln!(s, "# system.theta = {:?}", self.system.theta);
            }
        }
        let _ = writeln!(s, "# grid.t_max = {:?}", self.t_max);
        let _ = writeln!(s, "# grid.n = {}", self.n_samples);
        let _ = writeln!(s, "# run.seed = {}", self.seed);
        let _ = writeln!(s, "# oracle.mc_traj = {}", self.mc_traj);
        s
    }
}
