//! Builds the per-sample time series for one configuration.

use crate::config::{Column, RunConfig};
use crate::error::Result;
use rtn_geometry::decoherence::{sample, wrap_angle};
use rtn_geometry::dynamics::evolve_analytic;
use rtn_geometry::geometry::{effective_phase, total_phase_mixed, total_phase_pure};
use rtn_geometry::nonmarkov::non_markovianity;
use rtn_geometry::{CoherenceModel, C64};

/// All quantities at one sample time. Phases that are undefined, or that
/// only exist for pure initial states, are NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub t: f64,
    pub f: C64,
    pub abs_f: f64,
    pub phi: f64,
    pub s: f64,
    pub gamma: f64,
    pub r: [f64; 3],
    pub eps_plus: f64,
    pub phi_p: f64,
    pub phi_p_branch: f64,
    pub phi_e: f64,
    pub phi_e_u: f64,
    pub phi_g: f64,
    pub phi_g_principal: f64,
    pub delta_phi_e: f64,
    pub n: f64,
    pub l: f64,
    pub near_zero: bool,
}

impl Row {
    pub fn value(&self, column: Column) -> f64 {
        match column {
            Column::T => self.t,
            Column::ReF => self.f.re,
            Column::ImF => self.f.im,
            Column::AbsF => self.abs_f,
            Column::Phi => self.phi,
            Column::S => self.s,
            Column::Gamma => self.gamma,
            Column::Rx => self.r[0],
            Column::Ry => self.r[1],
            Column::Rz => self.r[2],
            Column::EpsPlus => self.eps_plus,
            Column::PhiP => self.phi_p,
            Column::PhiE => self.phi_e,
            Column::PhiG => self.phi_g,
            Column::DeltaPhiE => self.delta_phi_e,
            Column::N => self.n,
            Column::L => self.l,
            Column::NearZeroFlag => f64::from(u8::from(self.near_zero)),
            Column::PhiEU => self.phi_e_u,
            Column::PhiPBranch => self.phi_p_branch,
            Column::PhiGPrincipal => self.phi_g_principal,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub rows: Vec<Row>,
    /// `modes` or `ode`, whichever evaluated `F`.
    pub route: &'static str,
    /// Width of `F`-zero neighbourhoods left out of the phase integrals.
    pub excluded_width: f64,
    pub warnings: Vec<String>,
}

/// Continuous branch of a phase series with gaps.
fn unwrap_gaps(values: impl Iterator<Item = Option<f64>>) -> Vec<Option<f64>> {
    let mut prev: Option<f64> = None;
    values
        .map(|v| {
            v.map(|p| {
                let b = prev.map_or(p, |q| q + wrap_angle(p - q));
                prev = Some(b);
                b
            })
        })
        .collect()
}

pub fn compute(cfg: &RunConfig) -> Result<Series> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let model = CoherenceModel::new(cfg.noise, grid.t_max())?;
    let route = match model {
        CoherenceModel::Modes(_) => "modes",
        CoherenceModel::Ode(_) => "ode",
    };
    let samples = sample(&model, &grid)?;
    let traj = evolve_analytic(&model, &cfg.system, &grid)?;
    let report = non_markovianity(&samples);

    let mut rows: Vec<Row> = samples
        .iter()
        .zip(&traj.points)
        .zip(report.n_t.iter().zip(&traj.path_length))
        .map(|((c, p), (&n, &l))| Row {
            t: c.t,
            f: c.f,
            abs_f: c.abs_f,
            phi: c.phi,
            s: c.s,
            gamma: c.gamma,
            r: p.bloch.vector(),
            eps_plus: p.spectral.eps_plus,
            phi_p: f64::NAN,
            phi_p_branch: f64::NAN,
            phi_e: f64::NAN,
            phi_e_u: f64::NAN,
            phi_g: f64::NAN,
            phi_g_principal: f64::NAN,
            delta_phi_e: f64::NAN,
            n,
            l,
            near_zero: c.near_zero,
        })
        .collect();

    let mut excluded_width = 0.0;
    if cfg.system.pure_theta().is_some() {
        excluded_width = effective_phase(&model, &cfg.system, &grid)?.excluded_width;
        for (row, b) in rows.iter_mut().zip(total_phase_pure(&model, &cfg.system, &grid)?) {
            let nan = |v: Option<f64>| v.unwrap_or(f64::NAN);
            row.phi_p = nan(b.phi_p);
            row.phi_p_branch = nan(b.phi_p_branch);
            row.phi_e = b.phi_e;
            row.phi_e_u = b.phi_e_u;
            row.phi_g = nan(b.phi_g);
            row.phi_g_principal = nan(b.phi_g_principal);
            row.delta_phi_e = b.delta_phi_e;
        }
    } else {
        let terms = total_phase_mixed(&model, &cfg.system, &traj)?;
        let branch = unwrap_gaps(terms.iter().map(|q| q.phi_g));
        for ((row, q), b) in rows.iter_mut().zip(&terms).zip(branch) {
            row.phi_g = b.unwrap_or(f64::NAN);
            row.phi_g_principal = q.phi_g.unwrap_or(f64::NAN);
        }
    }

    Ok(Series { rows, route, excluded_width, warnings: report.warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    #[test]
    fn default_run_is_consistent() {
        let cfg = RunConfig { n_samples: 301, ..RunConfig::default() };
        let s = compute(&cfg).unwrap();
        assert_eq!(s.rows.len(), 301);
        assert_eq!(s.route, "modes");
        let r0 = s.rows[0];
        assert_eq!((r0.t, r0.n, r0.l, r0.phi_e), (0.0, 0.0, 0.0, 0.0));
        for r in &s.rows {
            assert_eq!(r.phi_g, r.phi_p_branch + r.phi_e);
        }
    }

    #[test]
    fn mixed_runs_have_no_pure_phases() {
        let mut cfg = RunConfig { n_samples: 101, ..RunConfig::default() };
        cfg.system.bloch0 = Some([0.3, 0.1, 0.5]);
        let s = compute(&cfg).unwrap();
        assert!(s.rows.iter().all(|r| r.phi_p.is_nan() && r.phi_e.is_nan() && r.delta_phi_e.is_nan()));
        assert!(s.rows.iter().all(|r| r.phi_g.is_finite()));
    }

    #[test]
    fn gaps_keep_the_branch() {
        let b = unwrap_gaps([Some(3.0), None, Some(-3.0)].into_iter());
        assert_eq!(b[1], None);
        assert!((b[2].unwrap() - (2.0 * std::f64::consts::PI - 3.0)).abs() < 1e-12);
    }
}
