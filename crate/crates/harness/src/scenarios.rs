//! Registered scenarios. Each one is an ordinary [`ScenarioSpec`]; `dp2c
//! scenario <name>` prints it as a config file.

use std::f64::consts::PI;

use dp2c::SolverConfig;

use crate::config::{
    CharacteristicsFlags, CriteriaFlags, DiagnosticsFlags, GridSpec, InitialData, ScenarioSpec,
};

/// Sine coefficients (modes `j pi / L`, `j = 1..=modes`) of the odd
/// profile whose slope is `-slope` on `|x| < w` and `slope w / (L - w)` on
/// the rest of the period, with Gaussian damping `exp(-(j/damping)^2)`
/// rounding the corners.
pub fn ramp_coefficients(slope: f64, w: f64, half_length: f64, damping: f64, modes: usize) -> Vec<f64> {
    let l = half_length;
    (1..=modes)
        .map(|j| {
            let j = j as f64;
            let k = j * PI / l;
            let slope_coeff = -2.0 * slope / (j * PI) * (k * w).sin() * l / (l - w);
            slope_coeff / k * (-(j / damping).powi(2)).exp()
        })
        .collect()
}

fn base(name: &str, data: InitialData, c: f64, n: usize, half_length: f64, t_max: f64) -> ScenarioSpec {
    ScenarioSpec {
        name: name.into(),
        initial_data: data,
        c,
        grid: GridSpec { n, half_length },
        solver: SolverConfig::default(),
        t_max,
        diagnostics: DiagnosticsFlags::default(),
    }
}

fn with_markers(mut s: ScenarioSpec, probe_argmin: bool) -> ScenarioSpec {
    s.diagnostics.characteristics = CharacteristicsFlags {
        enabled: true,
        markers: None,
        probe_argmin,
    };
    s
}

pub fn zero() -> ScenarioSpec {
    base("zero", InitialData::Zero, 1.0, 64, PI, 1.0)
}

/// Smooth, long-wave data that stays smooth on `[0, 2]`.
pub fn smooth() -> ScenarioSpec {
    let data = InitialData::SineFamily {
        u_sin: vec![0.5],
        u_cos: vec![],
        rho_mean: 0.3,
        rho_sin: vec![],
        rho_cos: vec![0.2],
    };
    with_markers(base("smooth", data, 1.0, 1024, 10.0, 2.0), false)
}

/// Symmetric blow-up: odd ramp with `u0'(0) = -80` on a short period,
/// `rho0 = 4 (1 - cos(pi x / L))`.
pub fn ramp_blowup() -> ScenarioSpec {
    let data = InitialData::Thm52Family {
        u_sin: ramp_coefficients(80.0, 0.4, 0.5, 10.0, 40),
        rho_cos: vec![4.0],
    };
    base("ramp_blowup", data, 1.0, 1024, 0.5, 0.05)
}

/// Symmetric data whose steepest slope sits off the origin, with
/// `rho0'(x0) != 0` there.
pub fn interior_argmin() -> ScenarioSpec {
    let a = 10.0 / 3.0;
    let data = InitialData::Thm52Family {
        u_sin: vec![-a, 0.25 * a],
        rho_cos: vec![0.2],
    };
    with_markers(base("interior_argmin", data, 1.0, 1024, PI / 4.0, 0.2), true)
}

pub fn peakon() -> ScenarioSpec {
    let data = InitialData::SmoothedPeakon {
        amplitude: 1.0,
        lambda: 8.0,
    };
    let mut s = base("peakon", data, 1.0, 4096, 20.0, 1.0);
    s.solver = SolverConfig::filtered();
    s
}

/// Steep data meeting the slope-threshold criterion: `rho0 = 0`, `c = 0`,
/// so the density-growth hypothesis holds for every rate and a small one
/// is declared.
pub fn threshold_steep() -> ScenarioSpec {
    let data = InitialData::SineFamily {
        u_sin: vec![-10.0],
        u_cos: vec![],
        rho_mean: 0.0,
        rho_sin: vec![],
        rho_cos: vec![],
    };
    let mut s = base("threshold_steep", data, 0.0, 1024, PI / 20.0, 1.0);
    s.diagnostics.criteria = CriteriaFlags {
        growth_rate: Some(0.1),
        ..CriteriaFlags::default()
    };
    s
}

/// Small long-wave data for which the slope-threshold criterion is silent.
pub fn threshold_shallow() -> ScenarioSpec {
    let data = InitialData::SineFamily {
        u_sin: vec![0.1],
        u_cos: vec![],
        rho_mean: 0.0,
        rho_sin: vec![],
        rho_cos: vec![0.1],
    };
    base("threshold_shallow", data, 1.0, 256, 10.0, 5.0)
}

/// Small data for the Picard hierarchy.
pub fn picard_small() -> ScenarioSpec {
    let data = InitialData::SineFamily {
        u_sin: vec![0.1],
        u_cos: vec![],
        rho_mean: 0.0,
        rho_sin: vec![],
        rho_cos: vec![0.1],
    };
    base("picard_small", data, 1.0, 256, 1.2, 0.1)
}

pub fn all() -> Vec<ScenarioSpec> {
    vec![
        zero(),
        smooth(),
        ramp_blowup(),
        interior_argmin(),
        peakon(),
        threshold_steep(),
        threshold_shallow(),
        picard_small(),
    ]
}

pub fn by_name(name: &str) -> Option<ScenarioSpec> {
    all().into_iter().find(|s| s.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_valid_and_unique() {
        let specs = all();
        for s in &specs {
            s.validate().unwrap();
            s.initial_state().unwrap();
        }
        let mut names: Vec<_> = specs.iter().map(|s| s.name.clone()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), specs.len());
    }

    #[test]
    fn ramp_has_requested_slope() {
        let s = ramp_blowup().initial_state().unwrap();
        let slope0 = dp2c::grid::spectral_derivative(&s.u, 1).value_at_origin();
        assert!((slope0 + 80.0).abs() < 1e-6, "{slope0}");
    }
}
