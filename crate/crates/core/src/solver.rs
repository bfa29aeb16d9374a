//! Time integration of the nonlocal (transport) form of the system
//!
//! ```text
//! u_t + u u_x   = P(D)(3/2 u^2 + c/2 rho^2)
//! rho_t + u rho_x = -2 u_x rho
//! ```
//!
//! with classical RK4, plus the linear-transport Picard hierarchy used as an
//! independent cross-check of the nonlinear solver.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::besov::{low_freq, DyadicPartition};
use crate::characteristics::{
    advance_bundle_staged, conservation_residual, CharacteristicBundle, StageVelocity,
};
use crate::diagnostics::{record, DiagnosticsSeries};
use crate::error::{Error, Result};
use crate::grid::{
    dealias, exp_filter, from_spectrum, spectral_derivative, to_spectrum, Grid, RealField,
};
use crate::nonlocal::pd_spectrum;

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub u: RealField,
    pub rho: RealField,
    pub c: f64,
}

impl State {
    pub fn new(u: RealField, rho: RealField, c: f64) -> Result<Self> {
        Self::at_time(0.0, u, rho, c)
    }

    pub fn at_time(t: f64, u: RealField, rho: RealField, c: f64) -> Result<Self> {
        u.same_grid(&rho)?;
        if !(t.is_finite() && c.is_finite() && u.is_finite() && rho.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { t, u, rho, c })
    }

    pub fn zero(grid: &Arc<Grid>, c: f64) -> Self {
        Self {
            t: 0.0,
            u: RealField::zeros(grid),
            rho: RealField::zeros(grid),
            c,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.u.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.rho.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub cfl: f64,
    pub dt_min: f64,
    pub slope_cap: f64,
    pub dealias_on: bool,
    /// Exponential filter order `p`; 0 disables the filter.
    pub filter_p: u32,
    pub filter_alpha: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.5,
            dt_min: 1e-10,
            slope_cap: 1e4,
            dealias_on: true,
            filter_p: 0,
            filter_alpha: 36.0,
        }
    }
}

impl SolverConfig {
    /// Default configuration with the order-8 filter switched on.
    pub fn filtered() -> Self {
        Self {
            filter_p: 8,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidParameter(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.dt_min > 0.0) {
            return Err(Error::InvalidParameter("dt_min must be positive".into()));
        }
        if !(self.slope_cap > 0.0) {
            return Err(Error::InvalidParameter("slope_cap must be positive".into()));
        }
        if !(self.filter_alpha >= 0.0) {
            return Err(Error::InvalidParameter("filter_alpha must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    BlowupDetected,
    DtUnderflow,
    Nonfinite,
}

/// Per-record output of the Lagrangian markers carried along a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackingSample {
    pub t: f64,
    pub m: f64,
    pub conservation_residual: f64,
    pub order_preserving: bool,
    /// Position of the probe marker, if one was requested.
    pub probe_position: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrackingLog {
    pub bundle: CharacteristicBundle,
    pub probe: Option<CharacteristicBundle>,
    pub samples: Vec<TrackingSample>,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Number of equispaced markers to carry, if any.
    pub markers: Option<usize>,
    /// Label of a single extra marker whose position is logged.
    pub probe_label: Option<f64>,
    /// Times at which the state is captured; the step is shortened to hit them.
    pub snapshot_times: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_state: State,
    pub termination: Termination,
    pub series: DiagnosticsSeries,
    pub tracking: Option<TrackingLog>,
    pub snapshots: Vec<State>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeStep {
    pub dt: f64,
    pub underflow: bool,
}

struct Tendency {
    du: RealField,
    drho: RealField,
    u_x: RealField,
}

fn product(a: &RealField, b: &RealField) -> RealField {
    a.zip_map(b, |x, y| x * y)
}

/// Transport tendencies with velocity `v` acting on `(w, tau)` (`w` enters
/// through its slope `w_x`), sources built from `(src_u, src_rho)`:
///
/// `dw = -v w_x + P(D)(3/2 src_u^2 + c/2 src_rho^2)`,
/// `dtau = -v tau_x - 2 src_rho d_x src_u`.
///
/// The nonlinear system is the case `v = w = src_u`, `tau = src_rho`.
#[allow(clippy::too_many_arguments)]
fn transport_tendency(
    v: &RealField,
    w_x: &RealField,
    tau: &RealField,
    src_u: &RealField,
    src_u_x: &RealField,
    src_rho: &RealField,
    c: f64,
    dealias_on: bool,
) -> (RealField, RealField) {
    let tau_x = spectral_derivative(tau, 1);
    let advect_u = product(v, w_x).scale(-1.0);
    let source = src_u.zip_map(src_rho, |a, r| 1.5 * a * a + 0.5 * c * r * r);
    let advect_rho = v.zip_map(&tau_x, |a, b| -a * b);
    let rho_src = src_rho.zip_map(src_u_x, |r, a| -2.0 * r * a);
    let rho_rhs = advect_rho.zip_map(&rho_src, |a, b| a + b);

    let mut du_hat = to_spectrum(&advect_u).add(&pd_spectrum(&to_spectrum(&source)));
    let mut drho_hat = to_spectrum(&rho_rhs);
    if dealias_on {
        du_hat = dealias(&du_hat);
        drho_hat = dealias(&drho_hat);
    }
    (from_spectrum(&du_hat), from_spectrum(&drho_hat))
}

fn tendency(u: &RealField, rho: &RealField, c: f64, cfg: &SolverConfig) -> Tendency {
    let u_x = spectral_derivative(u, 1);
    let (du, drho) = transport_tendency(u, &u_x, rho, u, &u_x, rho, c, cfg.dealias_on);
    Tendency { du, drho, u_x }
}

/// Right-hand side `(du/dt, drho/dt)` of the nonlocal system.
pub fn rhs(s: &State, cfg: &SolverConfig) -> Result<(RealField, RealField)> {
    if !s.is_finite() {
        return Err(Error::NonFinite);
    }
    let k = tendency(&s.u, &s.rho, s.c, cfg);
    Ok((k.du, k.drho))
}

/// Sup-norm residual of the momentum form
/// `m_t + 3 m u_x + m_x u + c rho rho_x` with `m = u - u_xx` and
/// `m_t = (1 - d_xx) du_dt`.
pub fn m_residual(s: &State, du_dt: &RealField, _drho_dt: &RealField) -> f64 {
    let u_x = spectral_derivative(&s.u, 1);
    let u_xx = spectral_derivative(&s.u, 2);
    let u_xxx = spectral_derivative(&s.u, 3);
    let rho_x = spectral_derivative(&s.rho, 1);
    let m = s.u.axpy(-1.0, &u_xx);
    let m_x = u_x.axpy(-1.0, &u_xxx);
    let m_t = du_dt.axpy(-1.0, &spectral_derivative(du_dt, 2));
    let c = s.c;
    let v = m_t.values();
    (0..v.len())
        .map(|j| {
            v[j] + 3.0 * m.values()[j] * u_x.values()[j]
                + m_x.values()[j] * s.u.values()[j]
                + c * s.rho.values()[j] * rho_x.values()[j]
        })
        .fold(0.0, |acc: f64, r| acc.max(r.abs()))
}

fn apply_filter(f: &RealField, cfg: &SolverConfig) -> RealField {
    from_spectrum(&exp_filter(&to_spectrum(f), cfg.filter_alpha, cfg.filter_p))
}

struct StepOutput {
    state: State,
    stage_velocities: Option<[StageVelocity; 4]>,
}

fn rk4_step(s: &State, dt: f64, cfg: &SolverConfig, want_stages: bool) -> Result<StepOutput> {
    let c = s.c;
    let k1 = tendency(&s.u, &s.rho, c, cfg);
    let u2 = s.u.axpy(0.5 * dt, &k1.du);
    let r2 = s.rho.axpy(0.5 * dt, &k1.drho);
    let k2 = tendency(&u2, &r2, c, cfg);
    let u3 = s.u.axpy(0.5 * dt, &k2.du);
    let r3 = s.rho.axpy(0.5 * dt, &k2.drho);
    let k3 = tendency(&u3, &r3, c, cfg);
    let u4 = s.u.axpy(dt, &k3.du);
    let r4 = s.rho.axpy(dt, &k3.drho);
    let k4 = tendency(&u4, &r4, c, cfg);

    let combine = |y: &RealField, a: &RealField, b: &RealField, cc: &RealField, d: &RealField| {
        let mut out = y.clone();
        let w = dt / 6.0;
        for (j, o) in out.values_mut().iter_mut().enumerate() {
            *o += w * (a.values()[j] + 2.0 * b.values()[j] + 2.0 * cc.values()[j] + d.values()[j]);
        }
        out
    };
    let mut u = combine(&s.u, &k1.du, &k2.du, &k3.du, &k4.du);
    let mut rho = combine(&s.rho, &k1.drho, &k2.drho, &k3.drho, &k4.drho);
    if cfg.filter_p > 0 {
        u = apply_filter(&u, cfg);
        rho = apply_filter(&rho, cfg);
    }
    if !(u.is_finite() && rho.is_finite()) {
        return Err(Error::NonFinite);
    }
    let stage_velocities = want_stages.then(|| {
        [
            StageVelocity::new(&s.u, &k1.u_x),
            StageVelocity::new(&u2, &k2.u_x),
            StageVelocity::new(&u3, &k3.u_x),
            StageVelocity::new(&u4, &k4.u_x),
        ]
    });
    Ok(StepOutput {
        state: State {
            t: s.t + dt,
            u,
            rho,
            c,
        },
        stage_velocities,
    })
}

/// One classical RK4 step; the exponential filter (if enabled) is applied
/// once at the end of the step.
pub fn step_rk4(s: &State, dt: f64, cfg: &SolverConfig) -> Result<State> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    Ok(rk4_step(s, dt, cfg, false)?.state)
}

const SPEED_GUARD: f64 = 1e-12;

/// `cfl * min(dx / (|u|_inf + eps), 1 / (10 (|m| + 1)))` with `m = min u_x`,
/// floored at `dt_min`.
pub fn adaptive_dt(s: &State, cfg: &SolverConfig) -> TimeStep {
    let u_x = spectral_derivative(&s.u, 1);
    dt_from(s.grid().dx(), s.u.max_abs(), u_x.min(), cfg)
}

fn dt_from(dx: f64, u_inf: f64, m: f64, cfg: &SolverConfig) -> TimeStep {
    let advective = dx / (u_inf + SPEED_GUARD);
    let slope = 1.0 / (10.0 * (m.abs() + 1.0));
    let dt = cfg.cfl * advective.min(slope);
    if dt < cfg.dt_min || !dt.is_finite() {
        TimeStep {
            dt: cfg.dt_min,
            underflow: true,
        }
    } else {
        TimeStep {
            dt,
            underflow: false,
        }
    }
}

pub fn evolve(s0: &State, t_max: f64, cfg: &SolverConfig) -> Result<RunResult> {
    evolve_with(s0, t_max, cfg, &RunOptions::default())
}

/// Steps until `t_max`, the slope cap, a step-size underflow or a
/// non-finite state. Math events end the run with a [`Termination`]; only
/// invalid input is an error.
pub fn evolve_with(
    s0: &State,
    t_max: f64,
    cfg: &SolverConfig,
    opts: &RunOptions,
) -> Result<RunResult> {
    cfg.validate()?;
    if !(t_max > s0.t) {
        return Err(Error::InvalidParameter(format!(
            "t_max {t_max} must exceed the start time {}",
            s0.t
        )));
    }
    if !s0.is_finite() {
        return Err(Error::NonFinite);
    }
    let grid = s0.grid().clone();
    let mut tracking = match opts.markers {
        Some(m) => {
            let bundle = crate::characteristics::seed_bundle(&grid, m, &s0.rho)?;
            let probe = opts
                .probe_label
                .map(|x| crate::characteristics::seed_bundle_at(&grid, &[x], &s0.rho));
            Some(TrackingLog {
                bundle,
                probe,
                samples: Vec::new(),
            })
        }
        None => None,
    };
    if let Some(log) = tracking.as_mut() {
        log.bundle.t = s0.t;
        if let Some(p) = log.probe.as_mut() {
            p.t = s0.t;
        }
    }
    let mut stops: Vec<f64> = opts
        .snapshot_times
        .iter()
        .copied()
        .filter(|&t| t > s0.t && t <= t_max)
        .collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    let mut stops = stops.into_iter().peekable();
    let mut snapshots = Vec::new();
    if opts.snapshot_times.contains(&s0.t) {
        snapshots.push(s0.clone());
    }

    let mut series = DiagnosticsSeries::new(&grid, cfg.clone());
    let mut state = s0.clone();
    series.push(record(&state, None));
    if let Some(log) = tracking.as_mut() {
        log.samples.push(tracking_sample(&state, log, series.last().unwrap().m)?);
    }

    let termination = loop {
        let last = series.last().expect("series starts with the initial record");
        if last.m <= -cfg.slope_cap {
            break Termination::BlowupDetected;
        }
        if state.t >= t_max {
            break Termination::Completed;
        }
        let step = dt_from(grid.dx(), last.u_inf, last.m, cfg);
        if step.underflow {
            break Termination::DtUnderflow;
        }
        let mut dt = step.dt;
        let mut target = None;
        let next_stop = stops.peek().copied();
        let horizon = next_stop.unwrap_or(t_max).min(t_max);
        if state.t + dt >= horizon {
            dt = horizon - state.t;
            target = Some(horizon);
        }
        let out = match rk4_step(&state, dt, cfg, tracking.is_some()) {
            Ok(out) => out,
            Err(Error::NonFinite) => break Termination::Nonfinite,
            Err(e) => return Err(e),
        };
        let mut next = out.state;
        if let Some(t) = target {
            next.t = t;
        }
        if let (Some(log), Some(stages)) = (tracking.as_mut(), out.stage_velocities.as_ref()) {
            let refs = [&stages[0], &stages[1], &stages[2], &stages[3]];
            log.bundle = advance_bundle_staged(&log.bundle, refs, dt);
            log.bundle.t = next.t;
            if let Some(p) = log.probe.as_mut() {
                *p = advance_bundle_staged(p, refs, dt);
                p.t = next.t;
            }
        }
        let rec = record(&next, series.last());
        let rec_m = rec.m;
        series.push(rec);
        if let Some(log) = tracking.as_mut() {
            log.samples.push(tracking_sample(&next, log, rec_m)?);
        }
        if next_stop.is_some() && target == next_stop {
            snapshots.push(next.clone());
            stops.next();
        }
        state = next;
    };

    Ok(RunResult {
        final_state: state,
        termination,
        series,
        tracking,
        snapshots,
    })
}

fn tracking_sample(state: &State, log: &TrackingLog, m: f64) -> Result<TrackingSample> {
    Ok(TrackingSample {
        t: state.t,
        m,
        conservation_residual: conservation_residual(state, &log.bundle)?,
        order_preserving: log.bundle.is_order_preserving(),
        probe_position: log.probe.as_ref().map(|p| p.positions[0]),
    })
}

/// Picard hierarchy: iterate `n + 1` solves the linear transport pair
///
/// ```text
/// u'_t + u^n u'_x     = P(D)(3/2 (u^n)^2 + c/2 (rho^n)^2)
/// rho'_t + u^n rho'_x = -2 rho^n u^n_x
/// ```
///
/// from data `(S_{n+1} u_0, S_{n+1} rho_0)`, starting from `z^0 = 0`.
///
/// All iterates are advanced together with one RK4 step sequence, so each
/// iterate sees the previous one at exactly its own stage times. Element `n`
/// of the returned vector is iterate `n` (element 0 is the zero iterate).
pub fn picard_iterate(
    z0: &State,
    n_iters: usize,
    t_max: f64,
    cfg: &SolverConfig,
    part: &DyadicPartition,
) -> Result<Vec<RunResult>> {
    cfg.validate()?;
    if n_iters == 0 {
        return Err(Error::InvalidParameter("n_iters must be positive".into()));
    }
    if !(t_max > z0.t) {
        return Err(Error::InvalidParameter(format!(
            "t_max {t_max} must exceed the start time {}",
            z0.t
        )));
    }
    let grid = z0.grid().clone();
    let c = z0.c;
    let zero = State::zero(&grid, c);
    // iterates[0] is the frozen zero iterate
    let mut iterates: Vec<State> = std::iter::once(State { t: z0.t, ..zero.clone() })
        .chain((1..=n_iters).map(|n| State {
            t: z0.t,
            u: low_freq(&z0.u, n as u32, part),
            rho: low_freq(&z0.rho, n as u32, part),
            c,
        }))
        .collect();
    let mut series: Vec<DiagnosticsSeries> = iterates
        .iter()
        .map(|s| {
            let mut ser = DiagnosticsSeries::new(&grid, cfg.clone());
            ser.push(record(s, None));
            ser
        })
        .collect();

    let mut termination = Termination::Completed;
    let mut t = z0.t;
    while t < t_max {
        let mut step = TimeStep {
            dt: f64::INFINITY,
            underflow: false,
        };
        for ser in &series[1..] {
            let r = ser.last().unwrap();
            let ts = dt_from(grid.dx(), r.u_inf, r.m, cfg);
            if ts.dt < step.dt {
                step = ts;
            }
        }
        if step.underflow {
            termination = Termination::DtUnderflow;
            break;
        }
        let mut dt = step.dt;
        let mut last_step = false;
        if t + dt >= t_max {
            dt = t_max - t;
            last_step = true;
        }
        match picard_rk4(&iterates, dt, c, cfg) {
            Ok(next) => iterates = next,
            Err(Error::NonFinite) => {
                termination = Termination::Nonfinite;
                break;
            }
            Err(e) => return Err(e),
        }
        t = if last_step { t_max } else { t + dt };
        for (s, ser) in iterates.iter_mut().zip(series.iter_mut()) {
            s.t = t;
            let rec = record(s, ser.last());
            ser.push(rec);
        }
    }

    Ok(iterates
        .into_iter()
        .zip(series)
        .map(|(final_state, series)| RunResult {
            final_state,
            termination,
            series,
            tracking: None,
            snapshots: Vec::new(),
        })
        .collect())
}

fn picard_tendencies(
    stage: &[(RealField, RealField)],
    c: f64,
    cfg: &SolverConfig,
) -> Vec<(RealField, RealField)> {
    let slopes: Vec<RealField> = stage.iter().map(|(u, _)| spectral_derivative(u, 1)).collect();
    let grid = stage[0].0.grid();
    let mut out = vec![(RealField::zeros(grid), RealField::zeros(grid))];
    for n in 1..stage.len() {
        let (v, sigma) = &stage[n - 1];
        let tau = &stage[n].1;
        out.push(transport_tendency(
            v,
            &slopes[n],
            tau,
            v,
            &slopes[n - 1],
            sigma,
            c,
            cfg.dealias_on,
        ));
    }
    out
}

fn picard_rk4(iterates: &[State], dt: f64, c: f64, cfg: &SolverConfig) -> Result<Vec<State>> {
    let base: Vec<(RealField, RealField)> = iterates
        .iter()
        .map(|s| (s.u.clone(), s.rho.clone()))
        .collect();
    let shift = |k: &[(RealField, RealField)], h: f64| -> Vec<(RealField, RealField)> {
        base.iter()
            .zip(k)
            .map(|((u, r), (du, dr))| (u.axpy(h, du), r.axpy(h, dr)))
            .collect()
    };
    let k1 = picard_tendencies(&base, c, cfg);
    let k2 = picard_tendencies(&shift(&k1, 0.5 * dt), c, cfg);
    let k3 = picard_tendencies(&shift(&k2, 0.5 * dt), c, cfg);
    let k4 = picard_tendencies(&shift(&k3, dt), c, cfg);
    let mut next = Vec::with_capacity(iterates.len());
    for (i, s) in iterates.iter().enumerate() {
        if i == 0 {
            next.push(s.clone());
            continue;
        }
        let comb = |y: &RealField, sel: fn(&(RealField, RealField)) -> &RealField| {
            let mut out = y.clone();
            for (j, o) in out.values_mut().iter_mut().enumerate() {
                *o += dt / 6.0
                    * (sel(&k1[i]).values()[j]
                        + 2.0 * sel(&k2[i]).values()[j]
                        + 2.0 * sel(&k3[i]).values()[j]
                        + sel(&k4[i]).values()[j]);
            }
            out
        };
        let mut u = comb(&s.u, |p| &p.0);
        let mut rho = comb(&s.rho, |p| &p.1);
        if cfg.filter_p > 0 {
            u = apply_filter(&u, cfg);
            rho = apply_filter(&rho, cfg);
        }
        if !(u.is_finite() && rho.is_finite()) {
            return Err(Error::NonFinite);
        }
        next.push(State { t: s.t, u, rho, c });
    }
    Ok(next)
}
