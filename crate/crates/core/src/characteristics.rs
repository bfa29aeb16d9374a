//! Lagrangian markers for the flow map `q_t = u(t, q)`, `q(0, x) = x`.
//!
//! Each marker carries its label `x_i`, current position `q(t, x_i)`, the
//! accumulated divergence `int_0^t u_x(s, q(s, x_i)) ds` (so that
//! `q_x = exp(accumulated)`) and the initial density `rho_0(x_i)`. Along a
//! smooth solution `rho(t, q) q_x^2 = rho_0`, which
//! [`conservation_residual`] measures.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{from_spectrum, to_spectrum, trig_eval, Grid, RealField};
use crate::solver::State;

/// Periodic cubic spline through the grid samples of a field.
#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    grid: Arc<Grid>,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl PeriodicSpline {
    /// The cyclic tridiagonal system for the node curvatures is circulant,
    /// so it is solved mode by mode with the grid's FFT.
    pub fn new(f: &RealField) -> Self {
        let grid = f.grid().clone();
        let n = grid.n();
        let h = grid.dx();
        let weights: Vec<f64> = (0..n)
            .map(|b| {
                let c = (2.0 * std::f64::consts::PI * b as f64 / n as f64).cos();
                6.0 / (h * h) * (2.0 * c - 2.0) / (4.0 + 2.0 * c)
            })
            .collect();
        let second = from_spectrum(&to_spectrum(f).apply_weights(&weights)).into_values();
        Self {
            grid,
            values: f.values().to_vec(),
            second,
        }
    }

    fn locate(&self, x: f64) -> (usize, usize, f64) {
        let n = self.grid.n();
        let s = (x + self.grid.half_length()) / self.grid.dx();
        let s = s.rem_euclid(n as f64);
        let nearest = s.round();
        // snap onto a node so node evaluation returns the sample exactly
        let (j, t) = if (s - nearest).abs() < 1e-11 {
            ((nearest as usize) % n, 0.0)
        } else {
            let j = (s.floor() as usize).min(n - 1);
            (j, (s - j as f64).clamp(0.0, 1.0))
        };
        (j, (j + 1) % n, t)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (j, k, t) = self.locate(x);
        let h = self.grid.dx();
        let u = 1.0 - t;
        u * self.values[j]
            + t * self.values[k]
            + h * h / 6.0 * ((u * u * u - u) * self.second[j] + (t * t * t - t) * self.second[k])
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let (j, k, t) = self.locate(x);
        let h = self.grid.dx();
        let u = 1.0 - t;
        (self.values[k] - self.values[j]) / h
            + h / 6.0 * (-(3.0 * u * u - 1.0) * self.second[j] + (3.0 * t * t - 1.0) * self.second[k])
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let (j, k, t) = self.locate(x);
        (1.0 - t) * self.second[j] + t * self.second[k]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterpolationMode {
    #[default]
    Spline,
    /// Exact trigonometric interpolant, O(N) per point.
    Trigonometric,
}

pub fn interpolate(f: &RealField, points: &[f64], mode: InterpolationMode) -> Vec<f64> {
    match mode {
        InterpolationMode::Spline => {
            let s = PeriodicSpline::new(f);
            points.iter().map(|&x| s.eval(x)).collect()
        }
        InterpolationMode::Trigonometric => {
            let spec = to_spectrum(f);
            points.iter().map(|&x| trig_eval(&spec, x)).collect()
        }
    }
}

/// Splines of one velocity field and its slope, as seen by one RK stage.
#[derive(Debug, Clone)]
pub struct StageVelocity {
    u: PeriodicSpline,
    u_x: PeriodicSpline,
}

impl StageVelocity {
    pub fn new(u: &RealField, u_x: &RealField) -> Self {
        Self {
            u: PeriodicSpline::new(u),
            u_x: PeriodicSpline::new(u_x),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicBundle {
    pub labels: Vec<f64>,
    pub positions: Vec<f64>,
    pub accumulated_divergence: Vec<f64>,
    pub rho0: Vec<f64>,
    pub t: f64,
    grid: Arc<Grid>,
}

/// `m` equispaced markers starting at `-L`, sitting on their labels.
pub fn seed_bundle(grid: &Arc<Grid>, m: usize, rho0: &RealField) -> Result<CharacteristicBundle> {
    let n = grid.n();
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!(
            "marker count must lie in 1..={n}, got {m}"
        )));
    }
    let spacing = grid.period() / m as f64;
    let labels: Vec<f64> = (0..m)
        .map(|i| -grid.half_length() + i as f64 * spacing)
        .collect();
    let rho0_samples = if n.is_multiple_of(m) {
        let stride = n / m;
        (0..m).map(|i| rho0.values()[i * stride]).collect()
    } else {
        interpolate(rho0, &labels, InterpolationMode::Spline)
    };
    Ok(CharacteristicBundle {
        positions: labels.clone(),
        accumulated_divergence: vec![0.0; m],
        rho0: rho0_samples,
        labels,
        t: 0.0,
        grid: grid.clone(),
    })
}

/// Markers at arbitrary labels (wrapped into the window), e.g. a single
/// probe following the characteristic through a chosen point.
pub fn seed_bundle_at(
    grid: &Arc<Grid>,
    labels: &[f64],
    rho0: &RealField,
) -> CharacteristicBundle {
    let labels: Vec<f64> = labels.iter().map(|&x| grid.wrap(x)).collect();
    CharacteristicBundle {
        positions: labels.clone(),
        accumulated_divergence: vec![0.0; labels.len()],
        rho0: interpolate(rho0, &labels, InterpolationMode::Spline),
        labels,
        t: 0.0,
        grid: grid.clone(),
    }
}

impl CharacteristicBundle {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// True if the markers, read cyclically, are still in label order.
    pub fn is_order_preserving(&self) -> bool {
        let m = self.positions.len();
        if m < 2 {
            return true;
        }
        // unwrapped gaps between consecutive markers must be positive and sum to one period
        let period = self.grid.period();
        let mut total = 0.0;
        for i in 0..m {
            let a = self.positions[i];
            let b = self.positions[(i + 1) % m];
            let gap = (b - a).rem_euclid(period);
            if gap <= 0.0 {
                return false;
            }
            total += gap;
        }
        (total - period).abs() < 1e-9 * period
    }

    /// Finite-difference slope of position vs label (centered, periodic).
    pub fn position_slope(&self) -> Vec<f64> {
        let m = self.positions.len();
        let period = self.grid.period();
        let spacing = period / m as f64;
        (0..m)
            .map(|i| {
                let prev = self.positions[(i + m - 1) % m];
                let next = self.positions[(i + 1) % m];
                let gap = (next - prev).rem_euclid(period);
                gap / (2.0 * spacing)
            })
            .collect()
    }
}

/// RK4 step of the markers with one velocity field per stage (times
/// `t`, `t + dt/2`, `t + dt/2`, `t + dt`). The divergence integral uses the
/// same stage points.
pub fn advance_bundle_staged(
    b: &CharacteristicBundle,
    stages: [&StageVelocity; 4],
    dt: f64,
) -> CharacteristicBundle {
    let mut out = b.clone();
    for i in 0..b.len() {
        let q = b.positions[i];
        let k1 = stages[0].u.eval(q);
        let a1 = stages[0].u_x.eval(q);
        let q2 = q + 0.5 * dt * k1;
        let k2 = stages[1].u.eval(q2);
        let a2 = stages[1].u_x.eval(q2);
        let q3 = q + 0.5 * dt * k2;
        let k3 = stages[2].u.eval(q3);
        let a3 = stages[2].u_x.eval(q3);
        let q4 = q + dt * k3;
        let k4 = stages[3].u.eval(q4);
        let a4 = stages[3].u_x.eval(q4);
        out.positions[i] = b.grid.wrap(q + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        out.accumulated_divergence[i] += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    }
    out.t = b.t + dt;
    out
}

/// RK4 step of the markers through a velocity field frozen over the step.
pub fn advance_bundle(
    b: &CharacteristicBundle,
    u: &RealField,
    u_x: &RealField,
    dt: f64,
) -> CharacteristicBundle {
    let v = StageVelocity::new(u, u_x);
    advance_bundle_staged(b, [&v, &v, &v, &v], dt)
}

/// `q_x(t, x_i) = exp(int_0^t u_x(s, q(s, x_i)) ds)`.
pub fn jacobian(b: &CharacteristicBundle) -> Vec<f64> {
    b.accumulated_divergence.iter().map(|a| a.exp()).collect()
}

/// `max_i | rho(t, q_i) q_x(t, x_i)^2 - rho_0(x_i) |`.
pub fn conservation_residual(s: &State, b: &CharacteristicBundle) -> Result<f64> {
    if (s.t - b.t).abs() > 1e-9 * s.t.abs().max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "state time {} differs from bundle time {}",
            s.t, b.t
        )));
    }
    let rho = interpolate(&s.rho, &b.positions, InterpolationMode::Spline);
    Ok(rho
        .iter()
        .zip(jacobian(b))
        .zip(&b.rho0)
        .map(|((r, qx), r0)| (r * qx * qx - r0).abs())
        .fold(0.0, f64::max))
}
