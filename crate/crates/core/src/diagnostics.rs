//! Blow-up diagnostics: tracking of `m(t) = inf_x u_x` and its minimizer,
//! the a priori bounds `J(t)` and `L(t)`, the two initial-data blow-up
//! criteria, the slope bound along `x = 0`, the `rho_x` amplification law
//! at the minimizer and the `-1/(T - t)` rate fit.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::besov::sobolev_norm;
use crate::characteristics::PeriodicSpline;
use crate::error::{Error, Result};
use crate::grid::{make_grid, spectral_derivative, to_spectrum, trig_eval, Grid, RealField, Spectrum};
use crate::solver::{SolverConfig, State, Termination};

/// Records with `|m|` above this are outside the validity window of the
/// pointwise laws (resolution loss near blow-up).
pub const VALIDITY_SLOPE: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `min_x u_x`.
    pub m: f64,
    /// Location of the minimum.
    pub xi: f64,
    pub u_x_at_0: f64,
    pub rho_x_max: f64,
    pub rho_x_min: f64,
    pub u_inf: f64,
    pub u_l2: f64,
    pub rho_inf: f64,
    pub rho_l2: f64,
    /// `rho_x(t, xi(t))`.
    pub rho_at_xi_slope: f64,
    /// Trapezoid accumulation of `int_0^t m(s) ds`.
    pub int_m: f64,
    /// `||u_x||_inf`.
    pub ux_inf: f64,
    /// Trapezoid accumulation of `int_0^t ||u_x||_inf ds`.
    pub int_ux_inf: f64,
}

/// Grid index of the minimum; ties (to relative 1e-10) go to the leftmost
/// node so mirror-symmetric data always report the same minimizer.
fn leftmost_argmin(values: &[f64]) -> usize {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = 1e-10 * min.abs().max(1.0);
    values
        .iter()
        .position(|&v| v <= min + tol)
        .unwrap_or(0)
}

/// One diagnostics record for `s`; `prev` feeds the running integrals.
pub fn record(s: &State, prev: Option<&DiagnosticsRecord>) -> DiagnosticsRecord {
    let grid = s.grid();
    let u_x = spectral_derivative(&s.u, 1);
    let rho_x = spectral_derivative(&s.rho, 1);
    let j = leftmost_argmin(u_x.values());
    let grid_min = u_x.values()[j];
    let x_j = grid.nodes()[j];

    // one Newton step on the spline of u_x
    let spline = PeriodicSpline::new(&u_x);
    let d1 = spline.derivative(x_j);
    let d2 = spline.second_derivative(x_j);
    let (xi, m) = if d2 > 0.0 && (d1 / d2).abs() <= grid.dx() {
        let cand = grid.wrap(x_j - d1 / d2);
        let value = spline.eval(cand);
        if value <= grid_min {
            (cand, value)
        } else {
            (x_j, grid_min)
        }
    } else {
        (x_j, grid_min)
    };

    let rho_at_xi_slope = PeriodicSpline::new(&rho_x).eval(xi);
    let ux_inf = u_x.max_abs();
    let (int_m, int_ux_inf) = match prev {
        Some(p) => {
            let h = s.t - p.t;
            (
                p.int_m + 0.5 * h * (p.m + m),
                p.int_ux_inf + 0.5 * h * (p.ux_inf + ux_inf),
            )
        }
        None => (0.0, 0.0),
    };
    DiagnosticsRecord {
        t: s.t,
        m,
        xi,
        u_x_at_0: u_x.value_at_origin(),
        rho_x_max: rho_x.max(),
        rho_x_min: rho_x.min(),
        u_inf: s.u.max_abs(),
        u_l2: s.u.l2_norm(),
        rho_inf: s.rho.max_abs(),
        rho_l2: s.rho.l2_norm(),
        rho_at_xi_slope,
        int_m,
        ux_inf,
        int_ux_inf,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsSeries {
    pub n: usize,
    pub half_length: f64,
    pub config: SolverConfig,
    records: Vec<DiagnosticsRecord>,
}

impl DiagnosticsSeries {
    pub fn new(grid: &Arc<Grid>, config: SolverConfig) -> Self {
        Self {
            n: grid.n(),
            half_length: grid.half_length(),
            config,
            records: Vec::new(),
        }
    }

    /// Series from existing records; times must be strictly increasing.
    pub fn from_records(
        grid: &Arc<Grid>,
        config: SolverConfig,
        records: Vec<DiagnosticsRecord>,
    ) -> Result<Self> {
        if records.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::InvalidParameter(
                "record times must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            n: grid.n(),
            half_length: grid.half_length(),
            config,
            records,
        })
    }

    pub fn push(&mut self, rec: DiagnosticsRecord) {
        if let Some(last) = self.records.last() {
            assert!(rec.t > last.t, "record times must increase: {} after {}", rec.t, last.t);
        }
        self.records.push(rec);
    }

    pub fn records(&self) -> &[DiagnosticsRecord] {
        &self.records
    }

    pub fn last(&self) -> Option<&DiagnosticsRecord> {
        self.records.last()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records up to (excluding) the first one with `|m| > limit`.
    pub fn validity_window(&self, limit: f64) -> &[DiagnosticsRecord] {
        let end = self
            .records
            .iter()
            .position(|r| r.m.abs() > limit)
            .unwrap_or(self.records.len());
        &self.records[..end]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    GlobalSoFar,
    Blowup,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyReport {
    pub verdict: Classification,
    /// `int_0^t ||u_x||_inf` up to the last record; diverges at blow-up.
    pub integral_ux_inf: f64,
}

/// Blow-up iff the last record reached the slope cap and `m` was
/// non-increasing over the final ten records.
pub fn classify(series: &DiagnosticsSeries, cfg: &SolverConfig) -> ClassifyReport {
    let recs = series.records();
    let integral_ux_inf = recs.last().map_or(0.0, |r| r.int_ux_inf);
    let capped = recs.last().is_some_and(|r| r.m <= -cfg.slope_cap);
    let tail = &recs[recs.len().saturating_sub(10)..];
    let decreasing = tail.windows(2).all(|w| w[1].m <= w[0].m);
    let verdict = if capped && decreasing {
        Classification::Blowup
    } else {
        Classification::GlobalSoFar
    };
    ClassifyReport {
        verdict,
        integral_ux_inf,
    }
}

/// Convenience: the termination reason agrees with the classification.
pub fn classify_run(series: &DiagnosticsSeries, termination: Termination) -> ClassifyReport {
    let mut report = classify(series, &series.config);
    if termination != Termination::BlowupDetected {
        report.verdict = Classification::GlobalSoFar;
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    /// Root of the fitted line, the estimated blow-up time.
    pub t_est: f64,
    /// Minus the fitted slope of `-1/m` against `t`; 1 for the exact rate.
    pub slope: f64,
    pub r2: f64,
    pub points: usize,
}

pub const RATE_WINDOW_START: f64 = 10.0;
pub const RATE_MIN_POINTS: usize = 20;

/// Least-squares line through `(t, -1/m(t))` over records with
/// `m in [-slope_cap, -10]`.
pub fn fit_rate(series: &DiagnosticsSeries) -> Result<RateFit> {
    let cap = series.config.slope_cap;
    let pts: Vec<(f64, f64)> = series
        .records()
        .iter()
        .filter(|r| r.m <= -RATE_WINDOW_START && r.m >= -cap)
        .map(|r| (r.t, -1.0 / r.m))
        .collect();
    if pts.len() < RATE_MIN_POINTS {
        return Err(Error::InsufficientRecords {
            needed: RATE_MIN_POINTS,
            have: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for &(t, y) in &pts {
        let dt = t - tm;
        let dy = y - ym;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    let b = sty / stt;
    let a = ym - b * tm;
    let ss_res: f64 = pts.iter().map(|&(t, y)| (y - a - b * t).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(RateFit {
        t_est: -a / b,
        slope: -b,
        r2,
        points: pts.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    BlowupPredicted,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub name: String,
    pub applicable: bool,
    pub predicted_t: Option<f64>,
    pub quantities: BTreeMap<String, f64>,
    pub verdict: Verdict,
}

/// Growth-dependent bracket shared by `J(t)` and `L(t)`:
///
/// `3/2 t e^{2|c|t} (2||u0||^2 + |c| t (1 + 8G) (e^{2G} R)^4 + |c|/4 (e^{2G} R)^2) + ||u0||_inf`
///
/// with `G = M t` for `J` and `G = int_0^t ||u_x||_inf` for `L`.
fn growth_bound(t: f64, growth: f64, u0_l2: f64, u0_inf: f64, rho0_norm: f64, c: f64) -> f64 {
    let c = c.abs();
    let rho = (2.0 * growth).exp() * rho0_norm;
    1.5 * t
        * (2.0 * c * t).exp()
        * (2.0 * u0_l2 * u0_l2 + c * t * (1.0 + 8.0 * growth) * rho.powi(4) + 0.25 * c * rho * rho)
        + u0_inf
}

/// `J(t)`, the a priori bound on `||u(t)||_inf` under the density-growth
/// hypothesis with rate `M`.
pub fn j_bound(t: f64, m_rate: f64, u0_l2: f64, u0_inf: f64, rho0_norm: f64, c: f64) -> f64 {
    growth_bound(t, m_rate * t, u0_l2, u0_inf, rho0_norm, c)
}

/// `L(t)`, the same bound with `M t` replaced by `int_0^t ||u_x||_inf`.
pub fn l_bound(t: f64, int_ux_inf: f64, u0_l2: f64, u0_inf: f64, rho0_norm: f64, c: f64) -> f64 {
    growth_bound(t, int_ux_inf, u0_l2, u0_inf, rho0_norm, c)
}

/// Default hypothesis rate `M = 2 max(1, ||u0'||_inf)`.
pub fn default_growth_rate(u0: &RealField) -> f64 {
    2.0 * spectral_derivative(u0, 1).max_abs().max(1.0)
}

/// Location and value of `min u'` found by sampling the trigonometric
/// interpolant on a 16x finer grid and polishing with Newton steps.
/// Ties go to the leftmost sample.
pub fn locate_min_slope(u: &RealField) -> (f64, f64) {
    let grid = u.grid();
    let spec = to_spectrum(u);
    let d1 = spec.derivative(1);
    let d2 = spec.derivative(2);
    let d3 = spec.derivative(3);
    let dense = dense_samples(&d1, 16);
    let fine_dx = grid.dx() / 16.0;
    let j = leftmost_argmin(&dense);
    let mut x = -grid.half_length() + j as f64 * fine_dx;
    let mut best = (x, dense[j]);
    for _ in 0..8 {
        let g = trig_eval(&d2, x);
        let h = trig_eval(&d3, x);
        if !(h > 0.0) {
            break;
        }
        let step = g / h;
        if step.abs() > fine_dx {
            break;
        }
        x -= step;
        let value = trig_eval(&d1, x);
        if value <= best.1 {
            best = (grid.wrap(x), value);
        }
        if step.abs() < 1e-15 * grid.half_length() {
            break;
        }
    }
    best
}

/// Zero-padded inverse transform: samples of the trigonometric interpolant
/// on a grid `factor` times finer.
fn dense_samples(spec: &Spectrum, factor: usize) -> Vec<f64> {
    let grid = spec.grid();
    let n = grid.n();
    let fine = make_grid(n * factor, grid.half_length()).expect("refined grid is valid");
    let mut coeffs = vec![rustfft::num_complex::Complex64::new(0.0, 0.0); n * factor];
    for b in 0..n {
        let k = crate::grid::signed_index(b, n);
        let c = spec.coeffs()[b];
        if b == n / 2 {
            // split the Nyquist mode symmetrically
            coeffs[n / 2] += 0.5 * c;
            coeffs[n * factor - n / 2] += 0.5 * c;
        } else {
            coeffs[k.rem_euclid((n * factor) as i64) as usize] = c;
        }
    }
    let fine_spec = Spectrum::new(fine, coeffs).expect("length matches");
    crate::grid::from_spectrum(&fine_spec).into_values()
}

/// Initial-data criterion with threshold `K(T*)`:
///
/// `T* = ln(1 + 2/eps) / (sqrt(|c| + 1) (||rho0||_{H^{s-1}} + 1))`,
/// `K(T*) = (3(|c|+1)/4 (e^{2 M T*} (||rho0||_{H^{s-1}} + 1))^2 + 3/2 J(T*)^2)^{1/2}`,
///
/// blow-up predicted before `T*` if `min u0' < -(1 + eps) K(T*)`.
/// `m_rate = None` uses [`default_growth_rate`].
pub fn criterion_thm51(
    u0: &RealField,
    rho0: &RealField,
    c: f64,
    eps: f64,
    m_rate: Option<f64>,
    s_sob: f64,
) -> Result<CriterionReport> {
    u0.same_grid(rho0)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if !(s_sob > 1.5) {
        return Err(Error::InvalidParameter(format!("s_sob must exceed 3/2, got {s_sob}")));
    }
    let m_used = m_rate.unwrap_or_else(|| default_growth_rate(u0));
    if !(m_used > 0.0 && m_used.is_finite()) {
        return Err(Error::InvalidParameter(format!("M must be positive, got {m_used}")));
    }
    let rho_norm = sobolev_norm(rho0, s_sob - 1.0);
    let u0_l2 = u0.l2_norm();
    let u0_inf = u0.max_abs();
    let t_star = (1.0 + 2.0 / eps).ln() / ((c.abs() + 1.0).sqrt() * (rho_norm + 1.0));
    let j = j_bound(t_star, m_used, u0_l2, u0_inf, rho_norm, c);
    let growth = (2.0 * m_used * t_star).exp() * (rho_norm + 1.0);
    let k = (0.75 * (c.abs() + 1.0) * growth * growth + 1.5 * j * j).sqrt();
    let (x0, min_slope) = locate_min_slope(u0);
    let threshold = -(1.0 + eps) * k;
    let fires = min_slope < threshold;

    let quantities = BTreeMap::from([
        ("T_star".to_string(), t_star),
        ("J_T_star".to_string(), j),
        ("K_T_star".to_string(), k),
        ("M_used".to_string(), m_used),
        ("eps".to_string(), eps),
        ("s_sob".to_string(), s_sob),
        ("rho0_sobolev_norm".to_string(), rho_norm),
        ("u0_l2".to_string(), u0_l2),
        ("u0_inf".to_string(), u0_inf),
        ("min_u0_prime".to_string(), min_slope),
        ("x0".to_string(), x0),
        ("threshold".to_string(), threshold),
    ]);
    Ok(CriterionReport {
        name: "initial_slope_threshold".into(),
        applicable: true,
        predicted_t: fires.then_some(t_star),
        quantities,
        verdict: if fires {
            Verdict::BlowupPredicted
        } else {
            Verdict::Inconclusive
        },
    })
}

/// Largest `|f(x_j) - sign f(-x_j)|` over the grid.
fn parity_defect(f: &RealField, sign: f64) -> f64 {
    let grid = f.grid();
    let v = f.values();
    (0..grid.n())
        .map(|j| (v[j] - sign * v[grid.mirror_index(j)]).abs())
        .fold(0.0, f64::max)
}

pub const SYMMETRY_TOLERANCE: f64 = 1e-10;
pub const RHO_ORIGIN_TOLERANCE: f64 = 1e-12;

/// Symmetric-data criterion: with `c >= 0`, `u0` odd, `rho0` even,
/// `u0'(0) < 0` and `rho0(0) = 0`, blow-up happens by `T0 = -1/u0'(0)`.
/// Also reports the minimizer `x0` of `u0'` and `rho0'(x0)`, which arms
/// the `rho_x` blow-up clause when nonzero.
pub fn criterion_thm52(u0: &RealField, rho0: &RealField, c: f64) -> Result<CriterionReport> {
    u0.same_grid(rho0)?;
    let u0_prime = spectral_derivative(u0, 1);
    let rho0_prime = spectral_derivative(rho0, 1);
    let slope0 = u0_prime.value_at_origin();
    let odd_defect = parity_defect(u0, -1.0);
    let even_defect = parity_defect(rho0, 1.0);
    let rho_at_0 = rho0.value_at_origin();
    let applicable = c >= 0.0
        && odd_defect <= SYMMETRY_TOLERANCE
        && even_defect <= SYMMETRY_TOLERANCE
        && slope0 < 0.0
        && rho_at_0.abs() <= RHO_ORIGIN_TOLERANCE;
    let (x0, min_slope) = locate_min_slope(u0);
    let rho0_prime_x0 = trig_eval(&to_spectrum(&rho0_prime), x0);
    let t0 = -1.0 / slope0;

    let mut quantities = BTreeMap::from([
        ("u0_prime_0".to_string(), slope0),
        ("odd_defect".to_string(), odd_defect),
        ("even_defect".to_string(), even_defect),
        ("rho0_at_0".to_string(), rho_at_0),
        ("x0".to_string(), x0),
        ("min_u0_prime".to_string(), min_slope),
        ("rho0_prime_x0".to_string(), rho0_prime_x0),
    ]);
    if applicable {
        quantities.insert("T0".to_string(), t0);
        quantities.insert(
            "rho_clause_armed".to_string(),
            if rho0_prime_x0.abs() > 1e-10 { 1.0 } else { 0.0 },
        );
    }
    Ok(CriterionReport {
        name: "odd_even_symmetry".into(),
        applicable,
        predicted_t: applicable.then_some(t0),
        quantities,
        verdict: if applicable {
            Verdict::BlowupPredicted
        } else {
            Verdict::Inconclusive
        },
    })
}

/// Max over the validity window of `u_x(t, 0) - u0'(0) / (1 + t u0'(0))`;
/// nonpositive confirms the Riccati bound at the origin.
pub fn check_slope_bound(series: &DiagnosticsSeries, u0_prime_0: f64) -> f64 {
    series
        .validity_window(VALIDITY_SLOPE)
        .iter()
        .filter(|r| 1.0 + r.t * u0_prime_0 > 0.0)
        .map(|r| r.u_x_at_0 - u0_prime_0 / (1.0 + r.t * u0_prime_0))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Max over the validity window of the relative gap between
/// `rho_x(t, xi(t))` and `rho0'(x0) exp(-3 int_0^t m)`. With
/// `rho0'(x0) = 0` the law degenerates and the absolute value of
/// `rho_x(t, xi(t))` is returned instead.
pub fn check_rho_slope_law(series: &DiagnosticsSeries, rho0_prime_x0: f64) -> f64 {
    let window = series.validity_window(VALIDITY_SLOPE);
    if rho0_prime_x0.abs() < 1e-14 {
        return window
            .iter()
            .map(|r| r.rho_at_xi_slope.abs())
            .fold(0.0, f64::max);
    }
    window
        .iter()
        .map(|r| {
            let predicted = rho0_prime_x0 * (-3.0 * r.int_m).exp();
            ((r.rho_at_xi_slope - predicted) / predicted).abs()
        })
        .fold(0.0, f64::max)
}

/// Max over records of `||u(t)||_inf - L(t)`; nonpositive confirms the
/// a priori sup bound.
pub fn check_linf_bound(
    series: &DiagnosticsSeries,
    u0: &RealField,
    rho0: &RealField,
    c: f64,
    s_sob: f64,
) -> f64 {
    let rho_norm = sobolev_norm(rho0, s_sob - 1.0);
    let u0_l2 = u0.l2_norm();
    let u0_inf = u0.max_abs();
    let t0 = series.records().first().map_or(0.0, |r| r.t);
    series
        .records()
        .iter()
        .map(|r| r.u_inf - l_bound(r.t - t0, r.int_ux_inf, u0_l2, u0_inf, rho_norm, c))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn synthetic(m_of_t: impl Fn(f64) -> f64, ts: &[f64]) -> DiagnosticsSeries {
        let g = make_grid(16, 1.0).unwrap();
        let recs = ts
            .iter()
            .map(|&t| DiagnosticsRecord {
                t,
                m: m_of_t(t),
                xi: 0.0,
                u_x_at_0: m_of_t(t),
                rho_x_max: 0.0,
                rho_x_min: 0.0,
                u_inf: 0.0,
                u_l2: 0.0,
                rho_inf: 0.0,
                rho_l2: 0.0,
                rho_at_xi_slope: 0.0,
                int_m: 0.0,
                ux_inf: 0.0,
                int_ux_inf: 0.0,
            })
            .collect();
        DiagnosticsSeries::from_records(&g, SolverConfig::default(), recs).unwrap()
    }

    fn approach_times(t_blow: f64) -> Vec<f64> {
        // geometric approach to T, as the adaptive step produces
        (0..200).map(|i| t_blow - 0.2 * 0.96f64.powi(i)).collect()
    }

    #[test]
    fn fit_recovers_unit_rate() {
        let s = synthetic(|t| -1.0 / (2.0 - t), &approach_times(2.0));
        let fit = fit_rate(&s).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-10);
        assert!((fit.t_est - 2.0).abs() < 1e-10);
        assert!(fit.r2 > 1.0 - 1e-12);
    }

    #[test]
    fn fit_detects_half_rate() {
        let s = synthetic(|t| -2.0 / (2.0 - t), &approach_times(2.0));
        let fit = fit_rate(&s).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-10);
        assert!((fit.t_est - 2.0).abs() < 1e-10);
    }

    #[test]
    fn fit_needs_enough_points() {
        let s = synthetic(|_| -1.0, &[0.0, 1.0, 2.0]);
        assert!(matches!(
            fit_rate(&s),
            Err(Error::InsufficientRecords { needed: 20, have: 0 })
        ));
    }

    #[test]
    fn record_of_sine() {
        let g = make_grid(128, PI).unwrap();
        let u = RealField::from_fn(&g, |x| x.sin());
        let s = State::new(u, RealField::zeros(&g), 1.0).unwrap();
        let r = record(&s, None);
        assert!((r.m + 1.0).abs() < 1e-8);
        assert!(g.periodic_offset(r.xi, PI).abs() < 1e-6);
        assert!((r.u_x_at_0 - 1.0).abs() < 1e-12);
        assert!(r.m <= r.u_x_at_0);
        assert_eq!(r.int_m, 0.0);
    }

    #[test]
    fn record_of_zero() {
        let g = make_grid(32, 2.0).unwrap();
        let r = record(&State::zero(&g, 0.0), None);
        assert_eq!(r.m, 0.0);
        assert_eq!(r.u_inf, 0.0);
        assert_eq!(r.u_l2, 0.0);
        assert_eq!(r.rho_x_max, 0.0);
    }

    #[test]
    fn slope_bound_equality_case() {
        let a = -2.0;
        let s = synthetic(|t| a / (1.0 + t * a), &[0.0, 0.1, 0.2, 0.3]);
        assert!(check_slope_bound(&s, a).abs() < 1e-15);
        let s0 = synthetic(|_| a, &[0.0]);
        assert_eq!(check_slope_bound(&s0, a), 0.0);
    }

    #[test]
    fn classify_zero_run_is_global() {
        let s = synthetic(|_| 0.0, &[0.0, 0.5, 1.0]);
        assert_eq!(classify(&s, &SolverConfig::default()).verdict, Classification::GlobalSoFar);
    }

    #[test]
    fn classify_capped_decreasing_is_blowup() {
        let s = synthetic(|t| -1.0 / (1.0 - t), &approach_times(1.0));
        let cfg = SolverConfig {
            slope_cap: 1.0 / (0.2 * 0.96f64.powi(199)) * 0.99,
            ..SolverConfig::default()
        };
        assert_eq!(classify(&s, &cfg).verdict, Classification::Blowup);
    }

    #[test]
    fn bounds_reduce_to_data_at_zero() {
        assert_eq!(j_bound(0.0, 3.0, 2.0, 0.7, 1.0, 1.0), 0.7);
        assert_eq!(l_bound(0.0, 0.0, 2.0, 0.7, 1.0, 1.0), 0.7);
        // c = 0, rho0 = 0: J = 3 t ||u0||^2 + ||u0||_inf
        let j = j_bound(0.5, 10.0, 2.0, 0.7, 0.0, 0.0);
        assert!((j - (3.0 * 0.5 * 4.0 + 0.7)).abs() < 1e-14);
    }

    #[test]
    fn min_slope_of_sine() {
        let g = make_grid(64, PI).unwrap();
        let u = RealField::from_fn(&g, |x| -(2.0 * x).sin());
        let (x0, v) = locate_min_slope(&u);
        assert!((v + 2.0).abs() < 1e-12);
        // -2 cos(2x) is minimal at x = 0 and x = +-pi; leftmost is -pi
        assert!(g.periodic_offset(x0, -PI).abs() < 1e-9);
    }
}
