//! Periodic grid on `[-L, L)`, discrete Fourier pair and spectral calculus.
//!
//! Transform normalization: the forward transform carries the `1/N` factor,
//! so `coeffs[0]` is the sample mean and the inverse is a plain sum. With
//! this convention `sum |F_k|^2 = (1/N) sum f_j^2`.
//!
//! Coefficients are stored in FFT bin order: bin `b` holds the signed
//! wavenumber index `b` for `b < N/2` and `b - N` otherwise, so the
//! unpaired Nyquist bin `N/2` is the index `-N/2`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub struct Grid {
    n: usize,
    half_length: f64,
    dx: f64,
    nodes: Vec<f64>,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("half_length", &self.half_length)
            .field("dx", &self.dx)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.half_length == other.half_length
    }
}

/// Builds the grid with `n` nodes on `[-half_length, half_length)`.
pub fn make_grid(n: usize, half_length: f64) -> Result<Arc<Grid>> {
    if n < 16 || !n.is_power_of_two() {
        return Err(Error::InvalidGridSize(n));
    }
    if !(half_length > 0.0 && half_length.is_finite()) {
        return Err(Error::InvalidHalfLength(half_length));
    }
    let dx = 2.0 * half_length / n as f64;
    let nodes = (0..n).map(|j| -half_length + j as f64 * dx).collect();
    let wavenumbers = (0..n)
        .map(|b| PI * signed_index(b, n) as f64 / half_length)
        .collect();
    let mut planner = FftPlanner::new();
    Ok(Arc::new(Grid {
        n,
        half_length,
        dx,
        nodes,
        wavenumbers,
        forward: planner.plan_fft_forward(n),
        inverse: planner.plan_fft_inverse(n),
    }))
}

/// Signed wavenumber index of FFT bin `b` on an `n`-point grid, in `[-n/2, n/2)`.
pub fn signed_index(b: usize, n: usize) -> i64 {
    if b < n / 2 {
        b as i64
    } else {
        b as i64 - n as i64
    }
}

impl Grid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    /// Full period `2L`.
    pub fn period(&self) -> f64 {
        2.0 * self.half_length
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Angular wavenumbers `pi k / L`, in bin order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Largest resolved angular wavenumber `pi N / (2L)`.
    pub fn max_wavenumber(&self) -> f64 {
        PI * (self.n / 2) as f64 / self.half_length
    }

    /// Index of the node at `x = 0`.
    pub fn origin_index(&self) -> usize {
        self.n / 2
    }

    /// Index of the node mirrored through the origin, `x_j -> -x_j` (mod period).
    pub fn mirror_index(&self, j: usize) -> usize {
        (self.n - j) % self.n
    }

    /// Maps `x` into `[-L, L)`.
    pub fn wrap(&self, x: f64) -> f64 {
        let p = self.period();
        let y = (x + self.half_length).rem_euclid(p) - self.half_length;
        // rem_euclid can return p itself after rounding
        if y >= self.half_length {
            y - p
        } else {
            y
        }
    }

    /// Signed distance from `b` to `a` reduced to `[-L, L)`.
    pub fn periodic_offset(&self, a: f64, b: f64) -> f64 {
        self.wrap(a - b)
    }
}

/// Samples of a real function at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::LengthMismatch {
                expected: grid.n,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values })
    }

    /// Unchecked constructor for arithmetic results; callers that can
    /// produce non-finite values check [`RealField::is_finite`].
    pub(crate) fn from_raw(grid: Arc<Grid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n);
        Self { grid, values }
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self::from_raw(grid.clone(), vec![0.0; grid.n])
    }

    pub fn constant(grid: &Arc<Grid>, value: f64) -> Self {
        Self::from_raw(grid.clone(), vec![value; grid.n])
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes.iter().map(|&x| f(x)).collect();
        Self::from_raw(grid.clone(), values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn same_grid(&self, other: &RealField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination; panics on a grid-size mismatch.
    pub fn zip_map(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.values.len(), other.values.len(), "grid size mismatch");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::from_raw(self.grid.clone(), values)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &RealField) -> Self {
        self.zip_map(other, |x, y| x + a * y)
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Trapezoid `L^2` norm over one period (exact for trigonometric
    /// polynomials resolved on the grid).
    pub fn l2_norm(&self) -> f64 {
        (self.grid.dx * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// Trapezoid `L^p` norm; `p = inf` gives the max norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs();
        }
        if p == 2.0 {
            return self.l2_norm();
        }
        (self.grid.dx * self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
    }

    /// Trapezoid inner product.
    pub fn dot(&self, other: &RealField) -> f64 {
        self.grid.dx
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .sum::<f64>()
    }

    pub fn value_at_origin(&self) -> f64 {
        self.values[self.grid.origin_index()]
    }
}

/// Fourier coefficients in bin order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: Arc<Grid>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n {
            return Err(Error::LengthMismatch {
                expected: grid.n,
                got: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n],
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient for signed index `k` in `[-N/2, N/2)`.
    pub fn mode(&self, k: i64) -> Complex64 {
        let n = self.grid.n as i64;
        self.coeffs[k.rem_euclid(n) as usize]
    }

    /// Multiplies every coefficient by `symbol(xi_k)`.
    pub fn apply_symbol(&self, symbol: impl Fn(f64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&self.grid.wavenumbers)
            .map(|(&c, &xi)| c * symbol(xi))
            .collect();
        Self {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// Multiplies every coefficient by a real, bin-indexed weight.
    pub fn apply_weights(&self, weights: &[f64]) -> Self {
        assert_eq!(weights.len(), self.coeffs.len());
        let coeffs = self
            .coeffs
            .iter()
            .zip(weights)
            .map(|(&c, &w)| c * w)
            .collect();
        Self {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// Multiplies by `(i xi_k)^order`; odd orders zero the Nyquist bin.
    pub fn derivative(&self, order: u32) -> Self {
        let nyquist = self.grid.n / 2;
        let mut out = self.apply_symbol(|xi| Complex64::new(0.0, xi).powu(order));
        if order % 2 == 1 {
            out.coeffs[nyquist] = Complex64::new(0.0, 0.0);
        }
        out
    }

    /// `sum |F_k|^2`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn add(&self, other: &Spectrum) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            grid: self.grid.clone(),
            coeffs,
        }
    }
}

pub fn to_spectrum(f: &RealField) -> Spectrum {
    let grid = &f.grid;
    let scale = 1.0 / grid.n as f64;
    let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    grid.forward.process(&mut buf);
    for c in &mut buf {
        *c *= scale;
    }
    Spectrum {
        grid: grid.clone(),
        coeffs: buf,
    }
}

pub fn from_spectrum(spec: &Spectrum) -> RealField {
    let mut buf = spec.coeffs.clone();
    spec.grid.inverse.process(&mut buf);
    RealField::from_raw(spec.grid.clone(), buf.into_iter().map(|c| c.re).collect())
}

pub fn spectral_derivative(f: &RealField, order: u32) -> RealField {
    if order == 0 {
        return f.clone();
    }
    from_spectrum(&to_spectrum(f).derivative(order))
}

/// Two-thirds rule: zeroes every mode with `|k| > N/3`.
pub fn dealias(spec: &Spectrum) -> Spectrum {
    let n = spec.grid.n;
    let mut out = spec.clone();
    for (b, c) in out.coeffs.iter_mut().enumerate() {
        if 3 * signed_index(b, n).unsigned_abs() as usize > n {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    out
}

/// Exponential filter `exp(-alpha (|k| / (N/2))^(2p))`.
pub fn exp_filter(spec: &Spectrum, alpha: f64, order: u32) -> Spectrum {
    let n = spec.grid.n;
    let kmax = (n / 2) as f64;
    let weights: Vec<f64> = (0..n)
        .map(|b| {
            let r = signed_index(b, n).unsigned_abs() as f64 / kmax;
            (-alpha * r.powi(2 * order as i32)).exp()
        })
        .collect();
    spec.apply_weights(&weights)
}

/// Exact trigonometric interpolant of the grid samples, evaluated at `x`.
/// The Nyquist mode contributes as a cosine so the result is real.
pub fn trig_eval(spec: &Spectrum, x: f64) -> f64 {
    let grid = &spec.grid;
    let shift = x + grid.half_length;
    let nyquist = grid.n / 2;
    let mut acc = 0.0;
    for (b, (c, &xi)) in spec.coeffs.iter().zip(&grid.wavenumbers).enumerate() {
        let phase = xi * shift;
        if b == nyquist {
            acc += c.re * phase.cos();
        } else {
            acc += c.re * phase.cos() - c.im * phase.sin();
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_unit_half_period() {
        let g = make_grid(16, PI).unwrap();
        assert!((g.dx() - 2.0 * PI / 16.0).abs() < 1e-15);
        for b in 0..16 {
            let k = signed_index(b, 16) as f64;
            assert!((g.wavenumbers()[b] - k).abs() < 1e-14);
        }
        assert_eq!(g.wavenumbers()[0], 0.0);
        assert_eq!(signed_index(8, 16), -8);
    }

    #[test]
    fn grid_wavenumber_scaling() {
        let g = make_grid(16, 8.0).unwrap();
        assert!((g.wavenumbers()[1] - PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert_eq!(make_grid(15, 1.0).unwrap_err(), Error::InvalidGridSize(15));
        assert!(make_grid(8, 1.0).is_err());
        assert!(make_grid(24, 1.0).is_err());
        assert!(make_grid(16, 0.0).is_err());
        assert!(make_grid(16, -1.0).is_err());
        assert!(make_grid(16, f64::NAN).is_err());
    }

    #[test]
    fn nodes_cover_one_period() {
        let g = make_grid(64, 3.0).unwrap();
        let x = g.nodes();
        assert_eq!(x[0], -3.0);
        assert!(x.windows(2).all(|w| w[1] > w[0]));
        assert!((x[63] + g.dx() - 3.0).abs() < 1e-13);
        assert_eq!(x[g.origin_index()], 0.0);
        assert_eq!(g.mirror_index(0), 0);
        assert!((x[g.mirror_index(5)] + x[5]).abs() < 1e-14);
    }

    #[test]
    fn constant_and_cosine_spectra() {
        let g = make_grid(32, 2.0).unwrap();
        let one = RealField::constant(&g, 1.0);
        let s = to_spectrum(&one);
        assert!((s.mode(0).re - 1.0).abs() < 1e-15);
        assert!(s.coeffs()[1..].iter().all(|c| c.norm() < 1e-15));

        let xi1 = PI / 2.0;
        let c = RealField::from_fn(&g, |x| (xi1 * x).cos());
        let s = to_spectrum(&c);
        for b in 0..32 {
            let k = signed_index(b, 32);
            let mag = s.coeffs()[b].norm();
            if k.abs() == 1 {
                assert!((mag - 0.5).abs() < 1e-14);
            } else {
                assert!(mag < 1e-14, "k={k} mag={mag}");
            }
        }
    }

    #[test]
    fn derivative_of_sine_and_constant() {
        let g = make_grid(64, 5.0).unwrap();
        let xi1 = g.wavenumbers()[1];
        let f = RealField::from_fn(&g, |x| (xi1 * x).sin());
        let d = spectral_derivative(&f, 1);
        for (&x, &v) in g.nodes().iter().zip(d.values()) {
            assert!((v - xi1 * (xi1 * x).cos()).abs() < 1e-10);
        }
        let c = RealField::constant(&g, 3.5);
        for order in 1..4 {
            assert!(spectral_derivative(&c, order).max_abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_matches_centered_difference() {
        let g = make_grid(256, PI).unwrap();
        let f = RealField::from_fn(&g, |x| x.sin().exp());
        let d = spectral_derivative(&f, 1);
        let n = g.n();
        let h = g.dx();
        let v = f.values();
        let mut err: f64 = 0.0;
        for j in 0..n {
            let fd = (v[(j + 1) % n] - v[(j + n - 1) % n]) / (2.0 * h);
            err = err.max((fd - d.values()[j]).abs());
        }
        // centered difference error is h^2/6 |f'''|, |f'''| <= ~ 6 for exp(sin x)
        assert!(err < h * h * 2.0, "err={err}");
        assert!(err > 0.0);
    }

    #[test]
    fn odd_derivative_zeroes_nyquist() {
        let g = make_grid(16, 1.0).unwrap();
        let f = RealField::from_fn(&g, |x| (PI * 8.0 * x).cos());
        assert!(spectral_derivative(&f, 1).max_abs() < 1e-12);
        // second derivative keeps it: -(8 pi)^2 cos
        let d2 = spectral_derivative(&f, 2);
        assert!((d2.values()[0] + (8.0 * PI).powi(2) * f.values()[0]).abs() < 1e-9);
    }

    #[test]
    fn dealias_behaviour() {
        let g = make_grid(64, 1.0).unwrap();
        let n = g.n();
        let low = RealField::from_fn(&g, |x| (PI * 3.0 * x).cos() + (PI * 20.0 * x).sin());
        let s = to_spectrum(&low);
        let d = dealias(&s);
        for b in 0..n {
            if signed_index(b, n).unsigned_abs() as usize <= n / 3 {
                assert_eq!(d.coeffs()[b], s.coeffs()[b]);
            } else {
                assert!(s.coeffs()[b].norm() < 1e-14);
            }
        }
        assert!(from_spectrum(&d).axpy(-1.0, &low).max_abs() < 1e-13);

        let k = (n / 2 - 1) as f64;
        let high = RealField::from_fn(&g, |x| (PI * k * x).cos());
        let d = dealias(&to_spectrum(&high));
        assert!(d.energy() < 1e-28);
    }

    #[test]
    fn parseval_normalization() {
        let g = make_grid(64, 1.7).unwrap();
        let f = RealField::from_fn(&g, |x| (2.0 * x).sin().exp() - 0.3 * x.cos());
        let s = to_spectrum(&f);
        let lhs = s.energy();
        let rhs = f.values().iter().map(|v| v * v).sum::<f64>() / 64.0;
        assert!((lhs - rhs).abs() < 1e-13 * rhs);
    }

    #[test]
    fn trig_eval_reproduces_nodes_and_modes() {
        let g = make_grid(32, 2.0).unwrap();
        let xi = g.wavenumbers()[3];
        let f = RealField::from_fn(&g, |x| (xi * x).sin() + 0.5);
        let s = to_spectrum(&f);
        for (&x, &v) in g.nodes().iter().zip(f.values()) {
            assert!((trig_eval(&s, x) - v).abs() < 1e-13);
        }
        let x = 0.377;
        assert!((trig_eval(&s, x) - ((xi * x).sin() + 0.5)).abs() < 1e-13);
    }

    #[test]
    fn wrap_into_window() {
        let g = make_grid(16, 1.0).unwrap();
        assert!((g.wrap(1.5) + 0.5).abs() < 1e-15);
        assert!((g.wrap(-1.25) - 0.75).abs() < 1e-15);
        assert_eq!(g.wrap(1.0), -1.0);
        assert!((g.periodic_offset(0.9, -0.9) + 0.2).abs() < 1e-14);
    }
}
