//! Nonlocal operators of the system, applied exactly through their Fourier
//! symbols: `(lambda^2 - d_xx)^{-1}`, convolution with the Green's function
//! `p = exp(-|x|)/2` and `P(D) = -d_x (1 - d_xx)^{-1}`.

use std::sync::Arc;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{from_spectrum, to_spectrum, Grid, RealField, Spectrum};

/// Symbol of `P(D)`: `-i xi / (1 + xi^2)`.
pub fn pd_symbol(xi: f64) -> Complex64 {
    Complex64::new(0.0, -xi / (1.0 + xi * xi))
}

pub fn helmholtz_symbol(xi: f64, lambda: f64) -> f64 {
    1.0 / (lambda * lambda + xi * xi)
}

pub fn helmholtz_spectrum(spec: &Spectrum, lambda: f64) -> Spectrum {
    spec.apply_symbol(|xi| Complex64::new(helmholtz_symbol(xi, lambda), 0.0))
}

pub fn pd_spectrum(spec: &Spectrum) -> Spectrum {
    spec.apply_symbol(pd_symbol)
}

/// `(lambda^2 - d_xx)^{-1} f`.
pub fn helmholtz_solve(f: &RealField, lambda: f64) -> Result<RealField> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "helmholtz parameter must be positive, got {lambda}"
        )));
    }
    Ok(from_spectrum(&helmholtz_spectrum(&to_spectrum(f), lambda)))
}

/// `p * f`, the convolution with `exp(-|x|)/2` (periodized on the grid).
pub fn green_convolve(f: &RealField) -> RealField {
    from_spectrum(&helmholtz_spectrum(&to_spectrum(f), 1.0))
}

pub fn pd_apply(f: &RealField) -> RealField {
    from_spectrum(&pd_spectrum(&to_spectrum(f)))
}

/// Periodic kernel of `(1 - d_xx)^{-1}` on `[-L, L)`:
/// `cosh(L - |x|) / (2 sinh L)`, with `|x|` the periodic distance.
pub fn periodic_green_kernel(x: f64, half_length: f64) -> f64 {
    let l = half_length;
    let d = periodic_distance(x, l);
    // cosh(l - d) / (2 sinh l) written to avoid overflow for large l
    let e2l = (-2.0 * l).exp();
    ((-d).exp() + (-2.0 * l + d).exp()) / (2.0 * (1.0 - e2l))
}

fn periodic_distance(x: f64, half_length: f64) -> f64 {
    let p = 2.0 * half_length;
    let y = (x + half_length).rem_euclid(p) - half_length;
    y.abs().min(half_length)
}

/// Periodized peakon `a cosh(L - |x - a t|) / cosh L`, the periodic traveling
/// wave whose large-`L` limit is `a exp(-|x - a t|)`.
pub fn peakon_field(amplitude: f64, t: f64, grid: &Arc<Grid>) -> Result<RealField> {
    let l = grid.half_length();
    let center = amplitude * t;
    if !(center.abs() < l) {
        return Err(Error::InvalidParameter(format!(
            "peak position {center} lies outside the window [-{l}, {l})"
        )));
    }
    let e2l = (-2.0 * l).exp();
    Ok(RealField::from_fn(grid, |x| {
        let d = periodic_distance(x - center, l);
        amplitude * ((-d).exp() + (-2.0 * l + d).exp()) / (1.0 + e2l)
    }))
}

/// Peakon mollified by `lambda^2 (lambda^2 - d_xx)^{-1}`, which keeps its mass.
pub fn smoothed_peakon(
    amplitude: f64,
    lambda: f64,
    t: f64,
    grid: &Arc<Grid>,
) -> Result<RealField> {
    let raw = peakon_field(amplitude, t, grid)?;
    Ok(helmholtz_solve(&raw, lambda)?.scale(lambda * lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, spectral_derivative};
    use std::f64::consts::PI;

    #[test]
    fn helmholtz_eigenfunction_and_constants() {
        let g = make_grid(64, 4.0).unwrap();
        let xi = g.wavenumbers()[1];
        let f = RealField::from_fn(&g, |x| (xi * x).sin());
        let u = helmholtz_solve(&f, 1.0).unwrap();
        for (a, b) in u.values().iter().zip(f.values()) {
            assert!((a - b / (1.0 + xi * xi)).abs() < 1e-14);
        }
        let four = RealField::constant(&g, 4.0);
        let one = helmholtz_solve(&four, 2.0).unwrap();
        assert!(one.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn helmholtz_rejects_nonpositive_lambda() {
        let g = make_grid(16, 1.0).unwrap();
        let f = RealField::constant(&g, 1.0);
        assert!(helmholtz_solve(&f, 0.0).is_err());
        assert!(helmholtz_solve(&f, -2.0).is_err());
    }

    #[test]
    fn helmholtz_residual() {
        let g = make_grid(128, PI).unwrap();
        let f = RealField::from_fn(&g, |x| (x.sin() + 0.3 * (3.0 * x).cos()).exp());
        let u = helmholtz_solve(&f, 1.0).unwrap();
        let res = u.axpy(-1.0, &spectral_derivative(&u, 2)).axpy(-1.0, &f);
        assert!(res.max_abs() < 1e-10);
    }

    #[test]
    fn green_unit_mass_and_eigenfunction() {
        let g = make_grid(32, 3.0).unwrap();
        let one = green_convolve(&RealField::constant(&g, 1.0));
        assert!(one.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
        let xi = g.wavenumbers()[1];
        let f = RealField::from_fn(&g, |x| (xi * x).cos());
        let u = green_convolve(&f);
        for (a, b) in u.values().iter().zip(f.values()) {
            assert!((a - b / (1.0 + xi * xi)).abs() < 1e-14);
        }
    }

    #[test]
    fn pd_eigenfunction_and_constant() {
        let g = make_grid(32, 3.0).unwrap();
        let xi = g.wavenumbers()[1];
        let f = RealField::from_fn(&g, |x| (xi * x).cos());
        let u = pd_apply(&f);
        for (&x, &v) in g.nodes().iter().zip(u.values()) {
            assert!((v - xi / (1.0 + xi * xi) * (xi * x).sin()).abs() < 1e-14);
        }
        assert!(pd_apply(&RealField::constant(&g, 2.5)).max_abs() < 1e-15);
    }

    #[test]
    fn pd_is_composition() {
        let g = make_grid(64, 2.0).unwrap();
        let f = RealField::from_fn(&g, |x| (2.0 * x).cos().exp() + x.sin());
        let direct = pd_apply(&f);
        let composed = spectral_derivative(&helmholtz_solve(&f, 1.0).unwrap(), 1).scale(-1.0);
        assert!(direct.axpy(-1.0, &composed).max_abs() < 1e-12);
    }

    #[test]
    fn peakon_samples() {
        let g = make_grid(256, 20.0).unwrap();
        let p = peakon_field(1.0, 0.0, &g).unwrap();
        assert!((p.max() - 1.0).abs() < 1e-15);
        assert_eq!(p.value_at_origin(), p.max());
        let g2 = make_grid(64, 16.0).unwrap();
        let p2 = peakon_field(1.0, 0.0, &g2).unwrap();
        let j = g2.nodes().iter().position(|&x| (x - 1.0).abs() < 1e-12).unwrap();
        assert!((p2.values()[j] - (-1.0f64).exp()).abs() < 1e-8);

        let g3 = make_grid(128, 8.0).unwrap();
        let p3 = peakon_field(2.0, 0.5, &g3).unwrap();
        let j = g3.nodes().iter().position(|&x| (x - 1.0).abs() < 1e-12).unwrap();
        assert!((p3.values()[j] - 2.0).abs() < 1e-14);
        assert!((p3.max() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn peakon_outside_window_rejected() {
        let g = make_grid(64, 2.0).unwrap();
        assert!(peakon_field(1.0, 3.0, &g).is_err());
    }

    #[test]
    fn kernel_has_unit_mass() {
        let l = 3.0;
        let n = 20000;
        let h = 2.0 * l / n as f64;
        let mass: f64 = (0..n)
            .map(|j| periodic_green_kernel(-l + (j as f64 + 0.5) * h, l) * h)
            .sum();
        assert!((mass - 1.0).abs() < 1e-7);
        assert!((periodic_green_kernel(0.0, 40.0) - 0.5).abs() < 1e-15);
    }
}
