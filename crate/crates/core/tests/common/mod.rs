#![allow(dead_code)]

use std::sync::Arc;

use dp2c::{Grid, RealField};
use proptest::prelude::*;

/// Mean plus `modes` sine/cosine pairs (wavenumbers `j pi / L`).
#[derive(Debug, Clone)]
pub struct TrigPoly {
    pub mean: f64,
    pub coeffs: Vec<(f64, f64)>,
}

impl TrigPoly {
    pub fn eval(&self, x: f64, half_length: f64) -> f64 {
        let k = std::f64::consts::PI / half_length;
        self.mean
            + self
                .coeffs
                .iter()
                .enumerate()
                .map(|(j, (a, b))| {
                    let w = (j + 1) as f64 * k * x;
                    a * w.sin() + b * w.cos()
                })
                .sum::<f64>()
    }

    pub fn field(&self, grid: &Arc<Grid>) -> RealField {
        let l = grid.half_length();
        RealField::from_fn(grid, |x| self.eval(x, l))
    }

    /// Coefficients damped as `exp(-j / width)` so the data stay smooth.
    pub fn damped(mut self, width: f64) -> Self {
        for (j, c) in self.coeffs.iter_mut().enumerate() {
            let d = (-(j as f64) / width).exp();
            c.0 *= d;
            c.1 *= d;
        }
        self
    }
}

pub fn trig_poly(max_modes: usize) -> impl Strategy<Value = TrigPoly> {
    (
        -1.0..1.0f64,
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..=max_modes),
    )
        .prop_map(|(mean, coeffs)| TrigPoly { mean, coeffs })
}

pub fn max_diff(a: &RealField, b: &RealField) -> f64 {
    a.axpy(-1.0, b).max_abs()
}
