//! Discrete Littlewood-Paley decomposition and Besov/Sobolev norms.
//!
//! The cutoffs are built from one frozen smooth profile `theta`, equal to 1
//! on `[0, 3/4]` and 0 on `[4/3, inf)`, glued with `exp(-1/x)`:
//!
//! * `chi(xi) = theta(|xi|)`, supported in the ball `|xi| <= 4/3`;
//! * `phi(xi) = theta(|xi|/2) - theta(|xi|)`, supported in the ring
//!   `3/4 <= |xi| <= 8/3`.
//!
//! Then `chi + sum_q phi(2^-q .)` telescopes to 1, rings two or more apart
//! are disjoint, and `phi(2^-q xi) = 1` exactly on `2^q [4/3, 3/2]`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{from_spectrum, spectral_derivative, to_spectrum, Grid, RealField};

const BALL_INNER: f64 = 0.75;
const BALL_OUTER: f64 = 4.0 / 3.0;

fn glue(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Smooth step from 0 (at `t <= 0`) to 1 (at `t >= 1`).
fn smooth_step(t: f64) -> f64 {
    let a = glue(t);
    let b = glue(1.0 - t);
    a / (a + b)
}

/// Radial profile: 1 on `[0, 3/4]`, 0 on `[4/3, inf)`.
pub fn theta(r: f64) -> f64 {
    smooth_step((BALL_OUTER - r.abs()) / (BALL_OUTER - BALL_INNER))
}

pub fn chi(xi: f64) -> f64 {
    theta(xi.abs())
}

pub fn phi(xi: f64) -> f64 {
    theta(xi.abs() / 2.0) - theta(xi.abs())
}

/// Lebesgue or summation exponent in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Finite(f64),
    Infinite(InfinityTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfinityTag {
    #[serde(rename = "inf")]
    Inf,
}

impl Exponent {
    pub const INFINITY: Exponent = Exponent::Infinite(InfinityTag::Inf);

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinite(_) => f64::INFINITY,
        }
    }
}

impl From<f64> for Exponent {
    fn from(p: f64) -> Self {
        if p.is_infinite() {
            Exponent::INFINITY
        } else {
            Exponent::Finite(p)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    pub p: Exponent,
    pub r: Exponent,
}

impl BesovParams {
    pub fn new(s: f64, p: impl Into<Exponent>, r: impl Into<Exponent>) -> Result<Self> {
        let params = Self {
            s,
            p: p.into(),
            r: r.into(),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.s.is_finite() {
            return Err(Error::InvalidParameter("besov index s must be finite".into()));
        }
        for (name, e) in [("p", self.p), ("r", self.r)] {
            if !(e.value() >= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "besov exponent {name} must be >= 1, got {}",
                    e.value()
                )));
            }
        }
        Ok(())
    }
}

/// Cutoff weights sampled on the grid wavenumbers, bin-ordered.
/// `blocks[0]` is `chi` (block `q = -1`), `blocks[q + 1]` is `phi(2^-q .)`.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    grid: Arc<Grid>,
    blocks: Vec<Vec<f64>>,
    q_max: i32,
}

/// Builds the cutoffs for every block up to `Q_max = ceil(log2 xi_max) + 1`;
/// trailing blocks that vanish on the whole grid are dropped.
pub fn build_partition(grid: &Arc<Grid>) -> DyadicPartition {
    let xi_max = grid.max_wavenumber();
    let q_max = xi_max.log2().ceil().max(0.0) as i32 + 1;
    let xis = grid.wavenumbers();
    let mut blocks = vec![xis.iter().map(|&xi| chi(xi)).collect::<Vec<_>>()];
    for q in 0..=q_max {
        let scale = 2f64.powi(-q);
        blocks.push(xis.iter().map(|&xi| phi(scale * xi)).collect());
    }
    while blocks.len() > 1 && blocks.last().unwrap().iter().all(|&w| w == 0.0) {
        blocks.pop();
    }
    DyadicPartition {
        grid: grid.clone(),
        blocks,
        q_max,
    }
}

impl DyadicPartition {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    /// Highest block index that is not identically zero on the grid.
    pub fn last_block(&self) -> i32 {
        self.blocks.len() as i32 - 2
    }

    /// Block indices `-1..=last_block`.
    pub fn block_indices(&self) -> impl Iterator<Item = i32> {
        -1..=self.last_block()
    }

    /// Weights of block `q` (zero weights for blocks beyond the grid).
    pub fn weights(&self, q: i32) -> Vec<f64> {
        match self.blocks.get((q + 1) as usize) {
            Some(w) if q >= -1 => w.clone(),
            _ => vec![0.0; self.grid.n()],
        }
    }

    /// `chi(xi_k) + sum_q phi(2^-q xi_k)` at every grid wavenumber.
    pub fn partition_sum(&self) -> Vec<f64> {
        let n = self.grid.n();
        (0..n)
            .map(|b| self.blocks.iter().map(|w| w[b]).sum())
            .collect()
    }
}

/// `Delta_q f`; block `-1` is `chi(D) f`.
pub fn lp_block(f: &RealField, q: i32, part: &DyadicPartition) -> Result<RealField> {
    if q < -1 {
        return Err(Error::InvalidParameter(format!("block index must be >= -1, got {q}")));
    }
    if q > part.last_block() {
        return Ok(RealField::zeros(f.grid()));
    }
    Ok(from_spectrum(
        &to_spectrum(f).apply_weights(&part.blocks[(q + 1) as usize]),
    ))
}

/// `S_q f = chi(2^-q D) f`.
pub fn low_freq(f: &RealField, q: u32, part: &DyadicPartition) -> RealField {
    let scale = 2f64.powi(-(q as i32));
    let weights: Vec<f64> = part
        .grid
        .wavenumbers()
        .iter()
        .map(|&xi| chi(scale * xi))
        .collect();
    from_spectrum(&to_spectrum(f).apply_weights(&weights))
}

fn lr_sum(terms: impl Iterator<Item = f64>, r: Exponent) -> f64 {
    match r {
        Exponent::Infinite(_) => terms.fold(0.0, f64::max),
        Exponent::Finite(r) => terms.map(|t| t.powf(r)).sum::<f64>().powf(1.0 / r),
    }
}

/// `|| (2^{qs} ||Delta_q f||_{L^p})_{q >= -1} ||_{l^r}`, block `L^p` norms by
/// trapezoid quadrature.
pub fn besov_norm(f: &RealField, params: &BesovParams, part: &DyadicPartition) -> f64 {
    let spec = to_spectrum(f);
    let p = params.p.value();
    let terms: Vec<f64> = part
        .block_indices()
        .map(|q| {
            let block = from_spectrum(&spec.apply_weights(&part.blocks[(q + 1) as usize]));
            2f64.powf(q as f64 * params.s) * block.lp_norm(p)
        })
        .collect();
    lr_sum(terms.into_iter(), params.r)
}

/// `(sum_k (1 + xi_k^2)^s |f_k|^2)^{1/2}`, scaled so that `s = 0` is the
/// `L^2` norm over one period.
pub fn sobolev_norm(f: &RealField, s: f64) -> f64 {
    let spec = to_spectrum(f);
    let grid = f.grid();
    let sum: f64 = spec
        .coeffs()
        .iter()
        .zip(grid.wavenumbers())
        .map(|(c, &xi)| (1.0 + xi * xi).powf(s) * c.norm_sqr())
        .sum();
    (grid.period() * sum).sqrt()
}

const DENOMINATOR_FLOOR: f64 = 1e-14;

/// Ratio `||fg||_B / (||f||_B ||g||_inf + ||g||_B ||f||_inf)`.
pub fn probe_product_estimate(
    f: &RealField,
    g: &RealField,
    params: &BesovParams,
    part: &DyadicPartition,
) -> Result<f64> {
    if !(params.s > 0.0) {
        return Err(Error::InvalidParameter("product estimate needs s > 0".into()));
    }
    f.same_grid(g)?;
    let fg = f.zip_map(g, |a, b| a * b);
    let den = besov_norm(f, params, part) * g.max_abs() + besov_norm(g, params, part) * f.max_abs();
    if den < DENOMINATOR_FLOOR {
        return Ok(0.0);
    }
    Ok(besov_norm(&fg, params, part) / den)
}

/// Ratio `||f g_x||_{H^s} / (||f||_{H^{s+1}} ||g||_inf + ||f||_inf ||g_x||_{H^s})`.
pub fn probe_transport_estimate(f: &RealField, g: &RealField, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameter("transport estimate needs s > 0".into()));
    }
    f.same_grid(g)?;
    let g_x = spectral_derivative(g, 1);
    let num = sobolev_norm(&f.zip_map(&g_x, |a, b| a * b), s);
    let den = sobolev_norm(f, s + 1.0) * g.max_abs() + f.max_abs() * sobolev_norm(&g_x, s);
    if den < DENOMINATOR_FLOOR {
        return Ok(0.0);
    }
    Ok(num / den)
}

/// Ratio `||fg||_{B^{s1}_{2,2}} / (||f||_{B^{s1}_{2,2}} ||g||_{B^{s2}_{2,2}})`
/// at the one index pair probed, `(s1, s2) = (0, 1)`.
pub fn probe_two_index_estimate(f: &RealField, g: &RealField, part: &DyadicPartition) -> Result<f64> {
    f.same_grid(g)?;
    let p0 = BesovParams::new(0.0, 2.0, 2.0)?;
    let p1 = BesovParams::new(1.0, 2.0, 2.0)?;
    let fg = f.zip_map(g, |a, b| a * b);
    let den = besov_norm(f, &p0, part) * besov_norm(g, &p1, part);
    if den < DENOMINATOR_FLOOR {
        return Ok(0.0);
    }
    Ok(besov_norm(&fg, &p0, part) / den)
}
