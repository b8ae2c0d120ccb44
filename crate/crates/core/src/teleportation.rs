//! Teleportation of finite Gaussian ensembles and the entanglement needed to
//! beat the cloning limit.
//!
//! With a two-mode squeezed resource of parameter `λ ∈ [0, 1)` the optimised
//! ensemble-averaged teleportation fidelity is
//!
//! ```text
//! F̄_tele(λ, σ) = (1 − 2(λ² − 1)σ²) / (1 − 4(λ − 1)σ²)
//! ```
//!
//! The no-cloning boundary `λ(σ)` is the `λ` at which this equals
//! [`max_average_fidelity`]. Both fidelities tend to 1 as `σ → 0`, so the
//! boundary is located on the excess `(F̄_tele − F̄_clone)/σ²`, which stays
//! finite there and is increasing in `λ`.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::numerics::find_root;
use crate::symmetric_cloner::{max_average_fidelity, BRANCH_SIGMA_SQ};

/// `3 − 2√2`, the curvature of the unit-gain cloning fidelity in `σ²`.
const UNIT_GAIN_SLOPE: f64 = 3.0 - 2.0 * SQRT_2;

/// Largest `λ` handed to the bisection.
pub const LAMBDA_MAX: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleportationParams {
    lambda: f64,
    sigma: f64,
}

impl TeleportationParams {
    pub fn new(lambda: f64, sigma: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::domain("lambda", lambda, "must lie in [0, 1)"));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::domain("sigma", sigma, "must be finite and >= 0"));
        }
        Ok(Self { lambda, sigma })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn fidelity(&self) -> f64 {
        let (l, s2) = (self.lambda, self.sigma * self.sigma);
        (1.0 - 2.0 * (l * l - 1.0) * s2) / (1.0 - 4.0 * (l - 1.0) * s2)
    }
}

pub fn tele_fidelity(lambda: f64, sigma: f64) -> Result<f64> {
    Ok(TeleportationParams::new(lambda, sigma)?.fidelity())
}

/// `(F̄_tele − F̄_clone)/σ²`, continued to `σ = 0` by its limit
/// `(3 − 2√2) − 2(1 − λ)²`.
pub fn nocloning_excess(lambda: f64, sigma: f64) -> f64 {
    let s = sigma * sigma;
    let u = 1.0 - lambda;
    // F̄_tele − 1 = −2σ²(1−λ)² / (1 + 4σ²(1−λ))
    let tele = -2.0 * u * u / (1.0 + 4.0 * s * u);
    let clone = if s >= BRANCH_SIGMA_SQ {
        // (4s+2)/(6s+1) − 1 = (1 − 2s)/(6s + 1)
        (1.0 - 2.0 * s) / ((6.0 * s + 1.0) * s)
    } else {
        -UNIT_GAIN_SLOPE / (1.0 + UNIT_GAIN_SLOPE * s)
    };
    tele - clone
}

/// Boundary on the unit-gain side, `σ² ≤ ½ + 1/√2`.
pub fn nocloning_lambda_lower(sigma: f64) -> f64 {
    let s = sigma * sigma;
    let a = 6.0 + 4.0 * SQRT_2;
    (a - SQRT_2 * (3.0 + 2.0 * SQRT_2 + s + 2.0 * s * s).sqrt()) / (a + 2.0 * s)
}

/// Boundary on the optimal-gain side, `σ² ≥ ½ + 1/√2`: the smaller root of
/// `2σ²(6σ² + 1)λ² − 8σ²(2σ² + 1)λ + (2σ² + 1)² = 0`.
pub fn nocloning_lambda_upper(sigma: f64) -> f64 {
    let s = sigma * sigma;
    let disc = (8.0 * s * (2.0 * s - 1.0)).max(0.0).sqrt();
    (2.0 * s + 1.0) * (8.0 * s - disc) / (4.0 * s * (6.0 * s + 1.0))
}

/// Entanglement at which teleportation exactly matches the best cloner for
/// an ensemble of width `sigma`.
pub fn nocloning_lambda(sigma: f64) -> f64 {
    if sigma * sigma >= BRANCH_SIGMA_SQ {
        nocloning_lambda_upper(sigma)
    } else {
        nocloning_lambda_lower(sigma)
    }
}

/// Bisection root of [`nocloning_excess`] in `λ`.
pub fn nocloning_lambda_bisect(sigma: f64, tol: f64) -> Result<f64> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::domain("sigma", sigma, "must be finite and >= 0"));
    }
    find_root(|l| nocloning_excess(l, sigma), 0.0, LAMBDA_MAX, tol)
}

/// Squeezing `S = (1−λ)²/(1−λ²)` in decibels.
pub fn squeezing_db(lambda: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::domain("lambda", lambda, "must lie in [0, 1)"));
    }
    let s = (1.0 - lambda) * (1.0 - lambda) / (1.0 - lambda * lambda);
    Ok(10.0 * s.log10())
}

/// Ensemble variance `V = σ²` in decibels.
pub fn variance_db(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain("sigma", sigma, "must be positive"));
    }
    Ok(10.0 * (sigma * sigma).log10())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingPoint {
    pub sigma: f64,
    pub tele_fidelity: f64,
    pub noclone_fidelity: f64,
    /// Teleportation at or above the cloning limit.
    pub above: bool,
}

/// Compares teleportation at fixed `lambda` with the cloning limit on a grid.
pub fn crossing_scan(lambda: f64, sigma_grid: &[f64]) -> Result<Vec<CrossingPoint>> {
    if sigma_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Usage("sigma grid must be sorted ascending".into()));
    }
    sigma_grid
        .iter()
        .map(|&sigma| {
            let tele = tele_fidelity(lambda, sigma)?;
            Ok(CrossingPoint {
                sigma,
                tele_fidelity: tele,
                noclone_fidelity: max_average_fidelity(sigma),
                above: nocloning_excess(lambda, sigma) >= 0.0,
            })
        })
        .collect()
}
