//! Two-quadrature cloner: a phase-insensitive amplifier of intensity gain `G`
//! followed by a 50:50 beam splitter with vacuum in the dark port.
//!
//! Each clone carries amplitude gain `g = √(G/2)` and variances `V⁺ = V⁻ = G`.
//! Averaged over a symmetric Gaussian ensemble of width `σ`, the clone
//! fidelity integrates to
//!
//! ```text
//! F̄(G, σ) = 2 / [(1 + G) + 4σ²(1 − √(G/2))²]
//! ```
//!
//! which is maximised at `G = max(1, 8σ⁴/(2σ² + 1)²)`. The two regimes meet
//! at `σ² = ½ + 1/√2`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::ensembles::{self, EnsembleAverage, GaussianEnsemble, Method};
use crate::error::{Error, Result};
use crate::numerics::{maximize_smooth, OptimizationResult};
use crate::phase_space::{
    apply_beam_splitter, apply_phase_insensitive_amp, coherent_fidelity, coherent_state,
    duan_combination, fidelity_vs_coherent, CoherentAmplitude, GaussianState,
};

/// `σ²` at which the optimal gain leaves the `G = 1` floor.
pub const BRANCH_SIGMA_SQ: f64 = 0.5 + FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClonerConfig {
    gain: f64,
}

impl ClonerConfig {
    pub fn new(gain: f64) -> Result<Self> {
        if !(gain >= 1.0 && gain.is_finite()) {
            return Err(Error::domain("G", gain, "amplifier gain must be >= 1"));
        }
        Ok(Self { gain })
    }

    /// Unity amplitude gain, `G = 2`.
    pub fn unity() -> Self {
        Self { gain: 2.0 }
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    /// Amplitude gain `g = √(G/2)` of each clone.
    pub fn amplitude_gain(&self) -> f64 {
        (self.gain / 2.0).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloneReport {
    pub clone_mean: (f64, f64),
    pub v_plus: f64,
    pub v_minus: f64,
    pub amplitude_gain: f64,
    pub fidelity: f64,
    pub snr_transfer: f64,
}

/// Joint two-mode state of both clones for input `|α⟩`.
pub fn clone_pair(alpha: CoherentAmplitude, config: ClonerConfig) -> Result<GaussianState> {
    let amplified = apply_phase_insensitive_amp(&coherent_state(alpha), 0, config.gain)?;
    let with_port = amplified.tensor(&GaussianState::vacuum(1));
    apply_beam_splitter(&with_port, 0, 1, 0.5)
}

/// Statistics of clone `arm` (0 or 1).
pub fn clone_arm(alpha: CoherentAmplitude, config: ClonerConfig, arm: usize) -> Result<CloneReport> {
    let pair = clone_pair(alpha, config)?;
    let clone_mean = pair.mode_mean(arm)?;
    let (v_plus, v_minus) = pair.mode_variances(arm)?;
    let fidelity = fidelity_vs_coherent(alpha, &pair, arm)?;
    Ok(CloneReport {
        clone_mean,
        v_plus,
        v_minus,
        amplitude_gain: config.amplitude_gain(),
        fidelity,
        snr_transfer: snr_transfer(config)?,
    })
}

pub fn clone(alpha: CoherentAmplitude, config: ClonerConfig) -> Result<CloneReport> {
    clone_arm(alpha, config, 0)
}

/// Linear response of one clone, extracted once from the circuit: the clone
/// mean is `gain · (2αₓ, 2α_y)` and the variances do not depend on `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct CloneResponse {
    gain_plus: f64,
    gain_minus: f64,
    v_plus: f64,
    v_minus: f64,
}

impl CloneResponse {
    fn from_circuit(config: ClonerConfig) -> Result<Self> {
        let probe = clone_pair(CoherentAmplitude::new(0.5, 0.5), config)?;
        let (mp, mm) = probe.mode_mean(0)?;
        let (v_plus, v_minus) = probe.mode_variances(0)?;
        Ok(Self {
            gain_plus: mp,
            gain_minus: mm,
            v_plus,
            v_minus,
        })
    }

    fn fidelity(&self, alpha: CoherentAmplitude) -> f64 {
        let (xp, xm) = alpha.quadratures();
        coherent_fidelity(alpha, (self.gain_plus * xp, self.gain_minus * xm), self.v_plus, self.v_minus)
    }
}

/// Closed-form ensemble-averaged fidelity.
pub fn average_fidelity_closed(config: ClonerConfig, sigma: f64) -> f64 {
    let shortfall = 1.0 - config.amplitude_gain();
    2.0 / ((1.0 + config.gain) + 4.0 * sigma * sigma * shortfall * shortfall)
}

/// Average clone fidelity over the symmetric ensemble of width `sigma`.
/// Numerical methods integrate the circuit-derived fidelity.
pub fn average_fidelity(config: ClonerConfig, sigma: f64, method: Method) -> Result<EnsembleAverage> {
    let ensemble = GaussianEnsemble::symmetric(sigma)?;
    average_fidelity_over(config, &ensemble, method)
}

/// As [`average_fidelity`] for an explicit ensemble, which must be symmetric.
pub fn average_fidelity_over(
    config: ClonerConfig,
    ensemble: &GaussianEnsemble,
    method: Method,
) -> Result<EnsembleAverage> {
    if !ensemble.is_symmetric() || ensemble.mean_x != 0.0 || ensemble.mean_y != 0.0 {
        return Err(Error::UnsupportedState(
            "the two-quadrature cloner is analysed for zero-mean symmetric ensembles".into(),
        ));
    }
    match method {
        Method::Closed => Ok(EnsembleAverage::closed(average_fidelity_closed(
            config,
            ensemble.sigma_x,
        ))),
        numeric => {
            let response = CloneResponse::from_circuit(config)?;
            ensembles::average(|a| response.fidelity(a), ensemble, numeric)
        }
    }
}

/// `G = 8σ⁴/(2σ² + 1)²`, floored at 1.
pub fn optimal_gain(sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    if s2 <= BRANCH_SIGMA_SQ {
        return 1.0;
    }
    let g = 8.0 * s2 * s2 / ((2.0 * s2 + 1.0) * (2.0 * s2 + 1.0));
    g.max(1.0)
}

/// Upper branch `(4σ² + 2)/(6σ² + 1)`, valid for `σ² ≥ ½ + 1/√2`.
pub fn max_average_fidelity_upper(sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    (4.0 * s2 + 2.0) / (6.0 * s2 + 1.0)
}

/// Lower branch `1/((3 − 2√2)σ² + 1)`, valid for `σ² ≤ ½ + 1/√2`.
pub fn max_average_fidelity_lower(sigma: f64) -> f64 {
    1.0 / ((3.0 - 2.0 * std::f64::consts::SQRT_2) * sigma * sigma + 1.0)
}

/// Best achievable ensemble-averaged clone fidelity for width `sigma`.
pub fn max_average_fidelity(sigma: f64) -> f64 {
    if sigma * sigma >= BRANCH_SIGMA_SQ {
        max_average_fidelity_upper(sigma)
    } else {
        max_average_fidelity_lower(sigma)
    }
}

/// Gain bracket used by the numerical optimiser.
pub fn gain_search_bracket(sigma: f64) -> (f64, f64) {
    (1.0, 6f64.max(4.0 * sigma * sigma))
}

/// Numerical maximisation of the quadrature-evaluated `F̄` over `G`.
pub fn numeric_optimal_gain(sigma: f64, order: usize, tol: f64) -> Result<OptimizationResult> {
    let ensemble = GaussianEnsemble::symmetric(sigma)?;
    let (lo, hi) = gain_search_bracket(sigma);
    let mut failure = None;
    let result = maximize_smooth(
        |g| {
            let eval = ClonerConfig::new(g)
                .and_then(|c| average_fidelity_over(c, &ensemble, Method::Quadrature { order }));
            match eval {
                Ok(avg) => avg.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NEG_INFINITY
                }
            }
        },
        lo,
        hi,
        tol,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(result),
    }
}

/// Signal-to-noise transfer `SNR_out/SNR_in` of either quadrature of a clone,
/// from the circuit's signal gain and added noise. Equal to ½ for every `G`.
pub fn snr_transfer(config: ClonerConfig) -> Result<f64> {
    let signal = clone_pair(CoherentAmplitude::new(0.5, 0.0), config)?.mode_mean(0)?.0;
    let noise = clone_pair(CoherentAmplitude::ZERO, config)?.mode_variances(0)?.0;
    // input: unit signal amplitude over unit vacuum noise
    Ok(signal * signal / noise)
}

/// Duan combination of the two clones; 2 or more means no entanglement is
/// witnessed.
pub fn clone_duan_value(config: ClonerConfig) -> Result<f64> {
    let pair = clone_pair(CoherentAmplitude::ZERO, config)?;
    duan_combination(&pair, 0, 1)
}
