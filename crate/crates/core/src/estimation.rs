//! Amplitude estimation from dual-homodyne measurements and from clones.
//!
//! Dual-homodyne detection is the cloner circuit run at `G = 1`: the amplitude
//! quadrature of one output and the phase quadrature of the other are
//! measured. Outcomes are sampled from the Gaussian statistics the circuit
//! produces, which for a coherent input are independent with means
//! `(2αₓ/√2, 2α_y/√2)` and unit variance.
//!
//! With a Gaussian prior of width `σ` the posterior mean is the shrinkage
//! estimate
//!
//! ```text
//! α' = (1/√2)·(2σ²/(2σ² + 1))·(X⁺ + iX⁻)
//! ```
//!
//! with per-component mean-squared error `σ²/(2σ² + 1)`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::ensembles::{chunked_moments, Moments};
use crate::error::{Error, Result};
use crate::numerics::NormalStream;
use crate::phase_space::CoherentAmplitude;
use crate::symmetric_cloner::{clone_pair, optimal_gain, ClonerConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualHomodyneOutcome {
    pub x_plus: f64,
    pub x_minus: f64,
}

/// Joint Gaussian statistics of `X⁺` on clone 1 and `X⁻` on clone 2 at a
/// given amplifier gain, read off the circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureReadout {
    gain_plus: f64,
    gain_minus: f64,
    var_plus: f64,
    var_minus: f64,
    covariance: f64,
}

impl QuadratureReadout {
    pub fn from_cloner(config: ClonerConfig) -> Result<Self> {
        // means are linear in α; probe with unit quadratures
        let pair = clone_pair(CoherentAmplitude::new(0.5, 0.5), config)?;
        let gain_plus = pair.mean()[0];
        let gain_minus = pair.mean()[3];
        let c = pair.cov();
        Ok(Self {
            gain_plus,
            gain_minus,
            var_plus: c[(0, 0)],
            var_minus: c[(3, 3)],
            covariance: c[(0, 3)],
        })
    }

    pub fn dual_homodyne() -> Self {
        Self::from_cloner(ClonerConfig::new(1.0).expect("G = 1 is valid"))
            .expect("dual-homodyne circuit is well formed")
    }

    /// Expected outcome for input `|α⟩`.
    pub fn mean(&self, alpha: CoherentAmplitude) -> DualHomodyneOutcome {
        let (xp, xm) = alpha.quadratures();
        DualHomodyneOutcome {
            x_plus: self.gain_plus * xp,
            x_minus: self.gain_minus * xm,
        }
    }

    pub fn variances(&self) -> (f64, f64) {
        (self.var_plus, self.var_minus)
    }

    pub fn sample(&self, alpha: CoherentAmplitude, stream: &mut NormalStream) -> DualHomodyneOutcome {
        let m = self.mean(alpha);
        // 2x2 Cholesky
        let l11 = self.var_plus.sqrt();
        let l21 = self.covariance / l11;
        let l22 = (self.var_minus - l21 * l21).max(0.0).sqrt();
        let (z1, z2) = (stream.next_normal(), stream.next_normal());
        DualHomodyneOutcome {
            x_plus: m.x_plus + l11 * z1,
            x_minus: m.x_minus + l21 * z1 + l22 * z2,
        }
    }
}

/// One simulated dual-homodyne measurement of `|α⟩`, deterministic in `seed`.
pub fn simulate_dual_homodyne(alpha: CoherentAmplitude, seed: u64) -> DualHomodyneOutcome {
    QuadratureReadout::dual_homodyne().sample(alpha, &mut NormalStream::new(seed))
}

/// Posterior-mean estimate for a zero-mean symmetric prior of width `sigma`.
pub fn bayes_estimate(outcome: DualHomodyneOutcome, sigma: f64) -> CoherentAmplitude {
    let s2 = sigma * sigma;
    let shrink = if sigma.is_infinite() { 1.0 } else { 2.0 * s2 / (2.0 * s2 + 1.0) };
    let k = FRAC_1_SQRT_2 * shrink;
    CoherentAmplitude::new(k * outcome.x_plus, k * outcome.x_minus)
}

/// The unshrunk estimate `(X⁺ + iX⁻)/√2`, the broad-prior limit.
pub fn naive_estimate(outcome: DualHomodyneOutcome) -> CoherentAmplitude {
    CoherentAmplitude::new(FRAC_1_SQRT_2 * outcome.x_plus, FRAC_1_SQRT_2 * outcome.x_minus)
}

/// `α' = ½(X⁺ + iX⁻)` from the amplitude quadrature of one optimal clone
/// and the phase quadrature of the other.
pub fn clone_based_estimate(x_plus_clone1: f64, x_minus_clone2: f64) -> CoherentAmplitude {
    CoherentAmplitude::new(0.5 * x_plus_clone1, 0.5 * x_minus_clone2)
}

/// Per-component MSE of the posterior mean, `σ²/(2σ² + 1)`.
pub fn bayes_mse_theory(sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    s2 / (2.0 * s2 + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimator {
    /// Shrinkage estimate from dual homodyne.
    Bayes,
    /// `(X⁺ + iX⁻)/√2` from dual homodyne.
    Naive,
    /// `c·(X⁺ + iX⁻)` measured on clones at the optimal gain for `σ`;
    /// `c = ½` is [`clone_based_estimate`].
    CloneBased { coefficient: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseEstimate {
    /// Mean of `|α' − α|²/2`.
    pub mse: f64,
    pub std_error: f64,
    pub samples: usize,
}

pub const MIN_MSE_SAMPLES: usize = 1_000;

/// Monte Carlo MSE per real component: `α` is drawn from the symmetric
/// ensemble of width `sigma`, measured, and estimated.
pub fn estimator_mse(estimator: Estimator, sigma: f64, n: usize, seed: u64) -> Result<MseEstimate> {
    if n < MIN_MSE_SAMPLES {
        return Err(Error::Budget {
            min: MIN_MSE_SAMPLES,
            got: n,
        });
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::domain("sigma", sigma, "must be finite and >= 0"));
    }
    let readout = match estimator {
        Estimator::Bayes | Estimator::Naive => QuadratureReadout::dual_homodyne(),
        Estimator::CloneBased { .. } => {
            QuadratureReadout::from_cloner(ClonerConfig::new(optimal_gain(sigma))?)?
        }
    };
    let estimate = |o: DualHomodyneOutcome| match estimator {
        Estimator::Bayes => bayes_estimate(o, sigma),
        Estimator::Naive => naive_estimate(o),
        Estimator::CloneBased { coefficient } => {
            CoherentAmplitude::new(coefficient * o.x_plus, coefficient * o.x_minus)
        }
    };
    let m = chunked_moments(n, |chunk, len| {
        let mut stream = NormalStream::substream(seed, chunk as u64);
        let mut m = Moments::default();
        for _ in 0..len {
            let alpha = CoherentAmplitude::new(sigma * stream.next_normal(), sigma * stream.next_normal());
            let est = estimate(readout.sample(alpha, &mut stream));
            let (dx, dy) = (est.re - alpha.re, est.im - alpha.im);
            m.push(0.5 * (dx * dx + dy * dy));
        }
        m
    });
    Ok(MseEstimate {
        mse: m.mean,
        std_error: m.std_error(),
        samples: n,
    })
}
