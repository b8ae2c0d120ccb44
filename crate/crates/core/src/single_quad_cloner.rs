//! Single-quadrature cloner for coherent states on a line.
//!
//! The input passes a degenerate OPO of gain `H` and is then split on a
//! 50:50 beam splitter whose dark port carries minimum-uncertainty squeezed
//! vacuum with `V⁺ᵥ = v_plus`. Each clone has variances
//!
//! ```text
//! V±_clone = ½(√(H−1) ± √H)² + ½V±ᵥ
//! ```
//!
//! and the amplitude gain is unity at `H = 9/8`. At unity gain the clone
//! fidelity is independent of `αₓ`:
//!
//! ```text
//! F = 2 / √((5/4 + 1/(2V⁺ᵥ))(2 + V⁺ᵥ/2))
//! ```
//!
//! maximal at `V⁺ᵥ = √(8/5)` where `F = (4/9)(√10 − 1)`.

use nalgebra::{Matrix4, Vector4};
use rayon::prelude::*;

use crate::ensembles::{self, GaussianEnsemble, Method};
use crate::error::{Error, Result};
use crate::numerics::{linspace, maximize_scalar, maximize_smooth, OptimizationResult};
use crate::phase_space::{
    apply_beam_splitter, apply_opo, apply_quadrature_squeezer, coherent_fidelity, coherent_state,
    duan_combination, fidelity_vs_coherent, opo_quadrature_gain, squeezed_vacuum, CoherentAmplitude,
    GaussianState,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineClonerConfig {
    opo_gain: f64,
    v_plus: f64,
}

impl LineClonerConfig {
    pub fn new(opo_gain: f64, v_plus: f64) -> Result<Self> {
        if !(opo_gain >= 1.0 && opo_gain.is_finite()) {
            return Err(Error::domain("H", opo_gain, "OPO gain must be >= 1"));
        }
        if !(v_plus > 0.0 && v_plus.is_finite()) {
            return Err(Error::domain("v_plus", v_plus, "must be positive and finite"));
        }
        Ok(Self { opo_gain, v_plus })
    }

    /// Unity gain with the fidelity-optimal squeezing.
    pub fn optimal() -> Self {
        Self {
            opo_gain: unity_gain_h(),
            v_plus: optimal_v_plus(),
        }
    }

    pub fn opo_gain(&self) -> f64 {
        self.opo_gain
    }

    pub fn v_plus(&self) -> f64 {
        self.v_plus
    }

    /// Amplitude gain of each clone, `(√H + √(H−1))/√2`.
    pub fn amplitude_gain(&self) -> f64 {
        opo_quadrature_gain(self.opo_gain) / std::f64::consts::SQRT_2
    }

    /// Per-clone `(V⁺, V⁻)` from the closed-form variance expression.
    pub fn clone_variances(&self) -> (f64, f64) {
        let (a, b) = ((self.opo_gain - 1.0).sqrt(), self.opo_gain.sqrt());
        (
            0.5 * (a + b) * (a + b) + 0.5 * self.v_plus,
            0.5 * (a - b) * (a - b) + 0.5 / self.v_plus,
        )
    }
}

/// Joint statistics of both clones, ordered `(X⁺₁, X⁻₁, X⁺₂, X⁻₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoCloneCovariance {
    pub mean: Vector4<f64>,
    pub cov: Matrix4<f64>,
}

impl TwoCloneCovariance {
    fn from_state(state: &GaussianState) -> Self {
        Self {
            mean: Vector4::from_iterator(state.mean().iter().copied()),
            cov: Matrix4::from_iterator(state.cov().iter().copied()),
        }
    }

    pub fn to_state(&self) -> Result<GaussianState> {
        GaussianState::new(
            nalgebra::DVector::from_iterator(4, self.mean.iter().copied()),
            nalgebra::DMatrix::from_iterator(4, 4, self.cov.iter().copied()),
        )
    }

    pub fn clone_variances(&self, clone: usize) -> (f64, f64) {
        let i = 2 * clone;
        (self.cov[(i, i)], self.cov[(i + 1, i + 1)])
    }

    pub fn clone_mean(&self, clone: usize) -> (f64, f64) {
        (self.mean[2 * clone], self.mean[2 * clone + 1])
    }
}

/// `H` with unit amplitude gain after the 50:50 split: solves
/// `√H + √(H−1) = √2`, i.e. `H = ((x + 1/x)/2)²` with `x = √2`.
pub fn unity_gain_h() -> f64 {
    let x = std::f64::consts::SQRT_2;
    let c = 0.5 * (x + 1.0 / x);
    c * c
}

pub fn optimal_v_plus() -> f64 {
    (8.0f64 / 5.0).sqrt()
}

fn line_pair(alpha_x: f64, config: LineClonerConfig) -> Result<GaussianState> {
    let input = coherent_state(CoherentAmplitude::real(alpha_x)).tensor(&squeezed_vacuum(config.v_plus)?);
    let amplified = apply_opo(&input, 0, config.opo_gain)?;
    apply_beam_splitter(&amplified, 0, 1, 0.5)
}

/// Both clones of `|αₓ⟩` from the OPO + squeezed-port circuit.
pub fn clone_line(alpha_x: f64, config: LineClonerConfig) -> Result<TwoCloneCovariance> {
    Ok(TwoCloneCovariance::from_state(&line_pair(alpha_x, config)?))
}

/// Equivalent circuit with vacuum in the dark port and one OPO in each output
/// arm. The input OPO supplies `(√H + √(H−1))/√V⁺ᵥ` of the amplitude gain and
/// each arm squeezer the remaining `√V⁺ᵥ`, so the joint clone statistics are
/// those of [`clone_line`]. Arm squeezers with `V⁺ᵥ < 1` amplify `X⁻`.
pub fn clone_line_two_opo(alpha_x: f64, config: LineClonerConfig) -> Result<TwoCloneCovariance> {
    let arm = config.v_plus.sqrt();
    let front = opo_quadrature_gain(config.opo_gain) / arm;
    let input = coherent_state(CoherentAmplitude::real(alpha_x)).tensor(&GaussianState::vacuum(1));
    let squeezed = apply_quadrature_squeezer(&input, 0, front)?;
    let split = apply_beam_splitter(&squeezed, 0, 1, 0.5)?;
    let one = apply_quadrature_squeezer(&split, 0, arm)?;
    let both = apply_quadrature_squeezer(&one, 1, arm)?;
    Ok(TwoCloneCovariance::from_state(&both))
}

/// Fidelity of clone 1 against `|αₓ⟩`, from the circuit.
pub fn clone_fidelity(alpha_x: f64, config: LineClonerConfig) -> Result<f64> {
    fidelity_vs_coherent(CoherentAmplitude::real(alpha_x), &line_pair(alpha_x, config)?, 0)
}

/// Unity-gain clone fidelity as a function of the injected squeezing.
pub fn fidelity_line(v_plus: f64) -> Result<f64> {
    if !(v_plus > 0.0 && v_plus.is_finite()) {
        return Err(Error::domain("v_plus", v_plus, "must be positive and finite"));
    }
    Ok(2.0 / ((1.25 + 0.5 / v_plus) * (2.0 + 0.5 * v_plus)).sqrt())
}

/// `(√(8/5), (4/9)(√10 − 1))`.
pub fn optimal_vsqz() -> (f64, f64) {
    (optimal_v_plus(), 4.0 / 9.0 * (10f64.sqrt() - 1.0))
}

/// Numerical maximisation of [`fidelity_line`] over `v_plus ∈ (0, 10]`.
pub fn optimal_vsqz_numeric(tol: f64) -> Result<OptimizationResult> {
    maximize_smooth(|v| fidelity_line(v).unwrap_or(f64::NEG_INFINITY), 1e-9, 10.0, tol)
}

/// Amplitude-quadrature SNR transfer of one clone at unity gain,
/// `2/(2 + V⁺ᵥ)`.
pub fn snr_plus(v_plus: f64) -> Result<f64> {
    if !(v_plus > 0.0 && v_plus.is_finite()) {
        return Err(Error::domain("v_plus", v_plus, "must be positive and finite"));
    }
    Ok(2.0 / (2.0 + v_plus))
}

/// Amplitude-quadrature SNR transfer of one clone, from the circuit.
pub fn clone_snr_plus(config: LineClonerConfig) -> Result<f64> {
    let signal = clone_line(0.5, config)?.clone_mean(0).0;
    let noise = clone_line(0.0, config)?.clone_variances(0).0;
    Ok(signal * signal / noise)
}

/// SNR transfer of `X⁺₁ + X⁺₂`. The squeezed port cancels in the sum, so
/// this is 1 for every configuration.
pub fn sum_snr_transfer(config: LineClonerConfig) -> Result<f64> {
    let pair = clone_line(0.5, config)?;
    let signal = pair.mean[0] + pair.mean[2];
    let c = &pair.cov;
    let noise = c[(0, 0)] + c[(2, 2)] + 2.0 * c[(0, 2)];
    // unit input signal, unit vacuum noise
    Ok(signal * signal / noise)
}

/// `V((X⁺₁ − X⁺₂)/√2) + V((X⁻₁ + X⁻₂)/√2)`; below 2 the clones are entangled.
pub fn duan_value(pair: &TwoCloneCovariance) -> Result<f64> {
    duan_combination(&pair.to_state()?, 0, 1)
}

/// Clone fidelity averaged over a line ensemble of width `sigma_x`
/// (`σ_y = 0`), integrating the circuit-derived fidelity numerically.
pub fn line_average_fidelity(config: LineClonerConfig, sigma_x: f64, order: usize) -> Result<f64> {
    // clone statistics are affine in αₓ; read the response once
    let probe = clone_line(0.5, config)?;
    let gain = probe.clone_mean(0).0;
    let (v_plus, v_minus) = probe.clone_variances(0);
    let ensemble = GaussianEnsemble::new(sigma_x, 0.0)?;
    let avg = ensembles::average(
        |a| coherent_fidelity(a, (gain * 2.0 * a.re, 0.0), v_plus, v_minus),
        &ensemble,
        Method::Quadrature { order },
    )?;
    Ok(avg.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub h_range: (f64, f64),
    pub v_range: (f64, f64),
    pub h_steps: usize,
    pub v_steps: usize,
    /// Width along the line; large enough that only unity gain survives.
    pub sigma_x: f64,
    pub quadrature_order: usize,
    pub refine_tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            h_range: (1.0, 4.0),
            v_range: (0.01, 10.0),
            h_steps: 241,
            v_steps: 200,
            sigma_x: 1e4,
            quadrature_order: 40,
            refine_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepResult {
    pub grid_best: (f64, f64, f64),
    pub best_h: f64,
    pub best_v_plus: f64,
    pub best_fidelity: f64,
    pub evaluations: usize,
}

/// Grid search over `(H, V⁺ᵥ)` of the line-averaged fidelity, followed by a
/// nested golden-section refinement around the best grid cell.
pub fn parameter_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    let (h_lo, h_hi) = cfg.h_range;
    let (v_lo, v_hi) = cfg.v_range;
    if !(h_lo >= 1.0 && h_lo < h_hi) {
        return Err(Error::InvalidBracket { lo: h_lo, hi: h_hi });
    }
    if !(v_lo > 0.0 && v_lo < v_hi) {
        return Err(Error::InvalidBracket { lo: v_lo, hi: v_hi });
    }
    if cfg.h_steps < 2 || cfg.v_steps < 2 {
        return Err(Error::Budget {
            min: 2,
            got: cfg.h_steps.min(cfg.v_steps),
        });
    }
    let objective = |h: f64, v: f64| -> f64 {
        LineClonerConfig::new(h, v)
            .and_then(|c| line_average_fidelity(c, cfg.sigma_x, cfg.quadrature_order))
            .unwrap_or(f64::NEG_INFINITY)
    };

    let hs = linspace(h_lo, h_hi, cfg.h_steps);
    let vs = linspace(v_lo, v_hi, cfg.v_steps);
    let cells: Vec<(usize, usize, f64)> = (0..hs.len() * vs.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / vs.len(), k % vs.len());
            (i, j, objective(hs[i], vs[j]))
        })
        .collect();
    // first maximum in grid order
    let &(bi, bj, grid_f) = cells
        .iter()
        .fold(None, |best: Option<&(usize, usize, f64)>, c| match best {
            Some(b) if b.2 >= c.2 => Some(b),
            _ => Some(c),
        })
        .expect("grid is non-empty");

    let h_bracket = (hs[bi.saturating_sub(1)], hs[(bi + 1).min(hs.len() - 1)]);
    let v_bracket = (vs[bj.saturating_sub(1)], vs[(bj + 1).min(vs.len() - 1)]);
    let mut evaluations = cells.len();
    let best_h_for = |v: f64, evals: &mut usize| -> OptimizationResult {
        let r = maximize_scalar(|h| objective(h, v), h_bracket.0, h_bracket.1, 1e-12)
            .expect("grid bracket is valid");
        *evals += r.iterations + 2;
        r
    };
    let mut inner_evals = 0;
    let outer = maximize_scalar(
        |v| best_h_for(v, &mut inner_evals).value,
        v_bracket.0,
        v_bracket.1,
        cfg.refine_tol,
    )?;
    let inner = best_h_for(outer.argmax, &mut inner_evals);
    evaluations += inner_evals;

    let (best_h, best_v_plus, best_fidelity) = if inner.value >= grid_f {
        (inner.argmax, outer.argmax, inner.value)
    } else {
        (hs[bi], vs[bj], grid_f)
    };
    Ok(SweepResult {
        grid_best: (hs[bi], vs[bj], grid_f),
        best_h,
        best_v_plus,
        best_fidelity,
        evaluations,
    })
}
