//! Gaussian states in phase space and the linear-optics elements that act on
//! them.
//!
//! A state on `n` modes is a mean vector and a `2n × 2n` covariance matrix,
//! ordered `(X⁺₁, X⁻₁, …, X⁺ₙ, X⁻ₙ)`. The vacuum has identity covariance, so
//! the uncertainty relation reads `cov + iΩ ⪰ 0` with `Ω = ⊕ [[0, 1], [-1, 0]]`,
//! which for a diagonal single-mode block is `V⁺V⁻ ≥ 1`.
//!
//! Every element maps states to new states; nothing is mutated in place.
//! Amplifier ancillas are appended, acted on and traced out internally.

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const PHYSICAL_TOL: f64 = 1e-10;
const DIAGONAL_TOL: f64 = 1e-12;

/// Complex coherent amplitude `α = re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoherentAmplitude {
    pub re: f64,
    pub im: f64,
}

impl CoherentAmplitude {
    pub const ZERO: Self = Self { re: 0.0, im: 0.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub const fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    /// Quadrature means `(2 Re α, 2 Im α)` of the coherent state `|α⟩`.
    pub fn quadratures(&self) -> (f64, f64) {
        (2.0 * self.re, 2.0 * self.im)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state after checking dimensions, symmetry and the uncertainty
    /// relation.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidState(format!(
                "mean vector must have even positive length, got {dim}"
            )));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::InvalidState(format!(
                "covariance must be {dim}x{dim}, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.iter().chain(cov.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let state = Self { mean, cov };
        if !state.is_symmetric(SYMMETRY_TOL) {
            return Err(Error::InvalidState("covariance is not symmetric".into()));
        }
        if !state.is_physical(PHYSICAL_TOL) {
            return Err(Error::InvalidState(
                "covariance violates the uncertainty relation".into(),
            ));
        }
        Ok(state)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        assert!(n_modes > 0, "a state needs at least one mode");
        Self {
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes() {
            Err(Error::InvalidMode {
                index: mode,
                n_modes: self.n_modes(),
            })
        } else {
            Ok(())
        }
    }

    /// `(⟨X⁺⟩, ⟨X⁻⟩)` of one mode.
    pub fn mode_mean(&self, mode: usize) -> Result<(f64, f64)> {
        self.check_mode(mode)?;
        Ok((self.mean[2 * mode], self.mean[2 * mode + 1]))
    }

    pub fn mode_cov(&self, mode: usize) -> Result<Matrix2<f64>> {
        self.check_mode(mode)?;
        let i = 2 * mode;
        Ok(Matrix2::new(
            self.cov[(i, i)],
            self.cov[(i, i + 1)],
            self.cov[(i + 1, i)],
            self.cov[(i + 1, i + 1)],
        ))
    }

    /// `(V⁺, V⁻)` of one mode.
    pub fn mode_variances(&self, mode: usize) -> Result<(f64, f64)> {
        let c = self.mode_cov(mode)?;
        Ok((c[(0, 0)], c[(1, 1)]))
    }

    /// Tensor product `self ⊗ other`; modes of `other` follow those of `self`.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let (d1, d2) = (self.mean.len(), other.mean.len());
        let mut mean = DVector::zeros(d1 + d2);
        mean.rows_mut(0, d1).copy_from(&self.mean);
        mean.rows_mut(d1, d2).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(d1 + d2, d1 + d2);
        cov.view_mut((0, 0), (d1, d1)).copy_from(&self.cov);
        cov.view_mut((d1, d1), (d2, d2)).copy_from(&other.cov);
        GaussianState { mean, cov }
    }

    /// Marginal state of the listed modes, in the listed order.
    pub fn reduced(&self, modes: &[usize]) -> Result<GaussianState> {
        if modes.is_empty() {
            return Err(Error::InvalidState("cannot trace out every mode".into()));
        }
        for (k, &m) in modes.iter().enumerate() {
            self.check_mode(m)?;
            if modes[..k].contains(&m) {
                return Err(Error::RepeatedMode(m));
            }
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let mean = DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.mean[i]));
        let cov = DMatrix::from_fn(idx.len(), idx.len(), |r, c| self.cov[(idx[r], idx[c])]);
        Ok(GaussianState { mean, cov })
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.cov.amax().max(1.0);
        (&self.cov - self.cov.transpose()).amax() <= rel_tol * scale
    }

    /// Checks `cov + iΩ ⪰ 0` through its real representation
    /// `[[cov, -Ω], [Ω, cov]]`.
    pub fn is_physical(&self, rel_tol: f64) -> bool {
        self.min_uncertainty_eigenvalue() >= -rel_tol * self.cov.amax().max(1.0)
    }

    /// Smallest eigenvalue of the real representation of `cov + iΩ`; zero for
    /// pure states, negative for unphysical covariances.
    pub fn min_uncertainty_eigenvalue(&self) -> f64 {
        let d = self.cov.nrows();
        let omega = symplectic_form(self.n_modes());
        let mut big = DMatrix::zeros(2 * d, 2 * d);
        let sym = 0.5 * (&self.cov + self.cov.transpose());
        big.view_mut((0, 0), (d, d)).copy_from(&sym);
        big.view_mut((d, d), (d, d)).copy_from(&sym);
        big.view_mut((0, d), (d, d)).copy_from(&(-&omega));
        big.view_mut((d, 0), (d, d)).copy_from(&omega);
        SymmetricEigen::new(big).eigenvalues.min()
    }

    /// Applies `x ↦ S x` on the listed modes (`S` is `2k × 2k` for `k` modes),
    /// leaving the rest untouched.
    fn apply_linear(&self, modes: &[usize], s: &DMatrix<f64>) -> GaussianState {
        let d = self.mean.len();
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let mut full = DMatrix::identity(d, d);
        for (r, &ir) in idx.iter().enumerate() {
            for (c, &ic) in idx.iter().enumerate() {
                full[(ir, ic)] = s[(r, c)];
            }
        }
        let mean = &full * &self.mean;
        let mut cov = &full * &self.cov * full.transpose();
        symmetrize(&mut cov);
        GaussianState { mean, cov }
    }

    /// Total `Σ (mean² + variance)` over all quadratures.
    pub fn total_second_moment(&self) -> f64 {
        self.mean.iter().map(|m| m * m).sum::<f64>() + self.cov.trace()
    }
}

fn symmetrize(cov: &mut DMatrix<f64>) {
    let t = cov.transpose();
    *cov += t;
    *cov *= 0.5;
}

/// `Ω = ⊕ [[0, 1], [-1, 0]]` on `n` modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

pub fn coherent_state(alpha: CoherentAmplitude) -> GaussianState {
    let (xp, xm) = alpha.quadratures();
    GaussianState {
        mean: DVector::from_vec(vec![xp, xm]),
        cov: DMatrix::identity(2, 2),
    }
}

/// Minimum-uncertainty squeezed vacuum with `V⁺ = v_plus`, `V⁻ = 1/v_plus`.
pub fn squeezed_vacuum(v_plus: f64) -> Result<GaussianState> {
    if !(v_plus > 0.0 && v_plus.is_finite()) {
        return Err(Error::domain("v_plus", v_plus, "must be positive and finite"));
    }
    Ok(GaussianState {
        mean: DVector::zeros(2),
        cov: DMatrix::from_diagonal(&DVector::from_vec(vec![v_plus, 1.0 / v_plus])),
    })
}

/// Phase-insensitive amplifier `â → √G â + √(G−1) v̂†` with the idler `v̂`
/// starting in vacuum.
pub fn apply_phase_insensitive_amp(
    state: &GaussianState,
    mode: usize,
    gain: f64,
) -> Result<GaussianState> {
    state.check_mode(mode)?;
    if !(gain >= 1.0 && gain.is_finite()) {
        return Err(Error::domain(
            "G",
            gain,
            "phase-insensitive amplification requires gain >= 1",
        ));
    }
    let n = state.n_modes();
    let extended = state.tensor(&GaussianState::vacuum(1));
    let (c, s) = (gain.sqrt(), (gain - 1.0).sqrt());
    // (X⁺_a, X⁻_a, X⁺_v, X⁻_v): the conjugated idler flips the sign of its X⁻.
    #[rustfmt::skip]
    let two_mode = DMatrix::from_row_slice(4, 4, &[
        c,   0.0, s,   0.0,
        0.0, c,   0.0, -s,
        s,   0.0, c,   0.0,
        0.0, -s,  0.0, c,
    ]);
    let out = extended.apply_linear(&[mode, n], &two_mode);
    out.reduced(&(0..n).collect::<Vec<_>>())
}

/// Noiseless quadrature squeezer: `X⁺ ↦ factor·X⁺`, `X⁻ ↦ X⁻/factor`.
pub fn apply_quadrature_squeezer(
    state: &GaussianState,
    mode: usize,
    factor: f64,
) -> Result<GaussianState> {
    state.check_mode(mode)?;
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::domain("factor", factor, "must be positive and finite"));
    }
    let s = DMatrix::from_diagonal(&DVector::from_vec(vec![factor, 1.0 / factor]));
    Ok(state.apply_linear(&[mode], &s))
}

/// Amplitude-quadrature gain `√H + √(H−1)` of a degenerate OPO with
/// parametric gain `H`.
pub fn opo_quadrature_gain(h: f64) -> f64 {
    h.sqrt() + (h - 1.0).sqrt()
}

/// Degenerate OPO `â → √H â + √(H−1) â†`, amplifying `X⁺` by `√H + √(H−1)`
/// and de-amplifying `X⁻` by `√H − √(H−1)`.
pub fn apply_opo(state: &GaussianState, mode: usize, h: f64) -> Result<GaussianState> {
    state.check_mode(mode)?;
    if !(h >= 1.0 && h.is_finite()) {
        return Err(Error::domain("H", h, "OPO gain must be >= 1"));
    }
    let plus = opo_quadrature_gain(h);
    let minus = h.sqrt() - (h - 1.0).sqrt();
    let s = DMatrix::from_diagonal(&DVector::from_vec(vec![plus, minus]));
    Ok(state.apply_linear(&[mode], &s))
}

/// Real beam splitter acting identically on both quadratures:
///
/// ```text
/// a' = √t a + √(1−t) b
/// b' = √(1−t) a − √t b
/// ```
///
/// At `t = 1/2` this is `b₁ = (a + v)/√2`, `b₂ = (a − v)/√2`. At `t = 1` mode
/// `a` is untouched and mode `b` picks up a π phase, which leaves zero-mean
/// inputs (and every covariance) unchanged.
pub fn apply_beam_splitter(
    state: &GaussianState,
    mode_a: usize,
    mode_b: usize,
    transmissivity: f64,
) -> Result<GaussianState> {
    state.check_mode(mode_a)?;
    state.check_mode(mode_b)?;
    if mode_a == mode_b {
        return Err(Error::RepeatedMode(mode_a));
    }
    if !(0.0..=1.0).contains(&transmissivity) {
        return Err(Error::domain(
            "transmissivity",
            transmissivity,
            "must lie in [0, 1]",
        ));
    }
    let (t, r) = (transmissivity.sqrt(), (1.0 - transmissivity).sqrt());
    #[rustfmt::skip]
    let bs = DMatrix::from_row_slice(4, 4, &[
        t,   0.0, r,   0.0,
        0.0, t,   0.0, r,
        r,   0.0, -t,  0.0,
        0.0, r,   0.0, -t,
    ]);
    Ok(state.apply_linear(&[mode_a, mode_b], &bs))
}

/// Fidelity of a Gaussian mode with diagonal covariance `(V⁺, V⁻)` and means
/// `(m⁺, m⁻)` against the coherent state `|α⟩`:
///
/// ```text
/// F = 2/√((1+V⁺)(1+V⁻)) · exp(−(m⁺−2αₓ)²/(2(1+V⁺)) − (m⁻−2α_y)²/(2(1+V⁻)))
/// ```
pub fn coherent_fidelity(
    alpha: CoherentAmplitude,
    mean: (f64, f64),
    v_plus: f64,
    v_minus: f64,
) -> f64 {
    let (tp, tm) = alpha.quadratures();
    let (dp, dm) = (mean.0 - tp, mean.1 - tm);
    2.0 / ((1.0 + v_plus) * (1.0 + v_minus)).sqrt()
        * (-dp * dp / (2.0 * (1.0 + v_plus)) - dm * dm / (2.0 * (1.0 + v_minus))).exp()
}

/// Fidelity of `mode` of `state` against `|α⟩`. The mode's covariance block
/// must be diagonal.
pub fn fidelity_vs_coherent(
    alpha: CoherentAmplitude,
    state: &GaussianState,
    mode: usize,
) -> Result<f64> {
    let block = state.mode_cov(mode)?;
    let scale = block[(0, 0)].abs().max(block[(1, 1)].abs()).max(1.0);
    if block[(0, 1)].abs() > DIAGONAL_TOL * scale || block[(1, 0)].abs() > DIAGONAL_TOL * scale {
        return Err(Error::UnsupportedState(format!(
            "mode {mode} has correlated quadratures (off-diagonal {:e})",
            block[(0, 1)]
        )));
    }
    Ok(coherent_fidelity(
        alpha,
        state.mode_mean(mode)?,
        block[(0, 0)],
        block[(1, 1)],
    ))
}

/// `V((X⁺_a − X⁺_b)/√2) + V((X⁻_a + X⁻_b)/√2)`. Values below 2 witness
/// entanglement between the two modes.
pub fn duan_combination(state: &GaussianState, mode_a: usize, mode_b: usize) -> Result<f64> {
    state.check_mode(mode_a)?;
    state.check_mode(mode_b)?;
    if mode_a == mode_b {
        return Err(Error::RepeatedMode(mode_a));
    }
    let c = state.cov();
    let (pa, ma, pb, mb) = (2 * mode_a, 2 * mode_a + 1, 2 * mode_b, 2 * mode_b + 1);
    let diff_plus = 0.5 * (c[(pa, pa)] + c[(pb, pb)] - 2.0 * c[(pa, pb)]);
    let sum_minus = 0.5 * (c[(ma, ma)] + c[(mb, mb)] + 2.0 * c[(ma, mb)]);
    Ok(diff_plus + sum_minus)
}
