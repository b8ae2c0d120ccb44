//! Deterministic numerical kernels shared by the rest of the crate.
//!
//! - Gauss–Hermite rules for `∫ e^{-t²} f(t) dt`, computed by a Golub–Welsch
//!   eigen-solve of the Jacobi matrix and polished with Newton steps on the
//!   orthonormal Hermite recurrence.
//! - Golden-section maximisation on a closed bracket, optionally polished by
//!   bisection on the derivative for smooth interior maxima.
//! - Bisection root finding.
//! - Seeded standard-normal streams.
//!
//! # Random streams
//!
//! [`NormalStream`] draws from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`, and maps uniforms to standard normals with the
//! ziggurat sampler of `rand_distr::StandardNormal`. Independent substreams
//! for parallel workers use the same seed with a distinct ChaCha stream id
//! (`set_stream(index)`), so a `(seed, index)` pair always names the same
//! sequence regardless of how many threads run.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Nodes and weights of an `order`-point Gauss–Hermite rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(order: usize) -> Result<Self> {
        let (nodes, weights) = gauss_hermite_nodes(order)?;
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Approximates `∫ e^{-t²} f(t) dt` over the real line.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    /// Approximates `E[f(X)]` for `X ~ N(mean, std²)`.
    pub fn expectation<F: FnMut(f64) -> f64>(&self, mean: f64, std: f64, mut f: F) -> f64 {
        let scale = std::f64::consts::SQRT_2 * std;
        self.integrate(|t| f(mean + scale * t)) / PI.sqrt()
    }
}

/// Evaluates the orthonormal Hermite polynomials `p_{n-1}(x)` and `p_n(x)`
/// (orthonormal w.r.t. `e^{-x²}`), together with `Σ_{k<n} p_k(x)²`.
fn orthonormal_hermite(n: usize, x: f64) -> (f64, f64, f64) {
    let mut p_prev = 0.0;
    let mut p = PI.powf(-0.25);
    let mut sum_sq = 0.0;
    for k in 0..n {
        sum_sq += p * p;
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * p - (kf / (kf + 1.0)).sqrt() * p_prev;
        p_prev = p;
        p = next;
    }
    (p_prev, p, sum_sq)
}

/// Gauss–Hermite nodes (ascending) and weights for the weight `e^{-t²}`.
pub fn gauss_hermite_nodes(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order < 1 {
        return Err(Error::Budget { min: 1, got: order });
    }
    let n = order;
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    // Newton polish: p_n'(x) = sqrt(2n) p_{n-1}(x).
    for x in nodes.iter_mut() {
        for _ in 0..8 {
            let (p_nm1, p_n, _) = orthonormal_hermite(n, *x);
            let dp = (2.0 * n as f64).sqrt() * p_nm1;
            if dp == 0.0 {
                break;
            }
            let step = p_n / dp;
            *x -= step;
            if step.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
    }

    // symmetric about zero
    for i in 0..n / 2 {
        let m = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -m;
        nodes[n - 1 - i] = m;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }

    // Christoffel numbers.
    let weights = nodes
        .iter()
        .map(|&x| 1.0 / orthonormal_hermite(n, x).2)
        .collect();
    Ok((nodes, weights))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationResult {
    pub argmax: f64,
    pub value: f64,
    pub iterations: usize,
    /// Width of the final bracket.
    pub tolerance_achieved: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_GOLDEN_ITERATIONS: usize = 500;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Every evaluation lies inside `[lo, hi]`, and the bracket shrinks by the
/// golden ratio each iteration until its width is at most `tol`. A maximum on
/// the boundary is approached to within `tol`.
pub fn maximize_scalar<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<OptimizationResult> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidBracket { lo, hi });
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tol", tol, "tolerance must be positive"));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while b - a > tol && iterations < MAX_GOLDEN_ITERATIONS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    let (argmax, value) = if fc >= fd { (c, fc) } else { (d, fd) };
    Ok(OptimizationResult {
        argmax,
        value,
        iterations,
        tolerance_achieved: b - a,
    })
}

/// [`maximize_scalar`] followed by a bisection on the central-difference
/// derivative around the golden-section argmax.
///
/// Comparing function values cannot place the argmax of a smooth maximum
/// closer than about `√ε` relative; the derivative root can. The polish is
/// skipped when the derivative shows no sign change near the golden-section
/// result (a boundary maximum or a kink).
pub fn maximize_smooth<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<OptimizationResult> {
    let golden = maximize_scalar(&mut f, lo, hi, tol)?;
    let x = golden.argmax;
    let scale = x.abs().max(1.0);
    let h = 1e-5 * scale;
    let w = (1e-4 * scale).max(10.0 * golden.tolerance_achieved);
    let (a, b) = ((x - w).max(lo + h), (x + w).min(hi - h));
    if !(a < x && x < b) {
        return Ok(golden);
    }
    let mut evals = 0;
    let mut slope = |t: f64| {
        evals += 2;
        (f(t + h) - f(t - h)) / (2.0 * h)
    };
    if !(slope(a) > 0.0 && slope(b) < 0.0) {
        return Ok(golden);
    }
    let root = find_root(&mut slope, a, b, (tol * 1e-3).max(4.0 * f64::EPSILON * scale))?;
    let value = f(root);
    if value < golden.value - 4.0 * f64::EPSILON * golden.value.abs() {
        return Ok(golden);
    }
    Ok(OptimizationResult {
        argmax: root,
        value,
        iterations: golden.iterations + evals / 2,
        tolerance_achieved: golden.tolerance_achieved,
    })
}

/// Bisection for a root of `f` on `[lo, hi]`, requiring `f(lo)·f(hi) ≤ 0`.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidBracket { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoSignChange {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Seeded stream of standard normal deviates. See the module docs for the
/// algorithm.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha8Rng,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    /// The `index`-th independent substream for `seed`.
    pub fn substream(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { rng }
    }

    pub fn next_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

impl Iterator for NormalStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_normal())
    }
}

pub fn seeded_stream(seed: u64) -> NormalStream {
    NormalStream::new(seed)
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive (both positive).
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut out: Vec<f64> = linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect();
    if let Some(first) = out.first_mut() {
        *first = lo;
    }
    if n > 1 {
        out[n - 1] = hi;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::SQRT_2;

    /// ∫ t^{2k} e^{-t²} dt = Γ(k + 1/2) = (2k-1)!! √π / 2^k
    fn even_moment(k: u32) -> f64 {
        let double_fact: f64 = (1..=2 * k as i64 - 1).step_by(2).map(|x| x as f64).product();
        double_fact * PI.sqrt() / 2f64.powi(k as i32)
    }

    #[test]
    fn order_one_rule() {
        let (x, w) = gauss_hermite_nodes(1).unwrap();
        assert_eq!(x, vec![0.0]);
        assert_abs_diff_eq!(w[0], PI.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn order_two_rule() {
        let (x, w) = gauss_hermite_nodes(2).unwrap();
        assert_abs_diff_eq!(x[0], -1.0 / SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(x[1], 1.0 / SQRT_2, epsilon = 1e-15);
        for wi in w {
            assert_abs_diff_eq!(wi, PI.sqrt() / 2.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn order_zero_rejected() {
        assert!(gauss_hermite_nodes(0).is_err());
    }

    #[test]
    fn order_twenty_tenth_moment() {
        let rule = GaussHermite::new(20).unwrap();
        let got = rule.integrate(|t| t.powi(10));
        assert_abs_diff_eq!(got, even_moment(5), epsilon = 1e-12);
    }

    #[test]
    fn weights_positive_symmetric_and_normalised() {
        for order in [1, 2, 3, 7, 20, 40, 64] {
            let (x, w) = gauss_hermite_nodes(order).unwrap();
            assert!(w.iter().all(|&wi| wi > 0.0));
            assert_abs_diff_eq!(w.iter().sum::<f64>(), PI.sqrt(), epsilon = 1e-12);
            for i in 0..order {
                assert_eq!(x[i], -x[order - 1 - i]);
            }
        }
    }

    #[test]
    fn exact_on_polynomials_up_to_degree_2n_minus_1() {
        for order in [3usize, 10, 20, 40] {
            let rule = GaussHermite::new(order).unwrap();
            for deg in 0..(2 * order) as u32 {
                let got = rule.integrate(|t| t.powi(deg as i32));
                let want = if deg % 2 == 1 { 0.0 } else { even_moment(deg / 2) };
                // relative to the magnitude of the summed terms
                let scale = even_moment(deg.div_ceil(2)).max(1.0);
                assert!(
                    (got - want).abs() <= 1e-12 * scale,
                    "order {order} degree {deg}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn expectation_of_normal_second_moment() {
        let rule = GaussHermite::new(10).unwrap();
        let got = rule.expectation(1.5, 2.0, |x| x * x);
        assert_abs_diff_eq!(got, 1.5 * 1.5 + 4.0, epsilon = 1e-12);
    }

    #[test]
    fn golden_section_quadratic() {
        let r = maximize_scalar(|x| -(x - 2.0) * (x - 2.0), 0.0, 5.0, 1e-10).unwrap();
        assert_abs_diff_eq!(r.argmax, 2.0, epsilon = 1e-7);
        assert!(r.tolerance_achieved <= 1e-10);
    }

    #[test]
    fn golden_section_boundary_maximum() {
        let r = maximize_scalar(|x| -x, 1.0, 3.0, 1e-10).unwrap();
        assert_abs_diff_eq!(r.argmax, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn smooth_maximum_beats_value_resolution() {
        let peak = std::f64::consts::SQRT_2;
        let f = |x: f64| 0.9 - 0.02 * (x - peak) * (x - peak);
        let r = maximize_smooth(f, 0.0, 10.0, 1e-12).unwrap();
        assert_abs_diff_eq!(r.argmax, peak, epsilon = 1e-9);
        assert!(r.tolerance_achieved <= 1e-12);
        let edge = maximize_smooth(|x| -x, 1.0, 3.0, 1e-10).unwrap();
        assert_abs_diff_eq!(edge.argmax, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn golden_section_rejects_bad_bracket() {
        assert!(matches!(
            maximize_scalar(|x| x, 2.0, 1.0, 1e-6),
            Err(Error::InvalidBracket { .. })
        ));
        assert!(maximize_scalar(|x| x, 1.0, 1.0, 1e-6).is_err());
    }

    #[test]
    fn bisection_linear() {
        let r = find_root(|x| x - 0.5, 0.0, 1.0, 1e-14).unwrap();
        assert_abs_diff_eq!(r, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn bisection_unity_gain_opo() {
        let r = find_root(|h| h.sqrt() + (h - 1.0).sqrt() - SQRT_2, 1.0, 2.0, 1e-13).unwrap();
        assert_abs_diff_eq!(r, 9.0 / 8.0, epsilon = 1e-10);
    }

    #[test]
    fn bisection_requires_sign_change() {
        assert!(matches!(
            find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-8),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn bisection_halves_interval() {
        let mut calls = 0;
        let tol = 1e-6;
        find_root(
            |x| {
                calls += 1;
                x - 0.3
            },
            0.0,
            1.0,
            tol,
        )
        .unwrap();
        // two endpoint evaluations + ceil(log2(1/tol)) halvings
        assert_eq!(calls, 2 + (1.0f64 / tol).log2().ceil() as usize);
    }

    #[test]
    fn stream_is_deterministic() {
        let a: Vec<f64> = seeded_stream(7).take(10_000).collect();
        let b: Vec<f64> = seeded_stream(7).take(10_000).collect();
        assert_eq!(a, b);
        let c: Vec<f64> = NormalStream::substream(7, 1).take(10).collect();
        assert_ne!(a[..10], c[..]);
    }

    #[test]
    fn stream_moments() {
        let n = 1_000_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for x in seeded_stream(2024).take(n) {
            s += x;
            s2 += x * x;
        }
        let mean = s / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn grids() {
        let g = linspace(0.0, 10.0, 201);
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[200], 10.0);
        assert_abs_diff_eq!(g[1], 0.05, epsilon = 1e-15);
        let l = logspace(0.2, 5.0, 101);
        assert_eq!(l[0], 0.2);
        assert_eq!(l[100], 5.0);
        assert!(l.windows(2).all(|w| w[0] < w[1]));
    }

    proptest::proptest! {
        #[test]
        fn golden_stays_in_bracket(lo in -10.0f64..10.0, width in 1e-3f64..20.0, peak in -30.0f64..30.0) {
            let hi = lo + width;
            let mut seen = Vec::new();
            let r = maximize_scalar(|x| { seen.push(x); -(x - peak).abs() }, lo, hi, 1e-9).unwrap();
            proptest::prop_assert!(seen.iter().all(|&x| x >= lo && x <= hi));
            let expected = peak.clamp(lo, hi);
            proptest::prop_assert!((r.argmax - expected).abs() < 1e-8);
        }
    }
}
