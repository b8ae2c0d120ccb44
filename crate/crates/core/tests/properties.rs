use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use gaussclone::ensembles::Method;
use gaussclone::estimation::{bayes_estimate, estimator_mse, naive_estimate, DualHomodyneOutcome, Estimator};
use gaussclone::numerics::linspace;
use gaussclone::phase_space::{
    apply_beam_splitter, apply_opo, apply_phase_insensitive_amp, apply_quadrature_squeezer, coherent_fidelity,
    coherent_state, fidelity_vs_coherent,
};
use gaussclone::single_quad_cloner::{clone_line, fidelity_line, unity_gain_h, LineClonerConfig};
use gaussclone::symmetric_cloner::{
    average_fidelity, average_fidelity_closed, clone_pair, max_average_fidelity, optimal_gain, ClonerConfig,
    BRANCH_SIGMA_SQ,
};
use gaussclone::teleportation::{nocloning_lambda, nocloning_lambda_bisect, tele_fidelity};
use gaussclone::{CoherentAmplitude, GaussianState};

#[derive(Debug, Clone)]
enum Gate {
    Amp { mode: usize, gain: f64 },
    Opo { mode: usize, h: f64 },
    Squeeze { mode: usize, factor: f64 },
    Split { a: usize, b: usize, t: f64 },
}

fn gate(n: usize) -> impl Strategy<Value = Gate> {
    prop_oneof![
        (0..n, 1.0f64..4.0).prop_map(|(mode, gain)| Gate::Amp { mode, gain }),
        (0..n, 1.0f64..3.0).prop_map(|(mode, h)| Gate::Opo { mode, h }),
        (0..n, 0.3f64..3.0).prop_map(|(mode, factor)| Gate::Squeeze { mode, factor }),
        (0..n, 1..n, 0.0f64..=1.0).prop_map(move |(a, k, t)| Gate::Split { a, b: (a + k) % n, t }),
    ]
}

fn amplitude() -> impl Strategy<Value = CoherentAmplitude> {
    (-4.0f64..4.0, -4.0f64..4.0).prop_map(|(re, im)| CoherentAmplitude::new(re, im))
}

fn displaced_squeezed(alpha: CoherentAmplitude, v_plus: f64) -> GaussianState {
    let (mx, my) = alpha.quadratures();
    GaussianState::new(DVector::from_vec(vec![mx, my]), DMatrix::from_diagonal(&DVector::from_vec(vec![v_plus, 1.0 / v_plus])))
        .unwrap()
}

fn apply(state: &GaussianState, g: &Gate) -> GaussianState {
    match *g {
        Gate::Amp { mode, gain } => apply_phase_insensitive_amp(state, mode, gain),
        Gate::Opo { mode, h } => apply_opo(state, mode, h),
        Gate::Squeeze { mode, factor } => apply_quadrature_squeezer(state, mode, factor),
        Gate::Split { a, b, t } => apply_beam_splitter(state, a, b, t),
    }
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn random_circuits_stay_physical(
        inputs in prop::collection::vec((amplitude(), 0.2f64..5.0), 3),
        gates in prop::collection::vec(gate(3), 1..12),
    ) {
        let mut state = coherent_state(inputs[0].0);
        for &(alpha, v) in &inputs[1..] {
            state = state.tensor(&displaced_squeezed(alpha, v));
        }
        for g in &gates {
            state = apply(&state, g);
        }
        prop_assert!(state.is_symmetric(1e-12));
        prop_assert!(state.is_physical(1e-9), "min eigenvalue {}", state.min_uncertainty_eigenvalue());
        for m in 0..3 {
            let c = state.mode_cov(m).unwrap();
            prop_assert!(c.determinant() >= 1.0 - 1e-9);
            if c[(0, 1)].abs() < 1e-12 {
                prop_assert!(c[(0, 0)] * c[(1, 1)] >= 1.0 - 1e-9);
            }
        }
    }
}

proptest! {
    #[test]
    fn amplifier_noise_floor(gain in 1.0f64..50.0) {
        let out = apply_phase_insensitive_amp(&GaussianState::vacuum(1), 0, gain).unwrap();
        let (vp, vm) = out.mode_variances(0).unwrap();
        prop_assert!(vp >= 2.0 * gain - 1.0 - 1e-12 && vm >= 2.0 * gain - 1.0 - 1e-12);
    }

    #[test]
    fn opo_preserves_purity(v in 0.05f64..20.0, h in 1.0f64..10.0, alpha in amplitude()) {
        let input = displaced_squeezed(alpha, v);
        prop_assert!((input.mode_cov(0).unwrap().determinant() - 1.0).abs() < 1e-12);
        let out = apply_opo(&input, 0, h).unwrap();
        prop_assert!((out.mode_cov(0).unwrap().determinant() - 1.0).abs() < 1e-12 * (1.0 + 4.0 * h));
    }

    #[test]
    fn beam_splitter_conserves_energy(a in amplitude(), b in amplitude(), va in 0.1f64..10.0, vb in 0.1f64..10.0, t in 0.0f64..=1.0) {
        let input = displaced_squeezed(a, va).tensor(&displaced_squeezed(b, vb));
        let out = apply_beam_splitter(&input, 0, 1, t).unwrap();
        let (e_in, e_out) = (input.total_second_moment(), out.total_second_moment());
        prop_assert!((e_in - e_out).abs() <= 1e-12, "{e_in} vs {e_out}");
    }

    #[test]
    fn fidelity_is_bounded(alpha in amplitude(), dx in -3.0f64..3.0, dy in -3.0f64..3.0, vp in 1.0f64..10.0, vm in 1.0f64..10.0) {
        let (mx, my) = alpha.quadratures();
        let f = coherent_fidelity(alpha, (mx + dx, my + dy), vp, vm);
        prop_assert!(f > 0.0 && f <= 1.0);
        let exact = fidelity_vs_coherent(alpha, &coherent_state(alpha), 0).unwrap();
        prop_assert!((exact - 1.0).abs() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cloner_circuit_matches_formulas(alpha in amplitude(), gain in 1.0f64..6.0) {
        let pair = clone_pair(alpha, ClonerConfig::new(gain).unwrap()).unwrap();
        let g = (gain / 2.0).sqrt();
        let (mx, my) = alpha.quadratures();
        for m in 0..2 {
            let (vp, vm) = pair.mode_variances(m).unwrap();
            let (xp, xm) = pair.mode_mean(m).unwrap();
            prop_assert!((vp - gain).abs() < 1e-12 && (vm - gain).abs() < 1e-12);
            prop_assert!((xp - g * mx).abs() < 1e-12 && (xm - g * my).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn line_cloner_matches_variance_display(h in 1.0f64..4.0, v in 0.05f64..10.0, ax in -5.0f64..5.0) {
        let cfg = LineClonerConfig::new(h, v).unwrap();
        let pair = clone_line(ax, cfg).unwrap();
        let (a, b) = ((h - 1.0).sqrt(), h.sqrt());
        let want = (0.5 * (a + b).powi(2) + 0.5 * v, 0.5 * (a - b).powi(2) + 0.5 / v);
        for c in 0..2 {
            let (vp, vm) = pair.clone_variances(c);
            prop_assert!((vp - want.0).abs() < 1e-12 && (vm - want.1).abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_order_converges(sigma in 0.0f64..=10.0, gain in 1.0f64..=4.0) {
        let cfg = ClonerConfig::new(gain).unwrap();
        let lo = average_fidelity(cfg, sigma, Method::Quadrature { order: 20 }).unwrap().value;
        let hi = average_fidelity(cfg, sigma, Method::Quadrature { order: 40 }).unwrap().value;
        prop_assert!((lo - hi).abs() < 1e-10, "{lo} vs {hi}");
    }

    #[test]
    fn optimal_gain_is_optimal(sigma in 0.0f64..=10.0, gain in 1.0f64..6.0) {
        let best = ClonerConfig::new(optimal_gain(sigma)).unwrap();
        let other = ClonerConfig::new(gain).unwrap();
        prop_assert!(average_fidelity_closed(best, sigma) >= average_fidelity_closed(other, sigma) - 1e-15);
        prop_assert!((average_fidelity_closed(best, sigma) - max_average_fidelity(sigma)).abs() < 1e-12);
    }

    #[test]
    fn bayes_estimate_is_linear(xp in -10.0f64..10.0, xm in -10.0f64..10.0, c in -5.0f64..5.0, sigma in 0.0f64..10.0) {
        let one = bayes_estimate(DualHomodyneOutcome { x_plus: xp, x_minus: xm }, sigma);
        let scaled = bayes_estimate(DualHomodyneOutcome { x_plus: c * xp, x_minus: c * xm }, sigma);
        prop_assert!((scaled.re - c * one.re).abs() < 1e-12 && (scaled.im - c * one.im).abs() < 1e-12);
        let naive = naive_estimate(DualHomodyneOutcome { x_plus: xp, x_minus: xm });
        prop_assert!(one.norm_sqr() <= naive.norm_sqr() + 1e-12);
    }

    #[test]
    fn tele_increases_with_lambda(l1 in 0.0f64..0.99, dl in 0.001f64..0.009, sigma in 0.01f64..20.0) {
        prop_assert!(tele_fidelity(l1 + dl, sigma).unwrap() > tele_fidelity(l1, sigma).unwrap());
    }
}

#[test]
fn monte_carlo_agrees_with_quadrature() {
    let cfg = ClonerConfig::new(1.6).unwrap();
    let sigma = 1.5;
    let quad = average_fidelity(cfg, sigma, Method::default()).unwrap().value;
    let inside = (0..100)
        .filter(|&seed| {
            let mc = average_fidelity(cfg, sigma, Method::MonteCarlo { samples: 20_000, seed }).unwrap();
            (mc.value - quad).abs() <= 3.0 * mc.std_error
        })
        .count();
    assert!(inside >= 99, "{inside}/100 within 3 standard errors");
}

#[test]
fn unity_gain_is_width_independent() {
    let cfg = ClonerConfig::new(2.0).unwrap();
    for method in [Method::default(), Method::Quadrature { order: 20 }] {
        let values: Vec<f64> = [0.1, 1.0, 10.0]
            .iter()
            .map(|&s| average_fidelity(cfg, s, method).unwrap().value)
            .collect();
        for v in &values {
            assert_abs_diff_eq!(*v, values[0], epsilon = 1e-10);
        }
    }
}

#[test]
fn numeric_optimum_on_fifty_widths() {
    for sigma in linspace(0.0, 10.0, 50) {
        let r = gaussclone::symmetric_cloner::numeric_optimal_gain(sigma, 40, 1e-10).unwrap();
        assert_abs_diff_eq!(r.argmax, optimal_gain(sigma), epsilon = 1e-6);
        assert_abs_diff_eq!(r.value, max_average_fidelity(sigma), epsilon = 1e-6);
    }
}

#[test]
fn max_fidelity_is_strictly_decreasing() {
    let grid = linspace(1e-3, 50.0, 2000);
    for w in grid.windows(2) {
        let (a, b) = (max_average_fidelity(w[0]), max_average_fidelity(w[1]));
        assert!(b < a, "not decreasing at sigma = {}", w[1]);
        assert!(b > 2.0 / 3.0 && a <= 1.0);
    }
    assert_eq!(max_average_fidelity(0.0), 1.0);
}

#[test]
fn boundary_root_identity() {
    for sigma in linspace(0.0, 20.0, 100) {
        let l = nocloning_lambda(sigma);
        let diff = tele_fidelity(l, sigma).unwrap() - max_average_fidelity(sigma);
        assert!(diff.abs() < 1e-9, "sigma = {sigma}: {diff:e}");
        assert_abs_diff_eq!(l, nocloning_lambda_bisect(sigma, 1e-14).unwrap(), epsilon = 1e-8);
    }
}

#[test]
fn boundary_decreases_towards_one_third() {
    let grid = linspace(0.01, 200.0, 4000);
    let lambdas: Vec<f64> = grid.iter().map(|&s| nocloning_lambda(s)).collect();
    for w in lambdas.windows(2) {
        assert!(w[0] > 1.0 / 3.0 && w[1] > 1.0 / 3.0);
        assert!(w[1] < w[0]);
    }
    let s = BRANCH_SIGMA_SQ.sqrt();
    assert_abs_diff_eq!(nocloning_lambda(s - 1e-12), nocloning_lambda(s + 1e-12), epsilon = 1e-8);
}

#[test]
fn shrinkage_beats_unshrunk_estimate() {
    let n = 1_000_000;
    for sigma in [0.3, 1.0, 3.0] {
        let b = estimator_mse(Estimator::Bayes, sigma, n, 5).unwrap();
        let v = estimator_mse(Estimator::Naive, sigma, n, 5).unwrap();
        let gap = (v.mse - b.mse) / b.std_error.hypot(v.std_error);
        assert!(gap > 3.0, "sigma = {sigma}: gap {gap}");
    }
}

#[test]
fn clone_based_half_is_on_the_optimum_plateau() {
    let n = 200_000;
    for sigma in [1.2, 2.0, 5.0] {
        assert!(optimal_gain(sigma) > 1.0);
        let mse = |c: f64| estimator_mse(Estimator::CloneBased { coefficient: c }, sigma, n, 17).unwrap();
        let half = mse(0.5);
        for c in linspace(0.3, 0.7, 21) {
            let other = mse(c);
            assert!(
                half.mse <= other.mse + 3.0 * half.std_error.hypot(other.std_error),
                "sigma = {sigma}: c = {c} beats 1/2 ({} < {})",
                other.mse,
                half.mse
            );
        }
    }
}

#[test]
fn fidelity_line_is_unimodal() {
    let grid = linspace(1e-3, 10.0, 10_000);
    let f: Vec<f64> = grid.iter().map(|&v| fidelity_line(v).unwrap()).collect();
    let peak = f.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    assert!(peak > 0 && peak < grid.len() - 1);
    assert!(f[..=peak].windows(2).all(|w| w[1] > w[0]));
    assert!(f[peak..].windows(2).all(|w| w[1] < w[0]));
    assert_abs_diff_eq!(grid[peak], (1.6f64).sqrt(), epsilon = 2e-3);
}

#[test]
fn line_clone_fidelity_is_amplitude_independent() {
    let cfg = LineClonerConfig::new(unity_gain_h(), 0.8).unwrap();
    let base = gaussclone::single_quad_cloner::clone_fidelity(0.0, cfg).unwrap();
    for ax in [1.0, 5.0, 20.0] {
        assert!((gaussclone::single_quad_cloner::clone_fidelity(ax, cfg).unwrap() - base).abs() < 1e-12);
    }
}
