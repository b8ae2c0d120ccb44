//! Gaussian priors over coherent amplitudes and averages over them.
//!
//! Averages come from either a tensor-product Gauss–Hermite rule or Monte
//! Carlo. The quadrature rule is centred on the ensemble mean and its width
//! along each axis is matched to the local curvature of `ln f` there, so that
//! an integrand which is itself Gaussian in `α` (every cloner fidelity in this
//! crate) is integrated exactly, however narrow it is compared to the prior.
//! For `f` with no curvature the rule reduces to plain Gauss–Hermite.
//!
//! Monte Carlo splits the budget into fixed-size chunks, each drawn from its
//! own substream of the seed and reduced in chunk order, so results depend
//! only on `(seed, samples)` and not on the number of worker threads.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{GaussHermite, NormalStream};
use crate::phase_space::CoherentAmplitude;

/// Default Gauss–Hermite order per axis.
pub const DEFAULT_QUADRATURE_ORDER: usize = 40;

/// Samples per Monte Carlo chunk (one RNG substream per chunk).
pub const MC_CHUNK: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianEnsemble {
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub mean_x: f64,
    pub mean_y: f64,
}

impl GaussianEnsemble {
    pub fn new(sigma_x: f64, sigma_y: f64) -> Result<Self> {
        for (name, s) in [("sigma_x", sigma_x), ("sigma_y", sigma_y)] {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::domain(name, s, "standard deviation must be finite and >= 0"));
            }
        }
        Ok(Self {
            sigma_x,
            sigma_y,
            mean_x: 0.0,
            mean_y: 0.0,
        })
    }

    pub fn symmetric(sigma: f64) -> Result<Self> {
        Self::new(sigma, sigma)
    }

    pub fn with_mean(mut self, mean: CoherentAmplitude) -> Self {
        self.mean_x = mean.re;
        self.mean_y = mean.im;
        self
    }

    pub fn is_symmetric(&self) -> bool {
        self.sigma_x == self.sigma_y
    }

    pub fn mean(&self) -> CoherentAmplitude {
        CoherentAmplitude::new(self.mean_x, self.mean_y)
    }

    fn require_nondegenerate(&self) -> Result<()> {
        if self.sigma_x == 0.0 {
            return Err(Error::domain("sigma_x", 0.0, "zero width has no density"));
        }
        if self.sigma_y == 0.0 {
            return Err(Error::domain("sigma_y", 0.0, "zero width has no density"));
        }
        Ok(())
    }

    /// Probability density `P(α)` with respect to `d²α = dαₓ dα_y`.
    pub fn density(&self, alpha: CoherentAmplitude) -> Result<f64> {
        self.require_nondegenerate()?;
        let zx = (alpha.re - self.mean_x) / self.sigma_x;
        let zy = (alpha.im - self.mean_y) / self.sigma_y;
        Ok((-(zx * zx + zy * zy) / 2.0).exp() / (2.0 * PI * self.sigma_x * self.sigma_y))
    }

    fn draw(&self, stream: &mut NormalStream) -> CoherentAmplitude {
        let x = self.mean_x + self.sigma_x * stream.next_normal();
        let y = self.mean_y + self.sigma_y * stream.next_normal();
        CoherentAmplitude::new(x, y)
    }

    /// `n` amplitudes drawn from the ensemble, deterministic in `(seed, n)`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<CoherentAmplitude>> {
        self.require_nondegenerate()?;
        if n < 1 {
            return Err(Error::Budget { min: 1, got: n });
        }
        Ok(chunk_ranges(n)
            .into_par_iter()
            .flat_map_iter(|(chunk, len)| {
                let mut stream = NormalStream::substream(seed, chunk as u64);
                (0..len).map(move |_| self.draw(&mut stream)).collect::<Vec<_>>()
            })
            .collect())
    }
}

/// How an ensemble average is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// An analytic formula; only meaningful where a caller has one.
    Closed,
    Quadrature { order: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl Method {
    pub fn kind(&self) -> MethodKind {
        match self {
            Method::Closed => MethodKind::Closed,
            Method::Quadrature { .. } => MethodKind::Quadrature,
            Method::MonteCarlo { .. } => MethodKind::MonteCarlo,
        }
    }
}

impl Default for Method {
    fn default() -> Self {
        Method::Quadrature {
            order: DEFAULT_QUADRATURE_ORDER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Closed,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleAverage {
    pub value: f64,
    pub method: MethodKind,
    /// Standard error of the mean; zero for deterministic methods.
    pub std_error: f64,
    pub n_evaluations: usize,
}

impl EnsembleAverage {
    pub fn closed(value: f64) -> Self {
        Self {
            value,
            method: MethodKind::Closed,
            std_error: 0.0,
            n_evaluations: 0,
        }
    }
}

/// Running mean/M2 over one chunk, merged in chunk order.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Moments {
    pub n: usize,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * other.n as f64 / n as f64,
            m2: self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64,
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

pub(crate) fn chunk_ranges(n: usize) -> Vec<(usize, usize)> {
    (0..n.div_ceil(MC_CHUNK))
        .map(|c| (c, MC_CHUNK.min(n - c * MC_CHUNK)))
        .collect()
}

/// Runs `per_chunk` over every chunk in parallel and merges the moments in
/// chunk order.
pub(crate) fn chunked_moments<F>(n: usize, per_chunk: F) -> Moments
where
    F: Fn(usize, usize) -> Moments + Sync,
{
    let parts: Vec<Moments> = chunk_ranges(n)
        .into_par_iter()
        .map(|(chunk, len)| per_chunk(chunk, len))
        .collect();
    parts.into_iter().fold(Moments::default(), Moments::merge)
}

/// Per-axis node set: points and probability weights summing to one, plus a
/// log-weight correction factor applied relative to the prior.
struct AxisRule {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl AxisRule {
    fn delta(at: f64) -> Self {
        Self {
            points: vec![at],
            weights: vec![1.0],
        }
    }

    /// Nodes for `E_{N(mean, σ²)}[g]` using a proposal `N(mean, s²)` with
    /// `1/s² = 1/σ² + κ`, folding the density ratio into the weights.
    fn scaled(rule: &GaussHermite, mean: f64, sigma: f64, curvature: f64) -> Self {
        let kappa = if curvature.is_finite() { curvature.max(0.0) } else { 0.0 };
        let s = 1.0 / (1.0 / (sigma * sigma) + kappa).sqrt();
        let norm = PI.sqrt();
        let (mut points, mut weights) = (Vec::with_capacity(rule.order()), Vec::with_capacity(rule.order()));
        for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
            let d = std::f64::consts::SQRT_2 * s * t;
            points.push(mean + d);
            // N(mean, σ²)/N(mean, s²) = (s/σ)·exp(κ d²/2)
            weights.push(w / norm * (s / sigma) * (0.5 * kappa * d * d).exp());
        }
        Self { points, weights }
    }
}

/// Second derivative of `ln f` along one axis by central differences.
fn log_curvature<F: Fn(f64) -> f64>(g: F, at: f64, h: f64) -> f64 {
    let (f0, fp, fm) = (g(at), g(at + h), g(at - h));
    if !(f0 > 0.0 && fp > 0.0 && fm > 0.0) {
        return 0.0;
    }
    -(fp.ln() - 2.0 * f0.ln() + fm.ln()) / (h * h)
}

/// Ensemble average `∫ f(α) P(α) d²α`.
///
/// A zero-width axis is integrated exactly as a delta function at the mean;
/// when both axes have zero width the result is `f(mean)`, reported as
/// [`MethodKind::Closed`].
pub fn average<F>(f: F, ensemble: &GaussianEnsemble, method: Method) -> Result<EnsembleAverage>
where
    F: Fn(CoherentAmplitude) -> f64 + Sync,
{
    if ensemble.sigma_x == 0.0 && ensemble.sigma_y == 0.0 {
        if let Method::Quadrature { order: 0 } | Method::MonteCarlo { samples: 0, .. } = method {
            return Err(Error::Budget { min: 1, got: 0 });
        }
        return Ok(EnsembleAverage {
            value: f(ensemble.mean()),
            method: MethodKind::Closed,
            std_error: 0.0,
            n_evaluations: 1,
        });
    }
    match method {
        Method::Closed => Err(Error::Usage(
            "no closed form is available for a generic integrand".into(),
        )),
        Method::Quadrature { order } => quadrature_average(&f, ensemble, order),
        Method::MonteCarlo { samples, seed } => monte_carlo_average(&f, ensemble, samples, seed),
    }
}

fn quadrature_average<F>(f: &F, e: &GaussianEnsemble, order: usize) -> Result<EnsembleAverage>
where
    F: Fn(CoherentAmplitude) -> f64,
{
    if order < 1 {
        return Err(Error::Budget { min: 1, got: order });
    }
    let rule = GaussHermite::new(order)?;
    let mut probes = 0;
    let mut axis = |mean: f64, sigma: f64, along_x: bool| {
        if sigma == 0.0 {
            return AxisRule::delta(mean);
        }
        probes += 3;
        let g = |v: f64| {
            if along_x {
                f(CoherentAmplitude::new(v, e.mean_y))
            } else {
                f(CoherentAmplitude::new(e.mean_x, v))
            }
        };
        let kappa = log_curvature(g, mean, 1e-2 * sigma);
        AxisRule::scaled(&rule, mean, sigma, kappa)
    };
    let rx = axis(e.mean_x, e.sigma_x, true);
    let ry = axis(e.mean_y, e.sigma_y, false);

    let mut value = 0.0;
    for (&x, &wx) in rx.points.iter().zip(&rx.weights) {
        let mut row = 0.0;
        for (&y, &wy) in ry.points.iter().zip(&ry.weights) {
            row += wy * f(CoherentAmplitude::new(x, y));
        }
        value += wx * row;
    }
    Ok(EnsembleAverage {
        value,
        method: MethodKind::Quadrature,
        std_error: 0.0,
        n_evaluations: rx.points.len() * ry.points.len() + probes,
    })
}

fn monte_carlo_average<F>(f: &F, e: &GaussianEnsemble, samples: usize, seed: u64) -> Result<EnsembleAverage>
where
    F: Fn(CoherentAmplitude) -> f64 + Sync,
{
    if samples < 1 {
        return Err(Error::Budget { min: 1, got: samples });
    }
    let moments = chunked_moments(samples, |chunk, len| {
        let mut stream = NormalStream::substream(seed, chunk as u64);
        let mut m = Moments::default();
        for _ in 0..len {
            m.push(f(e.draw(&mut stream)));
        }
        m
    });
    Ok(EnsembleAverage {
        value: moments.mean,
        method: MethodKind::MonteCarlo,
        std_error: moments.std_error(),
        n_evaluations: samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn density_values() {
        let e = GaussianEnsemble::symmetric(1.0).unwrap();
        assert_abs_diff_eq!(e.density(CoherentAmplitude::ZERO).unwrap(), 1.0 / (2.0 * PI), epsilon = 1e-15);
        assert_abs_diff_eq!(
            e.density(CoherentAmplitude::real(1.0)).unwrap(),
            (-0.5f64).exp() / (2.0 * PI),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(e.density(CoherentAmplitude::real(1.0)).unwrap(), 0.096_532, epsilon = 1e-6);
        let a = GaussianEnsemble::new(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(a.density(CoherentAmplitude::ZERO).unwrap(), 1.0 / (4.0 * PI), epsilon = 1e-15);
    }

    #[test]
    fn degenerate_ensembles_have_no_density_or_sampler() {
        let e = GaussianEnsemble::symmetric(0.0).unwrap();
        assert!(e.density(CoherentAmplitude::ZERO).is_err());
        assert!(e.sample(10, 1).is_err());
        assert!(GaussianEnsemble::new(-1.0, 1.0).is_err());
        assert!(GaussianEnsemble::new(1.0, f64::NAN).is_err());
    }

    #[test]
    fn sample_mean_clt() {
        let e = GaussianEnsemble::symmetric(1.0).unwrap();
        let s = e.sample(1_000_000, 42).unwrap();
        let mean = s.iter().map(|a| a.re).sum::<f64>() / s.len() as f64;
        assert!(mean.abs() < 4.0 / 1000.0, "{mean}");
        assert_eq!(s, e.sample(1_000_000, 42).unwrap());
    }

    #[test]
    fn sample_narrow_axis_variance() {
        let e = GaussianEnsemble::new(2.0, 0.01).unwrap();
        let s = e.sample(100_000, 3).unwrap();
        let n = s.len() as f64;
        let my = s.iter().map(|a| a.im).sum::<f64>() / n;
        let vy = s.iter().map(|a| (a.im - my).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((vy / 1e-4 - 1.0).abs() < 0.05, "{vy}");
    }

    #[test]
    fn normalisation() {
        let e = GaussianEnsemble::new(1.7, 0.4).unwrap();
        let q = average(|_| 1.0, &e, Method::default()).unwrap();
        assert_abs_diff_eq!(q.value, 1.0, epsilon = 1e-14);
        assert_eq!(q.std_error, 0.0);
        let mc = average(|_| 1.0, &e, Method::MonteCarlo { samples: 1000, seed: 9 }).unwrap();
        assert_eq!(mc.value, 1.0);
        assert_eq!(mc.std_error, 0.0);
        assert_eq!(mc.method, MethodKind::MonteCarlo);
    }

    #[test]
    fn polynomial_moments() {
        let e = GaussianEnsemble::new(1.5, 0.5).unwrap().with_mean(CoherentAmplitude::new(0.3, -1.0));
        let q = average(|a| a.re * a.re + a.im, &e, Method::default()).unwrap();
        assert_abs_diff_eq!(q.value, 0.09 + 2.25 - 1.0, epsilon = 1e-12);
    }

    #[test]
    fn narrow_gaussian_integrand_is_exact() {
        // E[exp(-c|α|²)] = 1/(1 + 2cσ²) for a symmetric ensemble
        let (c, sigma) = (0.0858, 10.0);
        let e = GaussianEnsemble::symmetric(sigma).unwrap();
        let q = average(|a| (-c * a.norm_sqr()).exp(), &e, Method::default()).unwrap();
        assert_abs_diff_eq!(q.value, 1.0 / (1.0 + 2.0 * c * sigma * sigma), epsilon = 1e-13);
    }

    #[test]
    fn delta_shortcut() {
        let e = GaussianEnsemble::symmetric(0.0).unwrap().with_mean(CoherentAmplitude::new(1.0, 2.0));
        let r = average(|a| a.re + 10.0 * a.im, &e, Method::default()).unwrap();
        assert_eq!(r.value, 21.0);
        assert_eq!(r.method, MethodKind::Closed);
        let mc = average(|a| a.re, &e, Method::MonteCarlo { samples: 10, seed: 0 }).unwrap();
        assert_eq!(mc.value, 1.0);
    }

    #[test]
    fn line_ensemble_integrates_one_axis() {
        let e = GaussianEnsemble::new(2.0, 0.0).unwrap();
        let q = average(|a| a.re * a.re + a.im * a.im, &e, Method::default()).unwrap();
        assert_abs_diff_eq!(q.value, 4.0, epsilon = 1e-12);
        let mc = average(|a| a.im, &e, Method::MonteCarlo { samples: 100, seed: 0 }).unwrap();
        assert_eq!(mc.value, 0.0);
    }

    #[test]
    fn budget_errors() {
        let e = GaussianEnsemble::symmetric(1.0).unwrap();
        assert!(matches!(
            average(|_| 1.0, &e, Method::Quadrature { order: 0 }),
            Err(Error::Budget { .. })
        ));
        assert!(average(|_| 1.0, &e, Method::MonteCarlo { samples: 0, seed: 1 }).is_err());
        assert!(average(|_| 1.0, &e, Method::Closed).is_err());
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let e = GaussianEnsemble::symmetric(2.0).unwrap();
        let m = Method::MonteCarlo { samples: 100_003, seed: 11 };
        let a = average(|a| a.re.cos(), &e, m).unwrap();
        let b = average(|a| a.re.cos(), &e, m).unwrap();
        assert_eq!(a, b);
        // E[cos X] = exp(-σ²/2)
        assert!((a.value - (-2.0f64).exp()).abs() < 4.0 * a.std_error);
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let (mut a, mut b) = (Moments::default(), Moments::default());
        xs[..313].iter().for_each(|&x| a.push(x));
        xs[313..].iter().for_each(|&x| b.push(x));
        let merged = a.merge(b);
        assert_abs_diff_eq!(merged.mean, all.mean, epsilon = 1e-12);
        assert_abs_diff_eq!(merged.m2, all.m2, epsilon = 1e-9);
    }
}
