//! Ensemble-averaged clone fidelity for a Gaussian prior of width sigma:
//! closed form, quadrature and Monte Carlo, plus the optimal gain.

use gaussclone::ensembles::Method;
use gaussclone::symmetric_cloner::{
    average_fidelity, max_average_fidelity, numeric_optimal_gain, optimal_gain, ClonerConfig,
    BRANCH_SIGMA_SQ,
};

fn main() -> gaussclone::Result<()> {
    println!("unity gain is optimal up to sigma^2 = {BRANCH_SIGMA_SQ:.6}");
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10} {:>12}",
        "sigma", "G_opt", "G_numeric", "F_closed", "F_quad", "F_mc"
    );
    for sigma in [0.25, 0.5, 1.0, 2.0, 3.0, 10.0] {
        let g = optimal_gain(sigma);
        let cfg = ClonerConfig::new(g)?;
        let quad = average_fidelity(cfg, sigma, Method::Quadrature { order: 40 })?;
        let mc = average_fidelity(cfg, sigma, Method::MonteCarlo { samples: 200_000, seed: 7 })?;
        let numeric = numeric_optimal_gain(sigma, 40, 1e-10)?;
        println!(
            "{sigma:>6.2} {g:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>8.5}±{:.0e}",
            numeric.argmax,
            max_average_fidelity(sigma),
            quad.value,
            mc.value,
            mc.std_error
        );
    }
    println!("wide-ensemble limit: {:.6}", max_average_fidelity(1e6));
    Ok(())
}
