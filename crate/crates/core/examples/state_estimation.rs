//! Estimating a coherent amplitude drawn from a Gaussian prior by dual
//! homodyne detection, with and without the prior, and from clones.

use gaussclone::estimation::{
    bayes_estimate, bayes_mse_theory, estimator_mse, naive_estimate, simulate_dual_homodyne, Estimator,
};
use gaussclone::CoherentAmplitude;

fn main() -> gaussclone::Result<()> {
    let alpha = CoherentAmplitude::new(0.7, 1.2);
    let outcome = simulate_dual_homodyne(alpha, 11);
    let naive = naive_estimate(outcome);
    let bayes = bayes_estimate(outcome, 1.0);
    println!("alpha = ({}, {})", alpha.re, alpha.im);
    println!("outcome X+ = {:.4}, X- = {:.4}", outcome.x_plus, outcome.x_minus);
    println!("naive  = ({:.4}, {:.4})", naive.re, naive.im);
    println!("bayes  = ({:.4}, {:.4})  [prior sigma = 1]", bayes.re, bayes.im);

    let n = 200_000;
    println!();
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "sigma", "bayes", "naive", "clones", "theory");
    for sigma in [0.25, 0.5, 1.0, 2.0, 5.0] {
        let b = estimator_mse(Estimator::Bayes, sigma, n, 3)?;
        let v = estimator_mse(Estimator::Naive, sigma, n, 3)?;
        let c = estimator_mse(Estimator::CloneBased { coefficient: 0.5 }, sigma, n, 3)?;
        println!(
            "{sigma:>6.2} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            b.mse,
            v.mse,
            c.mse,
            bayes_mse_theory(sigma)
        );
    }
    Ok(())
}
