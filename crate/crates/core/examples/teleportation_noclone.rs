//! How much two-mode squeezing teleportation needs before it beats the best
//! cloner on a Gaussian ensemble.

use gaussclone::numerics::linspace;
use gaussclone::teleportation::{
    crossing_scan, nocloning_lambda, nocloning_lambda_bisect, squeezing_db, tele_fidelity,
};

fn main() -> gaussclone::Result<()> {
    println!("{:>6} {:>10} {:>10} {:>12}", "sigma", "lambda", "bisect", "squeezing_dB");
    for sigma in [0.0, 0.5, 1.0, 2.0, 3.0, 10.0, 100.0] {
        let l = nocloning_lambda(sigma);
        println!(
            "{sigma:>6.1} {l:>10.6} {:>10.6} {:>12.4}",
            nocloning_lambda_bisect(sigma, 1e-14)?,
            squeezing_db(l)?
        );
    }
    // width 3 and variance 3 are different ensembles
    println!("lambda at sigma = 3:   {:.5}", nocloning_lambda(3.0));
    println!("lambda at sigma^2 = 3: {:.5}", nocloning_lambda(3f64.sqrt()));

    let lambda = 0.5;
    let grid = linspace(0.0, 4.0, 81);
    let pts = crossing_scan(lambda, &grid)?;
    if let Some(p) = pts.windows(2).find(|w| w[0].above != w[1].above) {
        println!(
            "lambda = {lambda}: teleportation overtakes cloning between sigma = {} and {}",
            p[0].sigma, p[1].sigma
        );
    }
    println!("F_tele(0.5, 3) = {:.6}", tele_fidelity(lambda, 3.0)?);
    Ok(())
}
