//! Brute-force search over OPO gain and injected squeezing for the
//! line-ensemble cloner, refined by golden section.

use std::time::Instant;

use gaussclone::single_quad_cloner::{optimal_vsqz, parameter_sweep, SweepConfig};

fn main() -> gaussclone::Result<()> {
    let cfg = SweepConfig::default();
    let start = Instant::now();
    let r = parameter_sweep(&cfg)?;
    let (v, f) = optimal_vsqz();
    println!("grid best:  H = {:.4}, v_plus = {:.4}, F = {:.9}", r.grid_best.0, r.grid_best.1, r.grid_best.2);
    println!("refined:    H = {:.9}, v_plus = {:.9}, F = {:.12}", r.best_h, r.best_v_plus, r.best_fidelity);
    println!("analytic:   H = 1.125, v_plus = {v:.9}, F = {f:.12}");
    println!("{} evaluations in {:.2?}", r.evaluations, start.elapsed());
    Ok(())
}
