//! Cloning coherent states confined to a line with an OPO and a squeezed
//! vacuum port.

use gaussclone::single_quad_cloner::{
    clone_fidelity, clone_line, clone_line_two_opo, duan_value, fidelity_line, optimal_vsqz, snr_plus,
    sum_snr_transfer, unity_gain_h, LineClonerConfig,
};

fn main() -> gaussclone::Result<()> {
    let h = unity_gain_h();
    println!("unity-gain OPO: H = {h}");
    println!("{:>8} {:>10} {:>10} {:>10} {:>8}", "v_plus", "F", "SNR+", "Duan", "sumSNR");
    for v in [0.25, 0.5, 1.0, (1.6f64).sqrt(), 2.0, 4.0] {
        let cfg = LineClonerConfig::new(h, v)?;
        println!(
            "{v:>8.4} {:>10.6} {:>10.6} {:>10.6} {:>8.4}",
            fidelity_line(v)?,
            snr_plus(v)?,
            duan_value(&clone_line(0.0, cfg)?)?,
            sum_snr_transfer(cfg)?
        );
    }
    let (v, f) = optimal_vsqz();
    let cfg = LineClonerConfig::optimal();
    println!("optimum v_plus = {v:.6}, F = {f:.9}");
    println!("circuit fidelity at alpha_x = 3: {:.9}", clone_fidelity(3.0, cfg)?);
    let a = clone_line(3.0, cfg)?;
    let b = clone_line_two_opo(3.0, cfg)?;
    println!("two-OPO construction max |dV| = {:.1e}", (a.cov - b.cov).amax());
    Ok(())
}
