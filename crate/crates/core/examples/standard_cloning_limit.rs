//! The 1 -> 2 Gaussian cloner on a single coherent state: clone moments,
//! fidelity and signal transfer as the amplifier gain is varied.

use gaussclone::symmetric_cloner::{clone, clone_duan_value, ClonerConfig};
use gaussclone::CoherentAmplitude;

fn main() -> gaussclone::Result<()> {
    let alpha = CoherentAmplitude::new(1.5, -0.5);
    println!("input alpha = {} {:+}i", alpha.re, alpha.im);
    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}", "G", "gain", "V+", "V-", "F", "SNR");
    for g in [1.0, 1.5, 2.0, 2.5, 3.0] {
        let r = clone(alpha, ClonerConfig::new(g)?)?;
        println!(
            "{g:>6.2} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            r.amplitude_gain, r.v_plus, r.v_minus, r.fidelity, r.snr_transfer
        );
    }
    let duan = clone_duan_value(ClonerConfig::new(2.0)?)?;
    println!("clones at G = 2: Duan value {duan:.6} (separable bound 2)");
    Ok(())
}
