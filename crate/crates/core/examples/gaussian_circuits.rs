//! Building blocks: coherent and squeezed states, amplifiers, OPOs and beam
//! splitters acting on means and covariance matrices.

use gaussclone::phase_space::{
    apply_beam_splitter, apply_opo, apply_phase_insensitive_amp, coherent_state, duan_combination,
    fidelity_vs_coherent, squeezed_vacuum,
};
use gaussclone::{CoherentAmplitude, GaussianState};

fn describe(label: &str, s: &GaussianState) -> gaussclone::Result<()> {
    for m in 0..s.n_modes() {
        let (xp, xm) = s.mode_mean(m)?;
        let (vp, vm) = s.mode_variances(m)?;
        println!("{label} mode {m}: mean ({xp:.4}, {xm:.4})  V+ {vp:.4}  V- {vm:.4}");
    }
    println!("{label} min eigenvalue of V + i*Omega: {:.3e}", s.min_uncertainty_eigenvalue());
    Ok(())
}

fn main() -> gaussclone::Result<()> {
    let alpha = CoherentAmplitude::new(1.0, 0.5);
    let amp = apply_phase_insensitive_amp(&coherent_state(alpha), 0, 2.0)?;
    describe("amplified", &amp)?;

    let squeezed = apply_opo(&GaussianState::vacuum(1), 0, 1.5)?;
    describe("opo", &squeezed)?;

    // two squeezed vacua on a beam splitter give an EPR pair
    let pair = squeezed_vacuum(4.0)?.tensor(&squeezed_vacuum(0.25)?);
    let epr = apply_beam_splitter(&pair, 0, 1, 0.5)?;
    describe("epr", &epr)?;
    println!("epr Duan value: {:.4}", duan_combination(&epr, 0, 1)?);

    let split = apply_beam_splitter(&coherent_state(alpha).tensor(&GaussianState::vacuum(1)), 0, 1, 0.5)?;
    println!("passive split fidelity: {:.6}", fidelity_vs_coherent(alpha, &split, 0)?);
    Ok(())
}
