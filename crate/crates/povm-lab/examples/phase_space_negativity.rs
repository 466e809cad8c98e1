//! Quasi-probability negativity and its removal by measurement rounds:
//! kernel spectra, grid minima per round, and the gap between the
//! anti-parallel bound and the physical minimum.
//!
//! ```bash
//! cargo run --example phase_space_negativity
//! ```

use povm_lab::channels::{iterate_channel, DensityMatrix};
use povm_lab::phase_space::{
    grid_w, min_w_closed_form, min_w_over_phase_space, minima_gap, w0_min_paper, w_min_physical,
    SWParams, SliceSpec,
};

fn main() {
    // Qubit Wigner-like representation: one round erases the negativity.
    let params = SWParams::new(2, 0.0).unwrap();
    let rho = DensityMatrix::basis_state(2, 1).unwrap();
    let slice = SliceSpec::default_for(2).unwrap();
    println!("qubit, s=0, most negative physical initial state:");
    for rounds in 0..=2u32 {
        let state = iterate_channel(&rho, rounds);
        let grid = grid_w(&state, &params, &slice, 256).unwrap();
        let (min, at_theta, at_phi) = grid.min();
        println!("  n={rounds}: grid min W = {min:+.6} at theta={at_theta:.3}, phi={at_phi:.3}");
    }
    println!(
        "  closed forms: W0_min = {:+.6}, after one round {:+.6}",
        w0_min_paper(&params),
        povm_lab::phase_space::w_evolution(
            w0_min_paper(&params),
            &params,
            povm_lab::phase_space::Evolution::Rounds(1)
        )
    );

    // For N >= 3 the anti-parallel Bloch bound is not attainable by a
    // state; the physical floor is the smallest kernel eigenvalue.
    println!("\nanti-parallel bound vs physical minimum (s = 0):");
    for n in 2..=6 {
        let gap = minima_gap(&SWParams::new(n, 0.0).unwrap()).unwrap();
        println!(
            "  N={n}: bound {:+.4}, physical {:+.4}, gap {:+.4}",
            gap.w0_min_paper, gap.w_min_physical, gap.gap
        );
    }

    // The blind search over phase space lands on the eigenvalue closed
    // form without ever calling an eigensolver.
    let n = 3;
    let params3 = SWParams::new(n, 0.0).unwrap();
    let rho3 = DensityMatrix::basis_state(n, 1).unwrap();
    let (w_min, at) = min_w_over_phase_space(&rho3, &params3).unwrap();
    println!(
        "\nqutrit search: min W = {w_min:+.8} at theta={:?} (closed form {:+.8}, physical floor {:+.8})",
        at.theta(),
        min_w_closed_form(&rho3, &params3).unwrap(),
        w_min_physical(&params3).unwrap()
    );
}
