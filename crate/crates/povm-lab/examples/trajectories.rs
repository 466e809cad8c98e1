//! Single-outcome unraveling of the POVM channel: rejection-sampled
//! measurement outcomes whose collapsed states average back to the
//! analytic channel.
//!
//! ```bash
//! cargo run --example trajectories
//! ```

use povm_lab::channels::{
    povm_channel_analytic, trajectory_average, trajectory_sample, DensityMatrix,
};
use povm_lab::coherent::{coherent_state, sample_haar};

fn main() {
    let n = 2;
    let omega0 = sample_haar(n, 1, 3).unwrap().pop().unwrap();
    let psi0 = coherent_state(&omega0);
    let rho = DensityMatrix::from_coherent(&psi0);

    // A few individual trajectories: outcome angles and acceptance cost.
    println!("five trajectories from a pure qubit state:");
    for k in 0..5u64 {
        let out = trajectory_sample(&rho, 17, k);
        let fidelity = coherent_state(&out.angles).overlap(&psi0).norm_sqr();
        println!(
            "  outcome theta={:.3} phi={:.3}  |<omega|omega0>|^2 = {:.4}  proposals = {}",
            out.angles.theta()[0],
            out.angles.phi()[0],
            fidelity,
            out.proposals
        );
    }

    // Outcome statistics: mean fidelity with the input is 2/(N+1), and
    // the mean proposal count is N (acceptance rate 1/N).
    let count = 50_000;
    let mut fid = 0.0;
    let mut proposals = 0u64;
    for k in 0..count as u64 {
        let out = trajectory_sample(&rho, 29, k);
        fid += coherent_state(&out.angles).overlap(&psi0).norm_sqr();
        proposals += out.proposals as u64;
    }
    println!(
        "mean fidelity {:.4} (2/(N+1) = {:.4}), mean proposals {:.3} (N = {n})",
        fid / count as f64,
        2.0 / (n as f64 + 1.0),
        proposals as f64 / count as f64
    );

    // Averaged collapsed states reproduce the deterministic channel.
    let est = trajectory_average(&rho, count, 31).unwrap();
    let target = povm_channel_analytic(&rho);
    println!(
        "trajectory average over {count} runs: {:.2} sigma from the analytic channel",
        est.max_sigma(target.matrix())
    );
}
