//! The three measurement protocols on the same inputs: inverse-unitary
//! post-selection, ancilla swap test, and LCU kernel estimation, with
//! shot noise on request.
//!
//! ```bash
//! cargo run --example measurement_protocols
//! ```

use povm_lab::channels::DensityMatrix;
use povm_lab::circuits::{
    direct_protocol, lcu_decomposition, lcu_protocol, swap_test_protocol, LcuMode,
};
use povm_lab::coherent::{draw_haar_angles, sample_rng};
use povm_lab::phase_space::{quasiprob, SWKernel, SWParams};
use povm_lab::sun_algebra::generator_basis;

fn main() {
    let n = 3;
    let rho = DensityMatrix::ground(n).unwrap();
    let mut rng = sample_rng(2, 0);
    let omega = draw_haar_angles(n, &mut rng);

    // Direct vs swap test: same number, different success probability.
    let direct = direct_protocol(&rho, &omega, 0, 0).unwrap();
    let swap = swap_test_protocol(&rho, &omega, 100_000, 9).unwrap();
    println!("direct:    <omega|rho|omega> = {:.10} (success prob {:.4})", direct.expectation, direct.success_probability);
    println!(
        "swap test: <Z_A> = {:.10} (deterministic), shot estimate {:.6} over {} shots",
        swap.expectation,
        swap.empirical_estimate.unwrap(),
        swap.shots
    );
    println!(
        "agreement: |direct - swap| = {:.2e}",
        (direct.expectation - swap.expectation).abs()
    );

    // LCU estimation of the kernel expectation for a few s values.
    println!("\nLCU kernel estimation:");
    for s in [-1.0, 0.0, 0.5] {
        let params = SWParams::new(n, s).unwrap();
        let run = lcu_protocol(&rho, &omega, &params, 0, 0).unwrap();
        let w = quasiprob(rho.matrix(), &omega, &params).unwrap();
        println!(
            "  s={s:+.1}: LCU {:+.10} vs Tr[rho Delta] {:+.10}  (alpha = {:.4})",
            run.protocol.expectation, w, run.alpha
        );
    }

    // The two decompositions of the kernel: the exact two-unitary split
    // and the literal weight assignment with its residual.
    let params = SWParams::new(n, 0.0).unwrap();
    let kernel = SWKernel::at_point(&omega, &params);
    let basis = generator_basis(n).unwrap();
    let two = lcu_decomposition(&kernel, LcuMode::TwoUnitary).unwrap();
    let literal = lcu_decomposition(&kernel, LcuMode::PaperWeights(&basis)).unwrap();
    println!(
        "\ntwo-unitary split: {} terms, alpha {:.4}, residual {:.2e}, index register {} qubit(s)",
        two.terms.len(),
        two.alpha,
        two.residual,
        two.index_qubits
    );
    println!(
        "literal weights:   {} terms, alpha {:.4}, residual {:.2e}, index register {} qubit(s)",
        literal.terms.len(),
        literal.alpha,
        literal.residual,
        literal.index_qubits
    );
}
