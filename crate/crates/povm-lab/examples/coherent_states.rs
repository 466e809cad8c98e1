//! Coherent states and Haar sampling: closed-form amplitudes, POVM
//! completeness, and the fixed Bloch-vector length.
//!
//! ```bash
//! cargo run --example coherent_states
//! ```

use povm_lab::coherent::{
    bloch_vector_of_state, coherent_state, draw_haar_angles, povm_element, sample_haar,
    sample_rng, OmegaAngles,
};
use povm_lab::linalg::identity;
use povm_lab::montecarlo::mean_of_matrix_samples;
use povm_lab::sun_algebra::generator_basis;

fn main() {
    // Closed-form amplitudes for a qutrit.
    let angles = OmegaAngles::new(vec![1.1, 0.6], vec![0.4, 2.9]).unwrap();
    let state = coherent_state(&angles);
    println!("qutrit state at theta = {:?}, phi = {:?}:", angles.theta(), angles.phi());
    for (level, amp) in state.amplitudes().iter().enumerate() {
        println!("  <{level}|omega> = {:.6} {:+.6}i  (|.|^2 = {:.6})", amp.re, amp.im, amp.norm_sqr());
    }

    // Sum of squared generator expectations is (N-1)/(2N) for every
    // coherent state.
    for n in 2..=5 {
        let basis = generator_basis(n).unwrap();
        let omega = sample_haar(n, 1, 7).unwrap().pop().unwrap();
        let r = bloch_vector_of_state(&coherent_state(&omega), &basis).unwrap();
        println!(
            "N={n}: |R|^2 = {:.12} (closed form {:.12})",
            r.norm_sqr(),
            (n as f64 - 1.0) / (2.0 * n as f64)
        );
    }

    // POVM completeness: the Haar mean of E = N |omega><omega| is the
    // identity, with per-entry error bars from the same run.
    for n in [2usize, 3, 4] {
        let samples = 100_000;
        let est = mean_of_matrix_samples(n, samples, move |k| {
            let mut rng = sample_rng(42, k);
            povm_element(&coherent_state(&draw_haar_angles(n, &mut rng)))
        });
        println!(
            "N={n}: mean E over {samples} Haar samples deviates from 1 by {:.2} sigma",
            est.max_sigma(&identity(n))
        );
    }
}
