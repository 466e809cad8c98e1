//! Tour of the su(N) generator basis: orthonormality, the Casimir
//! contraction, the twirl identity, and Bloch-vector round trips.
//!
//! ```bash
//! cargo run --example generator_basis
//! ```

use povm_lab::channels::DensityMatrix;
use povm_lab::linalg::{frobenius_norm, identity, max_abs_diff, trace};
use povm_lab::sun_algebra::{
    bloch_compose, bloch_decompose, casimir_contraction, closed_form_twirl, generator_basis,
    purity, twirl,
};

fn main() {
    for n in 2..=5 {
        let basis = generator_basis(n).unwrap();
        println!("su({n}): {} generators", basis.len());

        // Orthonormality Tr(T_u T_v) = delta/2.
        let mut worst = 0.0f64;
        for (mu, a) in basis.iter().enumerate() {
            for (nu, b) in basis.iter().enumerate() {
                let overlap = trace(&a.dot(b)).re;
                let expected = if mu == nu { 0.5 } else { 0.0 };
                worst = worst.max((overlap - expected).abs());
            }
        }
        println!("  orthonormality deviation: {worst:.2e}");

        // Casimir: sum T^2 = (N^2-1)/(2N) * 1.
        let casimir = casimir_contraction(&basis);
        let expected = (n * n - 1) as f64 / (2 * n) as f64;
        let target = identity(n).mapv(|z| z * expected);
        println!(
            "  casimir {:.6} (closed form {expected:.6}), deviation {:.2e}",
            casimir[[0, 0]].re,
            max_abs_diff(&casimir, &target)
        );

        // Twirl of a projector against the closed form.
        let rho = DensityMatrix::ground(n).unwrap();
        let twirled = twirl(rho.matrix(), &basis).unwrap();
        let closed = closed_form_twirl(rho.matrix(), n);
        println!(
            "  twirl vs Tr(X)/2 - X/(2N): {:.2e}",
            frobenius_norm(&(&twirled - &closed))
        );

        // Bloch round trip and the purity identity.
        let b = bloch_decompose(rho.matrix(), &basis).unwrap();
        let back = bloch_compose(&b, &basis).unwrap();
        println!(
            "  bloch round trip {:.2e}; purity {} = 1/N + |b|^2/2 = {}",
            max_abs_diff(&back, rho.matrix()),
            purity(rho.matrix()),
            1.0 / n as f64 + 0.5 * b.norm_sqr()
        );
    }
}
