//! Measurement rounds vs continuous depolarization: the same contraction
//! through four routes (closed form, composed channel, Monte Carlo, and
//! Runge-Kutta integration of the Lindblad generator).
//!
//! ```bash
//! cargo run --example channel_equivalence
//! ```

use povm_lab::channels::{
    depolarize, equivalence_time, integrate_master_equation, iterate_channel, lambda_estimate,
    povm_channel_analytic, povm_channel_monte_carlo, ChannelSpec, DensityMatrix,
};
use povm_lab::sun_algebra::generator_basis;

fn main() {
    let n = 3;
    let gamma = 1.0;
    let spec = ChannelSpec::new(n, gamma).unwrap();
    let rho0 = DensityMatrix::ground(n).unwrap();
    let mixed = DensityMatrix::maximally_mixed(n).unwrap();

    println!("N={n}, gamma={gamma}: rounds vs continuous time t_n = 2n ln(1+N)/(gamma N)");
    for rounds in 0..=5u32 {
        let t = equivalence_time(rounds, &spec);
        let discrete = iterate_channel(&rho0, rounds);
        let continuous = depolarize(&rho0, &spec, t).unwrap();
        println!(
            "  n={rounds}: t={t:.4}  distance(discrete, continuous) = {:.2e}  distance to mixed = {:.6}",
            discrete.trace_distance(&continuous).unwrap(),
            discrete.trace_distance(&mixed).unwrap()
        );
    }

    // One round by Monte Carlo: average of N<omega|rho|omega> |omega><omega|.
    let samples = 200_000;
    let est = povm_channel_monte_carlo(&rho0, samples, 11).unwrap();
    let analytic = povm_channel_analytic(&rho0);
    println!(
        "Monte Carlo channel ({samples} samples): {:.2} sigma from the analytic output",
        est.max_sigma(analytic.matrix())
    );

    // The contraction factor lambda = 1/(N+1), estimated from the
    // generator expectations (the integrand is constant, so this is
    // exact up to roundoff).
    let basis = generator_basis(n).unwrap();
    let lambda = lambda_estimate(&basis, 2000, 5).unwrap();
    println!(
        "lambda estimate {lambda:.12} vs 1/(N+1) = {:.12}",
        1.0 / (n as f64 + 1.0)
    );

    // Runge-Kutta integration of the Lindblad right-hand side against the
    // closed-form solution.
    let t = 1.3;
    let integrated = integrate_master_equation(&rho0, &spec, t, 10_000).unwrap();
    let closed = depolarize(&rho0, &spec, t).unwrap();
    println!(
        "RK4 at t={t}: distance to closed form = {:.2e}",
        integrated.trace_distance(&closed).unwrap()
    );
}
