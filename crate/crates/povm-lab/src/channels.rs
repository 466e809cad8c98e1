//! The coherent-state POVM channel, the isotropic depolarizing channel,
//! and the exact equivalence between them.
//!
//! One POVM round contracts the traceless part of a state by λ = 1/(N+1):
//!
//! ```text
//! ℰ(ρ) = 1/N + (ρ − 1/N)/(N+1)
//! ```
//!
//! The isotropic depolarizing generator with uniform rate γ over all su(N)
//! generators produces ρ_t = 1/N + e^{−Nγt/2}(ρ₀ − 1/N), so n measurement
//! rounds coincide with continuous evolution for t = 2n·ln(1+N)/(γN).
//! Everything here is checked three ways: closed forms, Monte Carlo
//! averaging over Haar samples, and Runge-Kutta integration of the
//! Lindblad right-hand side.

use serde::{Deserialize, Serialize};

use crate::coherent::{self, draw_haar_angles, sample_rng, OmegaAngles};
use crate::linalg::{self, c64, CMat};
use crate::montecarlo::{mean_of_matrix_samples, MatrixEstimate};
use crate::sun_algebra::{self, GeneratorBasis};
use crate::tol::Tolerances;
use crate::{Error, Result};

/// Validated density matrix: Hermitian, unit trace, positive semidefinite
/// within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMat,
}

impl DensityMatrix {
    /// Validates against the default tolerances (1e−12 Hermiticity,
    /// 1e−10 trace and eigenvalue floor).
    pub fn new(matrix: CMat) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: CMat, tols: &Tolerances) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() < 2 {
            return Err(Error::InvalidDimension(matrix.nrows()));
        }
        linalg::require_hermitian(&matrix, tols.structural)?;
        let tr = linalg::trace(&matrix);
        if (tr - c64(1.0, 0.0)).norm() > tols.state {
            return Err(Error::InvalidState(format!("trace {tr} deviates from 1")));
        }
        let eigs = linalg::hermitian_eigenvalues(&matrix, tols.structural)?;
        if eigs[0] < -tols.state {
            return Err(Error::InvalidState(format!(
                "smallest eigenvalue {} below tolerance",
                eigs[0]
            )));
        }
        Ok(Self { matrix })
    }

    /// Computational basis state |level⟩⟨level|.
    pub fn basis_state(dim: usize, level: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if level >= dim {
            return Err(Error::InvalidArgument(format!(
                "level {level} out of range for dimension {dim}"
            )));
        }
        let mut m = linalg::zeros(dim);
        m[[level, level]] = c64(1.0, 0.0);
        Ok(Self { matrix: m })
    }

    /// Ground state |0⟩⟨0|.
    pub fn ground(dim: usize) -> Result<Self> {
        Self::basis_state(dim, 0)
    }

    /// Maximally mixed state 1/N.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self {
            matrix: sun_algebra::maximally_mixed(dim),
        })
    }

    /// Pure state from a coherent state.
    pub fn from_coherent(state: &coherent::CoherentState) -> Self {
        Self {
            matrix: state.projector(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        sun_algebra::purity(&self.matrix)
    }

    /// Trace distance to another state.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        linalg::trace_distance(&self.matrix, &other.matrix, 1e-10)
    }

    /// JSON value in the documented layout
    /// `{"dim": N, "re": row-major, "im": row-major}`.
    pub fn to_json(&self) -> DensityMatrixJson {
        let n = self.dim();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                re.push(self.matrix[[i, j]].re);
                im.push(self.matrix[[i, j]].im);
            }
        }
        DensityMatrixJson { dim: n, re, im }
    }

    /// Parses and re-validates the documented JSON layout.
    pub fn from_json(json: &DensityMatrixJson) -> Result<Self> {
        let n = json.dim;
        if json.re.len() != n * n || json.im.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                got: json.re.len().max(json.im.len()),
            });
        }
        let mut m = linalg::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[[i, j]] = c64(json.re[i * n + j], json.im[i * n + j]);
            }
        }
        Self::new(m)
    }
}

/// Serialized density-matrix layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityMatrixJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// Dimension and decoherence rate of the isotropic channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    dim: usize,
    gamma: f64,
}

impl ChannelSpec {
    pub fn new(dim: usize, gamma: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        Ok(Self { dim, gamma })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// 1/N + λ·(ρ − 1/N) for a contraction factor λ, re-Hermitized.
fn contract_toward_mixed(rho: &CMat, lambda: f64) -> CMat {
    let n = rho.nrows();
    let mixed = sun_algebra::maximally_mixed(n);
    let out = &mixed + &(rho - &mixed).mapv(|z| z * lambda);
    linalg::hermitize(&out)
}

/// One analytic POVM round: ℰ(ρ) = 1/N + (ρ − 1/N)/(N+1).
pub fn povm_channel_analytic(rho: &DensityMatrix) -> DensityMatrix {
    let lambda = 1.0 / (rho.dim() as f64 + 1.0);
    DensityMatrix {
        matrix: contract_toward_mixed(rho.matrix(), lambda),
    }
}

/// Monte Carlo estimate of one POVM round: the Haar average of
/// N⟨Ω|ρ|Ω⟩·|Ω⟩⟨Ω| with per-entry standard errors.
///
/// The finite-sample mean is Hermitian and positive but its trace carries
/// sampling noise of order 1/√samples, so the raw estimate is returned
/// rather than a validated [`DensityMatrix`].
pub fn povm_channel_monte_carlo(
    rho: &DensityMatrix,
    samples: usize,
    seed: u64,
) -> Result<MatrixEstimate> {
    if samples < 100 {
        return Err(Error::TooFewSamples {
            got: samples,
            min: 100,
        });
    }
    let n = rho.dim();
    let matrix = rho.matrix().clone();
    Ok(mean_of_matrix_samples(n, samples, move |k| {
        let mut rng = sample_rng(seed, k);
        let omega = draw_haar_angles(n, &mut rng);
        let state = coherent::coherent_state(&omega);
        let p = linalg::expectation(&matrix, state.amplitudes()).re;
        state.projector().mapv(|z| z * (n as f64 * p))
    }))
}

/// n POVM rounds in closed form: 1/N + (N+1)^{−n}(ρ₀ − 1/N).
///
/// The round count is unsigned by construction; n = 0 returns the input.
pub fn iterate_channel(rho0: &DensityMatrix, n: u32) -> DensityMatrix {
    let lambda = (rho0.dim() as f64 + 1.0).powi(-(n as i32));
    DensityMatrix {
        matrix: contract_toward_mixed(rho0.matrix(), lambda),
    }
}

/// Right-hand side of the isotropic depolarizing master equation.
///
/// Computes both the explicit Lindblad sum γ(Σ_ν T_ν ρ T_ν − ((N²−1)/2N)ρ)
/// and the closed form γ(1/2 − (N/2)ρ), errors out if they disagree beyond
/// the structural tolerance, and returns the closed form.
pub fn lindblad_rhs(rho: &CMat, spec: &ChannelSpec, basis: &GeneratorBasis) -> Result<CMat> {
    let n = spec.dim();
    if rho.nrows() != n || basis.dim() != n {
        return Err(Error::DimensionMismatch(rho.nrows(), n));
    }
    let gamma = spec.gamma();
    let casimir = (n as f64 * n as f64 - 1.0) / (2.0 * n as f64);

    let twirled = sun_algebra::twirl(rho, basis)?;
    let lindblad_sum = (&twirled - &rho.mapv(|z| z * casimir)).mapv(|z| z * gamma);

    let mut closed = rho.mapv(|z| z * (-gamma * n as f64 / 2.0));
    for i in 0..n {
        closed[[i, i]] += c64(gamma / 2.0, 0.0);
    }

    let dev = linalg::max_abs_diff(&lindblad_sum, &closed);
    if dev > Tolerances::default().structural {
        return Err(Error::NumericalGuard(format!(
            "Lindblad sum deviates from closed form by {dev:.3e}"
        )));
    }
    Ok(closed)
}

/// Closed-form solution ρ_t = 1/N + e^{−Nγt/2}(ρ₀ − 1/N).
pub fn depolarize(rho0: &DensityMatrix, spec: &ChannelSpec, t: f64) -> Result<DensityMatrix> {
    if rho0.dim() != spec.dim() {
        return Err(Error::DimensionMismatch(rho0.dim(), spec.dim()));
    }
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidArgument(format!("time must be >= 0, got {t}")));
    }
    let lambda = (-(spec.dim() as f64) * spec.gamma() * t / 2.0).exp();
    Ok(DensityMatrix {
        matrix: contract_toward_mixed(rho0.matrix(), lambda),
    })
}

/// Time at which the continuous channel matches n POVM rounds:
/// t = 2n·ln(1+N)/(γN).
pub fn equivalence_time(n: u32, spec: &ChannelSpec) -> f64 {
    2.0 * n as f64 * (1.0 + spec.dim() as f64).ln() / (spec.gamma() * spec.dim() as f64)
}

/// Classical fixed-step fourth-order Runge-Kutta integration of
/// [`lindblad_rhs`]; cross-checks the closed form to 1e−8 at 10⁴ steps.
pub fn integrate_master_equation(
    rho0: &DensityMatrix,
    spec: &ChannelSpec,
    t: f64,
    steps: usize,
) -> Result<DensityMatrix> {
    if rho0.dim() != spec.dim() {
        return Err(Error::DimensionMismatch(rho0.dim(), spec.dim()));
    }
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidArgument(format!("time must be >= 0, got {t}")));
    }
    if steps < 10 {
        return Err(Error::TooFewSteps { got: steps, min: 10 });
    }
    let basis = sun_algebra::generator_basis(spec.dim())?;
    let h = t / steps as f64;
    let mut rho = rho0.matrix().clone();
    for _ in 0..steps {
        let k1 = lindblad_rhs(&rho, spec, &basis)?;
        let k2 = lindblad_rhs(&(&rho + &k1.mapv(|z| z * (h / 2.0))), spec, &basis)?;
        let k3 = lindblad_rhs(&(&rho + &k2.mapv(|z| z * (h / 2.0))), spec, &basis)?;
        let k4 = lindblad_rhs(&(&rho + &k3.mapv(|z| z * h)), spec, &basis)?;
        let incr = (k1 + k2.mapv(|z| z * 2.0) + k3.mapv(|z| z * 2.0) + k4).mapv(|z| z * (h / 6.0));
        rho = rho + incr;
    }
    DensityMatrix::new(linalg::hermitize(&rho))
}

/// One sampled POVM outcome and the collapsed state it produces.
#[derive(Debug, Clone)]
pub struct TrajectoryOutcome {
    /// The accepted measurement outcome.
    pub angles: OmegaAngles,
    /// Collapsed post-measurement state |Ω⟩⟨Ω|.
    pub state: DensityMatrix,
    /// Number of rejection-sampling proposals consumed (mean is N).
    pub proposals: u32,
}

/// Samples one POVM outcome with density N⟨Ω|ρ|Ω⟩ relative to the Haar
/// measure: propose Ω ~ Haar, accept with probability ⟨Ω|ρ|Ω⟩ ≤ 1.
///
/// `stream` selects the per-trajectory ChaCha stream, so ensembles are
/// reproducible and order-independent.
pub fn trajectory_sample(rho: &DensityMatrix, seed: u64, stream: u64) -> TrajectoryOutcome {
    use rand::Rng;
    let n = rho.dim();
    let mut rng = sample_rng(seed, stream);
    let mut proposals = 0u32;
    loop {
        proposals += 1;
        let omega = draw_haar_angles(n, &mut rng);
        let state = coherent::coherent_state(&omega);
        let p = linalg::expectation(rho.matrix(), state.amplitudes()).re;
        let u: f64 = rng.random();
        if u < p {
            return TrajectoryOutcome {
                angles: omega,
                state: DensityMatrix {
                    matrix: state.projector(),
                },
                proposals,
            };
        }
    }
}

/// Averages collapsed trajectory states; converges to the analytic POVM
/// channel output.
pub fn trajectory_average(rho: &DensityMatrix, count: usize, seed: u64) -> Result<MatrixEstimate> {
    if count < 100 {
        return Err(Error::TooFewSamples {
            got: count,
            min: 100,
        });
    }
    let n = rho.dim();
    Ok(mean_of_matrix_samples(n, count, move |k| {
        trajectory_sample(rho, seed, k).state.matrix().clone()
    }))
}

/// Monte Carlo estimate of the contraction factor
/// λ = (2N/(N²−1)) ∫ Σ_ν ⟨Ω|T_ν|Ω⟩² dμ(Ω); converges to 1/(N+1).
///
/// The integrand is constant over the coherent manifold, so the estimator
/// has zero variance; the averaging is kept as a consistency check.
pub fn lambda_estimate(basis: &GeneratorBasis, samples: usize, seed: u64) -> Result<f64> {
    if samples < 1000 {
        return Err(Error::TooFewSamples {
            got: samples,
            min: 1000,
        });
    }
    let n = basis.dim();
    let prefactor = 2.0 * n as f64 / (n as f64 * n as f64 - 1.0);
    let mut acc = 0.0;
    for k in 0..samples {
        let mut rng = sample_rng(seed, k as u64);
        let omega = draw_haar_angles(n, &mut rng);
        let state = coherent::coherent_state(&omega);
        let sum_sq: f64 = basis
            .iter()
            .map(|t| linalg::expectation(t, state.amplitudes()).re.powi(2))
            .sum();
        acc += prefactor * sum_sq;
    }
    Ok(acc / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dagger, max_abs_diff, trace, zeros};
    use crate::sun_algebra::generator_basis;
    use rand::Rng;

    pub(crate) fn random_density(n: usize, seed: u64) -> DensityMatrix {
        let mut rng = sample_rng(seed, 0);
        let mut g = zeros(n);
        for i in 0..n {
            for j in 0..n {
                g[[i, j]] = c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
        }
        let gg = g.dot(&dagger(&g));
        let tr = trace(&gg).re;
        DensityMatrix::new(gg.mapv(|z| z / tr)).unwrap()
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(linalg::identity(2)).is_err()); // trace 2
        let mut skew = sun_algebra::maximally_mixed(2);
        skew[[0, 1]] = c64(0.0, 0.3);
        assert!(DensityMatrix::new(skew).is_err()); // not Hermitian
        let mut neg = zeros(2);
        neg[[0, 0]] = c64(1.5, 0.0);
        neg[[1, 1]] = c64(-0.5, 0.0);
        assert!(matches!(
            DensityMatrix::new(neg),
            Err(Error::InvalidState(_))
        )); // negative eigenvalue
        assert!(DensityMatrix::ground(3).is_ok());
    }

    #[test]
    fn channel_spec_validation() {
        assert!(ChannelSpec::new(2, 1.0).is_ok());
        assert!(ChannelSpec::new(1, 1.0).is_err());
        assert!(ChannelSpec::new(2, 0.0).is_err());
        assert!(ChannelSpec::new(2, -1.0).is_err());
    }

    #[test]
    fn analytic_channel_on_qubit_ground_state() {
        let rho = DensityMatrix::ground(2).unwrap();
        let out = povm_channel_analytic(&rho);
        assert!((out.matrix()[[0, 0]].re - 2.0 / 3.0).abs() < 1e-15);
        assert!((out.matrix()[[1, 1]].re - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn analytic_channel_fixes_maximally_mixed() {
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        let out = povm_channel_analytic(&rho);
        assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-15);
    }

    /// Bloch vector scales by exactly 1/(N+1) = 1/5 at N = 4.
    #[test]
    fn analytic_channel_scales_bloch_vector() {
        let basis = generator_basis(4).unwrap();
        let rho = random_density(4, 8);
        let out = povm_channel_analytic(&rho);
        let b0 = sun_algebra::bloch_decompose(rho.matrix(), &basis).unwrap();
        let b1 = sun_algebra::bloch_decompose(out.matrix(), &basis).unwrap();
        for (x, y) in b0.components().iter().zip(b1.components()) {
            assert!((y - x / 5.0).abs() < 1e-13);
        }
    }

    #[test]
    fn monte_carlo_channel_matches_analytic() {
        let rho = DensityMatrix::ground(2).unwrap();
        let est = povm_channel_monte_carlo(&rho, 100_000, 77).unwrap();
        let target = povm_channel_analytic(&rho);
        assert!(
            est.max_sigma(target.matrix()) < 4.0,
            "sigma {}",
            est.max_sigma(target.matrix())
        );
    }

    #[test]
    fn monte_carlo_channel_on_mixed_state() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        let est = povm_channel_monte_carlo(&rho, 20_000, 3).unwrap();
        assert!(est.max_sigma(rho.matrix()) < 4.0);
    }

    #[test]
    fn monte_carlo_channel_rejects_small_samples() {
        let rho = DensityMatrix::ground(2).unwrap();
        assert!(povm_channel_monte_carlo(&rho, 99, 0).is_err());
    }

    /// Random pure qutrit through 10^6 samples: Frobenius distance to the
    /// analytic channel below 5e-3.
    #[test]
    fn monte_carlo_channel_frobenius_error_qutrit() {
        let omega = crate::coherent::sample_haar(3, 1, 61).unwrap().pop().unwrap();
        let rho = DensityMatrix::from_coherent(&crate::coherent::coherent_state(&omega));
        let est = povm_channel_monte_carlo(&rho, 1_000_000, 63).unwrap();
        let target = povm_channel_analytic(&rho);
        let err = est.frobenius_error(target.matrix());
        assert!(err <= 5e-3, "Frobenius error {err}");
    }

    #[test]
    fn iteration_matches_repeated_application() {
        for n in 2..=6usize {
            let rho = random_density(n, 21 + n as u64);
            let mut composed = rho.clone();
            for rounds in 0..=5u32 {
                let direct = iterate_channel(&rho, rounds);
                assert!(
                    max_abs_diff(direct.matrix(), composed.matrix()) <= 1e-12,
                    "N={n} rounds={rounds}"
                );
                composed = povm_channel_analytic(&composed);
            }
        }
    }

    #[test]
    fn iteration_examples() {
        let rho = DensityMatrix::ground(2).unwrap();
        assert!(max_abs_diff(iterate_channel(&rho, 0).matrix(), rho.matrix()) < 1e-15);
        let two = iterate_channel(&rho, 2);
        assert!((two.matrix()[[0, 0]].re - 5.0 / 9.0).abs() < 1e-14);
        assert!((two.matrix()[[1, 1]].re - 4.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn iteration_converges_to_mixed() {
        let rho = random_density(3, 4);
        let mixed = DensityMatrix::maximally_mixed(3).unwrap();
        let n = 20u32;
        let out = iterate_channel(&rho, n);
        let bound = 2.0 * 4.0f64.powi(-(n as i32));
        assert!(out.trace_distance(&mixed).unwrap() <= bound);
    }

    #[test]
    fn lindblad_rhs_vanishes_on_mixed_state() {
        let spec = ChannelSpec::new(3, 1.7).unwrap();
        let basis = generator_basis(3).unwrap();
        let rhs = lindblad_rhs(&sun_algebra::maximally_mixed(3), &spec, &basis).unwrap();
        assert!(linalg::frobenius_norm(&rhs) < 1e-14);
    }

    #[test]
    fn lindblad_rhs_on_qubit_ground_state() {
        let spec = ChannelSpec::new(2, 1.0).unwrap();
        let basis = generator_basis(2).unwrap();
        let rho = DensityMatrix::ground(2).unwrap();
        let rhs = lindblad_rhs(rho.matrix(), &spec, &basis).unwrap();
        assert!((rhs[[0, 0]].re + 0.5).abs() < 1e-14);
        assert!((rhs[[1, 1]].re - 0.5).abs() < 1e-14);
    }

    /// Lindblad-sum form agrees with the closed form at N = 5 (the guard
    /// inside lindblad_rhs would error otherwise).
    #[test]
    fn lindblad_forms_agree_at_n5() {
        let spec = ChannelSpec::new(5, 0.3).unwrap();
        let basis = generator_basis(5).unwrap();
        for seed in 0..10u64 {
            let rho = random_density(5, 40 + seed);
            assert!(lindblad_rhs(rho.matrix(), &spec, &basis).is_ok());
        }
    }

    #[test]
    fn depolarize_limits() {
        let spec = ChannelSpec::new(3, 2.0).unwrap();
        let rho = random_density(3, 6);
        let at_zero = depolarize(&rho, &spec, 0.0).unwrap();
        assert!(max_abs_diff(at_zero.matrix(), rho.matrix()) < 1e-15);
        let late = depolarize(&rho, &spec, 50.0).unwrap();
        let mixed = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(late.trace_distance(&mixed).unwrap() < 1e-12);
        assert!(depolarize(&rho, &spec, -1.0).is_err());
    }

    /// e^{−ln3} = 1/3 contraction at N=2, γ=1, t=ln 3 equals one POVM round.
    #[test]
    fn depolarize_at_log3_equals_one_round() {
        let spec = ChannelSpec::new(2, 1.0).unwrap();
        let rho = random_density(2, 13);
        let continuous = depolarize(&rho, &spec, 3.0f64.ln()).unwrap();
        let discrete = povm_channel_analytic(&rho);
        assert!(max_abs_diff(continuous.matrix(), discrete.matrix()) < 1e-15);
    }

    #[test]
    fn equivalence_time_values() {
        let spec = ChannelSpec::new(2, 1.0).unwrap();
        assert!((equivalence_time(1, &spec) - 3.0f64.ln()).abs() < 1e-15);
        assert_eq!(equivalence_time(0, &spec), 0.0);

        let spec9 = ChannelSpec::new(9, 0.5).unwrap();
        let t = equivalence_time(3, &spec9);
        assert!((t - 6.0 * 10.0f64.ln() / 4.5).abs() < 1e-15);
        assert!((t - 3.0701).abs() < 1e-4);
    }

    /// depolarize at the equivalence time reproduces the discrete rounds.
    #[test]
    fn discrete_continuous_equivalence() {
        for n in 2..=8usize {
            for &gamma in &[0.1, 1.0, 10.0] {
                let spec = ChannelSpec::new(n, gamma).unwrap();
                for rep in 0..5u64 {
                    let rho = random_density(n, 500 + 10 * n as u64 + rep);
                    for rounds in 0..=5u32 {
                        let discrete = iterate_channel(&rho, rounds);
                        let t = equivalence_time(rounds, &spec);
                        let continuous = depolarize(&rho, &spec, t).unwrap();
                        let dist = discrete.trace_distance(&continuous).unwrap();
                        assert!(dist <= 1e-12, "N={n} gamma={gamma} rounds={rounds}: {dist}");
                    }
                }
            }
        }
    }

    /// Semigroup property of the continuous channel.
    #[test]
    fn depolarize_composes_as_semigroup() {
        let spec = ChannelSpec::new(4, 0.7).unwrap();
        let rho = random_density(4, 23);
        let a = depolarize(&depolarize(&rho, &spec, 0.3).unwrap(), &spec, 1.1).unwrap();
        let b = depolarize(&rho, &spec, 1.4).unwrap();
        assert!(max_abs_diff(a.matrix(), b.matrix()) <= 1e-12);
    }

    /// Includes a case near the Nγt = 20 end of the contract envelope.
    #[test]
    fn rk4_matches_closed_form() {
        let cases = [(2usize, 1.0, 1.0), (4usize, 2.0, 0.7), (6usize, 1.5, 2.2)];
        for (n, gamma, t) in cases {
            let spec = ChannelSpec::new(n, gamma).unwrap();
            let rho = if n == 2 {
                DensityMatrix::ground(2).unwrap()
            } else {
                random_density(n, 3 * n as u64)
            };
            let integrated = integrate_master_equation(&rho, &spec, t, 10_000).unwrap();
            let closed = depolarize(&rho, &spec, t).unwrap();
            let dev = max_abs_diff(integrated.matrix(), closed.matrix());
            assert!(dev <= 1e-8, "N={n}: deviation {dev:.3e}");
        }
    }

    #[test]
    fn rk4_input_checks() {
        let spec = ChannelSpec::new(2, 1.0).unwrap();
        let rho = DensityMatrix::ground(2).unwrap();
        assert!(integrate_master_equation(&rho, &spec, 1.0, 9).is_err());
        let zero = integrate_master_equation(&rho, &spec, 0.0, 100).unwrap();
        assert!(max_abs_diff(zero.matrix(), rho.matrix()) < 1e-15);
    }

    /// For the maximally mixed state every proposal is accepted with
    /// probability exactly 1/N, so the mean proposal count is N.
    #[test]
    fn trajectory_acceptance_rate_on_mixed_state() {
        let n = 3usize;
        let rho = DensityMatrix::maximally_mixed(n).unwrap();
        let count = 3000usize;
        let total: u64 = (0..count)
            .map(|k| trajectory_sample(&rho, 31, k as u64).proposals as u64)
            .sum();
        let mean = total as f64 / count as f64;
        // Geometric(1/3): sd of the mean ≈ √6/√3000 ≈ 0.045.
        assert!((mean - n as f64).abs() < 0.25, "mean proposals {mean}");
    }

    /// Mean collapsed-state fidelity with a pure input is 2/(N+1).
    #[test]
    fn trajectory_fidelity_matches_channel_overlap() {
        for n in [2usize, 4] {
            let omega0 = crate::coherent::sample_haar(n, 1, 5)
                .unwrap()
                .pop()
                .unwrap();
            let psi0 = crate::coherent::coherent_state(&omega0);
            let rho = DensityMatrix::from_coherent(&psi0);
            let count = 20_000usize;
            let mean_fid: f64 = (0..count)
                .map(|k| {
                    let out = trajectory_sample(&rho, 101, k as u64);
                    let psi = crate::coherent::coherent_state(&out.angles);
                    psi.overlap(&psi0).norm_sqr()
                })
                .sum::<f64>()
                / count as f64;
            let expected = 2.0 / (n as f64 + 1.0);
            assert!(
                (mean_fid - expected).abs() < 0.02,
                "N={n}: fidelity {mean_fid} vs {expected}"
            );
        }
    }

    /// 10^5 trajectories from the qubit ground state average to
    /// diag(2/3, 1/3) within three standard errors.
    #[test]
    fn trajectory_average_converges_to_analytic_channel() {
        let rho = DensityMatrix::ground(2).unwrap();
        let est = trajectory_average(&rho, 100_000, 55).unwrap();
        let target = povm_channel_analytic(&rho);
        assert!(
            est.max_sigma(target.matrix()) < 3.0,
            "sigma {}",
            est.max_sigma(target.matrix())
        );
    }

    #[test]
    fn lambda_estimate_is_exact_per_sample() {
        for n in 2..=5usize {
            let basis = generator_basis(n).unwrap();
            let lambda = lambda_estimate(&basis, 1000, 9).unwrap();
            assert!(
                (lambda - 1.0 / (n as f64 + 1.0)).abs() < 1e-12,
                "N={n}: lambda {lambda}"
            );
        }
        let basis = generator_basis(2).unwrap();
        assert!(lambda_estimate(&basis, 999, 0).is_err());
    }

    /// Trace preservation and positivity across the closed-form channels,
    /// 1000 random valid inputs per dimension.
    #[test]
    fn channels_preserve_state_validity() {
        for n in 2..=6usize {
            let spec = ChannelSpec::new(n, 1.3).unwrap();
            for rep in 0..1000u64 {
                let rho = random_density(n, 9000 + 100 * n as u64 + rep);
                for out in [
                    povm_channel_analytic(&rho),
                    iterate_channel(&rho, 3),
                    depolarize(&rho, &spec, 0.4).unwrap(),
                ] {
                    assert!((trace(out.matrix()).re - 1.0).abs() <= 1e-12);
                    let eigs =
                        linalg::hermitian_eigenvalues(out.matrix(), 1e-10).unwrap();
                    assert!(eigs[0] >= -1e-10, "N={n} rep={rep}: {}", eigs[0]);
                }
            }
        }
    }

    /// Monte Carlo error decays like 1/√samples: log-log slope −0.5 ± 0.1.
    #[test]
    fn monte_carlo_error_scaling() {
        let rho = DensityMatrix::ground(2).unwrap();
        let target = povm_channel_analytic(&rho);
        let counts = [1_000usize, 10_000, 100_000, 1_000_000];
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (i, &count) in counts.iter().enumerate() {
            // Average the error over a few independent seeds per count to
            // tame fluctuations in the fit.
            let mut err = 0.0;
            for seed in 0..4u64 {
                let est = povm_channel_monte_carlo(&rho, count, 200 + 10 * seed + i as u64)
                    .unwrap();
                err += est.frobenius_error(target.matrix());
            }
            xs.push((count as f64).ln());
            ys.push((err / 4.0).ln());
        }
        let slope = least_squares_slope(&xs, &ys);
        assert!(
            (slope + 0.5).abs() <= 0.1,
            "slope {slope} outside -0.5 ± 0.1"
        );
    }

    fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        num / den
    }

    #[test]
    fn json_round_trip_and_validation() {
        let rho = random_density(3, 88);
        let json = rho.to_json();
        let text = serde_json::to_string(&json).unwrap();
        let parsed: DensityMatrixJson = serde_json::from_str(&text).unwrap();
        let back = DensityMatrix::from_json(&parsed).unwrap();
        assert!(max_abs_diff(back.matrix(), rho.matrix()) < 1e-15);

        // Readers must validate on load.
        let mut corrupt = rho.to_json();
        corrupt.re[0] += 0.5; // breaks unit trace
        assert!(DensityMatrix::from_json(&corrupt).is_err());
        let mut skew = rho.to_json();
        skew.im[1] += 0.3; // breaks Hermiticity
        assert!(DensityMatrix::from_json(&skew).is_err());
    }
}
