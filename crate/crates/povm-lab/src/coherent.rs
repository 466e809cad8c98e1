//! N-level coherent states, two-level rotation gates, and Haar sampling
//! on CP^{N−1}.
//!
//! A coherent state is fixed by 2N−2 angles (θ_1..θ_{N−1}, φ_1..φ_{N−1})
//! and built by a ladder of two-level rotations acting on the ground state:
//!
//! ```text
//! |Ω⟩ = G_{N−2,N−1}(θ_{N−1}, φ_{N−1}) ··· G_{0,1}(θ_1, φ_1) |0⟩
//! ```
//!
//! where each `G` mixes the pair {|k⟩, |k+1⟩}. The amplitudes come out as
//! the hyperspherical closed form
//!
//! ```text
//! ⟨j|Ω⟩ = e^{i(φ_1+..+φ_j)} sin(θ_1/2)···sin(θ_j/2) cos(θ_{j+1}/2)
//! ```
//!
//! (with no cosine factor on the last level). Phase conventions matter
//! here: [`ladder_gate`] is the gate that produces exactly these
//! amplitudes; it equals the axis-angle exponential [`rotation_gate`],
//! exp[−i(θ/2)(cosφ·X + sinφ·Y)], evaluated at axis phase φ + π/2. Both
//! are exposed because the circuit decompositions are stated for the
//! axis-angle form while the state construction is pinned to the closed
//! form. The Haar measure is invariant under the φ shift, so every POVM
//! average is identical in the two conventions.

use std::io::Write as IoWrite;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

use crate::linalg::{self, c64, identity, CMat};
use crate::sun_algebra::{BlochVector, GeneratorBasis};
use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// The 2N−2 angles parameterizing a coherent state.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaAngles {
    theta: Vec<f64>,
    phi: Vec<f64>,
}

impl OmegaAngles {
    /// Validates lengths and ranges; φ is wrapped into [0, 2π), θ must lie
    /// in [0, π] (tiny floating excursions are clamped).
    pub fn new(theta: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidAngles("need at least one angle pair".into()));
        }
        if theta.len() != phi.len() {
            return Err(Error::LengthMismatch {
                expected: theta.len(),
                got: phi.len(),
            });
        }
        let mut theta = theta;
        for t in &mut theta {
            if !t.is_finite() || *t < -1e-9 || *t > std::f64::consts::PI + 1e-9 {
                return Err(Error::InvalidAngles(format!("theta {t} outside [0, pi]")));
            }
            *t = t.clamp(0.0, std::f64::consts::PI);
        }
        let phi = phi
            .into_iter()
            .map(|p| {
                if !p.is_finite() {
                    Err(Error::InvalidAngles("non-finite phi".into()))
                } else {
                    Ok(p.rem_euclid(TWO_PI))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { theta, phi })
    }

    /// All angles zero: the ground direction.
    pub fn zero(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self {
            theta: vec![0.0; dim - 1],
            phi: vec![0.0; dim - 1],
        })
    }

    /// System dimension N.
    pub fn dim(&self) -> usize {
        self.theta.len() + 1
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }
}

/// Unit vector of N complex amplitudes with the global phase fixed so the
/// first amplitude is real and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentState {
    amplitudes: Vec<Complex64>,
}

impl CoherentState {
    /// Validates unit norm and canonicalizes the global phase.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidDimension(amplitudes.len()));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr.sqrt() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "norm {} deviates from 1",
                norm_sqr.sqrt()
            )));
        }
        let mut amplitudes = amplitudes;
        let first = amplitudes[0];
        if first.norm() > 1e-15 {
            let phase = first / first.norm();
            for a in &mut amplitudes {
                *a /= phase;
            }
            amplitudes[0] = c64(amplitudes[0].re, 0.0);
        }
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// |Ω⟩⟨Ω| as a matrix.
    pub fn projector(&self) -> CMat {
        linalg::outer(&self.amplitudes, &self.amplitudes)
    }

    /// ⟨Ω|ψ⟩.
    pub fn overlap(&self, other: &CoherentState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Axis-angle two-level rotation exp[−i(θ/2)(cosφ·X_{k,k+1} + sinφ·Y_{k,k+1})]
/// embedded in the N-dimensional identity.
pub fn rotation_gate(n: usize, k: usize, theta: f64, phi: f64) -> Result<CMat> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if k + 2 > n {
        return Err(Error::InvalidArgument(format!(
            "subspace index {k} out of range for dimension {n}"
        )));
    }
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut u = identity(n);
    u[[k, k]] = c64(c, 0.0);
    u[[k + 1, k + 1]] = c64(c, 0.0);
    // -i e^{∓iφ} sin(θ/2) off-diagonals.
    u[[k, k + 1]] = c64(0.0, -1.0) * Complex64::from_polar(s, -phi);
    u[[k + 1, k]] = c64(0.0, -1.0) * Complex64::from_polar(s, phi);
    Ok(u)
}

/// Two-level gate mapping |k⟩ ↦ cos(θ/2)|k⟩ + e^{iφ} sin(θ/2)|k+1⟩.
///
/// Identical to `rotation_gate(n, k, θ, φ + π/2)`; this is the convention
/// under which the coherent-state amplitudes take the closed form quoted in
/// the module docs.
pub fn ladder_gate(n: usize, k: usize, theta: f64, phi: f64) -> Result<CMat> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if k + 2 > n {
        return Err(Error::InvalidArgument(format!(
            "subspace index {k} out of range for dimension {n}"
        )));
    }
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut u = identity(n);
    u[[k, k]] = c64(c, 0.0);
    u[[k + 1, k + 1]] = c64(c, 0.0);
    u[[k, k + 1]] = -Complex64::from_polar(s, -phi);
    u[[k + 1, k]] = Complex64::from_polar(s, phi);
    Ok(u)
}

/// The preparation unitary U(Ω) with U(Ω)|0⟩ = |Ω⟩: the ladder gates for
/// k = 0..N−2 applied in ascending order.
pub fn state_preparation_unitary(angles: &OmegaAngles) -> CMat {
    let n = angles.dim();
    let mut u = identity(n);
    for k in 0..(n - 1) {
        let g = ladder_gate(n, k, angles.theta()[k], angles.phi()[k])
            .expect("index range is valid by construction");
        u = g.dot(&u);
    }
    u
}

/// Builds |Ω⟩ by applying the ladder of two-level gates to (1,0,…,0)ᵀ.
pub fn coherent_state(angles: &OmegaAngles) -> CoherentState {
    let n = angles.dim();
    let mut amp = vec![c64(0.0, 0.0); n];
    amp[0] = c64(1.0, 0.0);
    for k in 0..(n - 1) {
        let (c, s) = ((angles.theta()[k] / 2.0).cos(), (angles.theta()[k] / 2.0).sin());
        let (ak, ak1) = (amp[k], amp[k + 1]);
        amp[k] = ak * c - ak1 * Complex64::from_polar(s, -angles.phi()[k]);
        amp[k + 1] = ak * Complex64::from_polar(s, angles.phi()[k]) + ak1 * c;
    }
    // The ladder construction leaves the first amplitude cos(θ_1/2) ≥ 0,
    // so no rephasing is needed.
    CoherentState { amplitudes: amp }
}

/// POVM element E(Ω) = N |Ω⟩⟨Ω|.
pub fn povm_element(state: &CoherentState) -> CMat {
    state.projector().mapv(|z| z * state.dim() as f64)
}

/// R_ν = ⟨Ω|T_ν|Ω⟩ in the generator basis; Σ R_ν² = (N−1)/(2N).
pub fn bloch_vector_of_state(state: &CoherentState, basis: &GeneratorBasis) -> Result<BlochVector> {
    if state.dim() != basis.dim() {
        return Err(Error::DimensionMismatch(state.dim(), basis.dim()));
    }
    let components = basis
        .iter()
        .map(|t| linalg::expectation(t, state.amplitudes()).re)
        .collect();
    BlochVector::new(state.dim(), components)
}

/// Marginal density p_j(θ) = (N−j) sin^{2(N−j)−1}(θ/2) cos(θ/2) for the
/// j-th polar angle (j = 1..N−1).
pub fn theta_density(n: usize, j: usize, theta: f64) -> f64 {
    let k = (n - j) as f64;
    k * (theta / 2.0).sin().powi(2 * (n - j) as i32 - 1) * (theta / 2.0).cos()
}

/// CDF of `theta_density`: F_j(θ) = sin^{2(N−j)}(θ/2).
pub fn theta_cdf(n: usize, j: usize, theta: f64) -> f64 {
    (theta / 2.0).sin().powi(2 * (n - j) as i32)
}

/// Inverse-CDF draw of θ_j from a uniform variate in [0, 1).
pub fn theta_from_uniform(n: usize, j: usize, u: f64) -> f64 {
    let exponent = 1.0 / (2.0 * (n - j) as f64);
    2.0 * u.powf(exponent).asin()
}

/// ChaCha stream dedicated to one sample index, derived from the run seed.
/// Splitting by stream keeps results identical however samples are
/// distributed over threads.
pub fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One Haar draw on CP^{N−1} from a dedicated RNG: θ_j by inverse CDF,
/// φ_j uniform on [0, 2π), interleaved per level.
pub fn draw_haar_angles(n: usize, rng: &mut ChaCha8Rng) -> OmegaAngles {
    let mut theta = Vec::with_capacity(n - 1);
    let mut phi = Vec::with_capacity(n - 1);
    for j in 1..n {
        let u: f64 = rng.random();
        theta.push(theta_from_uniform(n, j, u));
        let v: f64 = rng.random();
        phi.push(v * TWO_PI);
    }
    OmegaAngles { theta, phi }
}

/// Draws `count` Haar samples, one ChaCha stream per sample index.
/// Deterministic for a fixed seed.
pub fn sample_haar(n: usize, count: usize, seed: u64) -> Result<Vec<OmegaAngles>> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if count < 1 {
        return Err(Error::TooFewSamples { got: count, min: 1 });
    }
    Ok((0..count)
        .map(|k| {
            let mut rng = sample_rng(seed, k as u64);
            draw_haar_angles(n, &mut rng)
        })
        .collect())
}

/// Recovers angles from amplitudes on the open chart (all θ_j in (0, π)).
///
/// Inverse of [`coherent_state`] there; fails when an intermediate sine
/// product vanishes and the remaining angles are undetermined.
pub fn angles_of_state(state: &CoherentState) -> Result<OmegaAngles> {
    let n = state.dim();
    let amp = state.amplitudes();
    let mut theta = Vec::with_capacity(n - 1);
    let mut phi = Vec::with_capacity(n - 1);
    let mut sin_product = 1.0f64;
    for j in 0..(n - 1) {
        if sin_product < 1e-12 {
            return Err(Error::InvalidAngles(
                "chart degenerate: remaining angles undetermined".into(),
            ));
        }
        let c = (amp[j].norm() / sin_product).clamp(0.0, 1.0);
        let t = 2.0 * c.acos();
        theta.push(t);
        sin_product *= (t / 2.0).sin();
        let rel = amp[j + 1] * amp[j].conj();
        let p = if rel.norm() > 1e-15 { rel.arg() } else { 0.0 };
        phi.push(p.rem_euclid(TWO_PI));
    }
    OmegaAngles::new(theta, phi)
}

/// Writes angle samples as CSV: optional `#`-prefixed comment lines, a
/// header `theta_1..theta_{N-1},phi_1..phi_{N-1}`, then one row per sample
/// with 17 significant digits in radians.
pub fn write_angles_csv(
    out: &mut dyn IoWrite,
    samples: &[OmegaAngles],
    comments: &[String],
) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples to write".into()));
    }
    let n = samples[0].dim();
    for line in comments {
        writeln!(out, "# {line}")?;
    }
    let mut header = Vec::with_capacity(2 * (n - 1));
    for j in 1..n {
        header.push(format!("theta_{j}"));
    }
    for j in 1..n {
        header.push(format!("phi_{j}"));
    }
    writeln!(out, "{}", header.join(","))?;
    for sample in samples {
        if sample.dim() != n {
            return Err(Error::DimensionMismatch(sample.dim(), n));
        }
        let row: Vec<String> = sample
            .theta()
            .iter()
            .chain(sample.phi().iter())
            .map(|v| format!("{v:.16e}"))
            .collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, max_abs_diff, trace, unitarity_deviation};
    use crate::sun_algebra::generator_basis;
    use std::f64::consts::PI;

    fn random_angles(n: usize, seed: u64) -> OmegaAngles {
        let mut rng = sample_rng(seed, 0);
        let theta = (0..n - 1).map(|_| rng.random::<f64>() * PI).collect();
        let phi = (0..n - 1).map(|_| rng.random::<f64>() * TWO_PI).collect();
        OmegaAngles::new(theta, phi).unwrap()
    }

    #[test]
    fn angles_validate_and_wrap() {
        let a = OmegaAngles::new(vec![1.0], vec![7.0]).unwrap();
        assert!((a.phi()[0] - (7.0 - TWO_PI)).abs() < 1e-15);
        assert!(OmegaAngles::new(vec![4.0], vec![0.0]).is_err());
        assert!(OmegaAngles::new(vec![1.0, 1.0], vec![0.0]).is_err());
    }

    #[test]
    fn rotation_gate_at_zero_angle_is_identity() {
        let u = rotation_gate(3, 1, 0.0, 1.3).unwrap();
        assert!(max_abs_diff(&u, &identity(3)) < 1e-15);
    }

    #[test]
    fn rotation_gate_half_turn_is_minus_i_x() {
        // exp(-iπX/2) = -i X.
        let u = rotation_gate(2, 0, PI, 0.0).unwrap();
        assert!(u[[0, 0]].norm() < 1e-15);
        assert!((u[[0, 1]] - c64(0.0, -1.0)).norm() < 1e-15);
        assert!((u[[1, 0]] - c64(0.0, -1.0)).norm() < 1e-15);
        assert!(u[[1, 1]].norm() < 1e-15);
    }

    #[test]
    fn rotation_gate_is_unitary_and_embedded() {
        for seed in 0..20u64 {
            let mut rng = sample_rng(seed, 3);
            let theta = rng.random::<f64>() * PI;
            let phi = rng.random::<f64>() * TWO_PI;
            let u = rotation_gate(4, 2, theta, phi).unwrap();
            assert!(unitarity_deviation(&u) < 1e-12);
            // Untouched subspace stays identity.
            assert_eq!(u[[0, 0]], c64(1.0, 0.0));
            assert_eq!(u[[1, 1]], c64(1.0, 0.0));
            assert_eq!(u[[0, 2]], c64(0.0, 0.0));
        }
    }

    #[test]
    fn rotation_gate_rejects_out_of_range_subspace() {
        assert!(rotation_gate(3, 2, 1.0, 0.0).is_err());
        assert!(rotation_gate(3, 1, 1.0, 0.0).is_ok());
    }

    #[test]
    fn ladder_gate_is_phase_shifted_rotation_gate() {
        for seed in 0..20u64 {
            let mut rng = sample_rng(seed, 4);
            let theta = rng.random::<f64>() * PI;
            let phi = rng.random::<f64>() * TWO_PI;
            let a = ladder_gate(3, 1, theta, phi).unwrap();
            let b = rotation_gate(3, 1, theta, phi + PI / 2.0).unwrap();
            assert!(max_abs_diff(&a, &b) < 1e-14);
        }
    }

    #[test]
    fn qubit_closed_form() {
        for seed in 0..50u64 {
            let angles = random_angles(2, seed);
            let state = coherent_state(&angles);
            let t = angles.theta()[0];
            let p = angles.phi()[0];
            let expected = [
                c64((t / 2.0).cos(), 0.0),
                Complex64::from_polar((t / 2.0).sin(), p),
            ];
            for (a, e) in state.amplitudes().iter().zip(expected.iter()) {
                assert!((a - e).norm() < 1e-14, "seed {seed}");
            }
        }
    }

    #[test]
    fn qutrit_closed_form() {
        for seed in 0..50u64 {
            let angles = random_angles(3, seed);
            let state = coherent_state(&angles);
            let (t1, t2) = (angles.theta()[0], angles.theta()[1]);
            let (p1, p2) = (angles.phi()[0], angles.phi()[1]);
            let expected = [
                c64((t1 / 2.0).cos(), 0.0),
                Complex64::from_polar((t1 / 2.0).sin() * (t2 / 2.0).cos(), p1),
                Complex64::from_polar((t1 / 2.0).sin() * (t2 / 2.0).sin(), p1 + p2),
            ];
            for (a, e) in state.amplitudes().iter().zip(expected.iter()) {
                assert!((a - e).norm() < 1e-14, "seed {seed}");
            }
        }
    }

    #[test]
    fn zero_angles_give_ground_state() {
        let state = coherent_state(&OmegaAngles::zero(5).unwrap());
        assert!((state.amplitudes()[0] - c64(1.0, 0.0)).norm() < 1e-15);
        for a in &state.amplitudes()[1..] {
            assert!(a.norm() < 1e-15);
        }
    }

    #[test]
    fn preparation_unitary_matches_state_and_is_unitary() {
        for n in 2..=5usize {
            let angles = random_angles(n, 17 + n as u64);
            let u = state_preparation_unitary(&angles);
            assert!(unitarity_deviation(&u) < 1e-12);
            let state = coherent_state(&angles);
            for (i, a) in state.amplitudes().iter().enumerate() {
                assert!((u[[i, 0]] - a).norm() < 1e-13);
            }
        }
    }

    /// Unit norm on 1000 random angle sets per dimension.
    #[test]
    fn coherent_state_is_normalized() {
        for n in 2..=6usize {
            for seed in 0..1000u64 {
                let angles = random_angles(n, 10_000 * n as u64 + seed);
                let state = coherent_state(&angles);
                let norm: f64 = state.amplitudes().iter().map(|a| a.norm_sqr()).sum();
                assert!((norm.sqrt() - 1.0).abs() <= 1e-12, "N={n} seed={seed}");
            }
        }
    }

    #[test]
    fn povm_element_ground_qubit() {
        let state = coherent_state(&OmegaAngles::zero(2).unwrap());
        let e = povm_element(&state);
        assert!((e[[0, 0]].re - 2.0).abs() < 1e-14);
        assert!(e[[1, 1]].norm() < 1e-14);
    }

    #[test]
    fn povm_element_trace_and_spectrum() {
        for n in 2..=4usize {
            for (k, angles) in sample_haar(n, 20, 99).unwrap().iter().enumerate() {
                let e = povm_element(&coherent_state(angles));
                assert!((trace(&e).re - n as f64).abs() < 1e-12, "N={n} k={k}");
                let vals = hermitian_eigenvalues(&e, 1e-12).unwrap();
                assert!((vals[n - 1] - n as f64).abs() < 1e-10);
                for v in &vals[..n - 1] {
                    assert!(v.abs() < 1e-10);
                }
            }
        }
    }

    /// Σ R_ν² = (N−1)/(2N) for every Ω.
    #[test]
    fn bloch_vector_norm_is_fixed() {
        for n in 2..=4usize {
            let basis = generator_basis(n).unwrap();
            let expected = (n as f64 - 1.0) / (2.0 * n as f64);
            for angles in sample_haar(n, 25, 7 + n as u64).unwrap() {
                let r = bloch_vector_of_state(&coherent_state(&angles), &basis).unwrap();
                assert!((r.norm_sqr() - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ground_qubit_bloch_vector() {
        let basis = generator_basis(2).unwrap();
        let r = bloch_vector_of_state(&coherent_state(&OmegaAngles::zero(2).unwrap()), &basis)
            .unwrap();
        assert!(r.components()[0].abs() < 1e-14);
        assert!(r.components()[1].abs() < 1e-14);
        assert!((r.components()[2] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn sampler_is_deterministic_per_seed() {
        let a = sample_haar(3, 32, 42).unwrap();
        let b = sample_haar(3, 32, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_haar(3, 32, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sampler_rejects_bad_input() {
        assert!(sample_haar(1, 10, 0).is_err());
        assert!(sample_haar(3, 0, 0).is_err());
    }

    /// For N=2, cos θ is uniform on [−1, 1]; its sample mean stays within
    /// 5/√count of zero.
    #[test]
    fn qubit_cos_theta_mean_is_centered() {
        let count = 20_000;
        let samples = sample_haar(2, count, 4242).unwrap();
        let mean: f64 = samples.iter().map(|a| a.theta()[0].cos()).sum::<f64>() / count as f64;
        assert!(mean.abs() < 5.0 / (count as f64).sqrt(), "mean {mean}");
    }

    /// Chi-square goodness of fit of every θ_j marginal against the
    /// analytic CDF, 50 bins, 10^5 samples, significance 0.001.
    #[test]
    fn haar_marginals_pass_chi_square() {
        // Wilson-Hilferty approximation of the χ² quantile at 1−α.
        fn chi2_quantile(df: f64, z: f64) -> f64 {
            let a = 2.0 / (9.0 * df);
            df * (1.0 - a + z * a.sqrt()).powi(3)
        }
        let bins = 50usize;
        let count = 100_000usize;
        let threshold = chi2_quantile((bins - 1) as f64, 3.090_232); // α = 0.001

        for n in 2..=5usize {
            let samples = sample_haar(n, count, 1000 + n as u64).unwrap();
            for j in 1..n {
                let mut observed = vec![0usize; bins];
                for s in &samples {
                    let t = s.theta()[j - 1];
                    let idx = ((t / PI) * bins as f64).min(bins as f64 - 1.0) as usize;
                    observed[idx] += 1;
                }
                let mut stat = 0.0;
                for (i, &obs) in observed.iter().enumerate() {
                    let lo = PI * i as f64 / bins as f64;
                    let hi = PI * (i + 1) as f64 / bins as f64;
                    let expect = count as f64 * (theta_cdf(n, j, hi) - theta_cdf(n, j, lo));
                    stat += (obs as f64 - expect).powi(2) / expect;
                }
                assert!(
                    stat < threshold,
                    "N={n} j={j}: chi2 {stat:.1} over threshold {threshold:.1}"
                );
            }
        }
    }

    /// Quadrature oracle at N=2: ∫|Ω⟩⟨Ω| dμ = 1/2. Simpson in θ against
    /// the sin(θ)/2 density, periodic trapezoid in φ.
    #[test]
    fn projector_haar_average_by_quadrature() {
        let n_theta = 801;
        let n_phi = 32;
        let mut acc = crate::linalg::zeros(2);
        for (i, w_theta) in simpson_weights(n_theta, PI).into_iter().enumerate() {
            let theta = PI * i as f64 / (n_theta - 1) as f64;
            let density = 0.5 * theta.sin();
            for p in 0..n_phi {
                let phi = TWO_PI * p as f64 / n_phi as f64;
                let angles = OmegaAngles::new(vec![theta], vec![phi]).unwrap();
                let proj = coherent_state(&angles).projector();
                let w = w_theta * density / n_phi as f64;
                acc = acc + proj.mapv(|z| z * w);
            }
        }
        let target = identity(2).mapv(|z| z * 0.5);
        assert!(max_abs_diff(&acc, &target) < 1e-10);
    }

    fn simpson_weights(points: usize, length: f64) -> Vec<f64> {
        assert!(points >= 3 && points % 2 == 1);
        let h = length / (points - 1) as f64;
        (0..points)
            .map(|i| {
                let c = if i == 0 || i == points - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * h / 3.0
            })
            .collect()
    }

    /// Empirical Haar mean of |Ω⟩⟨Ω| over 10^5 samples is 1/N within
    /// 5e-3 per entry.
    #[test]
    fn projector_haar_average_by_sampling() {
        for n in [2usize, 3] {
            let count = 100_000;
            let mut acc = crate::linalg::zeros(n);
            for angles in sample_haar(n, count, 2024).unwrap() {
                acc = acc + coherent_state(&angles).projector();
            }
            acc = acc.mapv(|z| z / count as f64);
            let target = identity(n).mapv(|z| z / n as f64);
            assert!(max_abs_diff(&acc, &target) < 5e-3, "N={n}");
        }
    }

    /// Angle recovery is a left inverse of the state construction on the
    /// open chart.
    #[test]
    fn angle_recovery_round_trip() {
        for n in 2..=5usize {
            for angles in sample_haar(n, 40, 31 + n as u64).unwrap() {
                let state = coherent_state(&angles);
                let recovered = angles_of_state(&state).unwrap();
                for (a, b) in angles.theta().iter().zip(recovered.theta()) {
                    assert!((a - b).abs() < 1e-9, "theta {a} vs {b}");
                }
                for (a, b) in angles.phi().iter().zip(recovered.phi()) {
                    let diff = (a - b).rem_euclid(TWO_PI);
                    let wrapped = diff.min(TWO_PI - diff);
                    assert!(wrapped < 1e-9, "phi {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn csv_shape_matches_samples() {
        let samples = sample_haar(3, 10, 5).unwrap();
        let mut buf = Vec::new();
        write_angles_csv(&mut buf, &samples, &["meta".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 12); // comment + header + 10 rows
        assert!(lines[0].starts_with('#'));
        assert_eq!(lines[1], "theta_1,theta_2,phi_1,phi_2");
        assert_eq!(lines[2].split(',').count(), 4);
    }
}
