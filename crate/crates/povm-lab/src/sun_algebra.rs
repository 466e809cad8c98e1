//! Generalized Gell-Mann generators of su(N) and Bloch-vector algebra.
//!
//! The basis `T_ν` (ν = 1..N²−1) consists of traceless Hermitian matrices
//! normalized to Tr(T_μ T_ν) = δ_μν / 2. Ordering is fixed so Bloch vectors
//! are reproducible across runs: symmetric off-diagonal pairs in
//! lexicographic (j,k) order, then the antisymmetric pairs in the same
//! order, then the N−1 diagonal generators. For N = 2 this is exactly
//! (X/2, Y/2, Z/2).

use ndarray::Array2;
use num_complex::Complex64;

use crate::linalg::{self, c64, identity, zeros, CMat};
use crate::tol::Tolerances;
use crate::{Error, Result};

/// Orthonormal su(N) generator basis.
#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    dim: usize,
    generators: Vec<CMat>,
}

impl GeneratorBasis {
    /// System dimension N.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of generators, N²−1.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// The generators in canonical order.
    pub fn generators(&self) -> &[CMat] {
        &self.generators
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CMat> {
        self.generators.iter()
    }
}

/// Real Bloch coefficients of a Hermitian operator in the generator basis.
///
/// For a density matrix, ρ = 1/N + Σ_ν b_ν T_ν with b_ν = 2 Tr(ρ T_ν) and
/// Σ b_ν² ≤ 2(N−1)/N. The type itself carries no positivity constraint:
/// the phase-space analysis deliberately evaluates anti-parallel Bloch
/// points that correspond to non-positive matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochVector {
    dim: usize,
    components: Vec<f64>,
}

impl BlochVector {
    /// Wraps raw components; the count must be N²−1.
    pub fn new(dim: usize, components: Vec<f64>) -> Result<Self> {
        let expected = dim * dim - 1;
        if components.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: components.len(),
            });
        }
        Ok(Self { dim, components })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// Σ b_ν².
    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(|b| b * b).sum()
    }

    /// Componentwise scaling.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            components: self.components.iter().map(|b| b * factor).collect(),
        }
    }
}

/// Builds the generalized Gell-Mann basis for dimension `n`.
pub fn generator_basis(n: usize) -> Result<GeneratorBasis> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let mut generators = Vec::with_capacity(n * n - 1);

    // Symmetric off-diagonal: (|j⟩⟨k| + |k⟩⟨j|)/2, (j,k) lexicographic.
    for j in 0..n {
        for k in (j + 1)..n {
            let mut t = zeros(n);
            t[[j, k]] = c64(0.5, 0.0);
            t[[k, j]] = c64(0.5, 0.0);
            generators.push(t);
        }
    }
    // Antisymmetric off-diagonal: -i(|j⟩⟨k| - |k⟩⟨j|)/2.
    for j in 0..n {
        for k in (j + 1)..n {
            let mut t = zeros(n);
            t[[j, k]] = c64(0.0, -0.5);
            t[[k, j]] = c64(0.0, 0.5);
            generators.push(t);
        }
    }
    // Diagonal: (1/2)√(2/(l(l+1))) (Σ_{j<l} |j⟩⟨j| - l |l⟩⟨l|).
    for l in 1..n {
        let norm = 0.5 * (2.0 / (l as f64 * (l as f64 + 1.0))).sqrt();
        let mut t = zeros(n);
        for j in 0..l {
            t[[j, j]] = c64(norm, 0.0);
        }
        t[[l, l]] = c64(-(l as f64) * norm, 0.0);
        generators.push(t);
    }

    Ok(GeneratorBasis {
        dim: n,
        generators,
    })
}

/// Σ_ν T_ν T_ν, computed by explicit summation.
///
/// Equals ((N²−1)/(2N))·1 for the orthonormal basis; the closed form is
/// asserted by tests, not by this function.
pub fn casimir_contraction(basis: &GeneratorBasis) -> CMat {
    let mut acc = zeros(basis.dim());
    for t in basis.iter() {
        acc = acc + t.dot(t);
    }
    acc
}

/// Σ_ν T_ν X T_ν by explicit summation, cross-checked against the closed
/// form Tr(X)·1/2 − X/(2N).
pub fn twirl(x: &CMat, basis: &GeneratorBasis) -> Result<CMat> {
    let n = basis.dim();
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::DimensionMismatch(x.nrows(), n));
    }
    let mut acc = zeros(n);
    for t in basis.iter() {
        acc = acc + t.dot(x).dot(t);
    }
    let closed = closed_form_twirl(x, n);
    let dev = linalg::max_abs_diff(&acc, &closed);
    let scale = linalg::frobenius_norm(x).max(1.0);
    if dev > Tolerances::default().structural * scale {
        return Err(Error::NumericalGuard(format!(
            "twirl sum deviates from closed form by {dev:.3e}"
        )));
    }
    Ok(acc)
}

/// Tr(X)·1/2 − X/(2N).
pub fn closed_form_twirl(x: &CMat, n: usize) -> CMat {
    let tr = linalg::trace(x);
    let mut out = x.mapv(|z| -z / (2.0 * n as f64));
    for i in 0..n {
        out[[i, i]] += tr * 0.5;
    }
    out
}

/// Bloch coefficients b_ν = 2 Tr(ρ T_ν) of a unit-trace Hermitian matrix.
pub fn bloch_decompose(rho: &CMat, basis: &GeneratorBasis) -> Result<BlochVector> {
    let n = basis.dim();
    if rho.nrows() != n || rho.ncols() != n {
        return Err(Error::DimensionMismatch(rho.nrows(), n));
    }
    let tr = linalg::trace(rho);
    if (tr - c64(1.0, 0.0)).norm() > Tolerances::default().state {
        return Err(Error::InvalidState(format!(
            "trace {tr} deviates from 1 beyond tolerance"
        )));
    }
    let components = basis
        .iter()
        .map(|t| 2.0 * linalg::trace(&rho.dot(t)).re)
        .collect();
    BlochVector::new(n, components)
}

/// 1/N + Σ_ν b_ν T_ν. Hermitian by construction; positivity is the
/// caller's problem when a physical state is required.
pub fn bloch_compose(b: &BlochVector, basis: &GeneratorBasis) -> Result<CMat> {
    let n = basis.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch(b.dim(), n));
    }
    let mut out: CMat = identity(n).mapv(|z| z / n as f64);
    for (coeff, t) in b.components().iter().zip(basis.iter()) {
        out = out + t.mapv(|z| z * *coeff);
    }
    Ok(out)
}

/// Purity Tr(ρ²) of a Hermitian matrix.
pub fn purity(rho: &CMat) -> f64 {
    linalg::trace(&rho.dot(rho)).re
}

/// Maximally mixed state 1/N.
pub fn maximally_mixed(n: usize) -> CMat {
    Array2::from_diag_elem(n, Complex64::new(1.0 / n as f64, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dagger, hermitian_eigenvalues, max_abs_diff, trace};
    use rand::Rng;
    use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

    fn random_hermitian(n: usize, seed: u64) -> CMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = zeros(n);
        for i in 0..n {
            for j in 0..n {
                g[[i, j]] = c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
        }
        linalg::hermitize(&g)
    }

    fn random_density(n: usize, seed: u64) -> CMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = zeros(n);
        for i in 0..n {
            for j in 0..n {
                g[[i, j]] = c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
        }
        let gg = g.dot(&dagger(&g));
        let tr = trace(&gg).re;
        gg.mapv(|z| z / tr)
    }

    #[test]
    fn rejects_dimension_below_two() {
        assert!(matches!(generator_basis(0), Err(Error::InvalidDimension(0))));
        assert!(matches!(generator_basis(1), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn qubit_basis_is_half_pauli() {
        let basis = generator_basis(2).unwrap();
        assert_eq!(basis.len(), 3);
        let x = &basis.generators()[0];
        let y = &basis.generators()[1];
        let z = &basis.generators()[2];
        assert_eq!(x[[0, 1]], c64(0.5, 0.0));
        assert_eq!(x[[1, 0]], c64(0.5, 0.0));
        assert_eq!(y[[0, 1]], c64(0.0, -0.5));
        assert_eq!(y[[1, 0]], c64(0.0, 0.5));
        assert_eq!(z[[0, 0]], c64(0.5, 0.0));
        assert_eq!(z[[1, 1]], c64(-0.5, 0.0));
    }

    #[test]
    fn qubit_orthonormality_values() {
        let basis = generator_basis(2).unwrap();
        let t1 = &basis.generators()[0];
        let t2 = &basis.generators()[1];
        assert!(trace(&t1.dot(t2)).norm() < 1e-15);
        assert!((trace(&t1.dot(t1)).re - 0.5).abs() < 1e-15);
    }

    /// Orthonormality, tracelessness, Hermiticity for N = 2..8.
    #[test]
    fn structural_invariants_across_dimensions() {
        for n in 2..=8usize {
            let basis = generator_basis(n).unwrap();
            assert_eq!(basis.len(), n * n - 1);
            for (mu, a) in basis.iter().enumerate() {
                assert!(trace(a).norm() <= 1e-12, "N={n} generator {mu} not traceless");
                assert!(linalg::hermiticity_deviation(a) <= 1e-12);
                for (nu, b) in basis.iter().enumerate() {
                    let overlap = trace(&a.dot(b)).re;
                    let expected = if mu == nu { 0.5 } else { 0.0 };
                    assert!(
                        (overlap - expected).abs() <= 1e-12,
                        "N={n}: Tr(T_{mu} T_{nu}) = {overlap}"
                    );
                }
            }
        }
    }

    #[test]
    fn casimir_closed_form_small_dims() {
        // N=2 -> (3/4)·1, N=3 -> (4/3)·1.
        for (n, expected) in [(2usize, 0.75), (3usize, 4.0 / 3.0)] {
            let basis = generator_basis(n).unwrap();
            let sum = casimir_contraction(&basis);
            let target = identity(n).mapv(|z| z * expected);
            assert!(max_abs_diff(&sum, &target) < 1e-12, "N={n}");
        }
    }

    #[test]
    fn casimir_n7_by_explicit_summation() {
        // 48 generators; closed form (N²−1)/(2N) = 48/14.
        let basis = generator_basis(7).unwrap();
        assert_eq!(basis.len(), 48);
        let sum = casimir_contraction(&basis);
        let target = identity(7).mapv(|z| z * (48.0 / 14.0));
        assert!(max_abs_diff(&sum, &target) < 1e-12);
    }

    #[test]
    fn twirl_of_identity_matches_casimir() {
        let basis = generator_basis(2).unwrap();
        let out = twirl(&identity(2), &basis).unwrap();
        let target = identity(2).mapv(|z| z * 0.75);
        assert!(max_abs_diff(&out, &target) < 1e-12);
    }

    #[test]
    fn twirl_of_qubit_projector() {
        let basis = generator_basis(2).unwrap();
        let mut p = zeros(2);
        p[[0, 0]] = c64(1.0, 0.0);
        let out = twirl(&p, &basis).unwrap();
        // 1/2 - P/4 = diag(1/4, 1/2).
        assert!((out[[0, 0]].re - 0.25).abs() < 1e-14);
        assert!((out[[1, 1]].re - 0.5).abs() < 1e-14);
        assert!(out[[0, 1]].norm() < 1e-14);
    }

    /// Explicit sum equals closed form on random Hermitian inputs,
    /// 100 matrices per dimension.
    #[test]
    fn twirl_matches_closed_form_randomly() {
        for n in 2..=6usize {
            let basis = generator_basis(n).unwrap();
            for rep in 0..100u64 {
                let x = random_hermitian(n, 1000 * n as u64 + rep);
                let sum = twirl(&x, &basis).unwrap();
                let closed = closed_form_twirl(&x, n);
                assert!(
                    max_abs_diff(&sum, &closed) <= 1e-11,
                    "N={n} rep={rep}"
                );
            }
        }
    }

    #[test]
    fn twirl_rejects_dimension_mismatch() {
        let basis = generator_basis(3).unwrap();
        assert!(matches!(
            twirl(&identity(2), &basis),
            Err(Error::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn bloch_of_maximally_mixed_is_zero() {
        let basis = generator_basis(4).unwrap();
        let b = bloch_decompose(&maximally_mixed(4), &basis).unwrap();
        assert!(b.norm_sqr() < 1e-24);
    }

    #[test]
    fn bloch_of_qubit_ground_state() {
        let basis = generator_basis(2).unwrap();
        let mut rho = zeros(2);
        rho[[0, 0]] = c64(1.0, 0.0);
        let b = bloch_decompose(&rho, &basis).unwrap();
        assert!((b.components()[0]).abs() < 1e-14);
        assert!((b.components()[1]).abs() < 1e-14);
        assert!((b.components()[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bloch_rejects_non_unit_trace() {
        let basis = generator_basis(2).unwrap();
        let rho = identity(2);
        assert!(matches!(
            bloch_decompose(&rho, &basis),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn pure_state_bloch_norm_saturates_bound() {
        // Σ b² = 2(N−1)/N for pure states; N=3 gives 4/3.
        let basis = generator_basis(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut v: Vec<Complex64> = (0..3)
            .map(|_| c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        let rho = linalg::outer(&v, &v);
        let b = bloch_decompose(&rho, &basis).unwrap();
        assert!((b.norm_sqr() - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn compose_of_zero_vector_is_mixed() {
        let basis = generator_basis(3).unwrap();
        let b = BlochVector::new(3, vec![0.0; 8]).unwrap();
        let rho = bloch_compose(&b, &basis).unwrap();
        assert!(max_abs_diff(&rho, &maximally_mixed(3)) < 1e-15);
    }

    #[test]
    fn compose_of_z_vector_is_ground_state() {
        let basis = generator_basis(2).unwrap();
        let b = BlochVector::new(2, vec![0.0, 0.0, 1.0]).unwrap();
        let rho = bloch_compose(&b, &basis).unwrap();
        assert!((rho[[0, 0]].re - 1.0).abs() < 1e-14);
        assert!(rho[[1, 1]].norm() < 1e-14);
    }

    #[test]
    fn compose_rejects_length_mismatch() {
        assert!(matches!(
            BlochVector::new(3, vec![0.0; 3]),
            Err(Error::LengthMismatch { expected: 8, got: 3 })
        ));
    }

    /// The anti-parallel pure-state Bloch point is unphysical for N ≥ 3:
    /// composing b = −2R yields eigenvalue 2/N − 1 = −1/3 at N = 3.
    #[test]
    fn antiparallel_bloch_point_is_nonpositive() {
        let n = 3;
        let basis = generator_basis(n).unwrap();
        let mut rho = zeros(n);
        rho[[0, 0]] = c64(1.0, 0.0); // pure reference state
        let r = bloch_decompose(&rho, &basis).unwrap().scaled(0.5); // R_ν = b_ν/2
        let anti = r.scaled(-2.0);
        let m = bloch_compose(&anti, &basis).unwrap();
        let vals = hermitian_eigenvalues(&m, 1e-12).unwrap();
        assert!((vals[0] + 1.0 / 3.0).abs() < 1e-12);
        assert!((trace(&m).re - 1.0).abs() < 1e-12);
    }

    /// Round trips decompose∘compose and compose∘decompose.
    #[test]
    fn bloch_round_trips() {
        for n in 2..=5usize {
            let basis = generator_basis(n).unwrap();
            for rep in 0..20u64 {
                let rho = random_density(n, 300 * n as u64 + rep);
                let b = bloch_decompose(&rho, &basis).unwrap();
                let back = bloch_compose(&b, &basis).unwrap();
                assert!(max_abs_diff(&back, &rho) <= 1e-12);

                let b2 = bloch_decompose(&back, &basis).unwrap();
                for (u, v) in b.components().iter().zip(b2.components()) {
                    assert!((u - v).abs() <= 1e-12);
                }
            }
        }
    }

    /// Coefficient-vector round trip holds for arbitrary (even
    /// unphysical) Bloch vectors, since compose always yields a
    /// unit-trace Hermitian matrix.
    #[test]
    fn coefficient_round_trip_without_positivity() {
        let basis = generator_basis(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let b = BlochVector::new(3, (0..8).map(|_| 6.0 * (rng.random::<f64>() - 0.5)).collect())
                .unwrap();
            let m = bloch_compose(&b, &basis).unwrap();
            assert!((trace(&m).re - 1.0).abs() < 1e-12);
            let back = bloch_decompose(&m, &basis).unwrap();
            for (x, y) in b.components().iter().zip(back.components()) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    /// Purity identity Tr(ρ²) = 1/N + (1/2)Σ b².
    #[test]
    fn purity_identity_on_random_states() {
        for n in 2..=6usize {
            let basis = generator_basis(n).unwrap();
            for rep in 0..50u64 {
                let rho = random_density(n, 700 * n as u64 + rep);
                let b = bloch_decompose(&rho, &basis).unwrap();
                let lhs = purity(&rho);
                let rhs = 1.0 / n as f64 + 0.5 * b.norm_sqr();
                assert!((lhs - rhs).abs() <= 1e-12, "N={n} rep={rep}");
                // Bloch ball bound.
                assert!(b.norm_sqr() <= 2.0 * (n as f64 - 1.0) / n as f64 + 1e-12);
            }
        }
    }

    #[test]
    fn n5_basis_has_24_generators() {
        let basis = generator_basis(5).unwrap();
        assert_eq!(basis.len(), 24);
        let sum = casimir_contraction(&basis);
        let target = identity(5).mapv(|z| z * (24.0 / 10.0));
        assert!(max_abs_diff(&sum, &target) < 1e-12);
    }
}
