//! Dense complex matrix helpers shared by every module.
//!
//! Matrices are `ndarray::Array2<Complex64>` throughout; everything here is
//! plain double-precision dense algebra. The one nontrivial piece is
//! [`hermitian_eigen`], a cyclic Jacobi eigensolver for Hermitian matrices.
//! Jacobi rotations converge quadratically and deliver eigenvalues accurate
//! to a few ulps of the matrix scale, which is what the phase-space oracles
//! and the trace-distance checks need.

use ndarray::Array2;
use num_complex::Complex64;

use crate::{Error, Result};

/// Dense complex matrix.
pub type CMat = Array2<Complex64>;

/// Complex scalar shorthand.
pub const fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// N-by-N identity.
pub fn identity(dim: usize) -> CMat {
    Array2::from_diag_elem(dim, c64(1.0, 0.0))
}

/// N-by-N zero matrix.
pub fn zeros(dim: usize) -> CMat {
    Array2::zeros((dim, dim))
}

/// Conjugate transpose.
pub fn dagger(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

/// Trace.
pub fn trace(a: &CMat) -> Complex64 {
    a.diag().sum()
}

/// Frobenius norm.
pub fn frobenius_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Deviation from Hermiticity: max |a_ij - conj(a_ji)|.
pub fn hermiticity_deviation(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    worst
}

/// Returns `Ok(())` when `a` is Hermitian within `tol`.
pub fn require_hermitian(a: &CMat, tol: f64) -> Result<()> {
    let dev = hermiticity_deviation(a);
    if dev <= tol {
        Ok(())
    } else {
        Err(Error::NonHermitian(dev))
    }
}

/// Deviation from unitarity: ||U U† - 1||_F.
pub fn unitarity_deviation(u: &CMat) -> f64 {
    let n = u.nrows();
    frobenius_norm(&(u.dot(&dagger(u)) - identity(n)))
}

/// Returns `Ok(())` when `u` is unitary within `tol`.
pub fn require_unitary(u: &CMat, tol: f64) -> Result<()> {
    let dev = unitarity_deviation(u);
    if dev <= tol {
        Ok(())
    } else {
        Err(Error::NonUnitary(dev))
    }
}

/// (M + M†)/2. Used as a hygiene step after floating-point channel
/// applications so roundoff never accumulates into the skew part.
pub fn hermitize(a: &CMat) -> CMat {
    let ad = dagger(a);
    (a + &ad).mapv(|z| z * 0.5)
}

/// Kronecker product.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Outer product |v⟩⟨w|.
pub fn outer(v: &[Complex64], w: &[Complex64]) -> CMat {
    let mut out = Array2::zeros((v.len(), w.len()));
    for (i, vi) in v.iter().enumerate() {
        for (j, wj) in w.iter().enumerate() {
            out[[i, j]] = vi * wj.conj();
        }
    }
    out
}

/// ⟨v| A |v⟩ for a square matrix and a vector of matching length.
pub fn expectation(a: &CMat, v: &[Complex64]) -> Complex64 {
    let n = v.len();
    let mut acc = c64(0.0, 0.0);
    for i in 0..n {
        let mut row = c64(0.0, 0.0);
        for j in 0..n {
            row += a[[i, j]] * v[j];
        }
        acc += v[i].conj() * row;
    }
    acc
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are returned in ascending order; column `k` of the returned
/// matrix is the eigenvector for `values[k]`. Cyclic Jacobi with complex
/// plane rotations; panics are impossible, non-Hermitian input is reported
/// as an error.
pub fn hermitian_eigen(a: &CMat, tol: f64) -> Result<(Vec<f64>, CMat)> {
    require_hermitian(a, tol)?;
    Ok(jacobi(a, true))
}

/// Eigenvalues only (ascending) of a Hermitian matrix.
pub fn hermitian_eigenvalues(a: &CMat, tol: f64) -> Result<Vec<f64>> {
    require_hermitian(a, tol)?;
    Ok(jacobi(a, false).0)
}

/// Spectral norm (largest |eigenvalue|) of a Hermitian matrix.
pub fn hermitian_spectral_norm(a: &CMat, tol: f64) -> Result<f64> {
    let vals = hermitian_eigenvalues(a, tol)?;
    Ok(vals.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// Applies `f` to the spectrum: Q f(Λ) Q†.
pub fn hermitian_function(a: &CMat, tol: f64, f: impl Fn(f64) -> Complex64) -> Result<CMat> {
    let (vals, vecs) = hermitian_eigen(a, tol)?;
    let n = vals.len();
    let mut core = zeros(n);
    for (k, &v) in vals.iter().enumerate() {
        core[[k, k]] = f(v);
    }
    Ok(vecs.dot(&core).dot(&dagger(&vecs)))
}

/// Trace distance (1/2)Σ|λ_i(a - b)| between Hermitian matrices.
pub fn trace_distance(a: &CMat, b: &CMat, tol: f64) -> Result<f64> {
    let vals = hermitian_eigenvalues(&(a - b), tol)?;
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

const JACOBI_MAX_SWEEPS: usize = 60;

/// Off-diagonal Frobenius norm squared.
fn off_norm_sqr(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            acc += a[[p, q]].norm_sqr();
        }
    }
    2.0 * acc
}

/// Cyclic Jacobi on a Hermitian matrix. The input is treated as exactly
/// Hermitian: only the upper triangle and real diagonal parts are read.
fn jacobi(input: &CMat, want_vectors: bool) -> (Vec<f64>, CMat) {
    let n = input.nrows();
    let mut a = hermitize(input);
    let mut v = identity(if want_vectors { n } else { 1 });

    let scale = frobenius_norm(&a).max(f64::MIN_POSITIVE);
    let stop = (f64::EPSILON * scale).powi(2);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_norm_sqr(&a) <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                let r = apq.norm();
                if r <= f64::EPSILON * scale * 1e-3 {
                    continue;
                }
                // Factor out the phase so the 2x2 block becomes real
                // symmetric, then apply the classical rotation.
                let phase = apq / r;
                let app = a[[p, p]].re;
                let aqq = a[[q, q]].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Column rotation J: J[p][p]=c, J[p][q]=s,
                // J[q][p]=-s·conj(phase), J[q][q]=c·conj(phase).
                let jpp = c64(c, 0.0);
                let jpq = c64(s, 0.0);
                let jqp = -s * phase.conj();
                let jqq = c * phase.conj();

                // A <- J† A J: columns first, then rows.
                for i in 0..n {
                    let aip = a[[i, p]];
                    let aiq = a[[i, q]];
                    a[[i, p]] = aip * jpp + aiq * jqp;
                    a[[i, q]] = aip * jpq + aiq * jqq;
                }
                for j in 0..n {
                    let apj = a[[p, j]];
                    let aqj = a[[q, j]];
                    a[[p, j]] = jpp.conj() * apj + jqp.conj() * aqj;
                    a[[q, j]] = jpq.conj() * apj + jqq.conj() * aqj;
                }
                a[[p, q]] = c64(0.0, 0.0);
                a[[q, p]] = c64(0.0, 0.0);
                a[[p, p]] = c64(a[[p, p]].re, 0.0);
                a[[q, q]] = c64(a[[q, q]].re, 0.0);

                if want_vectors {
                    for i in 0..n {
                        let vip = v[[i, p]];
                        let viq = v[[i, q]];
                        v[[i, p]] = vip * jpp + viq * jqp;
                        v[[i, q]] = vip * jpq + viq * jqq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[[i, i]].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = if want_vectors {
        let mut sorted = zeros(n);
        for (new, &old) in order.iter().enumerate() {
            for i in 0..n {
                sorted[[i, new]] = v[[i, old]];
            }
        }
        sorted
    } else {
        v
    };
    (values, vectors)
}
