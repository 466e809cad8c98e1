//! Stratonovich-Weyl phase space: kernels, quasi-probability functions,
//! negativity minima, and the single-shot classification.
//!
//! The s-parameterized kernel at a phase-space point Ω is
//!
//! ```text
//! Δ^s(Ω) = 1/N + 4 r_s Σ_ν R_ν T_ν,    r_s = (1/2)√((N+1)^{1+s}),
//! ```
//!
//! with R_ν = ⟨Ω|T_ν|Ω⟩. Because Σ_ν R_ν T_ν = (|Ω⟩⟨Ω| − 1/N)/2, the same
//! kernel is Δ^s = (1−2r_s)/N + 2r_s|Ω⟩⟨Ω|; both routes are implemented
//! and cross-checked. W_A^s(Ω) = Tr[A Δ^s(Ω)] contracts toward 1/N under
//! measurement rounds exactly like the state does, which turns the
//! negativity analysis into scalar arithmetic: closed-form minima, the
//! critical round count, and the (s, N) region where a single round
//! removes all negativity.
//!
//! Two distinct minima are tracked and never conflated: the anti-parallel
//! Bloch bound [`w0_min_paper`] (attained by a physical state only for
//! N = 2) and the physical minimum [`w_min_physical`] (the smallest kernel
//! eigenvalue). [`minima_gap`] reports the difference.

use std::f64::consts::PI;
use std::io::Write as IoWrite;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::DensityMatrix;
use crate::coherent::{coherent_state, CoherentState, OmegaAngles};
use crate::linalg::{self, CMat};
use crate::sun_algebra::GeneratorBasis;
use crate::tol::{self, guarded_ceil};
use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Dimension and s parameter of a phase-space representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SWParams {
    dim: usize,
    s: f64,
}

impl SWParams {
    pub fn new(dim: usize, s: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let params = Self { dim, s };
        if !params.radius().is_finite() || params.radius() <= 0.0 {
            return Err(Error::InvalidArgument(format!("s = {s} gives unusable radius")));
        }
        Ok(params)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// r_s = (1/2)√((N+1)^{1+s}).
    pub fn radius(&self) -> f64 {
        0.5 * (self.dim as f64 + 1.0).powf(1.0 + self.s).sqrt()
    }

    /// Same representation with s negated (the dual kernel's parameter).
    pub fn dual(&self) -> Self {
        Self {
            dim: self.dim,
            s: -self.s,
        }
    }
}

/// Kernel matrix at one phase-space point.
#[derive(Debug, Clone)]
pub struct SWKernel {
    params: SWParams,
    omega: OmegaAngles,
    matrix: CMat,
}

impl SWKernel {
    /// Kernel at a phase-space point via the projector identity; the
    /// generator-sum route is [`sw_kernel`].
    pub fn at_point(omega: &OmegaAngles, params: &SWParams) -> Self {
        Self {
            params: *params,
            omega: omega.clone(),
            matrix: sw_kernel_matrix(&coherent_state(omega), params),
        }
    }

    pub fn params(&self) -> &SWParams {
        &self.params
    }

    pub fn omega(&self) -> &OmegaAngles {
        &self.omega
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }
}

/// Builds Δ^s(Ω) = 1/N + 4 r_s Σ_ν R_ν T_ν by explicit generator
/// summation.
pub fn sw_kernel(omega: &OmegaAngles, params: &SWParams, basis: &GeneratorBasis) -> Result<SWKernel> {
    let n = params.dim();
    if omega.dim() != n || basis.dim() != n {
        return Err(Error::DimensionMismatch(omega.dim(), n));
    }
    let state = coherent_state(omega);
    let r = crate::coherent::bloch_vector_of_state(&state, basis)?;
    let mut matrix: CMat = linalg::identity(n).mapv(|z| z / n as f64);
    let factor = 4.0 * params.radius();
    for (coeff, t) in r.components().iter().zip(basis.iter()) {
        matrix = matrix + t.mapv(|z| z * (factor * coeff));
    }
    Ok(SWKernel {
        params: *params,
        omega: omega.clone(),
        matrix,
    })
}

/// Kernel via the projector identity Δ^s = (1−2r_s)/N + 2r_s|Ω⟩⟨Ω|;
/// avoids building a generator basis.
pub fn sw_kernel_matrix(state: &CoherentState, params: &SWParams) -> CMat {
    let n = params.dim();
    let r = params.radius();
    let mut out = state.projector().mapv(|z| z * (2.0 * r));
    let offset = (1.0 - 2.0 * r) / n as f64;
    for i in 0..n {
        out[[i, i]] += linalg::c64(offset, 0.0);
    }
    out
}

/// W_A^s(Ω) = Tr[A Δ^s(Ω)] for a Hermitian operator A.
pub fn quasiprob(a: &CMat, omega: &OmegaAngles, params: &SWParams) -> Result<f64> {
    let n = params.dim();
    if a.nrows() != n || omega.dim() != n {
        return Err(Error::DimensionMismatch(a.nrows(), n));
    }
    linalg::require_hermitian(a, tol::STATE)?;
    let state = coherent_state(omega);
    let r = params.radius();
    let overlap = linalg::expectation(a, state.amplitudes()).re;
    let tr = linalg::trace(a).re;
    Ok((1.0 - 2.0 * r) * tr / n as f64 + 2.0 * r * overlap)
}

/// How far to evolve a quasi-probability value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evolution {
    /// n POVM rounds: contraction (1+N)^{−n}.
    Rounds(u32),
    /// Continuous time under rate gamma: contraction e^{−Nγt/2}.
    Time { gamma: f64, t: f64 },
}

/// Contraction factor Γ for the given evolution.
pub fn contraction_factor(dim: usize, evolution: Evolution) -> f64 {
    match evolution {
        Evolution::Rounds(n) => (dim as f64 + 1.0).powi(-(n as i32)),
        Evolution::Time { gamma, t } => (-(dim as f64) * gamma * t / 2.0).exp(),
    }
}

/// Pointwise evolution of a quasi-probability value:
/// W ↦ 1/N + Γ(W − 1/N).
pub fn w_evolution(w0: f64, params: &SWParams, evolution: Evolution) -> f64 {
    let n = params.dim() as f64;
    1.0 / n + contraction_factor(params.dim(), evolution) * (w0 - 1.0 / n)
}

/// Anti-parallel Bloch-vector minimum of the initial quasi-probability:
/// 1/N − ((N−1)/N)(N+1)^{(1+s)/2}. For N ≥ 3 the minimizing Bloch point
/// is not a physical state; see [`w_min_physical`].
pub fn w0_min_paper(params: &SWParams) -> f64 {
    let n = params.dim() as f64;
    1.0 / n - ((n - 1.0) / n) * (n + 1.0).powf((1.0 + params.s()) / 2.0)
}

/// Minimum of W over physical states: the smallest eigenvalue of Δ^s,
/// computed numerically from the kernel at the reference point. Equals
/// (1 − (N+1)^{(1+s)/2})/N.
pub fn w_min_physical(params: &SWParams) -> Result<f64> {
    let omega = OmegaAngles::zero(params.dim())?;
    let kernel = sw_kernel_matrix(&coherent_state(&omega), params);
    let eigs = linalg::hermitian_eigenvalues(&kernel, tol::STRUCTURAL)?;
    Ok(eigs[0])
}

/// Gap between the anti-parallel bound and the physical minimum.
#[derive(Debug, Clone, Copy)]
pub struct MinimaGap {
    pub dim: usize,
    pub s: f64,
    pub w0_min_paper: f64,
    pub w_min_physical: f64,
    /// w_min_physical − w0_min_paper; zero at N = 2, positive for N ≥ 3.
    pub gap: f64,
}

/// Reports both minima and their difference.
pub fn minima_gap(params: &SWParams) -> Result<MinimaGap> {
    let paper = w0_min_paper(params);
    let physical = w_min_physical(params)?;
    Ok(MinimaGap {
        dim: params.dim(),
        s: params.s(),
        w0_min_paper: paper,
        w_min_physical: physical,
        gap: physical - paper,
    })
}

/// Smallest s for which the anti-parallel minimum is negative:
/// s_min(N) = −1 − 2 ln(N−1)/ln(N+1).
pub fn s_min(n: usize) -> f64 {
    -1.0 - 2.0 * ((n as f64) - 1.0).ln() / ((n as f64) + 1.0).ln()
}

/// Largest s for which one POVM round removes the negativity:
/// s_max(N) = 1 − 2 ln(N−1)/ln(N+1).
pub fn s_max(n: usize) -> f64 {
    1.0 - 2.0 * ((n as f64) - 1.0).ln() / ((n as f64) + 1.0).ln()
}

/// Critical round count n_c = max{1, ⌈(1+s)/2 + ln(N−1)/ln(N+1)⌉} with an
/// epsilon guard on the ceiling.
pub fn n_critical(params: &SWParams) -> u32 {
    let n = params.dim() as f64;
    let x = (1.0 + params.s()) / 2.0 + (n - 1.0).ln() / (n + 1.0).ln();
    guarded_ceil(x).max(1.0) as u32
}

/// Smallest n ≥ 1 with w_evolution(w0_min_paper, n) ≥ −1e−12, found by
/// direct evaluation. Independent check of [`n_critical`].
pub fn n_critical_brute_force(params: &SWParams, max_rounds: u32) -> Option<u32> {
    let w0 = w0_min_paper(params);
    (1..=max_rounds).find(|&n| w_evolution(w0, params, Evolution::Rounds(n)) >= -1e-12)
}

/// Closed-form classification of one (N, s) cell plus the numerically
/// evolved minimum it must agree with.
#[derive(Debug, Clone, Copy)]
pub struct SingleShotClass {
    pub dim: usize,
    pub s: f64,
    pub s_min: f64,
    pub s_max: f64,
    /// s > s_min(N): the anti-parallel minimum is negative.
    pub negativity_exists_paper: bool,
    /// s_min(N) < s ≤ s_max(N): one round removes the negativity.
    pub single_shot_paper: bool,
    pub n_critical: u32,
    /// Anti-parallel minimum before any round.
    pub w0_min: f64,
    /// The same minimum after one round.
    pub w1_min: f64,
}

/// Classifies (N, s) for the single-shot transition.
pub fn classify_single_shot(n: usize, s: f64) -> Result<SingleShotClass> {
    let params = SWParams::new(n, s)?;
    let lo = s_min(n);
    let hi = s_max(n);
    let w0 = w0_min_paper(&params);
    let w1 = w_evolution(w0, &params, Evolution::Rounds(1));
    Ok(SingleShotClass {
        dim: n,
        s,
        s_min: lo,
        s_max: hi,
        negativity_exists_paper: s > lo,
        single_shot_paper: s > lo && s <= hi,
        n_critical: n_critical(&params),
        w0_min: w0,
        w1_min: w1,
    })
}

/// Classification table over an N range and a list of s values, row-major
/// over N then s.
pub fn transition_table(
    dims: impl IntoIterator<Item = usize>,
    s_values: &[f64],
) -> Result<Vec<SingleShotClass>> {
    let mut rows = Vec::new();
    for n in dims {
        for &s in s_values {
            rows.push(classify_single_shot(n, s)?);
        }
    }
    Ok(rows)
}

/// Writes a classification table as CSV with columns
/// `N,s,s_min,s_max,n_c,single_shot`.
pub fn write_transition_csv(
    out: &mut dyn IoWrite,
    rows: &[SingleShotClass],
    comments: &[String],
) -> Result<()> {
    for line in comments {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "N,s,s_min,s_max,n_c,single_shot")?;
    for row in rows {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{},{}",
            row.dim, row.s, row.s_min, row.s_max, row.n_critical, row.single_shot_paper
        )?;
    }
    Ok(())
}

/// One of the 2N−2 angle coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleCoord {
    /// θ_{index+1}, range [0, π].
    Theta(usize),
    /// φ_{index+1}, range [0, 2π).
    Phi(usize),
}

impl AngleCoord {
    fn label(&self) -> String {
        match self {
            AngleCoord::Theta(i) => format!("theta_{}", i + 1),
            AngleCoord::Phi(i) => format!("phi_{}", i + 1),
        }
    }

    fn index(&self) -> usize {
        match self {
            AngleCoord::Theta(i) | AngleCoord::Phi(i) => *i,
        }
    }

    /// Grid values for this coordinate: θ includes both endpoints, φ is
    /// periodic so the endpoint is excluded.
    fn grid(&self, resolution: usize) -> Vec<f64> {
        match self {
            AngleCoord::Theta(_) => (0..resolution)
                .map(|i| PI * i as f64 / (resolution - 1) as f64)
                .collect(),
            AngleCoord::Phi(_) => (0..resolution)
                .map(|i| TWO_PI * i as f64 / resolution as f64)
                .collect(),
        }
    }
}

/// A 2D slice of the (2N−2)-dimensional phase space: two coordinates
/// vary, the rest are pinned to the base point.
#[derive(Debug, Clone)]
pub struct SliceSpec {
    vary_a: AngleCoord,
    vary_b: AngleCoord,
    base: OmegaAngles,
}

impl SliceSpec {
    pub fn new(vary_a: AngleCoord, vary_b: AngleCoord, base: OmegaAngles) -> Result<Self> {
        let n = base.dim();
        if vary_a == vary_b {
            return Err(Error::InvalidSlice("varied coordinates must differ".into()));
        }
        for coord in [vary_a, vary_b] {
            if coord.index() >= n - 1 {
                return Err(Error::InvalidSlice(format!(
                    "{} out of range for dimension {n}",
                    coord.label()
                )));
            }
        }
        Ok(Self {
            vary_a,
            vary_b,
            base,
        })
    }

    /// Default slice: vary (θ_1, φ_1) with every other θ fixed at π/2 and
    /// every other φ at 0. For N = 2 this is the full phase space.
    pub fn default_for(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        let theta = vec![PI / 2.0; n - 1];
        let phi = vec![0.0; n - 1];
        Self::new(
            AngleCoord::Theta(0),
            AngleCoord::Phi(0),
            OmegaAngles::new(theta, phi)?,
        )
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn vary_a(&self) -> AngleCoord {
        self.vary_a
    }

    pub fn vary_b(&self) -> AngleCoord {
        self.vary_b
    }

    /// The angle point with the varied coordinates set to (a, b).
    pub fn point(&self, a: f64, b: f64) -> OmegaAngles {
        let mut theta = self.base.theta().to_vec();
        let mut phi = self.base.phi().to_vec();
        for (coord, value) in [(self.vary_a, a), (self.vary_b, b)] {
            match coord {
                AngleCoord::Theta(i) => theta[i] = value,
                AngleCoord::Phi(i) => phi[i] = value,
            }
        }
        OmegaAngles::new(theta, phi).expect("slice point stays in range")
    }

    fn metadata_lines(&self) -> Vec<String> {
        vec![
            format!(
                "slice: vary {} (rows) and {} (cols)",
                self.vary_a.label(),
                self.vary_b.label()
            ),
            format!(
                "fixed: theta = [{}], phi = [{}]",
                join_f64(self.base.theta()),
                join_f64(self.base.phi())
            ),
        ]
    }
}

fn join_f64(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.16e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// W sampled over a 2D slice of phase space.
#[derive(Debug, Clone)]
pub struct PhaseSpaceGrid {
    params: SWParams,
    slice: SliceSpec,
    a_values: Vec<f64>,
    b_values: Vec<f64>,
    values: Array2<f64>,
}

impl PhaseSpaceGrid {
    pub fn params(&self) -> &SWParams {
        &self.params
    }

    pub fn slice(&self) -> &SliceSpec {
        &self.slice
    }

    /// Row coordinate values (the first varied coordinate).
    pub fn a_values(&self) -> &[f64] {
        &self.a_values
    }

    /// Column coordinate values (the second varied coordinate).
    pub fn b_values(&self) -> &[f64] {
        &self.b_values
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// Smallest grid value and its coordinates.
    pub fn min(&self) -> (f64, f64, f64) {
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for ((i, j), &w) in self.values.indexed_iter() {
            if w < best.0 {
                best = (w, self.a_values[i], self.b_values[j]);
            }
        }
        best
    }

    /// CSV export: `#` metadata comments, a `theta,phi,W` header, then
    /// one row per grid point (row-major).
    pub fn to_csv(&self, out: &mut dyn IoWrite, extra_comments: &[String]) -> Result<()> {
        for line in extra_comments {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "# dim = {}", self.params.dim())?;
        writeln!(out, "# s = {:.16e}", self.params.s())?;
        for line in self.slice.metadata_lines() {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "# resolution = {}", self.a_values.len())?;
        writeln!(out, "theta,phi,W")?;
        for ((i, j), w) in self.values.indexed_iter() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e}",
                self.a_values[i], self.b_values[j], w
            )?;
        }
        Ok(())
    }

    /// JSON export: `{"params": …, "slice": …, "values": row-major}`.
    pub fn to_json(&self) -> GridJson {
        GridJson {
            params: self.params,
            slice: SliceJson {
                vary_a: self.slice.vary_a.label(),
                vary_b: self.slice.vary_b.label(),
                fixed_theta: self.slice.base.theta().to_vec(),
                fixed_phi: self.slice.base.phi().to_vec(),
                resolution: self.a_values.len(),
            },
            values: self.values.iter().copied().collect(),
        }
    }
}

/// Serialized grid layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridJson {
    pub params: SWParams,
    pub slice: SliceJson,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SliceJson {
    pub vary_a: String,
    pub vary_b: String,
    pub fixed_theta: Vec<f64>,
    pub fixed_phi: Vec<f64>,
    pub resolution: usize,
}

/// Evaluates W_ρ^s on a regular grid over the slice. Rows are evaluated
/// in parallel; every point is a pure function of its coordinates.
pub fn grid_w(
    rho: &DensityMatrix,
    params: &SWParams,
    slice: &SliceSpec,
    resolution: usize,
) -> Result<PhaseSpaceGrid> {
    if resolution < 8 {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution} below minimum 8"
        )));
    }
    if rho.dim() != params.dim() || slice.dim() != params.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), params.dim()));
    }
    let a_values = slice.vary_a.grid(resolution);
    let b_values = slice.vary_b.grid(resolution);
    let n = params.dim() as f64;
    let r = params.radius();
    let offset = (1.0 - 2.0 * r) / n;

    let rows: Vec<Vec<f64>> = a_values
        .par_iter()
        .map(|&a| {
            b_values
                .iter()
                .map(|&b| {
                    let omega = slice.point(a, b);
                    let state = coherent_state(&omega);
                    let overlap = linalg::expectation(rho.matrix(), state.amplitudes()).re;
                    offset + 2.0 * r * overlap
                })
                .collect()
        })
        .collect();

    let mut values = Array2::zeros((resolution, resolution));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, w) in row.into_iter().enumerate() {
            values[[i, j]] = w;
        }
    }
    Ok(PhaseSpaceGrid {
        params: *params,
        slice: slice.clone(),
        a_values,
        b_values,
        values,
    })
}

/// Global minimum of W_ρ^s over the full phase space, found by a coarse
/// multi-start scan over all 2N−2 angles followed by pattern-search
/// refinement. Returns the minimum and its location.
///
/// Matches the closed form (1−2r_s)/N + 2r_s·λ_min(ρ) within 1e−8; tests
/// hold it to that, this function never consults an eigensolver.
pub fn min_w_over_phase_space(
    rho: &DensityMatrix,
    params: &SWParams,
) -> Result<(f64, OmegaAngles)> {
    if rho.dim() != params.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), params.dim()));
    }
    let n = params.dim();
    let coords = 2 * (n - 1);
    // The search runs on the torus: θ is allowed to wind freely, since
    // (θ, φ) and (2π−θ, φ+π) give the same state up to global phase.
    // Clamping θ at the chart boundary instead would create walls that
    // trap descent paths.
    let overlap = |angles: &[f64]| -> f64 {
        let omega = fold_into_chart(n, angles);
        let state = coherent_state(&omega);
        linalg::expectation(rho.matrix(), state.amplitudes()).re
    };

    // Coarse scan with a per-dimension resolution that keeps the total
    // point count moderate; the restart stage below does the heavy
    // lifting for basin discovery.
    let budget = 6_000f64;
    let res = (budget.powf(1.0 / coords as f64).floor() as usize).clamp(3, 16);
    let total: usize = res.pow(coords as u32);
    let mut starts: Vec<(f64, Vec<f64>)> = Vec::new();
    for flat in 0..total {
        let mut digits = flat;
        let mut point = Vec::with_capacity(coords);
        for c in 0..coords {
            let d = digits % res;
            digits /= res;
            point.push(coord_value(c, n, d, res));
        }
        let f = overlap(&point);
        starts.push((f, point));
        starts.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        starts.truncate(3);
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    for (_, start) in starts {
        let (f, point) = refine_minimum(&overlap, start);
        if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
            best = Some((f, point));
        }
    }

    // Seeded random restarts until the best value stops moving: a single
    // descent can stall on a saddle, but basins of attraction for the
    // global minimum are plentiful.
    use rand::Rng;
    let mut stable = 0usize;
    let mut restart = 0u64;
    while stable < 6 && restart < 60 {
        let mut rng = crate::coherent::sample_rng(0x00dd_ba11, restart);
        let start: Vec<f64> = (0..coords)
            .map(|_| rng.random::<f64>() * TWO_PI)
            .collect();
        let (f, point) = refine_minimum(&overlap, start);
        if best.as_ref().is_none_or(|(bf, _)| f < *bf - 1e-12) {
            best = Some((f, point));
            stable = 0;
        } else {
            stable += 1;
        }
        restart += 1;
    }

    // One simplex polish on the winner squeezes out the last digits that
    // coordinate moves reach only slowly along curved valleys.
    let (mut f_min, mut point) = best.expect("at least one start");
    nelder_mead(&overlap, &mut point, &mut f_min);
    let r = params.radius();
    let w = (1.0 - 2.0 * r) / n as f64 + 2.0 * r * f_min;
    Ok((w, fold_into_chart(n, &point)))
}

/// Closed-form minimum (1−2r_s)/N + 2r_s·λ_min(ρ); the eigenvalue-route
/// oracle for [`min_w_over_phase_space`].
pub fn min_w_closed_form(rho: &DensityMatrix, params: &SWParams) -> Result<f64> {
    if rho.dim() != params.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), params.dim()));
    }
    let eigs = linalg::hermitian_eigenvalues(rho.matrix(), tol::STATE)?;
    let r = params.radius();
    Ok((1.0 - 2.0 * r) / params.dim() as f64 + 2.0 * r * eigs[0])
}

/// Folds free-winding search coordinates [θ_1..θ_{N−1}, φ_1..φ_{N−1}]
/// back into the canonical chart: θ ↦ 2π−θ with φ ↦ φ+π on the same
/// level whenever θ mod 2π lands above π. The folded point describes the
/// same state up to global phase.
fn fold_into_chart(n: usize, flat: &[f64]) -> OmegaAngles {
    let mut theta = Vec::with_capacity(n - 1);
    let mut phi = Vec::with_capacity(n - 1);
    for j in 0..(n - 1) {
        let mut t = flat[j].rem_euclid(TWO_PI);
        let mut p = flat[n - 1 + j];
        if t > PI {
            t = TWO_PI - t;
            p += PI;
        }
        theta.push(t);
        phi.push(p.rem_euclid(TWO_PI));
    }
    OmegaAngles::new(theta, phi).expect("folded coordinates are in range")
}

/// Coarse-grid value of coordinate `coord` at digit `d` of `res`. θ points
/// sit at cell centers (interior of [0, π]); φ points start at 0.
fn coord_value(coord: usize, n: usize, d: usize, res: usize) -> f64 {
    if coord < n - 1 {
        PI * (d as f64 + 0.5) / res as f64
    } else {
        TWO_PI * d as f64 / res as f64
    }
}

/// Wraps a search coordinate onto the torus.
fn wrap_coord(value: f64) -> f64 {
    value.rem_euclid(TWO_PI)
}

/// Signed wrapped difference a − b on the torus, in (−π, π].
fn wrapped_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TWO_PI);
    if d > PI {
        d - TWO_PI
    } else {
        d
    }
}

/// Local refinement by exact cyclic coordinate minimization.
///
/// Every angle coordinate enters exactly one two-level gate, so along any
/// single coordinate the overlap is a pure sinusoid A + B·cos x + C·sin x.
/// Three evaluations determine it exactly, and each coordinate update
/// jumps straight to its global conditional minimizer. Coordinatewise
/// stalls at stationary points are escaped with a few seeded random
/// probes of shrinking width, after which minimization resumes.
fn refine_minimum(f: &dyn Fn(&[f64]) -> f64, start: Vec<f64>) -> (f64, Vec<f64>) {
    use rand::Rng;
    let mut point = start;
    let mut value = f(&point);
    let mut rng = crate::coherent::sample_rng(0x0005_eac4, 0);

    for _ in 0..300 {
        let before_point = point.clone();
        let before_value = value;
        coordinate_cycle(f, &mut point, &mut value);

        // Ravine acceleration: the net displacement of a full cycle points
        // along the valley floor where single-coordinate moves zigzag.
        let displacement: Vec<f64> = point
            .iter()
            .zip(&before_point)
            .map(|(a, b)| wrapped_diff(*a, *b))
            .collect();
        let span = displacement.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        if span > 1e-15 {
            let direction: Vec<f64> = displacement.iter().map(|d| d / span).collect();
            line_minimize(f, &mut point, &mut value, &direction);
        }

        if value > before_value - 1e-16 {
            // Coordinatewise-minimal and no valley progress: either the
            // minimum or a saddle. Jittered probes escape saddles.
            let mut escaped = false;
            'widths: for width in [0.3, 0.05, 0.01] {
                for _ in 0..12 {
                    let mut trial = point.clone();
                    for coord in trial.iter_mut() {
                        let step = (rng.random::<f64>() - 0.5) * 2.0 * width;
                        *coord = wrap_coord(*coord + step);
                    }
                    let tv = f(&trial);
                    if tv < value - 1e-16 {
                        point = trial;
                        value = tv;
                        escaped = true;
                        break 'widths;
                    }
                }
            }
            if !escaped {
                break;
            }
        }
    }
    (value, point)
}

/// Standard Nelder-Mead on the torus, seeded from a small simplex around
/// the supplied point. Updates the point and value when it finds better.
fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, point: &mut Vec<f64>, value: &mut f64) {
    let d = point.len();
    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(d + 1);
    simplex.push((*value, point.clone()));
    for c in 0..d {
        let mut vertex = point.clone();
        vertex[c] += 0.02;
        let fv = f(&vertex);
        simplex.push((fv, vertex));
    }

    for _ in 0..6000 {
        simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if simplex[d].0 - simplex[0].0 < 1e-14 {
            break;
        }
        let centroid: Vec<f64> = (0..d)
            .map(|c| simplex[..d].iter().map(|(_, v)| v[c]).sum::<f64>() / d as f64)
            .collect();
        let worst = simplex[d].clone();
        let mirror = |scale: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.1)
                .map(|(c, w)| c + scale * (c - w))
                .collect()
        };

        let reflected = mirror(1.0);
        let fr = f(&reflected);
        if fr < simplex[0].0 {
            let expanded = mirror(2.0);
            let fe = f(&expanded);
            simplex[d] = if fe < fr { (fe, expanded) } else { (fr, reflected) };
        } else if fr < simplex[d - 1].0 {
            simplex[d] = (fr, reflected);
        } else {
            let contracted = mirror(-0.5);
            let fc = f(&contracted);
            if fc < simplex[d].0 {
                simplex[d] = (fc, contracted);
            } else {
                // Shrink toward the best vertex.
                let best = simplex[0].1.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = entry
                        .1
                        .iter()
                        .zip(&best)
                        .map(|(x, b)| b + 0.5 * (x - b))
                        .collect();
                    *entry = (f(&shrunk), shrunk);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    if simplex[0].0 < *value {
        *value = simplex[0].0;
        *point = simplex[0].1.clone();
    }
}

/// One cycle of exact per-coordinate minimization: along any single angle
/// the overlap is a pure sinusoid, so three evaluations pin its global
/// conditional minimizer on the torus.
fn coordinate_cycle(f: &dyn Fn(&[f64]) -> f64, point: &mut [f64], value: &mut f64) {
    for c in 0..point.len() {
        let eval_at = |x: f64, point: &[f64]| {
            let mut trial = point.to_vec();
            trial[c] = x;
            f(&trial)
        };
        let f0 = eval_at(0.0, point);
        let f1 = eval_at(PI / 2.0, point);
        let f2 = eval_at(PI, point);
        let a = (f0 + f2) / 2.0;
        let b = (f0 - f2) / 2.0;
        let s = f1 - a;
        // Minimum of a + √(b²+s²)·cos(x − atan2(s, b)).
        let x_min = (s.atan2(b) + PI).rem_euclid(TWO_PI);
        let tv = eval_at(x_min, point);
        if tv < *value - 1e-16 {
            point[c] = x_min;
            *value = tv;
        }
    }
}

/// Golden-section minimization of f along `point + t·direction` for
/// t ∈ [−1/2, 1/2]; updates in place and reports whether it improved.
fn line_minimize(
    f: &dyn Fn(&[f64]) -> f64,
    point: &mut Vec<f64>,
    value: &mut f64,
    direction: &[f64],
) -> bool {
    let at = |t: f64| -> Vec<f64> {
        point
            .iter()
            .zip(direction)
            .map(|(x, d)| wrap_coord(x + t * d))
            .collect()
    };
    let golden = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (-0.5f64, 0.5f64);
    let mut t1 = hi - golden * (hi - lo);
    let mut t2 = lo + golden * (hi - lo);
    let mut f1 = f(&at(t1));
    let mut f2 = f(&at(t2));
    while hi - lo > 1e-10 {
        if f1 < f2 {
            hi = t2;
            t2 = t1;
            f2 = f1;
            t1 = hi - golden * (hi - lo);
            f1 = f(&at(t1));
        } else {
            lo = t1;
            t1 = t2;
            f1 = f2;
            t2 = lo + golden * (hi - lo);
            f2 = f(&at(t2));
        }
    }
    let (t_best, f_best) = if f1 < f2 { (t1, f1) } else { (t2, f2) };
    if f_best < *value - 1e-16 {
        *point = at(t_best);
        *value = f_best;
        true
    } else {
        false
    }
}

/// Monte Carlo reconstruction of an operator from phase-space samples:
/// the mean of N·W_i·Δ^{−s}(Ω_i) over the provided Haar samples converges
/// to the operator whose W values were supplied.
pub fn reconstruct_operator(
    samples: &[(OmegaAngles, f64)],
    params: &SWParams,
    basis: &GeneratorBasis,
) -> Result<CMat> {
    if samples.len() < 10_000 {
        return Err(Error::TooFewSamples {
            got: samples.len(),
            min: 10_000,
        });
    }
    let n = params.dim();
    if basis.dim() != n {
        return Err(Error::DimensionMismatch(basis.dim(), n));
    }
    let dual = params.dual();
    let mut acc = linalg::zeros(n);
    for (omega, w) in samples {
        let kernel = sw_kernel(omega, &dual, basis)?;
        acc = acc + kernel.matrix().mapv(|z| z * (n as f64 * w));
    }
    Ok(acc.mapv(|z| z / samples.len() as f64))
}
