//! The six CLI commands. Each takes a resolved [`RunConfig`], writes its
//! output files with provenance headers, and prints a short summary.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{Provenance, RunConfig};
use crate::channels::{
    depolarize, equivalence_time, integrate_master_equation, iterate_channel, ChannelSpec,
    DensityMatrix, DensityMatrixJson,
};
use crate::circuits::{direct_protocol, swap_test_protocol, write_protocol_csv, ProtocolRow};
use crate::coherent::{sample_haar, write_angles_csv};
use crate::phase_space::{grid_w, transition_table, write_transition_csv, SWParams, SliceSpec};
use crate::{Error, Result};

/// Distance guard for the discrete-continuous equivalence report.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-12;
/// Distance guard for the Runge-Kutta cross-check.
pub const RK_TOLERANCE: f64 = 1e-8;
/// Fixed step count used by the Runge-Kutta cross-check.
pub const RK_STEPS: usize = 10_000;
/// Exact-agreement guard between measurement protocols.
pub const PROTOCOL_TOLERANCE: f64 = 1e-12;
/// Largest system fed to the swap-test simulation from the CLI.
pub const VERIFY_DIM_LIMIT: usize = 16;
/// Largest N in the transition table.
pub const TRANSITION_DIM_LIMIT: usize = 64;

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, bytes)?;
    Ok(())
}

/// `sample-haar`: write Haar angle samples as CSV and print summary
/// statistics.
pub fn cmd_sample_haar(config: &RunConfig) -> Result<()> {
    let seed = config.require_seed("sample-haar")?;
    let out = config.require_out("sample-haar")?.to_path_buf();
    let samples = sample_haar(config.dim, config.samples, seed)?;

    let mut buf = Vec::new();
    write_angles_csv(&mut buf, &samples, &config.provenance().comment_lines())?;
    write_file(&out, &buf)?;

    println!(
        "sample-haar: dim={} count={} seed={} -> {}",
        config.dim,
        config.samples,
        seed,
        out.display()
    );
    for j in 0..config.dim - 1 {
        let mean_cos: f64 = samples.iter().map(|a| a.theta()[j].cos()).sum::<f64>()
            / samples.len() as f64;
        println!("  mean cos(theta_{}) = {mean_cos:+.6}", j + 1);
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EvolveOutput {
    pub provenance: Provenance,
    pub dim: usize,
    pub rounds: Vec<EvolveRound>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EvolveRound {
    pub n: u32,
    pub state: DensityMatrixJson,
    pub trace_distance_to_mixed: f64,
}

/// `evolve`: states after n = 0..rounds POVM rounds, with trace distances
/// to the maximally mixed state, as JSON.
pub fn cmd_evolve(config: &RunConfig) -> Result<()> {
    let out = config.require_out("evolve")?.to_path_buf();
    let rho0 = config.state.resolve(config.dim)?;
    let mixed = DensityMatrix::maximally_mixed(config.dim)?;

    let mut rounds = Vec::with_capacity(config.rounds as usize + 1);
    for n in 0..=config.rounds {
        let state = iterate_channel(&rho0, n);
        let distance = state.trace_distance(&mixed)?;
        rounds.push(EvolveRound {
            n,
            state: state.to_json(),
            trace_distance_to_mixed: distance,
        });
    }

    let output = EvolveOutput {
        provenance: config.provenance(),
        dim: config.dim,
        rounds,
    };
    write_file(&out, serde_json::to_string_pretty(&output)?.as_bytes())?;

    println!("evolve: dim={} rounds={} -> {}", config.dim, config.rounds, out.display());
    for round in &output.rounds {
        println!(
            "  n={}: distance to mixed = {:.6e}",
            round.n, round.trace_distance_to_mixed
        );
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub provenance: Provenance,
    pub dim: usize,
    pub gamma: f64,
    pub distances: Vec<f64>,
    pub max_distance: f64,
    pub tolerance: f64,
    pub rk_distance: Option<f64>,
    pub rk_tolerance: Option<f64>,
}

/// `equivalence`: compare n POVM rounds against the continuous channel at
/// the matching time for n = 0..rounds; optionally cross-check the
/// Runge-Kutta integrator at the final round. Violations exit with the
/// numerical-guard code.
pub fn cmd_equivalence(config: &RunConfig) -> Result<()> {
    let rho0 = config.state.resolve(config.dim)?;
    let spec = ChannelSpec::new(config.dim, config.gamma)?;

    let mut distances = Vec::with_capacity(config.rounds as usize + 1);
    for n in 0..=config.rounds {
        let discrete = iterate_channel(&rho0, n);
        let continuous = depolarize(&rho0, &spec, equivalence_time(n, &spec))?;
        distances.push(discrete.trace_distance(&continuous)?);
    }
    let max_distance = distances.iter().cloned().fold(0.0, f64::max);

    let rk_distance = if config.rk_check {
        let t = equivalence_time(config.rounds, &spec);
        let integrated = integrate_master_equation(&rho0, &spec, t, RK_STEPS)?;
        let closed = depolarize(&rho0, &spec, t)?;
        Some(integrated.trace_distance(&closed)?)
    } else {
        None
    };

    let report = EquivalenceReport {
        provenance: config.provenance(),
        dim: config.dim,
        gamma: config.gamma,
        distances,
        max_distance,
        tolerance: EQUIVALENCE_TOLERANCE,
        rk_distance,
        rk_tolerance: config.rk_check.then_some(RK_TOLERANCE),
    };

    if let Some(out) = &config.out {
        write_file(out, serde_json::to_string_pretty(&report)?.as_bytes())?;
    }

    println!(
        "equivalence: dim={} gamma={} rounds={} max distance = {:.3e}",
        config.dim, config.gamma, config.rounds, report.max_distance
    );
    if let Some(rk) = report.rk_distance {
        println!("  rk cross-check distance = {rk:.3e}");
    }

    if report.max_distance > EQUIVALENCE_TOLERANCE {
        return Err(Error::NumericalGuard(format!(
            "equivalence distance {} exceeds {}",
            report.max_distance, EQUIVALENCE_TOLERANCE
        )));
    }
    if let Some(rk) = report.rk_distance {
        if rk > RK_TOLERANCE {
            return Err(Error::NumericalGuard(format!(
                "rk distance {rk} exceeds {RK_TOLERANCE}"
            )));
        }
    }
    Ok(())
}

/// `phase-space`: one grid CSV per round under the output directory,
/// reporting each grid's minimum.
pub fn cmd_phase_space(config: &RunConfig) -> Result<()> {
    let out_dir = config.require_out("phase-space")?.to_path_buf();
    let rho0 = config.state.resolve(config.dim)?;
    let params = SWParams::new(config.dim, config.s)?;
    let slice = SliceSpec::default_for(config.dim)?;
    fs::create_dir_all(&out_dir)?;

    println!(
        "phase-space: dim={} s={} rounds={} resolution={} -> {}",
        config.dim,
        config.s,
        config.rounds,
        config.resolution,
        out_dir.display()
    );
    for n in 0..=config.rounds {
        let state = iterate_channel(&rho0, n);
        let grid = grid_w(&state, &params, &slice, config.resolution)?;
        let path = out_dir.join(format!("grid_n{n}.csv"));
        let mut buf = Vec::new();
        let mut comments = config.provenance().comment_lines();
        comments.push(format!("round = {n}"));
        grid.to_csv(&mut buf, &comments)?;
        write_file(&path, &buf)?;
        let (w_min, at_a, at_b) = grid.min();
        println!("  n={n}: min W = {w_min:+.6} at ({at_a:.4}, {at_b:.4})");
    }
    Ok(())
}

/// `transition`: classification table over N = 2..=dim and the s grid, as
/// CSV.
pub fn cmd_transition(config: &RunConfig) -> Result<()> {
    let out = config.require_out("transition")?.to_path_buf();
    if config.dim > TRANSITION_DIM_LIMIT {
        return Err(Error::Config(format!(
            "transition table capped at N <= {TRANSITION_DIM_LIMIT}, got {}",
            config.dim
        )));
    }
    let steps = ((config.s_stop - config.s_start) / config.s_step).round() as i64;
    if steps < 0 {
        return Err(Error::Config("s_stop must be >= s_start".into()));
    }
    let s_values: Vec<f64> = (0..=steps)
        .map(|k| config.s_start + k as f64 * config.s_step)
        .filter(|s| *s <= config.s_stop + 1e-12)
        .collect();
    let rows = transition_table(2..=config.dim, &s_values)?;

    let mut buf = Vec::new();
    write_transition_csv(&mut buf, &rows, &config.provenance().comment_lines())?;
    write_file(&out, &buf)?;

    let single_shot_cells = rows.iter().filter(|r| r.single_shot_paper).count();
    println!(
        "transition: N=2..={} s in [{}, {}] step {} -> {} ({} single-shot cells of {})",
        config.dim,
        config.s_start,
        config.s_stop,
        config.s_step,
        out.display(),
        single_shot_cells,
        rows.len()
    );
    Ok(())
}

/// `verify-protocols`: over sampled Ω, check that the swap test agrees
/// with the direct protocol exactly and that shot estimates stay within
/// 5/√shots; write the batch as CSV.
pub fn cmd_verify_protocols(config: &RunConfig) -> Result<()> {
    let seed = config.require_seed("verify-protocols")?;
    let out = config.require_out("verify-protocols")?.to_path_buf();
    if config.dim > VERIFY_DIM_LIMIT {
        return Err(Error::Config(format!(
            "verify-protocols capped at N <= {VERIFY_DIM_LIMIT} (swap-test memory), got {}",
            config.dim
        )));
    }
    let rho = config.state.resolve(config.dim)?;
    let omegas = sample_haar(config.dim, config.samples, seed)?;

    let mut rows = Vec::with_capacity(omegas.len());
    let mut max_delta = 0.0f64;
    let mut max_shot_error = 0.0f64;
    for (k, omega) in omegas.into_iter().enumerate() {
        let direct = direct_protocol(&rho, &omega, 0, 0)?;
        let swap = swap_test_protocol(&rho, &omega, config.shots, seed.wrapping_add(k as u64))?;
        max_delta = max_delta.max((direct.expectation - swap.expectation).abs());
        if let Some(empirical) = swap.empirical_estimate {
            max_shot_error = max_shot_error.max((empirical - swap.expectation).abs());
        }
        rows.push(ProtocolRow {
            omega,
            exact: swap.expectation,
            empirical: swap.empirical_estimate,
            shots: config.shots,
            success_probability: direct.success_probability,
        });
    }

    let mut buf = Vec::new();
    write_protocol_csv(&mut buf, &rows, &config.provenance().comment_lines())?;
    write_file(&out, &buf)?;

    println!(
        "verify-protocols: dim={} samples={} shots={} max |direct - swap| = {max_delta:.3e} -> {}",
        config.dim,
        config.samples,
        config.shots,
        out.display()
    );
    if config.shots > 0 {
        println!("  max shot-estimate error = {max_shot_error:.3e}");
    }

    if max_delta > PROTOCOL_TOLERANCE {
        return Err(Error::NumericalGuard(format!(
            "protocol disagreement {max_delta} exceeds {PROTOCOL_TOLERANCE}"
        )));
    }
    if config.shots > 0 {
        let bound = 5.0 / (config.shots as f64).sqrt();
        if max_shot_error > bound {
            return Err(Error::NumericalGuard(format!(
                "shot estimate error {max_shot_error} exceeds {bound}"
            )));
        }
    }
    Ok(())
}
