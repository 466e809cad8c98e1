//! When does a single measurement round remove all negativity? The
//! (N, s) classification with its closed-form bounds and the critical
//! round count, cross-checked by direct evaluation.
//!
//! ```bash
//! cargo run --example single_shot_regions
//! ```

use povm_lab::phase_space::{
    classify_single_shot, n_critical, n_critical_brute_force, s_max, s_min, SWParams,
};

fn main() {
    println!("  N     s_min     s_max   n_c(s=0)   single-shot window");
    for n in 2..=13usize {
        let params = SWParams::new(n, 0.0).unwrap();
        println!(
            "{n:>3}  {:>8.4}  {:>8.4}  {:>6}     ({:.4}, {:.4}]",
            s_min(n),
            s_max(n),
            n_critical(&params),
            s_min(n),
            s_max(n),
        );
    }

    // A few individual cells, with the evolved minimum that decides them.
    println!("\ncell checks (closed form vs evolved minimum):");
    for (n, s) in [(2usize, 0.0), (3, -1.0), (3, 0.0), (4, 0.0), (8, -0.8)] {
        let c = classify_single_shot(n, s).unwrap();
        println!(
            "  N={n} s={s:+.2}: single-shot={}  W0_min={:+.4}  W1_min={:+.4}",
            c.single_shot_paper, c.w0_min, c.w1_min
        );
    }

    // Brute-force agreement of the round-count formula over a grid.
    let mut cells = 0;
    for n in 2..=20usize {
        for &s in &[-1.5, -1.0, -0.5, 0.0, 0.5, 1.0] {
            let params = SWParams::new(n, s).unwrap();
            assert_eq!(
                n_critical_brute_force(&params, 64),
                Some(n_critical(&params))
            );
            cells += 1;
        }
    }
    println!("\nn_c formula matches direct evaluation on {cells} (N, s) cells");
}
