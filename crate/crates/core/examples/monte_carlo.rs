//! Monte Carlo check of the fixed-effects estimator on synthetic panels.
//!
//! Usage: `cargo run --release --example monte_carlo -- [reps] [seed]`

use demoshock::synth::{monte_carlo, DgpConfig};

fn main() -> demoshock::Result<()> {
    let mut args = std::env::args().skip(1);
    let reps: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(500);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    let cfg = DgpConfig::default();
    let s = monte_carlo(&cfg, reps, seed)?;
    println!(
        "{} counties x {} zips, true beta {}, {} reps (seed {seed})",
        cfg.n_counties, cfg.zips_per_county.0, s.true_beta, s.n_reps
    );
    println!("mean beta   {:.4}", s.mean_beta);
    println!("bias        {:+.4}  (Monte Carlo se {:.4})", s.mean_bias(), s.sd_beta / (reps as f64).sqrt());
    println!("sd of beta  {:.4}", s.sd_beta);
    println!("mean se     {:.4}", s.mean_se);
    println!("coverage    {:.3}", s.coverage_95);
    println!("failed reps {}", s.n_failed);
    Ok(())
}
