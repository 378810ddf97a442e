//! Random-weight, random-input error statistics of a mismatched 50-input
//! neuron, averaged over repeated jittered measurements.
//!
//! ```bash
//! cargo run --release -p tact-pwm --example monte_carlo_error -- [sigma_vth_mV]
//! ```

use tact_pwm::analysis::run_error_experiment;
use tact_pwm::prelude::*;

fn main() -> Result<()> {
    let cfg = RunConfig::default();
    let mut trials = cfg.trial_config();
    if let Some(mv) = std::env::args().nth(1) {
        trials.variation.sigma_vth = mv.parse::<f64>().expect("sigma in mV") * 1e-3;
    }
    let stats = run_error_experiment(&trials, &cfg.setup())?;
    println!(
        "sigma_vth {:.1} mV, {} trials of {} inputs",
        trials.variation.sigma_vth * 1e3,
        stats.per_trial.len(),
        trials.n_inputs
    );
    println!("mean |error| {:.3} % of full scale", stats.mean_abs_error_pct);
    println!("max  |error| {:.3} %", stats.max_abs_error_pct);
    println!("std error    {:.2} ns", stats.std_error * 1e9);

    let worst = stats
        .per_trial
        .iter()
        .max_by(|a, b| a.error_pct.abs().total_cmp(&b.error_pct.abs()))
        .expect("at least one trial");
    println!(
        "worst trial {}: sum {:.2}, expected {:.4}, measured {:.4}",
        worst.trial, worst.weighted_sum, worst.oracle, worst.simulated
    );
    Ok(())
}
