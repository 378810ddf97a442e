//! Input/output transfer curve: every input swept across the frame, the output
//! width averaged over jittered measurements. Writes CSV to stdout; the
//! std column is the spread of single measurements.

use tact_pwm::analysis::{sweep_input_output, write_sweep_csv, SweepSpec};
use tact_pwm::prelude::*;

fn main() -> Result<()> {
    let cfg = RunConfig::default();
    let setup = cfg.setup();
    // 40 inputs driven together span nearly the whole output range
    let n = 40;
    let sweep = SweepSpec {
        synapses: setup.synapses(&vec![Weight::Plus; n], Some(&cfg.variation)),
        base_inputs: vec![PwmSignal::ZERO; n],
        swept: (0..n).collect(),
        n_points: 11,
        averaging_runs: 50,
        jitter: cfg.variation,
    };
    let points = sweep_input_output(&setup, &sweep)?;
    write_sweep_csv(&points, std::io::stdout())?;
    Ok(())
}
