//! Energy, throughput and efficiency of a 100 x 10 layer under the bundled
//! measurement-condition config, plus the split into MAC and VPC energy.

use tact_pwm::cli::layer_energy_report;
use tact_pwm::config::{RunConfig, TABLE1_CONFIG};
use tact_pwm::energy::{efficiency, throughput_ops};

fn main() -> tact_pwm::Result<()> {
    let cfg = RunConfig::parse(TABLE1_CONFIG)?;
    let r = layer_energy_report(&cfg, None)?;
    println!("E_mac       {:.3} pJ", r.e_mac * 1e12);
    println!("E_vpc       {:.3} pJ", r.e_vpc * 1e12);
    println!("power       {:.3} uW at {:.0} kHz", r.power * 1e6, r.cycle_freq / 1e3);
    println!("throughput  {:.3e} OPS", r.ops_per_sec);
    println!("efficiency  {:.3e} OPS/W", r.efficiency);

    // the headline arithmetic from the measured power alone
    let ops = throughput_ops(100, 2, 10, 2.9e5);
    println!("measured    {:.3e} OPS/W at 1.9 uW", efficiency(ops, 1.9e-6)?);
    Ok(())
}
