//! One dual-rail neuron: encode inputs as pulse widths, integrate the rail
//! charges and read back the ReLU output width.

use tact_pwm::neuron::simulate_neuron;
use tact_pwm::prelude::*;
use tact_pwm::signal::encode_value;

fn main() -> Result<()> {
    let cfg = RunConfig::default();
    let frame = cfg.neuron.frame;
    let device = SubthresholdParams {
        ideal_off: true,
        ..cfg.device
    };

    let x = [0.9, 0.2, 0.6, 1.0, 0.0, 0.4];
    let w: [i64; 6] = [1, -1, 1, -1, 1, 1];
    let inputs = x.iter().map(|&v| encode_value(v, &frame)).collect::<Result<Vec<_>>>()?;
    let synapses = w
        .iter()
        .map(|&s| Weight::try_from(s).map(BinarySynapseUnit::ideal))
        .collect::<Result<Vec<_>>>()?;

    let out = simulate_neuron(&inputs, &synapses, &device, &cfg.neuron)?;
    println!("on-current     {:.3} nA", device.on_current() * 1e9);
    println!("W+             {:.3} ns  (V_mac {:.1} mV)", out.w_plus * 1e9, out.plus.v_mac * 1e3);
    println!("W-             {:.3} ns  (V_mac {:.1} mV)", out.w_minus * 1e9, out.minus.v_mac * 1e3);
    println!("ReLU output    {:.3} ns", out.w_relu * 1e9);

    // the same number straight from the weighted sum
    let dot: f64 = x.iter().zip(&w).map(|(v, &s)| v * s as f64).sum();
    let gain = cfg.neuron.full_scale_gain(device.on_current());
    println!("closed form    {:.3} ns", gain * dot.max(0.0) * frame.t_out * 1e9);
    Ok(())
}
