//! Threshold mismatch and leakage of the binary synapse units.

use tact_pwm::device::{sample_variation, BinarySynapseUnit, SubthresholdParams, VariationModel, Weight};

fn main() {
    let params = SubthresholdParams::default();
    println!("I_on  = {:.3e} A", params.on_current());
    println!("I_off = {:.3e} A (selected rail, idle input)", params.off_current());

    let model = VariationModel {
        sigma_vth: 0.008,
        jitter_sigma: 0.0,
        seed: 7,
    };
    let n = 10_000;
    let on: Vec<f64> = sample_variation(&model, n, params.slope_norm)
        .into_iter()
        .map(|(p, m)| {
            let bsu = BinarySynapseUnit::with_variation(Weight::Plus, p, m).expect("positive multipliers");
            bsu.currents(&params, true).plus
        })
        .collect();
    let mean = on.iter().sum::<f64>() / n as f64;
    let sd = (on.iter().map(|i| (i - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    println!(
        "sigma_vth = 8 mV over {n} units: mean {:.3} nA, spread {:.1} %",
        mean * 1e9,
        100.0 * sd / mean
    );

    // the unselected rail of an active -1 synapse
    let bsu = BinarySynapseUnit::ideal(Weight::Minus);
    let c = bsu.currents(&params, true);
    println!("-1 synapse, input on: I+ = {:.3e} A, I- = {:.3e} A", c.plus, c.minus);
}
