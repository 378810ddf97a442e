//! A two-layer network with real-valued weights binarized by sign, run on the
//! PWM hardware model and compared with the same network in floating point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tact_pwm::network::{binarize_weights, forward_network};
use tact_pwm::prelude::*;

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut real = |rows: usize, cols: usize| -> Vec<Vec<f64>> {
        (0..rows).map(|_| (0..cols).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()
    };
    let w1 = binarize_weights(&real(8, 16))?;
    let w2 = binarize_weights(&real(4, 8))?;

    let cfg = RunConfig::default();
    let device = SubthresholdParams {
        ideal_off: true,
        ..cfg.device
    };
    let layer = |weights: WeightMatrix| LayerSpec {
        weights,
        neuron_cfg: cfg.neuron,
        device_params: device,
    };
    let gains = [layer(w1.clone()).full_scale_gain(), layer(w2.clone()).full_scale_gain()];
    let net = Network::build(
        NetworkSpec {
            layers: vec![layer(w1.clone()), layer(w2.clone())],
        },
        None,
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x: Vec<f64> = (0..16).map(|_| rng.random_range(0.0..=1.0)).collect();
    let y = forward_network(&net, &x)?;

    let mut h = x.clone();
    for (m, g) in [(&w1, gains[0]), (&w2, gains[1])] {
        h = m
            .to_signs()
            .iter()
            .map(|row| (g * row.iter().zip(&h).map(|(&s, v)| f64::from(s) * v).sum::<f64>()).clamp(0.0, 1.0))
            .collect();
    }
    println!("neuron  hardware   float");
    for (j, (a, b)) in y.iter().zip(&h).enumerate() {
        println!("{j:>6}  {a:.6}  {b:.6}");
    }
    Ok(())
}
