//! Monte Carlo error experiments, jitter averaging and input/output sweeps.
//!
//! Trial `k` of an experiment draws all of its randomness from its own ChaCha
//! stream, so results are independent of thread scheduling and a longer run
//! with the same seed extends a shorter one.

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::device::{sample_variation, BinarySynapseUnit, SubthresholdParams, VariationModel, Weight};
use crate::error::{Error, Result};
use crate::neuron::{simulate_neuron, NeuronConfig, NeuronOutput};
use crate::rng::{stream_rng, SWEEP_STREAM, TRIAL_STREAM_BASE};
use crate::signal::PwmSignal;
use crate::sum::compensated_sum;

/// Circuit parameters of the neuron under test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeuronSetup {
    pub neuron: NeuronConfig,
    pub device: SubthresholdParams,
}

impl NeuronSetup {
    pub fn validate(&self) -> Result<()> {
        self.neuron.validate()?;
        self.device.validate()
    }

    /// Normalized output per unit of `sum(w_i W_i / t_in)` with ideal devices.
    pub fn full_scale_gain(&self) -> f64 {
        self.neuron.full_scale_gain(self.device.on_current())
    }

    /// Synapses with weights `weights` and mismatch drawn from `variation`.
    pub fn synapses(&self, weights: &[Weight], variation: Option<&VariationModel>) -> Vec<BinarySynapseUnit> {
        let mults = match variation {
            Some(m) => sample_variation(m, weights.len(), self.device.slope_norm),
            None => vec![(1.0, 1.0); weights.len()],
        };
        weights
            .iter()
            .zip(mults)
            .map(|(&w, (p, m))| BinarySynapseUnit {
                weight: w,
                variation_plus: p,
                variation_minus: m,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub n_trials: usize,
    pub n_inputs: usize,
    pub variation: VariationModel,
    pub averaging_runs: usize,
    pub seed: u64,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::config("n_trials must be >= 1"));
        }
        if self.n_inputs == 0 {
            return Err(Error::config("n_inputs must be >= 1"));
        }
        if self.averaging_runs == 0 {
            return Err(Error::config("averaging_runs must be >= 1"));
        }
        self.variation.validate()
    }
}

/// One trial: the ideal result and the simulated one, both as fractions of
/// the full-scale output width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// `sum(w_i W_i / t_in)` before ReLU.
    pub weighted_sum: f64,
    pub oracle: f64,
    pub simulated: f64,
    pub error_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub mean_abs_error_pct: f64,
    pub max_abs_error_pct: f64,
    /// Standard deviation of the signed output-width error, seconds.
    pub std_error: f64,
    pub per_trial: Vec<TrialRecord>,
}

impl ErrorStats {
    fn from_records(per_trial: Vec<TrialRecord>, t_out: f64) -> Self {
        let n = per_trial.len() as f64;
        let signed: Vec<f64> = per_trial.iter().map(|r| (r.simulated - r.oracle) * t_out).collect();
        let mean_signed = compensated_sum(signed.iter().copied()) / n;
        let var = if per_trial.len() > 1 {
            compensated_sum(signed.iter().map(|e| (e - mean_signed).powi(2))) / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean_abs_error_pct: compensated_sum(per_trial.iter().map(|r| r.error_pct)) / n,
            max_abs_error_pct: per_trial.iter().map(|r| r.error_pct).fold(0.0, f64::max),
            std_error: var.sqrt(),
            per_trial,
        }
    }

    pub fn key_values(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("n_trials", self.per_trial.len() as f64),
            ("mean_abs_error_pct", self.mean_abs_error_pct),
            ("max_abs_error_pct", self.max_abs_error_pct),
            ("std_error_ns", self.std_error * 1e9),
        ]
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.per_trial {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// `sum(w_i * W_i / t_in)`, compensated.
pub fn oracle_weighted_sum(weights: &[Weight], widths: &[f64], t_in: f64) -> Result<f64> {
    if weights.len() != widths.len() {
        return Err(Error::domain(format!(
            "{} weights for {} widths",
            weights.len(),
            widths.len()
        )));
    }
    for &w in widths {
        if !(0.0..=t_in).contains(&w) {
            return Err(Error::domain(format!("width {w} s outside [0, {t_in}] s")));
        }
    }
    Ok(compensated_sum(
        weights
            .iter()
            .zip(widths)
            .map(|(w, &width)| f64::from(w.value()) * (width / t_in)),
    ))
}

/// `max(width + d, 0)` with `d ~ N(0, jitter_sigma)`.
pub fn apply_jitter<R: Rng + ?Sized>(width: f64, model: &VariationModel, rng: &mut R) -> f64 {
    if model.jitter_sigma == 0.0 {
        return width;
    }
    let normal = Normal::new(0.0, model.jitter_sigma).expect("jitter_sigma validated");
    (width + normal.sample(rng)).max(0.0)
}

/// Output width of one measurement of `out`: the falling edge of an emitted
/// pulse is jittered, an absent pulse stays absent.
pub fn measure_output<R: Rng + ?Sized>(out: &NeuronOutput, model: &VariationModel, rng: &mut R) -> f64 {
    if out.w_relu > 0.0 {
        apply_jitter(out.w_relu, model, rng)
    } else {
        0.0
    }
}

/// Mean of `runs` independent jittered measurements of the same neuron
/// evaluation.
pub fn average_jittered<R: Rng + ?Sized>(
    out: &NeuronOutput,
    model: &VariationModel,
    runs: usize,
    rng: &mut R,
) -> Result<f64> {
    if runs == 0 {
        return Err(Error::domain("runs must be >= 1"));
    }
    let samples = (0..runs).map(|_| measure_output(out, model, rng));
    Ok(compensated_sum(samples) / runs as f64)
}

fn random_trial<R: Rng + ?Sized>(rng: &mut R, n: usize, t_in: f64) -> (Vec<Weight>, Vec<f64>) {
    let weights = (0..n)
        .map(|_| if rng.random_bool(0.5) { Weight::Plus } else { Weight::Minus })
        .collect();
    let widths = (0..n).map(|_| rng.random_range(0.0..=t_in)).collect();
    (weights, widths)
}

/// Random-weight, random-input error experiment on a single neuron.
///
/// The device mismatch is drawn once from `cfg.variation` (one chip); each
/// trial reprograms the weights and draws new input widths uniformly on
/// `[0, t_in]`. The simulated output is averaged over `cfg.averaging_runs`
/// jittered measurements and compared with
/// `min(gain * max(sum(w_i W_i / t_in), 0), 1)`, where `gain` is the ideal
/// full-scale gain. Errors are percent of `t_out`.
pub fn run_error_experiment(cfg: &TrialConfig, setup: &NeuronSetup) -> Result<ErrorStats> {
    cfg.validate()?;
    setup.validate()?;
    let t_in = setup.neuron.frame.t_in;
    let t_out = setup.neuron.frame.t_out;
    let gain = setup.full_scale_gain();
    let chip = setup.synapses(&vec![Weight::Plus; cfg.n_inputs], Some(&cfg.variation));

    let records = (0..cfg.n_trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(cfg.seed, TRIAL_STREAM_BASE + k as u64);
            let (weights, widths) = random_trial(&mut rng, cfg.n_inputs, t_in);
            let synapses: Vec<BinarySynapseUnit> = chip
                .iter()
                .zip(&weights)
                .map(|(bsu, w)| BinarySynapseUnit { weight: *w, ..*bsu })
                .collect();
            let inputs: Vec<PwmSignal> = widths.iter().map(|&w| PwmSignal { width: w }).collect();
            let out = simulate_neuron(&inputs, &synapses, &setup.device, &setup.neuron)?;
            let measured = average_jittered(&out, &cfg.variation, cfg.averaging_runs, &mut rng)?;

            let weighted_sum = oracle_weighted_sum(&weights, &widths, t_in)?;
            let oracle = (gain * weighted_sum.max(0.0)).min(1.0);
            let simulated = measured / t_out;
            Ok(TrialRecord {
                trial: k,
                weighted_sum,
                oracle,
                simulated,
                error_pct: (simulated - oracle).abs() * 100.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorStats::from_records(records, t_out))
}

/// Which inputs an input/output sweep drives.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub synapses: Vec<BinarySynapseUnit>,
    /// Widths of the inputs that are not swept.
    pub base_inputs: Vec<PwmSignal>,
    /// Indices of the inputs set to the sweep width.
    pub swept: Vec<usize>,
    pub n_points: usize,
    pub averaging_runs: usize,
    pub jitter: VariationModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub input_width: f64,
    pub mean_output: f64,
    pub std_output: f64,
}

/// Sweeps the selected inputs over `[0, t_in]` in `n_points` equal steps and
/// records the mean and standard deviation of the measured output width.
pub fn sweep_input_output(setup: &NeuronSetup, sweep: &SweepSpec) -> Result<Vec<SweepPoint>> {
    setup.validate()?;
    if sweep.n_points < 2 {
        return Err(Error::domain("a sweep needs at least 2 points"));
    }
    if sweep.averaging_runs == 0 {
        return Err(Error::domain("averaging_runs must be >= 1"));
    }
    if sweep.base_inputs.len() != sweep.synapses.len() {
        return Err(Error::domain("base inputs and synapses differ in length"));
    }
    if let Some(&i) = sweep.swept.iter().find(|&&i| i >= sweep.synapses.len()) {
        return Err(Error::domain(format!("swept input {i} out of range")));
    }
    sweep.jitter.validate()?;
    let t_in = setup.neuron.frame.t_in;
    let mut rng = stream_rng(sweep.jitter.seed, SWEEP_STREAM);
    let mut inputs = sweep.base_inputs.clone();
    let mut points = Vec::with_capacity(sweep.n_points);
    for p in 0..sweep.n_points {
        let width = t_in * p as f64 / (sweep.n_points - 1) as f64;
        for &i in &sweep.swept {
            inputs[i] = PwmSignal { width };
        }
        let out = simulate_neuron(&inputs, &sweep.synapses, &setup.device, &setup.neuron)?;
        let samples: Vec<f64> = (0..sweep.averaging_runs)
            .map(|_| measure_output(&out, &sweep.jitter, &mut rng))
            .collect();
        let n = samples.len() as f64;
        let mean = compensated_sum(samples.iter().copied()) / n;
        let std = if samples.len() > 1 {
            (compensated_sum(samples.iter().map(|s| (s - mean).powi(2))) / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        points.push(SweepPoint {
            input_width: width,
            mean_output: mean,
            std_output: std,
        });
    }
    Ok(points)
}

pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}
