//! Hierarchical run configuration.
//!
//! A TOML document with the sections `frame`, `neuron`, `device`,
//! `variation`, `energy` and `experiment`. Every physical quantity is a string
//! with a unit suffix. Unknown keys are errors; missing keys and sections fall
//! back to [`RunConfig::default`].

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{NeuronSetup, TrialConfig};
use crate::device::{SubthresholdParams, VariationModel};
use crate::energy::EnergyParams;
use crate::error::{Error, Result};
use crate::neuron::NeuronConfig;
use crate::signal::TimingFrame;
use crate::units::{Amperes, Farads, Hertz, Joules, Quantity, Seconds, Volts, Watts};

/// The default calibration config, identical to [`RunConfig::default`].
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.cfg");
/// Measurement conditions of the fabricated 100 x 10 array.
pub const TABLE1_CONFIG: &str = include_str!("../configs/table1.cfg");

/// Input workload used for energy reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Workload {
    /// Every input at this normalized level.
    Level(f64),
    /// Inputs uniform on `[0, 1]`, drawn from the experiment seed.
    Named(WorkloadKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WorkloadKind {
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergySection {
    pub params: EnergyParams,
    /// Inference cycles per second.
    pub cycle_freq: f64,
    pub workload: Workload,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentSection {
    /// Synapses of the neuron used by sweeps and error experiments.
    pub n_inputs: usize,
    /// Inputs of the layer used for energy reports.
    pub layer_inputs: usize,
    /// Neurons of the layer used for energy reports.
    pub n_neurons: usize,
    pub n_trials: usize,
    pub averaging_runs: usize,
    pub seed: u64,
    pub sweep_points: usize,
    /// How many inputs (from index 0) a sweep drives together.
    pub sweep_inputs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub neuron: NeuronConfig,
    pub device: SubthresholdParams,
    pub variation: VariationModel,
    pub energy: EnergySection,
    pub experiment: ExperimentSection,
    /// Notes about defaults that were applied.
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl Default for RunConfig {
    /// Calibrated defaults; `configs/default.cfg` documents each value.
    fn default() -> Self {
        let frame = TimingFrame {
            t_in: 300e-9,
            t_out: 300e-9,
            tick: None,
        };
        let v_dd = 1.0;
        let c_gate = 0.5e-15;
        Self {
            neuron: NeuronConfig {
                c_d: 1e-12,
                c_n: 50e-15,
                v_theta: 0.2,
                v_dd,
                frame,
                settling_voltage: None,
            },
            device: SubthresholdParams {
                i0: 1e-12,
                v_dd,
                v_w: 0.65,
                slope_norm: 0.036,
                ideal_off: false,
            },
            variation: VariationModel {
                sigma_vth: 0.008,
                jitter_sigma: 20e-9,
                seed: 1,
            },
            energy: EnergySection {
                params: EnergyParams {
                    e_switch_mac: c_gate * v_dd * v_dd,
                    e_switch_vpc: c_gate * v_dd * v_dd,
                    p_cmp: 0.25e-6,
                },
                cycle_freq: 2.9e5,
                workload: Workload::Named(WorkloadKind::Random),
            },
            experiment: ExperimentSection {
                n_inputs: 50,
                layer_inputs: 100,
                n_neurons: 10,
                n_trials: 10_000,
                averaging_runs: 50,
                seed: 1,
                sweep_points: 31,
                sweep_inputs: 1,
            },
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    frame: Option<RawFrame>,
    neuron: Option<RawNeuron>,
    device: Option<RawDevice>,
    variation: Option<RawVariation>,
    energy: Option<RawEnergy>,
    experiment: Option<RawExperiment>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrame {
    t_in: Option<Quantity<Seconds>>,
    t_out: Option<Quantity<Seconds>>,
    tick: Option<Quantity<Seconds>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNeuron {
    c_d: Option<Quantity<Farads>>,
    c_n: Option<Quantity<Farads>>,
    v_theta: Option<Quantity<Volts>>,
    v_dd: Option<Quantity<Volts>>,
    settling_voltage: Option<Quantity<Volts>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDevice {
    i0: Option<Quantity<Amperes>>,
    v_w: Option<Quantity<Volts>>,
    slope_norm: Option<Quantity<Volts>>,
    ideal_off: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariation {
    sigma_vth: Option<Quantity<Volts>>,
    jitter_sigma: Option<Quantity<Seconds>>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnergy {
    c_gate: Option<Quantity<Farads>>,
    e_switch_mac: Option<Quantity<Joules>>,
    e_switch_vpc: Option<Quantity<Joules>>,
    p_cmp: Option<Quantity<Watts>>,
    cycle_freq: Option<Quantity<Hertz>>,
    workload: Option<Workload>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    n_inputs: Option<usize>,
    layer_inputs: Option<usize>,
    n_neurons: Option<usize>,
    n_trials: Option<usize>,
    averaging_runs: Option<usize>,
    seed: Option<u64>,
    sweep_points: Option<usize>,
    sweep_inputs: Option<usize>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn set_q<U>(slot: &mut f64, value: Option<Quantity<U>>) {
    if let Some(q) = value {
        *slot = q.value;
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        let mut cfg = RunConfig::default();

        if let Some(f) = raw.frame {
            set_q(&mut cfg.neuron.frame.t_in, f.t_in);
            set_q(&mut cfg.neuron.frame.t_out, f.t_out);
            cfg.neuron.frame.tick = f.tick.map(|q| q.value);
        }
        if let Some(n) = raw.neuron {
            set_q(&mut cfg.neuron.c_d, n.c_d);
            set_q(&mut cfg.neuron.c_n, n.c_n);
            set_q(&mut cfg.neuron.v_theta, n.v_theta);
            set_q(&mut cfg.neuron.v_dd, n.v_dd);
            cfg.neuron.settling_voltage = n.settling_voltage.map(|q| q.value);
        }
        cfg.device.v_dd = cfg.neuron.v_dd;
        if let Some(d) = raw.device {
            set_q(&mut cfg.device.i0, d.i0);
            set_q(&mut cfg.device.v_w, d.v_w);
            set_q(&mut cfg.device.slope_norm, d.slope_norm);
            set(&mut cfg.device.ideal_off, d.ideal_off);
        }
        if let Some(v) = raw.variation {
            set_q(&mut cfg.variation.sigma_vth, v.sigma_vth);
            set_q(&mut cfg.variation.jitter_sigma, v.jitter_sigma);
            set(&mut cfg.variation.seed, v.seed);
        }
        match raw.energy {
            Some(e) => {
                let v_dd = cfg.neuron.v_dd;
                if let Some(c) = e.c_gate {
                    cfg.energy.params.e_switch_mac = c.value * v_dd * v_dd;
                    cfg.energy.params.e_switch_vpc = c.value * v_dd * v_dd;
                }
                set_q(&mut cfg.energy.params.e_switch_mac, e.e_switch_mac);
                set_q(&mut cfg.energy.params.e_switch_vpc, e.e_switch_vpc);
                set_q(&mut cfg.energy.params.p_cmp, e.p_cmp);
                set_q(&mut cfg.energy.cycle_freq, e.cycle_freq);
                set(&mut cfg.energy.workload, e.workload);
            }
            None => cfg
                .warnings
                .push("no [energy] section; using default energy parameters".into()),
        }
        if let Some(x) = raw.experiment {
            let ex = &mut cfg.experiment;
            set(&mut ex.n_inputs, x.n_inputs);
            set(&mut ex.layer_inputs, x.layer_inputs);
            set(&mut ex.n_neurons, x.n_neurons);
            set(&mut ex.n_trials, x.n_trials);
            set(&mut ex.averaging_runs, x.averaging_runs);
            set(&mut ex.seed, x.seed);
            set(&mut ex.sweep_points, x.sweep_points);
            set(&mut ex.sweep_inputs, x.sweep_inputs);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.neuron.validate()?;
        self.device.validate()?;
        self.variation.validate()?;
        self.energy.params.validate()?;
        if !(self.energy.cycle_freq.is_finite() && self.energy.cycle_freq >= 0.0) {
            return Err(Error::config("cycle_freq must be >= 0"));
        }
        if let Workload::Level(x) = self.energy.workload {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::config(format!("workload level {x} outside [0, 1]")));
            }
        }
        let ex = &self.experiment;
        for (name, v) in [
            ("n_inputs", ex.n_inputs),
            ("layer_inputs", ex.layer_inputs),
            ("n_neurons", ex.n_neurons),
            ("n_trials", ex.n_trials),
            ("averaging_runs", ex.averaging_runs),
        ] {
            if v == 0 {
                return Err(Error::config(format!("{name} must be >= 1")));
            }
        }
        if ex.sweep_points < 2 {
            return Err(Error::config("sweep_points must be >= 2"));
        }
        if ex.sweep_inputs == 0 || ex.sweep_inputs > ex.n_inputs {
            return Err(Error::config(format!(
                "sweep_inputs must be in 1..={}, got {}",
                ex.n_inputs, ex.sweep_inputs
            )));
        }
        Ok(())
    }

    /// Overrides both the mismatch seed and the experiment seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.variation.seed = seed;
        self.experiment.seed = seed;
        self
    }

    pub fn setup(&self) -> NeuronSetup {
        NeuronSetup {
            neuron: self.neuron,
            device: self.device,
        }
    }

    pub fn trial_config(&self) -> TrialConfig {
        TrialConfig {
            n_trials: self.experiment.n_trials,
            n_inputs: self.experiment.n_inputs,
            variation: self.variation,
            averaging_runs: self.experiment.averaging_runs,
            seed: self.experiment.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_default_matches_code_default() {
        let parsed = RunConfig::parse(DEFAULT_CONFIG).unwrap();
        assert!(parsed.warnings.is_empty());
        assert_eq!(parsed, RunConfig::default());
    }

    #[test]
    fn table1_conditions() {
        let c = RunConfig::parse(TABLE1_CONFIG).unwrap();
        assert_eq!(c.neuron.frame.t_in, 300e-9);
        assert_eq!(c.neuron.frame.t_out, 300e-9);
        assert_eq!(c.neuron.v_dd, 1.0);
        assert_eq!(c.neuron.v_theta, 0.2);
        assert_eq!(c.energy.cycle_freq, 2.9e5);
        assert_eq!((c.experiment.layer_inputs, c.experiment.n_neurons), (100, 10));
    }

    #[test]
    fn empty_document_warns_about_energy() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c.warnings.len(), 1);
        assert_eq!(c.energy, RunConfig::default().energy);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse("[frame]\nt_inn = \"300 ns\"\n").is_err());
        assert!(RunConfig::parse("[framez]\n").is_err());
    }

    #[test]
    fn bare_numbers_rejected() {
        let err = RunConfig::parse("[frame]\nt_in = 300e-9\n").unwrap_err();
        assert!(err.to_string().contains("unit"), "{err}");
        assert!(RunConfig::parse("[neuron]\nc_d = \"1 pV\"\n").is_err());
    }

    #[test]
    fn invariants_enforced_at_load() {
        assert!(RunConfig::parse("[frame]\nt_in = \"0 ns\"\n").is_err());
        assert!(RunConfig::parse("[neuron]\nv_theta = \"1.5 V\"\n").is_err());
        assert!(RunConfig::parse("[device]\nv_w = \"1.2 V\"\n").is_err());
        assert!(RunConfig::parse("[variation]\nsigma_vth = \"-1 mV\"\n").is_err());
        assert!(RunConfig::parse("[experiment]\nn_trials = 0\n").is_err());
        assert!(RunConfig::parse("[energy]\nworkload = 1.5\n").is_err());
    }

    #[test]
    fn gate_capacitance_sets_switch_energies() {
        let c = RunConfig::parse("[neuron]\nv_dd = \"2 V\"\n[energy]\nc_gate = \"1 fF\"\n").unwrap();
        assert!((c.energy.params.e_switch_mac - 4e-15).abs() < 1e-27);
        assert_eq!(c.device.v_dd, 2.0);
        let c = RunConfig::parse("[energy]\nworkload = 0.0\n").unwrap();
        assert_eq!(c.energy.workload, Workload::Level(0.0));
        let c = RunConfig::parse("[energy]\nworkload = \"random\"\n").unwrap();
        assert_eq!(c.energy.workload, Workload::Named(WorkloadKind::Random));
    }
}
