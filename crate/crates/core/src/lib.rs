//! Behavioral simulator for time-domain analog PWM weighted-sum hardware.
//!
//! Inputs are pulse widths; binary synapse units steer subthreshold currents
//! onto one of two dendrite rails; each rail integrates its charge and a
//! ramp-and-compare stage turns the rail voltage back into a pulse width;
//! the two widths are subtracted by pulse logic implementing ReLU.
//!
//! The runnable programs under `examples/` walk through each capability:
//!
//! ```bash
//! cargo run -p tact-pwm --example single_neuron
//! ```

pub mod analysis;
pub mod cli;
pub mod config;
pub mod device;
pub mod energy;
pub mod error;
pub mod network;
pub mod neuron;
pub mod report;
pub mod rng;
pub mod signal;
pub mod sum;
pub mod units;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analysis::{NeuronSetup, TrialConfig};
    pub use crate::config::RunConfig;
    pub use crate::device::{BinarySynapseUnit, SubthresholdParams, VariationModel, Weight};
    pub use crate::energy::{EnergyParams, EnergyReport};
    pub use crate::network::{LayerSpec, Network, NetworkSpec, WeightMatrix};
    pub use crate::neuron::{NeuronConfig, NeuronOutput};
    pub use crate::signal::{Period, PwmSignal, TimingFrame};
    pub use crate::{Error, Result};
}
