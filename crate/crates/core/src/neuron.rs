//! Closed-form dual-rail neuron.
//!
//! Pipeline per rail: reset to 0 V, integrate synapse currents on
//! `C_d + C_n` for `t_in`, isolate the dendrite, ramp `C_n` with
//! `I_n = C_n * V_theta / t_out` and raise the comparator output once the
//! ramp crosses `V_theta`. The ReLU stage passes `W+ - W-` when positive.

use serde::{Deserialize, Serialize};

use crate::device::{BinarySynapseUnit, Rail, SubthresholdParams};
use crate::error::{Error, Result};
use crate::signal::{Period, PwmSignal, TimingFrame};
use crate::sum::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeuronConfig {
    /// Parasitic dendrite wiring capacitance, farads.
    pub c_d: f64,
    /// Comparator input capacitance, farads.
    pub c_n: f64,
    /// Comparator threshold, volts.
    pub v_theta: f64,
    pub v_dd: f64,
    pub frame: TimingFrame,
    /// Enables the non-ideal charging model `V = Vs * (1 - exp(-Q / (C Vs)))`
    /// with this settling voltage. `None` charges ideally.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settling_voltage: Option<f64>,
}

impl NeuronConfig {
    pub fn new(c_d: f64, c_n: f64, v_theta: f64, v_dd: f64, frame: TimingFrame) -> Result<Self> {
        let cfg = Self {
            c_d,
            c_n,
            v_theta,
            v_dd,
            frame,
            settling_voltage: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        crate::signal::validate_frame(&self.frame)?;
        if !(self.c_d.is_finite() && self.c_d >= 0.0) {
            return Err(Error::config(format!("c_d must be >= 0, got {}", self.c_d)));
        }
        if !(self.c_n.is_finite() && self.c_n > 0.0) {
            return Err(Error::config(format!("c_n must be > 0, got {}", self.c_n)));
        }
        if !(self.v_theta.is_finite() && self.v_dd.is_finite() && 0.0 < self.v_theta && self.v_theta <= self.v_dd) {
            return Err(Error::config(format!(
                "need 0 < v_theta <= v_dd, got v_theta={} v_dd={}",
                self.v_theta, self.v_dd
            )));
        }
        if let Some(vs) = self.settling_voltage {
            if !(vs.is_finite() && vs > 0.0) {
                return Err(Error::config(format!("settling voltage must be > 0, got {vs}")));
            }
        }
        Ok(())
    }

    /// Total integrating capacitance `C_d + C_n`.
    pub fn capacitance(&self) -> f64 {
        self.c_d + self.c_n
    }

    /// Largest rail charge that still maps inside the output period.
    pub fn full_scale_charge(&self) -> f64 {
        self.capacitance() * self.v_theta
    }

    /// Output width per coulomb of rail charge, `t_out / ((C_d + C_n) V_theta)`.
    pub fn width_per_coulomb(&self) -> f64 {
        self.frame.t_out / self.full_scale_charge()
    }

    /// Normalized output (`W_out / t_out`) per unit of `sum(w_i W_i / t_in)`
    /// for synapses that all source `i_on`.
    pub fn full_scale_gain(&self, i_on: f64) -> f64 {
        self.frame.t_in * i_on / self.full_scale_charge()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RailState {
    pub charge: f64,
    pub v_mac: f64,
    pub saturated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeuronOutput {
    pub w_plus: f64,
    pub w_minus: f64,
    pub w_relu: f64,
    pub plus: RailState,
    pub minus: RailState,
    /// Inputs with a non-zero pulse routed to each rail, `(plus, minus)`.
    pub active_inputs: (usize, usize),
}

impl NeuronOutput {
    pub fn rail(&self, rail: Rail) -> &RailState {
        match rail {
            Rail::Plus => &self.plus,
            Rail::Minus => &self.minus,
        }
    }

    pub fn output(&self) -> PwmSignal {
        PwmSignal { width: self.w_relu }
    }

    /// A clamped rail makes `W+ - W-` meaningless.
    pub fn is_unreliable(&self) -> bool {
        self.plus.saturated || self.minus.saturated
    }
}

/// Total charge `sum(W_i * I_i)` from `(width, current)` pairs.
pub fn accumulate_charge(contributions: &[(f64, f64)]) -> Result<f64> {
    let mut q = CompensatedSum::new();
    for &(width, current) in contributions {
        if !(width.is_finite() && width >= 0.0) {
            return Err(Error::domain(format!("negative or non-finite width {width}")));
        }
        if !(current.is_finite() && current >= 0.0) {
            return Err(Error::domain(format!("negative or non-finite current {current}")));
        }
        q.add(width * current);
    }
    Ok(q.value())
}

/// Dendrite voltage at the end of the input period.
pub fn mac_voltage(q: f64, cfg: &NeuronConfig) -> f64 {
    let c = cfg.capacitance();
    match cfg.settling_voltage {
        None => q / c,
        Some(vs) => vs * (1.0 - (-q / (c * vs)).exp()),
    }
}

/// Ramp current that brings `C_n` from 0 V to `V_theta` in exactly `t_out`.
pub fn vpc_ramp_current(cfg: &NeuronConfig) -> f64 {
    cfg.c_n * cfg.v_theta / cfg.frame.t_out
}

/// Output pulse width of the voltage-to-pulse converter, and whether the rail
/// overflowed its range.
///
/// The ramp rises at `V_theta / t_out`, so the output stays high for
/// `(V_mac / V_theta) * t_out`. Above `V_theta` the comparator is high for the
/// whole period and the width clamps to `t_out`.
pub fn vpc_output_width(v_mac: f64, cfg: &NeuronConfig) -> (f64, bool) {
    let t_out = cfg.frame.t_out;
    let saturated = v_mac > cfg.v_theta;
    let width = if saturated {
        t_out
    } else {
        (v_mac / cfg.v_theta * t_out).clamp(0.0, t_out)
    };
    (cfg.frame.quantize(width, t_out), saturated)
}

/// The ReLU pulse logic: high while the plus comparator is high and the minus
/// one is not.
pub fn relu_combine(w_plus: f64, w_minus: f64) -> f64 {
    (w_plus - w_minus).max(0.0)
}

fn rail_state(charge: f64, cfg: &NeuronConfig) -> (RailState, f64) {
    let v_mac = mac_voltage(charge, cfg);
    let (width, saturated) = vpc_output_width(v_mac, cfg);
    (
        RailState {
            charge,
            v_mac,
            saturated,
        },
        width,
    )
}

/// Runs one neuron over a full input period.
///
/// Each synapse sources its on-state currents for `W_i` and its off-state
/// leakage for the remaining `t_in - W_i`.
pub fn simulate_neuron(
    inputs: &[PwmSignal],
    synapses: &[BinarySynapseUnit],
    params: &SubthresholdParams,
    cfg: &NeuronConfig,
) -> Result<NeuronOutput> {
    if inputs.len() != synapses.len() {
        return Err(Error::domain(format!(
            "{} inputs for {} synapses",
            inputs.len(),
            synapses.len()
        )));
    }
    let t_in = cfg.frame.t_in;
    let mut q_plus = CompensatedSum::new();
    let mut q_minus = CompensatedSum::new();
    let mut active = (0usize, 0usize);

    for (input, bsu) in inputs.iter().zip(synapses) {
        input.validate(&cfg.frame, Period::Input)?;
        let on_time = input.width;
        let off_time = t_in - on_time;
        if on_time > 0.0 {
            match bsu.weight.rail() {
                Rail::Plus => active.0 += 1,
                Rail::Minus => active.1 += 1,
            }
            let on = bsu.currents(params, true);
            q_plus.add(on_time * on.plus);
            q_minus.add(on_time * on.minus);
        }
        if off_time > 0.0 && !params.ideal_off {
            let off = bsu.currents(params, false);
            q_plus.add(off_time * off.plus);
            q_minus.add(off_time * off.minus);
        }
    }

    let (plus, w_plus) = rail_state(q_plus.value(), cfg);
    let (minus, w_minus) = rail_state(q_minus.value(), cfg);
    Ok(NeuronOutput {
        w_plus,
        w_minus,
        w_relu: relu_combine(w_plus, w_minus),
        plus,
        minus,
        active_inputs: active,
    })
}
