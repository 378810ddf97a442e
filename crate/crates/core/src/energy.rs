//! Energy, throughput and efficiency accounting.
//!
//! Per rail and per inference:
//!
//! - `E_mac = C_d * V_mac * V_dd + n_active * E_i`
//! - `E_vpc = C_n * (V_mac + V_theta) * V_dd + E_n + P_cmp * (t_in + t_out)`
//!
//! and `E_total = E_mac + E_vpc`. Operations follow the two-ops-per-synapse
//! (multiply + add) convention.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Network;
use crate::neuron::{NeuronConfig, NeuronOutput};
use crate::sum::CompensatedSum;

/// Operations counted per synapse per inference.
pub const OPS_PER_SYNAPSE: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    /// Switching energy of one input current source, `E_i`.
    pub e_switch_mac: f64,
    /// Switching energy of the ramp current source, `E_n`.
    pub e_switch_vpc: f64,
    /// Static comparator power over `t_in + t_out`.
    pub p_cmp: f64,
}

impl EnergyParams {
    /// `E_i = E_n = c_gate * v_dd^2`.
    pub fn from_gate_capacitance(c_gate: f64, v_dd: f64, p_cmp: f64) -> Result<Self> {
        let e = c_gate * v_dd * v_dd;
        let p = Self {
            e_switch_mac: e,
            e_switch_vpc: e,
            p_cmp,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn zero() -> Self {
        Self {
            e_switch_mac: 0.0,
            e_switch_vpc: 0.0,
            p_cmp: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("e_switch_mac", self.e_switch_mac),
            ("e_switch_vpc", self.e_switch_vpc),
            ("p_cmp", self.p_cmp),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// `C * V_c * V_dd`, the supply energy for charging `c` to `v_c`.
pub fn charge_energy(c: f64, v_c: f64, v_dd: f64) -> f64 {
    c * v_c * v_dd
}

pub fn mac_energy(cfg: &NeuronConfig, v_mac: f64, n_active_inputs: usize, p: &EnergyParams) -> f64 {
    charge_energy(cfg.c_d, v_mac, cfg.v_dd) + n_active_inputs as f64 * p.e_switch_mac
}

pub fn vpc_energy(cfg: &NeuronConfig, v_mac: f64, p: &EnergyParams) -> f64 {
    let frame = cfg.frame;
    charge_energy(cfg.c_n, v_mac + cfg.v_theta, cfg.v_dd)
        + p.e_switch_vpc
        + p.p_cmp * (frame.t_in + frame.t_out)
}

/// `(E_mac, E_vpc)` of one dual-rail neuron evaluation, both rails summed.
pub fn neuron_energy(cfg: &NeuronConfig, out: &NeuronOutput, p: &EnergyParams) -> (f64, f64) {
    let (n_plus, n_minus) = out.active_inputs;
    let e_mac = mac_energy(cfg, out.plus.v_mac, n_plus, p) + mac_energy(cfg, out.minus.v_mac, n_minus, p);
    let e_vpc = vpc_energy(cfg, out.plus.v_mac, p) + vpc_energy(cfg, out.minus.v_mac, p);
    (e_mac, e_vpc)
}

pub fn throughput_ops(n_synapses: u64, ops_per_synapse: u64, n_neurons: u64, freq: f64) -> f64 {
    (n_synapses * ops_per_synapse * n_neurons) as f64 * freq
}

/// Operations per second per watt.
pub fn efficiency(ops_per_sec: f64, power: f64) -> Result<f64> {
    if !(power.is_finite() && power > 0.0) {
        return Err(Error::domain(format!("power must be positive, got {power} W")));
    }
    Ok(ops_per_sec / power)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub e_mac: f64,
    pub e_vpc: f64,
    pub e_total: f64,
    pub ops: u64,
    pub cycle_freq: f64,
    pub ops_per_sec: f64,
    pub power: f64,
    /// OPS/W; infinite when no energy is spent.
    pub efficiency: f64,
}

impl EnergyReport {
    /// Builds the derived fields from the energy split of one inference run
    /// once per cycle at `cycle_freq`.
    pub fn new(e_mac: f64, e_vpc: f64, ops: u64, cycle_freq: f64) -> Self {
        let e_total = e_mac + e_vpc;
        let ops_per_sec = ops as f64 * cycle_freq;
        let power = e_total * cycle_freq;
        let efficiency = efficiency(ops_per_sec, power).unwrap_or(f64::INFINITY);
        Self {
            e_mac,
            e_vpc,
            e_total,
            ops,
            cycle_freq,
            ops_per_sec,
            power,
            efficiency,
        }
    }

    /// Energy per operation, joules.
    pub fn energy_per_op(&self) -> f64 {
        self.e_total / self.ops as f64
    }

    pub fn key_values(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("e_mac_j", self.e_mac),
            ("e_vpc_j", self.e_vpc),
            ("e_total_j", self.e_total),
            ("ops", self.ops as f64),
            ("cycle_freq_hz", self.cycle_freq),
            ("ops_per_sec", self.ops_per_sec),
            ("power_w", self.power),
            ("efficiency_ops_per_w", self.efficiency),
        ]
    }
}

/// Energy of one full inference of `net` on `input`.
pub fn inference_energy_report(
    net: &Network,
    input: &[f64],
    params: &EnergyParams,
    cycle_freq: f64,
) -> Result<EnergyReport> {
    params.validate()?;
    if !(cycle_freq.is_finite() && cycle_freq >= 0.0) {
        return Err(Error::config(format!("cycle frequency must be >= 0, got {cycle_freq}")));
    }
    let traces = net.trace(input)?;
    let mut e_mac = CompensatedSum::new();
    let mut e_vpc = CompensatedSum::new();
    let mut ops = 0u64;
    for (layer, trace) in net.layers().iter().zip(&traces) {
        let cfg = &layer.spec().neuron_cfg;
        for out in &trace.outputs {
            let (m, v) = neuron_energy(cfg, out, params);
            e_mac.add(m);
            e_vpc.add(v);
        }
        ops += layer.n_inputs() as u64 * OPS_PER_SYNAPSE * layer.n_neurons() as u64;
    }
    Ok(EnergyReport::new(e_mac.value(), e_vpc.value(), ops, cycle_freq))
}
