//! Current sources, the binary synapse unit and device mismatch.
//!
//! A binary synapse unit (BSU) is an SRAM cell whose two storage nodes drive
//! the sources of a pair of subthreshold pMOS transistors. The stored weight
//! selects which of the two dendrite rails receives current while the axon
//! line is pulled down to `v_w`.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, VARIATION_STREAM};

/// A current source gated by a binary pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchedCurrentSource {
    pub nominal_current: f64,
}

impl SwitchedCurrentSource {
    pub fn new(nominal_current: f64) -> Result<Self> {
        if !nominal_current.is_finite() || nominal_current < 0.0 {
            return Err(Error::domain(format!(
                "current source must be non-negative, got {nominal_current} A"
            )));
        }
        Ok(Self { nominal_current })
    }

    /// Charge delivered by a pulse of the given width.
    pub fn charge(&self, width: f64) -> f64 {
        self.nominal_current * width
    }
}

/// Subthreshold drain current model `I = i0 * exp((V_P - V_A) / slope_norm)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubthresholdParams {
    pub i0: f64,
    pub v_dd: f64,
    /// Axon line voltage while the input pulse is high.
    pub v_w: f64,
    /// Exponential slope normalization, `n * U_T`. 1 V gives the bare
    /// `exp(volts)` form.
    pub slope_norm: f64,
    /// Zero every current except the selected rail of an active input.
    #[serde(default)]
    pub ideal_off: bool,
}

impl Default for SubthresholdParams {
    fn default() -> Self {
        Self {
            i0: 1e-12,
            v_dd: 1.0,
            v_w: 0.65,
            slope_norm: 0.036,
            ideal_off: false,
        }
    }
}

impl SubthresholdParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.i0.is_finite() && self.i0 > 0.0) {
            return Err(Error::config(format!("i0 must be positive, got {}", self.i0)));
        }
        if !(self.slope_norm.is_finite() && self.slope_norm > 0.0) {
            return Err(Error::config(format!(
                "slope_norm must be positive, got {}",
                self.slope_norm
            )));
        }
        if !(self.v_dd.is_finite() && self.v_w.is_finite() && 0.0 <= self.v_w && self.v_w <= self.v_dd)
        {
            return Err(Error::config(format!(
                "need 0 <= v_w <= v_dd, got v_w={} v_dd={}",
                self.v_w, self.v_dd
            )));
        }
        Ok(())
    }

    pub fn drain_current(&self, v_source: f64, v_gate: f64) -> f64 {
        self.i0 * ((v_source - v_gate) / self.slope_norm).exp()
    }

    /// Selected-rail current of an active input without mismatch.
    pub fn on_current(&self) -> f64 {
        self.drain_current(self.v_dd, self.v_w)
    }

    /// Selected-rail current of an idle input without mismatch. Zero when
    /// `ideal_off` is set.
    pub fn off_current(&self) -> f64 {
        if self.ideal_off {
            0.0
        } else {
            self.drain_current(self.v_dd, self.v_dd)
        }
    }
}

/// A binary weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Weight {
    Plus,
    Minus,
}

impl Weight {
    pub fn value(self) -> i8 {
        match self {
            Weight::Plus => 1,
            Weight::Minus => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Weight::Plus => Weight::Minus,
            Weight::Minus => Weight::Plus,
        }
    }

    pub fn rail(self) -> Rail {
        match self {
            Weight::Plus => Rail::Plus,
            Weight::Minus => Rail::Minus,
        }
    }
}

impl TryFrom<i64> for Weight {
    type Error = Error;

    fn try_from(w: i64) -> Result<Self> {
        match w {
            1 => Ok(Weight::Plus),
            -1 => Ok(Weight::Minus),
            other => Err(Error::domain(format!("weight must be +1 or -1, got {other}"))),
        }
    }
}

/// One of the two dendrite lines of a dual-rail neuron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rail {
    Plus,
    Minus,
}

/// Currents flowing into the plus and minus dendrite rails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RailCurrents {
    pub plus: f64,
    pub minus: f64,
}

impl RailCurrents {
    pub fn get(&self, rail: Rail) -> f64 {
        match rail {
            Rail::Plus => self.plus,
            Rail::Minus => self.minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinarySynapseUnit {
    pub weight: Weight,
    /// Mismatch multiplier of the plus-rail transistor.
    pub variation_plus: f64,
    /// Mismatch multiplier of the minus-rail transistor.
    pub variation_minus: f64,
}

impl BinarySynapseUnit {
    pub fn ideal(weight: Weight) -> Self {
        Self {
            weight,
            variation_plus: 1.0,
            variation_minus: 1.0,
        }
    }

    pub fn with_variation(weight: Weight, variation_plus: f64, variation_minus: f64) -> Result<Self> {
        for m in [variation_plus, variation_minus] {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::domain(format!("variation multiplier must be positive, got {m}")));
            }
        }
        Ok(Self {
            weight,
            variation_plus,
            variation_minus,
        })
    }

    /// Rewrites the stored weight. Mismatch belongs to the transistors and is
    /// kept.
    pub fn program_weight(self, w: i64) -> Result<Self> {
        Ok(Self {
            weight: Weight::try_from(w)?,
            ..self
        })
    }

    /// Drain currents onto the two rails.
    ///
    /// The SRAM node of the selected rail sits at `v_dd`, the other at 0 V.
    /// The axon gate sits at `v_w` while the input is high and at `v_dd`
    /// otherwise.
    pub fn currents(&self, params: &SubthresholdParams, input_on: bool) -> RailCurrents {
        let v_gate = if input_on { params.v_w } else { params.v_dd };
        let (vp_plus, vp_minus) = match self.weight {
            Weight::Plus => (params.v_dd, 0.0),
            Weight::Minus => (0.0, params.v_dd),
        };
        let selected = self.weight.rail();
        let rail_current = |rail: Rail, vp: f64, mult: f64| {
            if params.ideal_off && !(input_on && rail == selected) {
                0.0
            } else {
                params.drain_current(vp, v_gate) * mult
            }
        };
        RailCurrents {
            plus: rail_current(Rail::Plus, vp_plus, self.variation_plus),
            minus: rail_current(Rail::Minus, vp_minus, self.variation_minus),
        }
    }
}

/// Free-function form of [`BinarySynapseUnit::currents`].
pub fn bsu_currents(bsu: &BinarySynapseUnit, params: &SubthresholdParams, input_on: bool) -> RailCurrents {
    bsu.currents(params, input_on)
}

/// Stochastic non-idealities: threshold-voltage mismatch and comparator edge
/// jitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationModel {
    /// Standard deviation of threshold-voltage mismatch, volts.
    pub sigma_vth: f64,
    /// Standard deviation of output edge jitter, seconds.
    pub jitter_sigma: f64,
    pub seed: u64,
}

impl VariationModel {
    pub fn none() -> Self {
        Self {
            sigma_vth: 0.0,
            jitter_sigma: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_vth.is_finite() && self.sigma_vth >= 0.0) {
            return Err(Error::config(format!("sigma_vth must be >= 0, got {}", self.sigma_vth)));
        }
        if !(self.jitter_sigma.is_finite() && self.jitter_sigma >= 0.0) {
            return Err(Error::config(format!(
                "jitter_sigma must be >= 0, got {}",
                self.jitter_sigma
            )));
        }
        Ok(())
    }
}

/// Draws `(plus, minus)` current multipliers for `n_units` synapses.
///
/// Each transistor gets an independent threshold shift `d ~ N(0, sigma_vth)`,
/// which scales its subthreshold current by `exp(d / slope_norm)`.
pub fn sample_variation(model: &VariationModel, n_units: usize, slope_norm: f64) -> Vec<(f64, f64)> {
    if model.sigma_vth == 0.0 {
        return vec![(1.0, 1.0); n_units];
    }
    let mut rng = stream_rng(model.seed, VARIATION_STREAM);
    let normal = Normal::new(0.0, model.sigma_vth / slope_norm)
        .expect("sigma_vth validated non-negative and finite");
    (0..n_units)
        .map(|_| {
            let plus = normal.sample(&mut rng).exp();
            let minus = normal.sample(&mut rng).exp();
            (plus, minus)
        })
        .collect()
}
