//! PWM signal representation and timing frames.
//!
//! An analog value in `[0, 1]` travels through the hardware as the width of a
//! single pulse inside a frame period. Pulses are left-aligned and carry no
//! position information: the charge they deliver depends only on on-time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which period of a [`TimingFrame`] a pulse width is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Period {
    Input,
    Output,
}

/// Input and output periods of one compute cycle, in seconds.
///
/// `tick`, when set, quantizes every encoded or generated width to a multiple
/// of the tick to model finite timing resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingFrame {
    pub t_in: f64,
    pub t_out: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tick: Option<f64>,
}

impl TimingFrame {
    pub fn new(t_in: f64, t_out: f64) -> Result<Self> {
        let frame = Self {
            t_in,
            t_out,
            tick: None,
        };
        validate_frame(&frame)?;
        Ok(frame)
    }

    /// Same input and output period.
    pub fn symmetric(period: f64) -> Result<Self> {
        Self::new(period, period)
    }

    pub fn with_tick(mut self, tick: f64) -> Result<Self> {
        if !(tick.is_finite() && tick > 0.0) {
            return Err(Error::config(format!("timing tick must be positive, got {tick}")));
        }
        self.tick = Some(tick);
        Ok(self)
    }

    pub fn period(&self, which: Period) -> f64 {
        match which {
            Period::Input => self.t_in,
            Period::Output => self.t_out,
        }
    }

    /// Rounds `width` to the nearest tick, if quantization is enabled, and
    /// keeps it inside `[0, limit]`.
    pub fn quantize(&self, width: f64, limit: f64) -> f64 {
        match self.tick {
            Some(tick) => ((width / tick).round() * tick).clamp(0.0, limit),
            None => width,
        }
    }
}

/// Checks that both periods are strictly positive and finite.
pub fn validate_frame(frame: &TimingFrame) -> Result<()> {
    for (name, value) in [("t_in", frame.t_in), ("t_out", frame.t_out)] {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::config(format!(
                "{name} must be positive and finite, got {value}"
            )));
        }
    }
    if let Some(tick) = frame.tick {
        if !(tick.is_finite() && tick > 0.0) {
            return Err(Error::config(format!("timing tick must be positive, got {tick}")));
        }
    }
    Ok(())
}

/// A single pulse; `width` is its on-time in seconds. A zero-width pulse is a
/// line held low for the whole frame.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct PwmSignal {
    pub width: f64,
}

impl PwmSignal {
    pub const ZERO: PwmSignal = PwmSignal { width: 0.0 };

    pub fn new(width: f64) -> Result<Self> {
        if !width.is_finite() || width < 0.0 {
            return Err(Error::domain(format!(
                "pulse width must be finite and non-negative, got {width}"
            )));
        }
        Ok(Self { width })
    }

    /// Checks the pulse fits inside the selected period.
    pub fn validate(&self, frame: &TimingFrame, against: Period) -> Result<()> {
        let period = frame.period(against);
        if !self.width.is_finite() || self.width < 0.0 || self.width > period {
            return Err(Error::domain(format!(
                "pulse width {} s outside [0, {period}] s",
                self.width
            )));
        }
        Ok(())
    }
}

/// Encodes `x` in `[0, 1]` as a pulse of width `x * t_in`.
pub fn encode_value(x: f64, frame: &TimingFrame) -> Result<PwmSignal> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("value {x} outside [0, 1]")));
    }
    let width = frame.quantize(x * frame.t_in, frame.t_in);
    Ok(PwmSignal { width })
}

/// Inverse of [`encode_value`]: the pulse width as a fraction of the chosen
/// period.
pub fn decode_width(signal: PwmSignal, frame: &TimingFrame, against: Period) -> Result<f64> {
    signal.validate(frame, against)?;
    Ok(signal.width / frame.period(against))
}
