//! Physical quantities written with explicit unit suffixes, e.g. `"300 ns"`,
//! `"2.5 fF"`, `"0.25 uW"`.
//!
//! Bare numbers are rejected wherever a physical quantity is expected.

use std::fmt;
use std::marker::PhantomData;

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

use crate::error::{Error, Result};

const PREFIXES: &[(&str, i32)] = &[
    ("f", -15),
    ("p", -12),
    ("n", -9),
    ("u", -6),
    ("µ", -6),
    ("μ", -6),
    ("m", -3),
    ("", 0),
    ("k", 3),
    ("M", 6),
    ("G", 9),
];

/// `value * 10^exp`, dividing for negative exponents so that e.g.
/// `300 * 10^-9` is the correctly rounded `3e-7`.
fn scale(value: f64, exp: i32) -> f64 {
    if exp < 0 {
        value / 10f64.powi(-exp)
    } else {
        value * 10f64.powi(exp)
    }
}

/// Parses `"<number> <prefix><unit>"` and returns the value in base SI units.
pub fn parse_quantity(text: &str, unit: &str) -> Result<f64> {
    let s = text.trim();
    let split = s
        .char_indices()
        .find(|&(_, c)| !(c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E')))
        .map_or(s.len(), |(i, _)| i);
    // 'e' may start a unit rather than an exponent; back off if the number
    // doesn't parse.
    let (mut num, mut rest) = s.split_at(split);
    while !num.is_empty() && num.parse::<f64>().is_err() {
        let cut = num.len() - 1;
        rest = &s[cut..];
        num = &s[..cut];
    }
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("'{text}': expected a number followed by a unit")))?;
    let suffix = rest.trim();
    if suffix.is_empty() {
        return Err(Error::config(format!("'{text}': missing unit suffix (expected {unit})")));
    }
    let prefix = suffix
        .strip_suffix(unit)
        .ok_or_else(|| Error::config(format!("'{text}': expected a quantity in {unit}")))?;
    let exp = PREFIXES
        .iter()
        .find(|(p, _)| *p == prefix)
        .map(|&(_, e)| e)
        .ok_or_else(|| Error::config(format!("'{text}': unknown prefix '{prefix}'")))?;
    if !value.is_finite() {
        return Err(Error::config(format!("'{text}': value must be finite")));
    }
    Ok(scale(value, exp))
}

/// Formats `value` (base SI units) with an engineering prefix.
pub fn format_quantity(value: f64, unit: &str) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value} {unit}");
    }
    let mag = value.abs();
    let (prefix, exp) = PREFIXES
        .iter()
        .filter(|(p, _)| !matches!(*p, "µ" | "μ"))
        .rev()
        .find(|(_, e)| mag >= scale(1.0, *e))
        .copied()
        .unwrap_or(("f", -15));
    format!("{} {prefix}{unit}", trim_float(scale(value, -exp)))
}

fn trim_float(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

pub trait Unit {
    const SYMBOL: &'static str;
}

macro_rules! unit {
    ($name:ident, $sym:literal) => {
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name;
        impl Unit for $name {
            const SYMBOL: &'static str = $sym;
        }
    };
}

unit!(Seconds, "s");
unit!(Farads, "F");
unit!(Volts, "V");
unit!(Amperes, "A");
unit!(Watts, "W");
unit!(Joules, "J");
unit!(Hertz, "Hz");

/// A value in base SI units that deserializes only from a suffixed string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity<U> {
    pub value: f64,
    unit: PhantomData<U>,
}

impl<U> Quantity<U> {
    pub fn new(value: f64) -> Self {
        Self {
            value,
            unit: PhantomData,
        }
    }
}

impl<'de, U: Unit> Deserialize<'de> for Quantity<U> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V<U>(PhantomData<U>);

        impl<U: Unit> Visitor<'_> for V<U> {
            type Value = Quantity<U>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a quantity string with a unit suffix, e.g. \"1.5 n{}\"", U::SYMBOL)
            }

            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<Self::Value, E> {
                parse_quantity(s, U::SYMBOL)
                    .map(Quantity::new)
                    .map_err(|e| E::custom(e.to_string()))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Self::Value, E> {
                Err(E::custom(format!("{v}: missing unit suffix (expected {})", U::SYMBOL)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Self::Value, E> {
                Err(E::custom(format!("{v}: missing unit suffix (expected {})", U::SYMBOL)))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Self::Value, E> {
                Err(E::custom(format!("{v}: missing unit suffix (expected {})", U::SYMBOL)))
            }
        }

        d.deserialize_any(V(PhantomData))
    }
}
