//! Quantities with unit suffixes ("20 um", "2.979 kPa") normalized to SI.

use nems_casimir::constants::ev_to_angular_frequency;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Length,
    Pressure,
    Temperature,
    Voltage,
    Stiffness,
    /// Angular frequency; energies in eV are converted with ħ.
    Frequency,
}

impl Kind {
    fn si_unit(self) -> &'static str {
        match self {
            Kind::Length => "m",
            Kind::Pressure => "Pa",
            Kind::Temperature => "K",
            Kind::Voltage => "V",
            Kind::Stiffness => "N/m",
            Kind::Frequency => "rad/s",
        }
    }

    fn convert(self, value: f64, unit: &str) -> Option<f64> {
        let exponent = match (self, unit) {
            (Kind::Length, "m") => 0,
            (Kind::Length, "mm") => -3,
            (Kind::Length, "um" | "µm" | "μm") => -6,
            (Kind::Length, "nm") => -9,
            (Kind::Length, "pm") => -12,
            (Kind::Pressure, "Pa") => 0,
            (Kind::Pressure, "mPa") => -3,
            (Kind::Pressure, "kPa") => 3,
            (Kind::Pressure, "MPa") => 6,
            (Kind::Temperature, "K") => 0,
            (Kind::Voltage, "V") => 0,
            (Kind::Voltage, "mV") => -3,
            (Kind::Stiffness, "N/m") => 0,
            (Kind::Frequency, "rad/s") => 0,
            (Kind::Frequency, "eV") => return Some(ev_to_angular_frequency(value)),
            (Kind::Frequency, "meV") => return Some(ev_to_angular_frequency(shift_decimal(value, -3))),
            _ => return None,
        };
        Some(shift_decimal(value, exponent))
    }
}

/// value × 10^exponent, rounded once: "20 um" gives the same f64 as 20e-6.
fn shift_decimal(value: f64, exponent: i32) -> f64 {
    if exponent == 0 {
        return value;
    }
    let text = format!("{value:e}");
    let (mantissa, exp) = text.split_once('e').expect("LowerExp always has an exponent");
    let exp: i32 = exp.parse().expect("LowerExp exponent is an integer");
    format!("{mantissa}e{}", exp + exponent)
        .parse()
        .expect("shifted literal parses")
}

/// A config value: bare numbers are taken as SI, strings carry a unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawQuantity {
    Number(f64),
    Text(String),
}

fn split_number(text: &str) -> Option<(f64, &str)> {
    let text = text.trim();
    if let Some((num, unit)) = text.split_once(char::is_whitespace) {
        return num.parse().ok().map(|v| (v, unit.trim()));
    }
    // "20nm": longest numeric prefix
    (1..=text.len())
        .rev()
        .filter(|&i| text.is_char_boundary(i))
        .find_map(|i| text[..i].parse().ok().map(|v| (v, &text[i..])))
}

/// Parse `raw` as a quantity of `kind`, returning SI. `path` names the field
/// in error messages.
pub fn resolve(raw: &RawQuantity, kind: Kind, path: &str) -> Result<f64, String> {
    let value = match raw {
        RawQuantity::Number(v) => *v,
        RawQuantity::Text(text) => {
            let (v, unit) = split_number(text)
                .ok_or_else(|| format!("{path}: cannot read a number from {text:?}"))?;
            if unit.is_empty() {
                v
            } else {
                kind.convert(v, unit).ok_or_else(|| {
                    format!("{path}: unit {unit:?} is not a {kind:?} unit (SI is {})", kind.si_unit())
                })?
            }
        }
    };
    if !value.is_finite() {
        return Err(format!("{path}: value must be finite"));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(s: &str) -> RawQuantity {
        RawQuantity::Text(s.into())
    }

    #[test]
    fn suffixes_normalize_to_si() {
        assert_eq!(resolve(&text("20 um"), Kind::Length, "x").unwrap(), 20e-6);
        assert_eq!(resolve(&text("20µm"), Kind::Length, "x").unwrap(), 20e-6);
        assert_eq!(resolve(&text("0.1 nm"), Kind::Length, "x").unwrap(), 0.1e-9);
        assert_eq!(resolve(&text("2.979 kPa"), Kind::Pressure, "x").unwrap(), 2979.0);
        assert_eq!(resolve(&text("1e-3 Pa"), Kind::Pressure, "x").unwrap(), 1e-3);
        assert_eq!(resolve(&text("300 K"), Kind::Temperature, "x").unwrap(), 300.0);
        assert_eq!(resolve(&text("30 N/m"), Kind::Stiffness, "x").unwrap(), 30.0);
        assert_eq!(resolve(&RawQuantity::Number(5.0), Kind::Voltage, "x").unwrap(), 5.0);
        assert_eq!(
            resolve(&text("9 eV"), Kind::Frequency, "x").unwrap(),
            ev_to_angular_frequency(9.0)
        );
        assert_eq!(resolve(&text("2e-3 um"), Kind::Length, "x").unwrap(), 2e-9);
    }

    #[test]
    fn wrong_unit_names_the_field() {
        let e = resolve(&text("3 kPa"), Kind::Length, "geometry.length").unwrap_err();
        assert!(e.starts_with("geometry.length"), "{e}");
        assert!(resolve(&text("abc"), Kind::Length, "x").is_err());
        assert!(resolve(&text("1 furlong"), Kind::Length, "x").is_err());
    }
}
