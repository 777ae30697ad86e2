//! Dielectric permittivity ε(iξ) at imaginary frequencies.
//!
//! Two routes are available: closed-form oscillator/Drude models, and the
//! Kramers–Kronig transform of tabulated Im ε(ω). Both produce a real
//! function of ξ that is ≥ 1 and non-increasing.

mod optical_data;

use std::fmt;
use std::sync::Arc;

pub use optical_data::{
    kramers_kronig_transform, load_optical_data, FrequencyUnit, HighFrequencyTail,
    LowFrequencyTail, OpticalDataTable, TailPolicy, KK_REL_TOLERANCE,
};

use crate::constants::ev_to_angular_frequency;
use crate::error::{Error, Result};

/// Default model parameters. These are fits, not physical constants; every
/// constructor that uses them has an explicit-parameter counterpart.
pub mod defaults {
    /// Static permittivity of high-resistivity Si.
    pub const SILICON_STATIC_PERMITTIVITY: f64 = 11.67;
    /// Characteristic absorption frequency of the single-oscillator Si fit, rad/s.
    pub const SILICON_RESONANCE_FREQUENCY: f64 = 6.6e15;
    /// ħω_p of Au, eV.
    pub const GOLD_PLASMA_ENERGY_EV: f64 = 9.0;
    /// ħγ of Au, eV.
    pub const GOLD_DAMPING_ENERGY_EV: f64 = 0.035;
    /// Permittivity used as a stand-in for a perfect conductor.
    pub const IDEAL_METAL_PROXY_PERMITTIVITY: f64 = 1e12;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseKind {
    AnalyticModel,
    TabulatedKk,
}

/// How the response is continued to ξ = 0 for conductors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extrapolation {
    None,
    Drude { plasma_frequency: f64, damping: f64 },
    /// Adds ω_p²/ξ² to the transform. The table must then hold only the
    /// bound-electron absorption, or the intraband part is counted twice.
    Plasma { plasma_frequency: f64 },
}

impl Extrapolation {
    pub fn label(&self) -> &'static str {
        match self {
            Extrapolation::None => "none",
            Extrapolation::Drude { .. } => "drude",
            Extrapolation::Plasma { .. } => "plasma",
        }
    }
}

/// Behaviour of the material at ξ = 0, which is what the zero-frequency
/// Matsubara term needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StaticResponse {
    /// Finite static permittivity.
    Dielectric(f64),
    /// ε diverges like 1/ξ: TM reflects fully, TE does not reflect.
    Drude,
    /// ε ξ² → ω_p²: both polarizations reflect.
    Plasma { plasma_frequency: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum DielectricModel {
    /// ε(iξ) = 1 + (ε_s − 1) ω₀² / (ω₀² + ξ² + γξ).
    Oscillator {
        static_permittivity: f64,
        resonance_frequency: f64,
        damping: f64,
    },
    /// ε(iξ) = 1 + ω_p² / (ξ(ξ + γ)).
    Drude { plasma_frequency: f64, damping: f64 },
    /// ε(iξ) = 1 + ω_p² / ξ².
    Plasma { plasma_frequency: f64 },
    /// Frequency-independent ε. Only meant as an ideal-conductor proxy; it
    /// does not approach 1 at high frequency.
    Constant { permittivity: f64 },
    Tabulated {
        table: Arc<OpticalDataTable>,
        tails: TailPolicy,
        extrapolation: Extrapolation,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialResponse {
    name: String,
    model: DielectricModel,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v:e}")))
    }
}

impl MaterialResponse {
    pub fn new(name: impl Into<String>, model: DielectricModel) -> Result<Self> {
        match &model {
            DielectricModel::Oscillator {
                static_permittivity,
                resonance_frequency,
                damping,
            } => {
                if !(*static_permittivity >= 1.0) || !static_permittivity.is_finite() {
                    return Err(Error::Config(format!(
                        "static permittivity must be ≥ 1, got {static_permittivity}"
                    )));
                }
                positive("resonance frequency", *resonance_frequency)?;
                if !(*damping >= 0.0) {
                    return Err(Error::Config("damping must be ≥ 0".into()));
                }
            }
            DielectricModel::Drude {
                plasma_frequency,
                damping,
            } => {
                positive("plasma frequency", *plasma_frequency)?;
                positive("damping", *damping)?;
            }
            DielectricModel::Plasma { plasma_frequency } => {
                positive("plasma frequency", *plasma_frequency)?;
            }
            DielectricModel::Constant { permittivity } => {
                if !(*permittivity >= 1.0) || !permittivity.is_finite() {
                    return Err(Error::Config(format!(
                        "permittivity must be ≥ 1, got {permittivity}"
                    )));
                }
            }
            DielectricModel::Tabulated {
                table,
                extrapolation,
                ..
            } => {
                if table.is_empty() {
                    return Err(Error::Config("optical data table is empty".into()));
                }
                match *extrapolation {
                    Extrapolation::None => {}
                    Extrapolation::Drude {
                        plasma_frequency,
                        damping,
                    } => {
                        positive("plasma frequency", plasma_frequency)?;
                        positive("damping", damping)?;
                    }
                    Extrapolation::Plasma { plasma_frequency } => {
                        positive("plasma frequency", plasma_frequency)?;
                    }
                }
            }
        }
        Ok(Self {
            name: name.into(),
            model,
        })
    }

    /// High-resistivity Si, single-oscillator fit.
    pub fn silicon() -> Self {
        Self::silicon_with(
            defaults::SILICON_STATIC_PERMITTIVITY,
            defaults::SILICON_RESONANCE_FREQUENCY,
        )
        .expect("default Si parameters are valid")
    }

    pub fn silicon_with(static_permittivity: f64, resonance_frequency: f64) -> Result<Self> {
        Self::new(
            "Si",
            DielectricModel::Oscillator {
                static_permittivity,
                resonance_frequency,
                damping: 0.0,
            },
        )
    }

    /// Au as a Drude metal with ħω_p = 9.0 eV, ħγ = 0.035 eV.
    pub fn gold() -> Self {
        Self::gold_drude(
            ev_to_angular_frequency(defaults::GOLD_PLASMA_ENERGY_EV),
            ev_to_angular_frequency(defaults::GOLD_DAMPING_ENERGY_EV),
        )
        .expect("default Au parameters are valid")
    }

    pub fn gold_drude(plasma_frequency: f64, damping: f64) -> Result<Self> {
        Self::new(
            "Au",
            DielectricModel::Drude {
                plasma_frequency,
                damping,
            },
        )
    }

    /// Au as a dissipationless plasma with the default ω_p.
    pub fn gold_plasma() -> Self {
        Self::new(
            "Au",
            DielectricModel::Plasma {
                plasma_frequency: ev_to_angular_frequency(defaults::GOLD_PLASMA_ENERGY_EV),
            },
        )
        .expect("default Au parameters are valid")
    }

    pub fn ideal_metal_proxy() -> Self {
        Self::new(
            "ideal-metal",
            DielectricModel::Constant {
                permittivity: defaults::IDEAL_METAL_PROXY_PERMITTIVITY,
            },
        )
        .expect("proxy permittivity is valid")
    }

    pub fn tabulated(
        name: impl Into<String>,
        table: OpticalDataTable,
        tails: TailPolicy,
        extrapolation: Extrapolation,
    ) -> Result<Self> {
        Self::new(
            name,
            DielectricModel::Tabulated {
                table: Arc::new(table),
                tails,
                extrapolation,
            },
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn model(&self) -> &DielectricModel {
        &self.model
    }

    pub fn kind(&self) -> ResponseKind {
        match self.model {
            DielectricModel::Tabulated { .. } => ResponseKind::TabulatedKk,
            _ => ResponseKind::AnalyticModel,
        }
    }

    pub fn extrapolation(&self) -> Extrapolation {
        match self.model {
            DielectricModel::Drude {
                plasma_frequency,
                damping,
            } => Extrapolation::Drude {
                plasma_frequency,
                damping,
            },
            DielectricModel::Plasma { plasma_frequency } => {
                Extrapolation::Plasma { plasma_frequency }
            }
            DielectricModel::Tabulated { extrapolation, .. } => extrapolation,
            _ => Extrapolation::None,
        }
    }

    // Tail policy actually used for a tabulated model.
    fn effective_tails(tails: TailPolicy, extrapolation: Extrapolation) -> TailPolicy {
        match extrapolation {
            Extrapolation::None => tails,
            Extrapolation::Drude {
                plasma_frequency,
                damping,
            } => TailPolicy {
                low: LowFrequencyTail::Drude {
                    plasma_frequency,
                    damping,
                },
                high: tails.high,
            },
            Extrapolation::Plasma { .. } => TailPolicy {
                low: LowFrequencyTail::Zero,
                high: tails.high,
            },
        }
    }

    /// ε(iξ) for ξ ≥ 0. Conductors return `f64::INFINITY` at ξ = 0; use
    /// [`static_response`](Self::static_response) for the zero-frequency limit.
    pub fn permittivity(&self, xi: f64) -> Result<f64> {
        if !(xi >= 0.0) || xi.is_nan() {
            return Err(Error::domain("xi", xi, "must be non-negative"));
        }
        if xi.is_infinite() {
            return Ok(match self.model {
                DielectricModel::Constant { permittivity } => permittivity,
                _ => 1.0,
            });
        }
        let eps = match &self.model {
            DielectricModel::Oscillator {
                static_permittivity,
                resonance_frequency,
                damping,
            } => {
                let w0 = *resonance_frequency;
                1.0 + (static_permittivity - 1.0) * w0 * w0 / (w0 * w0 + xi * xi + damping * xi)
            }
            DielectricModel::Drude {
                plasma_frequency,
                damping,
            } => {
                if xi == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 + plasma_frequency * plasma_frequency / (xi * (xi + damping))
                }
            }
            DielectricModel::Plasma { plasma_frequency } => {
                if xi == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 + (plasma_frequency / xi).powi(2)
                }
            }
            DielectricModel::Constant { permittivity } => *permittivity,
            DielectricModel::Tabulated {
                table,
                tails,
                extrapolation,
            } => {
                if xi == 0.0 && !matches!(extrapolation, Extrapolation::None) {
                    return Ok(f64::INFINITY);
                }
                let mut eps = kramers_kronig_transform(
                    table,
                    xi,
                    Self::effective_tails(*tails, *extrapolation),
                )?;
                if let Extrapolation::Plasma { plasma_frequency } = extrapolation {
                    eps += (plasma_frequency / xi).powi(2);
                }
                eps
            }
        };
        Ok(eps)
    }

    pub fn static_response(&self) -> Result<StaticResponse> {
        match self.extrapolation() {
            Extrapolation::Drude { .. } => Ok(StaticResponse::Drude),
            Extrapolation::Plasma { plasma_frequency } => {
                Ok(StaticResponse::Plasma { plasma_frequency })
            }
            Extrapolation::None => match &self.model {
                // A constant continuation of Im ε makes the transform diverge
                // logarithmically at ξ = 0. A dielectric has no dc absorption,
                // so the static value drops the sub-table tail instead.
                DielectricModel::Tabulated { table, tails, .. }
                    if tails.low == LowFrequencyTail::Constant =>
                {
                    let static_tails = TailPolicy {
                        low: LowFrequencyTail::Zero,
                        high: tails.high,
                    };
                    Ok(StaticResponse::Dielectric(kramers_kronig_transform(
                        table,
                        0.0,
                        static_tails,
                    )?))
                }
                _ => Ok(StaticResponse::Dielectric(self.permittivity(0.0)?)),
            },
        }
    }

    /// One-line description for output metadata.
    pub fn describe(&self) -> String {
        match &self.model {
            DielectricModel::Oscillator {
                static_permittivity,
                resonance_frequency,
                damping,
            } => format!(
                "{}: oscillator(eps_static={static_permittivity}, w0={resonance_frequency:e} rad/s, gamma={damping:e} rad/s)",
                self.name
            ),
            DielectricModel::Drude {
                plasma_frequency,
                damping,
            } => format!(
                "{}: drude(wp={plasma_frequency:e} rad/s, gamma={damping:e} rad/s)",
                self.name
            ),
            DielectricModel::Plasma { plasma_frequency } => {
                format!("{}: plasma(wp={plasma_frequency:e} rad/s)", self.name)
            }
            DielectricModel::Constant { permittivity } => {
                format!("{}: constant(eps={permittivity:e})", self.name)
            }
            DielectricModel::Tabulated {
                table,
                tails,
                extrapolation,
            } => format!(
                "{}: tabulated-kk({} rows, {:e}..{:e} rad/s, tails {}, extrapolation {})",
                self.name,
                table.len(),
                table.min_frequency(),
                table.max_frequency(),
                tails.describe(),
                extrapolation.label()
            ),
        }
    }
}

impl fmt::Display for MaterialResponse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Free-function form of [`MaterialResponse::permittivity`].
pub fn permittivity_at_imaginary_frequency(material: &MaterialResponse, xi: f64) -> Result<f64> {
    material.permittivity(xi)
}
