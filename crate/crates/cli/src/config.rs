//! Run configuration: TOML with unit-suffixed values, `--set` overrides, and
//! a canonical SI re-serialization whose SHA-256 identifies the run.

use std::path::Path;

use nems_casimir::lifshitz::{HalfSpacePair, LifshitzConfig, QuadratureScheme};
use nems_casimir::materials::{
    defaults, load_optical_data, DielectricModel, Extrapolation, FrequencyUnit, HighFrequencyTail,
    LowFrequencyTail, MaterialResponse, TailPolicy,
};
use nems_casimir::roughness::{ElectrostaticSpec, RoughnessSpec, DEFAULT_VALIDITY_RATIO};
use nems_casimir::sensor::{SearchConfig, SensorGeometry, SensorScenario};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::units::{resolve, Kind, RawQuantity};

/// A configuration problem; maps to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ValidationError(pub String);

type VResult<T> = std::result::Result<T, ValidationError>;

fn invalid<T>(msg: impl Into<String>) -> VResult<T> {
    Err(ValidationError(msg.into()))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGeometry {
    pub length: Option<RawQuantity>,
    pub width: Option<RawQuantity>,
    pub thickness: Option<RawQuantity>,
    pub suspension_height: Option<RawQuantity>,
    pub calibration_pressure: Option<RawQuantity>,
    /// Derived from k h = P₀ L D when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spring_constant: Option<RawQuantity>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMaterial {
    /// oscillator | drude | plasma | constant | tabulated
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub static_permittivity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resonance_frequency: Option<RawQuantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plasma_frequency: Option<RawQuantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub damping: Option<RawQuantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permittivity: Option<f64>,
    /// Optical data file, relative to the config file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
    /// eV | rad/s
    #[serde(skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
    /// none | drude | plasma
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extrapolation: Option<String>,
    /// constant | zero
    #[serde(skip_serializing_if = "Option::is_none")]
    pub low_tail: Option<String>,
    /// inverse-cube | zero
    #[serde(skip_serializing_if = "Option::is_none")]
    pub high_tail: Option<String>,
}

/// Either a short name ("Si", "Au", "Au-plasma", "ideal-metal") or a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaterialEntry {
    Name(String),
    Spec(RawMaterial),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMaterials {
    pub membrane: MaterialEntry,
    pub plate: MaterialEntry,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRoughness {
    pub membrane: Option<RawQuantity>,
    pub plate: Option<RawQuantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation_length: Option<RawQuantity>,
    pub validity_ratio: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawElectrostatics {
    pub voltage: Option<RawQuantity>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLoad {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pressure: Option<RawQuantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pressures: Option<Vec<RawQuantity>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPhysics {
    pub temperature: Option<RawQuantity>,
    /// Include the Casimir pressure (default true).
    pub casimir: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSolver {
    pub matsubara_rel_tolerance: Option<f64>,
    pub matsubara_max_terms: Option<usize>,
    pub quadrature_rel_tolerance: Option<f64>,
    /// adaptive | gauss-laguerre
    pub quadrature: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub laguerre_nodes: Option<usize>,
    pub z_min: Option<RawQuantity>,
    pub grid_points: Option<usize>,
    pub root_tolerance: Option<RawQuantity>,
    pub residual_tolerance: Option<RawQuantity>,
    pub pressure_tolerance: Option<RawQuantity>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<RawQuantity>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_start: Option<RawQuantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_stop: Option<RawQuantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCalibrate {
    pub target_stable_root: Option<RawQuantity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub geometry: RawGeometry,
    pub materials: RawMaterials,
    #[serde(default)]
    pub roughness: RawRoughness,
    #[serde(default)]
    pub electrostatics: RawElectrostatics,
    #[serde(default)]
    pub load: RawLoad,
    #[serde(default)]
    pub physics: RawPhysics,
    #[serde(default)]
    pub solver: RawSolver,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<RawSweep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibrate: Option<RawCalibrate>,
}

/// Fully resolved configuration in SI.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Scenario with the first load pressure (0 when no load is given).
    pub scenario: SensorScenario,
    pub pressures: Vec<f64>,
    pub search: SearchConfig,
    /// Sweep grid, m. `None` when the config has no [sweep] section.
    pub sweep: Option<Vec<f64>>,
    pub calibrate_target: Option<f64>,
    pub canonical: String,
    pub hash: String,
}

/// Apply `key.path=value` overrides to a parsed TOML document. Values are
/// read as TOML when possible and as strings otherwise, so both
/// `load.pressure=2979` and `load.pressure=2.979 kPa` work.
pub fn apply_overrides(doc: &mut toml::Table, overrides: &[String]) -> VResult<()> {
    for item in overrides {
        let Some((key, raw)) = item.split_once('=') else {
            return invalid(format!("--set {item:?}: expected key=value"));
        };
        let key = key.trim();
        let raw = raw.trim();
        let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.to_string()));
        let parts: Vec<&str> = key.split('.').collect();
        if parts.iter().any(|p| p.is_empty()) {
            return invalid(format!("--set {item:?}: malformed key"));
        }
        let mut table = &mut *doc;
        for part in &parts[..parts.len() - 1] {
            let entry = table
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            table = match entry {
                toml::Value::Table(t) => t,
                _ => return invalid(format!("--set {key}: {part} is not a table")),
            };
        }
        table.insert(parts[parts.len() - 1].to_string(), value);
    }
    Ok(())
}

pub fn parse_raw(text: &str, overrides: &[String]) -> VResult<RawConfig> {
    let mut doc: toml::Table =
        toml::from_str(text).map_err(|e| ValidationError(format!("config: {e}")))?;
    apply_overrides(&mut doc, overrides)?;
    toml::Value::Table(doc)
        .try_into()
        .map_err(|e| ValidationError(format!("config: {e}")))
}

/// Read, override, resolve. `base_dir` anchors relative table paths.
pub fn load(path: &Path, overrides: &[String]) -> VResult<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ValidationError(format!("config {}: {e}", path.display())))?;
    let raw = parse_raw(&text, overrides)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    resolve_config(&raw, base)
}

fn q(raw: &Option<RawQuantity>, kind: Kind, path: &str, default: Option<f64>) -> VResult<f64> {
    match raw {
        Some(r) => resolve(r, kind, path).map_err(ValidationError),
        None => default.ok_or_else(|| ValidationError(format!("{path}: required"))),
    }
}

fn num(v: f64) -> Option<RawQuantity> {
    Some(RawQuantity::Number(v))
}

fn positive(v: f64, path: &str) -> VResult<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        invalid(format!("{path}: must be positive, got {v}"))
    }
}

fn resolve_material(entry: &MaterialEntry, path: &str, base: &Path) -> VResult<(MaterialResponse, RawMaterial)> {
    let au_wp = nems_casimir::constants::ev_to_angular_frequency(defaults::GOLD_PLASMA_ENERGY_EV);
    let au_gamma = nems_casimir::constants::ev_to_angular_frequency(defaults::GOLD_DAMPING_ENERGY_EV);
    let spec = match entry {
        MaterialEntry::Name(name) => match name.as_str() {
            "Si" => RawMaterial {
                model: Some("oscillator".into()),
                ..Default::default()
            },
            "Au" => RawMaterial {
                model: Some("drude".into()),
                ..Default::default()
            },
            "Au-plasma" => RawMaterial {
                model: Some("plasma".into()),
                ..Default::default()
            },
            "ideal-metal" => RawMaterial {
                model: Some("constant".into()),
                ..Default::default()
            },
            other => {
                return invalid(format!(
                    "{path}: unknown material {other:?} (Si, Au, Au-plasma, ideal-metal, or a table)"
                ))
            }
        },
        MaterialEntry::Spec(spec) => spec.clone(),
    };
    let display_name = match entry {
        MaterialEntry::Name(n) => n.clone(),
        MaterialEntry::Spec(s) => s.table.clone().unwrap_or_else(|| s.model.clone().unwrap_or_default()),
    };
    let model = spec
        .model
        .clone()
        .or_else(|| spec.table.as_ref().map(|_| "tabulated".to_string()))
        .ok_or_else(|| ValidationError(format!("{path}.model: required")))?;
    let field = |name: &str| format!("{path}.{name}");
    let mut canonical = RawMaterial {
        model: Some(model.clone()),
        ..Default::default()
    };
    let dielectric = match model.as_str() {
        "oscillator" => {
            let eps = spec.static_permittivity.unwrap_or(defaults::SILICON_STATIC_PERMITTIVITY);
            let w0 = q(&spec.resonance_frequency, Kind::Frequency, &field("resonance_frequency"), Some(defaults::SILICON_RESONANCE_FREQUENCY))?;
            let gamma = q(&spec.damping, Kind::Frequency, &field("damping"), Some(0.0))?;
            canonical.static_permittivity = Some(eps);
            canonical.resonance_frequency = num(w0);
            canonical.damping = num(gamma);
            DielectricModel::Oscillator {
                static_permittivity: eps,
                resonance_frequency: w0,
                damping: gamma,
            }
        }
        "drude" => {
            let wp = q(&spec.plasma_frequency, Kind::Frequency, &field("plasma_frequency"), Some(au_wp))?;
            let gamma = q(&spec.damping, Kind::Frequency, &field("damping"), Some(au_gamma))?;
            canonical.plasma_frequency = num(wp);
            canonical.damping = num(gamma);
            DielectricModel::Drude {
                plasma_frequency: wp,
                damping: gamma,
            }
        }
        "plasma" => {
            let wp = q(&spec.plasma_frequency, Kind::Frequency, &field("plasma_frequency"), Some(au_wp))?;
            canonical.plasma_frequency = num(wp);
            DielectricModel::Plasma { plasma_frequency: wp }
        }
        "constant" => {
            let eps = spec.permittivity.unwrap_or(defaults::IDEAL_METAL_PROXY_PERMITTIVITY);
            canonical.permittivity = Some(eps);
            DielectricModel::Constant { permittivity: eps }
        }
        "tabulated" => {
            let rel = spec
                .table
                .clone()
                .ok_or_else(|| ValidationError(format!("{}: required for tabulated data", field("table"))))?;
            let file = base.join(&rel);
            if !file.is_file() {
                return invalid(format!("{}: data file {} does not exist", field("table"), file.display()));
            }
            let unit = match spec.units.as_deref().unwrap_or("eV") {
                "eV" => FrequencyUnit::ElectronVolt,
                "rad/s" => FrequencyUnit::RadPerSecond,
                other => return invalid(format!("{}: expected eV or rad/s, got {other:?}", field("units"))),
            };
            let low = match spec.low_tail.as_deref().unwrap_or("constant") {
                "constant" => LowFrequencyTail::Constant,
                "zero" => LowFrequencyTail::Zero,
                other => return invalid(format!("{}: expected constant or zero, got {other:?}", field("low_tail"))),
            };
            let high = match spec.high_tail.as_deref().unwrap_or("inverse-cube") {
                "inverse-cube" => HighFrequencyTail::InverseCube,
                "zero" => HighFrequencyTail::Zero,
                other => {
                    return invalid(format!("{}: expected inverse-cube or zero, got {other:?}", field("high_tail")))
                }
            };
            let extrapolation_name = spec.extrapolation.clone().unwrap_or_else(|| "none".into());
            let extrapolation = match extrapolation_name.as_str() {
                "none" => Extrapolation::None,
                "drude" => {
                    let wp = q(&spec.plasma_frequency, Kind::Frequency, &field("plasma_frequency"), Some(au_wp))?;
                    let gamma = q(&spec.damping, Kind::Frequency, &field("damping"), Some(au_gamma))?;
                    canonical.plasma_frequency = num(wp);
                    canonical.damping = num(gamma);
                    Extrapolation::Drude {
                        plasma_frequency: wp,
                        damping: gamma,
                    }
                }
                "plasma" => {
                    let wp = q(&spec.plasma_frequency, Kind::Frequency, &field("plasma_frequency"), Some(au_wp))?;
                    canonical.plasma_frequency = num(wp);
                    Extrapolation::Plasma { plasma_frequency: wp }
                }
                other => {
                    return invalid(format!("{}: expected none, drude or plasma, got {other:?}", field("extrapolation")))
                }
            };
            let reader = std::fs::File::open(&file)
                .map_err(|e| ValidationError(format!("{}: {}: {e}", field("table"), file.display())))?;
            let table = load_optical_data(std::io::BufReader::new(reader), unit)
                .map_err(|e| ValidationError(format!("{}: {}: {e}", field("table"), file.display())))?;
            canonical.table = Some(rel);
            canonical.units = spec.units.clone().or(Some("eV".into()));
            canonical.extrapolation = Some(extrapolation_name);
            canonical.low_tail = Some(spec.low_tail.clone().unwrap_or_else(|| "constant".into()));
            canonical.high_tail = Some(spec.high_tail.clone().unwrap_or_else(|| "inverse-cube".into()));
            return MaterialResponse::tabulated(display_name, table, TailPolicy { low, high }, extrapolation)
                .map(|m| (m, canonical))
                .map_err(|e| ValidationError(format!("{path}: {e}")));
        }
        other => {
            return invalid(format!(
                "{}: unknown model {other:?} (oscillator, drude, plasma, constant, tabulated)",
                field("model")
            ))
        }
    };
    let name = match entry {
        MaterialEntry::Name(n) => n.clone(),
        MaterialEntry::Spec(_) => model,
    };
    MaterialResponse::new(name, dielectric)
        .map(|m| (m, canonical))
        .map_err(|e| ValidationError(format!("{path}: {e}")))
}

pub fn resolve_config(raw: &RawConfig, base: &Path) -> VResult<RunConfig> {
    const UM: f64 = 1e-6;
    let g = &raw.geometry;
    let length = positive(q(&g.length, Kind::Length, "geometry.length", Some(1000.0 * UM))?, "geometry.length")?;
    let width = positive(q(&g.width, Kind::Length, "geometry.width", Some(200.0 * UM))?, "geometry.width")?;
    let thickness =
        positive(q(&g.thickness, Kind::Length, "geometry.thickness", Some(30.0 * UM))?, "geometry.thickness")?;
    let height = positive(
        q(&g.suspension_height, Kind::Length, "geometry.suspension_height", Some(20.0 * UM))?,
        "geometry.suspension_height",
    )?;
    let p0 = positive(
        q(&g.calibration_pressure, Kind::Pressure, "geometry.calibration_pressure", Some(3000.0))?,
        "geometry.calibration_pressure",
    )?;
    let mut geometry = SensorGeometry::calibrated(length, width, thickness, height, p0)
        .map_err(|e| ValidationError(format!("geometry: {e}")))?;
    if g.spring_constant.is_some() {
        geometry.spring_constant = positive(
            q(&g.spring_constant, Kind::Stiffness, "geometry.spring_constant", None)?,
            "geometry.spring_constant",
        )?;
    }

    let (membrane, membrane_canon) = resolve_material(&raw.materials.membrane, "materials.membrane", base)?;
    let (plate, plate_canon) = resolve_material(&raw.materials.plate, "materials.plate", base)?;

    let r = &raw.roughness;
    let d1 = q(&r.membrane, Kind::Length, "roughness.membrane", Some(0.0))?;
    let d2 = q(&r.plate, Kind::Length, "roughness.plate", Some(0.0))?;
    let ratio = r.validity_ratio.unwrap_or(DEFAULT_VALIDITY_RATIO);
    let mut roughness = RoughnessSpec::new(d1, d2)
        .map_err(|e| ValidationError(format!("roughness: {e}")))?
        .with_validity_ratio(ratio);
    let correlation = match &r.correlation_length {
        Some(c) => {
            let c = positive(resolve(c, Kind::Length, "roughness.correlation_length").map_err(ValidationError)?, "roughness.correlation_length")?;
            roughness = roughness.with_correlation_length(c);
            Some(c)
        }
        None => None,
    };

    let voltage = q(&raw.electrostatics.voltage, Kind::Voltage, "electrostatics.voltage", Some(0.0))?;
    let electrostatic = ElectrostaticSpec::new(voltage).map_err(|e| ValidationError(format!("electrostatics: {e}")))?;

    let pressures = match (&raw.load.pressure, &raw.load.pressures) {
        (Some(_), Some(_)) => return invalid("load: give either pressure or pressures, not both"),
        (Some(p), None) => vec![resolve(p, Kind::Pressure, "load.pressure").map_err(ValidationError)?],
        (None, Some(list)) => list
            .iter()
            .enumerate()
            .map(|(i, p)| resolve(p, Kind::Pressure, &format!("load.pressures[{i}]")).map_err(ValidationError))
            .collect::<VResult<Vec<f64>>>()?,
        (None, None) => Vec::new(),
    };
    for (i, &p) in pressures.iter().enumerate() {
        if !(p >= 0.0 && p < p0) {
            return invalid(format!("load.pressures[{i}]: must satisfy 0 ≤ P < P0 = {p0} Pa, got {p}"));
        }
    }

    let temperature = positive(
        q(&raw.physics.temperature, Kind::Temperature, "physics.temperature", Some(300.0))?,
        "physics.temperature",
    )?;
    let include_casimir = raw.physics.casimir.unwrap_or(true);

    let s = &raw.solver;
    let defaults_l = LifshitzConfig::default();
    let quadrature_name = s.quadrature.clone().unwrap_or_else(|| "adaptive".into());
    let quadrature_scheme = match quadrature_name.as_str() {
        "adaptive" => QuadratureScheme::Adaptive,
        "gauss-laguerre" => QuadratureScheme::GaussLaguerre {
            nodes: s.laguerre_nodes.unwrap_or(64),
        },
        other => return invalid(format!("solver.quadrature: expected adaptive or gauss-laguerre, got {other:?}")),
    };
    let lifshitz = LifshitzConfig {
        temperature,
        matsubara_rel_tolerance: s.matsubara_rel_tolerance.unwrap_or(defaults_l.matsubara_rel_tolerance),
        matsubara_max_terms: s.matsubara_max_terms.unwrap_or(defaults_l.matsubara_max_terms),
        quadrature_rel_tolerance: s.quadrature_rel_tolerance.unwrap_or(defaults_l.quadrature_rel_tolerance),
        quadrature_scheme,
    };
    lifshitz.validate().map_err(|e| ValidationError(format!("solver: {e}")))?;
    let defaults_s = SearchConfig::default();
    let search = SearchConfig {
        z_min: q(&s.z_min, Kind::Length, "solver.z_min", Some(defaults_s.z_min))?,
        grid_points: s.grid_points.unwrap_or(defaults_s.grid_points),
        root_tolerance: q(&s.root_tolerance, Kind::Length, "solver.root_tolerance", Some(defaults_s.root_tolerance))?,
        residual_tolerance: q(
            &s.residual_tolerance,
            Kind::Pressure,
            "solver.residual_tolerance",
            Some(defaults_s.residual_tolerance),
        )?,
        pressure_tolerance: q(
            &s.pressure_tolerance,
            Kind::Pressure,
            "solver.pressure_tolerance",
            Some(defaults_s.pressure_tolerance),
        )?,
    };
    search.validate(height).map_err(|e| ValidationError(format!("solver: {e}")))?;

    let (sweep, sweep_canon) = match &raw.sweep {
        None => (None, None),
        Some(sw) => {
            let (grid, canon) = match (&sw.z, &sw.z_start, &sw.z_stop, sw.points) {
                (Some(list), None, None, None) => {
                    let grid = list
                        .iter()
                        .enumerate()
                        .map(|(i, z)| resolve(z, Kind::Length, &format!("sweep.z[{i}]")).map_err(ValidationError))
                        .collect::<VResult<Vec<f64>>>()?;
                    let canon = RawSweep {
                        z: Some(grid.iter().map(|&z| RawQuantity::Number(z)).collect()),
                        ..Default::default()
                    };
                    (grid, canon)
                }
                (None, Some(a), Some(b), Some(n)) => {
                    let a = resolve(a, Kind::Length, "sweep.z_start").map_err(ValidationError)?;
                    let b = resolve(b, Kind::Length, "sweep.z_stop").map_err(ValidationError)?;
                    let grid = match n {
                        0 => Vec::new(),
                        1 => vec![a],
                        n => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
                    };
                    let canon = RawSweep {
                        z_start: num(a),
                        z_stop: num(b),
                        points: Some(n),
                        ..Default::default()
                    };
                    (grid, canon)
                }
                _ => return invalid("sweep: give either z = [...] or all of z_start, z_stop, points"),
            };
            if grid.is_empty() {
                return invalid("sweep.z: grid is empty");
            }
            if !grid.windows(2).all(|w| w[1] > w[0]) {
                return invalid("sweep.z: grid must be strictly ascending");
            }
            if let Some(&z) = grid.iter().find(|&&z| !(z > 0.0 && z <= height)) {
                return invalid(format!("sweep.z: {z:e} m lies outside (0, h]"));
            }
            (Some(grid), Some(canon))
        }
    };

    let calibrate_target = match &raw.calibrate {
        Some(c) => Some(positive(
            q(&c.target_stable_root, Kind::Length, "calibrate.target_stable_root", None)?,
            "calibrate.target_stable_root",
        )?),
        None => None,
    };

    let canonical_raw = RawConfig {
        geometry: RawGeometry {
            length: num(length),
            width: num(width),
            thickness: num(thickness),
            suspension_height: num(height),
            calibration_pressure: num(p0),
            spring_constant: num(geometry.spring_constant),
        },
        materials: RawMaterials {
            membrane: MaterialEntry::Spec(membrane_canon),
            plate: MaterialEntry::Spec(plate_canon),
        },
        roughness: RawRoughness {
            membrane: num(d1),
            plate: num(d2),
            correlation_length: correlation.and_then(num),
            validity_ratio: Some(ratio),
        },
        electrostatics: RawElectrostatics { voltage: num(voltage) },
        load: match (&raw.load.pressure, &raw.load.pressures) {
            (Some(_), None) => RawLoad {
                pressure: num(pressures[0]),
                pressures: None,
            },
            (None, Some(_)) => RawLoad {
                pressure: None,
                pressures: Some(pressures.iter().map(|&p| RawQuantity::Number(p)).collect()),
            },
            _ => RawLoad::default(),
        },
        physics: RawPhysics {
            temperature: num(temperature),
            casimir: Some(include_casimir),
        },
        solver: RawSolver {
            matsubara_rel_tolerance: Some(lifshitz.matsubara_rel_tolerance),
            matsubara_max_terms: Some(lifshitz.matsubara_max_terms),
            quadrature_rel_tolerance: Some(lifshitz.quadrature_rel_tolerance),
            quadrature: Some(quadrature_name),
            laguerre_nodes: match quadrature_scheme {
                QuadratureScheme::GaussLaguerre { nodes } => Some(nodes),
                QuadratureScheme::Adaptive => None,
            },
            z_min: num(search.z_min),
            grid_points: Some(search.grid_points),
            root_tolerance: num(search.root_tolerance),
            residual_tolerance: num(search.residual_tolerance),
            pressure_tolerance: num(search.pressure_tolerance),
        },
        sweep: sweep_canon,
        calibrate: calibrate_target.map(|z| RawCalibrate {
            target_stable_root: num(z),
        }),
    };
    let canonical =
        toml::to_string(&canonical_raw).map_err(|e| ValidationError(format!("canonical form: {e}")))?;
    let hash = hex::encode(Sha256::digest(canonical.as_bytes()));

    let mut scenario = SensorScenario::new(
        geometry,
        HalfSpacePair::new(membrane, plate),
        pressures.first().copied().unwrap_or(0.0),
    )
    .with_roughness(roughness)
    .with_lifshitz(lifshitz);
    scenario.electrostatic = electrostatic;
    scenario.include_casimir = include_casimir;
    scenario.validate().map_err(|e| ValidationError(format!("scenario: {e}")))?;

    Ok(RunConfig {
        scenario,
        pressures,
        search,
        sweep,
        calibrate_target,
        canonical,
        hash,
    })
}
