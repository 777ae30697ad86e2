//! Casimir and electrostatic forces on a rough suspended membrane, and the
//! equilibria of a pressure sensor built from it.
//!
//! Units are SI throughout: metres, pascals, kelvin, rad/s, volts.

pub mod constants;
pub mod error;
pub mod lifshitz;
pub mod materials;
pub mod quadrature;
pub mod roughness;
pub mod sensor;

pub use error::{Error, Result};
pub use lifshitz::{casimir_pressure, HalfSpacePair, LifshitzConfig, LifshitzSolver, QuadratureScheme};
pub use materials::{MaterialResponse, OpticalDataTable};
pub use roughness::{ElectrostaticSpec, RoughnessSpec};
pub use sensor::{
    calibrate_voltage, find_collapse_pressure, find_equilibria, sweep_balance_curves, SearchConfig,
    SensorGeometry, SensorModel, SensorScenario, Stability,
};
