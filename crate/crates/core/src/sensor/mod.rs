//! Suspended-membrane pressure sensor: spring calibration, the pressure
//! balance, equilibrium search and collapse.
//!
//! The membrane sits at height z above the ground plate. The spring pushes it
//! up with pressure k(h − z)/(LD); the measured pressure P, the Casimir
//! pressure and an optional electrostatic pressure pull it down. Equilibria
//! are the zeros of
//!
//! ```text
//! g(z) = k(h − z)/(LD) − P − P_tot(z)
//! ```
//!
//! An equilibrium is stable when dg/dz < 0 there.

mod equilibrium;

use rayon::prelude::*;

pub use equilibrium::{
    find_collapse_pressure, find_equilibria, BracketDiagnostics, CollapseResult, Equilibrium,
    EquilibriumReport, SearchConfig, Stability,
};

use crate::constants::VACUUM_PERMITTIVITY;
use crate::error::{Error, Result};
use crate::lifshitz::{HalfSpacePair, LifshitzConfig, LifshitzSolver};
use crate::roughness::{
    casimir_roughness_factor, electric_roughness_factor, rough_electric_pressure,
    ElectrostaticSpec, RoughnessSpec,
};

const UM: f64 = 1e-6;

/// Spring constant from the unloaded condition k h = P₀ L D.
pub fn calibrate_spring(
    calibration_pressure: f64,
    suspension_height: f64,
    length: f64,
    width: f64,
) -> Result<f64> {
    for (name, v) in [
        ("calibration_pressure", calibration_pressure),
        ("suspension_height", suspension_height),
        ("length", length),
        ("width", width),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(name, v, "must be positive"));
        }
    }
    Ok(calibration_pressure * length * width / suspension_height)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SensorGeometry {
    /// L, m.
    pub length: f64,
    /// D, m.
    pub width: f64,
    /// H, m. Not used by the balance.
    pub thickness: f64,
    /// h, m.
    pub suspension_height: f64,
    /// k, N/m.
    pub spring_constant: f64,
    /// P₀, Pa.
    pub calibration_pressure: f64,
}

impl SensorGeometry {
    /// Geometry with k fixed by k h = P₀ L D.
    pub fn calibrated(
        length: f64,
        width: f64,
        thickness: f64,
        suspension_height: f64,
        calibration_pressure: f64,
    ) -> Result<Self> {
        let spring_constant =
            calibrate_spring(calibration_pressure, suspension_height, length, width)?;
        let g = Self {
            length,
            width,
            thickness,
            suspension_height,
            spring_constant,
            calibration_pressure,
        };
        g.validate()?;
        Ok(g)
    }

    /// 1000 µm × 200 µm × 30 µm membrane at h = 20 µm with P₀ = 3 kPa.
    pub fn reference() -> Self {
        Self::calibrated(1000.0 * UM, 200.0 * UM, 30.0 * UM, 20.0 * UM, 3000.0)
            .expect("reference geometry is valid")
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("length", self.length),
            ("width", self.width),
            ("thickness", self.thickness),
            ("suspension_height", self.suspension_height),
            ("spring_constant", self.spring_constant),
            ("calibration_pressure", self.calibration_pressure),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("geometry.{name} must be positive, got {v:e}")));
            }
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.length * self.width
    }

    /// k/(LD), the slope magnitude of the elastic line in Pa/m.
    pub fn elastic_stiffness(&self) -> f64 {
        self.spring_constant / self.area()
    }

    /// k(h − z)/(LD).
    pub fn spring_pressure(&self, z: f64) -> f64 {
        self.spring_constant * (self.suspension_height - z) / self.area()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensorScenario {
    pub geometry: SensorGeometry,
    pub pair: HalfSpacePair,
    pub roughness: RoughnessSpec,
    pub electrostatic: ElectrostaticSpec,
    /// P, Pa.
    pub measured_pressure: f64,
    pub lifshitz: LifshitzConfig,
    /// When false the Casimir pressure is left out of the balance.
    pub include_casimir: bool,
}

impl SensorScenario {
    /// Smooth surfaces, no voltage, 300 K.
    pub fn new(geometry: SensorGeometry, pair: HalfSpacePair, measured_pressure: f64) -> Self {
        Self {
            geometry,
            pair,
            roughness: RoughnessSpec::smooth(),
            electrostatic: ElectrostaticSpec::default(),
            measured_pressure,
            lifshitz: LifshitzConfig::default(),
            include_casimir: true,
        }
    }

    pub fn with_roughness(mut self, roughness: RoughnessSpec) -> Self {
        self.roughness = roughness;
        self
    }

    pub fn with_voltage(mut self, voltage: f64) -> Self {
        self.electrostatic = ElectrostaticSpec { voltage };
        self
    }

    pub fn with_pressure(mut self, measured_pressure: f64) -> Self {
        self.measured_pressure = measured_pressure;
        self
    }

    pub fn with_lifshitz(mut self, lifshitz: LifshitzConfig) -> Self {
        self.lifshitz = lifshitz;
        self
    }

    pub fn without_casimir(mut self) -> Self {
        self.include_casimir = false;
        self
    }

    pub fn temperature(&self) -> f64 {
        self.lifshitz.temperature
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.lifshitz.validate()?;
        let p = self.measured_pressure;
        if !(p >= 0.0) || !(p < self.geometry.calibration_pressure) {
            return Err(Error::Config(format!(
                "measured pressure must satisfy 0 ≤ P < P0 = {} Pa, got {p}",
                self.geometry.calibration_pressure
            )));
        }
        if !(self.electrostatic.voltage >= 0.0) || !self.electrostatic.voltage.is_finite() {
            return Err(Error::Config("voltage must be ≥ 0".into()));
        }
        if !(self.roughness.membrane >= 0.0) || !(self.roughness.plate >= 0.0) {
            return Err(Error::Config("roughness amplitudes must be ≥ 0".into()));
        }
        Ok(())
    }
}

/// One row of a balance-curve sweep, all pressures in Pa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalancePoint {
    pub z: f64,
    /// f(z) = k(h − z)/(LD) − P.
    pub elastic: f64,
    pub total_rough: f64,
    pub total_smooth: f64,
}

/// A scenario bound to a Lifshitz solver, so ε(iξ_l) is computed once for
/// all separations.
#[derive(Debug)]
pub struct SensorModel {
    scenario: SensorScenario,
    solver: Option<LifshitzSolver>,
}

impl SensorModel {
    pub fn new(scenario: SensorScenario) -> Result<Self> {
        scenario.validate()?;
        let solver = if scenario.include_casimir {
            Some(LifshitzSolver::new(scenario.pair.clone(), scenario.lifshitz)?)
        } else {
            None
        };
        Ok(Self { scenario, solver })
    }

    pub fn scenario(&self) -> &SensorScenario {
        &self.scenario
    }

    fn check_height(&self, z: f64) -> Result<()> {
        if z > 0.0 && z <= self.scenario.geometry.suspension_height {
            Ok(())
        } else {
            Err(Error::domain("z", z, "must lie in (0, h]"))
        }
    }

    /// f(z) = k(h − z)/(LD) − P.
    pub fn elastic_lhs(&self, z: f64) -> Result<f64> {
        self.check_height(z)?;
        Ok(self.scenario.geometry.spring_pressure(z) - self.scenario.measured_pressure)
    }

    /// Smooth-surface Casimir pressure (zero when Casimir is switched off).
    pub fn casimir_smooth(&self, z: f64) -> Result<f64> {
        match &self.solver {
            Some(s) => s.pressure(z),
            None => {
                if z > 0.0 {
                    Ok(0.0)
                } else {
                    Err(Error::domain("z", z, "separation must be positive"))
                }
            }
        }
    }

    fn electric(&self, rough: &RoughnessSpec, z: f64) -> Result<f64> {
        rough_electric_pressure(&self.scenario.electrostatic, rough, z)
    }

    /// (P_tot^R, P_tot^smooth) sharing one Lifshitz evaluation.
    pub fn total_pressures(&self, z: f64) -> Result<(f64, f64)> {
        let casimir = self.casimir_smooth(z)?;
        let smooth = RoughnessSpec::smooth();
        let total_smooth = casimir + self.electric(&smooth, z)?;
        let rough = &self.scenario.roughness;
        if rough.is_smooth() {
            return Ok((total_smooth, total_smooth));
        }
        let total_rough =
            casimir * casimir_roughness_factor(rough, z)? + self.electric(rough, z)?;
        Ok((total_rough, total_smooth))
    }

    /// P_C^R(z) + P_el^R(z).
    pub fn total_rough_pressure(&self, z: f64) -> Result<f64> {
        self.total_pressures(z).map(|p| p.0)
    }

    /// g(z) = f(z) − P_tot^R(z).
    pub fn balance(&self, z: f64) -> Result<f64> {
        Ok(self.elastic_lhs(z)? - self.total_rough_pressure(z)?)
    }

    /// dP_tot^R/dz by Richardson-extrapolated central differences.
    pub fn total_pressure_slope(&self, z: f64) -> Result<f64> {
        let central = |step: f64| -> Result<f64> {
            Ok((self.total_rough_pressure(z + step)? - self.total_rough_pressure(z - step)?)
                / (2.0 * step))
        };
        let step = 1e-3 * z;
        let coarse = central(step)?;
        let fine = central(0.5 * step)?;
        Ok((4.0 * fine - coarse) / 3.0)
    }

    /// dg/dz = −k/(LD) − dP_tot^R/dz.
    pub fn balance_slope(&self, z: f64) -> Result<f64> {
        Ok(-self.scenario.geometry.elastic_stiffness() - self.total_pressure_slope(z)?)
    }

    pub fn sweep(&self, z_grid: &[f64]) -> Result<Vec<BalancePoint>> {
        if z_grid.is_empty() {
            return Err(Error::Config("z grid is empty".into()));
        }
        if !z_grid.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Config("z grid must be strictly ascending".into()));
        }
        for &z in z_grid {
            self.check_height(z)?;
        }
        z_grid
            .par_iter()
            .map(|&z| {
                let (total_rough, total_smooth) = self.total_pressures(z)?;
                Ok(BalancePoint {
                    z,
                    elastic: self.elastic_lhs(z)?,
                    total_rough,
                    total_smooth,
                })
            })
            .collect()
    }

    /// U₀ that puts an equilibrium at `z`, which must come out stable.
    pub fn calibrate_voltage(&self, z: f64) -> Result<f64> {
        self.check_height(z)?;
        let rough = &self.scenario.roughness;
        let casimir = self.casimir_smooth(z)? * casimir_roughness_factor(rough, z)?;
        let excess = self.elastic_lhs(z)? - casimir;
        if !(excess > 0.0) {
            return Err(Error::Search(format!(
                "no voltage places an equilibrium at z = {:.3} nm: spring minus load minus Casimir is {excess:.6} Pa",
                z * 1e9
            )));
        }
        let voltage =
            (2.0 * z * z * excess / (VACUUM_PERMITTIVITY * electric_roughness_factor(rough, z)?))
                .sqrt();
        let calibrated = SensorModel::new(self.scenario.clone().with_voltage(voltage))?;
        let slope = calibrated.balance_slope(z)?;
        if !(slope < 0.0) {
            return Err(Error::Search(format!(
                "equilibrium at z = {:.3} nm with U0 = {voltage:.6} V is unstable (dg/dz = {slope:e})",
                z * 1e9
            )));
        }
        Ok(voltage)
    }
}

/// f(z) for a scenario.
pub fn elastic_lhs(scenario: &SensorScenario, z: f64) -> Result<f64> {
    scenario.validate()?;
    if !(z > 0.0 && z <= scenario.geometry.suspension_height) {
        return Err(Error::domain("z", z, "must lie in (0, h]"));
    }
    Ok(scenario.geometry.spring_pressure(z) - scenario.measured_pressure)
}

pub fn total_rough_pressure(scenario: &SensorScenario, z: f64) -> Result<f64> {
    SensorModel::new(scenario.clone())?.total_rough_pressure(z)
}

pub fn sweep_balance_curves(scenario: &SensorScenario, z_grid: &[f64]) -> Result<Vec<BalancePoint>> {
    SensorModel::new(scenario.clone())?.sweep(z_grid)
}

pub fn calibrate_voltage(scenario: &SensorScenario, stable_root: f64) -> Result<f64> {
    SensorModel::new(scenario.clone())?.calibrate_voltage(stable_root)
}
