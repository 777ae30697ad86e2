use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use log::info;
use nems_casimir::sensor::{find_collapse_pressure, SensorModel};

use crate::config::{RunConfig, ValidationError};
use crate::output;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Equilibria,
    Collapse,
    Sweep,
    CalibrateVoltage,
}

fn write(out_dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    output::write(out_dir, name, contents).with_context(|| format!("writing {}", out_dir.join(name).display()))
}

/// Execute one mode and return the files written, the resolved SI config
/// first.
pub fn run(mode: Mode, config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = vec![write(out_dir, "resolved_config.toml", &config.canonical)?];
    files.extend(run_mode(mode, config, out_dir)?);
    Ok(files)
}

fn run_mode(mode: Mode, config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    match mode {
        Mode::Equilibria => {
            if config.pressures.is_empty() {
                return Err(ValidationError("load.pressure: required for equilibria".into()).into());
            }
            let mut reports = Vec::with_capacity(config.pressures.len());
            for &p in &config.pressures {
                let model = SensorModel::new(config.scenario.clone().with_pressure(p))?;
                let report = model.find_equilibria(&config.search)?;
                if report.collapsed() {
                    println!("P = {p:.3} Pa: no equilibrium, membrane collapses");
                }
                for r in &report.roots {
                    println!("P = {p:.3} Pa: {} equilibrium at {:.4} nm", r.stability.as_str(), r.position * 1e9);
                }
                reports.push((p, report));
            }
            Ok(vec![write(out_dir, "equilibria.csv", &output::equilibria_csv(config, &reports))?])
        }
        Mode::Collapse => {
            let res = find_collapse_pressure(&config.scenario, &config.search)?;
            println!(
                "critical pressure {:.3} Pa (tangent at {:.4} nm)",
                res.critical_pressure,
                res.tangent_separation * 1e9
            );
            Ok(vec![write(out_dir, "collapse.csv", &output::collapse_csv(config, &res))?])
        }
        Mode::Sweep => {
            let grid = config
                .sweep
                .as_ref()
                .ok_or_else(|| ValidationError("sweep: section required for sweep mode".into()))?;
            let rows = SensorModel::new(config.scenario.clone())?.sweep(grid)?;
            info!("evaluated {} sweep points", rows.len());
            Ok(vec![write(out_dir, "curve.csv", &output::curve_csv(config, &rows))?])
        }
        Mode::CalibrateVoltage => {
            let target = config
                .calibrate_target
                .ok_or_else(|| ValidationError("calibrate.target_stable_root: required".into()))?;
            if config.pressures.is_empty() {
                return Err(ValidationError("load.pressure: required for calibrate-voltage".into()).into());
            }
            let voltage = SensorModel::new(config.scenario.clone())?.calibrate_voltage(target)?;
            let report = SensorModel::new(config.scenario.clone().with_voltage(voltage))?.find_equilibria(&config.search)?;
            println!("U0 = {voltage:.8} V puts a stable equilibrium at {:.4} nm", target * 1e9);
            Ok(vec![write(
                out_dir,
                "calibration.csv",
                &output::calibration_csv(config, target, voltage, &report),
            )?])
        }
    }
}
