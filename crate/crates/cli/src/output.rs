//! CSV artifacts with a `#` metadata header. No timestamps: identical
//! configs give byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use nems_casimir::lifshitz::QuadratureScheme;
use nems_casimir::materials::{DielectricModel, MaterialResponse};
use nems_casimir::sensor::{BalancePoint, CollapseResult, EquilibriumReport};

use crate::config::RunConfig;

const FORMAT_NOTE: &str = "z_nm %.4f; pressures Pa %.6f; slopes Pa/nm %.6e; voltage V %.8f";

fn tails_label(m: &MaterialResponse) -> String {
    match m.model() {
        DielectricModel::Tabulated { tails, .. } => tails.describe(),
        _ => "n/a".into(),
    }
}

/// Header shared by every output file.
pub fn metadata(mode: &str, config: &RunConfig) -> String {
    let s = &config.scenario;
    let l = &s.lifshitz;
    let quadrature = match l.quadrature_scheme {
        QuadratureScheme::Adaptive => "adaptive G7K15".to_string(),
        QuadratureScheme::GaussLaguerre { nodes } => format!("gauss-laguerre {nodes} nodes"),
    };
    let mut h = String::new();
    let mut line = |k: &str, v: String| {
        let _ = writeln!(h, "# {k}: {v}");
    };
    line("tool", format!("nemsc {} {mode}", env!("CARGO_PKG_VERSION")));
    line("config_sha256", config.hash.clone());
    line("membrane", s.pair.membrane.describe());
    line("plate", s.pair.plate.describe());
    line(
        "extrapolation",
        format!(
            "membrane={} plate={}",
            s.pair.membrane.extrapolation().label(),
            s.pair.plate.extrapolation().label()
        ),
    );
    line(
        "kk_tails",
        format!("membrane={} plate={}", tails_label(&s.pair.membrane), tails_label(&s.pair.plate)),
    );
    line("temperature_K", format!("{}", l.temperature));
    line("casimir", format!("{}", s.include_casimir));
    line(
        "roughness_nm",
        format!("membrane={:.4} plate={:.4}", s.roughness.membrane * 1e9, s.roughness.plate * 1e9),
    );
    line("voltage_V", format!("{}", s.electrostatic.voltage));
    line(
        "matsubara",
        format!("rel_tol={:e} max_terms={}", l.matsubara_rel_tolerance, l.matsubara_max_terms),
    );
    line("quadrature", format!("{quadrature} rel_tol={:e}", l.quadrature_rel_tolerance));
    line(
        "search",
        format!(
            "z_min_nm={} grid_points={} root_tol_nm={} residual_tol_Pa={:e} pressure_tol_Pa={:e}",
            config.search.z_min * 1e9,
            config.search.grid_points,
            config.search.root_tolerance * 1e9,
            config.search.residual_tolerance,
            config.search.pressure_tolerance
        ),
    );
    line("format", FORMAT_NOTE.into());
    h
}

pub fn equilibria_csv(config: &RunConfig, reports: &[(f64, EquilibriumReport)]) -> String {
    let mut out = metadata("equilibria", config);
    out.push_str("pressure_Pa,z_nm,stability,dg_dz_Pa_per_nm,residual_Pa,perturbative\n");
    for (p, report) in reports {
        if report.collapsed() {
            let _ = writeln!(out, "{p:.6},,collapsed,,,");
        }
        for r in &report.roots {
            let _ = writeln!(
                out,
                "{p:.6},{:.4},{},{:.6e},{:.6},{}",
                r.position * 1e9,
                r.stability.as_str(),
                r.slope * 1e-9,
                r.residual,
                r.perturbative
            );
        }
    }
    out
}

pub fn collapse_csv(config: &RunConfig, res: &CollapseResult) -> String {
    let mut out = metadata("collapse", config);
    out.push_str("p_crit_Pa,tangent_z_nm,pressure_tolerance_Pa\n");
    let _ = writeln!(
        out,
        "{:.6},{:.4},{:.6}",
        res.critical_pressure,
        res.tangent_separation * 1e9,
        config.search.pressure_tolerance
    );
    out
}

pub fn curve_csv(config: &RunConfig, rows: &[BalancePoint]) -> String {
    let mut out = metadata("sweep", config);
    out.push_str("z_nm,f_Pa,p_tot_rough_Pa,p_tot_smooth_Pa\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{:.4},{:.6},{:.6},{:.6}",
            r.z * 1e9,
            r.elastic,
            r.total_rough,
            r.total_smooth
        );
    }
    out
}

pub fn calibration_csv(config: &RunConfig, target: f64, voltage: f64, report: &EquilibriumReport) -> String {
    let mut out = metadata("calibrate-voltage", config);
    out.push_str("target_z_nm,voltage_V,unstable_z_nm,stable_z_nm\n");
    let fmt = |r: Option<&nems_casimir::sensor::Equilibrium>| {
        r.map(|e| format!("{:.4}", e.position * 1e9)).unwrap_or_default()
    };
    let _ = writeln!(
        out,
        "{:.4},{voltage:.8},{},{}",
        target * 1e9,
        fmt(report.unstable()),
        fmt(report.stable())
    );
    out
}

pub fn write(dir: &Path, name: &str, contents: &str) -> std::io::Result<std::path::PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}
