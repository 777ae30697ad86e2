use log::{debug, warn};
use rayon::prelude::*;

use super::{SensorModel, SensorScenario};
use crate::error::{Error, Result};

const MAX_BISECTIONS: usize = 200;
const GOLDEN_ITERATIONS: usize = 120;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SearchConfig {
    /// Lower end of the search window, m. The upper end is h.
    pub z_min: f64,
    /// Number of log-spaced scan points.
    pub grid_points: usize,
    /// Bracket width at which bisection stops, m.
    pub root_tolerance: f64,
    /// Largest accepted |g| at a reported root, Pa.
    pub residual_tolerance: f64,
    /// Absolute tolerance on the critical pressure, Pa.
    pub pressure_tolerance: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            z_min: 20e-9,
            grid_points: 200,
            root_tolerance: 0.01e-9,
            residual_tolerance: 1e-3,
            pressure_tolerance: 1e-3,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self, suspension_height: f64) -> Result<()> {
        if !(self.z_min > 0.0) || !(self.z_min < suspension_height) {
            return Err(Error::Config(format!(
                "search window lower bound {:e} m must lie in (0, h)",
                self.z_min
            )));
        }
        if self.grid_points < 3 {
            return Err(Error::Config("search grid needs at least 3 points".into()));
        }
        for (name, v) in [
            ("root_tolerance", self.root_tolerance),
            ("residual_tolerance", self.residual_tolerance),
            ("pressure_tolerance", self.pressure_tolerance),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v:e}")));
            }
        }
        Ok(())
    }

    /// Log-spaced scan grid from z_min to `z_max`, both included.
    pub fn grid(&self, z_max: f64) -> Vec<f64> {
        let n = self.grid_points;
        let ratio = (z_max / self.z_min).ln();
        let mut grid: Vec<f64> = (0..n)
            .map(|i| self.z_min * (ratio * i as f64 / (n - 1) as f64).exp())
            .collect();
        grid[n - 1] = z_max;
        grid
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub position: f64,
    pub stability: Stability,
    /// dg/dz at the root, Pa/m. Negative means stable.
    pub slope: f64,
    /// g at the reported position, Pa.
    pub residual: f64,
    /// √s/z at the root is within the roughness validity ratio.
    pub perturbative: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketDiagnostics {
    pub z_min: f64,
    pub z_max: f64,
    pub grid_points: usize,
    pub sign_changes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    /// Ascending in z.
    pub roots: Vec<Equilibrium>,
    pub bracket: BracketDiagnostics,
}

impl EquilibriumReport {
    pub fn root_count(&self) -> usize {
        self.roots.len()
    }

    /// No equilibrium inside the window: the membrane collapses.
    pub fn collapsed(&self) -> bool {
        self.roots.is_empty()
    }

    /// Innermost unstable root.
    pub fn unstable(&self) -> Option<&Equilibrium> {
        self.roots.iter().find(|r| r.stability == Stability::Unstable)
    }

    /// Outermost stable root.
    pub fn stable(&self) -> Option<&Equilibrium> {
        self.roots.iter().rev().find(|r| r.stability == Stability::Stable)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseResult {
    /// Largest P at which an equilibrium survives, Pa.
    pub critical_pressure: f64,
    /// Separation where the balance curve touches the load line, m.
    pub tangent_separation: f64,
    pub bisections: usize,
}

fn bisect(model: &SensorModel, mut lo: f64, mut g_lo: f64, mut hi: f64, search: &SearchConfig) -> Result<(f64, f64)> {
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let g_mid = model.balance(mid)?;
        if g_mid.abs() <= search.residual_tolerance && hi - lo <= search.root_tolerance {
            return Ok((mid, g_mid));
        }
        if g_mid == 0.0 {
            return Ok((mid, g_mid));
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            return Err(Error::Search(format!(
                "bracket near z = {:.4} nm collapsed with residual {g_mid:e} Pa above tolerance",
                mid * 1e9
            )));
        }
    }
    Err(Error::Search(format!(
        "bisection did not converge in {MAX_BISECTIONS} steps near z = {:.4} nm",
        lo * 1e9
    )))
}

fn classify(model: &SensorModel, z: f64, residual: f64) -> Result<Equilibrium> {
    let slope = model.balance_slope(z)?;
    let stability = if slope < 0.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    };
    let rough = &model.scenario().roughness;
    let perturbative = rough.is_perturbative(z);
    if !perturbative {
        warn!(
            "roughness sqrt(s)/z = {:.3} exceeds {:.3} at the equilibrium z = {:.3} nm; perturbative correction unreliable",
            rough.relative_amplitude(z),
            rough.validity_ratio,
            z * 1e9
        );
    }
    Ok(Equilibrium {
        position: z,
        stability,
        slope,
        residual,
        perturbative,
    })
}

impl SensorModel {
    pub fn find_equilibria(&self, search: &SearchConfig) -> Result<EquilibriumReport> {
        let h = self.scenario().geometry.suspension_height;
        search.validate(h)?;
        let grid = search.grid(h);
        let values = grid
            .par_iter()
            .map(|&z| self.balance(z))
            .collect::<Result<Vec<f64>>>()?;

        let mut roots = Vec::new();
        let mut sign_changes = 0;
        for i in 0..grid.len() {
            if values[i] == 0.0 {
                sign_changes += 1;
                roots.push(classify(self, grid[i], 0.0)?);
                continue;
            }
            if i + 1 < grid.len() && values[i + 1] != 0.0 && (values[i] > 0.0) != (values[i + 1] > 0.0) {
                sign_changes += 1;
                let (z, g) = bisect(self, grid[i], values[i], grid[i + 1], search)?;
                roots.push(classify(self, z, g)?);
            }
        }
        debug!("{} equilibria in [{:e}, {:e}] m", roots.len(), grid[0], h);
        Ok(EquilibriumReport {
            roots,
            bracket: BracketDiagnostics {
                z_min: search.z_min,
                z_max: h,
                grid_points: grid.len(),
                sign_changes,
            },
        })
    }

    /// F(z) = k(h − z)/(LD) − P_tot^R(z), the balance with the load removed.
    fn unloaded_balance(&self, z: f64) -> Result<f64> {
        Ok(self.balance(z)? + self.scenario().measured_pressure)
    }

    /// Maximum of F over the search window and where it occurs.
    fn unloaded_peak(&self, search: &SearchConfig) -> Result<(f64, f64)> {
        let h = self.scenario().geometry.suspension_height;
        let grid = search.grid(h);
        let values = grid
            .par_iter()
            .map(|&z| self.unloaded_balance(z))
            .collect::<Result<Vec<f64>>>()?;
        let (imax, _) = values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        if imax == 0 || imax == grid.len() - 1 {
            return Ok((grid[imax], values[imax]));
        }
        // golden-section refinement so a tangency between scan points is not missed
        let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (grid[imax - 1], grid[imax + 1]);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let mut fc = self.unloaded_balance(c)?;
        let mut fd = self.unloaded_balance(d)?;
        for _ in 0..GOLDEN_ITERATIONS {
            if b - a <= 1e-6 * search.root_tolerance.max(f64::EPSILON * b) {
                break;
            }
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = self.unloaded_balance(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = self.unloaded_balance(d)?;
            }
        }
        let (z, f) = if fc > fd { (c, fc) } else { (d, fd) };
        if f >= values[imax] {
            Ok((z, f))
        } else {
            Ok((grid[imax], values[imax]))
        }
    }
}

/// Locate every zero of g on the log grid over [z_min, h] and refine it.
pub fn find_equilibria(scenario: &SensorScenario, search: &SearchConfig) -> Result<EquilibriumReport> {
    SensorModel::new(scenario.clone())?.find_equilibria(search)
}

/// Largest measured pressure for which an equilibrium still exists in the
/// window. The measured pressure of `scenario` is ignored.
///
/// An equilibrium exists at load P exactly when max F ≥ P, so the bisection
/// over P in [0, P₀] tests against the refined profile maximum.
pub fn find_collapse_pressure(scenario: &SensorScenario, search: &SearchConfig) -> Result<CollapseResult> {
    let model = SensorModel::new(scenario.clone().with_pressure(0.0))?;
    let h = scenario.geometry.suspension_height;
    search.validate(h)?;
    let (z_peak, f_peak) = model.unloaded_peak(search)?;
    if f_peak < 0.0 {
        return Err(Error::Search(format!(
            "no equilibrium even without load: max balance {f_peak:e} Pa at z = {:.3} nm",
            z_peak * 1e9
        )));
    }
    let (mut lo, mut hi) = (0.0, scenario.geometry.calibration_pressure);
    let mut bisections = 0;
    while hi - lo > search.pressure_tolerance {
        let mid = 0.5 * (lo + hi);
        if f_peak >= mid {
            lo = mid;
        } else {
            hi = mid;
        }
        bisections += 1;
    }
    Ok(CollapseResult {
        critical_pressure: 0.5 * (lo + hi),
        tangent_separation: z_peak,
        bisections,
    })
}
