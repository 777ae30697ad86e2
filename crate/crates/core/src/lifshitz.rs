//! Casimir pressure between two dielectric half-spaces from the Lifshitz
//! formula at finite temperature.
//!
//! The magnitude of the pressure is
//!
//! ```text
//! P(z, T) = (k_B T / π) Σ'_l ∫_0^∞ q_l k dk Σ_α r_α¹ r_α² e^{-2 z q_l} / (1 − r_α¹ r_α² e^{-2 z q_l})
//! ```
//!
//! with q_l = √(k² + ξ_l²/c²). Substituting y = 2 z q_l turns each Matsubara
//! term into `∫_{y₀}^∞ y² Σ_α R_α / (e^y − R_α) dy / (8 z³)` with
//! y₀ = 2 z ξ_l / c, which removes the z and l dependent scales from the
//! quadrature.

use std::f64::consts::PI;
use std::sync::OnceLock;

use gauss_quad::laguerre::GaussLaguerre;
use gauss_quad::FiniteAboveNegOneF64;

use crate::constants::{matsubara_frequency, BOLTZMANN, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::materials::{MaterialResponse, StaticResponse};
use crate::quadrature;

// Consecutive negligible terms required before the Matsubara sum stops.
const TRUNCATION_RUN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum QuadratureScheme {
    /// Adaptive Gauss–Kronrod on the mapped semi-infinite axis.
    Adaptive,
    /// Fixed Gauss–Laguerre rule in x = y − y₀.
    GaussLaguerre { nodes: usize },
}

impl QuadratureScheme {
    pub fn label(&self) -> String {
        match self {
            QuadratureScheme::Adaptive => "adaptive-gk15".into(),
            QuadratureScheme::GaussLaguerre { nodes } => format!("gauss-laguerre({nodes})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LifshitzConfig {
    /// Kelvin.
    pub temperature: f64,
    pub matsubara_rel_tolerance: f64,
    pub matsubara_max_terms: usize,
    pub quadrature_rel_tolerance: f64,
    pub quadrature_scheme: QuadratureScheme,
}

impl Default for LifshitzConfig {
    fn default() -> Self {
        Self {
            temperature: 300.0,
            matsubara_rel_tolerance: 1e-6,
            matsubara_max_terms: 2000,
            quadrature_rel_tolerance: 1e-6,
            quadrature_scheme: QuadratureScheme::Adaptive,
        }
    }
}

impl LifshitzConfig {
    pub fn at_temperature(temperature: f64) -> Self {
        Self {
            temperature,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0) || !self.temperature.is_finite() {
            return Err(Error::Config(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        for (name, tol) in [
            ("matsubara_rel_tolerance", self.matsubara_rel_tolerance),
            ("quadrature_rel_tolerance", self.quadrature_rel_tolerance),
        ] {
            if !(tol > 0.0 && tol <= 1e-2) {
                return Err(Error::Config(format!("{name} must lie in (0, 1e-2], got {tol}")));
            }
        }
        if self.matsubara_max_terms < 10 {
            return Err(Error::Config(format!(
                "matsubara_max_terms must be ≥ 10, got {}",
                self.matsubara_max_terms
            )));
        }
        if let QuadratureScheme::GaussLaguerre { nodes } = self.quadrature_scheme {
            if nodes < 2 {
                return Err(Error::Config("Gauss–Laguerre rule needs ≥ 2 nodes".into()));
            }
        }
        Ok(())
    }
}

/// Membrane (body 1) facing the plate (body 2).
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpacePair {
    pub membrane: MaterialResponse,
    pub plate: MaterialResponse,
}

impl HalfSpacePair {
    pub fn new(membrane: MaterialResponse, plate: MaterialResponse) -> Self {
        Self { membrane, plate }
    }

    pub fn si_si() -> Self {
        Self::new(MaterialResponse::silicon(), MaterialResponse::silicon())
    }

    pub fn si_au() -> Self {
        Self::new(MaterialResponse::silicon(), MaterialResponse::gold())
    }
}

fn check_wave_vector(eps: f64, xi: f64, k_perp: f64) -> Result<()> {
    if !(eps >= 1.0) {
        return Err(Error::domain("eps", eps, "must be ≥ 1"));
    }
    if !(xi >= 0.0) || !xi.is_finite() {
        return Err(Error::domain("xi", xi, "must be non-negative and finite"));
    }
    if !(k_perp >= 0.0) || !k_perp.is_finite() {
        return Err(Error::domain("k_perp", k_perp, "must be non-negative and finite"));
    }
    if xi == 0.0 && k_perp == 0.0 {
        return Err(Error::domain("k_perp", k_perp, "xi and k_perp cannot both vanish"));
    }
    Ok(())
}

/// TM reflection coefficient (ε q − k)/(ε q + k) at imaginary frequency.
/// An infinite `eps` gives the ideal-conductor value 1.
pub fn reflection_tm(eps: f64, xi: f64, k_perp: f64) -> Result<f64> {
    check_wave_vector(eps, xi, k_perp)?;
    if eps.is_infinite() {
        return Ok(1.0);
    }
    let a = xi / SPEED_OF_LIGHT;
    let q = (k_perp * k_perp + a * a).sqrt();
    let k = (k_perp * k_perp + eps * a * a).sqrt();
    // (ε q − k)(ε q + k) = (ε² − 1) k⊥² + ε(ε − 1) a²
    let num = (eps - 1.0) * ((eps + 1.0) * k_perp * k_perp + eps * a * a);
    Ok(num / ((eps * q + k) * (eps * q + k)))
}

/// TE reflection coefficient (q − k)/(q + k) at imaginary frequency.
pub fn reflection_te(eps: f64, xi: f64, k_perp: f64) -> Result<f64> {
    check_wave_vector(eps, xi, k_perp)?;
    if eps.is_infinite() {
        return Ok(if xi == 0.0 { 0.0 } else { -1.0 });
    }
    let a = xi / SPEED_OF_LIGHT;
    let q = (k_perp * k_perp + a * a).sqrt();
    let k = (k_perp * k_perp + eps * a * a).sqrt();
    Ok(-(eps - 1.0) * a * a / ((q + k) * (q + k)))
}

/// Reflection of one body in the y = 2 z q variables.
#[derive(Debug, Clone, Copy)]
enum BodyReflection {
    /// ε at ξ > 0; `y0_sq` = (2 z ξ / c)².
    Dynamic { eps: f64, y0_sq: f64 },
    /// ξ = 0 with fixed TM coefficient and no TE reflection.
    StaticTmOnly { tm: f64 },
    /// ξ = 0 plasma limit; `s` = (2 z ω_p / c)².
    StaticPlasma { s: f64 },
}

impl BodyReflection {
    #[inline]
    fn coefficients(&self, y: f64) -> (f64, f64) {
        match *self {
            BodyReflection::Dynamic { eps, y0_sq } => {
                let s = (eps - 1.0) * y0_sq;
                let k = (y * y + s).sqrt();
                let tm = (eps - 1.0) * ((eps + 1.0) * y * y - y0_sq) / ((eps * y + k) * (eps * y + k));
                let te = -s / ((y + k) * (y + k));
                (tm, te)
            }
            BodyReflection::StaticTmOnly { tm } => (tm, 0.0),
            BodyReflection::StaticPlasma { s } => {
                let k = (y * y + s).sqrt();
                (1.0, -s / ((y + k) * (y + k)))
            }
        }
    }
}

/// Diagnostics of one pressure evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifshitzEvaluation {
    /// Pa, magnitude.
    pub pressure: f64,
    /// Highest Matsubara index included.
    pub last_index: usize,
    /// (last term + tail estimate) / partial sum at termination.
    pub truncation_ratio: f64,
}

/// Evaluates the Lifshitz pressure for one material pair and configuration,
/// caching ε(iξ_l) of both bodies across separations.
pub struct LifshitzSolver {
    pair: HalfSpacePair,
    config: LifshitzConfig,
    statics: [StaticResponse; 2],
    step: f64,
    permittivities: Vec<OnceLock<[f64; 2]>>,
    laguerre: Option<GaussLaguerre>,
}

impl std::fmt::Debug for LifshitzSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LifshitzSolver")
            .field("pair", &self.pair)
            .field("config", &self.config)
            .finish_non_exhaustive()
    }
}

impl LifshitzSolver {
    pub fn new(pair: HalfSpacePair, config: LifshitzConfig) -> Result<Self> {
        config.validate()?;
        let statics = [
            pair.membrane.static_response()?,
            pair.plate.static_response()?,
        ];
        let step = matsubara_frequency(1, config.temperature)?;
        let permittivities = (0..=config.matsubara_max_terms)
            .map(|_| OnceLock::new())
            .collect();
        let laguerre = match config.quadrature_scheme {
            QuadratureScheme::Adaptive => None,
            QuadratureScheme::GaussLaguerre { nodes } => Some(GaussLaguerre::new(
                std::num::NonZeroUsize::new(nodes).expect("validated node count"),
                FiniteAboveNegOneF64::new(0.0).expect("alpha = 0 is valid"),
            )),
        };
        Ok(Self {
            pair,
            config,
            statics,
            step,
            permittivities,
            laguerre,
        })
    }

    pub fn pair(&self) -> &HalfSpacePair {
        &self.pair
    }

    pub fn config(&self) -> &LifshitzConfig {
        &self.config
    }

    fn permittivities(&self, l: usize) -> Result<[f64; 2]> {
        let cell = &self.permittivities[l];
        if let Some(v) = cell.get() {
            return Ok(*v);
        }
        let xi = l as f64 * self.step;
        let v = [
            self.pair.membrane.permittivity(xi)?,
            self.pair.plate.permittivity(xi)?,
        ];
        Ok(*cell.get_or_init(|| v))
    }

    fn static_body(response: StaticResponse, z: f64) -> BodyReflection {
        match response {
            StaticResponse::Dielectric(eps) => BodyReflection::StaticTmOnly {
                tm: (eps - 1.0) / (eps + 1.0),
            },
            StaticResponse::Drude => BodyReflection::StaticTmOnly { tm: 1.0 },
            StaticResponse::Plasma { plasma_frequency } => BodyReflection::StaticPlasma {
                s: (2.0 * z * plasma_frequency / SPEED_OF_LIGHT).powi(2),
            },
        }
    }

    /// ∫_{y₀}^∞ y² Σ_α R_α / (e^y − R_α) dy for Matsubara index `l`.
    fn term(&self, l: usize, z: f64) -> Result<f64> {
        let (bodies, y0) = if l == 0 {
            (
                [
                    Self::static_body(self.statics[0], z),
                    Self::static_body(self.statics[1], z),
                ],
                0.0,
            )
        } else {
            let eps = self.permittivities(l)?;
            let y0 = 2.0 * z * (l as f64 * self.step) / SPEED_OF_LIGHT;
            let y0_sq = y0 * y0;
            (
                [
                    BodyReflection::Dynamic { eps: eps[0], y0_sq },
                    BodyReflection::Dynamic { eps: eps[1], y0_sq },
                ],
                y0,
            )
        };
        let products = move |y: f64| {
            let (tm1, te1) = bodies[0].coefficients(y);
            let (tm2, te2) = bodies[1].coefficients(y);
            (tm1 * tm2, te1 * te2)
        };

        match &self.laguerre {
            None => {
                let kernel = |y: f64| {
                    let (r_tm, r_te) = products(y);
                    let em1 = y.exp_m1();
                    let mut v = 0.0;
                    if r_tm != 0.0 {
                        v += r_tm / (em1 + (1.0 - r_tm));
                    }
                    if r_te != 0.0 {
                        v += r_te / (em1 + (1.0 - r_te));
                    }
                    y * y * v
                };
                quadrature::integrate_to_infinity(kernel, y0, self.config.quadrature_rel_tolerance, 0.0)
                    .map(|r| r.value)
            }
            Some(rule) => {
                // e^{y} × kernel(y) = y² Σ R / (1 − R e^{−y})
                let scaled = |x: f64| {
                    let y = y0 + x;
                    let (r_tm, r_te) = products(y);
                    let e = (-y).exp();
                    let mut v = 0.0;
                    if r_tm != 0.0 {
                        v += r_tm / (1.0 - r_tm * e);
                    }
                    if r_te != 0.0 {
                        v += r_te / (1.0 - r_te * e);
                    }
                    y * y * v
                };
                Ok((-y0).exp() * rule.integrate(scaled))
            }
        }
    }

    /// Pressure magnitude in Pa at separation `z` (m).
    pub fn pressure(&self, z: f64) -> Result<f64> {
        self.evaluate(z).map(|e| e.pressure)
    }

    pub fn evaluate(&self, z: f64) -> Result<LifshitzEvaluation> {
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::domain("z", z, "separation must be positive"));
        }
        let tol = self.config.matsubara_rel_tolerance;
        let wrap = |e: Error| e.at_separation(z);

        let mut sum = 0.5 * self.term(0, z).map_err(wrap)?;
        let mut previous = f64::NAN;
        let mut run = 0;
        let mut ratio = f64::INFINITY;
        for l in 1..=self.config.matsubara_max_terms {
            let t = self.term(l, z).map_err(wrap)?;
            sum += t;
            // Geometric tail estimate from the last two terms.
            let tail = if previous > 0.0 && t < previous {
                let q = t / previous;
                t * q / (1.0 - q)
            } else if t == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            ratio = if sum > 0.0 { (t + tail) / sum } else { 0.0 };
            if t + tail <= tol * sum {
                run += 1;
                if run >= TRUNCATION_RUN {
                    return Ok(LifshitzEvaluation {
                        pressure: BOLTZMANN * self.config.temperature / PI * sum / (8.0 * z.powi(3)),
                        last_index: l,
                        truncation_ratio: ratio,
                    });
                }
            } else {
                run = 0;
            }
            previous = t;
        }
        Err(Error::Convergence {
            what: "Matsubara sum",
            separation: Some(z),
            diagnostics: format!(
                "cap of {} terms reached; partial sum {sum:e}, last term {previous:e}, relative remainder {ratio:e}",
                self.config.matsubara_max_terms
            ),
        })
    }
}

/// Smooth-surface Casimir pressure magnitude (Pa) between the bodies of
/// `pair` at separation `z`.
pub fn casimir_pressure(pair: &HalfSpacePair, z: f64, config: &LifshitzConfig) -> Result<f64> {
    LifshitzSolver::new(pair.clone(), *config)?.pressure(z)
}
