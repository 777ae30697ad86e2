//! Perturbative stochastic-roughness corrections to the Casimir and
//! electrostatic pressures between parallel plates.
//!
//! Both corrections depend on the two r.m.s. amplitudes only through
//! s = δ₁² + δ₂², measured from the mean surface levels; z is the separation
//! of those mean levels.

use crate::constants::VACUUM_PERMITTIVITY;
use crate::error::{Error, Result};
use crate::lifshitz::{LifshitzConfig, LifshitzSolver, HalfSpacePair};

/// Default bound on √s / z above which the expansion is flagged.
pub const DEFAULT_VALIDITY_RATIO: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RoughnessSpec {
    /// δ₁, membrane, m.
    pub membrane: f64,
    /// δ₂, plate, m.
    pub plate: f64,
    /// Recorded only; the correction does not depend on it.
    pub correlation_length: Option<f64>,
    pub validity_ratio: f64,
}

impl Default for RoughnessSpec {
    fn default() -> Self {
        Self::smooth()
    }
}

impl RoughnessSpec {
    pub fn new(membrane: f64, plate: f64) -> Result<Self> {
        for (name, v) in [("membrane roughness", membrane), ("plate roughness", plate)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be ≥ 0, got {v:e}")));
            }
        }
        Ok(Self {
            membrane,
            plate,
            correlation_length: None,
            validity_ratio: DEFAULT_VALIDITY_RATIO,
        })
    }

    pub fn smooth() -> Self {
        Self {
            membrane: 0.0,
            plate: 0.0,
            correlation_length: None,
            validity_ratio: DEFAULT_VALIDITY_RATIO,
        }
    }

    pub fn with_validity_ratio(mut self, ratio: f64) -> Self {
        self.validity_ratio = ratio;
        self
    }

    pub fn with_correlation_length(mut self, length: f64) -> Self {
        self.correlation_length = Some(length);
        self
    }

    /// s = δ₁² + δ₂².
    pub fn sum_of_squares(&self) -> f64 {
        self.membrane * self.membrane + self.plate * self.plate
    }

    pub fn is_smooth(&self) -> bool {
        self.sum_of_squares() == 0.0
    }

    /// √s / z.
    pub fn relative_amplitude(&self, z: f64) -> f64 {
        self.sum_of_squares().sqrt() / z
    }

    pub fn is_perturbative(&self, z: f64) -> bool {
        self.relative_amplitude(z) <= self.validity_ratio
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct ElectrostaticSpec {
    /// U₀ in volts. Only U₀² enters.
    pub voltage: f64,
}

impl ElectrostaticSpec {
    pub fn new(voltage: f64) -> Result<Self> {
        if !(voltage >= 0.0) || !voltage.is_finite() {
            return Err(Error::Config(format!("voltage must be ≥ 0, got {voltage}")));
        }
        Ok(Self { voltage })
    }
}

fn check_separation(z: f64) -> Result<()> {
    if z > 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("z", z, "separation must be positive"))
    }
}

/// 1 + 10 s/z² + 105 s²/z⁴. Callers check
/// [`RoughnessSpec::is_perturbative`] where validity matters.
pub fn casimir_roughness_factor(rough: &RoughnessSpec, z: f64) -> Result<f64> {
    check_separation(z)?;
    let x = rough.sum_of_squares() / (z * z);
    Ok(1.0 + 10.0 * x + 105.0 * x * x)
}

/// 1 + 3 s/z² + 5 s²/z⁴.
pub fn electric_roughness_factor(rough: &RoughnessSpec, z: f64) -> Result<f64> {
    check_separation(z)?;
    let x = rough.sum_of_squares() / (z * z);
    Ok(1.0 + 3.0 * x + 5.0 * x * x)
}

/// Roughness-corrected Casimir pressure using an existing solver.
pub fn rough_casimir_pressure_with(solver: &LifshitzSolver, rough: &RoughnessSpec, z: f64) -> Result<f64> {
    let smooth = solver.pressure(z)?;
    if rough.is_smooth() {
        return Ok(smooth);
    }
    Ok(smooth * casimir_roughness_factor(rough, z)?)
}

pub fn rough_casimir_pressure(
    pair: &HalfSpacePair,
    rough: &RoughnessSpec,
    z: f64,
    config: &LifshitzConfig,
) -> Result<f64> {
    let solver = LifshitzSolver::new(pair.clone(), *config)?;
    rough_casimir_pressure_with(&solver, rough, z)
}

/// ε₀U₀²/(2z²) × (1 + 3 s/z² + 5 s²/z⁴).
pub fn rough_electric_pressure(elec: &ElectrostaticSpec, rough: &RoughnessSpec, z: f64) -> Result<f64> {
    let factor = electric_roughness_factor(rough, z)?;
    Ok(VACUUM_PERMITTIVITY * elec.voltage * elec.voltage / (2.0 * z * z) * factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const NM: f64 = 1e-9;

    #[test]
    fn smooth_factor_is_one() {
        for z in [1e-9, 84e-9, 1e-5] {
            assert_eq!(casimir_roughness_factor(&RoughnessSpec::smooth(), z).unwrap(), 1.0);
            assert_eq!(electric_roughness_factor(&RoughnessSpec::smooth(), z).unwrap(), 1.0);
        }
    }

    #[test]
    fn casimir_factor_examples() {
        let r = RoughnessSpec::new(1.0 * NM, 10.0 * NM).unwrap();
        // 1 + 10·0.0101 + 105·0.0101²
        assert_relative_eq!(casimir_roughness_factor(&r, 100.0 * NM).unwrap(), 1.111_711_05, max_relative = 1e-12);
        let r = RoughnessSpec::new(1.0 * NM, 5.0 * NM).unwrap();
        assert_relative_eq!(
            casimir_roughness_factor(&r, 84.0 * NM).unwrap(),
            1.038_273_742_036_497_1,
            max_relative = 1e-12
        );
    }

    #[test]
    fn electric_pressure_examples() {
        let smooth = RoughnessSpec::smooth();
        assert_eq!(rough_electric_pressure(&ElectrostaticSpec::new(0.0).unwrap(), &smooth, 1e-7).unwrap(), 0.0);
        let one_volt = ElectrostaticSpec::new(1.0).unwrap();
        // ε₀ / (2 · 10⁻¹⁴)
        assert_relative_eq!(
            rough_electric_pressure(&one_volt, &smooth, 100.0 * NM).unwrap(),
            442.709_390_64,
            max_relative = 1e-12
        );
        let r = RoughnessSpec::new(1.0 * NM, 10.0 * NM).unwrap();
        assert_relative_eq!(
            rough_electric_pressure(&one_volt, &r, 100.0 * NM).unwrap(),
            442.709_390_64 * 1.030_810_05,
            max_relative = 1e-12
        );
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(RoughnessSpec::new(-1e-9, 0.0).is_err());
        assert!(ElectrostaticSpec::new(-1.0).is_err());
        let r = RoughnessSpec::smooth();
        assert!(matches!(casimir_roughness_factor(&r, 0.0), Err(Error::Domain { .. })));
        assert!(electric_roughness_factor(&r, -1.0).is_err());
        assert!(rough_electric_pressure(&ElectrostaticSpec::new(1.0).unwrap(), &r, 0.0).is_err());
    }

    #[test]
    fn validity_flag() {
        // the δ_Au = 10 nm case near the unstable root stays perturbative
        let r = RoughnessSpec::new(1.0 * NM, 10.0 * NM).unwrap();
        assert!(r.is_perturbative(87.0 * NM));
        assert!(!r.is_perturbative(40.0 * NM));
        assert!(r.with_validity_ratio(0.5).is_perturbative(40.0 * NM));
    }

    proptest! {
        #[test]
        fn factors_depend_only_on_sum_of_squares(
            d1 in 0.0f64..20.0, d2 in 0.0f64..20.0, z in 30.0f64..500.0
        ) {
            let a = RoughnessSpec::new(d1 * NM, d2 * NM).unwrap();
            let swapped = RoughnessSpec::new(d2 * NM, d1 * NM).unwrap();
            let lumped = RoughnessSpec::new(0.0, a.sum_of_squares().sqrt()).unwrap();
            let z = z * NM;
            let c = casimir_roughness_factor(&a, z).unwrap();
            let e = electric_roughness_factor(&a, z).unwrap();
            prop_assert_eq!(c, casimir_roughness_factor(&swapped, z).unwrap());
            prop_assert_eq!(e, electric_roughness_factor(&swapped, z).unwrap());
            prop_assert!((c - casimir_roughness_factor(&lumped, z).unwrap()).abs() <= 1e-12 * c);
            prop_assert!(c >= 1.0 && e >= 1.0);
            prop_assert!(c >= e);
            if d1 > 0.0 || d2 > 0.0 {
                prop_assert!(c > 1.0 && e > 1.0 && c > e);
            }
        }

        #[test]
        fn factors_decrease_with_separation(
            d1 in 0.01f64..20.0, d2 in 0.0f64..20.0, z in 30.0f64..500.0, dz in 0.1f64..50.0
        ) {
            let r = RoughnessSpec::new(d1 * NM, d2 * NM).unwrap();
            let (z1, z2) = (z * NM, (z + dz) * NM);
            prop_assert!(casimir_roughness_factor(&r, z2).unwrap() < casimir_roughness_factor(&r, z1).unwrap());
            prop_assert!(electric_roughness_factor(&r, z2).unwrap() < electric_roughness_factor(&r, z1).unwrap());
        }

        #[test]
        fn factor_grows_with_amplitude(d in 0.0f64..20.0, extra in 0.01f64..5.0, z in 30.0f64..500.0) {
            let z = z * NM;
            let lo = RoughnessSpec::new(d * NM, 1.0 * NM).unwrap();
            let hi = RoughnessSpec::new((d + extra) * NM, 1.0 * NM).unwrap();
            prop_assert!(casimir_roughness_factor(&hi, z).unwrap() > casimir_roughness_factor(&lo, z).unwrap());
        }
    }
}
