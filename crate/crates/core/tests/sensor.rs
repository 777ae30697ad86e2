use nems_casimir::lifshitz::HalfSpacePair;
use nems_casimir::roughness::RoughnessSpec;
use nems_casimir::sensor::{
    calibrate_voltage, elastic_lhs, find_collapse_pressure, find_equilibria, sweep_balance_curves, total_rough_pressure,
    SearchConfig, SensorGeometry, SensorModel, SensorScenario, Stability,
};
use nems_casimir::Error;
use proptest::prelude::*;

const NM: f64 = 1e-9;

fn rough(membrane_nm: f64, plate_nm: f64) -> RoughnessSpec {
    RoughnessSpec::new(membrane_nm * NM, plate_nm * NM).unwrap()
}

fn scenario(pair: HalfSpacePair, pressure: f64) -> SensorScenario {
    SensorScenario::new(SensorGeometry::reference(), pair, pressure)
}

fn roots(s: &SensorScenario) -> (f64, f64) {
    let r = find_equilibria(s, &SearchConfig::default()).unwrap();
    assert_eq!(r.root_count(), 2, "{:?}", r.roots);
    (r.unstable().unwrap().position, r.stable().unwrap().position)
}

/// g'(z) from a plain central difference with a 0.1 nm step.
fn finite_difference_slope(model: &SensorModel, z: f64) -> f64 {
    let h = 0.1 * NM;
    (model.balance(z + h).unwrap() - model.balance(z - h).unwrap()) / (2.0 * h)
}

#[test]
fn electrostatic_balance_at_pinned_stable_root() {
    let s = scenario(HalfSpacePair::si_au(), 2973.0).with_roughness(rough(0.1, 2.0));
    let z = 164.5 * NM;
    let u0 = calibrate_voltage(&s, z).unwrap();
    let s = s.with_voltage(u0);
    let f = elastic_lhs(&s, z).unwrap();
    assert!((f - 2.325).abs() < 1e-9, "{f}");
    let total = total_rough_pressure(&s, z).unwrap();
    assert!((total - f).abs() < 1e-9, "{total} vs {f}");
}

#[test]
fn calibrated_voltage_regression() {
    let s = scenario(HalfSpacePair::si_au(), 2973.0).with_roughness(rough(0.1, 2.0));
    let u0 = calibrate_voltage(&s, 164.5 * NM).unwrap();
    assert!((u0 - 0.10065).abs() < 5e-5, "{u0}");
}

#[test]
fn voltage_calibration_rejects_unstable_target() {
    // the unstable branch cannot be pinned as a stable root
    let s = scenario(HalfSpacePair::si_au(), 2973.0).with_roughness(rough(0.1, 2.0));
    assert!(matches!(calibrate_voltage(&s, 60.0 * NM), Err(Error::Search(_))));
}

#[test]
fn large_roughness_balances_near_shifted_root() {
    // δ_Si = 1 nm, δ_Au = 10 nm moves the unstable root to about 87 nm
    let s = scenario(HalfSpacePair::si_au(), 2979.0).with_roughness(rough(1.0, 10.0));
    let model = SensorModel::new(s).unwrap();
    let z = 87.0 * NM;
    let g = model.balance(z).unwrap();
    let slope = model.balance_slope(z).unwrap();
    assert!(g.abs() < slope.abs() * 3.0 * NM, "g = {g} Pa, g' = {slope:e} Pa/m");
}

#[test]
fn smooth_limit_matches_zero_roughness_path() {
    for pair in [HalfSpacePair::si_si(), HalfSpacePair::si_au()] {
        let a = roots(&scenario(pair.clone(), 2979.0));
        let b = roots(&scenario(pair, 2979.0).with_roughness(rough(0.0, 0.0)));
        assert!((a.0 - b.0).abs() <= 0.01 * NM && (a.1 - b.1).abs() <= 0.01 * NM);
    }
}

#[test]
fn stable_root_moves_less_than_unstable_root() {
    let base = scenario(HalfSpacePair::si_au(), 2979.0);
    let (u0, s0) = roots(&base);
    for r in [rough(0.1, 2.0), rough(1.0, 5.0), rough(1.0, 10.0)] {
        let (u, s) = roots(&base.clone().with_roughness(r));
        assert!(u >= u0);
        assert!((s - s0).abs() < (u - u0).abs(), "{r:?}");
    }
    let electro = scenario(HalfSpacePair::si_au(), 2973.0).with_voltage(0.10065);
    let (u0, s0) = roots(&electro);
    for r in [rough(1.0, 5.0), rough(1.0, 10.0)] {
        let (u, s) = roots(&electro.clone().with_roughness(r));
        assert!((s - s0).abs() < (u - u0).abs(), "{r:?}");
    }
}

#[test]
fn root_count_is_two_then_zero() {
    let template = scenario(HalfSpacePair::si_si(), 0.0).with_roughness(rough(0.1, 0.1));
    let crit = find_collapse_pressure(&template, &SearchConfig::default()).unwrap().critical_pressure;
    let counts: Vec<usize> = (0..40)
        .map(|i| {
            let p = 2960.0 + 0.75 * i as f64;
            find_equilibria(&template.clone().with_pressure(p), &SearchConfig::default())
                .unwrap()
                .root_count()
        })
        .collect();
    assert!(counts.iter().all(|&c| c == 0 || c == 2), "{counts:?}");
    let transitions = counts.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(transitions, 1, "{counts:?}");
    let first_zero = counts.iter().position(|&c| c == 0).unwrap();
    let p_first_zero = 2960.0 + 0.75 * first_zero as f64;
    assert!(crit < p_first_zero && crit > p_first_zero - 0.75, "P_crit = {crit}");
}

#[test]
fn critical_pressure_drops_with_gold_roughness() {
    let base = scenario(HalfSpacePair::si_au(), 0.0);
    let search = SearchConfig::default();
    let smooth = find_collapse_pressure(&base.clone().with_roughness(rough(0.1, 2.0)), &search).unwrap();
    let rougher = find_collapse_pressure(&base.clone().with_roughness(rough(0.1, 10.0)), &search).unwrap();
    assert!(rougher.critical_pressure < smooth.critical_pressure);
    // a load between the two survives only on the smoother plate
    let p = 0.5 * (rougher.critical_pressure + smooth.critical_pressure);
    let count = |r| find_equilibria(&base.clone().with_roughness(r).with_pressure(p), &search).unwrap().root_count();
    assert_eq!(count(rough(0.1, 2.0)), 2);
    assert_eq!(count(rough(0.1, 10.0)), 0);
}

#[test]
fn collapse_without_casimir_needs_window_near_contact() {
    let s = scenario(HalfSpacePair::si_si(), 0.0).without_casimir();
    let p = find_collapse_pressure(&s, &SearchConfig::default()).unwrap().critical_pressure;
    // with the 20 nm floor the spring line is cut off at 3000·(1 − 20 nm/20 µm)
    assert!((p - 2997.0).abs() < 2e-3, "{p}");
}

#[test]
fn sweep_curves() {
    let grid: Vec<f64> = (0..=40).map(|i| (70.0 + 2.0 * i as f64) * NM).collect();
    let au = sweep_balance_curves(&scenario(HalfSpacePair::si_au(), 2979.0).with_roughness(rough(1.0, 10.0)), &grid)
        .unwrap();
    let si = sweep_balance_curves(&scenario(HalfSpacePair::si_si(), 2979.0).with_roughness(rough(1.0, 10.0)), &grid)
        .unwrap();
    for (a, s) in au.iter().zip(&si) {
        assert!(a.total_rough > a.total_smooth);
        assert!(a.total_rough > s.total_rough);
        assert_eq!(a.elastic, s.elastic);
    }
    let rows = sweep_balance_curves(&scenario(HalfSpacePair::si_si(), 2979.0), &grid[..1]).unwrap();
    assert_eq!(rows[0].total_rough, rows[0].total_smooth);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn roots_have_small_residuals_and_consistent_labels(
        gold in any::<bool>(),
        pressure in 2900.0f64..2975.0,
        d1 in 0.0f64..1.5,
        d2 in 0.0f64..8.0,
        voltage in prop_oneof![Just(0.0), 0.0f64..0.12],
    ) {
        let pair = if gold { HalfSpacePair::si_au() } else { HalfSpacePair::si_si() };
        let s = scenario(pair, pressure).with_roughness(rough(d1, d2)).with_voltage(voltage);
        let search = SearchConfig::default();
        let model = SensorModel::new(s).unwrap();
        let report = model.find_equilibria(&search).unwrap();
        for root in &report.roots {
            prop_assert!(root.residual.abs() < search.residual_tolerance);
            let fd = finite_difference_slope(&model, root.position);
            prop_assert_eq!(fd < 0.0, root.stability == Stability::Stable, "fd {} vs {:?}", fd, root);
        }
        if report.root_count() == 2 {
            prop_assert!(report.roots[0].position < report.roots[1].position);
            prop_assert_eq!(report.roots[0].stability, Stability::Unstable);
            prop_assert_eq!(report.roots[1].stability, Stability::Stable);
        }
    }

    #[test]
    fn more_roughness_never_pulls_unstable_root_inward(
        pressure in 2950.0f64..2978.0,
        d2 in 0.0f64..6.0,
        extra in 0.1f64..4.0,
    ) {
        let base = scenario(HalfSpacePair::si_au(), pressure);
        let lo = base.clone().with_roughness(rough(0.5, d2));
        let hi = base.with_roughness(rough(0.5, d2 + extra));
        let z = 100.0 * NM;
        prop_assert!(total_rough_pressure(&hi, z).unwrap() > total_rough_pressure(&lo, z).unwrap());
        let (r_lo, r_hi) = (
            find_equilibria(&lo, &SearchConfig::default()).unwrap(),
            find_equilibria(&hi, &SearchConfig::default()).unwrap(),
        );
        if let (Some(a), Some(b)) = (r_lo.unstable(), r_hi.unstable()) {
            prop_assert!(b.position >= a.position - 0.01 * NM);
        }
    }
}
