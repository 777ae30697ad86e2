use std::fs::File;
use std::io::BufReader;

use nems_casimir::constants::{ev_to_angular_frequency, matsubara_frequency};
use nems_casimir::materials::{
    kramers_kronig_transform, load_optical_data, Extrapolation, FrequencyUnit, HighFrequencyTail,
    LowFrequencyTail, MaterialResponse, OpticalDataTable, StaticResponse, TailPolicy,
};
use proptest::prelude::*;

const SI_TABLE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/si_synthetic_lorentz.txt");

// parameters the synthetic table was generated with
const TABLE_STATIC: f64 = 11.67;
const TABLE_W0: f64 = 6.6e15;
const TABLE_GAMMA: f64 = 6.6e14;

fn si_table() -> OpticalDataTable {
    let file = File::open(SI_TABLE).expect("synthetic Si table present");
    load_optical_data(BufReader::new(file), FrequencyUnit::ElectronVolt).unwrap()
}

fn lorentz_im(eps_s: f64, w0: f64, gamma: f64, w: f64) -> f64 {
    (eps_s - 1.0) * w0 * w0 * gamma * w / ((w0 * w0 - w * w).powi(2) + (gamma * w).powi(2))
}

fn lorentz_imaginary_axis(eps_s: f64, w0: f64, gamma: f64, xi: f64) -> f64 {
    1.0 + (eps_s - 1.0) * w0 * w0 / (w0 * w0 + xi * xi + gamma * xi)
}

fn dense_lorentz_table(eps_s: f64, w0: f64, gamma: f64) -> OpticalDataTable {
    let (lo, hi, n) = (1e-4 * w0, 1e3 * w0, 4000);
    let rows = (0..n)
        .map(|i| {
            let w = lo * (hi / lo).powf(i as f64 / (n - 1) as f64);
            (w, lorentz_im(eps_s, w0, gamma, w))
        })
        .collect();
    OpticalDataTable::new(rows).unwrap()
}

#[test]
fn kk_of_lorentzian_matches_closed_form() {
    let (eps_s, w0, gamma) = (5.0, 3e15, 4e14);
    let table = dense_lorentz_table(eps_s, w0, gamma);
    let tails = TailPolicy {
        low: LowFrequencyTail::Zero,
        high: HighFrequencyTail::InverseCube,
    };
    for xi in [1e13, 2.5e14, 1e15, 3e15, 1e16, 5e16] {
        let kk = kramers_kronig_transform(&table, xi, tails).unwrap();
        let exact = lorentz_imaginary_axis(eps_s, w0, gamma, xi);
        assert!((kk / exact - 1.0).abs() < 0.01, "ξ = {xi:e}: {kk} vs {exact}");
    }
}

#[test]
fn synthetic_si_table_agrees_with_analytic_model() {
    let table = si_table();
    assert_eq!(table.len(), 2000);
    let xi1 = matsubara_frequency(1, 300.0).unwrap();
    let tabulated = kramers_kronig_transform(&table, xi1, TailPolicy::default()).unwrap();
    let model = MaterialResponse::silicon().permittivity(xi1).unwrap();
    assert!((tabulated / model - 1.0).abs() < 0.05, "{tabulated} vs {model}");
    // the generating oscillator itself is reproduced much more tightly
    let exact = lorentz_imaginary_axis(TABLE_STATIC, TABLE_W0, TABLE_GAMMA, xi1);
    assert!((tabulated / exact - 1.0).abs() < 1e-3, "{tabulated} vs {exact}");
}

#[test]
fn synthetic_si_table_static_limit() {
    let si = MaterialResponse::tabulated("Si (synthetic)", si_table(), TailPolicy::default(), Extrapolation::None)
        .unwrap();
    let small = si.permittivity(1e11).unwrap();
    assert!((small - TABLE_STATIC).abs() < 0.01 * TABLE_STATIC, "{small}");
    match si.static_response().unwrap() {
        StaticResponse::Dielectric(eps) => assert!((eps - TABLE_STATIC).abs() < 0.01 * TABLE_STATIC),
        other => panic!("unexpected static response {other:?}"),
    }
}

#[test]
fn gold_dominates_silicon_at_low_matsubara_indices() {
    // without interband terms the Drude model drops below the oscillator
    // fit past l ≈ 22 at 300 K, so the check stops at l = 20
    let (si, au) = (MaterialResponse::silicon(), MaterialResponse::gold());
    assert_eq!(au.static_response().unwrap(), StaticResponse::Drude);
    for l in 1..=20 {
        let xi = matsubara_frequency(l, 300.0).unwrap();
        assert!(au.permittivity(xi).unwrap() > si.permittivity(xi).unwrap(), "l = {l}");
    }
}

#[test]
fn ev_rows_convert_with_hbar() {
    let src = "1.5 0.2\n3.0 0.1\n";
    let t = load_optical_data(src.as_bytes(), FrequencyUnit::ElectronVolt).unwrap();
    let rows: Vec<_> = t.rows().collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].0, ev_to_angular_frequency(1.5));
    assert!((rows[0].0 - 2_278_901_173_214_265.5).abs() < 1.0);
}

fn all_materials() -> Vec<MaterialResponse> {
    vec![
        MaterialResponse::silicon(),
        MaterialResponse::gold(),
        MaterialResponse::gold_plasma(),
        MaterialResponse::tabulated("Si (synthetic)", si_table(), TailPolicy::default(), Extrapolation::None).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn permittivity_non_increasing_and_at_least_one(a in 10.0f64..18.0, b in 10.0f64..18.0) {
        let (lo, hi) = if a < b { (10f64.powf(a), 10f64.powf(b)) } else { (10f64.powf(b), 10f64.powf(a)) };
        for m in all_materials() {
            let (e_lo, e_hi) = (m.permittivity(lo).unwrap(), m.permittivity(hi).unwrap());
            prop_assert!(e_hi >= 1.0, "{} at {hi:e}: {e_hi}", m.name());
            prop_assert!(e_lo >= e_hi, "{}: ε({lo:e}) = {e_lo} < ε({hi:e}) = {e_hi}", m.name());
        }
    }

    #[test]
    fn lorentzian_kk_oracle(eps_s in 2.0f64..20.0, ratio in 0.02f64..0.5, lx in 12.0f64..17.0) {
        let w0 = 5e15;
        let gamma = ratio * w0;
        let xi = 10f64.powf(lx);
        let table = dense_lorentz_table(eps_s, w0, gamma);
        let tails = TailPolicy { low: LowFrequencyTail::Zero, high: HighFrequencyTail::InverseCube };
        let kk = kramers_kronig_transform(&table, xi, tails).unwrap();
        let exact = lorentz_imaginary_axis(eps_s, w0, gamma, xi);
        prop_assert!((kk / exact - 1.0).abs() < 0.01, "{kk} vs {exact}");
    }
}

#[test]
fn transparent_at_very_high_frequency() {
    for m in all_materials() {
        let e = m.permittivity(1e20).unwrap();
        assert!((e - 1.0).abs() < 1e-3, "{}: {e}", m.name());
    }
}
