//! Tabulated Im ε(ω) and its Kramers–Kronig transform to imaginary
//! frequencies.

use std::f64::consts::PI;
use std::io::BufRead;

use crate::constants::ev_to_angular_frequency;
use crate::error::{Error, Result};
use crate::quadrature;

/// Relative tolerance of the KK quadrature.
pub const KK_REL_TOLERANCE: f64 = 1e-6;

// Each segment is split so that no panel spans more than this frequency ratio.
const MAX_PANEL_RATIO: f64 = 2.0;

/// Unit of the first column of an optical data file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrequencyUnit {
    /// Photon energy in eV.
    ElectronVolt,
    /// Angular frequency in rad/s.
    RadPerSecond,
}

impl FrequencyUnit {
    pub fn to_angular_frequency(self, value: f64) -> f64 {
        match self {
            FrequencyUnit::ElectronVolt => ev_to_angular_frequency(value),
            FrequencyUnit::RadPerSecond => value,
        }
    }
}

/// Im ε(ω) sampled at strictly increasing angular frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalDataTable {
    omega: Vec<f64>,
    im_eps: Vec<f64>,
}

fn check_row(omega: f64, im: f64) -> std::result::Result<(), String> {
    if !omega.is_finite() || omega <= 0.0 {
        return Err(format!("frequency must be positive and finite, got {omega:e}"));
    }
    if !im.is_finite() {
        return Err(format!("Im ε must be finite, got {im:e}"));
    }
    if im < 0.0 {
        return Err(format!("negative Im ε = {im:e}"));
    }
    Ok(())
}

/// Index of the first row that breaks strict monotonicity in `omega`, if any,
/// together with whether the sequence is descending.
fn monotonicity(omega: &[f64]) -> (Option<usize>, bool) {
    if omega.len() < 2 {
        return (None, false);
    }
    let descending = omega[1] < omega[0];
    let bad = omega.windows(2).position(|w| {
        if descending {
            !(w[1] < w[0])
        } else {
            !(w[1] > w[0])
        }
    });
    (bad.map(|i| i + 1), descending)
}

impl OpticalDataTable {
    /// Build from `(ω [rad/s], Im ε)` rows. Rows may be given in ascending or
    /// descending frequency order; they are stored ascending.
    pub fn new(rows: Vec<(f64, f64)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Config("optical data table is empty".into()));
        }
        for (i, &(w, im)) in rows.iter().enumerate() {
            check_row(w, im).map_err(|m| Error::Config(format!("row {}: {m}", i + 1)))?;
        }
        let (mut omega, mut im_eps): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
        let (bad, descending) = monotonicity(&omega);
        if let Some(i) = bad {
            return Err(Error::Config(format!(
                "row {}: frequencies are not strictly monotone",
                i + 1
            )));
        }
        if descending {
            omega.reverse();
            im_eps.reverse();
        }
        Ok(Self { omega, im_eps })
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.omega.iter().copied().zip(self.im_eps.iter().copied())
    }

    pub fn min_frequency(&self) -> f64 {
        self.omega[0]
    }

    pub fn max_frequency(&self) -> f64 {
        self.omega[self.omega.len() - 1]
    }

    /// Linear interpolation of Im ε inside the tabulated range; `None` outside.
    pub fn interpolate(&self, omega: f64) -> Option<f64> {
        if omega < self.min_frequency() || omega > self.max_frequency() {
            return None;
        }
        let i = self.omega.partition_point(|&w| w <= omega);
        if i == 0 {
            return Some(self.im_eps[0]);
        }
        if i == self.omega.len() {
            return Some(self.im_eps[i - 1]);
        }
        let (w0, w1) = (self.omega[i - 1], self.omega[i]);
        let t = (omega - w0) / (w1 - w0);
        Some(self.im_eps[i - 1] + t * (self.im_eps[i] - self.im_eps[i - 1]))
    }
}

/// Read a two-column optical data file: frequency (in `unit`) and Im ε.
/// Blank lines and lines starting with `#` are skipped.
pub fn load_optical_data<R: BufRead>(source: R, unit: FrequencyUnit) -> Result<OpticalDataTable> {
    let mut omega = Vec::new();
    let mut im_eps = Vec::new();
    let mut lines_of_rows = Vec::new();
    let mut last_line = 0;

    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let row = omega.len() + 1;
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("data row {row}: expected 2 columns, found {}", fields.len()),
            });
        }
        let parse = |s: &str, what: &str| {
            s.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("data row {row}: cannot parse {what} {s:?}"),
            })
        };
        let x = parse(fields[0], "frequency")?;
        let im = parse(fields[1], "Im ε")?;
        let w = unit.to_angular_frequency(x);
        check_row(w, im).map_err(|m| Error::Parse {
            line: line_no,
            message: format!("data row {row}: {m}"),
        })?;
        omega.push(w);
        im_eps.push(im);
        lines_of_rows.push(line_no);
    }

    if omega.is_empty() {
        return Err(Error::Parse {
            line: last_line,
            message: "no data rows".into(),
        });
    }
    let (bad, _) = monotonicity(&omega);
    if let Some(i) = bad {
        return Err(Error::Parse {
            line: lines_of_rows[i],
            message: format!("data row {}: frequencies are not strictly monotone", i + 1),
        });
    }
    OpticalDataTable::new(omega.into_iter().zip(im_eps).collect())
}

/// How Im ε is continued below the first tabulated frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LowFrequencyTail {
    /// Im ε held at its first tabulated value down to ω = 0.
    Constant,
    Zero,
    /// Drude absorption ω_p²γ / (ω(ω² + γ²)).
    Drude { plasma_frequency: f64, damping: f64 },
}

/// How Im ε is continued above the last tabulated frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HighFrequencyTail {
    /// A/ω³ matched to the last tabulated value.
    InverseCube,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailPolicy {
    pub low: LowFrequencyTail,
    pub high: HighFrequencyTail,
}

impl Default for TailPolicy {
    fn default() -> Self {
        Self {
            low: LowFrequencyTail::Constant,
            high: HighFrequencyTail::InverseCube,
        }
    }
}

impl TailPolicy {
    pub fn describe(&self) -> String {
        let low = match self.low {
            LowFrequencyTail::Constant => "constant".to_string(),
            LowFrequencyTail::Zero => "zero".to_string(),
            LowFrequencyTail::Drude {
                plasma_frequency,
                damping,
            } => format!("drude(wp={plasma_frequency:e},gamma={damping:e})"),
        };
        let high = match self.high {
            HighFrequencyTail::InverseCube => "inverse-cube",
            HighFrequencyTail::Zero => "zero",
        };
        format!("low={low};high={high}")
    }
}

/// ∫_0^ω1 dω / ((ω² + γ²)(ω² + ξ²)), both γ and ξ positive.
fn drude_tail_integral(omega1: f64, gamma: f64, xi: f64) -> Result<f64> {
    let diff = xi * xi - gamma * gamma;
    if diff.abs() > 1e-6 * gamma * gamma {
        let a = (omega1 / gamma).atan() / gamma;
        let b = (omega1 / xi).atan() / xi;
        return Ok((a - b) / diff);
    }
    let r = quadrature::integrate(
        |w| 1.0 / ((w * w + gamma * gamma) * (w * w + xi * xi)),
        0.0,
        omega1,
        KK_REL_TOLERANCE * 1e-2,
        0.0,
    )?;
    Ok(r.value)
}

/// ε(iξ) = 1 + (2/π) ∫_0^∞ ω Im ε(ω) / (ω² + ξ²) dω over the table, with
/// Im ε linearly interpolated between rows and continued by `tails`.
pub fn kramers_kronig_transform(
    table: &OpticalDataTable,
    xi: f64,
    tails: TailPolicy,
) -> Result<f64> {
    if !(xi >= 0.0) || !xi.is_finite() {
        return Err(Error::domain("xi", xi, "must be non-negative and finite"));
    }
    if table.is_empty() {
        return Err(Error::Config("optical data table is empty".into()));
    }
    let xi2 = xi * xi;
    let w_first = table.min_frequency();
    let mut integral = 0.0;

    match tails.low {
        LowFrequencyTail::Zero => {}
        LowFrequencyTail::Constant => {
            let c = table.im_eps[0];
            if c > 0.0 {
                if xi == 0.0 {
                    return Err(Error::Config(
                        "constant low-frequency tail with Im ε > 0 diverges at ξ = 0".into(),
                    ));
                }
                integral += 0.5 * c * (w_first * w_first / xi2).ln_1p();
            }
        }
        LowFrequencyTail::Drude {
            plasma_frequency,
            damping,
        } => {
            if !(plasma_frequency > 0.0) || !(damping > 0.0) {
                return Err(Error::Config(
                    "Drude tail needs positive plasma frequency and damping".into(),
                ));
            }
            if xi == 0.0 {
                return Err(Error::Config(
                    "Drude low-frequency tail diverges at ξ = 0".into(),
                ));
            }
            integral += plasma_frequency * plasma_frequency
                * damping
                * drude_tail_integral(w_first, damping, xi)?;
        }
    }

    for i in 0..table.len().saturating_sub(1) {
        let (w0, w1) = (table.omega[i], table.omega[i + 1]);
        let (e0, e1) = (table.im_eps[i], table.im_eps[i + 1]);
        if e0 == 0.0 && e1 == 0.0 {
            continue;
        }
        let slope = (e1 - e0) / (w1 - w0);
        let integrand = |w: f64| w * (e0 + slope * (w - w0)) / (w * w + xi2);
        let panels = ((w1 / w0).ln() / MAX_PANEL_RATIO.ln()).ceil().max(1.0) as usize;
        let step = (w1 / w0).powf(1.0 / panels as f64);
        let mut a = w0;
        for p in 0..panels {
            let b = if p + 1 == panels { w1 } else { a * step };
            integral += quadrature::integrate(&integrand, a, b, KK_REL_TOLERANCE, 0.0)?.value;
            a = b;
        }
    }

    match tails.high {
        HighFrequencyTail::Zero => {}
        HighFrequencyTail::InverseCube => {
            let w_last = table.max_frequency();
            let amplitude = table.im_eps[table.len() - 1] * w_last.powi(3);
            if amplitude > 0.0 {
                // Substituting u = ω_N / ω keeps the integrand O(1).
                let r = quadrature::integrate(
                    |u| {
                        let w = w_last / u;
                        amplitude / (w * w * (w * w + xi2)) * w_last / (u * u)
                    },
                    0.0,
                    1.0,
                    KK_REL_TOLERANCE,
                    0.0,
                )?;
                integral += r.value;
            }
        }
    }

    Ok(1.0 + 2.0 / PI * integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::io::Cursor;

    fn table(rows: &[(f64, f64)]) -> OpticalDataTable {
        OpticalDataTable::new(rows.to_vec()).unwrap()
    }

    #[test]
    fn vacuum_table_gives_one() {
        let t = table(&[(1e14, 0.0), (1e15, 0.0), (1e16, 0.0)]);
        for xi in [1e13, 1e15, 1e17] {
            assert_eq!(kramers_kronig_transform(&t, xi, TailPolicy::default()).unwrap(), 1.0);
        }
        // integrable at ξ = 0 since the low tail vanishes
        assert_eq!(kramers_kronig_transform(&t, 0.0, TailPolicy::default()).unwrap(), 1.0);
    }

    #[test]
    fn box_absorption_matches_closed_form() {
        // Im ε = c on [w0, w1], zero elsewhere:
        // ε(iξ) = 1 + (c/π) ln((w1² + ξ²)/(w0² + ξ²))
        let (w0, w1, c) = (1e15, 4e15, 2.5);
        let t = table(&[(w0, c), (w1, c)]);
        let tails = TailPolicy {
            low: LowFrequencyTail::Zero,
            high: HighFrequencyTail::Zero,
        };
        for xi in [0.0, 3e14, 2e15, 1e16] {
            let exact = 1.0 + c / PI * ((w1 * w1 + xi * xi) / (w0 * w0 + xi * xi)).ln();
            let got = kramers_kronig_transform(&t, xi, tails).unwrap();
            assert_relative_eq!(got, exact, max_relative = 1e-8);
        }
    }

    #[test]
    fn inverse_cube_tail_closed_form() {
        // Only the tail contributes: (2/π) A ∫_N^∞ dω / (ω²(ω² + ξ²))
        let wn = 1e16;
        let t = table(&[(wn * 0.5, 0.0), (wn, 0.3)]);
        let tails = TailPolicy {
            low: LowFrequencyTail::Zero,
            high: HighFrequencyTail::InverseCube,
        };
        let a = 0.3 * wn.powi(3);
        let xi: f64 = 2e16;
        let tail = a / (xi * xi) * (1.0 / wn - (PI / 2.0 - (wn / xi).atan()) / xi);
        let body = {
            // linear ramp from 0 to 0.3 on [wn/2, wn]
            let r = quadrature::integrate(
                |w| w * 0.3 * (w - wn * 0.5) / (wn * 0.5) / (w * w + xi * xi),
                wn * 0.5,
                wn,
                1e-12,
                0.0,
            )
            .unwrap();
            r.value
        };
        let exact = 1.0 + 2.0 / PI * (tail + body);
        assert_relative_eq!(
            kramers_kronig_transform(&t, xi, tails).unwrap(),
            exact,
            max_relative = 1e-7
        );
    }

    #[test]
    fn drude_tail_reproduces_drude_permittivity() {
        // A table with negligible absorption plus a Drude tail reaching far
        // up approaches ω_p² / (ξ(ξ + γ)) + 1.
        let (wp, g) = (1.367e16, 5.3e13);
        let t = table(&[(1e20, 0.0), (2e20, 0.0)]);
        let tails = TailPolicy {
            low: LowFrequencyTail::Drude {
                plasma_frequency: wp,
                damping: g,
            },
            high: HighFrequencyTail::Zero,
        };
        for xi in [g, 1e14, 1e15, 1e16] {
            let exact = 1.0 + wp * wp / (xi * (xi + g));
            assert_relative_eq!(
                kramers_kronig_transform(&t, xi, tails).unwrap(),
                exact,
                max_relative = 1e-6
            );
        }
    }

    #[test]
    fn divergent_tails_rejected_at_zero_frequency() {
        let t = table(&[(1e15, 0.5), (2e15, 0.5)]);
        assert!(matches!(
            kramers_kronig_transform(&t, 0.0, TailPolicy::default()),
            Err(Error::Config(_))
        ));
        let drude = TailPolicy {
            low: LowFrequencyTail::Drude {
                plasma_frequency: 1e16,
                damping: 1e13,
            },
            high: HighFrequencyTail::Zero,
        };
        assert!(matches!(
            kramers_kronig_transform(&t, 0.0, drude),
            Err(Error::Config(_))
        ));
        let bad = TailPolicy {
            low: LowFrequencyTail::Drude {
                plasma_frequency: -1.0,
                damping: 1e13,
            },
            high: HighFrequencyTail::Zero,
        };
        assert!(matches!(
            kramers_kronig_transform(&t, 1e14, bad),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn negative_xi_is_domain_error() {
        let t = table(&[(1e15, 0.5), (2e15, 0.5)]);
        assert!(matches!(
            kramers_kronig_transform(&t, -1.0, TailPolicy::default()),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn load_two_rows() {
        let src = "# omega  im_eps\n1.0e15 0.1\n\n2.0e15 0.2\n";
        let t = load_optical_data(Cursor::new(src), FrequencyUnit::RadPerSecond).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.rows().collect::<Vec<_>>(), vec![(1.0e15, 0.1), (2.0e15, 0.2)]);
    }

    #[test]
    fn load_converts_electron_volts() {
        let src = "1.5 0.0\n3.0 1.0\n";
        let t = load_optical_data(Cursor::new(src), FrequencyUnit::ElectronVolt).unwrap();
        let rows: Vec<_> = t.rows().collect();
        // 1.5 eV / ħ computed by hand with CODATA 2018 e and ħ
        assert_relative_eq!(rows[0].0, 2_278_901_173_214_265.5, max_relative = 1e-15);
        assert_relative_eq!(rows[1].0, 2.0 * 2_278_901_173_214_265.5, max_relative = 1e-15);
    }

    #[test]
    fn load_accepts_descending_rows() {
        let src = "3.0 1.0\n2.0 0.5\n1.0 0.0\n";
        let t = load_optical_data(Cursor::new(src), FrequencyUnit::ElectronVolt).unwrap();
        let w: Vec<f64> = t.rows().map(|r| r.0).collect();
        assert!(w.windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn load_reports_offending_row() {
        let src = "# header\n1.0 0.1\n2.0 -0.3\n";
        match load_optical_data(Cursor::new(src), FrequencyUnit::ElectronVolt) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("data row 2"), "{message}");
                assert!(message.contains("negative"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn load_rejects_malformed_and_non_monotone() {
        let cases = [
            ("1.0 0.1 7\n", 1),
            ("1.0 abc\n", 1),
            ("1.0 0.1\n2.0 0.1\n1.5 0.1\n", 3),
            ("1.0 0.1\n1.0 0.2\n", 2),
            ("0.0 0.1\n", 1),
        ];
        for (src, expected_line) in cases {
            match load_optical_data(Cursor::new(src), FrequencyUnit::ElectronVolt) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, expected_line, "{src:?}"),
                other => panic!("{src:?}: expected parse error, got {other:?}"),
            }
        }
        assert!(load_optical_data(Cursor::new("# only comments\n"), FrequencyUnit::ElectronVolt).is_err());
    }

    #[test]
    fn interpolation_is_linear() {
        let t = table(&[(1.0, 0.0), (3.0, 2.0)]);
        assert_eq!(t.interpolate(2.0), Some(1.0));
        assert_eq!(t.interpolate(3.0), Some(2.0));
        assert_eq!(t.interpolate(4.0), None);
    }
}
