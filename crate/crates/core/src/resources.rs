//! Volumetric cost: qubit width x circuit depth x measurement settings.
//!
//! Concrete rows measure built circuits. Asymptotic rows evaluate the
//! scaling classes of each approach twice: with unit constants inside the
//! big-O (three settings for the one-hot protocol, `2n + 1` for binary
//! ones), and constants-free, where every factor is reduced to its leading
//! power of `N` and `n`.

use serde::Serialize;

use crate::ansatz::{build_binary_ses_circuit, build_ses_circuit, ParameterVector};
use crate::circuit::{Circuit, CircuitError};
use crate::encoding::{register_width, EncodingMap, EncodingMode};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VolumetricReport {
    pub approach: String,
    pub width: u128,
    pub depth: u128,
    pub settings: u128,
    /// `width * depth * settings`.
    pub volume: u128,
    pub formula: Option<String>,
}

impl VolumetricReport {
    fn new(approach: &str, width: u128, depth: u128, settings: u128, formula: Option<String>) -> Self {
        Self { approach: approach.into(), width, depth, settings, volume: width * depth * settings, formula }
    }
}

/// Measured width and layered depth of `c` (after decomposition) with the
/// given number of settings.
pub fn volumetric_cost(c: &Circuit, n_settings: usize) -> Result<VolumetricReport, CircuitError> {
    let m = c.metrics()?;
    Ok(VolumetricReport::new(c.label(), m.width as u128, m.depth as u128, n_settings as u128, None))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsFreeRow {
    pub approach: String,
    pub formula: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Speedup {
    pub approach: String,
    /// Original volume over this approach's, unit constants.
    pub unit_ratio: f64,
    pub unit_bucket: i32,
    /// Same ratio with the constants-free volumes.
    pub constants_free_ratio: f64,
    pub constants_free_bucket: i32,
    /// Constants-free ratio to two significant digits, e.g. `1.4e8`.
    pub leading_figure: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticTable {
    pub n_sites: u64,
    pub n: u32,
    pub unit_rows: Vec<VolumetricReport>,
    pub constants_free: Vec<ConstantsFreeRow>,
    pub speedups: Vec<Speedup>,
}

pub const APPROACHES: [&str; 4] = ["original", "hardware_efficient", "full", "gray"];

/// `floor(log10 x)`.
pub fn bucket(x: f64) -> i32 {
    x.log10().floor() as i32
}

/// `x` rounded to `sig` significant digits in `m.me<exp>` form.
pub fn leading_figure(x: f64, sig: usize) -> String {
    format!("{:.*e}", sig.saturating_sub(1), x)
}

/// Scaling rows for `n_sites >= 2`, with `n = ceil(log2 N)`.
pub fn asymptotic_table(n_sites: u64) -> AsymptoticTable {
    let n = register_width(n_sites.max(1) as usize) as u32;
    let (big, small) = (n_sites as u128, n as u128);
    let binary_settings = 2 * small + 1;
    let unit_rows = vec![
        VolumetricReport::new(APPROACHES[0], big, big, 3, Some("N * N * 3".into())),
        VolumetricReport::new(APPROACHES[1], small, small, binary_settings, Some("n * n * (2n+1)".into())),
        VolumetricReport::new(APPROACHES[2], small, big, binary_settings, Some("n * N * (2n+1)".into())),
        VolumetricReport::new(APPROACHES[3], small, big * small, binary_settings, Some("n * (N n) * (2n+1)".into())),
    ];
    let (bf, sf) = (n_sites as f64, n as f64);
    let constants_free: Vec<ConstantsFreeRow> = [
        ("N^2", bf * bf),
        ("n^3", sf.powi(3)),
        ("N n^2", bf * sf * sf),
        ("N n^3", bf * sf.powi(3)),
    ]
    .into_iter()
    .zip(APPROACHES)
    .map(|((formula, value), approach)| ConstantsFreeRow { approach: approach.into(), formula: formula.into(), value })
    .collect();
    let speedups = (1..4)
        .map(|i| {
            let unit_ratio = unit_rows[0].volume as f64 / unit_rows[i].volume as f64;
            let cf = constants_free[0].value / constants_free[i].value;
            Speedup {
                approach: APPROACHES[i].into(),
                unit_ratio,
                unit_bucket: bucket(unit_ratio),
                constants_free_ratio: cf,
                constants_free_bucket: bucket(cf),
                leading_figure: leading_figure(cf, 2),
            }
        })
        .collect();
    AsymptoticTable { n_sites, n, unit_rows, constants_free, speedups }
}

/// Aligned plain-text rendering of a table.
pub fn format_table(t: &AsymptoticTable) -> String {
    let mut out = format!("N = {}, n = {}\n\n", t.n_sites, t.n);
    out.push_str(&format!(
        "{:<20} {:>14} {:>14} {:>10} {:>22}   {}\n",
        "approach", "width", "depth", "settings", "volume", "formula"
    ));
    for r in &t.unit_rows {
        out.push_str(&format!(
            "{:<20} {:>14} {:>14} {:>10} {:>22}   {}\n",
            r.approach,
            r.width,
            r.depth,
            r.settings,
            r.volume,
            r.formula.as_deref().unwrap_or("")
        ));
    }
    out.push_str(&format!("\n{:<20} {:>10} {:>16}\n", "constants-free", "formula", "value"));
    for r in &t.constants_free {
        out.push_str(&format!("{:<20} {:>10} {:>16.6e}\n", r.approach, r.formula, r.value));
    }
    out.push_str(&format!(
        "\n{:<20} {:>14} {:>7} {:>18} {:>7} {:>9}\n",
        "speedup vs original", "unit", "bucket", "constants-free", "bucket", "leading"
    ));
    for s in &t.speedups {
        out.push_str(&format!(
            "{:<20} {:>14.1} {:>7} {:>18.1} {:>7} {:>9}\n",
            s.approach, s.unit_ratio, s.unit_bucket, s.constants_free_ratio, s.constants_free_bucket, s.leading_figure
        ));
    }
    out
}

/// Measured rows for the one-hot and binary chain ansaetze on `n_sites`
/// sites, with their protocols' setting counts. Gate structure does not
/// depend on angle values, so all angles are zero.
pub fn concrete_rows(n_sites: usize) -> Result<Vec<VolumetricReport>, CircuitError> {
    let params = ParameterVector::new(vec![(0.0, 0.0); n_sites.saturating_sub(1)])?;
    let one_hot = build_ses_circuit(&params, n_sites)?;
    let map = EncodingMap::build(n_sites, EncodingMode::Shifted).map_err(|e| CircuitError::Encoding(e.to_string()))?;
    let binary = build_binary_ses_circuit(&params, &map)?;
    Ok(vec![volumetric_cost(&one_hot, 3)?, volumetric_cost(&binary, 2 * map.width() + 1)?])
}
