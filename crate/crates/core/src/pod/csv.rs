use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::PodSpectrum;
use crate::error::{Error, Result};

pub const SPECTRUM_CSV_HEADER: &str = "index,sigma,sigma_norm,cumulative_energy";

/// Render a spectrum as CSV (17 significant digits). An all-zero spectrum
/// has no normalization, so those two columns are written as `NaN`.
pub fn spectrum_csv(s: &PodSpectrum) -> String {
    let norm = s.normalized().ok();
    let cum = s.cumulative_energy().ok();
    let mut out = String::with_capacity(80 * (s.len() + 1));
    out.push_str(SPECTRUM_CSV_HEADER);
    out.push('\n');
    for (k, sigma) in s.sigma().iter().enumerate() {
        let n = norm.as_ref().map_or(f64::NAN, |v| v[k]);
        let c = cum.as_ref().map_or(f64::NAN, |v| v[k]);
        writeln!(out, "{},{:.16e},{:.16e},{:.16e}", k + 1, sigma, n, c).unwrap();
    }
    out
}

pub fn write_spectrum_csv(s: &PodSpectrum, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, spectrum_csv(s))?;
    Ok(())
}

/// Read back the `sigma` column of a spectrum CSV. The spectrum is labelled
/// with the file stem.
pub fn read_spectrum_csv(path: impl AsRef<Path>) -> Result<PodSpectrum> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_spectrum_csv(&text, label)
}

pub(crate) fn parse_spectrum_csv(text: &str, label: String) -> Result<PodSpectrum> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header.trim() != SPECTRUM_CSV_HEADER {
        return Err(Error::Data(format!(
            "unexpected spectrum CSV header '{header}'"
        )));
    }
    let mut sigma = Vec::new();
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let mut fields = line.split(',');
        let index: usize = fields
            .next()
            .and_then(|f| f.trim().parse().ok())
            .ok_or_else(|| Error::Data(format!("line {}: bad index", n + 2)))?;
        if index != sigma.len() + 1 {
            return Err(Error::Data(format!(
                "line {}: expected index {}, found {index}",
                n + 2,
                sigma.len() + 1
            )));
        }
        let value: f64 = fields
            .next()
            .and_then(|f| f.trim().parse().ok())
            .ok_or_else(|| Error::Data(format!("line {}: bad sigma", n + 2)))?;
        sigma.push(value);
    }
    PodSpectrum::new(sigma, label)
}
