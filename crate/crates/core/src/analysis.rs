//! Decay-rate fits and mode-count comparisons between spectra.

use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pod::{modes_for_energy, normalized_spectrum, PodSpectrum};

/// Default fit window (1-based, inclusive).
pub const DEFAULT_FIT_RANGE: (usize, usize) = (4, 64);
/// Singular values below this fraction of σ₁ are treated as round-off.
pub const ROUNDOFF_FLOOR: f64 = 1e-14;
const MIN_FIT_POINTS: usize = 4;

pub const REPORT_CSV_HEADER: &str =
    "case,threshold,modes_needed,loglog_slope,semilog_slope,fit_residual";
pub const VERDICT_CSV_HEADER: &str = "case_a,case_b,threshold,verdict";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModel {
    /// `log σₙ` against `n`: exponential decay gives a straight line.
    Semilog,
    /// `log σₙ` against `log n`: power-law decay gives a straight line.
    Loglog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub model: DecayModel,
    pub slope: f64,
    pub intercept: f64,
    /// Indices actually used (1-based, inclusive).
    pub fit_range: (usize, usize),
    /// RMS deviation of `log σ` from the fitted line.
    pub residual: f64,
    /// First index whose σ lies under the round-off floor, if any.
    pub cut_index: Option<usize>,
}

/// Least-squares line through `(n, log σₙ)` or `(log n, log σₙ)`.
pub fn fit_decay(
    s: &PodSpectrum,
    model: DecayModel,
    fit_range: (usize, usize),
) -> Result<DecayFit> {
    let (start, end) = fit_range;
    if start == 0 || end < start {
        return Err(Error::Argument(format!(
            "invalid fit range [{start}, {end}]"
        )));
    }
    let sigma = s.sigma();
    let floor = ROUNDOFF_FLOOR * sigma[0];
    let cut_index = sigma
        .iter()
        .position(|&v| v < floor || v <= 0.0)
        .map(|k| k + 1);
    let last = end
        .min(sigma.len())
        .min(cut_index.map_or(usize::MAX, |c| c - 1));
    if last < start || last + 1 - start < MIN_FIT_POINTS {
        return Err(Error::DegenerateFit(format!(
            "'{}': fewer than {MIN_FIT_POINTS} positive singular values in [{start}, {end}] (cut at {cut_index:?})",
            s.source_label()
        )));
    }

    let pts: Vec<(f64, f64)> = (start..=last)
        .map(|n| {
            let x = match model {
                DecayModel::Semilog => n as f64,
                DecayModel::Loglog => (n as f64).ln(),
            };
            (x, sigma[n - 1].ln())
        })
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(DecayFit {
        model,
        slope,
        intercept,
        fit_range: (start, last),
        residual,
        cut_index,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    /// `case_a` needs fewer modes than `case_b`.
    Fewer,
    More,
    Tie,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Fewer => "fewer",
            Verdict::More => "more",
            Verdict::Tie => "tie",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseSummary {
    pub name: String,
    /// `(threshold, modes_needed)` in ascending threshold order.
    pub modes: Vec<(f64, usize)>,
    pub normalized: Vec<f64>,
    pub loglog: Option<DecayFit>,
    pub semilog: Option<DecayFit>,
}

impl CaseSummary {
    pub fn modes_at(&self, threshold: f64) -> Option<usize> {
        self.modes
            .iter()
            .find(|(t, _)| *t == threshold)
            .map(|(_, n)| *n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairVerdict {
    pub case_a: String,
    pub case_b: String,
    pub threshold: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub thresholds: Vec<f64>,
    pub fit_range: (usize, usize),
    /// Sorted by case name.
    pub cases: Vec<CaseSummary>,
    /// Every ordered pair of distinct cases at every threshold, sorted by
    /// `(case_a, case_b, threshold)`.
    pub verdicts: Vec<PairVerdict>,
}

impl SpectrumReport {
    pub fn case(&self, name: &str) -> Option<&CaseSummary> {
        self.cases.iter().find(|c| c.name == name)
    }

    pub fn verdict(&self, a: &str, b: &str, threshold: f64) -> Option<Verdict> {
        self.verdicts
            .iter()
            .find(|v| v.case_a == a && v.case_b == b && v.threshold == threshold)
            .map(|v| v.verdict)
    }
}

pub fn compare(
    spectra: &[(String, PodSpectrum)],
    thresholds: &[f64],
    fit_range: (usize, usize),
) -> Result<SpectrumReport> {
    if spectra.len() < 2 {
        return Err(Error::Argument(format!(
            "comparison needs at least 2 spectra, got {}",
            spectra.len()
        )));
    }
    if thresholds.is_empty() {
        return Err(Error::Argument("no energy thresholds given".into()));
    }
    let mut thresholds = thresholds.to_vec();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    let mut cases = Vec::with_capacity(spectra.len());
    for (name, s) in spectra {
        if cases.iter().any(|c: &CaseSummary| &c.name == name) {
            return Err(Error::Argument(format!("duplicate case name '{name}'")));
        }
        let modes = thresholds
            .iter()
            .map(|&t| Ok((t, modes_for_energy(s, t)?.modes_needed)))
            .collect::<Result<Vec<_>>>()?;
        cases.push(CaseSummary {
            name: name.clone(),
            modes,
            normalized: normalized_spectrum(s)?,
            loglog: fit_decay(s, DecayModel::Loglog, fit_range).ok(),
            semilog: fit_decay(s, DecayModel::Semilog, fit_range).ok(),
        });
    }
    cases.sort_by(|a, b| a.name.cmp(&b.name));

    let mut verdicts = Vec::new();
    for a in &cases {
        for b in cases.iter().filter(|b| b.name != a.name) {
            for (k, &t) in thresholds.iter().enumerate() {
                let (na, nb) = (a.modes[k].1, b.modes[k].1);
                let verdict = match na.cmp(&nb) {
                    std::cmp::Ordering::Less => Verdict::Fewer,
                    std::cmp::Ordering::Greater => Verdict::More,
                    std::cmp::Ordering::Equal => Verdict::Tie,
                };
                verdicts.push(PairVerdict {
                    case_a: a.name.clone(),
                    case_b: b.name.clone(),
                    threshold: t,
                    verdict,
                });
            }
        }
    }
    Ok(SpectrumReport {
        thresholds,
        fit_range,
        cases,
        verdicts,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.16e}"),
        None => "NaN".into(),
    }
}

/// Per-case report; `fit_residual` is the residual of the log–log fit.
pub fn report_csv(r: &SpectrumReport) -> String {
    let mut out = String::new();
    out.push_str(REPORT_CSV_HEADER);
    out.push('\n');
    for c in &r.cases {
        for (t, n) in &c.modes {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                c.name,
                t,
                n,
                fmt_opt(c.loglog.as_ref().map(|f| f.slope)),
                fmt_opt(c.semilog.as_ref().map(|f| f.slope)),
                fmt_opt(c.loglog.as_ref().map(|f| f.residual)),
            )
            .unwrap();
        }
    }
    out
}

pub fn verdicts_csv(r: &SpectrumReport) -> String {
    let mut out = String::new();
    out.push_str(VERDICT_CSV_HEADER);
    out.push('\n');
    for v in &r.verdicts {
        writeln!(
            out,
            "{},{},{},{}",
            v.case_a, v.case_b, v.threshold, v.verdict
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: Vec<f64>) -> PodSpectrum {
        PodSpectrum::new(s, "t").unwrap()
    }

    #[test]
    fn exact_power_law() {
        let s = spec((1..=128).map(|n| (n as f64).powf(-0.5)).collect());
        let f = fit_decay(&s, DecayModel::Loglog, (4, 64)).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-10, "{}", f.slope);
        assert!(f.intercept.abs() < 1e-10);
        assert_eq!(f.fit_range, (4, 64));
        assert_eq!(f.cut_index, None);
    }

    #[test]
    fn exact_exponential() {
        let s = spec((1..=40).map(|n| (-(n as f64)).exp()).collect());
        let f = fit_decay(&s, DecayModel::Semilog, (1, 20)).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-10);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn roundoff_floor_cuts_fit() {
        let mut sigma: Vec<f64> = (0..30).map(|n| 3.0 * 10f64.powi(-n)).collect();
        sigma.extend([0.0; 5]);
        let f = fit_decay(&spec(sigma), DecayModel::Semilog, (4, 64)).unwrap();
        assert_eq!(f.cut_index, Some(16));
        assert_eq!(f.fit_range, (4, 15));
        assert!((f.slope + 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn degenerate_fit() {
        let s = spec(vec![1.0, 0.5, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            fit_decay(&s, DecayModel::Loglog, (1, 6)),
            Err(Error::DegenerateFit(_))
        ));
        assert!(fit_decay(&s, DecayModel::Loglog, (0, 6)).is_err());
    }

    #[test]
    fn fit_slope_is_scale_invariant() {
        let base: Vec<f64> = (1..=80)
            .map(|n| 1.0 / (n as f64 + (n as f64).sin()))
            .collect();
        let a = fit_decay(&spec(base.clone()), DecayModel::Loglog, (4, 64)).unwrap();
        let b = fit_decay(
            &spec(base.iter().map(|x| x * 8.0).collect()),
            DecayModel::Loglog,
            (4, 64),
        )
        .unwrap();
        assert!((a.slope - b.slope).abs() < 1e-12);
        assert!((b.intercept - a.intercept - 8f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn compare_hand_case_and_ties() {
        let input = vec![
            ("A".to_string(), spec(vec![1.0, 0.0])),
            ("B".to_string(), spec(vec![1.0, 1.0])),
        ];
        let r = compare(&input, &[0.9], DEFAULT_FIT_RANGE).unwrap();
        assert_eq!(r.case("A").unwrap().modes_at(0.9), Some(1));
        assert_eq!(r.case("B").unwrap().modes_at(0.9), Some(2));
        assert_eq!(r.verdict("A", "B", 0.9), Some(Verdict::Fewer));
        assert_eq!(r.verdict("B", "A", 0.9), Some(Verdict::More));

        let same = vec![
            ("x".to_string(), spec(vec![2.0, 1.0, 0.5])),
            ("y".to_string(), spec(vec![2.0, 1.0, 0.5])),
        ];
        let r = compare(&same, &[0.5, 0.99], DEFAULT_FIT_RANGE).unwrap();
        assert!(r.verdicts.iter().all(|v| v.verdict == Verdict::Tie));
    }

    #[test]
    fn compare_input_errors() {
        assert!(compare(&[], &[0.9], DEFAULT_FIT_RANGE).is_err());
        let one = vec![("a".to_string(), spec(vec![1.0]))];
        assert!(compare(&one, &[0.9], DEFAULT_FIT_RANGE).is_err());
        let dup = vec![
            ("a".to_string(), spec(vec![1.0])),
            ("a".to_string(), spec(vec![1.0])),
        ];
        assert!(compare(&dup, &[0.9], DEFAULT_FIT_RANGE).is_err());
    }

    #[test]
    fn compare_is_order_invariant_and_antisymmetric() {
        let mk = |n: &str, r: f64| (n.to_string(), spec((0..50).map(|k| r.powi(k)).collect()));
        let a = vec![mk("fast", 0.5), mk("mid", 0.8), mk("slow", 0.95)];
        let b = vec![mk("slow", 0.95), mk("fast", 0.5), mk("mid", 0.8)];
        let ra = compare(&a, &[0.99, 0.9], DEFAULT_FIT_RANGE).unwrap();
        let rb = compare(&b, &[0.9, 0.99], DEFAULT_FIT_RANGE).unwrap();
        assert_eq!(ra, rb);
        for v in &ra.verdicts {
            let back = ra.verdict(&v.case_b, &v.case_a, v.threshold).unwrap();
            let expect = match v.verdict {
                Verdict::Fewer => Verdict::More,
                Verdict::More => Verdict::Fewer,
                Verdict::Tie => Verdict::Tie,
            };
            assert_eq!(back, expect);
        }
        assert_eq!(ra.verdict("fast", "slow", 0.99), Some(Verdict::Fewer));
        let csv = report_csv(&ra);
        assert!(csv.starts_with(REPORT_CSV_HEADER));
        assert_eq!(csv.lines().count(), 1 + 3 * 2);
        assert_eq!(verdicts_csv(&ra).lines().count(), 1 + 6 * 2);
    }
}
