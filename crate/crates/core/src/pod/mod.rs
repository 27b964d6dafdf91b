//! Proper orthogonal decomposition of snapshot matrices.
//!
//! `X = U Σ Vᵀ`: the left singular vectors are the POD modes, `Σ Vᵀ` the
//! modal coefficients of every snapshot.

mod csv;
mod jacobi;

use std::str::FromStr;

use indexmap::IndexMap;
use nalgebra::DMatrix;

pub use self::csv::{read_spectrum_csv, spectrum_csv, write_spectrum_csv, SPECTRUM_CSV_HEADER};
pub use self::jacobi::symmetric_eigen;
use crate::error::{Error, Result};
use crate::grid_field::SnapshotMatrix;

/// Relative cut below which Gram eigenvalues are treated as round-off.
const GRAM_EIGEN_FLOOR: f64 = 1e-14;
const SVD_MAX_ITERATIONS: usize = 10_000;

/// Singular values sorted in non-increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct PodSpectrum {
    sigma: Vec<f64>,
    source_label: String,
}

impl PodSpectrum {
    pub fn new(sigma: Vec<f64>, source_label: impl Into<String>) -> Result<Self> {
        if sigma.is_empty() {
            return Err(Error::Data("spectrum must have at least one entry".into()));
        }
        if let Some(k) = sigma.iter().position(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::Data(format!(
                "singular value {k} = {} is not a finite non-negative number",
                sigma[k]
            )));
        }
        if let Some(k) = sigma.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::Data(format!(
                "singular values must be non-increasing (sigma[{}] < sigma[{}])",
                k,
                k + 1
            )));
        }
        Ok(Self {
            sigma,
            source_label: source_label.into(),
        })
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.source_label = label.into();
        self
    }

    /// `σᵢ / σ₁`.
    pub fn normalized(&self) -> Result<Vec<f64>> {
        normalized_spectrum(self)
    }

    /// Cumulative energy fractions `Σ_{i≤N} σᵢ² / Σ σᵢ²`.
    pub fn cumulative_energy(&self) -> Result<Vec<f64>> {
        let total: f64 = self.sigma.iter().map(|s| s * s).sum();
        if total == 0.0 {
            return Err(Error::DegenerateSpectrum(format!(
                "'{}' has zero energy",
                self.source_label
            )));
        }
        let mut acc = 0.0;
        let mut cum: Vec<f64> = self
            .sigma
            .iter()
            .map(|s| {
                acc += s * s;
                acc / total
            })
            .collect();
        // The final partial sum is the total itself; pin it against reordering noise.
        *cum.last_mut().unwrap() = 1.0;
        Ok(cum)
    }

    /// `Σ_{i>r} σᵢ²`, the squared Frobenius error of the best rank-`r` approximation.
    pub fn tail_energy(&self, r: usize) -> f64 {
        self.sigma.iter().skip(r).map(|s| s * s).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SvdMethod {
    /// Method of snapshots when `n_dof > 4·n_snaps`, dense SVD otherwise.
    #[default]
    Auto,
    Direct,
    MethodOfSnapshots,
}

impl SvdMethod {
    pub fn resolve(self, n_dof: usize, n_snaps: usize) -> SvdMethod {
        match self {
            SvdMethod::Auto if n_dof > 4 * n_snaps => SvdMethod::MethodOfSnapshots,
            SvdMethod::Auto => SvdMethod::Direct,
            m => m,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SvdMethod::Auto => "auto",
            SvdMethod::Direct => "direct",
            SvdMethod::MethodOfSnapshots => "method_of_snapshots",
        }
    }
}

impl FromStr for SvdMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SvdMethod::Auto),
            "direct" => Ok(SvdMethod::Direct),
            "method_of_snapshots" | "snapshots" => Ok(SvdMethod::MethodOfSnapshots),
            other => Err(Error::Argument(format!("unknown SVD method '{other}'"))),
        }
    }
}

/// POD modes, modal coefficients and the singular values behind them.
#[derive(Debug, Clone)]
pub struct PodBasis {
    modes: DMatrix<f64>,
    coeffs: DMatrix<f64>,
    spectrum: PodSpectrum,
}

impl PodBasis {
    /// `n_dof × r` matrix with orthonormal columns.
    pub fn modes(&self) -> &DMatrix<f64> {
        &self.modes
    }

    /// `r × n_snaps` matrix `Σ Vᵀ`.
    pub fn coeffs(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    pub fn spectrum(&self) -> &PodSpectrum {
        &self.spectrum
    }

    pub fn rank(&self) -> usize {
        self.modes.ncols()
    }

    /// `U · (Σ Vᵀ)`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.modes * &self.coeffs
    }

    /// Right singular vectors, i.e. the coefficient rows divided by `σᵢ`.
    /// Rows for zero singular values are left at zero.
    pub fn normalized_coeffs(&self) -> DMatrix<f64> {
        let mut v = self.coeffs.clone();
        for (k, mut row) in v.row_iter_mut().enumerate() {
            let s = self.spectrum.sigma[k];
            if s > 0.0 {
                row /= s;
            }
        }
        v
    }
}

pub fn decompose(m: &SnapshotMatrix, method: SvdMethod) -> Result<PodBasis> {
    decompose_matrix(m.data(), method, "")
}

/// Decompose a raw matrix; `label` is attached to the spectrum.
pub fn decompose_matrix(x: &DMatrix<f64>, method: SvdMethod, label: &str) -> Result<PodBasis> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(Error::Dimension("cannot decompose an empty matrix".into()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("matrix contains non-finite entries".into()));
    }
    let (mut modes, sigma, mut coeffs) = match method.resolve(x.nrows(), x.ncols()) {
        SvdMethod::MethodOfSnapshots => method_of_snapshots(x)?,
        _ => direct_svd(x)?,
    };
    fix_signs(&mut modes, &mut coeffs);
    Ok(PodBasis {
        modes,
        coeffs,
        spectrum: PodSpectrum::new(sigma, label)?,
    })
}

fn direct_svd(x: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
    let svd = nalgebra::SVD::try_new(x.clone(), true, true, f64::EPSILON, SVD_MAX_ITERATIONS)
        .ok_or_else(|| Error::numerical("SVD did not converge", SVD_MAX_ITERATIONS, f64::NAN))?;
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested Vᵀ");
    let s = svd.singular_values;

    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));

    let r = s.len();
    let mut modes = DMatrix::zeros(x.nrows(), r);
    let mut coeffs = DMatrix::zeros(r, x.ncols());
    let mut sigma = Vec::with_capacity(r);
    for (k, &src) in order.iter().enumerate() {
        modes.set_column(k, &u.column(src));
        coeffs.set_row(k, &(vt.row(src) * s[src]));
        sigma.push(s[src]);
    }
    Ok((modes, sigma, coeffs))
}

/// POD via the `n_snaps × n_snaps` Gram matrix `XᵀX = V Λ Vᵀ`; modes are
/// lifted as `U = X V Σ⁻¹` for the non-zero singular values only.
fn method_of_snapshots(x: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
    let gram = x.tr_mul(x);
    let (lambda, vecs) = symmetric_eigen(&gram)?;

    let mut order: Vec<usize> = (0..lambda.len()).collect();
    order.sort_by(|&a, &b| lambda[b].total_cmp(&lambda[a]));
    let lambda_max = lambda[order[0]].max(0.0);

    let n_spec = x.nrows().min(x.ncols());
    let mut sigma = Vec::with_capacity(n_spec);
    let mut kept = Vec::new();
    for &k in order.iter().take(n_spec) {
        let l = lambda[k];
        if l > GRAM_EIGEN_FLOOR * lambda_max && l > 0.0 {
            sigma.push(l.sqrt());
            kept.push(k);
        } else {
            sigma.push(0.0);
        }
    }

    let r = kept.len();
    let mut v_r = DMatrix::zeros(x.ncols(), r);
    for (c, &k) in kept.iter().enumerate() {
        v_r.set_column(c, &vecs.column(k));
    }
    let mut modes = x * &v_r;
    let mut coeffs = v_r.transpose();
    for (c, &s) in sigma.iter().take(r).enumerate() {
        modes.column_mut(c).scale_mut(1.0 / s);
        coeffs.row_mut(c).scale_mut(s);
    }
    Ok((modes, sigma, coeffs))
}

/// Make the largest-magnitude entry of every mode positive.
fn fix_signs(modes: &mut DMatrix<f64>, coeffs: &mut DMatrix<f64>) {
    for k in 0..modes.ncols() {
        let col = modes.column(k);
        let pivot = col.iter().fold(
            0.0f64,
            |best, &v| if v.abs() > best.abs() { v } else { best },
        );
        if pivot < 0.0 {
            modes.column_mut(k).neg_mut();
            coeffs.row_mut(k).neg_mut();
        }
    }
}

pub fn normalized_spectrum(s: &PodSpectrum) -> Result<Vec<f64>> {
    let first = s.sigma[0];
    if first == 0.0 {
        return Err(Error::DegenerateSpectrum(format!(
            "'{}' is identically zero",
            s.source_label
        )));
    }
    Ok(s.sigma.iter().map(|v| v / first).collect())
}

/// How many leading modes capture a given fraction of the squared singular values.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub threshold: f64,
    pub modes_needed: usize,
    pub cumulative: Vec<f64>,
}

pub fn modes_for_energy(s: &PodSpectrum, threshold: f64) -> Result<EnergyReport> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Argument(format!(
            "energy threshold must lie in (0, 1], got {threshold}"
        )));
    }
    let cumulative = s.cumulative_energy()?;
    let idx = cumulative
        .iter()
        .position(|&c| c >= threshold)
        .expect("final cumulative entry is 1");
    Ok(EnergyReport {
        threshold,
        modes_needed: idx + 1,
        cumulative,
    })
}

/// Keep the leading `r` modes. The spectrum is carried over whole so the
/// discarded tail energy stays available.
pub fn truncate(b: &PodBasis, r: usize) -> Result<PodBasis> {
    if r == 0 || r > b.rank() {
        return Err(Error::Argument(format!(
            "truncation rank must be in 1..={}, got {r}",
            b.rank()
        )));
    }
    Ok(PodBasis {
        modes: b.modes.columns(0, r).into_owned(),
        coeffs: b.coeffs.rows(0, r).into_owned(),
        spectrum: b.spectrum.clone(),
    })
}

/// One single-field snapshot matrix per layout segment, in layout order.
pub fn component_split(m: &SnapshotMatrix) -> Result<IndexMap<String, SnapshotMatrix>> {
    m.layout()
        .segments()
        .iter()
        .map(|seg| Ok((seg.name.clone(), m.field(&seg.name)?)))
        .collect()
}
