use crate::error::{Error, Result};

/// Square banded matrix with `kl` sub- and `ku` super-diagonals.
///
/// Row `i` stores columns `i - kl ..= i + ku` contiguously.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            data: vec![0.0; n * (kl + ku + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(
            j + self.kl >= i && j <= i + self.ku,
            "({i},{j}) outside band"
        );
        i * self.width() + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku {
            0.0
        } else {
            self.data[self.slot(i, j)]
        }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    /// Compressed copy holding only the nonzero entries.
    pub fn to_sparse(&self) -> SparseRows {
        let mut row_start = Vec::with_capacity(self.n + 1);
        let (mut cols, mut vals) = (Vec::new(), Vec::new());
        row_start.push(0);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            for j in lo..=hi {
                let v = self.data[self.slot(i, j)];
                if v != 0.0 {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_start.push(cols.len());
        }
        SparseRows {
            row_start,
            cols,
            vals,
        }
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        let w = self.width();
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let row = &self.data[i * w..(i + 1) * w];
            let mut acc = 0.0;
            for j in lo..=hi {
                acc += row[j + self.kl - i] * x[j];
            }
            y[i] = acc;
        }
    }

    /// LU factorization without pivoting. Intended for diagonally dominant
    /// or symmetric positive definite systems.
    pub fn factor(&self) -> Result<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let w = self.width();
        let mut a = self.data.clone();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..n {
            let pivot = a[k * w + kl];
            if !pivot.is_finite() || pivot.abs() <= f64::EPSILON * scale {
                return Err(Error::numerical(
                    format!("zero pivot in banded LU at row {k}"),
                    k,
                    pivot.abs(),
                ));
            }
            let last = (k + kl).min(n - 1);
            let right = (k + ku).min(n - 1);
            for i in k + 1..=last {
                let ik = i * w + (k + kl - i);
                let l = a[ik] / pivot;
                a[ik] = l;
                if l == 0.0 {
                    continue;
                }
                // row i -= l * row k over columns k+1..=right
                let len = right - k;
                let (head, tail) = a.split_at_mut(i * w);
                let rk = &head[k * w + kl + 1..][..len];
                let ri = &mut tail[k + kl + 1 - i..][..len];
                for (x, y) in ri.iter_mut().zip(rk) {
                    *x -= l * y;
                }
            }
        }
        Ok(BandLu { n, kl, ku, data: a })
    }
}

/// Row-compressed sparse matrix, used for cheap residuals.
#[derive(Debug, Clone)]
pub struct SparseRows {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseRows {
    pub fn with_capacity(rows: usize, nnz: usize) -> Self {
        let mut row_start = Vec::with_capacity(rows + 1);
        row_start.push(0);
        Self {
            row_start,
            cols: Vec::with_capacity(nnz),
            vals: Vec::with_capacity(nnz),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.row_start.len() - 1
    }

    /// Append an entry to the row under construction.
    pub fn push(&mut self, col: usize, val: f64) {
        self.cols.push(col);
        self.vals.push(val);
    }

    pub fn finish_row(&mut self) {
        self.row_start.push(self.cols.len());
    }

    /// Banded copy; every entry must lie within the band.
    pub fn to_band(&self, kl: usize, ku: usize) -> BandMatrix {
        let mut m = BandMatrix::zeros(self.n_rows(), kl, ku);
        for i in 0..self.n_rows() {
            for k in self.row_start[i]..self.row_start[i + 1] {
                m.add(i, self.cols[k], self.vals[k]);
            }
        }
        m
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let r = self.row_start[i]..self.row_start[i + 1];
            *yi = self.cols[r.clone()]
                .iter()
                .zip(&self.vals[r])
                .map(|(&j, v)| v * x[j])
                .sum();
        }
    }
}

/// Factors produced by [`BandMatrix::factor`].
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandLu {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let w = kl + ku + 1;
        let a = &self.data;
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let row = &a[i * w + kl - (i - lo)..i * w + kl];
            let dot: f64 = row.iter().zip(&b[lo..i]).map(|(l, x)| l * x).sum();
            b[i] -= dot;
        }
        for i in (0..n).rev() {
            let hi = (i + ku).min(n - 1);
            let row = &a[i * w + kl..=i * w + kl + (hi - i)];
            let dot: f64 = row[1..]
                .iter()
                .zip(&b[i + 1..=hi])
                .map(|(u, x)| u * x)
                .sum();
            b[i] = (b[i] - dot) / row[0];
        }
    }
}
