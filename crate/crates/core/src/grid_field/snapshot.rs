use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// One named block of rows in a snapshot matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub name: String,
    pub offset: usize,
    pub count: usize,
}

impl Segment {
    pub fn rows(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.count
    }
}

/// Partition of the row range `[0, n_dof)` into named, contiguous fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldLayout {
    segments: Vec<Segment>,
}

impl FieldLayout {
    /// Build a layout from `(name, offset, count)` triples. Segments must be
    /// listed in row order, abut each other and start at row 0.
    pub fn new<S: Into<String>>(
        segments: impl IntoIterator<Item = (S, usize, usize)>,
    ) -> Result<Self> {
        let segments: Vec<Segment> = segments
            .into_iter()
            .map(|(name, offset, count)| Segment {
                name: name.into(),
                offset,
                count,
            })
            .collect();
        if segments.is_empty() {
            return Err(Error::Dimension("layout needs at least one segment".into()));
        }
        let mut next = 0usize;
        for (k, seg) in segments.iter().enumerate() {
            if seg.name.is_empty() {
                return Err(Error::Dimension(format!("segment {k} has an empty name")));
            }
            if seg.count == 0 {
                return Err(Error::Dimension(format!("segment '{}' is empty", seg.name)));
            }
            if seg.offset != next {
                return Err(Error::Dimension(format!(
                    "segment '{}' starts at row {} but the previous segment ends at {next}",
                    seg.name, seg.offset
                )));
            }
            if segments[..k].iter().any(|s| s.name == seg.name) {
                return Err(Error::Dimension(format!(
                    "duplicate segment name '{}'",
                    seg.name
                )));
            }
            next = seg.offset + seg.count;
        }
        Ok(Self { segments })
    }

    /// Layout with consecutive segments of the given sizes.
    pub fn from_sizes<S: Into<String>>(
        fields: impl IntoIterator<Item = (S, usize)>,
    ) -> Result<Self> {
        let mut offset = 0;
        let triples: Vec<(String, usize, usize)> = fields
            .into_iter()
            .map(|(name, count)| {
                let t = (name.into(), offset, count);
                offset += count;
                t
            })
            .collect();
        Self::new(triples)
    }

    pub fn single(name: &str, n_dof: usize) -> Result<Self> {
        Self::new([(name, 0, n_dof)])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, name: &str) -> Option<&Segment> {
        self.segments.iter().find(|s| s.name == name)
    }

    pub fn total_rows(&self) -> usize {
        self.segments.last().map_or(0, |s| s.offset + s.count)
    }
}

/// The snapshot matrix: one column per time instant, one row per degree of
/// freedom. Stored column-major so each snapshot is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix {
    data: DMatrix<f64>,
    layout: FieldLayout,
    labels: Vec<f64>,
}

impl SnapshotMatrix {
    pub fn new(data: DMatrix<f64>, layout: FieldLayout, labels: Vec<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::Dimension(format!(
                "snapshot matrix must be non-empty, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if layout.total_rows() != data.nrows() {
            return Err(Error::Dimension(format!(
                "layout covers {} rows but the matrix has {}",
                layout.total_rows(),
                data.nrows()
            )));
        }
        if labels.len() != data.ncols() {
            return Err(Error::Dimension(format!(
                "{} labels for {} columns",
                labels.len(),
                data.ncols()
            )));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite entry at row {}, column {}",
                k % data.nrows(),
                k / data.nrows()
            )));
        }
        check_labels(&labels)?;
        Ok(Self {
            data,
            layout,
            labels,
        })
    }

    pub fn n_dof(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_snaps(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<f64> {
        self.data
    }

    pub fn layout(&self) -> &FieldLayout {
        &self.layout
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn column(&self, j: usize) -> &[f64] {
        let n = self.n_dof();
        &self.data.as_slice()[j * n..(j + 1) * n]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.data.as_slice().chunks_exact(self.n_dof())
    }

    /// Rows belonging to one field, as a standalone single-segment matrix.
    pub fn field(&self, name: &str) -> Result<SnapshotMatrix> {
        let seg = self
            .layout
            .segment(name)
            .ok_or_else(|| Error::Argument(format!("no field named '{name}'")))?;
        let block = self.data.rows(seg.offset, seg.count).into_owned();
        SnapshotMatrix::new(
            block,
            FieldLayout::single(name, seg.count)?,
            self.labels.clone(),
        )
    }

    /// Stack matrices vertically; labels must agree exactly and the segment
    /// lists are concatenated.
    pub fn vstack(parts: &[SnapshotMatrix]) -> Result<SnapshotMatrix> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Argument("nothing to stack".into()))?;
        let n_snaps = first.n_snaps();
        let mut fields = Vec::new();
        for p in parts {
            if p.labels != first.labels {
                return Err(Error::Dimension(
                    "stacked matrices have different labels".into(),
                ));
            }
            fields.extend(p.layout.segments.iter().map(|s| (s.name.clone(), s.count)));
        }
        let layout = FieldLayout::from_sizes(fields)?;
        let mut data = DMatrix::zeros(layout.total_rows(), n_snaps);
        let mut row = 0;
        for p in parts {
            data.rows_mut(row, p.n_dof()).copy_from(&p.data);
            row += p.n_dof();
        }
        SnapshotMatrix::new(data, layout, first.labels.clone())
    }
}

fn check_labels(labels: &[f64]) -> Result<()> {
    if let Some(k) = labels.iter().position(|l| !l.is_finite()) {
        return Err(Error::Data(format!("label {k} is not finite")));
    }
    if let Some(k) = labels.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::Data(format!(
            "labels must be strictly increasing (labels[{}] = {} >= labels[{}] = {})",
            k,
            labels[k],
            k + 1,
            labels[k + 1]
        )));
    }
    Ok(())
}

/// Collect flat field vectors into a snapshot matrix, one column each.
pub fn assemble<C: AsRef<[f64]>>(
    columns: &[C],
    layout: FieldLayout,
    labels: &[f64],
) -> Result<SnapshotMatrix> {
    let n_dof = layout.total_rows();
    if columns.is_empty() {
        return Err(Error::Dimension("no columns to assemble".into()));
    }
    if let Some((j, c)) = columns
        .iter()
        .enumerate()
        .find(|(_, c)| c.as_ref().len() != n_dof)
    {
        return Err(Error::Dimension(format!(
            "column {j} has length {} but the layout covers {n_dof} rows",
            c.as_ref().len()
        )));
    }
    let mut flat = Vec::with_capacity(n_dof * columns.len());
    for c in columns {
        flat.extend_from_slice(c.as_ref());
    }
    let data = DMatrix::from_vec(n_dof, columns.len(), flat);
    SnapshotMatrix::new(data, layout, labels.to_vec())
}
