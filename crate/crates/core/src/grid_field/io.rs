//! `PODSNAP1` binary snapshot files.
//!
//! Layout (little-endian, no padding):
//!
//! ```text
//! [0..8)   magic "PODSNAP1"
//! u32      n_dof
//! u32      n_snaps
//! u32      n_segments
//! per segment: u16 name_len, name (UTF-8), u32 row_offset, u32 row_count
//! n_snaps  x f64 labels
//! n_dof*n_snaps x f64 values, column-major
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;

use super::{FieldLayout, SnapshotMatrix};
use crate::error::{Error, Result};

pub const SNAP_MAGIC: &[u8; 8] = b"PODSNAP1";

/// Serialize to the in-memory byte representation.
pub fn encode(m: &SnapshotMatrix) -> Result<Vec<u8>> {
    let to_u32 = |v: usize, what: &str| {
        u32::try_from(v).map_err(|_| Error::Argument(format!("{what} {v} does not fit in u32")))
    };
    let segs = m.layout().segments();
    let mut out = Vec::with_capacity(20 + 8 * (m.n_snaps() * (m.n_dof() + 1)));
    out.extend_from_slice(SNAP_MAGIC);
    out.extend_from_slice(&to_u32(m.n_dof(), "n_dof")?.to_le_bytes());
    out.extend_from_slice(&to_u32(m.n_snaps(), "n_snaps")?.to_le_bytes());
    out.extend_from_slice(&to_u32(segs.len(), "segment count")?.to_le_bytes());
    for s in segs {
        let name = s.name.as_bytes();
        let len = u16::try_from(name.len())
            .map_err(|_| Error::Argument(format!("segment name '{}' too long", s.name)))?;
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(name);
        out.extend_from_slice(&to_u32(s.offset, "row offset")?.to_le_bytes());
        out.extend_from_slice(&to_u32(s.count, "row count")?.to_le_bytes());
    }
    for l in m.labels() {
        out.extend_from_slice(&l.to_le_bytes());
    }
    for v in m.data().as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Format {
                offset: self.pos as u64,
                reason: format!(
                    "truncated while reading {what}: need {n} bytes, {} left",
                    self.buf.len() - self.pos
                ),
            });
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()) as usize)
    }

    fn f64s(&mut self, n: usize, what: &str) -> Result<Vec<f64>> {
        let bytes = n
            .checked_mul(8)
            .ok_or_else(|| self.error(format!("{what} count {n} overflows")))?;
        Ok(self
            .take(bytes, what)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn error(&self, reason: String) -> Error {
        Error::Format {
            offset: self.pos as u64,
            reason,
        }
    }
}

/// Parse the byte representation produced by [`encode`].
pub fn decode(buf: &[u8]) -> Result<SnapshotMatrix> {
    let mut c = Cursor { buf, pos: 0 };
    let magic = c.take(8, "magic")?;
    if magic != SNAP_MAGIC {
        return Err(Error::Format {
            offset: 0,
            reason: format!("bad magic {:?}", String::from_utf8_lossy(magic)),
        });
    }
    let n_dof = c.u32("n_dof")?;
    let n_snaps = c.u32("n_snaps")?;
    let n_segments = c.u32("n_segments")?;
    if n_dof == 0 || n_snaps == 0 || n_segments == 0 {
        return Err(Error::Format {
            offset: 8,
            reason: format!(
                "empty header: n_dof={n_dof} n_snaps={n_snaps} n_segments={n_segments}"
            ),
        });
    }
    let seg_start = c.pos;
    let mut segments = Vec::with_capacity(n_segments.min(1024));
    for _ in 0..n_segments {
        let len = c.u16("segment name length")? as usize;
        let at = c.pos;
        let name =
            std::str::from_utf8(c.take(len, "segment name")?).map_err(|e| Error::Format {
                offset: at as u64,
                reason: format!("segment name is not UTF-8: {e}"),
            })?;
        let offset = c.u32("segment row offset")?;
        let count = c.u32("segment row count")?;
        segments.push((name.to_string(), offset, count));
    }
    let layout = FieldLayout::new(segments).map_err(|e| Error::Format {
        offset: seg_start as u64,
        reason: e.to_string(),
    })?;
    if layout.total_rows() != n_dof {
        return Err(Error::Format {
            offset: seg_start as u64,
            reason: format!(
                "layout covers {} rows but header declares n_dof = {n_dof}",
                layout.total_rows()
            ),
        });
    }
    let labels = c.f64s(n_snaps, "labels")?;
    let values_at = c.pos;
    let total = n_dof
        .checked_mul(n_snaps)
        .ok_or_else(|| c.error("matrix size overflows".into()))?;
    let values = c.f64s(total, "values")?;
    if c.pos != buf.len() {
        return Err(c.error(format!("{} trailing bytes", buf.len() - c.pos)));
    }
    SnapshotMatrix::new(DMatrix::from_vec(n_dof, n_snaps, values), layout, labels).map_err(|e| {
        Error::Format {
            offset: values_at as u64,
            reason: e.to_string(),
        }
    })
}

pub fn write_snap(m: &SnapshotMatrix, path: impl AsRef<Path>) -> Result<()> {
    let bytes = encode(m)?;
    let mut f = fs::File::create(path)?;
    f.write_all(&bytes)?;
    f.flush()?;
    Ok(())
}

pub fn read_snap(path: impl AsRef<Path>) -> Result<SnapshotMatrix> {
    decode(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_field::assemble;
    use proptest::prelude::*;

    fn sample() -> SnapshotMatrix {
        let layout = FieldLayout::from_sizes([("u", 1), ("p", 1)]).unwrap();
        assemble(&[vec![1.0, -2.5], vec![3.25, 4.0]], layout, &[0.0, 0.125]).unwrap()
    }

    #[test]
    fn round_trip_2x2() {
        let m = sample();
        assert_eq!(decode(&encode(&m).unwrap()).unwrap(), m);
    }

    #[test]
    fn bad_magic() {
        let mut bytes = encode(&sample()).unwrap();
        bytes[0] = b'X';
        match decode(&bytes).unwrap_err() {
            Error::Format { offset, .. } => assert_eq!(offset, 0),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn truncated_payload_reports_offset() {
        let bytes = encode(&sample()).unwrap();
        let cut = &bytes[..bytes.len() - 3];
        match decode(cut).unwrap_err() {
            Error::Format { offset, reason } => {
                assert_eq!(offset as usize, bytes.len() - 32);
                assert!(reason.contains("values"), "{reason}");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn layout_row_mismatch() {
        let mut bytes = encode(&sample()).unwrap();
        // n_dof field: claim 3 rows while segments cover 2
        bytes[8..12].copy_from_slice(&3u32.to_le_bytes());
        assert!(matches!(decode(&bytes).unwrap_err(), Error::Format { .. }));
    }

    #[test]
    fn trailing_bytes_rejected() {
        let mut bytes = encode(&sample()).unwrap();
        bytes.push(0);
        assert!(matches!(decode(&bytes).unwrap_err(), Error::Format { .. }));
    }

    fn matrix_strategy() -> impl Strategy<Value = SnapshotMatrix> {
        (1usize..6, 1usize..6, 1usize..4).prop_flat_map(|(per_seg, n_snaps, n_segs)| {
            let n_dof = per_seg * n_segs;
            prop::collection::vec(-1e300f64..1e300, n_dof * n_snaps).prop_map(move |vals| {
                let layout =
                    FieldLayout::from_sizes((0..n_segs).map(|k| (format!("f{k}"), per_seg)))
                        .unwrap();
                let labels: Vec<f64> = (0..n_snaps).map(|j| j as f64 * 0.1).collect();
                SnapshotMatrix::new(DMatrix::from_vec(n_dof, n_snaps, vals), layout, labels)
                    .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(m in matrix_strategy()) {
            let back = decode(&encode(&m).unwrap()).unwrap();
            prop_assert_eq!(back.layout(), m.layout());
            for (a, b) in back.data().iter().zip(m.data().iter()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
            for (a, b) in back.labels().iter().zip(m.labels()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }

        #[test]
        fn column_reassembly_is_exact(m in matrix_strategy()) {
            let cols: Vec<Vec<f64>> = m.columns().map(|c| c.to_vec()).collect();
            let again = assemble(&cols, m.layout().clone(), m.labels()).unwrap();
            prop_assert_eq!(again, m);
        }
    }
}
