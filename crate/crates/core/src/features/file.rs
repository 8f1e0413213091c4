//! `AGFT` feature files: little-endian header `{"AGFT", rows u32, cols u32,
//! kind u8}` followed by the row-major matrix as f32.

use std::path::Path;

use ndarray::Array2;

use crate::binio::{payload_len, read_file, write_file, ByteReader};
use crate::{Error, Result};

pub const FEATURE_MAGIC: &[u8; 4] = b"AGFT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Cmd,
    Hrrp,
}

impl std::fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FeatureKind::Cmd => "cmD",
            FeatureKind::Hrrp => "HRRP",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureHeader {
    pub rows: u32,
    pub cols: u32,
    pub kind: FeatureKind,
}

pub(crate) fn encode_feature(matrix: &Array2<f64>, kind: FeatureKind) -> Result<Vec<u8>> {
    let (rows, cols) = matrix.dim();
    let rows = u32::try_from(rows).map_err(|_| Error::dimension("feature matrix too tall"))?;
    let cols = u32::try_from(cols).map_err(|_| Error::dimension("feature matrix too wide"))?;
    let mut out = Vec::with_capacity(13 + 4 * matrix.len());
    out.extend_from_slice(FEATURE_MAGIC);
    out.extend_from_slice(&rows.to_le_bytes());
    out.extend_from_slice(&cols.to_le_bytes());
    out.push(match kind {
        FeatureKind::Cmd => 0,
        FeatureKind::Hrrp => 1,
    });
    for v in matrix.iter() {
        out.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    Ok(out)
}

fn parse_header(r: &mut ByteReader<'_>) -> Result<FeatureHeader> {
    r.expect_magic(FEATURE_MAGIC)?;
    let rows = r.u32()?;
    let cols = r.u32()?;
    let kind = match r.u8()? {
        0 => FeatureKind::Cmd,
        1 => FeatureKind::Hrrp,
        other => return Err(r.error(format!("unknown feature kind {other}"))),
    };
    Ok(FeatureHeader { rows, cols, kind })
}

pub(crate) fn decode_feature(bytes: &[u8]) -> Result<(FeatureHeader, Array2<f64>)> {
    let mut r = ByteReader::new(bytes, "AGFT feature");
    let header = parse_header(&mut r)?;
    payload_len(&r, header.rows as u64 * header.cols as u64, 4)?;
    let mut values = Vec::with_capacity(header.rows as usize * header.cols as usize);
    for _ in 0..header.rows as usize * header.cols as usize {
        values.push(r.f32()? as f64);
    }
    r.finish()?;
    let m = Array2::from_shape_vec((header.rows as usize, header.cols as usize), values).map_err(|e| r.error(e.to_string()))?;
    Ok((header, m))
}

pub fn write_feature(path: impl AsRef<Path>, matrix: &Array2<f64>, kind: FeatureKind) -> Result<()> {
    write_file(path.as_ref(), &encode_feature(matrix, kind)?)
}

pub fn read_feature(path: impl AsRef<Path>) -> Result<(FeatureHeader, Array2<f64>)> {
    decode_feature(&read_file(path.as_ref())?)
}

pub fn read_feature_header(path: impl AsRef<Path>) -> Result<FeatureHeader> {
    use std::io::Read;
    let path = path.as_ref();
    let mut buf = [0u8; 13];
    std::fs::File::open(path)
        .and_then(|mut f| f.read_exact(&mut buf))
        .map_err(|e| Error::io(path, e))?;
    parse_header(&mut ByteReader::new(&buf, "AGFT feature"))
}
