//! `AGTR` trajectory dump: little-endian header `{"AGTR", version u16, N u32,
//! L u32}` followed by `N * L` triples `(r, theta, phi)` as f64, symbol-major.

use std::io::{BufWriter, Write};
use std::path::Path;

use crate::binio::{payload_len, read_file, ByteReader};
use crate::{Error, Result};

use super::{Spherical, TrajectorySnapshot};

pub const TRAJECTORY_MAGIC: &[u8; 4] = b"AGTR";
pub const TRAJECTORY_VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrajectoryHeader {
    pub version: u16,
    pub n_symbols: u32,
    pub n_points: u32,
}

/// Streams `snapshots` to `path`. The stream must hold exactly `n_symbols`
/// snapshots of `n_points` points each.
pub fn write_trajectory<I>(path: impl AsRef<Path>, n_symbols: usize, n_points: usize, snapshots: I) -> Result<()>
where
    I: IntoIterator<Item = Result<TrajectorySnapshot>>,
{
    let path = path.as_ref();
    let n = u32::try_from(n_symbols).map_err(|_| Error::config("too many symbols for AGTR"))?;
    let l = u32::try_from(n_points).map_err(|_| Error::config("too many points for AGTR"))?;
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);

    w.write_all(TRAJECTORY_MAGIC).map_err(io)?;
    w.write_all(&TRAJECTORY_VERSION.to_le_bytes()).map_err(io)?;
    w.write_all(&n.to_le_bytes()).map_err(io)?;
    w.write_all(&l.to_le_bytes()).map_err(io)?;
    let mut count = 0usize;
    for snap in snapshots {
        let snap = snap?;
        if snap.points.len() != n_points {
            return Err(Error::dimension(format!(
                "snapshot {} has {} points, header says {n_points}",
                snap.symbol_index,
                snap.points.len()
            )));
        }
        for p in &snap.points {
            for v in [p.r, p.theta, p.phi] {
                w.write_all(&v.to_le_bytes()).map_err(io)?;
            }
        }
        count += 1;
    }
    if count != n_symbols {
        return Err(Error::dimension(format!("wrote {count} snapshots, header says {n_symbols}")));
    }
    w.flush().map_err(io)
}

pub fn read_trajectory(path: impl AsRef<Path>) -> Result<(TrajectoryHeader, Vec<TrajectorySnapshot>)> {
    let bytes = read_file(path.as_ref())?;
    parse_trajectory(&bytes)
}

pub(crate) fn parse_trajectory(bytes: &[u8]) -> Result<(TrajectoryHeader, Vec<TrajectorySnapshot>)> {
    let mut r = ByteReader::new(bytes, "AGTR trajectory");
    r.expect_magic(TRAJECTORY_MAGIC)?;
    let version = r.u16()?;
    if version != TRAJECTORY_VERSION {
        return Err(r.error(format!("unsupported version {version}")));
    }
    let header = TrajectoryHeader {
        version,
        n_symbols: r.u32()?,
        n_points: r.u32()?,
    };
    payload_len(&r, header.n_symbols as u64 * header.n_points as u64, 24)?;
    let mut snaps = Vec::with_capacity(header.n_symbols as usize);
    for n in 0..header.n_symbols as usize {
        let mut points = Vec::with_capacity(header.n_points as usize);
        for _ in 0..header.n_points {
            points.push(Spherical::new(r.f64()?, r.f64()?, r.f64()?));
        }
        snaps.push(TrajectorySnapshot { symbol_index: n, points });
    }
    r.finish()?;
    Ok((header, snaps))
}
