//! `AGEC` echo files: little-endian header `{"AGEC", version u16, N u32, M u32,
//! dtype u8, snr_mdB i32}` followed by the row-major matrix as interleaved
//! re/im pairs. `snr_mdB` is the SNR in millidecibels, or `i32::MIN` for a
//! noiseless echo.

use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use crate::binio::{payload_len, read_file, write_file, ByteReader};
use crate::{Error, Result};

use super::{EchoMatrix, Snr};

pub const ECHO_MAGIC: &[u8; 4] = b"AGEC";
pub const ECHO_VERSION: u16 = 1;
const NOISELESS_SENTINEL: i32 = i32::MIN;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EchoDtype {
    /// Two f32 per entry.
    C64,
    /// Two f64 per entry.
    C128,
}

impl EchoDtype {
    fn code(self) -> u8 {
        match self {
            EchoDtype::C64 => 0,
            EchoDtype::C128 => 1,
        }
    }

    fn entry_bytes(self) -> u64 {
        match self {
            EchoDtype::C64 => 8,
            EchoDtype::C128 => 16,
        }
    }
}

impl std::str::FromStr for EchoDtype {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "c64" => Ok(EchoDtype::C64),
            "c128" => Ok(EchoDtype::C128),
            _ => Err(format!("unknown echo dtype {s:?} (expected c64 or c128)")),
        }
    }
}

impl std::fmt::Display for EchoDtype {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EchoDtype::C64 => "c64",
            EchoDtype::C128 => "c128",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoHeader {
    pub version: u16,
    pub n: u32,
    pub m: u32,
    pub dtype: EchoDtype,
    pub snr: Snr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EchoFile {
    pub header: EchoHeader,
    pub data: Array2<Complex64>,
}

fn snr_to_mdb(snr: Snr) -> Result<i32> {
    match snr {
        Snr::Noiseless => Ok(NOISELESS_SENTINEL),
        Snr::Db(v) => {
            let mdb = (v * 1000.0).round();
            if mdb > i32::MIN as f64 && mdb <= i32::MAX as f64 {
                Ok(mdb as i32)
            } else {
                Err(Error::config(format!("SNR {v} dB does not fit the file header")))
            }
        }
    }
}

pub(crate) fn encode_echo(echo: &EchoMatrix, dtype: EchoDtype) -> Result<Vec<u8>> {
    let (n, m) = echo.data.dim();
    let n32 = u32::try_from(n).map_err(|_| Error::dimension("too many symbols for AGEC"))?;
    let m32 = u32::try_from(m).map_err(|_| Error::dimension("too many subcarriers for AGEC"))?;
    let mut out = Vec::with_capacity(19 + n * m * dtype.entry_bytes() as usize);
    out.extend_from_slice(ECHO_MAGIC);
    out.extend_from_slice(&ECHO_VERSION.to_le_bytes());
    out.extend_from_slice(&n32.to_le_bytes());
    out.extend_from_slice(&m32.to_le_bytes());
    out.push(dtype.code());
    out.extend_from_slice(&snr_to_mdb(echo.meta.snr)?.to_le_bytes());
    for z in echo.data.iter() {
        match dtype {
            EchoDtype::C64 => {
                out.extend_from_slice(&(z.re as f32).to_le_bytes());
                out.extend_from_slice(&(z.im as f32).to_le_bytes());
            }
            EchoDtype::C128 => {
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
    }
    Ok(out)
}

pub(crate) fn parse_echo_header(r: &mut ByteReader<'_>) -> Result<EchoHeader> {
    r.expect_magic(ECHO_MAGIC)?;
    let version = r.u16()?;
    if version != ECHO_VERSION {
        return Err(r.error(format!("unsupported version {version}")));
    }
    let n = r.u32()?;
    let m = r.u32()?;
    let dtype = match r.u8()? {
        0 => EchoDtype::C64,
        1 => EchoDtype::C128,
        other => return Err(r.error(format!("unknown dtype code {other}"))),
    };
    let snr = match r.i32()? {
        NOISELESS_SENTINEL => Snr::Noiseless,
        mdb => Snr::Db(mdb as f64 / 1000.0),
    };
    Ok(EchoHeader { version, n, m, dtype, snr })
}

pub(crate) fn decode_echo(bytes: &[u8]) -> Result<EchoFile> {
    let mut r = ByteReader::new(bytes, "AGEC echo");
    let header = parse_echo_header(&mut r)?;
    let (n, m) = (header.n as usize, header.m as usize);
    payload_len(&r, header.n as u64 * header.m as u64, header.dtype.entry_bytes())?;
    let mut values = Vec::with_capacity(n * m);
    for _ in 0..n * m {
        let z = match header.dtype {
            EchoDtype::C64 => Complex64::new(r.f32()? as f64, r.f32()? as f64),
            EchoDtype::C128 => Complex64::new(r.f64()?, r.f64()?),
        };
        values.push(z);
    }
    r.finish()?;
    let data = Array2::from_shape_vec((n, m), values).map_err(|e| r.error(e.to_string()))?;
    Ok(EchoFile { header, data })
}

pub fn write_echo(path: impl AsRef<Path>, echo: &EchoMatrix, dtype: EchoDtype) -> Result<()> {
    write_file(path.as_ref(), &encode_echo(echo, dtype)?)
}

pub fn read_echo(path: impl AsRef<Path>) -> Result<EchoFile> {
    decode_echo(&read_file(path.as_ref())?)
}

/// Reads only the header.
pub fn read_echo_header(path: impl AsRef<Path>) -> Result<EchoHeader> {
    use std::io::Read;
    let path = path.as_ref();
    let mut buf = [0u8; 19];
    std::fs::File::open(path)
        .and_then(|mut f| f.read_exact(&mut buf))
        .map_err(|e| Error::io(path, e))?;
    parse_echo_header(&mut ByteReader::new(&buf, "AGEC echo"))
}
