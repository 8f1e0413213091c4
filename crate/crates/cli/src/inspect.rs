use std::io::Read;
use std::path::{Path, PathBuf};

use airguard::channel::{read_echo_header, ECHO_MAGIC};
use airguard::features::{read_feature_header, FEATURE_MAGIC};
use airguard::kinematics::{read_trajectory, TRAJECTORY_MAGIC};
use airguard::Error;
use clap::Args;
use serde_json::{json, Value};

use crate::{emit, CliResult};

#[derive(Debug, Args)]
pub struct InspectArgs {
    /// Echo (AGEC), feature (AGFT) or trajectory (AGTR) files.
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

fn magic(path: &Path) -> Result<[u8; 4], Error> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut buf = [0u8; 4];
    std::fs::File::open(path).map_err(io)?.read_exact(&mut buf).map_err(io)?;
    Ok(buf)
}

fn describe(path: &Path) -> Result<(Value, String), Error> {
    let m = magic(path)?;
    if &m == ECHO_MAGIC {
        let h = read_echo_header(path)?;
        Ok((
            json!({"file": path, "format": "AGEC", "version": h.version, "n": h.n, "m": h.m, "dtype": h.dtype.to_string(), "snr_db": h.snr}),
            format!("{}: echo v{}, {} x {} {}, SNR {}", path.display(), h.version, h.n, h.m, h.dtype, h.snr),
        ))
    } else if &m == FEATURE_MAGIC {
        let h = read_feature_header(path)?;
        Ok((
            json!({"file": path, "format": "AGFT", "kind": h.kind.to_string(), "rows": h.rows, "cols": h.cols}),
            format!("{}: {} features, {} x {}", path.display(), h.kind, h.rows, h.cols),
        ))
    } else if &m == TRAJECTORY_MAGIC {
        let (h, _) = read_trajectory(path)?;
        Ok((
            json!({"file": path, "format": "AGTR", "version": h.version, "n_symbols": h.n_symbols, "n_points": h.n_points}),
            format!("{}: trajectory v{}, {} symbols x {} points", path.display(), h.version, h.n_symbols, h.n_points),
        ))
    } else {
        Err(Error::Parse {
            what: path.display().to_string(),
            reason: format!("unknown magic {m:?}"),
        })
    }
}

pub fn run(args: InspectArgs, json: bool) -> CliResult<()> {
    for path in &args.files {
        let (value, text) = describe(path)?;
        emit(json, &value, &text);
    }
    Ok(())
}
