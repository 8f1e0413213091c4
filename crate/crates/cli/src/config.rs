//! JSON config files layered under command-line flags.

use std::path::{Path, PathBuf};

use airguard::Error;
use serde::de::DeserializeOwned;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        what: path.display().to_string(),
        reason: e.to_string(),
    })
}

/// A parsed `--config` file and the folder its relative paths resolve against.
pub struct Layer<T> {
    pub value: T,
    dir: PathBuf,
}

impl<T: DeserializeOwned + Default> Layer<T> {
    pub fn load(path: Option<&Path>) -> Result<Self, Error> {
        match path {
            Some(p) => Ok(Layer {
                value: read_json(p)?,
                dir: p.parent().map(Path::to_path_buf).unwrap_or_default(),
            }),
            None => Ok(Layer {
                value: T::default(),
                dir: PathBuf::new(),
            }),
        }
    }
}

impl<T> Layer<T> {
    /// Flag value if given, else the config value resolved against the
    /// config's folder.
    pub fn path(&self, flag: Option<PathBuf>, from_file: Option<&PathBuf>) -> Option<PathBuf> {
        flag.or_else(|| from_file.map(|p| if p.is_relative() { self.dir.join(p) } else { p.clone() }))
    }
}

/// Master seed: flag, then config, then `AIRGUARD_SEED`, then 0.
pub fn master_seed(flag: Option<u64>, from_file: Option<u64>) -> Result<u64, Error> {
    if let Some(s) = flag.or(from_file) {
        return Ok(s);
    }
    match std::env::var("AIRGUARD_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|e| Error::Config(format!("AIRGUARD_SEED={v:?} is not an unsigned integer: {e}"))),
        Err(_) => Ok(0),
    }
}

pub fn create_dir(path: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Clap value parser for enums that serialize as plain strings.
pub fn parse_word<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}
