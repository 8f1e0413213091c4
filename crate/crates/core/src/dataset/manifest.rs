use std::collections::BTreeMap;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::channel::Snr;
use crate::rng::{derive_seed, rng_from_seed, Stream};
use crate::targets::TargetClass;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

/// One line of the JSONL manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub sample_id: String,
    pub target_name: String,
    pub class_label: TargetClass,
    pub motion_seed: u64,
    pub noise_seed: u64,
    pub snr_db: Snr,
    pub repeat_index: usize,
    /// Relative to the dataset root, `/`-separated.
    pub image_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
}

/// Train/val/test fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct SplitFractions {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        SplitFractions {
            train: 0.8,
            val: 0.1,
            test: 0.1,
        }
    }
}

impl SplitFractions {
    pub fn new(train: f64, val: f64, test: f64) -> Result<Self> {
        let f = [train, val, test];
        if f.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || (f.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!("split fractions {f:?} must be >= 0 and sum to 1")));
        }
        Ok(SplitFractions { train, val, test })
    }

    /// Largest-remainder apportionment of `n` items; ties go to the earlier split.
    pub fn counts(&self, n: usize) -> [usize; 3] {
        let quotas = [self.train, self.val, self.test].map(|f| f * n as f64);
        let mut counts = quotas.map(|q| q.floor() as usize);
        let assigned: usize = counts.iter().sum();
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| {
            let ra = quotas[a] - counts[a] as f64;
            let rb = quotas[b] - counts[b] as f64;
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &k in order.iter().take(n.saturating_sub(assigned)) {
            counts[k] += 1;
        }
        counts
    }
}

impl TryFrom<[f64; 3]> for SplitFractions {
    type Error = String;

    fn try_from([a, b, c]: [f64; 3]) -> std::result::Result<Self, String> {
        SplitFractions::new(a, b, c).map_err(|e| e.to_string())
    }
}

impl From<SplitFractions> for [f64; 3] {
    fn from(f: SplitFractions) -> Self {
        [f.train, f.val, f.test]
    }
}

/// Assigns splits within each `(target_name, snr)` stratum. Members of a
/// stratum are ordered by sample id, shuffled with a seed derived from
/// `seed` and the stratum's rank, then cut train, val, test.
pub fn split_dataset(records: &mut [ManifestRecord], fractions: SplitFractions, seed: u64) {
    let mut strata: BTreeMap<(String, String), Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        strata.entry((r.target_name.clone(), r.snr_db.to_string())).or_default().push(i);
    }
    for (rank, members) in strata.values_mut().enumerate() {
        members.sort_by(|&a, &b| records[a].sample_id.cmp(&records[b].sample_id));
        members.shuffle(&mut rng_from_seed(derive_seed(seed, Stream::Split, &[rank as u64])));
        let [train, val, _] = fractions.counts(members.len());
        for (pos, &i) in members.iter().enumerate() {
            records[i].split = Some(if pos < train {
                Split::Train
            } else if pos < train + val {
                Split::Val
            } else {
                Split::Test
            });
        }
    }
}

pub fn write_manifest(path: impl AsRef<Path>, records: &[ManifestRecord]) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(|e| Error::io(path, e.into()))?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (no, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            what: format!("{}:{}", path.display(), no + 1),
            reason: e.to_string(),
        })?);
    }
    Ok(records)
}
