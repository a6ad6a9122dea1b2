//! Run records and oracle sidecars written next to solver outputs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use setout_core::Claim;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub k: usize,
    pub z: usize,
    pub eps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimRecord {
    pub centers: f64,
    pub outliers: f64,
    pub cost: f64,
}

impl From<Claim> for ClaimRecord {
    fn from(c: Claim) -> Self {
        ClaimRecord { centers: c.centers, outliers: c.outliers, cost: c.cost }
    }
}

/// Metrics recomputed by the validators, never copied from the solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub centers: usize,
    pub outliers: usize,
    pub radius: f64,
    pub valid: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub algo: String,
    pub seed: u64,
    pub params: ParamsRecord,
    pub instance_digest: String,
    /// Elements (or join tuples) and outlier candidates of the input.
    pub size: usize,
    pub candidates: usize,
    pub metrics: Metrics,
    pub claim: ClaimRecord,
    pub opt: Option<f64>,
    pub ratio: Option<f64>,
    pub wall_ms: f64,
    pub threads: usize,
}

impl RunRecord {
    pub fn set_opt(&mut self, opt: f64) {
        self.opt = Some(opt);
        self.ratio = Some(ratio(self.metrics.radius, opt));
    }
}

/// Radius over optimum; 1 when both vanish.
pub fn ratio(radius: f64, opt: f64) -> f64 {
    if opt == 0.0 {
        if radius == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        radius / opt
    }
}

pub fn digest(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Exact optimum of one instance, stored beside it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub k: usize,
    pub z: usize,
    pub model: String,
    pub opt: f64,
    pub instance_digest: String,
}

pub fn sidecar_path(input: &Path) -> PathBuf {
    let mut s = input.as_os_str().to_owned();
    s.push(".oracle.json");
    PathBuf::from(s)
}

/// The sidecar optimum, if one matches this instance and budget.
pub fn read_sidecar(input: &Path, model: &str, k: usize, z: usize, digest: &str) -> Option<f64> {
    let text = std::fs::read_to_string(sidecar_path(input)).ok()?;
    let rec: OracleRecord = serde_json::from_str(&text).ok()?;
    (rec.model == model && rec.k == k && rec.z == z && rec.instance_digest == digest).then_some(rec.opt)
}
