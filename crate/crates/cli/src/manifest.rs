use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{RunError, ScenarioConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// NaN is written as null
    #[serde(deserialize_with = "nullable_f64")]
    pub value: f64,
    /// "<=" or ">="
    pub relation: String,
    pub threshold: f64,
    pub pass: bool,
}

fn nullable_f64<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

impl CheckResult {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: "<=".into(),
            threshold,
            pass: value <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: ">=".into(),
            threshold,
            pass: value >= threshold,
        }
    }

    pub fn describe(&self) -> String {
        let verdict = if self.pass { "ok" } else { "FAILED" };
        format!(
            "{verdict}: {} = {:e} (required {} {:e})",
            self.name, self.value, self.relation, self.threshold
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactEntry {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub platform: String,
    pub scenario: String,
    pub config: serde_json::Value,
    pub config_sha256: String,
    pub status: String,
    pub checks: Vec<CheckResult>,
    pub summary: serde_json::Value,
    pub artifacts: Vec<ArtifactEntry>,
    /// sha256 over the sorted (file, sha256) list
    pub artifact_digest: String,
    /// wall-clock; excluded from every digest
    pub timings_ms: BTreeMap<String, f64>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Digest entries for every regular file in `dir` except the manifest.
pub fn digest_directory(dir: &Path) -> Result<Vec<ArtifactEntry>, RunError> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| RunError::io(dir, e))? {
        let entry = entry.map_err(|e| RunError::io(dir, e))?;
        let path = entry.path();
        let name = entry.file_name().to_string_lossy().into_owned();
        if !path.is_file() || name == "manifest.json" {
            continue;
        }
        let bytes = std::fs::read(&path).map_err(|e| RunError::io(&path, e))?;
        out.push(ArtifactEntry {
            file: name,
            bytes: bytes.len() as u64,
            sha256: sha256_hex(&bytes),
        });
    }
    out.sort_by(|a, b| a.file.cmp(&b.file));
    Ok(out)
}

pub fn combined_digest(entries: &[ArtifactEntry]) -> String {
    let mut h = Sha256::new();
    for e in entries {
        h.update(e.file.as_bytes());
        h.update(b"  ");
        h.update(e.sha256.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

impl RunManifest {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn build(
        cfg: &ScenarioConfig,
        text: &str,
        dir: &Path,
        status: &str,
        checks: Vec<CheckResult>,
        summary: serde_json::Value,
        scenario_ms: f64,
        start: Instant,
    ) -> Result<Self, RunError> {
        let artifacts = digest_directory(dir)?;
        let artifact_digest = combined_digest(&artifacts);
        let config = serde_json::to_value(cfg).map_err(|e| RunError::io(dir, e))?;
        let mut timings_ms = BTreeMap::new();
        timings_ms.insert("scenario".to_string(), scenario_ms);
        timings_ms.insert("total".to_string(), start.elapsed().as_secs_f64() * 1e3);
        Ok(Self {
            tool: format!("fracwave {}", env!("CARGO_PKG_VERSION")),
            platform: format!("{}-{}", std::env::consts::OS, std::env::consts::ARCH),
            scenario: cfg.kind_name().to_string(),
            config,
            config_sha256: sha256_hex(text.as_bytes()),
            status: status.to_string(),
            checks,
            summary,
            artifacts,
            artifact_digest,
            timings_ms,
        })
    }

    pub fn write(&self, dir: &Path) -> Result<(), RunError> {
        let path = dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(self).map_err(|e| RunError::io(&path, e))?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| RunError::io(&path, e))
    }

    pub fn read(dir: &Path) -> Result<Self, RunError> {
        let path = dir.join("manifest.json");
        let text = std::fs::read_to_string(&path).map_err(|e| RunError::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| RunError::io(&path, e))
    }

    /// The manifest with wall-clock timings dropped; equal across repeated
    /// runs of the same config.
    pub fn without_timings(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("manifest serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timings_ms");
        }
        v
    }
}
