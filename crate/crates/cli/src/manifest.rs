//! Run manifests and the artifact envelope.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    /// SHA-256 of the config file, when one was given.
    pub config_digest: Option<String>,
    pub seeds: Vec<u64>,
    pub tool_version: String,
    pub solver_identity: Option<String>,
    /// Seconds since the Unix epoch.
    pub started_at: u64,
    pub finished_at: u64,
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl RunManifest {
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("manifest serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// JSON artifact: the manifest, its digest and the result.
pub fn envelope(manifest: &RunManifest, result: &Value) -> Value {
    json!({
        "manifest_digest": manifest.digest(),
        "manifest": manifest,
        "result": result,
    })
}

/// Text artifact with the digest on a leading comment line.
pub fn annotate(comment: &str, digest: &str, body: &str) -> String {
    format!("{comment} manifest_digest={digest}\n{body}")
}

/// Contents of an input document, unwrapping an artifact envelope.
pub fn read_document(path: &Path) -> std::io::Result<String> {
    let text = std::fs::read_to_string(path)?;
    if let Ok(Value::Object(map)) = serde_json::from_str::<Value>(&text) {
        if map.contains_key("manifest_digest") {
            if let Some(inner) = map.get("result") {
                return Ok(serde_json::to_string(inner).expect("value serializes"));
            }
        }
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest() -> RunManifest {
        RunManifest {
            command_line: vec!["hitset".into(), "params".into()],
            config_digest: None,
            seeds: vec![7],
            tool_version: "0.1.0".into(),
            solver_identity: None,
            started_at: 1,
            finished_at: 2,
        }
    }

    #[test]
    fn digest_tracks_content() {
        let a = manifest();
        let mut b = manifest();
        assert_eq!(a.digest(), b.digest());
        b.seeds = vec![8];
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn envelope_round_trips_through_reader() {
        let dir = std::env::temp_dir().join(format!("hitset-manifest-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let file = dir.join("a.json");
        let result = json!({"n": 1, "terms": []});
        std::fs::write(&file, envelope(&manifest(), &result).to_string()).unwrap();
        let inner: Value = serde_json::from_str(&read_document(&file).unwrap()).unwrap();
        assert_eq!(inner, result);
        std::fs::write(&file, "{\"plain\": true}").unwrap();
        assert_eq!(read_document(&file).unwrap(), "{\"plain\": true}");
    }
}
