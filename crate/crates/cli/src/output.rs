//! Run manifests and artifact writing.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// Directory for artifacts written without an explicit `--out`.
pub const OUT_DIR_ENV: &str = "HRLAB_OUT_DIR";

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outcome: String,
}

/// Unix seconds, pinned by `SOURCE_DATE_EPOCH` when set so reruns are byte-identical.
fn now() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
    {
        return t;
    }
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// An in-progress run; `finish` freezes it into a manifest.
pub struct Run {
    command: String,
    config: Value,
    seed: Option<u64>,
    started: u64,
}

impl Run {
    pub fn start(command: &str, config: &impl Serialize, seed: Option<u64>) -> Run {
        Run {
            command: command.to_string(),
            config: serde_json::to_value(config).unwrap_or(Value::Null),
            seed,
            started: now(),
        }
    }

    pub fn finish(&self, outcome: impl Into<String>) -> RunManifest {
        RunManifest {
            command: self.command.clone(),
            config: self.config.clone(),
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION"),
            started_unix: self.started,
            finished_unix: now(),
            outcome: outcome.into(),
        }
    }
}

#[derive(Serialize)]
struct Artifact<'a, T: Serialize> {
    manifest: &'a RunManifest,
    #[serde(flatten)]
    body: &'a T,
}

/// `explicit`, or `default_name` inside `$HRLAB_OUT_DIR` (current directory when unset).
pub fn output_path(explicit: Option<&Path>, default_name: &str) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."))
            .join(default_name),
    }
}

/// `dir/stem.report.json` for `dir/stem.json`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}.{suffix}"))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes `{"manifest": ..., <body fields>}` as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, manifest: &RunManifest, body: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(&Artifact { manifest, body })
        .map_err(|e| CliError::Io(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    write_text(path, &text)
}

/// Writes CSV with a leading `# manifest: {...}` comment line.
pub fn write_csv(path: &Path, manifest: &RunManifest, csv: &str) -> Result<(), CliError> {
    let head = serde_json::to_string(manifest).map_err(|e| CliError::Io(e.to_string()))?;
    write_text(path, &format!("# manifest: {head}\n{csv}"))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_path_wins() {
        assert_eq!(
            output_path(Some(Path::new("a/b.json")), "x.json"),
            PathBuf::from("a/b.json")
        );
    }

    #[test]
    fn report_sits_next_to_ring() {
        assert_eq!(
            sibling(Path::new("out/pb.json"), "report.json"),
            PathBuf::from("out/pb.report.json")
        );
    }

    #[test]
    fn manifest_embeds_config() {
        let run = Run::start("verify", &serde_json::json!({"n": 3}), Some(7));
        let m = run.finish("verified");
        assert_eq!(m.config["n"], 3);
        assert!(m.finished_unix >= m.started_unix);
        let text = serde_json::to_string(&Artifact {
            manifest: &m,
            body: &serde_json::json!({"x": 1}),
        })
        .unwrap();
        assert!(text.starts_with("{\"manifest\":{\"command\":\"verify\""));
        assert!(text.ends_with(",\"x\":1}"));
    }
}
