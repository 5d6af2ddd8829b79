use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::args::Format;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: BTreeMap<String, Value>,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(subcommand: &str, parameters: Value, seed: Option<u64>) -> Self {
        let parameters = match parameters {
            Value::Object(map) => map.into_iter().collect(),
            Value::Null => BTreeMap::new(),
            other => BTreeMap::from([("value".to_string(), other)]),
        };
        Self {
            subcommand: subcommand.to_string(),
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

/// What a subcommand produced, in both output shapes.
pub struct Report {
    pub json: Value,
    pub csv: String,
}

pub fn csv_table<T: Serialize>(rows: impl IntoIterator<Item = T>) -> io::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
    String::from_utf8(bytes).map_err(io::Error::other)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// JSON output embeds the manifest. CSV output gets a `<out>.manifest.json`
/// sidecar, or the manifest on stderr when writing to stdout.
pub fn emit(report: &Report, manifest: &RunManifest, format: Format, out: Option<&Path>) -> io::Result<()> {
    let body = match format {
        Format::Json => {
            let doc = serde_json::json!({ "manifest": manifest, "data": report.json });
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            s
        }
        Format::Csv => report.csv.clone(),
    };
    let manifest_json = serde_json::to_string_pretty(manifest)?;
    match out {
        Some(path) => {
            fs::write(path, body)?;
            if format == Format::Csv {
                fs::write(sidecar_path(path), manifest_json + "\n")?;
            }
        }
        None => {
            io::stdout().lock().write_all(body.as_bytes())?;
            if format == Format::Csv {
                eprintln!("{manifest_json}");
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_appends_suffix() {
        assert_eq!(sidecar_path(Path::new("out/p2.csv")), PathBuf::from("out/p2.csv.manifest.json"));
    }

    #[test]
    fn csv_uses_dot_decimals_and_header() {
        #[derive(Serialize)]
        struct Row {
            x: f64,
            y: f64,
        }
        let s = csv_table([Row { x: 0.5, y: 1e-20 }]).unwrap();
        assert_eq!(s, "x,y\n0.5,1e-20\n");
    }
}
