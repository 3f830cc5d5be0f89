//! Output plumbing: reproducible headers, input hashing, float formatting,
//! atomic file writes, and the structured error type.

use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Header carried by every primary output.
#[derive(Serialize, Clone)]
pub struct Meta {
    pub tool_version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub inputs: BTreeMap<String, String>,
}

impl Meta {
    pub fn new(seed: Option<u64>) -> Self {
        Self { tool_version: TOOL_VERSION, seed, inputs: BTreeMap::new() }
    }

    pub fn with_input(mut self, name: &str, contents: &str) -> Self {
        self.inputs.insert(name.to_string(), fnv1a_hex(contents.as_bytes()));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("meta serializes")
    }
}

/// FNV-1a 64-bit content hash, prefixed for greppability.
pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("fnv1a:{hash:016x}")
}

/// Shortest round-trip decimal for a float (the JSON number form), used for
/// CSV cells so output stays byte-stable and machine-exact.
pub fn fmt_f64(value: f64) -> String {
    if value.is_finite() {
        serde_json::to_string(&value).expect("finite float serializes")
    } else if value.is_nan() {
        "nan".into()
    } else if value > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Domain error from the library, tagged with the owning module.
    Domain { kind: &'static str, message: String },
    /// I/O or parse failure, named by file.
    Io { path: String, message: String },
    /// Malformed user data (bad flags values, bad records).
    Data { message: String },
}

impl CliError {
    pub fn to_json(&self) -> String {
        let (kind, message) = match self {
            CliError::Domain { kind, message } => (*kind, message.clone()),
            CliError::Io { path, message } => ("io", format!("{path}: {message}")),
            CliError::Data { message } => ("data", message.clone()),
        };
        serde_json::to_string(&serde_json::json!({
            "error": { "kind": kind, "message": message }
        }))
        .expect("error serializes")
    }

    pub fn io(path: &str, err: impl std::fmt::Display) -> Self {
        CliError::Io { path: path.to_string(), message: err.to_string() }
    }
}

macro_rules! domain_from {
    ($($ty:ty => $kind:literal),* $(,)?) => {
        $(impl From<$ty> for CliError {
            fn from(err: $ty) -> Self {
                CliError::Domain { kind: $kind, message: err.to_string() }
            }
        })*
    };
}

domain_from! {
    qsamp_core::matrix::MatrixError => "matrix",
    qsamp_core::permanent::PermanentError => "permanent",
    qsamp_core::boson::BosonError => "boson",
    qsamp_core::iqp::IqpError => "iqp",
    qsamp_core::stats::StatsError => "stats",
    qsamp_core::dist::DistError => "distribution",
}

pub fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn parse_json<T: serde::de::DeserializeOwned>(path: &str, contents: &str) -> Result<T, CliError> {
    serde_json::from_str(contents).map_err(|e| CliError::io(path, e))
}

/// Writes `content` to stdout, or atomically (temp + rename) to `out`.
pub fn emit(out: Option<&str>, content: &str) -> Result<(), CliError> {
    match out {
        None => {
            print!("{content}");
            std::io::stdout().flush().map_err(|e| CliError::io("<stdout>", e))
        }
        Some(path) => {
            let target = Path::new(path);
            let dir = target.parent().filter(|p| !p.as_os_str().is_empty());
            let mut temp = std::path::PathBuf::from(dir.unwrap_or_else(|| Path::new(".")));
            temp.push(format!(
                ".{}.tmp-{}",
                target.file_name().and_then(|n| n.to_str()).unwrap_or("out"),
                std::process::id()
            ));
            std::fs::write(&temp, content).map_err(|e| CliError::io(&temp.display().to_string(), e))?;
            std::fs::rename(&temp, target).map_err(|e| CliError::io(path, e))
        }
    }
}
