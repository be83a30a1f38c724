use std::fmt;
use std::path::Path;

use serde::Serialize;

/// Error reported on stderr as one JSON object.
#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
}

impl CliError {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        Self { kind: kind.to_owned(), message: message.into(), context: None }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new("config", message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new("internal", message)
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new("io", e.to_string()).context(path.display().to_string())
    }

    pub fn context(mut self, context: impl Into<String>) -> Self {
        self.context = Some(match self.context.take() {
            Some(inner) => format!("{}: {inner}", context.into()),
            None => context.into(),
        });
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)?;
        if let Some(c) = &self.context {
            write!(f, " ({c})")?;
        }
        Ok(())
    }
}

impl From<qprobe_core::Error> for CliError {
    fn from(e: qprobe_core::Error) -> Self {
        let mut out = Self::new(e.kind(), e.to_string());
        if let qprobe_core::Error::Calibration { orphans, .. } = &e {
            if !orphans.is_empty() {
                out.context = Some(format!("{} unmatched peaks", orphans.len()));
            }
        }
        out
    }
}
