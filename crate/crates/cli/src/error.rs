use serde::Serialize;
use serde_json::json;

/// Exit codes: 0 success, 1 property failure, 2 usage or validation error.
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// An error reported as `{"error": {"kind": ..., "message": ...}}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        Self {
            kind: kind.to_string(),
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new("Io", message)
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new("Usage", message)
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self }).to_string()
    }
}

impl From<maj_lattice::Error> for CliError {
    fn from(e: maj_lattice::Error) -> Self {
        Self::new(e.kind(), e.to_string())
    }
}
