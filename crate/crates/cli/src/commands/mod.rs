pub mod bench;
pub mod plot;
pub mod solve;
pub mod value;
pub mod verify;

use std::io::Write;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub(crate) fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}
