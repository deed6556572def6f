//! Writing results: every file goes to a temp file in the output directory
//! and is renamed into place.

use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: Vec<u8>,
}

pub fn check_out_dir(dir: &Path) -> CliResult<()> {
    match std::fs::metadata(dir) {
        Ok(m) if m.is_dir() => Ok(()),
        Ok(_) => Err(CliError::io(
            dir,
            std::io::Error::new(
                std::io::ErrorKind::NotADirectory,
                "output path is not a directory",
            ),
        )),
        Err(e) => Err(CliError::io(dir, e)),
    }
}

pub fn write_atomic(dir: &Path, artifact: &Artifact) -> CliResult<()> {
    let target = dir.join(&artifact.file_name);
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(&artifact.contents)
        .and_then(|_| tmp.flush())
        .map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.persist(&target)
        .map_err(|e| CliError::io(&target, e.error))?;
    Ok(())
}

pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> CliResult<()> {
    artifacts.iter().try_for_each(|a| write_atomic(dir, a))
}
