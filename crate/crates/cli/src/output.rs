//! Artifact emission. Every file is written to a temporary sibling and
//! renamed into place, so readers never observe a partial file.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

/// Serializes a report body. Field order follows declaration order and
/// maps are ordered, so equal inputs give equal bytes; non-finite floats
/// become `null`.
pub fn to_json<T: Serialize>(body: &T) -> String {
    let mut s = serde_json::to_string_pretty(body).expect("report types serialize infallibly");
    s.push('\n');
    s
}

pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(&path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(&path, e))?;
    tmp.persist(&path).map_err(|e| CliError::io(&path, e.error))?;
    Ok(path)
}

/// Two-column CSV with 17 significant digits.
pub fn pairs_csv(header: (&str, &str), rows: &[(f64, f64)]) -> String {
    let mut s = format!("{},{}\n", header.0, header.1);
    for (a, b) in rows {
        s.push_str(&format!("{a:.16e},{b:.16e}\n"));
    }
    s
}

/// Run metadata kept out of the report body.
#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub version: &'static str,
    pub command: String,
    pub args: Vec<String>,
    pub config: Option<String>,
    pub seed: u64,
    /// Seconds since the Unix epoch at start.
    pub started_unix: f64,
    pub duration_s: f64,
    pub exit_code: i32,
    pub artifacts: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "a.json", b"one").unwrap();
        let p = write_atomic(dir.path(), "a.json", b"two").unwrap();
        assert_eq!(std::fs::read_to_string(p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn non_finite_floats_become_null() {
        assert_eq!(to_json(&[f64::INFINITY, 1.5]), "[\n  null,\n  1.5\n]\n");
    }

    #[test]
    fn csv_keeps_seventeen_digits() {
        let s = pairs_csv(("a", "b"), &[(0.1, 1.0 / 3.0)]);
        let row: Vec<f64> = s.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row, vec![0.1, 1.0 / 3.0]);
    }
}
