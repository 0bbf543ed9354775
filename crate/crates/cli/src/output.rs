use std::io::Write;
use std::path::Path;

use chiral_core::qmat::CMat3;

use crate::CliError;

fn parent_dir(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

/// Fail early when `path` cannot be written, before any computation.
pub fn check_destination(path: Option<&Path>) -> Result<(), CliError> {
    let Some(path) = path else { return Ok(()) };
    let dir = parent_dir(path);
    if !dir.is_dir() {
        return Err(CliError::Io(format!(
            "{}: directory {} does not exist",
            path.display(),
            dir.display()
        )));
    }
    if path.is_dir() {
        return Err(CliError::Io(format!("{}: is a directory", path.display())));
    }
    Ok(())
}

/// Write `contents` to `path` through a temporary file in the same
/// directory, so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(parent_dir(path)).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Send `contents` to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn fixed6(x: f64) -> String {
    let s = format!("{x:+.6}");
    if s == "-0.000000" {
        "+0.000000".into()
    } else {
        s
    }
}

pub fn render_matrix(label: &str, u: &CMat3) -> String {
    let mut out = format!("{label} =\n");
    for row in u.rows() {
        let cells: Vec<String> = row
            .iter()
            .map(|z| format!("{}{}i", fixed6(z.re), fixed6(z.im)))
            .collect();
        out.push_str(&format!("  [ {} ]\n", cells.join("  ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_zero_is_normalized() {
        assert_eq!(fixed6(-1e-12), "+0.000000");
        assert_eq!(fixed6(-0.1234567), "-0.123457");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        write_atomic(&p, "a").unwrap();
        write_atomic(&p, "b").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "b");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn missing_directory_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("nope/x.csv");
        assert!(matches!(write_atomic(&p, "a"), Err(CliError::Io(_))));
    }
}
