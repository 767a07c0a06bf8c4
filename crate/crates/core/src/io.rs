//! File output helpers. Every artifact is written to a temporary file in the
//! destination directory and renamed into place, so readers never observe a
//! partial file.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::C64;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Complex samples as a two-column `re,im` CSV.
pub fn samples_to_csv(values: &[C64]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["re", "im"])?;
    for v in values {
        w.write_record([v.re.to_string(), v.im.to_string()])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn samples_from_csv(path: &Path) -> Result<Vec<C64>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .ok_or_else(|| Error::Precondition(format!("{}: short row", path.display())))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Precondition(format!("{}: {e}", path.display())))
        };
        out.push(C64::new(parse(0)?, parse(1)?));
    }
    Ok(out)
}
