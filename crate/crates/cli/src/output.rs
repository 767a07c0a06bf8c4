//! CSV tables with a provenance header, written atomically as a set.

use std::path::{Path, PathBuf};

use pslab_core::io::write_atomic;
use sha2::{Digest, Sha256};

/// One CSV cell. Floats print in the shortest form that parses back to the
/// same value, switching to exponent notation for very small or large ones.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub file: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(file: &str, columns: &[&'static str]) -> Self {
        Self {
            file: file.to_string(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "{}", self.file);
        self.rows.push(row);
    }
}

/// What every file records about how it was produced.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub experiment: String,
    pub config_name: String,
    pub config_sha256: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(experiment: &str, config_name: String, config_bytes: &[u8], seed: u64) -> Self {
        let digest = Sha256::digest(config_bytes);
        Self {
            experiment: experiment.to_string(),
            config_name,
            config_sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
            seed,
        }
    }

    fn header(&self) -> String {
        format!(
            "# pslab {} (pslab-core {})\n# experiment: {}\n# config: {} sha256={}\n# seed: {}\n",
            env!("CARGO_PKG_VERSION"),
            pslab_core::VERSION,
            self.experiment,
            self.config_name,
            self.config_sha256,
            self.seed
        )
    }
}

pub fn render(table: &Table, prov: &Provenance) -> std::io::Result<Vec<u8>> {
    let mut out = prov.header().into_bytes();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render))?;
    }
    out.extend(w.into_inner().map_err(|e| e.into_error())?);
    Ok(out)
}

/// Writes every table or none: files already renamed into place are
/// removed again if a later one fails.
pub fn write_tables(dir: &Path, tables: &[Table], prov: &Provenance) -> Result<Vec<PathBuf>, String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let mut written = Vec::new();
    for t in tables {
        let path = dir.join(&t.file);
        let result = render(t, prov)
            .map_err(|e| e.to_string())
            .and_then(|bytes| write_atomic(&path, &bytes).map_err(|e| e.to_string()));
        if let Err(e) = result {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            return Err(format!("{}: {e}", path.display()));
        }
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prov() -> Provenance {
        Provenance::new("density", "x.conf".into(), b"n = 1\n", 7)
    }

    #[test]
    fn header_then_rows() {
        let mut t = Table::new("t.csv", &["a", "b", "c"]);
        t.push(vec![0.1.into(), 3usize.into(), Cell::Empty]);
        t.push(vec![f64::INFINITY.into(), "x,y".into(), true.into()]);
        t.push(vec![6.5e-15.into(), 2.0.into(), Cell::Empty]);
        let text = String::from_utf8(render(&t, &prov()).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# pslab "));
        assert_eq!(lines[3], "# seed: 7");
        assert!(lines[2].contains("sha256=") && lines[2].len() > 64);
        assert_eq!(&lines[4..], ["a,b,c", "0.1,3,", "inf,\"x,y\",true", "6.5e-15,2.0,"]);
    }

    #[test]
    fn failed_sets_leave_nothing_behind() {
        let dir = tempfile::tempdir().unwrap();
        let ok = Table::new("good.csv", &["a"]);
        let bad = Table::new("missing/bad.csv", &["a"]);
        assert!(write_tables(dir.path(), &[ok.clone(), bad], &prov()).is_err());
        assert!(!dir.path().join("good.csv").exists());
        assert_eq!(write_tables(dir.path(), &[ok], &prov()).unwrap().len(), 1);
    }
}
