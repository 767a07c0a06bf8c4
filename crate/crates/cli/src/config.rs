//! `key = value` configuration files with `[section]` headers.
//!
//! Parsing is strict: every section and key in the file must be read by the
//! experiment, so a misspelled key is an error instead of a silent default.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use pslab_core::corpus::Recipe;
use pslab_core::GridSpec;

/// A configuration problem; always reported with exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

#[derive(Debug)]
pub struct Config {
    path: PathBuf,
    bytes: Vec<u8>,
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
    used: RefCell<BTreeSet<(String, String)>>,
    opened: RefCell<BTreeSet<String>>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let bytes = std::fs::read(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes).map_err(|_| ConfigError(format!("{}: not UTF-8", path.display())))?;
        let sections = parse(text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))?;
        Ok(Self {
            path: path.to_path_buf(),
            bytes,
            sections,
            used: RefCell::default(),
            opened: RefCell::default(),
        })
    }

    #[cfg(test)]
    pub fn from_str(text: &str) -> Result<Self, ConfigError> {
        Ok(Self {
            path: PathBuf::from("inline.conf"),
            bytes: text.as_bytes().to_vec(),
            sections: parse(text)?,
            used: RefCell::default(),
            opened: RefCell::default(),
        })
    }

    /// Raw file contents, hashed into the provenance header.
    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn file_name(&self) -> String {
        self.path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default()
    }

    /// Resolves a path written in the file relative to the file's directory.
    pub fn resolve(&self, rel: &str) -> PathBuf {
        let p = Path::new(rel);
        if p.is_absolute() {
            return p.to_path_buf();
        }
        self.path.parent().unwrap_or(Path::new(".")).join(p)
    }

    /// Keys of `[name]`; an absent section reads as empty.
    pub fn section(&self, name: &str) -> Section<'_> {
        self.opened.borrow_mut().insert(name.to_string());
        Section { cfg: self, name: name.to_string() }
    }

    /// Fails on sections nobody opened and keys nobody read.
    pub fn finish(&self) -> Result<(), ConfigError> {
        let opened = self.opened.borrow();
        let used = self.used.borrow();
        for (name, entries) in &self.sections {
            if !opened.contains(name) {
                let shown = if name.is_empty() { "top level" } else { name };
                return err(format!("unknown section [{shown}]"));
            }
            for (key, e) in entries {
                if !used.contains(&(name.clone(), key.clone())) {
                    let at = if name.is_empty() { String::new() } else { format!(" in [{name}]") };
                    return err(format!("line {}: unknown key `{key}`{at}", e.line));
                }
            }
        }
        Ok(())
    }
}

fn parse(text: &str) -> Result<BTreeMap<String, BTreeMap<String, Entry>>, ConfigError> {
    let mut sections: BTreeMap<String, BTreeMap<String, Entry>> = BTreeMap::new();
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let no = i + 1;
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return err(format!("line {no}: unterminated section header"));
            };
            let name = name.trim();
            if name.is_empty() {
                return err(format!("line {no}: empty section name"));
            }
            if sections.contains_key(name) {
                return err(format!("line {no}: section [{name}] appears twice"));
            }
            current = name.to_string();
            sections.insert(current.clone(), BTreeMap::new());
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(format!("line {no}: expected `key = value`"));
        };
        let key = key.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return err(format!("line {no}: bad key `{key}`"));
        }
        let entries = sections.entry(current.clone()).or_default();
        if entries.contains_key(key) {
            return err(format!("line {no}: duplicate key `{key}`"));
        }
        entries.insert(
            key.to_string(),
            Entry {
                value: value.trim().to_string(),
                line: no,
            },
        );
    }
    Ok(sections)
}

/// Number literal; `p/q` is accepted so spacings like `1/32` stay exact.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let (p, q) = (p.trim().parse::<f64>().ok()?, q.trim().parse::<f64>().ok()?);
        return (q != 0.0).then_some(p / q).filter(|v| v.is_finite());
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub struct Section<'a> {
    cfg: &'a Config,
    name: String,
}

impl Section<'_> {
    fn raw(&self, key: &str) -> Option<&Entry> {
        let e = self.cfg.sections.get(&self.name)?.get(key)?;
        self.cfg.used.borrow_mut().insert((self.name.clone(), key.to_string()));
        Some(e)
    }

    fn where_(&self, key: &str, e: &Entry) -> String {
        if self.name.is_empty() {
            format!("line {}: `{key}`", e.line)
        } else {
            format!("line {}: `{key}` in [{}]", e.line, self.name)
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.cfg.sections.get(&self.name).is_some_and(|s| s.contains_key(key))
    }

    pub fn string(&self, key: &str) -> Option<String> {
        self.raw(key).map(|e| e.value.clone())
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(e) => match parse_number(&e.value) {
                Some(v) => Ok(Some(v)),
                None => err(format!("{}: `{}` is not a finite number", self.where_(key, e), e.value)),
            },
        }
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    pub fn positive(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v = self.f64(key, default)?;
        if v > 0.0 {
            Ok(v)
        } else {
            err(format!("`{key}` in [{}] must be positive, got {v}", self.name))
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some(e) => e
                .value
                .parse::<usize>()
                .map_err(|_| ConfigError(format!("{}: `{}` is not a nonnegative integer", self.where_(key, e), e.value))),
        }
    }

    pub fn u64_opt(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<u64>()
                .map(Some)
                .map_err(|_| ConfigError(format!("{}: `{}` is not a nonnegative integer", self.where_(key, e), e.value))),
        }
    }

    /// Comma-separated numbers; must be nonempty.
    pub fn list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        let Some(e) = self.raw(key) else {
            return Ok(default.to_vec());
        };
        let out: Option<Vec<f64>> = e.value.split(',').map(parse_number).collect();
        match out {
            Some(v) if !v.is_empty() => Ok(v),
            _ => err(format!("{}: expected a comma-separated list of numbers", self.where_(key, e))),
        }
    }

    /// Comma-separated `x:y` pairs.
    pub fn pairs(&self, key: &str, default: &[(f64, f64)]) -> Result<Vec<(f64, f64)>, ConfigError> {
        let Some(e) = self.raw(key) else {
            return Ok(default.to_vec());
        };
        let out: Option<Vec<(f64, f64)>> = e
            .value
            .split(',')
            .map(|item| {
                let (x, y) = item.split_once(':')?;
                Some((parse_number(x)?, parse_number(y)?))
            })
            .collect();
        match out {
            Some(v) if !v.is_empty() => Ok(v),
            _ => err(format!("{}: expected comma-separated `x:y` pairs", self.where_(key, e))),
        }
    }

    pub fn bool(&self, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some(e) => match e.value.as_str() {
                "true" | "yes" | "on" => Ok(true),
                "false" | "no" | "off" => Ok(false),
                other => err(format!("{}: `{other}` is not a boolean", self.where_(key, e))),
            },
        }
    }

    /// `n`, `dx` and optional `dim` (default 1).
    pub fn grid(&self, n: usize, dx: f64) -> Result<GridSpec, ConfigError> {
        let dim = self.usize("dim", 1)?;
        let n = self.usize("n", n)?;
        let dx = self.f64("dx", dx)?;
        GridSpec::new(dim, n, dx).map_err(|e| ConfigError(format!("[{}]: {e}", self.name)))
    }

    /// A system recipe from `recipe` plus the keys that recipe takes.
    pub fn recipe(&self, default: Recipe) -> Result<Recipe, ConfigError> {
        let name = self.string("recipe").unwrap_or_else(|| default.name().to_string());
        let base = if name == default.name() { Some(&default) } else { None };
        let pick = |key: &str, from: Option<f64>| -> Result<f64, ConfigError> {
            match (self.f64_opt(key)?, from) {
                (Some(v), _) | (None, Some(v)) => Ok(v),
                (None, None) => err(format!("recipe `{name}` needs `{key}` in [{}]", self.name)),
            }
        };
        Ok(match name.as_str() {
            "hermite-onb" => {
                let d = match base {
                    Some(Recipe::HermiteOnb { count }) => Some(*count),
                    _ => None,
                };
                let count = match (self.has("count"), d) {
                    (true, _) | (false, None) => self.usize("count", usize::MAX)?,
                    (false, Some(c)) => c,
                };
                if count == usize::MAX {
                    return err(format!("recipe `hermite-onb` needs `count` in [{}]", self.name));
                }
                Recipe::HermiteOnb { count }
            }
            "gabor-gaussian" => {
                let (a, b, t) = match base {
                    Some(Recipe::GaborGaussian { alpha, beta, extent }) => (Some(*alpha), Some(*beta), Some(*extent)),
                    _ => (None, None, None),
                };
                Recipe::GaborGaussian {
                    alpha: pick("alpha", a)?,
                    beta: pick("beta", b)?,
                    extent: pick("extent", t)?,
                }
            }
            "jittered-gabor" => {
                let (a, b, j, t) = match base {
                    Some(Recipe::JitteredGabor {
                        alpha,
                        beta,
                        jitter,
                        extent,
                    }) => (Some(*alpha), Some(*beta), Some(*jitter), Some(*extent)),
                    _ => (None, None, None, None),
                };
                Recipe::JitteredGabor {
                    alpha: pick("alpha", a)?,
                    beta: pick("beta", b)?,
                    jitter: pick("jitter", j)?,
                    extent: pick("extent", t)?,
                }
            }
            "two-bump" => {
                let s = match base {
                    Some(Recipe::TwoBump { separation }) => Some(*separation),
                    _ => None,
                };
                Recipe::TwoBump {
                    separation: pick("separation", s)?,
                }
            }
            other => {
                return err(format!(
                    "unknown recipe `{other}`; expected one of {}",
                    Recipe::NAMES.join(", ")
                ))
            }
        })
    }
}
