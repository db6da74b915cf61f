//! Plot-ready CSV and the run manifest.
//!
//! CSV dialect: comma separated, one header row, floats as C `%.12e`, LF line endings, UTF-8.
//! Every file is written to a temporary sibling first and renamed into place.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// `%.12e`: twelve fraction digits, signed exponent of at least two digits.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    format!("{mant}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::I(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.into())
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::S(if v { "true" } else { "false" }.into())
    }
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Cell::F(v) => out.push_str(&fmt_float(*v)),
            Cell::I(v) => {
                let _ = write!(out, "{v}");
            }
            Cell::S(s) => {
                if s.contains([',', '"', '\n']) {
                    out.push('"');
                    out.push_str(&s.replace('"', "\"\""));
                    out.push('"');
                } else {
                    out.push_str(s);
                }
            }
        }
    }
}

/// An in-memory table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self { header: header.iter().map(|s| s.as_ref().to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width differs from the header");
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, c) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                c.render(&mut out);
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.render().as_bytes())
    }
}

/// Builds a row from heterogeneous values.
#[macro_export]
macro_rules! row {
    ($($v:expr),* $(,)?) => { vec![$($crate::io::Cell::from($v)),*] };
}

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::Config(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let io_err = |e: std::io::Error, p: &Path| Error::Config(format!("cannot write {}: {e}", p.display()));
    fs::write(&tmp, bytes).map_err(|e| io_err(e, &tmp))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(e, path)
    })
}

/// Creates the output directory and checks that it is writable.
pub fn prepare_out_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::Config(format!("cannot create output directory {}: {e}", dir.display())))?;
    let probe = dir.join(".hyperspec-write-test");
    fs::write(&probe, b"").map_err(|e| Error::Config(format!("output directory {} is not writable: {e}", dir.display())))?;
    let _ = fs::remove_file(&probe);
    Ok(dir.to_path_buf())
}

/// Pass/fail of one quantitative check. `value` is compared against `tolerance`
/// according to `relation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub group: String,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// value <= tolerance
    AtMost,
    /// value >= tolerance
    AtLeast,
    /// value is a 0/1 indicator of a qualitative property
    Holds,
}

impl Check {
    pub fn at_most(group: &str, name: &str, value: f64, tolerance: f64) -> Self {
        Self { group: group.into(), name: name.into(), value, tolerance, relation: Relation::AtMost, pass: value <= tolerance, note: String::new() }
    }

    pub fn at_least(group: &str, name: &str, value: f64, tolerance: f64) -> Self {
        Self { group: group.into(), name: name.into(), value, tolerance, relation: Relation::AtLeast, pass: value >= tolerance, note: String::new() }
    }

    pub fn holds(group: &str, name: &str, ok: bool) -> Self {
        Self { group: group.into(), name: name.into(), value: ok as u8 as f64, tolerance: 1.0, relation: Relation::Holds, pass: ok, note: String::new() }
    }

    /// A failed check standing in for a computation that returned an error.
    pub fn errored(group: &str, name: &str, err: &Error) -> Self {
        Self { group: group.into(), name: name.into(), value: f64::NAN, tolerance: f64::NAN, relation: Relation::Holds, pass: false, note: err.to_string() }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn line(&self) -> String {
        let rel = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Holds => "holds",
        };
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let mut s = match self.relation {
            Relation::Holds => format!("{verdict} {}/{}", self.group, self.name),
            _ => format!("{verdict} {}/{}: {:.3e} {rel} {:.3e}", self.group, self.name, self.value, self.tolerance),
        };
        if !self.note.is_empty() {
            let _ = write!(s, " ({})", self.note);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub wall_seconds: f64,
}

/// Everything needed to audit a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub quick: bool,
    pub config: serde_json::Value,
    pub stages: Vec<Stage>,
    /// every tolerance referenced by a check, keyed group/name
    pub tolerances: BTreeMap<String, f64>,
    /// truncations and discretisation parameters
    pub truncations: BTreeMap<String, serde_json::Value>,
    pub checks: Vec<Check>,
    pub outputs: Vec<String>,
    pub passed: bool,
}

impl Manifest {
    pub fn new(command: &str, seed: u64, quick: bool, config: serde_json::Value) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            quick,
            config,
            stages: vec![],
            tolerances: BTreeMap::new(),
            truncations: BTreeMap::new(),
            checks: vec![],
            outputs: vec![],
            passed: true,
        }
    }

    pub fn add_checks(&mut self, checks: &[Check]) {
        for c in checks {
            if c.relation != Relation::Holds {
                self.tolerances.insert(format!("{}/{}", c.group, c.name), c.tolerance);
            }
            self.passed &= c.pass;
        }
        self.checks.extend_from_slice(checks);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))?;
        s.push('\n');
        write_atomic(path, s.as_bytes())
    }
}

/// Checks, stage timings, tables and truncation notes produced by one piece of work.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
    pub stages: Vec<Stage>,
    /// (file name, table)
    pub tables: Vec<(String, Table)>,
    pub truncations: BTreeMap<String, serde_json::Value>,
}

impl Report {
    /// Runs `f` and records its wall time under `name`.
    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t0 = std::time::Instant::now();
        let out = f();
        self.stages.push(Stage { name: name.into(), wall_seconds: t0.elapsed().as_secs_f64() });
        out
    }

    pub fn seconds(&self, prefix: &str) -> f64 {
        self.stages.iter().filter(|s| s.name.starts_with(prefix)).map(|s| s.wall_seconds).sum()
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn table(&mut self, file: &str, t: Table) {
        self.tables.push((file.into(), t));
    }

    pub fn note<T: Serialize>(&mut self, key: &str, value: T) {
        self.truncations.insert(key.into(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
    }

    pub fn absorb(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.stages.extend(other.stages);
        self.tables.extend(other.tables);
        self.truncations.extend(other.truncations);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn group_passed(&self, group: &str) -> bool {
        self.checks.iter().filter(|c| c.group == group).all(|c| c.pass)
    }

    /// Writes the tables into `dir` and copies everything else into the manifest.
    pub fn write_into(&self, dir: &Path, manifest: &mut Manifest) -> Result<()> {
        for (name, t) in &self.tables {
            let path = dir.join(name);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(|e| Error::Config(format!("cannot create {}: {e}", parent.display())))?;
            }
            t.write(&path)?;
            manifest.outputs.push(name.clone());
        }
        manifest.stages.extend(self.stages.iter().cloned());
        manifest.truncations.extend(self.truncations.clone());
        manifest.add_checks(&self.checks);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponent() {
        assert_eq!(fmt_float(1.0), "1.000000000000e+00");
        assert_eq!(fmt_float(-2.5e-7), "-2.500000000000e-07");
        assert_eq!(fmt_float(6.02e123), "6.020000000000e+123");
        assert_eq!(fmt_float(0.0), "0.000000000000e+00");
        assert_eq!(fmt_float(f64::NAN), "nan");
    }

    #[test]
    fn table_rendering() {
        let mut t = Table::new(&["i", "x", "tag"]);
        t.push(row![3usize, 0.5, "a,b"]);
        assert_eq!(t.render(), "i,x,tag\n3,5.000000000000e-01,\"a,b\"\n");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = std::env::temp_dir().join(format!("hyperspec-io-{}", std::process::id()));
        prepare_out_dir(&dir).unwrap();
        let p = dir.join("a.csv");
        write_atomic(&p, b"one\n").unwrap();
        write_atomic(&p, b"two\n").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two\n");
        let leftovers = fs::read_dir(&dir).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().contains(".tmp")).count();
        assert_eq!(leftovers, 0);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn manifest_collects_tolerances() {
        let mut m = Manifest::new("verify", 1, false, serde_json::json!({}));
        m.add_checks(&[Check::at_most("kl", "parseval", 1e-8, 1e-6), Check::at_most("kl", "round_trip", 1.0, 1e-4)]);
        assert_eq!(m.tolerances["kl/parseval"], 1e-6);
        assert!(!m.passed);
    }
}
