use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::Error;

/// One named pass/fail outcome. `margin` is positive when the check passes
/// and measures how far it is from failing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub margin: f64,
}

impl Check {
    /// Passes iff `margin > 0`.
    pub fn from_margin(name: impl Into<String>, margin: f64) -> Self {
        Self {
            name: name.into(),
            passed: margin > 0.0,
            margin,
        }
    }

    /// `tol − error`, passing when the error is below the tolerance.
    pub fn within(name: impl Into<String>, error: f64, tol: f64) -> Self {
        Self::from_margin(name, tol - error)
    }

    /// A check without a natural scale; margin is 1 or −1.
    pub fn flag(name: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            passed,
            margin: if passed { 1.0 } else { -1.0 },
        }
    }
}

/// Machine-readable result of one CLI invocation. Maps are ordered, so the
/// serialized bytes depend only on the contents.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub version: String,
    pub inputs: BTreeMap<String, Value>,
    pub outputs: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub tolerances: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            checks: Vec::new(),
            tolerances: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) {
        self.inputs.insert(key.to_string(), to_value(value));
    }

    pub fn output(&mut self, key: &str, value: impl Serialize) {
        self.outputs.insert(key.to_string(), to_value(value));
    }

    pub fn tolerance(&mut self, key: &str, value: f64) {
        self.tolerances.insert(key.to_string(), value);
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn all_passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, dir: &Path) -> Result<(), Error> {
        write_file(&dir.join("report.json"), self.to_json().as_bytes())
    }
}

fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("value serializes")
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    let io = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io)?;
    }
    let mut file = fs::File::create(path).map_err(io)?;
    file.write_all(bytes).map_err(io)
}

/// CSV with a header and 17 significant digits per value.
pub fn csv_string<const N: usize>(header: [&str; N], rows: impl IntoIterator<Item = [f64; N]>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_exactly() {
        let v = [0.1 + 0.2, std::f64::consts::PI, -1e-300];
        let s = csv_string(["a", "b", "c"], [v]);
        let line = s.lines().nth(1).unwrap();
        let back: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(back, v);
        assert!(s.starts_with("a,b,c\n"));
    }

    #[test]
    fn check_margins() {
        assert!(Check::within("x", 1e-9, 1e-8).passed);
        assert!(!Check::within("x", 1e-7, 1e-8).passed);
        assert_eq!(Check::flag("y", false).margin, -1.0);
    }
}
