//! Flat `key = value` boundary configs and command-line number parsing.

use std::collections::BTreeMap;
use std::path::Path;

use g2chain::boundary::{BoundaryParams, Branch, Triple};
use g2chain::C64;
use serde_json::{json, Value};

use crate::json::cx;
use crate::CliError;

const KEYS: [&str; 6] = ["c1", "c2", "c3_branch", "ct1", "ct2", "ct3_branch"];

#[derive(Clone, Debug)]
pub struct BoundaryConfig {
    pub c1: C64,
    pub c2: C64,
    pub c3_branch: Branch,
    pub ct1: C64,
    pub ct2: C64,
    pub ct3_branch: Branch,
}

impl BoundaryConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| CliError::Config(format!("line {}: expected key = value", no + 1)))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(CliError::Config(format!("line {}: unknown key '{k}' (allowed: {})", no + 1, KEYS.join(", "))));
            }
            if map.insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key '{k}'", no + 1)));
            }
        }
        let get = |k: &str| map.get(k).ok_or_else(|| CliError::Config(format!("missing key '{k}'")));
        let num = |k: &str| get(k).and_then(|v| parse_complex(v).map_err(|e| CliError::Config(format!("{k}: {e}"))));
        let branch = |k: &str| get(k).and_then(|v| v.parse::<Branch>().map_err(|e| CliError::Config(format!("{k}: {e}"))));
        Ok(Self {
            c1: num("c1")?,
            c2: num("c2")?,
            c3_branch: branch("c3_branch")?,
            ct1: num("ct1")?,
            ct2: num("ct2")?,
            ct3_branch: branch("ct3_branch")?,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn params(&self) -> Result<BoundaryParams, CliError> {
        Ok(BoundaryParams::from_pairs(self.c1, self.c2, self.c3_branch, self.ct1, self.ct2, self.ct3_branch)?)
    }

    /// Inputs plus the derived c₃, c̃₃, x and A.
    pub fn echo(&self) -> Result<Value, CliError> {
        let p = self.params()?;
        let third = |t: Triple| t.values()[2];
        Ok(json!({
            "boundary": "open",
            "c1": cx(self.c1),
            "c2": cx(self.c2),
            "c3_branch": self.c3_branch,
            "ct1": cx(self.ct1),
            "ct2": cx(self.ct2),
            "ct3_branch": self.ct3_branch,
            "c3": cx(third(p.minus)),
            "ct3": cx(third(p.plus)),
            "x": cx(p.x()),
            "A": cx(p.big_a()),
        }))
    }
}

/// `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("not a number: '{}'", t.trim()));
    match s.split_once(',') {
        Some((a, b)) => Ok(C64::new(num(a)?, num(b)?)),
        None => Ok(C64::new(num(s)?, 0.0)),
    }
}

/// A list of points separated by `;`, each `re` or `re,im`.
pub fn parse_points(s: &str) -> Result<Vec<C64>, String> {
    s.split(';').filter(|t| !t.trim().is_empty()).map(parse_complex).collect()
}

/// Comma-separated θ values; each entry is real or `a+bi`.
pub fn parse_thetas(s: &str) -> Result<Vec<C64>, String> {
    s.split(',').map(|t| parse_imag_form(t.trim())).collect()
}

fn parse_imag_form(t: &str) -> Result<C64, String> {
    let err = || format!("not a number: '{t}'");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|x| C64::new(x, 0.0)).map_err(|_| err());
    };
    // split at the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let cut = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (a, b) = match cut {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match b {
        "" | "+" => 1.0,
        "-" => -1.0,
        _ => b.parse::<f64>().map_err(|_| err())?,
    };
    Ok(C64::new(a.parse::<f64>().map_err(|_| err())?, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE: &str = "c1 = 1.73\nc2 = 0.93\nc3_branch = plus\n# tilde side\nct1 = 0.07\nct2 = 0.93\nct3_branch = plus\n";

    #[test]
    fn table_config_gives_printed_x() {
        let cfg = BoundaryConfig::parse(TABLE).unwrap();
        let x = cfg.params().unwrap().x();
        assert!((x.re + 2.7644).abs() < 1e-4 && x.im.abs() < 1e-12);
    }

    #[test]
    fn unknown_and_missing_keys_are_rejected() {
        assert!(BoundaryConfig::parse(&format!("{TABLE}c4 = 1\n")).is_err());
        assert!(BoundaryConfig::parse("c1 = 1.73\n").is_err());
        assert!(BoundaryConfig::parse(&format!("{TABLE}c1 = 2\n")).is_err());
        assert!(BoundaryConfig::parse(&TABLE.replace("plus\n#", "sideways\n#")).is_err());
    }

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.5,-1").unwrap(), C64::new(0.5, -1.0));
        assert_eq!(parse_complex("2").unwrap(), C64::new(2.0, 0.0));
        assert!(parse_complex("a,1").is_err());
        assert_eq!(parse_thetas("0,0.3+0.1i,-2e-1-i").unwrap(), vec![C64::new(0.0, 0.0), C64::new(0.3, 0.1), C64::new(-0.2, -1.0)]);
        assert_eq!(parse_thetas("1e-3i").unwrap(), vec![C64::new(0.0, 1e-3)]);
        assert_eq!(parse_points("1,2;3").unwrap(), vec![C64::new(1.0, 2.0), C64::new(3.0, 0.0)]);
    }
}
