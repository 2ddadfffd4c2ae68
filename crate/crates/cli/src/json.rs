//! JSON conventions: complex numbers as `[re, im]`, every float rounded to
//! 12 significant digits on output.

use std::path::Path;

use g2chain::bethe::{BetheRoots, Mode};
use g2chain::report::round12;
use g2chain::C64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::CliError;

pub fn cx(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn cx_list(zs: &[C64]) -> Value {
    Value::Array(zs.iter().map(|&z| cx(z)).collect())
}

pub fn roots_json(r: &BetheRoots) -> Value {
    json!({ "mu1": cx_list(&r.mu1), "mu2": cx_list(&r.mu2) })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRoots {
    mu1: Vec<[f64; 2]>,
    mu2: Vec<[f64; 2]>,
}

impl RawRoots {
    fn into_roots(self, mode: Mode) -> BetheRoots {
        let conv = |v: Vec<[f64; 2]>| v.into_iter().map(|p| C64::new(p[0], p[1])).collect();
        BetheRoots { mu1: conv(self.mu1), mu2: conv(self.mu2), mode }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// One root set `{"mu1": [[re, im], ...], "mu2": [...]}`.
pub fn read_roots(path: &Path, mode: Mode) -> Result<BetheRoots, CliError> {
    Ok(read_json::<RawRoots>(path)?.into_roots(mode))
}

/// An array of root sets.
pub fn read_seeds(path: &Path, mode: Mode) -> Result<Vec<BetheRoots>, CliError> {
    Ok(read_json::<Vec<RawRoots>>(path)?.into_iter().map(|r| r.into_roots(mode)).collect())
}

pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                // fold -0.0 into 0.0
                *v = json!(round12(x) + 0.0);
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty-print to `out`, or stdout when absent.
pub fn emit(mut v: Value, out: Option<&Path>) -> Result<(), CliError> {
    round_floats(&mut v);
    let text = serde_json::to_string_pretty(&v).expect("JSON values serialize") + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Config(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
