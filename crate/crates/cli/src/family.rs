//! JSON family files.

use std::collections::BTreeMap;

use opspace_core::linalg::{c64, ComplexMatrix};
use opspace_core::opspace::{OperatorFamily, MAX_DEGREE};
use serde::Deserialize;
use serde_json::Value;

/// Largest `n^k · d²` accepted from a file.
const MAX_FILE_COORDINATES: usize = 1 << 22;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    n: usize,
    k: usize,
    d: usize,
    #[serde(default)]
    entries: BTreeMap<String, Vec<Value>>,
}

/// Parses a family file; messages name the offending field.
pub fn parse_family(text: &str) -> Result<OperatorFamily, String> {
    let raw: RawFamily =
        serde_json::from_str(text).map_err(|e| format!("line {}, column {}: {e}", e.line(), e.column()))?;
    let RawFamily { n, k, d, entries } = raw;
    if n == 0 {
        return Err("field 'n': must be at least 1".into());
    }
    if d == 0 {
        return Err("field 'd': must be at least 1".into());
    }
    if k == 0 || k > MAX_DEGREE {
        return Err(format!("field 'k': must be between 1 and {MAX_DEGREE}"));
    }
    let count = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if count.saturating_mul((d * d) as u128) > MAX_FILE_COORDINATES as u128 {
        return Err(format!("fields 'n', 'k', 'd': n^k·d² exceeds {MAX_FILE_COORDINATES}"));
    }
    let mut fam = OperatorFamily::zeros(n, k, d).map_err(|e| e.to_string())?;
    for (key, values) in entries {
        let field = format!("entries.\"{key}\"");
        let index = parse_key(&key, n, k).map_err(|e| format!("{field}: {e}"))?;
        if values.len() != d * d {
            return Err(format!(
                "{field}: expected {} [re, im] pairs, found {}",
                d * d,
                values.len()
            ));
        }
        let data = values
            .iter()
            .enumerate()
            .map(|(i, v)| parse_complex(v).map_err(|e| format!("{field}[{i}]: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        let m = ComplexMatrix::from_row_major(d, d, data).map_err(|e| format!("{field}: {e}"))?;
        fam.set(&index, m).map_err(|e| format!("{field}: {e}"))?;
    }
    Ok(fam)
}

/// `"j1,…,jk"` (1-based) to a 0-based multi-index.
fn parse_key(key: &str, n: usize, k: usize) -> Result<Vec<usize>, String> {
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    if parts.len() != k {
        return Err(format!("expected {k} comma-separated indices"));
    }
    parts
        .iter()
        .map(|p| match p.parse::<usize>() {
            Ok(j) if (1..=n).contains(&j) => Ok(j - 1),
            _ => Err(format!("index '{p}' outside 1..={n}")),
        })
        .collect()
}

fn parse_complex(v: &Value) -> Result<opspace_core::linalg::Complex64, String> {
    let pair = v.as_array().filter(|a| a.len() == 2).ok_or("expected [re, im]")?;
    let re = pair[0].as_f64().ok_or("real part is not a number")?;
    let im = pair[1].as_f64().ok_or("imaginary part is not a number")?;
    Ok(c64(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_unit_columns() {
        let text = r#"{"n": 2, "k": 1, "d": 2,
            "entries": {"1": [[1,0],[0,0],[0,0],[0,0]], "2": [[0,0],[0,0],[1,0],[0,0]]}}"#;
        let fam = parse_family(text).unwrap();
        assert_eq!(fam.get(&[1]).unwrap()[(1, 0)], c64(1.0, 0.0));
    }

    #[test]
    fn missing_entries_are_zero() {
        let fam = parse_family(r#"{"n": 2, "k": 2, "d": 1}"#).unwrap();
        assert!(fam.entries().iter().all(|a| a.is_zero()));
    }

    #[test]
    fn diagnostics_name_the_field() {
        let cases = [
            (
                r#"{"n": 2, "k": 1, "d": 1, "entries": {"3": [[1,0]]}}"#,
                "entries.\"3\"",
            ),
            (
                r#"{"n": 2, "k": 1, "d": 1, "entries": {"1": [[1,0],[0,0]]}}"#,
                "entries.\"1\"",
            ),
            (
                r#"{"n": 2, "k": 1, "d": 1, "entries": {"1": [[1,"x"]]}}"#,
                "entries.\"1\"[0]",
            ),
            (r#"{"n": 0, "k": 1, "d": 1}"#, "field 'n'"),
            (r#"{"n": 2, "k": 1}"#, "missing field `d`"),
            ("{\"n\": 2,\n \"k\": }", "line 2"),
        ];
        for (text, needle) in cases {
            let err = parse_family(text).unwrap_err();
            assert!(err.contains(needle), "{err} lacks {needle}");
        }
    }
}
