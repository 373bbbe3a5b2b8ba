//! CSV and JSON emission.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;

/// 17 significant digits, enough to round-trip any double.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn write_csv(out: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    version: &'a str,
    config: &'a BTreeMap<String, String>,
    #[serde(flatten)]
    extra: Value,
}

/// `{"metadata": {...}, "<key>": payload}`.
pub fn write_json<T: Serialize>(
    out: &mut dyn Write,
    command: &str,
    config: &BTreeMap<String, String>,
    extra: Value,
    key: &str,
    payload: &T,
) -> Result<()> {
    let metadata = Metadata {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config,
        extra: if extra.is_null() { json!({}) } else { extra },
    };
    let mut doc = serde_json::Map::new();
    doc.insert("metadata".into(), serde_json::to_value(&metadata)?);
    doc.insert(key.into(), serde_json::to_value(payload)?);
    serde_json::to_writer_pretty(&mut *out, &Value::Object(doc))?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 0.024_762_188_521_258_16, 1e-300, 6.02e23, -2.5] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(opt_num(None), "");
    }

    #[test]
    fn csv_uses_lf() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &["a", "b"], &[vec!["1".into(), "2".into()]]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,2\n");
    }
}
