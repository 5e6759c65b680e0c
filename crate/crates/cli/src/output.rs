use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::config::Format;

/// Writes every float with 17 significant digits so that output is
/// bit-stable and round-trips exactly.
struct SigFigs;

impl Formatter for SigFigs {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFigs);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn render<T: Serialize>(value: &T, format: Format) -> serde_json::Result<String> {
    match format {
        Format::Json => to_json(value),
        Format::Text => {
            let mut out = String::new();
            text(&serde_json::to_value(value)?, 0, &mut out);
            Ok(out.trim_end().to_string())
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(match n.as_f64() {
            Some(f) if !n.is_i64() && !n.is_u64() => format!("{f:.16e}"),
            _ => n.to_string(),
        }),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| matches!(x, Value::Number(_))) => Some(format!(
            "[{}]",
            a.iter()
                .map(|x| scalar(x).unwrap())
                .collect::<Vec<_>>()
                .join(", ")
        )),
        _ => None,
    }
}

fn text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        text(x, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        text(x, indent + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits_and_round_trip() {
        let xs = [5.0 / 12.0, 0.1, -1e-300, 0.0, 1.0, f64::MAX];
        let s = to_json(&xs).unwrap();
        assert!(
            s.starts_with("[4.1666666666666669e-1,1.0000000000000001e-1,"),
            "{s}"
        );
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, xs);
        assert_eq!(to_json(&(3usize, f64::NAN)).unwrap(), "[3,null]");
    }

    #[test]
    fn text_rendering() {
        let v = serde_json::json!({"a": 1, "b": {"c": [1.5, 2.0]}, "d": [{"e": true}]});
        let t = render(&v, Format::Text).unwrap();
        assert!(
            t.contains("a: 1\n") && t.contains("  c: [1.5000000000000000e0, 2.0000000000000000e0]")
        );
        assert!(t.contains("-\n    e: true"));
    }
}
