//! Deterministic JSON: sorted keys, two-space indent, floats at 12
//! significant digits in `%g` style, and no negative zero.

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub inputs_digest: String,
    pub result: Value,
    pub tolerances: Map<String, Value>,
    pub version: String,
}

impl ReportEnvelope {
    pub fn render(&self) -> String {
        let value = serde_json::to_value(self).expect("envelope is plain data");
        let mut out = String::new();
        write_value(&value, 0, &mut out);
        out.push('\n');
        out
    }
}

/// SHA-256 over length-prefixed chunks, as lowercase hex.
pub fn digest(chunks: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for c in chunks {
        h.update((c.len() as u64).to_le_bytes());
        h.update(c);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn format_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        // non-finite values never reach here through serde_json, which maps them to null
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let sign = if negative { "-" } else { "" };

    if !(-5..12).contains(&exp) {
        let (lead, rest) = digits.split_at(1);
        let rest = rest.trim_end_matches('0');
        return if rest.is_empty() {
            format!("{sign}{lead}e{exp}")
        } else {
            format!("{sign}{lead}.{rest}e{exp}")
        };
    }
    let (int_part, frac_part) = if exp >= 0 {
        let split = exp as usize + 1;
        (digits[..split].to_string(), digits[split..].to_string())
    } else {
        ("0".to_string(), "0".repeat((-exp - 1) as usize) + &digits)
    };
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

fn indent(level: usize, out: &mut String) {
    out.extend(std::iter::repeat_n(' ', 2 * level));
}

fn write_value(v: &Value, level: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format_float(n.as_f64().expect("finite number")));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string escapes")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                indent(level + 1, out);
                write_value(item, level + 1, out);
                if k + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(level, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                indent(level + 1, out);
                out.push_str(&serde_json::to_string(key).expect("string escapes"));
                out.push_str(": ");
                write_value(&map[key.as_str()], level + 1, out);
                if k + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(level, out);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn float_formatting() {
        let cases = [
            (1.0, "1"),
            (-0.0, "0"),
            (0.5, "0.5"),
            (1.0 / 3.0, "0.333333333333"),
            (2.0 / 3.0, "0.666666666667"),
            (0.8112781244591328, "0.811278124459"),
            (123456.789, "123456.789"),
            (1e-5, "0.00001"),
            (1.5e-6, "1.5e-6"),
            (-2.5e-17, "-2.5e-17"),
            (1e12, "1e12"),
            (999999999999.9, "1e12"),
            (0.99999999999999, "1"),
        ];
        for (x, want) in cases {
            assert_eq!(format_float(x), want, "{x}");
        }
    }

    #[test]
    fn rendered_numbers_parse_back() {
        for x in [std::f64::consts::PI, -1e-300, 6.02214076e23, 0.1 + 0.2] {
            let back: f64 = format_float(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-11);
        }
    }

    #[test]
    fn keys_sorted_and_stable() {
        let env = ReportEnvelope {
            command: "x".into(),
            inputs_digest: digest(&[b"a"]),
            result: json!({"zeta": 1, "alpha": [0.25, -0.0], "mid": {"b": true, "a": null}}),
            tolerances: Map::new(),
            version: "0".into(),
        };
        let text = env.render();
        let a = text.find("\"alpha\"").unwrap();
        let m = text.find("\"mid\"").unwrap();
        let z = text.find("\"zeta\"").unwrap();
        assert!(a < m && m < z);
        assert!(text.contains("  0\n"));
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["result"]["alpha"][0], json!(0.25));
    }

    #[test]
    fn digest_separates_chunks() {
        assert_ne!(digest(&[b"ab", b"c"]), digest(&[b"a", b"bc"]));
        assert_eq!(digest(&[b""]).len(), 64);
    }
}
