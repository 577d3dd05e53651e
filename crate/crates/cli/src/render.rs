//! Plain-text rendering of JSON reports.

use std::fmt::Write;

use serde_json::Value;

/// `e^{iπr}` written as `1`, `i`, `-1`, `-i` or `e^(iπ·r)`.
fn phase(exp: &str) -> String {
    match exp.strip_suffix("/1").unwrap_or(exp) {
        "0" => "1".into(),
        "1/2" => "i".into(),
        "1" => "-1".into(),
        "3/2" => "-i".into(),
        r => format!("e^(iπ·{r})"),
    }
}

fn inline(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Object(m) if m.len() == 1 && m.get("exp").is_some_and(Value::is_string) => {
            Some(phase(m["exp"].as_str().unwrap_or_default()))
        }
        Value::Array(xs) => {
            let parts: Option<Vec<String>> = xs.iter().map(inline).collect();
            parts.map(|p| format!("[{}]", p.join(", ")))
        }
        Value::Object(_) => None,
    }
}

fn block(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match inline(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}{k}: {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}{k}:");
                        block(out, x, indent + 1);
                    }
                }
            }
        }
        Value::Array(xs) => {
            for x in xs {
                match inline(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}-");
                        block(out, x, indent + 1);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", inline(other).unwrap_or_default());
        }
    }
}

pub fn text(report: &Value) -> String {
    let mut out = String::new();
    block(&mut out, report, 0);
    out
}
