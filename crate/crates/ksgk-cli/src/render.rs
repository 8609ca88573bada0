//! Human-readable rendering of a result document.

use serde_json::Value;

const MAX_KEYS: usize = 24;
const MAX_DEPTH: usize = 4;
const MAX_CELL: usize = 96;

/// Dotted-key rows, two columns. Large maps and arrays are summarised.
pub fn table(doc: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", doc, 0, &mut rows);
    let w = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<w$}  {v}\n")).collect()
}

fn flatten(prefix: &str, v: &Value, depth: usize, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) if depth < MAX_DEPTH && m.len() <= MAX_KEYS => {
            for (k, x) in m {
                flatten(&key(k), x, depth + 1, rows);
            }
        }
        Value::Object(m) => rows.push((prefix.to_string(), format!("{{{} entries}}", m.len()))),
        _ => rows.push((prefix.to_string(), cell(v))),
    }
}

fn cell(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Array(a) if a.iter().all(|x| !x.is_array() && !x.is_object()) => {
            a.iter().map(cell).collect::<Vec<_>>().join(", ")
        }
        _ => v.to_string(),
    };
    if s.chars().count() > MAX_CELL {
        let cut: String = s.chars().take(MAX_CELL).collect();
        format!("{cut}... ({} chars)", s.chars().count())
    } else {
        s
    }
}
