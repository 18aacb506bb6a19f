pub mod experiment;
pub mod generate;
pub mod multiplex;
pub mod solve;
pub mod spectrum;

use std::collections::BTreeMap;

/// Diagnostics serialize through a sorted map so the JSON bytes are stable.
pub fn diagnostics_json(extra: &BTreeMap<String, f64>) -> String {
    let mut out = String::from("{\n");
    let mut first = true;
    for (k, v) in extra {
        if !first {
            out.push_str(",\n");
        }
        first = false;
        out.push_str(&format!("  \"{k}\": {v}"));
    }
    out.push_str("\n}\n");
    out
}
