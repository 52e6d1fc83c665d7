//! Fixed-precision float formatting shared by the text outputs.

/// Formats `v` with 12 significant digits in scientific notation.
///
/// Output is independent of platform and locale, so CSV and JSON files
/// written through this helper are byte-stable.
pub fn sig12(v: f64) -> String {
    if v == 0.0 {
        // avoid "-0.00000000000e0"
        return "0.00000000000e0".to_string();
    }
    format!("{:.11e}", v)
}

/// Rounds `v` to the value [`sig12`] prints, for JSON output.
pub fn round12(v: f64) -> f64 {
    sig12(v).parse().unwrap_or(v)
}

/// Rounds every non-integer number in a JSON tree with [`round12`].
pub fn round_json(value: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match value {
        Value::Number(n) if n.is_f64() => {
            let v = n.as_f64().expect("f64 number");
            serde_json::Number::from_f64(round12(v)).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}
