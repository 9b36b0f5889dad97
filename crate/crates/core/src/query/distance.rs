use crate::relation::Value;

/// Normalized distance in [0, 1]: edit distance over the longer length for
/// text, `|a - b| / max(|a|, |b|)` for numbers. Anything involving null, or
/// mixing text with numbers, is 1.
pub fn value_distance(a: &Value, b: &Value) -> f64 {
    if a.is_null() || b.is_null() {
        return 1.0;
    }
    if a == b {
        return 0.0;
    }
    match (a, b) {
        (Value::Text(x), Value::Text(y)) => {
            let longest = x.chars().count().max(y.chars().count());
            strsim::levenshtein(x, y) as f64 / longest as f64
        }
        _ => match (a.as_f64(), b.as_f64()) {
            (Some(x), Some(y)) => {
                let scale = x.abs().max(y.abs());
                if scale == 0.0 {
                    0.0
                } else {
                    ((x - y).abs() / scale).min(1.0)
                }
            }
            _ => 1.0,
        },
    }
}
