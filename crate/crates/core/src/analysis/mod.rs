//! Measurements of a run against the predicted trajectories, plus the
//! independence-number and certificate machinery.
//!
//! The analysis exponent `ε` defaults to [`DEFAULT_EPSILON`]. Every audit
//! reports both the raw measured value and the `ε`-dependent bound.
//! Logarithms are natural throughout.

pub mod audit;
pub mod certificate;
pub mod curves;
pub mod fit;
pub mod independence;
pub mod rectangles;
pub mod trajectory;

/// Default analysis exponent `ε`.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// Rounds to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("formatted float parses")
}

/// Formats with 9 significant digits, shortest representation.
pub fn fmt_sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    format!("{}", round_sig(x, 9))
}

/// Pretty JSON with every floating-point number rounded to 9 significant
/// digits; non-finite numbers become `null`.
pub fn to_stable_json<T: serde::Serialize>(value: &T) -> serde_json::Result<String> {
    fn round(v: &mut serde_json::Value) {
        match v {
            serde_json::Value::Number(num) if num.is_f64() => {
                let x = num.as_f64().expect("f64 number");
                *v = serde_json::Number::from_f64(round_sig(x, 9))
                    .map_or(serde_json::Value::Null, serde_json::Value::Number);
            }
            serde_json::Value::Array(items) => items.iter_mut().for_each(round),
            serde_json::Value::Object(map) => map.values_mut().for_each(round),
            _ => {}
        }
    }
    let mut v = serde_json::to_value(value)?;
    round(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}
