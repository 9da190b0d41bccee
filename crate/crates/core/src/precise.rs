//! Fixed-width numeric serialization for traces and reports.
//!
//! Every real written by the crate goes through [`serialize`], which emits
//! exactly 17 significant digits so a trace read back from disk reproduces
//! the same `f64` bit patterns.

use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Formats `x` with 17 significant digits as a JSON number literal.
pub fn format(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn serialize<S: Serializer>(x: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return Err(S::Error::custom(format!("non-finite real {x}")));
    }
    let raw = RawValue::from_string(format(*x)).map_err(S::Error::custom)?;
    raw.serialize(serializer)
}

pub fn serialize_opt<S: Serializer>(x: &Option<f64>, serializer: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => serialize(v, serializer),
        None => serializer.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Wrap(#[serde(serialize_with = "serialize")] f64);

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            6.02214076e23,
            0.0,
            f64::MIN_POSITIVE,
        ] {
            let text = serde_json::to_string(&Wrap(x)).unwrap();
            let mantissa = text.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.replace('.', "").len(), 17, "{text}");
            let back: f64 = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{text}");
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(serde_json::to_string(&Wrap(f64::NAN)).is_err());
    }

    #[test]
    fn converts_into_value() {
        let v = serde_json::to_value(Wrap(0.5)).unwrap();
        assert_eq!(v.as_f64(), Some(0.5));
    }
}
