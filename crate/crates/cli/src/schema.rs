//! The scenario JSON schema shipped with the binary.

use std::sync::OnceLock;

use jsonschema::Validator;
use serde_json::Value;

pub const SCENARIO_SCHEMA: &str = include_str!("../schema/scenario.schema.json");

fn validator() -> &'static Validator {
    static V: OnceLock<Validator> = OnceLock::new();
    V.get_or_init(|| {
        let schema: Value = serde_json::from_str(SCENARIO_SCHEMA).expect("bundled schema is valid JSON");
        jsonschema::validator_for(&schema).expect("bundled schema compiles")
    })
}

/// First schema violation as `(JSON pointer, message)`.
pub fn validate(instance: &Value) -> Result<(), (String, String)> {
    match validator().iter_errors(instance).next() {
        None => Ok(()),
        Some(e) => {
            let ptr = e.instance_path().as_str().to_string();
            Err((if ptr.is_empty() { "/".into() } else { ptr }, e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_is_named() {
        let v: Value = serde_json::from_str(r#"{"generator": {"kind": "ray", "cout": 3}}"#).unwrap();
        let (ptr, msg) = validate(&v).unwrap_err();
        assert_eq!(ptr, "/generator");
        assert!(msg.contains("cout"), "{msg}");
    }

    #[test]
    fn minimal_scenario_passes() {
        let v: Value = serde_json::from_str(r#"{"seed": 1, "generator": {"kind": "ray", "count": 4}}"#).unwrap();
        assert!(validate(&v).is_ok());
    }
}
