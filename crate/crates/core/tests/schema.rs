//! The published scenario schema and the strict loader must agree.

use dc_tco_core::scenario::{apply_overrides, CALLCENTER_NEVADA};
use dc_tco_core::{bundled_scenario, load_scenario_value, Decimal};
use serde_json::{json, Value};

const SCHEMA: &str = include_str!("../../../scenarios/schema.json");
const FIXTURE: &str = include_str!("../../../scenarios/callcenter-nevada.json");

fn validator() -> jsonschema::Validator {
    jsonschema::validator_for(&serde_json::from_str(SCHEMA).unwrap()).unwrap()
}

fn fixture() -> Value {
    serde_json::from_str(FIXTURE).unwrap()
}

fn assert_both_reject(doc: Value, what: &str) {
    assert!(!validator().is_valid(&doc), "schema accepted {what}");
    assert!(load_scenario_value(doc).is_err(), "loader accepted {what}");
}

#[test]
fn fixture_conforms() {
    let v = validator();
    let errors: Vec<String> = v.iter_errors(&fixture()).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn serialized_scenarios_conform() {
    let v = validator();
    let base = bundled_scenario(CALLCENTER_NEVADA).unwrap();
    let variants = [
        base.clone(),
        apply_overrides(&base, &[("roles.role2.session_busy_seconds".into(), Decimal::new(5, 1))]).unwrap(),
        apply_overrides(&base, &[("roles.*.target_load".into(), Decimal::new(45, 2))]).unwrap(),
    ];
    for s in variants {
        let doc: Value = serde_json::from_str(&s.to_json()).unwrap();
        let errors: Vec<String> = v.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{errors:?}");
    }
}

#[test]
fn unknown_keys() {
    let mut doc = fixture();
    doc["facility"]["tariff"]["surprise"] = json!(1);
    assert_both_reject(doc, "an unknown tariff key");
    let mut doc = fixture();
    doc["extra"] = json!(true);
    assert_both_reject(doc, "an unknown top-level key");
}

#[test]
fn currency_must_be_a_string() {
    let mut doc = fixture();
    doc["facility"]["tariff"]["price_per_kwh"] = json!(0.0756);
    assert_both_reject(doc, "a numeric currency");
}

#[test]
fn structural_invariants() {
    let mut doc = fixture();
    doc["roles"] = json!([]);
    assert_both_reject(doc, "zero roles");

    let mut doc = fixture();
    doc["roles"][0]["session_busy_seconds"] = json!("0.28");
    assert_both_reject(doc, "two session sources");

    let mut doc = fixture();
    doc["roles"][0].as_object_mut().unwrap().remove("calibrated_users_per_hour");
    assert_both_reject(doc, "no session source");

    let mut doc = fixture();
    doc["roles"][1]["security_level"] = json!("extreme");
    assert_both_reject(doc, "an unknown security level");

    let mut doc = fixture();
    doc["facility"]["personnel"]["avg_monthly_salary"] = json!("-1");
    assert_both_reject(doc, "a negative salary");

    let mut doc = fixture();
    doc["facility"]["cooling"] = json!({"mode": "btu-rated"});
    assert_both_reject(doc, "btu-rated cooling without a rating");

    let mut doc = fixture();
    doc["facility"]["servers_total"] = json!(0);
    assert_both_reject(doc, "zero servers");
}
