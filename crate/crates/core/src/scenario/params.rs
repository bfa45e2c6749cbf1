//! Dotted-path overrides of numeric scenario fields.
//!
//! Paths mirror the document layout, e.g. `facility.tariff.price_per_kwh`.
//! Role fields take a selector segment: a role name, a zero-based index, or
//! `*` for every role (`roles.role3.target_load`, `roles.*.target_load`).

use rust_decimal::prelude::ToPrimitive;
use rust_decimal::Decimal;
use serde::Serialize;
use serde_json::Value;

use super::{load_scenario_value, Scenario};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamKind {
    Currency,
    Decimal,
    Integer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParameterInfo {
    pub path: &'static str,
    pub kind: ParamKind,
    pub description: &'static str,
}

const fn param(path: &'static str, kind: ParamKind, description: &'static str) -> ParameterInfo {
    ParameterInfo { path, kind, description }
}

static PARAMETERS: &[ParameterInfo] = &[
    param("facility.servers_total", ParamKind::Integer, "servers in the facility"),
    param("facility.servers_per_rack", ParamKind::Integer, "servers per rack"),
    param("facility.tariff.price_per_kwh", ParamKind::Currency, "electricity price per kWh"),
    param("facility.tariff.hours_per_day", ParamKind::Decimal, "operating hours per day"),
    param("facility.tariff.days", ParamKind::Integer, "operating days per costing year"),
    param("facility.power.avg_power_kw", ParamKind::Decimal, "average server draw in kW"),
    param("facility.power.cpu_incremental_annual_cost", ParamKind::Currency, "baseline yearly CPU energy top-up"),
    param("facility.cooling.btu_per_hour", ParamKind::Decimal, "cooling rating in BTU/h (btu-rated mode)"),
    param("facility.hardware.server_purchase_cost", ParamKind::Currency, "purchase price per server"),
    param("facility.hardware.server_lifetime_years", ParamKind::Integer, "server depreciation lifetime"),
    param("facility.hardware.annual_licensing_cost", ParamKind::Currency, "yearly software licensing per server"),
    param("facility.personnel.it_staff", ParamKind::Integer, "IT staff headcount"),
    param("facility.personnel.workers", ParamKind::Integer, "worker headcount"),
    param("facility.personnel.housekeeping_facilities", ParamKind::Integer, "housekeeping and facilities headcount"),
    param("facility.personnel.avg_monthly_salary", ParamKind::Currency, "average monthly salary"),
    param("economics.price_per_contact", ParamKind::Currency, "income per served user"),
    param("economics.analysis_years", ParamKind::Integer, "projection horizon in years"),
    param("roles.*.target_load", ParamKind::Decimal, "target CPU load fraction"),
    param("roles.*.session_busy_seconds", ParamKind::Decimal, "CPU seconds per user session"),
    param("roles.*.calibrated_users_per_hour", ParamKind::Integer, "observed users per hour at the calibration load"),
    param("roles.*.calibration_load", ParamKind::Decimal, "load at which the hourly throughput was observed"),
    param("roles.*.cpu_incremental_annual_cost", ParamKind::Currency, "role yearly CPU energy top-up"),
    param("roles.*.outcome_override", ParamKind::Currency, "yearly outcome replacing the cost model"),
];

/// Every numeric field that can be overridden or swept.
pub fn sweepable_parameters() -> &'static [ParameterInfo] {
    PARAMETERS
}

enum Target<'a> {
    Field { segments: Vec<&'a str> },
    Role { selector: &'a str, field: &'a str },
}

fn resolve(path: &str) -> Result<(Target<'_>, ParamKind)> {
    let invalid = |reason: &str| Error::InvalidPath { path: path.to_string(), reason: reason.to_string() };
    let segments: Vec<&str> = path.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(invalid("empty path segment"));
    }
    let (target, pattern) = match segments.as_slice() {
        ["roles", selector, field] => (Target::Role { selector, field }, format!("roles.*.{field}")),
        _ => (Target::Field { segments: segments.clone() }, path.to_string()),
    };
    let info = PARAMETERS.iter().find(|p| p.path == pattern).ok_or_else(|| invalid("not a sweepable numeric field"))?;
    Ok((target, info.kind))
}

/// Checks that `path` names a sweepable field of `scenario`, including the role selector.
pub(crate) fn check_path(scenario: &Scenario, path: &str) -> Result<()> {
    let (target, _) = resolve(path)?;
    if let Target::Role { selector, .. } = target {
        role_indices(
            scenario.roles.len(),
            &scenario.roles.iter().map(|r| r.name.as_str()).collect::<Vec<_>>(),
            selector,
        )
        .map_err(|reason| Error::InvalidPath { path: path.to_string(), reason })?;
    }
    Ok(())
}

fn role_indices(count: usize, names: &[&str], selector: &str) -> std::result::Result<Vec<usize>, String> {
    if selector == "*" {
        return Ok((0..count).collect());
    }
    if let Some(i) = names.iter().position(|n| *n == selector) {
        return Ok(vec![i]);
    }
    match selector.parse::<usize>() {
        Ok(i) if i < count => Ok(vec![i]),
        _ => Err(format!("no role `{selector}`")),
    }
}

fn encode(path: &str, kind: ParamKind, value: Decimal) -> Result<Value> {
    match kind {
        ParamKind::Currency | ParamKind::Decimal => Ok(Value::String(value.normalize().to_string())),
        ParamKind::Integer => {
            let n = (value.fract().is_zero())
                .then(|| value.to_u64())
                .flatten()
                .ok_or_else(|| Error::validation(path, format!("{value} is not a non-negative integer")))?;
            Ok(Value::from(n))
        }
    }
}

/// Returns a copy of `scenario` with the field at `path` set to `value`, revalidated.
pub fn apply_override(scenario: &Scenario, path: &str, value: Decimal) -> Result<Scenario> {
    apply_overrides(scenario, &[(path.to_string(), value)])
}

/// Applies several overrides in order and validates the result once.
pub fn apply_overrides(scenario: &Scenario, overrides: &[(String, Decimal)]) -> Result<Scenario> {
    let mut doc = serde_json::to_value(scenario).expect("scenario serializes");
    let names: Vec<&str> = scenario.roles.iter().map(|r| r.name.as_str()).collect();
    for (path, value) in overrides {
        set_field(&mut doc, &names, path, *value)?;
    }
    load_scenario_value(doc)
}

fn set_field(doc: &mut Value, role_names: &[&str], path: &str, value: Decimal) -> Result<()> {
    let (target, kind) = resolve(path)?;
    let encoded = encode(path, kind, value)?;
    match target {
        Target::Field { segments } => {
            let (last, parents) = segments.split_last().expect("non-empty path");
            let mut node = doc;
            for seg in parents {
                node = node
                    .get_mut(*seg)
                    .ok_or_else(|| Error::InvalidPath { path: path.to_string(), reason: format!("missing `{seg}`") })?;
            }
            node.as_object_mut()
                .ok_or_else(|| Error::InvalidPath { path: path.to_string(), reason: "not an object".into() })?
                .insert(last.to_string(), encoded);
        }
        Target::Role { selector, field } => {
            let indices = role_indices(role_names.len(), role_names, selector)
                .map_err(|reason| Error::InvalidPath { path: path.to_string(), reason })?;
            for i in indices {
                let role = doc["roles"][i].as_object_mut().expect("role is an object");
                // Session time is given one way or the other, never both.
                match field {
                    "session_busy_seconds" => {
                        role.remove("calibrated_users_per_hour");
                        role.remove("calibration_load");
                    }
                    "calibrated_users_per_hour" => {
                        role.remove("session_busy_seconds");
                    }
                    // Moving the target load keeps the calibrated session time where it was observed.
                    "target_load"
                        if role.contains_key("calibrated_users_per_hour") && !role.contains_key("calibration_load") =>
                    {
                        let observed = role["target_load"].clone();
                        role.insert("calibration_load".into(), observed);
                    }
                    _ => {}
                }
                role.insert(field.to_string(), encoded.clone());
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::currency::Currency;
    use crate::scenario::{bundled_scenario, CALLCENTER_NEVADA};

    fn base() -> Scenario {
        bundled_scenario(CALLCENTER_NEVADA).unwrap()
    }

    #[test]
    fn sets_facility_field() {
        let s = apply_override(&base(), "facility.tariff.price_per_kwh", "0.1512".parse().unwrap()).unwrap();
        assert_eq!(s.facility.tariff.price_per_kwh, "0.1512".parse::<Currency>().unwrap());
        let s = apply_override(&base(), "facility.servers_total", Decimal::from(13)).unwrap();
        assert_eq!(s.facility.servers_total, 13);
    }

    #[test]
    fn role_selectors() {
        let half: Decimal = "0.45".parse().unwrap();
        let s = apply_override(&base(), "roles.role2.target_load", half).unwrap();
        assert_eq!(s.roles[1].target_load, half);
        assert_ne!(s.roles[0].target_load, half);
        let s = apply_override(&base(), "roles.0.target_load", half).unwrap();
        assert_eq!(s.roles[0].target_load, half);
        let s = apply_override(&base(), "roles.*.target_load", half).unwrap();
        assert!(s.roles.iter().all(|r| r.target_load == half));
        assert!(s.roles.iter().all(|r| r.calibration_load == Some("0.9".parse().unwrap())));
    }

    #[test]
    fn session_time_replaces_calibration() {
        let s = apply_override(&base(), "roles.role1.session_busy_seconds", "0.28".parse().unwrap()).unwrap();
        assert_eq!(s.roles[0].calibrated_users_per_hour, None);
        assert_eq!(s.roles[0].session_busy_seconds, Some("0.28".parse().unwrap()));
    }

    #[test]
    fn load_sweep_keeps_calibrated_session_time() {
        let users = |load: &str| {
            let s = apply_override(&base(), "roles.role1.target_load", load.parse().unwrap()).unwrap();
            let profile = s.roles[0].profile().unwrap();
            crate::utilization::users_at_load(&profile, Decimal::from(3600)).unwrap()
        };
        assert_eq!([users("0.3"), users("0.6"), users("0.9")], [3857, 7714, 11571]);
    }

    #[test]
    fn bad_paths() {
        for path in
            ["facility.tariff", "facility.nope", "name", "roles.role9.target_load", "roles.role1.name", "", "a..b"]
        {
            let err = apply_override(&base(), path, Decimal::ONE).unwrap_err();
            assert!(matches!(err, Error::InvalidPath { .. }), "{path}: {err}");
        }
    }

    #[test]
    fn invariant_violations_surface_as_validation() {
        let err = apply_override(&base(), "facility.personnel.avg_monthly_salary", Decimal::from(-5)).unwrap_err();
        assert_eq!(err.field_path(), Some("facility.personnel.avg_monthly_salary"));
        let err = apply_override(&base(), "facility.servers_total", "1.5".parse().unwrap()).unwrap_err();
        assert_eq!(err.field_path(), Some("facility.servers_total"));
    }

    #[test]
    fn several_overrides_validate_once() {
        let overrides = [
            ("facility.servers_per_rack".to_string(), Decimal::from(600)),
            ("facility.servers_total".to_string(), Decimal::from(600)),
        ];
        let s = apply_overrides(&base(), &overrides).unwrap();
        assert_eq!((s.facility.servers_total, s.facility.servers_per_rack), (600, 600));
    }

    #[test]
    fn original_is_untouched() {
        let b = base();
        let _ = apply_override(&b, "facility.servers_total", Decimal::from(13)).unwrap();
        assert_eq!(b.facility.servers_total, 520);
    }
}
