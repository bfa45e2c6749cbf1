//! Scenario documents: strict JSON ingestion, validation, evaluation,
//! role comparison and parameter sweeps.

mod compare;
mod evaluate;
mod params;
mod sweep;

use std::collections::{BTreeMap, HashSet};

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::currency::Currency;
use crate::economics::EconomicAssumptions;
use crate::error::{Error, Result};
use crate::model::{CoolingProfile, EnergyTariff, HardwareProfile, PersonnelProfile, ServerPowerProfile};
use crate::serde_decimal;
use crate::utilization::{self, AccessVolume, RoleWorkloadProfile, SecurityLevel};

pub use compare::{compare, ComparisonSummary};
pub use evaluate::{evaluate, Diagnostic, EvaluationReport, GranularCosts, OutcomeSource, RoleReport};
pub use params::{apply_override, apply_overrides, sweepable_parameters, ParamKind, ParameterInfo};
pub use sweep::{sweep, SweepMetric, SweepPoint, SweepResult, SweepSpec};

/// Name of the bundled case-study scenario.
pub const CALLCENTER_NEVADA: &str = "callcenter-nevada";

const CALLCENTER_NEVADA_JSON: &str = include_str!("../../../../scenarios/callcenter-nevada.json");

/// Scenarios compiled into the library, as `(name, document)` pairs.
pub fn bundled_scenarios() -> &'static [(&'static str, &'static str)] {
    &[(CALLCENTER_NEVADA, CALLCENTER_NEVADA_JSON)]
}

pub fn bundled_scenario(name: &str) -> Result<Scenario> {
    let (_, doc) =
        bundled_scenarios().iter().find(|(n, _)| *n == name).ok_or_else(|| Error::UnknownScenario(name.to_string()))?;
    load_scenario(doc)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// Free-form provenance notes keyed by dotted field path.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
    pub facility: FacilitySpec,
    pub roles: Vec<RoleSpec>,
    pub economics: EconomicAssumptions,
    /// Published role-to-role figures to check against; never fed into the model.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reference_comparisons: Vec<ReferenceComparison>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacilitySpec {
    pub servers_total: u64,
    pub servers_per_rack: u64,
    pub tariff: EnergyTariff,
    pub power: ServerPowerProfile,
    pub cooling: CoolingProfile,
    pub hardware: HardwareProfile,
    pub personnel: PersonnelProfile,
}

impl FacilitySpec {
    pub fn full_racks(&self) -> u64 {
        self.servers_total / self.servers_per_rack
    }

    pub fn partial_rack_servers(&self) -> u64 {
        self.servers_total % self.servers_per_rack
    }
}

/// One RBAC role as written in a scenario document.
///
/// Session time is given either directly or as an observed hourly throughput
/// at the target load, from which it is calibrated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoleSpec {
    pub name: String,
    pub security_level: SecurityLevel,
    #[serde(default)]
    pub security_mechanism: String,
    #[serde(default, with = "serde_decimal::option", skip_serializing_if = "Option::is_none")]
    pub session_busy_seconds: Option<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibrated_users_per_hour: Option<u64>,
    /// Load at which `calibrated_users_per_hour` was observed; defaults to `target_load`.
    #[serde(default, with = "serde_decimal::option", skip_serializing_if = "Option::is_none")]
    pub calibration_load: Option<Decimal>,
    #[serde(with = "serde_decimal")]
    pub target_load: Decimal,
    /// Overrides `facility.power.cpu_incremental_annual_cost` for this role.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpu_incremental_annual_cost: Option<Currency>,
    /// Yearly outcome to use instead of the cost-model total.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome_override: Option<Currency>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub access: Vec<AccessVolume>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<RoleReference>,
}

/// Published per-role figures used only for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoleReference {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_year_profit: Option<Currency>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facility_energy_cost: Option<Currency>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceComparison {
    pub role_a: String,
    pub role_b: String,
    /// Claimed increase in users when moving from `role_b` to `role_a`, in percent.
    #[serde(with = "serde_decimal")]
    pub users_change_percent: Decimal,
}

impl RoleSpec {
    /// Resolves the document form into a workload profile.
    pub fn profile(&self) -> Result<RoleWorkloadProfile> {
        let session_busy_seconds = match (self.session_busy_seconds, self.calibrated_users_per_hour) {
            (Some(s), None) => s,
            (None, Some(users)) => utilization::calibrate_session_time(
                users,
                self.calibration_load.unwrap_or(self.target_load),
            )
            .map_err(|e| match e {
                Error::Validation { field, reason } if field == "target_load" && self.calibration_load.is_some() => {
                    Error::validation("calibration_load", reason)
                }
                other => other,
            })?,
            _ => {
                return Err(Error::validation(
                    "session_busy_seconds",
                    "exactly one of session_busy_seconds or calibrated_users_per_hour is required",
                ))
            }
        };
        let profile = RoleWorkloadProfile {
            role_name: self.name.clone(),
            security_level: self.security_level,
            security_mechanism: self.security_mechanism.clone(),
            session_busy_seconds,
            target_load: self.target_load,
            access_types_and_data_sizes: self.access.clone(),
        };
        profile.validate()?;
        Ok(profile)
    }

    /// Effective server power profile: the facility baseline plus this role's CPU top-up.
    pub fn power_profile(&self, facility: &FacilitySpec) -> ServerPowerProfile {
        ServerPowerProfile {
            avg_power_kw: facility.power.avg_power_kw,
            cpu_incremental_annual_cost: self
                .cpu_incremental_annual_cost
                .unwrap_or(facility.power.cpu_incremental_annual_cost),
        }
    }

    fn validate(&self, at: &str) -> Result<()> {
        let prefixed = |e: Error| match e {
            Error::Validation { field, reason } => Error::validation(format!("{at}.{field}"), reason),
            other => other,
        };
        self.profile().map_err(prefixed)?;
        if self.calibration_load.is_some() && self.calibrated_users_per_hour.is_none() {
            return Err(Error::validation(
                format!("{at}.calibration_load"),
                "only meaningful together with calibrated_users_per_hour",
            ));
        }
        if let Some(cost) = self.cpu_incremental_annual_cost {
            if cost.is_negative() {
                return Err(Error::validation(format!("{at}.cpu_incremental_annual_cost"), "must be >= 0"));
            }
        }
        if let Some(outcome) = self.outcome_override {
            if outcome.is_negative() || outcome.is_zero() {
                return Err(Error::validation(format!("{at}.outcome_override"), "must be > 0"));
            }
        }
        for (i, a) in self.access.iter().enumerate() {
            if a.megabytes < Decimal::ZERO {
                return Err(Error::validation(format!("{at}.access.{i}.megabytes"), "must be >= 0"));
            }
        }
        Ok(())
    }
}

impl Scenario {
    pub fn role(&self, name: &str) -> Result<&RoleSpec> {
        self.roles.iter().find(|r| r.name == name).ok_or_else(|| Error::UnknownRole(name.to_string()))
    }

    /// Checks every invariant, reporting the first violation with its dotted field path.
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::validation("name", "must be non-empty"));
        }
        let f = &self.facility;
        if f.servers_total < 1 {
            return Err(Error::validation("facility.servers_total", "must be >= 1"));
        }
        if f.servers_per_rack < 1 {
            return Err(Error::validation("facility.servers_per_rack", "must be >= 1"));
        }
        f.tariff.validate("facility.tariff")?;
        f.power.validate("facility.power")?;
        f.cooling.validate("facility.cooling")?;
        f.hardware.validate("facility.hardware")?;
        f.personnel.validate("facility.personnel")?;
        self.economics.validate("economics")?;

        if self.roles.is_empty() {
            return Err(Error::validation("roles", "at least one role is required"));
        }
        let mut seen = HashSet::new();
        for (i, role) in self.roles.iter().enumerate() {
            if role.name.trim().is_empty() {
                return Err(Error::validation(format!("roles.{i}.name"), "must be non-empty"));
            }
            if !seen.insert(role.name.as_str()) {
                return Err(Error::validation(format!("roles.{i}.name"), format!("duplicate role `{}`", role.name)));
            }
            role.validate(&format!("roles.{}", role.name))?;
        }
        for (i, c) in self.reference_comparisons.iter().enumerate() {
            for name in [&c.role_a, &c.role_b] {
                if !seen.contains(name.as_str()) {
                    return Err(Error::validation(
                        format!("reference_comparisons.{i}"),
                        format!("unknown role `{name}`"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Canonical JSON form, suitable for reloading with [`load_scenario`].
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

/// Parses and validates a scenario document. Unknown keys are rejected.
pub fn load_scenario(document: &str) -> Result<Scenario> {
    let mut de = serde_json::Deserializer::from_str(document);
    let scenario: Scenario = serde_path_to_error::deserialize(&mut de).map_err(parse_error)?;
    de.end().map_err(|e| Error::Parse { path: None, message: e.to_string() })?;
    scenario.validate()?;
    Ok(scenario)
}

/// Same as [`load_scenario`] for an already-parsed JSON value.
pub fn load_scenario_value(value: serde_json::Value) -> Result<Scenario> {
    let scenario: Scenario = serde_path_to_error::deserialize(value).map_err(parse_error)?;
    scenario.validate()?;
    Ok(scenario)
}

fn parse_error<E: std::fmt::Display>(err: serde_path_to_error::Error<E>) -> Error {
    let path = err.path().to_string();
    Error::Parse { path: (path != ".").then_some(path), message: err.inner().to_string() }
}
