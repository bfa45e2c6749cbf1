use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::evaluate::{evaluate, RoleReport};
use super::params::{apply_override, check_path};
use super::Scenario;
use crate::error::{Error, ErrorRecord, Result};
use crate::serde_decimal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMetric {
    /// First-year facility total cost.
    TotalCost,
    /// First-year facility power delivery cost.
    PowerCost,
    /// First-year facility cooling cost.
    CoolingCost,
    /// First-year profit.
    Profit,
    /// First-year ROI as a fraction.
    Roi,
    CumulativeProfit,
    CumulativeRoi,
    /// Facility users per year.
    UsersPerYear,
}

impl SweepMetric {
    pub const ALL: [SweepMetric; 8] = [
        SweepMetric::TotalCost,
        SweepMetric::PowerCost,
        SweepMetric::CoolingCost,
        SweepMetric::Profit,
        SweepMetric::Roi,
        SweepMetric::CumulativeProfit,
        SweepMetric::CumulativeRoi,
        SweepMetric::UsersPerYear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepMetric::TotalCost => "total_cost",
            SweepMetric::PowerCost => "power_cost",
            SweepMetric::CoolingCost => "cooling_cost",
            SweepMetric::Profit => "profit",
            SweepMetric::Roi => "roi",
            SweepMetric::CumulativeProfit => "cumulative_profit",
            SweepMetric::CumulativeRoi => "cumulative_roi",
            SweepMetric::UsersPerYear => "users_per_year",
        }
    }

    pub fn extract(self, role: &RoleReport) -> Decimal {
        let first = role.projection.first_year();
        match self {
            SweepMetric::TotalCost => role.costs.facility.total.amount(),
            SweepMetric::PowerCost => role.costs.facility.power.amount(),
            SweepMetric::CoolingCost => role.costs.facility.cooling.amount(),
            SweepMetric::Profit => first.profit.amount(),
            SweepMetric::Roi => first.roi,
            SweepMetric::CumulativeProfit => role.projection.cumulative_profit.amount(),
            SweepMetric::CumulativeRoi => role.projection.cumulative_roi,
            SweepMetric::UsersPerYear => Decimal::from(role.users_per_year_facility),
        }
    }
}

impl fmt::Display for SweepMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SweepMetric::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<_> = SweepMetric::ALL.iter().map(|m| m.name()).collect();
            format!("unknown metric `{s}` (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter_path: String,
    #[serde(with = "serde_decimal::vec")]
    pub values: Vec<Decimal>,
    pub metric: SweepMetric,
    /// Role whose metric is reported; defaults to the first role.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepPoint {
    #[serde(with = "serde_decimal")]
    pub value: Decimal,
    #[serde(default, with = "serde_decimal::option", skip_serializing_if = "Option::is_none")]
    pub metric: Option<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter_path: String,
    pub metric: SweepMetric,
    pub role: String,
    pub points: Vec<SweepPoint>,
}

/// Evaluates `scenario` once per value with the parameter overridden.
///
/// Points run in parallel and come back in input order. A value that breaks
/// an invariant yields an error entry for that point only.
pub fn sweep(scenario: &Scenario, spec: &SweepSpec) -> Result<SweepResult> {
    if spec.values.is_empty() {
        return Err(Error::validation("values", "values must be non-empty"));
    }
    check_path(scenario, &spec.parameter_path)?;
    let role = match &spec.role {
        Some(name) => scenario.role(name)?.name.clone(),
        None => scenario
            .roles
            .first()
            .ok_or_else(|| Error::validation("roles", "at least one role is required"))?
            .name
            .clone(),
    };

    let points = spec
        .values
        .par_iter()
        .map(|&value| {
            let outcome = apply_override(scenario, &spec.parameter_path, value)
                .and_then(|mutated| evaluate(&mutated))
                .and_then(|report| report.role(&role).map(|r| spec.metric.extract(r)));
            match outcome {
                Ok(metric) => SweepPoint { value, metric: Some(metric), error: None },
                Err(err) => SweepPoint { value, metric: None, error: Some(err.to_record()) },
            }
        })
        .collect();

    Ok(SweepResult { parameter_path: spec.parameter_path.clone(), metric: spec.metric, role, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ErrorKind;
    use crate::scenario::{bundled_scenario, CALLCENTER_NEVADA};

    fn d(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    fn spec(path: &str, values: &[&str], metric: SweepMetric, role: Option<&str>) -> SweepSpec {
        SweepSpec {
            parameter_path: path.into(),
            values: values.iter().map(|v| d(v)).collect(),
            metric,
            role: role.map(Into::into),
        }
    }

    #[test]
    fn tariff_doubling_doubles_power() {
        let s = bundled_scenario(CALLCENTER_NEVADA).unwrap();
        // Without the fixed CPU top-up the facility power cost is pure tariff energy.
        let s = apply_override(&s, "roles.*.cpu_incremental_annual_cost", Decimal::ZERO).unwrap();
        let r = sweep(&s, &spec("facility.tariff.price_per_kwh", &["0.0756", "0.1512"], SweepMetric::PowerCost, None))
            .unwrap();
        let a = r.points[0].metric.unwrap();
        let b = r.points[1].metric.unwrap();
        assert_eq!(b, a * Decimal::TWO);
    }

    #[test]
    fn load_halving_halves_users() {
        let s = bundled_scenario(CALLCENTER_NEVADA).unwrap();
        let s = apply_override(&s, "roles.role3.session_busy_seconds", d("0.93264")).unwrap();
        let r = sweep(&s, &spec("roles.role3.target_load", &["0.45", "0.9"], SweepMetric::UsersPerYear, Some("role3")))
            .unwrap();
        let low = r.points[0].metric.unwrap();
        let high = r.points[1].metric.unwrap();
        // Flooring may cost at most one user per hour per server at the lower load.
        let slack = Decimal::from(2 * 8760 * 520);
        assert!((high - low * Decimal::TWO).abs() <= slack, "{low} {high}");
    }

    #[test]
    fn servers_total_scales_users() {
        let s = bundled_scenario(CALLCENTER_NEVADA).unwrap();
        let r = sweep(&s, &spec("facility.servers_total", &["13", "520"], SweepMetric::UsersPerYear, Some("role3")))
            .unwrap();
        assert_eq!(r.points[0].metric, Some(Decimal::from(395_619_120u64)));
        assert_eq!(r.points[1].metric, Some(Decimal::from(15_824_764_800u64)));
    }

    #[test]
    fn bad_points_do_not_stop_the_sweep() {
        let s = bundled_scenario(CALLCENTER_NEVADA).unwrap();
        let r = sweep(&s, &spec("roles.role1.target_load", &["0.5", "1.3", "0.9"], SweepMetric::Profit, Some("role1")))
            .unwrap();
        assert!(r.points[0].metric.is_some());
        let err = r.points[1].error.as_ref().unwrap();
        assert_eq!(err.code, ErrorKind::Unprocessable);
        assert_eq!(err.field_path.as_deref(), Some("roles.role1.target_load"));
        assert!(r.points[2].metric.is_some());
        assert_eq!(r.points.iter().map(|p| p.value).collect::<Vec<_>>(), vec![d("0.5"), d("1.3"), d("0.9")]);
    }

    #[test]
    fn whole_sweep_errors() {
        let s = bundled_scenario(CALLCENTER_NEVADA).unwrap();
        let err = sweep(&s, &spec("facility.tariff.price_per_kwh", &[], SweepMetric::TotalCost, None)).unwrap_err();
        assert!(err.to_string().contains("values must be non-empty"));
        let err = sweep(&s, &spec("facility.bogus", &["1"], SweepMetric::TotalCost, None)).unwrap_err();
        assert!(matches!(err, Error::InvalidPath { .. }));
        let err =
            sweep(&s, &spec("facility.servers_total", &["1"], SweepMetric::TotalCost, Some("nobody"))).unwrap_err();
        assert!(matches!(err, Error::UnknownRole(_)));
    }

    #[test]
    fn singleton_matches_evaluate() {
        let s = bundled_scenario(CALLCENTER_NEVADA).unwrap();
        let r = sweep(&s, &spec("economics.price_per_contact", &["2.5"], SweepMetric::Profit, Some("role2"))).unwrap();
        let mutated = apply_override(&s, "economics.price_per_contact", d("2.5")).unwrap();
        let report = evaluate(&mutated).unwrap();
        assert_eq!(r.points[0].metric, Some(report.role("role2").unwrap().projection.first_year().profit.amount()));
    }

    #[test]
    fn metric_names_round_trip() {
        for m in SweepMetric::ALL {
            assert_eq!(m.name().parse::<SweepMetric>().unwrap(), m);
            assert_eq!(serde_json::to_value(m).unwrap(), serde_json::Value::String(m.name().into()));
        }
        assert!("nope".parse::<SweepMetric>().is_err());
    }
}
