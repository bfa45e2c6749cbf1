use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::{RoleSpec, Scenario};
use crate::currency::Currency;
use crate::economics::{self, FinancialProjection, RoiConvention};
use crate::error::{Error, Result};
use crate::model::{self, CostBreakdown, PeriodCost, MONTHS_PER_YEAR};
use crate::serde_decimal;
use crate::utilization::{self, SecurityLevel, SECONDS_PER_HOUR};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub scenario: String,
    pub servers_total: u64,
    pub servers_per_rack: u64,
    pub full_racks: u64,
    pub partial_rack_servers: u64,
    pub analysis_years: u32,
    pub roi_convention: RoiConvention,
    pub roles: Vec<RoleReport>,
    pub diagnostics: Vec<Diagnostic>,
}

impl EvaluationReport {
    pub fn role(&self, name: &str) -> Result<&RoleReport> {
        self.roles.iter().find(|r| r.name == name).ok_or_else(|| Error::UnknownRole(name.to_string()))
    }

    pub fn diagnostics_for<'a>(&'a self, role: &'a str) -> impl Iterator<Item = &'a Diagnostic> + 'a {
        self.diagnostics.iter().filter(move |d| d.role.as_deref() == Some(role))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleReport {
    pub name: String,
    pub security_level: SecurityLevel,
    pub security_mechanism: String,
    #[serde(with = "serde_decimal")]
    pub session_busy_seconds: Decimal,
    #[serde(with = "serde_decimal")]
    pub target_load: Decimal,
    /// Users one server handles per hour at the target load.
    pub users_per_hour: u64,
    #[serde(with = "serde_decimal")]
    pub idle_seconds_per_hour: Decimal,
    pub users_per_year_per_server: u64,
    pub users_per_year_facility: u64,
    #[serde(with = "serde_decimal")]
    pub energy_kwh_per_server: Decimal,
    /// First-year costs at each granularity.
    pub costs: GranularCosts,
    /// Facility cost for each analysis year.
    pub yearly_facility_costs: Vec<CostBreakdown>,
    pub outcome_source: OutcomeSource,
    pub projection: FinancialProjection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GranularCosts {
    pub server: CostBreakdown,
    pub rack: CostBreakdown,
    pub facility: CostBreakdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeSource {
    CostModel,
    Override,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub role: Option<String>,
    pub message: String,
    #[serde(default, with = "serde_decimal::option", skip_serializing_if = "Option::is_none")]
    pub value: Option<Decimal>,
}

impl Diagnostic {
    fn new(code: &str, role: Option<&str>, message: String, value: Option<Decimal>) -> Self {
        Diagnostic { code: code.to_string(), role: role.map(str::to_string), message, value }
    }
}

/// Runs the full pipeline for every role of `scenario`.
///
/// Each role is treated as an alternative facility-wide configuration: all
/// servers run that role's workload.
pub fn evaluate(scenario: &Scenario) -> Result<EvaluationReport> {
    scenario.validate()?;
    let facility = &scenario.facility;
    let mut diagnostics = Vec::new();
    if facility.partial_rack_servers() > 0 {
        diagnostics.push(Diagnostic::new(
            "partial-rack",
            None,
            format!(
                "{} servers fill {} rack(s) of {} with {} server(s) in a partial rack",
                facility.servers_total,
                facility.full_racks(),
                facility.servers_per_rack,
                facility.partial_rack_servers()
            ),
            Some(Decimal::from(facility.partial_rack_servers())),
        ));
    }

    let mut roles = Vec::with_capacity(scenario.roles.len());
    for spec in &scenario.roles {
        let report = evaluate_role(scenario, spec)?;
        role_diagnostics(scenario, spec, &report, &mut diagnostics);
        roles.push(report);
    }

    for reference in &scenario.reference_comparisons {
        let a = roles.iter().find(|r| r.name == reference.role_a);
        let b = roles.iter().find(|r| r.name == reference.role_b);
        if let (Some(a), Some(b)) = (a, b) {
            diagnostics.push(super::compare::reference_diagnostic(reference, a, b));
        }
    }

    Ok(EvaluationReport {
        scenario: scenario.name.clone(),
        servers_total: facility.servers_total,
        servers_per_rack: facility.servers_per_rack,
        full_racks: facility.full_racks(),
        partial_rack_servers: facility.partial_rack_servers(),
        analysis_years: scenario.economics.analysis_years,
        roi_convention: scenario.economics.roi_convention,
        roles,
        diagnostics,
    })
}

fn evaluate_role(scenario: &Scenario, spec: &RoleSpec) -> Result<RoleReport> {
    let facility = &scenario.facility;
    let profile = spec.profile()?;
    let users_per_hour = utilization::users_at_load(&profile, Decimal::from(SECONDS_PER_HOUR))?;
    let idle_seconds_per_hour = utilization::idle_seconds(&profile, users_per_hour)?;
    let users_per_year_per_server = utilization::annualize_users(users_per_hour)?;
    let users_per_year_facility = users_per_year_per_server
        .checked_mul(facility.servers_total)
        .ok_or(Error::Overflow("facility users per year"))?;

    let power = spec.power_profile(facility);
    let energy_kwh_per_server = model::energy_kwh(power.avg_power_kw, &facility.tariff)?;
    let it_power = model::power_cost(power.avg_power_kw, &facility.tariff)?
        .checked_add(power.cpu_incremental_annual_cost)
        .ok_or(Error::Overflow("power cost"))?;
    let cooling = model::cooling_cost(&facility.cooling, it_power, &facility.tariff)?;
    let personnel = model::personnel_cost(&facility.personnel, MONTHS_PER_YEAR)?;

    let years = scenario.economics.analysis_years;
    let mut server_years = Vec::with_capacity(years as usize);
    let mut yearly_facility_costs = Vec::with_capacity(years as usize);
    for year in 1..=years {
        let hw_sw = model::hardware_software_cost(&facility.hardware, year)?;
        let server = model::total_cost(
            PeriodCost::annual(it_power),
            PeriodCost::annual(cooling),
            PeriodCost::annual(hw_sw),
            PeriodCost::annual(Currency::ZERO),
        )?;
        yearly_facility_costs.push(server.scale_servers(facility.servers_total)?.with_personnel(personnel)?);
        server_years.push(server);
    }
    let server = server_years.swap_remove(0);
    let costs = GranularCosts {
        rack: server.scale_servers(facility.servers_per_rack)?,
        facility: yearly_facility_costs[0].clone(),
        server,
    };

    let income = economics::annual_income(users_per_year_facility, &scenario.economics)?;
    let incomes = vec![income; years as usize];
    let (outcome_source, outcomes) = match spec.outcome_override {
        Some(outcome) => (OutcomeSource::Override, vec![outcome; years as usize]),
        None => (OutcomeSource::CostModel, yearly_facility_costs.iter().map(|c| c.total).collect()),
    };
    let projection = economics::project_series(&incomes, &outcomes, scenario.economics.roi_convention)?;

    Ok(RoleReport {
        name: spec.name.clone(),
        security_level: spec.security_level,
        security_mechanism: spec.security_mechanism.clone(),
        session_busy_seconds: profile.session_busy_seconds,
        target_load: profile.target_load,
        users_per_hour,
        idle_seconds_per_hour,
        users_per_year_per_server,
        users_per_year_facility,
        energy_kwh_per_server,
        costs,
        yearly_facility_costs,
        outcome_source,
        projection,
    })
}

fn role_diagnostics(scenario: &Scenario, spec: &RoleSpec, report: &RoleReport, out: &mut Vec<Diagnostic>) {
    let role = Some(spec.name.as_str());
    let facility = &scenario.facility;

    if report.outcome_source == OutcomeSource::Override {
        let modelled = report.costs.facility.total;
        out.push(Diagnostic::new(
            "outcome-override",
            role,
            format!(
                "yearly outcome {} taken from the scenario; the cost model gives {} for year 1",
                report.projection.first_year().outcome,
                modelled
            ),
            Some(modelled.amount()),
        ));
    }

    let Some(reference) = &spec.reference else { return };

    if let Some(published) = reference.first_year_profit {
        let computed = report.projection.first_year().profit;
        let offset = published - computed;
        let purchase = facility.hardware.server_purchase_cost.checked_mul_int(facility.servers_total);
        let explanation = if offset.is_zero() {
            "matches".to_string()
        } else if Some(offset) == purchase {
            format!(
                "equals the facility hardware purchase ({} servers x {}), so the reference profit leaves the purchase out of the outcome",
                facility.servers_total, facility.hardware.server_purchase_cost
            )
        } else {
            "is not explained by the scenario inputs".to_string()
        };
        out.push(Diagnostic::new(
            "profit-offset",
            role,
            format!("reference first-year profit {published} minus computed {computed} = {offset}; the offset {explanation}"),
            Some(offset.amount()),
        ));
    }

    if let Some(published) = reference.facility_energy_cost {
        let computed = report.costs.facility.power;
        let diff = computed - published;
        out.push(Diagnostic::new(
            "energy-reference",
            role,
            format!(
                "facility energy cost {computed} vs reference {published} (difference {diff}); the reference \
                 derives from unrounded per-role CPU energy that is not available, while the per-server input \
                 here is the rounded figure"
            ),
            Some(diff.amount()),
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{bundled_scenario, CALLCENTER_NEVADA};

    fn c(s: &str) -> Currency {
        s.parse().unwrap()
    }

    #[test]
    fn fixture_role1_income() {
        let report = evaluate(&bundled_scenario(CALLCENTER_NEVADA).unwrap()).unwrap();
        let r1 = report.role("role1").unwrap();
        assert_eq!(r1.users_per_hour, 11_571);
        assert_eq!(r1.users_per_year_facility, 52_708_219_200);
        assert_eq!(r1.projection.first_year().income, c("158124657600"));
    }

    #[test]
    fn fixture_role3_roi_with_override() {
        let report = evaluate(&bundled_scenario(CALLCENTER_NEVADA).unwrap()).unwrap();
        let r3 = report.role("role3").unwrap();
        assert_eq!(r3.outcome_source, OutcomeSource::Override);
        let pct = r3.projection.first_year().roi * Decimal::from(100);
        assert!((pct - Decimal::from(4)).abs() < Decimal::ONE, "{pct}");
    }

    #[test]
    fn fixture_cost_granularities() {
        let report = evaluate(&bundled_scenario(CALLCENTER_NEVADA).unwrap()).unwrap();
        for role in &report.roles {
            assert_eq!(role.costs.server.power, c("227"));
            assert_eq!(role.costs.server.cooling, c("227"));
            assert_eq!(role.costs.server.total, c("16214.80"));
            assert_eq!(role.costs.rack.power, c("2951"));
            assert_eq!(role.costs.facility.power, c("118040"));
            assert_eq!(role.costs.facility.total, c("96092056"));
            assert_eq!(role.yearly_facility_costs.len(), 5);
            // Later years drop the purchase price.
            assert_eq!(role.yearly_facility_costs[0].total - role.yearly_facility_costs[1].total, c("1174680"));
        }
    }

    #[test]
    fn profit_offset_is_reported() {
        let report = evaluate(&bundled_scenario(CALLCENTER_NEVADA).unwrap()).unwrap();
        for role in ["role1", "role2", "role3"] {
            let d = report.diagnostics_for(role).find(|d| d.code == "profit-offset").unwrap();
            assert_eq!(d.value, Some(Decimal::from(1_174_680)));
            assert!(d.message.contains("hardware purchase"), "{}", d.message);
        }
    }

    #[test]
    fn zero_cost_single_server_is_all_zero() {
        let mut s = bundled_scenario(CALLCENTER_NEVADA).unwrap();
        s.facility.servers_total = 1;
        s.facility.servers_per_rack = 1;
        s.facility.tariff.price_per_kwh = Currency::ZERO;
        s.facility.power.cpu_incremental_annual_cost = Currency::ZERO;
        s.facility.hardware.server_purchase_cost = Currency::ZERO;
        s.facility.hardware.annual_licensing_cost = Currency::ZERO;
        s.facility.personnel.avg_monthly_salary = Currency::ZERO;
        s.economics.price_per_contact = Currency::ZERO;
        s.reference_comparisons.clear();
        for role in &mut s.roles {
            role.cpu_incremental_annual_cost = None;
            role.outcome_override = None;
            role.reference = None;
        }
        let report = evaluate(&s).unwrap();
        assert!(report.diagnostics.is_empty());
        for role in &report.roles {
            for b in [&role.costs.server, &role.costs.rack, &role.costs.facility] {
                assert_eq!(b, &CostBreakdown::zero(1));
            }
            for y in &role.projection.years {
                assert!(y.income.is_zero() && y.outcome.is_zero() && y.profit.is_zero());
                assert!(y.roi.is_zero() && y.cumulative_roi.is_zero());
            }
        }
    }

    #[test]
    fn partial_racks_are_reported() {
        let mut s = bundled_scenario(CALLCENTER_NEVADA).unwrap();
        s.facility.servers_total = 20;
        let report = evaluate(&s).unwrap();
        assert_eq!(report.full_racks, 1);
        assert_eq!(report.partial_rack_servers, 7);
        assert!(report.diagnostics.iter().any(|d| d.code == "partial-rack"));
    }
}
