//! Closed-form cost model: power delivery, cooling, hardware/software,
//! personnel and the combined operating total.
//!
//! Every function here is pure. Inputs are validated on entry and violations
//! come back as [`Error::Validation`] with the offending field named.

use std::ops::Add;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::currency::Currency;
use crate::error::{Error, Result};
use crate::serde_decimal;

/// BTU/h dissipated per kW of electrical draw.
pub const BTU_PER_HOUR_PER_KW: Decimal = Decimal::from_parts(341214, 0, 0, false, 2);

/// Months in a costing year; personnel cost accrues monthly.
pub const MONTHS_PER_YEAR: u32 = 12;

/// Electricity price and the duty cycle it applies to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyTariff {
    pub price_per_kwh: Currency,
    #[serde(with = "serde_decimal")]
    pub hours_per_day: Decimal,
    pub days: u32,
}

impl EnergyTariff {
    /// Continuous operation for a 365-day year.
    pub fn annual(price_per_kwh: Currency) -> Self {
        EnergyTariff { price_per_kwh, hours_per_day: Decimal::from(24), days: 365 }
    }

    pub fn validate(&self, at: &str) -> Result<()> {
        if self.price_per_kwh.is_negative() {
            return Err(Error::validation(format!("{at}.price_per_kwh"), "must be >= 0"));
        }
        if self.hours_per_day <= Decimal::ZERO || self.hours_per_day > Decimal::from(24) {
            return Err(Error::validation(format!("{at}.hours_per_day"), "must be in (0, 24]"));
        }
        if self.days < 1 {
            return Err(Error::validation(format!("{at}.days"), "must be >= 1"));
        }
        Ok(())
    }

    /// Operating hours covered by the tariff (hours per day times days).
    pub fn operating_hours(&self) -> Decimal {
        self.hours_per_day * Decimal::from(self.days)
    }
}

/// Average electrical draw of one server plus the role-specific CPU energy top-up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServerPowerProfile {
    /// Kilowatts averaged over busy and idle operation.
    #[serde(with = "serde_decimal")]
    pub avg_power_kw: Decimal,
    /// Yearly CPU energy cost attributable to the workload.
    #[serde(default)]
    pub cpu_incremental_annual_cost: Currency,
}

impl ServerPowerProfile {
    pub fn validate(&self, at: &str) -> Result<()> {
        if self.avg_power_kw <= Decimal::ZERO {
            return Err(Error::validation(format!("{at}.avg_power_kw"), "must be > 0"));
        }
        if self.cpu_incremental_annual_cost.is_negative() {
            return Err(Error::validation(format!("{at}.cpu_incremental_annual_cost"), "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoolingMode {
    /// Cooling energy costs the same as the IT energy it removes.
    MirrorItLoad,
    /// Cooling draw derived from a BTU/h rating.
    BtuRated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoolingProfile {
    pub mode: CoolingMode,
    #[serde(default, with = "serde_decimal::option", skip_serializing_if = "Option::is_none")]
    pub btu_per_hour: Option<Decimal>,
}

impl CoolingProfile {
    pub fn mirror() -> Self {
        CoolingProfile { mode: CoolingMode::MirrorItLoad, btu_per_hour: None }
    }

    pub fn btu_rated(btu_per_hour: Decimal) -> Self {
        CoolingProfile { mode: CoolingMode::BtuRated, btu_per_hour: Some(btu_per_hour) }
    }

    pub fn validate(&self, at: &str) -> Result<()> {
        match (self.mode, self.btu_per_hour) {
            (CoolingMode::BtuRated, None) => {
                Err(Error::validation(format!("{at}.btu_per_hour"), "required when mode is btu-rated"))
            }
            (_, Some(btu)) if btu < Decimal::ZERO => {
                Err(Error::validation(format!("{at}.btu_per_hour"), "must be >= 0"))
            }
            _ => Ok(()),
        }
    }
}

/// Per-server purchase, depreciation and licensing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardwareProfile {
    pub server_purchase_cost: Currency,
    #[serde(default = "default_lifetime")]
    pub server_lifetime_years: u32,
    #[serde(default = "default_true")]
    pub include_purchase_in_year_one: bool,
    pub annual_licensing_cost: Currency,
}

fn default_lifetime() -> u32 {
    5
}

fn default_true() -> bool {
    true
}

impl HardwareProfile {
    pub fn validate(&self, at: &str) -> Result<()> {
        if self.server_purchase_cost.is_negative() {
            return Err(Error::validation(format!("{at}.server_purchase_cost"), "must be >= 0"));
        }
        if self.server_lifetime_years < 1 {
            return Err(Error::validation(format!("{at}.server_lifetime_years"), "must be >= 1"));
        }
        if self.annual_licensing_cost.is_negative() {
            return Err(Error::validation(format!("{at}.annual_licensing_cost"), "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PersonnelProfile {
    pub it_staff: u64,
    pub workers: u64,
    pub housekeeping_facilities: u64,
    pub avg_monthly_salary: Currency,
}

impl PersonnelProfile {
    pub fn headcount(&self) -> u64 {
        self.it_staff + self.workers + self.housekeeping_facilities
    }

    pub fn validate(&self, at: &str) -> Result<()> {
        if self.avg_monthly_salary.is_negative() {
            return Err(Error::validation(format!("{at}.avg_monthly_salary"), "must be >= 0"));
        }
        self.it_staff
            .checked_add(self.workers)
            .and_then(|n| n.checked_add(self.housekeeping_facilities))
            .ok_or_else(|| Error::validation(format!("{at}.workers"), "headcount overflows"))?;
        Ok(())
    }
}

/// A cost amount tagged with the number of years it covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodCost {
    pub amount: Currency,
    pub period_years: u32,
}

impl PeriodCost {
    pub fn new(amount: Currency, period_years: u32) -> Self {
        PeriodCost { amount, period_years }
    }

    pub fn annual(amount: Currency) -> Self {
        PeriodCost { amount, period_years: 1 }
    }
}

/// Itemized operating cost. `total` is always the exact sum of the four components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub power: Currency,
    pub cooling: Currency,
    pub hardware_software: Currency,
    pub personnel: Currency,
    pub total: Currency,
    pub period_years: u32,
}

impl CostBreakdown {
    pub fn zero(period_years: u32) -> Self {
        CostBreakdown {
            power: Currency::ZERO,
            cooling: Currency::ZERO,
            hardware_software: Currency::ZERO,
            personnel: Currency::ZERO,
            total: Currency::ZERO,
            period_years,
        }
    }

    /// Energy-related part of the total (power delivery plus cooling).
    pub fn energy(&self) -> Currency {
        self.power + self.cooling
    }

    /// Scales the per-server components by `n` servers; personnel is not scaled.
    pub fn scale_servers(&self, n: u64) -> Result<CostBreakdown> {
        let mul = |c: Currency| c.checked_mul_int(n).ok_or(Error::Overflow("server scaling"));
        total_cost(
            PeriodCost::new(mul(self.power)?, self.period_years),
            PeriodCost::new(mul(self.cooling)?, self.period_years),
            PeriodCost::new(mul(self.hardware_software)?, self.period_years),
            PeriodCost::new(self.personnel, self.period_years),
        )
    }

    pub fn with_personnel(&self, personnel: Currency) -> Result<CostBreakdown> {
        total_cost(
            PeriodCost::new(self.power, self.period_years),
            PeriodCost::new(self.cooling, self.period_years),
            PeriodCost::new(self.hardware_software, self.period_years),
            PeriodCost::new(personnel, self.period_years),
        )
    }

    /// Componentwise sum of two breakdowns over the same period.
    pub fn checked_add(&self, other: &CostBreakdown) -> Result<CostBreakdown> {
        if self.period_years != other.period_years {
            return Err(Error::validation(
                "period_years",
                format!("cannot add a {}-year breakdown to a {}-year one", other.period_years, self.period_years),
            ));
        }
        let p = self.period_years;
        total_cost(
            PeriodCost::new(self.power + other.power, p),
            PeriodCost::new(self.cooling + other.cooling, p),
            PeriodCost::new(self.hardware_software + other.hardware_software, p),
            PeriodCost::new(self.personnel + other.personnel, p),
        )
    }
}

impl Add for &CostBreakdown {
    type Output = Result<CostBreakdown>;

    fn add(self, rhs: &CostBreakdown) -> Result<CostBreakdown> {
        self.checked_add(rhs)
    }
}

fn ensure_kw(avg_power_kw: Decimal) -> Result<()> {
    if avg_power_kw < Decimal::ZERO {
        return Err(Error::validation("avg_power_kw", "must be >= 0"));
    }
    Ok(())
}

/// Kilowatt-hours drawn at `avg_power_kw` over the tariff's duty cycle.
pub fn energy_kwh(avg_power_kw: Decimal, tariff: &EnergyTariff) -> Result<Decimal> {
    ensure_kw(avg_power_kw)?;
    tariff.validate("tariff")?;
    avg_power_kw
        .checked_mul(tariff.hours_per_day)
        .and_then(|v| v.checked_mul(Decimal::from(tariff.days)))
        .ok_or(Error::Overflow("energy_kwh"))
}

/// Cost of the energy drawn at `avg_power_kw` over the tariff's duty cycle.
pub fn power_cost(avg_power_kw: Decimal, tariff: &EnergyTariff) -> Result<Currency> {
    let kwh = energy_kwh(avg_power_kw, tariff)?;
    tariff.price_per_kwh.checked_mul(kwh).ok_or(Error::Overflow("power_cost"))
}

/// Cooling cost for one server.
///
/// In mirror mode this is `it_power_cost` itself. In BTU-rated mode the rating
/// is converted to kW and priced over the tariff's duty cycle.
pub fn cooling_cost(cooling: &CoolingProfile, it_power_cost: Currency, tariff: &EnergyTariff) -> Result<Currency> {
    cooling.validate("cooling")?;
    match cooling.mode {
        CoolingMode::MirrorItLoad => Ok(it_power_cost),
        CoolingMode::BtuRated => {
            let btu = cooling.btu_per_hour.unwrap_or_default();
            // Multiply first and divide once so round ratings stay exact.
            power_cost(btu, tariff)?.checked_div(BTU_PER_HOUR_PER_KW).ok_or(Error::Overflow("cooling_cost"))
        }
    }
}

/// Yearly depreciation of one server.
pub fn amortization(hw: &HardwareProfile) -> Result<Currency> {
    hw.validate("hardware")?;
    hw.server_purchase_cost.checked_div(Decimal::from(hw.server_lifetime_years)).ok_or(Error::Overflow("amortization"))
}

/// Hardware and software cost of one server in the given 1-based year.
pub fn hardware_software_cost(hw: &HardwareProfile, year_index: u32) -> Result<Currency> {
    if year_index < 1 {
        return Err(Error::validation("year_index", "years are counted from 1"));
    }
    let mut cost = amortization(hw)? + hw.annual_licensing_cost;
    if year_index == 1 && hw.include_purchase_in_year_one {
        cost += hw.server_purchase_cost;
    }
    Ok(cost)
}

/// Salary cost of the whole staff over `months` months.
pub fn personnel_cost(p: &PersonnelProfile, months: u32) -> Result<Currency> {
    p.validate("personnel")?;
    if months < 1 {
        return Err(Error::validation("months", "must be >= 1"));
    }
    p.avg_monthly_salary
        .checked_mul_int(p.headcount())
        .and_then(|c| c.checked_mul_int(u64::from(months)))
        .ok_or(Error::Overflow("personnel_cost"))
}

/// Combines the four components into a [`CostBreakdown`].
pub fn total_cost(
    power: PeriodCost,
    cooling: PeriodCost,
    hw_sw: PeriodCost,
    personnel: PeriodCost,
) -> Result<CostBreakdown> {
    let period_years = power.period_years;
    let named = [("power", power), ("cooling", cooling), ("hardware_software", hw_sw), ("personnel", personnel)];
    for (name, c) in named {
        if c.period_years != period_years {
            return Err(Error::validation(
                format!("{name}.period_years"),
                format!("covers {} year(s) but power covers {period_years}", c.period_years),
            ));
        }
        if c.amount.is_negative() {
            return Err(Error::validation(name, "must be >= 0"));
        }
    }
    let total = named
        .iter()
        .try_fold(Currency::ZERO, |acc, (_, c)| acc.checked_add(c.amount))
        .ok_or(Error::Overflow("total_cost"))?;
    Ok(CostBreakdown {
        power: power.amount,
        cooling: cooling.amount,
        hardware_software: hw_sw.amount,
        personnel: personnel.amount,
        total,
        period_years,
    })
}
