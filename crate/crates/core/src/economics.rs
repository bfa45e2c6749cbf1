//! Cost-per-contact income, profit and multi-year ROI.
//!
//! Two ROI conventions are supported. `Cumulative` divides cumulative profit by
//! cumulative outcome. `Paper` divides cumulative profit by the first year's
//! outcome only, which grows linearly with the horizon for constant figures;
//! it exists to reproduce published tables and overstates multi-year ROI.

use std::fmt;
use std::str::FromStr;

use rust_decimal::{Decimal, RoundingStrategy};
use serde::{Deserialize, Serialize};

use crate::currency::Currency;
use crate::error::{Error, Result};
use crate::serde_decimal;

/// Fractional digits kept on ROI ratios.
pub const ROI_SCALE: u32 = 12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoiConvention {
    /// Cumulative profit over first-year outcome.
    Paper,
    /// Cumulative profit over cumulative outcome.
    #[default]
    Cumulative,
}

impl fmt::Display for RoiConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RoiConvention::Paper => "paper",
            RoiConvention::Cumulative => "cumulative",
        })
    }
}

impl FromStr for RoiConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(RoiConvention::Paper),
            "cumulative" => Ok(RoiConvention::Cumulative),
            other => Err(format!("unknown ROI convention `{other}` (expected paper or cumulative)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomicAssumptions {
    /// Income per served user.
    pub price_per_contact: Currency,
    pub analysis_years: u32,
    #[serde(default)]
    pub roi_convention: RoiConvention,
}

impl EconomicAssumptions {
    pub fn validate(&self, at: &str) -> Result<()> {
        if self.price_per_contact.is_negative() {
            return Err(Error::validation(format!("{at}.price_per_contact"), "must be >= 0"));
        }
        if self.analysis_years < 1 {
            return Err(Error::validation(format!("{at}.analysis_years"), "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearFigures {
    pub year: u32,
    pub income: Currency,
    pub outcome: Currency,
    pub profit: Currency,
    /// This year's profit over this year's outcome.
    #[serde(with = "serde_decimal")]
    pub roi: Decimal,
    pub cumulative_profit: Currency,
    /// ROI to date under the projection's convention.
    #[serde(with = "serde_decimal")]
    pub cumulative_roi: Decimal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinancialProjection {
    pub convention: RoiConvention,
    pub years: Vec<YearFigures>,
    pub cumulative_profit: Currency,
    #[serde(with = "serde_decimal")]
    pub cumulative_roi: Decimal,
}

impl FinancialProjection {
    pub fn first_year(&self) -> &YearFigures {
        &self.years[0]
    }

    pub fn last_year(&self) -> &YearFigures {
        self.years.last().expect("projection has at least one year")
    }
}

pub fn annual_income(users_per_year: u64, assumptions: &EconomicAssumptions) -> Result<Currency> {
    assumptions.price_per_contact.checked_mul_int(users_per_year).ok_or(Error::Overflow("annual_income"))
}

pub fn profit(income: Currency, outcome: Currency) -> Currency {
    income - outcome
}

/// Profit over outcome, rounded half-even to [`ROI_SCALE`] digits.
pub fn roi(profit: Currency, outcome: Currency) -> Result<Decimal> {
    if outcome.is_negative() || outcome.is_zero() {
        return Err(Error::validation("outcome", "ROI needs an outcome > 0"));
    }
    ratio(profit.amount(), outcome.amount())
}

fn ratio(numerator: Decimal, denominator: Decimal) -> Result<Decimal> {
    numerator
        .checked_div(denominator)
        .map(|q| q.round_dp_with_strategy(ROI_SCALE, RoundingStrategy::MidpointNearestEven))
        .ok_or(Error::Overflow("roi"))
}

// Zero profit on zero outcome is a zero return rather than an undefined one.
fn projected_roi(profit: Currency, outcome: Currency) -> Result<Decimal> {
    if profit.is_zero() && outcome.is_zero() {
        return Ok(Decimal::ZERO);
    }
    roi(profit, outcome)
}

/// Projection for constant yearly income and outcome.
pub fn project(
    annual_income: Currency,
    annual_outcome: Currency,
    assumptions: &EconomicAssumptions,
) -> Result<FinancialProjection> {
    assumptions.validate("economics")?;
    let years = assumptions.analysis_years as usize;
    project_series(&vec![annual_income; years], &vec![annual_outcome; years], assumptions.roi_convention)
}

/// Projection over explicit per-year income and outcome series of equal length.
pub fn project_series(
    incomes: &[Currency],
    outcomes: &[Currency],
    convention: RoiConvention,
) -> Result<FinancialProjection> {
    if incomes.is_empty() {
        return Err(Error::validation("analysis_years", "must be >= 1"));
    }
    if incomes.len() != outcomes.len() {
        return Err(Error::validation(
            "outcomes",
            format!("{} outcome(s) for {} income year(s)", outcomes.len(), incomes.len()),
        ));
    }
    let first_outcome = outcomes[0];
    let mut cumulative_profit = Currency::ZERO;
    let mut cumulative_outcome = Currency::ZERO;
    let mut paper_roi = Decimal::ZERO;
    let mut years = Vec::with_capacity(incomes.len());
    for (i, (&income, &outcome)) in incomes.iter().zip(outcomes).enumerate() {
        let year_profit = profit(income, outcome);
        cumulative_profit = cumulative_profit.checked_add(year_profit).ok_or(Error::Overflow("profit"))?;
        cumulative_outcome = cumulative_outcome.checked_add(outcome).ok_or(Error::Overflow("outcome"))?;
        let cumulative_roi = match convention {
            // Summing rounded per-year terms keeps n-year ROI exactly n times year one.
            RoiConvention::Paper => {
                paper_roi += projected_roi(year_profit, first_outcome)?;
                paper_roi
            }
            RoiConvention::Cumulative => projected_roi(cumulative_profit, cumulative_outcome)?,
        };
        years.push(YearFigures {
            year: i as u32 + 1,
            income,
            outcome,
            profit: year_profit,
            roi: projected_roi(year_profit, outcome)?,
            cumulative_profit,
            cumulative_roi,
        });
    }
    let last = years.last().expect("non-empty");
    Ok(FinancialProjection {
        convention,
        cumulative_profit: last.cumulative_profit,
        cumulative_roi: last.cumulative_roi,
        years,
    })
}
