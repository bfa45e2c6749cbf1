use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::evaluate::{Diagnostic, EvaluationReport, RoleReport};
use super::ReferenceComparison;
use crate::error::Result;
use crate::serde_decimal;

/// Relative standing of `role_a` against `role_b`.
///
/// Ratios are `a / b`; change percentages are `(a / b - 1) * 100`. A ratio is
/// absent when `b` is zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub role_a: String,
    pub role_b: String,
    #[serde(with = "serde_decimal::option")]
    pub users_ratio: Option<Decimal>,
    #[serde(with = "serde_decimal::option")]
    pub users_change_percent: Option<Decimal>,
    #[serde(with = "serde_decimal::option")]
    pub profit_ratio: Option<Decimal>,
    #[serde(with = "serde_decimal::option")]
    pub profit_change_percent: Option<Decimal>,
    #[serde(with = "serde_decimal::option")]
    pub cumulative_profit_ratio: Option<Decimal>,
    /// First-year ROI of `a` minus that of `b`, as a fraction.
    #[serde(with = "serde_decimal")]
    pub roi_delta: Decimal,
    #[serde(with = "serde_decimal")]
    pub cumulative_roi_delta: Decimal,
    pub diagnostics: Vec<Diagnostic>,
}

fn ratio(a: Decimal, b: Decimal) -> Option<Decimal> {
    if b.is_zero() {
        return None;
    }
    a.checked_div(b)
}

fn change_percent(ratio: Option<Decimal>) -> Option<Decimal> {
    ratio.and_then(|r| (r - Decimal::ONE).checked_mul(Decimal::ONE_HUNDRED))
}

pub fn compare(report: &EvaluationReport, role_a: &str, role_b: &str) -> Result<ComparisonSummary> {
    let a = report.role(role_a)?;
    let b = report.role(role_b)?;
    let users_ratio = ratio(Decimal::from(a.users_per_year_facility), Decimal::from(b.users_per_year_facility));
    let profit_ratio = ratio(a.projection.first_year().profit.amount(), b.projection.first_year().profit.amount());
    let cumulative_profit_ratio =
        ratio(a.projection.cumulative_profit.amount(), b.projection.cumulative_profit.amount());

    // References are matched in either orientation; the claim is always phrased a-over-b.
    let diagnostics = report
        .diagnostics
        .iter()
        .filter(|d| d.code == "reference-comparison")
        .filter(|d| {
            let pair = d.role.as_deref().unwrap_or_default();
            pair == pair_key(role_a, role_b) || pair == pair_key(role_b, role_a)
        })
        .cloned()
        .collect();

    Ok(ComparisonSummary {
        role_a: role_a.to_string(),
        role_b: role_b.to_string(),
        users_change_percent: change_percent(users_ratio),
        users_ratio,
        profit_change_percent: change_percent(profit_ratio),
        profit_ratio,
        cumulative_profit_ratio,
        roi_delta: a.projection.first_year().roi - b.projection.first_year().roi,
        cumulative_roi_delta: a.projection.cumulative_roi - b.projection.cumulative_roi,
        diagnostics,
    })
}

fn pair_key(a: &str, b: &str) -> String {
    format!("{a}:{b}")
}

/// Checks a published users-change figure against the evaluated roles.
pub(super) fn reference_diagnostic(reference: &ReferenceComparison, a: &RoleReport, b: &RoleReport) -> Diagnostic {
    let computed =
        change_percent(ratio(Decimal::from(a.users_per_year_facility), Decimal::from(b.users_per_year_facility)));
    let claimed = reference.users_change_percent;
    let reproduced = computed.is_some_and(|c| (c - claimed).abs() < Decimal::new(1, 2));
    let computed_text = computed.map(|c| format!("{}%", c.round_dp(2))).unwrap_or_else(|| "undefined".to_string());
    let message = if reproduced {
        format!(
            "reference users change {claimed}% for {} over {} is reproduced ({computed_text})",
            reference.role_a, reference.role_b
        )
    } else {
        format!(
            "reference users change {claimed}% for {} over {} is NOT reproduced by the role throughputs; computed {computed_text}",
            reference.role_a, reference.role_b
        )
    };
    Diagnostic {
        code: "reference-comparison".to_string(),
        role: Some(pair_key(&reference.role_a, &reference.role_b)),
        message,
        value: computed,
    }
}
