//! Text renderings of reports: aligned tables, long-format CSV and canonical JSON.
//!
//! Only the table format applies presentation rounding. CSV and JSON carry the
//! exact stored values so that both contain the same numbers.

use std::fmt::Write as _;

use dc_tco_core::currency::group_thousands;
use dc_tco_core::scenario::{RoleReport, SweepMetric};
use dc_tco_core::RoundingStrategy;
use dc_tco_core::{ComparisonSummary, CostBreakdown, Currency, Decimal, EvaluationReport, Rounding, SweepResult};
use serde::Serialize;

const HALF_UP: RoundingStrategy = RoundingStrategy::MidpointAwayFromZero;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Granularity {
    Server,
    Rack,
    Facility,
}

impl Granularity {
    pub const ALL: [Granularity; 3] = [Granularity::Server, Granularity::Rack, Granularity::Facility];

    pub fn name(self) -> &'static str {
        match self {
            Granularity::Server => "server",
            Granularity::Rack => "rack",
            Granularity::Facility => "facility",
        }
    }

    fn costs(self, role: &RoleReport) -> &CostBreakdown {
        match self {
            Granularity::Server => &role.costs.server,
            Granularity::Rack => &role.costs.rack,
            Granularity::Facility => &role.costs.facility,
        }
    }

    fn label(self, report: &EvaluationReport) -> String {
        match self {
            Granularity::Server => "server".into(),
            Granularity::Rack => format!("rack ({})", report.servers_per_rack),
            Granularity::Facility => format!("facility ({})", report.servers_total),
        }
    }
}

impl std::str::FromStr for Granularity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Granularity::ALL
            .into_iter()
            .find(|g| g.name() == s.trim())
            .ok_or_else(|| format!("unknown granularity `{s}` (expected server, rack or facility)"))
    }
}

/// Canonical JSON: pretty-printed, struct field order, currency as decimal strings.
pub fn json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("reports serialize");
    out.push('\n');
    out
}

pub fn money(c: Currency, rounding: Rounding) -> String {
    c.display(rounding)
}

pub fn count(n: u64) -> String {
    group_thousands(&n.to_string())
}

/// A fraction rendered as a percentage with two decimals.
pub fn percent(fraction: Decimal) -> String {
    let pct = (fraction * Decimal::ONE_HUNDRED).round_dp_with_strategy(2, HALF_UP);
    format!("{pct:.2}%")
}

/// Column-aligned text table. The first column is left-aligned, the rest right-aligned.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    fn row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) {
        self.rows.push(cells.into_iter().map(Into::into).collect());
    }

    fn render(&self, out: &mut String) {
        let cols = self.header.len();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate().take(cols) {
                widths[i] = widths[i].max(cell.chars().count());
            }
        }
        let line = |out: &mut String, cells: &[String]| {
            let mut text = String::new();
            for (i, cell) in cells.iter().enumerate().take(cols) {
                let pad = widths[i] - cell.chars().count();
                if i == 0 {
                    text.push_str(cell);
                    text.push_str(&" ".repeat(pad));
                } else {
                    text.push_str("  ");
                    text.push_str(&" ".repeat(pad));
                    text.push_str(cell);
                }
            }
            out.push_str(text.trim_end());
            out.push('\n');
        };
        line(out, &self.header);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(out, &rule);
        for row in &self.rows {
            line(out, row);
        }
    }
}

type Component = fn(&CostBreakdown) -> Currency;

pub fn evaluate_table(report: &EvaluationReport, rounding: Rounding, granularity: &[Granularity]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Scenario {}: {} servers, {} per rack ({} full rack(s){}), {}-year horizon, {} ROI convention",
        report.scenario,
        report.servers_total,
        report.servers_per_rack,
        report.full_racks,
        if report.partial_rack_servers > 0 {
            format!(" + {} server(s) in a partial rack", report.partial_rack_servers)
        } else {
            String::new()
        },
        report.analysis_years,
        report.roi_convention,
    );
    out.push('\n');

    out.push_str("Annual energy cost and throughput\n");
    let mut matrix = Table::new(std::iter::once(String::new()).chain(report.roles.iter().map(|r| r.name.clone())));
    for g in granularity {
        matrix.row(
            std::iter::once(format!("energy / {}", g.label(report)))
                .chain(report.roles.iter().map(|r| money(g.costs(r).power, rounding))),
        );
    }
    matrix.row(
        std::iter::once("users / hour / server".to_string())
            .chain(report.roles.iter().map(|r| count(r.users_per_hour))),
    );
    matrix.row(
        std::iter::once("users / year / server".to_string())
            .chain(report.roles.iter().map(|r| count(r.users_per_year_per_server))),
    );
    matrix.row(
        std::iter::once("users / year / facility".to_string())
            .chain(report.roles.iter().map(|r| count(r.users_per_year_facility))),
    );
    matrix.render(&mut out);

    for role in &report.roles {
        out.push('\n');
        let _ = writeln!(
            out,
            "Role {} ({} security, {}): session {} s at load {}, outcome from {}",
            role.name,
            role.security_level,
            if role.security_mechanism.is_empty() { "no mechanism" } else { &role.security_mechanism },
            role.session_busy_seconds.normalize(),
            role.target_load.normalize(),
            match role.outcome_source {
                dc_tco_core::scenario::OutcomeSource::CostModel => "the cost model",
                dc_tco_core::scenario::OutcomeSource::Override => "the scenario override",
            }
        );
        let mut costs =
            Table::new(std::iter::once("year-1 cost".to_string()).chain(granularity.iter().map(|g| g.label(report))));
        let components: [(&str, Component); 5] = [
            ("power", |c| c.power),
            ("cooling", |c| c.cooling),
            ("hardware/software", |c| c.hardware_software),
            ("personnel", |c| c.personnel),
            ("total", |c| c.total),
        ];
        for (label, get) in components {
            costs.row(
                std::iter::once(label.to_string())
                    .chain(granularity.iter().map(|g| money(get(g.costs(role)), rounding))),
            );
        }
        costs.render(&mut out);
        out.push('\n');

        let mut projection =
            Table::new(["year", "income", "outcome", "profit", "ROI", "cumulative profit", "cumulative ROI"]);
        for y in &role.projection.years {
            projection.row([
                y.year.to_string(),
                money(y.income, rounding),
                money(y.outcome, rounding),
                money(y.profit, rounding),
                percent(y.roi),
                money(y.cumulative_profit, rounding),
                percent(y.cumulative_roi),
            ]);
        }
        projection.render(&mut out);
    }

    if !report.diagnostics.is_empty() {
        out.push_str("\nDiagnostics\n");
        for d in &report.diagnostics {
            let _ = writeln!(
                out,
                "- [{}{}] {}",
                d.code,
                d.role.as_deref().map(|r| format!(" {r}")).unwrap_or_default(),
                d.message
            );
        }
    }
    out
}

/// Long-format CSV: `role,scope,year,metric,value`. `year` is empty for per-hour and per-year throughput.
pub fn evaluate_csv(report: &EvaluationReport, granularity: &[Granularity]) -> String {
    let mut out = String::from("role,scope,year,metric,value\n");
    let mut row = |role: &str, scope: &str, year: Option<u32>, metric: &str, value: String| {
        let year = year.map(|y| y.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{scope},{year},{metric},{value}", csv_field(role));
    };
    for role in &report.roles {
        let name = role.name.as_str();
        row(name, "server", None, "session_busy_seconds", role.session_busy_seconds.normalize().to_string());
        row(name, "server", None, "users_per_hour", role.users_per_hour.to_string());
        row(name, "server", None, "idle_seconds_per_hour", role.idle_seconds_per_hour.normalize().to_string());
        row(name, "server", None, "users_per_year", role.users_per_year_per_server.to_string());
        row(name, "facility", None, "users_per_year", role.users_per_year_facility.to_string());
        row(name, "server", Some(1), "energy_kwh", role.energy_kwh_per_server.normalize().to_string());
        for &g in granularity {
            let years: Vec<(u32, &CostBreakdown)> = match g {
                Granularity::Facility => role.yearly_facility_costs.iter().zip(1..).map(|(c, y)| (y, c)).collect(),
                _ => vec![(1, g.costs(role))],
            };
            for (year, c) in years {
                for (metric, value) in [
                    ("power", c.power),
                    ("cooling", c.cooling),
                    ("hardware_software", c.hardware_software),
                    ("personnel", c.personnel),
                    ("total", c.total),
                ] {
                    row(name, g.name(), Some(year), metric, value.to_string());
                }
            }
        }
        for y in &role.projection.years {
            row(name, "facility", Some(y.year), "income", y.income.to_string());
            row(name, "facility", Some(y.year), "outcome", y.outcome.to_string());
            row(name, "facility", Some(y.year), "profit", y.profit.to_string());
            row(name, "facility", Some(y.year), "roi", y.roi.normalize().to_string());
            row(name, "facility", Some(y.year), "cumulative_profit", y.cumulative_profit.to_string());
            row(name, "facility", Some(y.year), "cumulative_roi", y.cumulative_roi.normalize().to_string());
        }
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `≈60×` style headline for a ratio, with the exact figure alongside.
pub fn approx_times(ratio: Decimal) -> String {
    let whole = ratio.round();
    format!("≈{whole}× ({:.2})", ratio.round_dp_with_strategy(2, HALF_UP))
}

pub fn compare_table(report: &EvaluationReport, summary: &ComparisonSummary, rounding: Rounding) -> String {
    let a = report.role(&summary.role_a).expect("compared role exists");
    let b = report.role(&summary.role_b).expect("compared role exists");
    let mut out = String::new();
    let _ = writeln!(out, "Comparison {} vs {} ({})\n", a.name, b.name, report.scenario);
    let mut t = Table::new(["metric", a.name.as_str(), b.name.as_str(), "a / b", "change"]);
    let ratio_cells = |ratio: Option<Decimal>, change: Option<Decimal>| match (ratio, change) {
        (Some(r), Some(c)) => [approx_times(r), format!("{:+.2}%", c.round_dp_with_strategy(2, HALF_UP))],
        _ => ["n/a".to_string(), "n/a".to_string()],
    };
    let [r, c] = ratio_cells(summary.users_ratio, summary.users_change_percent);
    t.row(["users / year".to_string(), count(a.users_per_year_facility), count(b.users_per_year_facility), r, c]);
    let [r, c] = ratio_cells(summary.profit_ratio, summary.profit_change_percent);
    let (pa, pb) = (a.projection.first_year().profit, b.projection.first_year().profit);
    t.row(["first-year profit".to_string(), money(pa, rounding), money(pb, rounding), r, c]);
    let cumulative_change = summary.cumulative_profit_ratio.map(|r| (r - Decimal::ONE) * Decimal::ONE_HUNDRED);
    let [r, c] = ratio_cells(summary.cumulative_profit_ratio, cumulative_change);
    t.row([
        format!("{}-year profit", report.analysis_years),
        money(a.projection.cumulative_profit, rounding),
        money(b.projection.cumulative_profit, rounding),
        r,
        c,
    ]);
    t.row([
        "first-year ROI".to_string(),
        percent(a.projection.first_year().roi),
        percent(b.projection.first_year().roi),
        String::new(),
        format!("{} pp", pp(summary.roi_delta)),
    ]);
    t.row([
        format!("{}-year ROI", report.analysis_years),
        percent(a.projection.cumulative_roi),
        percent(b.projection.cumulative_roi),
        String::new(),
        format!("{} pp", pp(summary.cumulative_roi_delta)),
    ]);
    t.render(&mut out);
    if !summary.diagnostics.is_empty() {
        out.push_str("\nDiagnostics\n");
        for d in &summary.diagnostics {
            let _ = writeln!(out, "- [{}] {}", d.code, d.message);
        }
    }
    out
}

fn pp(fraction: Decimal) -> String {
    format!("{:+.2}", (fraction * Decimal::ONE_HUNDRED).round_dp_with_strategy(2, HALF_UP))
}

/// Long-format CSV of a comparison: `metric,role_a,role_b,ratio,change_percent`.
pub fn compare_csv(report: &EvaluationReport, summary: &ComparisonSummary) -> String {
    let a = report.role(&summary.role_a).expect("compared role exists");
    let b = report.role(&summary.role_b).expect("compared role exists");
    let opt = |v: Option<Decimal>| v.map(|d| d.normalize().to_string()).unwrap_or_default();
    let mut out = format!("metric,{},{},ratio,change_percent\n", csv_field(&a.name), csv_field(&b.name));
    let _ = writeln!(
        out,
        "users_per_year,{},{},{},{}",
        a.users_per_year_facility,
        b.users_per_year_facility,
        opt(summary.users_ratio),
        opt(summary.users_change_percent)
    );
    let _ = writeln!(
        out,
        "profit,{},{},{},{}",
        a.projection.first_year().profit,
        b.projection.first_year().profit,
        opt(summary.profit_ratio),
        opt(summary.profit_change_percent)
    );
    let _ = writeln!(
        out,
        "cumulative_profit,{},{},{},",
        a.projection.cumulative_profit,
        b.projection.cumulative_profit,
        opt(summary.cumulative_profit_ratio)
    );
    let _ = writeln!(
        out,
        "roi,{},{},,{}",
        a.projection.first_year().roi.normalize(),
        b.projection.first_year().roi.normalize(),
        (summary.roi_delta * Decimal::ONE_HUNDRED).normalize()
    );
    let _ = writeln!(
        out,
        "cumulative_roi,{},{},,{}",
        a.projection.cumulative_roi.normalize(),
        b.projection.cumulative_roi.normalize(),
        (summary.cumulative_roi_delta * Decimal::ONE_HUNDRED).normalize()
    );
    out
}

fn metric_cell(metric: SweepMetric, value: Decimal, rounding: Rounding) -> String {
    match metric {
        SweepMetric::Roi | SweepMetric::CumulativeRoi => percent(value),
        SweepMetric::UsersPerYear => value.normalize().to_string(),
        _ => money(Currency::new(value), rounding),
    }
}

pub fn sweep_table(result: &SweepResult, rounding: Rounding) -> String {
    let mut out = format!("Sweep of {} for role {}\n\n", result.parameter_path, result.role);
    let mut t = Table::new([result.parameter_path.as_str(), result.metric.name()]);
    for p in &result.points {
        let cell = match (&p.metric, &p.error) {
            (Some(m), _) => metric_cell(result.metric, *m, rounding),
            (None, Some(e)) => format!("error: {}", e.message),
            (None, None) => String::new(),
        };
        t.row([p.value.normalize().to_string(), cell]);
    }
    t.render(&mut out);
    out
}

/// Two-column CSV with header `value,<metric>`.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = format!("value,{}\n", result.metric.name());
    for p in &result.points {
        let metric = p.metric.map(|m| m.normalize().to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{metric}", p.value.normalize());
    }
    out
}
