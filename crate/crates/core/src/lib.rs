//! Data-center total cost of ownership under alternative RBAC security configurations.
//!
//! The crate is split along the pipeline:
//!
//! - [`model`]: power, cooling, hardware/software and personnel cost equations.
//! - [`utilization`]: CPU utilization and per-role user throughput.
//! - [`economics`]: cost-per-contact income, profit and ROI projections.
//! - [`scenario`]: scenario documents, evaluation, comparison and sweeps.
//!
//! Money is carried as exact decimals ([`Currency`]); rounding is a
//! presentation concern only.

pub mod currency;
pub mod economics;
pub mod error;
pub mod model;
pub mod scenario;
pub mod serde_decimal;
pub mod utilization;

pub use currency::{Currency, Rounding};
pub use economics::{EconomicAssumptions, FinancialProjection, RoiConvention, YearFigures};
pub use error::{Error, ErrorKind, ErrorRecord, Result};
pub use model::{
    CoolingMode, CoolingProfile, CostBreakdown, EnergyTariff, HardwareProfile, PeriodCost, PersonnelProfile,
    ServerPowerProfile,
};
pub use rust_decimal::{Decimal, RoundingStrategy};
pub use scenario::{
    bundled_scenario, compare, evaluate, load_scenario, load_scenario_value, sweep, ComparisonSummary, Diagnostic,
    EvaluationReport, Scenario, SweepMetric, SweepResult, SweepSpec,
};
pub use utilization::{RoleWorkloadProfile, SecurityLevel, UtilizationModel};
