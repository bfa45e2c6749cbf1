//! CPU utilization and per-role throughput.
//!
//! Utilization is busy time over available time, with capacity multiplied by
//! the core count. A role's throughput at a target load follows from its
//! per-session busy time; the inverse recovers session time from an observed
//! hourly throughput.

use std::fmt;

use rust_decimal::prelude::ToPrimitive;
use rust_decimal::{Decimal, RoundingStrategy};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serde_decimal;

pub const SECONDS_PER_HOUR: u32 = 3600;
pub const HOURS_PER_YEAR: u64 = 24 * 365;

/// Fractional digits kept for calibrated session times.
const SESSION_SCALE: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UtilizationModel {
    /// Seconds of CPU time available per core.
    #[serde(with = "serde_decimal")]
    pub capacity_seconds: Decimal,
    pub cores: u32,
}

impl UtilizationModel {
    pub fn new(capacity_seconds: Decimal, cores: u32) -> Result<Self> {
        let model = UtilizationModel { capacity_seconds, cores };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        if self.capacity_seconds <= Decimal::ZERO {
            return Err(Error::validation("capacity_seconds", "must be > 0"));
        }
        if self.cores < 1 {
            return Err(Error::validation("cores", "must be >= 1"));
        }
        Ok(())
    }

    pub fn total_capacity(&self) -> Option<Decimal> {
        self.capacity_seconds.checked_mul(Decimal::from(self.cores))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SecurityLevel {
    Low,
    Medium,
    High,
}

impl fmt::Display for SecurityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SecurityLevel::Low => "low",
            SecurityLevel::Medium => "medium",
            SecurityLevel::High => "high",
        })
    }
}

/// One access type a role performs and the data moved per action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccessVolume {
    pub action: String,
    #[serde(with = "serde_decimal")]
    pub megabytes: Decimal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleWorkloadProfile {
    pub role_name: String,
    pub security_level: SecurityLevel,
    pub security_mechanism: String,
    /// CPU busy seconds consumed by one user session.
    #[serde(with = "serde_decimal")]
    pub session_busy_seconds: Decimal,
    /// Fraction of capacity the role is run at, in (0, 1].
    #[serde(with = "serde_decimal")]
    pub target_load: Decimal,
    #[serde(default)]
    pub access_types_and_data_sizes: Vec<AccessVolume>,
}

impl RoleWorkloadProfile {
    pub fn validate(&self) -> Result<()> {
        if self.session_busy_seconds <= Decimal::ZERO {
            return Err(Error::validation("session_busy_seconds", "must be > 0"));
        }
        validate_load(self.target_load, "target_load")
    }
}

pub(crate) fn validate_load(load: Decimal, field: &str) -> Result<()> {
    if load <= Decimal::ZERO || load > Decimal::ONE {
        return Err(Error::validation(field, "must be in (0, 1]"));
    }
    Ok(())
}

/// Busy time over core-multiplied capacity.
pub fn utilization(busy_seconds: Decimal, model: &UtilizationModel) -> Result<Decimal> {
    model.validate()?;
    let capacity = model.total_capacity().ok_or(Error::Overflow("utilization capacity"))?;
    if busy_seconds < Decimal::ZERO {
        return Err(Error::validation("busy_seconds", "must be >= 0"));
    }
    if busy_seconds > capacity {
        return Err(Error::validation(
            "busy_seconds",
            format!("{busy_seconds} s of work exceeds {capacity} s of capacity"),
        ));
    }
    busy_seconds.checked_div(capacity).ok_or(Error::Overflow("utilization"))
}

/// Whole users one server can serve within `horizon_seconds` at the role's target load.
pub fn users_at_load(profile: &RoleWorkloadProfile, horizon_seconds: Decimal) -> Result<u64> {
    profile.validate()?;
    if horizon_seconds <= Decimal::ZERO {
        return Err(Error::validation("horizon_seconds", "must be > 0"));
    }
    let busy_budget = profile.target_load.checked_mul(horizon_seconds).ok_or(Error::Overflow("users_at_load"))?;
    busy_budget
        .checked_div(profile.session_busy_seconds)
        .map(|q| q.floor())
        .and_then(|q| q.to_u64())
        .ok_or(Error::Overflow("users_at_load"))
}

/// Idle seconds that accompany `users` sessions at the role's target load.
pub fn idle_seconds(profile: &RoleWorkloadProfile, users: u64) -> Result<Decimal> {
    validate_load(profile.target_load, "target_load")?;
    if profile.target_load == Decimal::ONE {
        return Ok(Decimal::ZERO);
    }
    let busy = profile.session_busy_seconds.checked_mul(Decimal::from(users)).ok_or(Error::Overflow("idle_seconds"))?;
    // busy * (1 - L) / L, dividing last to keep the product exact.
    busy.checked_mul(Decimal::ONE - profile.target_load)
        .and_then(|v| v.checked_div(profile.target_load))
        .ok_or(Error::Overflow("idle_seconds"))
}

/// Users per year from users per hour, assuming round-the-clock linear growth.
pub fn annualize_users(users_per_hour: u64) -> Result<u64> {
    users_per_hour.checked_mul(HOURS_PER_YEAR).ok_or(Error::Overflow("annualize_users"))
}

/// Per-session busy time implied by an observed hourly throughput at `target_load`.
///
/// The result is truncated so that `users_at_load` over one hour gives back
/// exactly `observed_users_per_hour`.
pub fn calibrate_session_time(observed_users_per_hour: u64, target_load: Decimal) -> Result<Decimal> {
    if observed_users_per_hour == 0 {
        return Err(Error::validation("calibrated_users_per_hour", "must be > 0"));
    }
    validate_load(target_load, "target_load")?;
    let busy_budget = target_load * Decimal::from(SECONDS_PER_HOUR);
    let users = Decimal::from(observed_users_per_hour);
    let exact = busy_budget.checked_div(users).ok_or(Error::Overflow("calibrate_session_time"))?;
    let mut session = exact.round_dp_with_strategy(SESSION_SCALE, RoundingStrategy::ToZero);
    // The quotient itself may have been rounded up; step down until the budget covers every user.
    let ulp = Decimal::new(1, SESSION_SCALE);
    while session.checked_mul(users).is_none_or(|used| used > busy_budget) && session > ulp {
        session -= ulp;
    }
    if session.is_zero() {
        return Err(Error::validation("calibrated_users_per_hour", "throughput too high to resolve a session time"));
    }
    Ok(session)
}
