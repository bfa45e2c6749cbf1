//! Exact decimal money amounts in US dollars.
//!
//! Amounts are stored unrounded. Rounding only happens when a value is
//! presented (see [`Rounding`]); presenting never mutates the stored amount.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub};
use std::str::FromStr;

use rust_decimal::prelude::ToPrimitive;
use rust_decimal::{Decimal, RoundingStrategy};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Fractional digits kept when a computation has to divide.
pub const QUOTIENT_SCALE: u32 = 10;

/// A dollar amount carried as an exact decimal.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Currency(Decimal);

impl Currency {
    pub const ZERO: Currency = Currency(Decimal::ZERO);

    pub fn new(amount: Decimal) -> Self {
        Currency(amount)
    }

    pub fn from_int(dollars: i64) -> Self {
        Currency(Decimal::from(dollars))
    }

    pub fn amount(self) -> Decimal {
        self.0
    }

    pub fn is_negative(self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    pub fn checked_add(self, other: Currency) -> Option<Currency> {
        self.0.checked_add(other.0).map(Currency)
    }

    pub fn checked_sub(self, other: Currency) -> Option<Currency> {
        self.0.checked_sub(other.0).map(Currency)
    }

    /// Multiplies by an exact decimal factor. No rounding is applied.
    pub fn checked_mul(self, factor: Decimal) -> Option<Currency> {
        self.0.checked_mul(factor).map(Currency)
    }

    pub fn checked_mul_int(self, n: u64) -> Option<Currency> {
        self.0.checked_mul(Decimal::from(n)).map(Currency)
    }

    /// Divides and rounds half-even to [`QUOTIENT_SCALE`] fractional digits.
    pub fn checked_div(self, divisor: Decimal) -> Option<Currency> {
        if divisor.is_zero() {
            return None;
        }
        self.0
            .checked_div(divisor)
            .map(|q| Currency(q.round_dp_with_strategy(QUOTIENT_SCALE, RoundingStrategy::MidpointNearestEven)))
    }

    /// The rounded view of this amount. The stored value is untouched.
    pub fn presented(self, rounding: Rounding) -> Decimal {
        match rounding {
            Rounding::Cents => self.0.round_dp_with_strategy(2, RoundingStrategy::MidpointAwayFromZero),
            Rounding::CeilDollar => self.0.round_dp_with_strategy(0, RoundingStrategy::ToPositiveInfinity),
        }
    }

    /// `$1,234.57` style text with thousands grouping.
    pub fn display(self, rounding: Rounding) -> String {
        let value = self.presented(rounding);
        let text = match rounding {
            Rounding::Cents => format!("{:.2}", value.abs()),
            Rounding::CeilDollar => format!("{:.0}", value.abs()),
        };
        let (int_part, frac_part) = match text.split_once('.') {
            Some((i, f)) => (i.to_string(), Some(f.to_string())),
            None => (text, None),
        };
        let sign = if value.is_sign_negative() && !value.is_zero() { "-" } else { "" };
        let mut out = format!("{sign}${}", group_thousands(&int_part));
        if let Some(f) = frac_part {
            out.push('.');
            out.push_str(&f);
        }
        out
    }

    /// Presentation value as a plain decimal string, without grouping.
    pub fn plain(self, rounding: Rounding) -> String {
        match rounding {
            Rounding::Cents => format!("{:.2}", self.presented(rounding)),
            Rounding::CeilDollar => format!("{:.0}", self.presented(rounding)),
        }
    }

    pub fn to_f64(self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

/// Inserts `,` every three digits of an unsigned digit string.
pub fn group_thousands(digits: &str) -> String {
    let bytes = digits.as_bytes();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, b) in bytes.iter().enumerate() {
        if i > 0 && (bytes.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(*b as char);
    }
    out
}

/// Presentation rounding mode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rounding {
    /// Nearest cent, halves away from zero.
    #[default]
    Cents,
    /// Up to the next whole dollar.
    CeilDollar,
}

impl FromStr for Rounding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cents" => Ok(Rounding::Cents),
            "ceil-dollar" => Ok(Rounding::CeilDollar),
            other => Err(format!("unknown rounding `{other}` (expected cents or ceil-dollar)")),
        }
    }
}

impl fmt::Display for Currency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.normalize())
    }
}

impl FromStr for Currency {
    type Err = rust_decimal::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Decimal::from_str_exact(s.trim()).map(Currency)
    }
}

impl Add for Currency {
    type Output = Currency;

    fn add(self, rhs: Currency) -> Currency {
        Currency(self.0 + rhs.0)
    }
}

impl AddAssign for Currency {
    fn add_assign(&mut self, rhs: Currency) {
        self.0 += rhs.0;
    }
}

impl Sub for Currency {
    type Output = Currency;

    fn sub(self, rhs: Currency) -> Currency {
        Currency(self.0 - rhs.0)
    }
}

impl Neg for Currency {
    type Output = Currency;

    fn neg(self) -> Currency {
        Currency(-self.0)
    }
}

impl Sum for Currency {
    fn sum<I: Iterator<Item = Currency>>(iter: I) -> Currency {
        iter.fold(Currency::ZERO, Add::add)
    }
}

impl Serialize for Currency {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Currency {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct Visitor;

        impl serde::de::Visitor<'_> for Visitor {
            type Value = Currency;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a decimal string such as \"0.0756\"")
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Currency, E> {
                v.parse::<Currency>().map_err(|e| E::custom(format!("invalid decimal `{v}`: {e}")))
            }
        }

        deserializer.deserialize_str(Visitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Currency {
        s.parse().unwrap()
    }

    #[test]
    fn cents_and_ceil_dollar_views() {
        let v = c("198.6768");
        assert_eq!(v.display(Rounding::Cents), "$198.68");
        assert_eq!(v.display(Rounding::CeilDollar), "$199");
        assert_eq!(c("227").display(Rounding::CeilDollar), "$227");
        assert_eq!(c("118035.996").display(Rounding::CeilDollar), "$118,036");
        assert_eq!(c("-1174680").display(Rounding::Cents), "-$1,174,680.00");
        assert_eq!(v.plain(Rounding::Cents), "198.68");
    }

    #[test]
    fn presenting_leaves_stored_value_alone() {
        let v = c("198.6768");
        let _ = v.presented(Rounding::CeilDollar);
        assert_eq!(v.to_string(), "198.6768");
    }

    #[test]
    fn grouping() {
        assert_eq!(group_thousands("1"), "1");
        assert_eq!(group_thousands("1000"), "1,000");
        assert_eq!(group_thousands("158124657600"), "158,124,657,600");
    }

    #[test]
    fn division_rounds_to_quotient_scale() {
        assert_eq!(c("2259").checked_div(Decimal::from(5)).unwrap(), c("451.8"));
        assert_eq!(c("1000").checked_div(Decimal::from(3)).unwrap(), c("333.3333333333"));
        assert!(c("1").checked_div(Decimal::ZERO).is_none());
    }

    #[test]
    fn serde_uses_decimal_strings() {
        let v: Currency = serde_json::from_str("\"0.0756\"").unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), "\"0.0756\"");
        assert!(serde_json::from_str::<Currency>("0.0756").is_err());
        assert!(serde_json::from_str::<Currency>("\"abc\"").is_err());
    }
}
