use dc_tco_core::economics::{self, EconomicAssumptions, RoiConvention};
use dc_tco_core::model::{self, CostBreakdown, PeriodCost};
use dc_tco_core::utilization::{self, RoleWorkloadProfile, SecurityLevel, UtilizationModel};
use dc_tco_core::{CoolingProfile, Currency, Decimal, EnergyTariff, Rounding};
use proptest::prelude::*;

fn decimal(max_mantissa: i64, max_scale: u32) -> impl Strategy<Value = Decimal> {
    (1..=max_mantissa, 0..=max_scale).prop_map(|(m, s)| Decimal::new(m, s))
}

fn money(max_mantissa: i64) -> impl Strategy<Value = Currency> {
    (0..=max_mantissa, 0..=4u32).prop_map(|(m, s)| Currency::new(Decimal::new(m, s)))
}

fn tariff() -> impl Strategy<Value = EnergyTariff> {
    (money(10_000), (1..=1200i64).prop_map(|h| Decimal::new(h, 2)), 1..=3650u32)
        .prop_map(|(price_per_kwh, hours_per_day, days)| EnergyTariff { price_per_kwh, hours_per_day, days })
}

fn breakdown() -> impl Strategy<Value = CostBreakdown> {
    (money(10_000_000_000), money(10_000_000_000), money(10_000_000_000), money(10_000_000_000)).prop_map(
        |(p, c, h, s)| {
            model::total_cost(
                PeriodCost::annual(p),
                PeriodCost::annual(c),
                PeriodCost::annual(h),
                PeriodCost::annual(s),
            )
            .unwrap()
        },
    )
}

fn profile(session: Decimal, load: Decimal) -> RoleWorkloadProfile {
    RoleWorkloadProfile {
        role_name: "p".into(),
        security_level: SecurityLevel::Medium,
        security_mechanism: String::new(),
        session_busy_seconds: session,
        target_load: load,
        access_types_and_data_sizes: Vec::new(),
    }
}

fn load_fraction() -> impl Strategy<Value = Decimal> {
    (1..=100i64).prop_map(|p| Decimal::new(p, 2))
}

proptest! {
    #[test]
    fn power_cost_is_linear_in_each_factor(kw in decimal(100_000, 4), t in tariff()) {
        let base = model::power_cost(kw, &t).unwrap();
        let two = Decimal::TWO;
        let by_kw = model::power_cost(kw * two, &t).unwrap();
        let by_hours = model::power_cost(kw, &EnergyTariff { hours_per_day: t.hours_per_day * two, ..t.clone() }).unwrap();
        let by_days = model::power_cost(kw, &EnergyTariff { days: t.days * 2, ..t.clone() }).unwrap();
        let by_price = model::power_cost(kw, &EnergyTariff { price_per_kwh: t.price_per_kwh.checked_mul(two).unwrap(), ..t.clone() }).unwrap();
        let doubled = base.checked_mul(two).unwrap();
        prop_assert_eq!(by_kw, doubled);
        prop_assert_eq!(by_hours, doubled);
        prop_assert_eq!(by_days, doubled);
        prop_assert_eq!(by_price, doubled);
    }

    #[test]
    fn mirror_cooling_equals_power(kw in decimal(100_000, 4), t in tariff(), extra in money(1_000_000)) {
        let it = model::power_cost(kw, &t).unwrap() + extra;
        prop_assert_eq!(model::cooling_cost(&CoolingProfile::mirror(), it, &t).unwrap(), it);
    }

    #[test]
    fn breakdown_total_is_exact_sum(b in breakdown()) {
        prop_assert_eq!(b.total, b.power + b.cooling + b.hardware_software + b.personnel);
    }

    #[test]
    fn breakdowns_are_additive(a in breakdown(), b in breakdown()) {
        let sum = a.checked_add(&b).unwrap();
        prop_assert_eq!(sum.total, a.total + b.total);
    }

    #[test]
    fn facility_scaling_is_exact(b in breakdown(), n in 1..=100_000u64) {
        let scaled = b.scale_servers(n).unwrap();
        prop_assert_eq!(scaled.power, b.power.checked_mul_int(n).unwrap());
        prop_assert_eq!(scaled.cooling, b.cooling.checked_mul_int(n).unwrap());
        prop_assert_eq!(scaled.hardware_software, b.hardware_software.checked_mul_int(n).unwrap());
        prop_assert_eq!(scaled.personnel, b.personnel);
    }

    #[test]
    fn presentation_never_touches_stored_values(v in money(1_000_000_000_000)) {
        let before = v.to_string();
        for rounding in [Rounding::Cents, Rounding::CeilDollar] {
            let shown = v.plain(rounding);
            let reread: Currency = shown.parse().unwrap();
            prop_assert!((reread - v).amount().abs() < Decimal::ONE);
        }
        prop_assert_eq!(v.to_string(), before);
    }

    #[test]
    fn calibration_round_trips(u in 1..=1_000_000u64, tenth in 1..=10i64) {
        let load = Decimal::new(tenth, 1);
        let session = utilization::calibrate_session_time(u, load).unwrap();
        let users = utilization::users_at_load(&profile(session, load), Decimal::from(3600)).unwrap();
        prop_assert_eq!(users, u);
    }

    #[test]
    fn users_monotone(session in decimal(1_000_000, 6), l1 in load_fraction(), l2 in load_fraction(), grow in decimal(1000, 2)) {
        let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
        let hour = Decimal::from(3600);
        prop_assert!(utilization::users_at_load(&profile(session, lo), hour).unwrap()
            <= utilization::users_at_load(&profile(session, hi), hour).unwrap());
        prop_assert!(utilization::users_at_load(&profile(session + grow, lo), hour).unwrap()
            <= utilization::users_at_load(&profile(session, lo), hour).unwrap());
    }

    #[test]
    fn load_equation_is_consistent(session in decimal(10_000_000, 7), load in load_fraction(), users in 1..=1_000_000u64) {
        let p = profile(session, load);
        let busy = session * Decimal::from(users);
        let idle = utilization::idle_seconds(&p, users).unwrap();
        let model = UtilizationModel::new(busy + idle, 1).unwrap();
        let u = utilization::utilization(busy, &model).unwrap();
        let rel: f64 = ((u - load).abs() / load).try_into().unwrap();
        prop_assert!(rel <= 1e-9, "relative error {rel}");
    }

    #[test]
    fn utilization_scale_invariant(busy in decimal(1_000_000, 3), extra in decimal(1_000_000, 3), k in decimal(10_000, 2), cores in 1..=64u32) {
        let cap = busy + extra;
        let a = utilization::utilization(busy, &UtilizationModel::new(cap, cores).unwrap()).unwrap();
        let b = utilization::utilization(busy * k, &UtilizationModel::new(cap * k, cores).unwrap()).unwrap();
        let diff: f64 = (a - b).abs().try_into().unwrap();
        prop_assert!(diff < 1e-20);
    }

    #[test]
    fn roi_scale_invariant(p in money(1_000_000_000), o in money(1_000_000_000), k in 1..=1_000_000u64) {
        prop_assume!(!o.is_zero());
        let a = economics::roi(p, o).unwrap();
        let b = economics::roi(p.checked_mul_int(k).unwrap(), o.checked_mul_int(k).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn profit_antisymmetric(i in money(1_000_000_000_000), o in money(1_000_000_000_000)) {
        prop_assert_eq!(economics::profit(i, o), -economics::profit(o, i));
    }

    #[test]
    fn paper_convention_is_linear(i in money(1_000_000_000), o in money(1_000_000_000), years in 1..=30u32) {
        prop_assume!(!o.is_zero());
        let a = EconomicAssumptions { price_per_contact: Currency::ZERO, analysis_years: years, roi_convention: RoiConvention::Paper };
        let p = economics::project(i, o, &a).unwrap();
        for y in &p.years {
            prop_assert_eq!(y.cumulative_roi, p.first_year().roi * Decimal::from(y.year));
        }
        let total: Currency = p.years.iter().map(|y| y.profit).sum();
        prop_assert_eq!(p.cumulative_profit, total);
    }

    #[test]
    fn conventions_agree_in_year_one(i in money(1_000_000_000), o in money(1_000_000_000), years in 1..=10u32) {
        prop_assume!(!o.is_zero());
        let mk = |c| EconomicAssumptions { price_per_contact: Currency::ZERO, analysis_years: years, roi_convention: c };
        let paper = economics::project(i, o, &mk(RoiConvention::Paper)).unwrap();
        let cumulative = economics::project(i, o, &mk(RoiConvention::Cumulative)).unwrap();
        prop_assert_eq!(paper.first_year().cumulative_roi, cumulative.first_year().cumulative_roi);
        prop_assert!(cumulative.years.iter().all(|y| y.cumulative_roi == cumulative.first_year().roi));
    }
}
