use dc_tco_core::scenario::{apply_override, CALLCENTER_NEVADA};
use dc_tco_core::{
    bundled_scenario, compare, evaluate, load_scenario, sweep, Decimal, Scenario, SweepMetric, SweepSpec,
};
use proptest::prelude::*;

fn base() -> Scenario {
    bundled_scenario(CALLCENTER_NEVADA).unwrap()
}

fn variant() -> impl Strategy<Value = Scenario> {
    (1..=5_000i64, 1..=2_000u64, 10..=100i64, 0..=20_000i64, any::<bool>()).prop_map(
        |(price, servers, load, salary, drop_overrides)| {
            let mut s = base();
            s = apply_override(&s, "facility.tariff.price_per_kwh", Decimal::new(price, 4)).unwrap();
            s = apply_override(&s, "facility.servers_total", Decimal::from(servers)).unwrap();
            s = apply_override(&s, "roles.*.target_load", Decimal::new(load, 2)).unwrap();
            s = apply_override(&s, "facility.personnel.avg_monthly_salary", Decimal::from(salary)).unwrap();
            if drop_overrides {
                for role in &mut s.roles {
                    role.outcome_override = None;
                }
            }
            s
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evaluation_is_deterministic(s in variant()) {
        let a = serde_json::to_string(&evaluate(&s).unwrap()).unwrap();
        let b = serde_json::to_string(&evaluate(&s).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn documents_round_trip(s in variant()) {
        let again = load_scenario(&s.to_json()).unwrap();
        prop_assert_eq!(&again, &s);
        prop_assert_eq!(again.to_json(), s.to_json());
    }

    #[test]
    fn comparisons_are_reciprocal(s in variant()) {
        let report = evaluate(&s).unwrap();
        let ab = compare(&report, "role1", "role3").unwrap();
        let ba = compare(&report, "role3", "role1").unwrap();
        let product = ab.users_ratio.unwrap() * ba.users_ratio.unwrap();
        prop_assert!((product - Decimal::ONE).abs() < Decimal::new(1, 20), "{product}");
        prop_assert_eq!(ab.roi_delta, -ba.roi_delta);
        if let (Some(x), Some(y)) = (ab.profit_ratio, ba.profit_ratio) {
            prop_assert!((x * y - Decimal::ONE).abs() < Decimal::new(1, 20));
        }
    }

    #[test]
    fn facility_costs_scale_with_servers(s in variant()) {
        let report = evaluate(&s).unwrap();
        for role in &report.roles {
            let server = &role.costs.server;
            let facility = &role.costs.facility;
            let n = report.servers_total;
            prop_assert_eq!(facility.power, server.power.checked_mul_int(n).unwrap());
            prop_assert_eq!(facility.cooling, server.cooling.checked_mul_int(n).unwrap());
            prop_assert_eq!(facility.hardware_software, server.hardware_software.checked_mul_int(n).unwrap());
            prop_assert_eq!(facility.total, facility.power + facility.cooling + facility.hardware_software + facility.personnel);
            prop_assert_eq!(role.users_per_year_facility, role.users_per_year_per_server * n);
        }
    }

    #[test]
    fn singleton_sweep_matches_evaluate(s in variant(), price in 0..=1_000i64, metric_index in 0..SweepMetric::ALL.len()) {
        let value = Decimal::new(price, 2);
        let metric = SweepMetric::ALL[metric_index];
        let spec = SweepSpec {
            parameter_path: "economics.price_per_contact".into(),
            values: vec![value],
            metric,
            role: Some("role2".into()),
        };
        let swept = sweep(&s, &spec).unwrap();
        let direct = evaluate(&apply_override(&s, "economics.price_per_contact", value).unwrap());
        match direct {
            Ok(report) => prop_assert_eq!(swept.points[0].metric, Some(metric.extract(report.role("role2").unwrap()))),
            Err(err) => prop_assert_eq!(swept.points[0].error.as_ref(), Some(&err.to_record())),
        }
    }
}
