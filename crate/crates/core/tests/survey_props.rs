use lee_core::caps::Caps;
use lee_core::criteria::{CriterionId, Status};
use lee_core::survey::*;
use proptest::prelude::*;

fn quick_caps() -> Caps {
    Caps { max_field_degree: 40, search_node_budget: 1_000_000, ..Caps::default() }
}

fn subset() -> impl Strategy<Value = Vec<CriterionId>> {
    let cheap = vec![CriterionId::FourPower, CriterionId::SmallDivisor, CriterionId::Lambda, CriterionId::SevenDivisor];
    prop::sample::subsequence(cheap, 0..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn adding_criteria_never_lowers_counts(a in subset(), b in subset(), upto in 10u64..400, r in 2u64..=3) {
        let caps = quick_caps();
        let small = counts(r, upto, &a, &caps).unwrap();
        let joined: Vec<CriterionId> = a.iter().chain(&b).copied().collect();
        let large = counts(r, upto, &joined, &caps).unwrap();
        prop_assert!(small.excluded <= large.excluded);
    }

    #[test]
    fn reports_round_trip(from in 2u64..300, len in 0u64..20) {
        let caps = quick_caps();
        let opts = CheckOptions::restricted([CriterionId::FourPower, CriterionId::SmallDivisor, CriterionId::Lambda]);
        let verdicts = scan(2, from, from + len, &caps, &opts).unwrap();
        let report = Report::new(&caps, verdicts);
        let json = emit(&report, Format::Json).unwrap();
        prop_assert_eq!(&parse_json(&json).unwrap(), &report);
        prop_assert_eq!(&emit(&report, Format::Json).unwrap(), &json);
        let csv = emit(&report, Format::Csv).unwrap();
        let rows = parse_csv(&csv).unwrap();
        let expected: Vec<CsvRow> = report.verdicts.iter().map(CsvRow::from).collect();
        prop_assert_eq!(rows, expected);
    }

    #[test]
    fn scans_agree_with_single_checks(from in 2u64..200) {
        let caps = quick_caps();
        let opts = CheckOptions::restricted([CriterionId::FourPower, CriterionId::SmallDivisor]);
        let verdicts = scan(2, from, from + 5, &caps, &opts).unwrap();
        for (n, v) in (from..=from + 5).zip(&verdicts) {
            prop_assert_eq!(v, &check(n, 2, &caps, &opts).unwrap());
        }
    }

    /// More budget never turns an exclusion back into an open case.
    #[test]
    fn raising_caps_keeps_exclusions(n in 2u64..300) {
        let low = Caps { max_field_degree: 8, search_node_budget: 10_000, ..Caps::default() };
        let high = quick_caps();
        let opts = CheckOptions::restricted([CriterionId::FourPower, CriterionId::SmallDivisor, CriterionId::Lambda, CriterionId::FieldConditions]);
        let before = check(n, 2, &low, &opts).unwrap();
        let after = check(n, 2, &high, &opts).unwrap();
        if before.overall.is_excluded() {
            prop_assert!(after.overall.is_excluded());
        }
    }
}

#[test]
fn spot_checks() {
    let caps = Caps::default();
    let audit = CheckOptions::audit();
    let v = check(57, 2, &caps, &audit).unwrap();
    let fired = v.excluded_by();
    assert!(fired.contains(&CriterionId::FourPower) && fired.contains(&CriterionId::SmallDivisor), "{fired:?}");
    assert_eq!(check(16, 2, &caps, &audit).unwrap().overall, Overall::Open);
    let twenty = check(20, 2, &caps, &audit).unwrap();
    assert!(twenty.overall.is_excluded());
    assert!(twenty.excluded_by().iter().all(|c| matches!(c, CriterionId::Lambda | CriterionId::FieldConditions)));
    for r in [2, 3] {
        let two = check(2, r, &caps, &audit);
        if let Ok(two) = two {
            assert!(!two.overall.is_excluded());
        }
    }
}

#[test]
fn early_exit_keeps_the_overall_verdict() {
    let caps = quick_caps();
    for n in 2..120 {
        let full = check(n, 2, &caps, &CheckOptions::audit()).unwrap();
        let quick = check(n, 2, &caps, &CheckOptions::scanning()).unwrap();
        assert_eq!(full.overall.is_excluded(), quick.overall.is_excluded(), "n={n}");
        assert!(quick.outcomes.len() <= full.outcomes.len());
    }
}

#[test]
fn published_column_counts() {
    let caps = Caps::default();
    let one = |c, upto| counts(2, upto, &[c], &caps).unwrap();
    assert_eq!(one(CriterionId::FourPower, 100).excluded, 68);
    let small = one(CriterionId::SmallDivisor, 100);
    assert_eq!(small.excluded, 38);
    assert_eq!(small.small_divisor_by_v.values().copied().collect::<Vec<_>>(), [27, 8, 8]);
    assert_eq!(one(CriterionId::Lambda, 100).excluded, 44);
    assert_eq!(counts(3, 100, &[CriterionId::SevenDivisor], &caps).unwrap().excluded, 20);
    assert_eq!(counts(3, 1000, &[CriterionId::SevenDivisor], &caps).unwrap().excluded, 256);
}

#[test]
fn input_errors() {
    let caps = Caps::default();
    assert!(matches!(check(5, 4, &caps, &CheckOptions::audit()), Err(SurveyError::BadRadius(4))));
    assert!(matches!(check(1, 2, &caps, &CheckOptions::audit()), Err(SurveyError::BadDimension { .. })));
    assert!(matches!(check(2, 3, &caps, &CheckOptions::audit()), Err(SurveyError::BadDimension { .. })));
    assert!(matches!(scan(2, 9, 3, &caps, &CheckOptions::audit()), Err(SurveyError::EmptyRange { .. })));
    assert!(parse_json("{").is_err());
    let missing = write_report("/nonexistent/dir/out.json", &Report::new(&caps, vec![]), Format::Json);
    assert!(matches!(missing, Err(SurveyError::Io { .. })));
}

#[test]
fn skipped_outcomes_are_reported() {
    let caps = Caps { max_field_degree: 2, ..Caps::default() };
    let v = check(14, 2, &caps, &CheckOptions::audit()).unwrap();
    assert!(v.skipped().contains(&CriterionId::FieldConditions));
    assert!(v.outcomes.iter().any(|o| matches!(o.status, Status::Skipped(_))));
}

#[test]
fn caps_files_round_trip() {
    let caps = Caps { max_field_degree: 33, seed: 9, thread_count: 4, ..Caps::default() };
    assert_eq!(caps.to_string().parse::<Caps>().unwrap(), caps);
    let text = "# comment\nmax_field_degree = 12\nsearch_node_budget = 1_000\n";
    let parsed: Caps = text.parse().unwrap();
    assert_eq!((parsed.max_field_degree, parsed.search_node_budget), (12, 1000));
    assert!("bogus = 1".parse::<Caps>().is_err());
    assert!("max_field_degree = 0".parse::<Caps>().is_err());
}
