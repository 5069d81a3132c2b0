use volcp_core::cusum::test_constant_vol;
use volcp_core::global_test::test_global;
use volcp_core::local_test::test_vol_jump;
use volcp_core::montecarlo::{run_study, StudyConfig};
use volcp_core::simulate::simulate_ito;
use volcp_core::{
    detect_multiple, BlockConfig, CriticalValueSource, GlobalMode, GlobalTestConfig, LocalTestConfig, PathScenario,
    Preset, TestReport, TruncationRule,
};

fn json_round_trip<T>(value: &T) -> T
where
    T: serde::Serialize + serde::de::DeserializeOwned,
{
    serde_json::from_str(&serde_json::to_string(value).unwrap()).unwrap()
}

#[test]
fn pipeline_outputs_round_trip_through_json() {
    let d = simulate_ito(&Preset::SvJump.scenario(2000, 4))
        .unwrap()
        .prices
        .increments()
        .into_inner();
    let mut local = LocalTestConfig::new(BlockConfig::new(44).truncated(TruncationRule::scaled(1.0)));
    local.critical = CriticalValueSource::Bootstrap {
        replications: 200,
        seed: 1,
    };
    let global = GlobalTestConfig {
        mode: GlobalMode::StandardizedKs,
        ..GlobalTestConfig::new(2000, 2)
    };
    let reports: Vec<TestReport> = vec![
        test_constant_vol(&d, 0.05).unwrap(),
        test_vol_jump(&d, &local).unwrap(),
        test_global(&d, &global).unwrap(),
    ];
    assert_eq!(json_round_trip(&reports), reports);

    let cp = detect_multiple(&d, &LocalTestConfig::new(BlockConfig::new(44)), None).unwrap();
    assert_eq!(json_round_trip(&cp), cp);

    let study = run_study(&StudyConfig::new(Preset::SvNull, 500, 5, 3), Some(1)).unwrap();
    assert_eq!(json_round_trip(&study), study);
}

#[test]
fn scenarios_round_trip_through_json() {
    for preset in Preset::ALL {
        let s = preset.scenario(1000, 8);
        assert_eq!(json_round_trip(&s), s);
    }
    let s = PathScenario::brownian(100, 0.3, 1);
    assert_eq!(json_round_trip(&s), s);
}
