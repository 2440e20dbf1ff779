use std::fs;

use proptest::prelude::*;
use spectrum_auction::agents::Strategy as Policy;
use spectrum_auction::auction::AuctionRule;
use spectrum_auction::config::{
    parse_config, FeeSchedule, FeeSegment, ScenarioConfig, Scheme, TopologySpec, PRESETS,
};
use spectrum_auction::report::{run_scenario, summarize, RunResult, SummaryRow, SUMMARY_HEADER};

#[test]
fn empty_document_is_default() {
    assert_eq!(parse_config("").unwrap(), ScenarioConfig::default());
}

#[test]
fn presets_parse_by_key() {
    for p in PRESETS {
        let cfg = parse_config(&format!("preset = \"{p}\"\n")).unwrap();
        assert_eq!(cfg, ScenarioConfig::preset(p).unwrap());
    }
}

#[test]
fn diagnostics_carry_line_numbers() {
    let err = parse_config("num_sus = 2\n\nnu = 0\n").unwrap_err();
    assert_eq!(err.line, Some(3));
    let err = parse_config("bogus = 1\n").unwrap_err();
    assert_eq!(err.line, Some(1));
    assert!(err.to_string().contains("bogus"));
}

#[test]
fn summary_rows_round_trip_through_csv() {
    let results: Vec<RunResult> = (0..7u32)
        .flat_map(|rep| {
            ["threshold", "myopic"].map(|scheme| RunResult {
                label: "x=1".into(),
                scheme: scheme.into(),
                replication: rep,
                final_gamma: vec![
                    (f64::from(rep) + 1.0) / 3.0 + if scheme == "myopic" { 0.0 } else { 0.1 },
                    std::f64::consts::PI / f64::from(rep + 2),
                ],
                final_jain: 0.7 + f64::from(rep) * 1e-7,
            })
        })
        .collect();
    let rows = summarize(&results);
    assert!(rows.iter().any(|r| r.gain_pct.is_some()));
    let mut w = csv::Writer::from_writer(Vec::new());
    spectrum_auction::report::write_summary(&mut w, &rows).unwrap();
    let bytes = w.into_inner().unwrap();
    let mut r = csv::Reader::from_reader(bytes.as_slice());
    assert_eq!(r.headers().unwrap(), SUMMARY_HEADER.as_slice());
    let back: Vec<SummaryRow> = r
        .records()
        .map(|rec| SummaryRow::from_record(&rec.unwrap()).unwrap())
        .collect();
    assert_eq!(back, rows);
}

#[test]
fn scenario_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::preset("fig2").unwrap();
    cfg.horizon = 100;
    cfg.replications = 2;
    let report = run_scenario(&cfg, dir.path(), Some(1)).unwrap();
    let slots = fs::read_to_string(report.slots_path.unwrap()).unwrap();
    assert!(slots.starts_with(
        "label,scheme,replication,slot,su_id,gamma,bid,action,payment,jain_f,channel,valuation\n"
    ));
    assert_eq!(slots.lines().count(), 1 + 2 * 2 * 100 * 2);
    assert!(slots.ends_with('\n'));
    let again = parse_config(&fs::read_to_string(report.config_path).unwrap()).unwrap();
    assert_eq!(again, cfg);
}

fn strategy() -> impl Strategy<Value = Policy> {
    prop::sample::select(Policy::ALL.to_vec())
}

fn fee() -> impl Strategy<Value = f64> {
    prop_oneof![(0u32..20).prop_map(f64::from), 0.0f64..100.0]
}

prop_compose! {
    fn config()(
        num_sus in 1usize..6,
        num_channels in 1usize..4,
        horizon in 0u64..100_000,
        fees in prop_oneof![
            (fee(), fee()).prop_map(|(c, e)| FeeSchedule::constant(c, e)),
            proptest::collection::vec((1u64..5000, fee(), fee()), 1..4).prop_map(|v| {
                let mut segs = vec![FeeSegment { start: 0, entry: 1.0, monitor: 2.0 }];
                let mut start = 0;
                for (gap, entry, monitor) in v {
                    start += gap;
                    segs.push(FeeSegment { start, entry, monitor });
                }
                FeeSchedule::from_segments(segs).unwrap()
            }),
        ],
        bandwidth in 0.1f64..10.0,
        tx_power in 1e-3f64..1.0,
        doppler in 0.0f64..500.0,
        snr_includes_power in any::<bool>(),
        area in 1.0f64..200.0,
        pu_prob in 0.0f64..1.0,
        windows in proptest::collection::vec((0u64..1000, 1u64..500), 0..3),
        schemes in proptest::collection::vec(strategy(), 1..4),
        alpha in 0.001f64..1.0,
        nu in 1usize..50,
        kappa_init in 0.0f64..10.0,
        first_price in any::<bool>(),
        per_channel in any::<bool>(),
        seed in any::<u64>(),
        replications in 0u32..50,
        write_trace in any::<bool>(),
        explicit in proptest::option::of(proptest::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 6)),
        sweep_n in proptest::collection::vec(1usize..20, 0..3),
        sweep_fees in proptest::collection::vec(fee(), 0..3),
    ) -> ScenarioConfig {
        let mut c = ScenarioConfig {
            num_sus,
            num_channels,
            horizon,
            fees,
            alpha,
            nu,
            kappa_init,
            seed,
            replications,
            write_trace,
            monitor_fee_per_channel: per_channel,
            rule: if first_price { AuctionRule::FirstPrice } else { AuctionRule::SecondPrice },
            schemes: schemes.into_iter().map(Scheme::uniform).collect(),
            topology: TopologySpec::Random { area_side: area, bs_distance: 1000.0 },
            ..ScenarioConfig::default()
        };
        c.radio.bandwidth = bandwidth;
        c.radio.tx_power = tx_power;
        c.radio.doppler_freq = doppler;
        c.radio.snr_includes_power = snr_includes_power;
        c.pu.prob = vec![pu_prob];
        c.pu.windows = windows.into_iter().map(|(s, len)| (s, s + len)).collect();
        match explicit {
            Some(points) => {
                c.topology = TopologySpec::Explicit {
                    positions: points[..num_sus].iter().map(|&(x, y)| [x, y]).collect(),
                    basestation: [500.0, -3.25],
                };
            }
            None => c.sweep.num_sus = sweep_n,
        }
        if c.fees.is_constant() {
            c.sweep.entry_fee = sweep_fees.clone();
            c.sweep.monitor_fee = sweep_fees.into_iter().rev().collect();
        }
        c
    }
}

proptest! {
    #[test]
    fn serialize_then_parse_is_identity(cfg in config()) {
        prop_assume!(cfg.validate().is_ok());
        let text = cfg.to_toml_string();
        let back = parse_config(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, cfg);
    }
}
