use std::fs;

use vqpool::harness::io::{frame_scores_csv, mos_csv};
use vqpool::harness::*;
use vqpool::pooling::pool_mean;
use vqpool::{Error, FrameScores, PoolingSpec};

fn mean_rule_dataset(n: usize) -> Dataset {
    let synth = synth_generate(&SynthSpec {
        n_videos: n,
        frames_per_video: 40,
        noise_sd: 0.0,
        seed: 17,
        ..SynthSpec::default()
    })
    .unwrap();
    let records: Vec<VideoRecord> = synth
        .records
        .into_iter()
        .map(|mut r| {
            r.mos = pool_mean(r.frame_scores.as_ref().unwrap());
            r
        })
        .collect();
    let lo = records.iter().map(|r| r.mos).fold(f64::INFINITY, f64::min);
    let hi = records.iter().map(|r| r.mos).fold(f64::NEG_INFINITY, f64::max);
    Dataset::new(records, (lo, hi), true).unwrap()
}

fn pools(names: &[&str]) -> Vec<EvalMethod> {
    names
        .iter()
        .map(|n| EvalMethod::Pool(PoolingSpec::with_defaults(n).unwrap()))
        .collect()
}

#[test]
fn mean_rule_gives_perfect_mean_srcc() {
    let data = mean_rule_dataset(50);
    let report = run_pooling_evaluation(&data, &EvalConfig::new(pools(&["mean", "percentile"]), 10, 3)).unwrap();
    assert_eq!(report.methods[0].median_srcc, Some(1.0));
    assert!(report.methods[0]
        .trials
        .iter()
        .all(|t| t.result.as_ref().unwrap().srcc == 1.0));
}

#[test]
fn evaluation_is_deterministic_and_schedule_free() {
    let data = mean_rule_dataset(30);
    let mut methods = pools(&["mean", "vqpooling", "hysteresis"]);
    methods.push(EvalMethod::epooling_default());
    let mut config = EvalConfig::new(methods, 4, 99);
    let a = run_pooling_evaluation(&data, &config).unwrap();
    let b = run_pooling_evaluation(&data, &config).unwrap();
    config.parallel = true;
    let c = run_pooling_evaluation(&data, &config).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(emit_report(&a, ReportFormat::Csv), emit_report(&c, ReportFormat::Csv));
}

#[test]
fn stored_medians_match_trials() {
    let data = mean_rule_dataset(40);
    let report = run_pooling_evaluation(&data, &EvalConfig::new(pools(&["median", "recency"]), 7, 1)).unwrap();
    for m in &report.methods {
        assert_eq!(m.trials.len(), 7);
        let srcc: Vec<f64> = m.trials.iter().map(|t| t.result.as_ref().unwrap().srcc).collect();
        assert_eq!(m.median_srcc, Some(vqpool::stats::median_of(&srcc).unwrap()));
    }
}

#[test]
fn constant_videos_fail_every_trial() {
    let records = (0..10)
        .map(|i| VideoRecord {
            id: format!("v{i}"),
            mos: 1.0 + i as f64 * 0.3,
            frame_scores: Some(FrameScores::new(vec![2.0; 12]).unwrap()),
            frame_features: None,
        })
        .collect();
    let data = Dataset::new(records, (1.0, 3.7), true).unwrap();
    let report = run_pooling_evaluation(&data, &EvalConfig::new(pools(&["mean"]), 5, 0)).unwrap();
    let m = &report.methods[0];
    assert!(m.failed());
    for t in &m.trials {
        assert!(t.result.as_ref().unwrap_err().contains("undefined correlation"));
    }
    let md = emit_report(&report, ReportFormat::Markdown);
    assert!(md.contains("| Mean | failed |"));
}

#[test]
fn features_run_through_phase_one() {
    // One feature per frame equal to its score: phase 1 has to learn the
    // identity map.
    let synth = synth_generate(&SynthSpec {
        n_videos: 30,
        frames_per_video: 20,
        seed: 2,
        ..SynthSpec::default()
    })
    .unwrap();
    let records: Vec<VideoRecord> = synth
        .records
        .into_iter()
        .map(|r| VideoRecord {
            frame_features: Some(r.frame_scores.as_ref().unwrap().iter().map(|q| vec![*q]).collect()),
            frame_scores: None,
            ..r
        })
        .collect();
    let data = Dataset::new(records, synth.mos_scale, true).unwrap();
    let mut config = EvalConfig::new(pools(&["mean"]), 2, 8);
    config.frame_stride = 2;
    let report = run_pooling_evaluation(&data, &config).unwrap();
    assert!(report.methods[0].median_srcc.unwrap() > 0.8);
    config.phase_one = PhaseOneMode::Nested;
    config.methods.push(EvalMethod::epooling_default());
    let nested = run_pooling_evaluation(&data, &config).unwrap();
    assert_eq!(nested.methods.len(), 2);
}

#[test]
fn split_examples() {
    let (train, test) = split_indices(10, 0.8, 1).unwrap();
    assert_eq!((train.len(), test.len()), (8, 2));
    let (train, test) = split_indices(5, 0.8, 1).unwrap();
    assert_eq!((train.len(), test.len()), (4, 1));
    assert_eq!(split_indices(50, 0.8, 42).unwrap(), split_indices(50, 0.8, 42).unwrap());
    assert_ne!(derive_seed(7, 0), derive_seed(7, 1));
}

#[test]
fn file_roundtrip_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_generate(&SynthSpec {
        n_videos: 4,
        frames_per_video: 5,
        ..SynthSpec::default()
    })
    .unwrap();
    let scores = dir.path().join("scores.csv");
    let mos = dir.path().join("mos.csv");
    fs::write(&scores, frame_scores_csv(&data)).unwrap();
    fs::write(&mos, mos_csv(&data)).unwrap();
    let back = assemble_dataset(
        load_mos(&mos).unwrap(),
        Some(load_frame_scores(&scores).unwrap()),
        None,
        true,
    )
    .unwrap();
    assert_eq!(back.records, data.records);

    fs::write(&mos, "video_id,mos\nsynth_0000,3\nghost,2\n").unwrap();
    let err = assemble_dataset(
        load_mos(&mos).unwrap(),
        Some(load_frame_scores(&scores).unwrap()),
        None,
        true,
    );
    match err {
        Err(Error::UnmatchedIds(msg)) => assert!(msg.contains("ghost")),
        other => panic!("{other:?}"),
    }

    fs::write(&scores, "video_id,frame_index,score\na,0,1.0\na,1,oops\n").unwrap();
    match load_frame_scores(&scores) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    assert!(matches!(load_mos(dir.path().join("absent.csv")), Err(Error::Io { .. })));
}

#[test]
fn two_video_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let scores = dir.path().join("s.csv");
    let mos = dir.path().join("m.csv");
    fs::write(&scores, "video_id,frame_index,score\nb,1,2.0\nb,0,1.0\na,0,4.0\n").unwrap();
    fs::write(&mos, "video_id,mos\na,4.2\nb,1.5\n").unwrap();
    let d = assemble_dataset(
        load_mos(&mos).unwrap(),
        Some(load_frame_scores(&scores).unwrap()),
        None,
        true,
    )
    .unwrap();
    assert_eq!(d.len(), 2);
    assert_eq!(d.records[1].frame_scores.as_ref().unwrap().as_slice(), &[1.0, 2.0]);
}

#[test]
fn report_csv_parses_back() {
    let data = mean_rule_dataset(30);
    let report = run_pooling_evaluation(
        &data,
        &EvalConfig::new(pools(&["mean", "geometric", "vqpooling", "percentile"]), 5, 2),
    )
    .unwrap();
    let (summary, trials) = parse_report_csv(&emit_report(&report, ReportFormat::Csv)).unwrap();
    assert_eq!(summary.len(), 4);
    assert_eq!(trials.len(), 20);
    for (row, m) in summary.iter().zip(&report.methods) {
        assert_eq!(row.median_srcc, m.median_srcc);
        assert_eq!(row.median_plcc, m.median_plcc);
    }
    let md = emit_report(&report, ReportFormat::Markdown);
    let srcc_bold = md.lines().filter(|l| l.starts_with("| ") && l.contains("| **")).count();
    let plcc_bold = md.lines().filter(|l| l.contains("/ **")).count();
    assert_eq!((srcc_bold, plcc_bold), (3, 3));
}
