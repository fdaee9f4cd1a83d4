mod common;

use std::fs;
use std::path::Path;

use common::vqpool;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn stdout(out: &std::process::Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &std::process::Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn synth(dir: &Path, prefix: &str, extra: &[&str]) -> (String, String) {
    let p = dir.join(prefix).display().to_string();
    let mut args = vec!["synth", "--out-prefix", &p];
    args.extend_from_slice(extra);
    let out = vqpool(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    (format!("{p}_scores.csv"), format!("{p}_mos.csv"))
}

#[test]
fn pool_constant_video() {
    let dir = tempfile::tempdir().unwrap();
    let scores = write(
        dir.path(),
        "s.csv",
        "video_id,frame_index,score\nclip,0,3.25\nclip,1,3.25\nclip,2,3.25\n",
    );
    for method in [
        "mean",
        "hysteresis",
        "vqpooling",
        "percentile:k=50,higher_is_better=true",
    ] {
        let out = vqpool(&["pool", "--scores", &scores, "--method", method]);
        assert!(out.status.success(), "{}", stderr(&out));
        assert_eq!(stdout(&out), "video_id,score\nclip,3.25\n");
    }
}

#[test]
fn pool_flags_override_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let rows: String = (0..10).map(|i| format!("v,{i},{}\n", i + 1)).collect();
    let scores = write(dir.path(), "s.csv", &format!("video_id,frame_index,score\n{rows}"));
    let run = |extra: &[&str]| {
        let mut args = vec!["pool", "--scores", &scores, "--method", "percentile"];
        args.extend_from_slice(extra);
        stdout(&vqpool(&args))
    };
    assert_eq!(run(&[]), "video_id,score\nv,1\n");
    assert_eq!(run(&["--lower-is-better"]), "video_id,score\nv,10\n");
    assert_eq!(run(&["--percentile-k", "20"]), "video_id,score\nv,1.5\n");
}

#[test]
fn usage_and_domain_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let scores = write(
        dir.path(),
        "s.csv",
        "video_id,frame_index,score\ngood,0,1\nbad_clip,0,0\nbad_clip,1,2\n",
    );

    let out = vqpool(&["pool", "--scores", &scores, "--method", "nonsense"]);
    assert_eq!(out.status.code(), Some(1));

    let out = vqpool(&[
        "pool",
        "--scores",
        &scores,
        "--method",
        "minkowski",
        "--minkowski-p",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));

    let out = vqpool(&["pool", "--scores", &scores, "--method", "harmonic"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad_clip"));

    let out = vqpool(&["pool", "--bogus-flag"]);
    assert_eq!(out.status.code(), Some(1));

    let bad = write(dir.path(), "bad.csv", "video_id,frame_index,score\na,0,x\n");
    let out = vqpool(&["pool", "--scores", &bad, "--method", "mean"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains(":2:"));
}

#[test]
fn help_documents_defaults() {
    let out = vqpool(&["evaluate", "--help"]);
    assert!(out.status.success());
    let help = stdout(&out);
    for needle in [
        "--minkowski-p <MINKOWSKI_P>",
        "[default: 2]",
        "[default: 10]",
        "[default: 180]",
        "[default: 0.01]",
        "[default: 60]",
        "[default: 0.8]",
        "[default: 100]",
    ] {
        assert!(help.contains(needle), "missing {needle}");
    }
}

#[test]
fn evaluate_mean_rule_and_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let (scores, mos) = synth(
        dir.path(),
        "m",
        &["--videos", "40", "--frames", "30", "--noise-sd", "0", "--seed", "4"],
    );
    let args = [
        "evaluate",
        "--scores",
        &scores,
        "--mos",
        &mos,
        "--methods",
        "mean,median,variation",
        "--trials",
        "5",
    ];
    let a = vqpool(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    let md = stdout(&a);
    assert!(md.contains("| Mean | **1.000** / **1.000** |"), "{md}");
    let b = vqpool(&args);
    assert_eq!(a.stdout, b.stdout);

    let out_path = dir.path().join("r.csv").display().to_string();
    let mut with_file = args.to_vec();
    with_file.extend_from_slice(&["--format", "csv", "--out", &out_path]);
    assert!(vqpool(&with_file).status.success());
    let csv = fs::read_to_string(&out_path).unwrap();
    assert!(csv.starts_with("method,median_srcc,median_plcc,trials\nMean,1,"));
}

#[test]
fn evaluate_missing_mos_file() {
    let dir = tempfile::tempdir().unwrap();
    let (scores, _) = synth(dir.path(), "m", &["--videos", "10"]);
    let missing = dir.path().join("nope.csv").display().to_string();
    let out = vqpool(&["evaluate", "--scores", &scores, "--mos", &missing]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn evaluate_all_failed_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let rows: String = (0..10).map(|v| format!("v{v},0,2\nv{v},1,2\n")).collect();
    let scores = write(dir.path(), "s.csv", &format!("video_id,frame_index,score\n{rows}"));
    let mos_rows: String = (0..10).map(|v| format!("v{v},{}\n", 1.0 + v as f64 * 0.2)).collect();
    let mos = write(dir.path(), "m.csv", &format!("video_id,mos\n{mos_rows}"));
    let out = vqpool(&[
        "evaluate",
        "--scores",
        &scores,
        "--mos",
        &mos,
        "--methods",
        "mean",
        "--trials",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("| Mean | failed |"));
    assert!(stderr(&out).contains("undefined correlation"));
}

#[test]
fn ensemble_roundtrip_from_scores() {
    let dir = tempfile::tempdir().unwrap();
    let (scores, mos) = synth(dir.path(), "e", &["--videos", "40", "--frames", "30", "--seed", "8"]);
    let model = dir.path().join("model.txt").display().to_string();
    let out = vqpool(&[
        "ensemble-train",
        "--scores",
        &scores,
        "--mos",
        &mos,
        "--model-out",
        &model,
        "--seed",
        "1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let first = fs::read(&model).unwrap();
    assert!(vqpool(&[
        "ensemble-train",
        "--scores",
        &scores,
        "--mos",
        &mos,
        "--model-out",
        &model,
        "--seed",
        "1"
    ])
    .status
    .success());
    assert_eq!(first, fs::read(&model).unwrap());

    let out = vqpool(&["ensemble-predict", "--model", &model, "--scores", &scores]);
    assert!(out.status.success(), "{}", stderr(&out));
    let truth: Vec<f64> = fs::read_to_string(&mos)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let pred: Vec<f64> = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(pred.len(), truth.len());
    let rmse = (pred.iter().zip(&truth).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / pred.len() as f64).sqrt();
    assert!(rmse < 0.3, "rmse {rmse}");

    let text = fs::read_to_string(&model).unwrap();
    let broken = write(
        dir.path(),
        "broken.txt",
        &text.replacen("vqpool-ensemble", "something-else", 1),
    );
    let out = vqpool(&["ensemble-predict", "--model", &broken, "--scores", &scores]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ensemble_from_features() {
    let dir = tempfile::tempdir().unwrap();
    let (scores, mos) = synth(dir.path(), "f", &["--videos", "25", "--frames", "10", "--seed", "3"]);
    // Two features per frame: the score and a constant column.
    let features: String = fs::read_to_string(&scores)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| format!("{l},1\n"))
        .collect();
    let features = write(
        dir.path(),
        "feat.csv",
        &format!("video_id,frame_index,f0,f1\n{features}"),
    );
    let model = dir.path().join("model.txt").display().to_string();
    let out = vqpool(&[
        "ensemble-train",
        "--features",
        &features,
        "--mos",
        &mos,
        "--model-out",
        &model,
        "--pooling-set",
        "mean,percentile",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = vqpool(&["ensemble-predict", "--model", &model, "--features", &features]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 26);

    let narrow = write(dir.path(), "narrow.csv", "video_id,frame_index,f0\nx,0,1.0\nx,1,2.0\n");
    let out = vqpool(&["ensemble-predict", "--model", &model, "--features", &narrow]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("dimension"));
}

#[test]
fn synth_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (s1, m1) = synth(
        dir.path(),
        "a",
        &["--seed", "12", "--videos", "15", "--rule", "hysteresis-like"],
    );
    let (s2, m2) = synth(
        dir.path(),
        "b",
        &["--seed", "12", "--videos", "15", "--rule", "hysteresis-like"],
    );
    assert_eq!(fs::read(&s1).unwrap(), fs::read(&s2).unwrap());
    assert_eq!(fs::read(&m1).unwrap(), fs::read(&m2).unwrap());
    let scores = vqpool::harness::load_frame_scores(&s1).unwrap();
    let mos = vqpool::harness::load_mos(&m1).unwrap();
    assert_eq!((scores.len(), mos.len()), (15, 15));

    let p = dir.path().join("z").display().to_string();
    let out = vqpool(&["synth", "--videos", "0", "--out-prefix", &p]);
    assert_eq!(out.status.code(), Some(1));
}
