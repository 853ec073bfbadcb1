//! End-to-end contract tests for the `embdebias` binary, run against the
//! checked-in fixture table (54 words, 10 dimensions, planted gender and
//! frequency structure).

mod common;

use std::fs;

use common::{exit_code, fixture, read_json, run, run_ok, schema, stdout_json, validate};
use debias_core::debias::DEFINITIONAL_PAIRS;
use debias_core::synth::{generate, SynthConfig};
use debias_core::{DebiasConfig, EmbeddingSet};
use serde_json::{json, Value};

/// The generator settings behind fixtures/tiny_vectors.txt.
fn fixture_synth_config() -> SynthConfig {
    SynthConfig { group_size: 15, dim: 10, seed: 31415, ..SynthConfig::default() }
}

/// Guards against stale fixtures: the checked-in table must be exactly
/// what the generator example writes today. Text round-trip is lossless,
/// so equality is exact.
#[test]
fn fixture_table_matches_its_generator() {
    let data = generate(&fixture_synth_config());
    let loaded = EmbeddingSet::load_glove_text(fixture("tiny_vectors.txt")).expect("fixture loads");
    assert_eq!(loaded.tokens(), data.set.tokens());
    assert_eq!(loaded.matrix(), data.set.matrix());
}

#[test]
fn debias_selects_the_planted_component() {
    let data = generate(&fixture_synth_config());
    let planted = data
        .planted_component(&DebiasConfig::default())
        .expect("planted axis identifiable");

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("debiased.txt").display().to_string();
    let report_path = dir.path().join("report.json");
    let report_arg = report_path.display().to_string();
    let (input, pairs, specific) = (
        fixture("tiny_vectors.txt"),
        fixture("pairs.csv"),
        fixture("specific.txt"),
    );
    run_ok(&[
        "debias",
        "--input", &input,
        "--output", &out,
        "--pairs", &pairs,
        "--specific", &specific,
        "--report", &report_arg,
    ]);

    let report = read_json(&report_path);
    assert_eq!(report["discovery"]["selected_index"], json!(planted));
    assert_eq!(report["command"], json!("debias"));
    assert_eq!(report["input_table"]["words"], json!(54));
    assert_eq!(report["input_table"]["dim"], json!(10));
}

#[test]
fn rerun_with_the_same_settings_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("debiased.txt");
    let report = dir.path().join("report.json");
    let (out_arg, report_arg) = (out.display().to_string(), report.display().to_string());
    let (input, pairs, specific) = (
        fixture("tiny_vectors.txt"),
        fixture("pairs.csv"),
        fixture("specific.txt"),
    );
    let args = [
        "debias",
        "--input", input.as_str(),
        "--output", out_arg.as_str(),
        "--pairs", pairs.as_str(),
        "--specific", specific.as_str(),
        "--report", report_arg.as_str(),
        "--seed", "9001",
    ];

    run_ok(&args);
    let first_table = fs::read(&out).unwrap();
    let first_report = fs::read(&report).unwrap();
    run_ok(&args);
    assert_eq!(first_table, fs::read(&out).unwrap(), "embedding bytes changed across reruns");
    assert_eq!(first_report, fs::read(&report).unwrap(), "report bytes changed across reruns");
}

/// Runs the full eval battery through the binary and returns the metrics
/// section.
fn eval_metrics(input: &str, compare: Option<&str>) -> Value {
    let (pairs, specific, weat, analogy, categories) = (
        fixture("pairs.csv"),
        fixture("specific.txt"),
        fixture("weat_gender.txt"),
        fixture("analogy.txt"),
        fixture("categories.csv"),
    );
    let mut args = vec![
        "eval",
        "--input", input,
        "--metrics", "neighborhood,weat,analogy,categorization,pairdiff",
        "--pairs", &pairs,
        "--specific", &specific,
        "--weat", &weat,
        "--analogy", &analogy,
        "--categories", &categories,
    ];
    if let Some(c) = compare {
        args.extend_from_slice(&["--compare", c]);
    }
    let out = run_ok(&args);
    stdout_json(&out)["metrics"].clone()
}

#[test]
fn debiasing_weakens_every_planted_bias_signal() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("debiased.txt").display().to_string();
    let (input, pairs, specific) = (
        fixture("tiny_vectors.txt"),
        fixture("pairs.csv"),
        fixture("specific.txt"),
    );
    run_ok(&[
        "debias",
        "--input", &input,
        "--output", &out,
        "--pairs", &pairs,
        "--specific", &specific,
        "--report", &dir.path().join("r.json").display().to_string(),
    ]);

    let pre = eval_metrics(&input, None);
    let post = eval_metrics(&out, Some(&out));

    let acc = |m: &Value| m["neighborhood"]["accuracy"].as_f64().unwrap();
    assert!(
        acc(&post) < acc(&pre),
        "gender clustering should weaken: {} -> {}",
        acc(&pre),
        acc(&post)
    );

    let effect = |m: &Value| m["weat"][0]["effect_size"].as_f64().unwrap();
    assert!(
        effect(&post).abs() < effect(&pre).abs(),
        "association effect should shrink: {} -> {}",
        effect(&pre),
        effect(&post)
    );
    let p = |m: &Value| m["weat"][0]["p_value"].as_f64().unwrap();
    assert!(p(&post) > p(&pre), "association p should rise: {} -> {}", p(&pre), p(&post));
    assert_eq!(pre["weat"][0]["exact"], json!(true), "16 targets enumerate exactly");
    assert_eq!(pre["weat"][0]["permutations_used"], json!(12870));

    let purity = |m: &Value| m["categorization"]["purity"].as_f64().unwrap();
    assert!(
        purity(&post) < purity(&pre),
        "gender categories should blur: {} -> {}",
        purity(&pre),
        purity(&post)
    );

    // The analogy file answers stay structurally reported either way.
    assert_eq!(pre["analogy"]["skipped"], json!(1), "the zebra line is out of vocabulary");
    assert_eq!(pre["analogy"]["answered"], json!(6));

    // pairdiff: deltas only appear when a comparison table is given.
    assert!(pre["pair_difference"]["delta"].is_null());
    assert!(post["pair_difference"]["delta"].is_array());
    assert_eq!(post["pair_difference"]["labels"][0], json!("man-woman"));
}

#[test]
fn eval_requires_a_metric_choice() {
    let input = fixture("tiny_vectors.txt");
    let out = run(&["eval", "--input", &input]);
    assert_eq!(exit_code(&out), 2);
    let msg = String::from_utf8_lossy(&out.stderr).to_lowercase();
    assert!(msg.contains("metrics"), "usage error should mention metrics: {msg}");

    let out = run(&["eval", "--input", &input, "--metrics", "sentiment"]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("sentiment"));
}

#[test]
fn missing_pair_word_fails_with_the_token_named() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("pairs.csv");
    fs::write(&pairs, "he,plugh\n").unwrap();
    let input = fixture("tiny_vectors.txt");
    let out = run(&[
        "discover",
        "--input", &input,
        "--pairs", &pairs.display().to_string(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("plugh"),
        "error must name the missing token"
    );
}

#[test]
fn missing_input_file_is_a_user_error() {
    let out = run(&["discover", "--input", "/nonexistent/table.txt"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn reports_validate_against_the_bundled_schema() {
    let schema = schema();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("debiased.txt").display().to_string();
    let (input, pairs, specific) = (
        fixture("tiny_vectors.txt"),
        fixture("pairs.csv"),
        fixture("specific.txt"),
    );

    let debias_report = stdout_json(&run_ok(&[
        "debias",
        "--input", &input,
        "--output", &out,
        "--pairs", &pairs,
        "--specific", &specific,
    ]));
    validate(&schema, &schema, &debias_report).expect("debias report conforms");

    let discover_report = stdout_json(&run_ok(&[
        "discover",
        "--input", &input,
        "--pairs", &pairs,
        "--specific", &specific,
    ]));
    validate(&schema, &schema, &discover_report).expect("discover report conforms");

    let (weat, analogy, categories) = (
        fixture("weat_gender.txt"),
        fixture("analogy.txt"),
        fixture("categories.csv"),
    );
    let eval_report = stdout_json(&run_ok(&[
        "eval",
        "--input", &input,
        "--metrics", "neighborhood,weat,analogy,categorization,pairdiff",
        "--pairs", &pairs,
        "--specific", &specific,
        "--weat", &weat,
        "--analogy", &analogy,
        "--categories", &categories,
    ]));
    validate(&schema, &schema, &eval_report).expect("eval report conforms");

    // The checker has to actually bite, or conformance means nothing.
    let mut broken = debias_report.clone();
    broken.as_object_mut().unwrap().remove("seed");
    assert!(validate(&schema, &schema, &broken).is_err(), "missing seed must fail");

    let mut broken = eval_report.clone();
    broken["metrics"]["weat"][0]["p_value"] = json!(1.5);
    assert!(validate(&schema, &schema, &broken).is_err(), "p > 1 must fail");

    let mut broken = discover_report.clone();
    broken["bogus"] = json!(1);
    assert!(validate(&schema, &schema, &broken).is_err(), "unknown keys must fail");

    let mut broken = debias_report;
    broken["command"] = json!("transmogrify");
    assert!(validate(&schema, &schema, &broken).is_err(), "unknown command must fail");
}

#[test]
fn projection_csv_separates_the_planted_genders() {
    let dir = tempfile::tempdir().unwrap();
    let male_path = dir.path().join("male.txt");
    let female_path = dir.path().join("female.txt");
    let male: String = DEFINITIONAL_PAIRS.iter().map(|(_, m)| format!("{m}\n")).collect();
    let female: String = DEFINITIONAL_PAIRS.iter().map(|(f, _)| format!("{f}\n")).collect();
    fs::write(&male_path, male).unwrap();
    fs::write(&female_path, female).unwrap();

    let csv_path = dir.path().join("proj.csv");
    let input = fixture("tiny_vectors.txt");
    let args = [
        "export-projection",
        "--input", input.as_str(),
        "--output", &csv_path.display().to_string(),
        "--male-words", &male_path.display().to_string(),
        "--female-words", &female_path.display().to_string(),
    ];
    run_ok(&args);
    let text = fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("word,x,y,label"));

    let mut male_x = Vec::new();
    let mut female_x = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4, "row {line:?}");
        let x: f64 = fields[1].parse().expect("x is a number");
        let _y: f64 = fields[2].parse().expect("y is a number");
        match fields[3] {
            "male" => male_x.push(x),
            "female" => female_x.push(x),
            other => panic!("unexpected label {other:?}"),
        }
    }
    assert_eq!(male_x.len(), 10);
    assert_eq!(female_x.len(), 10);
    let (lo, hi) = (
        male_x.iter().cloned().fold(f64::INFINITY, f64::min),
        male_x.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let (flo, fhi) = (
        female_x.iter().cloned().fold(f64::INFINITY, f64::min),
        female_x.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    assert!(
        lo > fhi || flo > hi,
        "pair words should separate on the first axis: male [{lo}, {hi}], female [{flo}, {fhi}]"
    );

    run_ok(&args);
    assert_eq!(text, fs::read_to_string(&csv_path).unwrap(), "projection must be deterministic");
}

#[test]
fn projection_skips_missing_words_and_centers_a_single_one() {
    let dir = tempfile::tempdir().unwrap();
    let male_path = dir.path().join("male.txt");
    let female_path = dir.path().join("female.txt");
    fs::write(&male_path, "king\n").unwrap();
    fs::write(&female_path, "zzz_gone\nzzz_also_gone\n").unwrap();
    let csv_path = dir.path().join("proj.csv");
    let input = fixture("tiny_vectors.txt");
    let out = run_ok(&[
        "export-projection",
        "--input", &input,
        "--output", &csv_path.display().to_string(),
        "--male-words", &male_path.display().to_string(),
        "--female-words", &female_path.display().to_string(),
    ]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("zzz_gone"), "skipped words are listed: {stderr}");
    assert!(stderr.contains("zzz_also_gone"));
    assert_eq!(
        fs::read_to_string(&csv_path).unwrap(),
        "word,x,y,label\nking,0,0,male\n",
        "a single word centers to the origin"
    );
}

#[test]
fn flags_beat_the_config_file_which_beats_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        format!(
            "input = {:?}\npairs = {:?}\nspecific = {:?}\nseed = 7\nbiased_count = 10\n",
            fixture("tiny_vectors.txt"),
            fixture("pairs.csv"),
            fixture("specific.txt"),
        ),
    )
    .unwrap();
    let cfg_arg = cfg.display().to_string();

    let report = stdout_json(&run_ok(&["discover", "--config", &cfg_arg, "--seed", "42"]));
    assert_eq!(report["seed"], json!(42), "flag beats file");
    assert_eq!(report["config"]["seed"], json!(42));
    assert_eq!(report["config"]["biased_count"], json!(10), "file beats default");

    let again = stdout_json(&run_ok(&["discover", "--config", &cfg_arg, "--seed", "42"]));
    assert_eq!(report["config_hash"], again["config_hash"]);

    let reseeded = stdout_json(&run_ok(&["discover", "--config", &cfg_arg, "--seed", "43"]));
    assert_ne!(report["config_hash"], reseeded["config_hash"], "hash covers the seed");

    let out = run(&["discover", "--config", &dir.path().join("absent.toml").display().to_string()]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn token_normalization_drops_lowercase_duplicates() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("mixed.txt");
    fs::write(&table, "Cat 1 0\ncat 0.5 0\ndog 0 1\n").unwrap();
    let pairs = dir.path().join("pairs.csv");
    fs::write(&pairs, "cat,dog\n").unwrap();

    let report = stdout_json(&run_ok(&[
        "eval",
        "--input", &table.display().to_string(),
        "--metrics", "pairdiff",
        "--pairs", &pairs.display().to_string(),
        "--normalize-tokens",
    ]));
    assert_eq!(report["input_table"]["words"], json!(2));
    assert_eq!(report["input_table"]["duplicates_dropped"], json!(1));
    assert_eq!(report["metrics"]["pair_difference"]["labels"][0], json!("cat-dog"));
}

#[test]
fn plain_variants_skip_discovery_and_binary_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("debiased.bin").display().to_string();
    let (input, pairs, specific) = (
        fixture("tiny_vectors.txt"),
        fixture("pairs.csv"),
        fixture("specific.txt"),
    );
    let report = stdout_json(&run_ok(&[
        "debias",
        "--input", &input,
        "--output", &out,
        "--output-format", "word2vec",
        "--variant", "hard",
        "--pairs", &pairs,
        "--specific", &specific,
    ]));
    assert!(report["discovery"].is_null(), "plain variants do no component discovery");
    assert_eq!(report["output_table"]["format"], json!("word2vec"));

    // Auto-detection reads the .bin back for evaluation.
    let eval_report = stdout_json(&run_ok(&[
        "eval",
        "--input", &out,
        "--metrics", "pairdiff",
        "--pairs", &pairs,
    ]));
    assert_eq!(eval_report["input_table"]["words"], json!(54));

    let strong = stdout_json(&run_ok(&[
        "debias",
        "--input", &input,
        "--output", &dir.path().join("strong.txt").display().to_string(),
        "--variant", "strong_hard",
    ]));
    assert!(strong["discovery"].is_null());

    let bogus = run(&[
        "debias",
        "--input", &input,
        "--output", &dir.path().join("x.txt").display().to_string(),
        "--variant", "triple_hard",
    ]);
    assert_eq!(exit_code(&bogus), 2);
}
