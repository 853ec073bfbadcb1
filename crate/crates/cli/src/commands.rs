//! The four subcommands. Each resolves its options (flag beats config file
//! beats default), runs the underlying pipeline, and emits a JSON report
//! stamped with tool version, seed, and config hash.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use debias_core::eval::{self, BiasReport, NamedWeatResult};
use debias_core::{datasets, debias as pipeline, linalg, seeds};
use debias_core::{DebiasConfig, DebiasVariant, EmbeddingSet, GenderPairSet, WordList};
use ndarray::Array2;
use serde_json::{json, Value};

use crate::config::{self, FileConfig, TableFormat};

/// Used when neither a flag nor the config file names a seed.
const DEFAULT_SEED: u64 = 42;
/// Biased words per gender for candidate scoring and derived word lists.
const DEFAULT_BIASED_COUNT: usize = 500;
/// Monte Carlo budget for association tests too large to enumerate.
const DEFAULT_MAX_PERMUTATIONS: u64 = 100_000;

#[derive(Debug)]
pub enum CliError {
    Core(debias_core::Error),
    /// Bad or missing option values; always the user's to fix.
    Config(String),
    /// IO on a user-supplied path (config file, CSV output, and so on).
    File { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn file(path: &Path, source: std::io::Error) -> Self {
        CliError::File { path: path.to_path_buf(), source }
    }

    /// 2 for problems in the user's input, 1 for numerical trouble inside
    /// the pipeline.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if !e.is_user_input() => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::File { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl From<debias_core::Error> for CliError {
    fn from(e: debias_core::Error) -> Self {
        CliError::Core(e)
    }
}

fn load_pairs(path: Option<&Path>) -> Result<GenderPairSet, CliError> {
    match path {
        Some(p) => Ok(datasets::load_pair_list(p)?),
        None => Ok(GenderPairSet::definitional()),
    }
}

fn load_specific(path: Option<&Path>) -> Result<WordList, CliError> {
    match path {
        Some(p) => Ok(datasets::load_word_list(p)?),
        None => Ok(WordList::empty("gender-specific")),
    }
}

fn parse_variant(name: &str) -> Result<DebiasVariant, CliError> {
    match name {
        "hard" => Ok(DebiasVariant::Hard),
        "strong_hard" => Ok(DebiasVariant::StrongHard),
        "double_hard" => Ok(DebiasVariant::DoubleHard),
        other => Err(CliError::Config(format!(
            "unknown variant {other:?}; expected hard, strong_hard, or double_hard"
        ))),
    }
}

fn path_value(path: Option<&Path>) -> Value {
    match path {
        Some(p) => Value::from(p.display().to_string()),
        None => Value::Null,
    }
}

/// Loads the table and applies optional token lowercasing. Returns the set
/// and how many rows were dropped as lowercase duplicates.
fn load_input(
    path: &Path,
    format: TableFormat,
    normalize: bool,
) -> Result<(EmbeddingSet, usize), CliError> {
    let raw = config::load_table(path, format)?;
    if normalize {
        config::normalize_tokens(&raw)
    } else {
        Ok((raw, 0))
    }
}

fn input_table_value(path: &Path, set: &EmbeddingSet, duplicates_dropped: usize) -> Value {
    json!({
        "path": path.display().to_string(),
        "words": set.len(),
        "dim": set.dim(),
        "duplicates_dropped": duplicates_dropped,
    })
}

#[derive(Args)]
pub struct DebiasArgs {
    /// Embedding table to read.
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Input layout: glove, word2vec, or auto (.bin means word2vec).
    #[arg(long, value_name = "FMT")]
    format: Option<String>,
    /// Where to write the debiased table.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Output layout; defaults to the input layout.
    #[arg(long, value_name = "FMT")]
    output_format: Option<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    /// double_hard (default), hard, or strong_hard.
    #[arg(long)]
    variant: Option<String>,
    /// Top-level seed; every random choice derives from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Definitional pairs, one `male,female` per line; built-in list when
    /// absent.
    #[arg(long, value_name = "FILE")]
    pairs: Option<PathBuf>,
    /// Words whose gender is intentional, one per line.
    #[arg(long, value_name = "FILE")]
    specific: Option<PathBuf>,
    /// Biased words per gender used to score candidate components.
    #[arg(long, value_name = "N")]
    biased_count: Option<usize>,
    /// Candidate component count; sized from the table when absent.
    #[arg(long, value_name = "N")]
    candidates: Option<usize>,
    /// 1-based components to remove, skipping discovery.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    override_components: Option<Vec<usize>>,
    /// Fit candidate components on the biased words only.
    #[arg(long)]
    pca_on_biased_only: bool,
    /// Lowercase tokens on load, keeping the first of any duplicates.
    #[arg(long)]
    normalize_tokens: bool,
}

pub fn debias(args: DebiasArgs, file: &FileConfig) -> Result<(), CliError> {
    let input = config::pick(args.input, file.input.clone())
        .ok_or_else(|| CliError::Config("--input is required".into()))?;
    let in_format =
        config::resolve_format(config::pick(args.format, file.format.clone()).as_deref(), &input)?;
    let output = config::pick(args.output, file.output.clone())
        .ok_or_else(|| CliError::Config("--output is required".into()))?;
    let out_format = match config::pick(args.output_format, file.output_format.clone()) {
        Some(choice) => config::resolve_format(Some(&choice), &output)?,
        None => in_format,
    };
    let report_path = config::pick(args.report, file.report.clone());
    let variant_name =
        config::pick(args.variant, file.variant.clone()).unwrap_or_else(|| "double_hard".into());
    let variant = parse_variant(&variant_name)?;
    let seed = config::pick(args.seed, file.seed).unwrap_or(DEFAULT_SEED);
    let pairs_path = config::pick(args.pairs, file.pairs.clone());
    let specific_path = config::pick(args.specific, file.specific.clone());
    let biased_count =
        config::pick(args.biased_count, file.biased_count).unwrap_or(DEFAULT_BIASED_COUNT);
    let candidates = config::pick(args.candidates, file.candidates);
    let overrides =
        config::pick(args.override_components, file.override_components.clone());
    let pca_on_biased_only =
        config::pick_flag(args.pca_on_biased_only, file.pca_on_biased_only);
    let normalize = config::pick_flag(args.normalize_tokens, file.normalize_tokens);

    let echo = json!({
        "input": input.display().to_string(),
        "format": in_format.name(),
        "seed": seed,
        "output": output.display().to_string(),
        "output_format": out_format.name(),
        "variant": variant_name,
        "pairs": path_value(pairs_path.as_deref()),
        "specific": path_value(specific_path.as_deref()),
        "biased_count": biased_count,
        "candidates": candidates,
        "override_components": overrides.clone(),
        "pca_on_biased_only": pca_on_biased_only,
        "normalize_tokens": normalize,
    });

    let (set, duplicates_dropped) = load_input(&input, in_format, normalize)?;
    let pairs = load_pairs(pairs_path.as_deref())?;
    let cfg = DebiasConfig {
        candidate_count: candidates,
        biased_word_count: biased_count,
        variant,
        seed: seeds::derive(seed, "discovery"),
        gender_specific_words: load_specific(specific_path.as_deref())?,
        override_components: overrides,
        pca_on_biased_only,
    };

    let (debiased, discovery) = match variant {
        DebiasVariant::DoubleHard => {
            let (out, report) = pipeline::double_hard_debias(&set, &pairs, &cfg)?;
            (out, Some(report))
        }
        DebiasVariant::Hard | DebiasVariant::StrongHard => {
            (pipeline::hard_debias_pipeline(&set, &pairs, &cfg)?, None)
        }
    };
    config::save_table(&debiased, &output, out_format)?;

    let mut report = config::report_frame("debias", seed, echo);
    report.insert("input_table".into(), input_table_value(&input, &set, duplicates_dropped));
    report.insert(
        "discovery".into(),
        discovery.map_or(Value::Null, |d| serde_json::to_value(d).expect("report serializes")),
    );
    report.insert(
        "output_table".into(),
        json!({ "path": output.display().to_string(), "format": out_format.name() }),
    );
    config::emit_report(&Value::Object(report), report_path.as_deref())
}

#[derive(Args)]
pub struct DiscoverArgs {
    /// Embedding table to read.
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Input layout: glove, word2vec, or auto (.bin means word2vec).
    #[arg(long, value_name = "FMT")]
    format: Option<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    /// Top-level seed; every random choice derives from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Definitional pairs, one `male,female` per line; built-in list when
    /// absent.
    #[arg(long, value_name = "FILE")]
    pairs: Option<PathBuf>,
    /// Words whose gender is intentional, one per line.
    #[arg(long, value_name = "FILE")]
    specific: Option<PathBuf>,
    /// Biased words per gender used to score candidate components.
    #[arg(long, value_name = "N")]
    biased_count: Option<usize>,
    /// Candidate component count; sized from the table when absent.
    #[arg(long, value_name = "N")]
    candidates: Option<usize>,
    /// Fit candidate components on the biased words only.
    #[arg(long)]
    pca_on_biased_only: bool,
    /// Lowercase tokens on load, keeping the first of any duplicates.
    #[arg(long)]
    normalize_tokens: bool,
}

pub fn discover(args: DiscoverArgs, file: &FileConfig) -> Result<(), CliError> {
    let input = config::pick(args.input, file.input.clone())
        .ok_or_else(|| CliError::Config("--input is required".into()))?;
    let in_format =
        config::resolve_format(config::pick(args.format, file.format.clone()).as_deref(), &input)?;
    let report_path = config::pick(args.report, file.report.clone());
    let seed = config::pick(args.seed, file.seed).unwrap_or(DEFAULT_SEED);
    let pairs_path = config::pick(args.pairs, file.pairs.clone());
    let specific_path = config::pick(args.specific, file.specific.clone());
    let biased_count =
        config::pick(args.biased_count, file.biased_count).unwrap_or(DEFAULT_BIASED_COUNT);
    let candidates = config::pick(args.candidates, file.candidates);
    let pca_on_biased_only =
        config::pick_flag(args.pca_on_biased_only, file.pca_on_biased_only);
    let normalize = config::pick_flag(args.normalize_tokens, file.normalize_tokens);

    let echo = json!({
        "input": input.display().to_string(),
        "format": in_format.name(),
        "seed": seed,
        "pairs": path_value(pairs_path.as_deref()),
        "specific": path_value(specific_path.as_deref()),
        "biased_count": biased_count,
        "candidates": candidates,
        "pca_on_biased_only": pca_on_biased_only,
        "normalize_tokens": normalize,
    });

    let (set, duplicates_dropped) = load_input(&input, in_format, normalize)?;
    let pairs = load_pairs(pairs_path.as_deref())?;
    let cfg = DebiasConfig {
        candidate_count: candidates,
        biased_word_count: biased_count,
        variant: DebiasVariant::DoubleHard,
        seed: seeds::derive(seed, "discovery"),
        gender_specific_words: load_specific(specific_path.as_deref())?,
        override_components: None,
        pca_on_biased_only,
    };
    let discovery = pipeline::discover_frequency_direction(&set, &pairs, &cfg)?;

    let mut report = config::report_frame("discover", seed, echo);
    report.insert("input_table".into(), input_table_value(&input, &set, duplicates_dropped));
    report.insert(
        "discovery".into(),
        serde_json::to_value(discovery).expect("report serializes"),
    );
    config::emit_report(&Value::Object(report), report_path.as_deref())
}

/// Metric names accepted by `--metrics`, in report order.
const METRIC_NAMES: [&str; 5] =
    ["neighborhood", "weat", "analogy", "categorization", "pairdiff"];

#[derive(Args)]
pub struct EvalArgs {
    /// Embedding table to evaluate.
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Input layout: glove, word2vec, or auto (.bin means word2vec).
    #[arg(long, value_name = "FMT")]
    format: Option<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    /// Metrics to run, comma separated: neighborhood, weat, analogy,
    /// categorization, pairdiff.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    metrics: Vec<String>,
    /// Top-level seed; every random choice derives from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Definitional pairs, one `male,female` per line; built-in list when
    /// absent.
    #[arg(long, value_name = "FILE")]
    pairs: Option<PathBuf>,
    /// Words whose gender is intentional; excluded when ranking biased
    /// words.
    #[arg(long, value_name = "FILE")]
    specific: Option<PathBuf>,
    /// Male words for the neighborhood metric, one per line.
    #[arg(long, value_name = "FILE")]
    male_words: Option<PathBuf>,
    /// Female words for the neighborhood metric, one per line.
    #[arg(long, value_name = "FILE")]
    female_words: Option<PathBuf>,
    /// Words ranked from each end of the gender axis when no explicit
    /// male/female lists are given.
    #[arg(long, value_name = "N")]
    neighborhood_top: Option<usize>,
    /// Association test file with [targets_x] [targets_y] [attributes_a]
    /// [attributes_b] sections; repeatable.
    #[arg(long, value_name = "FILE")]
    weat: Vec<PathBuf>,
    /// Analogy questions, `a b c answer` per line, `: section` headers
    /// optional.
    #[arg(long, value_name = "FILE")]
    analogy: Option<PathBuf>,
    /// Labeled words for the categorization metric, `word,category` per
    /// line.
    #[arg(long, value_name = "FILE")]
    categories: Option<PathBuf>,
    /// Monte Carlo budget for association tests too large to enumerate.
    #[arg(long, value_name = "N")]
    max_permutations: Option<u64>,
    /// Second table for pairdiff deltas (the debiased table, typically).
    #[arg(long, value_name = "FILE")]
    compare: Option<PathBuf>,
    /// Layout of the comparison table; auto by default.
    #[arg(long, value_name = "FMT")]
    compare_format: Option<String>,
    /// Lowercase tokens on load, keeping the first of any duplicates.
    #[arg(long)]
    normalize_tokens: bool,
}

pub fn eval(args: EvalArgs, file: &FileConfig) -> Result<(), CliError> {
    let input = config::pick(args.input, file.input.clone())
        .ok_or_else(|| CliError::Config("--input is required".into()))?;
    let in_format =
        config::resolve_format(config::pick(args.format, file.format.clone()).as_deref(), &input)?;
    let report_path = config::pick(args.report, file.report.clone());
    let requested = if args.metrics.is_empty() {
        file.metrics.clone().unwrap_or_default()
    } else {
        args.metrics
    };
    if requested.is_empty() {
        return Err(CliError::Config(format!(
            "--metrics must name at least one of: {}",
            METRIC_NAMES.join(", ")
        )));
    }
    for name in &requested {
        if !METRIC_NAMES.contains(&name.as_str()) {
            return Err(CliError::Config(format!(
                "unknown metric {name:?}; expected one of: {}",
                METRIC_NAMES.join(", ")
            )));
        }
    }
    let wants = |name: &str| requested.iter().any(|m| m == name);
    let selected: Vec<&str> =
        METRIC_NAMES.iter().copied().filter(|m| wants(m)).collect();

    let seed = config::pick(args.seed, file.seed).unwrap_or(DEFAULT_SEED);
    let pairs_path = config::pick(args.pairs, file.pairs.clone());
    let specific_path = config::pick(args.specific, file.specific.clone());
    let male_path = config::pick(args.male_words, file.male_words.clone());
    let female_path = config::pick(args.female_words, file.female_words.clone());
    let neighborhood_top = config::pick(args.neighborhood_top, file.neighborhood_top)
        .unwrap_or(DEFAULT_BIASED_COUNT);
    let weat_files = if args.weat.is_empty() {
        file.weat.clone().unwrap_or_default()
    } else {
        args.weat
    };
    let analogy_path = config::pick(args.analogy, file.analogy.clone());
    let categories_path = config::pick(args.categories, file.categories.clone());
    let max_permutations = config::pick(args.max_permutations, file.max_permutations)
        .unwrap_or(DEFAULT_MAX_PERMUTATIONS);
    let compare_path = config::pick(args.compare, file.compare.clone());
    let normalize = config::pick_flag(args.normalize_tokens, file.normalize_tokens);

    let echo = json!({
        "input": input.display().to_string(),
        "format": in_format.name(),
        "seed": seed,
        "metrics": selected,
        "pairs": path_value(pairs_path.as_deref()),
        "specific": path_value(specific_path.as_deref()),
        "male_words": path_value(male_path.as_deref()),
        "female_words": path_value(female_path.as_deref()),
        "neighborhood_top": neighborhood_top,
        "weat": weat_files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "analogy": path_value(analogy_path.as_deref()),
        "categories": path_value(categories_path.as_deref()),
        "max_permutations": max_permutations,
        "compare": path_value(compare_path.as_deref()),
        "normalize_tokens": normalize,
    });

    let (set, duplicates_dropped) = load_input(&input, in_format, normalize)?;
    let mut bias = BiasReport::empty();

    if wants("neighborhood") {
        let (male, female) = match (&male_path, &female_path) {
            (Some(m), Some(f)) => {
                (datasets::load_word_list(m)?, datasets::load_word_list(f)?)
            }
            (None, None) => {
                let pairs = load_pairs(pairs_path.as_deref())?;
                let specific = load_specific(specific_path.as_deref())?;
                let direction = pipeline::orient_male_positive(
                    &pipeline::gender_direction(&set, &pairs)?,
                    &set,
                    &pairs,
                )?;
                let exclusions = specific.union(&pairs.token_list(), "excluded");
                pipeline::top_biased_words(&set, &direction, neighborhood_top, &exclusions)?
            }
            _ => {
                return Err(CliError::Config(
                    "give both --male-words and --female-words, or neither".into(),
                ))
            }
        };
        bias.neighborhood = Some(eval::neighborhood_alignment(
            &set,
            &male,
            &female,
            seeds::derive(seed, "neighborhood"),
        )?);
    }

    if wants("weat") {
        if weat_files.is_empty() {
            return Err(CliError::Config(
                "the weat metric needs at least one --weat file".into(),
            ));
        }
        for path in &weat_files {
            let spec = datasets::load_weat_file(path)?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "weat".to_string());
            let result = eval::weat(
                &set,
                &spec.targets_x,
                &spec.targets_y,
                &spec.attributes_a,
                &spec.attributes_b,
                seeds::derive(seed, &format!("weat:{name}")),
                max_permutations,
            )?;
            bias.weat.push(NamedWeatResult { name, result });
        }
    }

    let mut sem_syn = None;
    if wants("analogy") {
        let path = analogy_path
            .as_ref()
            .ok_or_else(|| CliError::Config("the analogy metric needs --analogy".into()))?;
        let questions = datasets::load_analogy_file(path)?;
        let result = eval::analogy_accuracy(&set, &questions)?;
        sem_syn = Some(eval::sem_syn_totals(&result));
        bias.analogy = Some(result);
    }

    if wants("categorization") {
        let path = categories_path.as_ref().ok_or_else(|| {
            CliError::Config("the categorization metric needs --categories".into())
        })?;
        let items = datasets::load_categories(path)?;
        bias.categorization = Some(eval::categorization_purity(
            &set,
            &items,
            seeds::derive(seed, "categorization"),
        )?);
    }

    if wants("pairdiff") {
        let pairs = load_pairs(pairs_path.as_deref())?;
        let compare = match &compare_path {
            Some(p) => {
                let fmt = config::resolve_format(args.compare_format.as_deref(), p)?;
                Some(load_input(p, fmt, normalize)?.0)
            }
            None => None,
        };
        bias.pair_difference =
            Some(eval::pair_difference_similarity(&set, compare.as_ref(), &pairs)?);
    }

    let mut metrics_value = serde_json::to_value(&bias).expect("report serializes");
    if let Some(((sc, sa), (yc, ya))) = sem_syn {
        let ratio = |c: usize, a: usize| if a == 0 { 0.0 } else { c as f64 / a as f64 };
        if let Some(obj) = metrics_value.get_mut("analogy").and_then(Value::as_object_mut) {
            obj.insert(
                "semantic".into(),
                json!({ "correct": sc, "answered": sa, "accuracy": ratio(sc, sa) }),
            );
            obj.insert(
                "syntactic".into(),
                json!({ "correct": yc, "answered": ya, "accuracy": ratio(yc, ya) }),
            );
        }
    }

    let mut report = config::report_frame("eval", seed, echo);
    report.insert("input_table".into(), input_table_value(&input, &set, duplicates_dropped));
    report.insert("metrics".into(), metrics_value);
    config::emit_report(&Value::Object(report), report_path.as_deref())
}

#[derive(Args)]
pub struct ExportArgs {
    /// Embedding table to read.
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Input layout: glove, word2vec, or auto (.bin means word2vec).
    #[arg(long, value_name = "FMT")]
    format: Option<String>,
    /// CSV destination.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Words to plot as male, one per line.
    #[arg(long, value_name = "FILE")]
    male_words: Option<PathBuf>,
    /// Words to plot as female, one per line.
    #[arg(long, value_name = "FILE")]
    female_words: Option<PathBuf>,
    /// Plot the N strongest-biased words per gender instead of explicit
    /// lists.
    #[arg(long, value_name = "N")]
    top: Option<usize>,
    /// Definitional pairs used to rank biased words; built-in list when
    /// absent.
    #[arg(long, value_name = "FILE")]
    pairs: Option<PathBuf>,
    /// Words whose gender is intentional; excluded when ranking biased
    /// words.
    #[arg(long, value_name = "FILE")]
    specific: Option<PathBuf>,
    /// Lowercase tokens on load, keeping the first of any duplicates.
    #[arg(long)]
    normalize_tokens: bool,
}

/// Writes the selected words as 2-D plot data: the words' vectors are
/// centered and projected onto their own top two principal directions.
/// Words missing from the table are listed on stderr and skipped; the run
/// continues with the rest.
pub fn export_projection(args: ExportArgs, file: &FileConfig) -> Result<(), CliError> {
    let input = config::pick(args.input, file.input.clone())
        .ok_or_else(|| CliError::Config("--input is required".into()))?;
    let in_format =
        config::resolve_format(config::pick(args.format, file.format.clone()).as_deref(), &input)?;
    let output = config::pick(args.output, file.output.clone())
        .ok_or_else(|| CliError::Config("--output is required".into()))?;
    let male_path = config::pick(args.male_words, file.male_words.clone());
    let female_path = config::pick(args.female_words, file.female_words.clone());
    let top = config::pick(args.top, file.top);
    let pairs_path = config::pick(args.pairs, file.pairs.clone());
    let specific_path = config::pick(args.specific, file.specific.clone());
    let normalize = config::pick_flag(args.normalize_tokens, file.normalize_tokens);

    let (set, _) = load_input(&input, in_format, normalize)?;
    let (male, female) = match (&male_path, &female_path) {
        (Some(m), Some(f)) => (datasets::load_word_list(m)?, datasets::load_word_list(f)?),
        (None, None) => {
            let count = top.ok_or_else(|| {
                CliError::Config(
                    "give --male-words and --female-words, or --top to derive them".into(),
                )
            })?;
            let pairs = load_pairs(pairs_path.as_deref())?;
            let specific = load_specific(specific_path.as_deref())?;
            let direction = pipeline::orient_male_positive(
                &pipeline::gender_direction(&set, &pairs)?,
                &set,
                &pairs,
            )?;
            let exclusions = specific.union(&pairs.token_list(), "excluded");
            pipeline::top_biased_words(&set, &direction, count, &exclusions)?
        }
        _ => {
            return Err(CliError::Config(
                "give both --male-words and --female-words, or neither".into(),
            ))
        }
    };

    let labeled = male
        .iter()
        .map(|w| (w.as_str(), "male"))
        .chain(female.iter().map(|w| (w.as_str(), "female")));
    let mut present: Vec<(&str, &str, usize)> = Vec::new();
    let mut missing: Vec<&str> = Vec::new();
    for (word, label) in labeled {
        match set.index_of(word) {
            Some(i) => present.push((word, label, i)),
            None => missing.push(word),
        }
    }
    if !missing.is_empty() {
        eprintln!(
            "warning: {} words not in the table, skipped: {}",
            missing.len(),
            missing.join(", ")
        );
    }
    if present.is_empty() {
        return Err(debias_core::Error::EmptyInput.into());
    }

    let mut rows = Array2::zeros((present.len(), set.dim()));
    for (r, &(_, _, i)) in present.iter().enumerate() {
        rows.row_mut(r).assign(&set.row(i));
    }
    let (centered, _) = linalg::center(rows.view())?;

    // A single word, or several identical ones, centers to rank zero and
    // plots at the origin.
    let mut planes = 0;
    let mut components = None;
    let mut want = 2.min(centered.ncols()).min(present.len().saturating_sub(1));
    while want > 0 {
        match linalg::principal_components(centered.view(), want) {
            Ok(pca) => {
                planes = want;
                components = Some(pca.components);
                break;
            }
            Err(debias_core::Error::RankDeficient { .. }) => want -= 1,
            Err(e) => return Err(e.into()),
        }
    }

    let mut text = String::from("word,x,y,label\n");
    for (r, &(word, label, _)) in present.iter().enumerate() {
        let row = centered.row(r);
        let x = if planes >= 1 {
            row.dot(&components.as_ref().expect("planes >= 1").component(0))
        } else {
            0.0
        };
        let y = if planes >= 2 {
            row.dot(&components.as_ref().expect("planes >= 2").component(1))
        } else {
            0.0
        };
        text.push_str(&format!("{word},{x},{y},{label}\n"));
    }
    fs::write(&output, text).map_err(|e| CliError::file(&output, e))?;
    Ok(())
}
