//! Option handling shared by every subcommand: the TOML defaults file,
//! flag/file merging, embedding table IO, and the report frame that stamps
//! version, seed, and config hash into each JSON report.

use std::fs;
use std::path::{Path, PathBuf};

use debias_core::EmbeddingSet;
use serde::Deserialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::commands::CliError;

/// Defaults file. Every key mirrors a long option; flags win over the file,
/// the file wins over built-in defaults. Unknown keys are rejected so typos
/// fail loudly instead of being ignored.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub format: Option<String>,
    pub output: Option<PathBuf>,
    pub output_format: Option<String>,
    pub report: Option<PathBuf>,
    pub variant: Option<String>,
    pub seed: Option<u64>,
    pub pairs: Option<PathBuf>,
    pub specific: Option<PathBuf>,
    pub biased_count: Option<usize>,
    pub candidates: Option<usize>,
    pub override_components: Option<Vec<usize>>,
    pub pca_on_biased_only: Option<bool>,
    pub normalize_tokens: Option<bool>,
    pub metrics: Option<Vec<String>>,
    pub weat: Option<Vec<PathBuf>>,
    pub analogy: Option<PathBuf>,
    pub categories: Option<PathBuf>,
    pub male_words: Option<PathBuf>,
    pub female_words: Option<PathBuf>,
    pub neighborhood_top: Option<usize>,
    pub max_permutations: Option<u64>,
    pub compare: Option<PathBuf>,
    pub top: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::file(path, e))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Flag value beats file value; the caller applies any built-in default.
pub fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

/// Boolean switches cannot express "explicitly off", so either source may
/// turn one on.
pub fn pick_flag(flag: bool, file: Option<bool>) -> bool {
    flag || file.unwrap_or(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    GloveText,
    Word2vecBinary,
}

impl TableFormat {
    pub fn name(self) -> &'static str {
        match self {
            TableFormat::GloveText => "glove",
            TableFormat::Word2vecBinary => "word2vec",
        }
    }
}

/// Resolves a format choice. `auto` (the default) goes by extension:
/// `.bin` means the word2vec binary layout, anything else the GloVe text
/// layout.
pub fn resolve_format(choice: Option<&str>, path: &Path) -> Result<TableFormat, CliError> {
    match choice.unwrap_or("auto") {
        "glove" => Ok(TableFormat::GloveText),
        "word2vec" => Ok(TableFormat::Word2vecBinary),
        "auto" => {
            let bin = path.extension().is_some_and(|e| e == "bin");
            Ok(if bin { TableFormat::Word2vecBinary } else { TableFormat::GloveText })
        }
        other => Err(CliError::Config(format!(
            "unknown format {other:?}; expected glove, word2vec, or auto"
        ))),
    }
}

pub fn load_table(path: &Path, format: TableFormat) -> Result<EmbeddingSet, CliError> {
    let set = match format {
        TableFormat::GloveText => EmbeddingSet::load_glove_text(path)?,
        TableFormat::Word2vecBinary => EmbeddingSet::load_word2vec_binary(path)?,
    };
    Ok(set)
}

pub fn save_table(set: &EmbeddingSet, path: &Path, format: TableFormat) -> Result<(), CliError> {
    match format {
        TableFormat::GloveText => set.save_glove_text(path)?,
        TableFormat::Word2vecBinary => set.save_word2vec_binary(path)?,
    }
    Ok(())
}

/// Lowercases every token, keeping the first occurrence of each resulting
/// form. Returns the rebuilt set and the number of rows dropped as
/// lowercase duplicates.
pub fn normalize_tokens(set: &EmbeddingSet) -> Result<(EmbeddingSet, usize), CliError> {
    let mut seen = std::collections::HashSet::new();
    let mut tokens = Vec::new();
    let mut keep = Vec::new();
    for (i, token) in set.tokens().iter().enumerate() {
        let lower = token.to_lowercase();
        if seen.insert(lower.clone()) {
            tokens.push(lower);
            keep.push(i);
        }
    }
    let dropped = set.len() - keep.len();
    let matrix = set.matrix().select(ndarray::Axis(0), &keep);
    let rebuilt = EmbeddingSet::new(tokens, matrix)?;
    Ok((rebuilt, dropped))
}

/// SHA-256 of the canonical JSON encoding of the effective configuration.
/// Object keys serialize sorted, so two runs with the same settings hash
/// identically regardless of how the settings were supplied.
pub fn config_hash(echo: &Value) -> String {
    let bytes = serde_json::to_vec(echo).expect("config echo serializes");
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Shared report skeleton: tool version, subcommand, top-level seed, the
/// effective config echo, and its hash. Callers append their own sections.
pub fn report_frame(command: &str, seed: u64, echo: Value) -> Map<String, Value> {
    let mut map = Map::new();
    map.insert("tool_version".into(), Value::from(env!("CARGO_PKG_VERSION")));
    map.insert("command".into(), Value::from(command));
    map.insert("seed".into(), Value::from(seed));
    map.insert("config_hash".into(), Value::from(config_hash(&echo)));
    map.insert("config".into(), echo);
    map
}

/// Pretty-prints the report to the given path, or to stdout when no path
/// was configured. Output ends with a newline either way.
pub fn emit_report(report: &Value, path: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    match path {
        Some(path) => {
            fs::write(path, format!("{text}\n")).map_err(|e| CliError::file(path, e))?;
        }
        None => println!("{text}"),
    }
    Ok(())
}
