//! Parsers for the small text formats the evaluation data ships in.
//!
//! All parsers are line-oriented, treat `#`-prefixed lines and blank lines
//! as comments, and report errors with 1-based line numbers.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::debias::{GenderPair, GenderPairSet};
use crate::error::{Error, Result};
use crate::eval::AnalogyQuestion;
use crate::store::WordList;

fn lines_of(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push((i + 1, trimmed.to_string()));
    }
    if out.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(out)
}

/// One word per line. The list is named after the file stem.
pub fn load_word_list(path: &Path) -> Result<WordList> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "words".to_string());
    let mut words = Vec::new();
    for (line, text) in lines_of(path)? {
        if text.split_whitespace().count() != 1 {
            return Err(Error::parse(path, line, "expected exactly one word"));
        }
        words.push(text);
    }
    WordList::new(name, words)
}

/// `male,female` per line (comma or whitespace separated).
pub fn load_pair_list(path: &Path) -> Result<GenderPairSet> {
    let mut pairs = Vec::new();
    for (line, text) in lines_of(path)? {
        let fields: Vec<&str> = if text.contains(',') {
            text.split(',').map(str::trim).collect()
        } else {
            text.split_whitespace().collect()
        };
        match fields.as_slice() {
            [male, female] if !male.is_empty() && !female.is_empty() => {
                pairs.push(GenderPair { female: female.to_string(), male: male.to_string() });
            }
            _ => return Err(Error::parse(path, line, "expected `male,female`")),
        }
    }
    GenderPairSet::new(pairs)
}

/// Bracketed sections of words, one word per line:
///
/// ```text
/// [targets_x]
/// math
/// algebra
/// [targets_y]
/// ...
/// ```
pub fn load_sectioned_words(path: &Path) -> Result<Vec<(String, Vec<String>)>> {
    let mut sections: Vec<(String, Vec<String>)> = Vec::new();
    for (line, text) in lines_of(path)? {
        if let Some(name) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let name = name.trim();
            if name.is_empty() {
                return Err(Error::parse(path, line, "empty section name"));
            }
            if sections.iter().any(|(n, _)| n == name) {
                return Err(Error::parse(path, line, format!("duplicate section `{name}`")));
            }
            sections.push((name.to_string(), Vec::new()));
        } else {
            match sections.last_mut() {
                Some((_, words)) => {
                    if text.split_whitespace().count() != 1 {
                        return Err(Error::parse(path, line, "expected exactly one word"));
                    }
                    words.push(text);
                }
                None => return Err(Error::parse(path, line, "word before any [section] header")),
            }
        }
    }
    Ok(sections)
}

/// A four-list association test: sections `targets_x`, `targets_y`,
/// `attributes_a`, `attributes_b`, in any order.
#[derive(Debug, Clone)]
pub struct WeatSpec {
    pub targets_x: WordList,
    pub targets_y: WordList,
    pub attributes_a: WordList,
    pub attributes_b: WordList,
}

pub fn load_weat_file(path: &Path) -> Result<WeatSpec> {
    let sections = load_sectioned_words(path)?;
    let find = |name: &str| -> Result<WordList> {
        sections
            .iter()
            .find(|(n, _)| n == name)
            .map(|(n, words)| WordList::new(n.as_str(), words.clone()))
            .ok_or_else(|| Error::parse(path, 0, format!("missing section `[{name}]`")))?
    };
    let spec = WeatSpec {
        targets_x: find("targets_x")?,
        targets_y: find("targets_y")?,
        attributes_a: find("attributes_a")?,
        attributes_b: find("attributes_b")?,
    };
    if sections.len() != 4 {
        return Err(Error::parse(path, 0, format!("expected 4 sections, found {}", sections.len())));
    }
    Ok(spec)
}

/// Question file with `: section` headers and four words per line.
pub fn load_analogy_sections(path: &Path) -> Result<Vec<AnalogyQuestion>> {
    let mut questions = Vec::new();
    let mut section = String::new();
    for (line, text) in lines_of(path)? {
        if let Some(name) = text.strip_prefix(':') {
            section = name.trim().to_string();
            if section.is_empty() {
                return Err(Error::parse(path, line, "empty section name after `:`"));
            }
            continue;
        }
        if section.is_empty() {
            return Err(Error::parse(path, line, "question before any `: section` header"));
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        match fields.as_slice() {
            [a, b, c, answer] => questions.push(AnalogyQuestion {
                a: a.to_string(),
                b: b.to_string(),
                c: c.to_string(),
                answer: answer.to_string(),
                section: section.clone(),
            }),
            _ => return Err(Error::parse(path, line, "expected four words per question")),
        }
    }
    if questions.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(questions)
}

/// Headerless question file, four words per line; every question lands in
/// one fixed section named after the file stem.
pub fn load_analogy_flat(path: &Path) -> Result<Vec<AnalogyQuestion>> {
    let section = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "questions".to_string());
    let mut questions = Vec::new();
    for (line, text) in lines_of(path)? {
        let fields: Vec<&str> = text.split_whitespace().collect();
        match fields.as_slice() {
            [a, b, c, answer] => questions.push(AnalogyQuestion {
                a: a.to_string(),
                b: b.to_string(),
                c: c.to_string(),
                answer: answer.to_string(),
                section: section.clone(),
            }),
            _ => return Err(Error::parse(path, line, "expected four words per question")),
        }
    }
    Ok(questions)
}

/// Auto-detects the two analogy layouts: a leading `:` means sectioned.
pub fn load_analogy_file(path: &Path) -> Result<Vec<AnalogyQuestion>> {
    let first = lines_of(path)?.into_iter().next().expect("non-empty by construction");
    if first.1.starts_with(':') {
        load_analogy_sections(path)
    } else {
        load_analogy_flat(path)
    }
}

/// `word,category` per line.
pub fn load_categories(path: &Path) -> Result<Vec<(String, String)>> {
    let mut items = Vec::new();
    for (line, text) in lines_of(path)? {
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        match fields.as_slice() {
            [word, category] if !word.is_empty() && !category.is_empty() => {
                items.push((word.to_string(), category.to_string()));
            }
            _ => return Err(Error::parse(path, line, "expected `word,category`")),
        }
    }
    Ok(items)
}
