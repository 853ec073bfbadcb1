//! Embedding storage and file formats.
//!
//! An [`EmbeddingSet`] keeps an ordered vocabulary plus a dense `n x d` matrix
//! of `f64` vectors. Two on-disk formats are supported:
//!
//! * `glove_text`: one `token v1 .. vd` line per word, optionally preceded by
//!   a `count dim` header line, which is auto-detected and consumed.
//! * `word2vec_binary`: a `count dim\n` ASCII header followed by records of
//!   `token` + `' '` + `dim` little-endian `f32` values.
//!
//! Vectors are held as `f64` regardless of source; saving to the binary
//! format quantizes to `f32`.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// Longest token accepted when scanning binary records. Keeps a corrupt file
/// from being swallowed into one giant token before the real error surfaces.
const MAX_TOKEN_BYTES: usize = 65536;

/// Ordered vocabulary with an `n x d` matrix of finite `f64` embeddings.
///
/// Invariants: at least one word, `d >= 1`, tokens unique, non-empty and free
/// of whitespace, all entries finite.
#[derive(Debug, Clone)]
pub struct EmbeddingSet {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    matrix: Array2<f64>,
}

/// Accumulates parsed `glove_text` rows; the first row fixes the dimension.
struct TextRows {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    values: Vec<f64>,
    dim: Option<usize>,
}

impl TextRows {
    fn new() -> Self {
        TextRows { tokens: Vec::new(), index: HashMap::new(), values: Vec::new(), dim: None }
    }

    fn push_line(&mut self, s: &str, line_no: usize, path: &Path) -> Result<()> {
        let mut fields = s.split_whitespace();
        let token = fields.next().expect("caller skips blank lines");
        let start = self.values.len();
        for field in fields {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::parse(path, line_no, format!("bad number {field:?}")))?;
            if !v.is_finite() {
                return Err(Error::parse(path, line_no, format!("non-finite value {field:?}")));
            }
            self.values.push(v);
        }
        let got = self.values.len() - start;
        match self.dim {
            None if got == 0 => {
                return Err(Error::parse(path, line_no, "token without values"));
            }
            None => self.dim = Some(got),
            Some(d) if d != got => {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("expected {d} dimensions, found {got}"),
                ));
            }
            Some(_) => {}
        }
        if self.index.insert(token.to_string(), self.tokens.len()).is_some() {
            return Err(Error::DuplicateToken { token: token.to_string(), line: line_no });
        }
        self.tokens.push(token.to_string());
        Ok(())
    }
}

/// Reads one line, counting it. Returns false at end of file.
fn read_text_line(
    r: &mut impl BufRead,
    buf: &mut String,
    line_no: &mut usize,
    path: &Path,
) -> Result<bool> {
    buf.clear();
    *line_no += 1;
    match r.read_line(buf) {
        Ok(0) => Ok(false),
        Ok(_) => Ok(true),
        Err(e) if e.kind() == std::io::ErrorKind::InvalidData => {
            Err(Error::parse(path, *line_no, "invalid UTF-8"))
        }
        Err(e) => Err(Error::io(path, e)),
    }
}

/// Reads the next non-blank line. Returns false at end of file.
fn read_data_line(
    r: &mut impl BufRead,
    buf: &mut String,
    line_no: &mut usize,
    path: &Path,
) -> Result<bool> {
    loop {
        if !read_text_line(r, buf, line_no, path)? {
            return Ok(false);
        }
        if !buf.trim().is_empty() {
            return Ok(true);
        }
    }
}

impl EmbeddingSet {
    pub fn new(tokens: Vec<String>, matrix: Array2<f64>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::EmptyInput);
        }
        if matrix.nrows() != tokens.len() {
            return Err(Error::DimensionMismatch { expected: tokens.len(), got: matrix.nrows() });
        }
        if matrix.ncols() == 0 {
            return Err(Error::InvalidInput("embedding dimension must be at least 1".into()));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, token) in tokens.iter().enumerate() {
            if token.is_empty() || token.chars().any(char::is_whitespace) {
                return Err(Error::InvalidInput(format!(
                    "token {token:?} is empty or contains whitespace"
                )));
            }
            if index.insert(token.clone(), i).is_some() {
                return Err(Error::DuplicateToken { token: token.clone(), line: i + 1 });
            }
        }
        if !matrix.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("embedding matrix contains non-finite values".into()));
        }
        Ok(EmbeddingSet { tokens, index, matrix })
    }

    /// Same vocabulary, new matrix. The shape must match.
    pub fn with_matrix(&self, matrix: Array2<f64>) -> Result<Self> {
        if matrix.dim() != self.matrix.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: matrix.ncols() });
        }
        if !matrix.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("embedding matrix contains non-finite values".into()));
        }
        Ok(EmbeddingSet { tokens: self.tokens.clone(), index: self.index.clone(), matrix })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false // |W| >= 1 by construction
    }

    pub fn dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn matrix(&self) -> ArrayView2<'_, f64> {
        self.matrix.view()
    }

    pub fn into_matrix(self) -> Array2<f64> {
        self.matrix
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.matrix.row(i)
    }

    pub fn vector(&self, token: &str) -> Option<ArrayView1<'_, f64>> {
        self.index_of(token).map(|i| self.matrix.row(i))
    }

    pub fn load_glove_text(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(file);
        let mut line_no = 0usize;
        let mut rows = TextRows::new();

        let mut first = String::new();
        if !read_data_line(&mut r, &mut first, &mut line_no, path)? {
            return Err(Error::EmptyInput);
        }
        let first_line_no = line_no;
        let first_fields: Vec<&str> = first.split_whitespace().collect();
        let header: Option<(usize, usize)> = match first_fields.as_slice() {
            [a, b] => match (a.parse(), b.parse()) {
                (Ok(count), Ok(dim)) => Some((count, dim)),
                _ => None,
            },
            _ => None,
        };

        // A two-integer first line is only a header if the next data line
        // agrees with its dimension count; otherwise it is a d=1 data row.
        let mut pending_header = None;
        let mut buf = String::new();
        if let Some((count, hdim)) = header {
            let saw_second = read_data_line(&mut r, &mut buf, &mut line_no, path)?;
            if !saw_second || buf.split_whitespace().count() == hdim + 1 {
                pending_header = Some((count, hdim));
            } else {
                rows.push_line(&first, first_line_no, path)?;
            }
            if saw_second {
                rows.push_line(&buf, line_no, path)?;
            }
        } else {
            rows.push_line(&first, first_line_no, path)?;
        }

        while read_data_line(&mut r, &mut buf, &mut line_no, path)? {
            rows.push_line(&buf, line_no, path)?;
        }

        if rows.tokens.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some((count, _)) = pending_header {
            if count != rows.tokens.len() {
                return Err(Error::parse(
                    path,
                    first_line_no,
                    format!("header says {count} vectors, found {}", rows.tokens.len()),
                ));
            }
        }
        let d = rows.dim.expect("rows is non-empty");
        let matrix = Array2::from_shape_vec((rows.tokens.len(), d), rows.values)
            .expect("row lengths were checked per line");
        EmbeddingSet::new(rows.tokens, matrix)
    }

    /// Writes plain `token v1 .. vd` lines (no header). Values use the
    /// shortest decimal form that round-trips, so load(save(x)) == x.
    pub fn save_glove_text(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let mut buf = String::new();
        for (token, row) in self.tokens.iter().zip(self.matrix.rows()) {
            buf.clear();
            buf.push_str(token);
            for v in row {
                buf.push(' ');
                buf.push_str(&v.to_string());
            }
            buf.push('\n');
            w.write_all(buf.as_bytes()).map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load_word2vec_binary(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(file);

        let mut header = Vec::new();
        loop {
            let mut byte = [0u8; 1];
            if r.read_exact(&mut byte).is_err() {
                return Err(Error::parse(path, 0, "missing header"));
            }
            if byte[0] == b'\n' {
                break;
            }
            header.push(byte[0]);
            if header.len() > 64 {
                return Err(Error::parse(path, 0, "missing header"));
            }
        }
        let header = String::from_utf8(header).map_err(|_| Error::parse(path, 0, "bad header"))?;
        let (count, dim) = {
            let mut parts = header.split_whitespace();
            let count: Option<usize> = parts.next().and_then(|s| s.parse().ok());
            let dim: Option<usize> = parts.next().and_then(|s| s.parse().ok());
            match (count, dim, parts.next()) {
                (Some(c), Some(d), None) => (c, d),
                _ => return Err(Error::parse(path, 0, format!("bad header {header:?}"))),
            }
        };
        if count == 0 {
            return Err(Error::EmptyInput);
        }
        if dim == 0 {
            return Err(Error::parse(path, 0, "header says 0 dimensions"));
        }

        let mut tokens = Vec::with_capacity(count);
        let mut index = HashMap::with_capacity(count);
        let mut values = Vec::with_capacity(count * dim);
        for record in 1..=count {
            let mut token = Vec::new();
            loop {
                let mut byte = [0u8; 1];
                r.read_exact(&mut byte)
                    .map_err(|_| Error::parse(path, record, "unexpected end of file"))?;
                match byte[0] {
                    b' ' if !token.is_empty() => break,
                    b'\n' | b'\r' | b' ' => continue,
                    b => token.push(b),
                }
                if token.len() > MAX_TOKEN_BYTES {
                    return Err(Error::parse(path, record, "token exceeds 64 KiB"));
                }
            }
            let token = String::from_utf8(token)
                .map_err(|_| Error::parse(path, record, "token is not valid UTF-8"))?;
            for _ in 0..dim {
                let v = r
                    .read_f32::<LittleEndian>()
                    .map_err(|_| Error::parse(path, record, "unexpected end of file"))?;
                let v = v as f64;
                if !v.is_finite() {
                    return Err(Error::parse(path, record, "non-finite value"));
                }
                values.push(v);
            }
            if index.insert(token.clone(), tokens.len()).is_some() {
                return Err(Error::DuplicateToken { token, line: record });
            }
            tokens.push(token);
        }

        let matrix = Array2::from_shape_vec((count, dim), values).expect("dim fixed per record");
        EmbeddingSet::new(tokens, matrix)
    }

    /// Values are quantized to `f32` on write.
    pub fn save_word2vec_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "{} {}", self.len(), self.dim()).map_err(|e| Error::io(path, e))?;
        for (token, row) in self.tokens.iter().zip(self.matrix.rows()) {
            w.write_all(token.as_bytes()).map_err(|e| Error::io(path, e))?;
            w.write_all(b" ").map_err(|e| Error::io(path, e))?;
            for v in row {
                w.write_f32::<LittleEndian>(*v as f32).map_err(|e| Error::io(path, e))?;
            }
            w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Named list of unique tokens, used to select metric inputs.
#[derive(Debug, Clone)]
pub struct WordList {
    name: String,
    words: Vec<String>,
    set: HashSet<String>,
}

impl WordList {
    pub fn new(name: impl Into<String>, words: Vec<String>) -> Result<Self> {
        let name = name.into();
        let mut set = HashSet::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if !set.insert(w.clone()) {
                return Err(Error::DuplicateToken { token: w.clone(), line: i + 1 });
            }
        }
        Ok(WordList { name, words, set })
    }

    pub fn empty(name: impl Into<String>) -> Self {
        WordList { name: name.into(), words: Vec::new(), set: HashSet::new() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.set.contains(token)
    }

    pub fn iter(&self) -> impl Iterator<Item = &String> {
        self.words.iter()
    }

    /// Union preserving order of `self`, then new words of `other`.
    pub fn union(&self, other: &WordList, name: impl Into<String>) -> WordList {
        let mut words = self.words.clone();
        let mut set = self.set.clone();
        for w in &other.words {
            if set.insert(w.clone()) {
                words.push(w.clone());
            }
        }
        WordList { name: name.into(), words, set }
    }
}
