//! Text ingestion: tokenizer, vocabulary and the term-document count matrix.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Matrix;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("no documents supplied")]
    NoDocuments,
    #[error("no tokens in any document")]
    AllDocumentsEmpty,
    #[error("word {word:?} has zero total count")]
    ZeroRow { word: String },
    #[error("matrix already carries weighted entries")]
    NotRawCounts,
    #[error("duplicate vocabulary entry {0:?}")]
    DuplicateWord(String),
    #[error("malformed matrix file: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Lowercases and splits on every character that is not a letter or digit.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Unique tokens in first-occurrence order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_words<I, S>(words: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Vocabulary::new();
        for w in words {
            let w = w.into();
            if vocab.index.contains_key(&w) {
                return Err(CorpusError::DuplicateWord(w));
            }
            vocab.insert(&w);
        }
        Ok(vocab)
    }

    /// Returns the index of `word`, appending it if unseen.
    pub fn insert(&mut self, word: &str) -> usize {
        if let Some(&i) = self.index.get(word) {
            return i;
        }
        let i = self.words.len();
        self.words.push(word.to_string());
        self.index.insert(word.to_string(), i);
        i
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, i: usize) -> Option<&str> {
        self.words.get(i).map(String::as_str)
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
}

/// Word × document matrix. Row `m`, column `n` holds the count of word `m`
/// in document `n` (or a weighted transform of it).
#[derive(Debug, Clone, PartialEq)]
pub struct TermDocMatrix {
    vocab: Vocabulary,
    entries: Matrix,
    weighted: bool,
}

impl TermDocMatrix {
    /// Wraps an existing matrix. `weighted = false` asserts the entries are
    /// raw counts.
    pub fn from_parts(vocab: Vocabulary, entries: Matrix, weighted: bool) -> Result<Self, CorpusError> {
        if entries.nrows() != vocab.len() {
            return Err(CorpusError::Malformed(format!(
                "{} rows for {} vocabulary entries",
                entries.nrows(),
                vocab.len()
            )));
        }
        if !weighted && entries.iter().any(|&x| x < 0.0 || x.fract() != 0.0) {
            return Err(CorpusError::Malformed("raw counts must be nonnegative integers".into()));
        }
        Ok(Self { vocab, entries, weighted })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn doc_count(&self) -> usize {
        self.entries.ncols()
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn count(&self, word: &str, doc: usize) -> Option<f64> {
        let m = self.vocab.index_of(word)?;
        self.entries.get((m, doc)).copied()
    }

    pub fn row(&self, word: &str) -> Option<Vec<f64>> {
        let m = self.vocab.index_of(word)?;
        Some(self.entries.row(m).to_vec())
    }

    pub fn to_json(&self) -> Result<String, CorpusError> {
        Ok(serde_json::to_string_pretty(&MatrixFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self, CorpusError> {
        let file: MatrixFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CorpusError> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Builds the count matrix with first-occurrence vocabulary order.
pub fn build_matrix<S: AsRef<str>>(documents: &[S]) -> Result<TermDocMatrix, CorpusError> {
    build_matrix_excluding(documents, &[] as &[&str])
}

/// As [`build_matrix`], dropping every token listed in `excluded` (compared
/// after lowercasing).
pub fn build_matrix_excluding<S: AsRef<str>, E: AsRef<str>>(
    documents: &[S],
    excluded: &[E],
) -> Result<TermDocMatrix, CorpusError> {
    if documents.is_empty() {
        return Err(CorpusError::NoDocuments);
    }
    let excluded: HashSet<String> = excluded.iter().map(|w| w.as_ref().to_lowercase()).collect();
    let mut vocab = Vocabulary::new();
    let mut cells: Vec<(usize, usize)> = Vec::new();
    for (n, doc) in documents.iter().enumerate() {
        for tok in tokenize(doc.as_ref()) {
            if excluded.contains(&tok) {
                continue;
            }
            cells.push((vocab.insert(&tok), n));
        }
    }
    if vocab.is_empty() {
        return Err(CorpusError::AllDocumentsEmpty);
    }
    let mut entries = Array2::zeros((vocab.len(), documents.len()));
    for (m, n) in cells {
        entries[[m, n]] += 1.0;
    }
    Ok(TermDocMatrix { vocab, entries, weighted: false })
}

/// Log-entropy weighting: `log(1 + c) · (1 − H_m / log D)`, with `H_m` the
/// entropy of word `m`'s distribution over the `D` documents. For a single
/// document the global factor is 1.
pub fn entropy_weight(matrix: &TermDocMatrix) -> Result<TermDocMatrix, CorpusError> {
    if matrix.weighted {
        return Err(CorpusError::NotRawCounts);
    }
    let docs = matrix.doc_count();
    let mut out = matrix.entries.clone();
    for (m, mut row) in out.rows_mut().into_iter().enumerate() {
        let total: f64 = row.sum();
        if total <= 0.0 {
            return Err(CorpusError::ZeroRow {
                word: matrix.vocab.words[m].clone(),
            });
        }
        let factor = if docs == 1 {
            1.0
        } else {
            let entropy: f64 = row
                .iter()
                .filter(|&&c| c > 0.0)
                .map(|&c| {
                    let q = c / total;
                    -q * q.ln()
                })
                .sum();
            (1.0 - entropy / (docs as f64).ln()).clamp(0.0, 1.0)
        };
        row.mapv_inplace(|c| (1.0 + c).ln() * factor);
    }
    Ok(TermDocMatrix {
        vocab: matrix.vocab.clone(),
        entries: out,
        weighted: true,
    })
}

/// One document per line; lines holding only whitespace are skipped.
pub fn read_corpus(path: impl AsRef<Path>) -> Result<Vec<String>, CorpusError> {
    Ok(parse_corpus(&std::fs::read_to_string(path)?))
}

pub fn parse_corpus(text: &str) -> Vec<String> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Rows {
    Counts(Vec<Vec<u64>>),
    Weighted(Vec<Vec<f64>>),
}

#[derive(Debug, Serialize, Deserialize)]
struct MatrixFile {
    vocab: Vec<String>,
    doc_count: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    weighted: bool,
    rows: Rows,
}

impl From<&TermDocMatrix> for MatrixFile {
    fn from(m: &TermDocMatrix) -> Self {
        let rows = if m.weighted {
            Rows::Weighted(m.entries.rows().into_iter().map(|r| r.to_vec()).collect())
        } else {
            Rows::Counts(
                m.entries
                    .rows()
                    .into_iter()
                    .map(|r| r.iter().map(|&x| x as u64).collect())
                    .collect(),
            )
        };
        MatrixFile {
            vocab: m.vocab.words.clone(),
            doc_count: m.doc_count(),
            weighted: m.weighted,
            rows,
        }
    }
}

impl TryFrom<MatrixFile> for TermDocMatrix {
    type Error = CorpusError;

    fn try_from(file: MatrixFile) -> Result<Self, CorpusError> {
        let rows: Vec<Vec<f64>> = match file.rows {
            Rows::Counts(r) => r
                .into_iter()
                .map(|row| row.into_iter().map(|c| c as f64).collect())
                .collect(),
            Rows::Weighted(r) => r,
        };
        if rows.len() != file.vocab.len() {
            return Err(CorpusError::Malformed(format!(
                "{} rows for {} vocabulary entries",
                rows.len(),
                file.vocab.len()
            )));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != file.doc_count) {
            return Err(CorpusError::Malformed(format!(
                "row {bad} has {} entries, expected doc_count = {}",
                rows[bad].len(),
                file.doc_count
            )));
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        let entries = Array2::from_shape_vec((file.vocab.len(), file.doc_count), flat)
            .map_err(|e| CorpusError::Malformed(e.to_string()))?;
        TermDocMatrix::from_parts(Vocabulary::from_words(file.vocab)?, entries, file.weighted)
    }
}
