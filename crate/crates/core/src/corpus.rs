//! Documents, word frequencies and vocabulary selection.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use unicode_normalization::UnicodeNormalization;

use crate::error::{decode_utf8, Error, Result};
use crate::segmenter::{segment, Lexicon, Strategy, Token};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum DocumentFormat {
    /// One document per line, ids are 1-based line numbers.
    #[default]
    Lines,
    /// `id<TAB>text` per line.
    Tsv,
}

impl FromStr for DocumentFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lines" => Ok(DocumentFormat::Lines),
            "tsv" => Ok(DocumentFormat::Tsv),
            other => Err(format!(
                "unknown input format `{other}` (expected lines or tsv)"
            )),
        }
    }
}

impl fmt::Display for DocumentFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DocumentFormat::Lines => "lines",
            DocumentFormat::Tsv => "tsv",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub raw: String,
    /// `None` until the document has been segmented.
    pub tokens: Option<Vec<Token>>,
}

impl Document {
    pub fn new(id: impl Into<String>, raw: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            raw: raw.into(),
            tokens: None,
        }
    }

    fn tokens(&self) -> Result<&[Token]> {
        self.tokens
            .as_deref()
            .ok_or_else(|| Error::Untokenized(self.id.clone()))
    }
}

pub fn read_documents(bytes: &[u8], format: DocumentFormat) -> Result<Vec<Document>> {
    let text = decode_utf8(bytes)?;
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let doc = match format {
            DocumentFormat::Lines => Document::new((i + 1).to_string(), line),
            DocumentFormat::Tsv => {
                let (id, body) = line.split_once('\t').ok_or_else(|| Error::MalformedLine {
                    line: i + 1,
                    reason: "expected `id<TAB>text`".into(),
                })?;
                if !seen.insert(id.to_string()) {
                    return Err(Error::DuplicateDocumentId(id.to_string()));
                }
                Document::new(id, body)
            }
        };
        docs.push(doc);
    }
    Ok(docs)
}

pub fn read_documents_path(
    path: impl AsRef<Path>,
    format: DocumentFormat,
) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    read_documents(&bytes, format).map_err(|e| Error::parse(path, e.to_string()))
}

/// Segments every document. Previous tokens, if any, are replaced.
pub fn tokenize_corpus(docs: Vec<Document>, lex: &Lexicon, strategy: Strategy) -> Vec<Document> {
    docs.into_iter()
        .map(|mut d| {
            d.tokens = Some(segment(&d.raw, lex, strategy));
            d
        })
        .collect()
}

/// Writes tokenized documents as `id<TAB>token token ...`, one per line.
pub fn write_segmented<W: Write>(docs: &[Document], mut out: W) -> Result<()> {
    let mut buf = String::new();
    for d in docs {
        let tokens = d.tokens()?;
        buf.push_str(&d.id);
        buf.push('\t');
        for (i, t) in tokens.iter().enumerate() {
            if i > 0 {
                buf.push(' ');
            }
            buf.push_str(&t.surface);
        }
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())
        .map_err(|e| Error::io("<segmented output>", e))
}

/// Reads a pre-segmented corpus (`id<TAB>token token ...`), as produced by
/// [`write_segmented`] or an external segmenter. Token classes are inferred
/// from each token's first character.
pub fn read_segmented(bytes: &[u8]) -> Result<Vec<Document>> {
    read_documents(bytes, DocumentFormat::Tsv).map(|docs| {
        docs.into_iter()
            .map(|mut d| {
                let tokens = d.raw.split_whitespace().map(Token::infer).collect();
                d.tokens = Some(tokens);
                d
            })
            .collect()
    })
}

pub fn read_segmented_path(path: impl AsRef<Path>) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    read_segmented(&bytes).map_err(|e| Error::parse(path, e.to_string()))
}

/// Words excluded from counting, compared by case-folded key.
#[derive(Debug, Clone, Default)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let text = decode_utf8(bytes)?;
        Ok(Stopwords(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| l.nfc().collect::<String>().to_lowercase())
                .collect(),
        ))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&bytes).map_err(|e| Error::parse(path, e.to_string()))
    }

    pub fn contains(&self, key: &str) -> bool {
        self.0.contains(key)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, docs: &mut [Document]) {
        if self.0.is_empty() {
            return;
        }
        for d in docs {
            if let Some(tokens) = d.tokens.as_mut() {
                tokens.retain(|t| !self.0.contains(t.key().as_ref()));
            }
        }
    }
}

/// Corpus-wide token occurrence counts keyed by case-folded word.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: BTreeMap<String, u64>,
    labels: BTreeMap<String, String>,
    total: u64,
}

impl FrequencyTable {
    pub fn count(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    /// First-seen surface form of a word.
    pub fn label<'a>(&'a self, word: &'a str) -> &'a str {
        self.labels.get(word).map(String::as_str).unwrap_or(word)
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn hapax(&self) -> usize {
        self.counts.values().filter(|&&c| c == 1).count()
    }

    /// Words by descending count, ties by codepoint order.
    pub fn ranked(&self) -> Vec<(&str, u64)> {
        let mut rows: Vec<(&str, u64)> =
            self.counts.iter().map(|(w, &c)| (w.as_str(), c)).collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        rows
    }
}

pub fn build_frequency_table(docs: &[Document]) -> Result<FrequencyTable> {
    let mut table = FrequencyTable::default();
    for d in docs {
        for t in d.tokens()? {
            let key = t.key();
            *table.counts.entry(key.to_string()).or_insert(0) += 1;
            table.total += 1;
            if !table.labels.contains_key(key.as_ref()) {
                table.labels.insert(key.into_owned(), t.surface.clone());
            }
        }
    }
    Ok(table)
}

/// The analysis vocabulary: words with count at or above `min_count`,
/// ordered by descending count and then codepoint order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    labels: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
    min_count: u64,
}

impl Vocabulary {
    fn from_rows(rows: Vec<(String, String, u64)>, min_count: u64) -> Self {
        let mut v = Vocabulary {
            words: Vec::with_capacity(rows.len()),
            labels: Vec::with_capacity(rows.len()),
            counts: Vec::with_capacity(rows.len()),
            index: HashMap::with_capacity(rows.len()),
            min_count,
        };
        for (word, label, count) in rows {
            v.index.insert(word.clone(), v.words.len());
            v.words.push(word);
            v.labels.push(label);
            v.counts.push(count);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Case-folded word keys in row order.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Display forms in row order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    /// Returns a copy without the given rows, order otherwise preserved.
    pub fn without(&self, rows: &[usize]) -> Vocabulary {
        let drop: HashSet<usize> = rows.iter().copied().collect();
        let kept = (0..self.len())
            .filter(|i| !drop.contains(i))
            .map(|i| {
                (
                    self.words[i].clone(),
                    self.labels[i].clone(),
                    self.counts[i],
                )
            })
            .collect();
        Vocabulary::from_rows(kept, self.min_count)
    }
}

pub fn select_vocabulary(table: &FrequencyTable, min_count: u64) -> Result<Vocabulary> {
    let min_count = min_count.max(1);
    let rows: Vec<(String, String, u64)> = table
        .ranked()
        .into_iter()
        .take_while(|&(_, c)| c >= min_count)
        .map(|(w, c)| (w.to_string(), table.label(w).to_string(), c))
        .collect();
    if rows.is_empty() {
        return Err(Error::EmptyVocabulary { min_count });
    }
    Ok(Vocabulary::from_rows(rows, min_count))
}
