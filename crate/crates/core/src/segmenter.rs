//! Dictionary maximum-matching word segmentation.
//!
//! Text is first split into script runs. Runs of Han characters are cut into
//! words by maximum matching against a [`Lexicon`]; runs of letters and runs of
//! digits pass through as whole tokens. Whitespace, punctuation, symbols and
//! control characters delimit runs and are discarded.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use unicode_general_category::get_general_category;
use unicode_normalization::UnicodeNormalization;
use unicode_script::{Script, UnicodeScript};

use crate::error::{decode_utf8, Error, Result};

/// A dictionary of known words with relative frequency weights.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: HashMap<String, u64>,
    max_len: usize,
}

impl Lexicon {
    /// Parses a lexicon file: one `surface` or `surface<TAB>weight` per line,
    /// `#` comments and blank lines skipped, optional BOM stripped.
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let text = decode_utf8(bytes)?;
        let mut lex = Lexicon::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim_end_matches(['\r', ' ', '\t']);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let surface = fields.next().unwrap_or_default();
            let weight = match fields.next() {
                None => 1,
                Some(w) => w.trim().parse::<u64>().map_err(|_| Error::InvalidWeight {
                    value: w.to_string(),
                    line: line_no,
                })?,
            };
            if fields.next().is_some() {
                return Err(Error::MalformedLine {
                    line: line_no,
                    reason: "more than two tab-separated fields".into(),
                });
            }
            if surface.is_empty() || surface.chars().any(char::is_whitespace) {
                return Err(Error::MalformedLine {
                    line: line_no,
                    reason: format!("surface `{surface}` is empty or contains whitespace"),
                });
            }
            let surface: String = surface.nfc().collect();
            if lex.entries.contains_key(&surface) {
                return Err(Error::DuplicateSurface {
                    surface,
                    line: line_no,
                });
            }
            lex.insert(surface, weight);
        }
        Ok(lex)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&bytes).map_err(|e| Error::parse(path, e.to_string()))
    }

    /// Builds a lexicon from bare surfaces, each with weight 1. Later
    /// duplicates are ignored.
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut lex = Lexicon::default();
        for w in words {
            let w: String = w.as_ref().nfc().collect();
            if !w.is_empty() && !lex.entries.contains_key(&w) {
                lex.insert(w, 1);
            }
        }
        lex
    }

    fn insert(&mut self, surface: String, weight: u64) {
        self.max_len = self.max_len.max(surface.chars().count());
        self.entries.insert(surface, weight);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Character length of the longest surface.
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.entries.contains_key(surface)
    }

    pub fn weight(&self, surface: &str) -> Option<u64> {
        self.entries.get(surface).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenClass {
    /// A surface found in the lexicon.
    Lexicon,
    /// A single out-of-vocabulary Han character.
    HanFallback,
    /// A maximal run of non-Han letters.
    Latin,
    /// A maximal run of digits.
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub surface: String,
    pub class: TokenClass,
}

impl Token {
    fn new(surface: impl Into<String>, class: TokenClass) -> Self {
        Token {
            surface: surface.into(),
            class,
        }
    }

    /// Rebuilds a token from an already-segmented surface, taking the class
    /// from its first character. Han surfaces are treated as lexicon words.
    pub fn infer(surface: &str) -> Self {
        let class = match surface.chars().next().map(classify) {
            Some(CharClass::Letter) => TokenClass::Latin,
            Some(CharClass::Digit) => TokenClass::Numeric,
            _ => TokenClass::Lexicon,
        };
        Token::new(surface.nfc().collect::<String>(), class)
    }

    /// The word identity used for counting: letter runs are lower-cased,
    /// everything else is the surface itself.
    pub fn key(&self) -> Cow<'_, str> {
        match self.class {
            TokenClass::Latin => Cow::Owned(self.surface.to_lowercase()),
            _ => Cow::Borrowed(&self.surface),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    Forward,
    Backward,
    Bidirectional,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "forward" => Ok(Strategy::Forward),
            "backward" => Ok(Strategy::Backward),
            "bidirectional" => Ok(Strategy::Bidirectional),
            other => Err(format!(
                "unknown strategy `{other}` (expected forward, backward or bidirectional)"
            )),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Forward => "forward",
            Strategy::Backward => "backward",
            Strategy::Bidirectional => "bidirectional",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Delimiter,
    Han,
    Letter,
    Digit,
}

fn classify(c: char) -> CharClass {
    if c.is_whitespace() {
        return CharClass::Delimiter;
    }
    let cat = get_general_category(c).abbreviation();
    match cat.as_bytes()[0] {
        b'P' | b'S' | b'C' | b'Z' => CharClass::Delimiter,
        _ if c.script() == Script::Han => CharClass::Han,
        b'N' => CharClass::Digit,
        _ => CharClass::Letter,
    }
}

/// True for characters that segmentation discards: whitespace and the
/// punctuation, symbol, separator and other/control categories.
pub fn is_delimiter(c: char) -> bool {
    classify(c) == CharClass::Delimiter
}

/// Splits `text` into tokens. Segmentation is total: every non-delimiter
/// character of the NFC-normalized input ends up in exactly one token, in
/// order.
pub fn segment(text: &str, lex: &Lexicon, strategy: Strategy) -> Vec<Token> {
    let text: String = text.nfc().collect();
    let mut tokens = Vec::new();
    let mut run_start = 0;
    let mut run_class = CharClass::Delimiter;

    let flush = |tokens: &mut Vec<Token>, run: &str, class: CharClass| match class {
        CharClass::Delimiter => {}
        CharClass::Han => tokens.extend(segment_han(run, lex, strategy)),
        CharClass::Letter => tokens.push(Token::new(run, TokenClass::Latin)),
        CharClass::Digit => tokens.push(Token::new(run, TokenClass::Numeric)),
    };

    for (pos, c) in text.char_indices() {
        let class = classify(c);
        if class != run_class {
            flush(&mut tokens, &text[run_start..pos], run_class);
            run_start = pos;
            run_class = class;
        }
    }
    flush(&mut tokens, &text[run_start..], run_class);
    tokens
}

fn segment_han(run: &str, lex: &Lexicon, strategy: Strategy) -> Vec<Token> {
    let bounds: Vec<usize> = run
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(run.len()))
        .collect();
    match strategy {
        Strategy::Forward => forward_match(run, &bounds, lex),
        Strategy::Backward => backward_match(run, &bounds, lex),
        Strategy::Bidirectional => {
            let fwd = forward_match(run, &bounds, lex);
            let bwd = backward_match(run, &bounds, lex);
            if score(&bwd, lex) < score(&fwd, lex) {
                bwd
            } else {
                fwd
            }
        }
    }
}

/// Lower is better: fewer tokens, then fewer fallbacks, then higher weight.
fn score(tokens: &[Token], lex: &Lexicon) -> (usize, usize, std::cmp::Reverse<u64>) {
    let fallbacks = tokens
        .iter()
        .filter(|t| t.class == TokenClass::HanFallback)
        .count();
    let weight = tokens.iter().filter_map(|t| lex.weight(&t.surface)).sum();
    (tokens.len(), fallbacks, std::cmp::Reverse(weight))
}

fn forward_match(run: &str, bounds: &[usize], lex: &Lexicon) -> Vec<Token> {
    let n = bounds.len() - 1;
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let longest = lex.max_len().min(n - i);
        let hit = (1..=longest)
            .rev()
            .find(|&len| lex.contains(&run[bounds[i]..bounds[i + len]]));
        match hit {
            Some(len) => {
                out.push(Token::new(
                    &run[bounds[i]..bounds[i + len]],
                    TokenClass::Lexicon,
                ));
                i += len;
            }
            None => {
                out.push(Token::new(
                    &run[bounds[i]..bounds[i + 1]],
                    TokenClass::HanFallback,
                ));
                i += 1;
            }
        }
    }
    out
}

fn backward_match(run: &str, bounds: &[usize], lex: &Lexicon) -> Vec<Token> {
    let mut out = Vec::new();
    let mut end = bounds.len() - 1;
    while end > 0 {
        let longest = lex.max_len().min(end);
        let hit = (1..=longest)
            .rev()
            .find(|&len| lex.contains(&run[bounds[end - len]..bounds[end]]));
        match hit {
            Some(len) => {
                out.push(Token::new(
                    &run[bounds[end - len]..bounds[end]],
                    TokenClass::Lexicon,
                ));
                end -= len;
            }
            None => {
                out.push(Token::new(
                    &run[bounds[end - 1]..bounds[end]],
                    TokenClass::HanFallback,
                ));
                end -= 1;
            }
        }
    }
    out.reverse();
    out
}
