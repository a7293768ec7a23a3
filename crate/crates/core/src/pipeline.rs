//! End-to-end run from a raw corpus to map files, and the stage helpers the
//! command-line subcommands share with it. Nothing here draws random
//! numbers, so identical inputs always give byte-identical outputs.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::cooccurrence::{
    build_occurrence_matrix, cosine_matrix, threshold_edges, threshold_stats, MatrixMode,
    OccurrenceMatrix, SimilarityMatrix, Threshold, ThresholdStats,
};
use crate::corpus::{
    build_frequency_table, read_documents_path, read_segmented_path, select_vocabulary,
    tokenize_corpus, write_segmented, Document, DocumentFormat, FrequencyTable, Stopwords,
    Vocabulary,
};
use crate::error::{Error, Result};
use crate::factors::{analyze, zero_variance_rows, FactorReport};
use crate::graphio::{build_semantic_graph, pajek, tables};
use crate::segmenter::{Lexicon, Strategy};

pub const SEGMENTED_TSV: &str = "segmented.tsv";
pub const MAP_BASENAME: &str = "map";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Read,
    Frequency,
    Vocabulary,
    Occurrence,
    Cosine,
    Threshold,
    Factors,
    Graph,
    Export,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Read => "read",
            Stage::Frequency => "frequency",
            Stage::Vocabulary => "vocabulary",
            Stage::Occurrence => "occurrence",
            Stage::Cosine => "cosine",
            Stage::Threshold => "threshold",
            Stage::Factors => "factors",
            Stage::Graph => "graph",
            Stage::Export => "export",
        })
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{stage} stage failed: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, PipelineError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, PipelineError> {
        self.map_err(|source| PipelineError { stage, source })
    }
}

/// Where the documents come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    /// Raw text segmented with a lexicon.
    Raw {
        path: PathBuf,
        format: DocumentFormat,
        lexicon: PathBuf,
        strategy: Strategy,
    },
    /// Already segmented `id<TAB>tokens` file.
    Segmented(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input: Input,
    pub stopwords: Option<PathBuf>,
    pub min_count: u64,
    pub mode: MatrixMode,
    pub threshold: Threshold,
    pub k: usize,
    pub drop_degenerate: bool,
    pub output_dir: PathBuf,
    pub emit_intermediate: bool,
}

impl PipelineConfig {
    pub fn new(input: Input, output_dir: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            input,
            stopwords: None,
            min_count: 10,
            mode: MatrixMode::Count,
            threshold: Threshold::Auto,
            k: 4,
            drop_degenerate: false,
            output_dir: output_dir.into(),
            emit_intermediate: false,
        }
    }
}

/// Reads and segments the corpus, then removes stopwords.
pub fn load_documents(
    input: &Input,
    stopwords: Option<&Path>,
) -> std::result::Result<Vec<Document>, PipelineError> {
    let mut docs = match input {
        Input::Raw {
            path,
            format,
            lexicon,
            strategy,
        } => {
            let docs = read_documents_path(path, *format).at(Stage::Read)?;
            let lex = Lexicon::from_path(lexicon).at(Stage::Read)?;
            tokenize_corpus(docs, &lex, *strategy)
        }
        Input::Segmented(path) => read_segmented_path(path).at(Stage::Read)?,
    };
    if let Some(path) = stopwords {
        Stopwords::from_path(path).at(Stage::Read)?.apply(&mut docs);
    }
    Ok(docs)
}

/// Vocabulary and occurrence matrix, optionally without zero-variance words.
/// Returns the dropped labels alongside.
pub fn build_matrix(
    docs: &[Document],
    table: &FrequencyTable,
    min_count: u64,
    mode: MatrixMode,
    drop_degenerate: bool,
) -> std::result::Result<(Vocabulary, OccurrenceMatrix, Vec<String>), PipelineError> {
    let vocab = select_vocabulary(table, min_count).at(Stage::Vocabulary)?;
    let occ = build_occurrence_matrix(docs, &vocab, mode).at(Stage::Occurrence)?;
    if !drop_degenerate {
        return Ok((vocab, occ, Vec::new()));
    }
    let rows = zero_variance_rows(&occ);
    if rows.is_empty() {
        return Ok((vocab, occ, Vec::new()));
    }
    let dropped = rows.iter().map(|&i| occ.labels()[i].clone()).collect();
    let vocab = vocab.without(&rows);
    if vocab.is_empty() {
        return Err(PipelineError {
            stage: Stage::Vocabulary,
            source: Error::EmptyVocabulary { min_count },
        });
    }
    let occ = occ.without_rows(&rows).at(Stage::Occurrence)?;
    Ok((vocab, occ, dropped))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub documents: usize,
    pub distinct_words: usize,
    pub total_words: u64,
    pub hapax: usize,
    pub vocabulary: usize,
    pub dropped: Vec<String>,
    pub stats: ThresholdStats,
    pub threshold: f64,
    pub edges: usize,
    pub k: usize,
    pub kaiser_count: usize,
    pub percent_per_factor: Vec<f64>,
    pub percent_total: f64,
    pub files: Vec<PathBuf>,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "documents           {}", self.documents)?;
        writeln!(f, "distinct words      {}", self.distinct_words)?;
        writeln!(f, "total words         {}", self.total_words)?;
        writeln!(f, "hapax words         {}", self.hapax)?;
        writeln!(f, "vocabulary size     {}", self.vocabulary)?;
        writeln!(f, "mean cosine (>0)    {:.6}", self.stats.mean_nonzero)?;
        writeln!(f, "mean cosine (all)   {:.6}", self.stats.mean_all)?;
        writeln!(f, "threshold used      {:.6}", self.threshold)?;
        writeln!(f, "edges               {}", self.edges)?;
        writeln!(f, "factors (k)         {}", self.k)?;
        writeln!(f, "kaiser count        {}", self.kaiser_count)?;
        let per: Vec<String> = self
            .percent_per_factor
            .iter()
            .map(|p| format!("{p:.2}"))
            .collect();
        writeln!(f, "percent per factor  {}", per.join(" "))?;
        write!(f, "percent total       {:.2}", self.percent_total)
    }
}

/// Everything a run computes, kept for callers that want more than files.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub documents: Vec<Document>,
    pub table: FrequencyTable,
    pub vocabulary: Vocabulary,
    pub dropped: Vec<String>,
    pub occurrence: OccurrenceMatrix,
    pub similarity: SimilarityMatrix,
    pub stats: ThresholdStats,
    pub report: FactorReport,
}

pub fn analyze_corpus(config: &PipelineConfig) -> std::result::Result<Analysis, PipelineError> {
    let documents = load_documents(&config.input, config.stopwords.as_deref())?;
    let table = build_frequency_table(&documents).at(Stage::Frequency)?;
    let (vocabulary, occurrence, dropped) = build_matrix(
        &documents,
        &table,
        config.min_count,
        config.mode,
        config.drop_degenerate,
    )?;
    let similarity = cosine_matrix(&occurrence).at(Stage::Cosine)?;
    let stats = threshold_stats(&similarity).at(Stage::Threshold)?;
    let report = analyze(&occurrence, config.k).at(Stage::Factors)?;
    Ok(Analysis {
        documents,
        table,
        vocabulary,
        dropped,
        occurrence,
        similarity,
        stats,
        report,
    })
}

pub fn run_pipeline(config: &PipelineConfig) -> std::result::Result<RunSummary, PipelineError> {
    let a = analyze_corpus(config)?;
    let threshold = config
        .threshold
        .resolve(&a.similarity)
        .at(Stage::Threshold)?;
    let edges = threshold_edges(&a.similarity, threshold);
    let graph =
        build_semantic_graph(&a.vocabulary, &a.table, &edges, &a.report).at(Stage::Graph)?;

    let dir = &config.output_dir;
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::io(dir, e))
        .at(Stage::Export)?;
    let mut files: Vec<PathBuf> = pajek::write_pajek(&graph, dir.join(MAP_BASENAME))
        .at(Stage::Export)?
        .into();
    files.extend(
        tables::write_csv_outputs(
            dir,
            &a.table,
            &a.occurrence,
            &a.similarity,
            &a.report,
            a.vocabulary.counts(),
            config.emit_intermediate,
        )
        .at(Stage::Export)?,
    );
    if config.emit_intermediate {
        let path = dir.join(SEGMENTED_TSV);
        write_segmented_path(&a.documents, &path).at(Stage::Export)?;
        files.push(path);
    }

    Ok(RunSummary {
        documents: a.documents.len(),
        distinct_words: a.table.distinct(),
        total_words: a.table.total(),
        hapax: a.table.hapax(),
        vocabulary: a.vocabulary.len(),
        dropped: a.dropped,
        stats: a.stats,
        threshold,
        edges: edges.len(),
        k: a.report.k,
        kaiser_count: a.report.kaiser_count,
        percent_per_factor: a.report.percent_per_factor,
        percent_total: a.report.percent_total,
        files,
    })
}

pub fn write_segmented_path(docs: &[Document], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    write_segmented(docs, &mut out).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })?;
    std::io::Write::flush(&mut out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(dir: &Path) -> PipelineConfig {
        let text = dir.join("corpus.txt");
        let lex = dir.join("lexicon.txt");
        std::fs::write(
            &text,
            "北京大学学报\n北京大学学报\n临床医学杂志\n临床医学杂志\n大学学报\n医学杂志\n北京\n",
        )
        .unwrap();
        std::fs::write(&lex, "北京\n大学\n学报\n临床\n医学\n杂志\n").unwrap();
        let mut cfg = PipelineConfig::new(
            Input::Raw {
                path: text,
                format: DocumentFormat::Lines,
                lexicon: lex,
                strategy: Strategy::Forward,
            },
            dir.join("out"),
        );
        cfg.min_count = 2;
        cfg.k = 2;
        cfg
    }

    #[test]
    fn defaults() {
        let cfg = PipelineConfig::new(Input::Segmented("x".into()), "out");
        assert_eq!(cfg.min_count, 10);
        assert_eq!(cfg.k, 4);
        assert_eq!(cfg.threshold, Threshold::Auto);
        assert_eq!(cfg.mode, MatrixMode::Count);
    }

    #[test]
    fn run_writes_default_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = corpus(dir.path());
        let summary = run_pipeline(&cfg).unwrap();
        assert_eq!(summary.documents, 7);
        assert_eq!(summary.vocabulary, 6);
        assert_eq!(summary.k, 2);
        assert_eq!(summary.threshold, summary.stats.mean_nonzero);
        let mut names: Vec<String> = summary
            .files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        names.sort();
        assert_eq!(
            names,
            [
                "cosine.csv",
                "eigenvalues.csv",
                "factor_summary.csv",
                "factors.csv",
                "map.clu",
                "map.net",
                "map.vec"
            ]
        );
    }

    #[test]
    fn intermediate_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = corpus(dir.path());
        cfg.emit_intermediate = true;
        run_pipeline(&cfg).unwrap();
        for name in [SEGMENTED_TSV, tables::FREQUENCY_CSV, tables::OCCURRENCE_CSV] {
            assert!(cfg.output_dir.join(name).exists(), "{name}");
        }
        let seg = std::fs::read_to_string(cfg.output_dir.join(SEGMENTED_TSV)).unwrap();
        assert!(seg.starts_with("1\t北京 大学 学报\n"));
    }

    #[test]
    fn stage_named_in_errors() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = corpus(dir.path());
        cfg.min_count = 1_000_000;
        let err = run_pipeline(&cfg).unwrap_err();
        assert_eq!(err.stage, Stage::Vocabulary);
        assert!(matches!(err.source, Error::EmptyVocabulary { .. }));
        assert!(err.to_string().starts_with("vocabulary stage failed"));

        cfg.input = Input::Segmented(dir.path().join("missing.tsv"));
        assert_eq!(run_pipeline(&cfg).unwrap_err().stage, Stage::Read);
    }

    #[test]
    fn explicit_threshold_is_strict() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = corpus(dir.path());
        let a = analyze_corpus(&cfg).unwrap();
        let t = a.similarity.get(0, 1);
        cfg.threshold = Threshold::Fixed(t);
        let summary = run_pipeline(&cfg).unwrap();
        let strictly_above = a
            .similarity
            .upper_pairs()
            .filter(|&(_, _, w)| w > t)
            .count();
        assert_eq!(summary.edges, strictly_above);
    }

    #[test]
    fn degenerate_words_dropped_on_request() {
        let dir = tempfile::tempdir().unwrap();
        let tokens = dir.path().join("tokens.tsv");
        std::fs::write(&tokens, "a\t学报 大学 医学\nb\t学报 医学\nc\t学报 大学\n").unwrap();
        let mut cfg = PipelineConfig::new(Input::Segmented(tokens), dir.path().join("out"));
        cfg.min_count = 2;
        cfg.k = 1;
        let err = run_pipeline(&cfg).unwrap_err();
        assert_eq!(err.stage, Stage::Factors);
        assert!(matches!(err.source, Error::ZeroVariance(ref w) if w == &["学报".to_string()]));
        cfg.drop_degenerate = true;
        let summary = run_pipeline(&cfg).unwrap();
        assert_eq!(summary.dropped, ["学报"]);
        assert_eq!(summary.vocabulary, 2);
    }
}
