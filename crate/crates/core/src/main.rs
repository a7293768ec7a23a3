use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coword::cooccurrence::{
    cosine_matrix, threshold_edges, threshold_stats, MatrixMode, Threshold,
};
use coword::corpus::{build_frequency_table, read_segmented_path, DocumentFormat};
use coword::factors::analyze;
use coword::graphio::tables;
use coword::pipeline::{
    build_matrix, load_documents, run_pipeline, write_segmented_path, Input, PipelineConfig,
    PipelineError, Stage,
};
use coword::segmenter::Strategy;
use coword::Error;

const EXIT_STAGE_ERROR: u8 = 1;
const EXIT_EMPTY_VOCABULARY: u8 = 3;

/// Co-word semantic maps for Chinese and mixed-script title corpora.
#[derive(Parser)]
#[command(name = "coword", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment a raw corpus into `id<TAB>tokens` lines.
    Segment {
        #[command(flatten)]
        raw: RawInput,
        #[arg(long)]
        stopwords: Option<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Word frequency table of a segmented corpus.
    Freq {
        #[arg(long)]
        tokens: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Word-by-document occurrence matrix of a segmented corpus.
    Matrix {
        #[arg(long)]
        tokens: PathBuf,
        #[command(flatten)]
        vocab: VocabArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Cosine similarity matrix from an occurrence matrix.
    Cosine {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Factor analysis of an occurrence matrix.
    Factors {
        #[arg(long)]
        matrix: PathBuf,
        /// Frequency table supplying the word counts; the matrix row totals
        /// are used when omitted.
        #[arg(long)]
        freq: Option<PathBuf>,
        #[arg(short, long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Full pipeline from corpus to map files.
    Map(MapArgs),
}

#[derive(Args)]
struct RawInput {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, default_value_t = DocumentFormat::Lines)]
    format: DocumentFormat,
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long, default_value_t = Strategy::Forward)]
    strategy: Strategy,
}

#[derive(Args)]
struct VocabArgs {
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    min_count: u64,
    #[arg(long, default_value_t = MatrixMode::Count)]
    mode: MatrixMode,
    /// Drop words with zero variance across documents instead of failing.
    #[arg(long)]
    drop_degenerate: bool,
}

#[derive(Args)]
struct MapArgs {
    #[arg(
        short,
        long,
        required_unless_present = "tokens",
        conflicts_with = "tokens"
    )]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = DocumentFormat::Lines)]
    format: DocumentFormat,
    #[arg(long, required_unless_present = "tokens")]
    lexicon: Option<PathBuf>,
    #[arg(long, default_value_t = Strategy::Forward)]
    strategy: Strategy,
    /// Pre-segmented `id<TAB>tokens` corpus used instead of --input.
    #[arg(long)]
    tokens: Option<PathBuf>,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[command(flatten)]
    vocab: VocabArgs,
    /// `auto` (mean of the nonzero cosines) or a value in [0, 1].
    #[arg(long, default_value_t = Threshold::Auto)]
    threshold: Threshold,
    #[arg(short, long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long)]
    output_dir: PathBuf,
    /// Also write segmented.tsv, frequency.csv and occurrence.csv.
    #[arg(long)]
    emit_intermediate: bool,
}

type Outcome = Result<(), PipelineError>;

fn fail(stage: Stage) -> impl FnOnce(Error) -> PipelineError {
    move |source| PipelineError { stage, source }
}

fn report_dropped(dropped: &[String]) {
    if !dropped.is_empty() {
        eprintln!("dropped zero-variance words: {}", dropped.join(", "));
    }
}

fn segment(raw: RawInput, stopwords: Option<PathBuf>, output: Option<PathBuf>) -> Outcome {
    let input = Input::Raw {
        path: raw.input,
        format: raw.format,
        lexicon: raw.lexicon,
        strategy: raw.strategy,
    };
    let docs = load_documents(&input, stopwords.as_deref())?;
    match output {
        Some(path) => write_segmented_path(&docs, &path).map_err(fail(Stage::Export)),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            coword::corpus::write_segmented(&docs, &mut lock).map_err(fail(Stage::Export))?;
            lock.flush().map_err(|e| {
                fail(Stage::Export)(Error::Io {
                    path: "<stdout>".into(),
                    source: e,
                })
            })
        }
    }
}

fn freq(tokens: &Path, output: &Path) -> Outcome {
    let docs = read_segmented_path(tokens).map_err(fail(Stage::Read))?;
    let table = build_frequency_table(&docs).map_err(fail(Stage::Frequency))?;
    tables::write_frequency_path(&table, output).map_err(fail(Stage::Export))?;
    println!(
        "distinct {}  total {}  hapax {}",
        table.distinct(),
        table.total(),
        table.hapax()
    );
    Ok(())
}

fn matrix(tokens: &Path, vocab: VocabArgs, output: &Path) -> Outcome {
    let docs = read_segmented_path(tokens).map_err(fail(Stage::Read))?;
    let table = build_frequency_table(&docs).map_err(fail(Stage::Frequency))?;
    let (v, occ, dropped) = build_matrix(
        &docs,
        &table,
        vocab.min_count,
        vocab.mode,
        vocab.drop_degenerate,
    )?;
    report_dropped(&dropped);
    tables::write_occurrence_path(&occ, output).map_err(fail(Stage::Export))?;
    println!("vocabulary {}  documents {}", v.len(), occ.n_docs());
    Ok(())
}

fn cosine(matrix: &Path, output: &Path) -> Outcome {
    let occ = tables::read_occurrence_csv(matrix).map_err(fail(Stage::Read))?;
    let sim = cosine_matrix(&occ).map_err(fail(Stage::Cosine))?;
    let stats = threshold_stats(&sim).map_err(fail(Stage::Threshold))?;
    tables::write_similarity_path(&sim, output).map_err(fail(Stage::Export))?;
    let edges = threshold_edges(&sim, stats.mean_nonzero);
    println!(
        "mean cosine (>0) {:.6}  mean cosine (all) {:.6}  edges above auto threshold {}",
        stats.mean_nonzero,
        stats.mean_all,
        edges.len()
    );
    Ok(())
}

fn factors(matrix: &Path, freq: Option<&Path>, k: usize, dir: &Path) -> Outcome {
    let occ = tables::read_occurrence_csv(matrix).map_err(fail(Stage::Read))?;
    let counts: Vec<u64> = match freq {
        Some(path) => {
            let table: HashMap<String, u64> = tables::read_frequency_csv(path)
                .map_err(fail(Stage::Read))?
                .into_iter()
                .collect();
            occ.labels()
                .iter()
                .map(|w| {
                    table.get(w).copied().ok_or_else(|| {
                        fail(Stage::Read)(Error::VocabularyMismatch(format!(
                            "`{w}` is missing from {}",
                            path.display()
                        )))
                    })
                })
                .collect::<Result<_, _>>()?
        }
        None => occ.row_totals().to_vec(),
    };
    let report = analyze(&occ, k).map_err(fail(Stage::Factors))?;
    std::fs::create_dir_all(dir).map_err(|e| {
        fail(Stage::Export)(Error::Io {
            path: dir.into(),
            source: e,
        })
    })?;
    tables::write_factor_outputs(&report, &counts, dir).map_err(fail(Stage::Export))?;
    let per: Vec<String> = report
        .percent_per_factor
        .iter()
        .map(|p| format!("{p:.2}"))
        .collect();
    println!(
        "kaiser count {}  percent per factor {}  total {:.2}",
        report.kaiser_count,
        per.join(" "),
        report.percent_total
    );
    Ok(())
}

fn map(args: MapArgs) -> Outcome {
    let input = match (args.tokens, args.input, args.lexicon) {
        (Some(tokens), _, _) => Input::Segmented(tokens),
        (None, Some(path), Some(lexicon)) => Input::Raw {
            path,
            format: args.format,
            lexicon,
            strategy: args.strategy,
        },
        _ => unreachable!("clap enforces --input with --lexicon, or --tokens"),
    };
    let mut config = PipelineConfig::new(input, args.output_dir);
    config.stopwords = args.stopwords;
    config.min_count = args.vocab.min_count;
    config.mode = args.vocab.mode;
    config.drop_degenerate = args.vocab.drop_degenerate;
    config.threshold = args.threshold;
    config.k = args.k as usize;
    config.emit_intermediate = args.emit_intermediate;
    let summary = run_pipeline(&config)?;
    report_dropped(&summary.dropped);
    println!("{summary}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Segment {
            raw,
            stopwords,
            output,
        } => segment(raw, stopwords, output),
        Command::Freq { tokens, output } => freq(&tokens, &output),
        Command::Matrix {
            tokens,
            vocab,
            output,
        } => matrix(&tokens, vocab, &output),
        Command::Cosine { matrix: m, output } => cosine(&m, &output),
        Command::Factors {
            matrix: m,
            freq: f,
            k,
            output_dir,
        } => factors(&m, f.as_deref(), k as usize, &output_dir),
        Command::Map(args) => map(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e.source, Error::EmptyVocabulary { .. }) {
                ExitCode::from(EXIT_EMPTY_VOCABULARY)
            } else {
                ExitCode::from(EXIT_STAGE_ERROR)
            }
        }
    }
}
