use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{error, info, warn};

use framemap::pipeline::{
    execute, parse_factor_count, parse_kk_distances, parse_layout, Command, InputSource,
    PipelineConfig,
};
use framemap::Error;

#[derive(Parser, Debug)]
#[command(name = "framemap", version, about = "Semantic maps of frames in text corpora")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// config file with [corpus] [lexicon] [matrix] [factors] [map] [output] sections
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// layout seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, short, global = true)]
    verbose: bool,

    /// one message per line
    #[arg(long, global = true, conflicts_with = "corpus_dir")]
    input: Option<PathBuf>,
    /// directory of text1.txt, text2.txt, ...
    #[arg(long, global = true)]
    corpus_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    stopwords: Option<PathBuf>,
    #[arg(long, global = true)]
    keep_plurals: bool,
    #[arg(long, global = true)]
    min_token_length: Option<usize>,

    /// use this word list instead of automatic selection
    #[arg(long, global = true)]
    words: Option<PathBuf>,
    #[arg(long, global = true)]
    max_words: Option<usize>,
    #[arg(long, global = true)]
    min_count: Option<u64>,
    /// count presence (0/1) instead of occurrences
    #[arg(long, global = true)]
    binary: bool,

    /// "auto" (eigenvalue > 1) or a number of factors
    #[arg(long, global = true)]
    n_factors: Option<String>,
    #[arg(long, global = true)]
    suppress: Option<f64>,
    #[arg(long, global = true)]
    no_kaiser_normalize: bool,
    #[arg(long, global = true)]
    alpha_floor: Option<f64>,

    /// minimum cosine for an edge to be drawn
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// kk or fr
    #[arg(long, global = true)]
    layout: Option<String>,
    /// hops or dissim
    #[arg(long, global = true)]
    kk_distances: Option<String>,
    #[arg(long, global = true)]
    vertex_size_min: Option<f64>,
    #[arg(long, global = true)]
    vertex_size_max: Option<f64>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// word frequency list (wrdfrq.csv)
    Freq,
    /// word/document matrix and cosine exports
    Matrix,
    /// factor analysis, frames and reliability
    Factors,
    /// thresholded, laid-out cosine map
    Map,
    /// freq, matrix, factors and map in sequence
    Run,
}

fn build_config(cli: &Cli) -> Result<PipelineConfig, Error> {
    let mut c = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(p) = &cli.input {
        c.input = Some(InputSource::Lines(p.clone()));
    }
    if let Some(p) = &cli.corpus_dir {
        c.input = Some(InputSource::Files(p.clone()));
    }
    if let Some(p) = &cli.stopwords {
        c.stopwords = Some(p.clone());
    }
    if cli.keep_plurals {
        c.keep_plurals = true;
    }
    if let Some(n) = cli.min_token_length {
        c.min_token_length = n;
    }
    if let Some(p) = &cli.words {
        c.words_file = Some(p.clone());
    }
    if let Some(n) = cli.max_words {
        c.max_words = n;
    }
    if let Some(n) = cli.min_count {
        c.min_count = n;
    }
    if cli.binary {
        c.binary = true;
    }
    if let Some(v) = &cli.n_factors {
        c.n_factors = parse_factor_count(v)?;
    }
    if let Some(v) = cli.suppress {
        c.suppress = v;
    }
    if cli.no_kaiser_normalize {
        c.kaiser_normalize = false;
    }
    if let Some(v) = cli.alpha_floor {
        c.alpha_floor = v;
    }
    if let Some(v) = cli.threshold {
        c.threshold = v;
    }
    if let Some(v) = &cli.layout {
        c.layout = parse_layout(v)?;
    }
    if let Some(v) = &cli.kk_distances {
        c.kk_distances = parse_kk_distances(v)?;
    }
    if let Some(v) = cli.seed {
        c.seed = v;
    }
    if let Some(v) = cli.vertex_size_min {
        c.vertex_size_min = v;
    }
    if let Some(v) = cli.vertex_size_max {
        c.vertex_size_max = v;
    }
    if let Some(p) = &cli.out {
        c.out_dir = p.clone();
    }
    c.validate()?;
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .format_timestamp(None)
        .format_target(false)
        .init();

    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            error!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let command = match cli.command {
        Cmd::Freq => Command::Freq,
        Cmd::Matrix => Command::Matrix,
        Cmd::Factors => Command::Factors,
        Cmd::Map => Command::Map,
        Cmd::Run => Command::Run,
    };
    let manifest = execute(command, &config);
    for stage in &manifest.stages {
        for w in &stage.warnings {
            warn!("[{}] {w}", stage.name);
        }
        for n in &stage.notices {
            info!("[{}] {n}", stage.name);
        }
        for f in &stage.outputs {
            info!("[{}] wrote {}", stage.name, config.out_dir.join(&f.file).display());
        }
    }
    match &manifest.failure {
        Some(f) => {
            error!("{} failed at the {} stage: {}", f.command, f.stage, f.message);
            ExitCode::from(f.exit_code as u8)
        }
        None => ExitCode::SUCCESS,
    }
}
