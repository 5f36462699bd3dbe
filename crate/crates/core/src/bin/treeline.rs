//! treeline - principal component tree-lines from the command line.
//!
//! Pipeline: `synth` (or real data) -> `convert` -> `pca` -> `scores` /
//! `regress` / `explained`. Failures exit nonzero with a JSON error object
//! on stderr.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use treeline::io::{
    read_pc_result, write_explained_csv, write_json, write_json_compact, write_score_csv,
    DatasetFile, PcResultFile,
};
use treeline::synth::{synth_dataset, SynthConfig};
use treeline::{
    build_score_table, explained_curve, pc_treelines, regress_scores, BinaryTree,
    CorrespondenceMode, Error, PcResult, Result, TreeDataset,
};

#[derive(Parser)]
#[command(
    name = "treeline",
    version,
    about = "Principal component analysis for populations of binary trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Map raw branch trees to canonical level-order index lists
    Convert {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Correspondence::Descendant)]
        correspondence: Correspondence,
        #[command(flatten)]
        out: Output,
    },
    /// Compute principal component tree-lines
    Pca {
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// `intersection` or a comma-separated index list such as `1,2,4`
        #[arg(long, default_value = "intersection")]
        start: String,
        /// Also write the per-component gains and explained variation as CSV
        #[arg(long)]
        summary: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Explained variation for each cumulative number of components
    Explained {
        input: PathBuf,
        #[arg(long)]
        pcs: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Per-tree scores on each component and on their cumulative unions
    Scores {
        input: PathBuf,
        #[arg(long)]
        pcs: PathBuf,
        /// Number of components to score (default: all)
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Regress every score column on a numeric covariate
    Regress {
        input: PathBuf,
        #[arg(long)]
        pcs: PathBuf,
        #[arg(long, default_value = "age")]
        covariate: String,
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Generate a random raw dataset
    Synth {
        #[arg(long, default_value_t = 73)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        max_depth: u32,
        #[arg(long, default_value_t = 0.85)]
        decay: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "synthetic")]
        population: String,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Output {
    /// Output file (default: stdout)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl Output {
    fn open(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.output {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Correspondence {
    Thickness,
    Descendant,
}

impl From<Correspondence> for CorrespondenceMode {
    fn from(c: Correspondence) -> Self {
        match c {
            Correspondence::Thickness => CorrespondenceMode::Thickness,
            Correspondence::Descendant => CorrespondenceMode::Descendant,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let obj =
                serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprintln!("{obj}");
            ExitCode::FAILURE
        }
    }
}

fn load_dataset(path: &Path) -> Result<TreeDataset> {
    DatasetFile::read(path)?.to_dataset()
}

fn parse_start(spec: &str, data: &TreeDataset) -> Result<BinaryTree> {
    if spec == "intersection" {
        return Ok(data.intersection());
    }
    let indices = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<u64>()
                .map_err(|_| Error::InvalidArgument(format!("bad start index `{s}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    BinaryTree::new(indices)
}

fn components(res: &PcResult, k: Option<usize>) -> Result<usize> {
    if res.lines.is_empty() {
        return Err(Error::InvalidArgument(
            "result file holds no components".into(),
        ));
    }
    Ok(k.unwrap_or(res.lines.len()))
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Convert {
            input,
            correspondence,
            out,
        } => {
            let canonical = DatasetFile::read(&input)?.to_canonical(correspondence.into())?;
            write_json_compact(out.open()?, &canonical)
        }
        Command::Pca {
            input,
            k,
            start,
            summary,
            out,
        } => {
            let data = load_dataset(&input)?;
            let start = parse_start(&start, &data)?;
            let res = pc_treelines(&data, &start, k)?;
            if let Some(path) = summary {
                let curve = explained_curve(&data, &res)?;
                write_explained_csv(File::create(path)?, &res, &curve, data.total_nodes() as u64)?;
            }
            write_json(out.open()?, &PcResultFile::from(&res))
        }
        Command::Explained { input, pcs, out } => {
            let data = load_dataset(&input)?;
            let res = read_pc_result(&pcs)?;
            let curve = explained_curve(&data, &res)?;
            write_explained_csv(out.open()?, &res, &curve, data.total_nodes() as u64)
        }
        Command::Scores { input, pcs, k, out } => {
            let data = load_dataset(&input)?;
            let res = read_pc_result(&pcs)?;
            let table = build_score_table(&data, &res.lines, components(&res, k)?)?;
            write_score_csv(out.open()?, &table)
        }
        Command::Regress {
            input,
            pcs,
            covariate,
            k,
            out,
        } => {
            let data = load_dataset(&input)?;
            let res = read_pc_result(&pcs)?;
            let table = build_score_table(&data, &res.lines, components(&res, k)?)?;
            write_json(out.open()?, &regress_scores(&table, &covariate)?)
        }
        Command::Synth {
            n,
            max_depth,
            decay,
            seed,
            population,
            out,
        } => {
            let cfg = SynthConfig {
                n,
                max_depth,
                inclusion_decay: decay,
                seed,
                population,
            };
            write_json_compact(out.open()?, &synth_dataset(&cfg)?)
        }
    }
}
