use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};
use graphlid::walks::WalkVariant;
use graphlid_cli::config::PipelineConfig;
use graphlid_cli::{commands, pipeline, CliError};

/// NC-LID analysis and LID-elastic node2vec embeddings for graphs.
#[derive(Parser)]
#[command(name = "graphlid", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summary statistics of an edge-list graph (one CSV row)
    Stats {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Per-node NC-LID scores over natural communities
    Nclid {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
    },
    /// Degree, core index, eigenvector, closeness and betweenness per node
    Centrality {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Sample walks and train an embedding, written in word2vec text format
    Embed {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "n2v")]
        variant: WalkVariant,
        #[arg(long, default_value_t = 100)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        /// Base number of walks per node (B)
        #[arg(long, default_value_t = 10)]
        walks: u32,
        /// Base walk length (W)
        #[arg(long, default_value_t = 80)]
        length: u32,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Sequential bit-reproducible training (false: lock-free parallel)
        #[arg(long, action = ArgAction::Set, default_value_t = true)]
        deterministic: bool,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Output embedding file
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct the graph from an embedding and report link P/R/F1
    Evaluate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        embedding: PathBuf,
        /// Directory for the per-node CSV and JSON summary
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spearman matrix of NC-LID, centralities and per-node F1
    Correlate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
    },
    /// Mann-Whitney U comparison of F1 between high and low NC-LID nodes
    Mwu {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
    },
    /// Full sweep: tune plain node2vec, run lid variants, emit comparisons
    Pipeline {
        /// Flat key=value config file; command-line flags override it
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Comma-separated list: n2v,lid-rw,lid-rwpq
        #[arg(long)]
        variants: Option<String>,
        #[arg(long)]
        dims: Option<String>,
        #[arg(long)]
        ps: Option<String>,
        #[arg(long)]
        qs: Option<String>,
        #[arg(long)]
        walks: Option<u32>,
        #[arg(long)]
        length: Option<u32>,
        #[arg(long)]
        seeds: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, action = ArgAction::Set)]
        deterministic: Option<bool>,
        /// Sweep the p/q grid for lid variants too (default: tuned p,q)
        #[arg(long, action = ArgAction::SetTrue)]
        sweep_lid: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Stats { graph } => commands::cmd_stats(&graph, &mut out),
        Command::Nclid { graph, alpha } => commands::cmd_nclid(&graph, alpha, &mut out),
        Command::Centrality { graph } => commands::cmd_centrality(&graph, &mut out),
        Command::Embed {
            graph,
            variant,
            dim,
            p,
            q,
            walks,
            length,
            alpha,
            seed,
            deterministic,
            threads,
            out: out_path,
        } => {
            let opts = commands::EmbedOpts {
                graph,
                variant,
                dim,
                p,
                q,
                num_walks: walks,
                walk_length: length,
                alpha,
                seed,
                deterministic,
                threads,
            };
            commands::cmd_embed(&opts, &out_path)?;
            writeln!(out, "wrote {}", out_path.display())?;
            Ok(())
        }
        Command::Evaluate { graph, embedding, out: out_dir } => {
            commands::cmd_evaluate(&graph, &embedding, out_dir.as_deref(), &mut out)
        }
        Command::Correlate { graph, embedding, alpha } => {
            commands::cmd_correlate(&graph, &embedding, alpha, &mut out)
        }
        Command::Mwu { graph, embedding, alpha } => {
            commands::cmd_mwu(&graph, &embedding, alpha, &mut out)
        }
        Command::Pipeline {
            config,
            graph,
            variants,
            dims,
            ps,
            qs,
            walks,
            length,
            seeds,
            alpha,
            threads,
            deterministic,
            sweep_lid,
            out: out_dir,
        } => {
            let mut cfg = PipelineConfig::default();
            if let Some(path) = config {
                cfg.apply_file(&path)?;
            }
            // flags override file values
            if let Some(g) = graph {
                cfg.graph = g;
            }
            let parse_over = |field: Option<String>, key: &str, cfg: &mut PipelineConfig| {
                match field {
                    Some(v) => cfg
                        .apply_pair(key, &v)
                        .map_err(|e| CliError::Input(format!("flag --{key}: {e}"))),
                    None => Ok(()),
                }
            };
            parse_over(variants, "variants", &mut cfg)?;
            parse_over(dims, "dims", &mut cfg)?;
            parse_over(ps, "ps", &mut cfg)?;
            parse_over(qs, "qs", &mut cfg)?;
            parse_over(seeds, "seeds", &mut cfg)?;
            if let Some(w) = walks {
                cfg.num_walks = w;
            }
            if let Some(l) = length {
                cfg.walk_length = l;
            }
            if let Some(a) = alpha {
                cfg.alpha = a;
            }
            if let Some(t) = threads {
                cfg.threads = t;
            }
            if let Some(d) = deterministic {
                cfg.deterministic = d;
            }
            if sweep_lid {
                cfg.sweep_lid = true;
            }
            if let Some(dir) = out_dir {
                cfg.out = dir;
            }
            pipeline::cmd_pipeline(&cfg, &mut out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
