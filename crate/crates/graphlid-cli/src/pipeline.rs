//! The `pipeline` subcommand: tune plain node2vec over the p/q grid and the
//! dimension list, run the LID-elastic variants, and emit the comparison
//! tables (best plain config, variant comparison with improvement
//! percentage, and the high/low NC-LID Mann-Whitney report).
//!
//! Sweep points are independent jobs; walk corpora are shared across the
//! dimension list for a fixed (variant, p, q, seed). With `deterministic`
//! set, rerunning a config writes byte-identical reports.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use graphlid::community::{community_profile, CommunityProfile};
use graphlid::eval::evaluate_embedding;
use graphlid::graph::Graph;
use graphlid::walks::WalkVariant;
use rayon::prelude::*;
use serde::Serialize;

use crate::commands::{embed_once, mwu_row, EmbedOpts, MwuRow};
use crate::config::{graph_name, PipelineConfig};
use crate::report::{fixed, list, Header};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct SweepRun {
    #[serde(serialize_with = "ser_variant")]
    pub variant: WalkVariant,
    pub dim: usize,
    pub p: f64,
    pub q: f64,
    pub seed: u64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
}

fn ser_variant<S: serde::Serializer>(v: &WalkVariant, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Best configuration of one variant: seed-median scores at the argmax
/// (dim, p, q) cell.
#[derive(Debug, Clone, Serialize)]
pub struct VariantBest {
    #[serde(serialize_with = "ser_variant")]
    pub variant: WalkVariant,
    pub dim: usize,
    pub p: f64,
    pub q: f64,
    pub median_precision: f64,
    pub median_recall: f64,
    pub median_f1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub graph: String,
    pub plain_best: VariantBest,
    pub lid_bests: Vec<VariantBest>,
    pub best_label: String,
    pub improvement_pct: Option<f64>,
    pub mwu: MwuRow,
    pub mwu_seed: u64,
    pub runs: Vec<SweepRun>,
}

/// Lower-middle median: deterministic for even counts.
fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    values[(values.len() - 1) / 2]
}

struct CellScores {
    dim: usize,
    p: f64,
    q: f64,
    precision: f64,
    recall: f64,
    f1: f64,
}

/// Seed-medians per (dim, p, q) cell, in deterministic scan order.
fn cell_medians(runs: &[&SweepRun]) -> Vec<CellScores> {
    let mut cells: Vec<(usize, f64, f64)> = runs.iter().map(|r| (r.dim, r.p, r.q)).collect();
    cells.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    cells.dedup();
    cells
        .into_iter()
        .map(|(dim, p, q)| {
            let mut ps = Vec::new();
            let mut rs = Vec::new();
            let mut fs = Vec::new();
            for r in runs {
                if r.dim == dim && r.p == p && r.q == q {
                    ps.push(r.macro_precision);
                    rs.push(r.macro_recall);
                    fs.push(r.macro_f1);
                }
            }
            CellScores {
                dim,
                p,
                q,
                precision: median(&mut ps),
                recall: median(&mut rs),
                f1: median(&mut fs),
            }
        })
        .collect()
}

fn best_cell(variant: WalkVariant, runs: &[&SweepRun]) -> VariantBest {
    let cells = cell_medians(runs);
    let best = cells
        .iter()
        .max_by(|a, b| a.f1.partial_cmp(&b.f1).expect("no NaN"))
        .expect("at least one cell");
    VariantBest {
        variant,
        dim: best.dim,
        p: best.p,
        q: best.q,
        median_precision: best.precision,
        median_recall: best.recall,
        median_f1: best.f1,
    }
}

fn run_jobs(
    g: &Graph,
    profile: &CommunityProfile,
    cfg: &PipelineConfig,
    variant: WalkVariant,
    grid: &[(f64, f64)],
) -> Result<Vec<SweepRun>, CliError> {
    let keys: Vec<(f64, f64, u64)> = grid
        .iter()
        .flat_map(|&(p, q)| cfg.seeds.iter().map(move |&s| (p, q, s)))
        .collect();
    let nested: Vec<Result<Vec<SweepRun>, CliError>> = keys
        .par_iter()
        .map(|&(p, q, seed)| {
            let mut out = Vec::with_capacity(cfg.dims.len());
            for &dim in &cfg.dims {
                let opts = EmbedOpts {
                    graph: cfg.graph.clone(),
                    variant,
                    dim,
                    p,
                    q,
                    num_walks: cfg.num_walks,
                    walk_length: cfg.walk_length,
                    alpha: cfg.alpha,
                    seed,
                    deterministic: cfg.deterministic,
                    threads: 1,
                };
                let emb = embed_once(g, Some(profile), &opts)?;
                let result = evaluate_embedding(g, &emb)?;
                out.push(SweepRun {
                    variant,
                    dim,
                    p,
                    q,
                    seed,
                    macro_precision: result.macro_precision,
                    macro_recall: result.macro_recall,
                    macro_f1: result.macro_f1,
                });
            }
            Ok(out)
        })
        .collect();
    let mut runs = Vec::new();
    for r in nested {
        runs.extend(r?);
    }
    Ok(runs)
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineReport, CliError> {
    cfg.validate()?;
    let started = Instant::now();
    let g = Graph::load_edge_list_path(&cfg.graph)
        .map_err(|e| CliError::Input(format!("{}: {e}", cfg.graph.display())))?;
    let profile = community_profile(&g, cfg.alpha);
    eprintln!(
        "pipeline: {} nodes, {} links, profile in {:.1}s",
        g.node_count(),
        g.link_count(),
        started.elapsed().as_secs_f64()
    );

    let full_grid: Vec<(f64, f64)> = cfg
        .ps
        .iter()
        .flat_map(|&p| cfg.qs.iter().map(move |&q| (p, q)))
        .collect();

    let work = |variant, grid: &[(f64, f64)]| run_jobs(&g, &profile, cfg, variant, grid);
    let execute = || -> Result<(Vec<SweepRun>, Vec<SweepRun>), CliError> {
        // plain sweep first: it supplies the tuned (p, q) for the lid runs
        let plain_runs = work(WalkVariant::Node2vec, &full_grid)?;
        let plain_best = best_cell(
            WalkVariant::Node2vec,
            &plain_runs.iter().collect::<Vec<_>>(),
        );
        eprintln!(
            "pipeline: plain best F1 {} at (d={}, p={}, q={}) after {:.1}s",
            fixed(plain_best.median_f1, 4),
            plain_best.dim,
            plain_best.p,
            plain_best.q,
            started.elapsed().as_secs_f64()
        );
        let tuned_grid = vec![(plain_best.p, plain_best.q)];
        let mut lid_runs = Vec::new();
        for &variant in &cfg.variants {
            if variant == WalkVariant::Node2vec {
                continue;
            }
            let grid: &[(f64, f64)] = if cfg.sweep_lid { &full_grid } else { &tuned_grid };
            lid_runs.extend(work(variant, grid)?);
        }
        Ok((plain_runs, lid_runs))
    };

    let (plain_runs, lid_runs) = if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .expect("thread pool")
            .install(execute)?
    } else {
        execute()?
    };

    let plain_best =
        best_cell(WalkVariant::Node2vec, &plain_runs.iter().collect::<Vec<_>>());
    let mut lid_bests = Vec::new();
    for &variant in &cfg.variants {
        if variant == WalkVariant::Node2vec {
            continue;
        }
        let runs: Vec<&SweepRun> = lid_runs.iter().filter(|r| r.variant == variant).collect();
        if !runs.is_empty() {
            lid_bests.push(best_cell(variant, &runs));
        }
    }

    // winner label and improvement of the better lid variant over plain
    let mut all_bests = vec![plain_best.clone()];
    all_bests.extend(lid_bests.iter().cloned());
    let top = all_bests
        .iter()
        .map(|b| b.median_f1)
        .fold(f64::NEG_INFINITY, f64::max);
    let winners: Vec<String> = all_bests
        .iter()
        .filter(|b| (b.median_f1 - top).abs() < 1e-9)
        .map(|b| b.variant.to_string())
        .collect();
    let best_label = if winners.len() == all_bests.len() && all_bests.len() > 1 {
        "all".to_string()
    } else {
        winners.join(",")
    };
    let improvement_pct = lid_bests
        .iter()
        .map(|b| b.median_f1)
        .fold(None::<f64>, |acc, f| Some(acc.map_or(f, |a| a.max(f))))
        .map(|best_lid| 100.0 * (best_lid - plain_best.median_f1) / plain_best.median_f1);

    // MWU on the tuned plain embedding: the seed realizing the median F1
    let mut tuned: Vec<&SweepRun> = plain_runs
        .iter()
        .filter(|r| r.dim == plain_best.dim && r.p == plain_best.p && r.q == plain_best.q)
        .collect();
    tuned.sort_by(|a, b| a.macro_f1.partial_cmp(&b.macro_f1).expect("no NaN"));
    let mwu_seed = tuned[(tuned.len() - 1) / 2].seed;
    let opts = EmbedOpts {
        graph: cfg.graph.clone(),
        variant: WalkVariant::Node2vec,
        dim: plain_best.dim,
        p: plain_best.p,
        q: plain_best.q,
        num_walks: cfg.num_walks,
        walk_length: cfg.walk_length,
        alpha: cfg.alpha,
        seed: mwu_seed,
        deterministic: cfg.deterministic,
        threads: 1,
    };
    let emb = embed_once(&g, Some(&profile), &opts)?;
    let result = evaluate_embedding(&g, &emb)?;
    let lids: Vec<f64> = profile.scores.iter().map(|s| s.value).collect();
    let mwu = mwu_row(&lids, &result)?;

    let mut runs = plain_runs;
    runs.extend(lid_runs);
    eprintln!("pipeline: done in {:.1}s ({} runs)", started.elapsed().as_secs_f64(), runs.len());

    Ok(PipelineReport {
        graph: graph_name(&cfg.graph),
        plain_best,
        lid_bests,
        best_label,
        improvement_pct,
        mwu,
        mwu_seed,
        runs,
    })
}

fn config_header(command: &str, cfg: &PipelineConfig) -> Header {
    Header::new(command)
        .field("graph", cfg.graph.display())
        .field("variants", list(&cfg.variants.iter().map(|v| v.to_string()).collect::<Vec<_>>()))
        .field("dims", list(&cfg.dims))
        .field("ps", list(&cfg.ps))
        .field("qs", list(&cfg.qs))
        .field("walks", cfg.num_walks)
        .field("length", cfg.walk_length)
        .field("seeds", list(&cfg.seeds))
        .field("alpha", cfg.alpha)
        .field("deterministic", cfg.deterministic)
        .field("sweep_lid", cfg.sweep_lid)
}

pub fn write_reports(
    cfg: &PipelineConfig,
    report: &PipelineReport,
    dir: &Path,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;

    let mut sweep = config_header("pipeline/sweep", cfg)
        .field("columns", "variant,dim,p,q,seed,macro_precision,macro_recall,macro_f1")
        .render();
    for r in &report.runs {
        sweep.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.variant,
            r.dim,
            r.p,
            r.q,
            r.seed,
            fixed(r.macro_precision, 6),
            fixed(r.macro_recall, 6),
            fixed(r.macro_f1, 6)
        ));
    }
    std::fs::write(dir.join("sweep.csv"), sweep)?;

    let b = &report.plain_best;
    let mut best = config_header("pipeline/best_n2v", cfg)
        .field("columns", "graph,dim,p,q,precision,recall,f1")
        .render();
    best.push_str(&format!(
        "{},{},{},{},{},{},{}\n",
        report.graph,
        b.dim,
        b.p,
        b.q,
        fixed(b.median_precision, 4),
        fixed(b.median_recall, 4),
        fixed(b.median_f1, 4)
    ));
    std::fs::write(dir.join("best_n2v.csv"), best)?;

    let mut cmp = config_header("pipeline/comparison", cfg)
        .field(
            "columns",
            "graph,n2v_f1,n2v_dim,lid-rw_f1,lid-rw_dim,lid-rwpq_f1,lid-rwpq_dim,best,improvement_pct",
        )
        .render();
    let lid_cell = |variant: WalkVariant| -> (String, String) {
        match report.lid_bests.iter().find(|x| x.variant == variant) {
            Some(x) => (fixed(x.median_f1, 4), x.dim.to_string()),
            None => ("NA".to_string(), "NA".to_string()),
        }
    };
    let (rw_f1, rw_dim) = lid_cell(WalkVariant::LidRw);
    let (rwpq_f1, rwpq_dim) = lid_cell(WalkVariant::LidRwPq);
    cmp.push_str(&format!(
        "{},{},{},{},{},{},{},{},{}\n",
        report.graph,
        fixed(b.median_f1, 4),
        b.dim,
        rw_f1,
        rw_dim,
        rwpq_f1,
        rwpq_dim,
        report.best_label,
        report.improvement_pct.map_or("NA".to_string(), |x| fixed(x, 2))
    ));
    std::fs::write(dir.join("comparison.csv"), cmp)?;

    let mut mwu = config_header("pipeline/mwu", cfg)
        .field("embedding", format!("n2v d={} p={} q={} seed={}", b.dim, b.p, b.q, report.mwu_seed))
        .field("columns", "graph,F1(H),F1(L),U,p,ACC,PS(H),PS(L)")
        .render();
    mwu.push_str(&format!("{},{}\n", report.graph, report.mwu.to_csv()));
    std::fs::write(dir.join("mwu.csv"), mwu)?;

    #[derive(Serialize)]
    struct Summary<'a> {
        config: &'a PipelineConfig,
        report: &'a PipelineReport,
    }
    let json = serde_json::to_string_pretty(&Summary { config: cfg, report })
        .expect("serializable");
    std::fs::write(dir.join("summary.json"), json + "\n")?;
    Ok(())
}

pub fn cmd_pipeline(cfg: &PipelineConfig, out: &mut impl Write) -> Result<(), CliError> {
    let report = run_pipeline(cfg)?;
    write_reports(cfg, &report, &cfg.out)?;
    writeln!(
        out,
        "{}: best n2v F1 {} (d={}, p={}, q={}); best overall: {}",
        report.graph,
        fixed(report.plain_best.median_f1, 4),
        report.plain_best.dim,
        report.plain_best.p,
        report.plain_best.q,
        report.best_label
    )?;
    Ok(())
}
