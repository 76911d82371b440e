//! The single-purpose subcommands. Each takes parsed options and a writer
//! for its primary (stdout) report.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use graphlid::centrality;
use graphlid::community::{community_profile, CommunityProfile};
use graphlid::eval::{evaluate_embedding, ReconstructionResult};
use graphlid::graph::Graph;
use graphlid::sgns::{train, Embedding, TrainConfig};
use graphlid::stats::{mann_whitney_u, spearman, split_by_mean};
use graphlid::walks::{sample_corpus, WalkConfig, WalkVariant};
use serde::Serialize;

use crate::config::graph_name;
use crate::report::{fixed, Header};
use crate::CliError;

pub fn load_graph(path: &Path) -> Result<Graph, CliError> {
    Graph::load_edge_list_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// `stats`: one Table-1-style CSV row.
pub fn cmd_stats(graph: &Path, out: &mut impl Write) -> Result<(), CliError> {
    let g = load_graph(graph)?;
    let s = g.stats();
    let header = Header::new("stats")
        .field("graph", graph.display())
        .field("columns", "name,N,L,C,F,avg_degree,skewness");
    write!(out, "{}", header.render())?;
    writeln!(
        out,
        "{},{},{},{},{},{},{}",
        graph_name(graph),
        s.nodes,
        s.links,
        s.components,
        fixed(s.largest_component_fraction, 2),
        fixed(s.avg_degree, 2),
        fixed(s.degree_skewness, 2)
    )?;
    Ok(())
}

/// `nclid`: per-node NC-LID rows plus a summary trailer.
pub fn cmd_nclid(graph: &Path, alpha: f64, out: &mut impl Write) -> Result<(), CliError> {
    let g = load_graph(graph)?;
    let profile = community_profile(&g, alpha);
    let header = Header::new("nclid")
        .field("graph", graph.display())
        .field("alpha", alpha)
        .field("columns", "node_label,nc_size,radius,t_count,nc_lid");
    write!(out, "{}", header.render())?;
    for s in &profile.scores {
        writeln!(
            out,
            "{},{},{},{},{}",
            g.label(s.node),
            s.nc_size,
            s.radius,
            s.t_count,
            fixed(s.value, 6)
        )?;
    }
    let values: Vec<f64> = profile.scores.iter().map(|s| s.value).collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    writeln!(out, "# mean_nc_lid: {}", fixed(mean, 6))?;
    writeln!(out, "# min_nc_lid: {}", fixed(min, 6))?;
    writeln!(out, "# max_nc_lid: {}", fixed(max, 6))?;
    let mut sizes: Vec<usize> = profile.scores.iter().map(|s| s.nc_size).collect();
    sizes.sort_unstable();
    let mut dist = Vec::new();
    let mut i = 0;
    while i < sizes.len() {
        let mut j = i;
        while j < sizes.len() && sizes[j] == sizes[i] {
            j += 1;
        }
        dist.push(format!("{}:{}", sizes[i], j - i));
        i = j;
    }
    writeln!(out, "# nc_size_distribution: {}", dist.join(" "))?;
    Ok(())
}

/// `centrality`: the five comparator metrics per node.
pub fn cmd_centrality(graph: &Path, out: &mut impl Write) -> Result<(), CliError> {
    let g = load_graph(graph)?;
    let deg = centrality::degree(&g);
    let core = centrality::core_index(&g);
    let evc = centrality::eigenvector(
        &g,
        centrality::EIGENVECTOR_TOL,
        centrality::EIGENVECTOR_MAX_ITER,
    )?;
    let clo = centrality::closeness(&g);
    let bet = centrality::betweenness(&g, true);
    let header = Header::new("centrality")
        .field("graph", graph.display())
        .field("columns", "node_label,deg,core,evc,clo,bet");
    write!(out, "{}", header.render())?;
    for v in g.node_ids() {
        let i = v as usize;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            g.label(v),
            deg[i] as u64,
            core[i] as u64,
            fixed(evc[i], 6),
            fixed(clo[i], 6),
            fixed(bet[i], 6)
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct EmbedOpts {
    pub graph: PathBuf,
    pub variant: WalkVariant,
    pub dim: usize,
    pub p: f64,
    pub q: f64,
    pub num_walks: u32,
    pub walk_length: u32,
    pub alpha: f64,
    pub seed: u64,
    pub deterministic: bool,
    pub threads: usize,
}

/// Corpus sampling plus SGNS training for one configuration.
pub fn embed_once(
    g: &Graph,
    profile: Option<&CommunityProfile>,
    opts: &EmbedOpts,
) -> Result<Embedding, CliError> {
    let wcfg = WalkConfig {
        variant: opts.variant,
        num_walks: opts.num_walks,
        walk_length: opts.walk_length,
        p: opts.p,
        q: opts.q,
        seed: opts.seed,
    };
    let (lids, comms) = match profile {
        Some(pr) => {
            let lids: Vec<f64> = pr.scores.iter().map(|s| s.value).collect();
            (Some(lids), Some(pr.communities.as_slice()))
        }
        None => (None, None),
    };
    let corpus = sample_corpus(g, &wcfg, lids.as_deref(), comms)?;
    let tcfg = TrainConfig {
        dim: opts.dim,
        seed: opts.seed,
        deterministic: opts.deterministic,
        threads: opts.threads,
        ..TrainConfig::default()
    };
    Ok(train(&corpus, &tcfg, g)?)
}

/// `embed`: write a word2vec-format embedding file.
pub fn cmd_embed(opts: &EmbedOpts, out_path: &Path) -> Result<(), CliError> {
    let g = load_graph(&opts.graph)?;
    let profile = match opts.variant {
        WalkVariant::Node2vec => None,
        _ => Some(community_profile(&g, opts.alpha)),
    };
    let emb = embed_once(&g, profile.as_ref(), opts)?;
    let file = File::create(out_path)
        .map_err(|e| CliError::Input(format!("{}: {e}", out_path.display())))?;
    emb.write_word2vec(BufWriter::new(file))?;
    Ok(())
}

pub fn load_embedding(path: &Path) -> Result<Embedding, CliError> {
    let file =
        File::open(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Embedding::read_word2vec(BufReader::new(file))
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Reorder embedding rows to match graph internal ids; every graph label
/// must be present.
pub fn align_embedding(g: &Graph, emb: &Embedding) -> Result<Embedding, CliError> {
    let mut index = std::collections::HashMap::new();
    for (i, label) in emb.labels().iter().enumerate() {
        index.insert(label.as_str(), i as u32);
    }
    let dim = emb.dim();
    let mut data = Vec::with_capacity(g.node_count() * dim);
    for v in g.node_ids() {
        let label = g.label(v);
        let row = index
            .get(label)
            .ok_or_else(|| CliError::Input(format!("embedding missing node '{label}'")))?;
        data.extend_from_slice(emb.vector(*row));
    }
    Ok(Embedding::from_vectors(g.labels().to_vec(), dim, data))
}

#[derive(Serialize)]
struct EvaluateSummary<'a> {
    command: &'a str,
    graph: String,
    embedding: String,
    nodes: usize,
    links: usize,
    dim: usize,
    macro_precision: f64,
    macro_recall: f64,
    macro_f1: f64,
}

/// `evaluate`: per-node link P/R/F1 plus a JSON summary.
pub fn cmd_evaluate(
    graph: &Path,
    embedding: &Path,
    out_dir: Option<&Path>,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let g = load_graph(graph)?;
    let emb = align_embedding(&g, &load_embedding(embedding)?)?;
    let result = evaluate_embedding(&g, &emb)?;

    let mut pernode = String::new();
    let header = Header::new("evaluate")
        .field("graph", graph.display())
        .field("embedding", embedding.display())
        .field("columns", "node_label,precision,recall,f1");
    pernode.push_str(&header.render());
    for v in g.node_ids() {
        let i = v as usize;
        pernode.push_str(&format!(
            "{},{},{},{}\n",
            g.label(v),
            fixed(result.scores.precision[i], 6),
            fixed(result.scores.recall[i], 6),
            fixed(result.scores.f1[i], 6)
        ));
    }
    let summary = EvaluateSummary {
        command: "evaluate",
        graph: graph.display().to_string(),
        embedding: embedding.display().to_string(),
        nodes: g.node_count(),
        links: g.link_count(),
        dim: emb.dim(),
        macro_precision: result.macro_precision,
        macro_recall: result.macro_recall,
        macro_f1: result.macro_f1,
    };

    match out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let name = graph_name(graph);
            std::fs::write(dir.join(format!("{name}_pernode.csv")), &pernode)?;
            let json = serde_json::to_string_pretty(&summary).expect("serializable");
            std::fs::write(dir.join(format!("{name}_summary.json")), json + "\n")?;
        }
        None => write!(out, "{pernode}")?,
    }
    writeln!(
        out,
        "macro_precision={} macro_recall={} macro_f1={}",
        fixed(result.macro_precision, 6),
        fixed(result.macro_recall, 6),
        fixed(result.macro_f1, 6)
    )?;
    Ok(())
}

/// Spearman matrix of NC-LID, the five centralities, and per-node F1.
pub fn cmd_correlate(
    graph: &Path,
    embedding: &Path,
    alpha: f64,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let g = load_graph(graph)?;
    let emb = align_embedding(&g, &load_embedding(embedding)?)?;
    let result = evaluate_embedding(&g, &emb)?;
    let lids: Vec<f64> = community_profile(&g, alpha).scores.iter().map(|s| s.value).collect();

    let metrics: Vec<(&str, Vec<f64>)> = vec![
        ("NC-LID", lids),
        ("DEG", centrality::degree(&g)),
        ("CORE", centrality::core_index(&g)),
        (
            "EVC",
            centrality::eigenvector(
                &g,
                centrality::EIGENVECTOR_TOL,
                centrality::EIGENVECTOR_MAX_ITER,
            )?,
        ),
        ("CLO", centrality::closeness(&g)),
        ("BET", centrality::betweenness(&g, true)),
        ("F1", result.scores.f1.clone()),
    ];

    let header = Header::new("correlate")
        .field("graph", graph.display())
        .field("embedding", embedding.display())
        .field("alpha", alpha)
        .field("columns", "metric,NC-LID,DEG,CORE,EVC,CLO,BET,F1");
    write!(out, "{}", header.render())?;
    for (row_name, row_vals) in &metrics {
        let mut cells = vec![row_name.to_string()];
        for (_, col_vals) in &metrics {
            let cell = match spearman(row_vals, col_vals) {
                Ok(rho) => fixed(rho, 4),
                Err(_) => "NA".to_string(), // degenerate (constant) input
            };
            cells.push(cell);
        }
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// `mwu`: Table-4-style comparison of F1 between high and low NC-LID nodes.
pub fn cmd_mwu(
    graph: &Path,
    embedding: &Path,
    alpha: f64,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let g = load_graph(graph)?;
    let emb = align_embedding(&g, &load_embedding(embedding)?)?;
    let result = evaluate_embedding(&g, &emb)?;
    let lids: Vec<f64> = community_profile(&g, alpha).scores.iter().map(|s| s.value).collect();
    let row = mwu_row(&lids, &result)?;
    let header = Header::new("mwu")
        .field("graph", graph.display())
        .field("embedding", embedding.display())
        .field("alpha", alpha)
        .field("columns", "F1(H),F1(L),U,p,ACC,PS(H),PS(L)");
    write!(out, "{}", header.render())?;
    writeln!(out, "{}", row.to_csv())?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct MwuRow {
    pub f1_high: f64,
    pub f1_low: f64,
    pub u_statistic: f64,
    pub p_value: f64,
    pub accepted: bool,
    pub ps_high: f64,
    pub ps_low: f64,
}

impl MwuRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            fixed(self.f1_high, 4),
            fixed(self.f1_low, 4),
            self.u_statistic,
            fixed(self.p_value, 4),
            if self.accepted { "yes" } else { "no" },
            fixed(self.ps_high, 4),
            fixed(self.ps_low, 4)
        )
    }
}

/// Split nodes by mean NC-LID and compare their F1 scores.
pub fn mwu_row(lids: &[f64], result: &ReconstructionResult) -> Result<MwuRow, CliError> {
    let (high, low) = split_by_mean(lids);
    if high.is_empty() || low.is_empty() {
        return Err(CliError::Numerical(
            "degenerate NC-LID split: one group is empty".to_string(),
        ));
    }
    let f1_of = |idx: &[usize]| -> Vec<f64> { idx.iter().map(|&i| result.scores.f1[i]).collect() };
    let h = f1_of(&high);
    let l = f1_of(&low);
    let test = mann_whitney_u(&h, &l)?;
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    Ok(MwuRow {
        f1_high: mean(&h),
        f1_low: mean(&l),
        u_statistic: test.u_statistic,
        p_value: test.p_value,
        accepted: test.accepted,
        ps_high: test.ps_h,
        ps_low: test.ps_l,
    })
}
