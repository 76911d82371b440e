//! Browser bindings for the graphlid pipeline. A session wraps one loaded
//! graph plus its natural-community profile and exposes three operations as
//! JSON payloads for the static demo page:
//!
//! - `community_json`: the natural community of a clicked node, its NC-LID
//!   score, and the BFS ring structure behind the T count;
//! - `scores_json`: per-node NC-LID and centrality metrics for coloring;
//! - `embed_json`: train an embedding with one of the three walk variants,
//!   reconstruct the graph, and return a 2D projection with per-node F1.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use graphlid::centrality;
use graphlid::community::{community_profile, nc_lid, CommunityProfile};
use graphlid::eval::evaluate_embedding;
use graphlid::graph::{Graph, UNREACHABLE};
use graphlid::sgns::{train, Embedding, TrainConfig};
use graphlid::walks::{sample_corpus, WalkConfig, WalkVariant};

/// Edge lists bundled with the demo.
pub fn bundled_graph(name: &str) -> Option<&'static str> {
    match name {
        "zachary" => Some(include_str!("../../../data/zachary.edges")),
        "florentine" => Some(include_str!("../../../data/florentine.edges")),
        "lesmis" => Some(include_str!("../../../data/lesmis.edges")),
        _ => None,
    }
}

#[wasm_bindgen]
pub fn bundled_graph_names() -> String {
    r#"["zachary","florentine","lesmis"]"#.to_string()
}

#[wasm_bindgen]
pub fn bundled_graph_text(name: &str) -> Result<String, JsError> {
    bundled_graph(name)
        .map(str::to_string)
        .ok_or_else(|| JsError::new(&format!("no bundled graph named '{name}'")))
}

impl GraphSession {
    pub fn open(edge_text: &str, alpha: f64) -> Result<GraphSession, String> {
        if alpha <= 0.0 {
            return Err("alpha must be positive".to_string());
        }
        let graph = Graph::load_edge_list(edge_text.as_bytes()).map_err(|e| e.to_string())?;
        let profile = community_profile(&graph, alpha);
        Ok(GraphSession { graph, profile, alpha })
    }

    pub fn community_json_impl(&self, label: &str) -> Result<String, String> {
        let seed = self
            .graph
            .node_id(label)
            .ok_or_else(|| format!("unknown node '{label}'"))?;
        let community = &self.profile.communities[seed as usize];
        let score = nc_lid(&self.graph, community).map_err(|e| e.to_string())?;
        let distances = self
            .graph
            .bfs_distances(seed)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|d| if d == UNREACHABLE { -1 } else { d as i64 })
            .collect();
        let view = CommunityView {
            seed,
            members: community.members.clone(),
            fitness: community.fitness,
            nc_size: score.nc_size,
            radius: score.radius,
            t_count: score.t_count,
            nc_lid: score.value,
            distances,
        };
        Ok(serde_json::to_string(&view).expect("serializable"))
    }

    pub fn scores_json_impl(&self) -> Result<String, String> {
        let lids: Vec<f64> = self.profile.scores.iter().map(|s| s.value).collect();
        let eigenvector = centrality::eigenvector(
            &self.graph,
            centrality::EIGENVECTOR_TOL,
            centrality::EIGENVECTOR_MAX_ITER,
        )
        .map_err(|e| e.to_string())?;
        let mean = lids.iter().sum::<f64>() / lids.len().max(1) as f64;
        let max = lids.iter().cloned().fold(0.0f64, f64::max);
        let view = ScoresView {
            nc_size: self.profile.scores.iter().map(|s| s.nc_size).collect(),
            degree: centrality::degree(&self.graph),
            core: centrality::core_index(&self.graph),
            eigenvector,
            closeness: centrality::closeness(&self.graph),
            betweenness: centrality::betweenness(&self.graph, true),
            nc_lid: lids,
            mean_nc_lid: mean,
            max_nc_lid: max,
        };
        Ok(serde_json::to_string(&view).expect("serializable"))
    }

    pub fn embed_json_impl(
        &self,
        variant: &str,
        dim: usize,
        p: f64,
        q: f64,
        seed: u64,
    ) -> Result<String, String> {
        let variant: WalkVariant = variant.parse()?;
        if dim == 0 || dim > 512 {
            return Err("dim must be in 1..=512".to_string());
        }
        if p <= 0.0 || q <= 0.0 {
            return Err("p and q must be positive".to_string());
        }
        let wcfg = WalkConfig { variant, p, q, seed, ..WalkConfig::default() };
        let lids: Vec<f64> = self.profile.scores.iter().map(|s| s.value).collect();
        let corpus = sample_corpus(
            &self.graph,
            &wcfg,
            Some(&lids),
            Some(&self.profile.communities),
        )
        .map_err(|e| e.to_string())?;
        let tcfg = TrainConfig { dim, seed, ..TrainConfig::default() };
        let emb = train(&corpus, &tcfg, &self.graph).map_err(|e| e.to_string())?;
        let result = evaluate_embedding(&self.graph, &emb).map_err(|e| e.to_string())?;
        let view = EmbedView {
            variant: variant.to_string(),
            dim,
            p,
            q,
            seed,
            coords: project_2d(&emb),
            f1: result.scores.f1.clone(),
            macro_precision: result.macro_precision,
            macro_recall: result.macro_recall,
            macro_f1: result.macro_f1,
            reconstructed_links: result.reconstructed_links,
        };
        Ok(serde_json::to_string(&view).expect("serializable"))
    }
}

#[derive(Serialize)]
struct GraphSummary<'a> {
    labels: &'a [String],
    links: Vec<(u32, u32)>,
    nodes: usize,
    link_count: usize,
    components: usize,
    avg_degree: f64,
    degree_skewness: f64,
}

#[derive(Serialize)]
struct CommunityView {
    seed: u32,
    members: Vec<u32>,
    fitness: f64,
    nc_size: usize,
    radius: u32,
    t_count: usize,
    nc_lid: f64,
    /// hop distance from the seed per node; -1 when unreachable
    distances: Vec<i64>,
}

#[derive(Serialize)]
struct ScoresView {
    nc_lid: Vec<f64>,
    nc_size: Vec<usize>,
    degree: Vec<f64>,
    core: Vec<f64>,
    eigenvector: Vec<f64>,
    closeness: Vec<f64>,
    betweenness: Vec<f64>,
    mean_nc_lid: f64,
    max_nc_lid: f64,
}

#[derive(Serialize)]
struct EmbedView {
    variant: String,
    dim: usize,
    p: f64,
    q: f64,
    seed: u64,
    /// 2D projection of the trained vectors (first two principal components)
    coords: Vec<[f64; 2]>,
    f1: Vec<f64>,
    macro_precision: f64,
    macro_recall: f64,
    macro_f1: f64,
    reconstructed_links: Vec<(u32, u32)>,
}

/// One loaded graph with its community profile; the demo page keeps one
/// session per selected dataset.
#[wasm_bindgen]
pub struct GraphSession {
    graph: Graph,
    profile: CommunityProfile,
    alpha: f64,
}

#[wasm_bindgen]
impl GraphSession {
    /// Parse an edge list (two labels per line) and precompute the natural
    /// communities at the given fitness exponent.
    #[wasm_bindgen(constructor)]
    pub fn new(edge_text: &str, alpha: f64) -> Result<GraphSession, JsError> {
        GraphSession::open(edge_text, alpha).map_err(|e| JsError::new(&e))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn summary_json(&self) -> String {
        let stats = self.graph.stats();
        let view = GraphSummary {
            labels: self.graph.labels(),
            links: self.graph.links(),
            nodes: stats.nodes,
            link_count: stats.links,
            components: stats.components,
            avg_degree: stats.avg_degree,
            degree_skewness: stats.degree_skewness,
        };
        serde_json::to_string(&view).expect("serializable")
    }

    /// Natural community and NC-LID of one node.
    pub fn community_json(&self, label: &str) -> Result<String, JsError> {
        self.community_json_impl(label).map_err(|e| JsError::new(&e))
    }

    /// NC-LID and the five centrality metrics for every node.
    pub fn scores_json(&self) -> Result<String, JsError> {
        self.scores_json_impl().map_err(|e| JsError::new(&e))
    }

    /// Train an embedding and evaluate graph reconstruction.
    pub fn embed_json(
        &self,
        variant: &str,
        dim: usize,
        p: f64,
        q: f64,
        seed: u64,
    ) -> Result<String, JsError> {
        self.embed_json_impl(variant, dim, p, q, seed)
            .map_err(|e| JsError::new(&e))
    }
}

/// First two principal components of the embedding rows, by power iteration
/// on the centered Gram products with deflation.
fn project_2d(emb: &Embedding) -> Vec<[f64; 2]> {
    let n = emb.node_count();
    let d = emb.dim();
    let mut rows: Vec<Vec<f64>> = (0..n as u32)
        .map(|v| emb.vector(v).iter().map(|&x| x as f64).collect())
        .collect();
    let mut mean = vec![0.0; d];
    for row in &rows {
        for (m, x) in mean.iter_mut().zip(row) {
            *m += x / n as f64;
        }
    }
    for row in &mut rows {
        for (x, m) in row.iter_mut().zip(&mean) {
            *x -= m;
        }
    }

    let mut components: Vec<Vec<f64>> = Vec::new();
    for k in 0..2usize.min(d) {
        let mut w: Vec<f64> = (0..d)
            .map(|i| if i % 2 == k % 2 { 1.0 } else { 0.5 })
            .collect();
        for _ in 0..100 {
            // u = X w; w' = X^T u, orthogonalized against found components
            let mut next = vec![0.0; d];
            for row in &rows {
                let u: f64 = row.iter().zip(&w).map(|(a, b)| a * b).sum();
                for (nx, x) in next.iter_mut().zip(row) {
                    *nx += u * x;
                }
            }
            for c in &components {
                let dot: f64 = next.iter().zip(c).map(|(a, b)| a * b).sum();
                for (nx, ci) in next.iter_mut().zip(c) {
                    *nx -= dot * ci;
                }
            }
            let norm: f64 = next.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-12 {
                break;
            }
            for x in next.iter_mut() {
                *x /= norm;
            }
            w = next;
        }
        components.push(w);
    }
    while components.len() < 2 {
        components.push(vec![0.0; d]);
    }

    rows.iter()
        .map(|row| {
            let x: f64 = row.iter().zip(&components[0]).map(|(a, b)| a * b).sum();
            let y: f64 = row.iter().zip(&components[1]).map(|(a, b)| a * b).sum();
            [x, y]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session(name: &str) -> GraphSession {
        GraphSession::open(bundled_graph(name).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn bundled_graphs_parse() {
        for name in ["zachary", "florentine", "lesmis"] {
            let s = session(name);
            let summary: serde_json::Value =
                serde_json::from_str(&s.summary_json()).unwrap();
            assert!(summary["nodes"].as_u64().unwrap() > 0);
        }
        assert!(bundled_graph("nope").is_none());
    }

    #[test]
    fn zachary_summary_matches_dataset() {
        let s = session("zachary");
        let v: serde_json::Value = serde_json::from_str(&s.summary_json()).unwrap();
        assert_eq!(v["nodes"], 34);
        assert_eq!(v["link_count"], 78);
        assert_eq!(v["components"], 1);
    }

    #[test]
    fn community_view_is_consistent() {
        let s = session("zachary");
        let v: serde_json::Value = serde_json::from_str(&s.community_json_impl("1").unwrap()).unwrap();
        let members = v["members"].as_array().unwrap();
        assert!(!members.is_empty());
        assert_eq!(v["nc_size"].as_u64().unwrap() as usize, members.len());
        assert!(v["t_count"].as_u64().unwrap() >= v["nc_size"].as_u64().unwrap());
        assert!(v["nc_lid"].as_f64().unwrap() >= 0.0);
        assert!(s.community_json_impl("no-such-node").is_err());
    }

    #[test]
    fn scores_have_one_value_per_node() {
        let s = session("florentine");
        let v: serde_json::Value = serde_json::from_str(&s.scores_json_impl().unwrap()).unwrap();
        for key in ["nc_lid", "degree", "core", "eigenvector", "closeness", "betweenness"] {
            assert_eq!(v[key].as_array().unwrap().len(), 15, "{key}");
        }
    }

    #[test]
    fn embed_produces_projection_and_scores() {
        let s = session("florentine");
        let v: serde_json::Value =
            serde_json::from_str(&s.embed_json_impl("n2v", 16, 0.25, 4.0, 7).unwrap()).unwrap();
        assert_eq!(v["coords"].as_array().unwrap().len(), 15);
        assert_eq!(v["f1"].as_array().unwrap().len(), 15);
        assert_eq!(v["reconstructed_links"].as_array().unwrap().len(), 20);
        let f1 = v["macro_f1"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&f1));
        // lid variants work through the same entry point
        let v2: serde_json::Value =
            serde_json::from_str(&s.embed_json_impl("lid-rwpq", 16, 1.0, 1.0, 7).unwrap()).unwrap();
        assert!(v2["macro_f1"].as_f64().unwrap() > 0.0);
        assert!(s.embed_json_impl("bogus", 16, 1.0, 1.0, 7).is_err());
        assert!(s.embed_json_impl("n2v", 0, 1.0, 1.0, 7).is_err());
    }

    #[test]
    fn projection_separates_disconnected_cliques() {
        let text = "a b\nb c\nc a\nx y\ny z\nz x\n";
        let s = GraphSession::open(text, 1.0).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&s.embed_json_impl("n2v", 12, 1.0, 1.0, 3).unwrap()).unwrap();
        let coords: Vec<[f64; 2]> = v["coords"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| [c[0].as_f64().unwrap(), c[1].as_f64().unwrap()])
            .collect();
        // mean pairwise distance across cliques exceeds within-clique
        let dist = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        let within = dist(coords[0], coords[1]) + dist(coords[3], coords[4]);
        let across = dist(coords[0], coords[3]) + dist(coords[1], coords[4]);
        assert!(across > within, "across {across} vs within {within}");
    }
}
