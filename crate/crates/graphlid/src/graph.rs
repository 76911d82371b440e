//! Immutable undirected graph, edge-list ingestion, and summary statistics.

use std::collections::HashMap;
use std::collections::VecDeque;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

/// Distance sentinel for nodes unreachable from a BFS source.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: expected two node labels, found {found} token(s)")]
    MalformedLine { line: usize, found: usize },
    #[error("empty input: no links found")]
    EmptyInput,
    #[error("node id {0} out of range (graph has {1} nodes)")]
    InvalidNode(u32, usize),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

/// Undirected simple graph with dense internal ids `0..N` and a label map.
///
/// Adjacency lists are sorted, symmetric, and free of self-loops and
/// duplicates. Directed inputs are projected to their undirected form on
/// load; duplicate links are collapsed and self-loops dropped (both counted).
#[derive(Debug, Clone)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, u32>,
    adjacency: Vec<Vec<u32>>,
    link_count: usize,
    dropped_self_loops: usize,
    dropped_duplicates: usize,
}

/// Row of summary statistics: node/link counts, connectivity, and the shape
/// of the degree distribution.
#[derive(Debug, Clone, Serialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub links: usize,
    pub components: usize,
    pub largest_component_fraction: f64,
    pub avg_degree: f64,
    pub degree_skewness: f64,
}

impl Graph {
    /// Build a graph from label pairs. Labels get dense ids in first-seen
    /// order, which makes loading deterministic for a fixed input.
    pub fn from_labeled_edges<I, S>(pairs: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, u32> = HashMap::new();
        let mut edges: Vec<(u32, u32)> = Vec::new();
        let mut dropped_self_loops = 0usize;

        let intern = |label: &str, labels: &mut Vec<String>, index: &mut HashMap<String, u32>| {
            if let Some(&id) = index.get(label) {
                id
            } else {
                let id = labels.len() as u32;
                labels.push(label.to_string());
                index.insert(label.to_string(), id);
                id
            }
        };

        for (a, b) in pairs {
            let u = intern(a.as_ref(), &mut labels, &mut index);
            let v = intern(b.as_ref(), &mut labels, &mut index);
            if u == v {
                dropped_self_loops += 1;
                continue;
            }
            edges.push((u.min(v), u.max(v)));
        }

        if labels.is_empty() {
            return Err(GraphError::EmptyInput);
        }

        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        let dropped_duplicates = before - edges.len();

        let mut adjacency = vec![Vec::new(); labels.len()];
        for &(u, v) in &edges {
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        Ok(Graph {
            labels,
            index,
            adjacency,
            link_count: edges.len(),
            dropped_self_loops,
            dropped_duplicates,
        })
    }

    /// Parse an edge-list text stream: two whitespace- or comma-separated
    /// labels per line, `#`/`%` lines and blank lines skipped.
    pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph, GraphError> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
                continue;
            }
            let tokens: Vec<&str> = trimmed
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .collect();
            if tokens.len() != 2 {
                return Err(GraphError::MalformedLine { line: i + 1, found: tokens.len() });
            }
            pairs.push((tokens[0].to_string(), tokens[1].to_string()));
        }
        Graph::from_labeled_edges(pairs)
    }

    pub fn load_edge_list_path<P: AsRef<Path>>(path: P) -> Result<Graph, GraphError> {
        Graph::load_edge_list(BufReader::new(File::open(path)?))
    }

    /// Write one `label1 label2` line per link, sorted by internal id pair.
    /// Reloading the output reproduces the graph exactly.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        for u in 0..self.adjacency.len() as u32 {
            for &v in &self.adjacency[u as usize] {
                if u < v {
                    writeln!(w, "{} {}", self.labels[u as usize], self.labels[v as usize])?;
                }
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn link_count(&self) -> usize {
        self.link_count
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    pub fn has_link(&self, u: u32, v: u32) -> bool {
        self.adjacency[u as usize].binary_search(&v).is_ok()
    }

    pub fn label(&self, v: u32) -> &str {
        &self.labels[v as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_id(&self, label: &str) -> Option<u32> {
        self.index.get(label).copied()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = u32> {
        0..self.labels.len() as u32
    }

    /// Links as `(min id, max id)` pairs in sorted order.
    pub fn links(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.link_count);
        for u in 0..self.adjacency.len() as u32 {
            for &v in &self.adjacency[u as usize] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn dropped_self_loops(&self) -> usize {
        self.dropped_self_loops
    }

    pub fn dropped_duplicates(&self) -> usize {
        self.dropped_duplicates
    }

    /// BFS hop distances from `source`; unreachable nodes get [`UNREACHABLE`].
    pub fn bfs_distances(&self, source: u32) -> Result<Vec<u32>, GraphError> {
        if source as usize >= self.node_count() {
            return Err(GraphError::InvalidNode(source, self.node_count()));
        }
        let mut dist = vec![UNREACHABLE; self.node_count()];
        dist[source as usize] = 0;
        let mut queue = VecDeque::with_capacity(self.node_count());
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &v in self.neighbors(u) {
                if dist[v as usize] == UNREACHABLE {
                    dist[v as usize] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        Ok(dist)
    }

    /// Connected components as a per-node component id, plus component sizes.
    pub fn components(&self) -> (Vec<u32>, Vec<usize>) {
        let n = self.node_count();
        let mut comp = vec![u32::MAX; n];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n as u32 {
            if comp[start as usize] != u32::MAX {
                continue;
            }
            let id = sizes.len() as u32;
            let mut size = 0usize;
            comp[start as usize] = id;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                size += 1;
                for &v in self.neighbors(u) {
                    if comp[v as usize] == u32::MAX {
                        comp[v as usize] = id;
                        queue.push_back(v);
                    }
                }
            }
            sizes.push(size);
        }
        (comp, sizes)
    }

    /// Summary statistics. Degree skewness is the biased Fisher-Pearson
    /// g1 = m3 / m2^{3/2}; a constant degree sequence yields 0.
    pub fn stats(&self) -> GraphStats {
        let n = self.node_count();
        let (_, sizes) = self.components();
        let largest = sizes.iter().copied().max().unwrap_or(0);
        let degrees: Vec<f64> = (0..n as u32).map(|v| self.degree(v) as f64).collect();
        let mean = degrees.iter().sum::<f64>() / n as f64;
        let m2 = degrees.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n as f64;
        let m3 = degrees.iter().map(|d| (d - mean).powi(3)).sum::<f64>() / n as f64;
        let skew = if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 };
        GraphStats {
            nodes: n,
            links: self.link_count,
            components: sizes.len(),
            largest_component_fraction: largest as f64 / n as f64,
            avg_degree: 2.0 * self.link_count as f64 / n as f64,
            degree_skewness: skew,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_from(text: &str) -> Graph {
        Graph::load_edge_list(text.as_bytes()).unwrap()
    }

    #[test]
    fn builds_simple_graph() {
        let g = graph_from("a b\nb c\n");
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.link_count(), 2);
        assert_eq!(g.label(0), "a");
        assert_eq!(g.node_id("c"), Some(2));
    }

    #[test]
    fn collapses_duplicates_and_drops_self_loops() {
        let g = graph_from("a b\nb a\na a\n");
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.link_count(), 1);
        assert_eq!(g.dropped_duplicates(), 1);
        assert_eq!(g.dropped_self_loops(), 1);
    }

    #[test]
    fn accepts_comma_separation_and_comments() {
        let g = graph_from("# header\n% another\na,b\nb\tc\n");
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.link_count(), 2);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = Graph::load_edge_list("a b\nx y z\n".as_bytes()).unwrap_err();
        match err {
            GraphError::MalformedLine { line, found } => {
                assert_eq!(line, 2);
                assert_eq!(found, 3);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(
            Graph::load_edge_list("# only comments\n".as_bytes()),
            Err(GraphError::EmptyInput)
        ));
    }

    #[test]
    fn adjacency_is_symmetric_and_sums_to_twice_links() {
        let g = graph_from("a b\nb c\nc a\nc d\n");
        let total: usize = g.node_ids().map(|v| g.degree(v)).sum();
        assert_eq!(total, 2 * g.link_count());
        for u in g.node_ids() {
            for &v in g.neighbors(u) {
                assert!(g.has_link(v, u));
            }
        }
    }

    #[test]
    fn bfs_path_distances() {
        let g = graph_from("a b\nb c\n");
        assert_eq!(g.bfs_distances(0).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn bfs_marks_unreachable() {
        let g = graph_from("a b\nc d\n");
        let d = g.bfs_distances(0).unwrap();
        assert_eq!(d[0], 0);
        assert_eq!(d[1], 1);
        assert_eq!(d[2], UNREACHABLE);
        assert_eq!(d[3], UNREACHABLE);
    }

    #[test]
    fn bfs_rejects_invalid_source() {
        let g = graph_from("a b\n");
        assert!(g.bfs_distances(9).is_err());
    }

    #[test]
    fn six_cycle_stats() {
        let g = graph_from("a b\nb c\nc d\nd e\ne f\nf a\n");
        let s = g.stats();
        assert_eq!(s.components, 1);
        assert!((s.avg_degree - 2.0).abs() < 1e-12);
        assert_eq!(s.degree_skewness, 0.0);
    }

    #[test]
    fn component_stats_on_disjoint_edges() {
        let g = graph_from("a b\nc d\ne f\n");
        let s = g.stats();
        assert_eq!(s.components, 3);
        assert!((s.largest_component_fraction - 2.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn edge_list_round_trip_is_identity() {
        let g = graph_from("b a\na c\nc b\nd c\n");
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let g2 = Graph::load_edge_list(buf.as_slice()).unwrap();
        assert_eq!(g.node_count(), g2.node_count());
        assert_eq!(g.link_count(), g2.link_count());
        let pairs: Vec<(String, String)> = g
            .links()
            .iter()
            .map(|&(u, v)| (g.label(u).to_string(), g.label(v).to_string()))
            .collect();
        let pairs2: Vec<(String, String)> = g2
            .links()
            .iter()
            .map(|&(u, v)| (g2.label(u).to_string(), g2.label(v).to_string()))
            .collect();
        let mut a = pairs;
        let mut b = pairs2;
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}
