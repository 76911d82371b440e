//! Graph reconstruction from embeddings and per-node link scores.
//!
//! The reconstructed graph joins the L closest vector pairs by Euclidean
//! distance (squared distances are used for ranking; they order pairs
//! identically). Per node we report link precision (correct links over
//! reconstructed incident links), recall (over original incident links), and
//! their harmonic mean F1. A node with no reconstructed links has precision
//! 0; an isolated original node has recall 0; F1 is 0 whenever P + R = 0.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

use crate::graph::Graph;
use crate::sgns::Embedding;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("requested {requested} pairs but only {available} exist")]
    TooManyPairs { requested: usize, available: usize },
    #[error("k = {0} out of range (need 1 <= k < node count {1})")]
    BadNeighborCount(usize, usize),
    #[error("node {0} has a duplicate vector (zero distance)")]
    DuplicateVector(u32),
}

/// Candidate pair ordered by (distance, min id, max id); the heap keeps the
/// l smallest under this total order, which pins tie-breaking at the cutoff.
#[derive(PartialEq)]
struct Candidate {
    dist: f64,
    u: u32,
    v: u32,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist
            .total_cmp(&other.dist)
            .then(self.u.cmp(&other.u))
            .then(self.v.cmp(&other.v))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The `l` closest vector pairs by Euclidean distance, as `(min id, max id)`
/// pairs sorted ascending. Exact: every pair is examined with a bounded
/// max-heap of size `l`, O(N^2 d) time and O(l) memory per worker.
pub fn reconstruct(emb: &Embedding, l: usize) -> Result<Vec<(u32, u32)>, EvalError> {
    let n = emb.node_count();
    let available = n * n.saturating_sub(1) / 2;
    if l > available {
        return Err(EvalError::TooManyPairs { requested: l, available });
    }
    if l == 0 {
        return Ok(Vec::new());
    }

    let scan_row = |mut heap: BinaryHeap<Candidate>, u: u32| -> BinaryHeap<Candidate> {
        for v in u + 1..n as u32 {
            let cand = Candidate { dist: emb.squared_distance(u, v), u, v };
            if heap.len() < l {
                heap.push(cand);
            } else if cand < *heap.peek().expect("nonempty") {
                heap.pop();
                heap.push(cand);
            }
        }
        heap
    };
    #[cfg(feature = "parallel")]
    let merged = (0..n as u32)
        .into_par_iter()
        .fold(|| BinaryHeap::<Candidate>::with_capacity(l + 1), scan_row)
        .reduce(
            || BinaryHeap::with_capacity(l + 1),
            |mut a, b| {
                for cand in b {
                    if a.len() < l {
                        a.push(cand);
                    } else if cand < *a.peek().expect("nonempty") {
                        a.pop();
                        a.push(cand);
                    }
                }
                a
            },
        );
    #[cfg(not(feature = "parallel"))]
    let merged = (0..n as u32).fold(BinaryHeap::with_capacity(l + 1), scan_row);

    let mut pairs: Vec<(u32, u32)> = merged.into_iter().map(|c| (c.u, c.v)).collect();
    pairs.sort_unstable();
    Ok(pairs)
}

/// Per-node link precision, recall and F1 of a reconstructed link set.
#[derive(Debug, Clone, Serialize)]
pub struct LinkScores {
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
}

pub fn link_scores(g: &Graph, reconstructed: &[(u32, u32)]) -> LinkScores {
    let n = g.node_count();
    let mut rec_degree = vec![0usize; n];
    let mut correct = vec![0usize; n];
    for &(u, v) in reconstructed {
        rec_degree[u as usize] += 1;
        rec_degree[v as usize] += 1;
        if g.has_link(u, v) {
            correct[u as usize] += 1;
            correct[v as usize] += 1;
        }
    }
    let mut precision = vec![0.0; n];
    let mut recall = vec![0.0; n];
    let mut f1 = vec![0.0; n];
    for v in 0..n {
        if rec_degree[v] > 0 {
            precision[v] = correct[v] as f64 / rec_degree[v] as f64;
        }
        let orig = g.degree(v as u32);
        if orig > 0 {
            recall[v] = correct[v] as f64 / orig as f64;
        }
        if precision[v] + recall[v] > 0.0 {
            f1[v] = 2.0 * precision[v] * recall[v] / (precision[v] + recall[v]);
        }
    }
    LinkScores { precision, recall, f1 }
}

/// Full reconstruction report: the reconstructed link set (always exactly
/// L(g) pairs), per-node scores, and macro averages over all nodes.
#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionResult {
    pub reconstructed_links: Vec<(u32, u32)>,
    pub scores: LinkScores,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
}

pub fn evaluate_embedding(g: &Graph, emb: &Embedding) -> Result<ReconstructionResult, EvalError> {
    let links = reconstruct(emb, g.link_count())?;
    let scores = link_scores(g, &links);
    let n = g.node_count() as f64;
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / n;
    Ok(ReconstructionResult {
        macro_precision: mean(&scores.precision),
        macro_recall: mean(&scores.recall),
        macro_f1: mean(&scores.f1),
        reconstructed_links: links,
        scores,
    })
}

/// Maximum-likelihood LID estimate from the k nearest Euclidean distances
/// x_1 <= ... <= x_k of a node's vector: `-(1/k sum ln(x_i / x_k))^{-1}`.
///
/// A zero distance (duplicate vectors) is an error; if all k distances are
/// equal the estimate diverges and +infinity is returned.
pub fn mle_lid(emb: &Embedding, node: u32, k: usize) -> Result<f64, EvalError> {
    let n = emb.node_count();
    if k < 1 || k >= n {
        return Err(EvalError::BadNeighborCount(k, n));
    }
    let mut dists: Vec<f64> = (0..n as u32)
        .filter(|&v| v != node)
        .map(|v| emb.squared_distance(node, v).sqrt())
        .collect();
    dists.sort_by(|a, b| a.total_cmp(b));
    dists.truncate(k);
    if dists[0] == 0.0 {
        return Err(EvalError::DuplicateVector(node));
    }
    let x_k = dists[k - 1];
    let sum: f64 = dists.iter().map(|&x| (x / x_k).ln()).sum();
    if sum == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-(k as f64) / sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn embedding_1d(points: &[f64]) -> Embedding {
        let labels = (0..points.len()).map(|i| format!("n{i}")).collect();
        let input: Vec<f32> = points.iter().map(|&x| x as f32).collect();
        Embedding::from_vectors(labels, 1, input)
    }

    #[test]
    fn reconstruct_collinear_points() {
        let emb = embedding_1d(&[0.0, 1.0, 10.0]);
        let pairs = reconstruct(&emb, 2).unwrap();
        assert_eq!(pairs, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn reconstruct_all_pairs_boundary() {
        let emb = embedding_1d(&[0.0, 1.0, 3.0, 7.0]);
        let pairs = reconstruct(&emb, 6).unwrap();
        assert_eq!(pairs.len(), 6);
        assert!(reconstruct(&emb, 7).is_err());
    }

    #[test]
    fn reconstruct_tie_break_is_lexicographic() {
        // four equidistant points on a line: distances 1,1,1 then 2,2 then 3
        let emb = embedding_1d(&[0.0, 1.0, 2.0, 3.0]);
        let pairs = reconstruct(&emb, 2).unwrap();
        assert_eq!(pairs, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn perfect_reconstruction_scores_one() {
        let g = Graph::load_edge_list("a b\nb c\n".as_bytes()).unwrap();
        let scores = link_scores(&g, &[(0, 1), (1, 2)]);
        assert!(scores.precision.iter().all(|&p| p == 1.0));
        assert!(scores.recall.iter().all(|&r| r == 1.0));
        assert!(scores.f1.iter().all(|&f| f == 1.0));
    }

    #[test]
    fn partial_reconstruction_formulas() {
        // node 0 links to 1,2 in the graph; reconstruction gives it 4 links,
        // 1 correct -> P = 0.25, R = 0.5, F1 = 1/3
        let g = Graph::load_edge_list("a b\na c\nd e\nd f\nd g\n".as_bytes()).unwrap();
        let rec = vec![(0, 1), (0, 3), (0, 4), (0, 5)];
        let scores = link_scores(&g, &rec);
        assert!((scores.precision[0] - 0.25).abs() < 1e-12);
        assert!((scores.recall[0] - 0.5).abs() < 1e-12);
        assert!((scores.f1[0] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_reconstruction_scores_zero() {
        let g = Graph::load_edge_list("a b\nc d\n".as_bytes()).unwrap();
        let scores = link_scores(&g, &[(0, 2), (1, 3)]);
        assert!(scores.f1.iter().all(|&f| f == 0.0));
    }

    #[test]
    fn engineered_embedding_reconstructs_graph() {
        // place linked nodes at distance epsilon: 3 pairs far apart
        let g = Graph::load_edge_list("a b\nc d\ne f\n".as_bytes()).unwrap();
        let emb = embedding_1d(&[0.0, 0.001, 10.0, 10.001, 20.0, 20.001]);
        let result = evaluate_embedding(&g, &emb).unwrap();
        assert_eq!(result.reconstructed_links.len(), g.link_count());
        assert!((result.macro_f1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mle_lid_two_point_arithmetic() {
        // distances (1, e) with k = 2: -(1/2 (ln(1/e) + 0))^{-1} = 2
        let emb = embedding_1d(&[0.0, 1.0, std::f64::consts::E]);
        let lid = mle_lid(&emb, 0, 2).unwrap();
        assert!((lid - 2.0).abs() < 1e-6, "lid {lid}"); // f32 vector storage
    }

    #[test]
    fn mle_lid_degenerate_cases() {
        let emb = embedding_1d(&[0.0, 1.0, -1.0]);
        assert_eq!(mle_lid(&emb, 0, 2).unwrap(), f64::INFINITY);
        let dup = embedding_1d(&[0.0, 0.0, 1.0]);
        assert!(matches!(mle_lid(&dup, 0, 1), Err(EvalError::DuplicateVector(0))));
        assert!(matches!(mle_lid(&emb, 0, 0), Err(EvalError::BadNeighborCount(0, 3))));
        assert!(matches!(mle_lid(&emb, 0, 3), Err(EvalError::BadNeighborCount(3, 3))));
    }

    #[test]
    fn mle_lid_line_segment_near_one() {
        // 1000 uniform points on a line: intrinsic dimension 1. Averaged
        // over interior query nodes to tame single-query estimator noise.
        let mut rng = crate::rng::SplitMix64::new(17);
        let pts: Vec<f64> = (0..1000).map(|_| 0.25 + 0.5 * rng.next_f64()).collect();
        let emb = embedding_1d(&pts);
        let mean: f64 = (0..50).map(|q| mle_lid(&emb, q, 20).unwrap()).sum::<f64>() / 50.0;
        assert!((mean - 1.0).abs() < 0.5, "mean lid {mean}");
    }
}
