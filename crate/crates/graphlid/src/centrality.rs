//! Node centrality metrics: degree, core index, eigenvector, closeness,
//! betweenness. All operate on an immutable [`Graph`] and return one value
//! per node.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use std::collections::VecDeque;
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error)]
pub enum CentralityError {
    #[error("power iteration did not converge within {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        /// Last iterate, for diagnostics.
        iterate: Vec<f64>,
    },
    #[error("empty graph")]
    EmptyGraph,
}

/// Node degree as a real vector.
pub fn degree(g: &Graph) -> Vec<f64> {
    g.node_ids().map(|v| g.degree(v) as f64).collect()
}

/// Core index (shell number): the largest k such that the node survives in
/// the k-core. Peeling in degree buckets, O(N + L).
pub fn core_index(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut deg: Vec<usize> = (0..n as u32).map(|v| g.degree(v)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    // nodes bucketed by current degree, processed smallest-first
    let mut bins = vec![0usize; max_deg + 2];
    for &d in &deg {
        bins[d] += 1;
    }
    let mut start = 0;
    for b in bins.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut order = vec![0u32; n];
    {
        let mut next = bins.clone();
        for v in 0..n {
            pos[v] = next[deg[v]];
            order[pos[v]] = v as u32;
            next[deg[v]] += 1;
        }
    }

    let mut core = vec![0usize; n];
    for i in 0..n {
        let v = order[i] as usize;
        core[v] = deg[v];
        for &w in g.neighbors(v as u32) {
            let w = w as usize;
            if deg[w] > deg[v] {
                // swap w toward the front of its bucket, then shrink its degree
                let dw = deg[w];
                let pw = pos[w];
                let pstart = bins[dw];
                let u = order[pstart] as usize;
                if u != w {
                    order[pstart] = w as u32;
                    order[pw] = u as u32;
                    pos[w] = pstart;
                    pos[u] = pw;
                }
                bins[dw] += 1;
                deg[w] -= 1;
            }
        }
    }
    core.into_iter().map(|c| c as f64).collect()
}

/// Eigenvector centrality by power iteration from the uniform vector,
/// L2-normalized each step; converged when the successive-iterate L1
/// distance drops below `tol * N`.
///
/// Iterates the shifted operator A + I: the shift leaves eigenvectors
/// unchanged but keeps the dominant eigenvalue unique on bipartite graphs
/// (a star would otherwise oscillate forever between two rays).
pub fn eigenvector(g: &Graph, tol: f64, max_iter: usize) -> Result<Vec<f64>, CentralityError> {
    let n = g.node_count();
    if n == 0 {
        return Err(CentralityError::EmptyGraph);
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        for v in 0..n {
            let mut acc = x[v]; // the +I shift
            for &w in g.neighbors(v as u32) {
                acc += x[w as usize];
            }
            next[v] = acc;
        }
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            // no links at all: uniform vector is the fixed point
            return Ok(x);
        }
        for v in next.iter_mut() {
            *v /= norm;
        }
        residual = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum::<f64>();
        std::mem::swap(&mut x, &mut next);
        if residual < tol * n as f64 {
            return Ok(x);
        }
    }
    Err(CentralityError::NoConvergence { iterations: max_iter, residual, iterate: x })
}

pub const EIGENVECTOR_TOL: f64 = 1e-10;
pub const EIGENVECTOR_MAX_ITER: usize = 1000;

/// Closeness centrality in the component-scaled (Wasserman-Faust) form:
/// ((r-1)/sum_d) * ((r-1)/(N-1)) with r the number of reachable nodes.
/// Well-defined on disconnected graphs; isolated nodes score 0.
pub fn closeness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let per_source = |v: u32| -> f64 {
        let dist = g.bfs_distances(v).expect("valid source");
        let mut reachable = 0u64;
        let mut total = 0u64;
        for &d in &dist {
            if d != crate::graph::UNREACHABLE {
                reachable += 1;
                total += d as u64;
            }
        }
        if total == 0 || n < 2 {
            return 0.0;
        }
        let r = reachable as f64;
        ((r - 1.0) / total as f64) * ((r - 1.0) / (n as f64 - 1.0))
    };
    #[cfg(feature = "parallel")]
    return (0..n as u32).into_par_iter().map(per_source).collect();
    #[cfg(not(feature = "parallel"))]
    (0..n as u32).map(per_source).collect()
}

/// Betweenness centrality by Brandes' algorithm, parallelized over BFS
/// sources. Each unordered pair is counted once; with `normalized` the
/// scores are scaled by 2/((N-1)(N-2)).
pub fn betweenness(g: &Graph, normalized: bool) -> Vec<f64> {
    let n = g.node_count();
    if n < 3 && normalized {
        return vec![0.0; n];
    }

    #[cfg(feature = "parallel")]
    let raw = (0..n as u32)
        .into_par_iter()
        .fold(
            || vec![0.0f64; n],
            |mut acc, s| {
                brandes_from_source(g, s, &mut acc);
                acc
            },
        )
        .reduce(
            || vec![0.0f64; n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    #[cfg(not(feature = "parallel"))]
    let raw = {
        let mut acc = vec![0.0f64; n];
        for s in 0..n as u32 {
            brandes_from_source(g, s, &mut acc);
        }
        acc
    };

    let scale = if normalized {
        // raw counts ordered pairs; halve and normalize by (N-1)(N-2)/2
        1.0 / ((n as f64 - 1.0) * (n as f64 - 2.0))
    } else {
        0.5
    };
    raw.into_iter().map(|v| v * scale).collect()
}

fn brandes_from_source(g: &Graph, s: u32, acc: &mut [f64]) {
    let n = g.node_count();
    let mut stack: Vec<u32> = Vec::with_capacity(n);
    let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    let mut delta = vec![0.0f64; n];

    sigma[s as usize] = 1.0;
    dist[s as usize] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        stack.push(v);
        for &w in g.neighbors(v) {
            if dist[w as usize] < 0 {
                dist[w as usize] = dist[v as usize] + 1;
                queue.push_back(w);
            }
            if dist[w as usize] == dist[v as usize] + 1 {
                sigma[w as usize] += sigma[v as usize];
                preds[w as usize].push(v);
            }
        }
    }
    while let Some(w) = stack.pop() {
        for &v in &preds[w as usize] {
            delta[v as usize] +=
                sigma[v as usize] / sigma[w as usize] * (1.0 + delta[w as usize]);
        }
        if w != s {
            acc[w as usize] += delta[w as usize];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_from(text: &str) -> Graph {
        Graph::load_edge_list(text.as_bytes()).unwrap()
    }

    fn star_k14() -> Graph {
        graph_from("c l1\nc l2\nc l3\nc l4\n")
    }

    #[test]
    fn degree_star_and_cycle() {
        let star = star_k14();
        let d = degree(&star);
        assert_eq!(d[0], 4.0);
        assert!(d[1..].iter().all(|&x| x == 1.0));
        let cycle = graph_from("a b\nb c\nc d\nd e\ne f\nf a\n");
        assert!(degree(&cycle).iter().all(|&x| x == 2.0));
    }

    #[test]
    fn core_index_complete_and_star() {
        let k4 = graph_from("a b\na c\na d\nb c\nb d\nc d\n");
        assert!(core_index(&k4).iter().all(|&c| c == 3.0));
        let star = star_k14();
        assert!(core_index(&star).iter().all(|&c| c == 1.0));
    }

    #[test]
    fn core_index_triangle_with_pendant() {
        let g = graph_from("a b\nb c\nc a\nc d\n");
        let core = core_index(&g);
        assert_eq!(core[0], 2.0);
        assert_eq!(core[1], 2.0);
        assert_eq!(core[2], 2.0);
        assert_eq!(core[3], 1.0);
    }

    #[test]
    fn eigenvector_cycle_is_uniform() {
        let g = graph_from("a b\nb c\nc d\nd e\ne a\n");
        let x = eigenvector(&g, EIGENVECTOR_TOL, EIGENVECTOR_MAX_ITER).unwrap();
        for &v in &x {
            assert!((v - x[0]).abs() < 1e-8);
        }
    }

    #[test]
    fn eigenvector_star_center_leaf_ratio() {
        // dominant eigenvector of K_{1,m} has center/leaf = sqrt(m)
        let g = star_k14();
        let x = eigenvector(&g, EIGENVECTOR_TOL, EIGENVECTOR_MAX_ITER).unwrap();
        assert!((x[0] / x[1] - 2.0).abs() < 1e-6, "ratio {}", x[0] / x[1]);
    }

    #[test]
    fn eigenvector_mass_concentrates_on_larger_clique() {
        // K5 and K3, disconnected
        let mut edges = String::new();
        let k5 = ["a", "b", "c", "d", "e"];
        for i in 0..5 {
            for j in i + 1..5 {
                edges.push_str(&format!("{} {}\n", k5[i], k5[j]));
            }
        }
        edges.push_str("x y\nx z\ny z\n");
        let g = graph_from(&edges);
        let x = eigenvector(&g, EIGENVECTOR_TOL, EIGENVECTOR_MAX_ITER).unwrap();
        let k5_min = (0..5).map(|i| x[i]).fold(f64::INFINITY, f64::min);
        let k3_max = (5..8).map(|i| x[i]).fold(0.0f64, f64::max);
        assert!(k5_min > 1e-3);
        assert!(k3_max < 1e-6, "K3 mass {k3_max} should vanish");
    }

    #[test]
    fn eigenvector_satisfies_rayleigh_residual() {
        let g = graph_from("a b\nb c\nc a\nc d\nd e\n");
        let x = eigenvector(&g, EIGENVECTOR_TOL, EIGENVECTOR_MAX_ITER).unwrap();
        let ax: Vec<f64> = g
            .node_ids()
            .map(|v| g.neighbors(v).iter().map(|&w| x[w as usize]).sum::<f64>())
            .collect();
        let lambda: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
        let norm_x: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let resid: f64 = ax
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(resid < 1e-6 * norm_x.max(1.0), "residual {resid}");
    }

    #[test]
    fn closeness_path_and_complete() {
        let path = graph_from("a b\nb c\n");
        let c = closeness(&path);
        assert!((c[1] - 1.0).abs() < 1e-12);
        assert!((c[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((c[2] - 2.0 / 3.0).abs() < 1e-12);

        let k4 = graph_from("a b\na c\na d\nb c\nb d\nc d\n");
        assert!(closeness(&k4).iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn closeness_disjoint_edges_component_scaled() {
        let g = graph_from("a b\nc d\n");
        for &v in &closeness(&g) {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn betweenness_path_middle() {
        let g = graph_from("a b\nb c\n");
        let bc = betweenness(&g, true);
        assert!((bc[1] - 1.0).abs() < 1e-12);
        assert_eq!(bc[0], 0.0);
        assert_eq!(bc[2], 0.0);
    }

    #[test]
    fn betweenness_cycle_symmetry() {
        let g = graph_from("a b\nb c\nc d\nd e\ne a\n");
        let bc = betweenness(&g, true);
        for &v in &bc {
            assert!((v - bc[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn betweenness_unnormalized_counts_pairs_once() {
        let g = graph_from("a b\nb c\n");
        let bc = betweenness(&g, false);
        assert!((bc[1] - 1.0).abs() < 1e-12);
    }
}
