//! Natural (local) communities grown by greedy fitness maximization, and the
//! NC-LID / GB-LID local intrinsic dimensionality scores built on them.
//!
//! The community of a seed node is grown by repeatedly adding the border
//! node whose addition maximizes the community fitness
//! `f_C = k_in / (k_in + k_out)^alpha`, where `k_in` is the total
//! intra-degree of members (each internal link counted twice) and `k_out`
//! the total inter-degree. Growth stops when every border node has strictly
//! negative fitness; after each addition, members whose fitness has turned
//! strictly negative are removed one at a time (the seed never is).
//!
//! All fitness comparisons are plain f64 comparisons. For alpha = 1 the
//! fitness values are correctly rounded small-integer ratios, so equality
//! and ordering are exact and the procedure is fully deterministic: ties are
//! broken toward the smallest internal id.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;
use std::collections::VecDeque;
use thiserror::Error;

use crate::graph::{Graph, GraphError, UNREACHABLE};

pub const DEFAULT_ALPHA: f64 = 1.0;

#[derive(Debug, Error)]
pub enum CommunityError {
    #[error("locality member {0} is unreachable from the seed")]
    UnreachableMember(u32),
    #[error("locality must be nonempty and contain the seed")]
    BadLocality,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A node's natural community: the seed, the sorted member set (always
/// containing the seed), and the community fitness at termination.
#[derive(Debug, Clone, Serialize)]
pub struct NaturalCommunity {
    pub seed: u32,
    pub members: Vec<u32>,
    pub fitness: f64,
}

impl NaturalCommunity {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the seed is always a member
    }

    pub fn contains(&self, v: u32) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

/// NC-LID score of a node: `-ln(|S| / T)` where `S` is the natural community
/// and `T` counts the nodes within the community's shortest-path radius of
/// the seed.
#[derive(Debug, Clone, Serialize)]
pub struct NcLidScore {
    pub node: u32,
    pub nc_size: usize,
    pub radius: u32,
    pub t_count: usize,
    pub value: f64,
}

#[inline]
fn fitness_value(k_in: u64, k_out: u64, alpha: f64) -> f64 {
    let total = k_in + k_out;
    if k_in == 0 || total == 0 {
        return 0.0;
    }
    if alpha == 1.0 {
        k_in as f64 / total as f64
    } else {
        k_in as f64 / (total as f64).powf(alpha)
    }
}

/// Community fitness of an explicit member set, recomputed from scratch.
/// Reference route for the incremental bookkeeping inside
/// [`natural_community`].
pub fn community_fitness(g: &Graph, members: &[u32], alpha: f64) -> f64 {
    let set: BTreeSet<u32> = members.iter().copied().collect();
    let mut k_in = 0u64;
    let mut k_out = 0u64;
    for &m in &set {
        for &w in g.neighbors(m) {
            if set.contains(&w) {
                k_in += 1;
            } else {
                k_out += 1;
            }
        }
    }
    fitness_value(k_in, k_out, alpha)
}

/// Grow the natural community of `seed` by greedy fitness maximization.
///
/// Deterministic: the border node with the largest fitness is added (ties
/// broken toward the smallest id) while that fitness is non-negative; after
/// each addition, members with strictly negative fitness are removed
/// smallest-id first until none remain. The seed itself is never removed.
/// An isolated seed yields the singleton community with fitness 0.
pub fn natural_community(g: &Graph, seed: u32, alpha: f64) -> NaturalCommunity {
    let n = g.node_count();
    debug_assert!((seed as usize) < n);
    let mut in_c = vec![false; n];
    in_c[seed as usize] = true;
    let mut members: Vec<u32> = vec![seed];
    // links from each node into the current community
    let mut deg_in = vec![0u32; n];
    for &w in g.neighbors(seed) {
        deg_in[w as usize] = 1;
    }
    let mut k_in = 0u64;
    let mut k_out = g.degree(seed) as u64;

    let add = |v: u32,
               members: &mut Vec<u32>,
               in_c: &mut [bool],
               deg_in: &mut [u32],
               k_in: &mut u64,
               k_out: &mut u64| {
        let din = deg_in[v as usize] as u64;
        let dout = g.degree(v) as u64 - din;
        *k_in += 2 * din;
        *k_out = *k_out + dout - din;
        in_c[v as usize] = true;
        let pos = members.binary_search(&v).unwrap_err();
        members.insert(pos, v);
        for &w in g.neighbors(v) {
            deg_in[w as usize] += 1;
        }
    };

    let remove = |v: u32,
                  members: &mut Vec<u32>,
                  in_c: &mut [bool],
                  deg_in: &mut [u32],
                  k_in: &mut u64,
                  k_out: &mut u64| {
        // deg_in[v] currently counts v's own membership via its neighbors;
        // links from v into C \ {v} are deg_in[v] itself.
        let din = deg_in[v as usize] as u64;
        let dout = g.degree(v) as u64 - din;
        *k_in -= 2 * din;
        *k_out = *k_out + din - dout;
        in_c[v as usize] = false;
        let pos = members.binary_search(&v).unwrap();
        members.remove(pos);
        for &w in g.neighbors(v) {
            deg_in[w as usize] -= 1;
        }
    };

    loop {
        // border in ascending id order
        let mut border: BTreeSet<u32> = BTreeSet::new();
        for &m in &members {
            for &w in g.neighbors(m) {
                if !in_c[w as usize] {
                    border.insert(w);
                }
            }
        }
        if border.is_empty() {
            break;
        }

        let f_c = fitness_value(k_in, k_out, alpha);
        let mut best: Option<(u32, f64)> = None;
        for &x in &border {
            let din = deg_in[x as usize] as u64;
            let dout = g.degree(x) as u64 - din;
            let f_new = fitness_value(k_in + 2 * din, k_out + dout - din, alpha);
            if best.is_none_or(|(_, bf)| f_new > bf) {
                best = Some((x, f_new));
            }
        }
        let (x, f_new) = best.expect("nonempty border");
        if f_new < f_c {
            break; // every border node has negative fitness
        }
        add(x, &mut members, &mut in_c, &mut deg_in, &mut k_in, &mut k_out);

        loop {
            let f_c = fitness_value(k_in, k_out, alpha);
            let mut victim = None;
            for &m in &members {
                if m == seed {
                    continue;
                }
                let din = deg_in[m as usize] as u64;
                let dout = g.degree(m) as u64 - din;
                let f_without = fitness_value(k_in - 2 * din, k_out + din - dout, alpha);
                if f_without > f_c {
                    victim = Some(m);
                    break;
                }
            }
            match victim {
                Some(m) => remove(m, &mut members, &mut in_c, &mut deg_in, &mut k_in, &mut k_out),
                None => break,
            }
        }
    }

    NaturalCommunity { seed, members, fitness: fitness_value(k_in, k_out, alpha) }
}

/// NC-LID of a community: radius M is the largest hop distance from the seed
/// to a member; T counts the nodes at distance at most M via a
/// depth-tracking BFS that stops at the first node beyond the radius.
pub fn nc_lid(g: &Graph, community: &NaturalCommunity) -> Result<NcLidScore, CommunityError> {
    let dist = g.bfs_distances(community.seed)?;
    let mut radius = 0u32;
    for &m in &community.members {
        let d = dist[m as usize];
        if d == UNREACHABLE {
            return Err(CommunityError::UnreachableMember(m));
        }
        radius = radius.max(d);
    }

    let t_count = count_within_radius(g, community.seed, radius);
    let value = -((community.members.len() as f64 / t_count as f64).ln());
    Ok(NcLidScore {
        node: community.seed,
        nc_size: community.members.len(),
        radius,
        t_count,
        value: value.max(0.0),
    })
}

/// Count nodes with hop distance <= radius from `source` by a BFS that
/// breaks at the first dequeued node beyond the radius. Unreachable nodes
/// are never visited, so they are never counted.
fn count_within_radius(g: &Graph, source: u32, radius: u32) -> usize {
    let n = g.node_count();
    let mut depth = vec![UNREACHABLE; n];
    depth[source as usize] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(source);
    let mut count = 0usize;
    while let Some(c) = queue.pop_front() {
        let d = depth[c as usize];
        if d > radius {
            break;
        }
        count += 1;
        for &p in g.neighbors(c) {
            if depth[p as usize] == UNREACHABLE {
                depth[p as usize] = d + 1;
                queue.push_back(p);
            }
        }
    }
    count
}

/// General graph-based LID under a pluggable node distance: `-ln(|S| / T)`
/// with `T = |{y : d(y) <= max_{s in S} d(s)}|`. [`nc_lid`] is this measure
/// instantiated with hop distance and the natural community.
pub fn gb_lid<F>(
    g: &Graph,
    seed: u32,
    locality: &[u32],
    distance: F,
) -> Result<f64, CommunityError>
where
    F: Fn(u32) -> Option<f64>,
{
    if locality.is_empty() || !locality.contains(&seed) {
        return Err(CommunityError::BadLocality);
    }
    let mut rho = f64::NEG_INFINITY;
    for &m in locality {
        match distance(m) {
            Some(d) => rho = rho.max(d),
            None => return Err(CommunityError::UnreachableMember(m)),
        }
    }
    let t = g
        .node_ids()
        .filter(|&y| distance(y).is_some_and(|d| d <= rho))
        .count();
    Ok((-((locality.len() as f64 / t as f64).ln())).max(0.0))
}

/// Natural communities and NC-LID scores for every node. Seeds are
/// independent, so the batch parallelizes; output order is by node id and
/// identical for any thread count.
pub struct CommunityProfile {
    pub communities: Vec<NaturalCommunity>,
    pub scores: Vec<NcLidScore>,
}

pub fn community_profile(g: &Graph, alpha: f64) -> CommunityProfile {
    let seeds: Vec<u32> = g.node_ids().collect();
    #[cfg(feature = "parallel")]
    let communities: Vec<NaturalCommunity> = seeds
        .into_par_iter()
        .map(|seed| natural_community(g, seed, alpha))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let communities: Vec<NaturalCommunity> = seeds
        .into_iter()
        .map(|seed| natural_community(g, seed, alpha))
        .collect();
    let score = |c: &NaturalCommunity| nc_lid(g, c).expect("community members reachable from seed");
    #[cfg(feature = "parallel")]
    let scores: Vec<NcLidScore> = communities.par_iter().map(score).collect();
    #[cfg(not(feature = "parallel"))]
    let scores: Vec<NcLidScore> = communities.iter().map(score).collect();
    CommunityProfile { communities, scores }
}

/// NC-LID scores for every node (see [`community_profile`]).
pub fn nc_lid_all(g: &Graph, alpha: f64) -> Vec<NcLidScore> {
    community_profile(g, alpha).scores
}
