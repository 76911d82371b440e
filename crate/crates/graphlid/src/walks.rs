//! Biased second-order random-walk corpora: plain node2vec and the two
//! LID-elastic variants.
//!
//! `lid-rw` personalizes per-node walk counts and lengths,
//! `NRW(v) = floor((1 + NC-LID(v)) * B)` and
//! `LRW(v) = floor(W / (1 + NC-LID(v)))`, trading more walks for shorter
//! ones so the per-node step budget stays near `B * W`. `lid-rwpq`
//! additionally personalizes the return and in-out parameters per node pair:
//! crossing out of a natural community raises the effective p/q by the
//! NC-LID of the node whose community is being left, biasing walks to stay
//! within complex communities.
//!
//! Every walk draws from its own counter-based RNG stream keyed by
//! `(seed, origin, walk index)`, so corpora are byte-identical for a fixed
//! seed regardless of thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use thiserror::Error;

use crate::community::NaturalCommunity;
use crate::graph::Graph;
use crate::rng::SplitMix64;

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("variant {0} requires NC-LID scores and natural communities")]
    MissingProfile(WalkVariant),
    #[error("per-node data has length {got}, graph has {want} nodes")]
    LengthMismatch { got: usize, want: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkVariant {
    /// Plain node2vec: fixed B, W, p, q.
    Node2vec,
    /// Per-node walk count and length from NC-LID.
    LidRw,
    /// lid-rw plus per-pair p/q adjustments.
    LidRwPq,
}

impl fmt::Display for WalkVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WalkVariant::Node2vec => "n2v",
            WalkVariant::LidRw => "lid-rw",
            WalkVariant::LidRwPq => "lid-rwpq",
        };
        f.write_str(s)
    }
}

impl FromStr for WalkVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "n2v" | "node2vec" => Ok(WalkVariant::Node2vec),
            "lid-rw" => Ok(WalkVariant::LidRw),
            "lid-rwpq" => Ok(WalkVariant::LidRwPq),
            other => Err(format!("unknown walk variant '{other}' (expected n2v, lid-rw or lid-rwpq)")),
        }
    }
}

/// Sampling hyperparameters. `num_walks` and `walk_length` are the base
/// values B and W; for lid variants they are adjusted per node, and `p`/`q`
/// are the base values the per-pair adjustments start from.
#[derive(Debug, Clone)]
pub struct WalkConfig {
    pub variant: WalkVariant,
    pub num_walks: u32,
    pub walk_length: u32,
    pub p: f64,
    pub q: f64,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            variant: WalkVariant::Node2vec,
            num_walks: 10,
            walk_length: 80,
            p: 1.0,
            q: 1.0,
            seed: 1,
        }
    }
}

/// Number of walks sampled for a node with the given NC-LID.
pub fn nrw(nc_lid: f64, base_num_walks: u32) -> u32 {
    ((1.0 + nc_lid) * base_num_walks as f64).floor() as u32
}

/// Length of each walk sampled for a node with the given NC-LID, floored at 1.
pub fn lrw(nc_lid: f64, base_walk_length: u32) -> u32 {
    ((base_walk_length as f64 / (1.0 + nc_lid)).floor() as u32).max(1)
}

/// Sampled corpus: one node-id sequence per walk plus its origin node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkCorpus {
    pub walks: Vec<Vec<u32>>,
    pub origins: Vec<u32>,
}

impl WalkCorpus {
    pub fn total_tokens(&self) -> usize {
        self.walks.iter().map(|w| w.len()).sum()
    }

    /// One walk per line, space-separated node labels (sentence file).
    pub fn write_sentences<W: Write>(&self, g: &Graph, mut w: W) -> io::Result<()> {
        for walk in &self.walks {
            let mut first = true;
            for &v in walk {
                if !first {
                    w.write_all(b" ")?;
                }
                w.write_all(g.label(v).as_bytes())?;
                first = false;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Effective return parameter for the step out of `cur` toward the previous
/// node `x = prev`: raised by NC-LID(x) when `cur` lies outside x's natural
/// community.
#[inline]
fn effective_p(
    cfg: &WalkConfig,
    cur: u32,
    x: u32,
    nclid: &[f64],
    communities: &[NaturalCommunity],
) -> f64 {
    if cfg.variant == WalkVariant::LidRwPq && !communities[x as usize].contains(cur) {
        cfg.p + nclid[x as usize]
    } else {
        cfg.p
    }
}

/// Effective in-out parameter for the step from `cur` to `x`: raised by
/// NC-LID(cur) when `x` lies outside cur's natural community.
#[inline]
fn effective_q(
    cfg: &WalkConfig,
    cur: u32,
    x: u32,
    nclid: &[f64],
    communities: &[NaturalCommunity],
) -> f64 {
    if cfg.variant == WalkVariant::LidRwPq && !communities[cur as usize].contains(x) {
        cfg.q + nclid[cur as usize]
    } else {
        cfg.q
    }
}

/// Unnormalized transition weights from `cur`, parallel to
/// `g.neighbors(cur)`. With a previous node `t`: weight 1/p toward `t`
/// itself, 1 toward common neighbors of `t`, and 1/q toward nodes at hop
/// distance two from `t`. Without history the distribution is uniform.
pub fn transition_weights(
    g: &Graph,
    prev: Option<u32>,
    cur: u32,
    cfg: &WalkConfig,
    nclid: &[f64],
    communities: &[NaturalCommunity],
) -> Vec<f64> {
    let neighbors = g.neighbors(cur);
    match prev {
        None => vec![1.0; neighbors.len()],
        Some(t) => neighbors
            .iter()
            .map(|&x| {
                if x == t {
                    1.0 / effective_p(cfg, cur, x, nclid, communities)
                } else if g.has_link(t, x) {
                    1.0
                } else {
                    1.0 / effective_q(cfg, cur, x, nclid, communities)
                }
            })
            .collect(),
    }
}

/// One biased step; `None` when `cur` has no neighbors.
pub fn sample_step(
    g: &Graph,
    prev: Option<u32>,
    cur: u32,
    cfg: &WalkConfig,
    nclid: &[f64],
    communities: &[NaturalCommunity],
    rng: &mut SplitMix64,
) -> Option<u32> {
    let neighbors = g.neighbors(cur);
    if neighbors.is_empty() {
        return None;
    }
    let weights = transition_weights(g, prev, cur, cfg, nclid, communities);
    let total: f64 = weights.iter().sum();
    let mut target = rng.next_f64() * total;
    for (&x, &w) in neighbors.iter().zip(&weights) {
        target -= w;
        if target < 0.0 {
            return Some(x);
        }
    }
    Some(*neighbors.last().expect("nonempty")) // float slop fallback
}

fn sample_walk(
    g: &Graph,
    origin: u32,
    length: u32,
    cfg: &WalkConfig,
    nclid: &[f64],
    communities: &[NaturalCommunity],
    rng: &mut SplitMix64,
) -> Vec<u32> {
    let mut walk = Vec::with_capacity(length as usize);
    walk.push(origin);
    let mut prev = None;
    let mut cur = origin;
    for _ in 1..length {
        match sample_step(g, prev, cur, cfg, nclid, communities, rng) {
            Some(next) => {
                walk.push(next);
                prev = Some(cur);
                cur = next;
            }
            None => break, // dead end: truncate
        }
    }
    walk
}

/// Sample the full corpus. Plain node2vec ignores the profile arguments;
/// the lid variants require NC-LID scores and natural communities indexed by
/// node id. Walks shorter than two nodes (isolated origins) are discarded.
pub fn sample_corpus(
    g: &Graph,
    cfg: &WalkConfig,
    nclid: Option<&[f64]>,
    communities: Option<&[NaturalCommunity]>,
) -> Result<WalkCorpus, WalkError> {
    let n = g.node_count();
    static NO_LIDS: &[f64] = &[];
    let (lids, comms): (&[f64], &[NaturalCommunity]) = match cfg.variant {
        WalkVariant::Node2vec => (NO_LIDS, &[]),
        _ => {
            let lids = nclid.ok_or(WalkError::MissingProfile(cfg.variant))?;
            let comms = communities.ok_or(WalkError::MissingProfile(cfg.variant))?;
            if lids.len() != n {
                return Err(WalkError::LengthMismatch { got: lids.len(), want: n });
            }
            if comms.len() != n {
                return Err(WalkError::LengthMismatch { got: comms.len(), want: n });
            }
            (lids, comms)
        }
    };

    let sample_node = |v: u32| {
            let (count, length) = match cfg.variant {
                WalkVariant::Node2vec => (cfg.num_walks, cfg.walk_length),
                _ => (nrw(lids[v as usize], cfg.num_walks), lrw(lids[v as usize], cfg.walk_length)),
            };
            let mut walks = Vec::with_capacity(count as usize);
            for i in 0..count {
                let mut rng = SplitMix64::stream(cfg.seed, &[v as u64, i as u64]);
                let walk = sample_walk(g, v, length, cfg, lids, comms, &mut rng);
                if walk.len() >= 2 {
                    walks.push(walk);
                }
            }
            (walks, v)
    };
    #[cfg(feature = "parallel")]
    let per_node: Vec<(Vec<Vec<u32>>, u32)> =
        (0..n as u32).into_par_iter().map(sample_node).collect();
    #[cfg(not(feature = "parallel"))]
    let per_node: Vec<(Vec<Vec<u32>>, u32)> = (0..n as u32).map(sample_node).collect();

    let mut walks = Vec::new();
    let mut origins = Vec::new();
    for (node_walks, v) in per_node {
        for w in node_walks {
            walks.push(w);
            origins.push(v);
        }
    }
    Ok(WalkCorpus { walks, origins })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::community_profile;

    fn graph_from(text: &str) -> Graph {
        Graph::load_edge_list(text.as_bytes()).unwrap()
    }

    #[test]
    fn nrw_lrw_formulas() {
        assert_eq!(nrw(0.0, 10), 10);
        assert_eq!(nrw(0.5, 10), 15);
        assert_eq!(nrw(6.51, 10), 75);
        assert_eq!(lrw(0.0, 80), 80);
        assert_eq!(lrw(1.0, 80), 40);
        assert_eq!(lrw(0.48, 80), 54);
        assert_eq!(lrw(1e9, 80), 1); // floored at 1
    }

    #[test]
    fn uniform_weights_when_p_q_one() {
        let g = graph_from("a b\na c\na d\nb c\n");
        let cfg = WalkConfig::default();
        let w = transition_weights(&g, Some(1), 0, &cfg, &[], &[]);
        assert!(w.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn three_distance_cases() {
        // triangle t-v-x plus pendant y on v; from v with previous t
        let g = graph_from("t v\nt x\nv x\nv y\n");
        let cfg = WalkConfig { p: 0.25, q: 4.0, ..WalkConfig::default() };
        let t = g.node_id("t").unwrap();
        let v = g.node_id("v").unwrap();
        let weights = transition_weights(&g, Some(t), v, &cfg, &[], &[]);
        let neighbors = g.neighbors(v);
        for (&nbr, &w) in neighbors.iter().zip(&weights) {
            match g.label(nbr) {
                "t" => assert_eq!(w, 4.0),
                "x" => assert_eq!(w, 1.0),
                "y" => assert_eq!(w, 0.25),
                other => panic!("unexpected neighbor {other}"),
            }
        }
    }

    #[test]
    fn rwpq_inside_communities_matches_plain() {
        let g = graph_from("a b\nb c\nc a\nc d\nd e\ne f\nf d\n");
        let profile = community_profile(&g, 1.0);
        let plain = WalkConfig { p: 0.5, q: 2.0, ..WalkConfig::default() };
        let rwpq = WalkConfig { variant: WalkVariant::LidRwPq, ..plain.clone() };
        let lids: Vec<f64> = profile.scores.iter().map(|s| s.value).collect();
        // a and b are mutually inside each other's triangle community
        let a = g.node_id("a").unwrap();
        let b = g.node_id("b").unwrap();
        let w_plain = transition_weights(&g, Some(a), b, &plain, &lids, &profile.communities);
        let w_rwpq = transition_weights(&g, Some(a), b, &rwpq, &lids, &profile.communities);
        assert_eq!(w_plain, w_rwpq);
    }

    #[test]
    fn rwpq_penalizes_cross_community_steps() {
        let g = graph_from("a b\nb c\nc a\nc d\nd e\ne f\nf d\n");
        let profile = community_profile(&g, 1.0);
        let mut lids: Vec<f64> = profile.scores.iter().map(|s| s.value).collect();
        let c = g.node_id("c").unwrap();
        let d = g.node_id("d").unwrap();
        let e = g.node_id("e").unwrap();
        lids[c as usize] = 2.0; // force a visible adjustment
        let cfg = WalkConfig { variant: WalkVariant::LidRwPq, ..WalkConfig::default() };
        let w = transition_weights(&g, Some(d), c, &cfg, &lids, &profile.communities);
        let neighbors = g.neighbors(c);
        for (&nbr, &weight) in neighbors.iter().zip(&w) {
            if nbr == d {
                // backtrack candidate: c is outside d's triangle community,
                // so p = p_b + NC-LID(d)
                let expect = 1.0 / (1.0 + lids[d as usize]);
                assert!((weight - expect).abs() < 1e-12);
            }
        }
        // from d after c: e sits at distance 2 from c but inside d's own
        // community, so the q adjustment does not fire (q = q_b = 1)
        let w2 = transition_weights(&g, Some(c), d, &cfg, &lids, &profile.communities);
        let nbrs2 = g.neighbors(d);
        for (&nbr, &weight) in nbrs2.iter().zip(&w2) {
            if nbr == e {
                assert_eq!(weight, 1.0);
            }
        }
    }

    #[test]
    fn corpus_counts_and_adjacency() {
        let g = graph_from("a b\nb c\nc a\nc d\n");
        let cfg = WalkConfig { num_walks: 5, walk_length: 12, ..WalkConfig::default() };
        let corpus = sample_corpus(&g, &cfg, None, None).unwrap();
        assert_eq!(corpus.walks.len(), 5 * g.node_count());
        for (walk, &origin) in corpus.walks.iter().zip(&corpus.origins) {
            assert_eq!(walk[0], origin);
            assert!(walk.len() <= 12);
            for pair in walk.windows(2) {
                assert!(g.has_link(pair[0], pair[1]), "non-adjacent step {pair:?}");
            }
        }
    }

    #[test]
    fn isolated_origin_walks_are_discarded() {
        let g = graph_from("a b\nc c\n");
        let cfg = WalkConfig { num_walks: 3, walk_length: 5, ..WalkConfig::default() };
        let corpus = sample_corpus(&g, &cfg, None, None).unwrap();
        let c = g.node_id("c").unwrap();
        assert!(corpus.origins.iter().all(|&o| o != c));
        assert_eq!(corpus.walks.len(), 6);
    }

    #[test]
    fn same_seed_same_corpus() {
        let g = graph_from("a b\nb c\nc a\nc d\nd e\n");
        let cfg = WalkConfig { seed: 99, ..WalkConfig::default() };
        let c1 = sample_corpus(&g, &cfg, None, None).unwrap();
        let c2 = sample_corpus(&g, &cfg, None, None).unwrap();
        assert_eq!(c1, c2);
    }

    #[test]
    fn zero_lid_corpus_equals_plain() {
        let g = graph_from("a b\nb c\nc a\nc d\nd e\n");
        let profile = community_profile(&g, 1.0);
        let zeros = vec![0.0; g.node_count()];
        let plain = WalkConfig { seed: 7, ..WalkConfig::default() };
        let lid = WalkConfig { variant: WalkVariant::LidRw, ..plain.clone() };
        let c1 = sample_corpus(&g, &plain, None, None).unwrap();
        let c2 = sample_corpus(&g, &lid, Some(&zeros), Some(&profile.communities)).unwrap();
        assert_eq!(c1, c2);
    }

    #[test]
    fn lid_variant_requires_profile() {
        let g = graph_from("a b\n");
        let cfg = WalkConfig { variant: WalkVariant::LidRw, ..WalkConfig::default() };
        assert!(matches!(
            sample_corpus(&g, &cfg, None, None),
            Err(WalkError::MissingProfile(WalkVariant::LidRw))
        ));
    }

    #[test]
    fn lid_rw_walk_counts_follow_nrw() {
        let g = graph_from("a b\nb c\nc a\nc d\nd e\n");
        let profile = community_profile(&g, 1.0);
        let lids: Vec<f64> = profile.scores.iter().map(|s| s.value).collect();
        let cfg = WalkConfig { variant: WalkVariant::LidRw, ..WalkConfig::default() };
        let corpus = sample_corpus(&g, &cfg, Some(&lids), Some(&profile.communities)).unwrap();
        for v in g.node_ids() {
            let expected = nrw(lids[v as usize], cfg.num_walks);
            let got = corpus.origins.iter().filter(|&&o| o == v).count() as u32;
            assert_eq!(got, expected, "node {v}");
            let len = lrw(lids[v as usize], cfg.walk_length);
            for (walk, &o) in corpus.walks.iter().zip(&corpus.origins) {
                if o == v {
                    assert!(walk.len() as u32 <= len);
                }
            }
        }
    }

    #[test]
    fn sentences_format() {
        let g = graph_from("a b\n");
        let corpus = WalkCorpus { walks: vec![vec![0, 1, 0]], origins: vec![0] };
        let mut buf = Vec::new();
        corpus.write_sentences(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a b a\n");
    }
}
