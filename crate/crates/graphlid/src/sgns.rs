//! Skip-gram with negative sampling: turns a walk corpus into node vectors.
//!
//! For every (center, context) pair inside a dynamically shrunk window the
//! trainer ascends `log s(u_o . v_c) + sum_neg log s(-u_n . v_c)`, with
//! negatives drawn from the corpus unigram distribution raised to 0.75. The
//! learning rate decays linearly over the total pair count from `lr_initial`
//! down to `lr_initial / 1e4`.
//!
//! Two execution modes:
//! - deterministic: sequential, exact sigmoid, bit-reproducible for a seed;
//! - parallel: sentences sharded across threads updating the shared
//!   matrices without locks (lost updates tolerated), sigmoid via a 512-entry
//!   interpolated table, non-deterministic.
//!
//! Window and negative draws come from counter-based streams keyed by
//! `(seed, epoch, sentence)`, so the pair schedule itself is identical in
//! both modes and the linear decay horizon can be computed exactly upfront.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use std::cell::UnsafeCell;
use std::io::{self, BufRead, Write};
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

use crate::graph::Graph;
use crate::rng::SplitMix64;
use crate::walks::WalkCorpus;

#[derive(Debug, Error)]
pub enum SgnsError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("corpus token {0} out of range for vocabulary of {1}")]
    TokenOutOfRange(u32, usize),
    #[error("malformed embedding file: {0}")]
    MalformedFile(String),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

/// Training hyperparameters.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub lr_initial: f64,
    pub seed: u64,
    pub deterministic: bool,
    /// Worker threads in parallel mode; 0 uses the rayon default.
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 100,
            window: 10,
            negatives: 5,
            epochs: 5,
            lr_initial: 0.0375,
            seed: 1,
            deterministic: true,
            threads: 0,
        }
    }
}

/// Node embedding: one input vector per node (the published embedding) plus
/// the output (context) vectors used during training. Nodes absent from the
/// corpus keep their initialization row and are flagged.
#[derive(Debug, Clone)]
pub struct Embedding {
    dim: usize,
    labels: Vec<String>,
    input: Vec<f32>,
    output: Vec<f32>,
    untrained: Vec<bool>,
}

impl Embedding {
    pub fn from_vectors(labels: Vec<String>, dim: usize, input: Vec<f32>) -> Embedding {
        assert_eq!(labels.len() * dim, input.len());
        let n = labels.len();
        Embedding { dim, labels, input, output: vec![0.0; n * dim], untrained: vec![false; n] }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Published (input) vector of a node.
    pub fn vector(&self, v: u32) -> &[f32] {
        let i = v as usize * self.dim;
        &self.input[i..i + self.dim]
    }

    /// Context-side vector, training internals.
    pub fn output_vector(&self, v: u32) -> &[f32] {
        let i = v as usize * self.dim;
        &self.output[i..i + self.dim]
    }

    pub fn is_untrained(&self, v: u32) -> bool {
        self.untrained[v as usize]
    }

    pub fn squared_distance(&self, a: u32, b: u32) -> f64 {
        let va = self.vector(a);
        let vb = self.vector(b);
        va.iter()
            .zip(vb)
            .map(|(&x, &y)| {
                let d = x as f64 - y as f64;
                d * d
            })
            .sum()
    }

    pub fn cosine(&self, a: u32, b: u32) -> f64 {
        cosine(self.vector(a), self.vector(b))
    }

    /// word2vec text format: header `N d`, then one `label v1 .. vd` row per
    /// node with 6 significant digits.
    pub fn write_word2vec<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{} {}", self.node_count(), self.dim)?;
        for v in 0..self.node_count() as u32 {
            w.write_all(self.labels[v as usize].as_bytes())?;
            for &x in self.vector(v) {
                write!(w, " {}", format_significant(x as f64, 6))?;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_word2vec<R: BufRead>(reader: R) -> Result<Embedding, SgnsError> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| SgnsError::MalformedFile("missing header".into()))??;
        let mut parts = header.split_whitespace();
        let n: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| SgnsError::MalformedFile("bad node count in header".into()))?;
        let dim: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| SgnsError::MalformedFile("bad dimension in header".into()))?;
        let mut labels = Vec::with_capacity(n);
        let mut input = Vec::with_capacity(n * dim);
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let label = tokens
                .next()
                .ok_or_else(|| SgnsError::MalformedFile(format!("row {}: empty", i + 2)))?;
            labels.push(label.to_string());
            let mut count = 0;
            for t in tokens {
                let x: f64 = t
                    .parse()
                    .map_err(|_| SgnsError::MalformedFile(format!("row {}: bad float '{t}'", i + 2)))?;
                input.push(x as f32);
                count += 1;
            }
            if count != dim {
                return Err(SgnsError::MalformedFile(format!(
                    "row {}: expected {dim} values, found {count}",
                    i + 2
                )));
            }
        }
        if labels.len() != n {
            return Err(SgnsError::MalformedFile(format!(
                "expected {n} rows, found {}",
                labels.len()
            )));
        }
        Ok(Embedding::from_vectors(labels, dim, input))
    }
}

pub fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let mut dot = 0.0f64;
    let mut na = 0.0f64;
    let mut nb = 0.0f64;
    for (&x, &y) in a.iter().zip(b) {
        dot += x as f64 * y as f64;
        na += x as f64 * x as f64;
        nb += y as f64 * y as f64;
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb).sqrt()
    }
}

/// Format with a fixed number of significant digits, plain decimal notation
/// for ordinary magnitudes.
fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=14).contains(&exp) {
        return format!("{:.*e}", digits - 1, x);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Per-epoch mean pair loss and schedule bookkeeping from a training run.
#[derive(Debug, Clone)]
pub struct TrainStats {
    pub epoch_loss: Vec<f64>,
    pub total_pairs: u64,
}

/// Analytic SGNS gradients for one positive pair plus negatives, written for
/// the loss `L = -ln s(c.o) - sum_n ln s(-c.n)` (to be descended).
#[derive(Debug, Clone)]
pub struct SgnsGradients {
    pub center: Vec<f64>,
    pub context: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

fn sigmoid_exact(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn sgns_loss(center: &[f64], context: &[f64], negatives: &[Vec<f64>]) -> f64 {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut loss = -sigmoid_exact(dot(center, context)).ln();
    for n in negatives {
        loss -= sigmoid_exact(-dot(center, n)).ln();
    }
    loss
}

pub fn sgns_gradient(center: &[f64], context: &[f64], negatives: &[Vec<f64>]) -> SgnsGradients {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let d = center.len();
    let g_pos = 1.0 - sigmoid_exact(dot(center, context));
    let mut grad_center: Vec<f64> = context.iter().map(|&o| -g_pos * o).collect();
    let grad_context: Vec<f64> = center.iter().map(|&c| -g_pos * c).collect();
    let mut grad_negatives = Vec::with_capacity(negatives.len());
    for n in negatives {
        let g_neg = sigmoid_exact(dot(center, n));
        for i in 0..d {
            grad_center[i] += g_neg * n[i];
        }
        grad_negatives.push(center.iter().map(|&c| g_neg * c).collect());
    }
    SgnsGradients { center: grad_center, context: grad_context, negatives: grad_negatives }
}

const SIGMOID_TABLE_SIZE: usize = 512;
const SIGMOID_MAX: f64 = 6.0;

/// Sigmoid via a 512-entry interpolated table over [-6, 6]; parallel mode.
struct SigmoidTable {
    table: Vec<f32>,
}

impl SigmoidTable {
    fn new() -> Self {
        let table = (0..=SIGMOID_TABLE_SIZE)
            .map(|i| {
                let x = -SIGMOID_MAX + 2.0 * SIGMOID_MAX * i as f64 / SIGMOID_TABLE_SIZE as f64;
                sigmoid_exact(x) as f32
            })
            .collect();
        SigmoidTable { table }
    }

    #[inline]
    fn get(&self, x: f32) -> f32 {
        if x >= SIGMOID_MAX as f32 {
            return 1.0;
        }
        if x <= -(SIGMOID_MAX as f32) {
            return 0.0;
        }
        let pos = (x as f64 + SIGMOID_MAX) / (2.0 * SIGMOID_MAX) * SIGMOID_TABLE_SIZE as f64;
        let idx = pos as usize;
        let frac = (pos - idx as f64) as f32;
        self.table[idx] + frac * (self.table[idx + 1] - self.table[idx])
    }
}

#[inline]
fn sigmoid_exact_f32(x: f32) -> f32 {
    (1.0 / (1.0 + (-(x as f64)).exp())) as f32
}

/// Negative-sampling distribution: unigram counts raised to 0.75, drawn from
/// a flat word2vec-style table (one random access per sample).
struct NegativeSampler {
    table: Vec<u32>,
}

impl NegativeSampler {
    fn new(counts: &[u64]) -> Self {
        let weights: Vec<(u32, f64)> = counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(v, &c)| (v as u32, (c as f64).powf(0.75)))
            .collect();
        let total: f64 = weights.iter().map(|(_, w)| w).sum();
        // large enough that quantization error is ~1e-5 per node
        let size = (weights.len() * 1000).clamp(1 << 14, 1 << 20);
        let mut table = Vec::with_capacity(size);
        let mut acc = 0.0;
        let mut filled = 0usize;
        for &(v, w) in &weights {
            acc += w;
            let upto = ((acc / total) * size as f64).round() as usize;
            while filled < upto.min(size) {
                table.push(v);
                filled += 1;
            }
        }
        while filled < size {
            table.push(weights.last().expect("nonempty corpus").0);
            filled += 1;
        }
        NegativeSampler { table }
    }

    #[inline]
    fn sample(&self, rng: &mut SplitMix64) -> u32 {
        self.table[rng.next_range(self.table.len() as u64) as usize]
    }
}

/// Shared embedding matrix for lock-free parallel updates. Workers write
/// concurrently without synchronization; lost updates are acceptable by the
/// hogwild contract.
struct SharedMatrix {
    data: UnsafeCell<Vec<f32>>,
}

unsafe impl Sync for SharedMatrix {}

impl SharedMatrix {
    fn new(data: Vec<f32>) -> Self {
        SharedMatrix { data: UnsafeCell::new(data) }
    }

    #[allow(clippy::mut_from_ref)]
    #[inline]
    unsafe fn row(&self, v: u32, dim: usize) -> &mut [f32] {
        let vec = &mut *self.data.get();
        let i = v as usize * dim;
        &mut vec[i..i + dim]
    }

    fn into_inner(self) -> Vec<f32> {
        self.data.into_inner()
    }
}

fn window_stream(seed: u64, epoch: usize, sentence: usize) -> SplitMix64 {
    SplitMix64::stream(seed, &[0x51d0, epoch as u64, sentence as u64])
}

fn negative_stream(seed: u64, epoch: usize, sentence: usize) -> SplitMix64 {
    SplitMix64::stream(seed, &[0x0ec5, epoch as u64, sentence as u64])
}

/// Replays the window-size streams to count the exact number of training
/// pairs, which fixes the horizon of the linear learning-rate schedule.
fn count_pairs(corpus: &WalkCorpus, cfg: &TrainConfig) -> u64 {
    let mut total = 0u64;
    for epoch in 0..cfg.epochs {
        for (s, walk) in corpus.walks.iter().enumerate() {
            let mut wrng = window_stream(cfg.seed, epoch, s);
            let len = walk.len() as i64;
            for i in 0..len {
                let radius = 1 + wrng.next_range(cfg.window as u64) as i64;
                let lo = (i - radius).max(0);
                let hi = (i + radius).min(len - 1);
                total += (hi - lo) as u64; // excludes the center itself
            }
        }
    }
    total.max(1)
}

/// Train node vectors from a walk corpus. The graph supplies the vocabulary
/// (all nodes) and labels; corpus tokens must be valid node ids.
pub fn train(corpus: &WalkCorpus, cfg: &TrainConfig, g: &Graph) -> Result<Embedding, SgnsError> {
    train_with_stats(corpus, cfg, g).map(|(e, _)| e)
}

pub fn train_with_stats(
    corpus: &WalkCorpus,
    cfg: &TrainConfig,
    g: &Graph,
) -> Result<(Embedding, TrainStats), SgnsError> {
    if corpus.walks.is_empty() {
        return Err(SgnsError::EmptyCorpus);
    }
    let n = g.node_count();
    let dim = cfg.dim;

    let mut counts = vec![0u64; n];
    for walk in &corpus.walks {
        for &t in walk {
            if t as usize >= n {
                return Err(SgnsError::TokenOutOfRange(t, n));
            }
            counts[t as usize] += 1;
        }
    }
    let sampler = NegativeSampler::new(&counts);

    // input rows uniform in (-0.5/d, 0.5/d), output rows zero
    let mut input = vec![0.0f32; n * dim];
    for v in 0..n {
        let mut rng = SplitMix64::stream(cfg.seed, &[0xe11b, v as u64]);
        for x in &mut input[v * dim..(v + 1) * dim] {
            *x = ((rng.next_f64() - 0.5) / dim as f64) as f32;
        }
    }
    let output = vec![0.0f32; n * dim];

    let total_pairs = count_pairs(corpus, cfg);
    let lr_floor = cfg.lr_initial / 1e4;

    let input = SharedMatrix::new(input);
    let output = SharedMatrix::new(output);
    let pair_counter = AtomicU64::new(0);
    let table = SigmoidTable::new();
    let mut epoch_loss = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        let (loss_sum, pairs); // summed pair loss and pair count this epoch
        if cfg.deterministic {
            let mut acc = (0.0f64, 0u64);
            for s in 0..corpus.walks.len() {
                let (l, p) = train_sentence(
                    corpus, cfg, &input, &output, &sampler, None, &pair_counter,
                    total_pairs, lr_floor, epoch, s,
                );
                acc.0 += l;
                acc.1 += p;
            }
            (loss_sum, pairs) = acc;
        } else {
            #[cfg(feature = "parallel")]
            {
                let run = || {
                    (0..corpus.walks.len())
                        .into_par_iter()
                        .map(|s| {
                            train_sentence(
                                corpus, cfg, &input, &output, &sampler, Some(&table),
                                &pair_counter, total_pairs, lr_floor, epoch, s,
                            )
                        })
                        .reduce(|| (0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
                };
                (loss_sum, pairs) = if cfg.threads > 0 {
                    rayon::ThreadPoolBuilder::new()
                        .num_threads(cfg.threads)
                        .build()
                        .expect("thread pool")
                        .install(run)
                } else {
                    run()
                };
            }
            #[cfg(not(feature = "parallel"))]
            {
                // single-threaded build: same table-sigmoid path, sequential
                let mut acc = (0.0f64, 0u64);
                for s in 0..corpus.walks.len() {
                    let (l, p) = train_sentence(
                        corpus, cfg, &input, &output, &sampler, Some(&table),
                        &pair_counter, total_pairs, lr_floor, epoch, s,
                    );
                    acc.0 += l;
                    acc.1 += p;
                }
                (loss_sum, pairs) = acc;
            }
        }
        epoch_loss.push(loss_sum / pairs.max(1) as f64);
    }

    let untrained: Vec<bool> = counts.iter().map(|&c| c == 0).collect();
    let embedding = Embedding {
        dim,
        labels: g.labels().to_vec(),
        input: input.into_inner(),
        output: output.into_inner(),
        untrained,
    };
    Ok((embedding, TrainStats { epoch_loss, total_pairs }))
}

#[allow(clippy::too_many_arguments)]
fn train_sentence(
    corpus: &WalkCorpus,
    cfg: &TrainConfig,
    input: &SharedMatrix,
    output: &SharedMatrix,
    sampler: &NegativeSampler,
    table: Option<&SigmoidTable>,
    pair_counter: &AtomicU64,
    total_pairs: u64,
    lr_floor: f64,
    epoch: usize,
    sentence: usize,
) -> (f64, u64) {
    let dim = cfg.dim;
    let walk = &corpus.walks[sentence];
    let mut wrng = window_stream(cfg.seed, epoch, sentence);
    let mut nrng = negative_stream(cfg.seed, epoch, sentence);
    let mut acc = vec![0.0f32; dim];
    let mut loss_sum = 0.0f64;
    let mut pair_count = 0u64;

    match table {
        Some(t) => {
            let sig = |x: f32| t.get(x);
            train_walk_loop(
                walk, cfg, input, output, sampler, pair_counter, total_pairs, lr_floor,
                &mut wrng, &mut nrng, &mut acc, &mut loss_sum, &mut pair_count, sig,
            );
        }
        None => train_walk_loop(
            walk, cfg, input, output, sampler, pair_counter, total_pairs, lr_floor,
            &mut wrng, &mut nrng, &mut acc, &mut loss_sum, &mut pair_count,
            sigmoid_exact_f32,
        ),
    }
    (loss_sum, pair_count)
}

/// Dot product with eight independent accumulators: breaks the serial
/// floating-point dependency chain so the loop vectorizes.
#[inline(always)]
fn dot_f32(a: &[f32], b: &[f32]) -> f32 {
    let mut acc = [0.0f32; 8];
    let chunks_a = a.chunks_exact(8);
    let chunks_b = b.chunks_exact(8);
    let tail_a = chunks_a.remainder();
    let tail_b = chunks_b.remainder();
    for (xa, xb) in chunks_a.zip(chunks_b) {
        for k in 0..8 {
            acc[k] += xa[k] * xb[k];
        }
    }
    let mut tail = 0.0f32;
    for (x, y) in tail_a.iter().zip(tail_b) {
        tail += x * y;
    }
    acc.iter().sum::<f32>() + tail
}

/// y += g * x over f32 slices.
#[inline(always)]
fn axpy_f32(g: f32, x: &[f32], y: &mut [f32]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += g * *xi;
    }
}

#[allow(clippy::too_many_arguments)]
fn train_walk_loop<S: Fn(f32) -> f32>(
    walk: &[u32],
    cfg: &TrainConfig,
    input: &SharedMatrix,
    output: &SharedMatrix,
    sampler: &NegativeSampler,
    pair_counter: &AtomicU64,
    total_pairs: u64,
    lr_floor: f64,
    wrng: &mut SplitMix64,
    nrng: &mut SplitMix64,
    acc: &mut [f32],
    loss_sum: &mut f64,
    pair_count: &mut u64,
    sig: S,
) {
    let dim = cfg.dim;
    let mut center_buf = vec![0.0f32; dim];
    let len = walk.len() as i64;
    for i in 0..len {
        let radius = 1 + wrng.next_range(cfg.window as u64) as i64;
        let center = walk[i as usize];
        let lo = (i - radius).max(0);
        let hi = (i + radius).min(len - 1);
        for j in lo..=hi {
            if j == i {
                continue;
            }
            let context = walk[j as usize];
            *pair_count += 1;
            let t = pair_counter.fetch_add(1, Ordering::Relaxed);
            let lr = (cfg.lr_initial
                + (lr_floor - cfg.lr_initial) * (t as f64 / total_pairs as f64))
                .max(lr_floor) as f32;

            // SAFETY: rows may be written concurrently in parallel mode;
            // the hogwild contract tolerates the races. The center row is
            // snapshotted so the inner loops run on provably disjoint
            // buffers.
            let v_c = unsafe { input.row(center, dim) };
            center_buf.copy_from_slice(v_c);
            acc.iter_mut().for_each(|a| *a = 0.0);

            let u_o = unsafe { output.row(context, dim) };
            let s = sig(dot_f32(&center_buf, u_o));
            *loss_sum += -((s as f64).max(1e-12).ln());
            let gp = (1.0 - s) * lr;
            axpy_f32(gp, u_o, acc);
            axpy_f32(gp, &center_buf, u_o);

            for _ in 0..cfg.negatives {
                let neg = sampler.sample(nrng);
                if neg == context {
                    continue; // never push the positive target away
                }
                let u_n = unsafe { output.row(neg, dim) };
                let sn = sig(dot_f32(&center_buf, u_n));
                *loss_sum += -(((1.0 - sn) as f64).max(1e-12).ln());
                let gn = -sn * lr;
                axpy_f32(gn, u_n, acc);
                axpy_f32(gn, &center_buf, u_n);
            }

            axpy_f32(1.0, acc, v_c);
        }
    }
}
