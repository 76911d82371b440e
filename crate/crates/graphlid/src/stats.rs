//! Rank statistics: Spearman correlation, the Mann-Whitney U test with
//! probabilities of superiority, the above/below-mean group split, and
//! degree-distribution skewness.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("input lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {need} values, got {got}")]
    TooFewValues { need: usize, got: usize },
    #[error("constant input: rank correlation undefined")]
    ConstantInput,
    #[error("zero variance: skewness undefined")]
    ZeroVariance,
    #[error("empty sample")]
    EmptySample,
}

/// Mann-Whitney U test result with probabilities of superiority.
///
/// `u_statistic` follows the min convention `min(U_a, U_b)`. `ps_h` is the
/// probability that a random member of the first sample exceeds a random
/// member of the second, `ps_l` the reverse, and `p_e` the probability of a
/// tie; the three sum to 1.
#[derive(Debug, Clone)]
pub struct MwuResult {
    pub u_statistic: f64,
    pub p_value: f64,
    pub accepted: bool,
    pub ps_h: f64,
    pub ps_l: f64,
    pub p_e: f64,
}

/// Combined sample size up to which the exact permutation p-value is used.
pub const EXACT_MWU_LIMIT: usize = 12;

/// Fractional (average) ranks, 1-based; tied values share the mean of the
/// rank positions they span.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("NaN in rank input"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0; // mean of ranks i+1 ..= j
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx == 0.0 || vy == 0.0 {
        None
    } else {
        Some(cov / (vx * vy).sqrt())
    }
}

/// Spearman rank correlation: Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::TooFewValues { need: 3, got: x.len() });
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    pearson(&rx, &ry).ok_or(StatsError::ConstantInput)
}

/// Complementary error function, Chebyshev fit (fractional error < 1.2e-7).
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let ans = t
        * (-z * z - 1.26551223
            + t * (1.00002368
                + t * (0.37409196
                    + t * (0.09678418
                        + t * (-0.18628806
                            + t * (0.27886807
                                + t * (-1.13520398
                                    + t * (1.48851587
                                        + t * (-0.82215223 + t * 0.17087277)))))))))
        .exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

fn u_of_first(a: &[f64], b: &[f64]) -> f64 {
    let mut u = 0.0;
    for &x in a {
        for &y in b {
            if x > y {
                u += 1.0;
            } else if x == y {
                u += 0.5;
            }
        }
    }
    u
}

/// Two-sided normal-approximation p-value with tie correction and
/// continuity correction. Exposed for the approximation-quality suites.
pub fn mwu_normal_p(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let n = na + nb;
    let mu = na * nb / 2.0;
    let ua = u_of_first(a, b);

    let mut pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    pooled.sort_by(|x, y| x.partial_cmp(y).expect("NaN in MWU input"));
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j < pooled.len() && pooled[j] == pooled[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let d = ((ua - mu).abs() - 0.5).max(0.0);
    (2.0 * normal_cdf(-d / var.sqrt())).min(1.0)
}

/// Exact two-sided permutation p-value: the probability, over all
/// reassignments of the pooled values, of a U at least as far from its mean
/// as observed. Exposed for the approximation-quality suites.
pub fn mwu_exact_p(a: &[f64], b: &[f64]) -> f64 {
    let na = a.len();
    let n = na + b.len();
    let mu = (na * b.len()) as f64 / 2.0;
    let pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let d_obs = (u_of_first(a, b) - mu).abs();

    let mut extreme = 0u64;
    let mut total = 0u64;
    let mut pick: Vec<usize> = (0..na).collect();
    loop {
        let sa: Vec<f64> = pick.iter().map(|&i| pooled[i]).collect();
        let mut in_a = vec![false; n];
        for &i in &pick {
            in_a[i] = true;
        }
        let sb: Vec<f64> = (0..n).filter(|&i| !in_a[i]).map(|i| pooled[i]).collect();
        total += 1;
        if (u_of_first(&sa, &sb) - mu).abs() >= d_obs - 1e-12 {
            extreme += 1;
        }
        // next combination of indices
        let mut k = na;
        loop {
            if k == 0 {
                return extreme as f64 / total as f64;
            }
            k -= 1;
            if pick[k] != k + n - na {
                break;
            }
        }
        pick[k] += 1;
        for j in k + 1..na {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

/// Mann-Whitney U test of stochastic equality between two samples.
///
/// Uses the exact permutation distribution when the combined size is at most
/// [`EXACT_MWU_LIMIT`], otherwise the tie- and continuity-corrected normal
/// approximation. `accepted` reflects the p > 0.05 null-retention rule.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MwuResult, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let pairs = (a.len() * b.len()) as f64;
    let mut wins_a = 0.0f64;
    let mut wins_b = 0.0f64;
    let mut equals = 0.0f64;
    for &x in a {
        for &y in b {
            if x > y {
                wins_a += 1.0;
            } else if x < y {
                wins_b += 1.0;
            } else {
                equals += 1.0;
            }
        }
    }
    let u_a = wins_a + 0.5 * equals;
    let u_b = wins_b + 0.5 * equals;
    let p_value = if a.len() + b.len() <= EXACT_MWU_LIMIT {
        mwu_exact_p(a, b)
    } else {
        mwu_normal_p(a, b)
    };
    Ok(MwuResult {
        u_statistic: u_a.min(u_b),
        p_value,
        accepted: p_value > 0.05,
        ps_h: wins_a / pairs,
        ps_l: wins_b / pairs,
        p_e: equals / pairs,
    })
}

/// Indices with value strictly above the mean (`H`) and the complement (`L`).
pub fn split_by_mean(scores: &[f64]) -> (Vec<usize>, Vec<usize>) {
    if scores.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    let mut high = Vec::new();
    let mut low = Vec::new();
    for (i, &s) in scores.iter().enumerate() {
        if s > mean {
            high.push(i);
        } else {
            low.push(i);
        }
    }
    (high, low)
}

/// Biased Fisher-Pearson sample skewness g1 = m3 / m2^{3/2}.
pub fn skewness(xs: &[f64]) -> Result<f64, StatsError> {
    if xs.len() < 3 {
        return Err(StatsError::TooFewValues { need: 3, got: xs.len() });
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    if m2 == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok(m3 / m2.powf(1.5))
}
