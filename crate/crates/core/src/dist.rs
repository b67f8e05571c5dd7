//! Finite probability mass functions on the non-negative integers.
//!
//! A [`Pmf`] stores the masses at `0..=N` together with the mass that was
//! deliberately left out when an infinite-support law (Poisson, zero-inflated
//! Poisson) was truncated. Stored masses always sum to `1 - omitted`; the
//! omitted mass is never folded back in by renormalizing, and distances
//! computed from truncated laws carry it as an explicit error term.

use serde::{Serialize, Serializer};
use statrs::function::factorial::{ln_binomial, ln_factorial};

use crate::error::{check_positive, Error, Result};

/// Normalization tolerance for constructed distributions.
pub const NORM_TOL: f64 = 1e-12;

/// How far into the tail an infinite-support law is expanded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub tail_epsilon: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { tail_epsilon: 1e-12 }
    }
}

impl TruncationPolicy {
    pub fn new(tail_epsilon: f64) -> Result<Self> {
        if tail_epsilon.is_finite() && tail_epsilon > 0.0 && tail_epsilon < 1.0 {
            Ok(TruncationPolicy { tail_epsilon })
        } else {
            Err(Error::param(
                "tail_epsilon",
                format!("must lie in (0, 1), got {tail_epsilon}"),
            ))
        }
    }
}

/// Probability mass function with support in `0..=cap()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
    omitted: f64,
}

impl Serialize for Pmf {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.probs.serialize(s)
    }
}

impl Pmf {
    /// Normalizes non-negative weights into a distribution, trimming
    /// trailing zeros.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::InvalidWeights(format!(
                "weight {i} is {w}; weights must be finite and >= 0"
            )));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidWeights("all weights are zero".into()));
        }
        Ok(Self::assemble(weights.iter().map(|w| w / total).collect(), 0.0))
    }

    /// Builds a law from masses that already account for `omitted` tail mass.
    /// Masses are rescaled so they sum to exactly `1 - omitted`.
    pub(crate) fn assemble(mut probs: Vec<f64>, omitted: f64) -> Self {
        while probs.len() > 1 && probs.last() == Some(&0.0) {
            probs.pop();
        }
        if probs.is_empty() {
            probs.push(1.0);
        }
        let omitted = omitted.clamp(0.0, 1.0);
        let total: f64 = probs.iter().sum();
        if total > 0.0 {
            let scale = (1.0 - omitted) / total;
            for p in probs.iter_mut() {
                *p *= scale;
            }
        }
        Pmf { probs, omitted }
    }

    pub fn point(k: usize) -> Self {
        let mut probs = vec![0.0; k + 1];
        probs[k] = 1.0;
        Pmf {
            probs,
            omitted: 0.0,
        }
    }

    pub fn bernoulli(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::param("q", format!("must lie in [0, 1], got {q}")));
        }
        Ok(Self::assemble(vec![1.0 - q, q], 0.0))
    }

    pub fn binomial(n: u64, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::param("q", format!("must lie in [0, 1], got {q}")));
        }
        if q == 0.0 {
            return Ok(Self::point(0));
        }
        if q == 1.0 {
            return Ok(Self::point(n as usize));
        }
        let (lq, lr) = (q.ln(), (-q).ln_1p());
        let probs = (0..=n)
            .map(|k| (ln_binomial(n, k) + k as f64 * lq + (n - k) as f64 * lr).exp())
            .collect();
        Ok(Self::assemble(probs, 0.0))
    }

    /// Truncated Poisson law. The cap is the smallest `N` whose upper tail
    /// beyond `N` is at most `policy.tail_epsilon`; that tail is recorded as
    /// omitted mass.
    pub fn poisson(lambda: f64, policy: TruncationPolicy) -> Result<Self> {
        check_positive("lambda", lambda)?;
        let eps = policy.tail_epsilon;
        let ln_lambda = lambda.ln();
        let term = |j: u64| (j as f64 * ln_lambda - lambda - ln_factorial(j)).exp();

        let mut terms = Vec::new();
        let mut j = 0u64;
        let remainder = loop {
            let t = term(j);
            terms.push(t);
            let ratio = lambda / (j + 1) as f64;
            if (j as f64) >= lambda && ratio < 0.5 {
                // geometric bound on everything past the last generated term
                let rem = t * ratio / (1.0 - ratio);
                if rem < eps * 1e-6 {
                    break rem;
                }
            }
            j += 1;
        };

        // suffix[i] = mass strictly above index i-1
        let mut suffix = vec![0.0; terms.len() + 1];
        suffix[terms.len()] = remainder;
        for i in (0..terms.len()).rev() {
            suffix[i] = suffix[i + 1] + terms[i];
        }
        let cap = (0..terms.len())
            .find(|&n| suffix[n + 1] <= eps)
            .unwrap_or(terms.len() - 1);
        terms.truncate(cap + 1);
        Ok(Pmf {
            probs: terms,
            omitted: suffix[cap + 1],
        })
    }

    /// Masses at `0..=cap()`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Largest stored support index.
    pub fn cap(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn mass(&self, j: usize) -> f64 {
        self.probs.get(j).copied().unwrap_or(0.0)
    }

    /// Tail mass dropped by truncation (0 for exact laws).
    pub fn omitted_mass(&self) -> f64 {
        self.omitted
    }

    pub fn is_truncated(&self) -> bool {
        self.omitted > 0.0
    }

    /// Smallest index carrying positive mass.
    pub fn min_support(&self) -> usize {
        self.probs.iter().position(|&p| p > 0.0).unwrap_or(0)
    }

    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(j, p)| j as f64 * p)
            .sum()
    }

    /// `(mean, variance)`; a variance within `NORM_TOL` below zero is
    /// clamped to zero.
    pub fn moments(&self) -> (f64, f64) {
        let mean = self.mean();
        let var: f64 = self
            .probs
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let d = j as f64 - mean;
                d * d * p
            })
            .sum();
        let var = if var < 0.0 && var >= -NORM_TOL { 0.0 } else { var };
        (mean, var)
    }

    pub fn variance(&self) -> f64 {
        self.moments().1
    }

    /// `P(Y >= k)`, including any omitted tail mass.
    pub fn upper_tail(&self, k: usize) -> f64 {
        if k > self.cap() {
            return self.omitted;
        }
        self.probs[k..].iter().sum::<f64>() + self.omitted
    }

    /// `tails[k] = P(Y >= k)` for `k` in `0..=cap()+1`.
    pub fn upper_tails(&self) -> Vec<f64> {
        let mut tails = vec![self.omitted; self.probs.len() + 1];
        for k in (0..self.probs.len()).rev() {
            tails[k] = tails[k + 1] + self.probs[k];
        }
        tails
    }

    /// `P(Y <= k)` over stored mass.
    pub fn cdf(&self, k: usize) -> f64 {
        self.probs.iter().take(k + 1).sum()
    }

    /// Law of the sum of independent draws from `self` and `other`.
    pub fn convolve(&self, other: &Pmf) -> Pmf {
        let mut out = vec![0.0; self.probs.len() + other.probs.len() - 1];
        for (i, &a) in self.probs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.probs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        let omitted = self.omitted + other.omitted - self.omitted * other.omitted;
        Pmf::assemble(out, omitted)
    }

    /// Size-biased law `P(Y* = j) = j P(Y = j) / E Y`.
    ///
    /// For a truncated law the omitted mass `w` sits at indices above the
    /// cap `N`, so it contributes at least `(N + 1) w` to the mean. That
    /// smallest admissible contribution is used both in `E Y` and as the
    /// omitted mass of `Y*`.
    pub fn size_bias(&self) -> Result<Pmf> {
        let stored = self.mean();
        let tail = (self.cap() + 1) as f64 * self.omitted;
        let mean = stored + tail;
        if mean <= 0.0 {
            return Err(Error::ZeroMean);
        }
        let probs = self
            .probs
            .iter()
            .enumerate()
            .map(|(j, p)| j as f64 * p / mean)
            .collect();
        Ok(Pmf::assemble(probs, tail / mean))
    }

    /// Law of `Y + k`.
    pub fn shift(&self, k: usize) -> Pmf {
        let mut probs = vec![0.0; k];
        probs.extend_from_slice(&self.probs);
        Pmf {
            probs,
            omitted: self.omitted,
        }
    }

    /// Law of `xi * Y` with `xi ~ Be(q)` independent of `Y`.
    pub fn thin(&self, q: f64) -> Result<Pmf> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::param("q", format!("must lie in [0, 1], got {q}")));
        }
        mixture(q, self, &Pmf::point(0))
    }

    /// `E f(Y)` over stored mass.
    pub fn expect(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.probs.iter().enumerate().map(|(j, p)| f(j) * p).sum()
    }
}

/// `w * a + (1 - w) * b`.
pub fn mixture(w: f64, a: &Pmf, b: &Pmf) -> Result<Pmf> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::param("w", format!("must lie in [0, 1], got {w}")));
    }
    let len = a.probs.len().max(b.probs.len());
    let probs = (0..len)
        .map(|j| w * a.mass(j) + (1.0 - w) * b.mass(j))
        .collect();
    Ok(Pmf::assemble(probs, w * a.omitted + (1.0 - w) * b.omitted))
}

/// Total variation distance with a certified allowance for truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvDistance {
    /// Half the L1 distance over the stored masses.
    pub value: f64,
    /// Omitted tail mass of both inputs; the true distance lies within
    /// `value + error`.
    pub error: f64,
}

impl TvDistance {
    pub fn upper(&self) -> f64 {
        (self.value + self.error).min(1.0)
    }
}

pub fn tv_distance(a: &Pmf, b: &Pmf) -> TvDistance {
    let len = a.probs.len().max(b.probs.len());
    let l1: f64 = (0..len).map(|j| (a.mass(j) - b.mass(j)).abs()).sum();
    TvDistance {
        value: (0.5 * l1).clamp(0.0, 1.0),
        error: a.omitted + b.omitted,
    }
}

/// Standard normal distribution function.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Kolmogorov distance between the law of `(Y - mu) / sigma` and N(0, 1).
///
/// The supremum over thresholds is attained at an atom, either at the CDF
/// value or at its left limit, so both are inspected at every atom.
pub fn kolmogorov_to_std_normal(d: &Pmf, mu: f64, sigma: f64) -> Result<f64> {
    check_positive("sigma", sigma)?;
    if !mu.is_finite() {
        return Err(Error::param("mu", "must be finite"));
    }
    let mut below = 0.0;
    let mut sup: f64 = 0.0;
    for (j, &p) in d.probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let phi = std_normal_cdf((j as f64 - mu) / sigma);
        let at = below + p;
        sup = sup.max((below - phi).abs()).max((at - phi).abs());
        below = at;
    }
    // mass escaping to +infinity through truncation
    Ok(sup.max(d.omitted))
}

/// Hazard rates `h(j) = P(Y = j) / P(Y >= j)` and their infimum over atoms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureRate {
    /// `h(j)` for `j` in `0..=cap()`; zero at points without mass.
    pub h: Vec<f64>,
    /// Infimum of `h` over points carrying positive mass.
    pub h_star: f64,
}

pub fn failure_rate(d: &Pmf) -> FailureRate {
    let tails = d.upper_tails();
    let h: Vec<f64> = d
        .probs
        .iter()
        .enumerate()
        .map(|(j, &p)| if p > 0.0 { p / tails[j] } else { 0.0 })
        .collect();
    let h_star = h
        .iter()
        .zip(&d.probs)
        .filter(|(_, &p)| p > 0.0)
        .map(|(&h, _)| h)
        .fold(f64::INFINITY, f64::min);
    FailureRate { h, h_star }
}

/// Largest `c` with `P(k)/P(k+1) - P(k-1)/P(k) >= c` for every `k >= 0`
/// (with `P(-1) = 0`). Non-positive results mean the law is not
/// c-log-concave for any positive `c`. Returns infinity for `δ_0`, where no
/// ratio is defined.
pub fn c_log_concavity(d: &Pmf) -> Result<f64> {
    let s = d.min_support();
    let n = d.cap();
    if let Some(at) = (s..=n).find(|&j| d.probs[j] == 0.0) {
        return Err(Error::GappedSupport { at });
    }
    // Leading zeros make the k = s-1 term 0/P(s) - 0/0, read as 0.
    let mut c = if s > 0 { 0.0 } else { f64::INFINITY };
    for k in s..n {
        let fwd = d.probs[k] / d.probs[k + 1];
        let back = if k > s { d.probs[k - 1] / d.probs[k] } else { 0.0 };
        c = c.min(fwd - back);
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderCheck {
    /// `a >=_st b` within `NORM_TOL`.
    pub dominates: bool,
    /// `max_k (P(b >= k) - P(a >= k))^+`.
    pub max_violation: f64,
}

/// Checks the usual stochastic ordering `a >=_st b` through upper tails.
/// Omitted mass of a truncated law is treated as sitting just past its cap.
pub fn stochastic_order_check(a: &Pmf, b: &Pmf) -> OrderCheck {
    let len = a.probs.len().max(b.probs.len()) + 1;
    let (ta, tb) = (a.upper_tails(), b.upper_tails());
    let tail = |t: &[f64], k: usize| t.get(k).copied().unwrap_or(0.0);
    let max_violation = (0..len)
        .map(|k| tail(&tb, k) - tail(&ta, k))
        .fold(0.0f64, f64::max);
    OrderCheck {
        dominates: max_violation <= NORM_TOL,
        max_violation,
    }
}

pub fn upper_tail(d: &Pmf, k: usize) -> f64 {
    d.upper_tail(k)
}

pub fn make_pmf(weights: &[f64]) -> Result<Pmf> {
    Pmf::from_weights(weights)
}

pub fn poisson_pmf(lambda: f64, policy: TruncationPolicy) -> Result<Pmf> {
    Pmf::poisson(lambda, policy)
}
