//! Poisson total-variation bounds, each reported as an itemized
//! [`BoundBreakdown`].
//!
//! Every term already carries the common `1 - e^{-λ}` prefactor, so the
//! total is the plain sum of the terms. Bounds larger than one are reported
//! as computed and flagged `vacuous`.

use serde::Serialize;

use crate::dist::Pmf;
use crate::error::{check_non_negative, check_positive, check_unit_open_closed, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundTerm {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundBreakdown {
    pub terms: Vec<BoundTerm>,
    pub total: f64,
    pub lambda_used: f64,
    pub p_used: f64,
    pub vacuous: bool,
}

impl BoundBreakdown {
    pub fn from_terms(terms: &[(&str, f64)], lambda_used: f64, p_used: f64) -> Self {
        let total = terms.iter().map(|(_, v)| v).sum::<f64>();
        BoundBreakdown {
            terms: terms
                .iter()
                .map(|(l, v)| BoundTerm {
                    label: (*l).to_string(),
                    value: *v,
                })
                .collect(),
            total,
            lambda_used,
            p_used,
            vacuous: total > 1.0,
        }
    }

    pub fn term(&self, label: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.label == label).map(|t| t.value)
    }
}

/// `1 - e^{-λ}`.
pub fn poisson_prefactor(lambda: f64) -> f64 {
    -(-lambda).exp_m1()
}

/// `(1 - e^{-μ})(1 - σ²/μ)`, valid under `W + 1 >=_st W*`.
pub fn classic_bound(mu: f64, var: f64) -> Result<BoundBreakdown> {
    check_positive("mu", mu)?;
    check_non_negative("var", var)?;
    let c = poisson_prefactor(mu);
    Ok(BoundBreakdown::from_terms(
        &[("base", c), ("variance_deficit", -c * var / mu)],
        mu,
        1.0,
    ))
}

/// Bound under `P(Y* <= Y + 1 | Y* >= x) >= p`:
/// `(1 - e^{-λ}){1 + μ + (|μ - pλ|/λ - p)(σ²/μ + μ)}`.
pub fn bound_thm_i(mu: f64, var: f64, p: f64, lambda: f64) -> Result<BoundBreakdown> {
    check_positive("mu", mu)?;
    check_non_negative("var", var)?;
    check_unit_open_closed("p", p)?;
    check_positive("lambda", lambda)?;
    let c = poisson_prefactor(lambda);
    let star_mean = var / mu + mu;
    let penalty = (mu - p * lambda).abs() / lambda - p;
    Ok(BoundBreakdown::from_terms(
        &[
            ("base", c),
            ("mean", c * mu),
            ("coupling_penalty", c * penalty * star_mean),
        ],
        lambda,
        p,
    ))
}

/// Bound under `P(Y* >= Y + 1 - Z | Y + 1 - Z >= x) >= p`:
/// `(1 - e^{-λ}){2p E Z + (|μ - λ|/λ + 1)(σ²/μ + μ) + (1 - 2p)(μ + 1)}`.
pub fn bound_thm_ii(mu: f64, var: f64, p: f64, lambda: f64, mean_z: f64) -> Result<BoundBreakdown> {
    check_positive("mu", mu)?;
    check_non_negative("var", var)?;
    check_unit_open_closed("p", p)?;
    check_positive("lambda", lambda)?;
    check_non_negative("mean_z", mean_z)?;
    let c = poisson_prefactor(lambda);
    let star_mean = var / mu + mu;
    Ok(BoundBreakdown::from_terms(
        &[
            ("slack", c * 2.0 * p * mean_z),
            ("size_bias_mean", c * ((mu - lambda).abs() / lambda + 1.0) * star_mean),
            ("coupling_penalty", c * (1.0 - 2.0 * p) * (mu + 1.0)),
        ],
        lambda,
        p,
    ))
}

/// Sums of negatively associated variables with `λ = μ`:
/// `(1 - e^{-μ}){1 + μ + (1 - 2p)(σ²/μ + μ)}`.
pub fn neg_assoc_bound(mu: f64, var: f64, p: f64) -> Result<BoundBreakdown> {
    check_positive("mu", mu)?;
    check_non_negative("var", var)?;
    check_unit_open_closed("p", p)?;
    let c = poisson_prefactor(mu);
    Ok(BoundBreakdown::from_terms(
        &[
            ("base", c),
            ("mean", c * mu),
            ("coupling_penalty", c * (1.0 - 2.0 * p) * (var / mu + mu)),
        ],
        mu,
        p,
    ))
}

fn check_window(n: u64, m: u64) -> Result<()> {
    if n < 1 || m < 1 || m > n {
        return Err(Error::param("m", format!("need 1 <= m <= n, got m = {m}, n = {n}")));
    }
    Ok(())
}

/// Threshold exceedances of identically distributed variables where the
/// first `m` of `n` are associated and the rest independent of them.
/// Reduces to the positively-related bound when `m = n`.
pub fn extremes_bound(n: u64, m: u64, lambda: f64, var_y: f64) -> Result<BoundBreakdown> {
    check_window(n, m)?;
    check_positive("lambda", lambda)?;
    check_non_negative("var_y", var_y)?;
    let c = poisson_prefactor(lambda);
    let (nf, mf) = (n as f64, m as f64);
    let excess = c * (var_y / lambda - 1.0);
    let terms = if m == n {
        vec![("variance_excess", excess), ("dependence", c * 2.0 * lambda / nf)]
    } else {
        vec![
            ("variance_excess", excess),
            ("contamination", c * 2.0 * (nf - mf) * (lambda + 1.0) / nf),
            ("dependence", c * 2.0 * mf * lambda / (nf * nf)),
        ]
    };
    let p = mf / nf;
    Ok(BoundBreakdown::from_terms(&terms, lambda, p))
}

/// The uniform moving-window instance, with the variance excess of the
/// associated block replaced by `(4/3) E W sqrt(2 / (mλ))`.
pub fn unif_window_bound(
    n: u64,
    m: u64,
    lambda: f64,
    ew: f64,
    mean_x: f64,
    var_x: f64,
) -> Result<BoundBreakdown> {
    check_window(n, m)?;
    check_positive("lambda", lambda)?;
    let c = poisson_prefactor(lambda);
    let (nf, mf) = (n as f64, m as f64);
    if m == n {
        return Ok(BoundBreakdown::from_terms(
            &[
                ("window_variance", c * 4.0 / 3.0 * (2.0 * lambda / nf).sqrt()),
                ("dependence", c * 2.0 * lambda / nf),
            ],
            lambda,
            1.0,
        ));
    }
    check_non_negative("ew", ew)?;
    check_positive("mean_x", mean_x)?;
    check_non_negative("var_x", var_x)?;
    Ok(BoundBreakdown::from_terms(
        &[
            ("window_variance", c * 4.0 / 3.0 * ew * (2.0 / (mf * lambda)).sqrt()),
            ("noise_dispersion", c * (nf - mf) / nf * (var_x / mean_x - 1.0)),
            ("contamination", c * 2.0 * (nf - mf) * (lambda + 1.0) / nf),
            ("dependence", c * 2.0 * mf * lambda / (nf * nf)),
        ],
        lambda,
        mf / nf,
    ))
}

/// `(1 - q)(1 + Λ) + (q/Λ)(Λ - Var W)` for `ξW` with `W` the isolated
/// vertex count of a fixed-degree random digraph.
pub fn epidemic_bound(capital_lambda: f64, var_w: f64, q: f64) -> Result<BoundBreakdown> {
    check_positive("capital_lambda", capital_lambda)?;
    check_non_negative("var_w", var_w)?;
    check_unit_open_closed("q", q)?;
    Ok(BoundBreakdown::from_terms(
        &[
            ("catastrophe", (1.0 - q) * (1.0 + capital_lambda)),
            ("variance_deficit", q / capital_lambda * (capital_lambda - var_w)),
        ],
        capital_lambda,
        q,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingBound {
    pub mu: f64,
    pub var: f64,
    pub p: f64,
    pub bound: BoundBreakdown,
}

/// Sum of a size-`m` sample drawn without replacement from `values`.
pub fn sampling_bound(values: &[u64], m: usize) -> Result<SamplingBound> {
    let n = values.len();
    if m < 1 || m >= n {
        return Err(Error::param("m", format!("need 1 <= m < n = {n}, got {m}")));
    }
    let s: f64 = values.iter().map(|&c| c as f64).sum();
    if s <= 0.0 {
        return Err(Error::param("values", "need at least one positive value"));
    }
    let s2: f64 = values.iter().map(|&c| (c as f64).powi(2)).sum();
    let (nf, mf) = (n as f64, m as f64);
    let mu = mf / nf * s;
    let var = mf / nf * s2 + mf * (mf - 1.0) / (nf * (nf - 1.0)) * (s * s - s2)
        - mf * mf / (nf * nf) * s * s;
    let var = if var < 0.0 && var > -1e-9 * (1.0 + s * s) { 0.0 } else { var };
    let ones = values.iter().filter(|&&c| c == 1).count() as f64;
    let p = ones / s;
    if p <= 0.0 {
        // no unit values: the coupling admits no positive p
        return Err(Error::param("values", "no value equals 1, so p = 0"));
    }
    let bound = neg_assoc_bound(mu, var, p)?;
    Ok(SamplingBound { mu, var, p, bound })
}

/// Outcomes beyond this are refused by [`JointLaw::independent`].
pub const ENUMERATION_CAP: u64 = 10_000_000;

/// An explicit joint law of `(X_1, .., X_n)` on a finite set of outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct JointLaw {
    n: usize,
    outcomes: Vec<(Vec<u32>, f64)>,
}

impl JointLaw {
    pub fn new(outcomes: Vec<(Vec<u32>, f64)>) -> Result<Self> {
        let n = outcomes
            .first()
            .map(|(x, _)| x.len())
            .ok_or_else(|| Error::param("outcomes", "empty joint law"))?;
        if n == 0 {
            return Err(Error::param("outcomes", "need at least one variable"));
        }
        if outcomes.len() as u64 > ENUMERATION_CAP {
            return Err(Error::CapExceeded {
                what: "joint outcomes",
                limit: ENUMERATION_CAP,
            });
        }
        let mut total = 0.0;
        for (x, w) in &outcomes {
            if x.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "outcome of length {} in a law of {n} variables",
                    x.len()
                )));
            }
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::param("outcomes", format!("bad probability {w}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::param("outcomes", format!("probabilities sum to {total}")));
        }
        Ok(JointLaw { n, outcomes })
    }

    /// Product of the given marginals, enumerated exhaustively.
    pub fn independent(marginals: &[Pmf]) -> Result<Self> {
        let size = marginals
            .iter()
            .try_fold(1u64, |acc, m| acc.checked_mul(m.probs().len() as u64))
            .filter(|&s| s <= ENUMERATION_CAP)
            .ok_or(Error::CapExceeded {
                what: "joint outcomes",
                limit: ENUMERATION_CAP,
            })?;
        let mut outcomes = Vec::with_capacity(size as usize);
        outcomes.push((Vec::with_capacity(marginals.len()), 1.0));
        for m in marginals {
            let mut next = Vec::with_capacity(outcomes.len() * m.probs().len());
            for (x, w) in &outcomes {
                for (j, &pj) in m.probs().iter().enumerate() {
                    if pj > 0.0 {
                        let mut y = x.clone();
                        y.push(j as u32);
                        next.push((y, w * pj));
                    }
                }
            }
            outcomes = next;
        }
        let total: f64 = outcomes.iter().map(|(_, w)| w).sum();
        for o in &mut outcomes {
            o.1 /= total;
        }
        JointLaw::new(outcomes)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn outcomes(&self) -> &[(Vec<u32>, f64)] {
        &self.outcomes
    }

    /// Law of `X_1 + .. + X_n`.
    pub fn sum_law(&self) -> Result<Pmf> {
        let mut w = Vec::new();
        for (x, p) in &self.outcomes {
            let s: usize = x.iter().map(|&v| v as usize).sum();
            if w.len() <= s {
                w.resize(s + 1, 0.0);
            }
            w[s] += p;
        }
        Pmf::from_weights(&w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaStats {
    /// `theta[j - 1] = θ_j`.
    pub theta: Vec<f64>,
    pub theta_total: f64,
    pub p_assoc: f64,
    /// `E Z` for `Z = X_V + Z_V`, `P(V = i) = E X_i / E Y`.
    pub ez_pos: f64,
}

/// `θ_j = (1/j) Σ_i E[X_i 1(X_i + Z_i = j)]` with `Z_i = Σ_{j ∈ J(i)} X_j`,
/// by exhaustive enumeration. Indices are zero-based.
pub fn theta_stats(law: &JointLaw, neighborhoods: &[Vec<usize>]) -> Result<ThetaStats> {
    let n = law.len();
    if neighborhoods.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} neighborhoods for {n} variables",
            neighborhoods.len()
        )));
    }
    for (i, nb) in neighborhoods.iter().enumerate() {
        if let Some(&j) = nb.iter().find(|&&j| j == i || j >= n) {
            return Err(Error::param(
                "neighborhoods",
                format!("J({i}) contains invalid index {j}"),
            ));
        }
    }
    // weighted[j] accumulates Σ_i E[X_i 1(X_i + Z_i = j)]
    let mut weighted: Vec<f64> = Vec::new();
    let mut ex = vec![0.0; n];
    let mut exz = vec![0.0; n];
    for (x, w) in law.outcomes() {
        for i in 0..n {
            let xi = x[i] as usize;
            let zi: usize = neighborhoods[i].iter().map(|&j| x[j] as usize).sum();
            ex[i] += w * xi as f64;
            exz[i] += w * (xi + zi) as f64;
            if xi > 0 {
                let j = xi + zi;
                if weighted.len() <= j {
                    weighted.resize(j + 1, 0.0);
                }
                weighted[j] += w * xi as f64;
            }
        }
    }
    let mu: f64 = ex.iter().sum();
    if mu <= 0.0 {
        return Err(Error::ZeroMean);
    }
    let theta: Vec<f64> = weighted
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, &v)| v / j as f64)
        .collect();
    let theta_total = theta.iter().sum();
    // Σ j θ_j = Σ_i E X_i = μ
    let first_moment: f64 = weighted.iter().sum();
    let p_assoc = theta.first().copied().unwrap_or(0.0) / first_moment;
    let ez_pos = ex.iter().zip(&exz).map(|(e, ez)| e / mu * ez).sum();
    Ok(ThetaStats {
        theta,
        theta_total,
        p_assoc,
        ez_pos,
    })
}
