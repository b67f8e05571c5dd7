//! Random digraph epidemic with an independent catastrophe.
//!
//! Each vertex `i` points to a uniformly chosen set `L_i` of other vertices.
//! `W` counts vertices no other vertex points to. The epidemic starts from
//! vertex 0 and spreads along out-edges; `S_∞` is the set never reached.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use super::{simulate_tables, EmpiricalLaw};
use crate::error::{check_unit_open_closed, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DegreeSpec {
    /// Every `|L_i| = d`.
    Fixed { d: usize },
    /// `|L_i| ~ Bin(n - 1, ψ log(n) / (n - 1))`.
    Binomial { psi: f64 },
}

pub(crate) fn check(n: usize, degrees: &DegreeSpec) -> Result<()> {
    if n < 3 {
        return Err(Error::param("n", format!("must be >= 3, got {n}")));
    }
    match *degrees {
        DegreeSpec::Fixed { d } if d > n - 1 => {
            Err(Error::param("d", format!("must be <= n - 1 = {}, got {d}", n - 1)))
        }
        DegreeSpec::Binomial { psi } if !(psi > 0.5 && psi <= 1.0) => {
            Err(Error::param("psi", format!("must lie in (1/2, 1], got {psi}")))
        }
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpidemicLaws {
    /// Law of `ξ W`.
    pub isolated: EmpiricalLaw,
    /// Law of `ξ |S_∞|`.
    pub survivors: EmpiricalLaw,
}

/// `ξ W` and `ξ |S_∞|` over `reps` independent graphs, with the same
/// `ξ ~ Be(q)` applied to both counts of a replicate.
pub fn epidemic_simulate(
    n: usize,
    degrees: DegreeSpec,
    q: f64,
    reps: u64,
    seed: u64,
) -> Result<EpidemicLaws> {
    check(n, &degrees)?;
    check_unit_open_closed("q", q)?;
    let binom = match degrees {
        DegreeSpec::Binomial { psi } => {
            let r = psi * (n as f64).ln() / (n - 1) as f64;
            Some(
                Binomial::new((n - 1) as u64, r.min(1.0))
                    .map_err(|e| Error::param("psi", e.to_string()))?,
            )
        }
        DegreeSpec::Fixed { .. } => None,
    };
    let tables = simulate_tables(reps, seed, 2, |rng, out| {
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut pointed = vec![false; n];
        offsets.push(0);
        for i in 0..n {
            let k = match (degrees, &binom) {
                (DegreeSpec::Fixed { d }, _) => d,
                (_, Some(b)) => b.sample(rng) as usize,
                _ => unreachable!(),
            };
            for j in sample(rng, n - 1, k) {
                let v = if j >= i { j + 1 } else { j };
                pointed[v] = true;
                targets.push(v);
            }
            offsets.push(targets.len());
        }
        let w = pointed.iter().filter(|&&x| !x).count();

        let mut reached = vec![false; n];
        reached[0] = true;
        let mut stack = vec![0usize];
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &targets[offsets[u]..offsets[u + 1]] {
                if !reached[v] {
                    reached[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        let xi = rng.random_bool(q);
        out[0] = if xi { w } else { 0 };
        out[1] = if xi { n - count } else { 0 };
    })?;
    let mut it = tables.into_iter();
    Ok(EpidemicLaws {
        isolated: EmpiricalLaw::from_counts(it.next().unwrap_or_default(), seed)?,
        survivors: EmpiricalLaw::from_counts(it.next().unwrap_or_default(), seed)?,
    })
}

/// `(E W, Var W)` for the isolated-vertex count when every vertex chooses
/// exactly `d` others.
pub fn epidemic_moments_fixed_degree(n: usize, d: usize) -> Result<(f64, f64)> {
    check(n, &DegreeSpec::Fixed { d })?;
    let nf = n as f64;
    // P(a given chooser avoids a given vertex)
    let avoid1 = 1.0 - d as f64 / (nf - 1.0);
    let pi = avoid1.powi(n as i32 - 1);
    // a chooser outside {u, v} avoids both with C(n-3, d) / C(n-1, d)
    let avoid2 = if d > n - 3 {
        0.0
    } else {
        (ln_binomial(n as u64 - 3, d as u64) - ln_binomial(n as u64 - 1, d as u64)).exp()
    };
    let both = avoid1 * avoid1 * avoid2.powi(n as i32 - 2);
    let ew = nf * pi;
    let var = nf * pi * (1.0 - pi) + nf * (nf - 1.0) * (both - pi * pi);
    Ok((ew, var.max(0.0)))
}
