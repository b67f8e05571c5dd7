//! Solutions of the Stein–Chen equation `λ g(j+1) - j g(j) = 1(j ∈ A) - Π_λ(A)`
//! and the tail representation of `P(Y ∈ A) - Π_λ(A)` built from them.
//!
//! `g_A` is evaluated from the closed form
//! `g_A(j+1) = [P(Z ∈ A, Z <= j) - Π_λ(A) P(Z <= j)] / (λ P(Z = j))`, `Z ~ Po(λ)`,
//! switching to the equivalent upper-tail form
//! `[Π_λ(A) P(Z > j) - P(Z ∈ A, Z > j)] / (λ P(Z = j))` once `j >= λ`. Both
//! forms are computed through ratios `P(Z = i) / P(Z = j)` so nothing
//! underflows, and neither suffers the factorial error growth of running the
//! recursion forward.

use std::collections::BTreeSet;

use serde::Serialize;
use statrs::function::factorial::ln_factorial;

use crate::dist::Pmf;
use crate::error::{check_positive, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteinSolution {
    pub lambda: f64,
    pub set_a: BTreeSet<usize>,
    /// `g[j]` for `j` in `0..=cap`; `g[0] = 0`.
    pub g: Vec<f64>,
    /// `Π_λ(A)`.
    pub pi_a: f64,
}

fn poisson_mass(lambda: f64, j: usize) -> f64 {
    (j as f64 * lambda.ln() - lambda - ln_factorial(j as u64)).exp()
}

pub fn solve_stein(lambda: f64, set_a: &BTreeSet<usize>, cap: usize) -> Result<SteinSolution> {
    check_positive("lambda", lambda)?;
    if cap < 1 {
        return Err(Error::param("cap", "must be >= 1"));
    }
    let max_a = set_a.iter().next_back().copied();
    if let Some(m) = max_a {
        if m > cap {
            return Err(Error::param(
                "cap",
                format!("must cover max(A) = {m}, got {cap}"),
            ));
        }
    }
    let pi_a: f64 = set_a.iter().map(|&a| poisson_mass(lambda, a)).sum();

    let mut g = vec![0.0; cap + 1];
    for j in 0..cap {
        g[j + 1] = if (j as f64) < lambda {
            // ratios P(i)/P(j) for i <= j, walking down from r = 1
            let (mut in_a, mut all, mut r) = (0.0, 0.0, 1.0);
            for i in (0..=j).rev() {
                all += r;
                if set_a.contains(&i) {
                    in_a += r;
                }
                r *= i as f64 / lambda;
            }
            (in_a - pi_a * all) / lambda
        } else {
            let (mut in_a, mut all) = (0.0, 0.0);
            let mut r = 1.0;
            let mut i = j;
            loop {
                r *= lambda / (i + 1) as f64;
                i += 1;
                all += r;
                if set_a.contains(&i) {
                    in_a += r;
                }
                let past_a = max_a.map_or(true, |m| i >= m);
                if past_a && (r <= all * 1e-18 || r == 0.0) {
                    break;
                }
            }
            (pi_a * all - in_a) / lambda
        };
    }

    Ok(SteinSolution {
        lambda,
        set_a: set_a.clone(),
        g,
        pi_a,
    })
}

impl SteinSolution {
    pub fn cap(&self) -> usize {
        self.g.len() - 1
    }

    /// `Δg(k) = g(k+1) - g(k)` for `k < cap`.
    pub fn delta(&self, k: usize) -> f64 {
        self.g[k + 1] - self.g[k]
    }

    /// Largest deviation from the Stein–Chen equation over `j < cap`.
    pub fn residual(&self) -> f64 {
        (0..self.cap())
            .map(|j| {
                let lhs = self.lambda * self.g[j + 1] - j as f64 * self.g[j];
                let rhs = f64::from(u8::from(self.set_a.contains(&j))) - self.pi_a;
                (lhs - rhs).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `sup_j |Δg_A(j)|` over the evaluated range.
pub fn delta_g_sup(s: &SteinSolution) -> f64 {
    (0..s.cap()).map(|k| s.delta(k).abs()).fold(0.0, f64::max)
}

/// The classical bound on `sup |Δg_A|`: `(1 - e^{-λ}) / λ`.
pub fn stein_factor(lambda: f64) -> f64 {
    -(-lambda).exp_m1() / lambda
}

/// `Σ_k (λ P(Y >= k) - μ P(Y* >= k+1)) Δg_A(k)`, which equals
/// `P(Y ∈ A) - Π_λ(A)`.
pub fn key_identity_rhs(d: &Pmf, lambda: f64, set_a: &BTreeSet<usize>) -> Result<f64> {
    let mu = d.mean();
    let star = d.size_bias()?;
    let n = d.cap();
    let cap = (n + 1).max(set_a.iter().next_back().copied().unwrap_or(0)).max(1);
    let sol = solve_stein(lambda, set_a, cap)?;
    let tail_y = d.upper_tails();
    let tail_star = star.upper_tails();
    let tail = |t: &[f64], k: usize| t.get(k).copied().unwrap_or(0.0);
    Ok((0..=n)
        .map(|k| (lambda * tail(&tail_y, k) - mu * tail(&tail_star, k + 1)) * sol.delta(k))
        .sum())
}

/// `P(Y ∈ A) - Π_λ(A)` evaluated directly.
pub fn set_discrepancy(d: &Pmf, lambda: f64, set_a: &BTreeSet<usize>) -> f64 {
    set_a
        .iter()
        .map(|&a| d.mass(a) - poisson_mass(lambda, a))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{make_pmf, Pmf, TruncationPolicy};
    use approx::assert_abs_diff_eq;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    /// Forward recursion carried in exact rational-free form: for small caps
    /// it is accurate enough to pin the first few values.
    fn forward(lambda: f64, a: &BTreeSet<usize>, cap: usize) -> Vec<f64> {
        let pi: f64 = a.iter().map(|&x| poisson_mass(lambda, x)).sum();
        let mut g = vec![0.0; cap + 1];
        for j in 0..cap {
            let ind = if a.contains(&j) { 1.0 } else { 0.0 };
            g[j + 1] = (j as f64 * g[j] + ind - pi) / lambda;
        }
        g
    }

    #[test]
    fn first_values_for_singleton_zero() {
        let s = solve_stein(1.0, &set(&[0]), 10).unwrap();
        let e1 = (-1.0f64).exp();
        assert_eq!(s.g[0], 0.0);
        assert_abs_diff_eq!(s.g[1], 1.0 - e1, epsilon = 1e-15);
        assert_abs_diff_eq!(s.g[2], 1.0 - 2.0 * e1, epsilon = 1e-15);
        let f = forward(1.0, &set(&[0]), 6);
        for j in 0..=6 {
            assert_abs_diff_eq!(s.g[j], f[j], epsilon = 1e-12);
        }
    }

    #[test]
    fn empty_set_gives_zero() {
        let s = solve_stein(2.0, &BTreeSet::new(), 30).unwrap();
        assert!(s.g.iter().all(|&x| x == 0.0));
        assert_eq!(delta_g_sup(&s), 0.0);
    }

    #[test]
    fn rejects_short_cap_and_bad_lambda() {
        assert!(solve_stein(1.0, &set(&[5]), 4).is_err());
        assert!(solve_stein(0.0, &set(&[0]), 4).is_err());
        assert!(solve_stein(1.0, &set(&[0]), 0).is_err());
    }

    #[test]
    fn sup_attained_for_singleton_zero() {
        let s = solve_stein(1.0, &set(&[0]), 40).unwrap();
        let sup = delta_g_sup(&s);
        assert!(sup >= 0.632_120_558_828_557_6 - 1e-12);
        assert!(sup <= stein_factor(1.0) + 1e-9);
    }

    #[test]
    fn stable_far_past_lambda() {
        // forward recursion would have blown up by a factor ~ 199!/λ^200 here
        for lambda in [0.5, 3.0, 20.0] {
            let s = solve_stein(lambda, &set(&[0, 2, 7, 30, 150]), 200).unwrap();
            assert!(s.residual() <= 1e-10, "lambda {lambda}: {}", s.residual());
            assert!(delta_g_sup(&s) <= stein_factor(lambda) + 1e-9);
        }
    }

    #[test]
    fn identity_examples() {
        let policy = TruncationPolicy::default();
        for lambda in [0.7, 2.0, 6.0] {
            let p = Pmf::poisson(lambda, policy).unwrap();
            for a in [set(&[0]), set(&[1, 3, 4]), set(&[2, 9])] {
                assert_abs_diff_eq!(key_identity_rhs(&p, lambda, &a).unwrap(), 0.0, epsilon = 1e-9);
            }
        }
        let b = Pmf::bernoulli(0.5).unwrap();
        let rhs = key_identity_rhs(&b, 0.5, &set(&[0])).unwrap();
        assert_abs_diff_eq!(rhs, 0.5 - (-0.5f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(rhs, -0.106_530_659_712_633_4, epsilon = 1e-12);

        let d = make_pmf(&[0.0, 0.0, 1.0]).unwrap();
        let a = set(&[1, 2]);
        assert_abs_diff_eq!(
            key_identity_rhs(&d, 1.3, &a).unwrap(),
            set_discrepancy(&d, 1.3, &a),
            epsilon = 1e-12
        );
        assert_eq!(key_identity_rhs(&Pmf::point(0), 1.0, &a), Err(Error::ZeroMean));
    }
}
