//! Upper bounds on the discrete Poincaré constant
//! `R_Y = sup Var g(Y) / E[(Δg(Y))²]` and an eigenvalue oracle for it.

use serde::Serialize;

use crate::coupling::ordering_p;
use crate::dist::{c_log_concavity, failure_rate, Pmf};
use crate::error::{check_positive, check_unit_open_closed, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoincareResult {
    pub bound: f64,
    pub oracle: Option<f64>,
    pub lower_bound_var: f64,
    pub p_used: f64,
    pub h_star: f64,
    /// The law was cut from an infinite support; `oracle` and `h_star`
    /// refer to the retained points.
    pub truncated: bool,
}

/// `μ (1 + (1 - p) / (p h*))`.
pub fn poincare_bound(mu: f64, p: f64, h_star: f64) -> Result<f64> {
    check_positive("mu", mu)?;
    check_unit_open_closed("p", p)?;
    check_unit_open_closed("h_star", h_star)?;
    Ok(mu * (1.0 + (1.0 - p) / (p * h_star)))
}

/// `(1/c)(1 + (1 - cμ) P(Y >= 1) / P(Y = 0))` with `c` the best
/// log-concavity constant of `d`.
pub fn poincare_bound_logconcave(d: &Pmf) -> Result<f64> {
    let c = c_log_concavity(d)?;
    if !(c > 0.0) {
        return Err(Error::param("d", format!("not c-log-concave for any c > 0 (c* = {c})")));
    }
    let p0 = d.mass(0);
    if p0 <= 0.0 {
        return Err(Error::param("d", "needs positive mass at 0"));
    }
    let mu = d.mean();
    if c.is_infinite() {
        // point mass at 0
        return Ok(0.0);
    }
    Ok((1.0 + (1.0 - c * mu) * (1.0 - p0) / p0) / c)
}

/// Bound for the zero-inflated Poisson law `I_p Z`, `Z ~ Po(λ)`.
pub fn zip_poincare_bound(p: f64, lambda: f64) -> Result<f64> {
    check_unit_open_closed("p", p)?;
    check_positive("lambda", lambda)?;
    let e = lambda.exp();
    let a = lambda.exp_m1() / lambda;
    let b = e / ((1.0 - p) * e + p);
    Ok(lambda * (p + (1.0 - p) * a.max(b)))
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix with
/// diagonal `a` and off-diagonal `b`, from the signs of the `LDLᵀ` pivots.
fn sturm_count(a: &[f64], b: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = a[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..a.len() {
        let prev = if q == 0.0 { f64::EPSILON * (a[i - 1].abs() + 1.0) } else { q };
        q = a[i] - x - b[i - 1] * b[i - 1] / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The symmetrized operator `P^{-1/2} L P^{-1/2}` of the Dirichlet form
/// `Σ_{j<N} p_j (g(j+1) - g(j))²` against `diag(p)`, on the support
/// `lo..=N` (the tridiagonal `(diag, offdiag)` pair).
pub(crate) fn dirichlet_operator(p: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = p.len();
    let diag = (0..n)
        .map(|j| {
            let left = if j > 0 { p[j - 1] } else { 0.0 };
            let right = if j + 1 < n { p[j] } else { 0.0 };
            (left + right) / p[j]
        })
        .collect();
    let off = (0..n.saturating_sub(1)).map(|j| -(p[j] / p[j + 1]).sqrt()).collect();
    (diag, off)
}

/// `R_Y` on the support of `d`, as the reciprocal of the smallest non-zero
/// eigenvalue of the Dirichlet form relative to `diag(p)`. The free value
/// `g(N+1)` is pinned to `g(N)`. Internal gaps disconnect the form and give
/// an infinite constant.
pub fn poincare_oracle(d: &Pmf) -> Result<f64> {
    let lo = d.min_support();
    let p = &d.probs()[lo..];
    if p.len() < 2 {
        return Err(Error::SingularDenominator(
            "support has a single point, so every mean-zero g vanishes".into(),
        ));
    }
    if p.iter().any(|&x| x <= 0.0) {
        return Ok(f64::INFINITY);
    }
    let (diag, off) = dirichlet_operator(p);
    // Gershgorin upper limit for the spectrum
    let hi = (0..diag.len())
        .map(|i| {
            let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
            let r = if i < off.len() { off[i].abs() } else { 0.0 };
            diag[i] + l + r
        })
        .fold(0.0, f64::max);
    // the smallest eigenvalue is 0 (constants); bisect for the second
    let (mut a, mut b) = (0.0, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if sturm_count(&diag, &off, mid) >= 2 {
            b = mid;
        } else {
            a = mid;
        }
        if b - a <= 1e-15 * b {
            break;
        }
    }
    let nu = 0.5 * (a + b);
    if nu <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / nu)
}

/// The full sandwich for a law: variance, oracle and the failure-rate bound
/// with the best `p` admitted by the tails of `d`.
pub fn poincare_report(d: &Pmf) -> Result<PoincareResult> {
    let (mu, var) = d.moments();
    let p = ordering_p(d)?;
    let fr = failure_rate(d);
    let bound = poincare_bound(mu, p, fr.h_star.min(1.0))?;
    let oracle = match poincare_oracle(d) {
        Ok(r) => Some(r),
        Err(Error::SingularDenominator(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(PoincareResult {
        bound,
        oracle,
        lower_bound_var: var,
        p_used: p,
        h_star: fr.h_star,
        truncated: d.is_truncated(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{make_pmf, TruncationPolicy};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn theorem_bound_examples() {
        assert_eq!(poincare_bound(2.5, 1.0, 0.3).unwrap(), 2.5);
        assert_abs_diff_eq!(poincare_bound(3.0, 0.6, 1.0).unwrap(), 3.0 / 0.6, epsilon = 1e-12);
        assert!(poincare_bound(1.0, 0.0, 0.5).is_err());
        assert!(poincare_bound(1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn zip_bound_examples() {
        assert_abs_diff_eq!(zip_poincare_bound(1.0, 2.0).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(zip_poincare_bound(0.9, 1.0).unwrap(), 1.131_969_316_684_074, epsilon = 1e-12);
    }

    #[test]
    fn bernoulli_oracle_is_q() {
        for q in [0.05, 0.3, 0.5, 0.77, 0.999] {
            let r = poincare_oracle(&Pmf::bernoulli(q).unwrap()).unwrap();
            assert_abs_diff_eq!(r, q, epsilon = 1e-12);
        }
    }

    #[test]
    fn poisson_oracle_near_lambda() {
        let policy = TruncationPolicy::new(1e-12).unwrap();
        for lambda in [0.5, 1.0, 3.0, 10.0] {
            let r = poincare_oracle(&Pmf::poisson(lambda, policy).unwrap()).unwrap();
            assert_relative_eq!(r, lambda, max_relative = 0.01);
        }
    }

    #[test]
    fn oracle_shift_invariant_and_gaps() {
        let d = make_pmf(&[1.0, 2.0, 3.0]).unwrap();
        let s = d.shift(4);
        assert_abs_diff_eq!(poincare_oracle(&d).unwrap(), poincare_oracle(&s).unwrap(), epsilon = 1e-12);
        let g = make_pmf(&[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(poincare_oracle(&g).unwrap(), f64::INFINITY);
        assert!(poincare_oracle(&Pmf::point(3)).is_err());
    }

    #[test]
    fn logconcave_examples() {
        let policy = TruncationPolicy::default();
        let p = Pmf::poisson(2.0, policy).unwrap();
        assert_relative_eq!(poincare_bound_logconcave(&p).unwrap(), 2.0, max_relative = 1e-9);
        let b = Pmf::binomial(4, 0.5).unwrap();
        let bound = poincare_bound_logconcave(&b).unwrap();
        assert!(bound >= poincare_oracle(&b).unwrap() - 1e-9);
        let be = Pmf::bernoulli(0.3).unwrap();
        assert!(poincare_bound_logconcave(&be).unwrap() >= 0.3 - 1e-12);
        assert!(poincare_bound_logconcave(&make_pmf(&[0.0, 1.0, 1.0]).unwrap()).is_err());
    }

    #[test]
    fn report_sandwich() {
        let d = make_pmf(&[0.2, 0.1, 0.4, 0.3]).unwrap();
        let r = poincare_report(&d).unwrap();
        let o = r.oracle.unwrap();
        assert!(r.lower_bound_var <= o + 1e-9);
        assert!(o <= r.bound + 1e-9);
    }
}
