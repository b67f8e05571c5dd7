//! Kolmogorov-distance bounds for normal approximation of `Y = W + X` with
//! a bounded size-bias coupling for `W` and independent noise `X`.

use serde::Serialize;

use crate::bounds::BoundBreakdown;
use crate::coupling::SizeBiasCoupling;
use crate::dist::{kolmogorov_to_std_normal, Pmf};
use crate::error::{check_non_negative, check_positive, check_unit_open_closed, Error, Result};
use crate::models::lightbulb_exact;

/// `E | E[1 - (μ/σ²)(W* - W) | W] |` from a joint table of `(W, W*)`.
pub fn d_w_exact(c: &SizeBiasCoupling, mu: f64, var: f64) -> Result<f64> {
    check_positive("mu", mu)?;
    if !(var > 0.0) {
        return Err(Error::param("var", "needs positive variance"));
    }
    let rows = c.row_sums();
    Ok(rows
        .iter()
        .enumerate()
        .filter(|(_, &py)| py > 0.0)
        .map(|(y, &py)| {
            let star = c.conditional_star_mean(y).unwrap_or(y as f64);
            py * (1.0 - mu / var * (star - y as f64)).abs()
        })
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalBoundInputs {
    pub var_w: f64,
    pub var_x: f64,
    pub d_w: f64,
    pub d_x: f64,
    /// `W <= W* <= W + c`.
    pub c: f64,
    /// `0 <= X <= a`.
    pub a: f64,
    pub mu: f64,
    pub sigma: f64,
    /// `E W / μ`.
    pub p: f64,
}

impl NormalBoundInputs {
    fn check(&self) -> Result<()> {
        check_non_negative("var_w", self.var_w)?;
        check_non_negative("var_x", self.var_x)?;
        // D is undefined for a degenerate component and is not consulted
        if self.var_w > 0.0 {
            check_non_negative("d_w", self.d_w)?;
        }
        if self.var_x > 0.0 {
            check_non_negative("d_x", self.d_x)?;
        }
        check_positive("c", self.c)?;
        check_non_negative("a", self.a)?;
        check_positive("mu", self.mu)?;
        check_positive("sigma", self.sigma)?;
        check_unit_open_closed("p", self.p)?;
        let s2 = self.sigma * self.sigma;
        if (s2 - self.var_w - self.var_x).abs() > 1e-9 * s2.max(1.0) {
            return Err(Error::param(
                "sigma",
                format!(
                    "sigma² = {s2} but var_w + var_x = {}",
                    self.var_w + self.var_x
                ),
            ));
        }
        Ok(())
    }
}

/// `(Var W/σ²) D_W + (Var X/σ²) D_X + 0.82 c²μ/σ³ + c/σ + (μ/σ²) a (1 - p)`.
/// A component with zero variance contributes nothing, whatever its `D`.
pub fn normal_bound(inp: &NormalBoundInputs) -> Result<BoundBreakdown> {
    inp.check()?;
    let s2 = inp.sigma * inp.sigma;
    let d_term = |var: f64, d: f64| if var == 0.0 { 0.0 } else { var / s2 * d };
    Ok(BoundBreakdown::from_terms(
        &[
            ("w_coupling", d_term(inp.var_w, inp.d_w)),
            ("x_coupling", d_term(inp.var_x, inp.d_x)),
            ("smoothing", 0.82 * inp.c * inp.c * inp.mu / (s2 * inp.sigma)),
            ("gap", inp.c / inp.sigma),
            ("contamination", inp.mu / s2 * inp.a * (1.0 - inp.p)),
        ],
        inp.mu,
        inp.p,
    ))
}

fn check_lightbulb(n: u64, alpha: f64, tau_sq: f64) -> Result<()> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::param("n", format!("must be even and >= 2, got {n}")));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::param("alpha", format!("must lie in [0, 1), got {alpha}")));
    }
    check_positive("tau_sq", tau_sq)?;
    Ok(())
}

/// The `D_W` bound for the lightbulb coupling `W <= W* <= W + 2`.
pub fn lightbulb_d_w(n: u64, tau_sq: f64) -> f64 {
    let nf = n as f64;
    nf / (2.0 * tau_sq) * (0.5 / nf.sqrt() + 0.5 / nf + (-nf / 2.0).exp() / 3.0)
}

/// `D_X <= sqrt(α / ((1 - α) k))` for `X ~ Bin(k, α)`; zero when `X` is
/// degenerate.
pub fn binomial_d_x(k: u64, alpha: f64) -> f64 {
    if k == 0 || alpha == 0.0 {
        0.0
    } else {
        (alpha / ((1.0 - alpha) * k as f64)).sqrt()
    }
}

/// The displayed bound for the lightbulb count `W` after `n` rounds plus
/// independent `Bin(k, α)` noise, with `σ² = τ² + α(1-α)k`.
pub fn lightbulb_bound(n: u64, k: u64, alpha: f64, tau_sq: f64) -> Result<BoundBreakdown> {
    check_lightbulb(n, alpha, tau_sq)?;
    let (nf, kf) = (n as f64, k as f64);
    let s2 = tau_sq + alpha * (1.0 - alpha) * kf;
    let s = s2.sqrt();
    let w_part = nf / 2.0 * (0.5 / nf.sqrt() + 0.5 / nf + (-nf / 2.0).exp() / 3.0);
    let x_part = alpha * (alpha * (1.0 - alpha) * kf).sqrt();
    let p = nf / (nf + 2.0 * alpha * kf);
    Ok(BoundBreakdown::from_terms(
        &[
            ("w_coupling", w_part / s2),
            ("x_coupling", x_part / s2),
            ("smoothing", 1.64 * nf / (s2 * s)),
            ("gap", 2.0 / s),
            ("contamination", alpha * kf * kf * nf / (s2 * (nf + 2.0 * alpha * kf))),
        ],
        nf / 2.0 + alpha * kf,
        p,
    ))
}

/// The general theorem applied to the lightbulb model: `c = 2`, `a = k`,
/// `E W = n/2`, so `p = n / (n + 2αk)`.
pub fn lightbulb_composition(n: u64, k: u64, alpha: f64, tau_sq: f64) -> Result<BoundBreakdown> {
    check_lightbulb(n, alpha, tau_sq)?;
    let (nf, kf) = (n as f64, k as f64);
    let var_x = alpha * (1.0 - alpha) * kf;
    let mu = nf / 2.0 + alpha * kf;
    normal_bound(&NormalBoundInputs {
        var_w: tau_sq,
        var_x,
        d_w: lightbulb_d_w(n, tau_sq),
        d_x: binomial_d_x(k, alpha),
        c: 2.0,
        a: kf,
        mu,
        sigma: (tau_sq + var_x).sqrt(),
        p: nf / 2.0 / mu,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LightbulbCheck {
    pub n: u64,
    pub k: u64,
    pub alpha: f64,
    pub tau_sq: f64,
    pub d_k: f64,
    pub composition: BoundBreakdown,
    pub proposition: BoundBreakdown,
}

/// Exact Kolmogorov distance of the standardized `W + X` against `N(0, 1)`,
/// next to both bounds, with `τ²` taken from the exact law of `W`.
pub fn lightbulb_check(n: u64, k: u64, alpha: f64) -> Result<LightbulbCheck> {
    let w = lightbulb_exact(n)?;
    lightbulb_check_with(&w, n, k, alpha)
}

/// As [`lightbulb_check`] with a precomputed law of `W`.
pub fn lightbulb_check_with(w: &Pmf, n: u64, k: u64, alpha: f64) -> Result<LightbulbCheck> {
    let tau_sq = w.variance();
    let x = Pmf::binomial(k, alpha)?;
    let y = w.convolve(&x);
    let (mu, var) = y.moments();
    let d_k = kolmogorov_to_std_normal(&y, mu, var.sqrt())?;
    Ok(LightbulbCheck {
        n,
        k,
        alpha,
        tau_sq,
        d_k,
        composition: lightbulb_composition(n, k, alpha, tau_sq)?,
        proposition: lightbulb_bound(n, k, alpha, tau_sq)?,
    })
}
