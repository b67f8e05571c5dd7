//! Threshold exceedances of the moving sums `X_i = U_i + U_{i-1}` of
//! uniforms over the first `m` indices, with independent copies of the
//! marginal beyond them. The threshold `z = 2 - sqrt(2λ/n)` makes the
//! expected count exactly `λ`.

use rand::Rng;
use serde::Serialize;

use super::{simulate_tables, EmpiricalLaw};
use crate::error::{check_positive, Error, Result};

pub(crate) fn check(n: u64, m: u64, lambda: f64) -> Result<()> {
    check_positive("lambda", lambda)?;
    if n < 2 {
        return Err(Error::param("n", format!("must be >= 2, got {n}")));
    }
    if m < 1 || m > n {
        return Err(Error::param("m", format!("need 1 <= m <= n = {n}, got {m}")));
    }
    if (n as f64) < 2.0 * lambda {
        return Err(Error::param("n", format!("must be >= 2λ = {}", 2.0 * lambda)));
    }
    Ok(())
}

/// `2 - z`.
fn gap(n: u64, lambda: f64) -> f64 {
    (2.0 * lambda / n as f64).sqrt()
}

pub fn extremes_simulate(n: u64, m: u64, lambda: f64, reps: u64, seed: u64) -> Result<EmpiricalLaw> {
    check(n, m, lambda)?;
    let z = 2.0 - gap(n, lambda);
    let tables = simulate_tables(reps, seed, 1, |rng, out| {
        let mut count = 0;
        let mut prev: f64 = rng.random();
        for _ in 0..m {
            let u: f64 = rng.random();
            if u + prev > z {
                count += 1;
            }
            prev = u;
        }
        for _ in m..n {
            let (a, b): (f64, f64) = (rng.random(), rng.random());
            if a + b > z {
                count += 1;
            }
        }
        out[0] = count;
    })?;
    EmpiricalLaw::from_counts(tables.into_iter().next().unwrap_or_default(), seed)
}

/// `(E Y, Var Y)` for the total exceedance count.
pub fn extremes_exact_moments(n: u64, m: u64, lambda: f64) -> Result<(f64, f64)> {
    let s = extremes_window_stats(n, m, lambda)?;
    Ok((s.mean, s.var))
}

/// Moments of the block count `W`, the independent count `X`, and `Y = W + X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowStats {
    pub ew: f64,
    pub var_w: f64,
    pub mean_x: f64,
    pub var_x: f64,
    pub mean: f64,
    pub var: f64,
}

pub fn extremes_window_stats(n: u64, m: u64, lambda: f64) -> Result<WindowStats> {
    check(n, m, lambda)?;
    let t = gap(n, lambda);
    let pi = t * t / 2.0;
    // Cov of neighbouring indicators: t³/3 - (t²/2)²
    let cov = t.powi(3) / 3.0 - t.powi(4) / 4.0;
    let (mf, rest) = (m as f64, (n - m) as f64);
    let ew = mf * pi;
    let var_w = mf * pi * (1.0 - pi) + 2.0 * (mf - 1.0) * cov;
    let mean_x = rest * pi;
    let var_x = rest * pi * (1.0 - pi);
    Ok(WindowStats {
        ew,
        var_w,
        mean_x,
        var_x,
        mean: ew + mean_x,
        var: var_w + var_x,
    })
}
