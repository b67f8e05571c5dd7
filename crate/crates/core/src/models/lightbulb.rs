//! The lightbulb process: `n` bulbs start off; in round `r = 1..=n` a
//! uniformly chosen set of `r` bulbs is toggled. `W` is the number lit at
//! the end.

use rand::seq::index::sample;

use super::{simulate_tables, EmpiricalLaw};
use crate::dist::Pmf;
use crate::error::{Error, Result};

pub const LIGHTBULB_CAP: u64 = 600;

fn check(n: u64) -> Result<()> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::param("n", format!("must be even and >= 2, got {n}")));
    }
    if n > LIGHTBULB_CAP {
        return Err(Error::CapExceeded {
            what: "lightbulb rounds",
            limit: LIGHTBULB_CAP,
        });
    }
    Ok(())
}

/// Exact law of `W` by propagating the on-count through every round: with
/// `w` bulbs lit, `j` of the `r` toggled ones are lit with hypergeometric
/// probability and the count moves to `w + r - 2j`.
pub fn lightbulb_exact(n: u64) -> Result<Pmf> {
    check(n)?;
    let n = n as usize;
    let mut lf = vec![0.0f64; n + 1];
    for i in 1..=n {
        lf[i] = lf[i - 1] + (i as f64).ln();
    }
    let ln_choose = |a: usize, b: usize| lf[a] - lf[b] - lf[a - b];
    let mut cur = vec![0.0; n + 1];
    cur[0] = 1.0;
    for r in 1..=n {
        let mut next = vec![0.0; n + 1];
        let denom = ln_choose(n, r);
        for (w, &pw) in cur.iter().enumerate() {
            if pw == 0.0 {
                continue;
            }
            let lo = r.saturating_sub(n - w);
            let hi = w.min(r);
            for j in lo..=hi {
                let lw = ln_choose(w, j) + ln_choose(n - w, r - j) - denom;
                next[w + r - 2 * j] += pw * lw.exp();
            }
        }
        cur = next;
    }
    Pmf::from_weights(&cur)
}

pub fn lightbulb_simulate(n: u64, reps: u64, seed: u64) -> Result<EmpiricalLaw> {
    check(n)?;
    let n = n as usize;
    let tables = simulate_tables(reps, seed, 1, |rng, out| {
        let mut on = vec![false; n];
        for r in 1..=n {
            for i in sample(rng, n, r) {
                on[i] = !on[i];
            }
        }
        out[0] = on.iter().filter(|&&b| b).count();
    })?;
    EmpiricalLaw::from_counts(tables.into_iter().next().unwrap_or_default(), seed)
}
