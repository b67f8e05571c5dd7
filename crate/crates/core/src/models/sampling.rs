//! Sum of a simple random sample of size `m` drawn without replacement from
//! `c_1..c_n`.

use crate::dist::Pmf;
use crate::error::{Error, Result};

/// Largest `(m + 1) (Σc + 1)` table the exact recursion will allocate.
pub const SAMPLING_STATE_CAP: u64 = 50_000_000;

pub(crate) fn check(values: &[u64], m: usize) -> Result<()> {
    let n = values.len();
    if m < 1 || m >= n {
        return Err(Error::param("m", format!("need 1 <= m < n = {n}, got {m}")));
    }
    if values.iter().all(|&c| c == 0) {
        return Err(Error::param("values", "all values are zero"));
    }
    Ok(())
}

/// Exact law of the sample sum. Items are scanned in order; with `k` of the
/// first `i` already taken, item `i + 1` enters the sample with probability
/// `(m - k) / (n - i)`.
pub fn sampling_exact(values: &[u64], m: usize) -> Result<Pmf> {
    check(values, m)?;
    let n = values.len();
    let total = values.iter().try_fold(0u64, |a, &c| a.checked_add(c));
    let states = total.map_or(u64::MAX, |t| (m as u64 + 1).saturating_mul(t.saturating_add(1)));
    let total = total.unwrap_or(u64::MAX);
    if states > SAMPLING_STATE_CAP {
        return Err(Error::CapExceeded {
            what: "sampling states",
            limit: SAMPLING_STATE_CAP,
        });
    }
    let width = total as usize + 1;
    // table[k * width + s] = P(k chosen so far, running sum s)
    let mut table = vec![0.0; (m + 1) * width];
    table[0] = 1.0;
    let mut reach = 0usize;
    for (i, &c) in values.iter().enumerate() {
        let c = c as usize;
        let left = (n - i) as f64;
        let mut next = vec![0.0; (m + 1) * width];
        for k in 0..=m.min(i) {
            let take = (m - k) as f64 / left;
            for s in 0..=reach {
                let p = table[k * width + s];
                if p == 0.0 {
                    continue;
                }
                if k < m {
                    next[(k + 1) * width + s + c] += p * take;
                }
                next[k * width + s] += p * (1.0 - take);
            }
        }
        reach += c;
        table = next;
    }
    Pmf::from_weights(&table[m * width..])
}
