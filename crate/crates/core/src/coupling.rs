//! Joint laws of `(Y, Y*)` and the relaxed monotonicity conditions they are
//! checked against.
//!
//! Two conditions are supported, each reduced to the largest admissible `p`:
//!
//! * negative dependence: `P(Y* <= Y + 1 | Y* >= x) >= p` for all `x`;
//! * positive dependence with slack `Z`:
//!   `P(Y* >= Y + 1 - Z | Y + 1 - Z >= x) >= p` for all `x`.
//!
//! Conditioning events of probability zero are skipped.

use serde::{Deserialize, Serialize};

use crate::dist::{mixture, Pmf, TruncationPolicy};
use crate::error::{check_non_negative, check_positive, check_unit_open_closed, Error, Result};

/// Marginal tolerance used by [`validate_coupling`].
pub const COUPLING_TOL: f64 = 1e-10;

/// Dense joint table `joint[y][y_star] = P(Y = y, Y* = y_star)`, optionally
/// with the conditional law of a slack variable `Z` for every cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeBiasCoupling {
    pub joint: Vec<Vec<f64>>,
    /// `z_given[y][y_star][z] = P(Z = z | Y = y, Y* = y_star)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_given: Option<Vec<Vec<Vec<f64>>>>,
}

impl SizeBiasCoupling {
    pub fn new(joint: Vec<Vec<f64>>) -> Result<Self> {
        let c = SizeBiasCoupling {
            joint,
            z_given: None,
        };
        c.check_shape()?;
        Ok(c)
    }

    /// `Y` and `Y*` drawn independently from their marginals.
    pub fn independent(base: &Pmf) -> Result<Self> {
        let star = base.size_bias()?;
        let joint = base
            .probs()
            .iter()
            .map(|&py| star.probs().iter().map(|&ps| py * ps).collect())
            .collect();
        Self::new(joint)
    }

    /// The deterministic coupling `Y* = Y + k`.
    pub fn shifted(base: &Pmf, k: usize) -> Self {
        let cols = base.cap() + k + 1;
        let joint = base
            .probs()
            .iter()
            .enumerate()
            .map(|(y, &p)| {
                let mut row = vec![0.0; cols];
                row[y + k] = p;
                row
            })
            .collect();
        SizeBiasCoupling {
            joint,
            z_given: None,
        }
    }

    /// Attaches `Z ≡ k` to every cell.
    pub fn with_constant_slack(mut self, k: usize) -> Self {
        let mut law = vec![0.0; k + 1];
        law[k] = 1.0;
        self.z_given = Some(
            self.joint
                .iter()
                .map(|row| vec![law.clone(); row.len()])
                .collect(),
        );
        self
    }

    pub fn with_slack(mut self, z_given: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        self.z_given = Some(z_given);
        self.check_shape()?;
        Ok(self)
    }

    fn check_shape(&self) -> Result<()> {
        if self.joint.is_empty() {
            return Err(Error::DimensionMismatch("joint table has no rows".into()));
        }
        let cols = self.joint[0].len();
        if cols == 0 {
            return Err(Error::DimensionMismatch("joint table has no columns".into()));
        }
        for (y, row) in self.joint.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {y} has {} columns, expected {cols}",
                    row.len()
                )));
            }
            for &v in row {
                check_non_negative("joint", v)?;
            }
        }
        if let Some(z) = &self.z_given {
            if z.len() != self.joint.len() || z.iter().any(|r| r.len() != cols) {
                return Err(Error::DimensionMismatch(
                    "z_given must match the joint table cell for cell".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.joint.len()
    }

    pub fn cols(&self) -> usize {
        self.joint[0].len()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.joint.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols()];
        for row in &self.joint {
            for (s, v) in row.iter().enumerate() {
                out[s] += v;
            }
        }
        out
    }

    /// `E[Y* | Y = y]` for rows with positive mass.
    pub fn conditional_star_mean(&self, y: usize) -> Option<f64> {
        let row = &self.joint[y];
        let mass: f64 = row.iter().sum();
        (mass > 0.0).then(|| row.iter().enumerate().map(|(s, v)| s as f64 * v).sum::<f64>() / mass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingReport {
    /// Half-L1 distance between the row sums and the base law.
    pub y_discrepancy: f64,
    /// Half-L1 distance between the column sums and the size-biased base.
    pub star_discrepancy: f64,
    /// Largest deviation of a conditional `Z` law from total mass 1.
    pub slack_discrepancy: f64,
    pub passes: bool,
}

fn half_l1(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..len).map(|i| (get(a, i) - get(b, i)).abs()).sum::<f64>()
}

pub fn validate_coupling(c: &SizeBiasCoupling, base: &Pmf) -> Result<CouplingReport> {
    c.check_shape()?;
    let star = base.size_bias()?;
    let y_discrepancy = half_l1(&c.row_sums(), base.probs());
    let star_discrepancy = half_l1(&c.col_sums(), star.probs());
    let slack_discrepancy = c.z_given.as_ref().map_or(0.0, |z| {
        z.iter()
            .flatten()
            .map(|law| (law.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    });
    Ok(CouplingReport {
        y_discrepancy,
        star_discrepancy,
        slack_discrepancy,
        passes: y_discrepancy <= COUPLING_TOL
            && star_discrepancy <= COUPLING_TOL
            && slack_discrepancy <= COUPLING_TOL,
    })
}

/// Largest `p` with `P(Y* <= Y + 1 | Y* >= x) >= p` for every `x`.
pub fn nd_condition_p(c: &SizeBiasCoupling) -> f64 {
    let cols = c.cols();
    let mut good = vec![0.0; cols];
    let mut all = vec![0.0; cols];
    for (y, row) in c.joint.iter().enumerate() {
        for (s, &v) in row.iter().enumerate() {
            all[s] += v;
            if s <= y + 1 {
                good[s] += v;
            }
        }
    }
    let (mut num, mut den, mut p) = (0.0, 0.0, 1.0f64);
    for s in (0..cols).rev() {
        num += good[s];
        den += all[s];
        if den > 0.0 {
            p = p.min(num / den);
        }
    }
    p.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositiveCondition {
    pub p_max: f64,
    pub mean_z: f64,
}

/// Largest `p` with `P(Y* >= Y + 1 - Z | Y + 1 - Z >= x) >= p` for every
/// `x`, together with `E Z`.
pub fn pd_condition_p(c: &SizeBiasCoupling) -> Result<PositiveCondition> {
    let z_given = c.z_given.as_ref().ok_or(Error::MissingSlack)?;
    let max_z = z_given.iter().flatten().map(Vec::len).max().unwrap_or(1);
    // t = y + 1 - z ranges over [1 - max_z, rows]; index with an offset
    let offset = max_z as i64;
    let width = (c.rows() as i64 + 1 + offset + 1) as usize;
    let mut good = vec![0.0; width];
    let mut all = vec![0.0; width];
    let mut mean_z = 0.0;
    for (y, row) in c.joint.iter().enumerate() {
        for (s, &v) in row.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            for (z, &pz) in z_given[y][s].iter().enumerate() {
                let w = v * pz;
                if w == 0.0 {
                    continue;
                }
                mean_z += w * z as f64;
                let t = y as i64 + 1 - z as i64;
                let idx = (t + offset) as usize;
                all[idx] += w;
                if s as i64 >= t {
                    good[idx] += w;
                }
            }
        }
    }
    let (mut num, mut den, mut p) = (0.0, 0.0, 1.0f64);
    for idx in (0..width).rev() {
        num += good[idx];
        den += all[idx];
        if den > 0.0 {
            p = p.min(num / den);
        }
    }
    Ok(PositiveCondition {
        p_max: p.clamp(0.0, 1.0),
        mean_z,
    })
}

/// Coupling for the zero-inflated Poisson `Y = I_p Z`, `Y* = Z + 1`.
pub fn zip_coupling(p: f64, lambda: f64, policy: TruncationPolicy) -> Result<SizeBiasCoupling> {
    check_unit_open_closed("p", p)?;
    check_positive("lambda", lambda)?;
    let z = Pmf::poisson(lambda, policy)?;
    let n = z.cap();
    let mut joint = vec![vec![0.0; n + 2]; n + 1];
    for (k, &pz) in z.probs().iter().enumerate() {
        joint[k][k + 1] += p * pz;
        joint[0][k + 1] += (1.0 - p) * pz;
    }
    SizeBiasCoupling::new(joint)
}

/// Admissible `p` for `Y = ξW + X` with `ξ ~ Be(q)`, `E W = ν`, `E X = φ`:
/// `q² ν / (q ν + φ)`.
pub fn contaminated_p(q: f64, nu: f64, phi: f64) -> Result<f64> {
    check_unit_open_closed("q", q)?;
    check_positive("nu", nu)?;
    check_non_negative("phi", phi)?;
    Ok(q * q * nu / (q * nu + phi))
}

/// Law of `Y*` for `Y = ξW + X` through the mixture that replaces `ξW` by
/// `W*` with probability `qν / (qν + φ)` and `X` by `X*` otherwise.
pub fn mixture_size_bias(q: f64, w: &Pmf, x: &Pmf) -> Result<Pmf> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::param("q", format!("must lie in [0, 1], got {q}")));
    }
    let signal = q * w.mean();
    let noise = x.mean();
    if signal <= 0.0 && noise <= 0.0 {
        return Err(Error::ZeroMean);
    }
    let weight = signal / (signal + noise);
    let left = if signal > 0.0 {
        Some(w.size_bias()?.convolve(x))
    } else {
        None
    };
    let right = if noise > 0.0 {
        Some(w.thin(q)?.convolve(&x.size_bias()?))
    } else {
        None
    };
    match (left, right) {
        (Some(l), Some(r)) => mixture(weight, &l, &r),
        (Some(l), None) => Ok(l),
        (None, Some(r)) => Ok(r),
        (None, None) => unreachable!("one of the means is positive"),
    }
}

/// Largest `p <= 1` with `p P(Y* >= k + 1) <= P(Y >= k)` for all `k`, i.e.
/// with `I_p Y* <=_st Y + 1`. Depends on the marginal law only.
pub fn ordering_p(d: &Pmf) -> Result<f64> {
    let star = d.size_bias()?;
    let ty = d.upper_tails();
    let ts = star.upper_tails();
    let mut p = 1.0f64;
    for k in 0..ty.len() {
        let den = ts.get(k + 1).copied().unwrap_or(0.0);
        if den > 0.0 {
            p = p.min(ty[k] / den);
        }
    }
    Ok(p)
}
