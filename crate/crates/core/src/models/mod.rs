//! Generative models with exact laws where feasible and seeded simulators
//! otherwise.
//!
//! Every replicate draws from its own ChaCha8 stream: the generator is
//! seeded from the run seed and its stream id is set to the replicate index.
//! Count tables are merged by integer addition, so results do not depend on
//! how replicates are spread over threads.

mod epidemic;
mod extremes;
mod lightbulb;
mod sampling;

pub use epidemic::{epidemic_moments_fixed_degree, epidemic_simulate, DegreeSpec, EpidemicLaws};
pub use extremes::{extremes_exact_moments, extremes_simulate, extremes_window_stats, WindowStats};
pub use lightbulb::{lightbulb_exact, lightbulb_simulate, LIGHTBULB_CAP};
pub use sampling::{sampling_exact, SAMPLING_STATE_CAP};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{Pmf, TruncationPolicy};
use crate::error::{check_positive, check_unit_open_closed, Error, Result};

/// Zero-inflated Poisson: `I_p Z` with `Z ~ Po(λ)` and `I_p ~ Be(p)`.
pub fn zip_pmf(p: f64, lambda: f64, policy: TruncationPolicy) -> Result<Pmf> {
    check_unit_open_closed("p", p)?;
    let z = Pmf::poisson(lambda, policy)?;
    z.thin(p)
}

/// Parameters of one of the supported generative models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    Zip { p: f64, lambda: f64 },
    Lightbulb { n: u64 },
    Epidemic { n: usize, degrees: DegreeSpec, q: f64 },
    Extremes { n: u64, m: u64, lambda: f64 },
    Sampling { values: Vec<u64>, m: usize },
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::Zip { p, lambda } => {
                check_unit_open_closed("p", *p)?;
                check_positive("lambda", *lambda)
            }
            ModelSpec::Lightbulb { n } => {
                if *n < 2 || n % 2 == 1 {
                    return Err(Error::param("n", format!("must be even and >= 2, got {n}")));
                }
                Ok(())
            }
            ModelSpec::Epidemic { n, degrees, q } => {
                epidemic::check(*n, degrees)?;
                check_unit_open_closed("q", *q)
            }
            ModelSpec::Extremes { n, m, lambda } => extremes::check(*n, *m, *lambda),
            ModelSpec::Sampling { values, m } => sampling::check(values, *m),
        }
    }
}

/// Frequency table of a Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalLaw {
    pub counts: Vec<u64>,
    pub reps: u64,
    pub seed: u64,
    #[serde(skip)]
    pub pmf: Pmf,
    /// `sqrt(#observed values / reps)`.
    pub tv_stderr_proxy: f64,
}

impl EmpiricalLaw {
    pub fn from_counts(counts: Vec<u64>, seed: u64) -> Result<Self> {
        let reps: u64 = counts.iter().sum();
        if reps == 0 {
            return Err(Error::param("reps", "must be >= 1"));
        }
        let w: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        let pmf = Pmf::from_weights(&w)?;
        let observed = counts.iter().filter(|&&c| c > 0).count();
        let mut counts = counts;
        while counts.last() == Some(&0) {
            counts.pop();
        }
        Ok(EmpiricalLaw {
            counts,
            reps,
            seed,
            pmf,
            tv_stderr_proxy: (observed as f64 / reps as f64).sqrt(),
        })
    }

    pub fn mean(&self) -> f64 {
        self.pmf.mean()
    }

    pub fn variance(&self) -> f64 {
        self.pmf.variance()
    }

    /// Standard error of the sample mean.
    pub fn mean_stderr(&self) -> f64 {
        (self.variance() / self.reps as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalTv {
    pub tv_hat: f64,
    pub slack: f64,
}

/// Half-L1 distance of the empirical law to `target` (plus half the
/// target's omitted mass), with fluctuation allowance
/// `sqrt(|union of supports| / reps)`.
pub fn empirical_tv(e: &EmpiricalLaw, target: &Pmf) -> EmpiricalTv {
    let len = e.counts.len().max(target.probs().len());
    let reps = e.reps as f64;
    let mut l1 = 0.0;
    let mut support = 0usize;
    for j in 0..len {
        let a = e.counts.get(j).map_or(0.0, |&c| c as f64 / reps);
        let b = target.mass(j);
        if a > 0.0 || b > 0.0 {
            support += 1;
        }
        l1 += (a - b).abs();
    }
    EmpiricalTv {
        tv_hat: 0.5 * (l1 + target.omitted_mass()),
        slack: (support as f64 / reps).sqrt(),
    }
}

/// Draws `reps` values from `d` (by inversion) as an empirical law.
pub fn sample_pmf(d: &Pmf, reps: u64, seed: u64) -> Result<EmpiricalLaw> {
    let cdf: Vec<f64> = d
        .probs()
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let total = *cdf.last().unwrap_or(&1.0);
    let tables = simulate_tables(reps, seed, 1, |rng, out| {
        let u: f64 = rand::Rng::random::<f64>(rng) * total;
        let j = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        out[0] = j;
    })?;
    EmpiricalLaw::from_counts(tables.into_iter().next().unwrap_or_default(), seed)
}

/// The generator used for replicate `rep` of a run seeded with `seed`.
pub fn replicate_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

const CHUNK: u64 = 4096;

/// Runs `reps` replicates of `f`, each writing `k` non-negative integer
/// outcomes, and returns one count table per outcome. Work is split into
/// fixed chunks on the current rayon pool.
pub fn simulate_tables<F>(reps: u64, seed: u64, k: usize, f: F) -> Result<Vec<Vec<u64>>>
where
    F: Fn(&mut ChaCha8Rng, &mut [usize]) + Sync,
{
    if reps == 0 {
        return Err(Error::param("reps", "must be >= 1"));
    }
    let chunks = reps.div_ceil(CHUNK);
    let merged = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut tables = vec![Vec::<u64>::new(); k];
            let mut out = vec![0usize; k];
            for rep in c * CHUNK..((c + 1) * CHUNK).min(reps) {
                let mut rng = replicate_rng(seed, rep);
                f(&mut rng, &mut out);
                for (t, &v) in tables.iter_mut().zip(&out) {
                    if t.len() <= v {
                        t.resize(v + 1, 0);
                    }
                    t[v] += 1;
                }
            }
            tables
        })
        .reduce(
            || vec![Vec::new(); k],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    if x.len() < y.len() {
                        x.resize(y.len(), 0);
                    }
                    for (u, v) in x.iter_mut().zip(y) {
                        *u += v;
                    }
                }
                a
            },
        );
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::tv_distance;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zip_examples() {
        let policy = TruncationPolicy::default();
        let z = zip_pmf(1.0, 2.0, policy).unwrap();
        let p = Pmf::poisson(2.0, policy).unwrap();
        assert!(tv_distance(&z, &p).value < 1e-15);
        let z = zip_pmf(0.9, 2.0, policy).unwrap();
        assert_abs_diff_eq!(z.mass(0), 0.1 + 0.9 * (-2.0f64).exp(), epsilon = 1e-15);
        let (m, v) = zip_pmf(0.9, 1.0, policy).unwrap().moments();
        assert_abs_diff_eq!(m, 0.9, epsilon = 1e-11);
        assert_abs_diff_eq!(v, 0.99, epsilon = 1e-10);
        assert!(zip_pmf(0.0, 1.0, policy).is_err());
        assert!(zip_pmf(0.5, -1.0, policy).is_err());
    }

    #[test]
    fn exact_frequencies_give_zero_tv() {
        let e = EmpiricalLaw::from_counts(vec![1, 2, 1], 0).unwrap();
        let t = Pmf::from_weights(&[1.0, 2.0, 1.0]).unwrap();
        let r = empirical_tv(&e, &t);
        assert_eq!(r.tv_hat, 0.0);
        assert_abs_diff_eq!(r.slack, (3.0f64 / 4.0).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn sampled_poisson_close_to_itself() {
        let p = Pmf::poisson(2.0, TruncationPolicy::default()).unwrap();
        let e = sample_pmf(&p, 100_000, 11).unwrap();
        assert_eq!(e.reps, 100_000);
        let r = empirical_tv(&e, &p);
        assert!(r.tv_hat <= 3.0 * r.slack, "{r:?}");
    }

    #[test]
    fn sampled_zip_matches_exact_distance() {
        let policy = TruncationPolicy::default();
        let z = zip_pmf(0.9, 2.0, policy).unwrap();
        let e = sample_pmf(&z, 100_000, 5).unwrap();
        let r = empirical_tv(&e, &Pmf::poisson(2.0, policy).unwrap());
        assert!((r.tv_hat - 0.086_466_471_676_338_74).abs() <= 3.0 * r.slack, "{r:?}");
    }

    #[test]
    fn tables_do_not_depend_on_pool_size() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    simulate_tables(10_000, 3, 1, |rng, out| {
                        out[0] = rand::Rng::random_range(rng, 0..7);
                    })
                    .unwrap()
                })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn spec_validation() {
        assert!(ModelSpec::Zip { p: 0.5, lambda: 1.0 }.validate().is_ok());
        assert!(ModelSpec::Lightbulb { n: 3 }.validate().is_err());
        assert!(ModelSpec::Extremes { n: 10, m: 11, lambda: 1.0 }.validate().is_err());
        assert!(ModelSpec::Sampling { values: vec![0, 0], m: 1 }.validate().is_err());
        let e = ModelSpec::Epidemic {
            n: 10,
            degrees: DegreeSpec::Fixed { d: 3 },
            q: 0.9,
        };
        assert!(e.validate().is_ok());
        let j = serde_json::to_string(&e).unwrap();
        assert_eq!(serde_json::from_str::<ModelSpec>(&j).unwrap(), e);
    }
}
