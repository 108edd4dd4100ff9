use alloc::vec::Vec;

use libm::sqrt;
use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};

use crate::designs::RngStream;
use crate::{Error, Result};

/// Distribution of `Y[1.i]` (or of the pair `(Y[1.i], Y[2.i])`).
///
/// Normal deviates come from `rand_distr`'s ziggurat sampler, Gamma from
/// its Marsaglia-Tsang rejection sampler (shape below one is handled by the
/// usual `U^(1/shape)` boost).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessLaw {
    Normal { mu: f64, sigma: f64 },
    Gamma { shape: f64, scale: f64 },
    /// `weight * U(lo1, hi1) + (1 - weight) * U(lo2, hi2)`.
    UniformMixture { weight: f64, lo1: f64, hi1: f64, lo2: f64, hi2: f64 },
    Bernoulli { p: f64 },
    /// Draws both potential values from the 2x2 table with margins `p1`,
    /// `p2` and correlation `rho`.
    CorrelatedBernoulliPair { p1: f64, p2: f64, rho: f64 },
}

impl ProcessLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ProcessLaw::Normal { mu, sigma } => mu.is_finite() && sigma > 0.0 && sigma.is_finite(),
            ProcessLaw::Gamma { shape, scale } => {
                shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()
            }
            ProcessLaw::UniformMixture { weight, lo1, hi1, lo2, hi2 } => {
                (0.0..=1.0).contains(&weight)
                    && [lo1, hi1, lo2, hi2].iter().all(|v| v.is_finite())
                    && lo1 < hi1
                    && lo2 < hi2
            }
            ProcessLaw::Bernoulli { p } => p > 0.0 && p < 1.0,
            ProcessLaw::CorrelatedBernoulliPair { .. } => return self.joint_table().map(|_| ()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain("invalid process law parameters"))
        }
    }

    pub fn is_binary(&self) -> bool {
        matches!(self, ProcessLaw::Bernoulli { .. } | ProcessLaw::CorrelatedBernoulliPair { .. })
    }

    pub fn is_pair(&self) -> bool {
        matches!(self, ProcessLaw::CorrelatedBernoulliPair { .. })
    }

    /// `[p11, p10, p01, p00]` for the pair law, where `p11 = p1 p2 + rho
    /// sqrt(p1 (1-p1) p2 (1-p2))`.
    pub fn joint_table(&self) -> Result<[f64; 4]> {
        let ProcessLaw::CorrelatedBernoulliPair { p1, p2, rho } = *self else {
            return Err(Error::Domain("joint table exists only for the correlated Bernoulli pair"));
        };
        if !(p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 < 1.0 && (-1.0..=1.0).contains(&rho)) {
            return Err(Error::Domain("pair law needs 0 < p1, p2 < 1 and -1 <= rho <= 1"));
        }
        let p11 = p1 * p2 + rho * sqrt(p1 * (1.0 - p1) * p2 * (1.0 - p2));
        let cells = [p11, p1 - p11, p2 - p11, 1.0 - p1 - p2 + p11];
        if cells.iter().any(|&c| c < -1e-12) {
            return Err(Error::Domain("correlation is out of range for these margins"));
        }
        Ok(cells.map(|c| c.max(0.0)))
    }
}

/// `count` IID draws from a univariate law.
pub fn random_deviates(law: &ProcessLaw, count: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    law.validate()?;
    let out = match *law {
        ProcessLaw::Normal { mu, sigma } => {
            let d = Normal::new(mu, sigma).map_err(|_| Error::Domain("invalid normal law"))?;
            (0..count).map(|_| d.sample(rng)).collect()
        }
        ProcessLaw::Gamma { shape, scale } => {
            let d = Gamma::new(shape, scale).map_err(|_| Error::Domain("invalid gamma law"))?;
            (0..count).map(|_| d.sample(rng)).collect()
        }
        ProcessLaw::UniformMixture { weight, lo1, hi1, lo2, hi2 } => (0..count)
            .map(|_| {
                if rng.random::<f64>() < weight {
                    rng.random_range(lo1..hi1)
                } else {
                    rng.random_range(lo2..hi2)
                }
            })
            .collect(),
        ProcessLaw::Bernoulli { p } => {
            (0..count).map(|_| if rng.random::<f64>() < p { 1.0 } else { 0.0 }).collect()
        }
        ProcessLaw::CorrelatedBernoulliPair { .. } => {
            return Err(Error::Domain("use random_pairs for the correlated Bernoulli pair"))
        }
    };
    Ok(out)
}

/// `count` IID `(y1, y2)` draws from the correlated Bernoulli pair law.
pub fn random_pairs(law: &ProcessLaw, count: usize, rng: &mut RngStream) -> Result<Vec<(f64, f64)>> {
    let [p11, p10, p01, _] = law.joint_table()?;
    Ok((0..count)
        .map(|_| {
            let u: f64 = rng.random();
            if u < p11 {
                (1.0, 1.0)
            } else if u < p11 + p10 {
                (1.0, 0.0)
            } else if u < p11 + p10 + p01 {
                (0.0, 1.0)
            } else {
                (0.0, 0.0)
            }
        })
        .collect())
}
