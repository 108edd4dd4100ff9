use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand_distr::{Distribution, Normal};

use super::laws::{random_deviates, random_pairs, ProcessLaw};
use crate::designs::RngStream;
use crate::experiment::{Hypothesis, PotentialTable};
use crate::stats::mean;
use crate::{Error, Result};

/// How `y[2.i]` is built from `y[1.i]`:
///
/// ```text
/// y2_i = slope * y1_i + shift + e_i  [- (slope - 1) * ybar1 if preserve_mean]
/// ```
///
/// with `e_i ~ N(0, noise_sd^2)`, centered (`e_i - ebar`) when
/// `center_noise` is set. Pair laws draw `y2` themselves and take the
/// identity effect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Effect {
    pub slope: f64,
    pub shift: f64,
    pub noise_sd: f64,
    pub center_noise: bool,
    pub preserve_mean: bool,
}

impl Effect {
    pub const IDENTITY: Effect =
        Effect { slope: 1.0, shift: 0.0, noise_sd: 0.0, center_noise: false, preserve_mean: false };

    pub fn shift(c: f64) -> Self {
        Self { shift: c, ..Self::IDENTITY }
    }

    pub fn scale(a: f64) -> Self {
        Self { slope: a, ..Self::IDENTITY }
    }

    pub fn with_noise(self, sd: f64, centered: bool) -> Self {
        Self { noise_sd: sd, center_noise: centered, ..self }
    }

    pub fn mean_preserving(self) -> Self {
        Self { preserve_mean: true, ..self }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    fn validate(&self) -> Result<()> {
        if !(self.slope.is_finite() && self.shift.is_finite() && self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::Domain("effect parameters must be finite with noise_sd >= 0"));
        }
        Ok(())
    }

    fn apply(&self, y1: &[f64], rng: &mut RngStream) -> Result<Vec<f64>> {
        let mut noise = alloc::vec![0.0; y1.len()];
        if self.noise_sd > 0.0 {
            let d = Normal::new(0.0, self.noise_sd).map_err(|_| Error::Domain("invalid noise law"))?;
            for e in &mut noise {
                *e = d.sample(rng);
            }
            if self.center_noise {
                let m = mean(&noise);
                noise.iter_mut().for_each(|e| *e -= m);
            }
        }
        let correction = if self.preserve_mean { (self.slope - 1.0) * mean(y1) } else { 0.0 };
        Ok(y1
            .iter()
            .zip(&noise)
            .map(|(&y, &e)| self.slope * y + self.shift + e - correction)
            .collect())
    }
}

/// A generative setting for the size/power harness: a census population of
/// `n1 + n2` units, all sampled, with a uniform CRD assigning `n1` of them
/// to treatment 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub n1: usize,
    pub n2: usize,
    pub law: ProcessLaw,
    pub effect: Effect,
    /// Redraw the population until `sum y1 == sum y2` exactly.
    pub balance_means: bool,
    /// For mixture laws: the population fixed for the randomization row is
    /// redrawn until exactly this many values come from the second
    /// component.
    pub fixed_outliers: Option<usize>,
    /// Null hypotheses stated as true; everything they imply is true too.
    pub hypothesis_truth: Vec<Hypothesis>,
    /// Population used for the randomization row instead of a draw.
    pub fixed_y: Option<PotentialTable>,
}

impl Scenario {
    pub fn n_units(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn is_binary(&self) -> bool {
        self.law.is_binary()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 == 0 || self.n2 == 0 {
            return Err(Error::Domain("both arms need at least one unit"));
        }
        self.law.validate()?;
        self.effect.validate()?;
        if self.law.is_pair() && !self.effect.is_identity() {
            return Err(Error::Domain("pair laws draw both potential values; use the identity effect"));
        }
        if self.fixed_outliers.is_some() && !matches!(self.law, ProcessLaw::UniformMixture { .. }) {
            return Err(Error::Domain("fixed_outliers applies to mixture laws only"));
        }
        if let Some(t) = &self.fixed_y {
            if t.n_units() != self.n_units() {
                return Err(Error::LengthMismatch { expected: self.n_units(), found: t.n_units() });
            }
        }
        Ok(())
    }

    /// Whether `h` holds under the scenario.
    pub fn is_true(&self, h: Hypothesis) -> bool {
        self.hypothesis_truth.iter().any(|&stated| stated.implies(h))
    }
}

const MAX_REDRAWS: usize = 1_000_000;

fn draw_once(scenario: &Scenario, rng: &mut RngStream) -> Result<PotentialTable> {
    let n = scenario.n_units();
    if scenario.law.is_pair() {
        let (y1, y2) = random_pairs(&scenario.law, n, rng)?.into_iter().unzip();
        return PotentialTable::new(y1, y2);
    }
    let y1 = random_deviates(&scenario.law, n, rng)?;
    let y2 = scenario.effect.apply(&y1, rng)?;
    PotentialTable::new(y1, y2)
}

/// One draw of the census population: `y1` IID from the law, `y2` from the
/// effect (or jointly for pair laws). With `balance_means` the draw is
/// repeated until both potential vectors have the same sum.
pub fn generate_population(scenario: &Scenario, rng: &mut RngStream) -> Result<PotentialTable> {
    scenario.validate()?;
    for _ in 0..MAX_REDRAWS {
        let table = draw_once(scenario, rng)?;
        if !scenario.balance_means || sums_equal(&table) {
            return Ok(table);
        }
    }
    Err(Error::NonConvergence("no population with equal potential means was drawn"))
}

fn sums_equal(table: &PotentialTable) -> bool {
    let s1: f64 = table.potentials(crate::experiment::Treatment::One).iter().sum();
    let s2: f64 = table.potentials(crate::experiment::Treatment::Two).iter().sum();
    s1 == s2
}

/// The population held fixed for the randomization row: `fixed_y` if
/// present, otherwise a draw honoring `fixed_outliers`.
pub fn fixed_population(scenario: &Scenario, rng: &mut RngStream) -> Result<PotentialTable> {
    scenario.validate()?;
    if let Some(t) = &scenario.fixed_y {
        return Ok(t.clone());
    }
    let Some(k) = scenario.fixed_outliers else {
        return generate_population(scenario, rng);
    };
    let ProcessLaw::UniformMixture { lo2, .. } = scenario.law else { unreachable!() };
    for _ in 0..MAX_REDRAWS {
        let table = generate_population(scenario, rng)?;
        let large = table
            .potentials(crate::experiment::Treatment::One)
            .iter()
            .filter(|&&v| v >= lo2)
            .count();
        if large == k {
            return Ok(table);
        }
    }
    Err(Error::NonConvergence("no population with the requested number of outliers was drawn"))
}

fn bits(s: &str) -> Vec<f64> {
    s.split_whitespace().map(|b| if b == "1" { 1.0 } else { 0.0 }).collect()
}

/// Population with the given counts of `(1,1)`, `(1,0)`, `(0,1)` and
/// `(0,0)` units, in that order. Unit order is irrelevant under a uniform
/// CRD.
fn from_cell_counts(n11: usize, n10: usize, n01: usize, n00: usize) -> PotentialTable {
    let mut y1 = Vec::new();
    let mut y2 = Vec::new();
    for (count, a, b) in [(n11, 1.0, 1.0), (n10, 1.0, 0.0), (n01, 0.0, 1.0), (n00, 0.0, 0.0)] {
        y1.extend(core::iter::repeat_n(a, count));
        y2.extend(core::iter::repeat_n(b, count));
    }
    PotentialTable::new(y1, y2).expect("cell counts give equal-length finite vectors")
}

/// Fixed binary populations of the binary scenarios.
///
/// The `n = 20` populations are listed element by element. For `n = 100`
/// only summaries are known, so the populations are the unique cell counts
/// matching them:
///
/// - `t5.sc6`: `y1 = y2` with 32 ones.
/// - `t5.sc7`: both means `33/100`, correlation `0.186`, so 15 `(1,1)`,
///   18 `(1,0)`, 18 `(0,1)` and 49 `(0,0)` units.
/// - `t6.sc6`: means `24/100` and `45/100`, correlation `0.386`, so 19
///   `(1,1)`, 5 `(1,0)`, 26 `(0,1)` and 50 `(0,0)` units.
pub fn fixed_binary_vectors(table_id: u8, scenario_id: u8) -> Result<PotentialTable> {
    let table = match (table_id, scenario_id) {
        (3, 6) => {
            let y = bits("0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 1 1 0 1 0");
            PotentialTable::new(y.clone(), y)?
        }
        (3, 7) => PotentialTable::new(
            bits("1 0 0 1 0 1 0 1 0 0 1 0 0 1 0 0 0 0 0 0"),
            bits("0 0 0 0 1 1 0 1 0 0 1 0 0 1 1 0 0 0 0 0"),
        )?,
        (4, 6) => PotentialTable::new(
            bits("0 0 0 0 0 1 0 0 1 0 1 0 0 0 0 1 1 0 1 0"),
            bits("0 1 1 1 1 1 1 0 1 0 1 1 0 0 1 1 1 0 1 1"),
        )?,
        (5, 6) => from_cell_counts(32, 0, 0, 68),
        (5, 7) => from_cell_counts(15, 18, 18, 49),
        (6, 6) => from_cell_counts(19, 5, 26, 50),
        _ => {
            return Err(Error::NotFound(format!(
                "no fixed binary population for t{table_id}.sc{scenario_id}"
            )))
        }
    };
    Ok(table)
}

/// Identifiers of the built-in scenarios, `t3.sc1` through `t6.sc6`.
pub fn scenario_ids() -> Vec<String> {
    let mut ids = Vec::new();
    for (table, count) in [(3u8, 7u8), (4, 6), (5, 7), (6, 6)] {
        for sc in 1..=count {
            ids.push(format!("t{table}.sc{sc}"));
        }
    }
    ids
}

fn parse_id(id: &str) -> Option<(u8, u8)> {
    let rest = id.strip_prefix('t')?;
    let (table, sc) = rest.split_once(".sc")?;
    Some((table.parse().ok()?, sc.parse().ok()?))
}

const NORMAL_10_2: ProcessLaw = ProcessLaw::Normal { mu: 10.0, sigma: 2.0 };
const GAMMA_1_5: ProcessLaw = ProcessLaw::Gamma { shape: 1.0, scale: 5.0 };
const MIXTURE: ProcessLaw =
    ProcessLaw::UniformMixture { weight: 0.9, lo1: 0.0, hi1: 20.0, lo2: 200.0, hi2: 201.0 };
const BIN_028: ProcessLaw = ProcessLaw::Bernoulli { p: 0.28 };

/// A built-in scenario by identifier, or `NotFound` listing the known ones.
pub fn scenario(id: &str) -> Result<Scenario> {
    let not_found = || Error::NotFound(format!("unknown scenario `{id}`; known: {}", scenario_ids().join(", ")));
    let (table, sc) = parse_id(id).ok_or_else(not_found)?;
    let half = match table {
        3 | 4 => 10,
        5 | 6 => 50,
        _ => return Err(not_found()),
    };
    let size = table == 3 || table == 5;
    use Hypothesis::{Dup, Eup, RAs, Up};
    let (law, effect, truth, description): (ProcessLaw, Effect, Vec<Hypothesis>, &str) = if size {
        match sc {
            1 => (NORMAL_10_2, Effect::IDENTITY, alloc::vec![Up], "Y1 ~ N(10, 2^2), Y2 = Y1"),
            2 => (GAMMA_1_5, Effect::IDENTITY, alloc::vec![Up], "Y1 ~ Gamma(shape 1, scale 5), Y2 = Y1"),
            3 => (MIXTURE, Effect::IDENTITY, alloc::vec![Up], "Y1 ~ 0.9 U(0,20) + 0.1 U(200,201), Y2 = Y1"),
            4 => (
                NORMAL_10_2,
                Effect::IDENTITY.with_noise(3.0, true),
                alloc::vec![Eup, RAs],
                "Y1 ~ N(10, 2^2), Y2 = Y1 + E - mean(E), E ~ N(0, 3^2)",
            ),
            5 => (
                GAMMA_1_5,
                Effect::scale(2.0).mean_preserving(),
                alloc::vec![Eup, RAs],
                "Y1 ~ Gamma(shape 1, scale 5), Y2 = 2 Y1 - mean(Y1)",
            ),
            6 => (BIN_028, Effect::IDENTITY, alloc::vec![Up], "Y1 ~ bin(1, 0.28), Y2 = Y1"),
            7 => (
                ProcessLaw::CorrelatedBernoulliPair { p1: 0.28, p2: 0.28, rho: 0.37 },
                Effect::IDENTITY,
                alloc::vec![Dup, RAs],
                "Y1, Y2 ~ bin(1, 0.28), corr 0.37, redrawn until mean(Y1) = mean(Y2)",
            ),
            _ => return Err(not_found()),
        }
    } else {
        let small = table == 4;
        let shift = if small { 2.0 } else { 1.0 };
        match sc {
            1 => (NORMAL_10_2, Effect::shift(shift), alloc::vec![], if small { "Y1 ~ N(10, 2^2), Y2 = Y1 + 2" } else { "Y1 ~ N(10, 2^2), Y2 = Y1 + 1" }),
            2 => (
                NORMAL_10_2,
                Effect::shift(shift).with_noise(3.0, true),
                alloc::vec![],
                if small {
                    "Y1 ~ N(10, 2^2), Y2 = Y1 + 2 + E - mean(E), E ~ N(0, 3^2)"
                } else {
                    "Y1 ~ N(10, 2^2), Y2 = Y1 + 1 + E - mean(E), E ~ N(0, 3^2)"
                },
            ),
            3 => (
                NORMAL_10_2,
                Effect::scale(if small { 1.2 } else { 1.1 }),
                alloc::vec![],
                if small { "Y1 ~ N(10, 2^2), Y2 = 1.2 Y1" } else { "Y1 ~ N(10, 2^2), Y2 = 1.1 Y1" },
            ),
            4 => (
                GAMMA_1_5,
                Effect::scale(if small { 2.0 } else { 1.5 }),
                alloc::vec![],
                if small { "Y1 ~ Gamma(shape 1, scale 5), Y2 = 2 Y1" } else { "Y1 ~ Gamma(shape 1, scale 5), Y2 = 1.5 Y1" },
            ),
            5 => (
                GAMMA_1_5,
                Effect::scale(if small { 3.0 } else { 1.5 }).with_noise(5.0, false),
                alloc::vec![],
                if small {
                    "Y1 ~ Gamma(shape 1, scale 5), Y2 = 3 Y1 + E, E ~ N(0, 5^2)"
                } else {
                    "Y1 ~ Gamma(shape 1, scale 5), Y2 = 1.5 Y1 + E, E ~ N(0, 5^2)"
                },
            ),
            6 => {
                let (p2, rho) = if small { (0.71, 0.29) } else { (0.50, 0.36) };
                (
                    ProcessLaw::CorrelatedBernoulliPair { p1: 0.28, p2, rho },
                    Effect::IDENTITY,
                    alloc::vec![],
                    if small { "Y1 ~ bin(1, 0.28), Y2 ~ bin(1, 0.71), corr 0.29" } else { "Y1 ~ bin(1, 0.28), Y2 ~ bin(1, 0.50), corr 0.36" },
                )
            }
            _ => return Err(not_found()),
        }
    };
    let fixed_y = match fixed_binary_vectors(table, sc) {
        Ok(t) => Some(t),
        Err(Error::NotFound(_)) => None,
        Err(e) => return Err(e),
    };
    let fixed_outliers = match (table, sc) {
        (3, 3) => Some(1),
        (5, 3) => Some(7),
        _ => None,
    };
    Ok(Scenario {
        name: id.to_string(),
        description: description.to_string(),
        n1: half,
        n2: half,
        law,
        effect,
        balance_means: size && sc == 7,
        fixed_outliers,
        hypothesis_truth: truth,
        fixed_y,
    })
}

/// Every built-in scenario, in identifier order.
pub fn registry() -> Vec<Scenario> {
    scenario_ids().iter().map(|id| scenario(id).expect("registry ids resolve")).collect()
}
