//! Assignment distributions `T | (S = s)` and joint selection distributions
//! `(S, T)`.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::experiment::{AssignmentVector, SampleVector, Treatment};
use crate::{Error, Result};

/// Default ceiling on the number of support points enumerated exactly.
pub const DEFAULT_ENUMERATION_CAP: u128 = 2_000_000;

const PROB_SUM_TOLERANCE: f64 = 1e-12;

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Exact `C(n, k)`, or [`Error::BinomialOverflow`] when it does not fit in
/// 128 bits.
///
/// Multiplicative form `C(n, i+1) = C(n, i) (n-i) / (i+1)`, dividing out
/// `gcd(C(n, i), i+1)` first so no intermediate exceeds the result by more
/// than a factor of `n`.
pub fn binomial_coefficient(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Err(Error::Domain("binomial coefficient needs k <= n"));
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        let num = n as u128 - i;
        let den = i + 1;
        let g = gcd(c, den);
        let reduced = num / (den / g);
        c = (c / g).checked_mul(reduced).ok_or(Error::BinomialOverflow { n, k })?;
    }
    Ok(c)
}

/// Walks the `k`-subsets of `0..n` in lexicographic order without
/// allocating per subset.
#[derive(Debug, Clone)]
pub struct KSubsets {
    n: usize,
    current: Vec<usize>,
    started: bool,
    done: bool,
}

impl KSubsets {
    pub fn new(n: usize, k: usize) -> Self {
        Self { n, current: (0..k).collect(), started: false, done: k > n }
    }

    /// The next subset, or `None` once all `C(n, k)` have been produced.
    pub fn next_subset(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        let k = self.current.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.current[i] < self.n - k + i {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                return Some(&self.current);
            }
        }
        self.done = true;
        None
    }
}

/// Seeded random stream.
///
/// The generator is ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`). A
/// `u64` seed is expanded to the 256-bit key by `SeedableRng::seed_from_u64`;
/// substream `i` of a seed is the same key with the ChaCha stream id set to
/// `i`, so `(seed, i)` pairs never overlap and need no coordination between
/// threads. Draws are identical on every platform.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    /// Independent stream `index` derived from `seed`.
    pub fn substream(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { seed, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Algorithm tag recorded alongside results.
    pub const ALGORITHM: &'static str = "chacha8/seed_from_u64/stream";
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Moves a uniformly random `k`-subset of `positions` into `positions[..k]`
/// (partial Fisher-Yates). Any starting order is fine.
pub fn partial_shuffle<R: RngCore + ?Sized>(positions: &mut [usize], k: usize, rng: &mut R) {
    let n = positions.len();
    for i in 0..k.min(n) {
        let j = rng.random_range(i..n);
        positions.swap(i, j);
    }
}

/// Completely randomized design: uniform over all arrangements of `n1` ones
/// and `n - n1` twos.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformCrd {
    n: usize,
    n1: usize,
}

impl UniformCrd {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n - self.n1
    }

    pub fn arm_size(&self, t: Treatment) -> usize {
        match t {
            Treatment::One => self.n1,
            Treatment::Two => self.n2(),
        }
    }
}

/// A finite assignment distribution stored point by point.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitDesign {
    n: usize,
    support: Vec<AssignmentVector>,
    probs: Vec<f64>,
}

impl ExplicitDesign {
    pub fn support(&self) -> &[AssignmentVector] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

fn check_probabilities(probs: &[f64], support_len: usize) -> Result<()> {
    if probs.len() != support_len {
        return Err(Error::InvalidDesign(format!(
            "{} support points but {} probabilities",
            support_len,
            probs.len()
        )));
    }
    if support_len == 0 {
        return Err(Error::InvalidDesign("empty support".into()));
    }
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidDesign("probabilities must be finite and nonnegative".into()));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_SUM_TOLERANCE {
        return Err(Error::InvalidDesign(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

fn sample_index<R: RngCore + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // u landed in the rounding gap above the final cumulative sum
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

/// The distribution of `T | (S = s)`.
#[derive(Debug, Clone, PartialEq)]
pub enum AssignmentDesign {
    UniformCrd(UniformCrd),
    Explicit(ExplicitDesign),
}

impl AssignmentDesign {
    pub fn uniform_crd(n: usize, n1: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySample);
        }
        if n1 > n {
            return Err(Error::Domain("n1 must not exceed n"));
        }
        Ok(Self::UniformCrd(UniformCrd { n, n1 }))
    }

    /// Validates nonnegative probabilities summing to one within 1e-12 and
    /// distinct support vectors of a common length.
    pub fn explicit(support: Vec<AssignmentVector>, probs: Vec<f64>) -> Result<Self> {
        check_probabilities(&probs, support.len())?;
        let n = support[0].len();
        if n == 0 {
            return Err(Error::EmptySample);
        }
        if let Some(v) = support.iter().find(|v| v.len() != n) {
            return Err(Error::InvalidDesign(format!(
                "support vectors must all have length {n}, found {}",
                v.len()
            )));
        }
        let mut sorted: Vec<&AssignmentVector> = support.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidDesign("support vectors must be distinct".into()));
        }
        Ok(Self::Explicit(ExplicitDesign { n, support, probs }))
    }

    /// Sample size the design assigns.
    pub fn n(&self) -> usize {
        match self {
            Self::UniformCrd(crd) => crd.n,
            Self::Explicit(e) => e.n,
        }
    }

    pub fn as_uniform_crd(&self) -> Option<&UniformCrd> {
        match self {
            Self::UniformCrd(crd) => Some(crd),
            Self::Explicit(_) => None,
        }
    }

    /// `P(T.s contains t.s_j | S = s)` for every 1-based position `j`, as
    /// `[p(1), p(2)]` rows. Zero entries are kept.
    pub fn inclusion_table(&self) -> Vec<[f64; 2]> {
        match self {
            Self::UniformCrd(crd) => {
                let n = crd.n as f64;
                let row = [crd.n1 as f64 / n, crd.n2() as f64 / n];
                alloc::vec![row; crd.n]
            }
            Self::Explicit(e) => {
                let mut table = alloc::vec![[0.0; 2]; e.n];
                for (v, &p) in e.support.iter().zip(&e.probs) {
                    for (row, t) in table.iter_mut().zip(v.labels()) {
                        row[t.index()] += p;
                    }
                }
                table
            }
        }
    }

    /// First-order inclusion probability of label `t` at 1-based position
    /// `j`. Zero is an error: the design violates positivity there.
    pub fn first_order_inclusion(&self, t: Treatment, j: usize) -> Result<f64> {
        if j == 0 || j > self.n() {
            return Err(Error::IndexOutOfRange { index: j, bound: self.n() });
        }
        let p = match self {
            Self::UniformCrd(crd) => crd.arm_size(t) as f64 / crd.n as f64,
            Self::Explicit(e) => e
                .support
                .iter()
                .zip(&e.probs)
                .filter(|(v, _)| v.labels()[j - 1] == t)
                .map(|(_, &p)| p)
                .sum(),
        };
        if p > 0.0 {
            Ok(p)
        } else {
            Err(Error::ZeroInclusion { treatment: t, position: j })
        }
    }

    /// Errors with the first `(t, j)` whose inclusion probability is zero.
    pub fn check_positivity(&self) -> Result<()> {
        for (j, row) in self.inclusion_table().iter().enumerate() {
            for t in Treatment::BOTH {
                if row[t.index()] <= 0.0 {
                    return Err(Error::ZeroInclusion { treatment: t, position: j + 1 });
                }
            }
        }
        Ok(())
    }

    /// Number of support points; `None` if it overflows `u128`.
    pub fn support_size(&self) -> Option<u128> {
        match self {
            Self::UniformCrd(crd) => binomial_coefficient(crd.n as u64, crd.n1 as u64).ok(),
            Self::Explicit(e) => Some(e.support.len() as u128),
        }
    }

    /// Errors unless the support fits under `cap`.
    pub fn check_enumerable(&self, cap: u128) -> Result<u128> {
        match self.support_size() {
            Some(size) if size <= cap => Ok(size),
            support => Err(Error::EnumerationTooLarge { support, cap }),
        }
    }

    /// Every support point with its probability.
    pub fn enumerate_support(&self, cap: u128) -> Result<SupportIter<'_>> {
        self.check_enumerable(cap)?;
        Ok(match self {
            Self::UniformCrd(crd) => {
                let size = binomial_coefficient(crd.n as u64, crd.n1 as u64)?;
                SupportIter::Crd { n: crd.n, subsets: KSubsets::new(crd.n, crd.n1), prob: 1.0 / size as f64 }
            }
            Self::Explicit(e) => SupportIter::Explicit { design: e, next: 0 },
        })
    }

    /// One draw of `T`. The uniform design uses a partial Fisher-Yates
    /// shuffle of positions.
    pub fn sample_assignment<R: RngCore + ?Sized>(&self, rng: &mut R) -> AssignmentVector {
        match self {
            Self::UniformCrd(crd) => {
                let mut positions: Vec<usize> = (0..crd.n).collect();
                partial_shuffle(&mut positions, crd.n1, rng);
                let mut labels = alloc::vec![Treatment::Two; crd.n];
                for &p in &positions[..crd.n1] {
                    labels[p] = Treatment::One;
                }
                AssignmentVector::new(labels)
            }
            Self::Explicit(e) => e.support[sample_index(&e.probs, rng)].clone(),
        }
    }
}

/// Iterator returned by [`AssignmentDesign::enumerate_support`].
#[derive(Debug)]
pub enum SupportIter<'a> {
    Crd { n: usize, subsets: KSubsets, prob: f64 },
    Explicit { design: &'a ExplicitDesign, next: usize },
}

impl Iterator for SupportIter<'_> {
    type Item = (AssignmentVector, f64);

    fn next(&mut self) -> Option<Self::Item> {
        match self {
            SupportIter::Crd { n, subsets, prob } => {
                let ones = subsets.next_subset()?;
                let mut labels = alloc::vec![Treatment::Two; *n];
                for &p in ones {
                    labels[p] = Treatment::One;
                }
                Some((AssignmentVector::new(labels), *prob))
            }
            SupportIter::Explicit { design, next } => {
                let i = *next;
                let v = design.support.get(i)?;
                *next += 1;
                Some((v.clone(), design.probs[i]))
            }
        }
    }
}

/// Census completely randomized design: `S = (1, ..., N)` with probability
/// one and `T | S` uniform with `n1` ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusCrd {
    n_units: usize,
    n1: usize,
}

impl CensusCrd {
    pub fn n_units(&self) -> usize {
        self.n_units
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn assignment_design(&self) -> AssignmentDesign {
        AssignmentDesign::UniformCrd(UniformCrd { n: self.n_units, n1: self.n1 })
    }
}

/// A finite joint distribution of `(S, T)` stored point by point.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitJointDesign {
    n_units: usize,
    support: Vec<(SampleVector, AssignmentVector)>,
    probs: Vec<f64>,
}

impl ExplicitJointDesign {
    pub fn support(&self) -> &[(SampleVector, AssignmentVector)] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// The distribution of `(S, T)` over a population of `N` units.
#[derive(Debug, Clone, PartialEq)]
pub enum SelectionDesign {
    CensusCrd(CensusCrd),
    ExplicitJoint(ExplicitJointDesign),
}

impl SelectionDesign {
    pub fn census_crd(n_units: usize, n1: usize) -> Result<Self> {
        if n_units == 0 {
            return Err(Error::EmptySample);
        }
        if n1 > n_units {
            return Err(Error::Domain("n1 must not exceed N"));
        }
        Ok(Self::CensusCrd(CensusCrd { n_units, n1 }))
    }

    pub fn explicit_joint(
        n_units: usize,
        support: Vec<(SampleVector, AssignmentVector)>,
        probs: Vec<f64>,
    ) -> Result<Self> {
        check_probabilities(&probs, support.len())?;
        for (s, t) in &support {
            s.check_within(n_units)?;
            if s.len() != t.len() {
                return Err(Error::LengthMismatch { expected: s.len(), found: t.len() });
            }
        }
        let mut sorted: Vec<&(SampleVector, AssignmentVector)> = support.iter().collect();
        sorted.sort_by(|a, b| a.0.units().cmp(b.0.units()).then_with(|| a.1.cmp(&b.1)));
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidDesign("support points must be distinct".into()));
        }
        Ok(Self::ExplicitJoint(ExplicitJointDesign { n_units, support, probs }))
    }

    pub fn n_units(&self) -> usize {
        match self {
            Self::CensusCrd(c) => c.n_units,
            Self::ExplicitJoint(e) => e.n_units,
        }
    }

    /// `P(T.S contains t.i)` for every unit `i = 1..=N`, as `[p(1), p(2)]`.
    pub fn inclusion_table(&self) -> Vec<[f64; 2]> {
        match self {
            Self::CensusCrd(c) => {
                let n = c.n_units as f64;
                alloc::vec![[c.n1 as f64 / n, (c.n_units - c.n1) as f64 / n]; c.n_units]
            }
            Self::ExplicitJoint(e) => {
                let mut table = alloc::vec![[0.0; 2]; e.n_units];
                for ((s, t), &p) in e.support.iter().zip(&e.probs) {
                    for (&unit, label) in s.units().iter().zip(t.labels()) {
                        table[unit - 1][label.index()] += p;
                    }
                }
                table
            }
        }
    }

    /// First-order inclusion probability of label `t.i` for a 1-based unit.
    pub fn first_order_inclusion(&self, t: Treatment, unit: usize) -> Result<f64> {
        if unit == 0 || unit > self.n_units() {
            return Err(Error::IndexOutOfRange { index: unit, bound: self.n_units() });
        }
        let p = self.inclusion_table()[unit - 1][t.index()];
        if p > 0.0 {
            Ok(p)
        } else {
            Err(Error::ZeroInclusion { treatment: t, position: unit })
        }
    }

    /// Errors with the first unit label whose inclusion probability is zero.
    pub fn check_positivity(&self) -> Result<()> {
        for (i, row) in self.inclusion_table().iter().enumerate() {
            for t in Treatment::BOTH {
                if row[t.index()] <= 0.0 {
                    return Err(Error::ZeroInclusion { treatment: t, position: i + 1 });
                }
            }
        }
        Ok(())
    }

    /// Joint support points with probabilities (census designs are expanded
    /// in `(1, ..., N)` sample order).
    pub fn enumerate_support(
        &self,
        cap: u128,
    ) -> Result<Vec<(SampleVector, AssignmentVector, f64)>> {
        match self {
            Self::CensusCrd(c) => {
                let census = SampleVector::census(c.n_units)?;
                Ok(c.assignment_design()
                    .enumerate_support(cap)?
                    .map(|(t, p)| (census.clone(), t, p))
                    .collect())
            }
            Self::ExplicitJoint(e) => {
                if e.support.len() as u128 > cap {
                    return Err(Error::EnumerationTooLarge {
                        support: Some(e.support.len() as u128),
                        cap,
                    });
                }
                Ok(e.support
                    .iter()
                    .zip(&e.probs)
                    .map(|((s, t), &p)| (s.clone(), t.clone(), p))
                    .collect())
            }
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<(SampleVector, AssignmentVector)> {
        match self {
            Self::CensusCrd(c) => {
                Ok((SampleVector::census(c.n_units)?, c.assignment_design().sample_assignment(rng)))
            }
            Self::ExplicitJoint(e) => Ok(e.support[sample_index(&e.probs, rng)].clone()),
        }
    }

    /// The census CRD this design is equivalent to, if any: every support
    /// sample is the whole population and the unit-level assignment is
    /// uniform over all `C(N, n1)` arrangements.
    pub fn as_census_crd(&self) -> Option<CensusCrd> {
        match self {
            Self::CensusCrd(c) => Some(*c),
            Self::ExplicitJoint(e) => {
                let n = e.n_units;
                let mut by_unit: Vec<(Vec<Treatment>, f64)> = Vec::new();
                for ((s, t), &p) in e.support.iter().zip(&e.probs) {
                    if p == 0.0 {
                        continue;
                    }
                    if s.len() != n {
                        return None;
                    }
                    let mut labels = alloc::vec![Treatment::One; n];
                    for (&unit, &label) in s.units().iter().zip(t.labels()) {
                        labels[unit - 1] = label;
                    }
                    match by_unit.iter_mut().find(|(l, _)| *l == labels) {
                        Some(entry) => entry.1 += p,
                        None => by_unit.push((labels, p)),
                    }
                }
                let n1 = by_unit.first()?.0.iter().filter(|&&t| t == Treatment::One).count();
                if by_unit.iter().any(|(l, _)| l.iter().filter(|&&t| t == Treatment::One).count() != n1) {
                    return None;
                }
                let size = binomial_coefficient(n as u64, n1 as u64).ok()?;
                if by_unit.len() as u128 != size {
                    return None;
                }
                let target = 1.0 / size as f64;
                if by_unit.iter().all(|(_, p)| (p - target).abs() <= 1e-9) {
                    Some(CensusCrd { n_units: n, n1 })
                } else {
                    None
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pascal(n: usize, k: usize) -> u128 {
        let mut row = vec![1u128];
        for _ in 0..n {
            let mut next = vec![1u128; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        row[k]
    }

    #[test]
    fn binomial_matches_pascal_recurrence() {
        assert_eq!(binomial_coefficient(6, 3).unwrap(), 20);
        assert_eq!(binomial_coefficient(17, 0).unwrap(), 1);
        assert_eq!(binomial_coefficient(64, 32).unwrap(), 1_832_624_140_942_590_534);
        assert_eq!(pascal(64, 32), 1_832_624_140_942_590_534);
        for n in 0..=70 {
            for k in 0..=n {
                assert_eq!(binomial_coefficient(n as u64, k as u64).unwrap(), pascal(n, k));
            }
        }
    }

    #[test]
    fn binomial_errors() {
        assert!(matches!(binomial_coefficient(3, 4), Err(Error::Domain(_))));
        assert!(matches!(binomial_coefficient(200, 100), Err(Error::BinomialOverflow { .. })));
        // largest central coefficient that fits
        assert!(binomial_coefficient(130, 65).is_ok());
    }

    #[test]
    fn k_subsets_count_and_order() {
        let mut it = KSubsets::new(5, 2);
        let mut all = vec![];
        while let Some(s) = it.next_subset() {
            all.push(s.to_vec());
        }
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[9], vec![3, 4]);
        let mut empty = KSubsets::new(3, 0);
        assert_eq!(empty.next_subset(), Some(&[][..]));
        assert_eq!(empty.next_subset(), None);
        assert_eq!(KSubsets::new(2, 3).next_subset(), None);
    }

    #[test]
    fn crd_first_order_inclusion() {
        let d = AssignmentDesign::uniform_crd(64, 32).unwrap();
        assert_eq!(d.first_order_inclusion(Treatment::One, 17).unwrap(), 0.5);
        let d = AssignmentDesign::uniform_crd(4, 1).unwrap();
        for j in 1..=4 {
            assert_eq!(d.first_order_inclusion(Treatment::One, j).unwrap(), 0.25);
        }
        // enumeration oracle: the unit is treated in exactly one of the four assignments
        let hits = d
            .enumerate_support(DEFAULT_ENUMERATION_CAP)
            .unwrap()
            .filter(|(t, _)| t.labels()[2] == Treatment::One)
            .map(|(_, p)| p)
            .sum::<f64>();
        assert!((hits - 0.25).abs() < 1e-15);
    }

    #[test]
    fn explicit_single_point_design() {
        let d = AssignmentDesign::explicit(
            vec![AssignmentVector::from_labels(&[1, 2]).unwrap()],
            vec![1.0],
        )
        .unwrap();
        assert_eq!(d.first_order_inclusion(Treatment::One, 1).unwrap(), 1.0);
        assert_eq!(
            d.first_order_inclusion(Treatment::Two, 1),
            Err(Error::ZeroInclusion { treatment: Treatment::Two, position: 1 })
        );
        assert!(d.check_positivity().is_err());
        let mut rng = RngStream::new(3);
        for _ in 0..20 {
            assert_eq!(d.sample_assignment(&mut rng).labels(), &[Treatment::One, Treatment::Two]);
        }
    }

    #[test]
    fn explicit_design_validation() {
        let a = AssignmentVector::from_labels(&[1, 2]).unwrap();
        let b = AssignmentVector::from_labels(&[2, 1]).unwrap();
        assert!(AssignmentDesign::explicit(vec![a.clone(), b.clone()], vec![0.5, 0.6]).is_err());
        assert!(AssignmentDesign::explicit(vec![a.clone(), a.clone()], vec![0.5, 0.5]).is_err());
        assert!(AssignmentDesign::explicit(vec![a.clone(), b.clone()], vec![1.5, -0.5]).is_err());
        let c = AssignmentVector::from_labels(&[1, 2, 2]).unwrap();
        assert!(AssignmentDesign::explicit(vec![a.clone(), c], vec![0.5, 0.5]).is_err());
        let d = AssignmentDesign::explicit(vec![a.clone(), b.clone()], vec![0.25, 0.75]).unwrap();
        let back: Vec<_> = d.enumerate_support(10).unwrap().collect();
        assert_eq!(back, vec![(a, 0.25), (b, 0.75)]);
    }

    #[test]
    fn crd_enumeration() {
        let d = AssignmentDesign::uniform_crd(4, 2).unwrap();
        let pts: Vec<_> = d.enumerate_support(DEFAULT_ENUMERATION_CAP).unwrap().collect();
        assert_eq!(pts.len(), 6);
        assert!(pts.iter().all(|(t, p)| t.n1() == 2 && (*p - 1.0 / 6.0).abs() < 1e-15));
        let mut uniq: Vec<_> = pts.iter().map(|(t, _)| t.clone()).collect();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), 6);
        // nonmeasurability: no support point gives one position both labels
        assert!(pts.iter().all(|(t, _)| t.len() == 4));
    }

    #[test]
    fn crd_enumeration_too_large() {
        let d = AssignmentDesign::uniform_crd(64, 32).unwrap();
        assert_eq!(
            d.enumerate_support(DEFAULT_ENUMERATION_CAP).err(),
            Some(Error::EnumerationTooLarge {
                support: Some(1_832_624_140_942_590_534),
                cap: DEFAULT_ENUMERATION_CAP
            })
        );
    }

    #[test]
    fn crd_sampling_frequency() {
        let d = AssignmentDesign::uniform_crd(2, 1).unwrap();
        let mut rng = RngStream::new(2024);
        let draws = 100_000;
        let hits = (0..draws)
            .filter(|_| d.sample_assignment(&mut rng).labels()[0] == Treatment::One)
            .count();
        assert!((hits as f64 / draws as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn crd_empirical_inclusion_within_three_se() {
        let d = AssignmentDesign::uniform_crd(7, 3).unwrap();
        let mut rng = RngStream::new(99);
        let draws = 100_000;
        let mut counts = [0usize; 7];
        for _ in 0..draws {
            for (c, t) in counts.iter_mut().zip(d.sample_assignment(&mut rng).labels()) {
                if *t == Treatment::One {
                    *c += 1;
                }
            }
        }
        let p = 3.0 / 7.0;
        let se = libm::sqrt(p * (1.0 - p) / draws as f64);
        for c in counts {
            assert!((c as f64 / draws as f64 - p).abs() < 3.0 * se);
        }
    }

    #[test]
    fn rng_streams_are_deterministic_and_distinct() {
        let a: Vec<u64> = {
            let mut r = RngStream::substream(5, 1);
            (0..4).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = RngStream::substream(5, 1);
            (0..4).map(|_| r.next_u64()).collect()
        };
        let c: Vec<u64> = {
            let mut r = RngStream::substream(5, 2);
            (0..4).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn selection_census_inclusion_and_reduction() {
        let d = SelectionDesign::census_crd(6, 2).unwrap();
        assert!((d.first_order_inclusion(Treatment::One, 4).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(d.check_positivity().is_ok());
        // the same design written out point by point
        let pts = d.enumerate_support(100).unwrap();
        assert_eq!(pts.len(), 15);
        let (support, probs): (Vec<_>, Vec<_>) =
            pts.into_iter().map(|(s, t, p)| ((s, t), p)).unzip();
        let explicit = SelectionDesign::explicit_joint(6, support, probs).unwrap();
        assert_eq!(explicit.as_census_crd(), d.as_census_crd());
    }

    #[test]
    fn selection_explicit_not_census() {
        let s12 = SampleVector::new(vec![1, 2]).unwrap();
        let s23 = SampleVector::new(vec![2, 3]).unwrap();
        let t = AssignmentVector::from_labels(&[1, 2]).unwrap();
        let u = AssignmentVector::from_labels(&[2, 1]).unwrap();
        let d = SelectionDesign::explicit_joint(
            3,
            vec![(s12.clone(), t.clone()), (s12, u.clone()), (s23.clone(), t), (s23, u)],
            vec![0.25; 4],
        )
        .unwrap();
        assert_eq!(d.as_census_crd(), None);
        assert!((d.first_order_inclusion(Treatment::One, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((d.first_order_inclusion(Treatment::Two, 1).unwrap() - 0.25).abs() < 1e-15);
    }
}
