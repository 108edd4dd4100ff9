//! Potential-outcome data model.
//!
//! Every unit `i` of a finite population `P = (1, ..., N)` carries two
//! potential responses, `y[1.i]` and `y[2.i]`. An experiment selects a sample
//! `s` of `n` distinct units and assigns each sampled unit one treatment;
//! only `y[t_j.s_j]` is ever observed. Unit identifiers and positions are
//! 1-based throughout, mirroring `P = (1, ..., N)`.

use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// One of the two treatments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Treatment {
    One,
    Two,
}

impl Treatment {
    pub const BOTH: [Treatment; 2] = [Treatment::One, Treatment::Two];

    /// The numeric label, 1 or 2.
    pub fn label(self) -> u8 {
        match self {
            Treatment::One => 1,
            Treatment::Two => 2,
        }
    }

    /// Zero-based slot, handy for `[T; 2]` tables.
    pub fn index(self) -> usize {
        match self {
            Treatment::One => 0,
            Treatment::Two => 1,
        }
    }

    pub fn other(self) -> Treatment {
        match self {
            Treatment::One => Treatment::Two,
            Treatment::Two => Treatment::One,
        }
    }
}

impl TryFrom<u8> for Treatment {
    type Error = Error;

    fn try_from(label: u8) -> Result<Self> {
        match label {
            1 => Ok(Treatment::One),
            2 => Ok(Treatment::Two),
            _ => Err(Error::Domain("treatment label must be 1 or 2")),
        }
    }
}

impl fmt::Display for Treatment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// The full vector `y[1.P, 2.P]` of potential responses for `N` units.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialTable {
    y1: Vec<f64>,
    y2: Vec<f64>,
}

impl PotentialTable {
    pub fn new(y1: Vec<f64>, y2: Vec<f64>) -> Result<Self> {
        if y1.is_empty() {
            return Err(Error::EmptySample);
        }
        if y1.len() != y2.len() {
            return Err(Error::LengthMismatch { expected: y1.len(), found: y2.len() });
        }
        check_finite(&y1)?;
        check_finite(&y2)?;
        Ok(Self { y1, y2 })
    }

    /// A table satisfying the sharp null: both potentials equal `y`.
    pub fn sharp_null(y: Vec<f64>) -> Result<Self> {
        let y2 = y.clone();
        Self::new(y, y2)
    }

    pub fn n_units(&self) -> usize {
        self.y1.len()
    }

    pub fn potentials(&self, treatment: Treatment) -> &[f64] {
        match treatment {
            Treatment::One => &self.y1,
            Treatment::Two => &self.y2,
        }
    }

    /// `y[t.i]` for a 1-based unit id.
    pub fn value(&self, treatment: Treatment, unit: usize) -> Result<f64> {
        if unit == 0 || unit > self.n_units() {
            return Err(Error::IndexOutOfRange { index: unit, bound: self.n_units() });
        }
        Ok(self.potentials(treatment)[unit - 1])
    }
}

/// An ordered sample `s = (s_1, ..., s_n)` of distinct 1-based unit ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SampleVector(Vec<usize>);

impl SampleVector {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut sorted = indices.clone();
        sorted.sort_unstable();
        if sorted[0] == 0 {
            return Err(Error::IndexOutOfRange { index: 0, bound: usize::MAX });
        }
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateUnit(w[0]));
        }
        Ok(Self(indices))
    }

    /// The whole population `(1, ..., N)`.
    pub fn census(n_units: usize) -> Result<Self> {
        Self::new((1..=n_units).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn units(&self) -> &[usize] {
        &self.0
    }

    /// Errors unless every id lies in `1..=n_units`.
    pub fn check_within(&self, n_units: usize) -> Result<()> {
        match self.0.iter().find(|&&i| i > n_units) {
            Some(&i) => Err(Error::IndexOutOfRange { index: i, bound: n_units }),
            None => Ok(()),
        }
    }

    /// Compose with positions `(p_1, ..., p_m)` of this sample: returns
    /// `(s_{p_1}, ..., s_{p_m})`.
    pub fn subsample(&self, positions: &SampleVector) -> Result<SampleVector> {
        positions.check_within(self.len())?;
        SampleVector::new(positions.0.iter().map(|&p| self.0[p - 1]).collect())
    }
}

/// Treatment labels `t = (t_1, ..., t_n)` paired with a sample.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AssignmentVector(Vec<Treatment>);

impl AssignmentVector {
    pub fn new(labels: Vec<Treatment>) -> Self {
        Self(labels)
    }

    /// Parse numeric labels, each 1 or 2.
    pub fn from_labels(labels: &[u8]) -> Result<Self> {
        labels.iter().map(|&l| Treatment::try_from(l)).collect::<Result<Vec<_>>>().map(Self)
    }

    /// `n1` ones followed by `n2` twos.
    pub fn blocked(n1: usize, n2: usize) -> Self {
        let mut labels = Vec::with_capacity(n1 + n2);
        labels.resize(n1, Treatment::One);
        labels.resize(n1 + n2, Treatment::Two);
        Self(labels)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[Treatment] {
        &self.0
    }

    pub fn count(&self, treatment: Treatment) -> usize {
        self.0.iter().filter(|&&t| t == treatment).count()
    }

    pub fn n1(&self) -> usize {
        self.count(Treatment::One)
    }

    pub fn n2(&self) -> usize {
        self.count(Treatment::Two)
    }

    /// Errors unless both arms hold at least `min` positions.
    pub fn require_arms(&self, min: usize) -> Result<()> {
        for t in Treatment::BOTH {
            let found = self.count(t);
            if found < min {
                return Err(Error::ArmTooSmall { treatment: t, required: min, found });
            }
        }
        Ok(())
    }
}

/// What an experiment actually reveals: `s`, `t` and `y[t.s]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedExperiment {
    sample: SampleVector,
    assignment: AssignmentVector,
    responses: Vec<f64>,
}

impl ObservedExperiment {
    pub fn new(
        sample: SampleVector,
        assignment: AssignmentVector,
        responses: Vec<f64>,
    ) -> Result<Self> {
        if assignment.len() != sample.len() {
            return Err(Error::LengthMismatch { expected: sample.len(), found: assignment.len() });
        }
        if responses.len() != sample.len() {
            return Err(Error::LengthMismatch { expected: sample.len(), found: responses.len() });
        }
        check_finite(&responses)?;
        Ok(Self { sample, assignment, responses })
    }

    /// Treatment-1 responses followed by treatment-2 responses, on units
    /// `1..=n1+n2`.
    pub fn from_arms(arm1: &[f64], arm2: &[f64]) -> Result<Self> {
        let n = arm1.len() + arm2.len();
        let sample = SampleVector::census(n)?;
        let assignment = AssignmentVector::blocked(arm1.len(), arm2.len());
        let mut responses = Vec::with_capacity(n);
        responses.extend_from_slice(arm1);
        responses.extend_from_slice(arm2);
        Self::new(sample, assignment, responses)
    }

    /// Observe `table` through `(sample, assignment)`.
    pub fn observe(
        table: &PotentialTable,
        sample: SampleVector,
        assignment: AssignmentVector,
    ) -> Result<Self> {
        let responses = select_components(table, &sample, &assignment)?;
        Self::new(sample, assignment, responses)
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }

    pub fn sample(&self) -> &SampleVector {
        &self.sample
    }

    pub fn assignment(&self) -> &AssignmentVector {
        &self.assignment
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    /// Responses of one arm, in sample order.
    pub fn arm(&self, treatment: Treatment) -> Vec<f64> {
        self.responses
            .iter()
            .zip(self.assignment.labels())
            .filter(|(_, &t)| t == treatment)
            .map(|(&y, _)| y)
            .collect()
    }

    /// True when every response is 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.responses.iter().all(|&y| y == 0.0 || y == 1.0)
    }
}

/// `(y[t_1.s_1], ..., y[t_n.s_n])`.
pub fn select_components(
    table: &PotentialTable,
    sample: &SampleVector,
    assignment: &AssignmentVector,
) -> Result<Vec<f64>> {
    if assignment.len() != sample.len() {
        return Err(Error::LengthMismatch { expected: sample.len(), found: assignment.len() });
    }
    sample
        .units()
        .iter()
        .zip(assignment.labels())
        .map(|(&unit, &t)| table.value(t, unit))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizedEffects {
    /// `y[1.s_j] - y[2.s_j]` in sample order.
    pub unit_effects: Vec<f64>,
    /// `ybar[1.s] - ybar[2.s]`.
    pub aggregate_sample: f64,
    /// `ybar[1.P] - ybar[2.P]`.
    pub aggregate_population: f64,
}

/// Unit-level and aggregate effects realized in a full potential table.
pub fn realized_effects(table: &PotentialTable, sample: &SampleVector) -> Result<RealizedEffects> {
    sample.check_within(table.n_units())?;
    let unit_effects: Vec<f64> = sample
        .units()
        .iter()
        .map(|&i| table.y1[i - 1] - table.y2[i - 1])
        .collect();
    let aggregate_sample = unit_effects.iter().sum::<f64>() / unit_effects.len() as f64;
    let n = table.n_units() as f64;
    let aggregate_population =
        table.y1.iter().sum::<f64>() / n - table.y2.iter().sum::<f64>() / n;
    Ok(RealizedEffects { unit_effects, aggregate_sample, aggregate_population })
}

/// The seven no-treatment-effect hypotheses.
///
/// Nesting (an arrow reads "implies"):
///
/// ```text
/// UP -> DUP -> EUP
/// UP -> RUP -> RAP
///       RUP -> RUs -> RAs
/// ```
///
/// `RAP` and `RAs` do not imply each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// `Y[1.P] = Y[2.P]` with probability one.
    Up,
    /// `Y[1.i] ~ Y[2.i]` for every unit.
    Dup,
    /// `E Y[1.i] = E Y[2.i]` for every unit.
    Eup,
    /// `y[1.P] = y[2.P]`: the sharp population null.
    Rup,
    /// `ybar[1.P] = ybar[2.P]`.
    Rap,
    /// `y[1.s] = y[2.s]`: the sharp sample null.
    RUs,
    /// `ybar[1.s] = ybar[2.s]`.
    RAs,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 7] = [
        Hypothesis::Up,
        Hypothesis::Dup,
        Hypothesis::Eup,
        Hypothesis::Rup,
        Hypothesis::Rap,
        Hypothesis::RUs,
        Hypothesis::RAs,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Hypothesis::Up => "UP",
            Hypothesis::Dup => "DUP",
            Hypothesis::Eup => "EUP",
            Hypothesis::Rup => "RUP",
            Hypothesis::Rap => "RAP",
            Hypothesis::RUs => "RUs",
            Hypothesis::RAs => "RAs",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Hypothesis> {
        Self::ALL.into_iter().find(|h| h.tag() == tag)
    }

    pub fn description(self) -> &'static str {
        match self {
            Hypothesis::Up => "Y[1.P] = Y[2.P] with probability 1",
            Hypothesis::Dup => "Y[1.i] and Y[2.i] identically distributed for every unit",
            Hypothesis::Eup => "E(Y[1.i]) = E(Y[2.i]) for every unit",
            Hypothesis::Rup => "y[1.i] = y[2.i] for every population unit",
            Hypothesis::Rap => "population means of y[1.P] and y[2.P] are equal",
            Hypothesis::RUs => "y[1.s_j] = y[2.s_j] for every sampled unit",
            Hypothesis::RAs => "sample means of y[1.s] and y[2.s] are equal",
        }
    }

    fn parent_edges(self) -> &'static [Hypothesis] {
        match self {
            Hypothesis::Up => &[Hypothesis::Dup, Hypothesis::Rup],
            Hypothesis::Dup => &[Hypothesis::Eup],
            Hypothesis::Rup => &[Hypothesis::Rap, Hypothesis::RUs],
            Hypothesis::RUs => &[Hypothesis::RAs],
            Hypothesis::Eup | Hypothesis::Rap | Hypothesis::RAs => &[],
        }
    }

    /// Whether `self` implies `other` (reflexive).
    pub fn implies(self, other: Hypothesis) -> bool {
        self == other || self.parent_edges().iter().any(|h| h.implies(other))
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Free-function form of [`Hypothesis::implies`].
pub fn hypothesis_implies(a: Hypothesis, b: Hypothesis) -> bool {
    a.implies(b)
}

/// Assumptions a procedure relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Assumption {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    B1,
    B2,
    C1,
    C2,
}

impl Assumption {
    pub fn tag(self) -> &'static str {
        match self {
            Assumption::A1 => "A1",
            Assumption::A2 => "A2",
            Assumption::A3 => "A3",
            Assumption::A4 => "A4",
            Assumption::A5 => "A5",
            Assumption::A6 => "A6",
            Assumption::A7 => "A7",
            Assumption::B1 => "B1",
            Assumption::B2 => "B2",
            Assumption::C1 => "C1",
            Assumption::C2 => "C2",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Assumption::A1 => "(S, T) independent of Y",
            Assumption::A2 => "Y[t.i] ~ F_t for all units",
            Assumption::A3 => "pairs Y[1.i, 2.i] independent across units",
            Assumption::A4 => "F_t continuous",
            Assumption::A5 => "F_t normal with arm-specific variance",
            Assumption::A6 => "F_t normal with common variance",
            Assumption::A7 => "F_t with finite mean and variance",
            Assumption::B1 => "T independent of Y given S",
            Assumption::B2 => "T | S = s completely known, positive first-order inclusion",
            Assumption::C1 => "(S, T) independent of Y",
            Assumption::C2 => "(S, T) distribution completely known, positive first-order inclusion",
        }
    }
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}
