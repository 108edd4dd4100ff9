//! The weighted difference statistic
//!
//! ```text
//! D(y, s, t, w) = sum_j y_j 1(t_j = 1) / w(1, j)  -  sum_j y_j 1(t_j = 2) / w(2, j)
//! ```
//!
//! with `0/0 = 0`, and the three weight families: `W1` (arm sizes), `W3`
//! (`n` times the assignment inclusion probability) and `W23` (`N` times the
//! selection inclusion probability).

use alloc::vec::Vec;

use crate::designs::{AssignmentDesign, SelectionDesign};
use crate::experiment::{AssignmentVector, SampleVector, Treatment};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub enum WeightFamily<'a> {
    /// `w[t.i] = n_t`.
    W1,
    /// `w[t.s_j] = n P(T.s contains t.s_j | S = s)`.
    W3(&'a AssignmentDesign),
    /// `w[t.i] = N P(T.S contains t.i)`.
    W23(&'a SelectionDesign),
}

/// Per-position weights `w(t, j)`. A zero entry marks a label that can never
/// be observed at that position.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    rows: Vec<[f64; 2]>,
}

impl WeightTable {
    pub fn from_rows(rows: Vec<[f64; 2]>) -> Self {
        Self { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `w(t, j)` for a 1-based position.
    pub fn weight(&self, t: Treatment, j: usize) -> f64 {
        self.rows[j - 1][t.index()]
    }

    pub fn rows(&self) -> &[[f64; 2]] {
        &self.rows
    }
}

/// Resolve a weight family at `(sample, assignment)`.
///
/// Under a uniform CRD, `n * (n_t / n)` is stored as the integer `n_t`
/// itself, so `W3` and `W1` tables coincide bit for bit.
pub fn resolve_weights(
    family: WeightFamily<'_>,
    sample: &SampleVector,
    assignment: &AssignmentVector,
) -> Result<WeightTable> {
    let n = sample.len();
    if assignment.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: assignment.len() });
    }
    let rows = match family {
        WeightFamily::W1 => {
            let row = [assignment.n1() as f64, assignment.n2() as f64];
            alloc::vec![row; n]
        }
        WeightFamily::W3(design) => {
            if design.n() != n {
                return Err(Error::LengthMismatch { expected: n, found: design.n() });
            }
            match design.as_uniform_crd() {
                Some(crd) => alloc::vec![[crd.n1() as f64, crd.n2() as f64]; n],
                None => {
                    let nf = n as f64;
                    design.inclusion_table().iter().map(|p| [nf * p[0], nf * p[1]]).collect()
                }
            }
        }
        WeightFamily::W23(design) => {
            sample.check_within(design.n_units())?;
            match design.as_census_crd() {
                Some(c) => {
                    let row = [c.n1() as f64, (c.n_units() - c.n1()) as f64];
                    alloc::vec![row; n]
                }
                None => {
                    let big_n = design.n_units() as f64;
                    let table = design.inclusion_table();
                    sample
                        .units()
                        .iter()
                        .map(|&i| [big_n * table[i - 1][0], big_n * table[i - 1][1]])
                        .collect()
                }
            }
        }
    };
    for (j, (row, t)) in rows.iter().zip(assignment.labels()).enumerate() {
        if row[t.index()] <= 0.0 {
            return Err(Error::ZeroInclusion { treatment: *t, position: j + 1 });
        }
    }
    Ok(WeightTable { rows })
}

/// `D(y, s, t, w)`. Positions whose indicator is zero are skipped outright
/// rather than evaluated as `0/0`.
pub fn d_statistic(
    responses: &[f64],
    assignment: &AssignmentVector,
    weights: &WeightTable,
) -> Result<f64> {
    if responses.len() != assignment.len() {
        return Err(Error::LengthMismatch { expected: assignment.len(), found: responses.len() });
    }
    if weights.len() != assignment.len() {
        return Err(Error::LengthMismatch { expected: assignment.len(), found: weights.len() });
    }
    let mut sums = [0.0f64; 2];
    for (j, (&y, &t)) in responses.iter().zip(assignment.labels()).enumerate() {
        if !y.is_finite() {
            return Err(Error::NonFinite);
        }
        let w = weights.rows[j][t.index()];
        if w <= 0.0 {
            return Err(Error::ZeroInclusion { treatment: t, position: j + 1 });
        }
        sums[t.index()] += y / w;
    }
    Ok(sums[0] - sums[1])
}
