//! `--design` values: `crd` or a JSON design file.
//!
//! ```json
//! {"kind": "crd"}
//! {"kind": "explicit", "support": [[1, 1, 2, 2], [2, 2, 1, 1]], "probs": [0.5, 0.5]}
//! ```

use std::path::Path;

use randcompare_core::designs::{AssignmentDesign, SelectionDesign};
use randcompare_core::experiment::{AssignmentVector, SampleVector};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DesignSpec {
    Crd,
    Explicit { support: Vec<Vec<u8>>, probs: Vec<f64> },
}

impl DesignSpec {
    /// `crd`, or a path to a JSON design file.
    pub fn from_arg(arg: &str) -> Result<Self, CliError> {
        if arg.eq_ignore_ascii_case("crd") {
            return Ok(DesignSpec::Crd);
        }
        Self::from_path(Path::new(arg))
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read design {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Data {
            line: Some(e.line() as u64),
            message: format!("design {}: {e}", path.display()),
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            DesignSpec::Crd => "crd",
            DesignSpec::Explicit { .. } => "explicit",
        }
    }

    /// The assignment design for an observed assignment; `crd` takes its arm
    /// sizes from the data.
    pub fn assignment_design(&self, observed: &AssignmentVector) -> Result<AssignmentDesign, CliError> {
        let design = match self {
            DesignSpec::Crd => AssignmentDesign::uniform_crd(observed.len(), observed.n1())?,
            DesignSpec::Explicit { support, probs } => {
                let support = support
                    .iter()
                    .map(|v| AssignmentVector::from_labels(v))
                    .collect::<Result<Vec<_>, _>>()?;
                AssignmentDesign::explicit(support, probs.clone())?
            }
        };
        if design.n() != observed.len() {
            return Err(CliError::Data {
                line: None,
                message: format!("design covers {} units but the data hold {}", design.n(), observed.len()),
            });
        }
        Ok(design)
    }

    /// The selection design treating the data as a census of the
    /// population.
    pub fn selection_design(&self, observed: &AssignmentVector) -> Result<SelectionDesign, CliError> {
        match self {
            DesignSpec::Crd => Ok(SelectionDesign::census_crd(observed.len(), observed.n1())?),
            DesignSpec::Explicit { .. } => {
                let AssignmentDesign::Explicit(e) = self.assignment_design(observed)? else {
                    unreachable!("explicit spec builds an explicit design")
                };
                let census = SampleVector::census(observed.len())?;
                let support = e.support().iter().map(|t| (census.clone(), t.clone())).collect();
                Ok(SelectionDesign::explicit_joint(observed.len(), support, e.probs().to_vec())?)
            }
        }
    }
}
