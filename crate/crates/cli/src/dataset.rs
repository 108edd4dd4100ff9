//! The `unit_id,treatment,response` CSV format.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use randcompare_core::experiment::{AssignmentVector, ObservedExperiment, SampleVector, Treatment};
use serde::Deserialize;

use crate::error::CliError;

/// A validated dataset: units in file order, numbered `1..=n` for the core
/// types, with their original identifiers kept for messages.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub unit_ids: Vec<String>,
    pub observed: ObservedExperiment,
}

#[derive(Debug, Deserialize)]
struct Record {
    unit_id: String,
    treatment: String,
    response: String,
}

impl Dataset {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let file = std::fs::File::open(path)
            .map_err(|e| CliError::Io(format!("cannot open {}: {e}", path.display())))?;
        Self::from_reader(file)
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, CliError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| data_error(None, e.to_string()))?.clone();
        for required in ["unit_id", "treatment", "response"] {
            if !headers.iter().any(|h| h == required) {
                return Err(data_error(Some(1), format!("missing column `{required}`")));
            }
        }
        let mut unit_ids = Vec::new();
        let mut labels = Vec::new();
        let mut responses = Vec::new();
        let mut seen: HashMap<String, u64> = HashMap::new();
        for result in rdr.deserialize::<Record>() {
            let record = result.map_err(|e| {
                let line = e.position().map(|p| p.line());
                data_error(line, e.to_string())
            })?;
            let line = unit_ids.len() as u64 + 2;
            if record.unit_id.is_empty() {
                return Err(data_error(Some(line), "empty unit_id".into()));
            }
            if let Some(first) = seen.insert(record.unit_id.clone(), line) {
                return Err(data_error(
                    Some(line),
                    format!("duplicate unit_id `{}` (first seen on line {first})", record.unit_id),
                ));
            }
            let treatment = match record.treatment.as_str() {
                "1" => Treatment::One,
                "2" => Treatment::Two,
                other => {
                    return Err(data_error(Some(line), format!("treatment must be 1 or 2, found `{other}`")))
                }
            };
            let response: f64 = record
                .response
                .parse()
                .map_err(|_| data_error(Some(line), format!("response `{}` is not a number", record.response)))?;
            if !response.is_finite() {
                return Err(data_error(Some(line), format!("response `{}` is not finite", record.response)));
            }
            unit_ids.push(record.unit_id);
            labels.push(treatment);
            responses.push(response);
        }
        if unit_ids.is_empty() {
            return Err(data_error(None, "the file holds no units".into()));
        }
        let assignment = AssignmentVector::new(labels);
        for t in Treatment::BOTH {
            if assignment.count(t) == 0 {
                return Err(data_error(None, format!("treatment {t} has no units")));
            }
        }
        let sample = SampleVector::census(unit_ids.len())?;
        let observed = ObservedExperiment::new(sample, assignment, responses)?;
        Ok(Self { unit_ids, observed })
    }
}

fn data_error(line: Option<u64>, message: String) -> CliError {
    CliError::Data { line, message }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Dataset, CliError> {
        Dataset::from_reader(text.as_bytes())
    }

    #[test]
    fn reads_toy_file() {
        let d = parse("unit_id,treatment,response\na,1,1.5\nb,2,3\nc,1,2\n").unwrap();
        assert_eq!(d.unit_ids, ["a", "b", "c"]);
        assert_eq!(d.observed.assignment().n1(), 2);
        assert_eq!(d.observed.responses(), &[1.5, 3.0, 2.0]);
    }

    #[test]
    fn column_order_is_free() {
        let d = parse("response,unit_id,treatment\n4,x,2\n5,y,1\n").unwrap();
        assert_eq!(d.observed.responses(), &[4.0, 5.0]);
    }

    #[test]
    fn rejects_bad_rows_with_line_numbers() {
        let err = parse("unit_id,treatment,response\na,1,1\na,2,2\n").unwrap_err();
        assert!(matches!(&err, CliError::Data { line: Some(3), message } if message.contains("`a`")));
        let err = parse("unit_id,treatment,response\na,3,1\n").unwrap_err();
        assert!(matches!(err, CliError::Data { line: Some(2), .. }));
        let err = parse("unit_id,treatment,response\na,1,abc\nb,2,1\n").unwrap_err();
        assert!(matches!(err, CliError::Data { line: Some(2), .. }));
        let err = parse("unit_id,treatment,response\na,1,1\nb,1,2\n").unwrap_err();
        assert!(matches!(&err, CliError::Data { message, .. } if message.contains("treatment 2")));
        let err = parse("unit_id,response\na,1\n").unwrap_err();
        assert!(matches!(err, CliError::Data { .. }));
        assert!(parse("unit_id,treatment,response\na,1,inf\nb,2,1\n").is_err());
    }
}
