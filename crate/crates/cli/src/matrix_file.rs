use std::fs;
use std::path::Path;

use qstiefel::{QMatrix, Quaternion};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// On-disk quaternionic matrix: `entries[i][j] = [w, x, y, z]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<[f64; 4]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &QMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: (0..m.rows())
                .map(|i| m.row(i).iter().map(|q| q.components()).collect())
                .collect(),
        }
    }

    /// Checks the declared shape and finiteness.
    pub fn to_matrix(&self) -> Result<QMatrix, String> {
        if self.entries.len() != self.rows {
            return Err(format!(
                "declared {} rows, found {}",
                self.rows,
                self.entries.len()
            ));
        }
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.cols {
                return Err(format!(
                    "row {i} has {} entries, declared cols = {}",
                    row.len(),
                    self.cols
                ));
            }
            for (j, &[w, x, y, z]) in row.iter().enumerate() {
                let q = Quaternion::new(w, x, y, z);
                if !q.is_finite() {
                    return Err(format!("entry ({i}, {j}) is not finite"));
                }
                data.push(q);
            }
        }
        QMatrix::from_vec(self.rows, self.cols, data).map_err(|e| e.to_string())
    }

    pub fn parse(text: &str) -> Result<QMatrix, String> {
        let file: MatrixFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
        file.to_matrix()
    }

    pub fn to_json(m: &QMatrix) -> String {
        serde_json::to_string_pretty(&Self::from_matrix(m)).expect("finite matrix")
    }
}

pub fn read_matrix(path: &Path) -> Result<QMatrix, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    MatrixFile::parse(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("serializable value");
    fs::write(path, text + "\n").map_err(|e| CliError::failure(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let m = QMatrix::from_fn(2, 3, |i, j| {
            Quaternion::new(
                0.1 * i as f64,
                1.0 / 3.0,
                -2e-300 * j as f64,
                std::f64::consts::PI,
            )
        });
        let back = MatrixFile::parse(&MatrixFile::to_json(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn shape_errors_are_reported() {
        let bad = r#"{"rows": 2, "cols": 1, "entries": [[[1,0,0,0]]]}"#;
        assert!(MatrixFile::parse(bad)
            .unwrap_err()
            .contains("declared 2 rows"));
        let ragged = r#"{"rows": 1, "cols": 2, "entries": [[[1,0,0,0]]]}"#;
        assert!(MatrixFile::parse(ragged).unwrap_err().contains("row 0"));
        let short = r#"{"rows": 1, "cols": 1, "entries": [[[1,0,0]]]}"#;
        assert!(MatrixFile::parse(short).unwrap_err().contains("line"));
    }
}
