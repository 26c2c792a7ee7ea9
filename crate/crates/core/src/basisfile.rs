//! On-disk representation of a direction set: JSON with optional
//! partition metadata, or a bare CSV matrix (row `i` holds coordinate `i`
//! of all columns). JSON floats are written in shortest round-trip
//! decimal, so write-then-read reproduces every entry bit-exactly.

use serde::{Deserialize, Serialize};

use crate::construct::{Partition, PartitionBlock};
use crate::linalg::{Mat, VecN};

#[derive(Debug)]
pub enum FileError {
    Io(std::io::Error),
    Json(serde_json::Error),
    Invalid(String),
}

impl std::fmt::Display for FileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FileError::Io(e) => write!(f, "io error: {e}"),
            FileError::Json(e) => write!(f, "json error: {e}"),
            FileError::Invalid(what) => write!(f, "invalid basis file: {what}"),
        }
    }
}

impl std::error::Error for FileError {}

impl From<std::io::Error> for FileError {
    fn from(e: std::io::Error) -> Self {
        FileError::Io(e)
    }
}

impl From<serde_json::Error> for FileError {
    fn from(e: serde_json::Error) -> Self {
        FileError::Json(e)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BlockMeta {
    pub m: usize,
    pub column_indices: Vec<usize>,
    pub critical_vector: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PartitionMeta {
    pub blocks: Vec<BlockMeta>,
}

/// Serialized direction set: `s` columns of length `n`, an optional
/// partition, and free-form provenance notes.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BasisFile {
    pub n: usize,
    pub s: usize,
    pub columns: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionMeta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Vec<String>>,
}

impl BasisFile {
    pub fn from_matrix(mat: &Mat, partition: Option<&Partition>, meta: Option<Vec<String>>) -> Self {
        let columns = (0..mat.cols()).map(|j| mat.col(j).into_vec()).collect();
        BasisFile {
            n: mat.rows(),
            s: mat.cols(),
            columns,
            partition: partition.map(|p| PartitionMeta {
                blocks: p
                    .blocks
                    .iter()
                    .map(|b| BlockMeta {
                        m: b.m,
                        column_indices: b.column_indices.clone(),
                        critical_vector: b.critical_vector.as_slice().to_vec(),
                    })
                    .collect(),
            }),
            meta,
        }
    }

    /// Structural validation: counts, finite entries, and (when present)
    /// the partition invariants against the columns.
    pub fn validate(&self) -> Result<(), FileError> {
        if self.n == 0 || self.s == 0 {
            return Err(FileError::Invalid("n and s must be positive".into()));
        }
        if self.columns.len() != self.s {
            return Err(FileError::Invalid(format!(
                "expected {} columns, found {}",
                self.s,
                self.columns.len()
            )));
        }
        for (j, col) in self.columns.iter().enumerate() {
            if col.len() != self.n {
                return Err(FileError::Invalid(format!(
                    "column {j} has length {}, expected {}",
                    col.len(),
                    self.n
                )));
            }
            if col.iter().any(|x| !x.is_finite()) {
                return Err(FileError::Invalid(format!("column {j} has non-finite entries")));
            }
        }
        if let Some(partition) = &self.partition {
            self.partition_from_meta(partition)
                .map_err(|e| FileError::Invalid(format!("partition metadata: {e}")))?;
        }
        Ok(())
    }

    fn partition_from_meta(&self, meta: &PartitionMeta) -> Result<Partition, String> {
        let mut blocks = Vec::with_capacity(meta.blocks.len());
        for b in &meta.blocks {
            if b.critical_vector.len() != self.n {
                return Err("critical vector length must equal n".into());
            }
            let critical_vector = VecN::new(b.critical_vector.clone())
                .map_err(|_| "critical vector has non-finite entries".to_string())?;
            blocks.push(PartitionBlock {
                column_indices: b.column_indices.clone(),
                m: b.m,
                critical_vector,
            });
        }
        let part = Partition {
            blocks,
            n: self.n,
            s: self.s,
        };
        part.validate_shape().map_err(|e| e.to_string())?;
        Ok(part)
    }

    pub fn to_matrix(&self) -> Result<Mat, FileError> {
        self.validate()?;
        let mut data = Vec::with_capacity(self.n * self.s);
        for i in 0..self.n {
            for col in &self.columns {
                data.push(col[i]);
            }
        }
        Mat::new(self.n, self.s, data).map_err(|e| FileError::Invalid(e.to_string()))
    }

    pub fn to_partition(&self) -> Result<Option<Partition>, FileError> {
        match &self.partition {
            None => Ok(None),
            Some(meta) => self
                .partition_from_meta(meta)
                .map(Some)
                .map_err(FileError::Invalid),
        }
    }

    pub fn to_json(&self) -> Result<String, FileError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self, FileError> {
        let file: BasisFile = serde_json::from_str(text)?;
        file.validate()?;
        Ok(file)
    }

    /// CSV matrix: `n` lines, each with `s` comma-separated coordinates.
    /// Partition and meta are JSON-only and dropped here.
    pub fn to_csv(&self) -> Result<String, FileError> {
        self.validate()?;
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = self.columns.iter().map(|col| col[i].to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self, FileError> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut row = Vec::new();
            for field in line.split(',') {
                let value: f64 = field.trim().parse().map_err(|_| {
                    FileError::Invalid(format!("line {}: cannot parse '{field}'", lineno + 1))
                })?;
                row.push(value);
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(FileError::Invalid("csv file holds no rows".into()));
        }
        let s = rows[0].len();
        if rows.iter().any(|r| r.len() != s) {
            return Err(FileError::Invalid("csv rows have differing lengths".into()));
        }
        let n = rows.len();
        let columns = (0..s)
            .map(|j| (0..n).map(|i| rows[i][j]).collect())
            .collect();
        let file = BasisFile {
            n,
            s,
            columns,
            partition: None,
            meta: None,
        };
        file.validate()?;
        Ok(file)
    }
}
