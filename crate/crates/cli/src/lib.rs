//! Command implementations behind the `posbasis` binary: generation,
//! verification, cosine-measure reports, table rendering, composition,
//! and normalization, together with the stable exit-code mapping.

use std::fs;
use std::path::Path;

use serde::Serialize;

use posbasis::{
    cm_formula, compose_partition, compose_partition_unnormalized, cosine_measure_full,
    cosine_measure_sampled, cosine_measure_structured, detect_partition_orthogonal, dims_for,
    is_positive_basis, is_positive_spanning, is_positively_independent, optimal_intermediate,
    rank, realign, tol, validate_omega_plus, BasisFile, CmResult, ConstructError, CosineError,
    Mat, SpanCertificate, SpanError, VecN,
};

/// Errors with their stable process exit codes:
/// 1 parse, 2 size, 3 not a positive basis, 4 invalid partition,
/// 5 composition failure.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Size { n: usize, s: usize },
    NotPositiveBasis(String),
    InvalidPartition(String),
    Compose(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Size { .. } => 2,
            CliError::NotPositiveBasis(_) => 3,
            CliError::InvalidPartition(_) => 4,
            CliError::Compose(_) => 5,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(msg) => write!(f, "{msg}"),
            CliError::Size { n, s } => write!(
                f,
                "size {s} is outside [{}, {}] for dimension {n}",
                n + 1,
                2 * n
            ),
            CliError::NotPositiveBasis(msg) => write!(f, "{msg}"),
            CliError::InvalidPartition(msg) => write!(f, "{msg}"),
            CliError::Compose(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Json,
    Csv,
}

impl std::str::FromStr for FileFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(FileFormat::Json),
            "csv" => Ok(FileFormat::Csv),
            other => Err(format!("unknown format '{other}', expected json or csv")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmMethod {
    Full,
    Structured,
    Sampled,
}

impl std::str::FromStr for CmMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(CmMethod::Full),
            "structured" => Ok(CmMethod::Structured),
            "sampled" => Ok(CmMethod::Sampled),
            other => Err(format!(
                "unknown method '{other}', expected full, structured, or sampled"
            )),
        }
    }
}

pub fn read_basis_file(path: &Path, format: FileFormat) -> Result<BasisFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let parsed = match format {
        FileFormat::Json => BasisFile::from_json(&text),
        FileFormat::Csv => BasisFile::from_csv(&text),
    };
    parsed.map_err(|e| CliError::Parse(format!("cannot parse {}: {e}", path.display())))
}

pub fn render_basis_file(file: &BasisFile, format: FileFormat) -> Result<String, CliError> {
    match format {
        FileFormat::Json => file.to_json(),
        FileFormat::Csv => file.to_csv(),
    }
    .map_err(|e| CliError::Parse(format!("cannot serialize output: {e}")))
}

fn parse_vector(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|field| {
            field
                .trim()
                .parse::<f64>()
                .map_err(|_| CliError::Parse(format!("cannot parse component '{field}'")))
        })
        .collect()
}

// ---------------------------------------------------------------- generate

/// Optimal structured basis for the requested dimension and size, with
/// partition metadata and optional realignment of the first column.
pub fn generate(n: usize, s: usize, align: Option<&str>) -> Result<BasisFile, CliError> {
    let (mut mat, part) = optimal_intermediate(n, s).map_err(|e| match e {
        ConstructError::SizeOutOfRange { n, s } => CliError::Size { n, s },
        other => CliError::Parse(other.to_string()),
    })?;
    let mut meta = vec![
        format!("posbasis generate --n {n} --s {s}"),
        format!("block dimensions: {:?}", part.dims()),
        format!("cosine measure: {}", cm_formula(n, s).map_err(|e| CliError::Parse(e.to_string()))?),
    ];
    if let Some(text) = align {
        let raw = parse_vector(text)?;
        if raw.len() != n {
            return Err(CliError::Parse(format!(
                "alignment vector has {} components, expected {n}",
                raw.len()
            )));
        }
        let v = VecN::new(raw).map_err(|e| CliError::Parse(e.to_string()))?;
        let w = v
            .normalized()
            .map_err(|_| CliError::Parse("alignment vector must be nonzero".into()))?;
        mat = realign(&mat, &w).map_err(|e| CliError::Parse(e.to_string()))?;
        meta.push(format!("realigned first column to {:?}", w.as_slice()));
    }
    Ok(BasisFile::from_matrix(&mat, Some(&part), Some(meta)))
}

// ---------------------------------------------------------------------- cm

#[derive(Debug, Serialize)]
pub struct CmReport {
    pub method: &'static str,
    pub n: usize,
    pub s: usize,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cosine_vectors: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub active_sets: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmin_bases: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forced_sampling: Option<bool>,
}

fn deterministic_report(method: &'static str, mat: &Mat, result: &CmResult) -> CmReport {
    CmReport {
        method,
        n: mat.rows(),
        s: mat.cols(),
        value: result.value,
        cosine_vectors: Some(
            result
                .cosine_vectors
                .iter()
                .map(|u| u.as_slice().to_vec())
                .collect(),
        ),
        active_sets: Some(result.active_sets.clone()),
        argmin_bases: Some(result.argmin_bases.clone()),
        samples: None,
        seed: None,
        forced_sampling: None,
    }
}

fn sampled_report(mat: &Mat, samples: u64, seed: u64, forced: bool) -> CmReport {
    CmReport {
        method: "sampled",
        n: mat.rows(),
        s: mat.cols(),
        value: cosine_measure_sampled(mat, samples, seed),
        cosine_vectors: None,
        active_sets: None,
        argmin_bases: None,
        samples: Some(samples),
        seed: Some(seed),
        forced_sampling: forced.then_some(true),
    }
}

pub const DEFAULT_SAMPLES: u64 = 1_000_000;

/// Cosine-measure report. `force` falls back to raw sampling when the
/// input fails positive-basis validation; sampling always needs an
/// explicit seed.
pub fn cm_report(
    file: &BasisFile,
    method: CmMethod,
    samples: Option<u64>,
    seed: Option<u64>,
    force: bool,
) -> Result<CmReport, CliError> {
    let mat = file
        .to_matrix()
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let need_seed = || {
        seed.ok_or_else(|| CliError::Parse("sampling requires an explicit --seed".into()))
    };
    match method {
        CmMethod::Sampled => {
            let seed = need_seed()?;
            Ok(sampled_report(&mat, samples.unwrap_or(DEFAULT_SAMPLES), seed, false))
        }
        CmMethod::Full => match cosine_measure_full(&mat) {
            Ok(result) => Ok(deterministic_report("full", &mat, &result)),
            Err(CosineError::NotPositiveBasis) if force => {
                let seed = need_seed()?;
                Ok(sampled_report(&mat, samples.unwrap_or(DEFAULT_SAMPLES), seed, true))
            }
            Err(e) => Err(map_cosine_error(e)),
        },
        CmMethod::Structured => {
            let part = file
                .to_partition()
                .map_err(|e| CliError::InvalidPartition(e.to_string()))?
                .ok_or_else(|| {
                    CliError::InvalidPartition("structured method needs partition metadata".into())
                })?;
            match cosine_measure_structured(&mat, &part) {
                Ok(result) => Ok(deterministic_report("structured", &mat, &result)),
                Err(CosineError::NotPositiveBasis) if force => {
                    let seed = need_seed()?;
                    Ok(sampled_report(&mat, samples.unwrap_or(DEFAULT_SAMPLES), seed, true))
                }
                Err(e) => Err(map_cosine_error(e)),
            }
        }
    }
}

fn map_cosine_error(e: CosineError) -> CliError {
    match e {
        CosineError::InvalidPartition(msg) => CliError::InvalidPartition(msg.to_string()),
        other => CliError::NotPositiveBasis(other.to_string()),
    }
}

// ------------------------------------------------------------------ verify

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateReport {
    PositiveCoefficients { alpha: Vec<f64> },
    SeparatingVector { witness: Vec<f64> },
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub s: usize,
    pub unit_columns: bool,
    pub rank: usize,
    pub positive_spanning: bool,
    pub positively_independent: bool,
    pub positive_basis: bool,
    /// minimal / intermediate / maximal, absent when `s` falls outside
    /// the possible range.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size_class: Option<&'static str>,
    /// present: file metadata is a valid orthogonal partition;
    /// detected: recovered from the columns; absent: neither.
    pub omega_plus_partition: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateReport>,
}

pub fn verify_report(file: &BasisFile) -> Result<VerifyReport, CliError> {
    let mat = file
        .to_matrix()
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let (n, s) = (mat.rows(), mat.cols());
    let unit_columns = (0..s).all(|j| mat.col(j).is_unit(tol::UNIT_NORM));
    let numeric_rank = rank(&mat, tol::rank_tol(n, s));

    let mut positive_spanning = false;
    let mut positively_independent = false;
    let mut positive_basis = false;
    let mut certificate = None;
    if unit_columns {
        let check = is_positive_spanning(&mat).map_err(map_span_error)?;
        positive_spanning = check.is_yes();
        certificate = Some(match check.certificate() {
            SpanCertificate::PositiveCoefficients { alpha } => {
                CertificateReport::PositiveCoefficients {
                    alpha: alpha.as_slice().to_vec(),
                }
            }
            SpanCertificate::SeparatingVector { witness } => {
                CertificateReport::SeparatingVector {
                    witness: witness.as_slice().to_vec(),
                }
            }
        });
        positively_independent = is_positively_independent(&mat).map_err(map_span_error)?;
        positive_basis = positive_spanning && positively_independent;
        if positive_basis {
            // impossible by theory for a verified basis; double-checked here
            is_positive_basis(&mat).map_err(map_span_error)?;
        }
    }

    let size_class = if s == n + 1 {
        Some("minimal")
    } else if s == 2 * n {
        Some("maximal")
    } else if s > n + 1 && s < 2 * n {
        Some("intermediate")
    } else {
        None
    };

    let omega_plus_partition = match file.to_partition() {
        Ok(Some(part)) if validate_omega_plus(&mat, &part).is_ok() => "present",
        _ => {
            if unit_columns && detect_partition_orthogonal(&mat).is_ok() {
                "detected"
            } else {
                "absent"
            }
        }
    };

    Ok(VerifyReport {
        n,
        s,
        unit_columns,
        rank: numeric_rank,
        positive_spanning,
        positively_independent,
        positive_basis,
        size_class,
        omega_plus_partition,
        certificate,
    })
}

fn map_span_error(e: SpanError) -> CliError {
    CliError::NotPositiveBasis(e.to_string())
}

// ------------------------------------------------------------------- table

/// Descending-dimension block notation, e.g. `D3,(D2)^2`.
pub fn block_notation(dims: &[usize]) -> String {
    let mut sorted = dims.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let m = sorted[i];
        let mut count = 1;
        while i + count < sorted.len() && sorted[i + count] == m {
            count += 1;
        }
        if count == 1 {
            parts.push(format!("D{m}"));
        } else {
            parts.push(format!("(D{m})^{count}"));
        }
        i += count;
    }
    parts.join(",")
}

/// Tab-separated table of optimal block multisets: one row per size
/// `s = 3 ..= 2 * max_n`, one column per dimension `n = 2 ..= max_n`,
/// dashes where no basis of that size exists, followed by a listing with
/// the closed-form cosine measure of every cell.
pub fn render_table(max_n: usize) -> String {
    assert!(max_n >= 2, "table starts at dimension 2");
    let mut out = String::new();
    out.push_str("s\\n");
    for n in 2..=max_n {
        out.push_str(&format!("\t{n}"));
    }
    out.push('\n');
    for s in 3..=2 * max_n {
        out.push_str(&s.to_string());
        for n in 2..=max_n {
            match dims_for(n, s) {
                Ok(dims) => out.push_str(&format!("\t{}", block_notation(&dims))),
                Err(_) => out.push_str("\t-"),
            }
        }
        out.push('\n');
    }
    out.push('\n');
    out.push_str("n\ts\tblocks\tcm\n");
    for n in 2..=max_n {
        for s in n + 1..=2 * n {
            let dims = dims_for(n, s).expect("in-range cell");
            let value = cm_formula(n, s).expect("in-range cell");
            out.push_str(&format!("{n}\t{s}\t{}\t{value}\n", block_notation(&dims)));
        }
    }
    out
}

// ----------------------------------------------------------------- compose

/// Concatenates block files with their shift vectors. Missing shifts are
/// zero. With `normalize = false` the shifted columns keep their raw
/// lengths and the file is marked non-conformant.
pub fn compose(
    blocks: &[BasisFile],
    criticals: &[Option<Vec<f64>>],
    normalize: bool,
) -> Result<BasisFile, CliError> {
    if blocks.is_empty() {
        return Err(CliError::Parse("compose needs at least one block file".into()));
    }
    if criticals.len() > blocks.len() {
        return Err(CliError::Parse(
            "more critical vectors than block files".into(),
        ));
    }
    let n = blocks[0].n;
    let mut pairs = Vec::with_capacity(blocks.len());
    for (k, file) in blocks.iter().enumerate() {
        let mat = file
            .to_matrix()
            .map_err(|e| CliError::Parse(e.to_string()))?;
        let shift = match criticals.get(k).and_then(|c| c.as_ref()) {
            None => VecN::zeros(n),
            Some(raw) => {
                if raw.len() != n {
                    return Err(CliError::Parse(format!(
                        "critical vector {k} has {} components, expected {n}",
                        raw.len()
                    )));
                }
                VecN::new(raw.clone()).map_err(|e| CliError::Parse(e.to_string()))?
            }
        };
        pairs.push((mat, shift));
    }
    let composed = if normalize {
        compose_partition(&pairs)
    } else {
        compose_partition_unnormalized(&pairs)
    };
    let (mat, part) = composed.map_err(|e| CliError::Compose(e.to_string()))?;
    let mut meta = vec![format!("posbasis compose ({} blocks)", blocks.len())];
    if !normalize {
        meta.push("non-conformant: shifted columns left unnormalized".into());
    }
    Ok(BasisFile::from_matrix(&mat, Some(&part), Some(meta)))
}

// --------------------------------------------------------------- normalize

/// Rescales every column to unit length.
pub fn normalize(file: &BasisFile) -> Result<BasisFile, CliError> {
    let mat = file
        .to_matrix()
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let mut columns = Vec::with_capacity(mat.cols());
    for j in 0..mat.cols() {
        let col = mat.col(j);
        let unit = col
            .normalized()
            .map_err(|_| CliError::Parse(format!("column {j} is zero and cannot be normalized")))?;
        columns.push(unit);
    }
    let normalized = Mat::from_cols(&columns);
    let part = file
        .to_partition()
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let mut meta = file.meta.clone().unwrap_or_default();
    meta.push("posbasis normalize".into());
    Ok(BasisFile::from_matrix(&normalized, part.as_ref(), Some(meta)))
}

// ----------------------------------------------------------------- helpers

/// Serializes a report with a trailing newline.
pub fn to_json_line<T: Serialize>(report: &T) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("reports serialize");
    text.push('\n');
    text
}
