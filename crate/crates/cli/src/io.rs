//! Data ingestion, preprocessing, and result emission.
//!
//! CSV inputs are comma separated with a `.` decimal point and an optional
//! single header row; the default orientation is rows = time, columns =
//! variables. All numeric output, CSV and JSON alike, is formatted with 17
//! significant digits so that identical inputs and configuration produce
//! byte-identical files. Recoverable irregularities (odd lengths, mismatched
//! pair lengths) are repaired with a warning; malformed content is an error
//! naming the offending location.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use specdiff_core::error::CoreError;
use specdiff_core::solver::DifferentialEstimate;
use specdiff_core::spectral::TimeSeries;

/// Command-level failure, split by exit code.
///
/// `Usage` covers bad arguments, unreadable or malformed inputs, and
/// infeasible configurations (exit code 1). `Numerical` covers failures of
/// the estimation itself (exit code 2).
#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Numerical(String),
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Usage(msg) | AppError::Numerical(msg) => f.write_str(msg),
        }
    }
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::DimensionMismatch { .. }
            | CoreError::GridInfeasible { .. }
            | CoreError::InvalidArgument(_)
            | CoreError::NonFiniteInput(_)
            | CoreError::DegenerateTruth { .. } => AppError::Usage(e.to_string()),
            _ => AppError::Numerical(e.to_string()),
        }
    }
}

/// Shorthand for fallible command helpers.
pub type AppResult<T> = Result<T, AppError>;

fn usage(msg: String) -> AppError {
    AppError::Usage(msg)
}

/// CSV orientation and header handling for [`load_timeseries`].
#[derive(Clone, Copy, Debug, Default)]
pub struct LoadOptions {
    /// Input rows are variables and columns are time samples.
    pub transpose: bool,
    /// Skip one header row before parsing.
    pub header: bool,
}

/// Optional transformations applied by [`preprocess`], in field order.
#[derive(Clone, Copy, Debug, Default)]
pub struct PreprocessOptions {
    /// Replace each series by ln z(t)/z(t-1); requires strictly positive
    /// values and shortens the series by one sample.
    pub log_return: bool,
    /// Subtract the per-variable mean.
    pub center: bool,
    /// Divide by the per-variable sample standard deviation.
    pub standardize: bool,
}

/// Reads a CSV file into a series, truncating an odd number of samples to
/// even with a warning. Ragged rows, non-numeric cells, and fewer than two
/// variables or two samples are errors naming the file and location; row and
/// column indices in messages are 1-based file coordinates.
pub fn load_timeseries(
    path: &Path,
    opts: &LoadOptions,
    warnings: &mut Vec<String>,
) -> AppResult<TimeSeries<f64>> {
    let name = path.display();
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{name}: {e}")))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = 0usize;
    let mut skipped_header = false;
    for (line_idx, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if opts.header && !skipped_header {
            skipped_header = true;
            continue;
        }
        let row_no = line_idx + 1;
        let mut row = Vec::new();
        for (col_idx, cell) in line.split(',').enumerate() {
            let cell = cell.trim();
            let value: f64 = cell.parse().map_err(|_| {
                usage(format!(
                    "{name}: non-numeric cell '{cell}' at row {row_no}, column {}",
                    col_idx + 1
                ))
            })?;
            row.push(value);
        }
        if rows.is_empty() {
            width = row.len();
        } else if row.len() != width {
            return Err(usage(format!(
                "{name}: row {row_no} has {} cells, expected {width}",
                row.len()
            )));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(usage(format!("{name}: no data rows")));
    }
    let (p, mut n) = if opts.transpose {
        (rows.len(), width)
    } else {
        (width, rows.len())
    };
    if p < 2 {
        return Err(usage(format!(
            "{name}: need at least 2 variables, found {p}"
        )));
    }
    if n % 2 == 1 {
        n -= 1;
        warnings.push(format!(
            "{name}: dropped the last sample to make the length even (n = {n})"
        ));
    }
    if n < 2 {
        return Err(usage(format!(
            "{name}: need at least 2 usable time samples"
        )));
    }
    let mut data = Vec::with_capacity(p * n);
    for i in 0..p {
        for t in 0..n {
            data.push(if opts.transpose { rows[i][t] } else { rows[t][i] });
        }
    }
    TimeSeries::new(p, n, data).map_err(AppError::from)
}

/// Applies log-return, centering, and standardization in that order. The
/// log-return step shortens the series by one sample and re-truncates to an
/// even length with a warning; a non-positive value under it and a
/// zero-variance variable under standardization are errors naming the
/// variable (and sample) in 0-based matrix coordinates.
pub fn preprocess(
    series: TimeSeries<f64>,
    opts: &PreprocessOptions,
    warnings: &mut Vec<String>,
) -> AppResult<TimeSeries<f64>> {
    if !opts.log_return && !opts.center && !opts.standardize {
        return Ok(series);
    }
    let p = series.p();
    let mut columns: Vec<Vec<f64>> = (0..p).map(|i| series.variable(i).to_vec()).collect();
    if opts.log_return {
        for (i, col) in columns.iter().enumerate() {
            for (t, &v) in col.iter().enumerate() {
                if !(v > 0.0) {
                    return Err(usage(format!(
                        "log return undefined: variable {i}, t = {t} has non-positive value {v}"
                    )));
                }
            }
        }
        for col in &mut columns {
            *col = col.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
        }
        let mut n = columns[0].len();
        if n % 2 == 1 {
            n -= 1;
            for col in &mut columns {
                col.truncate(n);
            }
            warnings.push(format!(
                "log returns dropped the last sample to keep the length even (n = {n})"
            ));
        }
        if n < 2 {
            return Err(usage(
                "log returns left fewer than 2 usable samples".to_string(),
            ));
        }
    }
    if opts.center {
        for col in &mut columns {
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            for v in col.iter_mut() {
                *v -= mean;
            }
        }
    }
    if opts.standardize {
        for (i, col) in columns.iter_mut().enumerate() {
            let n = col.len() as f64;
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
            let sd = var.sqrt();
            if !(sd > 0.0) {
                return Err(usage(format!(
                    "variable {i} has zero variance; cannot standardize"
                )));
            }
            for v in col.iter_mut() {
                *v /= sd;
            }
        }
    }
    let n = columns[0].len();
    let mut data = Vec::with_capacity(p * n);
    for col in &columns {
        data.extend_from_slice(col);
    }
    TimeSeries::new(p, n, data).map_err(AppError::from)
}

/// Truncates both series of a pair to their common length with a warning.
/// Both inputs are already even-length, so the minimum is even too.
pub fn align_pair(
    x: TimeSeries<f64>,
    y: TimeSeries<f64>,
    warnings: &mut Vec<String>,
) -> AppResult<(TimeSeries<f64>, TimeSeries<f64>)> {
    if x.p() != y.p() {
        return Err(usage(format!(
            "paired series have different variable counts: {} and {}",
            x.p(),
            y.p()
        )));
    }
    if x.n() == y.n() {
        return Ok((x, y));
    }
    let n = x.n().min(y.n());
    warnings.push(format!(
        "paired series have different lengths ({} and {}); truncated both to n = {n}",
        x.n(),
        y.n()
    ));
    Ok((truncate_series(&x, n)?, truncate_series(&y, n)?))
}

fn truncate_series(s: &TimeSeries<f64>, n: usize) -> AppResult<TimeSeries<f64>> {
    let mut data = Vec::with_capacity(s.p() * n);
    for i in 0..s.p() {
        data.extend_from_slice(&s.variable(i)[..n]);
    }
    TimeSeries::new(s.p(), n, data).map_err(AppError::from)
}

/// JSON formatter fixing every float to 17 significant digits in scientific
/// notation, the precision that round-trips `f64` exactly.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W: std::io::Write + ?Sized>(
        &mut self,
        writer: &mut W,
        value: f64,
    ) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: std::io::Write + ?Sized>(
        &mut self,
        writer: &mut W,
        value: f32,
    ) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes a value to JSON with deterministic float formatting and stable
/// key order (struct declaration order).
pub fn to_json<S: Serialize>(value: &S) -> AppResult<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| usage(format!("serialization failed: {e}")))?;
    Ok(String::from_utf8(buf).expect("JSON serializer emits UTF-8"))
}

/// Writes a value as a JSON file with a trailing newline.
pub fn write_json<S: Serialize>(path: &Path, value: &S) -> AppResult<()> {
    let text = to_json(value)?;
    fs::write(path, text + "\n").map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// One recovered edge with its stacked group norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Contents of `edges.json`: the recovered edge set with the grid and
/// penalty context needed to reproduce it.
#[derive(Debug, Serialize, Deserialize)]
pub struct EdgesFile {
    pub edges: Vec<EdgeRecord>,
    /// Number of variables.
    pub p: usize,
    /// Number of frequency blocks.
    pub m: usize,
    /// Smoothing span per block.
    pub k: usize,
    pub penalty: String,
    pub lambda: f64,
    pub converged: bool,
}

/// Builds the `edges.json` payload from an estimate. The weight of each
/// edge is the Euclidean norm of its entry group across all blocks, taken
/// from the symmetrized sparse iterate.
pub fn edges_file(
    estimate: &DifferentialEstimate<f64>,
    m: usize,
    k: usize,
    penalty: &str,
    lambda: f64,
) -> EdgesFile {
    let p = estimate.group_norms.rows();
    let edges = estimate
        .edges
        .iter()
        .map(|&(i, j)| EdgeRecord {
            i,
            j,
            weight: estimate.group_norms.get(i, j),
        })
        .collect();
    EdgesFile {
        edges,
        p,
        m,
        k,
        penalty: penalty.to_string(),
        lambda,
        converged: estimate.converged,
    }
}

/// Writes a series as CSV with rows = time and columns = variables, the
/// orientation [`load_timeseries`] reads back without flags.
pub fn write_series_csv(path: &Path, series: &TimeSeries<f64>) -> AppResult<()> {
    let mut out = Vec::new();
    for t in 0..series.n() {
        for i in 0..series.p() {
            if i > 0 {
                out.push(b',');
            }
            write!(out, "{:.16e}", series.variable(i)[t]).expect("write to Vec cannot fail");
        }
        out.push(b'\n');
    }
    fs::write(path, out).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Writes one CSV per frequency block with real and imaginary parts
/// interleaved: row i holds re(i,0), im(i,0), re(i,1), im(i,1), ...
pub fn write_delta_csvs(dir: &Path, estimate: &DifferentialEstimate<f64>) -> AppResult<()> {
    for (block, matrix) in estimate.sparse.iter().enumerate() {
        let p = matrix.rows();
        let mut out = Vec::new();
        for i in 0..p {
            for j in 0..p {
                if j > 0 {
                    out.push(b',');
                }
                let v = matrix.get(i, j);
                write!(out, "{:.16e},{:.16e}", v.re, v.im).expect("write to Vec cannot fail");
            }
            out.push(b'\n');
        }
        let path = dir.join(format!("delta_{block}.csv"));
        fs::write(&path, out).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// Reference edge list parsed from a truth file: either bare index pairs or
/// records with weights, in both cases under a top-level `edges` key.
#[derive(Debug, Deserialize)]
pub struct TruthEdges {
    pub edges: EdgeList,
}

/// Accepts both the `truth.json` pair layout and the `edges.json` record
/// layout.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum EdgeList {
    Pairs(Vec<(usize, usize)>),
    Records(Vec<EdgeRecord>),
}

impl EdgeList {
    pub fn into_pairs(self) -> Vec<(usize, usize)> {
        match self {
            EdgeList::Pairs(pairs) => pairs,
            EdgeList::Records(records) => records.into_iter().map(|e| (e.i, e.j)).collect(),
        }
    }
}

/// Loads a reference edge set from a JSON file with an `edges` key.
pub fn load_truth_edges(path: &Path) -> AppResult<Vec<(usize, usize)>> {
    let text =
        fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let parsed: TruthEdges = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{}: not a truth file: {e}", path.display())))?;
    Ok(parsed.edges.into_pairs())
}

/// Prints accumulated warnings to stderr, one per line.
pub fn report_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use specdiff_core::error::CoreError;
    use std::io::Write;

    fn temp_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().expect("temp file");
        f.write_all(content.as_bytes()).expect("write temp csv");
        f
    }

    fn load(content: &str, opts: &LoadOptions) -> (AppResult<TimeSeries<f64>>, Vec<String>) {
        let f = temp_csv(content);
        let mut warnings = Vec::new();
        let r = load_timeseries(f.path(), opts, &mut warnings);
        (r, warnings)
    }

    #[test]
    fn four_by_two_csv_loads_as_two_variables() {
        let (r, warnings) = load("1,2\n3,4\n5,6\n7,8\n", &LoadOptions::default());
        let s = r.unwrap();
        assert_eq!((s.p(), s.n()), (2, 4));
        assert_eq!(s.variable(0), &[1.0, 3.0, 5.0, 7.0]);
        assert_eq!(s.variable(1), &[2.0, 4.0, 6.0, 8.0]);
        assert!(warnings.is_empty());
    }

    #[test]
    fn odd_row_count_truncates_with_warning() {
        let (r, warnings) = load("1,2\n3,4\n5,6\n7,8\n9,10\n", &LoadOptions::default());
        let s = r.unwrap();
        assert_eq!(s.n(), 4);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("dropped the last sample"));
    }

    #[test]
    fn header_row_is_skipped() {
        let opts = LoadOptions {
            header: true,
            ..Default::default()
        };
        let (r, _) = load("a,b\n1,2\n3,4\n", &opts);
        let s = r.unwrap();
        assert_eq!((s.p(), s.n()), (2, 2));
        assert_eq!(s.variable(0), &[1.0, 3.0]);
    }

    #[test]
    fn transpose_flips_orientation() {
        let opts = LoadOptions {
            transpose: true,
            ..Default::default()
        };
        let (r, _) = load("1,3,5,7\n2,4,6,8\n", &opts);
        let s = r.unwrap();
        assert_eq!((s.p(), s.n()), (2, 4));
        assert_eq!(s.variable(0), &[1.0, 3.0, 5.0, 7.0]);
    }

    #[test]
    fn ragged_row_error_names_the_row() {
        let (r, _) = load("1,2\n3\n5,6\n", &LoadOptions::default());
        match r {
            Err(AppError::Usage(msg)) => {
                assert!(msg.contains("row 2"), "got: {msg}");
                assert!(msg.contains("expected 2"), "got: {msg}");
            }
            other => panic!("expected usage error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_cell_error_names_row_and_column() {
        let (r, _) = load("1,2\n3,oops\n", &LoadOptions::default());
        match r {
            Err(AppError::Usage(msg)) => {
                assert!(msg.contains("row 2"), "got: {msg}");
                assert!(msg.contains("column 2"), "got: {msg}");
                assert!(msg.contains("oops"), "got: {msg}");
            }
            other => panic!("expected usage error, got {other:?}"),
        }
    }

    #[test]
    fn single_variable_is_rejected() {
        let (r, _) = load("1\n2\n3\n4\n", &LoadOptions::default());
        match r {
            Err(AppError::Usage(msg)) => assert!(msg.contains("at least 2 variables")),
            other => panic!("expected usage error, got {other:?}"),
        }
    }

    fn series(cols: &[&[f64]]) -> TimeSeries<f64> {
        let p = cols.len();
        let n = cols[0].len();
        let mut data = Vec::new();
        for col in cols {
            data.extend_from_slice(col);
        }
        TimeSeries::new(p, n, data).unwrap()
    }

    #[test]
    fn log_return_of_exponential_ramp_is_ones() {
        let e = std::f64::consts::E;
        let s = series(&[&[1.0, e, e * e], &[1.0, 1.0, 1.0]]);
        let opts = PreprocessOptions {
            log_return: true,
            ..Default::default()
        };
        let mut warnings = Vec::new();
        let r = preprocess(s, &opts, &mut warnings).unwrap();
        assert_eq!(r.n(), 2);
        assert!((r.variable(0)[0] - 1.0).abs() < 1e-15);
        assert!((r.variable(0)[1] - 1.0).abs() < 1e-15);
        assert_eq!(r.variable(1), &[0.0, 0.0]);
        assert!(warnings.is_empty());
    }

    #[test]
    fn log_return_re_truncates_to_even_length() {
        let s = series(&[&[1.0, 2.0, 4.0, 8.0], &[1.0, 1.0, 1.0, 1.0]]);
        let opts = PreprocessOptions {
            log_return: true,
            ..Default::default()
        };
        let mut warnings = Vec::new();
        let r = preprocess(s, &opts, &mut warnings).unwrap();
        assert_eq!(r.n(), 2);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("even"));
    }

    #[test]
    fn log_return_rejects_non_positive_values_naming_the_location() {
        let s = series(&[&[1.0, 2.0], &[3.0, -1.0]]);
        let opts = PreprocessOptions {
            log_return: true,
            ..Default::default()
        };
        let mut warnings = Vec::new();
        match preprocess(s, &opts, &mut warnings) {
            Err(AppError::Usage(msg)) => {
                assert!(msg.contains("variable 1"), "got: {msg}");
                assert!(msg.contains("t = 1"), "got: {msg}");
            }
            other => panic!("expected usage error, got {other:?}"),
        }
    }

    #[test]
    fn center_and_standardize_normalize_each_variable() {
        let s = series(&[&[1.0, 2.0, 3.0, 10.0], &[-5.0, 0.0, 5.0, 20.0]]);
        let opts = PreprocessOptions {
            center: true,
            standardize: true,
            ..Default::default()
        };
        let mut warnings = Vec::new();
        let r = preprocess(s, &opts, &mut warnings).unwrap();
        for i in 0..2 {
            let col = r.variable(i);
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            let var = col.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>()
                / (col.len() as f64 - 1.0);
            assert!(mean.abs() < 1e-12);
            assert!((var - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_variance_variable_cannot_standardize() {
        let s = series(&[&[1.0, 2.0], &[7.0, 7.0]]);
        let opts = PreprocessOptions {
            standardize: true,
            ..Default::default()
        };
        let mut warnings = Vec::new();
        match preprocess(s, &opts, &mut warnings) {
            Err(AppError::Usage(msg)) => assert!(msg.contains("variable 1"), "got: {msg}"),
            other => panic!("expected usage error, got {other:?}"),
        }
    }

    #[test]
    fn align_pair_truncates_to_common_length_with_warning() {
        let x = series(&[&[1.0, 2.0, 3.0, 4.0], &[5.0, 6.0, 7.0, 8.0]]);
        let y = series(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let mut warnings = Vec::new();
        let (x, y) = align_pair(x, y, &mut warnings).unwrap();
        assert_eq!((x.n(), y.n()), (2, 2));
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("truncated"));
    }

    #[test]
    fn json_floats_use_seventeen_significant_digits() {
        #[derive(Serialize)]
        struct V {
            a: f64,
            b: f64,
        }
        let text = to_json(&V { a: 0.5, b: -3.0 }).unwrap();
        assert_eq!(text, "{\"a\":5.0000000000000000e-1,\"b\":-3.0000000000000000e0}");
    }

    #[test]
    fn json_float_format_round_trips_exactly() {
        let values = [1.0 / 3.0, 0.1, 2.0f64.powi(-40), 1.23456789e17];
        for v in values {
            let text = format!("{v:.16e}");
            let back: f64 = text.parse().unwrap();
            assert_eq!(back, v);
        }
    }

    #[test]
    fn truth_file_accepts_pairs_and_records() {
        let pairs: TruthEdges = serde_json::from_str("{\"edges\":[[0,1],[2,3]]}").unwrap();
        assert_eq!(pairs.edges.into_pairs(), vec![(0, 1), (2, 3)]);
        let records: TruthEdges =
            serde_json::from_str("{\"edges\":[{\"i\":4,\"j\":5,\"weight\":0.25}]}").unwrap();
        assert_eq!(records.edges.into_pairs(), vec![(4, 5)]);
    }

    #[test]
    fn error_classification_follows_failure_origin() {
        let usage = AppError::from(CoreError::InvalidArgument("x".into()));
        assert!(matches!(usage, AppError::Usage(_)));
        let numerical = AppError::from(CoreError::NonFiniteIterate { iteration: 3 });
        assert!(matches!(numerical, AppError::Numerical(_)));
        let bracket = AppError::from(CoreError::BracketFailure { lo: 0.1, hi: 1.0 });
        assert!(matches!(bracket, AppError::Numerical(_)));
    }
}
