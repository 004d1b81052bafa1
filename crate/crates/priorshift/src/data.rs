//! Datasets, the class-prior simplex vector, seeded randomness, and CSV ingestion.
//!
//! Labels are 1-based consecutive integers internally. Loaders remap whatever
//! appears in the label column to `1..=c` in first-appearance order and keep
//! the original text around for serialization. All randomized operations take
//! an explicit [`RngSeed`]; identical seed and inputs give bit-identical
//! results.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Seed for randomized operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngSeed(pub u64);

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngSeed {
    /// Derive an independent child seed as a pure function of `(self, stream, index)`.
    pub fn derive(self, stream: u64, index: u64) -> RngSeed {
        let a = self
            .0
            .wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(stream.wrapping_add(1)));
        let b = a.wrapping_add(0xd1b5_4a32_d192_ed03u64.wrapping_mul(index.wrapping_add(1)));
        RngSeed(mix64(b))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// A point on the probability simplex: entries non-negative, summing to one
/// within 1e-12. Index `y - 1` holds the mass of class `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexVector {
    values: DVector<f64>,
}

impl SimplexVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("simplex vector must be non-empty"));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::validation(format!(
                    "simplex entry {i} is not finite: {v}"
                )));
            }
            if v < 0.0 {
                return Err(Error::validation(format!(
                    "simplex entry {i} is negative: {v}"
                )));
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::validation(format!(
                "simplex entries sum to {sum}, expected 1 within 1e-12"
            )));
        }
        Ok(SimplexVector {
            values: DVector::from_vec(values),
        })
    }

    /// Build from non-negative weights, clipping rounding residue below zero
    /// (at most 1e-9 in magnitude) and renormalizing to an exact unit sum.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let mut v = weights.to_vec();
        for (i, x) in v.iter_mut().enumerate() {
            if !x.is_finite() {
                return Err(Error::validation(format!(
                    "weight entry {i} is not finite"
                )));
            }
            if *x < -1e-9 {
                return Err(Error::validation(format!(
                    "weight entry {i} is negative: {x}"
                )));
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let sum: f64 = v.iter().sum();
        if sum <= 0.0 {
            return Err(Error::validation("weights sum to zero"));
        }
        for x in v.iter_mut() {
            *x /= sum;
        }
        SimplexVector::new(v)
    }

    pub fn uniform(c: usize) -> Self {
        SimplexVector {
            values: DVector::from_element(c, 1.0 / c as f64),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn as_slice(&self) -> &[f64] {
        self.values.as_slice()
    }

    pub fn l2_distance(&self, other: &SimplexVector) -> f64 {
        (&self.values - &other.values).norm()
    }

    pub fn linf_distance(&self, other: &SimplexVector) -> f64 {
        (&self.values - &other.values).amax()
    }
}

/// Labeled training data: `n` feature rows with classes in `1..=c`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: DMatrix<f64>,
    labels: Vec<usize>,
    class_count: usize,
    label_names: Vec<String>,
}

impl LabeledDataset {
    /// Build from raw parts. Validates finite features, label range and row
    /// counts. Class presence (`n_y >= 1` for every `y`) is enforced by the
    /// loader and by the estimators, not here: draw operations may legally
    /// produce datasets with empty classes.
    pub fn from_parts(features: DMatrix<f64>, labels: Vec<usize>, class_count: usize) -> Result<Self> {
        let label_names = (1..=class_count).map(|y| y.to_string()).collect();
        Self::from_parts_named(features, labels, class_count, label_names)
    }

    pub fn from_parts_named(
        features: DMatrix<f64>,
        labels: Vec<usize>,
        class_count: usize,
        label_names: Vec<String>,
    ) -> Result<Self> {
        if features.nrows() == 0 {
            return Err(Error::validation("dataset has no rows"));
        }
        if features.nrows() != labels.len() {
            return Err(Error::validation(format!(
                "{} feature rows but {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        if class_count == 0 {
            return Err(Error::validation("class count must be at least 1"));
        }
        if label_names.len() != class_count {
            return Err(Error::validation("label name count must equal class count"));
        }
        for (i, row) in features.row_iter().enumerate() {
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::validation(format!(
                    "non-finite feature value in row {}",
                    i + 1
                )));
            }
        }
        for (i, &y) in labels.iter().enumerate() {
            if y == 0 || y > class_count {
                return Err(Error::validation(format!(
                    "label {} in row {} outside 1..={}",
                    y,
                    i + 1,
                    class_count
                )));
            }
        }
        Ok(LabeledDataset {
            features,
            labels,
            class_count,
            label_names,
        })
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    /// Per-class sample counts, indexed by `y - 1`.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.class_count];
        for &y in &self.labels {
            counts[y - 1] += 1;
        }
        counts
    }

    /// Row indices of class `y` (1-based), in dataset order.
    pub fn class_indices(&self, y: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == y)
            .map(|(i, _)| i)
            .collect()
    }

    /// Errors unless every class in `1..=c` has at least one sample.
    pub fn require_all_classes(&self) -> Result<()> {
        for (idx, count) in self.class_counts().iter().enumerate() {
            if *count == 0 {
                return Err(Error::validation(format!(
                    "class {} has no samples",
                    idx + 1
                )));
            }
        }
        Ok(())
    }

    /// Training class proportions `n_y / n` as a simplex vector.
    pub fn class_proportions(&self) -> Result<SimplexVector> {
        self.require_all_classes()?;
        let n = self.n() as f64;
        let props: Vec<f64> = self.class_counts().iter().map(|&c| c as f64 / n).collect();
        SimplexVector::from_weights(&props)
    }

    /// New dataset consisting of the given rows (indices may repeat).
    pub fn subset(&self, rows: &[usize]) -> LabeledDataset {
        let features = select_rows(&self.features, rows);
        let labels = rows.iter().map(|&i| self.labels[i]).collect();
        LabeledDataset {
            features,
            labels,
            class_count: self.class_count,
            label_names: self.label_names.clone(),
        }
    }

    /// Features only, labels withheld.
    pub fn to_unlabeled(&self) -> UnlabeledDataset {
        UnlabeledDataset {
            features: self.features.clone(),
        }
    }
}

/// Unlabeled test data: `n'` feature rows.
#[derive(Debug, Clone, PartialEq)]
pub struct UnlabeledDataset {
    features: DMatrix<f64>,
}

impl UnlabeledDataset {
    pub fn from_features(features: DMatrix<f64>) -> Result<Self> {
        if features.nrows() == 0 {
            return Err(Error::validation("dataset has no rows"));
        }
        for (i, row) in features.row_iter().enumerate() {
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::validation(format!(
                    "non-finite feature value in row {}",
                    i + 1
                )));
            }
        }
        Ok(UnlabeledDataset { features })
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }
}

pub(crate) fn select_rows(m: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(rows.len(), m.ncols());
    for (dst, &src) in rows.iter().enumerate() {
        out.set_row(dst, &m.row(src));
    }
    out
}

// ---------------------------------------------------------------------------
// CSV ingestion and serialization
// ---------------------------------------------------------------------------

/// On-disk CSV layouts understood by [`load_dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvFormat {
    /// Last column is the class label; the rest are features.
    LabeledLastColumn,
    /// Every column is a feature.
    Unlabeled,
}

#[derive(Debug)]
pub enum Dataset {
    Labeled(LabeledDataset),
    Unlabeled(UnlabeledDataset),
}

pub fn load_dataset(path: &Path, format: CsvFormat) -> Result<Dataset> {
    match format {
        CsvFormat::LabeledLastColumn => load_labeled_csv(path).map(Dataset::Labeled),
        CsvFormat::Unlabeled => load_unlabeled_csv(path).map(Dataset::Unlabeled),
    }
}

struct RawCsv {
    rows: Vec<(usize, Vec<String>)>, // (1-based line, fields)
    arity: usize,
}

/// Reads all records, enforcing equal arity. A header is detected when any of
/// the first row's feature fields fails to parse as a float.
fn read_csv(path: &Path, feature_cols: impl Fn(usize) -> usize) -> Result<RawCsv> {
    let file = File::open(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let fields: Vec<String> = record.iter().map(|s| s.to_string()).collect();
        if fields.iter().all(|f| f.is_empty()) {
            continue; // blank line
        }
        rows.push((line, fields));
    }
    if rows.is_empty() {
        return Err(Error::validation(format!(
            "{}: no data rows",
            path.display()
        )));
    }

    // Header sniff on the first row.
    let n_feat = feature_cols(rows[0].1.len());
    let is_header = rows[0].1[..n_feat]
        .iter()
        .any(|f| f.parse::<f64>().is_err());
    if is_header {
        rows.remove(0);
        if rows.is_empty() {
            return Err(Error::validation(format!(
                "{}: no data rows after header",
                path.display()
            )));
        }
    }

    let arity = rows[0].1.len();
    for (line, fields) in &rows {
        if fields.len() != arity {
            return Err(Error::Parse {
                line: *line,
                message: format!("expected {} fields, found {}", arity, fields.len()),
            });
        }
    }
    Ok(RawCsv { rows, arity })
}

fn parse_feature(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse '{field}' as a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::validation(format!(
            "non-finite feature value '{field}' at line {line}"
        )));
    }
    Ok(v)
}

pub fn load_labeled_csv(path: &Path) -> Result<LabeledDataset> {
    let raw = read_csv(path, |arity| arity.saturating_sub(1))?;
    if raw.arity < 2 {
        return Err(Error::validation(format!(
            "{}: labeled rows need at least one feature column and a label column",
            path.display()
        )));
    }
    let d = raw.arity - 1;
    let n = raw.rows.len();

    let mut flat = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    let mut label_names: Vec<String> = Vec::new();
    for (line, fields) in &raw.rows {
        for field in &fields[..d] {
            flat.push(parse_feature(field, *line)?);
        }
        let name = fields[d].as_str();
        let y = match label_names.iter().position(|existing| existing == name) {
            Some(pos) => pos + 1,
            None => {
                label_names.push(name.to_string());
                label_names.len()
            }
        };
        labels.push(y);
    }
    let features = DMatrix::from_row_slice(n, d, &flat);
    let ds = LabeledDataset::from_parts_named(features, labels, label_names.len(), label_names)?;
    ds.require_all_classes()?;
    Ok(ds)
}

pub fn load_unlabeled_csv(path: &Path) -> Result<UnlabeledDataset> {
    let raw = read_csv(path, |arity| arity)?;
    let d = raw.arity;
    let n = raw.rows.len();
    let mut flat = Vec::with_capacity(n * d);
    for (line, fields) in &raw.rows {
        for field in fields {
            flat.push(parse_feature(field, *line)?);
        }
    }
    UnlabeledDataset::from_features(DMatrix::from_row_slice(n, d, &flat))
}

pub fn save_labeled_csv(ds: &LabeledDataset, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (i, row) in ds.features.row_iter().enumerate() {
        for v in row.iter() {
            write!(w, "{v},")?;
        }
        writeln!(w, "{}", ds.label_names[ds.labels[i] - 1])?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_unlabeled_csv(ds: &UnlabeledDataset, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for row in ds.features.row_iter() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writeln!(w, "{}", fields.join(","))?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Seeded draws
// ---------------------------------------------------------------------------

/// Draws exactly `per_class_counts[y-1]` rows of each class `y`, uniformly
/// without replacement, deterministically in `seed`.
pub fn stratified_draw(
    data: &LabeledDataset,
    per_class_counts: &[usize],
    seed: RngSeed,
) -> Result<LabeledDataset> {
    let rows = stratified_draw_indices(data, per_class_counts, seed)?;
    Ok(data.subset(&rows))
}

pub(crate) fn stratified_draw_indices(
    data: &LabeledDataset,
    per_class_counts: &[usize],
    seed: RngSeed,
) -> Result<Vec<usize>> {
    if per_class_counts.len() != data.class_count() {
        return Err(Error::validation(format!(
            "{} per-class counts for {} classes",
            per_class_counts.len(),
            data.class_count()
        )));
    }
    let mut rng = seed.rng();
    let mut rows = Vec::new();
    for (idx, &want) in per_class_counts.iter().enumerate() {
        let mut pool = data.class_indices(idx + 1);
        if want > pool.len() {
            return Err(Error::validation(format!(
                "requested {} samples of class {} but only {} available",
                want,
                idx + 1,
                pool.len()
            )));
        }
        for i in 0..want {
            let j = rng.random_range(i..pool.len());
            pool.swap(i, j);
        }
        rows.extend_from_slice(&pool[..want]);
    }
    Ok(rows)
}

/// Draws `total` rows by first sampling each row's class i.i.d. from `prior`,
/// then picking a point of that class uniformly without replacement.
pub fn prior_draw(
    data: &LabeledDataset,
    total: usize,
    prior: &SimplexVector,
    seed: RngSeed,
) -> Result<LabeledDataset> {
    if prior.len() != data.class_count() {
        return Err(Error::validation(format!(
            "prior has {} entries for {} classes",
            prior.len(),
            data.class_count()
        )));
    }
    let mut rng = seed.rng();
    let mut pools: Vec<Vec<usize>> = (1..=data.class_count())
        .map(|y| data.class_indices(y))
        .collect();
    let mut rows = Vec::with_capacity(total);
    for draw in 0..total {
        let y = sample_class(prior, &mut rng);
        let pool = &mut pools[y];
        if pool.is_empty() {
            return Err(Error::validation(format!(
                "class {} exhausted after {} draws",
                y + 1,
                draw
            )));
        }
        let j = rng.random_range(0..pool.len());
        rows.push(pool.swap_remove(j));
    }
    Ok(data.subset(&rows))
}

/// Samples a 0-based class index from the prior.
pub(crate) fn sample_class(prior: &SimplexVector, rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (idx, &p) in prior.as_slice().iter().enumerate() {
        if p > 0.0 {
            last_positive = idx;
        }
        acc += p;
        if u < acc {
            return if p > 0.0 { idx } else { last_positive };
        }
    }
    last_positive
}

// ---------------------------------------------------------------------------
// Optional feature standardization (train statistics applied to test)
// ---------------------------------------------------------------------------

/// Per-dimension affine transform fit on training features.
#[derive(Debug, Clone)]
pub struct Standardizer {
    mean: DVector<f64>,
    scale: DVector<f64>,
}

impl Standardizer {
    pub fn fit(train: &LabeledDataset) -> Standardizer {
        let m = train.features();
        let n = m.nrows() as f64;
        let mean = DVector::from_iterator(m.ncols(), m.column_iter().map(|c| c.sum() / n));
        let scale = DVector::from_iterator(
            m.ncols(),
            m.column_iter().enumerate().map(|(j, c)| {
                let mu = mean[j];
                let var = c.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>()
                    / (n - 1.0).max(1.0);
                let sd = var.sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            }),
        );
        Standardizer { mean, scale }
    }

    fn transform(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = m.clone();
        for mut row in out.row_iter_mut() {
            for j in 0..row.ncols() {
                row[j] = (row[j] - self.mean[j]) / self.scale[j];
            }
        }
        out
    }

    pub fn apply_labeled(&self, ds: &LabeledDataset) -> LabeledDataset {
        LabeledDataset {
            features: self.transform(&ds.features),
            labels: ds.labels.clone(),
            class_count: ds.class_count,
            label_names: ds.label_names.clone(),
        }
    }

    pub fn apply_unlabeled(&self, ds: &UnlabeledDataset) -> UnlabeledDataset {
        UnlabeledDataset {
            features: self.transform(&ds.features),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write as _;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_small_labeled_csv() {
        let f = write_temp("1,2,1\n3,4,2\n5,6,1\n");
        let ds = load_labeled_csv(f.path()).unwrap();
        assert_eq!(ds.n(), 3);
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.class_count(), 2);
        assert_eq!(ds.class_counts(), vec![2, 1]);
        assert_eq!(ds.labels(), &[1, 2, 1]);
        assert_eq!(ds.features()[(1, 0)], 3.0);
    }

    #[test]
    fn load_detects_header() {
        let f = write_temp("x1,x2,label\n1,2,1\n3,4,2\n");
        let ds = load_labeled_csv(f.path()).unwrap();
        assert_eq!(ds.n(), 2);
        assert_eq!(ds.class_count(), 2);
    }

    #[test]
    fn load_rejects_nan_naming_row() {
        let f = write_temp("1,2,1\n3,NaN,2\n");
        let err = load_labeled_csv(f.path()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn load_rejects_ragged_rows() {
        let f = write_temp("1,2,1\n3,4\n");
        let err = load_labeled_csv(f.path()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn load_table_scale_file() {
        // File with the shape of a mid-size binary benchmark: 690 rows,
        // 14 features, 307 positives and 383 negatives.
        let mut content = String::new();
        for i in 0..690 {
            for j in 0..14 {
                content.push_str(&format!("{}.5,", (i * 14 + j) % 97));
            }
            content.push_str(if i < 307 { "1\n" } else { "2\n" });
        }
        let f = write_temp(&content);
        let ds = load_labeled_csv(f.path()).unwrap();
        assert_eq!(ds.n(), 690);
        assert_eq!(ds.dim(), 14);
        assert_eq!(ds.class_counts(), vec![307, 383]);
    }

    #[test]
    fn string_labels_remap_in_first_appearance_order() {
        let f = write_temp("0.0,pos\n1.0,neg\n2.0,pos\n");
        let ds = load_labeled_csv(f.path()).unwrap();
        assert_eq!(ds.labels(), &[1, 2, 1]);
        assert_eq!(ds.label_names(), &["pos".to_string(), "neg".to_string()]);
    }

    #[test]
    fn save_load_round_trip_is_exact() {
        let features = DMatrix::from_row_slice(3, 2, &[0.1, -2.5e-7, 3.25, 4.0, 1e300, 0.0]);
        let ds = LabeledDataset::from_parts(features, vec![1, 2, 1], 2).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_labeled_csv(&ds, f.path()).unwrap();
        let back = load_labeled_csv(f.path()).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn simplex_vector_rejects_invalid() {
        assert!(SimplexVector::new(vec![0.5, 0.6]).is_err());
        assert!(SimplexVector::new(vec![-0.1, 1.1]).is_err());
        assert!(SimplexVector::new(vec![f64::NAN, 1.0]).is_err());
        assert!(SimplexVector::new(vec![0.25, 0.75]).is_ok());
    }

    fn two_class_dataset(n1: usize, n2: usize) -> LabeledDataset {
        let n = n1 + n2;
        let features = DMatrix::from_fn(n, 1, |i, _| i as f64);
        let labels = (0..n).map(|i| if i < n1 { 1 } else { 2 }).collect();
        LabeledDataset::from_parts(features, labels, 2).unwrap()
    }

    #[test]
    fn stratified_draw_per_class_counts() {
        let ds = two_class_dataset(30, 25);
        let out = stratified_draw(&ds, &[10, 10], RngSeed(3)).unwrap();
        assert_eq!(out.n(), 20);
        assert_eq!(out.class_counts(), vec![10, 10]);
    }

    #[test]
    fn stratified_draw_degenerate_count() {
        let ds = two_class_dataset(4, 8);
        let out = stratified_draw(&ds, &[0, 5], RngSeed(1)).unwrap();
        assert_eq!(out.n(), 5);
        assert_eq!(out.class_counts(), vec![0, 5]);
    }

    #[test]
    fn stratified_draw_deterministic() {
        let ds = two_class_dataset(40, 40);
        let a = stratified_draw_indices(&ds, &[7, 3], RngSeed(11)).unwrap();
        let b = stratified_draw_indices(&ds, &[7, 3], RngSeed(11)).unwrap();
        assert_eq!(a, b);
        let c = stratified_draw_indices(&ds, &[7, 3], RngSeed(12)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn stratified_draw_rejects_overdraw() {
        let ds = two_class_dataset(4, 4);
        assert!(stratified_draw(&ds, &[5, 0], RngSeed(0)).is_err());
    }

    #[test]
    fn prior_draw_degenerate_prior() {
        let ds = two_class_dataset(10, 10);
        let prior = SimplexVector::new(vec![1.0, 0.0]).unwrap();
        let out = prior_draw(&ds, 5, &prior, RngSeed(0)).unwrap();
        assert_eq!(out.class_counts(), vec![5, 0]);
    }

    #[test]
    fn prior_draw_three_class_expected_counts() {
        // prior (0.6, 0.1, 0.3): with 100 draws the expected counts are
        // (60, 10, 30); check observed counts are in a generous band.
        let features = DMatrix::from_fn(3000, 1, |i, _| i as f64);
        let labels = (0..3000).map(|i| (i % 3) + 1).collect();
        let ds = LabeledDataset::from_parts(features, labels, 3).unwrap();
        let prior = SimplexVector::new(vec![0.6, 0.1, 0.3]).unwrap();
        let out = prior_draw(&ds, 100, &prior, RngSeed(5)).unwrap();
        let counts = out.class_counts();
        assert!((counts[0] as f64 - 60.0).abs() < 20.0, "{counts:?}");
        assert!((counts[1] as f64 - 10.0).abs() < 15.0, "{counts:?}");
        assert!((counts[2] as f64 - 30.0).abs() < 20.0, "{counts:?}");
    }

    #[test]
    fn prior_draw_law_of_large_numbers() {
        // Counting oracle: class-1 fraction of 1e5 draws at prior 0.3 must
        // land within 0.01 of 0.3.
        let n = 260_000;
        let features = DMatrix::from_fn(n, 1, |i, _| i as f64);
        let labels = (0..n).map(|i| if i < n / 2 { 1 } else { 2 }).collect();
        let ds = LabeledDataset::from_parts(features, labels, 2).unwrap();
        let prior = SimplexVector::new(vec![0.3, 0.7]).unwrap();
        let out = prior_draw(&ds, 100_000, &prior, RngSeed(42)).unwrap();
        let frac = out.class_counts()[0] as f64 / 100_000.0;
        assert!((frac - 0.3).abs() < 0.01, "fraction {frac}");
    }

    #[test]
    fn prior_draw_exhaustion_errors() {
        let ds = two_class_dataset(2, 2);
        let prior = SimplexVector::new(vec![1.0, 0.0]).unwrap();
        assert!(prior_draw(&ds, 3, &prior, RngSeed(0)).is_err());
    }

    #[test]
    fn prior_draw_deterministic() {
        let ds = two_class_dataset(50, 50);
        let prior = SimplexVector::new(vec![0.4, 0.6]).unwrap();
        let a = prior_draw(&ds, 20, &prior, RngSeed(9)).unwrap();
        let b = prior_draw(&ds, 20, &prior, RngSeed(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn seed_derivation_is_pure_and_spread() {
        let s = RngSeed(0);
        assert_eq!(s.derive(1, 2), s.derive(1, 2));
        assert_ne!(s.derive(1, 2), s.derive(2, 1));
        assert_ne!(s.derive(0, 0), s.derive(0, 1));
    }

    #[test]
    fn standardizer_centers_train_features() {
        let ds = two_class_dataset(5, 5);
        let std = Standardizer::fit(&ds);
        let out = std.apply_labeled(&ds);
        let col = out.features().column(0);
        let mean: f64 = col.sum() / 10.0;
        assert!(mean.abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn csv_round_trip(rows in proptest::collection::vec(
            (proptest::collection::vec(-1e6f64..1e6, 3), 1usize..=3), 1..20)) {
            let n = rows.len();
            let mut flat = Vec::new();
            let mut labels = Vec::new();
            let mut seen_max = 0usize;
            for (feats, y) in &rows {
                flat.extend_from_slice(feats);
                labels.push(*y);
                seen_max = seen_max.max(*y);
            }
            // Remap to consecutive labels so every class is present.
            let mut order: Vec<usize> = Vec::new();
            let labels: Vec<usize> = labels.iter().map(|y| {
                match order.iter().position(|o| o == y) {
                    Some(p) => p + 1,
                    None => { order.push(*y); order.len() }
                }
            }).collect();
            let c = order.len();
            let ds = LabeledDataset::from_parts(
                DMatrix::from_row_slice(n, 3, &flat), labels, c).unwrap();
            let f = tempfile::NamedTempFile::new().unwrap();
            save_labeled_csv(&ds, f.path()).unwrap();
            let back = load_labeled_csv(f.path()).unwrap();
            prop_assert_eq!(back, ds);
        }

        #[test]
        fn draws_are_pure_functions_of_seed(seed in 0u64..1000) {
            let ds = two_class_dataset(20, 20);
            let a = stratified_draw(&ds, &[5, 5], RngSeed(seed)).unwrap();
            let b = stratified_draw(&ds, &[5, 5], RngSeed(seed)).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
