//! Tabular data model: feature schema, datasets, instances and the
//! min-max / indicator encoding shared by the predictor and the metrics.
//!
//! Every cell is stored as an `f64`. Continuous and discrete cells hold
//! their numeric value; categorical and ordinal cells hold the index of
//! their level in [`FeatureSchema::levels`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Continuous,
    Discrete,
    Categorical,
    Ordinal,
}

impl FeatureKind {
    /// Continuous and discrete features carry numbers, the others carry levels.
    pub fn is_numeric(self) -> bool {
        matches!(self, FeatureKind::Continuous | FeatureKind::Discrete)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub name: String,
    pub kind: FeatureKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<String>,
    /// Fixed (immutable) features may not change in a counterfactual.
    #[serde(default)]
    pub fixed: bool,
}

impl FeatureSchema {
    pub fn continuous(name: &str) -> Self {
        Self::numeric(name, FeatureKind::Continuous)
    }

    pub fn discrete(name: &str) -> Self {
        Self::numeric(name, FeatureKind::Discrete)
    }

    pub fn categorical(name: &str, levels: &[&str]) -> Self {
        Self::leveled(name, FeatureKind::Categorical, levels)
    }

    pub fn ordinal(name: &str, levels: &[&str]) -> Self {
        Self::leveled(name, FeatureKind::Ordinal, levels)
    }

    fn numeric(name: &str, kind: FeatureKind) -> Self {
        FeatureSchema {
            name: name.to_string(),
            kind,
            levels: Vec::new(),
            fixed: false,
        }
    }

    fn leveled(name: &str, kind: FeatureKind, levels: &[&str]) -> Self {
        FeatureSchema {
            name: name.to_string(),
            kind,
            levels: levels.iter().map(|l| l.to_string()).collect(),
            fixed: false,
        }
    }

    /// Marks the feature as fixed.
    pub fn fixed(mut self) -> Self {
        self.fixed = true;
        self
    }

    pub fn is_fixed(&self) -> bool {
        self.fixed
    }

    pub fn level_index(&self, label: &str) -> Option<usize> {
        self.levels.iter().position(|l| l == label)
    }

    /// Number of encoded coordinates this feature occupies after
    /// normalization: one for numeric and binary features, one per level
    /// otherwise.
    pub fn encoded_width(&self) -> usize {
        if self.kind.is_numeric() || self.levels.len() <= 2 {
            1
        } else {
            self.levels.len()
        }
    }

    /// Checks that `value` is a legal cell for this feature.
    pub fn accepts(&self, value: f64) -> bool {
        if self.kind.is_numeric() {
            value.is_finite()
        } else {
            level_of(value, self.levels.len()).is_some()
        }
    }
}

pub(crate) fn level_of(value: f64, n_levels: usize) -> Option<usize> {
    if value >= 0.0 && libm::trunc(value) == value && (value as usize) < n_levels {
        Some(value as usize)
    } else {
        None
    }
}

/// Ordered list of features. Construction validates the invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<FeatureSchema>", into = "Vec<FeatureSchema>")]
pub struct Schema {
    features: Vec<FeatureSchema>,
}

impl TryFrom<Vec<FeatureSchema>> for Schema {
    type Error = Error;

    fn try_from(features: Vec<FeatureSchema>) -> Result<Self> {
        Schema::new(features)
    }
}

impl From<Schema> for Vec<FeatureSchema> {
    fn from(schema: Schema) -> Self {
        schema.features
    }
}

impl Schema {
    pub fn new(features: Vec<FeatureSchema>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::InvalidSchema("no features".into()));
        }
        for (j, f) in features.iter().enumerate() {
            if f.name.is_empty() {
                return Err(Error::InvalidSchema(format!(
                    "feature {j} has an empty name"
                )));
            }
            if features[..j].iter().any(|g| g.name == f.name) {
                return Err(Error::InvalidSchema(format!(
                    "duplicate feature `{}`",
                    f.name
                )));
            }
            match (f.kind.is_numeric(), f.levels.is_empty()) {
                (true, false) => {
                    return Err(Error::InvalidSchema(format!(
                        "numeric feature `{}` must not declare levels",
                        f.name
                    )))
                }
                (false, true) => {
                    return Err(Error::InvalidSchema(format!(
                        "feature `{}` needs at least one level",
                        f.name
                    )))
                }
                _ => {}
            }
            for (i, level) in f.levels.iter().enumerate() {
                if f.levels[..i].contains(level) {
                    return Err(Error::InvalidSchema(format!(
                        "feature `{}` repeats level `{level}`",
                        f.name
                    )));
                }
            }
        }
        if features.iter().all(FeatureSchema::is_fixed) {
            return Err(Error::InvalidSchema(
                "at least one feature must be mutable".into(),
            ));
        }
        Ok(Schema { features })
    }

    pub fn features(&self) -> &[FeatureSchema] {
        &self.features
    }

    pub fn feature(&self, column: usize) -> &FeatureSchema {
        &self.features[column]
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn fixed_columns(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&j| self.features[j].fixed)
            .collect()
    }

    pub fn mutable_columns(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&j| !self.features[j].fixed)
            .collect()
    }

    pub fn encoded_width(&self) -> usize {
        self.features.iter().map(FeatureSchema::encoded_width).sum()
    }

    /// Validates an instance cell by cell.
    pub fn check(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::ArityMismatch {
                expected: self.len(),
                got: values.len(),
            });
        }
        for (f, &v) in self.features.iter().zip(values) {
            if !f.accepts(v) {
                return Err(if f.kind.is_numeric() {
                    Error::InvalidCell {
                        row: 0,
                        column: f.name.clone(),
                        value: format!("{v}"),
                    }
                } else {
                    Error::UnknownLevel {
                        column: f.name.clone(),
                        level: format!("{v}"),
                    }
                });
            }
        }
        Ok(())
    }

    /// Splits `values` into its fixed and mutable parts, each in schema order.
    pub fn split_fixed_mutable(&self, values: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut fixed = Vec::new();
        let mut mutable = Vec::new();
        for (f, &v) in self.features.iter().zip(values) {
            if f.fixed {
                fixed.push(v);
            } else {
                mutable.push(v);
            }
        }
        (fixed, mutable)
    }

    /// Inverse of [`Schema::split_fixed_mutable`].
    pub fn merge_fixed_mutable(&self, fixed: &[f64], mutable: &[f64]) -> Result<Instance> {
        let (mut fi, mut mi) = (fixed.iter(), mutable.iter());
        let mut values = Vec::with_capacity(self.len());
        for f in &self.features {
            let next = if f.fixed { fi.next() } else { mi.next() };
            match next {
                Some(&v) => values.push(v),
                None => {
                    return Err(Error::ArityMismatch {
                        expected: self.len(),
                        got: fixed.len() + mutable.len(),
                    })
                }
            }
        }
        if fi.next().is_some() || mi.next().is_some() {
            return Err(Error::ArityMismatch {
                expected: self.len(),
                got: fixed.len() + mutable.len(),
            });
        }
        Ok(Instance::new(values))
    }
}

/// One observation aligned to a schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Instance(Vec<f64>);

impl Instance {
    pub fn new(values: Vec<f64>) -> Self {
        Instance(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Instance {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Instance {
    fn from(values: Vec<f64>) -> Self {
        Instance(values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub fn width(&self) -> f64 {
        self.max - self.min
    }
}

/// Normalization statistics detached from the data, so that indexes and
/// predictors can encode instances without holding the whole dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoder {
    schema: Schema,
    ranges: Vec<Option<Range>>,
}

impl Encoder {
    pub fn new(schema: Schema, ranges: Vec<Option<Range>>) -> Self {
        Encoder { schema, ranges }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn width(&self) -> usize {
        self.schema.encoded_width()
    }

    /// Min-max scales numeric features with the training ranges and expands
    /// categorical/ordinal features into level indicators (binary features
    /// collapse to a single 0/1 coordinate). A degenerate range maps to 0.
    pub fn normalize(&self, values: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.width());
        self.normalize_into(values, &mut out)?;
        Ok(out)
    }

    pub fn normalize_into(&self, values: &[f64], out: &mut Vec<f64>) -> Result<()> {
        encode_into(&self.schema, &self.ranges, values, out)
    }
}

/// Column-oriented table with the per-column ranges observed at load time.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Schema,
    columns: Vec<Vec<f64>>,
    ranges: Vec<Option<Range>>,
    discrete_as_numeric: bool,
}

impl Dataset {
    /// Builds a dataset from row-major records, validating every cell.
    pub fn from_rows(schema: Schema, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::NoRows);
        }
        let mut columns = alloc::vec![Vec::with_capacity(rows.len()); schema.len()];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(Error::ArityMismatch {
                    expected: schema.len(),
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                let f = schema.feature(j);
                if !f.accepts(v) {
                    return Err(Error::InvalidCell {
                        row: i,
                        column: f.name.clone(),
                        value: format!("{v}"),
                    });
                }
                columns[j].push(v);
            }
        }
        Ok(Self::from_checked_columns(schema, columns))
    }

    pub fn from_columns(schema: Schema, columns: Vec<Vec<f64>>) -> Result<Self> {
        if columns.len() != schema.len() {
            return Err(Error::ArityMismatch {
                expected: schema.len(),
                got: columns.len(),
            });
        }
        let n = columns[0].len();
        if n == 0 {
            return Err(Error::NoRows);
        }
        for (j, col) in columns.iter().enumerate() {
            let f = schema.feature(j);
            if col.len() != n {
                return Err(Error::InvalidConfig(format!(
                    "column `{}` has {} rows, expected {n}",
                    f.name,
                    col.len()
                )));
            }
            if let Some(i) = col.iter().position(|&v| !f.accepts(v)) {
                return Err(Error::InvalidCell {
                    row: i,
                    column: f.name.clone(),
                    value: format!("{}", col[i]),
                });
            }
        }
        Ok(Self::from_checked_columns(schema, columns))
    }

    fn from_checked_columns(schema: Schema, columns: Vec<Vec<f64>>) -> Self {
        let ranges = schema
            .features()
            .iter()
            .zip(&columns)
            .map(|(f, col)| {
                f.kind.is_numeric().then(|| {
                    col.iter().fold(
                        Range {
                            min: f64::INFINITY,
                            max: f64::NEG_INFINITY,
                        },
                        |r, &v| Range {
                            min: r.min.min(v),
                            max: r.max.max(v),
                        },
                    )
                })
            })
            .collect();
        Dataset {
            schema,
            columns,
            ranges,
            discrete_as_numeric: false,
        }
    }

    /// Treat discrete features like continuous ones (range-scaled absolute
    /// difference) in the Gower distance instead of as an indicator.
    pub fn with_discrete_as_numeric(mut self, on: bool) -> Self {
        self.discrete_as_numeric = on;
        self
    }

    pub fn discrete_as_numeric(&self) -> bool {
        self.discrete_as_numeric
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.columns[0].len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn value(&self, row: usize, column: usize) -> f64 {
        self.columns[column][row]
    }

    pub fn row(&self, i: usize) -> Instance {
        Instance(self.columns.iter().map(|c| c[i]).collect())
    }

    pub fn rows(&self) -> impl Iterator<Item = Instance> + '_ {
        (0..self.n_rows()).map(|i| self.row(i))
    }

    /// Range of a continuous or discrete column, `None` for level columns.
    pub fn range(&self, column: usize) -> Option<Range> {
        self.ranges[column]
    }

    pub fn ranges(&self) -> &[Option<Range>] {
        &self.ranges
    }

    pub fn encoder(&self) -> Encoder {
        Encoder::new(self.schema.clone(), self.ranges.clone())
    }

    pub fn normalize(&self, values: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.schema.encoded_width());
        self.normalize_into(values, &mut out)?;
        Ok(out)
    }

    pub fn normalize_into(&self, values: &[f64], out: &mut Vec<f64>) -> Result<()> {
        encode_into(&self.schema, &self.ranges, values, out)
    }

    /// New dataset restricted to `rows`, in the given order, with ranges
    /// recomputed on the subset.
    pub fn subset(&self, rows: &[usize]) -> Result<Dataset> {
        if rows.is_empty() {
            return Err(Error::NoRows);
        }
        let columns = self
            .columns
            .iter()
            .map(|c| rows.iter().map(|&i| c[i]).collect())
            .collect();
        let mut ds = Self::from_checked_columns(self.schema.clone(), columns);
        ds.discrete_as_numeric = self.discrete_as_numeric;
        Ok(ds)
    }
}

fn encode_into(
    schema: &Schema,
    ranges: &[Option<Range>],
    values: &[f64],
    out: &mut Vec<f64>,
) -> Result<()> {
    if values.len() != schema.len() {
        return Err(Error::ArityMismatch {
            expected: schema.len(),
            got: values.len(),
        });
    }
    out.clear();
    for ((f, range), &v) in schema.features.iter().zip(ranges).zip(values) {
        if f.kind.is_numeric() {
            if !v.is_finite() {
                return Err(Error::InvalidCell {
                    row: 0,
                    column: f.name.clone(),
                    value: format!("{v}"),
                });
            }
            out.push(match range {
                Some(r) if r.width() > 0.0 => (v - r.min) / r.width(),
                _ => 0.0,
            });
        } else {
            let level = level_of(v, f.levels.len()).ok_or_else(|| Error::UnknownLevel {
                column: f.name.clone(),
                level: format!("{v}"),
            })?;
            if f.levels.len() <= 2 {
                out.push(level as f64);
            } else {
                out.extend((0..f.levels.len()).map(|l| if l == level { 1.0 } else { 0.0 }));
            }
        }
    }
    Ok(())
}
