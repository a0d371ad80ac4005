use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};
use std::str::FromStr;

use super::EvalError;
use crate::format::fmt_num;
use crate::ingest::{Genre, LabeledCorpus, Split};

/// Where a feature column came from, read off its name prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Embedding-based features, `tp1_*`.
    Tp1,
    /// TF-IDF block features, `tp2_*`.
    Tp2,
    External,
}

impl Provenance {
    pub fn of(name: &str) -> Provenance {
        if name.starts_with("tp1_") {
            Provenance::Tp1
        } else if name.starts_with("tp2_") {
            Provenance::Tp2
        } else {
            Provenance::External
        }
    }
}

/// Dense documents x features table with named columns and string row ids.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    ids: Vec<String>,
    names: Vec<String>,
    values: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(ids: Vec<String>, names: Vec<String>, values: Vec<f64>) -> Result<Self, EvalError> {
        if values.len() != ids.len() * names.len() {
            return Err(EvalError::Shape(format!(
                "{} values for {} rows x {} columns",
                values.len(),
                ids.len(),
                names.len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(EvalError::DuplicateColumn(dup.clone()));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = ids.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(EvalError::DuplicateRow(dup.clone()));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            let cols = names.len();
            return Err(EvalError::NonFinite { row: ids[k / cols].clone(), column: names[k % cols].clone() });
        }
        Ok(FeatureMatrix { ids, names, values })
    }

    pub fn from_rows(ids: Vec<String>, names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self, EvalError> {
        let values = rows.iter().flatten().copied().collect();
        Self::new(ids, names, values)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_rows(&self) -> usize {
        self.ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let c = self.names.len();
        &self.values[i * c..(i + 1) * c]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.names.len() + j]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Keeps the columns whose names satisfy `keep`, in their original order.
    pub fn select_columns(&self, keep: impl Fn(&str) -> bool) -> FeatureMatrix {
        let cols: Vec<usize> = (0..self.n_cols()).filter(|&j| keep(&self.names[j])).collect();
        FeatureMatrix {
            ids: self.ids.clone(),
            names: cols.iter().map(|&j| self.names[j].clone()).collect(),
            values: (0..self.n_rows()).flat_map(|i| cols.iter().map(move |&j| self.get(i, j))).collect(),
        }
    }

    /// Rows in the order of `ids`; every id must be present.
    pub fn select_rows(&self, ids: &[String]) -> Result<FeatureMatrix, EvalError> {
        let index: HashMap<&str, usize> = self.ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        let mut values = Vec::with_capacity(ids.len() * self.n_cols());
        for id in ids {
            let &i = index.get(id.as_str()).ok_or_else(|| EvalError::MissingRow(id.clone()))?;
            values.extend_from_slice(self.row(i));
        }
        FeatureMatrix::new(ids.to_vec(), self.names.clone(), values)
    }

    /// Columns of `self` followed by columns of `other`, rows aligned by id in `self`'s order.
    pub fn hstack(&self, other: &FeatureMatrix) -> Result<FeatureMatrix, EvalError> {
        let other = other.select_rows(&self.ids)?;
        let mut names = self.names.clone();
        names.extend(other.names.iter().cloned());
        let values = (0..self.n_rows()).flat_map(|i| self.row(i).iter().chain(other.row(i)).copied()).collect();
        FeatureMatrix::new(self.ids.clone(), names, values)
    }

    pub fn write_csv(&self, writer: impl Write) -> Result<(), EvalError> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["id".to_string()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header)?;
        for i in 0..self.n_rows() {
            let mut record = vec![self.ids[i].clone()];
            record.extend(self.row(i).iter().map(|&v| fmt_num(v)));
            w.write_record(&record)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv(reader: impl Read) -> Result<FeatureMatrix, EvalError> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header = r.headers()?.clone();
        if header.get(0).map(str::trim) != Some("id") {
            return Err(EvalError::Parse { line: 1, message: "first column must be 'id'".into() });
        }
        let names: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
        let mut ids = Vec::new();
        let mut values = Vec::new();
        for (k, record) in r.records().enumerate() {
            let line = k + 2;
            let record = record?;
            ids.push(record[0].to_string());
            for field in record.iter().skip(1) {
                let v = parse_number(field)
                    .ok_or_else(|| EvalError::Parse { line, message: format!("invalid number '{field}'") })?;
                values.push(v);
            }
        }
        FeatureMatrix::new(ids, names, values)
    }
}

fn parse_number(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => t.parse().ok(),
    }
}

/// Which columns of a feature file feed a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureSet {
    Tp1,
    Tp2,
    Tp1Tp2,
    /// Every column, including external ones.
    All,
}

impl FeatureSet {
    pub fn includes(self, name: &str) -> bool {
        match (self, Provenance::of(name)) {
            (FeatureSet::All, _) => true,
            (FeatureSet::Tp1, p) => p == Provenance::Tp1,
            (FeatureSet::Tp2, p) => p == Provenance::Tp2,
            (FeatureSet::Tp1Tp2, p) => p != Provenance::External,
        }
    }
}

impl FromStr for FeatureSet {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tp1" => Ok(FeatureSet::Tp1),
            "tp2" => Ok(FeatureSet::Tp2),
            "tp1+tp2" => Ok(FeatureSet::Tp1Tp2),
            "all" => Ok(FeatureSet::All),
            other => Err(EvalError::UnknownFeatureSet(other.to_string())),
        }
    }
}

/// Binary multilabel targets: `values[row][class]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Labels {
    pub classes: Vec<String>,
    pub values: Vec<Vec<bool>>,
}

impl Labels {
    pub fn new(classes: Vec<String>, values: Vec<Vec<bool>>) -> Result<Self, EvalError> {
        if let Some(r) = values.iter().position(|row| row.len() != classes.len()) {
            return Err(EvalError::Shape(format!(
                "label row {r} has {} entries, expected {}",
                values[r].len(),
                classes.len()
            )));
        }
        Ok(Labels { classes, values })
    }

    /// Single-label targets from class indices.
    pub fn from_indices(classes: Vec<String>, indices: &[usize]) -> Result<Self, EvalError> {
        let k = classes.len();
        let values = indices.iter().map(|&c| (0..k).map(|j| j == c).collect()).collect();
        Self::new(classes, values)
    }

    /// Genre labels for the given document ids, in that order.
    pub fn from_corpus(corpus: &LabeledCorpus, ids: &[String]) -> Result<Self, EvalError> {
        let index: HashMap<&str, usize> =
            corpus.documents.iter().enumerate().map(|(i, d)| (d.id.as_str(), i)).collect();
        let mut values = Vec::with_capacity(ids.len());
        for id in ids {
            let &i = index.get(id.as_str()).ok_or_else(|| EvalError::MissingRow(id.clone()))?;
            let doc = &corpus.documents[i];
            values.push(Genre::ALL.iter().map(|g| doc.labels.contains(g)).collect());
        }
        Self::new(Genre::ALL.iter().map(|g| g.name().to_string()).collect(), values)
    }

    pub fn n_rows(&self) -> usize {
        self.values.len()
    }

    pub fn column(&self, class: usize) -> Vec<bool> {
        self.values.iter().map(|row| row[class]).collect()
    }

    pub fn select(&self, rows: &[usize]) -> Labels {
        Labels { classes: self.classes.clone(), values: rows.iter().map(|&r| self.values[r].clone()).collect() }
    }
}

/// Splits feature rows into train and test according to the corpus split.
pub fn split_rows(features: &FeatureMatrix, corpus: &LabeledCorpus) -> Result<(Vec<String>, Vec<String>), EvalError> {
    let split: HashMap<&str, Split> = corpus.documents.iter().map(|d| (d.id.as_str(), d.split)).collect();
    let mut train = Vec::new();
    let mut test = Vec::new();
    for id in features.ids() {
        match split.get(id.as_str()) {
            Some(Split::Train) => train.push(id.clone()),
            Some(Split::Test) => test.push(id.clone()),
            None => return Err(EvalError::MissingRow(id.clone())),
        }
    }
    Ok((train, test))
}
