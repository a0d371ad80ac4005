use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{tokenize, IngestError};

/// The four genre labels a document may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Genre {
    Drama,
    Comedy,
    Action,
    Romance,
}

impl Genre {
    pub const ALL: [Genre; 4] = [Genre::Drama, Genre::Comedy, Genre::Action, Genre::Romance];

    pub fn name(self) -> &'static str {
        match self {
            Genre::Drama => "drama",
            Genre::Comedy => "comedy",
            Genre::Action => "action",
            Genre::Romance => "romance",
        }
    }
}

impl fmt::Display for Genre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Genre {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Genre::ALL.into_iter().find(|g| g.name().eq_ignore_ascii_case(s.trim())).ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub tokens: Vec<String>,
    pub labels: BTreeSet<Genre>,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCorpus {
    pub documents: Vec<Document>,
}

impl LabeledCorpus {
    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    pub fn split_count(&self, split: Split) -> usize {
        self.documents.iter().filter(|d| d.split == split).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusOptions {
    pub min_tokens: usize,
    pub seed: u64,
    pub label_delimiter: char,
    pub id_column: String,
    pub text_column: String,
    pub labels_column: String,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            min_tokens: 200,
            seed: 0,
            label_delimiter: '|',
            id_column: "id".into(),
            text_column: "text".into(),
            labels_column: "labels".into(),
        }
    }
}

pub fn load_corpus(path: impl AsRef<Path>, options: &CorpusOptions) -> Result<LabeledCorpus, IngestError> {
    let path = path.as_ref();
    let file =
        std::fs::File::open(path).map_err(|source| IngestError::Io { path: path.display().to_string(), source })?;
    read_corpus(file, options)
}

/// Reads a UTF-8 CSV with a header row, drops short documents and assigns a seeded 2/3 : 1/3 split.
pub fn read_corpus(reader: impl std::io::Read, options: &CorpusOptions) -> Result<LabeledCorpus, IngestError> {
    let mut csv = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(reader);
    let headers = csv.headers().map_err(|e| IngestError::Csv { line: 1, message: e.to_string() })?.clone();
    let column = |name: &str| {
        headers.iter().position(|h| h.trim() == name).ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    };
    let (id_col, text_col, labels_col) =
        (column(&options.id_column)?, column(&options.text_column)?, column(&options.labels_column)?);

    let mut seen = HashSet::new();
    let mut documents = Vec::new();
    for (k, record) in csv.records().enumerate() {
        let line = k + 2;
        let record = record.map_err(|e| IngestError::Csv { line, message: e.to_string() })?;
        let id = record[id_col].trim().to_string();
        if !seen.insert(id.clone()) {
            return Err(IngestError::DuplicateId { line, id });
        }
        let raw_labels = record[labels_col].trim();
        if raw_labels.is_empty() {
            return Err(IngestError::EmptyLabels { line, id });
        }
        let mut labels = BTreeSet::new();
        for label in raw_labels.split(options.label_delimiter).map(str::trim).filter(|l| !l.is_empty()) {
            match label.parse::<Genre>() {
                Ok(g) => {
                    labels.insert(g);
                }
                Err(()) => warn!("document '{id}' (line {line}): ignoring label '{label}'"),
            }
        }
        if labels.is_empty() {
            warn!("document '{id}' (line {line}): no known genre labels, dropped");
            continue;
        }
        let text = record[text_col].to_string();
        let tokens = tokenize(&text);
        if tokens.len() < options.min_tokens {
            continue;
        }
        documents.push(Document { id, text, tokens, labels, split: Split::Test });
    }

    assign_split(&mut documents, options.seed);
    Ok(LabeledCorpus { documents })
}

/// Number of training documents out of `n`: 2n/3 rounded to nearest.
pub fn train_size(n: usize) -> usize {
    (2 * n + 1) / 3
}

fn assign_split(documents: &mut [Document], seed: u64) {
    let mut order: Vec<usize> = (0..documents.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    for &k in &order[..train_size(documents.len())] {
        documents[k].split = Split::Train;
    }
}
