use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use flate2::read::GzDecoder;

use super::{Document, LabeledCorpus};
use crate::error::{Error, Result};

/// Class names in AG News label order (file class index minus one).
pub const AG_NEWS_LABELS: [&str; 4] = ["World", "Sports", "Business", "Sci/Tech"];

pub const MBTI_TYPES: [&str; 16] = [
    "ENFJ", "ENFP", "ENTJ", "ENTP", "ESFJ", "ESFP", "ESTJ", "ESTP", "INFJ", "INFP", "INTJ", "INTP",
    "ISFJ", "ISFP", "ISTJ", "ISTP",
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Keep at most this many documents.
    pub max_rows: Option<usize>,
    /// With `max_rows`, cap every class at `ceil(max_rows / classes)` so the
    /// kept prefix is class-balanced. Without it, the first `max_rows` rows
    /// are kept.
    pub balanced: bool,
}

impl LoadOptions {
    pub fn max_rows(max_rows: usize) -> Self {
        LoadOptions {
            max_rows: Some(max_rows),
            balanced: false,
        }
    }

    pub fn balanced(max_rows: usize) -> Self {
        LoadOptions {
            max_rows: Some(max_rows),
            balanced: true,
        }
    }
}

/// Tracks how many rows have been accepted so far.
struct Quota {
    opts: LoadOptions,
    per_class_cap: usize,
    per_class: Vec<usize>,
    taken: usize,
}

impl Quota {
    fn new(opts: LoadOptions, classes: usize) -> Self {
        let per_class_cap = match opts.max_rows {
            Some(max) if opts.balanced => max.div_ceil(classes),
            _ => usize::MAX,
        };
        Quota {
            opts,
            per_class_cap,
            per_class: vec![0; classes],
            taken: 0,
        }
    }

    fn full(&self) -> bool {
        self.opts.max_rows.is_some_and(|max| self.taken >= max)
    }

    fn admit(&mut self, class: usize) -> bool {
        if self.full() || self.per_class[class] >= self.per_class_cap {
            return false;
        }
        self.per_class[class] += 1;
        self.taken += 1;
        true
    }
}

pub(crate) fn open(path: &Path) -> Result<Box<dyn Read>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    if path.extension().is_some_and(|ext| ext == "gz") {
        Ok(Box::new(GzDecoder::new(reader)))
    } else {
        Ok(Box::new(reader))
    }
}

fn csv_reader(path: &Path) -> Result<csv::Reader<Box<dyn Read>>> {
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(open(path)?))
}

fn csv_error(path: &Path, row: usize, err: csv::Error) -> Error {
    match err.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::Parse {
            path: path.to_path_buf(),
            row,
            message: format!("{other:?}"),
        },
    }
}

/// Reads the AG News CSV layout: no header, three columns
/// `class (1-4), title, description`. Text is `title + " " + description`.
pub fn load_ag_news_csv(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<LabeledCorpus> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let mut quota = Quota::new(*opts, AG_NEWS_LABELS.len());
    let mut documents = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        if quota.full() {
            break;
        }
        let record = record.map_err(|e| csv_error(path, row, e))?;
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            row,
            message,
        };
        if record.len() != 3 {
            return Err(parse_err(format!(
                "expected 3 fields, found {}",
                record.len()
            )));
        }
        let class: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("class index {:?} is not an integer", &record[0])))?;
        if !(1..=4).contains(&class) {
            return Err(parse_err(format!("class index {class} outside 1-4")));
        }
        let label = class - 1;
        if quota.admit(label) {
            documents.push(Document {
                id: documents.len(),
                text: format!("{} {}", &record[1], &record[2]),
                label,
            });
        }
    }
    LabeledCorpus::new(
        documents,
        AG_NEWS_LABELS.iter().map(|s| s.to_string()).collect(),
    )
}

/// Reads the MBTI CSV layout: header `type,posts`, posts joined by `|||`.
///
/// Separators become single spaces. Label indices follow the alphabetical
/// order of the type codes present in the loaded rows.
pub fn load_mbti_csv(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<LabeledCorpus> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let mut records = reader.records();
    match records.next() {
        Some(header) => {
            let header = header.map_err(|e| csv_error(path, 1, e))?;
            let fields: Vec<String> = header
                .iter()
                .map(|f| f.trim().to_ascii_lowercase())
                .collect();
            if fields != ["type", "posts"] {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    row: 1,
                    message: format!("expected header `type,posts`, found {fields:?}"),
                });
            }
        }
        None => {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                row: 1,
                message: "missing header `type,posts`".into(),
            })
        }
    }

    let mut quota = Quota::new(*opts, MBTI_TYPES.len());
    // (text, index into MBTI_TYPES)
    let mut rows: Vec<(String, usize)> = Vec::new();
    for (i, record) in records.enumerate() {
        let row = i + 2;
        if quota.full() {
            break;
        }
        let record = record.map_err(|e| csv_error(path, row, e))?;
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            row,
            message,
        };
        if record.len() != 2 {
            return Err(parse_err(format!(
                "expected 2 fields, found {}",
                record.len()
            )));
        }
        let code = record[0].trim().to_ascii_uppercase();
        let type_index = MBTI_TYPES
            .iter()
            .position(|t| *t == code)
            .ok_or_else(|| parse_err(format!("unknown MBTI type {:?}", &record[0])))?;
        if quota.admit(type_index) {
            rows.push((record[1].replace("|||", " "), type_index));
        }
    }

    // MBTI_TYPES is sorted, so present codes in table order are alphabetical.
    let mut present = vec![false; MBTI_TYPES.len()];
    rows.iter().for_each(|(_, t)| present[*t] = true);
    let mut remap = vec![usize::MAX; MBTI_TYPES.len()];
    let mut label_names = Vec::new();
    for (t, _) in present.iter().enumerate().filter(|(_, p)| **p) {
        remap[t] = label_names.len();
        label_names.push(MBTI_TYPES[t].to_string());
    }
    LabeledCorpus::from_texts(
        rows.into_iter().map(|(text, t)| (text, remap[t])),
        label_names,
    )
}
