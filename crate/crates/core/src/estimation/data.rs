use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldWeight {
    pub name: String,
    pub w: f64,
}

/// One line of the JSON-lines input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CitationRecord {
    pub id: String,
    pub year: i32,
    #[serde(default)]
    pub fos: Vec<FieldWeight>,
    #[serde(default)]
    pub references: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IngestOptions {
    /// Inclusive year window.
    pub years: Option<(i32, i32)>,
    /// Fields carried by fewer than this share of in-window papers are dropped.
    pub min_field_share: f64,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self { years: None, min_field_share: 0.01 }
    }
}

/// A retained paper. `references` index into [`Dataset::papers`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Paper {
    pub id: String,
    pub year: i32,
    /// Major fields with their weights, sorted by name.
    pub fields: Vec<FieldWeight>,
    pub references: Vec<usize>,
}

impl Paper {
    /// Highest-weight field; ties go to the lexicographically smallest name.
    pub fn primary_field(&self) -> &str {
        let mut best = &self.fields[0];
        for f in &self.fields[1..] {
            if f.w > best.w {
                best = f;
            }
        }
        &best.name
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Dataset {
    pub papers: Vec<Paper>,
    /// Major fields, sorted.
    pub fields: Vec<String>,
    /// Lines that failed to parse.
    pub malformed: usize,
    /// Papers dropped for lying outside the window or carrying no major field.
    pub dropped: usize,
}

/// Reads a JSON-lines citation file.
pub fn ingest(path: impl AsRef<Path>, options: &IngestOptions) -> Result<Dataset> {
    ingest_reader(std::fs::File::open(path)?, options)
}

pub fn ingest_reader(reader: impl Read, options: &IngestOptions) -> Result<Dataset> {
    let mut records = Vec::new();
    let mut malformed = 0;
    for line in BufReader::new(reader).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CitationRecord>(&line) {
            Ok(r) if r.fos.iter().all(|f| f.w >= 0.0 && f.w.is_finite()) => records.push(r),
            _ => malformed += 1,
        }
    }
    from_records(records, options, malformed)
}

/// Applies the year window and field threshold and resolves references.
pub fn from_records(records: Vec<CitationRecord>, options: &IngestOptions, malformed: usize) -> Result<Dataset> {
    let total = records.len();
    let mut seen = HashMap::new();
    let in_window: Vec<CitationRecord> = records
        .into_iter()
        .filter(|r| options.years.is_none_or(|(lo, hi)| (lo..=hi).contains(&r.year)))
        .filter(|r| seen.insert(r.id.clone(), ()).is_none())
        .collect();

    let mut frequency: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &in_window {
        let mut names: Vec<&str> = r.fos.iter().map(|f| f.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        for name in names {
            *frequency.entry(name).or_default() += 1;
        }
    }
    let threshold = options.min_field_share * in_window.len() as f64;
    let major: Vec<String> =
        frequency.iter().filter(|&(_, &count)| count as f64 >= threshold).map(|(&name, _)| name.to_string()).collect();

    let mut kept: Vec<(CitationRecord, Vec<FieldWeight>)> = Vec::new();
    for r in in_window.iter() {
        let mut fields: Vec<FieldWeight> =
            r.fos.iter().filter(|f| major.binary_search(&f.name).is_ok()).cloned().collect();
        fields.sort_by(|a, b| a.name.cmp(&b.name));
        fields.dedup_by(|a, b| a.name == b.name);
        if !fields.is_empty() {
            kept.push((r.clone(), fields));
        }
    }
    if kept.is_empty() {
        return Err(Error::EmptyDataset("no paper survives the year and field filters".into()));
    }
    let index: HashMap<&str, usize> = kept.iter().enumerate().map(|(i, (r, _))| (r.id.as_str(), i)).collect();
    let papers = kept
        .iter()
        .enumerate()
        .map(|(i, (r, fields))| {
            let mut references: Vec<usize> =
                r.references.iter().filter_map(|id| index.get(id.as_str()).copied()).filter(|&j| j != i).collect();
            references.sort_unstable();
            references.dedup();
            Paper { id: r.id.clone(), year: r.year, fields: fields.clone(), references }
        })
        .collect();
    Ok(Dataset { papers, fields: major, malformed, dropped: total - kept.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: &str, year: i32, fos: &[(&str, f64)], refs: &[&str]) -> String {
        serde_json::to_string(&CitationRecord {
            id: id.into(),
            year,
            fos: fos.iter().map(|&(n, w)| FieldWeight { name: n.into(), w }).collect(),
            references: refs.iter().map(|s| s.to_string()).collect(),
        })
        .unwrap()
    }

    #[test]
    fn drops_outside_references_and_bad_lines() {
        let text = [
            line("a", 2016, &[("x", 1.0)], &["b", "zzz"]),
            "{not json".to_string(),
            line("b", 2017, &[("x", 0.5)], &["c"]),
            line("c", 2018, &[("y", 0.5)], &[]),
        ]
        .join("\n");
        let d = ingest_reader(text.as_bytes(), &IngestOptions { years: None, min_field_share: 0.0 }).unwrap();
        assert_eq!(d.papers.len(), 3);
        assert_eq!(d.malformed, 1);
        assert_eq!(d.papers[0].references, vec![1]);
        assert_eq!(d.papers[1].references, vec![2]);
    }

    #[test]
    fn rare_fields_are_removed() {
        let mut lines: Vec<String> = (0..99).map(|i| line(&i.to_string(), 2016, &[("big", 1.0)], &[])).collect();
        lines.push(line("r", 2016, &[("big", 0.2), ("rare", 0.9)], &[]));
        let d =
            ingest_reader(lines.join("\n").as_bytes(), &IngestOptions { years: None, min_field_share: 0.02 }).unwrap();
        assert_eq!(d.fields, vec!["big".to_string()]);
        assert_eq!(d.papers[99].primary_field(), "big");
        assert!(d.papers.iter().all(|p| p.fields.iter().all(|f| f.name == "big")));
    }

    #[test]
    fn year_window() {
        let text = [
            line("a", 2014, &[("x", 1.0)], &[]),
            line("b", 2015, &[("x", 1.0)], &["a"]),
            line("c", 2021, &[("x", 1.0)], &[]),
        ]
        .join("\n");
        let d = ingest_reader(text.as_bytes(), &IngestOptions { years: Some((2015, 2020)), min_field_share: 0.01 })
            .unwrap();
        assert_eq!(d.papers.len(), 1);
        assert_eq!(d.papers[0].id, "b");
        assert!(d.papers[0].references.is_empty());
        assert_eq!(d.dropped, 2);
    }

    #[test]
    fn empty_result_is_an_error() {
        let text = line("a", 2000, &[("x", 1.0)], &[]);
        let opts = IngestOptions { years: Some((2015, 2020)), min_field_share: 0.01 };
        assert!(matches!(ingest_reader(text.as_bytes(), &opts), Err(Error::EmptyDataset(_))));
    }

    #[test]
    fn primary_field_ties_are_lexicographic() {
        let p = Paper {
            id: "p".into(),
            year: 2016,
            fields: vec![FieldWeight { name: "a".into(), w: 0.5 }, FieldWeight { name: "b".into(), w: 0.5 }],
            references: vec![],
        };
        assert_eq!(p.primary_field(), "a");
    }
}
