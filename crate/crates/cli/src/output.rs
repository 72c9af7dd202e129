//! Writing tables and reports under the output directory.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use netseg::verify::{write_csv, Table, SCHEMA_VERSION};
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

pub struct Output {
    dir: PathBuf,
    format: Format,
}

impl Output {
    pub fn new(dir: &Path, format: Format) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), format })
    }

    pub fn subdir(&self, name: &str) -> Result<Self> {
        Self::new(&self.dir.join(name), self.format)
    }

    fn create(&self, file: &str) -> Result<(PathBuf, BufWriter<File>)> {
        let path = self.dir.join(file);
        let handle = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok((path, BufWriter::new(handle)))
    }

    /// Writes `table` as `<name>.csv` or `<name>.json`.
    pub fn table(&self, table: &Table) -> Result<PathBuf> {
        match self.format {
            Format::Csv => {
                let (path, mut w) = self.create(&format!("{}.csv", table.name))?;
                write_csv(table, &mut w)?;
                w.flush()?;
                Ok(path)
            }
            Format::Json => self.report(&table.name, table),
        }
    }

    /// Writes `value` as pretty JSON with a `schema_version` key to `<name>.json`.
    pub fn report<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let mut doc = json!({ "schema_version": SCHEMA_VERSION });
        match serde_json::to_value(value)? {
            serde_json::Value::Object(map) => doc.as_object_mut().expect("object").extend(map),
            other => doc["data"] = other,
        }
        let (path, mut w) = self.create(&format!("{name}.json"))?;
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)?;
        w.flush()?;
        Ok(path)
    }
}
