//! Files written by every command: manifest, summary, tables and histories.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use bssn_core::newton::{write_history_csv, write_history_dat, IterationRecord};
use serde::Serialize;

use crate::config::Overrides;
use crate::error::CliError;

pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root)
            .map_err(|e| CliError::Config(format!("{}: {e}", root.display())))?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn writer(&self, name: &str) -> Result<BufWriter<File>, CliError> {
        Ok(BufWriter::new(File::create(self.path(name))?))
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        let mut out = self.writer(name)?;
        serde_json::to_writer_pretty(&mut out, value)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        writeln!(out)?;
        out.flush()?;
        Ok(())
    }

    pub fn manifest<T: Serialize>(
        &self,
        command: &str,
        config_path: Option<&Path>,
        overrides: &Overrides,
        config: &T,
    ) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Manifest<'a, T> {
            command: &'a str,
            version: &'a str,
            config_path: Option<String>,
            overrides: &'a Overrides,
            config: &'a T,
        }
        self.json(
            "manifest.json",
            &Manifest {
                command,
                version: env!("CARGO_PKG_VERSION"),
                config_path: config_path.map(|p| p.display().to_string()),
                overrides,
                config,
            },
        )
    }

    /// Writes `<stem>.csv` and `<stem>.dat`.
    pub fn history(&self, stem: &str, records: &[IterationRecord]) -> Result<(), CliError> {
        let mut csv = self.writer(&format!("{stem}.csv"))?;
        write_history_csv(&mut csv, records)?;
        csv.flush()?;
        let mut dat = self.writer(&format!("{stem}.dat"))?;
        write_history_dat(&mut dat, records)?;
        dat.flush()?;
        Ok(())
    }

    /// Writes `<stem>.csv` and `<stem>.dat`.
    pub fn table(&self, stem: &str, table: &Table) -> Result<(), CliError> {
        let mut csv = self.writer(&format!("{stem}.csv"))?;
        writeln!(csv, "{}", table.header.join(","))?;
        for row in &table.rows {
            writeln!(csv, "{}", row.join(","))?;
        }
        csv.flush()?;
        let mut dat = self.writer(&format!("{stem}.dat"))?;
        writeln!(dat, "# {}", table.header.join("\t"))?;
        for row in &table.rows {
            let cells: Vec<&str> = row
                .iter()
                .map(|c| if c.is_empty() { "NaN" } else { c.as_str() })
                .collect();
            writeln!(dat, "{}", cells.join("\t"))?;
        }
        dat.flush()?;
        Ok(())
    }
}

/// A CSV table; empty cells become `NaN` in the `.dat` variant.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip representation.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}
