//! Rendering of command results as text, JSON or CSV.

use std::io::Write;

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Text => "text",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn objects(&self) -> Vec<Value> {
        self.rows
            .iter()
            .map(|row| {
                let map: Map<String, Value> = self
                    .columns
                    .iter()
                    .map(|c| c.to_string())
                    .zip(row.iter().cloned())
                    .collect();
                Value::Object(map)
            })
            .collect()
    }
}

pub struct Section {
    pub name: &'static str,
    pub table: Table,
    /// Rendered as a single object (JSON) or `key: value` lines (text).
    pub single: bool,
}

/// Everything a command prints.
pub struct Output {
    pub config: Map<String, Value>,
    pub sections: Vec<Section>,
    pub summary: Option<Map<String, Value>>,
    /// Replaces the default text rendering.
    pub text: Option<String>,
    /// Flat table used for CSV when there is more than one section.
    pub csv: Option<Table>,
}

impl Output {
    pub fn new(config: Map<String, Value>) -> Self {
        Output {
            config,
            sections: Vec::new(),
            summary: None,
            text: None,
            csv: None,
        }
    }

    pub fn single(mut self, name: &'static str, table: Table) -> Self {
        self.sections.push(Section {
            name,
            table,
            single: true,
        });
        self
    }

    pub fn rows(mut self, name: &'static str, table: Table) -> Self {
        self.sections.push(Section {
            name,
            table,
            single: false,
        });
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.render_json(),
            Format::Csv => self.render_csv(),
            Format::Text => self.render_text(),
        }
    }

    fn render_json(&self) -> String {
        let mut root = Map::new();
        root.insert("tool".into(), Value::from(env!("CARGO_PKG_NAME")));
        root.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        root.insert("config".into(), Value::Object(self.config.clone()));
        for s in &self.sections {
            let mut objects = s.table.objects();
            let value = if s.single && objects.len() == 1 {
                objects.remove(0)
            } else {
                Value::Array(objects)
            };
            root.insert(s.name.into(), value);
        }
        if let Some(summary) = &self.summary {
            root.insert("summary".into(), Value::Object(summary.clone()));
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(root)).expect("json");
        text.push('\n');
        text
    }

    fn render_csv(&self) -> String {
        let table = match (&self.csv, self.sections.first()) {
            (Some(t), _) => t,
            (None, Some(s)) => &s.table,
            (None, None) => return String::new(),
        };
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&table.columns).expect("csv header");
        for row in &table.rows {
            w.write_record(row.iter().map(cell)).expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv flush")).expect("utf-8")
    }

    fn render_text(&self) -> String {
        if let Some(text) = &self.text {
            return text.clone();
        }
        let mut out = String::new();
        let many = self.sections.len() > 1 || self.summary.is_some();
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            if many && !s.single {
                out.push_str(&format!("[{}]\n", s.name));
            }
            if s.single {
                for row in &s.table.rows {
                    for (c, v) in s.table.columns.iter().zip(row) {
                        out.push_str(&format!("{c}: {}\n", cell(v)));
                    }
                }
            } else {
                out.push_str(&aligned(&s.table));
            }
        }
        if let Some(summary) = &self.summary {
            out.push_str("\n[summary]\n");
            for (k, v) in summary {
                out.push_str(&format!("{k}: {}\n", cell(v)));
            }
        }
        out
    }
}

pub fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn aligned(table: &Table) -> String {
    let cells: Vec<Vec<String>> = table.rows.iter().map(|r| r.iter().map(cell).collect()).collect();
    let widths: Vec<usize> = table
        .columns
        .iter()
        .enumerate()
        .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap_or(0))
        .collect();
    let line = |items: Vec<&str>| -> String {
        let padded: Vec<String> = items
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect();
        format!("{}\n", padded.join("  ").trim_end())
    };
    let mut out = line(table.columns.clone());
    for row in &cells {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

pub fn emit(text: &str, out: Option<&std::path::Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}
