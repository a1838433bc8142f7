//! Tabular output in two renderings: aligned text with numbers fixed at
//! four decimals, and CSV with full-precision (shortest round-trip)
//! numbers. Both are deterministic for identical inputs.

use std::fmt::Write;

#[derive(Debug, Clone)]
pub enum Cell {
    Str(String),
    Int(i64),
    Num(f64),
}

impl Cell {
    pub fn str(s: impl Into<String>) -> Self {
        Cell::Str(s.into())
    }

    fn text(&self) -> String {
        match self {
            Cell::Str(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(v) => format!("{v:.4}"),
        }
    }

    fn csv(&self) -> String {
        let raw = match self {
            Cell::Str(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(v) => format!("{v}"),
        };
        if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
            format!("\"{}\"", raw.replace('"', "\"\""))
        } else {
            raw
        }
    }

    fn right_aligned(&self) -> bool {
        !matches!(self, Cell::Str(_))
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(title: &str, headers: &[&str]) -> Self {
        Self {
            title: title.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.headers.len());
        self.rows.push(cells);
    }

    fn render_text(&self, out: &mut String) {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::text).collect())
            .collect();
        let widths: Vec<usize> = self
            .headers
            .iter()
            .enumerate()
            .map(|(j, h)| {
                cells
                    .iter()
                    .map(|r| r[j].len())
                    .chain([h.len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        writeln!(out, "== {} ==", self.title).unwrap();
        let header: Vec<String> = self
            .headers
            .iter()
            .zip(&widths)
            .map(|(h, w)| format!("{h:<w$}"))
            .collect();
        writeln!(out, "{}", header.join("  ").trim_end()).unwrap();
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        writeln!(out, "{}", rule.join("  ")).unwrap();
        for (r, row) in cells.iter().enumerate() {
            let line: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let w = widths[j];
                    if self.rows[r][j].right_aligned() {
                        format!("{c:>w$}")
                    } else {
                        format!("{c:<w$}")
                    }
                })
                .collect();
            writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
        }
    }

    fn render_csv(&self, out: &mut String) {
        writeln!(out, "# {}", self.title).unwrap();
        writeln!(out, "{}", self.headers.join(",")).unwrap();
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(out, "{}", line.join(",")).unwrap();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
}

pub fn render(tables: &[Table], format: Format) -> String {
    let mut out = String::new();
    for (i, t) in tables.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match format {
            Format::Text => t.render_text(&mut out),
            Format::Csv => t.render_csv(&mut out),
        }
    }
    out
}
