//! CSV, JSON and SVG writers. Data files are byte-for-byte reproducible from the same config and seed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            // 17 significant digits round-trip every f64
            Cell::Real(v) => write!(out, "{v:.16e}").unwrap(),
            Cell::Int(v) => write!(out, "{v}").unwrap(),
            Cell::Text(s) => {
                if s.contains([',', '"', '\n']) {
                    write!(out, "\"{}\"", s.replace('"', "\"\"")).unwrap()
                } else {
                    out.push_str(s)
                }
            }
        }
    }

    fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Real(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// A named CSV table with a fixed column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.to_owned(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                c.render(&mut out);
            }
            out.push('\n');
        }
        out
    }

    fn column(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[i].as_f64().unwrap_or(f64::NAN)).collect()
    }
}

/// What an SVG quick-look can show.
#[derive(Debug, Clone, PartialEq)]
pub enum Plot {
    /// Series of `y` columns against column `x` of a table, joined or as markers.
    Lines { table: String, x: usize, ys: Vec<usize>, log_y: bool, points: bool },
    /// Rows by columns of values with their axis labels.
    Heat { name: String, rows: Vec<String>, columns: Vec<f64>, values: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Writer {
    pub directory: PathBuf,
    pub files: Vec<FileRecord>,
}

impl Writer {
    pub fn new(directory: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(directory).map_err(|e| CliError::io(directory, e))?;
        Ok(Self { directory: directory.to_owned(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &[u8], rows: Option<usize>) -> Result<(), CliError> {
        let path = self.directory.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.files.push(FileRecord { path: name.to_owned(), sha256: sha256_hex(contents), bytes: contents.len(), rows });
        Ok(())
    }

    pub fn table(&mut self, table: &Table) -> Result<(), CliError> {
        self.write(&format!("{}.csv", table.name), table.to_csv().as_bytes(), Some(table.rows.len()))
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::internal(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes(), None)
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLOURS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn frame(svg: &mut String, title: &str, x: (f64, f64), y: (f64, f64), y_label: &str) {
    let (w, h, m) = (WIDTH, HEIGHT, MARGIN);
    writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#).unwrap();
    writeln!(svg, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(svg, r#"<text x="{}" y="18" text-anchor="middle" font-size="13">{title}</text>"#, w / 2.0).unwrap();
    writeln!(svg, r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#, w - 2.0 * m, h - 2.0 * m)
        .unwrap();
    writeln!(svg, r#"<text x="{m}" y="{}" text-anchor="start">{:.4e}</text>"#, h - m + 16.0, x.0).unwrap();
    writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{:.4e}</text>"#, w - m, h - m + 16.0, x.1).unwrap();
    writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{:.3e}</text>"#, m - 4.0, h - m, y.0).unwrap();
    writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{:.3e}</text>"#, m - 4.0, m + 8.0, y.1).unwrap();
    writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{y_label}</text>"#, w / 2.0, h - 12.0).unwrap();
}

fn line_svg(table: &Table, x: usize, ys: &[usize], log_y: bool, points: bool) -> String {
    let xs = table.column(x);
    let transform = |v: f64| if log_y { v.max(f64::MIN_POSITIVE).log10() } else { v };
    let series: Vec<Vec<f64>> = ys.iter().map(|&i| table.column(i).into_iter().map(transform).collect()).collect();
    let xr = range(xs.iter().copied());
    let yr = range(series.iter().flatten().copied());
    let mut svg = String::new();
    let y_note = if log_y { " (y: log10)" } else { "" };
    frame(&mut svg, &table.name, xr, yr, &format!("{}{y_note}", table.columns[x]));
    let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    for (si, (col, ys)) in ys.iter().zip(&series).enumerate() {
        let colour = COLOURS[si % COLOURS.len()];
        let mut pts = String::new();
        for (xv, yv) in xs.iter().zip(ys) {
            if xv.is_finite() && yv.is_finite() {
                let px = MARGIN + (xv - xr.0) / (xr.1 - xr.0) * pw;
                let py = MARGIN + ph - (yv - yr.0) / (yr.1 - yr.0) * ph;
                if points {
                    writeln!(svg, r#"<circle cx="{px:.2}" cy="{py:.2}" r="2" fill="{colour}"/>"#).unwrap();
                } else {
                    write!(pts, "{px:.2},{py:.2} ").unwrap();
                }
            }
        }
        if !points {
            writeln!(svg, r#"<polyline fill="none" stroke="{colour}" stroke-width="1" points="{}"/>"#, pts.trim_end()).unwrap();
        }
        writeln!(
            svg,
            r#"<text x="{}" y="{}" fill="{colour}">{}</text>"#,
            WIDTH - MARGIN - 4.0,
            MARGIN + 14.0 * (si + 1) as f64,
            table.columns[*col]
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

/// Perceptually ordered dark-blue to yellow ramp.
fn ramp(v: f64) -> String {
    let stops = [(68.0, 1.0, 84.0), (59.0, 82.0, 139.0), (33.0, 145.0, 140.0), (94.0, 201.0, 98.0), (253.0, 231.0, 37.0)];
    let x = v.clamp(0.0, 1.0) * (stops.len() - 1) as f64;
    let i = (x.floor() as usize).min(stops.len() - 2);
    let f = x - i as f64;
    let mix = |a: f64, b: f64| (a + (b - a) * f).round() as u8;
    let (a, b) = (stops[i], stops[i + 1]);
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn heat_svg(name: &str, rows: &[String], columns: &[f64], values: &[Vec<f64>]) -> String {
    let xr = range(columns.iter().copied());
    let vmax = values.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut svg = String::new();
    frame(&mut svg, name, xr, (0.0, rows.len() as f64), "time (rows: separations, bottom to top)");
    let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let cw = pw / columns.len().max(1) as f64;
    let rh = ph / rows.len().max(1) as f64;
    for (ri, row) in values.iter().enumerate() {
        for (ci, v) in row.iter().enumerate() {
            let shade = if vmax > 0.0 { v.abs() / vmax } else { 0.0 };
            writeln!(
                svg,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                MARGIN + ci as f64 * cw,
                MARGIN + ph - (ri + 1) as f64 * rh,
                cw + 0.05,
                rh + 0.05,
                ramp(shade)
            )
            .unwrap();
        }
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn render(plot: &Plot, tables: &[Table]) -> Result<(String, String), CliError> {
    match plot {
        Plot::Lines { table, x, ys, log_y, points } => {
            let t = tables
                .iter()
                .find(|t| &t.name == table)
                .ok_or_else(|| CliError::internal(format!("no table named {table} to plot")))?;
            Ok((format!("{}.svg", t.name), line_svg(t, *x, ys, *log_y, *points)))
        }
        Plot::Heat { name, rows, columns, values } => Ok((format!("{name}.svg"), heat_svg(name, rows, columns, values))),
    }
}
