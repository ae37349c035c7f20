//! Report assembly and rendering. Every numeric cell keeps its exact form
//! (integer or rational) alongside the fixed-point decimal used in the
//! rendered output; decimals are fixed at five places to match the table
//! layout of the experiments.

use num_bigint::BigInt;
use num_traits::Signed;

use eigencoprime_core::arith::render_rational;

pub const DECIMAL_PLACES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Markdown,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<OutputFormat> {
        match s {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            "markdown" | "md" => Some(OutputFormat::Markdown),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Text(String),
    Count(u128),
    Int(BigInt),
    /// Exact rational with its decimal rendering.
    Exact { num: BigInt, den: BigInt },
    Float(f64),
    /// A report-only quantity that may be undefined at this parameter.
    Missing,
}

impl Cell {
    pub fn exact<N: Into<BigInt>, D: Into<BigInt>>(num: N, den: D) -> Cell {
        Cell::Exact {
            num: num.into(),
            den: den.into(),
        }
    }

    pub fn opt_float(v: Option<f64>) -> Cell {
        match v {
            Some(v) => Cell::Float(v),
            None => Cell::Missing,
        }
    }

    /// Compact rendering used by the csv and markdown formats.
    pub fn rendered(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Count(c) => c.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Exact { num, den } => render_rational(num, den, DECIMAL_PLACES),
            Cell::Float(v) => format!("{:.*}", DECIMAL_PLACES, v),
            Cell::Missing => String::new(),
        }
    }

    fn json_value(&self) -> serde_json::Value {
        use serde_json::{json, Value};
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Count(c) => {
                if *c <= u64::MAX as u128 {
                    json!(*c as u64)
                } else {
                    Value::String(c.to_string())
                }
            }
            Cell::Int(i) => Value::String(i.to_string()),
            Cell::Exact { num, den } => json!({
                "exact": format!("{num}/{den}"),
                "decimal": self.rendered(),
            }),
            Cell::Float(v) => json!({
                "value": v,
                "decimal": self.rendered(),
            }),
            Cell::Missing => Value::Null,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Report {
        Report {
            title: title.into(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.render_csv(),
            OutputFormat::Json => self.render_json(),
            OutputFormat::Markdown => self.render_markdown(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&join_csv(self.columns.iter().map(|s| s.as_str())));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.rendered()).collect();
            out.push_str(&join_csv(cells.iter().map(|s| s.as_str())));
            out.push('\n');
        }
        out
    }

    fn render_json(&self) -> String {
        use serde_json::{json, Value};
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Array(row.iter().map(|c| c.json_value()).collect()))
            .collect();
        let doc = json!({
            "title": self.title,
            "columns": self.columns,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("report is serializable");
        text.push('\n');
        text
    }

    fn render_markdown(&self) -> String {
        let mut out = String::new();
        if !self.title.is_empty() {
            out.push_str(&format!("### {}\n\n", self.title));
        }
        out.push_str(&format!("| {} |\n", self.columns.join(" | ")));
        out.push_str(&format!(
            "|{}\n",
            self.columns.iter().map(|_| " --- |").collect::<String>()
        ));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.rendered()).collect();
            out.push_str(&format!("| {} |\n", cells.join(" | ")));
        }
        out
    }
}

fn csv_quote(cell: &str) -> String {
    if cell.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

fn join_csv<'a>(cells: impl Iterator<Item = &'a str>) -> String {
    cells.map(csv_quote).collect::<Vec<_>>().join(",")
}

/// Round num/den at `places` and return the scaled integer numerator; the
/// rendering round-trip invariant compares against the parsed decimal.
pub fn rounded_scaled(num: &BigInt, den: &BigInt, places: usize) -> BigInt {
    use num_integer::Integer;
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = num.abs() * &scale;
    let (q, r) = scaled.div_rem(&den.abs());
    let q = if &r * 2 >= den.abs() { q + 1 } else { q };
    if num.is_negative() {
        -q
    } else {
        q
    }
}
