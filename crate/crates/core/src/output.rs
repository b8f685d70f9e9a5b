//! Serialization of a [`ChartTable`] as JSON, CSV, or an accessible HTML table.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bars::ChartTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Html,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Html => "html",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "html" => Ok(Format::Html),
            other => Err(format!("unknown format '{other}' (expected json, csv or html)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedTable {
    pub format: Format,
    pub bytes: Vec<u8>,
}

impl RenderedTable {
    pub fn as_str(&self) -> &str {
        // every renderer emits UTF-8
        std::str::from_utf8(&self.bytes).unwrap_or_default()
    }
}

/// Formats `v` with at most six significant digits, in plain decimal
/// notation, without trailing zeros.
pub fn format_number(v: f64) -> String {
    if !v.is_finite() {
        return "null".into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.5e}", v.abs());
    let (mantissa, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if v < 0.0 { "-" } else { "" };
    if !(-15..=15).contains(&exp) {
        let m = strip_fraction(&format!("{}.{}", &digits[..1], &digits[1..]));
        return format!("{sign}{m}e{exp}");
    }
    let plain = if exp >= 5 {
        format!("{digits}{}", "0".repeat((exp - 5) as usize))
    } else if exp >= 0 {
        let (int, frac) = digits.split_at(exp as usize + 1);
        strip_fraction(&format!("{int}.{frac}"))
    } else {
        strip_fraction(&format!("0.{}{digits}", "0".repeat((-exp - 1) as usize)))
    };
    format!("{sign}{plain}")
}

fn strip_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).unwrap_or_else(|_| "\"\"".into())
}

/// Fixed key order: `x_label`, `y_label`, `categories`, `series`; absent
/// cells are `null`.
pub fn to_json(table: &ChartTable) -> RenderedTable {
    let categories = table
        .categories
        .iter()
        .map(|c| json_string(c))
        .collect::<Vec<_>>()
        .join(", ");
    let series = table
        .series
        .iter()
        .map(|s| {
            let values = s
                .values
                .iter()
                .map(|v| v.map_or_else(|| "null".to_string(), format_number))
                .collect::<Vec<_>>()
                .join(", ");
            format!(
                "    {{\"name\": {}, \"color\": [{}, {}, {}], \"values\": [{}]}}",
                json_string(&s.name),
                s.color[0],
                s.color[1],
                s.color[2],
                values
            )
        })
        .collect::<Vec<_>>()
        .join(",\n");
    let series_block = if series.is_empty() {
        "[]".to_string()
    } else {
        format!("[\n{series}\n  ]")
    };
    let out = format!(
        "{{\n  \"x_label\": {},\n  \"y_label\": {},\n  \"categories\": [{}],\n  \"series\": {}\n}}\n",
        json_string(&table.x_label),
        json_string(&table.y_label),
        categories,
        series_block
    );
    RenderedTable {
        format: Format::Json,
        bytes: out.into_bytes(),
    }
}

pub fn from_json(json: &str) -> serde_json::Result<ChartTable> {
    serde_json::from_str(json)
}

/// RFC 4180 with LF line endings. The header names the category column
/// after the x label (or "category") followed by the series names.
pub fn to_csv(table: &ChartTable) -> RenderedTable {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let first = if table.x_label.is_empty() {
        "category"
    } else {
        table.x_label.as_str()
    };
    let header: Vec<&str> = std::iter::once(first)
        .chain(table.series.iter().map(|s| s.name.as_str()))
        .collect();
    // writing to a Vec cannot fail
    w.write_record(&header).ok();
    for (i, cat) in table.categories.iter().enumerate() {
        let row: Vec<String> = std::iter::once(cat.clone())
            .chain(table.series.iter().map(|s| {
                s.values
                    .get(i)
                    .copied()
                    .flatten()
                    .map(format_number)
                    .unwrap_or_default()
            }))
            .collect();
        w.write_record(&row).ok();
    }
    RenderedTable {
        format: Format::Csv,
        bytes: w.into_inner().unwrap_or_default(),
    }
}

pub fn escape_html(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// Caption used by the CLI when none is given: "<y label> by <x label>".
pub fn default_caption(table: &ChartTable) -> String {
    match (table.y_label.is_empty(), table.x_label.is_empty()) {
        (false, false) => format!("{} by {}", table.y_label, table.x_label),
        (false, true) => table.y_label.clone(),
        (true, false) => format!("Values by {}", table.x_label),
        (true, true) => "Chart data".into(),
    }
}

/// HTML5 table fragment for screen readers: column headers and per-row
/// category headers carry `scope`, missing cells read as "no data".
pub fn to_html(table: &ChartTable, caption: &str) -> RenderedTable {
    let mut out = String::from("<table>\n");
    out.push_str(&format!("  <caption>{}</caption>\n", escape_html(caption)));
    out.push_str("  <thead>\n    <tr>");
    let first = if table.x_label.is_empty() {
        "Category"
    } else {
        table.x_label.as_str()
    };
    out.push_str(&format!("<th scope=\"col\">{}</th>", escape_html(first)));
    for s in &table.series {
        out.push_str(&format!("<th scope=\"col\">{}</th>", escape_html(&s.name)));
    }
    out.push_str("</tr>\n  </thead>\n  <tbody>\n");
    for (i, cat) in table.categories.iter().enumerate() {
        out.push_str(&format!("    <tr><th scope=\"row\">{}</th>", escape_html(cat)));
        for s in &table.series {
            match s.values.get(i).copied().flatten() {
                Some(v) => out.push_str(&format!("<td>{}</td>", format_number(v))),
                None => out.push_str("<td aria-label=\"no data\">\u{2014}</td>"),
            }
        }
        out.push_str("</tr>\n");
    }
    out.push_str("  </tbody>\n</table>\n");
    RenderedTable {
        format: Format::Html,
        bytes: out.into_bytes(),
    }
}

pub fn render(table: &ChartTable, format: Format, caption: &str) -> RenderedTable {
    match format {
        Format::Json => to_json(table),
        Format::Csv => to_csv(table),
        Format::Html => to_html(table, caption),
    }
}
