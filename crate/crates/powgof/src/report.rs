//! Rendering results as aligned text, JSON or CSV.

use serde::Serialize;

/// Version of the JSON layout.
pub const SCHEMA_VERSION: u32 = 1;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// Top-level JSON document: the resolved configuration travels with the
/// result so that a run can be repeated exactly.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a C,
    pub result: &'a R,
}

pub fn to_json<C: Serialize, R: Serialize>(command: &str, config: &C, result: &R) -> String {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        tool: "powgof",
        version: TOOL_VERSION,
        command,
        config,
        result,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("results serialize to JSON");
    s.push('\n');
    s
}

/// A titled grid of strings.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: Option<String>,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Table {
            title: None,
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn titled(mut self, title: impl Into<String>) -> Self {
        self.title = Some(title.into());
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// Columns padded to a common width; the first is left-aligned, the
    /// rest right-aligned.
    pub fn render(&self) -> String {
        let cols = self.headers.len();
        let mut width: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (i, cell) in cells.iter().enumerate().take(cols) {
                let pad = width[i] - cell.chars().count();
                if i > 0 {
                    s.push_str("  ");
                    s.extend(std::iter::repeat_n(' ', pad));
                    s.push_str(cell);
                } else {
                    s.push_str(cell);
                    s.extend(std::iter::repeat_n(' ', pad));
                }
            }
            s.trim_end().to_string()
        };
        let mut out = String::new();
        if let Some(t) = &self.title {
            out.push_str(t);
            out.push('\n');
        }
        out.push_str(&line(&self.headers));
        out.push('\n');
        let total: usize = width.iter().sum::<usize>() + 2 * cols.saturating_sub(1);
        out.extend(std::iter::repeat_n('-', total));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }

    /// CSV body preceded by `# key=value` metadata lines.
    pub fn to_csv(&self, meta: &[(&str, String)]) -> String {
        let mut out = String::new();
        for (k, v) in meta {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        let bytes = w.into_inner().expect("in-memory flush");
        out.push_str(&String::from_utf8(bytes).expect("fields are UTF-8"));
        out
    }
}

/// Fixed-point with `digits` decimals.
pub fn fixed(v: f64, digits: usize) -> String {
    format!("{v:.digits$}")
}

/// Full-precision shortest round-trip representation.
pub fn exact(v: f64) -> String {
    format!("{v}")
}

pub fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| String::from("-"), |v| fixed(v, digits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_alignment() {
        let mut t = Table::new(["name", "value"]).titled("T");
        t.push(vec!["a".into(), "1.5".into()]);
        t.push(vec!["long".into(), "10.25".into()]);
        assert_eq!(t.render(), "T\nname  value\n-----------\na       1.5\nlong  10.25\n");
    }

    #[test]
    fn csv_quotes_and_metadata() {
        let mut t = Table::new(["family", "x"]);
        t.push(vec!["G1(r=3,s=1)".into(), "0.5".into()]);
        let s = t.to_csv(&[("seed", "7".into())]);
        assert_eq!(s, "# seed=7\nfamily,x\n\"G1(r=3,s=1)\",0.5\n");
    }

    #[test]
    fn json_envelope_fields() {
        let s = to_json("demo", &serde_json::json!({"seed": 1}), &vec![1.5]);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["config"]["seed"], 1);
        assert_eq!(v["result"][0], 1.5);
        assert_eq!(v["version"], TOOL_VERSION);
    }
}
