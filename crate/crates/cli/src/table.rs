//! Numeric tables and their CSV encoding.

/// Seventeen significant digits, enough to round-trip any f64.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// File stem, e.g. `loss-surface` or `loss-surface.fixed-r2`.
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Extra `# key: value` header lines.
    pub meta: Vec<(String, String)>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new(), meta: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self, header: &[(String, String)]) -> String {
        let mut out = String::new();
        for (k, v) in header.iter().chain(&self.meta) {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_number(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}
