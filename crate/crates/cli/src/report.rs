//! Numeric tables and their CSV form.
//!
//! A table is written as a block of `# key: value` comment lines followed by
//! a headered CSV body. Cells are rounded to a fixed number of significant
//! digits and then printed in the shortest form that parses back to the
//! rounded value. Empty cells mean "not applicable".

use std::io::Write;

use crate::error::{CliError, Result};

pub const TOOL: &str = concat!("wpt-coop ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    name: String,
    columns: Vec<String>,
    rows: Vec<Vec<Option<f64>>>,
    scenario_hash: String,
    tool: String,
    notes: Vec<(String, String)>,
}

impl ReportTable {
    pub fn new(name: impl Into<String>, columns: Vec<String>, scenario_hash: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            columns,
            rows: Vec::new(),
            scenario_hash: scenario_hash.into(),
            tool: TOOL.to_string(),
            notes: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Option<f64>>] {
        &self.rows
    }

    pub fn scenario_hash(&self) -> &str {
        &self.scenario_hash
    }

    pub fn tool(&self) -> &str {
        &self.tool
    }

    pub fn notes(&self) -> &[(String, String)] {
        &self.notes
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.notes.push((key.into(), value.to_string()));
    }

    /// Appends a row; rejects wrong widths and non-finite values.
    pub fn push_row(&mut self, row: Vec<Option<f64>>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(self.error(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        if let Some((i, v)) = row
            .iter()
            .enumerate()
            .find_map(|(i, v)| v.filter(|x| !x.is_finite()).map(|x| (i, x)))
        {
            return Err(self.error(format!("column `{}` got non-finite value {v}", self.columns[i])));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn push_values(&mut self, row: &[f64]) -> Result<()> {
        self.push_row(row.iter().copied().map(Some).collect())
    }

    /// All cells of one column, top to bottom.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let at = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[at]).collect())
    }

    pub fn write_csv<W: Write>(&self, mut out: W, precision: usize) -> Result<()> {
        writeln!(out, "# tool: {}", self.tool).map_err(csv::Error::from)?;
        writeln!(out, "# table: {}", self.name).map_err(csv::Error::from)?;
        writeln!(out, "# scenario-sha256: {}", self.scenario_hash).map_err(csv::Error::from)?;
        for (key, value) in &self.notes {
            writeln!(out, "# {key}: {value}").map_err(csv::Error::from)?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| match v {
                Some(x) => format_number(*x, precision),
                None => String::new(),
            }))?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn to_csv_string(&self, precision: usize) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, precision)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Reads back what [`ReportTable::write_csv`] produced.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut name = String::new();
        let mut hash = String::new();
        let mut tool = String::new();
        let mut notes = Vec::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let body = line.trim_start_matches('#').trim_start();
            let (key, value) = body.split_once(": ").unwrap_or((body, ""));
            match key {
                "tool" => tool = value.to_string(),
                "table" => name = value.to_string(),
                "scenario-sha256" => hash = value.to_string(),
                _ => notes.push((key.to_string(), value.to_string())),
            }
        }
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let columns: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let mut table = Self::new(name, columns, hash);
        table.tool = tool;
        table.notes = notes;
        for record in reader.records() {
            let record = record?;
            let row = record
                .iter()
                .map(|cell| match cell {
                    "" => Ok(None),
                    s => s
                        .parse::<f64>()
                        .map(Some)
                        .map_err(|_| table.error(format!("cell `{s}` is not a number"))),
                })
                .collect::<Result<Vec<_>>>()?;
            table.push_row(row)?;
        }
        Ok(table)
    }

    fn error(&self, reason: String) -> CliError {
        CliError::Table {
            table: self.name.clone(),
            reason,
        }
    }
}

/// `x` rounded to `precision` significant digits, printed in the shortest
/// form that parses back to the rounded value.
pub fn format_number(x: f64, precision: usize) -> String {
    let rounded = round_significant(x, precision);
    if rounded == 0.0 {
        return "0".to_string();
    }
    let magnitude = rounded.abs();
    if (1e-4..1e15).contains(&magnitude) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// Rounds through decimal scientific notation, so the result is the double
/// nearest to the `precision`-digit decimal.
pub fn round_significant(x: f64, precision: usize) -> f64 {
    let digits = precision.clamp(1, 17) - 1;
    format!("{x:.digits$e}")
        .parse()
        .expect("scientific notation always parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_forms() {
        assert_eq!(format_number(4.0, 12), "4");
        assert_eq!(format_number(357.0 / 13.0, 12), "27.4615384615");
        assert_eq!(format_number(-0.0, 12), "0");
        assert_eq!(format_number(1.5e-9, 12), "1.5e-9");
        assert_eq!(format_number(6.057904946346152, 4), "6.058");
        assert_eq!(format_number(2.5e20, 12), "2.5e20");
    }

    #[test]
    fn rows_are_checked() {
        let mut t = ReportTable::new("t", vec!["a".into(), "b".into()], "h");
        assert!(t.push_values(&[1.0]).is_err());
        assert!(t.push_values(&[1.0, f64::NAN]).is_err());
        assert!(t.push_row(vec![Some(1.0), None]).is_ok());
        assert_eq!(t.column("b"), Some(vec![None]));
    }

    #[test]
    fn csv_layout() {
        let mut t = ReportTable::new("demo", vec!["x".into(), "y".into()], "abc");
        t.note("game", "cournot");
        t.push_values(&[1.0, 0.1 + 0.2]).unwrap();
        t.push_row(vec![Some(2.0), None]).unwrap();
        let text = t.to_csv_string(12);
        let expected = format!(
            "# tool: {TOOL}\n# table: demo\n# scenario-sha256: abc\n# game: cournot\nx,y\n1,0.3\n2,\n"
        );
        assert_eq!(text, expected);
        let back = ReportTable::from_csv(&text).unwrap();
        assert_eq!(back.notes(), t.notes());
        assert_eq!(back.column("y"), Some(vec![Some(0.3), None]));
    }
}
