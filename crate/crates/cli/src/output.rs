//! Report rendering. CSV output carries `# key: value` summary lines, then a
//! header row and data rows; floats are written with 17 significant digits.

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub notes: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub document: Value,
    /// False when a numeric check inside the command failed.
    pub passed: bool,
}

impl Report {
    pub fn new<T: Serialize>(document: &T) -> Result<Self, CliError> {
        let document = serde_json::to_value(document).map_err(|e| CliError::Output(e.to_string()))?;
        Ok(Report { notes: Vec::new(), header: Vec::new(), rows: Vec::new(), document, passed: true })
    }

    pub fn note(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.notes.push((key.to_string(), value.to_string()));
        self
    }

    pub fn columns(&mut self, names: &[&str]) -> &mut Self {
        self.header = names.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(&self.document).map_err(|e| CliError::Output(e.to_string()))?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => self.render_csv(),
        }
    }

    fn render_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut out = Vec::new();
        for (k, v) in &self.notes {
            out.extend_from_slice(format!("# {k}: {v}\n").as_bytes());
        }
        let mut w = csv::WriterBuilder::new().flexible(false).from_writer(out);
        let err = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(&self.header).map_err(err)?;
        for r in &self.rows {
            w.write_record(r).map_err(err)?;
        }
        w.into_inner().map_err(|e| CliError::Output(e.to_string()))
    }
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut r = Report::new(&serde_json::json!({"a": 1})).unwrap();
        r.note("lambda1", num(54.0)).columns(&["k", "value"]);
        r.row(vec!["0".into(), num(0.5)]);
        let text = String::from_utf8(r.render(Format::Csv).unwrap()).unwrap();
        assert_eq!(text, "# lambda1: 5.4000000000000000e1\nk,value\n0,5.0000000000000000e-1\n");
    }

    #[test]
    fn seventeen_significant_digits() {
        let x = 0.1f64 + 0.2;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
        assert_eq!(opt_num(None), "");
    }

    #[test]
    fn json_is_the_document() {
        let r = Report::new(&serde_json::json!({"verdict": "converged"})).unwrap();
        let text = String::from_utf8(r.render(Format::Json).unwrap()).unwrap();
        assert_eq!(text, "{\n  \"verdict\": \"converged\"\n}\n");
    }
}
