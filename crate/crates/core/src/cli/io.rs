//! Instance files, point-cloud CSVs and atomic result writing.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::cli::CliError;
use crate::points::{Point, PointCloud};
use crate::problem::{InstanceSpec, UncertainInstance};

/// Parses and validates an instance document.
pub fn parse_instance_str(text: &str) -> Result<UncertainInstance, CliError> {
    let spec: InstanceSpec = serde_json::from_str(text).map_err(CliError::Json)?;
    Ok(UncertainInstance::new(spec)?)
}

pub fn parse_instance(path: &Path) -> Result<UncertainInstance, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_instance_str(&text)
}

pub fn instance_to_string(inst: &UncertainInstance) -> String {
    let mut s = serde_json::to_string_pretty(inst.spec()).expect("instance specs always serialize");
    s.push('\n');
    s
}

pub fn write_instance(inst: &UncertainInstance, path: &Path) -> Result<(), CliError> {
    write_atomic(path, instance_to_string(inst).as_bytes())
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// `%.12g`-style rendering: 12 significant digits, trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A CSV table rendered with a header row and LF line endings.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_atomic(path, self.to_csv().as_bytes())
    }
}

/// Column names `prefix_1, …, prefix_d`.
pub fn coord_header(prefix: &str, dim: usize) -> Vec<String> {
    (1..=dim).map(|j| format!("{prefix}_{j}")).collect()
}

pub fn coord_fields(p: &Point) -> Vec<String> {
    p.coords().iter().map(|&c| fmt_num(c)).collect()
}

/// Reads a point cloud, one point per row. A first row that does not parse
/// as numbers is treated as a header.
pub fn read_cloud(path: &Path) -> Result<PointCloud, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_cloud(&text).map_err(|msg| CliError::Usage(format!("{}: {msg}", path.display())))
}

pub fn parse_cloud(text: &str) -> Result<PointCloud, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(coords) => points.push(
                Point::new(coords).map_err(|e| format!("row {}: {e}", line + 1))?,
            ),
            Err(_) if line == 0 => continue,
            Err(e) => return Err(format!("row {}: {e}", line + 1)),
        }
    }
    PointCloud::new(points).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(fmt_num(-1.25), "-1.25");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_num(1e-7), "1e-07");
        assert_eq!(fmt_num(123456789012345.0), "1.23456789012e+14");
        assert_eq!(fmt_num(0.0001), "0.0001");
    }

    #[test]
    fn table_uses_lf_and_header() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["1".into(), "2".into()]);
        assert_eq!(t.to_csv(), "a,b\n1,2\n");
    }

    #[test]
    fn cloud_parsing_skips_header() {
        let c = parse_cloud("y_1,y_2\n0,1\n2, 3\n").unwrap();
        assert_eq!(c.len(), 2);
        assert!(parse_cloud("y_1\nfoo\n").is_err());
        assert!(parse_cloud("").is_err());
    }
}
