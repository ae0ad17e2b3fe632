//! CSV input and output.
//!
//! Input is comma-separated UTF-8 with an optional single header line and
//! LF or CRLF line endings. Output writes every number with 17 significant
//! digits, which round-trips `f64` exactly.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use infoproj_core::linalg::Matrix;
use infoproj_core::synth::SynthData;
use infoproj_core::{center, DataMatrix};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    pub has_header: bool,
    /// Treat the last column as a label, kept as text.
    pub label_last: bool,
    pub center: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            has_header: false,
            label_last: false,
            center: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub data: DataMatrix,
    pub labels: Option<Vec<String>>,
    /// Column names from the header, excluding the label column.
    pub header: Option<Vec<String>>,
}

pub fn load_csv(path: &Path, opts: &LoadOptions) -> Result<Loaded> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, opts)
}

pub fn read_csv<R: Read>(reader: R, opts: &LoadOptions) -> Result<Loaded> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut header = None;
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut width: Option<usize> = None;
    let mut rows = 0usize;

    for (k, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(k as u64 + 1, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(k as u64 + 1, |p| p.line());
        if k == 0 && opts.has_header {
            let mut names: Vec<String> = record.iter().map(str::to_owned).collect();
            if opts.label_last {
                names.pop();
            }
            header = Some(names);
            continue;
        }
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {w} fields, found {}", record.len()),
                });
            }
            _ => {}
        }
        let numeric = if opts.label_last {
            if record.len() < 2 {
                return Err(Error::Parse {
                    line,
                    message: "a labelled row needs at least one numeric field".into(),
                });
            }
            labels.push(record[record.len() - 1].to_owned());
            record.len() - 1
        } else {
            record.len()
        };
        for (col, cell) in record.iter().take(numeric).enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                line,
                message: format!("column {}: not a number: {cell:?}", col + 1),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("column {}: non-finite value {cell:?}", col + 1),
                });
            }
            values.push(v);
        }
        rows += 1;
    }

    let d = match width {
        Some(w) if rows > 0 => w - usize::from(opts.label_last),
        _ => return Err(Error::Config("no data rows".into())),
    };
    let mut data = DataMatrix::new(Matrix::from_vec(rows, d, values))?;
    if opts.center {
        data = center(&data)?;
    }
    Ok(Loaded {
        data,
        labels: opts.label_last.then_some(labels),
        header,
    })
}

/// 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `m` with an optional header and trailing label column.
pub fn write_matrix<W: Write>(
    out: W,
    m: &Matrix,
    header: Option<&[String]>,
    labels: Option<&[String]>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Output(e.to_string());
    if let Some(h) = header {
        w.write_record(h).map_err(err)?;
    }
    let mut record: Vec<String> = Vec::with_capacity(m.cols() + 1);
    for i in 0..m.rows() {
        record.clear();
        record.extend(m.row(i).iter().map(|&v| format_f64(v)));
        if let Some(l) = labels {
            record.push(l[i].clone());
        }
        w.write_record(&record).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))
}

/// Columns `x1..xd` followed by `label` (0 for the majority population,
/// 1 for the minority).
pub fn write_synth<W: Write>(out: W, s: &SynthData) -> Result<()> {
    let d = s.data.d();
    let mut header: Vec<String> = (1..=d).map(|j| format!("x{j}")).collect();
    header.push("label".into());
    let labels: Vec<String> = s.labels.iter().map(|l| l.index().to_string()).collect();
    write_matrix(out, s.data.values(), Some(&header), Some(&labels))
}

pub(crate) fn create(path: &Path) -> Result<io::BufWriter<File>> {
    File::create(path)
        .map(io::BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, opts: LoadOptions) -> Result<Loaded> {
        read_csv(text.as_bytes(), &opts)
    }

    const RAW: LoadOptions = LoadOptions {
        has_header: false,
        label_last: false,
        center: false,
    };

    #[test]
    fn plain_matrix() {
        let l = parse("1,2\n3,4\n", RAW).unwrap();
        assert_eq!(
            l.data.values(),
            &Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]])
        );
        assert!(l.labels.is_none());
    }

    #[test]
    fn header_and_crlf() {
        let opts = LoadOptions {
            has_header: true,
            ..RAW
        };
        let l = parse("a,b\r\n1,2\r\n3,4\r\n", opts).unwrap();
        assert_eq!(l.data.n(), 2);
        assert_eq!(l.header.unwrap(), ["a", "b"]);
    }

    #[test]
    fn bad_cell_reports_its_line() {
        match parse("1,x\n", RAW) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        match parse("1,2\n3,4\n5,nan\n", RAW) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ragged_rows_are_rejected() {
        match parse("1,2\n3\n", RAW) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn labels_and_centering() {
        let opts = LoadOptions {
            has_header: false,
            label_last: true,
            center: true,
        };
        let l = parse("1,0,a\n3,2,b\n", opts).unwrap();
        assert_eq!(l.labels.unwrap(), ["a", "b"]);
        assert_eq!(
            l.data.values(),
            &Matrix::from_rows(&[[-1.0, -1.0], [1.0, 1.0]])
        );
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(parse("", RAW).is_err());
    }

    #[test]
    fn written_numbers_round_trip() {
        let m = Matrix::from_rows(&[[0.1, -1.0 / 3.0], [1e-300, 6.02214076e23]]);
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m, None, None).unwrap();
        let back = read_csv(buf.as_slice(), &RAW).unwrap();
        assert_eq!(back.data.values(), &m);
    }
}
