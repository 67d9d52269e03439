//! CSV datasets and results, and JSON models.
//!
//! Every float is written with the shortest representation that parses back
//! to the same value, and a non-finite value anywhere is an error.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use opplearn_core::{FisModel, MinedPair, Sample};

use crate::error::{HarnessError, Result};
use crate::experiments::{CurvePoint, ResultRow, Series2Run};

fn number(v: f64, field: &str) -> Result<String> {
    if v.is_finite() {
        Ok(v.to_string())
    } else {
        Err(HarnessError::NonFinite(field.to_string()))
    }
}

fn numbers(values: &[f64], field: &str) -> Result<Vec<String>> {
    values.iter().map(|&v| number(v, field)).collect()
}

fn prefixed(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |i| format!("{prefix}{i}"))
}

fn csv_error(path: &Path, e: csv::Error) -> HarnessError {
    let row = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => HarnessError::io(path, source),
        kind => HarnessError::Csv {
            path: path.to_path_buf(),
            row,
            column: 0,
            message: format!("{kind:?}"),
        },
    }
}

struct CsvOut {
    path: std::path::PathBuf,
    writer: csv::Writer<BufWriter<File>>,
}

impl CsvOut {
    fn create(path: &Path, header: &[String]) -> Result<Self> {
        let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
        let mut out = Self {
            path: path.to_path_buf(),
            writer: csv::Writer::from_writer(BufWriter::new(file)),
        };
        out.record(header)?;
        Ok(out)
    }

    fn record<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(|e| csv_error(&self.path, e))
    }

    fn finish(mut self) -> Result<()> {
        self.writer.flush().map_err(|e| HarnessError::io(&self.path, e))
    }
}

/// Reads a sample CSV with header `x1..xn,y`.
pub fn read_samples(path: &Path) -> Result<Vec<Sample>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let bad_header = |message: String| HarnessError::Csv {
        path: path.to_path_buf(),
        row: 1,
        column: 0,
        message,
    };
    if header.len() < 2 {
        return Err(bad_header(format!("expected header x1..xn,y, got '{}'", header.iter().collect::<Vec<_>>().join(","))));
    }
    let dim = header.len() - 1;
    for (i, (name, want)) in header.iter().zip(prefixed("x", dim).chain(["y".to_string()])).enumerate() {
        if name != want {
            return Err(HarnessError::Csv {
                path: path.to_path_buf(),
                row: 1,
                column: i + 1,
                message: format!("expected column '{want}', got '{name}'"),
            });
        }
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let values = record
            .iter()
            .enumerate()
            .map(|(i, field)| match field.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(HarnessError::Csv {
                    path: path.to_path_buf(),
                    row: line,
                    column: i + 1,
                    message: format!("'{field}' is not a finite number"),
                }),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(Sample {
            output: values[dim],
            inputs: values[..dim].to_vec(),
        });
    }
    if rows.is_empty() {
        return Err(HarnessError::Usage(format!("{}: no data rows after the header", path.display())));
    }
    Ok(rows)
}

pub fn write_samples(path: &Path, rows: &[Sample]) -> Result<()> {
    let dim = rows.first().map_or(1, |r| r.inputs.len());
    let header: Vec<String> = prefixed("x", dim).chain(["y".to_string()]).collect();
    let mut out = CsvOut::create(path, &header)?;
    for r in rows {
        let mut fields = numbers(&r.inputs, "sample input")?;
        fields.push(number(r.output, "sample output")?);
        out.record(&fields)?;
    }
    out.finish()
}

/// Header `x1..xn,y,ox1..oxn,match_error`.
pub fn write_mined(path: &Path, pairs: &[MinedPair]) -> Result<()> {
    let dim = pairs.first().map_or(1, |p| p.inputs.len());
    let header: Vec<String> = prefixed("x", dim)
        .chain(["y".to_string()])
        .chain(prefixed("ox", dim))
        .chain(["match_error".to_string()])
        .collect();
    let mut out = CsvOut::create(path, &header)?;
    for p in pairs {
        let mut fields = numbers(&p.inputs, "input")?;
        fields.push(number(p.output, "output")?);
        fields.extend(numbers(&p.opposite_inputs, "opposite input")?);
        fields.push(number(p.match_error, "match_error")?);
        out.record(&fields)?;
    }
    out.finish()
}

/// Header `x1..xn,y,ox1..oxn`; one learned opposite per sample.
pub fn write_predictions(path: &Path, rows: &[Sample], opposites: &[Vec<f64>]) -> Result<()> {
    let dim = rows.first().map_or(1, |r| r.inputs.len());
    let header: Vec<String> = prefixed("x", dim)
        .chain(["y".to_string()])
        .chain(prefixed("ox", dim))
        .collect();
    let mut out = CsvOut::create(path, &header)?;
    for (r, o) in rows.iter().zip(opposites) {
        let mut fields = numbers(&r.inputs, "input")?;
        fields.push(number(r.output, "output")?);
        fields.extend(numbers(o, "predicted opposite")?);
        out.record(&fields)?;
    }
    out.finish()
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let header = ["series", "function", "scheme", "opposite_type", "run", "mean_error", "std_error"].map(String::from);
    let mut out = CsvOut::create(path, &header)?;
    for r in rows {
        out.record([
            r.series.to_string(),
            r.function.clone(),
            r.scheme.clone(),
            r.opposite_type.clone(),
            r.run.to_string(),
            number(r.mean_error, "mean_error")?,
            number(r.std_error, "std_error")?,
        ])?;
    }
    out.finish()
}

/// Header `n_seen,mean,std`.
pub fn write_plot(path: &Path, curve: &[CurvePoint]) -> Result<()> {
    let mut out = CsvOut::create(path, &["n_seen", "mean", "std"].map(String::from))?;
    for p in curve {
        out.record([
            p.n_seen.to_string(),
            number(p.errors.mean, "mean")?,
            number(p.errors.std, "std")?,
        ])?;
    }
    out.finish()
}

/// Header `run,n_seen,mean,std`: every run's curve.
pub fn write_curves(path: &Path, runs: &[Series2Run]) -> Result<()> {
    let mut out = CsvOut::create(path, &["run", "n_seen", "mean", "std"].map(String::from))?;
    for r in runs {
        for p in &r.curve {
            out.record([
                r.run.to_string(),
                p.n_seen.to_string(),
                number(p.errors.mean, "mean")?,
                number(p.errors.std, "std")?,
            ])?;
        }
    }
    out.finish()
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|source| HarnessError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|e| HarnessError::io(path, e))
}

pub fn save_model(path: &Path, model: &FisModel) -> Result<()> {
    if model.rules.iter().any(|r| {
        r.centers.iter().chain(&r.widths).chain(r.consequents.iter().flatten()).any(|v| !v.is_finite())
    }) {
        return Err(HarnessError::NonFinite("model parameters".into()));
    }
    write_json(path, model)
}

pub fn load_model(path: &Path) -> Result<FisModel> {
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let model: FisModel =
        serde_json::from_reader(std::io::BufReader::new(file)).map_err(|source| HarnessError::Json {
            path: path.to_path_buf(),
            source,
        })?;
    model.validate()?;
    Ok(model)
}
