//! Dataset CSV: header `x0,...,x{d-1},y`, labels `-1`/`1`, LF line endings,
//! floats written with 17 significant digits so they parse back bit-exact.

use std::io::{BufRead, Write};

use super::{Dataset, LabeledSample};
use crate::error::{Error, Result};
use crate::geometry::{Instance, Label};

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(dataset: &Dataset, mut out: W) -> Result<()> {
    let d = dataset.dim();
    let mut header: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
    header.push("y".into());
    out.write_all(header.join(",").as_bytes())?;
    out.write_all(b"\n")?;
    let mut line = String::new();
    for s in dataset.iter() {
        line.clear();
        for c in s.x.iter() {
            line.push_str(&fmt_f64(*c));
            line.push(',');
        }
        line.push_str(&s.y.as_i8().to_string());
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: BufRead>(input: R) -> Result<Dataset> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("missing header".into()))??;
    let cols: Vec<&str> = header.split(',').collect();
    let d = cols.len().saturating_sub(1);
    let expected: Vec<String> = (0..d).map(|i| format!("x{i}")).chain(["y".to_string()]).collect();
    if d == 0 || cols != expected {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let mut samples = Vec::new();
    for (row, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 1 {
            return Err(Error::Parse(format!("row {}: expected {} fields", row + 1, d + 1)));
        }
        let coords = fields[..d]
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| Error::Parse(format!("row {}: {e}", row + 1))))
            .collect::<Result<Vec<_>>>()?;
        let y = fields[d]
            .parse::<i8>()
            .ok()
            .and_then(Label::from_i8)
            .ok_or_else(|| Error::Parse(format!("row {}: bad label {:?}", row + 1, fields[d])))?;
        samples.push(LabeledSample::new(Instance::new(coords)?, y));
    }
    Dataset::new(d, samples)
}
