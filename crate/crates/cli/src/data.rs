use std::path::Path;

use affinity_core::{Dataset, Observation, Provenance};

use crate::error::CliError;

/// Header names of the outcome, disease indicator and optional covariate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMap {
    pub y: String,
    pub d: String,
    pub x: Option<String>,
}

fn parse_cell(raw: &str, row: usize, column: &str) -> Result<f64, CliError> {
    let v: f64 = raw.trim().parse().map_err(|_| {
        CliError::Data(format!(
            "row {row}, column '{column}': '{raw}' is not a number"
        ))
    })?;
    if !v.is_finite() {
        return Err(CliError::Data(format!(
            "row {row}, column '{column}': non-finite value '{raw}'"
        )));
    }
    Ok(v)
}

/// Reads a headed UTF-8 CSV. Row numbers in errors count data rows from 1.
pub fn parse_dataset_from_reader<R: std::io::Read>(
    reader: R,
    source: &str,
    cols: &ColumnMap,
) -> Result<Dataset, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Data(format!("{source}: cannot read header: {e}")))?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Data(format!("{source}: missing column '{name}'")))
    };
    let iy = find(&cols.y)?;
    let id = find(&cols.d)?;
    let ix = cols.x.as_deref().map(find).transpose()?;

    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let row = k + 1;
        let rec = rec.map_err(|e| CliError::Data(format!("{source}: row {row}: {e}")))?;
        let cell = |i: usize| rec.get(i).unwrap_or("");
        let y = parse_cell(cell(iy), row, &cols.y)?;
        let diseased = match cell(id).trim() {
            "1" => true,
            "0" => false,
            other => {
                return Err(CliError::Data(format!(
                    "row {row}, column '{}': disease indicator must be 0 or 1, got '{other}'",
                    cols.d
                )))
            }
        };
        let x = match ix {
            Some(i) if !cell(i).trim().is_empty() => {
                Some(parse_cell(cell(i), row, cols.x.as_deref().unwrap_or("x"))?)
            }
            _ => None,
        };
        rows.push(Observation { y, diseased, x });
    }
    let provenance = Provenance {
        source: source.to_string(),
        y_col: cols.y.clone(),
        d_col: cols.d.clone(),
        x_col: cols.x.clone(),
    };
    let data = Dataset::new(rows, provenance)?;
    log::info!(
        "{source}: {} diseased, {} non-diseased rows",
        data.arm_count(true),
        data.arm_count(false)
    );
    Ok(data)
}

pub fn parse_dataset(path: &Path, cols: &ColumnMap) -> Result<Dataset, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_dataset_from_reader(file, &path.display().to_string(), cols)
}
