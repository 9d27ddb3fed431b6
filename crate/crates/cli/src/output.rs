//! CSV and manifest writers.

use std::io::Write;

use twomode_core::{Channel, ObservableSeries, TimeGrid};

use crate::CliError;

/// Lossless scientific notation (17 significant digits).
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// One named column of a CSV file.
pub struct Column<'a> {
    pub name: String,
    pub values: &'a [f64],
}

/// Channels grouped per output file.
pub const OCCUPATION_CHANNELS: [Channel; 4] = [Channel::NX, Channel::NY, Channel::Q, Channel::D];
pub const ENTROPY_CHANNELS: [Channel; 4] = [Channel::SX, Channel::SY, Channel::NuX, Channel::MuX];
pub const ENERGY_CHANNELS: [Channel; 6] = [
    Channel::EX,
    Channel::EY,
    Channel::EInt,
    Channel::ETot,
    Channel::PhiX,
    Channel::PhiY,
];

/// `<engine>_<channel>` columns for every selected channel an engine produced.
pub fn columns<'a>(
    runs: &[(&str, &'a ObservableSeries)],
    group: &[Channel],
    selected: impl Fn(Channel) -> bool,
) -> Vec<Column<'a>> {
    let mut out = Vec::new();
    for (engine, series) in runs {
        for &channel in group {
            if !selected(channel) {
                continue;
            }
            if let Some(values) = series.get(channel) {
                out.push(Column {
                    name: format!("{engine}_{channel}"),
                    values,
                });
            }
        }
    }
    out
}

pub fn write_series_csv<W: Write>(writer: W, grid: &TimeGrid, columns: &[Column<'_>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["time".to_string()];
    header.extend(columns.iter().map(|c| c.name.clone()));
    w.write_record(&header)?;
    for i in 0..grid.len() {
        let mut row = Vec::with_capacity(columns.len() + 1);
        row.push(format_value(grid.time(i)));
        row.extend(columns.iter().map(|c| format_value(c.values[i])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Time, then `P_0 … P_{n_cut−1}`.
pub fn write_heatmap_csv<W: Write>(writer: W, series: &ObservableSeries) -> Result<(), CliError> {
    let Some(hm) = series.heatmap() else {
        return Ok(());
    };
    let grid = series.grid();
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["time".to_string()];
    header.extend((0..hm.ncols()).map(|n| format!("p_{n}")));
    w.write_record(&header)?;
    for i in 0..hm.nrows() {
        let mut row = vec![format_value(grid.time(i))];
        row.extend(hm.row(i).iter().map(|&v| format_value(v)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Parsed numeric CSV: header names after `time`, the time column and the
/// data columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub names: Vec<String>,
    pub time: Vec<f64>,
    pub columns: Vec<Vec<f64>>,
}

pub fn read_csv<R: std::io::Read>(reader: R) -> Result<CsvTable, CliError> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    if headers.len() < 2 {
        return Err(CliError::Input(
            "expected a time column and at least one data column".into(),
        ));
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut time = Vec::new();
    let mut columns = vec![Vec::new(); names.len()];
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let mut values = record.iter().map(|field| {
            field
                .trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("row {}: `{field}` is not a number", line + 2)))
        });
        time.push(values.next().transpose()?.unwrap_or(f64::NAN));
        for col in columns.iter_mut() {
            col.push(values.next().transpose()?.unwrap_or(f64::NAN));
        }
    }
    if time.is_empty() {
        return Err(CliError::Input("no data rows".into()));
    }
    Ok(CsvTable { names, time, columns })
}
