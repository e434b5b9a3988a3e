use std::io::{Read, Write};
use std::path::Path;

use super::config::OutputFormat;
use super::run::ResultRow;
use crate::{Error, Result};

pub const CSV_HEADER: [&str; 10] = [
    "snr_db",
    "k_db",
    "scheme",
    "selection",
    "user",
    "rate_exact",
    "rate_approx",
    "mc_stderr",
    "comparisons",
    "discarded_drops",
];

/// Renders `x` with 10 significant digits; plain notation for moderate
/// magnitudes, exponent notation otherwise.
pub fn format_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // rounding may carry into a new digit, e.g. 9.9999999999 -> 10.000000000
        let digits = s.chars().filter(char::is_ascii_digit).collect::<String>();
        let significant = digits.trim_start_matches('0').len();
        if significant > 10 && decimals > 0 {
            let d = decimals - 1;
            return format!("{x:.d$}");
        }
        s
    } else {
        format!("{x:.9e}")
    }
}

fn selection_field(sel: &[usize]) -> String {
    sel.iter().map(usize::to_string).collect::<Vec<_>>().join(";")
}

fn record(row: &ResultRow) -> [String; 10] {
    [
        format_float(row.snr_db),
        format_float(row.k_db),
        row.scheme.clone(),
        selection_field(&row.selection),
        row.user.to_string(),
        format_float(row.rate_exact),
        format_float(row.rate_approx),
        format_float(row.mc_stderr),
        row.comparisons.to_string(),
        row.discarded_drops.to_string(),
    ]
}

fn csv_error(e: csv::Error) -> Error {
    Error::Serialize(e.to_string())
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for row in rows {
        w.write_record(record(row)).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::Serialize(e.to_string()))
}

pub fn to_csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

/// JSON array of objects keyed by the CSV header; numbers use the same
/// 10-digit rendering as the CSV.
pub fn to_json_string(rows: &[ResultRow]) -> String {
    let mut s = String::from("[");
    for (i, row) in rows.iter().enumerate() {
        s.push_str(if i == 0 { "\n  {" } else { ",\n  {" });
        let fields = record(row);
        for (j, (name, value)) in CSV_HEADER.iter().zip(fields).enumerate() {
            if j > 0 {
                s.push_str(", ");
            }
            let quoted = matches!(*name, "scheme" | "selection");
            let value = if quoted {
                serde_json::to_string(&value).expect("string serializes")
            } else {
                value
            };
            s.push_str(&format!("\"{name}\": {value}"));
        }
        s.push('}');
    }
    s.push_str(if rows.is_empty() { "]\n" } else { "\n]\n" });
    s
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = rec.get(i).ok_or_else(|| Error::Serialize(format!("missing column {}", CSV_HEADER[i])))?;
    raw.parse()
        .map_err(|e| Error::Serialize(format!("column {}: `{raw}`: {e}", CSV_HEADER[i])))
}

/// Parses CSV produced by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_error)?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Serialize(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_error)?;
        let sel = rec.get(3).unwrap_or("");
        let selection = if sel.is_empty() {
            Vec::new()
        } else {
            sel.split(';')
                .map(|t| t.parse::<usize>().map_err(|e| Error::Serialize(format!("selection `{sel}`: {e}"))))
                .collect::<Result<_>>()?
        };
        rows.push(ResultRow {
            snr_db: parse_field(&rec, 0)?,
            k_db: parse_field(&rec, 1)?,
            scheme: parse_field(&rec, 2)?,
            selection,
            user: parse_field(&rec, 4)?,
            rate_exact: parse_field(&rec, 5)?,
            rate_approx: parse_field(&rec, 6)?,
            mc_stderr: parse_field(&rec, 7)?,
            comparisons: parse_field(&rec, 8)?,
            discarded_drops: parse_field(&rec, 9)?,
        });
    }
    Ok(rows)
}

/// Writes the rows to `path`. The file appears only once fully written.
pub fn emit(rows: &[ResultRow], format: OutputFormat, path: &Path) -> Result<()> {
    let body = match format {
        OutputFormat::Csv => to_csv_string(rows),
        OutputFormat::Json => to_json_string(rows),
    };
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut tmp_name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    let written = std::fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(body.as_bytes()).and_then(|_| f.sync_all()))
        .and_then(|_| std::fs::rename(&tmp, path));
    if let Err(e) = written {
        let _ = std::fs::remove_file(&tmp);
        return Err(io_err(e));
    }
    Ok(())
}
