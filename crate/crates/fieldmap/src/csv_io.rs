//! Field-map CSV format.
//!
//! ```text
//! x_m,y_m,z_m,cell_vol_m3,region,ex,ey,ez,hx,hy,hz
//! ```
//!
//! `region` is `sample`, `vacuum`, or `dielectric:<eps_r>`.  Lines starting
//! with `#` are comments; the writer uses them to embed the run digest.

use std::io::Write as _;
use std::path::Path;

use crate::types::{FieldCell, FieldMap, FieldMapError, Region};

pub const HEADER: [&str; 11] = [
    "x_m", "y_m", "z_m", "cell_vol_m3", "region", "ex", "ey", "ez", "hx", "hy", "hz",
];

fn csv_err(e: csv::Error) -> FieldMapError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => FieldMapError::Io(io),
        other => FieldMapError::Csv {
            line,
            message: format!("{other:?}"),
        },
    }
}

fn parse_region(token: &str, line: u64) -> Result<Region, FieldMapError> {
    match token {
        "sample" => Ok(Region::Sample),
        "vacuum" => Ok(Region::Vacuum),
        _ => {
            if let Some(eps) = token.strip_prefix("dielectric:") {
                let eps_r: f64 = eps.parse().map_err(|_| FieldMapError::Csv {
                    line,
                    message: format!("invalid permittivity {eps:?} in region token"),
                })?;
                Ok(Region::Dielectric { eps_r })
            } else {
                Err(FieldMapError::Csv {
                    line,
                    message: format!(
                        "unknown region {token:?}; expected sample, vacuum or dielectric:<eps_r>"
                    ),
                })
            }
        }
    }
}

fn region_token(region: &Region) -> String {
    match region {
        Region::Sample => "sample".to_string(),
        Region::Vacuum => "vacuum".to_string(),
        Region::Dielectric { eps_r } => format!("dielectric:{eps_r}"),
    }
}

/// Reads the cell list of a map; the cavity frequency and sample
/// permittivity travel outside the file.
pub fn read_cells(path: &Path) -> Result<Vec<FieldCell>, FieldMapError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;

    {
        let headers = reader.headers().map_err(|e| FieldMapError::Csv {
            line: 1,
            message: e.to_string(),
        })?;
        let got: Vec<&str> = headers.iter().collect();
        if got != HEADER {
            return Err(FieldMapError::Csv {
                line: 1,
                message: format!("unexpected header {got:?}; expected {HEADER:?}"),
            });
        }
    }

    let mut cells = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != HEADER.len() {
            return Err(FieldMapError::Csv {
                line,
                message: format!("expected {} fields, got {}", HEADER.len(), record.len()),
            });
        }
        let num = |idx: usize| -> Result<f64, FieldMapError> {
            record[idx].parse().map_err(|_| FieldMapError::Csv {
                line,
                message: format!("invalid number {:?} in column {}", &record[idx], HEADER[idx]),
            })
        };
        cells.push(FieldCell {
            position_m: [num(0)?, num(1)?, num(2)?],
            volume_m3: num(3)?,
            region: parse_region(&record[4], line)?,
            e_field: [num(5)?, num(6)?, num(7)?],
            h_field: [num(8)?, num(9)?, num(10)?],
        });
    }
    Ok(cells)
}

/// Serializes a map to CSV, prefixed by the given `#` comment lines.
pub fn write_map(map: &FieldMap, comments: &[String], out: &mut Vec<u8>) {
    for comment in comments {
        writeln!(out, "# {comment}").expect("writing to memory cannot fail");
    }
    writeln!(out, "{}", HEADER.join(",")).expect("writing to memory cannot fail");
    for cell in &map.cells {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            cell.position_m[0],
            cell.position_m[1],
            cell.position_m[2],
            cell.volume_m3,
            region_token(&cell.region),
            cell.e_field[0],
            cell.e_field[1],
            cell.e_field[2],
            cell.h_field[0],
            cell.h_field[1],
            cell.h_field[2],
        )
        .expect("writing to memory cannot fail");
    }
}
