//! Ridge extraction: reduce a transmission map to per-branch peak tracks.
//!
//! Peaks are selected by topographic prominence — height above the higher
//! of the two flanking valleys, measured out to the nearest higher column
//! value — which makes the extraction invariant under any uniform dB offset
//! of the map and robust against broad shoulders.  Surviving peaks are
//! refined to sub-bin accuracy with a three-point parabola and linked
//! across field columns by nearest-frequency continuation.

use std::io::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::map::SpectralMap;

#[derive(Debug, Error)]
pub enum RidgeError {
    #[error("minimum prominence must be positive, got {0} dB")]
    NonPositiveProminence(f64),
    #[error("max_branches must be at least 1")]
    NoBranchesRequested,
    #[error("within branch {branch_id} fields must strictly ascend (point {index})")]
    NonAscendingBranch { branch_id: usize, index: usize },
    #[error("csv line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One extracted peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgePoint {
    pub b_t: f64,
    pub freq_ghz: f64,
    pub branch_id: usize,
    /// Fit weight; the extractor stores the peak prominence in dB.
    pub weight: f64,
}

/// Ridge points grouped by branch, fields ascending within each branch.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RidgeSet {
    pub points: Vec<RidgePoint>,
}

impl RidgeSet {
    pub fn new(mut points: Vec<RidgePoint>) -> Result<Self, RidgeError> {
        points.sort_by(|a, b| {
            (a.branch_id, a.b_t)
                .partial_cmp(&(b.branch_id, b.b_t))
                .expect("ridge fields are finite")
        });
        let mut last: Option<(usize, f64)> = None;
        for (index, p) in points.iter().enumerate() {
            if let Some((branch, b)) = last {
                if branch == p.branch_id && !(p.b_t > b) {
                    return Err(RidgeError::NonAscendingBranch {
                        branch_id: branch,
                        index,
                    });
                }
            }
            last = Some((p.branch_id, p.b_t));
        }
        Ok(Self { points })
    }

    pub fn branch_count(&self) -> usize {
        self.points
            .iter()
            .map(|p| p.branch_id + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn branch(&self, id: usize) -> impl Iterator<Item = &RidgePoint> {
        self.points.iter().filter(move |p| p.branch_id == id)
    }
}

/// Extraction settings.
#[derive(Debug, Clone, Copy)]
pub struct ExtractConfig {
    /// Minimum topographic prominence for a peak to count, dB.
    pub min_prominence_db: f64,
    /// Keep at most this many peaks per field column.
    pub max_branches: usize,
    /// Branches with fewer points are dropped as fragments.
    pub min_branch_points: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self {
            min_prominence_db: 6.0,
            max_branches: 2,
            min_branch_points: 5,
        }
    }
}

/// Interior local maxima with plateau tolerance: runs of equal values
/// flanked by strictly lower neighbours peak at their middle index.
fn local_maxima(y: &[f64]) -> Vec<usize> {
    let n = y.len();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if y[i] > y[i - 1] {
            // scan over a possible plateau
            let start = i;
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[j] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] < y[j] {
                peaks.push((start + j) / 2);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

/// Topographic prominence of the peak at `i`: height above the higher of
/// the two valley minima, each measured out to the nearest column value
/// exceeding the peak (or the map edge).
fn prominence(y: &[f64], i: usize) -> f64 {
    let peak = y[i];
    let mut left_min = f64::INFINITY;
    for j in (0..i).rev() {
        if y[j] > peak {
            break;
        }
        left_min = left_min.min(y[j]);
    }
    let mut right_min = f64::INFINITY;
    for value in y.iter().skip(i + 1) {
        if *value > peak {
            break;
        }
        right_min = right_min.min(*value);
    }
    // a peak at the global maximum keeps its lowest surrounding valley
    let key_saddle = match (left_min.is_finite(), right_min.is_finite()) {
        (true, true) => left_min.max(right_min),
        (true, false) => left_min,
        (false, true) => right_min,
        (false, false) => f64::NEG_INFINITY,
    };
    peak - key_saddle
}

/// Three-point parabolic vertex through `(x0,y0),(x1,y1),(x2,y2)`, clamped
/// to `[x0, x2]`; falls back to `x1` when the points are collinear.
fn parabolic_vertex(x0: f64, y0: f64, x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    let d01 = x1 - x0;
    let d12 = x2 - x1;
    let s01 = (y1 - y0) / d01;
    let s12 = (y2 - y1) / d12;
    let curvature = (s12 - s01) / (x2 - x0);
    if curvature >= 0.0 || !curvature.is_finite() {
        return x1;
    }
    let vertex = 0.5 * (x0 + x1 - s01 / curvature);
    vertex.clamp(x0, x2)
}

/// Extracts weighted ridge tracks from a map.
///
/// Branch ids are assigned by order of appearance after sorting branches by
/// their first field column, then first frequency; within each branch the
/// fields strictly ascend.
pub fn extract_ridges(map: &SpectralMap, config: &ExtractConfig) -> Result<RidgeSet, RidgeError> {
    if !(config.min_prominence_db > 0.0) {
        return Err(RidgeError::NonPositiveProminence(config.min_prominence_db));
    }
    if config.max_branches == 0 {
        return Err(RidgeError::NoBranchesRequested);
    }

    // branches under construction: (points, frequency of the last point)
    let mut branches: Vec<(Vec<RidgePoint>, f64)> = Vec::new();

    for (bi, row) in map.magnitude_db.iter().enumerate() {
        let b = map.b_grid_t[bi];

        // candidate peaks of this column, strongest first
        let mut candidates: Vec<(f64, f64)> = local_maxima(row)
            .into_iter()
            .filter_map(|i| {
                let p = prominence(row, i);
                if p >= config.min_prominence_db {
                    let f = parabolic_vertex(
                        map.f_grid_ghz[i - 1],
                        row[i - 1],
                        map.f_grid_ghz[i],
                        row[i],
                        map.f_grid_ghz[i + 1],
                        row[i + 1],
                    );
                    Some((f, p))
                } else {
                    None
                }
            })
            .collect();
        candidates.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("prominence is finite"));
        candidates.truncate(config.max_branches);

        // greedy nearest-frequency assignment of peaks to live branches
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (pi, (f, _)) in candidates.iter().enumerate() {
            for (ki, (_, last_f)) in branches.iter().enumerate() {
                pairs.push(((f - last_f).abs(), pi, ki));
            }
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("distances are finite"));
        let mut peak_taken = vec![false; candidates.len()];
        let mut branch_taken = vec![false; branches.len()];
        for (_, pi, ki) in pairs {
            if peak_taken[pi] || branch_taken[ki] {
                continue;
            }
            peak_taken[pi] = true;
            branch_taken[ki] = true;
            let (f, p) = candidates[pi];
            branches[ki].0.push(RidgePoint {
                b_t: b,
                freq_ghz: f,
                branch_id: 0,
                weight: p,
            });
            branches[ki].1 = f;
        }
        for (pi, (f, p)) in candidates.iter().enumerate() {
            if !peak_taken[pi] {
                branches.push((
                    vec![RidgePoint {
                        b_t: b,
                        freq_ghz: *f,
                        branch_id: 0,
                        weight: *p,
                    }],
                    *f,
                ));
            }
        }
    }

    let mut tracks: Vec<Vec<RidgePoint>> = branches
        .into_iter()
        .map(|(points, _)| points)
        .filter(|points| points.len() >= config.min_branch_points)
        .collect();
    tracks.sort_by(|a, b| {
        (a[0].b_t, a[0].freq_ghz)
            .partial_cmp(&(b[0].b_t, b[0].freq_ghz))
            .expect("ridge coordinates are finite")
    });
    let mut points = Vec::new();
    for (id, track) in tracks.into_iter().enumerate() {
        for mut p in track {
            p.branch_id = id;
            points.push(p);
        }
    }
    RidgeSet::new(points)
}

pub const RIDGE_HEADER: [&str; 4] = ["b_tesla", "branch_id", "freq_ghz", "weight"];

/// Serializes a ridge set, prefixed by the given `#` comment lines.
pub fn write_ridges(ridges: &RidgeSet, comments: &[String], out: &mut Vec<u8>) {
    for comment in comments {
        writeln!(out, "# {comment}").expect("writing to memory cannot fail");
    }
    writeln!(out, "{}", RIDGE_HEADER.join(",")).expect("writing to memory cannot fail");
    for p in &ridges.points {
        writeln!(out, "{},{},{},{}", p.b_t, p.branch_id, p.freq_ghz, p.weight)
            .expect("writing to memory cannot fail");
    }
}

fn csv_err(e: csv::Error) -> RidgeError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => RidgeError::Io(io),
        other => RidgeError::Csv {
            line,
            message: format!("{other:?}"),
        },
    }
}

/// Reads a ridge CSV.  The `weight` column may be omitted; missing weights
/// default to 1.
pub fn read_ridges(path: &Path) -> Result<RidgeSet, RidgeError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let has_weight = {
        let headers = reader.headers().map_err(|e| RidgeError::Csv {
            line: 1,
            message: e.to_string(),
        })?;
        let got: Vec<&str> = headers.iter().collect();
        if got == RIDGE_HEADER {
            true
        } else if got == RIDGE_HEADER[..3] {
            false
        } else {
            return Err(RidgeError::Csv {
                line: 1,
                message: format!(
                    "unexpected header {got:?}; expected {RIDGE_HEADER:?} (weight optional)"
                ),
            });
        }
    };

    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        let expected = if has_weight { 4 } else { 3 };
        if record.len() != expected {
            return Err(RidgeError::Csv {
                line,
                message: format!("expected {expected} fields, got {}", record.len()),
            });
        }
        let num = |idx: usize| -> Result<f64, RidgeError> {
            record[idx].parse().map_err(|_| RidgeError::Csv {
                line,
                message: format!(
                    "invalid number {:?} in column {}",
                    &record[idx], RIDGE_HEADER[idx]
                ),
            })
        };
        let branch_id: usize = record[1].parse().map_err(|_| RidgeError::Csv {
            line,
            message: format!("invalid branch id {:?}", &record[1]),
        })?;
        points.push(RidgePoint {
            b_t: num(0)?,
            freq_ghz: num(2)?,
            branch_id,
            weight: if has_weight { num(3)? } else { 1.0 },
        });
    }
    RidgeSet::new(points)
}
