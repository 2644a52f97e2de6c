//! Expert maintainability ratings: one Likert probability vector per file and
//! dimension.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CorpusError;

pub const RATINGS_HEADER: [&str; 21] = [
    "file", "ov_sa", "ov_wa", "ov_wd", "ov_sd", "rd_sa", "rd_wa", "rd_wd", "rd_sd", "ud_sa",
    "ud_wa", "ud_wd", "ud_sd", "cx_sa", "cx_wa", "cx_wd", "cx_sd", "md_sa", "md_wa", "md_wd",
    "md_sd",
];

const SUM_LOW: f64 = 0.98;
const SUM_HIGH: f64 = 1.02;

/// Maintainability aspects rated by the experts. Complexity and modularity are
/// phrased negatively ("this code is complex").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Ov,
    Rd,
    Ud,
    Cx,
    Md,
}

impl Dimension {
    pub const ALL: [Dimension; 5] = [
        Dimension::Ov,
        Dimension::Rd,
        Dimension::Ud,
        Dimension::Cx,
        Dimension::Md,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Dimension::Ov => "ov",
            Dimension::Rd => "rd",
            Dimension::Ud => "ud",
            Dimension::Cx => "cx",
            Dimension::Md => "md",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    /// True for the negatively phrased statements.
    pub fn is_negative(self) -> bool {
        matches!(self, Dimension::Cx | Dimension::Md)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Dimension {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ov" | "overall" => Ok(Dimension::Ov),
            "rd" | "readability" => Ok(Dimension::Rd),
            "ud" | "understandability" => Ok(Dimension::Ud),
            "cx" | "complexity" => Ok(Dimension::Cx),
            "md" | "modularity" => Ok(Dimension::Md),
            other => Err(format!("unknown dimension `{other}` (expected ov|rd|ud|cx|md)")),
        }
    }
}

/// P(strongly agree), P(weakly agree), P(weakly disagree), P(strongly disagree).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Likert {
    pub sa: f64,
    pub wa: f64,
    pub wd: f64,
    pub sd: f64,
}

impl Likert {
    pub fn new(sa: f64, wa: f64, wd: f64, sd: f64) -> Self {
        Likert { sa, wa, wd, sd }
    }

    pub fn sum(&self) -> f64 {
        self.sa + self.wa + self.wd + self.sd
    }

    fn values(&self) -> [f64; 4] {
        [self.sa, self.wa, self.wd, self.sd]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaintainabilityRating {
    pub file_id: String,
    dims: [Likert; 5],
}

impl MaintainabilityRating {
    pub fn new(file_id: impl Into<String>, dims: [Likert; 5]) -> Self {
        MaintainabilityRating {
            file_id: file_id.into(),
            dims,
        }
    }

    pub fn get(&self, dim: Dimension) -> Likert {
        self.dims[dim.index()]
    }
}

#[derive(Debug, Default)]
pub struct RatingsLoad {
    pub ratings: Vec<MaintainabilityRating>,
    pub warnings: Vec<String>,
}

pub fn load_ratings(path: &Path) -> Result<RatingsLoad, CorpusError> {
    let file = std::fs::File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_ratings(file)
}

/// Parses the canonical ratings CSV. Columns are located by header name.
pub fn parse_ratings<R: Read>(reader: R) -> Result<RatingsLoad, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut load = RatingsLoad::default();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        load.warnings.push("no rows".to_string());
        return Ok(load);
    }

    let mut positions = [0usize; 21];
    for (slot, name) in positions.iter_mut().zip(RATINGS_HEADER) {
        *slot = headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| CorpusError::MissingColumn(name.to_string()))?;
    }

    let mut seen: HashMap<String, usize> = HashMap::new();
    for record in rdr.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let field = |col: usize| -> Result<&str, CorpusError> {
            record.get(positions[col]).ok_or_else(|| CorpusError::Ratings {
                row,
                column: RATINGS_HEADER[col].to_string(),
                message: "missing value".to_string(),
            })
        };
        let file_id = field(0)?.to_string();
        if file_id.is_empty() {
            return Err(CorpusError::Ratings {
                row,
                column: "file".into(),
                message: "empty file id".into(),
            });
        }
        if let Some(&first) = seen.get(&file_id) {
            return Err(CorpusError::DuplicateFile {
                file: file_id,
                row,
                first,
            });
        }
        seen.insert(file_id.clone(), row);

        let mut probs = [0.0f64; 20];
        for (k, p) in probs.iter_mut().enumerate() {
            let col = k + 1;
            let raw = field(col)?;
            let v: f64 = raw.parse().map_err(|_| CorpusError::Ratings {
                row,
                column: RATINGS_HEADER[col].to_string(),
                message: format!("`{raw}` is not a number"),
            })?;
            if !(0.0..=1.0).contains(&v) {
                return Err(CorpusError::Ratings {
                    row,
                    column: RATINGS_HEADER[col].to_string(),
                    message: format!("probability {v} outside [0, 1]"),
                });
            }
            *p = v;
        }
        let mut dims = [Likert::default(); 5];
        for (d, likert) in dims.iter_mut().enumerate() {
            let b = d * 4;
            *likert = Likert::new(probs[b], probs[b + 1], probs[b + 2], probs[b + 3]);
            let sum = likert.sum();
            if !(SUM_LOW..=SUM_HIGH).contains(&sum) {
                load.warnings.push(format!(
                    "row {row} ({file_id}): {} probabilities sum to {sum:.4}",
                    Dimension::ALL[d]
                ));
            }
        }
        load.ratings.push(MaintainabilityRating::new(file_id, dims));
    }
    if load.ratings.is_empty() {
        load.warnings.push("no rows".to_string());
    }
    for w in &load.warnings {
        log::warn!("ratings: {w}");
    }
    Ok(load)
}

pub fn write_ratings<W: Write>(writer: W, ratings: &[MaintainabilityRating]) -> Result<(), CorpusError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RATINGS_HEADER)?;
    for r in ratings {
        let mut rec = vec![r.file_id.clone()];
        for d in Dimension::ALL {
            rec.extend(r.get(d).values().iter().map(|v| v.to_string()));
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| CorpusError::Csv(e.into()))?;
    Ok(())
}

fn squash(header: &str) -> String {
    header
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

fn match_dimension(h: &str) -> Option<Dimension> {
    const LONG: [(&str, Dimension); 8] = [
        ("overall", Dimension::Ov),
        ("maintainability", Dimension::Ov),
        ("readability", Dimension::Rd),
        ("understandability", Dimension::Ud),
        ("complexity", Dimension::Cx),
        ("modularity", Dimension::Md),
        ("modularisation", Dimension::Md),
        ("modularization", Dimension::Md),
    ];
    if let Some((_, d)) = LONG.iter().find(|(name, _)| h.contains(name)) {
        return Some(*d);
    }
    Dimension::ALL.into_iter().find(|d| h.starts_with(d.code()))
}

fn match_category(h: &str) -> Option<usize> {
    const LONG: [(&str, usize); 4] = [
        ("stronglydisagree", 3),
        ("weaklydisagree", 2),
        ("stronglyagree", 0),
        ("weaklyagree", 1),
    ];
    if let Some((_, c)) = LONG.iter().find(|(name, _)| h.contains(name)) {
        return Some(*c);
    }
    ["sa", "wa", "wd", "sd"].iter().position(|code| h.ends_with(code))
}

/// Maps a ratings table in a foreign wide layout onto the canonical one.
///
/// Headers are matched loosely: case and punctuation are ignored, dimensions
/// may be spelled out ("Readability") or abbreviated ("rd"), and answer
/// categories likewise ("strongly agree" or "sa"). Semicolon-delimited files
/// with decimal commas are accepted.
pub fn adapt_upstream_ratings(text: &str) -> Result<RatingsLoad, CorpusError> {
    let first_line = text.lines().next().unwrap_or_default();
    let semicolon = first_line.matches(';').count() > first_line.matches(',').count();
    let delimiter = if semicolon { b';' } else { b',' };
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();

    const FILE_ALIASES: [&str; 8] = [
        "file", "filename", "filepath", "path", "class", "classname", "name", "id",
    ];
    let squashed: Vec<String> = headers.iter().map(squash).collect();
    let file_col = FILE_ALIASES
        .iter()
        .find_map(|alias| squashed.iter().position(|h| h == alias))
        .ok_or_else(|| CorpusError::MissingColumn("file".into()))?;

    let mut slots: [[Option<usize>; 4]; 5] = [[None; 4]; 5];
    for (col, h) in squashed.iter().enumerate() {
        if col == file_col {
            continue;
        }
        if let (Some(d), Some(c)) = (match_dimension(h), match_category(h)) {
            slots[d.index()][c].get_or_insert(col);
        }
    }
    for d in Dimension::ALL {
        for (c, cat) in ["sa", "wa", "wd", "sd"].iter().enumerate() {
            if slots[d.index()][c].is_none() {
                return Err(CorpusError::MissingColumn(format!("{}_{cat}", d.code())));
            }
        }
    }

    let mut canonical = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut canonical);
        w.write_record(RATINGS_HEADER)?;
        for record in rdr.records() {
            let record = record?;
            let mut out = vec![record.get(file_col).unwrap_or_default().to_string()];
            for d in Dimension::ALL {
                for col in slots[d.index()].iter().flatten() {
                    let v = record.get(*col).unwrap_or_default();
                    out.push(if semicolon { v.replace(',', ".") } else { v.to_string() });
                }
            }
            w.write_record(&out)?;
        }
        w.flush().map_err(|e| CorpusError::Csv(e.into()))?;
    }
    parse_ratings(canonical.as_slice())
}
