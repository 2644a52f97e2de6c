use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{CrossEntropyResult, EntropyError};

pub const SCORES_HEADER: [&str; 7] = [
    "file",
    "model_id",
    "lloc",
    "total_targets",
    "n_chunks",
    "cross_entropy",
    "perplexity",
];

/// One line of the scores CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub file: String,
    pub model_id: String,
    pub lloc: usize,
    pub total_targets: usize,
    pub n_chunks: usize,
    pub cross_entropy: f64,
    pub perplexity: f64,
}

impl ScoreRow {
    pub fn from_result(result: &CrossEntropyResult, lloc: usize) -> Self {
        ScoreRow {
            file: result.file_id.clone(),
            model_id: result.model_id.clone(),
            lloc,
            total_targets: result.total_targets,
            n_chunks: result.chunks.len(),
            cross_entropy: result.ce,
            perplexity: result.perplexity,
        }
    }
}

/// Writes rows sorted by file path, floats at 6 decimals.
pub fn write_scores<W: Write>(writer: W, rows: &[ScoreRow]) -> Result<(), EntropyError> {
    let mut sorted: Vec<&ScoreRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.file.cmp(&b.file).then_with(|| a.model_id.cmp(&b.model_id)));
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SCORES_HEADER)?;
    for r in sorted {
        w.write_record([
            r.file.clone(),
            r.model_id.clone(),
            r.lloc.to_string(),
            r.total_targets.to_string(),
            r.n_chunks.to_string(),
            format!("{:.6}", r.cross_entropy),
            format!("{:.6}", r.perplexity),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_scores<R: Read>(reader: R) -> Result<Vec<ScoreRow>, EntropyError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    for col in SCORES_HEADER {
        if !headers.iter().any(|h| h == col) {
            return Err(EntropyError::Format {
                row: 1,
                message: format!("missing column `{col}`"),
            });
        }
    }
    let mut rows = Vec::new();
    for rec in rdr.deserialize::<ScoreRow>() {
        rows.push(rec?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(file: &str, ce: f64) -> ScoreRow {
        ScoreRow {
            file: file.into(),
            model_id: "m".into(),
            lloc: 3,
            total_targets: 10,
            n_chunks: 1,
            cross_entropy: ce,
            perplexity: ce.exp(),
        }
    }

    #[test]
    fn sorted_fixed_precision_output() {
        let mut buf = Vec::new();
        write_scores(&mut buf, &[row("b/B.java", 1.0), row("a/A.java", 256f64.ln())]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "file,model_id,lloc,total_targets,n_chunks,cross_entropy,perplexity");
        assert_eq!(lines[1], "a/A.java,m,3,10,1,5.545177,256.000000");
        assert_eq!(lines[2], "b/B.java,m,3,10,1,1.000000,2.718282");
    }

    #[test]
    fn reads_back() {
        let mut buf = Vec::new();
        write_scores(&mut buf, &[row("A.java", 1.25)]).unwrap();
        let rows = read_scores(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].cross_entropy, 1.25);
    }

    #[test]
    fn missing_column_is_reported() {
        let err = read_scores("file,model_id\nA,m\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("lloc"));
    }
}
