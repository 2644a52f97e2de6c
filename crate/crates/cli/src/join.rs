//! Pairs score rows with ratings by file id, falling back to a unique
//! basename match when the ids differ only by directory.

use std::collections::{BTreeMap, HashMap};

use cemaint_core::corpus::MaintainabilityRating;
use cemaint_core::entropy::ScoreRow;

#[derive(Debug, Default)]
pub struct Joined<'a> {
    /// In ratings order (the dataset order used for fold assignment).
    pub pairs: Vec<(&'a ScoreRow, &'a MaintainabilityRating)>,
    pub by_basename: usize,
    pub unmatched_scores: Vec<String>,
    pub unmatched_ratings: Vec<String>,
}

fn basename(id: &str) -> &str {
    id.rsplit(['/', '\\']).next().unwrap_or(id)
}

fn unique_by_basename<'a, T>(items: impl Iterator<Item = (&'a str, T)>) -> HashMap<&'a str, Option<T>> {
    let mut map: HashMap<&str, Option<T>> = HashMap::new();
    for (id, v) in items {
        map.entry(basename(id)).and_modify(|e| *e = None).or_insert(Some(v));
    }
    map
}

pub fn join<'a>(scores: &'a [ScoreRow], ratings: &'a [MaintainabilityRating]) -> Joined<'a> {
    let exact: HashMap<&str, &ScoreRow> = scores.iter().map(|s| (s.file.as_str(), s)).collect();
    let mut matched: Vec<Option<&ScoreRow>> = ratings.iter().map(|r| exact.get(r.file_id.as_str()).copied()).collect();

    let used: std::collections::HashSet<&str> = matched.iter().flatten().map(|s| s.file.as_str()).collect();
    let free_scores = unique_by_basename(scores.iter().filter(|s| !used.contains(s.file.as_str())).map(|s| (s.file.as_str(), s)));
    let free_ratings = unique_by_basename(
        ratings.iter().enumerate().filter(|(i, _)| matched[*i].is_none()).map(|(i, r)| (r.file_id.as_str(), i)),
    );
    let mut by_basename = 0;
    for (base, idx) in &free_ratings {
        if let (Some(i), Some(Some(s))) = (idx, free_scores.get(base)) {
            matched[*i] = Some(*s);
            by_basename += 1;
        }
    }

    let mut joined = Joined { by_basename, ..Default::default() };
    let mut taken = BTreeMap::new();
    for (r, m) in ratings.iter().zip(&matched) {
        match m {
            Some(s) => {
                taken.insert(s.file.as_str(), ());
                joined.pairs.push((s, r));
            }
            None => joined.unmatched_ratings.push(r.file_id.clone()),
        }
    }
    joined.unmatched_scores = scores.iter().filter(|s| !taken.contains_key(s.file.as_str())).map(|s| s.file.clone()).collect();
    joined
}

#[cfg(test)]
mod tests {
    use super::*;
    use cemaint_core::corpus::Likert;

    fn score(file: &str) -> ScoreRow {
        ScoreRow {
            file: file.into(),
            model_id: "m".into(),
            lloc: 3,
            total_targets: 9,
            n_chunks: 1,
            cross_entropy: 1.0,
            perplexity: 1f64.exp(),
        }
    }

    fn rating(file: &str) -> MaintainabilityRating {
        MaintainabilityRating::new(file, [Likert::new(0.25, 0.25, 0.25, 0.25); 5])
    }

    #[test]
    fn exact_then_unique_basename() {
        let scores = [score("src/a/A.java"), score("src/B.java"), score("x/C.java"), score("y/C.java"), score("D.java")];
        let ratings = [rating("B.java"), rating("src/a/A.java"), rating("C.java"), rating("E.java")];
        let j = join(&scores, &ratings);
        let files: Vec<_> = j.pairs.iter().map(|(s, r)| (s.file.as_str(), r.file_id.as_str())).collect();
        assert_eq!(files, [("src/B.java", "B.java"), ("src/a/A.java", "src/a/A.java")]);
        assert_eq!(j.by_basename, 1);
        assert_eq!(j.unmatched_ratings, ["C.java", "E.java"]);
        assert_eq!(j.unmatched_scores, ["x/C.java", "y/C.java", "D.java"]);
    }
}
