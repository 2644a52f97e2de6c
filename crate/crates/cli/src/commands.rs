use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use cemaint_core::analysis::{analyze, write_strata_csv};
use cemaint_core::corpus::{adapt_upstream_ratings, load_corpus, load_ratings, write_ratings, Dimension, MaintainabilityRating};
use cemaint_core::entropy::{describe, read_scores, write_scores, ScoreOptions, ScoreRow};
use cemaint_core::features::{binarize, build_features, FeatureSet, LabeledInstance, ScalingMode};
use cemaint_core::lm::{BuiltinModel, LanguageModel, RemoteModel, RetryPolicy, DEFAULT_MAX_INPUT};
use cemaint_core::ml::{cross_validate, fit_logistic, Classifier, CvConfig, EvaluationReport, ForestParams, LogisticFit};
use cemaint_core::scoring::score_corpus;

use crate::args::{AnalyzeArgs, EvaluateArgs, RatingsAdaptArgs, ScoreArgs, StatsArgs};
use crate::config::{parse_or, required, FileConfig, ENDPOINT_ENV};
use crate::join::join;

const DEFAULT_CONCURRENCY: usize = 4;
const DEFAULT_FOLDS: usize = 10;

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

fn opt6(x: Option<f64>) -> String {
    x.map(f6).unwrap_or_default()
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output dir {}", dir.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn score(args: ScoreArgs, cfg: &FileConfig) -> Result<()> {
    let corpus = required(args.corpus, cfg.corpus.clone(), "corpus")?;
    let out = cfg.out(args.out);
    let concurrency = args.concurrency.or(cfg.concurrency).unwrap_or(DEFAULT_CONCURRENCY);
    if concurrency == 0 {
        bail!("--concurrency must be at least 1");
    }
    let prepend_bos = args.prepend_bos || cfg.prepend_bos.unwrap_or(false);
    let mut extensions = if args.extensions.is_empty() { cfg.extensions.clone().unwrap_or_default() } else { args.extensions };
    if extensions.is_empty() {
        extensions.push("java".into());
    }
    let max_input = args.max_input.or(cfg.max_input);

    // A builtin named anywhere beats an endpoint that only comes from the
    // environment.
    let builtin = args.builtin.or_else(|| if args.endpoint.is_some() { None } else { cfg.builtin.clone() });
    let model: Box<dyn LanguageModel> = match builtin {
        Some(desc) => Box::new(BuiltinModel::from_descriptor(&desc, max_input.unwrap_or(DEFAULT_MAX_INPUT))?),
        None => {
            let endpoint = args
                .endpoint
                .or_else(|| cfg.endpoint.clone())
                .or_else(|| std::env::var(ENDPOINT_ENV).ok().filter(|s| !s.is_empty()))
                .ok_or_else(|| anyhow!("no model: pass --builtin or --endpoint (or set {ENDPOINT_ENV})"))?;
            Box::new(RemoteModel::connect(&endpoint, max_input, RetryPolicy::default(), concurrency)?)
        }
    };
    log::info!("scoring {} with {} (max_input {})", corpus.display(), model.spec().model_id, model.spec().max_input);

    let load = load_corpus(&corpus, &extensions)?;
    let run = score_corpus(model.as_ref(), &load, ScoreOptions { prepend_bos }, concurrency);
    prepare_out(&out)?;
    write_json(&out.join("run_report.json"), &run.report)?;
    if run.rows.is_empty() {
        bail!("no scorable files in {} ({} failures)", corpus.display(), run.report.failures.len());
    }
    write_scores(create(&out.join("scores.csv"))?, &run.rows)?;
    eprintln!(
        "scored {} of {} files ({} failures) -> {}",
        run.report.files_scored,
        run.report.files_seen,
        run.report.failures.len(),
        out.join("scores.csv").display()
    );
    Ok(())
}

fn read_score_file(path: &Path) -> Result<Vec<ScoreRow>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_scores(f).with_context(|| format!("reading {}", path.display()))
}

/// Rows grouped per model, models in order of first appearance.
fn scores_by_model(paths: &[PathBuf]) -> Result<Vec<(String, Vec<ScoreRow>)>> {
    let mut groups: Vec<(String, Vec<ScoreRow>)> = Vec::new();
    for p in paths {
        for row in read_score_file(p)? {
            match groups.iter_mut().find(|(m, _)| *m == row.model_id) {
                Some((_, rows)) => rows.push(row),
                None => groups.push((row.model_id.clone(), vec![row])),
            }
        }
    }
    Ok(groups)
}

fn read_ratings(path: &Path) -> Result<Vec<MaintainabilityRating>> {
    let load = load_ratings(path)?;
    for w in &load.warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(load.ratings)
}

/// Joined rows as labeled instances for every dimension; `need` is the
/// minimum number of joined files.
fn joined_instances(
    rows: &[ScoreRow],
    ratings: &[MaintainabilityRating],
    need: usize,
) -> Result<BTreeMap<Dimension, Vec<LabeledInstance>>> {
    let joined = join(rows, ratings);
    if !joined.unmatched_scores.is_empty() || !joined.unmatched_ratings.is_empty() {
        log::warn!(
            "join: {} scored files without ratings {:?}; {} rated files without scores {:?}",
            joined.unmatched_scores.len(),
            joined.unmatched_scores,
            joined.unmatched_ratings.len(),
            joined.unmatched_ratings
        );
    }
    if joined.by_basename > 0 {
        log::info!("join: {} files matched by basename", joined.by_basename);
    }
    if joined.pairs.len() < need {
        bail!("only {} instances joined between scores and ratings; need at least {need}", joined.pairs.len());
    }
    let mut out = BTreeMap::new();
    for dim in Dimension::ALL {
        let instances = joined
            .pairs
            .iter()
            .map(|(s, r)| LabeledInstance::new(s.file.clone(), s.lloc, s.cross_entropy, binarize(r, dim), dim))
            .collect::<Result<Vec<_>, _>>()?;
        out.insert(dim, instances);
    }
    Ok(out)
}

pub fn evaluate(args: EvaluateArgs, cfg: &FileConfig) -> Result<()> {
    let scores_path = required(args.scores, cfg.scores.as_ref().and_then(|v| v.first().cloned()), "scores")?;
    let ratings_path = required(args.ratings, cfg.ratings.clone(), "ratings")?;
    let out = cfg.out(args.out);
    let folds = args.folds.or(cfg.folds).unwrap_or(DEFAULT_FOLDS);
    if folds < 2 {
        bail!("--folds must be at least 2");
    }
    let cv = CvConfig {
        folds,
        shuffle: args.shuffle || cfg.shuffle.unwrap_or(false),
        seed: args.seed.or(cfg.seed).unwrap_or(0),
        scaling: parse_or(args.scaling, cfg.scaling.clone(), ScalingMode::PerFold)?,
        forest: ForestParams { n_trees: args.trees.or(cfg.trees).unwrap_or(100), ..Default::default() },
    };
    let configs: Vec<(Dimension, FeatureSet, Classifier)> = if args.all {
        Dimension::ALL
            .iter()
            .flat_map(|&d| FeatureSet::ALL.iter().flat_map(move |&f| Classifier::ALL.map(|c| (d, f, c))))
            .collect()
    } else {
        vec![(
            parse_or(args.dimension, cfg.dimension.clone(), Dimension::Ov)?,
            parse_or(args.features, cfg.features.clone(), FeatureSet::Both)?,
            parse_or(args.classifier, cfg.classifier.clone(), Classifier::LogReg)?,
        )]
    };

    let mut groups = scores_by_model(&[scores_path])?;
    let model = args.model.or_else(|| cfg.model.clone());
    let rows = match (groups.len(), model) {
        (0, _) => bail!("scores file has no rows"),
        (_, Some(m)) => groups
            .into_iter()
            .find(|(id, _)| *id == m)
            .map(|(_, r)| r)
            .ok_or_else(|| anyhow!("model `{m}` not found in scores"))?,
        (1, None) => groups.remove(0).1,
        (_, None) => bail!(
            "scores hold several models ({}); pick one with --model",
            groups.iter().map(|g| g.0.as_str()).collect::<Vec<_>>().join(", ")
        ),
    };
    let ratings = read_ratings(&ratings_path)?;
    let instances = joined_instances(&rows, &ratings, folds * 2)?;

    let mut reports = Vec::new();
    let mut failed = Vec::new();
    for &(dim, fs, clf) in &configs {
        match cross_validate(&instances[&dim], dim, fs, clf, &cv) {
            Ok(r) => reports.push(r),
            Err(e) => {
                log::error!("{dim}/{fs}/{clf}: {e}");
                failed.push(format!("{dim}/{fs}/{clf}: {e}"));
            }
        }
    }
    if reports.is_empty() {
        bail!("no configuration could be evaluated: {}", failed.join("; "));
    }

    prepare_out(&out)?;
    write_evaluation(&out.join("evaluation.csv"), &reports, folds)?;
    write_coefficients(&out.join("coefficients.csv"), &instances, &configs)?;
    write_label_counts(&out.join("label_counts.csv"), &instances)?;
    eprintln!("{} configurations evaluated -> {}", reports.len(), out.join("evaluation.csv").display());
    if !failed.is_empty() {
        eprintln!("{} configurations failed", failed.len());
    }
    Ok(())
}

pub const EVALUATION_HEADER: [&str; 10] =
    ["dimension", "features", "classifier", "acc", "f1", "mcc", "roc_auc", "folds", "seed", "scaling"];

fn write_evaluation(path: &Path, reports: &[EvaluationReport], folds: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(EVALUATION_HEADER)?;
    for r in reports {
        w.write_record([
            r.dimension.to_string(),
            r.feature_set.to_string(),
            r.classifier.to_string(),
            f6(r.summary.acc),
            f6(r.summary.f1),
            f6(r.summary.mcc),
            opt6(r.summary.roc_auc),
            folds.to_string(),
            r.seed.to_string(),
            r.scaling.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn fit_all(instances: &[LabeledInstance], fs: FeatureSet) -> Result<LogisticFit> {
    let features = build_features(instances, fs.columns(), ScalingMode::Global, &[])?;
    let y: Vec<u8> = instances.iter().map(|i| i.label).collect();
    let names: Vec<&str> = fs.columns().iter().map(|c| c.name()).collect();
    Ok(fit_logistic(&features.values, &y, &names)?)
}

/// Full-data logistic fits (globally standardized) for each logistic
/// configuration: the coefficient table behind the C1 results.
fn write_coefficients(
    path: &Path,
    instances: &BTreeMap<Dimension, Vec<LabeledInstance>>,
    configs: &[(Dimension, FeatureSet, Classifier)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["dimension", "features", "term", "coef", "std_err", "z", "p_value", "ci_low", "ci_high"])?;
    for &(dim, fs, clf) in configs {
        if clf != Classifier::LogReg {
            continue;
        }
        match fit_all(&instances[&dim], fs) {
            Ok(fit) => {
                for e in &fit.estimates {
                    w.write_record([
                        dim.to_string(),
                        fs.to_string(),
                        e.term.clone(),
                        f6(e.coef),
                        f6(e.std_err),
                        f6(e.z),
                        f6(e.p_value),
                        f6(e.ci_low),
                        f6(e.ci_high),
                    ])?;
                }
            }
            Err(e) => log::warn!("coefficients {dim}/{fs}: {e}"),
        }
    }
    w.flush()?;
    Ok(())
}

fn write_label_counts(path: &Path, instances: &BTreeMap<Dimension, Vec<LabeledInstance>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["dimension", "zeros", "ones"])?;
    for dim in Dimension::ALL {
        let ones = instances[&dim].iter().filter(|i| i.label == 1).count();
        w.write_record([dim.to_string(), (instances[&dim].len() - ones).to_string(), ones.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub const STATS_HEADER: [&str; 9] = ["model_id", "n", "min", "max", "range", "mean", "variance", "kurtosis", "skewness"];

pub fn stats(args: StatsArgs, cfg: &FileConfig) -> Result<()> {
    let paths = if args.scores.is_empty() { cfg.scores.clone().unwrap_or_default() } else { args.scores };
    if paths.is_empty() {
        bail!("missing --scores (at least one scores CSV)");
    }
    let out = cfg.out(args.out);
    let groups = scores_by_model(&paths)?;
    if groups.is_empty() {
        bail!("scores files hold no rows");
    }
    prepare_out(&out)?;
    let path = out.join("desc_stats.csv");
    let mut w = csv::Writer::from_writer(create(&path)?);
    w.write_record(STATS_HEADER)?;
    for (model, rows) in &groups {
        let ce: Vec<f64> = rows.iter().map(|r| r.cross_entropy).collect();
        let s = describe(&ce).expect("group is non-empty");
        w.write_record([
            model.clone(),
            s.n.to_string(),
            f6(s.min),
            f6(s.max),
            f6(s.range),
            f6(s.mean),
            opt6(s.variance),
            opt6(s.kurtosis),
            opt6(s.skewness),
        ])?;
    }
    w.flush()?;
    eprintln!("{} models -> {}", groups.len(), path.display());
    Ok(())
}

pub fn analyze_cmd(args: AnalyzeArgs, cfg: &FileConfig) -> Result<()> {
    let paths = if args.scores.is_empty() { cfg.scores.clone().unwrap_or_default() } else { args.scores };
    if paths.is_empty() {
        bail!("missing --scores (at least one scores CSV)");
    }
    let ratings_path = required(args.ratings, cfg.ratings.clone(), "ratings")?;
    let dimension = parse_or(args.dimension, cfg.dimension.clone(), Dimension::Ov)?;
    let out = cfg.out(args.out);
    let ratings = read_ratings(&ratings_path)?;

    let mut models = Vec::new();
    for (model, rows) in scores_by_model(&paths)? {
        let mut per_dim = joined_instances(&rows, &ratings, 4).with_context(|| format!("model {model}"))?;
        models.push((model, per_dim.remove(&dimension).expect("every dimension is built")));
    }
    if models.is_empty() {
        bail!("scores files hold no rows");
    }
    let report = analyze(dimension, &models)?;
    prepare_out(&out)?;
    write_json(&out.join("analysis.json"), &report)?;
    write_strata_csv(create(&out.join("strata.csv"))?, &report)?;
    for (model, r) in &report.reversal {
        if let Some(r) = r {
            eprintln!("{model}: {}", r.narrative);
        }
    }
    Ok(())
}

pub fn ratings_adapt(args: RatingsAdaptArgs, cfg: &FileConfig) -> Result<()> {
    let out = cfg.out(args.out);
    let text = fs::read_to_string(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let load = adapt_upstream_ratings(&text)?;
    for w in &load.warnings {
        log::warn!("{w}");
    }
    prepare_out(&out)?;
    let path = out.join("ratings.csv");
    write_ratings(create(&path)?, &load.ratings)?;
    eprintln!("{} ratings -> {}", load.ratings.len(), path.display());
    Ok(())
}
