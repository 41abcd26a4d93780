use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ara_core::corpus::{load_corpus, Corpus, LanguageCode};
use ara_core::experiments::{CellSelector, CellStatus, ExperimentConfig, ExperimentReport};
use ara_core::features::{
    assemble, load_embeddings, FeatureMatrix, FeatureOptions, ReferenceProfiles, CROSSNGO_ORDERS,
    REFERENCE_LANGUAGES,
};
use ara_core::forest::{cross_validate_with, evaluate, train_with, ForestConfig, ForestModel};
use ara_core::intelligibility::{distance_report, AlignedWordlist};
use ara_core::ngram::{build_profile_from, overlap_matrix, NgramProfile};
use ara_core::par::Execution;
use ara_core::{Error, Result};
use serde_json::{json, Value};

use crate::cli::{CompareArgs, EvalArgs, FeaturesArgs, ForestArgs, GeneticArgs, MatrixArgs, ProfileArgs, TrainArgs};

/// What a command prints: text for people, a JSON object for `--json`.
pub struct Output {
    pub text: String,
    pub json: Value,
}

pub struct Globals {
    pub seed: Option<u64>,
    pub execution: Execution,
}

fn check_fraction(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must lie in (0, 1], got {v}")))
    }
}

fn load_all(paths: &[PathBuf]) -> Result<Vec<Corpus>> {
    let corpora: Vec<Corpus> = paths.iter().map(|p| load_corpus(p)).collect::<Result<_>>()?;
    for (i, c) in corpora.iter().enumerate() {
        if corpora[..i].iter().any(|o| o.language == c.language) {
            return Err(Error::InvalidParameter(format!("language {} given twice", c.language)));
        }
    }
    Ok(corpora)
}

fn profile_path(dir: &Path, lang: &LanguageCode, n: usize) -> PathBuf {
    dir.join(format!("{lang}.n{n}.tsv"))
}

fn forest_config(args: &ForestArgs, g: &Globals) -> Result<ForestConfig> {
    let cfg = ForestConfig {
        num_trees: args.trees,
        bag_fraction: args.bag_fraction,
        max_depth: args.max_depth,
        num_features: args.num_features,
        seed: g.seed.unwrap_or(1),
        ..ForestConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn profile(args: &ProfileArgs, g: &Globals) -> Result<Output> {
    check_fraction("--top", args.top_fraction)?;
    check_fraction("--p", args.p)?;
    let corpora = load_all(&args.corpora)?;
    let profiles = corpora
        .iter()
        .map(|c| {
            let docs: Vec<_> = c.documents.iter().collect();
            build_profile_from(&c.language, &docs, args.n, args.top_fraction, g.execution)
        })
        .collect::<Result<Vec<NgramProfile>>>()?;
    let matrix = overlap_matrix(&profiles, args.p)?;

    let mut written = BTreeMap::new();
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        for p in &profiles {
            let path = profile_path(dir, &p.language, p.n);
            fs::write(&path, p.to_tsv())?;
            written.insert(p.language.to_string(), path.display().to_string());
        }
        let path = dir.join(format!("overlap.n{}.tsv", args.n));
        fs::write(&path, matrix.to_tsv())?;
        written.insert("overlap".into(), path.display().to_string());
    }

    let summary: Vec<Value> = profiles
        .iter()
        .map(|p| {
            json!({
                "language": p.language,
                "kept_types": p.entries.len(),
                "path": written.get(p.language.as_str()),
            })
        })
        .collect();
    Ok(Output {
        text: matrix.to_tsv(),
        json: json!({
            "command": "profile",
            "n": args.n,
            "top_fraction": args.top_fraction,
            "p": args.p,
            "profiles": summary,
            "matrix": matrix,
            "matrix_path": written.get("overlap"),
        }),
    })
}

pub fn genetic(args: &GeneticArgs) -> Result<Output> {
    let wl = AlignedWordlist::read(&args.wordlist, args.skip_incomplete)?;
    if wl.languages.len() < 2 {
        return Err(Error::InvalidParameter("wordlist needs at least two language columns".into()));
    }
    if wl.concepts.is_empty() {
        return Err(Error::InvalidParameter("wordlist has no complete concept".into()));
    }
    let report = distance_report(&wl)?;
    let mut text = report.to_tsv();
    let _ = writeln!(text, "# {} concepts", report.concepts);
    Ok(Output {
        text,
        json: json!({
            "command": "genetic",
            "concepts": report.concepts,
            "pairs": report.pairs,
        }),
    })
}

fn reference_profiles(args: &FeaturesArgs, corpora: &[Corpus], g: &Globals) -> Result<ReferenceProfiles> {
    if let Some(dir) = &args.profiles {
        let mut loaded = Vec::new();
        for n in CROSSNGO_ORDERS {
            for lang in REFERENCE_LANGUAGES {
                loaded.push(NgramProfile::read(&profile_path(dir, &LanguageCode::new(lang)?, n))?);
            }
        }
        return ReferenceProfiles::from_profiles(loaded);
    }
    if args.reference.is_empty() {
        ReferenceProfiles::from_corpora(corpora, args.top_fraction, g.execution)
    } else {
        ReferenceProfiles::from_corpora(&load_all(&args.reference)?, args.top_fraction, g.execution)
    }
}

pub fn features(args: &FeaturesArgs, g: &Globals) -> Result<Output> {
    check_fraction("--top", args.top_fraction)?;
    let corpora = load_all(&args.corpora)?;
    let set = args.feature_set;
    let profiles = if set.uses(ara_core::features::FeatureGroup::CrossNgo) {
        Some(reference_profiles(args, &corpora, g)?)
    } else {
        None
    };
    let embeddings = args.embeddings.as_deref().map(load_embeddings).transpose()?;
    let opts = FeatureOptions {
        plain_orthography: args.plain.iter().map(|s| LanguageCode::new(s)).collect::<Result<_>>()?,
        execution: g.execution,
    };
    let matrix = assemble(&corpora, set, profiles.as_ref(), embeddings.as_ref(), &opts)?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    matrix.write(&args.out)?;
    let schema_path = FeatureMatrix::sidecar_path(&args.out);
    Ok(Output {
        text: format!(
            "wrote {} rows x {} features ({set}) to {}\nschema {}\n",
            matrix.len(),
            matrix.schema.len(),
            args.out.display(),
            schema_path.display()
        ),
        json: json!({
            "command": "features",
            "feature_set": set,
            "output": args.out.display().to_string(),
            "schema": schema_path.display().to_string(),
            "rows": matrix.len(),
            "columns": matrix.schema.len(),
            "fingerprint": matrix.schema.fingerprint(),
        }),
    })
}

pub fn train(args: &TrainArgs, g: &Globals) -> Result<Output> {
    let cfg = forest_config(&args.forest, g)?;
    let matrix = FeatureMatrix::read(&args.features)?;
    let model = train_with(&matrix, &cfg, g.execution)?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(&args.out, model.to_json()?)?;
    let classes: Vec<u8> = model.class_labels.iter().map(|l| l.level()).collect();
    Ok(Output {
        text: format!(
            "trained {} trees on {} rows ({} features, {} per split), seed {}\nmodel {}\n",
            model.trees.len(),
            matrix.len(),
            model.num_features,
            model.features_per_split,
            cfg.seed,
            args.out.display()
        ),
        json: json!({
            "command": "train",
            "model": args.out.display().to_string(),
            "rows": matrix.len(),
            "trees": model.trees.len(),
            "features": model.num_features,
            "features_per_split": model.features_per_split,
            "classes": classes,
            "seed": cfg.seed,
            "fingerprint": model.schema_fingerprint,
        }),
    })
}

pub fn eval(args: &EvalArgs, g: &Globals) -> Result<Output> {
    let matrix = FeatureMatrix::read(&args.features)?;
    let (mode, result) = match (&args.model, args.cv) {
        (Some(path), _) => {
            if !path.is_file() {
                return Err(Error::MissingFile(path.clone()));
            }
            let model = ForestModel::from_json(&fs::read_to_string(path)?)?;
            model.check_schema(&matrix.schema)?;
            ("holdout", evaluate(&model, &matrix, g.execution)?)
        }
        (None, Some(k)) => {
            let cfg = forest_config(&args.forest, g)?;
            ("cv", cross_validate_with(&matrix, &cfg, k, g.seed.unwrap_or(1), g.execution)?)
        }
        (None, None) => return Err(Error::InvalidParameter("give --model or --cv".into())),
    };
    Ok(Output {
        text: result.to_text(),
        json: json!({
            "command": "eval",
            "mode": mode,
            "folds": args.cv,
            "result": result,
        }),
    })
}

pub fn matrix(args: &MatrixArgs, g: &Globals) -> Result<Output> {
    let mut cfg = ExperimentConfig::read(&args.config)?;
    if let Some(seed) = g.seed {
        cfg.forest.seed = seed;
        cfg.grid.fold_seed = seed;
    }
    if let Some(folds) = args.folds {
        cfg.grid.folds = folds;
    }
    if let Some(trees) = args.trees {
        cfg.forest.num_trees = trees;
    }
    let loaded = cfg.load(g.execution)?;
    let report = loaded.run()?;
    let table = report.to_table();
    if let Some(out) = &args.out {
        fs::write(out, report.to_json()?)?;
    }
    if let Some(path) = &args.table {
        fs::write(path, &table)?;
    }

    let count = |f: fn(&CellStatus) -> bool| report.cells.iter().filter(|c| f(&c.status)).count();
    let completed = count(|s| matches!(s, CellStatus::Completed { .. }));
    let skipped = count(|s| matches!(s, CellStatus::Skipped { .. }));
    let failed = count(|s| matches!(s, CellStatus::Failed { .. }));
    let mut text = table;
    let _ = writeln!(text, "# {completed} completed, {skipped} skipped, {failed} failed");
    let mut skip_reasons: BTreeMap<&str, usize> = BTreeMap::new();
    for cell in &report.cells {
        match &cell.status {
            CellStatus::Failed { error } => {
                let _ = writeln!(text, "# failed {} -> {} {}: {error}", cell.train_label(), cell.test_language, cell.feature_set);
            }
            CellStatus::Skipped { reason } => *skip_reasons.entry(reason).or_default() += 1,
            CellStatus::Completed { .. } => {}
        }
    }
    for (reason, n) in skip_reasons {
        let _ = writeln!(text, "# {n} skipped: {reason}");
    }
    Ok(Output {
        text,
        json: json!({
            "command": "matrix",
            "output": args.out.as_ref().map(|p| p.display().to_string()),
            "completed": completed,
            "skipped": skipped,
            "failed": failed,
            "report": report,
        }),
    })
}

pub fn compare(args: &CompareArgs) -> Result<Output> {
    if !args.report.is_file() {
        return Err(Error::MissingFile(args.report.clone()));
    }
    let report = ExperimentReport::from_json(&fs::read_to_string(&args.report)?)?;
    let a: CellSelector = args.a.parse()?;
    let b: CellSelector = args.b.parse()?;
    let cmp = report.compare_groups(&a, &b, args.kind.into())?;
    let text = format!(
        "{:?} t-test\na: {} (n = {})\nb: {} (n = {})\nmean difference\t{:.4}\nt\t{:.4}\ndf\t{:.2}\np (two-tailed)\t{:.4}\n",
        cmp.test.kind, cmp.group_a, cmp.n_a, cmp.group_b, cmp.n_b, cmp.test.mean_difference, cmp.test.t, cmp.test.df, cmp.test.p_two_tailed
    );
    Ok(Output {
        text,
        json: json!({
            "command": "compare",
            "comparison": cmp,
        }),
    })
}
