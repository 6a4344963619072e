//! Implementations behind the CLI subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use emogan_core::collisions::{filter_collisions, mark_collisions, CollisionParams};
use emogan_core::emotext::{
    vectorize_corpus, EmbeddingProvider, LabeledExample, StubEmbedder, VectorizeStats,
};
use emogan_core::eval::{build_report, score_example, top2, EvalReport};
use emogan_core::gan::{
    generate_dataset2, generator_accuracy, joint_finetune, split_indices, train_discriminator,
    train_generator, Discriminator,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{EmbedderConfig, PipelineConfig, TrainSettings};
use crate::embed::FileEmbedder;
use crate::error::{CliError, Result};
use crate::formats::{
    load_dictionary, load_model, read_corpus, read_dataset, save_model, write_collision_report,
    write_curves, write_dataset, write_dataset2, write_records_jsonl, write_report_json,
    write_text, ClusterReportLine, CollisionReportFile, CurvesFile, ModelFile, ReportFile,
    TrainConfigFile,
};
use crate::report::{render_prediction_table, render_report_text, ForecastRow};
use crate::synth::{self, SyntheticSpec};

/// Where embeddings come from during vectorization or prediction.
#[derive(Debug, Clone)]
pub enum EmbedderSpec {
    Stub { dim: usize, seed: u64 },
    File(PathBuf),
}

impl EmbedderSpec {
    fn build(&self) -> Result<Box<dyn EmbeddingProvider>> {
        match self {
            EmbedderSpec::Stub { dim, seed } => Ok(Box::new(StubEmbedder::new(*dim, *seed)?)),
            EmbedderSpec::File(path) => Ok(Box::new(FileEmbedder::load(path)?)),
        }
    }
}

pub fn cmd_vectorize(
    dictionary: &Path,
    corpus: &Path,
    output: &Path,
    embedder: &EmbedderSpec,
    keep_zero_label: bool,
) -> Result<VectorizeStats> {
    let dict = load_dictionary(dictionary)?;
    let texts = read_corpus(corpus)?;
    let provider = embedder.build()?;
    let (examples, stats) = vectorize_corpus(&texts, &dict, provider.as_ref(), keep_zero_label)?;
    write_dataset(output, &examples, false)?;
    println!(
        "sentences: {}  labelled: {}  dropped: {}  written: {} -> {}",
        stats.sentences,
        stats.labelled,
        stats.dropped,
        examples.len(),
        output.display()
    );
    Ok(stats)
}

pub struct CollisionSummary {
    pub clusters: usize,
    pub flagged_clusters: usize,
    pub flagged_examples: usize,
    pub kept_examples: usize,
}

pub fn cmd_find_collisions(
    input: &Path,
    k: usize,
    tau: f64,
    output_dir: &Path,
) -> Result<CollisionSummary> {
    let params = CollisionParams::new(k, tau)?;
    let mut examples = read_dataset(input)?;
    let stats = mark_collisions(&mut examples, &params)?;
    fs::create_dir_all(output_dir).map_err(|e| CliError::io(output_dir, e))?;

    let flagged_examples = examples.iter().filter(|e| e.collision).count();
    let kept = filter_collisions(&examples);
    write_dataset(&output_dir.join("flagged.jsonl"), &examples, true)?;
    write_dataset(&output_dir.join("filtered.jsonl"), &kept, false)?;
    let report = CollisionReportFile {
        k,
        tau,
        examples: examples.len(),
        flagged_examples,
        clusters: stats
            .iter()
            .map(|s| ClusterReportLine {
                id: s.id,
                size: s.size,
                class_sums: s.class_sums.to_vec(),
                mean: s.mean,
                z: s.z,
                collision: s.collision,
            })
            .collect(),
    };
    write_collision_report(&output_dir.join("collision_report.json"), &report)?;

    let summary = CollisionSummary {
        clusters: stats.len(),
        flagged_clusters: stats.iter().filter(|s| s.collision).count(),
        flagged_examples,
        kept_examples: kept.len(),
    };
    println!(
        "clusters: {}  flagged clusters: {}  flagged examples: {}  kept: {}",
        summary.clusters, summary.flagged_clusters, summary.flagged_examples, summary.kept_examples
    );
    Ok(summary)
}

#[derive(Debug, Clone, Copy)]
pub struct TrainOptions {
    pub seed: u64,
    pub generator: TrainSettings,
    pub discriminator: TrainSettings,
    pub split_fraction: f64,
    pub finetune_rounds: usize,
}

impl TrainOptions {
    pub fn new(seed: u64) -> TrainOptions {
        TrainOptions {
            seed,
            generator: TrainSettings::generator_defaults(),
            discriminator: TrainSettings::discriminator_defaults(),
            split_fraction: 0.7,
            finetune_rounds: 0,
        }
    }
}

/// Score a discriminator over labelled examples. Examples whose gold
/// label has 0 or more than 2 active classes fall outside the golden
/// protocol and are skipped (their count is returned).
pub fn evaluate_examples(
    disc: &Discriminator,
    examples: &[LabeledExample],
) -> Result<(EvalReport, usize)> {
    let mut records = Vec::new();
    let mut skipped = 0usize;
    for example in examples {
        if !(1..=2).contains(&example.emotions.active_count()) {
            skipped += 1;
            continue;
        }
        let output = disc.forward(&example.embedding)?;
        records.push(score_example(
            output.forecast,
            example.emotions.clone(),
            example.text.clone(),
        )?);
    }
    if records.is_empty() {
        return Err(CliError::Data(
            "no examples with 1 or 2 gold classes to evaluate".into(),
        ));
    }
    Ok((build_report(records)?, skipped))
}

fn write_evaluation(output_dir: &Path, report: &EvalReport) -> Result<()> {
    write_report_json(
        &output_dir.join("report.json"),
        &ReportFile::from_report(report),
    )?;
    write_text(&output_dir.join("report.txt"), &render_report_text(report))?;
    write_records_jsonl(&output_dir.join("records.jsonl"), &report.records)
}

pub struct TrainSummary {
    pub dim: usize,
    pub train_examples: usize,
    pub eval_examples: usize,
    pub eval_skipped: usize,
    pub mean_accuracy: f64,
    pub top2_hit_rate: f64,
}

pub fn cmd_train(input: &Path, output_dir: &Path, opts: &TrainOptions) -> Result<TrainSummary> {
    let dataset = read_dataset(input)?;
    if dataset.is_empty() {
        return Err(CliError::Data(format!(
            "{}: dataset is empty",
            input.display()
        )));
    }
    let dim = dataset[0].embedding.len();
    fs::create_dir_all(output_dir).map_err(|e| CliError::io(output_dir, e))?;

    // hold out the golden evaluation split before any training
    let mut split_rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let (train_idx, eval_idx) = split_indices(dataset.len(), opts.split_fraction, &mut split_rng)?;
    if train_idx.is_empty() || eval_idx.is_empty() {
        return Err(CliError::Data(format!(
            "{}: dataset too small for a {:.2} split",
            input.display(),
            opts.split_fraction
        )));
    }
    let train_set: Vec<LabeledExample> = train_idx.iter().map(|i| dataset[*i].clone()).collect();
    let eval_set: Vec<LabeledExample> = eval_idx.iter().map(|i| dataset[*i].clone()).collect();

    let gen_cfg = opts.generator.to_train_config(
        opts.seed.wrapping_add(1),
        opts.split_fraction,
        opts.finetune_rounds,
    );
    let (mut gen, generator_curve) = train_generator(&train_set, dim, &gen_cfg)?;
    let train_score = generator_accuracy(&gen, &train_set, 0.9)?;
    let eval_score = generator_accuracy(&gen, &eval_set, 0.9)?;
    println!(
        "generator: train acc {:.2} (mean cos {:.3}), held-out acc {:.2} (mean cos {:.3})",
        train_score.accuracy, train_score.mean_cosine, eval_score.accuracy, eval_score.mean_cosine
    );

    let disc_cfg = opts.discriminator.to_train_config(
        opts.seed.wrapping_add(2),
        opts.split_fraction,
        opts.finetune_rounds,
    );
    let mut dataset2 = generate_dataset2(&gen);
    let mut disc = Discriminator::fm_initialized(&dataset2, disc_cfg.adam);
    let disc_curves = train_discriminator(&mut disc, &dataset2, &disc_cfg)?;
    let mut curves = CurvesFile {
        generator: generator_curve,
        discriminator_train: disc_curves.train,
        discriminator_test: disc_curves.test,
    };

    if opts.finetune_rounds > 0 {
        let outcome = joint_finetune(
            &mut gen,
            &mut disc,
            &train_set,
            &gen_cfg,
            &disc_cfg,
            opts.finetune_rounds,
        )?;
        curves.generator.extend(outcome.generator);
        for round in outcome.discriminator {
            curves.discriminator_train.extend(round.train);
            curves.discriminator_test.extend(round.test);
        }
        if let Some(last) = outcome.last_dataset2 {
            dataset2 = last;
        }
    }

    write_dataset2(&output_dir.join("dataset2.jsonl"), &dataset2)?;
    write_curves(&output_dir.join("curves.json"), &curves)?;

    let (report, skipped) = evaluate_examples(&disc, &eval_set)?;
    let model = ModelFile::from_models(
        &gen,
        &disc,
        opts.seed,
        TrainConfigFile {
            generator: opts.generator,
            discriminator: opts.discriminator,
            split_fraction: opts.split_fraction,
            finetune_rounds: opts.finetune_rounds,
        },
    );
    save_model(&output_dir.join("model.json"), &model)?;
    write_evaluation(output_dir, &report)?;

    println!(
        "evaluated {} held-out examples ({} outside the 1-2 class protocol skipped)",
        report.records.len(),
        skipped
    );
    print!("{}", render_report_text(&report));
    Ok(TrainSummary {
        dim,
        train_examples: train_set.len(),
        eval_examples: report.records.len(),
        eval_skipped: skipped,
        mean_accuracy: report.mean_accuracy,
        top2_hit_rate: report.overall_top2_hit_rate,
    })
}

pub fn cmd_evaluate(model_path: &Path, input: &Path, output_dir: &Path) -> Result<EvalReport> {
    let model = load_model(model_path)?;
    let (_, disc) = model.to_models()?;
    let examples = read_dataset(input)?;
    for (index, example) in examples.iter().enumerate() {
        if example.embedding.len() != model.dim {
            return Err(CliError::Data(format!(
                "{} line {}: embedding dimension {} does not match model D={}",
                input.display(),
                index + 1,
                example.embedding.len(),
                model.dim
            )));
        }
    }
    fs::create_dir_all(output_dir).map_err(|e| CliError::io(output_dir, e))?;
    let (report, skipped) = evaluate_examples(&disc, &examples)?;
    write_evaluation(output_dir, &report)?;
    println!(
        "evaluated {} examples ({} outside the 1-2 class protocol skipped)",
        report.records.len(),
        skipped
    );
    print!("{}", render_report_text(&report));
    Ok(report)
}

#[derive(Deserialize)]
struct PredictLine {
    #[serde(default)]
    text: Option<String>,
    #[serde(default)]
    embedding: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct ForecastLine {
    #[serde(skip_serializing_if = "Option::is_none")]
    text: Option<String>,
    forecast: Vec<f64>,
    top2: [usize; 2],
}

/// Embedding source for `predict` text inputs; the stub derives its
/// dimension from the model.
#[derive(Debug, Clone)]
pub enum PredictEmbedder {
    Stub { seed: u64 },
    File(PathBuf),
}

pub fn cmd_predict(
    model_path: &Path,
    input: &Path,
    output: Option<&Path>,
    table: bool,
    embedder: Option<&PredictEmbedder>,
) -> Result<()> {
    let model = load_model(model_path)?;
    let (_, disc) = model.to_models()?;
    let provider = embedder
        .map(|e| match e {
            PredictEmbedder::Stub { seed } => EmbedderSpec::Stub {
                dim: model.dim,
                seed: *seed,
            }
            .build(),
            PredictEmbedder::File(path) => EmbedderSpec::File(path.clone()).build(),
        })
        .transpose()?;

    let text = fs::read_to_string(input).map_err(|e| CliError::io(input, e))?;
    let mut rows = Vec::new();
    for (index, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let number = index + 1;
        let parsed: PredictLine = serde_json::from_str(line)
            .map_err(|e| CliError::Data(format!("{} line {number}: {e}", input.display())))?;
        let embedding = match (parsed.embedding, &parsed.text) {
            (Some(embedding), _) => embedding,
            (None, Some(text)) => match &provider {
                Some(provider) => provider.embed(text)?,
                None => {
                    return Err(CliError::Usage(format!(
                        "{} line {number}: text input needs --embeddings or --embed-seed",
                        input.display()
                    )))
                }
            },
            (None, None) => {
                return Err(CliError::Data(format!(
                    "{} line {number}: each line needs \"embedding\" or \"text\"",
                    input.display()
                )))
            }
        };
        if embedding.len() != model.dim {
            return Err(CliError::Data(format!(
                "{} line {number}: embedding dimension {} does not match model D={}",
                input.display(),
                embedding.len(),
                model.dim
            )));
        }
        let out = disc.forward(&embedding)?;
        let pred = top2(&out.forecast);
        rows.push(ForecastRow {
            text: parsed.text,
            forecast: *out.forecast.values(),
            top2: [pred.first, pred.second],
        });
    }

    let lines: Vec<String> = rows
        .iter()
        .map(|row| {
            serde_json::to_string(&ForecastLine {
                text: row.text.clone(),
                forecast: row.forecast.to_vec(),
                top2: row.top2,
            })
            .expect("forecast serializes")
        })
        .collect();
    match output {
        Some(path) => {
            let mut joined = lines.join("\n");
            if !joined.is_empty() {
                joined.push('\n');
            }
            fs::write(path, joined).map_err(|e| CliError::io(path, e))?;
        }
        None => {
            for line in &lines {
                println!("{line}");
            }
        }
    }
    if table {
        print!("{}", render_prediction_table(&rows));
    }
    Ok(())
}

pub fn cmd_synth(spec: &SyntheticSpec, output: &Path) -> Result<usize> {
    let examples = synth::generate(spec)?;
    write_dataset(output, &examples, false)?;
    println!(
        "synthesized {} examples ({} combos × {}) -> {}",
        examples.len(),
        spec.combos.len(),
        spec.examples_per_combo,
        output.display()
    );
    Ok(examples.len())
}

/// vectorize → find-collisions → train (with the held-out evaluation).
pub fn cmd_pipeline(cfg: &PipelineConfig) -> Result<TrainSummary> {
    let seed = cfg.require_seed()?;
    let dictionary = cfg.require_path("dictionary", &cfg.dictionary)?;
    let corpus = cfg.require_path("corpus", &cfg.corpus)?;
    let output_dir = cfg.require_path("output_dir", &cfg.output_dir)?;
    fs::create_dir_all(&output_dir).map_err(|e| CliError::io(&output_dir, e))?;

    let embedder = match &cfg.embedder {
        EmbedderConfig::Stub => EmbedderSpec::Stub {
            dim: cfg.dim(),
            seed,
        },
        EmbedderConfig::File { path } => EmbedderSpec::File(path.clone()),
    };
    let dataset_path = output_dir.join("dataset.jsonl");
    cmd_vectorize(
        &dictionary,
        &corpus,
        &dataset_path,
        &embedder,
        cfg.keep_zero_label,
    )?;
    cmd_find_collisions(
        &dataset_path,
        cfg.collision.k,
        cfg.collision.tau,
        &output_dir,
    )?;
    let opts = TrainOptions {
        seed,
        generator: cfg.generator.resolve(TrainSettings::generator_defaults()),
        discriminator: cfg
            .discriminator
            .resolve(TrainSettings::discriminator_defaults()),
        split_fraction: cfg.split_fraction(),
        finetune_rounds: cfg.finetune_rounds(),
    };
    cmd_train(&output_dir.join("filtered.jsonl"), &output_dir, &opts)
}
