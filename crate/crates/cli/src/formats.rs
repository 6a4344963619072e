//! File formats: JSON-lines corpora and datasets, the emoticon
//! dictionary, model persistence, loss curves, and evaluation reports.
//! Write → read → write is byte-identical for every format here.

use std::fs;
use std::io::Write;
use std::path::Path;

use emogan_core::emotext::{EmoticonDictionary, EmotionVector, LabeledExample, EMOTION_COUNT};
use emogan_core::eval::{EvalRecord, EvalReport, Top2};
use emogan_core::gan::{Dataset2, Discriminator, Generator, LinearLayer};
use emogan_core::mathkit::{AdamParams, Matrix};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::TrainSettings;
use crate::error::{CliError, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

fn parse_line<T: DeserializeOwned>(path: &Path, number: usize, line: &str) -> Result<T> {
    serde_json::from_str(line)
        .map_err(|e| CliError::Data(format!("{} line {number}: {e}", path.display())))
}

fn read_lines<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut out = Vec::new();
    for (index, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push((index + 1, parse_line(path, index + 1, line)?));
    }
    Ok(out)
}

fn write_lines<T: Serialize>(path: &Path, items: impl IntoIterator<Item = T>) -> Result<()> {
    let mut buffer = Vec::new();
    for item in items {
        serde_json::to_writer(&mut buffer, &item)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        buffer.push(b'\n');
    }
    fs::write(path, buffer).map_err(|e| CliError::io(path, e))
}

fn write_pretty_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

// ---------------------------------------------------------------------
// dictionary
// ---------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DictionaryFile {
    fear: Vec<String>,
    sadness: Vec<String>,
    anger: Vec<String>,
    disgust: Vec<String>,
    calm: Vec<String>,
    happiness: Vec<String>,
    surprise: Vec<String>,
}

/// Load the 7-class emoticon dictionary. A missing class or an emoticon
/// listed under two classes is an error.
pub fn load_dictionary(path: &Path) -> Result<EmoticonDictionary> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file: DictionaryFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let classes = [
        file.fear,
        file.sadness,
        file.anger,
        file.disgust,
        file.calm,
        file.happiness,
        file.surprise,
    ];
    EmoticonDictionary::new(classes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------
// corpus
// ---------------------------------------------------------------------

#[derive(Deserialize)]
struct CorpusLine {
    text: String,
}

/// JSON-lines corpus, one `{"text": ...}` object per line.
pub fn read_corpus(path: &Path) -> Result<Vec<String>> {
    Ok(read_lines::<CorpusLine>(path)?
        .into_iter()
        .map(|(_, line)| line.text)
        .collect())
}

// ---------------------------------------------------------------------
// labelled datasets
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DatasetLine {
    embedding: Vec<f64>,
    emotions: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    collision: Option<bool>,
}

fn emotions_from_bits(path: &Path, number: usize, bits: &[u8]) -> Result<EmotionVector> {
    if bits.len() != EMOTION_COUNT {
        return Err(CliError::Data(format!(
            "{} line {number}: expected 7 emotion values, got {}",
            path.display(),
            bits.len()
        )));
    }
    if bits.iter().any(|b| *b > 1) {
        return Err(CliError::Data(format!(
            "{} line {number}: emotion values must be 0 or 1",
            path.display()
        )));
    }
    let mut values = [0.0; EMOTION_COUNT];
    for (v, b) in values.iter_mut().zip(bits) {
        *v = f64::from(*b);
    }
    Ok(EmotionVector::new(values))
}

fn emotions_to_bits(emotions: &EmotionVector) -> Vec<u8> {
    emotions.values().iter().map(|v| (*v > 0.0) as u8).collect()
}

/// JSON-lines dataset of labelled examples. Enforces a uniform embedding
/// dimension and finite values.
pub fn read_dataset(path: &Path) -> Result<Vec<LabeledExample>> {
    let lines = read_lines::<DatasetLine>(path)?;
    let mut examples = Vec::with_capacity(lines.len());
    let mut dim = None;
    for (number, line) in lines {
        let expected = *dim.get_or_insert(line.embedding.len());
        if line.embedding.len() != expected {
            return Err(CliError::Data(format!(
                "{} line {number}: embedding dimension {} differs from {}",
                path.display(),
                line.embedding.len(),
                expected
            )));
        }
        if line.embedding.is_empty() || !line.embedding.iter().all(|x| x.is_finite()) {
            return Err(CliError::Data(format!(
                "{} line {number}: embedding must be non-empty and finite",
                path.display()
            )));
        }
        let emotions = emotions_from_bits(path, number, &line.emotions)?;
        examples.push(LabeledExample {
            embedding: line.embedding,
            emotions,
            text: line.text,
            collision: line.collision.unwrap_or(false),
        });
    }
    Ok(examples)
}

/// Write a dataset; collision flags are emitted only when `with_flags`.
pub fn write_dataset(path: &Path, examples: &[LabeledExample], with_flags: bool) -> Result<()> {
    write_lines(
        path,
        examples.iter().map(|example| DatasetLine {
            embedding: example.embedding.clone(),
            emotions: emotions_to_bits(&example.emotions),
            text: example.text.clone(),
            collision: with_flags.then_some(example.collision),
        }),
    )
}

// ---------------------------------------------------------------------
// balanced dataset (one line per emotion combination)
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct Dataset2Line {
    emotions: Vec<u8>,
    embedding: Vec<f64>,
}

pub fn write_dataset2(path: &Path, dataset2: &Dataset2) -> Result<()> {
    write_lines(
        path,
        dataset2.pairs().iter().map(|(v1, v2)| Dataset2Line {
            emotions: emotions_to_bits(v1),
            embedding: v2.clone(),
        }),
    )
}

pub fn read_dataset2(path: &Path) -> Result<Dataset2> {
    let lines = read_lines::<Dataset2Line>(path)?;
    let mut pairs = Vec::with_capacity(lines.len());
    for (number, line) in lines {
        let emotions = emotions_from_bits(path, number, &line.emotions)?;
        pairs.push((emotions, line.embedding));
    }
    Dataset2::from_pairs(pairs).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------
// model persistence
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct GeneratorWeights {
    #[serde(rename = "W1")]
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    #[serde(rename = "W2")]
    pub w2: Vec<Vec<f64>>,
    pub b2: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
pub struct DiscriminatorWeights {
    pub prototypes: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
pub struct TrainConfigFile {
    pub generator: TrainSettings,
    pub discriminator: TrainSettings,
    pub split_fraction: f64,
    pub finetune_rounds: usize,
}

#[derive(Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    #[serde(rename = "D")]
    pub dim: usize,
    pub generator: GeneratorWeights,
    pub discriminator: DiscriminatorWeights,
    pub seed: u64,
    pub train_config: TrainConfigFile,
}

fn matrix_rows(matrix: &Matrix) -> Vec<Vec<f64>> {
    matrix.iter_rows().map(|row| row.to_vec()).collect()
}

fn matrix_from_rows(name: &str, rows: &[Vec<f64>]) -> Result<Matrix> {
    if rows.is_empty() {
        return Err(CliError::Data(format!("model {name}: empty matrix")));
    }
    let cols = rows[0].len();
    let mut data = Vec::with_capacity(rows.len() * cols);
    for row in rows {
        if row.len() != cols {
            return Err(CliError::Data(format!("model {name}: ragged rows")));
        }
        data.extend_from_slice(row);
    }
    Matrix::from_vec(rows.len(), cols, data)
        .map_err(|e| CliError::Data(format!("model {name}: {e}")))
}

impl ModelFile {
    pub fn from_models(
        gen: &Generator,
        disc: &Discriminator,
        seed: u64,
        train_config: TrainConfigFile,
    ) -> ModelFile {
        ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            dim: gen.dim(),
            generator: GeneratorWeights {
                w1: matrix_rows(gen.hidden_layer().weights()),
                b1: gen.hidden_layer().bias().to_vec(),
                w2: matrix_rows(gen.output_layer().weights()),
                b2: gen.output_layer().bias().to_vec(),
            },
            discriminator: DiscriminatorWeights {
                prototypes: matrix_rows(disc.prototypes()),
            },
            seed,
            train_config,
        }
    }

    /// Rebuild the models. Optimizer state is not persisted; further
    /// training starts from fresh moments.
    pub fn to_models(&self) -> Result<(Generator, Discriminator)> {
        let gen_adam = AdamParams {
            lr: self.train_config.generator.lr,
            beta1: self.train_config.generator.beta1,
            beta2: self.train_config.generator.beta2,
            eps: self.train_config.generator.eps,
        };
        let disc_adam = AdamParams {
            lr: self.train_config.discriminator.lr,
            beta1: self.train_config.discriminator.beta1,
            beta2: self.train_config.discriminator.beta2,
            eps: self.train_config.discriminator.eps,
        };
        let hidden = LinearLayer::from_parts(
            matrix_from_rows("W1", &self.generator.w1)?,
            self.generator.b1.clone(),
            gen_adam,
        )
        .map_err(|e| CliError::Data(format!("model generator: {e}")))?;
        let output = LinearLayer::from_parts(
            matrix_from_rows("W2", &self.generator.w2)?,
            self.generator.b2.clone(),
            gen_adam,
        )
        .map_err(|e| CliError::Data(format!("model generator: {e}")))?;
        let gen = Generator::from_layers(hidden, output)
            .map_err(|e| CliError::Data(format!("model generator: {e}")))?;
        if gen.dim() != self.dim {
            return Err(CliError::Data(format!(
                "model dimension D={} does not match generator output {}",
                self.dim,
                gen.dim()
            )));
        }
        let prototypes = matrix_from_rows("prototypes", &self.discriminator.prototypes)?;
        if prototypes.cols() != self.dim {
            return Err(CliError::Data(format!(
                "model dimension D={} does not match prototype width {}",
                self.dim,
                prototypes.cols()
            )));
        }
        let disc = Discriminator::new(prototypes, disc_adam)
            .map_err(|e| CliError::Data(format!("model discriminator: {e}")))?;
        Ok((gen, disc))
    }
}

pub fn save_model(path: &Path, model: &ModelFile) -> Result<()> {
    let mut text = serde_json::to_string(model)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn load_model(path: &Path) -> Result<ModelFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let model: ModelFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if model.format_version != MODEL_FORMAT_VERSION {
        return Err(CliError::Data(format!(
            "{}: unsupported format_version {} (expected {MODEL_FORMAT_VERSION})",
            path.display(),
            model.format_version
        )));
    }
    Ok(model)
}

// ---------------------------------------------------------------------
// loss curves
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize, Default)]
pub struct CurvesFile {
    pub generator: Vec<f64>,
    pub discriminator_train: Vec<f64>,
    pub discriminator_test: Vec<f64>,
}

pub fn write_curves(path: &Path, curves: &CurvesFile) -> Result<()> {
    write_pretty_json(path, curves)
}

// ---------------------------------------------------------------------
// collision report
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct ClusterReportLine {
    pub id: usize,
    pub size: usize,
    pub class_sums: Vec<f64>,
    pub mean: f64,
    #[serde(rename = "Z")]
    pub z: usize,
    pub collision: bool,
}

#[derive(Serialize, Deserialize)]
pub struct CollisionReportFile {
    pub k: usize,
    pub tau: f64,
    pub examples: usize,
    pub flagged_examples: usize,
    pub clusters: Vec<ClusterReportLine>,
}

pub fn write_collision_report(path: &Path, report: &CollisionReportFile) -> Result<()> {
    write_pretty_json(path, report)
}

// ---------------------------------------------------------------------
// evaluation report
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct PerClassAccuracy {
    pub fear: Option<f64>,
    pub sadness: Option<f64>,
    pub anger: Option<f64>,
    pub disgust: Option<f64>,
    pub calm: Option<f64>,
    pub happiness: Option<f64>,
    pub surprise: Option<f64>,
}

impl PerClassAccuracy {
    fn from_array(values: &[Option<f64>; EMOTION_COUNT]) -> PerClassAccuracy {
        PerClassAccuracy {
            fear: values[0],
            sadness: values[1],
            anger: values[2],
            disgust: values[3],
            calm: values[4],
            happiness: values[5],
            surprise: values[6],
        }
    }

    fn to_array(&self) -> [Option<f64>; EMOTION_COUNT] {
        [
            self.fear,
            self.sadness,
            self.anger,
            self.disgust,
            self.calm,
            self.happiness,
            self.surprise,
        ]
    }
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct RecordLine {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    pub gold: Vec<u8>,
    pub forecast: Vec<f64>,
    pub top2: [usize; 2],
    pub correct: bool,
}

impl RecordLine {
    pub fn from_record(record: &EvalRecord) -> RecordLine {
        RecordLine {
            text: record.text.clone(),
            gold: emotions_to_bits(&record.gold),
            forecast: record.forecast.values().to_vec(),
            top2: [record.top2.first, record.top2.second],
            correct: record.correct,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct ReportFile {
    pub per_class_accuracy: PerClassAccuracy,
    pub mean_accuracy: f64,
    pub overall_top2_hit_rate: f64,
    pub prediction_matrix: Vec<Vec<u32>>,
    pub records: Vec<RecordLine>,
}

impl ReportFile {
    pub fn from_report(report: &EvalReport) -> ReportFile {
        ReportFile {
            per_class_accuracy: PerClassAccuracy::from_array(&report.per_class_accuracy),
            mean_accuracy: report.mean_accuracy,
            overall_top2_hit_rate: report.overall_top2_hit_rate,
            prediction_matrix: report
                .prediction_matrix
                .iter()
                .map(|row| row.to_vec())
                .collect(),
            records: report.records.iter().map(RecordLine::from_record).collect(),
        }
    }

    /// Rebuild the in-memory report (used by round-trip checks).
    pub fn to_report(&self) -> Result<EvalReport> {
        let mut matrix = [[0u32; EMOTION_COUNT]; EMOTION_COUNT];
        if self.prediction_matrix.len() != EMOTION_COUNT {
            return Err(CliError::Data("prediction matrix must be 7×7".into()));
        }
        for (target, row) in matrix.iter_mut().zip(&self.prediction_matrix) {
            if row.len() != EMOTION_COUNT {
                return Err(CliError::Data("prediction matrix must be 7×7".into()));
            }
            target.copy_from_slice(row);
        }
        let mut records = Vec::with_capacity(self.records.len());
        for line in &self.records {
            let mut gold = [0.0; EMOTION_COUNT];
            for (g, b) in gold.iter_mut().zip(&line.gold) {
                *g = f64::from(*b);
            }
            let mut forecast = [0.0; EMOTION_COUNT];
            forecast.copy_from_slice(&line.forecast);
            records.push(EvalRecord {
                text: line.text.clone(),
                gold: EmotionVector::new(gold),
                forecast: EmotionVector::new(forecast),
                top2: Top2 {
                    first: line.top2[0],
                    second: line.top2[1],
                    first_value: forecast[line.top2[0]],
                    second_value: forecast[line.top2[1]],
                },
                correct: line.correct,
            });
        }
        Ok(EvalReport {
            per_class_accuracy: self.per_class_accuracy.to_array(),
            mean_accuracy: self.mean_accuracy,
            overall_top2_hit_rate: self.overall_top2_hit_rate,
            prediction_matrix: matrix,
            records,
        })
    }
}

pub fn write_report_json(path: &Path, report: &ReportFile) -> Result<()> {
    write_pretty_json(path, report)
}

pub fn read_report_json(path: &Path) -> Result<ReportFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn write_records_jsonl(path: &Path, records: &[EvalRecord]) -> Result<()> {
    write_lines(path, records.iter().map(RecordLine::from_record))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    file.write_all(text.as_bytes())
        .map_err(|e| CliError::io(path, e))
}
