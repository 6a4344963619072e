//! Top-2 evaluation: extract the two strongest forecast classes, match
//! against golden labels, and aggregate per-class accuracies and the
//! prediction matrix.

use alloc::string::String;
use alloc::vec::Vec;

use crate::emotext::{EmotionVector, EMOTION_COUNT};
use crate::error::Error;

/// The two strongest forecast classes; ties break toward the lower index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Top2 {
    pub first: usize,
    pub second: usize,
    pub first_value: f64,
    pub second_value: f64,
}

impl Top2 {
    pub fn contains(&self, class: usize) -> bool {
        self.first == class || self.second == class
    }
}

/// Indices of the two largest forecast components.
pub fn top2(forecast: &EmotionVector) -> Top2 {
    let values = forecast.values();
    let mut first = 0;
    for i in 1..EMOTION_COUNT {
        if values[i] > values[first] {
            first = i;
        }
    }
    let mut second = usize::MAX;
    for i in 0..EMOTION_COUNT {
        if i == first {
            continue;
        }
        if second == usize::MAX || values[i] > values[second] {
            second = i;
        }
    }
    Top2 {
        first,
        second,
        first_value: values[first],
        second_value: values[second],
    }
}

/// The overlap rule: the prediction is correct when at least one of the
/// two predicted classes appears in the gold label. The gold label must
/// have 1 or 2 active classes.
pub fn example_correct(pred: &Top2, gold: &EmotionVector) -> Result<bool, Error> {
    let active = gold.active_classes();
    if active.is_empty() || active.len() > 2 {
        return Err(Error::GoldLabelCardinality {
            active: active.len(),
        });
    }
    Ok(active.iter().any(|class| pred.contains(*class)))
}

/// One scored evaluation example.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub text: Option<String>,
    pub gold: EmotionVector,
    pub forecast: EmotionVector,
    pub top2: Top2,
    pub correct: bool,
}

/// Score a forecast against its gold label.
pub fn score_example(
    forecast: EmotionVector,
    gold: EmotionVector,
    text: Option<String>,
) -> Result<EvalRecord, Error> {
    let pred = top2(&forecast);
    let correct = example_correct(&pred, &gold)?;
    Ok(EvalRecord {
        text,
        gold,
        forecast,
        top2: pred,
        correct,
    })
}

/// Per-class accuracies (class recall within the top-2) and their mean.
/// Classes without gold support are `None` and excluded from the mean.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassAccuracies {
    pub per_class: [Option<f64>; EMOTION_COUNT],
    pub mean: f64,
}

pub fn per_class_accuracy(records: &[EvalRecord]) -> Result<ClassAccuracies, Error> {
    if records.is_empty() {
        return Err(Error::EmptyInput("evaluation records"));
    }
    let mut support = [0usize; EMOTION_COUNT];
    let mut hits = [0usize; EMOTION_COUNT];
    for record in records {
        for class in record.gold.active_classes() {
            support[class] += 1;
            if record.top2.contains(class) {
                hits[class] += 1;
            }
        }
    }
    let mut per_class = [None; EMOTION_COUNT];
    let mut sum = 0.0;
    let mut counted = 0usize;
    for class in 0..EMOTION_COUNT {
        if support[class] > 0 {
            let accuracy = hits[class] as f64 / support[class] as f64;
            per_class[class] = Some(accuracy);
            sum += accuracy;
            counted += 1;
        }
    }
    let mean = if counted == 0 {
        0.0
    } else {
        sum / counted as f64
    };
    Ok(ClassAccuracies { per_class, mean })
}

/// 7×7 count matrix: cell `(g, p)` counts gold class `g` paired with
/// predicted top-2 class `p`.
pub fn prediction_matrix(records: &[EvalRecord]) -> [[u32; EMOTION_COUNT]; EMOTION_COUNT] {
    let mut matrix = [[0u32; EMOTION_COUNT]; EMOTION_COUNT];
    for record in records {
        for gold in record.gold.active_classes() {
            matrix[gold][record.top2.first] += 1;
            matrix[gold][record.top2.second] += 1;
        }
    }
    matrix
}

/// Aggregated evaluation result.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_class_accuracy: [Option<f64>; EMOTION_COUNT],
    pub mean_accuracy: f64,
    pub overall_top2_hit_rate: f64,
    pub prediction_matrix: [[u32; EMOTION_COUNT]; EMOTION_COUNT],
    pub records: Vec<EvalRecord>,
}

pub fn build_report(records: Vec<EvalRecord>) -> Result<EvalReport, Error> {
    let accuracies = per_class_accuracy(&records)?;
    let matrix = prediction_matrix(&records);
    let hits = records.iter().filter(|r| r.correct).count();
    Ok(EvalReport {
        per_class_accuracy: accuracies.per_class,
        mean_accuracy: accuracies.mean,
        overall_top2_hit_rate: hits as f64 / records.len() as f64,
        prediction_matrix: matrix,
        records,
    })
}
