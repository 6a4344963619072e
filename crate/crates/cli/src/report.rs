//! Plain-text rendering of evaluation reports and per-example forecast
//! tables.

use emogan_core::emotext::{Emotion, EMOTION_COUNT};
use emogan_core::eval::EvalReport;

/// Accuracy table (7 rows plus MEAN), overall hit rate, and the 7×7
/// prediction matrix.
pub fn render_report_text(report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("{:<11}{:>8}\n", "Emotion", "Accuracy"));
    for class in Emotion::ALL {
        let cell = match report.per_class_accuracy[class.index()] {
            Some(acc) => format!("{acc:.2}"),
            None => "n/a".to_string(),
        };
        out.push_str(&format!("{:<11}{:>8}\n", class.name(), cell));
    }
    out.push_str(&format!(
        "{:<11}{:>8}\n",
        "MEAN",
        format!("{:.2}", report.mean_accuracy)
    ));
    out.push('\n');
    out.push_str(&format!(
        "Examples: {}   Top-2 hit rate: {:.2}\n",
        report.records.len(),
        report.overall_top2_hit_rate
    ));
    out.push('\n');
    out.push_str("Prediction matrix (rows: gold class, columns: predicted top-2 class)\n");
    out.push_str(&format!("{:<11}", ""));
    for class in Emotion::ALL {
        out.push_str(&format!("{:>10}", class.name()));
    }
    out.push('\n');
    for gold in Emotion::ALL {
        out.push_str(&format!("{:<11}", gold.name()));
        for predicted in 0..EMOTION_COUNT {
            out.push_str(&format!(
                "{:>10}",
                report.prediction_matrix[gold.index()][predicted]
            ));
        }
        out.push('\n');
    }
    out
}

/// One forecast row for the prediction table.
pub struct ForecastRow {
    pub text: Option<String>,
    pub forecast: [f64; EMOTION_COUNT],
    pub top2: [usize; 2],
}

/// Per-example forecast table; the two strongest values carry a `*`.
pub fn render_prediction_table(rows: &[ForecastRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!("{:<5}", "#"));
    for class in Emotion::ALL {
        out.push_str(&format!("{:>10}", class.name()));
    }
    out.push_str("  text\n");
    for (index, row) in rows.iter().enumerate() {
        out.push_str(&format!("{:<5}", index + 1));
        for (class, value) in row.forecast.iter().enumerate() {
            let marker = if row.top2.contains(&class) { "*" } else { " " };
            out.push_str(&format!("{:>9}{marker}", format!("{value:.2}")));
        }
        out.push_str("  ");
        if let Some(text) = &row.text {
            const LIMIT: usize = 60;
            if text.chars().count() > LIMIT {
                out.extend(text.chars().take(LIMIT - 1));
                out.push('…');
            } else {
                out.push_str(text);
            }
        }
        out.push('\n');
    }
    out
}
