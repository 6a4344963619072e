//! Embedding providers backed by files.

use std::collections::HashMap;
use std::path::Path;

use emogan_core::emotext::EmbeddingProvider;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Deserialize)]
struct EmbeddingLine {
    text: String,
    embedding: Vec<f64>,
}

/// Precomputed embedding lookup, read from JSON-lines of
/// `{"text", "embedding"}`.
#[derive(Debug)]
pub struct FileEmbedder {
    dim: usize,
    map: HashMap<String, Vec<f64>>,
}

impl FileEmbedder {
    pub fn load(path: &Path) -> Result<FileEmbedder> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut map = HashMap::new();
        let mut dim = None;
        for (index, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let number = index + 1;
            let parsed: EmbeddingLine = serde_json::from_str(line)
                .map_err(|e| CliError::Data(format!("{} line {number}: {e}", path.display())))?;
            let expected = *dim.get_or_insert(parsed.embedding.len());
            if parsed.embedding.len() != expected {
                return Err(CliError::Data(format!(
                    "{} line {number}: embedding dimension {} differs from {}",
                    path.display(),
                    parsed.embedding.len(),
                    expected
                )));
            }
            map.insert(parsed.text, parsed.embedding);
        }
        let dim =
            dim.ok_or_else(|| CliError::Data(format!("{}: no embeddings found", path.display())))?;
        Ok(FileEmbedder { dim, map })
    }
}

impl EmbeddingProvider for FileEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, sentence: &str) -> std::result::Result<Vec<f64>, emogan_core::Error> {
        self.map
            .get(sentence)
            .cloned()
            .ok_or_else(|| emogan_core::Error::Provider {
                sentence: sentence.to_string(),
                message: "no precomputed embedding for this sentence".to_string(),
            })
    }
}
