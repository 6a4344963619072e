//! Text-to-vector stage: the emoticon dictionary, sentence splitting,
//! per-class emoticon counting, and corpus vectorization through a
//! pluggable embedding provider.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::mathkit::{norm, standard_normal, EPS_NORM};

/// Number of emotion classes.
pub const EMOTION_COUNT: usize = 7;

/// The seven emotion classes, in the fixed label order used everywhere
/// in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Emotion {
    Fear = 0,
    Sadness = 1,
    Anger = 2,
    Disgust = 3,
    Calm = 4,
    Happiness = 5,
    Surprise = 6,
}

impl Emotion {
    pub const ALL: [Emotion; EMOTION_COUNT] = [
        Emotion::Fear,
        Emotion::Sadness,
        Emotion::Anger,
        Emotion::Disgust,
        Emotion::Calm,
        Emotion::Happiness,
        Emotion::Surprise,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Emotion> {
        Emotion::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Emotion::Fear => "fear",
            Emotion::Sadness => "sadness",
            Emotion::Anger => "anger",
            Emotion::Disgust => "disgust",
            Emotion::Calm => "calm",
            Emotion::Happiness => "happiness",
            Emotion::Surprise => "surprise",
        }
    }

    pub fn from_name(name: &str) -> Option<Emotion> {
        Emotion::ALL.iter().copied().find(|e| e.name() == name)
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A 7-component emotion vector. Label vectors are binary multi-hot;
/// forecast vectors are non-negative and sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionVector {
    values: [f64; EMOTION_COUNT],
}

impl EmotionVector {
    pub fn new(values: [f64; EMOTION_COUNT]) -> EmotionVector {
        EmotionVector { values }
    }

    pub fn zeros() -> EmotionVector {
        EmotionVector {
            values: [0.0; EMOTION_COUNT],
        }
    }

    /// Binary vector from a slice of arbitrary length 7.
    pub fn from_slice(values: &[f64]) -> Result<EmotionVector, Error> {
        if values.len() != EMOTION_COUNT {
            return Err(Error::Dimension {
                context: "EmotionVector::from_slice",
                expected: EMOTION_COUNT,
                actual: values.len(),
            });
        }
        let mut v = [0.0; EMOTION_COUNT];
        v.copy_from_slice(values);
        Ok(EmotionVector { values: v })
    }

    pub fn values(&self) -> &[f64; EMOTION_COUNT] {
        &self.values
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, class: Emotion) -> f64 {
        self.values[class.index()]
    }

    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0 || *v == 1.0)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// Indices of classes with a positive value.
    pub fn active_classes(&self) -> Vec<usize> {
        (0..EMOTION_COUNT)
            .filter(|i| self.values[*i] > 0.0)
            .collect()
    }

    pub fn active_count(&self) -> usize {
        self.values.iter().filter(|v| **v > 0.0).count()
    }
}

/// One dataset entry: an embedding paired with its binary emotion label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub embedding: Vec<f64>,
    pub emotions: EmotionVector,
    pub text: Option<String>,
    pub collision: bool,
}

impl LabeledExample {
    pub fn new(embedding: Vec<f64>, emotions: EmotionVector) -> LabeledExample {
        LabeledExample {
            embedding,
            emotions,
            text: None,
            collision: false,
        }
    }
}

/// Emoticon-to-emotion dictionary. No emoticon may appear under two
/// classes; scanning is longest-match-first.
#[derive(Debug, Clone)]
pub struct EmoticonDictionary {
    classes: [Vec<String>; EMOTION_COUNT],
    // all (emoticon, class) pairs ordered by descending byte length
    scan: Vec<(String, Emotion)>,
}

impl EmoticonDictionary {
    pub fn new(classes: [Vec<String>; EMOTION_COUNT]) -> Result<EmoticonDictionary, Error> {
        let mut deduped: [Vec<String>; EMOTION_COUNT] = Default::default();
        let mut scan: Vec<(String, Emotion)> = Vec::new();
        for (idx, entries) in classes.iter().enumerate() {
            let class = Emotion::from_index(idx).unwrap();
            for emoticon in entries {
                if emoticon.is_empty() {
                    return Err(Error::EmptyEmoticon(class));
                }
                if let Some((_, first)) = scan.iter().find(|(e, c)| e == emoticon && *c != class) {
                    return Err(Error::DuplicateEmoticon {
                        emoticon: emoticon.clone(),
                        first: *first,
                        second: class,
                    });
                }
                if deduped[idx].iter().any(|e| e == emoticon) {
                    continue; // repeated within its own class
                }
                deduped[idx].push(emoticon.clone());
                scan.push((emoticon.clone(), class));
            }
        }
        scan.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        Ok(EmoticonDictionary {
            classes: deduped,
            scan,
        })
    }

    pub fn emoticons(&self, class: Emotion) -> &[String] {
        &self.classes[class.index()]
    }

    pub fn total_emoticons(&self) -> usize {
        self.scan.len()
    }

    /// Longest emoticon starting at byte offset `pos`, if any.
    fn match_at(&self, text: &str, pos: usize) -> Option<(usize, Emotion)> {
        let rest = &text.as_bytes()[pos..];
        self.scan
            .iter()
            .find(|(e, _)| rest.starts_with(e.as_bytes()))
            .map(|(e, c)| (e.len(), *c))
    }
}

const TERMINATORS: [char; 4] = ['.', '!', '?', '\n'];

/// Split text into sentences on `.`, `!`, `?`, and newline, trimming
/// segments and dropping empty ones. A terminator inside a dictionary
/// emoticon does not split.
pub fn split_sentences(text: &str, dict: &EmoticonDictionary) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut current = String::new();
    let bytes = text.as_bytes();
    let mut pos = 0;
    while pos < bytes.len() {
        if let Some((len, _)) = dict.match_at(text, pos) {
            current.push_str(&text[pos..pos + len]);
            pos += len;
            continue;
        }
        let ch = text[pos..].chars().next().unwrap();
        if TERMINATORS.contains(&ch) {
            let trimmed = current.trim();
            if !trimmed.is_empty() {
                sentences.push(trimmed.to_string());
            }
            current.clear();
        } else {
            current.push(ch);
        }
        pos += ch.len_utf8();
    }
    let trimmed = current.trim();
    if !trimmed.is_empty() {
        sentences.push(trimmed.to_string());
    }
    sentences
}

/// Count non-overlapping emoticon occurrences per class,
/// longest-match-first.
pub fn emotion_counts(sentence: &str, dict: &EmoticonDictionary) -> [u32; EMOTION_COUNT] {
    let mut counts = [0u32; EMOTION_COUNT];
    let bytes = sentence.as_bytes();
    let mut pos = 0;
    while pos < bytes.len() {
        if let Some((len, class)) = dict.match_at(sentence, pos) {
            counts[class.index()] += 1;
            pos += len;
        } else {
            pos += sentence[pos..].chars().next().unwrap().len_utf8();
        }
    }
    counts
}

/// Binary multi-hot label from per-class counts.
pub fn binarize(counts: &[u32; EMOTION_COUNT]) -> EmotionVector {
    let mut values = [0.0; EMOTION_COUNT];
    for (v, c) in values.iter_mut().zip(counts) {
        *v = if *c > 0 { 1.0 } else { 0.0 };
    }
    EmotionVector::new(values)
}

/// Source of text embeddings. Implementations must be deterministic per
/// input and return finite vectors of length `dim()`.
pub trait EmbeddingProvider {
    fn dim(&self) -> usize;
    fn embed(&self, sentence: &str) -> Result<Vec<f64>, Error>;
}

/// Counters reported by [`vectorize_corpus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VectorizeStats {
    /// Sentences seen across the whole corpus.
    pub sentences: usize,
    /// Sentences with at least one emotion class.
    pub labelled: usize,
    /// Zero-label sentences dropped (0 when they are kept).
    pub dropped: usize,
}

/// Turn a corpus of texts into labelled examples: split into sentences,
/// count emoticons, binarize, and pair with the provider's embedding.
/// Sentences with an all-zero label are dropped unless `keep_zero_label`.
pub fn vectorize_corpus(
    corpus: &[String],
    dict: &EmoticonDictionary,
    provider: &dyn EmbeddingProvider,
    keep_zero_label: bool,
) -> Result<(Vec<LabeledExample>, VectorizeStats), Error> {
    let mut examples = Vec::new();
    let mut stats = VectorizeStats::default();
    for text in corpus {
        for sentence in split_sentences(text, dict) {
            stats.sentences += 1;
            let label = binarize(&emotion_counts(&sentence, dict));
            if label.is_zero() {
                if !keep_zero_label {
                    stats.dropped += 1;
                    continue;
                }
            } else {
                stats.labelled += 1;
            }
            let embedding = provider.embed(&sentence)?;
            if embedding.len() != provider.dim() {
                return Err(Error::Dimension {
                    context: "vectorize_corpus embedding",
                    expected: provider.dim(),
                    actual: embedding.len(),
                });
            }
            if !embedding.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite("provider embedding"));
            }
            let mut example = LabeledExample::new(embedding, label);
            example.text = Some(sentence);
            examples.push(example);
        }
    }
    Ok((examples, stats))
}

/// Deterministic stand-in for an external sentence encoder: hashes the
/// sentence into a seeded unit vector. Identical text gives an identical
/// vector.
#[derive(Debug, Clone, Copy)]
pub struct StubEmbedder {
    dim: usize,
    seed: u64,
}

impl StubEmbedder {
    pub fn new(dim: usize, seed: u64) -> Result<StubEmbedder, Error> {
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "dim",
                message: "embedding dimension must be at least 1".to_string(),
            });
        }
        Ok(StubEmbedder { dim, seed })
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

impl EmbeddingProvider for StubEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, sentence: &str) -> Result<Vec<f64>, Error> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ fnv1a64(sentence.as_bytes()));
        let mut v: Vec<f64> = (0..self.dim).map(|_| standard_normal(&mut rng)).collect();
        let n = norm(&v);
        if n < EPS_NORM {
            v[0] = 1.0;
            return Ok(v);
        }
        for x in &mut v {
            *x /= n;
        }
        Ok(v)
    }
}
