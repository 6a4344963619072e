//! Generator/discriminator training: an emotion→embedding generator
//! trained with MSE, synthesis of a class-balanced dataset over all 128
//! emotion combinations, frequency-matrix prototype initialization, and
//! discriminator training with cosine activation and cosine loss.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::emotext::{EmotionVector, LabeledExample, EMOTION_COUNT};
use crate::error::Error;
use crate::mathkit::{
    cosine_loss, cosine_similarity, linear_backward, linear_forward, mse_loss, norm,
    normalize_forecast, AdamParams, AdamState, Matrix, EPS_NORM,
};

/// Hidden width of the generator (7 → 128 → D).
pub const GENERATOR_HIDDEN: usize = 128;

/// Training hyperparameters shared by both networks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub split_fraction: f64,
    pub finetune_rounds: usize,
    pub adam: AdamParams,
}

impl TrainConfig {
    pub fn generator_defaults(seed: u64) -> TrainConfig {
        TrainConfig {
            epochs: 10,
            batch_size: 16,
            seed,
            split_fraction: 0.7,
            finetune_rounds: 0,
            adam: AdamParams::default(),
        }
    }

    pub fn discriminator_defaults(seed: u64) -> TrainConfig {
        TrainConfig {
            epochs: 50,
            ..TrainConfig::generator_defaults(seed)
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if self.batch_size == 0 {
            return Err(Error::InvalidParameter {
                name: "batch_size",
                message: "must be at least 1".to_string(),
            });
        }
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(Error::InvalidParameter {
                name: "split_fraction",
                message: "must lie strictly between 0 and 1".to_string(),
            });
        }
        Ok(())
    }
}

/// One linear layer with its per-parameter Adam state.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearLayer {
    weights: Matrix,
    bias: Vec<f64>,
    w_state: AdamState,
    b_state: AdamState,
}

impl LinearLayer {
    /// Seeded uniform init in `[-1/√fan_in, +1/√fan_in)` for weights and
    /// bias.
    pub fn random(
        out_dim: usize,
        in_dim: usize,
        adam: AdamParams,
        rng: &mut ChaCha8Rng,
    ) -> LinearLayer {
        let bound = 1.0 / libm::sqrt(in_dim as f64);
        let data: Vec<f64> = (0..out_dim * in_dim)
            .map(|_| rng.random_range(-bound..bound))
            .collect();
        let bias: Vec<f64> = (0..out_dim)
            .map(|_| rng.random_range(-bound..bound))
            .collect();
        LinearLayer {
            weights: Matrix::from_vec(out_dim, in_dim, data).unwrap(),
            bias,
            w_state: AdamState::new(out_dim * in_dim, adam),
            b_state: AdamState::new(out_dim, adam),
        }
    }

    pub fn from_parts(
        weights: Matrix,
        bias: Vec<f64>,
        adam: AdamParams,
    ) -> Result<LinearLayer, Error> {
        if bias.len() != weights.rows() {
            return Err(Error::Dimension {
                context: "LinearLayer bias",
                expected: weights.rows(),
                actual: bias.len(),
            });
        }
        let w_len = weights.rows() * weights.cols();
        let b_len = bias.len();
        Ok(LinearLayer {
            weights,
            bias,
            w_state: AdamState::new(w_len, adam),
            b_state: AdamState::new(b_len, adam),
        })
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>, Error> {
        linear_forward(&self.weights, &self.bias, input)
    }

    fn apply_grads(&mut self, dw: &Matrix, db: &[f64]) -> Result<(), Error> {
        self.w_state.step(self.weights.data_mut(), dw.data())?;
        self.b_state.step(&mut self.bias, db)
    }
}

/// 7 → 128 → D linear generator, no activation functions.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    hidden: LinearLayer,
    output: LinearLayer,
}

impl Generator {
    pub fn random(dim: usize, adam: AdamParams, rng: &mut ChaCha8Rng) -> Generator {
        Generator {
            hidden: LinearLayer::random(GENERATOR_HIDDEN, EMOTION_COUNT, adam, rng),
            output: LinearLayer::random(dim, GENERATOR_HIDDEN, adam, rng),
        }
    }

    pub fn from_layers(hidden: LinearLayer, output: LinearLayer) -> Result<Generator, Error> {
        if hidden.weights.cols() != EMOTION_COUNT {
            return Err(Error::Dimension {
                context: "Generator hidden input",
                expected: EMOTION_COUNT,
                actual: hidden.weights.cols(),
            });
        }
        if hidden.weights.rows() != GENERATOR_HIDDEN {
            return Err(Error::Dimension {
                context: "Generator hidden width",
                expected: GENERATOR_HIDDEN,
                actual: hidden.weights.rows(),
            });
        }
        if output.weights.cols() != GENERATOR_HIDDEN {
            return Err(Error::Dimension {
                context: "Generator output input",
                expected: GENERATOR_HIDDEN,
                actual: output.weights.cols(),
            });
        }
        Ok(Generator { hidden, output })
    }

    pub fn dim(&self) -> usize {
        self.output.weights.rows()
    }

    pub fn hidden_layer(&self) -> &LinearLayer {
        &self.hidden
    }

    pub fn output_layer(&self) -> &LinearLayer {
        &self.output
    }

    pub fn forward(&self, emotions: &EmotionVector) -> Vec<f64> {
        let h = self.hidden.forward(emotions.as_slice()).unwrap();
        self.output.forward(&h).unwrap()
    }

    pub fn is_finite(&self) -> bool {
        self.hidden.weights.is_finite()
            && self.output.weights.is_finite()
            && self.hidden.bias.iter().all(|x| x.is_finite())
            && self.output.bias.iter().all(|x| x.is_finite())
    }
}

fn check_dataset(dataset: &[LabeledExample], dim: usize) -> Result<(), Error> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput("training dataset"));
    }
    for example in dataset {
        if example.embedding.len() != dim {
            return Err(Error::Dimension {
                context: "training embedding",
                expected: dim,
                actual: example.embedding.len(),
            });
        }
    }
    Ok(())
}

/// Minibatch epochs of MSE/Adam on an existing generator; returns the
/// per-epoch mean loss.
fn run_generator_epochs(
    gen: &mut Generator,
    dataset: &[LabeledExample],
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>, Error> {
    let dim = gen.dim();
    let mut curve = Vec::with_capacity(cfg.epochs);
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut dw_hidden = Matrix::zeros(GENERATOR_HIDDEN, EMOTION_COUNT);
    let mut db_hidden = vec![0.0; GENERATOR_HIDDEN];
    let mut dw_output = Matrix::zeros(dim, GENERATOR_HIDDEN);
    let mut db_output = vec![0.0; dim];
    for _ in 0..cfg.epochs {
        order.shuffle(rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            dw_hidden.fill(0.0);
            db_hidden.fill(0.0);
            dw_output.fill(0.0);
            db_output.fill(0.0);
            for &index in batch {
                let example = &dataset[index];
                let h = gen.hidden.forward(example.emotions.as_slice())?;
                let y = gen.output.forward(&h)?;
                let (loss, gy) = mse_loss(&y, &example.embedding)?;
                if !loss.is_finite() {
                    return Err(Error::NonFinite("generator loss"));
                }
                epoch_loss += loss;
                let out_grads = linear_backward(&gen.output.weights, &h, &gy)?;
                let hidden_grads = linear_backward(
                    &gen.hidden.weights,
                    example.emotions.as_slice(),
                    &out_grads.input,
                )?;
                dw_output.add_assign(&out_grads.weights)?;
                dw_hidden.add_assign(&hidden_grads.weights)?;
                for (acc, g) in db_output.iter_mut().zip(&out_grads.bias) {
                    *acc += g;
                }
                for (acc, g) in db_hidden.iter_mut().zip(&hidden_grads.bias) {
                    *acc += g;
                }
            }
            let scale = 1.0 / batch.len() as f64;
            dw_hidden.scale(scale);
            dw_output.scale(scale);
            for g in db_hidden.iter_mut() {
                *g *= scale;
            }
            for g in db_output.iter_mut() {
                *g *= scale;
            }
            gen.hidden.apply_grads(&dw_hidden, &db_hidden)?;
            gen.output.apply_grads(&dw_output, &db_output)?;
        }
        curve.push(epoch_loss / dataset.len() as f64);
    }
    Ok(curve)
}

/// Train a freshly initialized generator on (emotion → embedding) pairs.
/// Returns the generator and the per-epoch mean MSE.
pub fn train_generator(
    dataset: &[LabeledExample],
    dim: usize,
    cfg: &TrainConfig,
) -> Result<(Generator, Vec<f64>), Error> {
    cfg.validate()?;
    check_dataset(dataset, dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut gen = Generator::random(dim, cfg.adam, &mut rng);
    let curve = run_generator_epochs(&mut gen, dataset, cfg, &mut rng)?;
    Ok((gen, curve))
}

/// Cosine-threshold accuracy of the generator against a labelled dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorScore {
    /// Fraction of pairs with `cos(gen(V1), embedding) ≥ threshold`.
    pub accuracy: f64,
    pub mean_cosine: f64,
}

pub fn generator_accuracy(
    gen: &Generator,
    dataset: &[LabeledExample],
    threshold: f64,
) -> Result<GeneratorScore, Error> {
    check_dataset(dataset, gen.dim())?;
    let mut hits = 0usize;
    let mut total = 0.0;
    for example in dataset {
        let generated = gen.forward(&example.emotions);
        let cos = cosine_similarity(&generated, &example.embedding)?;
        total += cos;
        if cos >= threshold {
            hits += 1;
        }
    }
    Ok(GeneratorScore {
        accuracy: hits as f64 / dataset.len() as f64,
        mean_cosine: total / dataset.len() as f64,
    })
}

/// All 2ⁿ binary vectors in ascending binary order, most-significant bit
/// first (component 0).
pub fn enumerate_combinations(n: usize) -> Result<Vec<Vec<f64>>, Error> {
    if !(1..=16).contains(&n) {
        return Err(Error::InvalidParameter {
            name: "n",
            message: "must be between 1 and 16".to_string(),
        });
    }
    let mut out = Vec::with_capacity(1 << n);
    for index in 0..(1usize << n) {
        let v: Vec<f64> = (0..n)
            .map(|bit| {
                if (index >> (n - 1 - bit)) & 1 == 1 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        out.push(v);
    }
    Ok(out)
}

/// The 128 emotion combinations, from all-zero to all-one.
pub fn all_emotion_combinations() -> Vec<EmotionVector> {
    enumerate_combinations(EMOTION_COUNT)
        .unwrap()
        .into_iter()
        .map(|v| EmotionVector::from_slice(&v).unwrap())
        .collect()
}

/// The balanced synthetic dataset: one generated embedding per emotion
/// combination, in combination order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset2 {
    pairs: Vec<(EmotionVector, Vec<f64>)>,
}

impl Dataset2 {
    /// Validates the invariants: exactly 128 pairs, binary and distinct
    /// emotion vectors, finite embeddings of one dimension.
    pub fn from_pairs(pairs: Vec<(EmotionVector, Vec<f64>)>) -> Result<Dataset2, Error> {
        let expected = 1 << EMOTION_COUNT;
        if pairs.len() != expected {
            return Err(Error::Dimension {
                context: "Dataset2 pairs",
                expected,
                actual: pairs.len(),
            });
        }
        let dim = pairs[0].1.len();
        let mut seen = [false; 1 << EMOTION_COUNT];
        for (emotions, embedding) in &pairs {
            if !emotions.is_binary() {
                return Err(Error::InvalidParameter {
                    name: "Dataset2 emotions",
                    message: "emotion vectors must be binary".to_string(),
                });
            }
            let mask = emotions
                .values()
                .iter()
                .fold(0usize, |acc, v| (acc << 1) | (*v as usize));
            if seen[mask] {
                return Err(Error::InvalidParameter {
                    name: "Dataset2 emotions",
                    message: "emotion combinations must be distinct".to_string(),
                });
            }
            seen[mask] = true;
            if embedding.len() != dim {
                return Err(Error::Dimension {
                    context: "Dataset2 embedding",
                    expected: dim,
                    actual: embedding.len(),
                });
            }
            if !embedding.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite("Dataset2 embedding"));
            }
        }
        Ok(Dataset2 { pairs })
    }

    pub fn pairs(&self) -> &[(EmotionVector, Vec<f64>)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.pairs[0].1.len()
    }
}

/// Run every enumerated combination through the generator.
pub fn generate_dataset2(gen: &Generator) -> Dataset2 {
    let pairs = all_emotion_combinations()
        .into_iter()
        .map(|v1| {
            let v2 = gen.forward(&v1);
            (v1, v2)
        })
        .collect();
    Dataset2 { pairs }
}

/// Frequency matrix `F = Eᵀ·B`: row `j` is the sum of the embeddings of
/// every example whose class vector has weight at class `j`.
pub fn fm_init<E: AsRef<[f64]>, B: AsRef<[f64]>>(
    emotions: &[E],
    embeddings: &[B],
) -> Result<Matrix, Error> {
    if emotions.is_empty() {
        return Err(Error::EmptyInput("fm_init pairs"));
    }
    if emotions.len() != embeddings.len() {
        return Err(Error::Dimension {
            context: "fm_init pair count",
            expected: emotions.len(),
            actual: embeddings.len(),
        });
    }
    let classes = emotions[0].as_ref().len();
    let dim = embeddings[0].as_ref().len();
    let mut f = Matrix::zeros(classes, dim);
    for (e, b) in emotions.iter().zip(embeddings) {
        let e = e.as_ref();
        let b = b.as_ref();
        if e.len() != classes {
            return Err(Error::Dimension {
                context: "fm_init emotions",
                expected: classes,
                actual: e.len(),
            });
        }
        if b.len() != dim {
            return Err(Error::Dimension {
                context: "fm_init embedding",
                expected: dim,
                actual: b.len(),
            });
        }
        for (class, weight) in e.iter().enumerate() {
            let row = f.row_mut(class);
            for (acc, value) in row.iter_mut().zip(b) {
                *acc += weight * value;
            }
        }
    }
    Ok(f)
}

/// Prototype classifier: one class row per emotion, scored by cosine
/// similarity and normalized onto the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct Discriminator {
    prototypes: Matrix,
    state: AdamState,
}

/// Raw cosine scores plus the normalized forecast.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminatorOutput {
    pub raw: [f64; EMOTION_COUNT],
    pub forecast: EmotionVector,
}

impl Discriminator {
    pub fn new(prototypes: Matrix, adam: AdamParams) -> Result<Discriminator, Error> {
        if prototypes.rows() != EMOTION_COUNT {
            return Err(Error::Dimension {
                context: "Discriminator prototypes",
                expected: EMOTION_COUNT,
                actual: prototypes.rows(),
            });
        }
        let len = prototypes.rows() * prototypes.cols();
        Ok(Discriminator {
            prototypes,
            state: AdamState::new(len, adam),
        })
    }

    /// FM initialization from the balanced dataset.
    pub fn fm_initialized(dataset2: &Dataset2, adam: AdamParams) -> Discriminator {
        let emotions: Vec<&[f64]> = dataset2.pairs.iter().map(|(e, _)| e.as_slice()).collect();
        let embeddings: Vec<&[f64]> = dataset2.pairs.iter().map(|(_, b)| b.as_slice()).collect();
        let prototypes = fm_init(&emotions, &embeddings).unwrap();
        Discriminator::new(prototypes, adam).unwrap()
    }

    pub fn prototypes(&self) -> &Matrix {
        &self.prototypes
    }

    pub fn dim(&self) -> usize {
        self.prototypes.cols()
    }

    pub fn forward(&self, embedding: &[f64]) -> Result<DiscriminatorOutput, Error> {
        if embedding.len() != self.dim() {
            return Err(Error::Dimension {
                context: "discriminator input",
                expected: self.dim(),
                actual: embedding.len(),
            });
        }
        let mut raw = [0.0; EMOTION_COUNT];
        for (score, row) in raw.iter_mut().zip(self.prototypes.iter_rows()) {
            *score = cosine_similarity(embedding, row)?;
        }
        let forecast = EmotionVector::from_slice(&normalize_forecast(&raw)).unwrap();
        Ok(DiscriminatorOutput { raw, forecast })
    }

    pub fn is_finite(&self) -> bool {
        self.prototypes.is_finite()
    }
}

/// Gradient of `Σ_j graw[j]·cos(x, p_j)` with respect to the prototype
/// rows. Rows (or inputs) with zero norm contribute nothing.
fn prototype_grads(
    prototypes: &Matrix,
    embedding: &[f64],
    raw: &[f64; EMOTION_COUNT],
    upstream: &[f64],
    out: &mut Matrix,
) {
    let nx = norm(embedding);
    if nx < EPS_NORM {
        return;
    }
    for class in 0..EMOTION_COUNT {
        let g = upstream[class];
        let row = prototypes.row(class);
        let np = norm(row);
        if np < EPS_NORM {
            continue;
        }
        let out_row = out.row_mut(class);
        for i in 0..row.len() {
            out_row[i] += g * (embedding[i] / (nx * np) - raw[class] * row[i] / (np * np));
        }
    }
}

/// Per-epoch train/test loss history.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LossCurves {
    pub train: Vec<f64>,
    pub test: Vec<f64>,
}

/// Seeded shuffle of `0..n` split at `floor(n·fraction)`.
pub fn split_indices(
    n: usize,
    fraction: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<usize>, Vec<usize>), Error> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter {
            name: "split_fraction",
            message: "must lie strictly between 0 and 1".to_string(),
        });
    }
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(rng);
    let cut = libm::floor(n as f64 * fraction) as usize;
    let test = indices.split_off(cut);
    Ok((indices, test))
}

/// Mean cosine loss of the discriminator over the given pairs. Pairs with
/// an all-zero emotion vector are excluded (cosine loss is undefined for
/// a zero target).
fn discriminator_loss(
    disc: &Discriminator,
    dataset2: &Dataset2,
    indices: &[usize],
) -> Result<f64, Error> {
    let mut total = 0.0;
    let mut count = 0usize;
    for &index in indices {
        let (v1, v2) = &dataset2.pairs[index];
        if v1.is_zero() {
            continue;
        }
        let output = disc.forward(v2)?;
        let (loss, _) = cosine_loss(&output.raw, v1.as_slice())?;
        total += loss;
        count += 1;
    }
    Ok(if count == 0 {
        0.0
    } else {
        total / count as f64
    })
}

/// Train the discriminator on the balanced dataset: seeded 70/30 split of
/// the 128 pairs, minibatch cosine loss on the raw cosine scores against
/// the binary targets, Adam on the prototype rows.
pub fn train_discriminator(
    disc: &mut Discriminator,
    dataset2: &Dataset2,
    cfg: &TrainConfig,
) -> Result<LossCurves, Error> {
    cfg.validate()?;
    if disc.dim() != dataset2.dim() {
        return Err(Error::Dimension {
            context: "train_discriminator dim",
            expected: disc.dim(),
            actual: dataset2.dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (train_idx, test_idx) = split_indices(dataset2.len(), cfg.split_fraction, &mut rng)?;
    if train_idx.is_empty() {
        return Err(Error::EmptyInput("discriminator train split"));
    }
    let mut curves = LossCurves::default();
    let mut order = train_idx.clone();
    let mut grads = Matrix::zeros(EMOTION_COUNT, disc.dim());
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut epoch_count = 0usize;
        for batch in order.chunks(cfg.batch_size) {
            grads.fill(0.0);
            let mut contributing = 0usize;
            for &index in batch {
                let (v1, v2) = &dataset2.pairs[index];
                if v1.is_zero() {
                    continue;
                }
                let output = disc.forward(v2)?;
                let (loss, upstream) = cosine_loss(&output.raw, v1.as_slice())?;
                if !loss.is_finite() {
                    return Err(Error::NonFinite("discriminator loss"));
                }
                epoch_loss += loss;
                epoch_count += 1;
                contributing += 1;
                prototype_grads(&disc.prototypes, v2, &output.raw, &upstream, &mut grads);
            }
            if contributing > 0 {
                grads.scale(1.0 / contributing as f64);
                disc.state.step(disc.prototypes.data_mut(), grads.data())?;
            }
        }
        curves.train.push(if epoch_count == 0 {
            0.0
        } else {
            epoch_loss / epoch_count as f64
        });
        curves
            .test
            .push(discriminator_loss(disc, dataset2, &test_idx)?);
    }
    Ok(curves)
}

/// Outcome of the optional joint fine-tuning rounds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FinetuneOutcome {
    /// Generator losses from the one-epoch fine-tune of each round.
    pub generator: Vec<f64>,
    /// Discriminator curves per round.
    pub discriminator: Vec<LossCurves>,
    /// The balanced dataset the discriminator was last trained on.
    pub last_dataset2: Option<Dataset2>,
}

/// Alternate `rounds` times: regenerate the balanced dataset from the
/// current generator, retrain the discriminator on it from a fresh FM
/// initialization, then fine-tune the generator on the real dataset for
/// one epoch. `rounds = 0` is a no-op.
pub fn joint_finetune(
    gen: &mut Generator,
    disc: &mut Discriminator,
    dataset1: &[LabeledExample],
    gen_cfg: &TrainConfig,
    disc_cfg: &TrainConfig,
    rounds: usize,
) -> Result<FinetuneOutcome, Error> {
    let mut outcome = FinetuneOutcome::default();
    if rounds == 0 {
        return Ok(outcome);
    }
    check_dataset(dataset1, gen.dim())?;
    for round in 0..rounds {
        let offset = round as u64 + 1;
        let dataset2 = generate_dataset2(gen);
        *disc = Discriminator::fm_initialized(&dataset2, disc_cfg.adam);
        let round_disc_cfg = TrainConfig {
            seed: disc_cfg.seed.wrapping_add(offset),
            ..*disc_cfg
        };
        let curves = train_discriminator(disc, &dataset2, &round_disc_cfg)?;
        outcome.discriminator.push(curves);
        outcome.last_dataset2 = Some(dataset2);

        let round_gen_cfg = TrainConfig {
            epochs: 1,
            seed: gen_cfg.seed.wrapping_add(offset),
            ..*gen_cfg
        };
        let mut rng = ChaCha8Rng::seed_from_u64(round_gen_cfg.seed);
        let losses = run_generator_epochs(gen, dataset1, &round_gen_cfg, &mut rng)?;
        outcome.generator.extend(losses);
    }
    Ok(outcome)
}
