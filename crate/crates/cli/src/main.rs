use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use emogan_cli::commands::{
    cmd_evaluate, cmd_find_collisions, cmd_pipeline, cmd_predict, cmd_synth, cmd_train,
    cmd_vectorize, EmbedderSpec, PredictEmbedder, TrainOptions,
};
use emogan_cli::config::{EmbedderConfig, PipelineConfig, TrainSettings};
use emogan_cli::fixtures::observed_combinations;
use emogan_cli::synth::SyntheticSpec;
use emogan_cli::Result;

#[derive(Parser)]
#[command(
    name = "emogan",
    version,
    about = "Emotion recognition over text embeddings: emoticon labelling, collision purging, \
             balanced synthetic training data, and a top-2 evaluated prototype classifier"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ComboChoice {
    /// The 37 combinations observed in the reference dataset
    Observed,
    /// All 128 combinations (including the all-zero one)
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Turn a corpus and emoticon dictionary into a labelled dataset
    Vectorize {
        #[arg(long)]
        dictionary: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Embedding dimension of the stub embedder
        #[arg(long, default_value_t = 512)]
        dim: usize,
        /// Seed of the stub embedder
        #[arg(long, default_value_t = 0)]
        embed_seed: u64,
        /// Precomputed embeddings (JSON-lines of {"text","embedding"});
        /// replaces the stub embedder
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Keep sentences without any emoticon (all-zero label)
        #[arg(long)]
        keep_zero_label: bool,
    },
    /// Flag conflicting example clusters and write a purged dataset
    FindCollisions {
        #[arg(long)]
        input: PathBuf,
        /// Allowed number of dominant classes per cluster
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Cosine-similarity clustering threshold
        #[arg(long, default_value_t = 0.995)]
        tau: f64,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Train generator and discriminator; evaluate on a held-out split
    Train {
        /// Collision-free labelled dataset (JSON-lines)
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output_dir: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        gen_epochs: Option<usize>,
        #[arg(long)]
        disc_epochs: Option<usize>,
        /// Learning rate for both networks
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        batch_size: Option<usize>,
        #[arg(long)]
        split_fraction: Option<f64>,
        #[arg(long)]
        finetune_rounds: Option<usize>,
    },
    /// Forecast emotions for embeddings or sentences
    Predict {
        #[arg(long)]
        model: PathBuf,
        /// JSON-lines with "embedding" or "text" per line
        #[arg(long)]
        input: PathBuf,
        /// Output path; omitted prints JSON-lines to stdout
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also print an aligned forecast table
        #[arg(long)]
        table: bool,
        /// Stub-embedder seed for "text" inputs
        #[arg(long)]
        embed_seed: Option<u64>,
        /// Precomputed embeddings for "text" inputs
        #[arg(long)]
        embeddings: Option<PathBuf>,
    },
    /// Generate a synthetic labelled dataset from orthonormal anchors
    Synth {
        #[arg(long, default_value_t = 512)]
        dim: usize,
        #[arg(long, default_value_t = 0.05)]
        noise_sigma: f64,
        #[arg(long, default_value_t = 20)]
        examples_per_combo: usize,
        #[arg(long, value_enum, default_value_t = ComboChoice::Observed)]
        combos: ComboChoice,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Evaluate a trained model on a labelled dataset
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// vectorize → find-collisions → train → evaluate, from a config file
    Pipeline {
        /// JSON config; flags below override its fields
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        dictionary: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        split_fraction: Option<f64>,
        #[arg(long)]
        finetune_rounds: Option<usize>,
        /// Precomputed embeddings instead of the stub embedder
        #[arg(long)]
        embeddings: Option<PathBuf>,
        #[arg(long)]
        keep_zero_label: bool,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Vectorize {
            dictionary,
            corpus,
            output,
            dim,
            embed_seed,
            embeddings,
            keep_zero_label,
        } => {
            let embedder = match embeddings {
                Some(path) => EmbedderSpec::File(path),
                None => EmbedderSpec::Stub {
                    dim,
                    seed: embed_seed,
                },
            };
            cmd_vectorize(&dictionary, &corpus, &output, &embedder, keep_zero_label)?;
        }
        Command::FindCollisions {
            input,
            k,
            tau,
            output_dir,
        } => {
            cmd_find_collisions(&input, k, tau, &output_dir)?;
        }
        Command::Train {
            input,
            output_dir,
            seed,
            gen_epochs,
            disc_epochs,
            lr,
            batch_size,
            split_fraction,
            finetune_rounds,
        } => {
            let mut opts = TrainOptions::new(seed);
            apply_overrides(&mut opts.generator, gen_epochs, lr, batch_size);
            apply_overrides(&mut opts.discriminator, disc_epochs, lr, batch_size);
            if let Some(fraction) = split_fraction {
                opts.split_fraction = fraction;
            }
            if let Some(rounds) = finetune_rounds {
                opts.finetune_rounds = rounds;
            }
            cmd_train(&input, &output_dir, &opts)?;
        }
        Command::Predict {
            model,
            input,
            output,
            table,
            embed_seed,
            embeddings,
        } => {
            let embedder = match (embeddings, embed_seed) {
                (Some(path), _) => Some(PredictEmbedder::File(path)),
                (None, Some(seed)) => Some(PredictEmbedder::Stub { seed }),
                (None, None) => None,
            };
            cmd_predict(&model, &input, output.as_deref(), table, embedder.as_ref())?;
        }
        Command::Synth {
            dim,
            noise_sigma,
            examples_per_combo,
            combos,
            seed,
            output,
        } => {
            let combos = match combos {
                ComboChoice::Observed => observed_combinations(),
                ComboChoice::All => emogan_core::gan::all_emotion_combinations(),
            };
            let spec = SyntheticSpec {
                dim,
                noise_sigma,
                examples_per_combo,
                combos,
                seed,
            };
            cmd_synth(&spec, &output)?;
        }
        Command::Evaluate {
            model,
            input,
            output_dir,
        } => {
            cmd_evaluate(&model, &input, &output_dir)?;
        }
        Command::Pipeline {
            config,
            seed,
            dictionary,
            corpus,
            output_dir,
            dim,
            k,
            tau,
            split_fraction,
            finetune_rounds,
            embeddings,
            keep_zero_label,
        } => {
            let mut cfg = match config {
                Some(path) => PipelineConfig::load(&path)?,
                None => PipelineConfig::default(),
            };
            if seed.is_some() {
                cfg.seed = seed;
            }
            if dictionary.is_some() {
                cfg.dictionary = dictionary;
            }
            if corpus.is_some() {
                cfg.corpus = corpus;
            }
            if output_dir.is_some() {
                cfg.output_dir = output_dir;
            }
            if dim.is_some() {
                cfg.dim = dim;
            }
            if let Some(k) = k {
                cfg.collision.k = k;
            }
            if let Some(tau) = tau {
                cfg.collision.tau = tau;
            }
            if split_fraction.is_some() {
                cfg.split_fraction = split_fraction;
            }
            if finetune_rounds.is_some() {
                cfg.finetune_rounds = finetune_rounds;
            }
            if let Some(path) = embeddings {
                cfg.embedder = EmbedderConfig::File { path };
            }
            if keep_zero_label {
                cfg.keep_zero_label = true;
            }
            cmd_pipeline(&cfg)?;
        }
    }
    Ok(())
}

fn apply_overrides(
    settings: &mut TrainSettings,
    epochs: Option<usize>,
    lr: Option<f64>,
    batch_size: Option<usize>,
) {
    if let Some(epochs) = epochs {
        settings.epochs = epochs;
    }
    if let Some(lr) = lr {
        settings.lr = lr;
    }
    if let Some(batch_size) = batch_size {
        settings.batch_size = batch_size;
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
