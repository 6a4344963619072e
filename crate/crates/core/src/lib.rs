//! Core kernel for an emotion-recognition pipeline: emoticon-based
//! labelling of text corpora, collision purging of conflicting examples,
//! generator-based synthesis of a class-balanced training set over every
//! emotion combination, frequency-matrix initialized prototype
//! classification, and the top-2 evaluation protocol.
//!
//! The crate is `no_std` (with `alloc`); all file formats and the CLI
//! live in the companion `emogan-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod collisions;
pub mod emotext;
pub mod error;
pub mod eval;
pub mod gan;
pub mod mathkit;

pub use emotext::{Emotion, EmotionVector, LabeledExample, EMOTION_COUNT};
pub use error::Error;
