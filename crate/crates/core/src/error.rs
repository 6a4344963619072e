//! Error type shared by all kernel modules.

use alloc::string::String;
use core::fmt;

use crate::emotext::Emotion;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two operands disagree on length or shape.
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    /// Cosine loss against an (effectively) zero target vector.
    DegenerateTarget,
    /// An operation that requires data received none.
    EmptyInput(&'static str),
    /// A parameter is outside its documented range.
    InvalidParameter { name: &'static str, message: String },
    /// The same emoticon is listed under two emotion classes.
    DuplicateEmoticon {
        emoticon: String,
        first: Emotion,
        second: Emotion,
    },
    /// An emotion class lists an empty emoticon string.
    EmptyEmoticon(Emotion),
    /// An embedding provider failed for a sentence.
    Provider { sentence: String, message: String },
    /// A gold label has 0 or more than 2 active classes, outside the
    /// golden-set protocol.
    GoldLabelCardinality { active: usize },
    /// A loss or weight became NaN/inf.
    NonFinite(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension {
                context,
                expected,
                actual,
            } => write!(
                f,
                "{context}: dimension mismatch (expected {expected}, got {actual})"
            ),
            Error::DegenerateTarget => {
                write!(f, "cosine loss target has zero norm")
            }
            Error::EmptyInput(what) => write!(f, "{what} is empty"),
            Error::InvalidParameter { name, message } => {
                write!(f, "invalid {name}: {message}")
            }
            Error::DuplicateEmoticon {
                emoticon,
                first,
                second,
            } => write!(
                f,
                "emoticon {emoticon:?} appears under both {first} and {second}"
            ),
            Error::EmptyEmoticon(class) => {
                write!(f, "class {class} lists an empty emoticon string")
            }
            Error::Provider { sentence, message } => {
                write!(f, "embedding provider failed on {sentence:?}: {message}")
            }
            Error::GoldLabelCardinality { active } => write!(
                f,
                "gold label has {active} active classes; the golden protocol allows 1 or 2"
            ),
            Error::NonFinite(context) => {
                write!(f, "{context} is not finite")
            }
        }
    }
}

impl core::error::Error for Error {}
