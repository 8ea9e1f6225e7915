use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Two operands (or an operand and a group) do not live in the same group.
    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A search ran past its explicit budget; never silently truncated.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// A color outside the range the ideal's parameter sequences cover.
    #[error("palette exhausted: color {color} but only {available} parameter entries")]
    PaletteExhausted { color: String, available: usize },

    /// Plain color handed to a product-coded ideal or vice versa.
    #[error("color kind mismatch: {0}")]
    ColorKind(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
