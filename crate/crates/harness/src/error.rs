use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{source_name}:{line}:{column}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("malformed table: {0}")]
    Table(String),
    #[error(transparent)]
    Core(#[from] wiretap_commit::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub fn parse(source_name: &str, e: &serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; the position is reported separately.
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        HarnessError::Parse {
            source_name: source_name.to_string(),
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
