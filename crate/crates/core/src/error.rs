use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("sweep grid has no axes")]
    EmptyGrid,
    #[error("no records to summarize")]
    EmptyRecords,
    #[error("qubit count overflows 128 bits")]
    Overflow,
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
