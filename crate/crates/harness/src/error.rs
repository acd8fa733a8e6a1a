//! Harness error type with pipeline stage tagging.

use thiserror::Error;

/// Pipeline stage an error surfaced in; failures are reported with this tag
/// so sweep logs point at the responsible phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Dataset,
    UnsupervisedTraining,
    UnsupervisedSnapshot,
    SupervisedTraining,
    SupervisedSnapshot,
    Metrics,
    Output,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Stage::Dataset => "dataset",
            Stage::UnsupervisedTraining => "unsupervised-training",
            Stage::UnsupervisedSnapshot => "unsupervised-snapshot",
            Stage::SupervisedTraining => "supervised-training",
            Stage::SupervisedSnapshot => "supervised-snapshot",
            Stage::Metrics => "metrics",
            Stage::Output => "output",
        };
        write!(f, "{name}")
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    #[error("stage {stage}: {source}")]
    Pipeline {
        stage: Stage,
        #[source]
        source: catperc::Error,
    },

    #[error(transparent)]
    Core(#[from] catperc::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Attaches a stage tag to core errors bubbling out of a pipeline phase.
pub trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T> StageExt<T> for std::result::Result<T, catperc::Error> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|source| HarnessError::Pipeline { stage, source })
    }
}
