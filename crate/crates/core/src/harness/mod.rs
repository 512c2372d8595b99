//! Quantization-step sweep over a corpus: orchestration, tabulation and plots.

pub mod config;
pub mod corpus;
pub mod report;
pub mod sweep;

pub use config::ConfigFile;
pub use corpus::synthetic_corpus;
pub use report::{emit_csv, emit_plots, write_outputs, CSV_FILE};
pub use sweep::{run_sweep, Skip, SweepError, SweepInput, SweepOutcome, SweepRow, SweepSpec, DEFAULT_DELTAS};
