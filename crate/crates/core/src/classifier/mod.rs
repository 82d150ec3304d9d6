//! The single-channel convolutional sentence classifier with its three
//! embedding variants (rand / static / non-static).

pub mod checkpoint;
pub mod config;
pub mod encode;
pub mod metrics;
pub mod model;
pub mod train;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use config::{epochs_for, CnnConfig, Variant};
pub use encode::{attach_dropout_masks, encode_batch, EncodedBatch};
pub use metrics::{render_metrics, write_metrics_tsv};
pub use model::{backward, batch_loss, convolve, forward, init_embeddings, CnnModel, FilterBank, ForwardCache, Gradients};
pub use train::{evaluate, predict_row, run_cv, train, CvOutcome, EpochMetrics, EvalReport, TrainOutcome};
