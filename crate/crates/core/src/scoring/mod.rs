//! Linear scorers standing in for neural encoders: hashed sparse features,
//! averaged-perceptron training for each paradigm, and model files.

mod features;
mod model;
mod perceptron;
mod persist;
mod train;

pub use features::{arc_features, distance_bin, feature_id, labeled_feature_id, token_features, FeatureContext};
pub use model::{LinearModel, Paradigm, MAX_FEATURE_BITS, MIN_FEATURE_BITS};
pub use perceptron::AveragedPerceptron;
pub use persist::{load_model, read_model, save_model, write_model, FORMAT_VERSION, MAGIC};
pub use train::{train, train_with_probe, EpochStats, TrainConfig, TrainSummary};
