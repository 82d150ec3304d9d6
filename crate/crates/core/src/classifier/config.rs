//! Classifier hyperparameters and the per-dataset epoch tables.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::schedule::LrSchedule;

/// How the embedding layer is initialized and whether it trains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// All word rows randomly initialized and trained.
    Rand,
    /// Pretrained rows copied in and the whole matrix frozen.
    Static,
    /// Pretrained rows copied in and fine-tuned.
    NonStatic,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Rand => "rand",
            Variant::Static => "static",
            Variant::NonStatic => "non-static",
        }
    }

    pub fn trains_embedding(self) -> bool {
        !matches!(self, Variant::Static)
    }

    pub fn needs_pretrained(self) -> bool {
        !matches!(self, Variant::Rand)
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rand" | "random" => Ok(Variant::Rand),
            "static" => Ok(Variant::Static),
            "non-static" | "nonstatic" | "non_static" => Ok(Variant::NonStatic),
            other => Err(Error::Config(format!(
                "unknown variant {other:?}; expected rand, static, or non-static"
            ))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Full training recipe for the convolutional classifier.
#[derive(Clone, Debug)]
pub struct CnnConfig {
    /// Filter window widths, ascending.
    pub filter_widths: Vec<usize>,
    /// Feature maps per width.
    pub feature_maps: usize,
    /// Dropout rate on the penultimate layer (inverted scaling).
    pub dropout: f64,
    /// l2 coefficient on the final layer's weights and biases.
    pub l2_lambda: f64,
    pub batch_size: usize,
    pub schedule: LrSchedule,
    pub epochs: usize,
    pub variant: Variant,
    /// Word-vector dimension k.
    pub embedding_dim: usize,
    /// Unknown/random word rows draw from U[-init_range, init_range].
    pub init_range: f64,
    pub seed: u64,
}

impl Default for CnnConfig {
    fn default() -> Self {
        CnnConfig {
            filter_widths: vec![3, 4, 5],
            feature_maps: 100,
            dropout: 0.5,
            l2_lambda: 0.15,
            batch_size: 50,
            schedule: LrSchedule::standard(),
            epochs: 25,
            variant: Variant::Rand,
            embedding_dim: 300,
            init_range: 0.5,
            seed: 1,
        }
    }
}

impl CnnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.filter_widths.is_empty() {
            return Err(Error::Config("no filter widths".into()));
        }
        if self.filter_widths.windows(2).any(|w| w[0] >= w[1]) || self.filter_widths[0] == 0 {
            return Err(Error::Config(format!(
                "filter widths must be positive and ascending, got {:?}",
                self.filter_widths
            )));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config(format!(
                "dropout must be in [0, 1), got {}",
                self.dropout
            )));
        }
        if self.l2_lambda < 0.0 {
            return Err(Error::Config("l2 coefficient must be >= 0".into()));
        }
        if self.feature_maps == 0 || self.batch_size == 0 || self.embedding_dim == 0 {
            return Err(Error::Config(
                "feature maps, batch size, and embedding dimension must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn total_maps(&self) -> usize {
        self.filter_widths.len() * self.feature_maps
    }

    pub fn max_width(&self) -> usize {
        *self.filter_widths.last().unwrap()
    }
}

/// Training epochs by variant and dataset. Static always runs 25;
/// the other two follow their published tables, defaulting to 25 for
/// datasets the tables do not mention.
pub fn epochs_for(variant: Variant, dataset: &str) -> usize {
    let d = dataset.to_ascii_lowercase();
    match variant {
        Variant::Static => 25,
        Variant::NonStatic => match d.as_str() {
            "mr" | "sst1" | "sst2" | "subj" => 4,
            "polite" => 10,
            "tweet" | "opi" => 16,
            _ => 25, // trec and anything unlisted
        },
        Variant::Rand => match d.as_str() {
            "mr" | "sst1" => 4,
            "tweet" => 10,
            _ => 25,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epoch_table_matches_the_recipe() {
        assert_eq!(epochs_for(Variant::Static, "mr"), 25);
        assert_eq!(epochs_for(Variant::Static, "trec"), 25);
        assert_eq!(epochs_for(Variant::NonStatic, "mr"), 4);
        assert_eq!(epochs_for(Variant::NonStatic, "subj"), 4);
        assert_eq!(epochs_for(Variant::NonStatic, "polite"), 10);
        assert_eq!(epochs_for(Variant::NonStatic, "tweet"), 16);
        assert_eq!(epochs_for(Variant::NonStatic, "opi"), 16);
        assert_eq!(epochs_for(Variant::NonStatic, "trec"), 25);
        assert_eq!(epochs_for(Variant::Rand, "mr"), 4);
        assert_eq!(epochs_for(Variant::Rand, "sst1"), 4);
        assert_eq!(epochs_for(Variant::Rand, "tweet"), 10);
        assert_eq!(epochs_for(Variant::Rand, "subj"), 25);
        assert_eq!(epochs_for(Variant::Rand, "trec"), 25);
    }

    #[test]
    fn defaults_validate() {
        assert!(CnnConfig::default().validate().is_ok());
        assert_eq!(CnnConfig::default().total_maps(), 300);
        assert_eq!(CnnConfig::default().max_width(), 5);
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut c = CnnConfig::default();
        c.dropout = 1.0;
        assert!(c.validate().is_err());
        let mut c = CnnConfig::default();
        c.filter_widths = vec![3, 3];
        assert!(c.validate().is_err());
        let mut c = CnnConfig::default();
        c.filter_widths = vec![];
        assert!(c.validate().is_err());
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("rand".parse::<Variant>().unwrap(), Variant::Rand);
        assert_eq!("non-static".parse::<Variant>().unwrap(), Variant::NonStatic);
        assert!("multichannel".parse::<Variant>().is_err());
    }
}
