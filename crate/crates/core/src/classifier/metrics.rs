//! Metrics TSV output: `epoch<TAB>split<TAB>loss<TAB>accuracy`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::classifier::train::EpochMetrics;
use crate::error::Result;

/// Renders per-epoch metrics rows. Numbers use a fixed six-decimal
/// format so identical runs serialize byte-identically.
pub fn render_metrics(metrics: &[EpochMetrics]) -> String {
    let mut out = String::new();
    for m in metrics {
        let _ = writeln!(
            out,
            "{}\ttrain\t{:.6}\t{:.6}",
            m.epoch, m.train_loss, m.train_accuracy
        );
        if let (Some(loss), Some(acc)) = (m.test_loss, m.test_accuracy) {
            let _ = writeln!(out, "{}\ttest\t{:.6}\t{:.6}", m.epoch, loss, acc);
        }
    }
    out
}

pub fn write_metrics_tsv(path: &Path, metrics: &[EpochMetrics]) -> Result<()> {
    fs::write(path, render_metrics(metrics))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_is_stable_and_tab_separated() {
        let rows = vec![
            EpochMetrics {
                epoch: 1,
                train_loss: 0.5,
                train_accuracy: 0.75,
                test_loss: Some(0.6),
                test_accuracy: Some(0.7),
            },
            EpochMetrics {
                epoch: 2,
                train_loss: 0.25,
                train_accuracy: 0.9,
                test_loss: None,
                test_accuracy: None,
            },
        ];
        let text = render_metrics(&rows);
        assert_eq!(
            text,
            "1\ttrain\t0.500000\t0.750000\n1\ttest\t0.600000\t0.700000\n2\ttrain\t0.250000\t0.900000\n"
        );
    }
}
