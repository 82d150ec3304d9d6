//! Stepped learning-rate schedule used by classifier training.

/// Piecewise-constant, non-increasing learning rate over 1-based epochs:
/// the base rate for epochs 1..=8, a reduced rate through epoch 16, and a
/// final rate afterwards.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LrSchedule {
    pub base: f64,
    pub mid: f64,
    pub late: f64,
    pub first_drop: usize,
    pub second_drop: usize,
}

impl LrSchedule {
    /// The training schedule: 0.001, then 0.0005 after 8 epochs, then
    /// 0.00005 after 16.
    pub fn standard() -> Self {
        LrSchedule {
            base: 0.001,
            mid: 0.0005,
            late: 0.00005,
            first_drop: 8,
            second_drop: 16,
        }
    }

    /// Rate for a 1-based epoch index.
    pub fn rate_for_epoch(&self, epoch: usize) -> f64 {
        if epoch <= self.first_drop {
            self.base
        } else if epoch <= self.second_drop {
            self.mid
        } else {
            self.late
        }
    }
}

impl Default for LrSchedule {
    fn default() -> Self {
        Self::standard()
    }
}
