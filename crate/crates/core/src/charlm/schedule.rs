use crate::{Error, Result};

/// Minimum decrease that counts as an improvement.
pub const IMPROVEMENT_EPS: f64 = 1e-4;

/// Patience-based annealing on a lower-is-better validation metric.
///
/// After `patience` consecutive checkpoints without an improvement of more
/// than [`IMPROVEMENT_EPS`], the learning rate is divided by `factor` and the
/// counter restarts.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnealSchedule {
    pub best: f64,
    pub bad_count: usize,
    pub lr: f64,
    pub patience: usize,
    pub factor: f64,
}

impl AnnealSchedule {
    pub fn new(lr: f64, factor: f64, patience: usize) -> Result<Self> {
        if !(lr > 0.0) || !(factor > 1.0) || patience == 0 {
            return Err(Error::Input(format!(
                "invalid schedule: lr {lr}, factor {factor}, patience {patience}"
            )));
        }
        Ok(AnnealSchedule {
            best: f64::INFINITY,
            bad_count: 0,
            lr,
            patience,
            factor,
        })
    }

    /// Records a new metric value; returns whether it improved on the best.
    pub fn observe(&mut self, metric: f64) -> bool {
        if metric < self.best - IMPROVEMENT_EPS {
            self.best = metric;
            self.bad_count = 0;
            return true;
        }
        self.bad_count += 1;
        if self.bad_count == self.patience {
            self.lr /= self.factor;
            self.bad_count = 0;
        }
        false
    }
}
