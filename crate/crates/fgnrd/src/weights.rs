//! Round-weight schedules. Uniform and linear weights use exact integer
//! numerators so the cumulative sums carry no drift; the exponential-ratio
//! schedule fixes alpha_t / A_t = beta for t >= 2 and reconstructs
//! alpha_t = beta/(1-beta) * A_{t-1} recursively.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WeightSchedule {
    /// alpha_t = 1.
    Uniform,
    /// alpha_t = t, so A_t = t(t+1)/2.
    Linear,
    /// alpha_1 given; alpha_t/A_t = beta for t >= 2, with beta in (0,1).
    ExpRatio { alpha1: f64, beta: f64 },
    /// Per-round weights chosen by the first mover while the dynamic runs.
    Adaptive,
}

impl WeightSchedule {
    pub fn is_adaptive(&self) -> bool {
        matches!(self, WeightSchedule::Adaptive)
    }

    fn validate(&self) -> Result<()> {
        if let WeightSchedule::ExpRatio { alpha1, beta } = self {
            if !(*alpha1 > 0.0) || !alpha1.is_finite() {
                return Err(Error::InvalidHyperparameter(format!(
                    "exp-ratio schedule needs alpha1 > 0, got {alpha1}"
                )));
            }
            if !(*beta > 0.0 && *beta < 1.0) {
                return Err(Error::InvalidHyperparameter(format!(
                    "exp-ratio schedule needs beta in (0,1), got {beta}"
                )));
            }
        }
        Ok(())
    }

    /// alpha_t for a 1-based round index. Errors on adaptive schedules, whose
    /// weights exist only in a realized trace.
    pub fn alpha(&self, t: usize) -> Result<f64> {
        assert!(t >= 1, "rounds are 1-based");
        self.validate()?;
        match self {
            WeightSchedule::Uniform => Ok(1.0),
            WeightSchedule::Linear => Ok(t as f64),
            WeightSchedule::ExpRatio { alpha1, beta } => {
                let mut cum = *alpha1;
                let mut a = *alpha1;
                for _ in 2..=t {
                    a = beta / (1.0 - beta) * cum;
                    cum += a;
                }
                Ok(a)
            }
            WeightSchedule::Adaptive => Err(Error::AdaptiveWeightsUnavailable),
        }
    }

    /// A_t = sum of alpha_1..alpha_t.
    pub fn cum(&self, t: usize) -> Result<f64> {
        assert!(t >= 1, "rounds are 1-based");
        self.validate()?;
        match self {
            WeightSchedule::Uniform => Ok(t as f64),
            WeightSchedule::Linear => Ok((t * (t + 1)) as f64 / 2.0),
            WeightSchedule::ExpRatio { alpha1, beta } => {
                let mut cum = *alpha1;
                for _ in 2..=t {
                    cum += beta / (1.0 - beta) * cum;
                }
                Ok(cum)
            }
            WeightSchedule::Adaptive => Err(Error::AdaptiveWeightsUnavailable),
        }
    }

    /// Stateful per-round generator; O(1) per round for every kind.
    pub fn sequence(&self) -> WeightSeq {
        WeightSeq {
            schedule: self.clone(),
            t: 0,
            cum: 0.0,
        }
    }
}

/// Yields (alpha_t, A_t) pairs for t = 1, 2, ...
pub struct WeightSeq {
    schedule: WeightSchedule,
    t: usize,
    cum: f64,
}

impl WeightSeq {
    pub fn next_weight(&mut self) -> Result<(f64, f64)> {
        self.schedule.validate()?;
        self.t += 1;
        let alpha = match &self.schedule {
            WeightSchedule::Uniform => 1.0,
            WeightSchedule::Linear => self.t as f64,
            WeightSchedule::ExpRatio { alpha1, beta } => {
                if self.t == 1 {
                    *alpha1
                } else {
                    beta / (1.0 - beta) * self.cum
                }
            }
            WeightSchedule::Adaptive => return Err(Error::AdaptiveWeightsUnavailable),
        };
        self.cum += alpha;
        Ok((alpha, self.cum))
    }

    /// Feeds an externally chosen weight (adaptive schedules).
    pub fn push_weight(&mut self, alpha: f64) -> Result<(f64, f64)> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidHyperparameter(format!(
                "round weight must be positive and finite, got {alpha}"
            )));
        }
        self.t += 1;
        self.cum += alpha;
        Ok((alpha, self.cum))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_cum_is_triangular() {
        let w = WeightSchedule::Linear;
        for t in 1..=50 {
            assert_eq!(w.cum(t).unwrap(), (t * (t + 1)) as f64 / 2.0);
            assert_eq!(w.alpha(t).unwrap(), t as f64);
        }
    }

    #[test]
    fn exp_ratio_fixes_alpha_over_cum() {
        let w = WeightSchedule::ExpRatio {
            alpha1: 0.25,
            beta: 0.125,
        };
        let mut seq = w.sequence();
        let (a1, c1) = seq.next_weight().unwrap();
        assert_eq!(a1, 0.25);
        assert_eq!(c1, 0.25);
        for _ in 2..=40 {
            let (a, c) = seq.next_weight().unwrap();
            assert!((a / c - 0.125).abs() < 1e-14);
        }
    }

    #[test]
    fn sequence_matches_closed_forms() {
        for w in [
            WeightSchedule::Uniform,
            WeightSchedule::Linear,
            WeightSchedule::ExpRatio {
                alpha1: 0.5,
                beta: 0.3,
            },
        ] {
            let mut seq = w.sequence();
            for t in 1..=20 {
                let (a, c) = seq.next_weight().unwrap();
                assert!((a - w.alpha(t).unwrap()).abs() <= 1e-12 * a.abs());
                assert!((c - w.cum(t).unwrap()).abs() <= 1e-12 * c.abs());
            }
        }
    }

    #[test]
    fn cumulative_weights_strictly_increase() {
        let w = WeightSchedule::ExpRatio {
            alpha1: 1.0,
            beta: 0.5,
        };
        let mut seq = w.sequence();
        let mut prev = 0.0;
        for _ in 1..=30 {
            let (a, c) = seq.next_weight().unwrap();
            assert!(a > 0.0);
            assert!(c > prev);
            prev = c;
        }
    }

    #[test]
    fn exp_ratio_rejects_bad_parameters() {
        for bad in [
            WeightSchedule::ExpRatio {
                alpha1: 1.0,
                beta: 1.5,
            },
            WeightSchedule::ExpRatio {
                alpha1: 1.0,
                beta: 0.0,
            },
            WeightSchedule::ExpRatio {
                alpha1: -1.0,
                beta: 0.5,
            },
            WeightSchedule::ExpRatio {
                alpha1: f64::NAN,
                beta: 0.5,
            },
        ] {
            assert!(bad.alpha(1).is_err(), "{bad:?}");
            assert!(bad.sequence().next_weight().is_err());
        }
    }

    #[test]
    fn adaptive_requires_materialized_weights() {
        assert!(WeightSchedule::Adaptive.alpha(1).is_err());
        let mut seq = WeightSchedule::Adaptive.sequence();
        assert!(seq.next_weight().is_err());
        assert!(seq.push_weight(2.0).is_ok());
        assert!(seq.push_weight(-1.0).is_err());
    }
}
