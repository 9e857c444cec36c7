//! Scalar abstraction shared by the scoring code.
//!
//! Probabilities, log-scores and configuration weights are generic over
//! [`Scalar`] so the transducer can run in `f64` (the default aliases) or
//! `f32`. Counts stay integral and accuracies stay exact ratios.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type usable for channel and language-model scores.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + Serialize + DeserializeOwned + 'static
{
    /// Converts an `f64` literal, panicking only if the value is not representable at all.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar type")
    }

    /// Slack used when comparing search bounds with exact scores.
    fn bound_slack(reference: Self) -> Self {
        reference.abs().max(Self::one()) * Self::epsilon() * Self::lit(256.0)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Exact token-level accuracy: `correct / total` kept as integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct Accuracy {
    pub correct: u64,
    pub total: u64,
}

impl Accuracy {
    pub fn new(correct: u64, total: u64) -> Self {
        debug_assert!(correct <= total);
        Self { correct, total }
    }

    /// Exact ratio. An empty evaluation counts as fully accurate.
    pub fn ratio(&self) -> Ratio<u64> {
        if self.total == 0 {
            Ratio::from_integer(1)
        } else {
            Ratio::new(self.correct, self.total)
        }
    }

    pub fn value<F: Scalar>(&self) -> F {
        if self.total == 0 {
            F::one()
        } else {
            F::from_count(self.correct) / F::from_count(self.total)
        }
    }

    pub fn merge(self, other: Accuracy) -> Accuracy {
        Accuracy::new(self.correct + other.correct, self.total + other.total)
    }
}

impl Display for Accuracy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{} ({:.4})", self.correct, self.total, self.value::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_is_exact() {
        let acc = Accuracy::new(7, 10);
        assert_eq!(acc.ratio(), Ratio::new(7, 10));
        assert_eq!(acc.value::<f64>(), 0.7);
        assert!((acc.value::<f32>() - 0.7).abs() < 1e-6);
    }

    #[test]
    fn empty_is_one() {
        assert_eq!(Accuracy::new(0, 0).ratio(), Ratio::from_integer(1));
    }

    #[test]
    fn slack_scales() {
        assert!(f64::bound_slack(-100.0) > f64::bound_slack(-1.0));
        assert!(f32::bound_slack(0.0) > 0.0);
    }
}
