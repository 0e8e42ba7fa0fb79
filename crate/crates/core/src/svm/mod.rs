//! Soft-margin support vector machine trained with sequential minimal
//! optimization.

mod io;
mod smo;

use serde::{Deserialize, Serialize};

use crate::corpus::Class;
use crate::error::{Error, Result};
use crate::features::{SpaceId, SparseVector};
use crate::scalar::Scalar;

pub use smo::{train_smo, train_smo_traced};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub enum Kernel<F: Scalar> {
    Linear,
    Rbf { gamma: F },
}

impl<F: Scalar> Kernel<F> {
    pub fn eval(&self, x: &SparseVector<F>, y: &SparseVector<F>) -> F {
        match *self {
            Kernel::Linear => x.dot(y),
            Kernel::Rbf { gamma } => (-gamma * x.squared_distance(y)).exp(),
        }
    }
}

/// Trainer settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TrainConfig<F: Scalar> {
    /// Soft-margin penalty, `C > 0`.
    pub c: F,
    pub kernel: Kernel<F>,
    /// KKT conditions are considered met within this slack on `y f(x)`.
    pub kkt_tolerance: F,
    /// Multipliers at or below this value are not kept as support vectors.
    pub alpha_epsilon: F,
    /// Upper bound on sweeps over the training set.
    pub max_passes: usize,
}

impl<F: Scalar> Default for TrainConfig<F> {
    fn default() -> Self {
        TrainConfig {
            c: F::one(),
            kernel: Kernel::Linear,
            kkt_tolerance: F::lit(1e-3),
            alpha_epsilon: F::lit(1e-8),
            max_passes: 5000,
        }
    }
}

impl<F: Scalar> TrainConfig<F> {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: F| v > F::zero() && v.is_finite();
        if !pos(self.c) {
            return Err(Error::invalid("c", format!("must be > 0, got {}", self.c)));
        }
        if let Kernel::Rbf { gamma } = self.kernel {
            if !pos(gamma) {
                return Err(Error::invalid("gamma", format!("must be > 0, got {gamma}")));
            }
        }
        if !pos(self.kkt_tolerance) {
            return Err(Error::invalid("kkt_tolerance", "must be > 0"));
        }
        if !pos(self.alpha_epsilon) {
            return Err(Error::invalid("alpha_epsilon", "must be > 0"));
        }
        if self.max_passes == 0 {
            return Err(Error::invalid("max_passes", "must be at least 1"));
        }
        Ok(())
    }
}

/// One labeled training vector with the id of the document it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainExample<F: Scalar> {
    pub id: String,
    pub x: SparseVector<F>,
    pub y: Class,
}

impl<F: Scalar> TrainExample<F> {
    pub fn new(id: impl Into<String>, x: SparseVector<F>, y: Class) -> Self {
        TrainExample { id: id.into(), x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// A full sweep changed no multiplier.
    Converged,
    MaxPasses,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TrainStats<F: Scalar> {
    pub passes: usize,
    pub steps: usize,
    pub termination: Termination,
    /// Smallest dual-objective gain over all accepted joint steps.
    pub min_step_gain: F,
    pub dual_objective: F,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportVector<F: Scalar> {
    pub id: String,
    pub alpha: F,
    pub y: Class,
    pub x: SparseVector<F>,
}

/// Trained decision function `f(x) = sum alpha_i y_i k(x, x_i) + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel<F: Scalar> {
    pub(crate) config: TrainConfig<F>,
    pub(crate) bias: F,
    pub(crate) support: Vec<SupportVector<F>>,
    pub(crate) space: Option<SpaceId>,
    pub(crate) dim: usize,
    pub(crate) stats: Option<TrainStats<F>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction<F> {
    pub score: F,
    pub label: Class,
}

impl<F: Scalar> Prediction<F> {
    /// Ties go to the legitimate class.
    pub fn from_score(score: F) -> Self {
        let label = if score > F::zero() {
            Class::Spam
        } else {
            Class::Legitimate
        };
        Prediction { score, label }
    }
}

impl<F: Scalar> SvmModel<F> {
    pub fn config(&self) -> &TrainConfig<F> {
        &self.config
    }

    pub fn bias(&self) -> F {
        self.bias
    }

    /// Feature space of the training vectors, if they carried one.
    pub fn space(&self) -> Option<SpaceId> {
        self.space
    }

    /// One past the largest feature position seen in training.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Training statistics; absent on models read back from a dump.
    pub fn stats(&self) -> Option<&TrainStats<F>> {
        self.stats.as_ref()
    }

    pub fn support(&self) -> &[SupportVector<F>] {
        &self.support
    }

    pub fn support_vectors(&self) -> Vec<(&str, F, Class)> {
        self.support
            .iter()
            .map(|sv| (sv.id.as_str(), sv.alpha, sv.y))
            .collect()
    }

    pub fn sv_count(&self) -> usize {
        self.support.len()
    }

    pub fn decision_value(&self, x: &SparseVector<F>) -> F {
        let kernel = self.config.kernel;
        self.support
            .iter()
            .map(|sv| sv.alpha * F::from_i8(sv.y.sign()).unwrap() * kernel.eval(x, &sv.x))
            .sum::<F>()
            + self.bias
    }

    /// Scores `x`; fails when `x` was built against a different feature space.
    pub fn predict(&self, x: &SparseVector<F>) -> Result<Prediction<F>> {
        if let (Some(expected), Some(found)) = (self.space, x.space()) {
            if expected != found {
                return Err(Error::SpaceMismatch {
                    expected: expected.to_string(),
                    found: found.to_string(),
                });
            }
        }
        Ok(Prediction::from_score(self.decision_value(x)))
    }

    /// Primal normal `w = sum alpha_i y_i x_i` as a dense vector of length `dim()`.
    pub fn weight_vector(&self) -> Result<Vec<F>> {
        if self.config.kernel != Kernel::Linear {
            return Err(Error::NonLinearKernel);
        }
        let mut w = vec![F::zero(); self.dim];
        for sv in &self.support {
            let coef = sv.alpha * F::from_i8(sv.y.sign()).unwrap();
            for &(p, v) in sv.x.entries() {
                w[p] = w[p] + coef * v;
            }
        }
        Ok(w)
    }
}
