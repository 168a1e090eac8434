use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("k must satisfy 1 <= k <= {max}, got {k}")]
    LevelCount { k: u32, max: u32 },
    #[error("h must be at least 1, got {0}")]
    TrialParam(u32),
    #[error("c must be a positive finite number, got {0}")]
    Constant(f64),
    #[error("budget scale must be a positive finite number, got {0}")]
    BudgetScale(f64),
    #[error("center probability override must lie in [0, 1], got {0}")]
    CenterProb(f64),
    #[error("graph must have at least one node")]
    NoNodes,
}

/// Largest accepted `k`; keeps `2^(k+1)` and `3^k` far from overflow.
pub const MAX_LEVELS: u32 = 16;

/// Run configuration of the sampler.
///
/// `delta = 1 / (2^(k+1) - 1)` and `epsilon = 1 / h` are derived on demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub k: u32,
    pub h: u32,
    pub c: f64,
    pub seed: u64,
    /// Multiplier on the per-trial sample budget only. `1.0` is the faithful setting.
    pub budget_scale: f64,
    /// Test hook replacing every level's center probability.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_prob_override: Option<f64>,
}

impl Params {
    pub fn new(n: usize, k: u32, h: u32, c: f64, seed: u64) -> Result<Self, ParamError> {
        if n == 0 {
            return Err(ParamError::NoNodes);
        }
        if !(1..=MAX_LEVELS).contains(&k) {
            return Err(ParamError::LevelCount { k, max: MAX_LEVELS });
        }
        if h == 0 {
            return Err(ParamError::TrialParam(h));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(ParamError::Constant(c));
        }
        Ok(Self {
            n,
            k,
            h,
            c,
            seed,
            budget_scale: 1.0,
            center_prob_override: None,
        })
    }

    pub fn with_budget_scale(mut self, scale: f64) -> Result<Self, ParamError> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(ParamError::BudgetScale(scale));
        }
        self.budget_scale = scale;
        Ok(self)
    }

    pub fn with_center_prob(mut self, p: f64) -> Result<Self, ParamError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ParamError::CenterProb(p));
        }
        self.center_prob_override = Some(p);
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn delta(&self) -> f64 {
        1.0 / ((1u64 << (self.k + 1)) - 1) as f64
    }

    pub fn epsilon(&self) -> f64 {
        1.0 / f64::from(self.h)
    }

    pub fn log_n(&self) -> f64 {
        (self.n as f64).log2()
    }

    /// `p_j = n^(-2^j delta)`, unless overridden.
    pub fn center_prob(&self, j: usize) -> f64 {
        self.center_prob_override
            .unwrap_or_else(|| (self.n as f64).powf(-self.level_exponent(j)))
    }

    /// `prod_{i <= j} p_i`.
    pub fn cumulative_center_prob(&self, j: usize) -> f64 {
        (0..=j).map(|i| self.center_prob(i)).product()
    }

    /// `2^j delta`.
    pub fn level_exponent(&self, j: usize) -> f64 {
        (1u64 << j) as f64 * self.delta()
    }

    /// `2 * 3^k - 1`.
    pub fn stretch_bound(&self) -> u64 {
        2 * 3u64.pow(self.k) - 1
    }

    /// Whether `k <= log log n` and `h <= log n` hold.
    pub fn within_guarantee_range(&self) -> bool {
        let log_n = self.log_n();
        f64::from(self.k) <= log_n.log2() && f64::from(self.h) <= log_n
    }

    /// False when the budget scale or a center-probability override is active.
    pub fn is_faithful(&self) -> bool {
        self.budget_scale == 1.0 && self.center_prob_override.is_none()
    }
}

/// Per-level budgets derived from [`Params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelBudgets {
    pub trial_count: u32,
    pub samples_per_trial: u64,
    pub neighbor_threshold: u64,
    pub center_prob: f64,
}

// Guards ceilings against values like 2.0000000000000004 that are integers in exact arithmetic.
fn ceil_tolerant(x: f64) -> u64 {
    let r = x.round();
    let y = if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    };
    if y >= u64::MAX as f64 {
        u64::MAX
    } else {
        y.max(0.0) as u64
    }
}

/// Budgets of level `j`: `2h` trials of `ceil(scale * c^2 * n^(2^j delta + eps) * log^3 n)`
/// samples, a neighbor threshold of `ceil(c * n^(2^j delta) * log n)`, and the
/// center probability `n^(-2^j delta)`. Logarithms are base 2.
pub fn derive_budgets(p: &Params, j: usize) -> LevelBudgets {
    let n = p.n as f64;
    let log_n = p.log_n();
    let exponent = p.level_exponent(j);
    let samples = p.budget_scale * p.c * p.c * n.powf(exponent + p.epsilon()) * log_n.powi(3);
    let threshold = p.c * n.powf(exponent) * log_n;
    LevelBudgets {
        trial_count: 2 * p.h,
        samples_per_trial: ceil_tolerant(samples),
        neighbor_threshold: ceil_tolerant(threshold),
        center_prob: p.center_prob(j),
    }
}
