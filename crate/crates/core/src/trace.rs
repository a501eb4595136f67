//! Training-time AUC bookkeeping shared by the linear and kernel solvers.

/// One AUC measurement taken during training.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AucCheck {
    /// Iteration at which the check ran (0 for the baseline entry).
    pub iteration: u64,
    /// Training-set ROC-AUC at that point.
    pub auc: f64,
}

/// Record of the periodic AUC checks a training run performed.
#[derive(Debug, Clone)]
pub struct TrainingTrace {
    /// All checks in order. The first entry is the baseline
    /// (iteration 0, AUC 0.5); subsequent iterations are multiples of
    /// the stop parameter.
    pub checks: Vec<AucCheck>,
    /// True when the run stopped at a non-improving check before
    /// exhausting its iteration budget.
    pub halted_early: bool,
    /// 1-based ordinals (counted over post-baseline checks) at which the
    /// AUC strictly exceeded the best value seen so far.
    pub improvements: Vec<usize>,
}

impl TrainingTrace {
    /// Number of post-baseline checks performed.
    pub fn checks_run(&self) -> usize {
        self.checks.len().saturating_sub(1)
    }
}

/// Halt policy for the periodic checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltRule {
    /// Stop at the first check whose AUC fails to beat the running best.
    OnNoImprovement,
    /// Keep going regardless (probe runs for the stop-parameter
    /// estimator).
    Never,
}

/// Running-maximum monitor implementing the halt rule: a check must
/// strictly exceed the best AUC recorded so far (baseline 0.5) for
/// training to continue. The first check only records — a run gets one
/// measurement before the rule can stop it; stopping against the 0.5
/// baseline alone would routinely return near-untrained weights.
pub(crate) struct AucMonitor {
    best: f64,
    checks: Vec<AucCheck>,
    improvements: Vec<usize>,
    rule: HaltRule,
}

impl AucMonitor {
    pub fn new(rule: HaltRule) -> Self {
        AucMonitor {
            best: 0.5,
            checks: vec![AucCheck {
                iteration: 0,
                auc: 0.5,
            }],
            improvements: Vec::new(),
            rule,
        }
    }

    /// Record a check; returns true when training must halt.
    pub fn record(&mut self, iteration: u64, auc: f64) -> bool {
        self.checks.push(AucCheck { iteration, auc });
        let ordinal = self.checks.len() - 1;
        if auc > self.best {
            self.best = auc;
            self.improvements.push(ordinal);
            false
        } else {
            self.rule == HaltRule::OnNoImprovement && ordinal >= 2
        }
    }

    pub fn into_trace(self, halted_early: bool) -> TrainingTrace {
        TrainingTrace {
            checks: self.checks,
            halted_early,
            improvements: self.improvements,
        }
    }
}
