//! Budget managers: given a utility value and a budget b, decide whether to
//! acquire a label. Variable Uncertainty, Split, fixed-threshold Random, and
//! a quantile filter for unbounded utilities.

use std::collections::VecDeque;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::utility::random_utility;

/// Defaults recommended for Variable Uncertainty.
pub const DEFAULT_STEP: f64 = 0.01;
pub const DEFAULT_WINDOW: usize = 256;
pub const DEFAULT_SPLIT_NU: f64 = 0.5;
pub const DEFAULT_QUANTILE_WINDOW: usize = 256;

/// Exponential-style recursion tracking the recent labeling cost:
/// b_hat <- ((w-1) b_hat + lambda) / w.
fn update_spent(spent: f64, window: usize, labeled: bool) -> f64 {
    let w = window as f64;
    ((w - 1.0) * spent + if labeled { 1.0 } else { 0.0 }) / w
}

/// State for Variable Uncertainty (also reused by Split).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarUnState {
    pub theta: f64,
    pub spent: f64,
    pub step: f64,
    pub window: usize,
}

impl VarUnState {
    pub fn new(step: f64, window: usize) -> Self {
        assert!(step > 0.0 && step <= 1.0);
        assert!(window > 0);
        Self {
            theta: 1.0,
            spent: 0.0,
            step,
            window,
        }
    }
}

impl Default for VarUnState {
    fn default() -> Self {
        Self::new(DEFAULT_STEP, DEFAULT_WINDOW)
    }
}

/// One Variable Uncertainty step: adapt the threshold while under budget,
/// skip entirely while over, then update the spending estimate.
pub fn varun_decide(mut state: VarUnState, u: f64, b: f64) -> (bool, VarUnState) {
    let labeled = if state.spent < b {
        if 1.0 - u < state.theta {
            state.theta *= 1.0 - state.step;
            true
        } else {
            state.theta *= 1.0 + state.step;
            false
        }
    } else {
        false
    };
    state.spent = update_spent(state.spent, state.window, labeled);
    (labeled, state)
}

/// Split strategy: with probability nu the decision is random (uniform draw
/// against b), otherwise exactly Variable Uncertainty. The threshold moves
/// only in the VarUn branch; spending is tracked in both.
pub fn split_decide(
    mut state: VarUnState,
    u: f64,
    b: f64,
    nu: f64,
    eta: f64,
    rng: &mut ChaCha8Rng,
) -> (bool, VarUnState) {
    assert!(nu > 0.0 && nu < 1.0);
    if eta > nu {
        return varun_decide(state, u, b);
    }
    let labeled = state.spent < b && random_utility(rng) < b;
    state.spent = update_spent(state.spent, state.window, labeled);
    (labeled, state)
}

/// Spending-only state for the fixed-threshold random manager.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpentState {
    pub spent: f64,
    pub window: usize,
}

impl Default for SpentState {
    fn default() -> Self {
        Self::new(DEFAULT_WINDOW)
    }
}

impl SpentState {
    pub fn new(window: usize) -> Self {
        Self {
            spent: 0.0,
            window,
        }
    }
}

/// Random manager: label when 1 - u < b, gated by the spending estimate.
pub fn random_decide(mut state: SpentState, u_random: f64, b: f64) -> (bool, SpentState) {
    let labeled = state.spent < b && 1.0 - u_random < b;
    state.spent = update_spent(state.spent, state.window, labeled);
    (labeled, state)
}

/// Ring-buffer quantile filter for unbounded utilities: label when the
/// utility reaches the empirical (1-b) quantile of the recent window,
/// gated by the same spending estimate as the other managers.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileFilterState {
    window_utilities: VecDeque<f64>,
    capacity: usize,
    pub spent: f64,
    pub spend_window: usize,
}

impl QuantileFilterState {
    pub fn new(capacity: usize, spend_window: usize) -> Self {
        assert!(capacity > 0);
        Self {
            window_utilities: VecDeque::with_capacity(capacity),
            capacity,
            spent: 0.0,
            spend_window,
        }
    }

    pub fn buffered(&self) -> usize {
        self.window_utilities.len()
    }

    /// Current threshold: the (1-b) quantile of the buffered utilities,
    /// linearly interpolated between order statistics.
    pub fn threshold(&self, b: f64) -> f64 {
        if self.window_utilities.is_empty() {
            return f64::NEG_INFINITY;
        }
        let mut sorted: Vec<f64> = self.window_utilities.iter().copied().collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        quantile_linear(&sorted, 1.0 - b)
    }
}

impl Default for QuantileFilterState {
    fn default() -> Self {
        Self::new(DEFAULT_QUANTILE_WINDOW, DEFAULT_WINDOW)
    }
}

/// Linear-interpolation (inclusive) quantile of pre-sorted values.
pub fn quantile_linear(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0);
    let q = q.clamp(0.0, 1.0);
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

pub fn quantile_decide(mut state: QuantileFilterState, u: f64, b: f64) -> (bool, QuantileFilterState) {
    debug_assert!(u.is_finite());
    if state.window_utilities.len() == state.capacity {
        state.window_utilities.pop_front();
    }
    state.window_utilities.push_back(u);
    let theta = state.threshold(b);
    let labeled = state.spent < b && u >= theta;
    state.spent = update_spent(state.spent, state.spend_window, labeled);
    (labeled, state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::RngSeed;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn varun_label_branch() {
        let state = VarUnState::new(0.01, 256);
        let (labeled, next) = varun_decide(state, 0.5, 0.2);
        assert!(labeled);
        assert_eq!(next.theta, 0.99);
        assert_eq!(next.spent, 1.0 / 256.0);
    }

    #[test]
    fn varun_skip_branch_raises_threshold() {
        let state = VarUnState {
            theta: 0.3,
            spent: 0.0,
            step: 0.01,
            window: 256,
        };
        let (labeled, next) = varun_decide(state, 0.5, 0.2);
        assert!(!labeled);
        assert!((next.theta - 0.303).abs() < 1e-15);
        assert_eq!(next.spent, 0.0);
    }

    #[test]
    fn varun_over_budget_skips_without_touching_theta() {
        let state = VarUnState {
            theta: 1.0,
            spent: 0.25,
            step: 0.01,
            window: 256,
        };
        let (labeled, next) = varun_decide(state.clone(), 0.9, 0.2);
        assert!(!labeled);
        assert_eq!(next.theta, 1.0);
        assert_eq!(next.spent, 255.0 * 0.25 / 256.0);
    }

    #[test]
    fn split_varun_branch_matches_varun() {
        let state = VarUnState::new(0.01, 256);
        let mut rng = RngSeed(0).stream(0);
        let (l1, s1) = split_decide(state.clone(), 0.5, 0.2, 0.5, 0.9, &mut rng);
        let (l2, s2) = varun_decide(state, 0.5, 0.2);
        assert_eq!(l1, l2);
        assert_eq!(s1, s2);
    }

    #[test]
    fn split_random_branch_leaves_theta_alone() {
        let state = VarUnState::new(0.01, 256);
        // find a seed whose first draw is below b=0.2
        let mut seed = 0u64;
        loop {
            let mut rng = RngSeed(seed).stream(0);
            if random_utility(&mut rng) < 0.2 {
                break;
            }
            seed += 1;
        }
        let mut rng = RngSeed(seed).stream(0);
        let (labeled, next) = split_decide(state, 0.5, 0.2, 0.5, 0.1, &mut rng);
        assert!(labeled);
        assert_eq!(next.theta, 1.0);
        assert_eq!(next.spent, 1.0 / 256.0);
    }

    #[test]
    fn split_random_branch_budget_gate() {
        let state = VarUnState {
            theta: 1.0,
            spent: 0.5,
            step: 0.01,
            window: 256,
        };
        let mut rng = RngSeed(0).stream(0);
        let (labeled, _) = split_decide(state, 0.99, 0.2, 0.5, 0.1, &mut rng);
        assert!(!labeled);
    }

    #[test]
    fn random_decide_threshold() {
        let (l, _) = random_decide(SpentState::new(256), 0.95, 0.1);
        assert!(l);
        let (l, _) = random_decide(SpentState::new(256), 0.5, 0.1);
        assert!(!l);
    }

    #[test]
    fn random_decide_long_run_rate() {
        // binomial simulation: fraction within b +/- 0.03 over 2000 steps
        let b = 0.2;
        let mut rng = RngSeed(17).stream(1);
        let mut state = SpentState::new(256);
        let mut labeled = 0usize;
        let n = 2000;
        for _ in 0..n {
            let u = random_utility(&mut rng);
            let (l, next) = random_decide(state, u, b);
            state = next;
            labeled += l as usize;
        }
        let rate = labeled as f64 / n as f64;
        assert!((rate - b).abs() < 0.03, "rate {rate}");
    }

    #[test]
    fn quantile_first_sample_labels_when_under_budget() {
        let state = QuantileFilterState::new(256, 256);
        let (labeled, next) = quantile_decide(state, 3.7, 0.1);
        assert!(labeled);
        assert_eq!(next.buffered(), 1);
    }

    #[test]
    fn quantile_above_ninetieth_percentile_labels() {
        let mut state = QuantileFilterState::new(256, 256);
        for i in 1..=100 {
            state.window_utilities.push_back(i as f64);
        }
        // 90th percentile of 1..=100 (linear interpolation) = 90.1
        assert!((state.threshold(0.1) - 90.1).abs() < 1e-12);
        let (labeled, _) = quantile_decide(state, 99.5, 0.1);
        assert!(labeled);
    }

    #[test]
    fn quantile_stationary_rate() {
        let b = 0.2;
        let mut rng = RngSeed(23).stream(2);
        let mut state = QuantileFilterState::new(256, 256);
        let mut labeled = 0usize;
        let n = 2000;
        for _ in 0..n {
            let u: f64 = rng.gen_range(0.0..10.0);
            let (l, next) = quantile_decide(state, u, b);
            state = next;
            labeled += l as usize;
        }
        let rate = labeled as f64 / n as f64;
        assert!((rate - b).abs() < 0.05, "rate {rate}");
    }

    #[test]
    fn quantile_rank_property_on_distinct_fill() {
        // with a full buffer of distinct values, exactly the top-b fraction
        // of a fresh permutation clears the threshold
        let mut state = QuantileFilterState::new(100, 1_000_000);
        for i in 0..100 {
            state.window_utilities.push_back(i as f64);
        }
        let b = 0.2;
        let theta = state.threshold(b);
        let above = (0..100).filter(|&i| i as f64 >= theta).count();
        assert!((19..=21).contains(&above), "above {above}");
    }

    proptest! {
        #[test]
        fn spending_recursion_matches_closed_form(
            decisions in proptest::collection::vec(any::<bool>(), 1..60),
            w in 2usize..300,
        ) {
            let mut spent = 0.0;
            for &l in &decisions {
                spent = update_spent(spent, w, l);
            }
            // closed form: sum_i lambda_i (w-1)^(t-i) / w^(t-i+1)
            let t = decisions.len();
            let wf = w as f64;
            let mut direct = 0.0;
            for (i, &l) in decisions.iter().enumerate() {
                if l {
                    let age = (t - 1 - i) as u32;
                    direct += (wf - 1.0).powi(age as i32) / wf.powi(age as i32 + 1);
                }
            }
            prop_assert!((spent - direct).abs() < 1e-12);
        }

        #[test]
        fn varun_budget_compliance(seed in 0u64..50, bi in 0usize..8) {
            let b = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4][bi];
            let mut rng = RngSeed(seed).stream(3);
            let mut state = VarUnState::default();
            let mut labeled = 0usize;
            let n = 2000;
            for _ in 0..n {
                let u = random_utility(&mut rng);
                let (l, next) = varun_decide(state, u, b);
                state = next;
                labeled += l as usize;
            }
            let rate = labeled as f64 / n as f64;
            prop_assert!((rate - b).abs() < 0.05, "b {} rate {}", b, rate);
        }

        #[test]
        fn theta_trace_is_deterministic(seed in 0u64..100) {
            let mut rng1 = RngSeed(seed).stream(4);
            let us: Vec<f64> = (0..500).map(|_| random_utility(&mut rng1)).collect();
            let run = |us: &[f64]| {
                let mut st = VarUnState::default();
                let mut trace = Vec::new();
                for &u in us {
                    let (l, next) = varun_decide(st, u, 0.15);
                    st = next;
                    trace.push((l, st.theta.to_bits(), st.spent.to_bits()));
                }
                trace
            };
            prop_assert_eq!(run(&us), run(&us));
        }
    }
}
