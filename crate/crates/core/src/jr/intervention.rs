use serde::{Deserialize, Serialize};

use super::JrParams;
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// Smallest network age, in multiples of the window length, for which the
/// first-order intervention formulas are trusted without a warning.
pub const MIN_AGE_TO_WINDOW: usize = 20;

fn zero<T: Scalar>() -> T {
    T::zero()
}

/// Temporary changes to the similar/dissimilar split of initial links for
/// arrivals `T + 1 ..= T + I`. The sum `N_S + N_D` is unchanged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct InterventionPlan<T> {
    /// Network age (node count) when the window opens.
    #[serde(rename = "T")]
    pub t: usize,
    /// Window length.
    #[serde(rename = "I")]
    pub window: usize,
    /// Change of `N_S` for arrival `T + i`, `i = 1..=I`.
    pub delta_ns: Vec<T>,
    /// Bound on the per-step change of integration.
    #[serde(default = "zero")]
    pub rate_limit: T,
}

impl<T: Scalar> InterventionPlan<T> {
    pub fn constant(t: usize, window: usize, delta: T) -> Self {
        Self { t, window, delta_ns: vec![delta; window], rate_limit: T::zero() }
    }

    /// Checks feasibility against `params`; returns advisory warnings.
    pub fn validate(&self, params: &JrParams<T>) -> Result<Vec<String>> {
        if self.delta_ns.len() != self.window {
            return Err(Error::InvalidParams(format!(
                "plan has {} changes for a window of {}",
                self.delta_ns.len(),
                self.window
            )));
        }
        if self.t == 0 {
            return Err(Error::InvalidParams("network age T must be positive".into()));
        }
        for (i, &d) in self.delta_ns.iter().enumerate() {
            if params.n_s + d < T::zero() || params.n_d - d < T::zero() {
                return Err(Error::Infeasible(format!(
                    "step {}: change {d:?} leaves a negative initial link count",
                    i + 1
                )));
            }
        }
        let mut warnings = Vec::new();
        if self.t < MIN_AGE_TO_WINDOW * self.window {
            warnings.push(format!(
                "T = {} is below {MIN_AGE_TO_WINDOW} I = {}; first-order formulas may be inaccurate",
                self.t,
                MIN_AGE_TO_WINDOW * self.window
            ));
        }
        Ok(warnings)
    }
}

/// Per-intervention effects and their sum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EffectBreakdown<T> {
    pub per_step: Vec<T>,
    pub total: T,
    pub warnings: Vec<String>,
}

fn breakdown<T: Scalar>(per_step: Vec<T>, warnings: Vec<String>) -> EffectBreakdown<T> {
    let total = per_step.iter().fold(T::zero(), |a, &b| a + b);
    EffectBreakdown { per_step, total, warnings }
}

/// Expected change of integration at `T + I` caused by each intervention.
pub fn immediate_effect<T: Scalar>(params: &JrParams<T>, plan: &InterventionPlan<T>) -> Result<EffectBreakdown<T>> {
    params.check_alpha()?;
    let warnings = plan.validate(params)?;
    let d = params.derived();
    let (age, window) = (T::from_count(plan.t), T::from_count(plan.window));
    let amplification = params.n_f / (d.n * age) * d.d_s;
    let scale = T::one() / (d.n * (age + window));
    let per_step = plan
        .delta_ns
        .iter()
        .enumerate()
        .map(|(idx, &delta)| {
            let remaining = window - T::from_count(idx + 1);
            T::zero() - scale * (T::one() + amplification * remaining) * delta
        })
        .collect();
    Ok(breakdown(per_step, warnings))
}

/// Expected change of integration at a late time `t` caused by each intervention.
///
/// Each changed link shifts the monochromatic count by an amount growing like
/// `(t / T)^(m_s d_s)` while the link total grows like `N t`.
pub fn longterm_effect<T: Real>(
    params: &JrParams<T>,
    plan: &InterventionPlan<T>,
    t: usize,
) -> Result<EffectBreakdown<T>> {
    params.check_alpha()?;
    let mut warnings = plan.validate(params)?;
    if t < 5 * (plan.t + plan.window) {
        warnings.push(format!("t = {t} is not much later than the window end {}", plan.t + plan.window));
    }
    let d = params.derived();
    let age = T::from_count(plan.t);
    let factor = (T::from_count(t) / age).powf(d.decay_exponent()) / (d.n * age);
    let per_step = plan.delta_ns.iter().map(|&delta| -factor * delta).collect();
    Ok(breakdown(per_step, warnings))
}

/// How the planner models the per-step change of integration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlannerModel {
    /// Drops the `j / T` shrinkage of step `j`'s direct effect; its unclamped
    /// solution is the geometric closed form.
    FirstOrder,
    /// Keeps the `1 - j / T` factor on step `j`'s direct effect.
    HorizonCorrected,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimalPlan<T> {
    pub plan: InterventionPlan<T>,
    pub model: PlannerModel,
    /// Predicted `f(T + j) - f(T + j - 1)` for `j = 1..=I` under `model`.
    pub step_changes: Vec<T>,
    /// Predicted `f(T + I) - f(T)`.
    pub predicted_gain: T,
    /// Whether `-N_S` bound any step.
    pub clamped: bool,
    pub warnings: Vec<String>,
}

fn direct_weight<T: Scalar>(model: PlannerModel, j: usize, age: T) -> T {
    match model {
        PlannerModel::FirstOrder => T::one(),
        PlannerModel::HorizonCorrected => T::one() - T::from_count(j) / age,
    }
}

/// Predicted per-step integration changes of `plan` under `model`.
pub fn step_changes<T: Scalar>(params: &JrParams<T>, plan: &InterventionPlan<T>, model: PlannerModel) -> Vec<T> {
    let d = params.derived();
    let age = T::from_count(plan.t);
    let carry = (d.m_s * d.d_s - T::one()) / (d.n * age * age);
    let mut earlier = T::zero();
    let mut out = Vec::with_capacity(plan.window);
    for (idx, &delta) in plan.delta_ns.iter().enumerate() {
        let x = T::zero() - delta;
        out.push(direct_weight(model, idx + 1, age) * x / (d.n * age) + carry * earlier);
        earlier = earlier + x;
    }
    out
}

/// Greedy rate-limited plan maximizing `f(T + I)`: each step takes the largest
/// reduction of `N_S` that keeps the step's integration change at `rate_limit`.
pub fn optimal_interventions<T: Scalar>(
    params: &JrParams<T>,
    t: usize,
    window: usize,
    rate_limit: T,
    model: PlannerModel,
) -> Result<OptimalPlan<T>> {
    params.check_alpha()?;
    if rate_limit < T::zero() {
        return Err(Error::InvalidParams(format!("rate limit {rate_limit:?} must be >= 0")));
    }
    if t <= window {
        return Err(Error::InvalidParams(format!("network age {t} must exceed the window {window}")));
    }
    let d = params.derived();
    let age = T::from_count(t);
    let one = T::one();
    let keep = one - d.m_s * d.d_s;
    let mut delta_ns = Vec::with_capacity(window);
    let mut earlier = T::zero();
    let mut clamped = false;
    for j in 1..=window {
        // Binding rate constraint solved for this step's reduction.
        let unconstrained = (rate_limit * d.n * age + keep * earlier / age) / direct_weight(model, j, age);
        let x = if unconstrained > params.n_s {
            clamped = true;
            params.n_s
        } else {
            unconstrained
        };
        delta_ns.push(T::zero() - x);
        earlier = earlier + x;
    }
    let plan = InterventionPlan { t, window, delta_ns, rate_limit };
    let warnings = plan.validate(params)?;
    let step_changes = step_changes(params, &plan, model);
    let predicted_gain = step_changes.iter().fold(T::zero(), |a, &b| a + b);
    Ok(OptimalPlan { plan, model, step_changes, predicted_gain, clamped, warnings })
}

/// Geometric solution of the first-order greedy recursion, valid while `-N_S` never binds.
pub fn closed_form_plan<T: Real>(params: &JrParams<T>, t: usize, window: usize, rate_limit: T) -> Vec<T> {
    let d = params.derived();
    let age = T::from_count(t);
    let growth = T::one() + (T::one() - d.m_s * d.d_s) / age;
    (0..window).map(|j| -d.n * age * rate_limit * growth.powi(j as i32)).collect()
}

/// Sufficient condition for the unclamped regime.
pub fn unclamped_regime<T: Scalar>(params: &JrParams<T>, t: usize, window: usize, rate_limit: T) -> bool {
    if t <= 2 * window {
        return false;
    }
    let (age, d) = (T::from_count(t), params.derived());
    params.n_s >= d.n * age * rate_limit * age / (age - T::from_count(2 * window))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> JrParams<f64> {
        JrParams::uniform(2, 6.0, 2.0, 4.0, 0.75).unwrap()
    }

    #[test]
    fn immediate_examples() {
        let p = params();
        let zero = immediate_effect(&p, &InterventionPlan::constant(2000, 50, 0.0)).unwrap();
        assert_eq!(zero.total, 0.0);
        assert!(zero.warnings.is_empty());

        let mut plan = InterventionPlan::constant(2000, 50, 0.0);
        plan.delta_ns[49] = -2.0;
        let last = immediate_effect(&p, &plan).unwrap();
        assert!((last.total - 2.0 / (12.0 * 2050.0)).abs() < 1e-15);

        let e = immediate_effect(&p, &InterventionPlan::constant(2000, 50, -2.0)).unwrap();
        assert!(e.per_step.iter().all(|&x| x > 0.0));
        assert!(e.per_step.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn plan_validation() {
        let p = params();
        assert!(matches!(immediate_effect(&p, &InterventionPlan::constant(2000, 5, -7.0)), Err(Error::Infeasible(_))));
        assert!(matches!(immediate_effect(&p, &InterventionPlan::constant(2000, 5, 3.0)), Err(Error::Infeasible(_))));
        let short = immediate_effect(&p, &InterventionPlan::constant(100, 50, -1.0)).unwrap();
        assert_eq!(short.warnings.len(), 1);
    }

    #[test]
    fn longterm_examples() {
        let p = params();
        let plan = InterventionPlan::constant(2000, 1, -2.0);
        let at_t = longterm_effect(&p, &plan, 2000).unwrap();
        assert!((at_t.total - 2.0 / (12.0 * 2000.0)).abs() < 1e-15);
        assert!(!at_t.warnings.is_empty());
        let late = longterm_effect(&p, &plan, 2_000_000).unwrap();
        assert!(late.total > 0.0 && late.total < at_t.total);
        assert!(late.warnings.is_empty());
    }

    #[test]
    fn greedy_matches_closed_form_when_unclamped() {
        let p = params();
        let rate = 1e-5;
        assert!(unclamped_regime(&p, 2000, 50, rate));
        let opt = optimal_interventions(&p, 2000, 50, rate, PlannerModel::FirstOrder).unwrap();
        assert!(!opt.clamped);
        for (a, b) in opt.plan.delta_ns.iter().zip(closed_form_plan(&p, 2000, 50, rate)) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        assert!(opt.step_changes.iter().all(|&s| s <= rate + 1e-12));
        assert!((opt.predicted_gain - 50.0 * rate).abs() < 1e-9);

        let horizon = optimal_interventions(&p, 2000, 50, rate, PlannerModel::HorizonCorrected).unwrap();
        assert!(horizon.step_changes.iter().all(|&s| s <= rate + 1e-12));
        assert!((horizon.predicted_gain - 50.0 * rate).abs() < 1e-9);
        // The corrected model asks for slightly larger reductions.
        assert!(horizon.plan.delta_ns.iter().zip(&opt.plan.delta_ns).all(|(h, f)| h <= f));
    }

    #[test]
    fn greedy_edge_cases() {
        let p = params();
        let zero = optimal_interventions(&p, 2000, 10, 0.0, PlannerModel::FirstOrder).unwrap();
        assert!(zero.plan.delta_ns.iter().all(|&d| d == 0.0));
        assert_eq!(zero.predicted_gain, 0.0);

        let big = optimal_interventions(&p, 2000, 10, 1e-3, PlannerModel::FirstOrder).unwrap();
        assert!(big.clamped);
        assert!(big.plan.delta_ns.iter().all(|&d| d == -6.0));
        assert!(big.predicted_gain < 10.0 * 1e-3);
        assert!(big.step_changes.iter().all(|&s| s <= 1e-3 + 1e-12));

        assert!(optimal_interventions(&p, 10, 10, 1e-5, PlannerModel::FirstOrder).is_err());
    }

    #[test]
    fn plan_json_shape() {
        let plan: InterventionPlan<f64> =
            serde_json::from_str(r#"{"T": 2000, "I": 2, "delta_ns": [-1.0, -2.0], "rate_limit": 0.001}"#).unwrap();
        assert_eq!((plan.t, plan.window), (2000, 2));
        assert!(serde_json::to_string(&plan).unwrap().contains("\"T\":2000"));
    }
}
