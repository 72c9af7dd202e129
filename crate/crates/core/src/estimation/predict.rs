use serde::Serialize;

use super::Theta;
use crate::jr::{equilibrium_integration, JrParams};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub alpha: f64,
    pub f_inf: f64,
    /// Equilibrium with friend-of-friend links switched off.
    pub f_inf_no_tc: f64,
    pub tc_contribution: f64,
    pub warning: Option<String>,
}

/// Equilibrium integration implied by fitted means for `k` types.
pub fn predict_equilibrium(theta: &Theta, k: usize) -> Prediction {
    let (n_s, n_d, n_f) = (theta.n_s, theta.n_d, theta.n_f());
    let f_inf_no_tc = n_d / (n_s + n_d);
    if n_f <= 0.0 {
        return Prediction { alpha: f64::NAN, f_inf: f_inf_no_tc, f_inf_no_tc, tc_contribution: 0.0, warning: None };
    }
    let alpha = theta.alpha();
    let checked = JrParams::uniform(k, n_s, n_d, n_f, alpha).and_then(|p| equilibrium_integration(&p));
    let (f_inf, warning) = match checked {
        Ok(f) => (f, None),
        Err(e) => {
            let kf = k as f64;
            let friends = (1.0 - alpha) * n_f;
            let f = (n_d + friends) / (n_s + n_d + kf / (kf - 1.0) * friends);
            (f, Some(format!("prediction outside the model's validity range: {e}")))
        }
    };
    Prediction { alpha, f_inf, f_inf_no_tc, tc_contribution: f_inf - f_inf_no_tc, warning }
}
