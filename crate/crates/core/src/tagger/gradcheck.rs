use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{EncodedSentence, Params, TaggerModel};
use crate::Result;

/// Denominator floor of the relative error, so that components whose true
/// gradient is (near) zero are judged by their absolute error.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct GroupCheck {
    pub name: String,
    pub checked: usize,
    pub max_rel_error: f64,
    /// Largest analytic gradient magnitude among the sampled components.
    pub max_abs_gradient: f64,
    pub max_abs_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub groups: Vec<GroupCheck>,
    pub max_rel_error: f64,
}

/// Compares backpropagated gradients of the CRF loss (no dropout) with
/// central differences `(f(θ+ε) − f(θ−ε)) / 2ε` on up to `samples`
/// components of every parameter group.
pub fn check_gradients(
    model: &TaggerModel,
    sentence: &EncodedSentence,
    eps: f64,
    samples: usize,
) -> Result<GradCheckReport> {
    let mut analytic = Params::zeros(&model.hyper, model.labels.len());
    model.loss_and_gradient(sentence, None, &mut analytic)?;
    let mut probe = model.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(model.hyper.seed ^ 0x6772_6164);
    let mut groups = Vec::new();
    for (g, (name, grad)) in analytic.groups().iter().enumerate() {
        let len = grad.len();
        let indices: Vec<usize> = if len <= samples {
            (0..len).collect()
        } else {
            (0..samples).map(|_| rng.random_range(0..len)).collect()
        };
        let mut check = GroupCheck {
            name: String::from(*name),
            checked: 0,
            max_rel_error: 0.0,
            max_abs_gradient: 0.0,
            max_abs_error: 0.0,
        };
        for idx in indices {
            let original = probe.params.groups()[g].1[idx];
            probe.params.groups_mut()[g].1[idx] = original + eps;
            let plus = probe.loss(sentence)?;
            probe.params.groups_mut()[g].1[idx] = original - eps;
            let minus = probe.loss(sentence)?;
            probe.params.groups_mut()[g].1[idx] = original;
            let numeric = (plus - minus) / (2.0 * eps);
            let a = grad[idx];
            let scale = a.abs().max(numeric.abs()).max(RELATIVE_ERROR_FLOOR);
            check.max_rel_error = check.max_rel_error.max((a - numeric).abs() / scale);
            check.max_abs_gradient = check.max_abs_gradient.max(a.abs());
            check.max_abs_error = check.max_abs_error.max((a - numeric).abs());
            check.checked += 1;
        }
        groups.push(check);
    }
    let max_rel_error = groups.iter().map(|g| g.max_rel_error).fold(0.0, f64::max);
    Ok(GradCheckReport {
        groups,
        max_rel_error,
    })
}
