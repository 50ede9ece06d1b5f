//! Least favorable joint distributions for weighted step-down procedures.
//!
//! False nulls sit at p = 0 and every true null is marginally uniform, but
//! the true nulls are coupled so that exactly one of them (or none) falls
//! below the critical region. Under these couplings the familywise error
//! rate reaches its bound exactly, which is how sharpness is checked
//! empirically.

use rand::Rng;

use super::simulation::proportion_se;
use crate::error::{Error, Result};
use crate::problem::TestingProblem;
use crate::procedures::{check_critical_values, critical_value_stepdown, Procedure};

#[derive(Debug, Clone, PartialEq)]
pub struct LfcSample {
    pub p_values: Vec<f64>,
    /// Index of the null pushed below the threshold, if any.
    pub selected: Option<usize>,
    /// Weighted p-value cut: `1 / sum w` for the WHP coupling, `tau` for the
    /// falsifier.
    pub threshold: f64,
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::Precondition("at least one weight is required".into()));
    }
    if let Some((index, &value)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(w.is_finite() && **w > 0.0))
    {
        return Err(Error::InvalidWeight { index, value });
    }
    Ok(())
}

/// Picks index `i` with probability `probs[i]`, or `None` with the
/// leftover mass.
fn pick<R: Rng + ?Sized>(probs: impl Iterator<Item = f64>, rng: &mut R) -> Option<usize> {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.enumerate() {
        acc += p;
        if u < acc {
            return Some(i);
        }
    }
    None
}

/// Couples the true nulls with `weights` so exactly one weighted p-value
/// lies below `1 / sum w`.
///
/// Null `i` is selected with probability `w_i / sum w` and gets
/// `P_i = w_i U_1`, `U_1 ~ U(0, 1 / sum w)`; every other null gets
/// `P_j = w_j U_2`, `U_2 ~ U(1 / sum w, 1 / w_j)`.
pub fn lfc_whp_sampler<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<LfcSample> {
    check_weights(weights)?;
    let total: f64 = weights.iter().sum();
    let cut = 1.0 / total;
    let selected = pick(weights.iter().map(|w| w / total), rng)
        // rounding can leave the cumulative sum a hair below 1
        .unwrap_or(weights.len() - 1);

    let p_values = weights
        .iter()
        .enumerate()
        .map(|(j, &w)| {
            let u = if j == selected {
                rng.random_range(0.0..=cut)
            } else {
                rng.random_range(cut..=1.0 / w)
            };
            (w * u).min(1.0)
        })
        .collect();
    Ok(LfcSample {
        p_values,
        selected: Some(selected),
        threshold: cut,
    })
}

/// Coupling that makes any weighted step-down with critical values
/// `critical` reject a true null with probability `l * tau`, where
/// `l = sum_{k >= r} w_k` and `tau = min(critical[r - 1], 1 / l)`.
///
/// Hypotheses `1..r-1` (1-based) are false nulls with p = 0. Among `r..m`,
/// index `k` is pushed to `p~_k ~ U[0, tau]` with probability `w_k tau`; all
/// others get `p~ ~ U[tau, 1 / w]`. Raw p-values `w p~` are returned and are
/// marginally uniform.
pub fn lfc_stepdown_falsifier<R: Rng + ?Sized>(
    critical: &[f64],
    weights: &[f64],
    r: usize,
    rng: &mut R,
) -> Result<LfcSample> {
    check_weights(weights)?;
    let m = weights.len();
    check_critical_values(critical, m)?;
    if !(1..=m).contains(&r) {
        return Err(Error::Precondition(format!("r = {r} must lie in 1..={m}")));
    }
    let start = r - 1;
    let l: f64 = weights[start..].iter().sum();
    let tau = critical[start].min(1.0 / l);

    let chosen = pick(weights[start..].iter().map(|w| w * tau), rng).map(|k| k + start);
    let mut p_values = vec![0.0; m];
    for (i, p) in p_values.iter_mut().enumerate().skip(start) {
        let w = weights[i];
        let q = if chosen == Some(i) {
            rng.random_range(0.0..=tau)
        } else {
            rng.random_range(tau..=1.0 / w)
        };
        *p = (w * q).min(1.0);
    }
    Ok(LfcSample {
        p_values,
        selected: chosen,
        threshold: tau,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpnessEstimate {
    pub fwer: f64,
    pub se: f64,
    pub reps: usize,
}

/// Empirical familywise error of `procedure` under the WHP coupling.
///
/// The first `m0` hypotheses are true nulls drawn by [`lfc_whp_sampler`];
/// the rest are false nulls at p = 0. WAP additionally requires
/// `min w / max w >= alpha`, the condition under which it is optimal.
pub fn estimate_sharpness<R: Rng + ?Sized>(
    procedure: Procedure,
    weights: &[f64],
    m0: usize,
    alpha: f64,
    reps: usize,
    rng: &mut R,
) -> Result<SharpnessEstimate> {
    check_weights(weights)?;
    if reps == 0 {
        return Err(Error::InvalidConfig("reps must be at least 1".into()));
    }
    if !(1..=weights.len()).contains(&m0) {
        return Err(Error::InvalidConfig(format!(
            "m0 = {m0} must lie in 1..={}",
            weights.len()
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if procedure == Procedure::Wap {
        let lo = weights.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = weights.iter().copied().fold(0.0, f64::max);
        if lo / hi < alpha {
            return Err(Error::Precondition(format!(
                "WAP is only sharp when min w / max w >= alpha, got {} < {alpha}",
                lo / hi
            )));
        }
    }

    let m = weights.len();
    let mut errors = 0usize;
    let mut p = vec![0.0; m];
    for _ in 0..reps {
        let sample = lfc_whp_sampler(&weights[..m0], rng)?;
        p[..m0].copy_from_slice(&sample.p_values);
        let problem = TestingProblem::unlabeled(p.clone(), weights.to_vec(), alpha)?;
        let rejected = procedure.stepdown(&problem);
        if rejected.rejected().iter().any(|&i| i < m0) {
            errors += 1;
        }
    }
    let fwer = errors as f64 / reps as f64;
    Ok(SharpnessEstimate {
        fwer,
        se: proportion_se(fwer, reps),
        reps,
    })
}

/// Fraction of falsifier draws on which the step-down with `critical`
/// rejects a true null.
pub fn falsifier_error_rate<R: Rng + ?Sized>(
    critical: &[f64],
    weights: &[f64],
    r: usize,
    alpha: f64,
    reps: usize,
    rng: &mut R,
) -> Result<SharpnessEstimate> {
    if reps == 0 {
        return Err(Error::InvalidConfig("reps must be at least 1".into()));
    }
    let mut errors = 0usize;
    for _ in 0..reps {
        let sample = lfc_stepdown_falsifier(critical, weights, r, rng)?;
        let problem = TestingProblem::unlabeled(sample.p_values, weights.to_vec(), alpha)?;
        let rejected = critical_value_stepdown(&problem, critical)?;
        if rejected.rejected().iter().any(|&i| i >= r - 1) {
            errors += 1;
        }
    }
    let fwer = errors as f64 / reps as f64;
    Ok(SharpnessEstimate {
        fwer,
        se: proportion_se(fwer, reps),
        reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::rng::rng_new;
    use crate::procedures::whp_critical_values;

    #[test]
    fn single_null_is_uniform_by_construction() {
        let mut rng = rng_new(1);
        for _ in 0..1000 {
            let s = lfc_whp_sampler(&[3.0], &mut rng).unwrap();
            assert_eq!(s.selected, Some(0));
            assert!((0.0..=1.0).contains(&s.p_values[0]));
        }
    }

    #[test]
    fn exactly_one_weighted_value_below_cut() {
        let w = [1.0, 2.0, 3.0, 0.5];
        let mut rng = rng_new(2);
        for _ in 0..10_000 {
            let s = lfc_whp_sampler(&w, &mut rng).unwrap();
            let below = s
                .p_values
                .iter()
                .zip(&w)
                .filter(|(p, w)| *p / *w < s.threshold)
                .count();
            assert!(below <= 1);
            let sel = s.selected.unwrap();
            assert!(s.p_values[sel] / w[sel] <= s.threshold * (1.0 + 1e-15));
        }
    }

    #[test]
    fn falsifier_structure() {
        let w = [2.0, 1.0, 2.0, 3.0];
        let crit = whp_critical_values(&w, 0.05);
        let mut rng = rng_new(3);
        for _ in 0..5000 {
            let s = lfc_stepdown_falsifier(&crit, &w, 2, &mut rng).unwrap();
            assert_eq!(s.p_values[0], 0.0);
            assert!(s.p_values.iter().all(|p| (0.0..=1.0).contains(p)));
            if let Some(j) = s.selected {
                assert!(j >= 1);
                let min_weighted = (1..4)
                    .map(|i| s.p_values[i] / w[i])
                    .fold(f64::INFINITY, f64::min);
                assert!(min_weighted <= s.threshold * (1.0 + 1e-15));
                assert!(s.threshold <= crit[1]);
            }
        }
    }

    #[test]
    fn falsifier_preconditions() {
        let mut rng = rng_new(4);
        let w = [1.0, 2.0];
        assert!(lfc_stepdown_falsifier(&[0.02, 0.01], &w, 1, &mut rng).is_err());
        assert!(lfc_stepdown_falsifier(&[0.01, 0.02], &w, 0, &mut rng).is_err());
        assert!(lfc_stepdown_falsifier(&[0.01, 0.02], &w, 3, &mut rng).is_err());
        assert!(lfc_stepdown_falsifier(&[0.01], &w, 1, &mut rng).is_err());
        assert!(lfc_whp_sampler(&[], &mut rng).is_err());
        assert!(lfc_whp_sampler(&[1.0, -1.0], &mut rng).is_err());
    }

    #[test]
    fn sharpness_preconditions() {
        let mut rng = rng_new(5);
        let w = [1.0, 2.0, 3.0];
        assert!(matches!(
            estimate_sharpness(Procedure::Whp, &w, 3, 0.05, 0, &mut rng),
            Err(Error::InvalidConfig(_))
        ));
        assert!(estimate_sharpness(Procedure::Whp, &w, 0, 0.05, 10, &mut rng).is_err());
        assert!(estimate_sharpness(Procedure::Whp, &w, 4, 0.05, 10, &mut rng).is_err());
        // ratio 1/30 < 0.05
        assert!(matches!(
            estimate_sharpness(Procedure::Wap, &[1.0, 30.0], 2, 0.05, 10, &mut rng),
            Err(Error::Precondition(_))
        ));
        // WHP has no such condition
        assert!(estimate_sharpness(Procedure::Whp, &[1.0, 30.0], 2, 0.05, 10, &mut rng).is_ok());
    }

    #[test]
    fn sharpness_with_false_nulls() {
        let mut rng = rng_new(6);
        let w = [1.0, 2.0, 3.0, 4.0];
        let est = estimate_sharpness(Procedure::Whp, &w, 2, 0.05, 50_000, &mut rng).unwrap();
        assert!((est.fwer - 0.05).abs() <= 4.0 * est.se.max(1e-3), "{est:?}");
    }
}
