use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Open target set `A`: a half-line `(y, ∞)` in d = 1 or a half-space
/// `{x : v·x > c}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "set", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSet {
    HalfLine { y: f64 },
    HalfSpace { normal: Vec<f64>, threshold: f64 },
}

impl TargetSet {
    pub fn half_line(y: f64) -> Self {
        TargetSet::HalfLine { y }
    }

    pub fn half_space(normal: Vec<f64>, threshold: f64) -> Result<Self> {
        if normal.is_empty()
            || normal.iter().all(|x| *x == 0.0)
            || normal.iter().any(|x| !x.is_finite())
        {
            return Err(Error::InvalidParameter(
                "half-space normal must be a finite nonzero vector".into(),
            ));
        }
        if !threshold.is_finite() {
            return Err(Error::InvalidParameter("threshold must be finite".into()));
        }
        Ok(TargetSet::HalfSpace { normal, threshold })
    }

    pub fn dim(&self) -> usize {
        match self {
            TargetSet::HalfLine { .. } => 1,
            TargetSet::HalfSpace { normal, .. } => normal.len(),
        }
    }

    /// The half-space form `(v, c)`.
    pub fn normal_form(&self) -> (Vec<f64>, f64) {
        match self {
            TargetSet::HalfLine { y } => (vec![1.0], *y),
            TargetSet::HalfSpace { normal, threshold } => (normal.clone(), *threshold),
        }
    }

    /// `x ∈ A` (strict, `A` is open).
    pub fn contains(&self, x: &[f64]) -> bool {
        let (v, c) = self.normal_form();
        dot(&v, x) > c
    }

    /// Membership in the closure `Ā`.
    pub fn closure_contains(&self, x: &[f64]) -> bool {
        let (v, c) = self.normal_form();
        dot(&v, x) >= c
    }

    /// `inf_{γ∈A} t·γ`: `κc` when `t = κv` with `κ > 0`, `0` at `t = 0`,
    /// and `−∞` otherwise.
    pub fn support_inf(&self, t: &[f64]) -> f64 {
        let (v, c) = self.normal_form();
        if t.iter().all(|x| *x == 0.0) {
            return 0.0;
        }
        match parallel_factor(&v, t) {
            Some(k) if k > 0.0 => k * c,
            _ => f64::NEG_INFINITY,
        }
    }

    /// `A(η) = {x : d(x, A^c) > η} = {v·x > c + η‖v‖}`.
    pub fn shrink(&self, eta: f64) -> TargetSet {
        match self {
            TargetSet::HalfLine { y } => TargetSet::HalfLine { y: y + eta },
            TargetSet::HalfSpace { normal, threshold } => TargetSet::HalfSpace {
                normal: normal.clone(),
                threshold: threshold + eta * norm(normal),
            },
        }
    }

    /// `uA`.
    pub fn scaled(&self, u: f64) -> TargetSet {
        match self {
            TargetSet::HalfLine { y } => TargetSet::HalfLine { y: u * y },
            TargetSet::HalfSpace { normal, threshold } => TargetSet::HalfSpace {
                normal: normal.clone(),
                threshold: u * threshold,
            },
        }
    }

    /// Condition 𝒜 for the drift `μ`: holds iff `v·μ > 0` and `c > 0`, with
    /// witness `t = v`.
    pub fn condition_a(&self, mu: &[f64]) -> (bool, Option<Vec<f64>>) {
        let (v, c) = self.normal_form();
        if v.len() != mu.len() {
            return (false, None);
        }
        if dot(&v, mu) > 0.0 && c > 0.0 {
            (true, Some(v))
        } else {
            (false, None)
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `κ` with `t = κ v`, if `t` is (numerically) parallel to `v`.
fn parallel_factor(v: &[f64], t: &[f64]) -> Option<f64> {
    let vv = dot(v, v);
    let k = dot(v, t) / vv;
    let resid: f64 = v
        .iter()
        .zip(t)
        .map(|(a, b)| (b - k * a).powi(2))
        .sum::<f64>()
        .sqrt();
    (resid <= 1e-12 * norm(t)).then_some(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_a_examples() {
        let a = TargetSet::half_line(1.0);
        assert_eq!(a.condition_a(&[0.5]), (true, Some(vec![1.0])));
        assert_eq!(a.condition_a(&[-0.5]).0, false);
        let b = TargetSet::half_space(vec![1.0, 0.0], 1.0).unwrap();
        assert_eq!(b.condition_a(&[1.0, 1.0]), (true, Some(vec![1.0, 0.0])));
        assert!(!TargetSet::half_line(-1.0).condition_a(&[1.0]).0);
    }

    #[test]
    fn support_inf_cases() {
        let a = TargetSet::half_line(2.0);
        assert_eq!(a.support_inf(&[3.0]), 6.0);
        assert_eq!(a.support_inf(&[-1.0]), f64::NEG_INFINITY);
        let b = TargetSet::half_space(vec![1.0, 1.0], 1.0).unwrap();
        assert_eq!(b.support_inf(&[2.0, 2.0]), 2.0);
        assert_eq!(b.support_inf(&[1.0, 0.0]), f64::NEG_INFINITY);
    }

    #[test]
    fn openness_and_shrinkage() {
        let a = TargetSet::half_line(1.0);
        assert!(!a.contains(&[1.0]));
        assert!(a.closure_contains(&[1.0]));
        let b = TargetSet::half_space(vec![3.0, 4.0], 1.0).unwrap();
        // distance to the boundary of {3x + 4y > 1} is (3x + 4y − 1)/5
        let s = b.shrink(0.2);
        assert!(!s.contains(&[0.4, 0.2]));
        assert!(s.contains(&[0.41, 0.2]));
    }
}
