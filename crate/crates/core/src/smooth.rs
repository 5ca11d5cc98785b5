//! Concave smooth approximations of the step `1{x > 0}` on `x >= 0`, and
//! the geometric schedule that sharpens them.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothKind {
    Log,
    Exp,
    #[default]
    Arctan,
}

impl std::str::FromStr for SmoothKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "log" => Ok(Self::Log),
            "exp" => Ok(Self::Exp),
            "arctan" | "atan" => Ok(Self::Arctan),
            _ => Err(format!("unknown smooth function {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("x must be finite and nonnegative, got {0}")]
    NegativeArgument(f64),
    #[error("theta must be finite and positive, got {0}")]
    NonPositiveTheta(f64),
    #[error("theta_init needs at least one block power")]
    Empty,
}

fn check(x: f64, theta: f64) -> Result<(), DomainError> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(DomainError::NegativeArgument(x));
    }
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(DomainError::NonPositiveTheta(theta));
    }
    Ok(())
}

pub fn f_theta(kind: SmoothKind, x: f64, theta: f64) -> Result<f64, DomainError> {
    check(x, theta)?;
    Ok(match kind {
        SmoothKind::Log => (x / theta).ln_1p() / (1.0 / theta).ln_1p(),
        SmoothKind::Exp => -(-x / theta).exp_m1(),
        SmoothKind::Arctan => (x / theta).atan(),
    })
}

pub fn grad_f_theta(kind: SmoothKind, x: f64, theta: f64) -> Result<f64, DomainError> {
    check(x, theta)?;
    Ok(match kind {
        SmoothKind::Log => 1.0 / ((1.0 / theta).ln_1p() * (x + theta)),
        SmoothKind::Exp => (-x / theta).exp() / theta,
        SmoothKind::Arctan => theta / (theta * theta + x * x),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub beta: f64,
    pub epsilon: f64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            beta: 0.1,
            epsilon: 1e-6,
        }
    }
}

impl AnnealSchedule {
    pub fn is_valid(&self) -> bool {
        self.beta > 0.0 && self.beta < 1.0 && self.epsilon > 0.0
    }
}

/// Starting smoothness: the largest block power, or 1 if all are zero.
pub fn theta_init(block_powers: &[f64]) -> Result<f64, DomainError> {
    let max = block_powers
        .iter()
        .copied()
        .reduce(f64::max)
        .ok_or(DomainError::Empty)?;
    Ok(if max > 0.0 { max } else { 1.0 })
}

/// Next smoothness after a completed pass at `theta`, or `None` once it
/// would drop below `epsilon`.
pub fn theta_next(theta: f64, sched: &AnnealSchedule) -> Option<f64> {
    let next = sched.beta * theta;
    (next >= sched.epsilon).then_some(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_points() {
        for kind in [SmoothKind::Log, SmoothKind::Exp, SmoothKind::Arctan] {
            assert_eq!(f_theta(kind, 0.0, 0.3).unwrap(), 0.0);
        }
        let quarter = f_theta(SmoothKind::Arctan, 0.7, 0.7).unwrap();
        assert!((quarter - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((f_theta(SmoothKind::Log, 1.0, 0.01).unwrap() - 1.0).abs() < 1e-14);
        assert!((grad_f_theta(SmoothKind::Exp, 0.0, 0.25).unwrap() - 4.0).abs() < 1e-14);
        assert!((grad_f_theta(SmoothKind::Arctan, 0.0, 0.25).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn domain_errors() {
        assert!(f_theta(SmoothKind::Log, -1.0, 1.0).is_err());
        assert!(grad_f_theta(SmoothKind::Exp, 1.0, 0.0).is_err());
        assert_eq!(theta_init(&[]), Err(DomainError::Empty));
    }

    #[test]
    fn schedule() {
        let s = AnnealSchedule::default();
        assert_eq!(theta_next(1.0, &s), Some(0.1));
        assert_eq!(theta_next(1e-6, &s), None);
        let half = AnnealSchedule { beta: 0.5, ..s };
        assert_eq!(theta_next(8.0, &half), Some(4.0));
        assert_eq!(theta_init(&[0.1, 2.5, 0.3]).unwrap(), 2.5);
        assert_eq!(theta_init(&[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(theta_init(&[0.42]).unwrap(), 0.42);
    }
}
