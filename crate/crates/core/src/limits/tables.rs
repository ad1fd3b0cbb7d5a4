//! Exponents `θ` of `R_m ≍ (log m)^θ` and of `log ρ(u) ≍ −u^θ`, in exact
//! rational arithmetic.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Memory;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theta {
    Finite(Ratio<i64>),
    Infinite,
}

impl Theta {
    pub fn to_f64(self) -> f64 {
        match self {
            Theta::Finite(r) => *r.numer() as f64 / *r.denom() as f64,
            Theta::Infinite => f64::INFINITY,
        }
    }

    fn ratio(num: Ratio<i64>, den: Ratio<i64>) -> Theta {
        if den == Ratio::from_integer(0) {
            Theta::Infinite
        } else {
            Theta::Finite(num / den)
        }
    }
}

impl std::fmt::Display for Theta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Theta::Finite(r) => write!(f, "{r}"),
            Theta::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Theta {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Theta::Finite(_) => s.serialize_f64(self.to_f64()),
            Theta::Infinite => s.serialize_str("inf"),
        }
    }
}

fn r(n: i64) -> Ratio<i64> {
    Ratio::from_integer(n)
}

fn check(memory: Memory, omega: Ratio<i64>, alpha: Ratio<i64>, beta: Ratio<i64>) -> Result<()> {
    if omega < Ratio::new(1, 2) {
        return Err(Error::OutOfRange(format!("ω = {omega} is below 1/2")));
    }
    if memory == Memory::Long && !(alpha > Ratio::new(1, 2) && alpha <= r(1)) {
        return Err(Error::OutOfRange(format!(
            "α = {alpha} is outside (1/2, 1]"
        )));
    }
    if beta <= r(1) {
        return Err(Error::OutOfRange(format!("β = {beta} must exceed 1")));
    }
    Ok(())
}

/// Growth exponent of the longest strange segment.
pub fn table1_theta(
    memory: Memory,
    omega: Ratio<i64>,
    alpha: Ratio<i64>,
    beta: Ratio<i64>,
) -> Result<Theta> {
    check(memory, omega, alpha, beta)?;
    let one = r(1);
    Ok(match memory {
        Memory::Short => {
            if omega <= one {
                Theta::ratio(one, r(2) * omega - one)
            } else {
                Theta::ratio(beta - one, beta * omega - one)
            }
        }
        Memory::Long => {
            if omega <= Ratio::new(3, 2) - alpha {
                Theta::Infinite
            } else if omega <= r(2) - alpha {
                Theta::ratio(one, r(2) * omega + r(2) * alpha - r(3))
            } else {
                Theta::ratio(beta - one, beta * (omega + alpha - one) - one)
            }
        }
    })
}

/// Decay exponent of the ruin probability.
pub fn table2_theta(
    memory: Memory,
    omega: Ratio<i64>,
    alpha: Ratio<i64>,
    beta: Ratio<i64>,
) -> Result<Theta> {
    check(memory, omega, alpha, beta)?;
    let one = r(1);
    Ok(match memory {
        Memory::Short => {
            if omega <= one {
                Theta::ratio(r(2) * omega - one, omega)
            } else {
                Theta::ratio(beta * omega - one, omega * (beta - one))
            }
        }
        Memory::Long => {
            if omega <= Ratio::new(3, 2) - alpha {
                Theta::Finite(r(0))
            } else if omega < r(2) - alpha {
                Theta::ratio(r(2) * omega + r(2) * alpha - r(3), omega)
            } else {
                Theta::ratio(beta * (omega + alpha - one) - one, omega * (beta - one))
            }
        }
    })
}
