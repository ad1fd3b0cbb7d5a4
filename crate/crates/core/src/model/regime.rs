use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::coefficients::{CoefficientFamily, Memory};
use super::innovation::InnovationModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeTag {
    S1,
    S2,
    S3,
    S4,
    R1,
    R2,
    R3,
    R4,
}

impl RegimeTag {
    pub fn memory(self) -> Memory {
        match self {
            RegimeTag::S1 | RegimeTag::S2 | RegimeTag::S3 | RegimeTag::S4 => Memory::Short,
            _ => Memory::Long,
        }
    }
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for RegimeTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "S1" => RegimeTag::S1,
            "S2" => RegimeTag::S2,
            "S3" => RegimeTag::S3,
            "S4" => RegimeTag::S4,
            "R1" => RegimeTag::R1,
            "R2" => RegimeTag::R2,
            "R3" => RegimeTag::R3,
            "R4" => RegimeTag::R4,
            _ => return Err(Error::InvalidParameter(format!("unknown regime {s}"))),
        })
    }
}

/// The normalizing sequence `a_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Normalization {
    /// `a_n = n^ω`.
    Power { omega: f64 },
    /// `a_n = n Ψ_n`.
    ProductPsi,
}

const SPEED_CACHE: usize = 1 << 16;

/// One of the scenarios S1–S4 / R1–R4 with its sequences `a_n`, `b_n`, `c_n`.
#[derive(Debug, Clone)]
pub struct RegimeSpec {
    tag: RegimeTag,
    norm: Normalization,
    beta: Option<f64>,
    family: Option<CoefficientFamily>,
    // running max of the raw b_n representative for n ≤ SPEED_CACHE
    bmax: Arc<OnceLock<Vec<f64>>>,
}

impl RegimeSpec {
    /// Build a regime. `beta` is required for S4/R4 and ignored otherwise;
    /// long-memory regimes take the coefficient family for `Ψ_n`.
    pub fn new(
        tag: RegimeTag,
        norm: Normalization,
        family: &CoefficientFamily,
        beta: Option<f64>,
    ) -> Result<Self> {
        let mismatch = |m: String| Err(Error::RegimeMismatch(m));
        if tag.memory() != family.memory() {
            return mismatch(format!(
                "{tag} needs {:?} memory coefficients, got {:?}",
                tag.memory(),
                family.memory()
            ));
        }
        if tag.memory() == Memory::Short
            && !family.is_normalized()
            && (family.sum() - 1.0).abs() > 1e-12
        {
            return mismatch(format!("{tag} needs Σφ_i = 1, got {}", family.sum()));
        }
        let omega = match norm {
            Normalization::Power { omega } => Some(omega),
            Normalization::ProductPsi => None,
        };
        let alpha = family.long_memory_params().map(|x| x.0).unwrap_or(1.0);
        match tag {
            RegimeTag::S1 | RegimeTag::S2 => {
                if omega != Some(1.0) {
                    return mismatch(format!("{tag} uses a_n = n"));
                }
            }
            RegimeTag::S3 => match omega {
                Some(w) if w > 0.5 && w < 1.0 => {}
                _ => return mismatch("S3 needs a_n = n^ω with 1/2 < ω < 1".into()),
            },
            RegimeTag::S4 => match omega {
                Some(w) if w > 1.0 => {}
                _ => return mismatch("S4 needs a_n = n^ω with ω > 1".into()),
            },
            RegimeTag::R1 | RegimeTag::R2 => {
                if norm != Normalization::ProductPsi {
                    return mismatch(format!("{tag} uses a_n = nΨ_n"));
                }
            }
            RegimeTag::R3 => match omega {
                Some(w) if w > 1.5 - alpha && w < 2.0 - alpha => {}
                _ => {
                    return mismatch(format!(
                        "R3 needs a_n = n^ω with {} < ω < {}",
                        1.5 - alpha,
                        2.0 - alpha
                    ))
                }
            },
            RegimeTag::R4 => match omega {
                Some(w) if w > 2.0 - alpha => {}
                _ => return mismatch(format!("R4 needs a_n = n^ω with ω > {}", 2.0 - alpha)),
            },
        }
        let beta = match tag {
            RegimeTag::S4 | RegimeTag::R4 => match beta {
                Some(b) if b > 1.0 && b.is_finite() => Some(b),
                _ => return mismatch(format!("{tag} needs β > 1")),
            },
            _ => None,
        };
        Ok(Self {
            tag,
            norm,
            beta,
            family: (tag.memory() == Memory::Long).then(|| family.clone()),
            bmax: Arc::new(OnceLock::new()),
        })
    }

    pub fn tag(&self) -> RegimeTag {
        self.tag
    }

    pub fn normalization(&self) -> Normalization {
        self.norm
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    /// `ω` for power normalizations.
    pub fn omega(&self) -> Option<f64> {
        match self.norm {
            Normalization::Power { omega } => Some(omega),
            Normalization::ProductPsi => None,
        }
    }

    /// Check model requirements: S2/R2 need `Λ` finite everywhere, S4/R4 a
    /// heavy profile with the regime's β.
    pub fn validate_model(&self, model: &InnovationModel) -> Result<()> {
        match self.tag {
            RegimeTag::S2 | RegimeTag::R2 if !model.domain_is_everything() => Err(
                Error::RegimeMismatch(format!("{} needs a log-mgf finite everywhere", self.tag)),
            ),
            RegimeTag::S4 | RegimeTag::R4 => match model.heavy_profile() {
                None => Err(Error::MissingHeavyProfile),
                Some(h) if (h.beta - self.beta.unwrap()).abs() > 1e-12 => {
                    Err(Error::RegimeMismatch(format!(
                        "heavy profile β = {} differs from regime β = {}",
                        h.beta,
                        self.beta.unwrap()
                    )))
                }
                Some(_) => Ok(()),
            },
            _ => Ok(()),
        }
    }

    fn psi_sum(&self, n: u64) -> f64 {
        self.family
            .as_ref()
            .and_then(|f| f.psi_sum(n))
            .expect("long-memory regime carries its family")
    }

    /// `a_n`.
    pub fn a(&self, n: u64) -> f64 {
        let nf = n as f64;
        match self.norm {
            Normalization::Power { omega } => nf.powf(omega),
            Normalization::ProductPsi => nf * self.psi_sum(n),
        }
    }

    /// `a^←(u) = min{n ≥ 1 : a_n ≥ u}`.
    pub fn a_inverse(&self, u: f64) -> u64 {
        if self.a(1) >= u {
            return 1;
        }
        let mut hi = 2u64;
        while self.a(hi) < u {
            hi = hi.saturating_mul(2);
            if hi == u64::MAX {
                return hi;
            }
        }
        let mut lo = hi / 2;
        // invariant: a(lo) < u ≤ a(hi)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.a(mid) >= u {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// `c_n` for S4/R4 with `τ(t) = t^β`.
    pub fn c(&self, n: u64) -> Option<f64> {
        let beta = self.beta?;
        let nf = n as f64;
        let an = self.a(n);
        match self.tag {
            RegimeTag::S4 => Some((an / nf).powf(1.0 / (beta - 1.0))),
            RegimeTag::R4 => {
                let psi = self.psi_sum(n);
                Some((an / (nf * psi.powf(beta))).powf(1.0 / (beta - 1.0)))
            }
            _ => None,
        }
    }

    fn raw_speed(&self, n: u64) -> f64 {
        let nf = n as f64;
        match self.tag {
            RegimeTag::S1 | RegimeTag::S2 | RegimeTag::R1 | RegimeTag::R2 => nf,
            RegimeTag::S3 => self.a(n).powi(2) / nf,
            RegimeTag::S4 => nf * self.c(n).unwrap().powf(self.beta.unwrap()),
            RegimeTag::R3 => {
                let psi = self.psi_sum(n);
                self.a(n).powi(2) / (nf * psi * psi)
            }
            RegimeTag::R4 => {
                let psi = self.psi_sum(n);
                nf * (psi * self.c(n).unwrap()).powf(self.beta.unwrap())
            }
        }
    }

    /// The speed `b_n`. For R3/R4 the exact representative is replaced by
    /// its running maximum, which is asymptotically equivalent and
    /// nondecreasing.
    pub fn b(&self, n: u64) -> f64 {
        if n == 0 {
            return 0.0;
        }
        match self.tag {
            RegimeTag::R3 | RegimeTag::R4 => {
                let table = self.bmax.get_or_init(|| {
                    let mut v = Vec::with_capacity(SPEED_CACHE + 1);
                    v.push(0.0);
                    let mut m = 0.0f64;
                    for k in 1..=SPEED_CACHE as u64 {
                        m = m.max(self.raw_speed(k));
                        v.push(m);
                    }
                    v
                });
                if (n as usize) <= SPEED_CACHE {
                    table[n as usize]
                } else {
                    self.raw_speed(n).max(table[SPEED_CACHE])
                }
            }
            _ => self.raw_speed(n),
        }
    }

    /// `b_n` evaluated at a real argument by linear interpolation (used for
    /// `b_{R_m}` plots with non-integer grids).
    pub fn b_real(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let lo = x.floor() as u64;
        let frac = x - lo as f64;
        if frac == 0.0 {
            return self.b(lo);
        }
        (1.0 - frac) * self.b(lo) + frac * self.b(lo + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::coefficients::CoefficientKind;

    fn lm(alpha: f64) -> CoefficientFamily {
        CoefficientFamily::new(
            CoefficientKind::BalancedPower {
                alpha,
                p: 1.0,
                scale: 1.0,
                log_power: 0.0,
            },
            false,
        )
        .unwrap()
    }

    #[test]
    fn short_memory_speeds() {
        let f = CoefficientFamily::iid();
        let s3 = RegimeSpec::new(
            RegimeTag::S3,
            Normalization::Power { omega: 0.75 },
            &f,
            None,
        )
        .unwrap();
        assert!((s3.b(10_000) - 100.0).abs() < 1e-9);
        let s4 = RegimeSpec::new(
            RegimeTag::S4,
            Normalization::Power { omega: 1.5 },
            &f,
            Some(2.0),
        )
        .unwrap();
        assert!((s4.c(10_000).unwrap() - 100.0).abs() < 1e-9);
        assert!((s4.b(10_000) - 1e8).abs() < 1e-3);
        let s2 =
            RegimeSpec::new(RegimeTag::S2, Normalization::Power { omega: 1.0 }, &f, None).unwrap();
        assert_eq!(s2.a_inverse(4.0), 4);
        assert_eq!(s2.a_inverse(4.5), 5);
        assert_eq!(s2.a_inverse(0.1), 1);
    }

    #[test]
    fn r3_speed_exponent() {
        let f = lm(0.75);
        let r3 =
            RegimeSpec::new(RegimeTag::R3, Normalization::Power { omega: 1.0 }, &f, None).unwrap();
        // local log-log slope; the level carries the constant (1 − α)²
        let (n1, n2) = (100_000u64, 1_000_000u64);
        let e = (r3.b(n2) / r3.b(n1)).ln() / 10f64.ln();
        assert!((e - 0.5).abs() < 0.03, "{e}");
    }

    #[test]
    fn speeds_nondecreasing() {
        let f = lm(0.75);
        let iid = CoefficientFamily::iid();
        let regs = vec![
            RegimeSpec::new(RegimeTag::R3, Normalization::Power { omega: 1.0 }, &f, None).unwrap(),
            RegimeSpec::new(
                RegimeTag::R4,
                Normalization::Power { omega: 1.5 },
                &f,
                Some(2.0),
            )
            .unwrap(),
            RegimeSpec::new(RegimeTag::R2, Normalization::ProductPsi, &f, None).unwrap(),
            RegimeSpec::new(
                RegimeTag::S3,
                Normalization::Power { omega: 0.6 },
                &iid,
                None,
            )
            .unwrap(),
            RegimeSpec::new(
                RegimeTag::S4,
                Normalization::Power { omega: 1.2 },
                &iid,
                Some(3.0),
            )
            .unwrap(),
        ];
        for r in &regs {
            let mut prev = 0.0;
            let mut n = 1.0f64;
            while n <= 1e6 {
                let b = r.b(n as u64);
                assert!(b >= prev, "{:?} at {n}", r.tag());
                prev = b;
                n *= 1.05;
                n = n.ceil();
            }
        }
    }

    #[test]
    fn a_inverse_is_right_inverse() {
        let f = lm(0.75);
        let r2 = RegimeSpec::new(RegimeTag::R2, Normalization::ProductPsi, &f, None).unwrap();
        for u in [1.0, 3.7, 100.0, 1e5] {
            let n = r2.a_inverse(u);
            assert!(r2.a(n) >= u);
            if n > 1 {
                assert!(r2.a(n - 1) < u);
            }
        }
    }

    #[test]
    fn rejects_mismatches() {
        let f = lm(0.75);
        assert!(
            RegimeSpec::new(RegimeTag::S2, Normalization::Power { omega: 1.0 }, &f, None).is_err()
        );
        assert!(
            RegimeSpec::new(RegimeTag::R3, Normalization::Power { omega: 1.3 }, &f, None).is_err()
        );
        assert!(
            RegimeSpec::new(RegimeTag::R4, Normalization::Power { omega: 1.5 }, &f, None).is_err()
        );
        let e =
            InnovationModel::new(crate::model::InnovationLaw::CenteredExponential { rate: 1.0 })
                .unwrap();
        let iid = CoefficientFamily::iid();
        let s2 = RegimeSpec::new(
            RegimeTag::S2,
            Normalization::Power { omega: 1.0 },
            &iid,
            None,
        )
        .unwrap();
        assert!(s2.validate_model(&e).is_err());
    }
}
