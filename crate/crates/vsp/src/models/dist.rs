//! Scalar distribution specifications with closed-form raw moments.
//!
//! Every family stores its first four raw moments at construction. The
//! constructor re-checks the stored moments against the Hankel
//! positive-semidefiniteness conditions that any genuine moment sequence
//! satisfies, so an algebra slip in a moment formula fails fast.

use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;

/// Raw moments E X, E X^2, E X^3, E X^4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawMoments {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
}

impl RawMoments {
    /// Central moments (eta2, eta3, eta4) by the binomial expansion.
    pub fn central(&self) -> (f64, f64, f64) {
        let m = self.m1;
        let eta2 = self.m2 - m * m;
        let eta3 = self.m3 - 3.0 * m * self.m2 + 2.0 * m.powi(3);
        let eta4 = self.m4 - 4.0 * m * self.m3 + 6.0 * m * m * self.m2 - 3.0 * m.powi(4);
        (eta2, eta3, eta4)
    }

    /// Kurtosis eta4 / eta2^2; errors when the variance is (numerically) zero.
    pub fn kurtosis(&self) -> Result<f64> {
        let (eta2, _, eta4) = self.central();
        let scale = self.m2.abs().max(1.0);
        if eta2 <= 1e-14 * scale {
            return Err(Error::DegenerateDistribution(
                "kurtosis undefined: zero variance".into(),
            ));
        }
        Ok(eta4 / (eta2 * eta2))
    }

    /// Hankel validity check: the moment matrix of a real distribution is
    /// positive semidefinite.
    fn validate(&self) -> Result<()> {
        for m in [self.m1, self.m2, self.m3, self.m4] {
            if !m.is_finite() {
                return Err(Error::DegenerateDistribution("non-finite moment".into()));
            }
        }
        let (e2, _, e4) = self.central();
        let s2 = self.m2.abs().max(1.0);
        if e2 < -1e-10 * s2 {
            return Err(Error::DegenerateDistribution(format!(
                "moment sequence invalid: negative variance {e2}"
            )));
        }
        // det of [[1, m1, m2], [m1, m2, m3], [m2, m3, m4]]
        let det = 1.0 * (self.m2 * self.m4 - self.m3 * self.m3)
            - self.m1 * (self.m1 * self.m4 - self.m3 * self.m2)
            + self.m2 * (self.m1 * self.m3 - self.m2 * self.m2);
        let s3 = s2.powi(3);
        if det < -1e-9 * s3 {
            return Err(Error::DegenerateDistribution(format!(
                "moment sequence invalid: Hankel determinant {det}"
            )));
        }
        if e4 < -1e-10 * s2 * s2 {
            return Err(Error::DegenerateDistribution(
                "moment sequence invalid: negative fourth central moment".into(),
            ));
        }
        Ok(())
    }
}

/// Distribution family with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    PointMass {
        value: f64,
    },
    Bernoulli {
        p: f64,
    },
    /// S * B with B ~ Bernoulli(p) independent of the magnitude S.
    ScaledBernoulli {
        p: f64,
        magnitude: Box<DistributionSpec>,
    },
    Exponential {
        rate: f64,
    },
    /// Shape-scale parameterization; variance = shape * scale^2.
    Gamma {
        shape: f64,
        scale: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// base + offset.
    Shifted {
        base: Box<DistributionSpec>,
        offset: f64,
    },
    /// Row-level law on the k-simplex; per-column marginals are Beta.
    Dirichlet {
        alpha: Vec<f64>,
    },
}

/// A distribution plus its stored raw moments (absent for the row-level
/// Dirichlet, whose marginals are exposed per component).
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpec {
    family: Family,
    moments: Option<RawMoments>,
}

impl DistributionSpec {
    pub fn new(family: Family) -> Result<Self> {
        let moments = match &family {
            Family::PointMass { value } => Some(RawMoments {
                m1: *value,
                m2: value.powi(2),
                m3: value.powi(3),
                m4: value.powi(4),
            }),
            Family::Bernoulli { p } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::InvalidArgument(format!(
                        "bernoulli p = {p} outside [0, 1]"
                    )));
                }
                Some(RawMoments {
                    m1: *p,
                    m2: *p,
                    m3: *p,
                    m4: *p,
                })
            }
            Family::ScaledBernoulli { p, magnitude } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::InvalidArgument(format!(
                        "bernoulli p = {p} outside [0, 1]"
                    )));
                }
                let s = magnitude.moments()?;
                Some(RawMoments {
                    m1: p * s.m1,
                    m2: p * s.m2,
                    m3: p * s.m3,
                    m4: p * s.m4,
                })
            }
            Family::Exponential { rate } => {
                if *rate <= 0.0 {
                    return Err(Error::InvalidArgument(
                        "exponential rate must be positive".into(),
                    ));
                }
                let l = *rate;
                Some(RawMoments {
                    m1: 1.0 / l,
                    m2: 2.0 / l.powi(2),
                    m3: 6.0 / l.powi(3),
                    m4: 24.0 / l.powi(4),
                })
            }
            Family::Gamma { shape, scale } => {
                if *shape <= 0.0 || *scale <= 0.0 {
                    return Err(Error::InvalidArgument(
                        "gamma shape and scale must be positive".into(),
                    ));
                }
                let (a, s) = (*shape, *scale);
                Some(RawMoments {
                    m1: a * s,
                    m2: a * (a + 1.0) * s.powi(2),
                    m3: a * (a + 1.0) * (a + 2.0) * s.powi(3),
                    m4: a * (a + 1.0) * (a + 2.0) * (a + 3.0) * s.powi(4),
                })
            }
            Family::Uniform { lo, hi } => {
                if lo.is_nan() || hi.is_nan() || lo >= hi {
                    return Err(Error::InvalidArgument(format!(
                        "uniform requires lo < hi, got [{lo}, {hi}]"
                    )));
                }
                let w = hi - lo;
                let p = |j: i32| (hi.powi(j + 1) - lo.powi(j + 1)) / ((j + 1) as f64 * w);
                Some(RawMoments {
                    m1: p(1),
                    m2: p(2),
                    m3: p(3),
                    m4: p(4),
                })
            }
            Family::Shifted { base, offset } => {
                let b = base.moments()?;
                let c = *offset;
                Some(RawMoments {
                    m1: b.m1 + c,
                    m2: b.m2 + 2.0 * c * b.m1 + c * c,
                    m3: b.m3 + 3.0 * c * b.m2 + 3.0 * c * c * b.m1 + c.powi(3),
                    m4: b.m4
                        + 4.0 * c * b.m3
                        + 6.0 * c * c * b.m2
                        + 4.0 * c.powi(3) * b.m1
                        + c.powi(4),
                })
            }
            Family::Dirichlet { alpha } => {
                if alpha.is_empty() || alpha.iter().any(|&a| a <= 0.0) {
                    return Err(Error::InvalidArgument(
                        "dirichlet needs positive alpha entries".into(),
                    ));
                }
                None
            }
        };
        if let Some(m) = &moments {
            m.validate()?;
        }
        Ok(DistributionSpec { family, moments })
    }

    pub fn point_mass(value: f64) -> Result<Self> {
        Self::new(Family::PointMass { value })
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::new(Family::Bernoulli { p })
    }

    pub fn scaled_bernoulli(p: f64, magnitude: DistributionSpec) -> Result<Self> {
        Self::new(Family::ScaledBernoulli {
            p,
            magnitude: Box::new(magnitude),
        })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(Family::Exponential { rate })
    }

    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Gamma { shape, scale })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Family::Uniform { lo, hi })
    }

    pub fn shifted(base: DistributionSpec, offset: f64) -> Result<Self> {
        Self::new(Family::Shifted {
            base: Box::new(base),
            offset,
        })
    }

    pub fn dirichlet(alpha: Vec<f64>) -> Result<Self> {
        Self::new(Family::Dirichlet { alpha })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn is_row_level(&self) -> bool {
        matches!(self.family, Family::Dirichlet { .. })
    }

    /// Stored raw moments of a scalar law.
    pub fn moments(&self) -> Result<RawMoments> {
        self.moments.ok_or_else(|| {
            Error::InvalidArgument(
                "row-level law has no scalar moments; use component_moments".into(),
            )
        })
    }

    /// Raw moments of component `j` (the Beta marginal for Dirichlet;
    /// the law itself for scalar families).
    pub fn component_moments(&self, j: usize) -> Result<RawMoments> {
        match &self.family {
            Family::Dirichlet { alpha } => {
                if j >= alpha.len() {
                    return Err(Error::InvalidArgument(format!(
                        "component {j} out of range"
                    )));
                }
                let a = alpha[j];
                let a0: f64 = alpha.iter().sum();
                // Beta(a, a0 - a) raw moments: prod_t (a + t) / (a0 + t)
                let m = |r: usize| -> f64 {
                    (0..r).map(|t| (a + t as f64) / (a0 + t as f64)).product()
                };
                Ok(RawMoments {
                    m1: m(1),
                    m2: m(2),
                    m3: m(3),
                    m4: m(4),
                })
            }
            _ => self.moments(),
        }
    }

    pub fn mean(&self) -> Result<f64> {
        Ok(self.moments()?.m1)
    }

    pub fn variance(&self) -> Result<f64> {
        let m = self.moments()?;
        Ok(m.central().0)
    }

    /// One draw from a scalar law.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        match &self.family {
            Family::PointMass { value } => Ok(*value),
            Family::Bernoulli { p } => Ok(if rng.gen::<f64>() < *p { 1.0 } else { 0.0 }),
            Family::ScaledBernoulli { p, magnitude } => {
                let b = rng.gen::<f64>() < *p;
                let s = magnitude.sample(rng)?;
                Ok(if b { s } else { 0.0 })
            }
            Family::Exponential { rate } => {
                let d = rand_distr::Exp::new(*rate)
                    .map_err(|e| Error::InvalidArgument(e.to_string()))?;
                Ok(d.sample(rng))
            }
            Family::Gamma { shape, scale } => {
                let d = rand_distr::Gamma::new(*shape, *scale)
                    .map_err(|e| Error::InvalidArgument(e.to_string()))?;
                Ok(d.sample(rng))
            }
            Family::Uniform { lo, hi } => Ok(rng.gen_range(*lo..*hi)),
            Family::Shifted { base, offset } => Ok(base.sample(rng)? + offset),
            Family::Dirichlet { .. } => Err(Error::InvalidArgument(
                "dirichlet is row-level; use sample_row".into(),
            )),
        }
    }

    /// One simplex draw from a Dirichlet row law, via normalized Gammas.
    pub fn sample_row(&self, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        match &self.family {
            Family::Dirichlet { alpha } => {
                let mut row: Vec<f64> = alpha
                    .iter()
                    .map(|&a| {
                        rand_distr::Gamma::new(a, 1.0)
                            .map(|d| d.sample(rng))
                            .map_err(|e| Error::InvalidArgument(e.to_string()))
                    })
                    .collect::<Result<_>>()?;
                let total: f64 = row.iter().sum();
                if total <= 0.0 {
                    // all-zero is a measure-zero event; renormalize to a vertex
                    let j = alpha.len() - 1;
                    row = vec![0.0; alpha.len()];
                    row[j] = 1.0;
                    return Ok(row);
                }
                for x in &mut row {
                    *x /= total;
                }
                Ok(row)
            }
            _ => Err(Error::InvalidArgument(
                "scalar law has no row sampler".into(),
            )),
        }
    }
}
