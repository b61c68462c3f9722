use serde::{Deserialize, Serialize};

use crate::dist::Params;
use crate::error::{Error, Result};
use crate::mle::Vec3;

/// Independent gamma priors: `α ~ G(a, b)`, `λ ~ G(c, d)`, `β ~ G(g, f)`,
/// shape/rate parametrization. A zero rate with unit shape gives a flat prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorHyper {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub g: f64,
    pub f: f64,
}

impl Default for PriorHyper {
    fn default() -> Self {
        PriorHyper::non_informative()
    }
}

impl PriorHyper {
    pub fn new(a: f64, b: f64, c: f64, d: f64, g: f64, f: f64) -> Result<Self> {
        let h = PriorHyper { a, b, c, d, g, f };
        h.validate()?;
        Ok(h)
    }

    /// Flat prior on the positive orthant.
    pub fn non_informative() -> Self {
        PriorHyper {
            a: 1.0,
            b: 0.0,
            c: 1.0,
            d: 0.0,
            g: 1.0,
            f: 0.0,
        }
    }

    /// Parses `a,b,c,d,g,f`.
    pub fn parse(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Config(format!("prior `{s}`: {e}")))?;
        if v.len() != 6 {
            return Err(Error::Config(format!(
                "prior needs six values a,b,c,d,g,f; got {}",
                v.len()
            )));
        }
        PriorHyper::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.a, self.b, self.c, self.d, self.g, self.f];
        if all.iter().all(|v| v.is_finite() && *v >= 0.0) {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "prior hyperparameters must be finite and >= 0, got {all:?}"
            )))
        }
    }

    /// `(shape, rate)` pairs in `(α, λ, β)` order.
    pub fn pairs(&self) -> [(f64, f64); 3] {
        [(self.a, self.b), (self.c, self.d), (self.g, self.f)]
    }

    /// Whether every marginal is a proper gamma density (all rates and shapes > 0).
    pub fn is_proper(&self) -> bool {
        self.pairs().iter().all(|&(s, r)| s > 0.0 && r > 0.0)
    }

    /// Unnormalized `ln π(θ)`; `-∞` outside the support.
    pub fn log_density(&self, theta: &Vec3) -> f64 {
        let mut acc = 0.0;
        for (&x, (shape, rate)) in theta.iter().zip(self.pairs()) {
            if x < 0.0 {
                return f64::NEG_INFINITY;
            }
            if shape != 1.0 {
                acc += (shape - 1.0) * x.ln();
            }
            acc -= rate * x;
        }
        acc
    }
}

/// Gradient `(ρ₁, ρ₂, ρ₃)` of the log prior density.
pub fn prior_log_density_grad(h: &PriorHyper, p: &Params) -> Result<Vec3> {
    let theta = p.as_array();
    let names = ["alpha", "lambda", "beta"];
    let mut rho = [0.0; 3];
    for (i, (shape, rate)) in h.pairs().into_iter().enumerate() {
        if shape == 1.0 {
            rho[i] = -rate;
        } else if theta[i] == 0.0 {
            return Err(Error::SingularPrior(format!(
                "{} = 0 with prior shape {shape} != 1",
                names[i]
            )));
        } else {
            rho[i] = (shape - 1.0) / theta[i] - rate;
        }
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_prior_has_zero_gradient() {
        let p = Params::new(0.4, 1.3, 0.2).unwrap();
        assert_eq!(prior_log_density_grad(&PriorHyper::non_informative(), &p).unwrap(), [0.0; 3]);
    }

    #[test]
    fn gradient_closed_form() {
        let h = PriorHyper::new(2.0, 1.0, 3.0, 0.5, 1.0, 2.0).unwrap();
        let p = Params::new(1.0, 2.0, 0.5).unwrap();
        let rho = prior_log_density_grad(&h, &p).unwrap();
        assert_eq!(rho[0], 0.0);
        assert_eq!(rho[1], 2.0 / 2.0 - 0.5);
        assert_eq!(rho[2], -2.0);
    }

    #[test]
    fn boundary_with_non_unit_shape_is_singular() {
        let h = PriorHyper::new(1.0, 0.0, 1.0, 0.0, 2.0, 1.0).unwrap();
        let p = Params::new(1.0, 1.0, 0.0).unwrap();
        assert!(matches!(prior_log_density_grad(&h, &p), Err(Error::SingularPrior(_))));
        let p = Params::new(1.0, 0.0, 1.0).unwrap();
        assert!(prior_log_density_grad(&h, &p).is_ok());
    }

    #[test]
    fn parse_and_validate() {
        let h = PriorHyper::parse("2,2,2,2,2,2").unwrap();
        assert!(h.is_proper());
        assert!(!PriorHyper::non_informative().is_proper());
        assert!(PriorHyper::parse("1,2,3").is_err());
        assert!(PriorHyper::parse("1,-2,3,1,1,1").is_err());
        assert!(PriorHyper::parse("1,x,3,1,1,1").is_err());
    }
}
