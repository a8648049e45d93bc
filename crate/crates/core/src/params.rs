//! Closed-form parameter algebra of the Hamiltonian game: `η*`, `p*`, the
//! knowledge error `κ`, the constant `D` and the `η ↔ p` coupling.
//!
//! The `n²⁴` factors leave doubles without meaningful digits, so derived
//! quantities are exact rationals; floats are only for display.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::XZHamiltonian;

/// Default rigidity constant.
pub const DEFAULT_C: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GameParams {
    pub n: usize,
    pub gamma: BigRational,
    pub alpha: BigRational,
    pub c: BigRational,
    pub eta_star: BigRational,
    pub p_star: BigRational,
    pub eta_hat: BigRational,
    pub kappa: BigRational,
    pub d: BigRational,
}

/// Floating view of [`GameParams`] with the exact values as strings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamsTable {
    pub n: usize,
    pub gamma: f64,
    pub alpha: f64,
    pub c: f64,
    pub eta_star: f64,
    pub p_star: f64,
    pub kappa: f64,
    pub d: f64,
    pub eta_hat: f64,
    pub eta_star_exact: String,
    pub p_star_exact: String,
    pub eta_hat_exact: String,
}

fn exact(name: &'static str, x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidParameter { name, msg: format!("{x} is not finite") })
}

fn int(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `27 (1+C)⁴ n²⁴`.
fn denominator(n: usize, c: &BigRational) -> BigRational {
    let one_c = BigRational::one() + c;
    int(27) * one_c.pow(4) * int(n as i64).pow(24)
}

/// Derives every parameter from `(n, γ, α, C)` with `0 ≤ α ≤ γ ≤ 1 < C`.
pub fn derive(n: usize, gamma: f64, alpha: f64, c: f64) -> Result<GameParams> {
    let bad = |name, msg: String| Err(Error::InvalidParameter { name, msg });
    if n == 0 {
        return bad("n", "must be at least 1".into());
    }
    if !(0.0..=1.0).contains(&gamma) {
        return bad("gamma", format!("{gamma} outside [0, 1]"));
    }
    if !(0.0..=gamma).contains(&alpha) {
        return bad("alpha", format!("{alpha} outside [0, gamma = {gamma}]"));
    }
    if gamma + alpha <= 0.0 {
        return bad("gamma", "gamma + alpha must be positive".into());
    }
    if c.is_nan() || c <= 1.0 {
        return bad("C", format!("{c} must exceed 1"));
    }
    derive_exact(n, &exact("gamma", gamma)?, &exact("alpha", alpha)?, &exact("C", c)?)
}

/// As [`derive`] on exact inputs (constraints are the caller's concern).
pub fn derive_exact(n: usize, gamma: &BigRational, alpha: &BigRational, c: &BigRational) -> Result<GameParams> {
    if (gamma + alpha).is_zero() {
        return Err(Error::InvalidParameter { name: "gamma", msg: "gamma + alpha must be positive".into() });
    }
    let den = denominator(n, c);
    let ga = gamma + alpha;
    let eta_star = int(16) * ga.pow(4) / &den;
    let p_star = int(32) * ga.pow(3) / &den;
    let eta_hat = int(16) * gamma.pow(4) / &den;
    let kappa = BigRational::one() - &eta_hat;
    let one_c = BigRational::one() + c;
    let d = int(27) * one_c.pow(4) / (int(16) * ga.pow(3));
    Ok(GameParams { n, gamma: gamma.clone(), alpha: alpha.clone(), c: c.clone(), eta_star, p_star, eta_hat, kappa, d })
}

impl GameParams {
    pub fn table(&self) -> ParamsTable {
        ParamsTable {
            n: self.n,
            gamma: to_f64(&self.gamma),
            alpha: to_f64(&self.alpha),
            c: to_f64(&self.c),
            eta_star: to_f64(&self.eta_star),
            p_star: to_f64(&self.p_star),
            kappa: to_f64(&self.kappa),
            d: to_f64(&self.d),
            eta_hat: to_f64(&self.eta_hat),
            eta_star_exact: self.eta_star.to_string(),
            p_star_exact: self.p_star.to_string(),
            eta_hat_exact: self.eta_hat.to_string(),
        }
    }

    /// `1 − p(γ + α)/2` at `p = p*`; equals `1 − η*`.
    pub fn semi_honest_value_at_p_star(&self) -> BigRational {
        semi_honest_value_exact(&self.gamma, &self.p_star, &self.alpha)
    }

    /// `r(n) = 27(1+C)⁴n²⁴ / (16γ⁴)`, so that `κ = 1 − 1/r(n)`.
    pub fn r(&self) -> Option<BigRational> {
        if self.gamma.is_zero() {
            return None;
        }
        Some(denominator(self.n, &self.c) / (int(16) * self.gamma.pow(4)))
    }

    pub fn in_regime(&self, epsilon: f64) -> bool {
        match BigRational::from_float(epsilon) {
            Some(e) => !e.is_negative() && e <= self.eta_star,
            None => false,
        }
    }
}

/// `p = 4η^{3/4} / (3^{3/4}(1+C)n⁶)`.
pub fn lemma_p(eta: f64, n: usize, c: f64) -> f64 {
    4.0 * eta.powf(0.75) / (3f64.powf(0.75) * (1.0 + c) * (n as f64).powi(6))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoupledEta {
    pub eta: f64,
    /// `η < 1`; otherwise `p` is too large for the lemma.
    pub in_regime: bool,
}

/// Inverse of [`lemma_p`]: `η = (3^{3/4}(1+C)n⁶p/4)^{4/3}`.
pub fn coupled_eta(p: f64, n: usize, c: f64) -> Result<CoupledEta> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter { name: "p", msg: format!("{p} outside (0, 1)") });
    }
    if n == 0 {
        return Err(Error::InvalidParameter { name: "n", msg: "must be at least 1".into() });
    }
    let eta = (3f64.powf(0.75) * (1.0 + c) * (n as f64).powi(6) * p / 4.0).powf(4.0 / 3.0);
    Ok(CoupledEta { eta, in_regime: eta < 1.0 })
}

/// `1 − p(γ/2 + energy/2)`.
pub fn semi_honest_value(h: &XZHamiltonian, p: f64, energy: f64) -> f64 {
    1.0 - p * (h.gamma() / 2.0 + energy / 2.0)
}

pub fn semi_honest_value_exact(gamma: &BigRational, p: &BigRational, energy: &BigRational) -> BigRational {
    BigRational::one() - p * (gamma + energy) / int(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let g = derive(2, 1.0, 0.5, 3.0).unwrap();
        assert_eq!(g.p_star, BigRational::new(BigInt::from(108), BigInt::from(115_964_116_992u64)));
        assert_eq!(g.eta_star, BigRational::new(BigInt::from(81), BigInt::from(115_964_116_992u64)));
        assert_eq!(g.semi_honest_value_at_p_star(), BigRational::one() - &g.eta_star);
    }

    #[test]
    fn constraints_are_named() {
        for (n, gamma, alpha, c, name) in
            [(0, 1.0, 0.5, 3.0, "n"), (2, 1.5, 0.5, 3.0, "gamma"), (2, 0.5, 0.7, 3.0, "alpha"), (2, 1.0, 0.5, 1.0, "C")]
        {
            match derive(n, gamma, alpha, c) {
                Err(Error::InvalidParameter { name: got, .. }) => assert_eq!(got, name),
                other => panic!("expected {name} error, got {other:?}"),
            }
        }
    }

    #[test]
    fn coupling_round_trips() {
        let eta = 0.5;
        let p = lemma_p(eta, 2, 3.0);
        let back = coupled_eta(p, 2, 3.0).unwrap();
        assert!((back.eta - eta).abs() < 1e-12 * eta);
        assert!(back.in_regime);
    }
}
