//! Closed-form benchmarks for the amplified, maser-attenuated and optical
//! coherent-state sources.
//!
//! The amplified and maser expressions share one shape with the added noise
//! `x = N_A` or `x = n̄_T`:
//!
//! ```text
//! ξ₁ = (1 + 2N_B(1+N_B) + η(x + 2xN_B) − 2√(N_B(1+N_B)(ηx+N_B)(1+ηx+N_B)))^{1/2}
//! ξ₂ = (√N_B − √(1+N_B))(√(ηx+N_B) − √(1+ηx+N_B))
//!      / (√((1+N_B)(1+ηx+N_B)) − √(N_B(ηx+N_B)))
//! P ≤ (1/(2ξ₁)) exp(−M η N_S ξ₂)
//! ```
//!
//! All of them are differences of nearly equal terms at large `N_B`, so they
//! are evaluated term by term in double-double and rounded once at the end.

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{domain, Error, Result};
use crate::qht_symmetric::{check_copies, BoundResult};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmpParams {
    pub n_s: f64,
    /// Photons added by the amplifier, `N_A`.
    pub n_a: f64,
    pub n_b: f64,
    pub eta: f64,
    pub copies: f64,
}

impl AmpParams {
    /// Parameters with `N_A = N_B + g_A/2` derived from the amplifier gain.
    pub fn from_gain(n_s: f64, gain: f64, n_b: f64, eta: f64, copies: f64) -> Result<Self> {
        let n_a = crate::gaussian::amplifier_noise_from_gain(gain, n_b)?;
        let p = AmpParams {
            n_s,
            n_a,
            n_b,
            eta,
            copies,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        check_common(self.n_s, self.n_b, self.eta, self.copies)?;
        non_negative("n_a", self.n_a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaserParams {
    pub n_s: f64,
    /// Attenuator transmissivity, in `(0, 1]`.
    pub phi: f64,
    /// Fridge occupation `n̄_T`.
    pub n_t: f64,
    pub n_b: f64,
    pub eta: f64,
    pub copies: f64,
}

impl MaserParams {
    fn validate(&self) -> Result<()> {
        check_common(self.n_s, self.n_b, self.eta, self.copies)?;
        non_negative("n_t", self.n_t)?;
        if !(self.phi > 0.0 && self.phi <= 1.0) {
            return Err(domain(format!("phi must lie in (0, 1], got {}", self.phi)));
        }
        Ok(())
    }
}

/// Relative entropy and its variance, in nats and nats².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DvPair {
    pub d: f64,
    pub v: f64,
}

fn non_negative(name: &str, x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain(format!("{name} must be finite and >= 0, got {x}")));
    }
    Ok(())
}

fn check_common(n_s: f64, n_b: f64, eta: f64, copies: f64) -> Result<()> {
    non_negative("n_s", n_s)?;
    non_negative("n_b", n_b)?;
    if !(0.0..=1.0).contains(&eta) {
        return Err(domain(format!("eta must lie in [0, 1], got {eta}")));
    }
    check_copies(copies)
}

fn positive_background(n_b: f64) -> Result<()> {
    if !(n_b > 0.0) {
        return Err(domain(format!("background must be > 0 here, got {n_b}")));
    }
    Ok(())
}

fn checked(x: Dd) -> Result<f64> {
    let x = x.to_f64();
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Numeric(format!("closed form evaluated to {x}")))
    }
}

/// `ξ₁ − 1 = √((1+N_B)(1+N₁)) − √(N_B N₁) − 1` with `N₁ = N_B + ηx`,
/// rewritten as a ratio of positive terms so that it keeps full relative
/// precision when `ηx ≪ N_B`.
pub fn xi1_minus_one(n_b: f64, eta: f64, x: f64) -> f64 {
    let (u, ex) = (n_b, eta * x);
    let w = u + ex;
    let (p, q) = (u * (1.0 + u), w * (1.0 + w));
    let a = ((1.0 + u) * (1.0 + w)).sqrt();
    let b = (u * w).sqrt();
    let diff = ex * (1.0 + u + w);
    if diff == 0.0 {
        return 0.0;
    }
    diff * diff / ((p + q + 2.0 * a * b) * (1.0 + u + w + a + b) * (a + b))
}

/// `ξ₂` for added noise `x`.
fn xi2(n_b: f64, eta: f64, x: f64) -> Dd {
    let one = Dd::ONE;
    let nb = Dd::new(n_b);
    let n1 = Dd::new(eta) * Dd::new(x) + nb;
    let num = (nb.sqrt() - (one + nb).sqrt()) * (n1.sqrt() - (one + n1).sqrt());
    let den = ((one + nb) * (one + n1)).sqrt() - (nb * n1).sqrt();
    num / den
}

/// `−ln` of the per-copy overlap `e^{−ηN_S ξ₂}/ξ₁`, i.e. the closed-form
/// exponent with the noise term `ln ξ₁` of the prefactor folded in.
pub fn per_copy_overlap_exponent(n_s_eff: f64, n_b: f64, eta: f64, x: f64) -> Result<f64> {
    check_common(n_s_eff, n_b, eta, 1.0)?;
    non_negative("added noise", x)?;
    let signal = checked(Dd::new(eta) * Dd::new(n_s_eff) * xi2(n_b, eta, x))?;
    Ok(signal + xi1_minus_one(n_b, eta, x).ln_1p())
}

/// Amplified source: `(1/(2ξ₁)) exp(−M η N_S ξ₂)`.
pub fn qcb_amp(p: &AmpParams) -> Result<BoundResult> {
    p.validate()?;
    let exponent = checked(Dd::new(p.eta) * Dd::new(p.n_s) * xi2(p.n_b, p.eta, p.n_a))?;
    let xi1 = 1.0 + xi1_minus_one(p.n_b, p.eta, p.n_a);
    Ok(BoundResult::new(0.5 / xi1, exponent, p.copies, None))
}

/// Maser-attenuated source: `(1/(2χ₁)) exp(−M η φN_S χ₂)`.
pub fn qcb_maser(p: &MaserParams) -> Result<BoundResult> {
    p.validate()?;
    let signal = Dd::new(p.phi) * Dd::new(p.n_s);
    let exponent = checked(Dd::new(p.eta) * signal * xi2(p.n_b, p.eta, p.n_t))?;
    let chi1 = 1.0 + xi1_minus_one(p.n_b, p.eta, p.n_t);
    Ok(BoundResult::new(0.5 / chi1, exponent, p.copies, None))
}

/// `(√(N_B+1) − √N_B)² = 1/(√(N_B+1) + √N_B)²`.
pub fn optical_coefficient(n_b: f64) -> f64 {
    let s = (n_b + 1.0).sqrt() + n_b.sqrt();
    1.0 / (s * s)
}

/// Optical coherent state: `½ exp(−M η N_S (√(N_B+1) − √N_B)²)`.
pub fn qcb_optical(n_s_eff: f64, n_b: f64, eta: f64, copies: f64) -> Result<BoundResult> {
    check_common(n_s_eff, n_b, eta, copies)?;
    let exponent = eta * n_s_eff * optical_coefficient(n_b);
    Ok(BoundResult::new(0.5, exponent, copies, None))
}

/// Large-background limit: `½ exp(−M η N_S / (4N_B))`.
pub fn qcb_high_background(n_s_eff: f64, n_b: f64, eta: f64, copies: f64) -> Result<BoundResult> {
    check_common(n_s_eff, n_b, eta, copies)?;
    positive_background(n_b)?;
    Ok(BoundResult::new(
        0.5,
        eta * n_s_eff / (4.0 * n_b),
        copies,
        None,
    ))
}

/// Two-mode squeezed vacuum asymptote: `½ exp(−M η N_S / N_B)`.
pub fn tmsv_asymptote(n_s: f64, n_b: f64, eta: f64, copies: f64) -> Result<BoundResult> {
    check_common(n_s, n_b, eta, copies)?;
    positive_background(n_b)?;
    Ok(BoundResult::new(0.5, eta * n_s / n_b, copies, None))
}

/// `D` and `V` for signal `μ = ηN_S` with added noise `x` on the return.
fn dv(mu: Dd, n_b: f64, eta: f64, x: f64) -> Result<DvPair> {
    let one = Dd::ONE;
    let two = Dd::new(2.0);
    let nb = Dd::new(n_b);
    let n1 = Dd::new(eta) * Dd::new(x) + nb;
    let l0 = nb.recip().ln_1p();
    let l1 = n1.recip().ln_1p();

    let d = Dd::new(0.5)
        * ((one + two * nb + two * mu) * l1 - (one + two * nb) * l0
            + ((n1 * (one + n1)) / (nb * (one + nb))).ln());
    let nn = nb * (one + nb);
    let v = nn * l0 * l0 - two * nn * l0 * l1 + (nn + mu + two * mu * nb) * l1 * l1;
    Ok(DvPair {
        d: checked(d)?.max(0.0),
        v: checked(v)?.max(0.0),
    })
}

/// Amplified source relative entropy and variance.
pub fn qre_amp(p: &AmpParams) -> Result<DvPair> {
    p.validate()?;
    positive_background(p.n_b)?;
    dv(Dd::new(p.eta) * Dd::new(p.n_s), p.n_b, p.eta, p.n_a)
}

/// Maser-attenuated source relative entropy and variance.
pub fn qre_maser(p: &MaserParams) -> Result<DvPair> {
    p.validate()?;
    positive_background(p.n_b)?;
    let mu = Dd::new(p.eta) * Dd::new(p.phi) * Dd::new(p.n_s);
    dv(mu, p.n_b, p.eta, p.n_t)
}

/// Optical source: `D = ηN_S ln(1 + 1/N_B)`, `V = ηN_S (2N_B+1) ln²(1 + 1/N_B)`.
pub fn qre_optical(n_s_eff: f64, n_b: f64, eta: f64) -> Result<DvPair> {
    check_common(n_s_eff, n_b, eta, 1.0)?;
    positive_background(n_b)?;
    let mu = eta * n_s_eff;
    let l = (1.0 / n_b).ln_1p();
    Ok(DvPair {
        d: mu * l,
        v: mu * (2.0 * n_b + 1.0) * l * l,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rel_diff;

    fn amp(n_s: f64, n_a: f64, n_b: f64, eta: f64) -> AmpParams {
        AmpParams {
            n_s,
            n_a,
            n_b,
            eta,
            copies: 1.0,
        }
    }

    #[test]
    fn xi1_keeps_precision_for_small_noise() {
        // mpmath references
        let a = xi1_minus_one(6250.0, 1e-2, 6250.0);
        assert!(rel_diff(a, 1.237_419_098_205_634_3e-5) < 1e-14, "{a:e}");
        let b = xi1_minus_one(100.0, 1e-8, 100.0);
        assert!(rel_diff(b, 1.237_623_750_061_268_5e-17) < 1e-12, "{b:e}");
        assert_eq!(xi1_minus_one(6250.0, 0.5, 0.0), 0.0);
    }

    #[test]
    fn per_copy_overlap_is_the_half_overlap() {
        use crate::gaussian::{make_thermal, GaussianState};
        use crate::qht_symmetric::qbb;
        let (n_s, n_b, eta, x) = (1e-2, 6250.0, 1e-2, 6250.0);
        let rho0 = make_thermal(Dd::new(n_b)).unwrap();
        let rho1 = GaussianState::displaced_thermal(
            Dd::new(eta) * Dd::new(n_s),
            Dd::new(n_b) + Dd::new(eta) * Dd::new(x),
        )
        .unwrap();
        let oracle = qbb(&rho0, &rho1, 1.0).unwrap().exponent;
        let closed = per_copy_overlap_exponent(n_s, n_b, eta, x).unwrap();
        assert!(rel_diff(closed, oracle) < 1e-12, "{closed:e} vs {oracle:e}");
    }

    #[test]
    fn amp_without_noise_is_optical() {
        for n_b in [0.0, 1.0, 100.0, 6250.0, 5e8] {
            let a = qcb_amp(&amp(0.3, 0.0, n_b, 0.01)).unwrap();
            let o = qcb_optical(0.3, n_b, 0.01, 1.0).unwrap();
            assert!(rel_diff(a.exponent, o.exponent) < 1e-14, "N_B = {n_b}");
            assert!(rel_diff(a.prefactor, 0.5) < 1e-15);
        }
    }

    #[test]
    fn zero_reflectivity_gives_half() {
        let a = qcb_amp(&amp(1e-2, 6250.0, 6250.0, 0.0)).unwrap();
        assert_eq!(a.exponent, 0.0);
        assert!(rel_diff(a.value, 0.5) < 1e-15);
        assert_eq!(
            qcb_high_background(1.0, 6250.0, 0.0, 1e6).unwrap().value,
            0.5
        );
        assert_eq!(tmsv_asymptote(1.0, 6250.0, 0.0, 1e6).unwrap().value, 0.5);
        assert_eq!(
            qre_amp(&amp(1e-2, 6250.0, 6250.0, 0.0)).unwrap(),
            DvPair { d: 0.0, v: 0.0 }
        );
        assert_eq!(
            qre_optical(1.0, 6250.0, 0.0).unwrap(),
            DvPair { d: 0.0, v: 0.0 }
        );
    }

    #[test]
    fn optical_coefficient_reference() {
        // 40-digit reference for (√6251 − √6250)²
        assert!(rel_diff(optical_coefficient(6250.0), 3.999_680_031_996_416_5e-5) < 1e-15);
        let o = qcb_optical(1.0, 0.0, 0.2, 1.0).unwrap();
        assert_eq!(o.exponent, 0.2);
    }

    #[test]
    fn high_background_at_small_and_large_background() {
        let ratio = |n_b: f64| {
            qcb_high_background(1.0, n_b, 1.0, 1.0).unwrap().exponent
                / qcb_optical(1.0, n_b, 1.0, 1.0).unwrap().exponent
        };
        // 1/(4(√2 − 1)²) at N_B = 1
        assert!(rel_diff(ratio(1.0), 1.457_106_781_186_547_5) < 1e-14);
        assert!(rel_diff(ratio(6250.0), 1.000_079_998_4) < 1e-9);
        assert!(ratio(1e12) - 1.0 < 1e-11);
    }

    #[test]
    fn tmsv_is_four_times_high_background() {
        let t = tmsv_asymptote(0.01, 6250.0, 0.01, 1e7).unwrap();
        let h = qcb_high_background(0.01, 6250.0, 0.01, 1e7).unwrap();
        assert_eq!(t.exponent / h.exponent, 4.0);
        assert!(rel_diff(t.value, 0.5 * (-0.16f64).exp()) < 1e-14);
    }

    #[test]
    fn maser_substitution_matches_amp() {
        let a = amp(0.2, 207.9, 6250.0, 1e-3);
        let m = MaserParams {
            n_s: 0.2,
            phi: 1.0,
            n_t: 207.9,
            n_b: 6250.0,
            eta: 1e-3,
            copies: 1.0,
        };
        assert_eq!(qcb_amp(&a).unwrap(), qcb_maser(&m).unwrap());
        assert_eq!(qre_amp(&a).unwrap(), qre_maser(&m).unwrap());
    }

    #[test]
    fn maser_cold_fridge_is_optical_like() {
        let m = MaserParams {
            n_s: 6250.01,
            phi: 1.0,
            n_t: 0.0,
            n_b: 6250.0,
            eta: 1e-2,
            copies: 1.0,
        };
        let hb = qcb_high_background(6250.01, 6250.0, 1e-2, 1.0).unwrap();
        assert!(rel_diff(qcb_maser(&m).unwrap().exponent, hb.exponent) < 1e-3);
        let dv = qre_maser(&m).unwrap();
        let opt = qre_optical(6250.01, 6250.0, 1e-2).unwrap();
        assert!(rel_diff(dv.d, opt.d) < 1e-12);
        assert!(rel_diff(dv.v, opt.v) < 1e-12);
    }

    #[test]
    fn qre_amp_without_noise_is_optical() {
        let dv = qre_amp(&amp(1e-2, 0.0, 6250.0, 1e-2)).unwrap();
        let opt = qre_optical(1e-2, 6250.0, 1e-2).unwrap();
        assert!(rel_diff(dv.d, opt.d) < 1e-12, "{} {}", dv.d, opt.d);
        assert!(rel_diff(dv.v, opt.v) < 1e-12, "{} {}", dv.v, opt.v);
    }

    #[test]
    fn qre_optical_reference() {
        let dv = qre_optical(62.5001, 6250.0, 1.0).unwrap();
        assert!(rel_diff(dv.d, 9.999_216_084_04e-3) < 1e-11);
        let ratio = dv.v / dv.d;
        assert!(rel_diff(ratio, 12501.0 * (1.0f64 / 6250.0).ln_1p()) < 1e-14);
    }

    #[test]
    fn domain_checks() {
        assert!(qre_amp(&amp(1.0, 1.0, 0.0, 0.1)).is_err());
        assert!(qcb_amp(&amp(-1.0, 1.0, 1.0, 0.1)).is_err());
        assert!(qcb_amp(&amp(1.0, 1.0, 1.0, 1.1)).is_err());
        let bad_phi = MaserParams {
            n_s: 1.0,
            phi: 0.0,
            n_t: 1.0,
            n_b: 1.0,
            eta: 0.1,
            copies: 1.0,
        };
        assert!(qcb_maser(&bad_phi).is_err());
        let from_gain = AmpParams::from_gain(0.01, 1.0, 6250.0, 0.01, 1.0).unwrap();
        assert_eq!(from_gain.n_a, 6250.5);
        assert!(AmpParams::from_gain(0.01, 0.5, 6250.0, 0.01, 1.0).is_err());
    }

    #[test]
    fn more_amplifier_noise_never_helps() {
        let mut last = f64::INFINITY;
        for n_a in [0.0, 1.0, 10.0, 100.0, 6250.0, 1e5, 5e8] {
            let e = qcb_amp(&amp(1e-2, n_a, 6250.0, 1e-2)).unwrap().exponent;
            assert!(e <= last, "N_A = {n_a}");
            last = e;
        }
    }
}
