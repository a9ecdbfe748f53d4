//! Symmetric hypothesis testing: the s-overlap `C_s = Tr ρ₀ˢρ₁^{1−s}` of two
//! Gaussian states, the quantum Chernoff bound and the Bhattacharyya bound.
//!
//! With vacuum variance ½, Williamson forms `V_i = S_i V_i⊕ S_iᵀ` and
//! `d = x̄₀ − x̄₁`,
//!
//! ```text
//! ln C_s = N ln 2 + Σ_k [ln G_s(ν₀ₖ) + ln G_{1−s}(ν₁ₖ)] − ½ ln det Σ_s − dᵀ Σ_s⁻¹ d
//! Σ_s    = S₀ Λ_s(V₀⊕) S₀ᵀ + S₁ Λ_{1−s}(V₁⊕) S₁ᵀ
//! G_s(ν) = 1 / ((ν+½)ˢ − (ν−½)ˢ),   Λ_s(ν) = ((ν+½)ˢ + (ν−½)ˢ) G_s(ν)
//! ```
//!
//! The scalar maps are evaluated as `ln G_s = −s ln(ν−½) − ln expm1(sL)` and
//! `Λ_s = coth(sL/2)` with `L = ln(1 + 1/(ν−½))`, which stays accurate at
//! large occupations. A pure mode (`ν = ½`) uses the exact limit
//! `(ν−½)ˢ = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gaussian::{williamson_with, GaussianState, Tolerances, Williamson};
use crate::linalg::Mat;
use crate::minimize::{brent, BrentOptions};
use crate::scalar::Real;

/// Distance kept from the endpoints `s ∈ {0, 1}`.
pub const S_MARGIN: f64 = 1e-9;
/// How far outside `[0, 1]` a requested `s` may lie before it is rejected.
const S_SLACK: f64 = 1e-12;

/// `C_s` at one value of `s`.
#[derive(Clone, Debug)]
pub struct OverlapResult<T = f64> {
    pub c_s: f64,
    pub ln_c_s: T,
    /// The `s` actually evaluated (endpoints are moved inside by [`S_MARGIN`]).
    pub s: f64,
    /// `ln det Π_s`.
    pub ln_det_pi: T,
    pub sigma: Mat<T>,
    /// Set when a mode was treated as exactly pure.
    pub pure_mode_limit: bool,
}

/// A bound of the form `prefactor · exp(−copies · exponent)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub value: f64,
    /// `ln value`, finite even when `value` underflows.
    pub ln_value: f64,
    /// Per-copy error exponent (`−ln C_{s*}` for the Chernoff bound).
    pub exponent: f64,
    pub prefactor: f64,
    /// Optimiser location; `None` for closed forms.
    pub s_star: Option<f64>,
    pub copies: f64,
}

impl BoundResult {
    pub fn new(prefactor: f64, exponent: f64, copies: f64, s_star: Option<f64>) -> Self {
        let ln_value = prefactor.ln() - copies * exponent;
        BoundResult {
            value: ln_value.exp(),
            ln_value,
            exponent,
            prefactor,
            s_star,
            copies,
        }
    }

    /// `C_{s*} = e^{−exponent}`.
    pub fn per_mode_overlap(&self) -> f64 {
        (-self.exponent).exp()
    }

    pub fn with_copies(&self, copies: f64) -> Self {
        BoundResult::new(self.prefactor, self.exponent, copies, self.s_star)
    }
}

struct ModeMaps<T> {
    ln_g: T,
    lambda: T,
}

/// `ln G_s(ν)` and `Λ_s(ν)` for one symplectic eigenvalue.
fn mode_maps<T: Real>(nu: T, s: T, pure: bool) -> ModeMaps<T> {
    if pure {
        // (ν+½)ˢ = 1 and (ν−½)ˢ = 0
        return ModeMaps {
            ln_g: T::zero(),
            lambda: T::one(),
        };
    }
    let excess = nu - T::half();
    let l = excess.recip().ln_1p();
    let em1 = (s * l).exp_m1();
    ModeMaps {
        ln_g: -(s * excess.ln()) - em1.ln(),
        lambda: (em1 + T::from_f64(2.0)) / em1,
    }
}

/// Precomputed Williamson forms of a state pair, reused across `s`.
#[derive(Clone, Debug)]
pub struct OverlapKernel<T = f64> {
    w0: Williamson<T>,
    w1: Williamson<T>,
    pure0: Vec<bool>,
    pure1: Vec<bool>,
    d: Vec<T>,
    identical: bool,
}

impl<T: Real> OverlapKernel<T> {
    pub fn new(rho0: &GaussianState<T>, rho1: &GaussianState<T>) -> Result<Self> {
        if rho0.modes() != rho1.modes() {
            return Err(domain(format!(
                "mode counts differ: {} vs {}",
                rho0.modes(),
                rho1.modes()
            )));
        }
        let tol = Tolerances::default();
        let w0 = williamson_with(rho0.cov(), &tol)?;
        let w1 = williamson_with(rho1.cov(), &tol)?;
        for (name, w) in [("rho0", &w0), ("rho1", &w1)] {
            if w.below_vacuum {
                return Err(domain(format!(
                    "{name} is unphysical (symplectic eigenvalue {:e})",
                    w.min_nu().to_f64()
                )));
            }
        }
        let pure = |w: &Williamson<T>| -> Vec<bool> {
            w.nus
                .iter()
                .map(|nu| nu.to_f64() - 0.5 <= tol.physicality)
                .collect()
        };
        let d: Vec<T> = rho0
            .mean()
            .iter()
            .zip(rho1.mean())
            .map(|(&a, &b)| a - b)
            .collect();
        let identical = rho0 == rho1;
        Ok(OverlapKernel {
            pure0: pure(&w0),
            pure1: pure(&w1),
            w0,
            w1,
            d,
            identical,
        })
    }

    pub fn modes(&self) -> usize {
        self.w0.nus.len()
    }

    pub fn identical(&self) -> bool {
        self.identical
    }

    /// `C_s` for `s ∈ [0, 1]`; values within [`S_MARGIN`] of an endpoint are
    /// evaluated at the margin.
    pub fn overlap(&self, s: f64) -> Result<OverlapResult<T>> {
        if !(-S_SLACK..=1.0 + S_SLACK).contains(&s) {
            return Err(domain(format!("s = {s} is outside [0, 1]")));
        }
        let s = s.clamp(S_MARGIN, 1.0 - S_MARGIN);
        let st = T::from_f64(s);
        let s1 = T::one() - st;

        let modes = self.modes();
        let mut ln_det_half_pi = T::zero();
        let mut lam0 = Vec::with_capacity(2 * modes);
        let mut lam1 = Vec::with_capacity(2 * modes);
        for k in 0..modes {
            let m0 = mode_maps(self.w0.nus[k], st, self.pure0[k]);
            let m1 = mode_maps(self.w1.nus[k], s1, self.pure1[k]);
            ln_det_half_pi += m0.ln_g + m1.ln_g;
            lam0.extend([m0.lambda, m0.lambda]);
            lam1.extend([m1.lambda, m1.lambda]);
        }
        let part0 = &(&self.w0.s * &Mat::diag(&lam0)) * &self.w0.s.transpose();
        let part1 = &(&self.w1.s * &Mat::diag(&lam1)) * &self.w1.s.transpose();
        let sigma = &part0 + &part1;
        let chol = sigma
            .cholesky()
            .map_err(|e| Error::Numeric(format!("Σ_s at s = {s}: {e}")))?;

        let n_ln2 = T::from_f64(modes as f64) * T::from_f64(2.0).ln();
        let ln_c_s =
            n_ln2 + ln_det_half_pi - T::half() * chol.ln_det() - chol.inv_quad_form(&self.d);
        let pure_mode_limit = self.pure0.iter().chain(&self.pure1).any(|&p| p);
        Ok(OverlapResult {
            c_s: ln_c_s.to_f64().exp(),
            ln_c_s,
            s,
            ln_det_pi: T::from_f64(2.0) * ln_det_half_pi,
            sigma,
            pure_mode_limit,
        })
    }

    /// `inf_s C_s`, returned as `(s*, ln C_{s*})`.
    pub fn minimise(&self) -> Result<(f64, T)> {
        if self.identical {
            return Ok((0.5, T::zero()));
        }
        let m = brent(
            |s| self.overlap(s).map(|o| o.ln_c_s.to_f64()),
            S_MARGIN,
            1.0 - S_MARGIN,
            &BrentOptions::default(),
        )?;
        let at = self.overlap(m.x)?;
        Ok((m.x, at.ln_c_s))
    }
}

/// `C_s(ρ₀, ρ₁)`.
pub fn s_overlap<T: Real>(
    rho0: &GaussianState<T>,
    rho1: &GaussianState<T>,
    s: f64,
) -> Result<OverlapResult<T>> {
    OverlapKernel::new(rho0, rho1)?.overlap(s)
}

/// Quantum Chernoff bound `½ (inf_s C_s)^M`.
pub fn qcb<T: Real>(
    rho0: &GaussianState<T>,
    rho1: &GaussianState<T>,
    copies: f64,
) -> Result<BoundResult> {
    check_copies(copies)?;
    let (s_star, ln_c) = OverlapKernel::new(rho0, rho1)?.minimise()?;
    Ok(BoundResult::new(
        0.5,
        clean_exponent(ln_c),
        copies,
        Some(s_star),
    ))
}

/// Quantum Bhattacharyya bound `½ C_{1/2}^M`.
pub fn qbb<T: Real>(
    rho0: &GaussianState<T>,
    rho1: &GaussianState<T>,
    copies: f64,
) -> Result<BoundResult> {
    check_copies(copies)?;
    let kernel = OverlapKernel::new(rho0, rho1)?;
    let ln_c = if kernel.identical() {
        T::zero()
    } else {
        kernel.overlap(0.5)?.ln_c_s
    };
    Ok(BoundResult::new(
        0.5,
        clean_exponent(ln_c),
        copies,
        Some(0.5),
    ))
}

fn clean_exponent<T: Real>(ln_c: T) -> f64 {
    // C_s ≤ 1 for physical states; round-off can leave a sliver above
    (-ln_c.to_f64()).max(0.0)
}

pub(crate) fn check_copies(copies: f64) -> Result<()> {
    if !(copies >= 1.0) || !copies.is_finite() {
        return Err(domain(format!(
            "copies must be a finite number >= 1, got {copies}"
        )));
    }
    Ok(())
}
