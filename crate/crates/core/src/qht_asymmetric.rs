//! Asymmetric hypothesis testing: relative entropy `D(ρ₀‖ρ₁)`, its variance
//! `V(ρ₀‖ρ₁)` and the second-order missed-detection probability.
//!
//! With Gibbs matrices `G = S⁻ᵀ diag(g(ν)) S⁻¹`, `g(ν) = ln((ν+½)/(ν−½))`,
//! `δ = x̄₀ − x̄₁` and `Γ = G₀ − G₁`,
//!
//! ```text
//! D = −Σ_k h(ν₀ₖ) + ½ [Σ_k ln(ν₁ₖ² − ¼) + Tr(V₀G₁) + δᵀG₁δ]
//! V = Tr[(ΓV₀)²]/2 + Tr[(ΓΩ)²]/8 + δᵀG₁V₀G₁δ
//! h(ν) = ½ [ln(ν² − ¼) + 2ν g(ν)]          (von Neumann entropy, h(½) = 0)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gaussian::{williamson_with, GaussianState, Tolerances, Williamson};
use crate::linalg::Mat;
use crate::qht_symmetric::check_copies;
use crate::scalar::Real;
use crate::special::norm_ppf;

/// Negative round-off this small is reported as exactly zero.
const NEGATIVE_SLACK: f64 = 1e-12;

/// Williamson form with the per-mode Gibbs exponents attached.
struct ModeData<T> {
    w: Williamson<T>,
    /// `g(ν_k)`, `None` for a pure mode.
    g: Vec<Option<T>>,
}

impl<T: Real> ModeData<T> {
    fn new(state: &GaussianState<T>) -> Result<Self> {
        let tol = Tolerances::default();
        let w = williamson_with(state.cov(), &tol)?;
        if w.below_vacuum {
            return Err(domain(format!(
                "state is unphysical (symplectic eigenvalue {:e})",
                w.min_nu().to_f64()
            )));
        }
        let g = w
            .nus
            .iter()
            .map(|&nu| {
                if nu.to_f64() - 0.5 <= tol.physicality {
                    None
                } else {
                    Some((nu - T::half()).recip().ln_1p())
                }
            })
            .collect();
        Ok(ModeData { w, g })
    }

    fn gibbs(&self) -> Result<Mat<T>> {
        let mut diag = Vec::with_capacity(2 * self.g.len());
        for (mode, g) in self.g.iter().enumerate() {
            match g {
                Some(g) => diag.extend([*g, *g]),
                None => {
                    return Err(Error::PureState {
                        mode,
                        nu: self.w.nus[mode].to_f64(),
                    })
                }
            }
        }
        let s_inv = self.w.s_inverse();
        Ok(&(&s_inv.transpose() * &Mat::diag(&diag)) * &s_inv)
    }

    /// `Σ_k h(ν_k)`.
    fn entropy(&self) -> T {
        let quarter = T::from_f64(0.25);
        let two = T::from_f64(2.0);
        let mut sum = T::zero();
        for (nu, g) in self.w.nus.iter().zip(&self.g) {
            if let Some(g) = g {
                sum += T::half() * ((*nu * *nu - quarter).ln() + two * *nu * *g);
            }
        }
        sum
    }

    /// `Σ_k ln(ν_k² − ¼)`; only called when every mode is mixed.
    fn ln_det_shifted(&self) -> T {
        let mut sum = T::zero();
        for nu in &self.w.nus {
            // (ν−½)(ν+½) keeps the small factor exact
            sum += ((*nu - T::half()) * (*nu + T::half())).ln();
        }
        sum
    }
}

/// Gibbs matrix `G` with `ρ ∝ exp(−x̂ᵀGx̂/2)`.
///
/// Fails with [`Error::PureState`] naming the first mode with
/// `ν ≤ ½ + 1e-10`.
pub fn gibbs_matrix<T: Real>(state: &GaussianState<T>) -> Result<Mat<T>> {
    ModeData::new(state)?.gibbs()
}

/// Relative entropy, its variance and the Gibbs matrices used.
#[derive(Clone, Debug)]
pub struct RelEntResult<T = f64> {
    pub d: f64,
    pub v: f64,
    pub gibbs0: Mat<T>,
    pub gibbs1: Mat<T>,
}

fn check_pair<T: Real>(rho0: &GaussianState<T>, rho1: &GaussianState<T>) -> Result<()> {
    if rho0.modes() != rho1.modes() {
        return Err(domain(format!(
            "mode counts differ: {} vs {}",
            rho0.modes(),
            rho1.modes()
        )));
    }
    Ok(())
}

fn delta<T: Real>(rho0: &GaussianState<T>, rho1: &GaussianState<T>) -> Vec<T> {
    rho0.mean()
        .iter()
        .zip(rho1.mean())
        .map(|(&a, &b)| a - b)
        .collect()
}

fn clamp_nonnegative(x: f64, what: &str) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else if x >= -NEGATIVE_SLACK {
        Ok(0.0)
    } else {
        Err(Error::Numeric(format!("{what} came out negative ({x:e})")))
    }
}

fn d_in<T: Real>(m0: &ModeData<T>, m1: &ModeData<T>, v0: &Mat<T>, g1: &Mat<T>, dl: &[T]) -> T {
    let tr = (v0 * g1).trace();
    -m0.entropy() + T::half() * (m1.ln_det_shifted() + tr + g1.quad_form(dl))
}

fn v_in<T: Real>(v0: &Mat<T>, g0: &Mat<T>, g1: &Mat<T>, dl: &[T]) -> T {
    let modes = v0.dim() / 2;
    let gamma = g0 - g1;
    let gv = &gamma * v0;
    let go = &gamma * &Mat::symplectic_form(modes);
    let first = (&gv * &gv).trace() * T::half();
    let second = (&go * &go).trace() / T::from_f64(8.0);
    let g1d = g1.mul_vec(dl);
    let third = v0.quad_form(&g1d);
    first + second + third
}

/// `D(ρ₀‖ρ₁)` in nats. `ρ₁` must be strictly mixed.
pub fn relative_entropy<T: Real>(rho0: &GaussianState<T>, rho1: &GaussianState<T>) -> Result<f64> {
    check_pair(rho0, rho1)?;
    let m0 = ModeData::new(rho0)?;
    let m1 = ModeData::new(rho1)?;
    let g1 = m1.gibbs()?;
    let d = d_in(&m0, &m1, rho0.cov(), &g1, &delta(rho0, rho1));
    clamp_nonnegative(d.to_f64(), "relative entropy")
}

/// `V(ρ₀‖ρ₁)` in nats². Both states must be strictly mixed.
pub fn relative_entropy_variance<T: Real>(
    rho0: &GaussianState<T>,
    rho1: &GaussianState<T>,
) -> Result<f64> {
    Ok(relative_entropy_stats(rho0, rho1)?.v)
}

/// `D` and `V` together, sharing the decompositions.
pub fn relative_entropy_stats<T: Real>(
    rho0: &GaussianState<T>,
    rho1: &GaussianState<T>,
) -> Result<RelEntResult<T>> {
    check_pair(rho0, rho1)?;
    let m0 = ModeData::new(rho0)?;
    let m1 = ModeData::new(rho1)?;
    let g1 = m1.gibbs()?;
    let g0 = m0.gibbs()?;
    let dl = delta(rho0, rho1);
    let d = d_in(&m0, &m1, rho0.cov(), &g1, &dl);
    let v = v_in(rho0.cov(), &g0, &g1, &dl);
    Ok(RelEntResult {
        d: clamp_nonnegative(d.to_f64(), "relative entropy")?,
        v: clamp_nonnegative(v.to_f64(), "relative entropy variance")?,
        gibbs0: g0,
        gibbs1: g1,
    })
}

/// Second-order missed-detection probability at false-alarm level `ε`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MissedDetection {
    pub p_md: f64,
    /// `ln p_md`, finite where `p_md` underflows.
    pub ln_p_md: f64,
    /// The raw expression exceeded 1 and was clamped.
    pub clamped: bool,
}

/// `P_md ≈ exp(−[M·D + √(M·V)·Φ⁻¹(ε)])`, clamped to `[0, 1]`; higher-order
/// terms in `M` are dropped.
pub fn pmd_second_order(d: f64, v: f64, copies: f64, epsilon: f64) -> Result<MissedDetection> {
    if !(d >= 0.0) || !(v >= 0.0) {
        return Err(domain(format!(
            "need d >= 0 and v >= 0, got d = {d}, v = {v}"
        )));
    }
    check_copies(copies)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let z = norm_ppf(epsilon)?;
    let raw = -(copies * d + (copies * v).sqrt() * z);
    let clamped = raw > 0.0;
    let ln_p_md = raw.min(0.0);
    Ok(MissedDetection {
        p_md: ln_p_md.exp(),
        ln_p_md,
        clamped,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub p_fa: f64,
    pub p_md: f64,
    pub ln_p_md: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RocMeta {
    pub scenario: String,
    pub method: String,
    /// Some point had its missed-detection probability clamped to 1.
    pub clamped: bool,
    /// Some point underflows `f64` (its `ln_p_md` is still exact).
    pub underflow: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub copies: f64,
    pub meta: RocMeta,
}

impl RocCurve {
    /// `p_fa` strictly increasing and `p_md` non-increasing.
    pub fn is_monotone(&self) -> bool {
        self.points
            .windows(2)
            .all(|w| w[1].p_fa > w[0].p_fa && w[1].p_md <= w[0].p_md)
    }
}

/// `n` points spaced evenly in `log10` between `min` and `max` inclusive.
pub fn log_grid(min: f64, max: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(domain("grid must have at least one point"));
    }
    if !(min > 0.0 && max >= min && max.is_finite()) {
        return Err(domain(format!("need 0 < min <= max, got [{min}, {max}]")));
    }
    if n == 1 {
        return Ok(vec![min]);
    }
    let (a, b) = (min.log10(), max.log10());
    let step = (b - a) / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|i| 10f64.powf(a + step * i as f64)).collect();
    grid[0] = min;
    grid[n - 1] = max;
    Ok(grid)
}

/// Checks that a false-alarm grid is non-empty, inside `(0, 1)` and
/// strictly increasing.
pub fn check_probability_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(domain("probability grid is empty"));
    }
    if let Some(bad) = grid.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
        return Err(domain(format!("grid value {bad} is outside (0, 1)")));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("grid is not strictly increasing"));
    }
    Ok(())
}

/// Second-order ROC from precomputed `D` and `V`.
pub fn roc_from_dv(d: f64, v: f64, copies: f64, grid: &[f64], meta: RocMeta) -> Result<RocCurve> {
    check_probability_grid(grid)?;
    let mut meta = meta;
    let mut points = Vec::with_capacity(grid.len());
    for &eps in grid {
        let pm = pmd_second_order(d, v, copies, eps)?;
        meta.clamped |= pm.clamped;
        meta.underflow |= pm.p_md == 0.0 || pm.p_md < f64::MIN_POSITIVE;
        points.push(RocPoint {
            p_fa: eps,
            p_md: pm.p_md,
            ln_p_md: pm.ln_p_md,
        });
    }
    Ok(RocCurve {
        points,
        copies,
        meta,
    })
}

/// Second-order ROC of a state pair.
pub fn roc_asymmetric<T: Real>(
    rho0: &GaussianState<T>,
    rho1: &GaussianState<T>,
    copies: f64,
    grid: &[f64],
) -> Result<RocCurve> {
    let st = relative_entropy_stats(rho0, rho1)?;
    roc_from_dv(st.d, st.v, copies, grid, RocMeta::default())
}
