//! Gaussian states in the quadrature picture.
//!
//! Quadratures are ordered `(q₁, p₁, …, q_N, p_N)` and the vacuum has
//! covariance `½·𝟙`. A coherent state with `n` mean photons has mean
//! `(√(2n), 0)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{dot, norm, Mat};
use crate::scalar::Real;

/// Tolerances used by the state checks and the Williamson decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Maximum allowed `|V_ij − V_ji|`, scaled by `max(1, max|V_ij|)`.
    pub symmetry: f64,
    /// Symplectic eigenvalues may dip this far below ½.
    pub physicality: f64,
    /// Relative Frobenius residual of `S V⊕ Sᵀ` against the input.
    pub reconstruction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            symmetry: 1e-12,
            physicality: 1e-10,
            reconstruction: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState<T = f64> {
    modes: usize,
    mean: Vec<T>,
    cov: Mat<T>,
}

impl<T: Real> GaussianState<T> {
    /// Checks shape and symmetry. Physicality is *not* enforced here; see
    /// [`is_physical`].
    pub fn new(mean: Vec<T>, cov: Mat<T>) -> Result<Self> {
        Self::with_tolerances(mean, cov, &Tolerances::default())
    }

    pub fn with_tolerances(mean: Vec<T>, cov: Mat<T>, tol: &Tolerances) -> Result<Self> {
        let dim = cov.dim();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(domain(format!(
                "covariance dimension {dim} is not 2N with N >= 1"
            )));
        }
        if mean.len() != dim {
            return Err(domain(format!(
                "mean has length {} but covariance is {dim}x{dim}",
                mean.len()
            )));
        }
        check_symmetric(&cov, tol)?;
        Ok(GaussianState {
            modes: dim / 2,
            mean,
            cov,
        })
    }

    /// Vacuum on `modes` modes.
    pub fn vacuum(modes: usize) -> Self {
        GaussianState {
            modes,
            mean: vec![T::zero(); 2 * modes],
            cov: Mat::identity(2 * modes).scale(T::half()),
        }
    }

    /// Single-mode state with mean `(√(2·signal), 0)` and covariance
    /// `(noise + ½)·𝟙₂`.
    pub fn displaced_thermal(signal: T, noise: T) -> Result<Self> {
        if !(signal.to_f64() >= 0.0) {
            return Err(domain(format!("signal photons must be >= 0, got {signal}")));
        }
        if !(noise.to_f64() >= 0.0) {
            return Err(domain(format!("noise photons must be >= 0, got {noise}")));
        }
        let v = noise + T::half();
        Ok(GaussianState {
            modes: 1,
            mean: vec![(T::from_f64(2.0) * signal).sqrt(), T::zero()],
            cov: Mat::diag(&[v, v]),
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn mean(&self) -> &[T] {
        &self.mean
    }

    pub fn cov(&self) -> &Mat<T> {
        &self.cov
    }

    /// Mean photon number `(Tr V − N)/2 + |x̄|²/2`.
    pub fn mean_photons(&self) -> T {
        let n = T::from_f64(self.modes as f64);
        (self.cov.trace() - n) * T::half() + dot(&self.mean, &self.mean) * T::half()
    }

    pub fn cast<U: Real>(&self) -> GaussianState<U> {
        GaussianState {
            modes: self.modes,
            mean: self.mean.iter().map(|x| U::from_f64(x.to_f64())).collect(),
            cov: self.cov.cast(),
        }
    }

    fn require_single_mode(&self, what: &str) -> Result<()> {
        if self.modes != 1 {
            return Err(domain(format!(
                "{what} acts on one mode, state has {}",
                self.modes
            )));
        }
        Ok(())
    }
}

fn check_symmetric<T: Real>(cov: &Mat<T>, tol: &Tolerances) -> Result<()> {
    let asym = cov.max_asymmetry();
    let scale = cov.max_abs().max(1.0);
    if !(asym <= tol.symmetry * scale) {
        return Err(Error::Decomposition(format!(
            "covariance is not symmetric (max asymmetry {asym:e})"
        )));
    }
    Ok(())
}

/// Coherent state with `n_s` mean photons.
pub fn make_coherent<T: Real>(n_s: T) -> Result<GaussianState<T>> {
    if !(n_s.to_f64() >= 0.0) {
        return Err(domain(format!("photon number must be >= 0, got {n_s}")));
    }
    GaussianState::displaced_thermal(n_s, T::zero())
}

/// Thermal state with `n_bar` mean photons.
pub fn make_thermal<T: Real>(n_bar: T) -> Result<GaussianState<T>> {
    if !(n_bar.to_f64() >= 0.0) {
        return Err(domain(format!("photon number must be >= 0, got {n_bar}")));
    }
    GaussianState::displaced_thermal(T::zero(), n_bar)
}

/// Phase-preserving quantum-limited amplifier `x → √g x + √(g−1) x_A` with a
/// vacuum idler.
///
/// With `rescale_input` the input is first divided by `√g`, so the mean is
/// unchanged and only `(g − 1)/2` of noise is added.
pub fn apply_amplifier<T: Real>(
    state: &GaussianState<T>,
    gain: T,
    rescale_input: bool,
) -> Result<GaussianState<T>> {
    state.require_single_mode("amplifier")?;
    if !(gain.to_f64() >= 1.0) {
        return Err(domain(format!("amplifier gain must be >= 1, got {gain}")));
    }
    let added = (gain - T::one()) * T::half();
    let (mean, cov) = if rescale_input {
        (state.mean.clone(), state.cov.clone())
    } else {
        let root = gain.sqrt();
        (
            state.mean.iter().map(|&m| m * root).collect(),
            state.cov.scale(gain),
        )
    };
    let cov = &cov + &Mat::identity(2).scale(added);
    Ok(GaussianState {
        modes: 1,
        mean,
        cov,
    })
}

/// Amplifier noise photons for a given gain and background, `N_B + g_A/2`.
pub fn amplifier_noise_from_gain(gain: f64, n_b: f64) -> Result<f64> {
    if !(gain >= 1.0) {
        return Err(domain(format!("amplifier gain must be >= 1, got {gain}")));
    }
    if !(n_b >= 0.0) {
        return Err(domain(format!(
            "background photons must be >= 0, got {n_b}"
        )));
    }
    Ok(n_b + 0.5 * gain)
}

/// The amplified source: a coherent state of `n_s` photons after a rescaled
/// amplifier that adds `n_a` photons of noise, i.e. mean `(√(2 n_s), 0)` and
/// covariance `(n_a + ½)·𝟙₂`.
pub fn amplified_source<T: Real>(n_s: T, n_a: T) -> Result<GaussianState<T>> {
    if !(n_a.to_f64() >= 0.0) {
        return Err(domain(format!("amplifier noise must be >= 0, got {n_a}")));
    }
    let gain = T::one() + T::from_f64(2.0) * n_a;
    apply_amplifier(&make_coherent(n_s)?, gain, true)
}

/// Beamsplitter of transmissivity `tau` mixing `state` with `environment`;
/// returns the transmitted output mode.
pub fn apply_beamsplitter<T: Real>(
    state: &GaussianState<T>,
    tau: T,
    environment: &GaussianState<T>,
) -> Result<GaussianState<T>> {
    state.require_single_mode("beamsplitter")?;
    environment.require_single_mode("beamsplitter environment")?;
    let t = tau.to_f64();
    if !(0.0..=1.0).contains(&t) {
        return Err(domain(format!(
            "transmissivity must lie in [0, 1], got {tau}"
        )));
    }
    let r = T::one() - tau;
    let (st, sr) = (tau.sqrt(), r.sqrt());
    let mean = state
        .mean
        .iter()
        .zip(&environment.mean)
        .map(|(&a, &b)| st * a + sr * b)
        .collect();
    let cov = &state.cov.scale(tau) + &environment.cov.scale(r);
    Ok(GaussianState {
        modes: 1,
        mean,
        cov,
    })
}

/// Symplectic diagonalisation `V = S·V⊕·Sᵀ`, `V⊕ = ⊕ ν_k 𝟙₂`.
#[derive(Clone, Debug)]
pub struct Williamson<T = f64> {
    /// Symplectic matrix, `S Ω Sᵀ = Ω`.
    pub s: Mat<T>,
    /// Symplectic eigenvalues, sorted descending.
    pub nus: Vec<T>,
    /// Set when some `ν_k < ½ − tol.physicality`.
    pub below_vacuum: bool,
}

impl<T: Real> Williamson<T> {
    pub fn diagonal(&self) -> Mat<T> {
        let d: Vec<T> = self.nus.iter().flat_map(|&nu| [nu, nu]).collect();
        Mat::diag(&d)
    }

    pub fn reconstruct(&self) -> Mat<T> {
        &(&self.s * &self.diagonal()) * &self.s.transpose()
    }

    /// `S⁻¹ = −Ω Sᵀ Ω`.
    pub fn s_inverse(&self) -> Mat<T> {
        let om = Mat::symplectic_form(self.nus.len());
        (&(&om * &self.s.transpose()) * &om).scale(-T::one())
    }

    pub fn min_nu(&self) -> T {
        *self.nus.last().expect("at least one mode")
    }
}

/// Williamson decomposition with default tolerances.
pub fn williamson<T: Real>(cov: &Mat<T>) -> Result<Williamson<T>> {
    williamson_with(cov, &Tolerances::default())
}

/// Williamson decomposition.
///
/// `K = V^{-1/2} Ω V^{-1/2}` is antisymmetric with spectrum `±i/ν_k`; an
/// orthogonal `O` bringing it to `⊕ (1/ν_k)[[0,1],[−1,0]]` gives
/// `S = V^{1/2} O V⊕^{-1/2}`. Columns are paired from the eigenvectors of
/// `KᵀK`, so degenerate spectra are handled by Gram–Schmidt within the
/// eigenspace.
pub fn williamson_with<T: Real>(cov: &Mat<T>, tol: &Tolerances) -> Result<Williamson<T>> {
    let dim = cov.dim();
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(Error::Decomposition(format!("dimension {dim} is not even")));
    }
    check_symmetric(cov, tol)?;
    let modes = dim / 2;

    let (w, q) = cov.sym_eigen()?;
    if let Some(bad) = w.iter().find(|x| !(x.to_f64() > 0.0)) {
        return Err(Error::Decomposition(format!(
            "covariance is not positive definite (eigenvalue {:e})",
            bad.to_f64()
        )));
    }
    let sqrt_w: Vec<T> = w.iter().map(|x| x.sqrt()).collect();
    let inv_sqrt_w: Vec<T> = sqrt_w.iter().map(|x| x.recip()).collect();
    let qt = q.transpose();
    let v_half = &(&q * &Mat::diag(&sqrt_w)) * &qt;
    let v_mhalf = &(&q * &Mat::diag(&inv_sqrt_w)) * &qt;

    let om = Mat::symplectic_form(modes);
    let k = &(&v_mhalf * &om) * &v_mhalf;
    let ktk = &k.transpose() * &k;
    let (lam, p) = ktk.sym_eigen()?;

    // smallest KᵀK eigenvalue <-> largest ν
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| lam[a].partial_cmp(&lam[b]).expect("finite eigenvalues"));

    let mut basis: Vec<Vec<T>> = Vec::with_capacity(dim);
    let mut pairs: Vec<(T, Vec<T>, Vec<T>)> = Vec::with_capacity(modes);
    for &idx in &order {
        if pairs.len() == modes {
            break;
        }
        let mut u = p.column(idx);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&u, b);
                for (ui, &bi) in u.iter_mut().zip(b) {
                    *ui -= c * bi;
                }
            }
        }
        let nu_norm = norm(&u);
        if nu_norm.to_f64() < 0.5 {
            continue;
        }
        for ui in u.iter_mut() {
            *ui /= nu_norm;
        }
        let ku = k.mul_vec(&u);
        let c = norm(&ku);
        if !(c.to_f64() > 0.0) {
            return Err(Error::Decomposition(
                "degenerate symplectic spectrum".into(),
            ));
        }
        let mut e2: Vec<T> = ku.iter().map(|&x| -x / c).collect();
        // keep the partner orthogonal to what is already chosen
        for b in &basis {
            let d = dot(&e2, b);
            for (ei, &bi) in e2.iter_mut().zip(b) {
                *ei -= d * bi;
            }
        }
        let d = dot(&e2, &u);
        for (ei, &ui) in e2.iter_mut().zip(&u) {
            *ei -= d * ui;
        }
        let en = norm(&e2);
        for ei in e2.iter_mut() {
            *ei /= en;
        }
        basis.push(u.clone());
        basis.push(e2.clone());
        pairs.push((c.recip(), u, e2));
    }
    if pairs.len() != modes {
        return Err(Error::Decomposition(
            "could not pair the symplectic eigenvectors".into(),
        ));
    }
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite eigenvalues"));

    let mut o = Mat::zeros(dim);
    let mut nus = Vec::with_capacity(modes);
    for (kk, (nu, u, e2)) in pairs.iter().enumerate() {
        o.set_column(2 * kk, u);
        o.set_column(2 * kk + 1, e2);
        nus.push(*nu);
    }
    let d_mhalf: Vec<T> = nus
        .iter()
        .flat_map(|nu| {
            let r = nu.sqrt().recip();
            [r, r]
        })
        .collect();
    let mut s = &(&v_half * &o) * &Mat::diag(&d_mhalf);

    // deterministic orientation: first significant entry of each q-column positive
    let scale = s.max_abs();
    for kk in 0..modes {
        let col = s.column(2 * kk);
        let first = col
            .iter()
            .find(|x| x.to_f64().abs() > 1e-12 * scale)
            .copied();
        if first.is_some_and(|x| x.to_f64() < 0.0) {
            for j in [2 * kk, 2 * kk + 1] {
                let flipped: Vec<T> = s.column(j).iter().map(|&x| -x).collect();
                s.set_column(j, &flipped);
            }
        }
    }

    let below_vacuum = nus.iter().any(|nu| nu.to_f64() < 0.5 - tol.physicality);
    Ok(Williamson {
        s,
        nus,
        below_vacuum,
    })
}

/// Outcome of [`is_physical`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Physicality {
    pub physical: bool,
    /// Smallest symplectic eigenvalue; NaN when the covariance is not
    /// positive definite.
    pub min_nu: f64,
}

pub fn is_physical<T: Real>(state: &GaussianState<T>) -> Physicality {
    let tol = Tolerances::default();
    match williamson_with(state.cov(), &tol) {
        Ok(w) => {
            let min_nu = w.min_nu().to_f64();
            Physicality {
                physical: min_nu >= 0.5 - tol.physicality,
                min_nu,
            }
        }
        Err(_) => Physicality {
            physical: false,
            min_nu: f64::NAN,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn coherent_state_examples() {
        let vac = make_coherent(0.0).unwrap();
        assert_eq!(vac.mean(), &[0.0, 0.0]);
        assert_eq!(vac.cov(), &Mat::identity(2).scale(0.5));

        let c = make_coherent(1e-2).unwrap();
        assert_close(c.mean()[0], 0.02f64.sqrt(), 1e-16);
        assert_close(c.mean()[0], 0.141421, 1e-6);

        let c2 = make_coherent(2.0).unwrap();
        assert_eq!(c2.mean(), &[2.0, 0.0]);
        assert!(make_coherent(-1.0).is_err());
    }

    #[test]
    fn thermal_state_examples() {
        assert_eq!(make_thermal(0.0).unwrap(), GaussianState::vacuum(1));
        let t = make_thermal(6250.0).unwrap();
        assert_eq!(t.cov(), &Mat::identity(2).scale(6250.5));
        assert_eq!(make_thermal(0.5).unwrap().cov(), &Mat::identity(2));
        assert!(matches!(make_thermal(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn amplifier_examples() {
        let c = make_coherent(0.3).unwrap();
        assert_eq!(apply_amplifier(&c, 1.0, true).unwrap(), c);
        assert_eq!(apply_amplifier(&c, 1.0, false).unwrap(), c);

        // x -> √2 x + x_A on vacuum: 2·½ + ½
        let out = apply_amplifier(&GaussianState::vacuum(1), 2.0, false).unwrap();
        assert_eq!(out.cov(), &Mat::identity(2).scale(1.5));

        let src = amplified_source(1e-2, 6250.0).unwrap();
        assert_close(src.mean()[0], 0.141421, 1e-6);
        assert_eq!(src.cov(), &Mat::identity(2).scale(6250.5));

        assert!(apply_amplifier(&c, 0.9, true).is_err());
        assert_eq!(amplifier_noise_from_gain(1.0, 6250.0).unwrap(), 6250.5);
    }

    #[test]
    fn beamsplitter_examples() {
        let s = make_coherent(0.7).unwrap();
        let env = make_thermal(3.0).unwrap();
        assert_eq!(apply_beamsplitter(&s, 1.0, &env).unwrap(), s);
        assert_eq!(apply_beamsplitter(&s, 0.0, &env).unwrap(), env);
        assert!(apply_beamsplitter(&s, 1.5, &env).is_err());

        let (eta, n_a, n_b) = (1e-2, 6250.0, 6250.0);
        let src = amplified_source(1e-2, n_a).unwrap();
        let bg = make_thermal(n_b / (1.0 - eta)).unwrap();
        let out = apply_beamsplitter(&src, eta, &bg).unwrap();
        assert_close(out.cov()[(0, 0)], 0.5 + eta * n_a + n_b, 1e-9);
        assert_close(out.cov()[(0, 0)], 6313.0, 1e-9);
        assert_close(out.mean()[0], (2.0 * eta * 1e-2f64).sqrt(), 1e-15);
    }

    #[test]
    fn williamson_isotropic_mode() {
        let cov = Mat::identity(2).scale(7.5);
        let w = williamson(&cov).unwrap();
        assert_close(w.nus[0], 7.5, 1e-14);
        assert!((&w.s - &Mat::identity(2)).max_abs() < 1e-14);
    }

    #[test]
    fn williamson_pure_squeezed_mode() {
        let r: f64 = 0.8;
        let cov = Mat::diag(&[0.5 * r.exp(), 0.5 * (-r).exp()]);
        let w = williamson(&cov).unwrap();
        assert_close(w.nus[0], 0.5, 1e-14);
        let want = Mat::diag(&[(r / 2.0).exp(), (-r / 2.0).exp()]);
        assert!((&w.s - &want).max_abs() < 1e-13);
        assert!((&w.reconstruct() - &cov).frobenius() / cov.frobenius() < 1e-14);
    }

    #[test]
    fn williamson_rejects_bad_input() {
        let asym: Mat<f64> = Mat::from_rows(&[&[1.0, 0.2], &[0.1, 1.0]]);
        assert!(matches!(williamson(&asym), Err(Error::Decomposition(_))));
        let indefinite: Mat<f64> = Mat::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(matches!(
            williamson(&indefinite),
            Err(Error::Decomposition(_))
        ));
        let sub = williamson(&Mat::<f64>::identity(2).scale(0.25)).unwrap();
        assert!(sub.below_vacuum);
    }

    #[test]
    fn physicality_examples() {
        let p = is_physical(&GaussianState::<f64>::vacuum(1));
        assert!(p.physical);
        assert_close(p.min_nu, 0.5, 1e-15);

        let sub = GaussianState::new(vec![0.0, 0.0], Mat::identity(2).scale(0.25)).unwrap();
        assert!(!is_physical(&sub).physical);

        let th = is_physical(&make_thermal(6250.0).unwrap());
        assert!(th.physical);
        assert_close(th.min_nu, 6250.5, 1e-9);
    }

    #[test]
    fn state_constructor_validates_shape() {
        assert!(GaussianState::new(vec![0.0], Mat::<f64>::identity(2)).is_err());
        assert!(GaussianState::new(vec![0.0; 3], Mat::<f64>::identity(3)).is_err());
        let asym: Mat<f64> = Mat::from_rows(&[&[1.0, 0.2], &[0.1, 1.0]]);
        assert!(GaussianState::new(vec![0.0, 0.0], asym).is_err());
    }

    #[test]
    fn mean_photons_of_displaced_thermal() {
        let st = GaussianState::displaced_thermal(3.0, 2.0).unwrap();
        assert_close(st.mean_photons(), 5.0, 1e-14);
    }
}
