//! Homodyne detection with coherent integration over `M` modes.
//!
//! The summed quadrature is normal with mean 0 and variance `Mλ₀` without a
//! target, and mean `M√(2μ)` and variance `Mλ₁` with one. A threshold `x`
//! gives
//!
//! ```text
//! P_fa(x) = ½ erfc(x / √(2Mλ₀))
//! P_md(x) = ½ erfc((M√(2μ) − x) / √(2Mλ₁))
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::protocols::ResolvedScenario;
use crate::qht_asymmetric::{check_probability_grid, RocCurve, RocMeta, RocPoint};
use crate::qht_symmetric::check_copies;
use crate::special::{erfc, erfc_inv};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomodyneChannel {
    /// Received signal photons per mode.
    pub mu: f64,
    /// Quadrature variance without a target, `N_B + ½`.
    pub lambda0: f64,
    /// Quadrature variance with a target.
    pub lambda1: f64,
    pub copies: f64,
}

impl HomodyneChannel {
    pub fn new(mu: f64, lambda0: f64, lambda1: f64, copies: f64) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(domain(format!("mu must be finite and >= 0, got {mu}")));
        }
        if !(lambda0 > 0.0 && lambda1 >= lambda0 && lambda1.is_finite()) {
            return Err(domain(format!(
                "need 0 < lambda0 <= lambda1, got {lambda0} and {lambda1}"
            )));
        }
        check_copies(copies)?;
        Ok(HomodyneChannel {
            mu,
            lambda0,
            lambda1,
            copies,
        })
    }

    /// `λ₀ = N_B + ½`, `λ₁ = λ₀ + ηx` with `x` the source noise.
    pub fn from_scenario(r: &ResolvedScenario) -> Result<Self> {
        let lambda0 = r.n_b + 0.5;
        HomodyneChannel::new(
            r.mu(),
            lambda0,
            lambda0 + r.eta() * r.source_noise,
            r.copies(),
        )
    }

    /// Mean of the summed quadrature under a present target, `M√(2μ)`.
    pub fn signal_mean(&self) -> f64 {
        self.copies * (2.0 * self.mu).sqrt()
    }

    fn sd0(&self) -> f64 {
        (self.copies * self.lambda0).sqrt()
    }

    fn sd1(&self) -> f64 {
        (self.copies * self.lambda1).sqrt()
    }
}

/// False-alarm probability at threshold `x`.
pub fn pfa_hom(x: f64, ch: &HomodyneChannel) -> f64 {
    0.5 * erfc(x / (2.0 * ch.copies * ch.lambda0).sqrt())
}

/// Missed-detection probability at threshold `x`.
pub fn pmd_hom(x: f64, ch: &HomodyneChannel) -> f64 {
    0.5 * erfc((ch.signal_mean() - x) / (2.0 * ch.copies * ch.lambda1).sqrt())
}

/// Threshold achieving a false-alarm probability, `√(2Mλ₀) erfc⁻¹(2P_fa)`.
pub fn threshold_for_pfa(p_fa: f64, ch: &HomodyneChannel) -> Result<f64> {
    if !(p_fa > 0.0 && p_fa < 1.0) {
        return Err(domain(format!(
            "false-alarm probability must lie in (0, 1), got {p_fa}"
        )));
    }
    Ok((2.0 * ch.copies * ch.lambda0).sqrt() * erfc_inv(2.0 * p_fa)?)
}

/// `ln(½ erfc(z))`, switching to the asymptotic series where `erfc`
/// underflows.
fn ln_half_erfc(z: f64) -> f64 {
    let v = 0.5 * erfc(z);
    if v > 1e-300 {
        return v.ln();
    }
    // erfc z ≈ e^{−z²}/(z√π) · (1 − 1/(2z²) + 3/(4z⁴))
    let z2 = z * z;
    let series = 1.0 - 0.5 / z2 + 0.75 / (z2 * z2);
    -z2 - (z * std::f64::consts::PI.sqrt()).ln() + series.ln() - std::f64::consts::LN_2
}

/// Homodyne ROC on a false-alarm grid.
pub fn roc_homodyne(ch: &HomodyneChannel, grid: &[f64]) -> Result<RocCurve> {
    check_probability_grid(grid)?;
    let mut meta = RocMeta::default();
    let mut points = Vec::with_capacity(grid.len());
    for &p_fa in grid {
        let x = threshold_for_pfa(p_fa, ch)?;
        let z = (ch.signal_mean() - x) / (2.0 * ch.copies * ch.lambda1).sqrt();
        let p_md = pmd_hom(x, ch);
        meta.underflow |= p_md < f64::MIN_POSITIVE;
        points.push(RocPoint {
            p_fa,
            p_md,
            ln_p_md: ln_half_erfc(z),
        });
    }
    Ok(RocCurve {
        points,
        copies: ch.copies,
        meta,
    })
}

/// One threshold of an empirical ROC.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McPoint {
    pub threshold: f64,
    pub p_fa: f64,
    pub p_md: f64,
    /// Binomial standard errors `√(p(1−p)/n)`.
    pub sigma_fa: f64,
    pub sigma_md: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McRoc {
    pub points: Vec<McPoint>,
    pub trials: u64,
    pub seed: u64,
}

impl McRoc {
    /// The empirical points as a curve ordered by false-alarm probability.
    pub fn to_curve(&self, copies: f64) -> RocCurve {
        let mut points: Vec<RocPoint> = self
            .points
            .iter()
            .map(|p| RocPoint {
                p_fa: p.p_fa,
                p_md: p.p_md,
                ln_p_md: p.p_md.ln(),
            })
            .collect();
        points.sort_by(|a, b| a.p_fa.total_cmp(&b.p_fa).then(b.p_md.total_cmp(&a.p_md)));
        RocCurve {
            points,
            copies,
            meta: RocMeta::default(),
        }
    }
}

/// Samples per random stream.
const BLOCK: u64 = 1 << 16;

/// Exceedance counts of one block: `(H₀ above threshold, H₁ at or below)`.
fn sample_block(
    ch: &HomodyneChannel,
    thresholds: &[f64],
    seed: u64,
    block: u64,
    n: u64,
) -> Vec<(u64, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let h0 = Normal::new(0.0, ch.sd0()).expect("positive variance");
    let h1 = Normal::new(ch.signal_mean(), ch.sd1()).expect("positive variance");
    let mut counts = vec![(0u64, 0u64); thresholds.len()];
    for _ in 0..n {
        let a: f64 = rng.sample(h0);
        let b: f64 = rng.sample(h1);
        for (c, &x) in counts.iter_mut().zip(thresholds) {
            c.0 += u64::from(a > x);
            c.1 += u64::from(b <= x);
        }
    }
    counts
}

/// Empirical ROC from `trials` samples per hypothesis.
///
/// Samples come in blocks of 65 536, block `b` drawing from stream `b` of a
/// ChaCha8 generator seeded with `seed`, so the result depends only on
/// `(seed, trials)` and not on the thread count.
pub fn monte_carlo_roc(
    ch: &HomodyneChannel,
    thresholds: &[f64],
    trials: u64,
    seed: u64,
) -> Result<McRoc> {
    if thresholds.is_empty() {
        return Err(domain("no thresholds given"));
    }
    if let Some(bad) = thresholds.iter().find(|x| !x.is_finite()) {
        return Err(domain(format!("threshold {bad} is not finite")));
    }
    if trials == 0 {
        return Err(domain("trials must be >= 1"));
    }
    let blocks = trials.div_ceil(BLOCK);
    let block_len = |b: u64| BLOCK.min(trials - b * BLOCK);
    let run = |b: u64| sample_block(ch, thresholds, seed, b, block_len(b));

    #[cfg(feature = "parallel")]
    let per_block: Vec<Vec<(u64, u64)>> = {
        use rayon::prelude::*;
        (0..blocks).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_block: Vec<Vec<(u64, u64)>> = (0..blocks).map(run).collect();

    let mut totals = vec![(0u64, 0u64); thresholds.len()];
    for counts in per_block {
        for (t, c) in totals.iter_mut().zip(counts) {
            t.0 += c.0;
            t.1 += c.1;
        }
    }
    let n = trials as f64;
    let points = thresholds
        .iter()
        .zip(totals)
        .map(|(&threshold, (fa, md))| {
            let (p_fa, p_md) = (fa as f64 / n, md as f64 / n);
            McPoint {
                threshold,
                p_fa,
                p_md,
                sigma_fa: (p_fa * (1.0 - p_fa) / n).sqrt(),
                sigma_md: (p_md * (1.0 - p_md) / n).sqrt(),
            }
        })
        .collect();
    Ok(McRoc {
        points,
        trials,
        seed,
    })
}
