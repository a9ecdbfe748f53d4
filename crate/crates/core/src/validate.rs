//! Oracle-equivalence and limit-recovery suites.
//!
//! Each suite compares closed forms against the general Gaussian machinery
//! (run in double-double) and reports the worst relative deviation. A
//! `closed_form_scale` other than 1 multiplies every closed-form quantity
//! before comparison, which lets tests check that a corrupted closed form is
//! caught.

use serde::{Deserialize, Serialize};

use crate::closed_forms::{self, AmpParams, MaserParams};
use crate::dd::Dd;
use crate::error::{domain, Result};
use crate::gaussian::{make_thermal, GaussianState};
use crate::protocols::{figure_grid, FIGURE_IDS};
use crate::qht_asymmetric::relative_entropy_stats;
use crate::qht_symmetric::{qbb, qcb};
use crate::scalar::rel_diff;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidateOptions {
    /// Multiplier applied to closed-form values (1 for a faithful run).
    pub closed_form_scale: f64,
    /// Use at most this many oracle cases (`None` for the full grid).
    pub max_cases: Option<usize>,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            closed_form_scale: 1.0,
            max_cases: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub max_rel_dev: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Parameters of the worst case.
    pub worst_case: String,
}

#[derive(Default)]
struct Tracker {
    cases: usize,
    worst: f64,
    worst_case: String,
}

impl Tracker {
    fn record(&mut self, dev: f64, case: impl FnOnce() -> String) {
        self.cases += 1;
        // NaN counts as the worst possible outcome
        if dev.is_nan() || dev > self.worst {
            self.worst = if dev.is_nan() { f64::INFINITY } else { dev };
            self.worst_case = case();
        }
    }

    fn finish(self, name: &str, tolerance: f64) -> SuiteReport {
        SuiteReport {
            name: name.to_string(),
            cases: self.cases,
            max_rel_dev: self.worst,
            tolerance,
            passed: self.cases > 0 && self.worst <= tolerance,
            worst_case: self.worst_case,
        }
    }
}

/// Source noise of an oracle case: amplifier `N_A` or fridge `n̄_T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NoiseSource {
    Amplifier(f64),
    Fridge(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCase {
    pub n_s: f64,
    pub eta: f64,
    pub n_b: f64,
    pub noise: NoiseSource,
}

impl OracleCase {
    fn added_noise(&self) -> f64 {
        match self.noise {
            NoiseSource::Amplifier(x) | NoiseSource::Fridge(x) => x,
        }
    }

    fn describe(&self) -> String {
        let noise = match self.noise {
            NoiseSource::Amplifier(x) => format!("n_a={x:e}"),
            NoiseSource::Fridge(x) => format!("n_t={x:e}"),
        };
        format!(
            "n_s={:e} eta={:e} n_b={:e} {noise}",
            self.n_s, self.eta, self.n_b
        )
    }

    /// Target-absent and target-present states in double-double.
    pub fn pair(&self) -> Result<(GaussianState<Dd>, GaussianState<Dd>)> {
        let eta = Dd::new(self.eta);
        let n_b = Dd::new(self.n_b);
        let rho0 = make_thermal(n_b)?;
        let rho1 = GaussianState::displaced_thermal(
            eta * Dd::new(self.n_s),
            n_b + eta * Dd::new(self.added_noise()),
        )?;
        Ok((rho0, rho1))
    }

    pub fn closed_qcb_exponent(&self) -> Result<f64> {
        Ok(match self.noise {
            NoiseSource::Amplifier(n_a) => closed_forms::qcb_amp(&self.amp(n_a))?.exponent,
            NoiseSource::Fridge(n_t) => closed_forms::qcb_maser(&self.maser(n_t))?.exponent,
        })
    }

    /// Closed-form per-copy overlap exponent, prefactor included.
    pub fn closed_overlap_exponent(&self) -> Result<f64> {
        closed_forms::per_copy_overlap_exponent(self.n_s, self.n_b, self.eta, self.added_noise())
    }

    pub fn closed_qre(&self) -> Result<closed_forms::DvPair> {
        match self.noise {
            NoiseSource::Amplifier(n_a) => closed_forms::qre_amp(&self.amp(n_a)),
            NoiseSource::Fridge(n_t) => closed_forms::qre_maser(&self.maser(n_t)),
        }
    }

    fn amp(&self, n_a: f64) -> AmpParams {
        AmpParams {
            n_s: self.n_s,
            n_a,
            n_b: self.n_b,
            eta: self.eta,
            copies: 1.0,
        }
    }

    fn maser(&self, n_t: f64) -> MaserParams {
        MaserParams {
            n_s: self.n_s,
            phi: 1.0,
            n_t,
            n_b: self.n_b,
            eta: self.eta,
            copies: 1.0,
        }
    }
}

pub const GRID_ETA: [f64; 5] = [1e-8, 1e-6, 1e-4, 1e-2, 1e-1];
pub const GRID_N_S: [f64; 4] = [1e-3, 1e-2, 1e-1, 1.0];
pub const GRID_N_A: [f64; 3] = [0.0, 6250.0, 5e8];
pub const GRID_N_T: [f64; 3] = [0.0, 207.9, 6250.0];
pub const GRID_N_B: [f64; 3] = [1.0, 100.0, 6250.0];

/// Product grid over reflectivity, signal, background and both noise
/// sources (360 cases).
pub fn oracle_grid() -> Vec<OracleCase> {
    let mut out = Vec::new();
    for &eta in &GRID_ETA {
        for &n_s in &GRID_N_S {
            for &n_b in &GRID_N_B {
                for &n_a in &GRID_N_A {
                    out.push(OracleCase {
                        n_s,
                        eta,
                        n_b,
                        noise: NoiseSource::Amplifier(n_a),
                    });
                }
                for &n_t in &GRID_N_T {
                    out.push(OracleCase {
                        n_s,
                        eta,
                        n_b,
                        noise: NoiseSource::Fridge(n_t),
                    });
                }
            }
        }
    }
    out
}

fn select(cases: &[OracleCase], opts: &ValidateOptions) -> Result<Vec<OracleCase>> {
    let n = opts.max_cases.unwrap_or(cases.len()).min(cases.len());
    if n == 0 {
        return Err(domain("validation grid is empty"));
    }
    // spread the subset over the whole grid
    Ok((0..n).map(|i| cases[i * cases.len() / n]).collect())
}

/// Closed-form Chernoff exponent against the minimised s-overlap.
pub fn qcb_equivalence(cases: &[OracleCase], opts: &ValidateOptions) -> Result<SuiteReport> {
    let mut t = Tracker::default();
    for c in select(cases, opts)? {
        let (r0, r1) = c.pair()?;
        let oracle = qcb(&r0, &r1, 1.0)?.exponent;
        let closed = c.closed_qcb_exponent()? * opts.closed_form_scale;
        t.record(rel_diff(closed, oracle), || c.describe());
    }
    Ok(t.finish("qcb_closed_vs_chernoff_oracle", 1e-6))
}

/// Closed-form per-copy overlap (prefactor included) against the s = ½
/// overlap.
pub fn qbb_equivalence(cases: &[OracleCase], opts: &ValidateOptions) -> Result<SuiteReport> {
    let mut t = Tracker::default();
    for c in select(cases, opts)? {
        let (r0, r1) = c.pair()?;
        let oracle = qbb(&r0, &r1, 1.0)?.exponent;
        let closed = c.closed_overlap_exponent()? * opts.closed_form_scale;
        t.record(rel_diff(closed, oracle), || c.describe());
    }
    Ok(t.finish("overlap_closed_vs_bhattacharyya_oracle", 1e-6))
}

/// Closed-form `D` and `V` against the general formulas.
pub fn qre_equivalence(cases: &[OracleCase], opts: &ValidateOptions) -> Result<SuiteReport> {
    let mut t = Tracker::default();
    for c in select(cases, opts)? {
        let (r0, r1) = c.pair()?;
        let oracle = relative_entropy_stats(&r0, &r1)?;
        let closed = c.closed_qre()?;
        let s = opts.closed_form_scale;
        let dev = rel_diff(closed.d * s, oracle.d).max(rel_diff(closed.v * s, oracle.v));
        t.record(dev, || c.describe());
    }
    Ok(t.finish("qre_closed_vs_oracle", 1e-8))
}

/// Noise-free amplified forms against the optical forms on 100 points.
pub fn limit_recovery(opts: &ValidateOptions) -> Result<SuiteReport> {
    let mut t = Tracker::default();
    for i in 0..100 {
        let n_b = 10f64.powf(-2.0 + 0.1 * i as f64);
        let (n_s, eta) = (1e-2, 1e-2);
        let amp = closed_forms::qcb_amp(&AmpParams {
            n_s,
            n_a: 0.0,
            n_b,
            eta,
            copies: 1.0,
        })?;
        let opt = closed_forms::qcb_optical(n_s, n_b, eta, 1.0)?;
        let dev = rel_diff(amp.exponent * opts.closed_form_scale, opt.exponent);
        t.record(dev, || format!("n_b={n_b:e}"));
    }
    Ok(t.finish("amp_noise_free_vs_optical", 1e-12))
}

/// Formula and channel constructions of every figure pair.
pub fn path_independence() -> Result<SuiteReport> {
    let mut t = Tracker::default();
    for id in FIGURE_IDS {
        for s in figure_grid(id)?.scenarios {
            let r = s.resolve()?;
            let a = r.hypothesis_pair::<f64>()?;
            let b = r.hypothesis_pair_via_channels::<f64>()?;
            let scale = a.rho1.cov().max_abs();
            let cov = (a.rho1.cov() - b.rho1.cov()).max_abs() / scale;
            let mean = rel_diff(a.rho1.mean()[0], b.rho1.mean()[0]);
            t.record(cov.max(mean), || format!("{id}/{}", s.id));
        }
    }
    Ok(t.finish("hypothesis_pair_path_independence", 1e-12))
}

/// Every suite, in a fixed order.
pub fn run_all(opts: &ValidateOptions) -> Result<Vec<SuiteReport>> {
    let cases = oracle_grid();
    Ok(vec![
        qcb_equivalence(&cases, opts)?,
        qbb_equivalence(&cases, opts)?,
        qre_equivalence(&cases, opts)?,
        limit_recovery(opts)?,
        path_independence()?,
    ])
}
