//! Source protocols, scenarios and the hypothesis pairs they induce.
//!
//! Three coherent-state sources are modelled:
//!
//! * `Amplified`: a coherent state of `N_S` photons made in the fridge and
//!   amplified, adding `N_A` photons of noise.
//! * `Maser`: a bright room-temperature coherent state attenuated inside a
//!   fridge at `T`, which leaves `φN_S` signal photons over `n̄_T` thermal
//!   photons.
//! * `Optical`: an ideal coherent state with no added noise.
//!
//! The return from a target of reflectivity `η` embedded in a background of
//! `N_B` photons is thermal (target absent) or a displaced thermal state with
//! mean `(√(2ηN_S'), 0)` and covariance `(½ + N_B + ηx)𝟙₂` (target present),
//! where `N_S'` is the transmitted signal and `x` the source noise.

use serde::{Deserialize, Serialize};

use crate::closed_forms::{self, AmpParams, DvPair, MaserParams};
use crate::error::{Error, Result};
use crate::gaussian::{
    amplified_source, apply_beamsplitter, make_coherent, make_thermal, GaussianState,
};
use crate::qht_symmetric::BoundResult;
use crate::scalar::Real;

/// Planck constant, J·s (exact SI value).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K (exact SI value).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Version tag of the scenario JSON document.
pub const SCHEMA_VERSION: u64 = 1;

/// Background occupation used by every figure grid.
pub const FIGURE_BACKGROUND: f64 = 6250.0;
/// Target temperature used by every figure grid, K.
pub const ROOM_TEMPERATURE: f64 = 300.0;
/// Fridge temperatures of the maser curves, K.
pub const MASER_TEMPERATURES: [f64; 4] = [300.0, 77.0, 10.0, 4.0];

/// Beyond this `hν/k_BT` the occupation is reported as zero.
const MAX_PLANCK_EXPONENT: f64 = 700.0;

/// Thermal occupation with an underflow marker.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Occupation {
    pub photons: f64,
    pub underflow: bool,
}

/// Bose–Einstein occupation `1/(exp(hν/k_BT) − 1)`.
pub fn planck_occupation(freq: f64, temp: f64) -> Result<Occupation> {
    if !(freq > 0.0 && freq.is_finite()) {
        return Err(Error::Domain(format!("frequency must be > 0, got {freq}")));
    }
    if !(temp > 0.0 && temp.is_finite()) {
        return Err(Error::Domain(format!(
            "temperature must be > 0, got {temp}"
        )));
    }
    let x = PLANCK * freq / (BOLTZMANN * temp);
    if x > MAX_PLANCK_EXPONENT {
        return Ok(Occupation {
            photons: 0.0,
            underflow: true,
        });
    }
    Ok(Occupation {
        photons: 1.0 / x.exp_m1(),
        underflow: false,
    })
}

/// Frequency at which a mode at `temp` holds `photons` thermal photons.
pub fn frequency_for_occupation(photons: f64, temp: f64) -> Result<f64> {
    if !(photons > 0.0) || !(temp > 0.0) {
        return Err(Error::Domain(format!(
            "need photons > 0 and temp > 0, got {photons} and {temp}"
        )));
    }
    Ok((1.0 / photons).ln_1p() * BOLTZMANN * temp / PLANCK)
}

/// Default carrier frequency: the one giving exactly 6250 background photons
/// at 300 K (about 1.00007 GHz).
pub fn default_frequency() -> f64 {
    frequency_for_occupation(FIGURE_BACKGROUND, ROOM_TEMPERATURE).expect("positive constants")
}

fn default_t_target() -> f64 {
    ROOM_TEMPERATURE
}

fn default_copies() -> u64 {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Amplified,
    Maser,
    Optical,
}

/// One benchmark configuration as written in a scenario file.
///
/// `n_b` overrides the Planck background at (`freq`, `t_target`). With
/// `energy_matched`, the maser transmits `n_s + n_a − n̄_T` photons and the
/// optical source `n_s + n_a`, where `n_a` is the noise of the amplified
/// reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub kind: SourceKind,
    pub n_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_fridge: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freq: Option<f64>,
    #[serde(default = "default_t_target")]
    pub t_target: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_b: Option<f64>,
    pub eta: f64,
    #[serde(default = "default_copies")]
    pub copies: u64,
    #[serde(default)]
    pub energy_matched: bool,
}

/// A scenario with energy matching and occupations worked out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedScenario {
    pub scenario: Scenario,
    pub n_b: f64,
    /// Signal photons leaving the source (`N_S`, `φN_S` or `N_S + N_A`).
    pub transmitted: f64,
    /// Thermal photons on top of the signal at the source output
    /// (`N_A`, `n̄_T` or 0).
    pub source_noise: f64,
    /// Some Planck occupation underflowed to zero.
    pub underflow: bool,
}

fn scenario_err(id: &str, msg: impl std::fmt::Display) -> Error {
    Error::Scenario(format!("scenario `{id}`: {msg}"))
}

impl Scenario {
    fn require(&self, name: &str, v: Option<f64>) -> Result<f64> {
        v.ok_or_else(|| scenario_err(&self.id, format!("{name} is required for this kind")))
    }

    fn validate(&self) -> Result<()> {
        let id = &self.id;
        let finite_nonneg = |name: &str, x: f64| -> Result<()> {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(scenario_err(
                    id,
                    format!("{name} must be finite and >= 0, got {x}"),
                ));
            }
            Ok(())
        };
        finite_nonneg("n_s", self.n_s)?;
        if let Some(n_a) = self.n_a {
            finite_nonneg("n_a", n_a)?;
        }
        if let Some(n_b) = self.n_b {
            finite_nonneg("n_b", n_b)?;
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(scenario_err(
                id,
                format!("eta must lie in [0, 1], got {}", self.eta),
            ));
        }
        if let Some(phi) = self.phi {
            if !(phi > 0.0 && phi <= 1.0) {
                return Err(scenario_err(
                    id,
                    format!("phi must lie in (0, 1], got {phi}"),
                ));
            }
        }
        for (name, t) in [
            ("t_target", Some(self.t_target)),
            ("t_fridge", self.t_fridge),
        ] {
            if let Some(t) = t {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(scenario_err(id, format!("{name} must be > 0, got {t}")));
                }
            }
        }
        if let Some(f) = self.freq {
            if !(f > 0.0 && f.is_finite()) {
                return Err(scenario_err(id, format!("freq must be > 0, got {f}")));
            }
        }
        if self.copies == 0 {
            return Err(scenario_err(id, "copies must be >= 1"));
        }
        Ok(())
    }

    pub fn frequency(&self) -> f64 {
        self.freq.unwrap_or_else(default_frequency)
    }

    /// Applies energy matching and works out the occupations.
    pub fn resolve(&self) -> Result<ResolvedScenario> {
        self.validate()?;
        let mut underflow = false;
        let n_b = match self.n_b {
            Some(n_b) => n_b,
            None => {
                let occ = planck_occupation(self.frequency(), self.t_target)?;
                underflow |= occ.underflow;
                occ.photons
            }
        };
        let (transmitted, source_noise) = match self.kind {
            SourceKind::Amplified => (self.n_s, self.require("n_a", self.n_a)?),
            SourceKind::Maser => {
                let t = self.require("t_fridge", self.t_fridge)?;
                let occ = planck_occupation(self.frequency(), t)?;
                underflow |= occ.underflow;
                let n_t = occ.photons;
                let transmitted = if self.energy_matched {
                    self.n_s + self.require("n_a", self.n_a)? - n_t
                } else {
                    self.require("phi", self.phi)? * self.n_s
                };
                if transmitted < 0.0 {
                    return Err(scenario_err(
                        &self.id,
                        format!(
                            "energy matching leaves {transmitted} signal photons \
                             (fridge occupation {n_t} exceeds the reference energy)"
                        ),
                    ));
                }
                (transmitted, n_t)
            }
            SourceKind::Optical => {
                let transmitted = if self.energy_matched {
                    self.n_s + self.require("n_a", self.n_a)?
                } else {
                    self.n_s
                };
                (transmitted, 0.0)
            }
        };
        Ok(ResolvedScenario {
            scenario: self.clone(),
            n_b,
            transmitted,
            source_noise,
            underflow,
        })
    }
}

/// Resolves a scenario; see [`Scenario::resolve`].
pub fn build_scenario(s: &Scenario) -> Result<ResolvedScenario> {
    s.resolve()
}

/// Target-absent and target-present return states.
#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisPair<T = f64> {
    pub rho0: GaussianState<T>,
    pub rho1: GaussianState<T>,
    /// Received signal photons `η N_S'`.
    pub mu: f64,
    /// Extra noise photons under target presence, `η x`.
    pub n_added: f64,
}

impl ResolvedScenario {
    pub fn id(&self) -> &str {
        &self.scenario.id
    }

    pub fn kind(&self) -> SourceKind {
        self.scenario.kind
    }

    pub fn eta(&self) -> f64 {
        self.scenario.eta
    }

    pub fn copies(&self) -> f64 {
        self.scenario.copies as f64
    }

    /// Received signal photons `η N_S'`.
    pub fn mu(&self) -> f64 {
        self.eta() * self.transmitted
    }

    /// Photons per mode reaching the target, signal plus source noise.
    pub fn irradiating_photons(&self) -> f64 {
        self.transmitted + self.source_noise
    }

    /// Closed-form Chernoff-type bound for this source.
    pub fn closed_qcb(&self) -> Result<BoundResult> {
        match self.kind() {
            SourceKind::Amplified => closed_forms::qcb_amp(&self.amp_params()),
            SourceKind::Maser => closed_forms::qcb_maser(&self.maser_params()),
            SourceKind::Optical => {
                closed_forms::qcb_optical(self.transmitted, self.n_b, self.eta(), self.copies())
            }
        }
    }

    /// Closed-form relative entropy and variance for this source.
    pub fn closed_qre(&self) -> Result<DvPair> {
        match self.kind() {
            SourceKind::Amplified => closed_forms::qre_amp(&self.amp_params()),
            SourceKind::Maser => closed_forms::qre_maser(&self.maser_params()),
            SourceKind::Optical => {
                closed_forms::qre_optical(self.transmitted, self.n_b, self.eta())
            }
        }
    }

    fn amp_params(&self) -> AmpParams {
        AmpParams {
            n_s: self.transmitted,
            n_a: self.source_noise,
            n_b: self.n_b,
            eta: self.eta(),
            copies: self.copies(),
        }
    }

    /// The transmitted photons stand for `φN_S`, so `φ` is folded in.
    fn maser_params(&self) -> MaserParams {
        MaserParams {
            n_s: self.transmitted,
            phi: 1.0,
            n_t: self.source_noise,
            n_b: self.n_b,
            eta: self.eta(),
            copies: self.copies(),
        }
    }

    /// Hypothesis pair from the closed expressions for the return states.
    pub fn hypothesis_pair<T: Real>(&self) -> Result<HypothesisPair<T>> {
        let eta = T::from_f64(self.eta());
        let n_b = T::from_f64(self.n_b);
        let mu = eta * T::from_f64(self.transmitted);
        let added = eta * T::from_f64(self.source_noise);
        Ok(HypothesisPair {
            rho0: make_thermal(n_b)?,
            rho1: GaussianState::displaced_thermal(mu, n_b + added)?,
            mu: mu.to_f64(),
            n_added: added.to_f64(),
        })
    }

    /// Hypothesis pair built by sending the source through a beamsplitter
    /// of transmissivity `η` against a thermal environment of
    /// `N_B/(1−η)` photons. Needs `η < 1`.
    pub fn hypothesis_pair_via_channels<T: Real>(&self) -> Result<HypothesisPair<T>> {
        if !(self.eta() < 1.0) {
            return Err(Error::Domain(
                "the channel construction needs eta < 1".into(),
            ));
        }
        let n_s = T::from_f64(self.transmitted);
        let noise = T::from_f64(self.source_noise);
        let source = match self.kind() {
            SourceKind::Amplified => amplified_source(n_s, noise)?,
            SourceKind::Maser => GaussianState::displaced_thermal(n_s, noise)?,
            SourceKind::Optical => make_coherent(n_s)?,
        };
        let eta = T::from_f64(self.eta());
        let n_b = T::from_f64(self.n_b);
        let env = make_thermal(n_b / (T::one() - eta))?;
        let rho1 = apply_beamsplitter(&source, eta, &env)?;
        Ok(HypothesisPair {
            rho0: make_thermal(n_b)?,
            rho1,
            mu: self.mu(),
            n_added: self.eta() * self.source_noise,
        })
    }
}

/// What a figure panel plots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PanelKind {
    /// Chernoff bound against the number of copies.
    ChernoffVsCopies,
    /// Second-order relative-entropy ROC.
    RelativeEntropyRoc,
    /// Homodyne ROC.
    HomodyneRoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigurePanel {
    pub id: String,
    pub kind: PanelKind,
    pub scenarios: Vec<Scenario>,
}

/// Known panel ids.
pub const FIGURE_IDS: [&str; 7] = [
    "fig2_upper",
    "fig2_lower",
    "fig3_upper",
    "fig3_lower",
    "fig4_upper",
    "fig4_mid",
    "fig4_lower",
];

/// Amplified reference, maser curves at [`MASER_TEMPERATURES`] and the
/// optical curve, all energy matched to `N_S + N_A`.
pub fn benchmark_set(n_s: f64, n_a: f64, eta: f64, copies: u64) -> Vec<Scenario> {
    let base = Scenario {
        id: "amp".into(),
        kind: SourceKind::Amplified,
        n_s,
        n_a: Some(n_a),
        phi: None,
        t_fridge: None,
        freq: None,
        t_target: ROOM_TEMPERATURE,
        n_b: Some(FIGURE_BACKGROUND),
        eta,
        copies,
        energy_matched: true,
    };
    let mut out = vec![base.clone()];
    for t in MASER_TEMPERATURES {
        out.push(Scenario {
            id: format!("mas_{t}K"),
            kind: SourceKind::Maser,
            t_fridge: Some(t),
            ..base.clone()
        });
    }
    out.push(Scenario {
        id: "opt".into(),
        kind: SourceKind::Optical,
        ..base
    });
    out
}

/// Parameter sets of the published panels.
pub fn figure_grid(figure_id: &str) -> Result<FigurePanel> {
    const N_S: f64 = 1e-2;
    let (kind, n_a, eta, copies) = match figure_id {
        "fig2_upper" => (PanelKind::ChernoffVsCopies, 6250.0, 1e-2, 1),
        "fig2_lower" => (PanelKind::ChernoffVsCopies, 5e8, 1e-7, 1),
        "fig3_upper" => (PanelKind::RelativeEntropyRoc, 6250.0, 1e-2, 100_000),
        "fig3_lower" => (PanelKind::RelativeEntropyRoc, 5e8, 1e-7, 100_000),
        "fig4_upper" => (PanelKind::HomodyneRoc, 6250.0, 1e-5, 100_000),
        "fig4_mid" => (PanelKind::HomodyneRoc, 6250.0, 1e-8, 1_000),
        "fig4_lower" => (PanelKind::HomodyneRoc, 5e8, 1e-8, 1_000),
        other => return Err(Error::UnknownFigure(other.to_string())),
    };
    Ok(FigurePanel {
        id: figure_id.to_string(),
        kind,
        scenarios: benchmark_set(N_S, n_a, eta, copies),
    })
}

/// Parses a scenario document: `{"schema": 1, ...scenario fields}` or
/// `{"schema": 1, "scenarios": [...]}`.
pub fn parse_scenarios(json: &str) -> Result<Vec<Scenario>> {
    let mut doc: serde_json::Value =
        serde_json::from_str(json).map_err(|e| Error::Scenario(format!("malformed JSON: {e}")))?;
    let obj = doc
        .as_object_mut()
        .ok_or_else(|| Error::Scenario("document must be a JSON object".into()))?;
    match obj.remove("schema") {
        Some(serde_json::Value::Number(n)) if n.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(other) => {
            return Err(Error::Scenario(format!(
                "unsupported schema {other}, expected {SCHEMA_VERSION}"
            )))
        }
        None => return Err(Error::Scenario("missing \"schema\" key".into())),
    }
    let list = match obj.remove("scenarios") {
        Some(list) => {
            if !obj.is_empty() {
                return Err(Error::Scenario(
                    "a scenario list cannot be mixed with scenario fields".into(),
                ));
            }
            serde_json::from_value::<Vec<Scenario>>(list)
        }
        None => serde_json::from_value::<Scenario>(doc).map(|s| vec![s]),
    }
    .map_err(|e| Error::Scenario(e.to_string()))?;
    if list.is_empty() {
        return Err(Error::Scenario("scenario list is empty".into()));
    }
    for s in &list {
        s.validate()?;
    }
    Ok(list)
}

#[derive(Serialize)]
struct ScenarioDoc<'a> {
    schema: u64,
    scenarios: &'a [Scenario],
}

/// Serialises scenarios as a versioned document.
pub fn scenarios_to_json(list: &[Scenario]) -> String {
    serde_json::to_string_pretty(&ScenarioDoc {
        schema: SCHEMA_VERSION,
        scenarios: list,
    })
    .expect("scenarios serialise")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rel_diff;

    fn amp_scenario() -> Scenario {
        figure_grid("fig2_upper").unwrap().scenarios[0].clone()
    }

    #[test]
    fn planck_reference_values() {
        // 30-digit references
        let n = planck_occupation(1e9, 300.0).unwrap();
        assert!(rel_diff(n.photons, 6_250.485_75) < 1e-9, "{}", n.photons);
        let n = planck_occupation(1e9, 10.0).unwrap();
        assert!(rel_diff(n.photons, 207.866_59) < 1e-7, "{}", n.photons);
        let cold = planck_occupation(1e9, 1e-5).unwrap();
        assert_eq!(cold.photons, 0.0);
        assert!(cold.underflow);
        assert!(planck_occupation(0.0, 300.0).is_err());
        assert!(planck_occupation(1e9, -1.0).is_err());
    }

    #[test]
    fn default_frequency_gives_figure_background() {
        let f = default_frequency();
        assert!((f - 1_000_077_713.835_945).abs() < 1e-3, "{f}");
        let n = planck_occupation(f, 300.0).unwrap().photons;
        assert!(rel_diff(n, 6250.0) < 1e-12, "{n}");
    }

    #[test]
    fn maser_energy_matching() {
        let s = Scenario {
            id: "m".into(),
            kind: SourceKind::Maser,
            n_s: 1e-2,
            n_a: Some(6250.0),
            t_fridge: Some(10.0),
            freq: Some(1e9),
            n_b: Some(6250.0),
            energy_matched: true,
            ..amp_scenario()
        };
        let r = s.resolve().unwrap();
        assert!((r.transmitted - 6042.1).abs() < 0.1, "{}", r.transmitted);
        assert!(rel_diff(r.irradiating_photons(), 6250.01) < 1e-12);

        let hot = Scenario {
            t_fridge: Some(400.0),
            ..s
        };
        assert!(matches!(hot.resolve(), Err(Error::Scenario(_))));
    }

    #[test]
    fn optical_energy_matching_and_passthrough() {
        let set = figure_grid("fig2_upper").unwrap().scenarios;
        let opt = set.last().unwrap().resolve().unwrap();
        assert_eq!(opt.transmitted, 6250.01);
        let amp = set[0].resolve().unwrap();
        assert_eq!(amp.transmitted, 1e-2);
        assert_eq!(amp.source_noise, 6250.0);
        for s in &set {
            let r = s.resolve().unwrap();
            assert!(
                rel_diff(r.irradiating_photons(), 6250.01) < 1e-12,
                "{}",
                s.id
            );
        }
    }

    #[test]
    fn amplified_pair_matches_expected_moments() {
        let pair = amp_scenario()
            .resolve()
            .unwrap()
            .hypothesis_pair::<f64>()
            .unwrap();
        assert_eq!(pair.rho0.cov()[(0, 0)], 6250.5);
        assert!(rel_diff(pair.rho1.cov()[(0, 0)], 6313.0) < 1e-15);
        assert!(rel_diff(pair.rho1.mean()[0], 2e-4f64.sqrt()) < 1e-15);
        assert!(rel_diff(pair.n_added, 62.5) < 1e-15);
    }

    #[test]
    fn optical_with_zero_reflectivity_is_trivial() {
        let s = Scenario {
            kind: SourceKind::Optical,
            eta: 0.0,
            ..amp_scenario()
        };
        let pair = s.resolve().unwrap().hypothesis_pair::<f64>().unwrap();
        assert_eq!(pair.rho0, pair.rho1);
    }

    #[test]
    fn figure_grid_contents() {
        let p = figure_grid("fig2_upper").unwrap();
        assert_eq!(p.scenarios.len(), 6);
        assert_eq!(p.scenarios[0].kind, SourceKind::Amplified);
        assert_eq!(p.scenarios[5].kind, SourceKind::Optical);
        assert!(p.scenarios.iter().any(|s| s.t_fridge == Some(10.0)));
        let mid = figure_grid("fig4_mid").unwrap();
        assert!(mid
            .scenarios
            .iter()
            .all(|s| s.copies == 1000 && s.eta == 1e-8));
        assert!(matches!(figure_grid("fig9"), Err(Error::UnknownFigure(_))));
        for id in FIGURE_IDS {
            for s in figure_grid(id).unwrap().scenarios {
                s.resolve().unwrap();
            }
        }
    }

    #[test]
    fn json_round_trip_and_schema() {
        let set = figure_grid("fig3_upper").unwrap().scenarios;
        let text = scenarios_to_json(&set);
        assert_eq!(parse_scenarios(&text).unwrap(), set);

        let single = r#"{"schema": 1, "id": "x", "kind": "optical", "n_s": 1.0, "eta": 0.1}"#;
        let s = parse_scenarios(single).unwrap();
        assert_eq!(s[0].copies, 1);
        assert_eq!(s[0].t_target, 300.0);

        for bad in [
            r#"{"id": "x", "kind": "optical", "n_s": 1.0, "eta": 0.1}"#,
            r#"{"schema": 2, "id": "x", "kind": "optical", "n_s": 1.0, "eta": 0.1}"#,
            r#"{"schema": 1, "id": "x", "kind": "laser", "n_s": 1.0, "eta": 0.1}"#,
            r#"{"schema": 1, "id": "x", "kind": "optical", "n_s": 1.0, "eta": 1.5}"#,
            r#"{"schema": 1, "id": "x", "kind": "optical", "n_s": 1.0, "eta": 0.1, "typo": 1}"#,
            r#"{"schema": 1, "scenarios": []}"#,
            "not json",
        ] {
            assert!(
                matches!(parse_scenarios(bad), Err(Error::Scenario(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn missing_kind_fields_are_reported() {
        let s = Scenario {
            n_a: None,
            ..amp_scenario()
        };
        assert!(matches!(s.resolve(), Err(Error::Scenario(_))));
    }
}
