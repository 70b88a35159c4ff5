use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::controls::named_setting;
use crate::dynamics::{record_seed, ControlSetting, MeasurementConfig};
use crate::estimation::DeConfig;
use crate::qcore::{tensor, DensityMatrix, StateJson};
use crate::sampling::{catalog, hs_random};
use crate::{Error, Result};

/// One experiment: control, measurement, truth, batch size and estimation
/// parameters. Rates are given in units of `2π/T` (`*_2pi_per_T` keys);
/// times (`dt`, `total_time`, `tau`) in the same time unit as `T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Setting code, e.g. `"XYZ"`, `"0+XYZ"`, `"XY+YZ"`, `"(0.3,1.2)"`.
    pub setting: String,
    #[serde(rename = "omega_2pi_per_T")]
    pub omega_2pi_per_t: f64,
    #[serde(rename = "coupling_2pi_per_T")]
    pub coupling_2pi_per_t: f64,
    pub dt: f64,
    pub total_time: f64,
    pub tau: f64,
    pub n_records: usize,
    pub seed: u64,
    /// Truth reference, see [`TruthSpec`]. Required by `simulate`.
    pub truth: Option<String>,
    /// Known ancilla state (first qubit) for the remote-qubit protocol.
    pub ancilla: Option<String>,
    pub estimation: EstimationConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            setting: "XYZ".into(),
            omega_2pi_per_t: 1.5,
            coupling_2pi_per_t: 1.5,
            dt: 0.01,
            total_time: 2.0,
            tau: 0.4,
            n_records: 5000,
            seed: 1,
            truth: None,
            ancilla: None,
            estimation: EstimationConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimationConfig {
    /// `bme`, `mpbe`, `mle` or `li`.
    pub method: String,
    pub grid_size: usize,
    /// `hs-uniform-ball` or `product-with-fixed-ancilla`.
    pub grid_kind: String,
    /// Draw a fresh grid for every repetition in bench sweeps.
    pub resample_grid: bool,
    pub de_restarts: usize,
    pub de_generations: usize,
    /// Records per observable when synthesizing linear-inversion tallies.
    pub li_shots: usize,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        Self {
            method: "bme".into(),
            grid_size: 10_000,
            grid_kind: "hs-uniform-ball".into(),
            resample_grid: false,
            de_restarts: DeConfig::default().restarts,
            de_generations: DeConfig::default().generations,
            li_shots: 1000,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub records: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.control()?;
        self.measurement()?;
        for spec in self.truth.iter().chain(&self.ancilla) {
            TruthSpec::parse(spec)?;
        }
        Ok(())
    }

    /// Angular rate corresponding to `k × 2π/T`. A zero rate stays zero
    /// even for `T = 0`.
    pub fn rate(&self, k: f64) -> f64 {
        if k == 0.0 {
            0.0
        } else {
            k * 2.0 * PI / self.total_time
        }
    }

    pub fn control(&self) -> Result<ControlSetting> {
        named_setting(&self.setting, self.rate(self.omega_2pi_per_t), self.rate(self.coupling_2pi_per_t))
    }

    pub fn measurement(&self) -> Result<MeasurementConfig> {
        MeasurementConfig::from_total_time(self.dt, self.total_time, self.tau)
    }

    pub fn de_config(&self, seed: u64) -> DeConfig {
        DeConfig {
            restarts: self.estimation.de_restarts,
            generations: self.estimation.de_generations,
            seed,
            ..DeConfig::default()
        }
    }

    pub fn ancilla_state(&self) -> Result<Option<DensityMatrix>> {
        let Some(spec) = &self.ancilla else {
            return Ok(None);
        };
        let mut rng = ChaCha8Rng::seed_from_u64(record_seed(self.seed, u64::MAX - 1));
        let state = TruthSpec::parse(spec)?.resolve(2, &mut rng)?;
        if state.dim() != 2 {
            return Err(Error::InvalidArgument("ancilla must be a single-qubit state".into()));
        }
        Ok(Some(state))
    }

    /// The true initial state for the configured setting. A single-qubit
    /// truth used with a two-qubit setting is combined with the ancilla as
    /// `ancilla ⊗ truth`.
    pub fn truth_state(&self) -> Result<DensityMatrix> {
        self.truth_state_for(self.control()?.dim())
    }

    /// As [`truth_state`](Self::truth_state), for an explicit system dimension.
    pub fn truth_state_for(&self, dim: usize) -> Result<DensityMatrix> {
        let mut rng = ChaCha8Rng::seed_from_u64(record_seed(self.seed, u64::MAX));
        let spec = self
            .truth
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("no truth state configured; pass --truth".into()))?;
        let spec = TruthSpec::parse(spec)?;
        let state = spec.resolve(dim, &mut rng)?;
        match (dim, state.dim()) {
            (d, s) if d == s => Ok(state),
            (4, 2) => {
                let ancilla = self.ancilla_state()?.ok_or_else(|| {
                    Error::InvalidArgument("single-qubit truth with a two-qubit setting needs an ancilla".into())
                })?;
                tensor(&ancilla, &state)
            }
            (d, s) => Err(Error::DimensionMismatch(d, s)),
        }
    }
}

/// Reference to a state: `catalog:NAME:INDEX`, `bloch:x,y,z`, `bell`,
/// `mixed`, `hs-random`, or a JSON state file (`file:PATH`, or any path
/// ending in `.json`).
#[derive(Clone, Debug, PartialEq)]
pub enum TruthSpec {
    Catalog(String, usize),
    Bloch([f64; 3]),
    Bell,
    MaximallyMixed,
    HsRandom,
    File(PathBuf),
}

impl TruthSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse state reference {s:?}"));
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("catalog:") {
            let (name, idx) = rest.rsplit_once(':').ok_or_else(bad)?;
            return Ok(Self::Catalog(name.to_string(), idx.parse().map_err(|_| bad())?));
        }
        if let Some(rest) = s.strip_prefix("bloch:") {
            let v: Vec<f64> = rest
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad())?;
            let v: [f64; 3] = v.try_into().map_err(|_| bad())?;
            return Ok(Self::Bloch(v));
        }
        if let Some(rest) = s.strip_prefix("file:") {
            return Ok(Self::File(PathBuf::from(rest)));
        }
        match s {
            "bell" => Ok(Self::Bell),
            "mixed" => Ok(Self::MaximallyMixed),
            "hs-random" => Ok(Self::HsRandom),
            _ if s.ends_with(".json") => Ok(Self::File(PathBuf::from(s))),
            _ => Err(bad()),
        }
    }

    /// Resolves the reference; `dim` is used by `hs-random` and `mixed`.
    pub fn resolve(&self, dim: usize, rng: &mut ChaCha8Rng) -> Result<DensityMatrix> {
        match self {
            Self::Catalog(name, idx) => catalog(name)?.get(*idx).cloned(),
            Self::Bloch([x, y, z]) => DensityMatrix::from_bloch(*x, *y, *z),
            Self::Bell => Ok(DensityMatrix::bell_phi_plus()),
            Self::MaximallyMixed => DensityMatrix::maximally_mixed(dim),
            Self::HsRandom => hs_random(dim, rng),
            Self::File(path) => {
                let text = std::fs::read_to_string(path)?;
                let json: StateJson = serde_json::from_str(&text)?;
                json.to_state()
            }
        }
    }
}
