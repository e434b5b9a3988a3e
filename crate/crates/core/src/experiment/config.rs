use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::LosModel;
use crate::selection::{SelectionScheme, DEFAULT_BUDGET};
use crate::{Error, Link, Normalization, Result, Scheme};

/// A value given either once for all users or once per user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerUser {
    Scalar(f64),
    List(Vec<f64>),
}

impl PerUser {
    /// Expands to one value per user.
    pub fn expand(&self, users: usize) -> Option<Vec<f64>> {
        match self {
            PerUser::Scalar(v) => Some(vec![*v; users]),
            PerUser::List(v) if v.len() == users => Some(v.clone()),
            PerUser::List(_) => None,
        }
    }
}

impl Default for PerUser {
    fn default() -> Self {
        PerUser::Scalar(1.0)
    }
}

/// How the analog beams are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SelectionSpec {
    Exhaustive,
    PerUser,
    TwoStep,
    /// Zero-based beam indices.
    Fixed(Vec<usize>),
}

impl SelectionSpec {
    pub fn scheme(&self) -> Option<SelectionScheme> {
        match self {
            SelectionSpec::Exhaustive => Some(SelectionScheme::Exhaustive),
            SelectionSpec::PerUser => Some(SelectionScheme::PerUser),
            SelectionSpec::TwoStep => Some(SelectionScheme::TwoStep),
            SelectionSpec::Fixed(_) => None,
        }
    }
}

impl FromStr for SelectionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "exhaustive" => Ok(SelectionSpec::Exhaustive),
            "per_user" | "per-user" => Ok(SelectionSpec::PerUser),
            "two_step" | "two-step" => Ok(SelectionSpec::TwoStep),
            _ => match s.strip_prefix("fixed:") {
                Some(list) => list
                    .split(',')
                    .map(|t| t.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map(SelectionSpec::Fixed)
                    .map_err(|e| Error::config("selection", format!("bad beam index in `{s}`: {e}"))),
                None => Err(Error::config(
                    "selection",
                    format!("`{s}` is not one of exhaustive, per_user, two_step, fixed:<indices>"),
                )),
            },
        }
    }
}

impl TryFrom<String> for SelectionSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl fmt::Display for SelectionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionSpec::Exhaustive => f.write_str("exhaustive"),
            SelectionSpec::PerUser => f.write_str("per_user"),
            SelectionSpec::TwoStep => f.write_str("two_step"),
            SelectionSpec::Fixed(v) => {
                let list: Vec<String> = v.iter().map(usize::to_string).collect();
                write!(f, "fixed:{}", list.join(","))
            }
        }
    }
}

impl From<SelectionSpec> for String {
    fn from(s: SelectionSpec) -> String {
        s.to_string()
    }
}

/// `gaussian` or `ula:<angle>,<angle>,…` (radians).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LosSpec(pub LosModel);

impl FromStr for LosSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "gaussian" {
            return Ok(LosSpec(LosModel::GaussianIid));
        }
        match s.strip_prefix("ula:") {
            Some(list) => list
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(|angles| LosSpec(LosModel::UlaSteering { angles }))
                .map_err(|e| Error::config("los_model", format!("bad angle in `{s}`: {e}"))),
            None => Err(Error::config("los_model", format!("`{s}` is not gaussian or ula:<angles>"))),
        }
    }
}

impl TryFrom<String> for LosSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<LosSpec> for String {
    fn from(s: LosSpec) -> String {
        match s.0 {
            LosModel::GaussianIid => "gaussian".into(),
            LosModel::UlaSteering { angles } => {
                let list: Vec<String> = angles.iter().map(f64::to_string).collect();
                format!("ula:{}", list.join(","))
            }
        }
    }
}

impl Default for LosSpec {
    fn default() -> Self {
        LosSpec(LosModel::GaussianIid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::config("format", format!("`{other}` is not csv or json"))),
        }
    }
}

fn default_margin() -> usize {
    1
}

fn default_drops() -> usize {
    1000
}

/// Flat experiment description, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub m: usize,
    pub ns: usize,
    pub nu: usize,
    /// Ricean factor(s) in dB.
    pub k_db: PerUser,
    #[serde(default)]
    pub betas: PerUser,
    pub snr_db_grid: Vec<f64>,
    pub link: Link,
    /// `zf`, `mrc` (uplink) or `mrt` (downlink).
    pub beamformer: String,
    #[serde(default)]
    pub normalization: Option<Normalization>,
    pub selection: SelectionSpec,
    #[serde(default = "default_margin")]
    pub margin_n: usize,
    #[serde(default)]
    pub los_model: LosSpec,
    #[serde(default = "default_drops")]
    pub drops: usize,
    #[serde(default)]
    pub seed: u64,
    /// Seed for the LoS matrix; defaults to `seed`.
    #[serde(default)]
    pub los_seed: Option<u64>,
    /// SNR at which the selection objective is evaluated; defaults to 10 dB.
    #[serde(default)]
    pub selection_snr_db: Option<f64>,
    #[serde(default)]
    pub exhaustive_budget: Option<u64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

pub(crate) const DEFAULT_SELECTION_SNR_DB: f64 = 10.0;

/// Config after validation, with per-user vectors expanded.
#[derive(Debug, Clone)]
pub(crate) struct Resolved {
    pub scheme: Scheme,
    pub kappas_db: Vec<f64>,
    pub kappas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn los_seed(&self) -> u64 {
        self.los_seed.unwrap_or(self.seed)
    }

    pub fn scheme(&self) -> Result<Scheme> {
        let bf = self.beamformer.trim().to_ascii_lowercase();
        if !matches!(bf.as_str(), "zf" | "mrc" | "mrt") {
            return Err(Error::config("beamformer", format!("`{bf}` is not zf, mrc or mrt")));
        }
        Scheme::compose(self.link, &bf, self.normalization).map_err(|e| {
            let field = if matches!(self.link, Link::Uplink) == self.normalization.is_some() {
                "normalization"
            } else {
                "beamformer"
            };
            Error::config(field, e.to_string())
        })
    }

    /// Checks every field and field combination; no computation happens before this passes.
    pub fn validate(&self) -> Result<()> {
        self.resolve().map(|_| ())
    }

    pub(crate) fn resolve(&self) -> Result<Resolved> {
        let (m, ns, nu) = (self.m, self.ns, self.nu);
        if nu == 0 {
            return Err(Error::config("nu", "need at least one user"));
        }
        if ns < nu {
            return Err(Error::config("ns", format!("N_s = {ns} is below N_u = {nu}")));
        }
        if m < ns {
            return Err(Error::config("m", format!("M = {m} is below N_s = {ns}")));
        }
        let kappas_db = self
            .k_db
            .expand(nu)
            .ok_or_else(|| Error::config("k_db", format!("expected a scalar or {nu} values")))?;
        if let Some(k) = kappas_db.iter().find(|k| !k.is_finite()) {
            return Err(Error::config("k_db", format!("{k} dB is not finite")));
        }
        let betas = self
            .betas
            .expand(nu)
            .ok_or_else(|| Error::config("betas", format!("expected a scalar or {nu} values")))?;
        if let Some(b) = betas.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
            return Err(Error::config("betas", format!("{b} is not a positive gain")));
        }
        if self.snr_db_grid.is_empty() {
            return Err(Error::config("snr_db_grid", "empty SNR grid"));
        }
        if let Some(s) = self.snr_db_grid.iter().find(|s| !s.is_finite()) {
            return Err(Error::config("snr_db_grid", format!("{s} dB is not finite")));
        }
        if let Some(s) = self.selection_snr_db.filter(|s| !s.is_finite()) {
            return Err(Error::config("selection_snr_db", format!("{s} dB is not finite")));
        }
        let scheme = self.scheme()?;
        if scheme == Scheme::DlZfLt && ns == nu {
            return Err(Error::config(
                "ns",
                "long-term ZF normalization needs N_s > N_u (E‖W̄‖²_F is infinite otherwise)",
            ));
        }
        if self.drops == 0 {
            return Err(Error::config("drops", "need at least one drop"));
        }
        if self.margin_n == 0 {
            return Err(Error::config("margin_n", "margin must be at least 1"));
        }
        match &self.selection {
            SelectionSpec::TwoStep => {
                let need = nu * (ns / nu + self.margin_n);
                if need > m {
                    return Err(Error::config(
                        "margin_n",
                        format!("two-step needs N_u(C+n) = {need} <= M = {m}; reduce n"),
                    ));
                }
            }
            SelectionSpec::Exhaustive => {
                let budget = self.exhaustive_budget.unwrap_or(DEFAULT_BUDGET);
                let mut count: u128 = 1;
                for i in 0..ns.min(m - ns) {
                    count = count.saturating_mul((m - i) as u128) / (i as u128 + 1);
                }
                if count > budget as u128 {
                    return Err(Error::config(
                        "selection",
                        format!("exhaustive search over {count} candidates exceeds budget {budget}"),
                    ));
                }
            }
            SelectionSpec::Fixed(idx) => {
                if idx.len() != ns {
                    return Err(Error::config("selection", format!("{} fixed beams for N_s = {ns}", idx.len())));
                }
                if let Some(i) = idx.iter().find(|&&i| i >= m) {
                    return Err(Error::config("selection", format!("beam {i} out of range for M = {m}")));
                }
                let mut sorted = idx.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::config("selection", "fixed beams must be distinct"));
                }
            }
            SelectionSpec::PerUser => {}
        }
        if let LosModel::UlaSteering { angles } = &self.los_spec().0 {
            if angles.len() != nu {
                return Err(Error::config("los_model", format!("{} angles for {nu} users", angles.len())));
            }
            let half = std::f64::consts::FRAC_PI_2;
            if let Some(a) = angles.iter().find(|a| !(-half..=half).contains(*a)) {
                return Err(Error::config("los_model", format!("angle {a} outside [-π/2, π/2]")));
            }
        }
        let kappas = kappas_db.iter().map(|k| 10f64.powf(k / 10.0)).collect();
        Ok(Resolved {
            scheme,
            kappas_db,
            kappas,
            betas,
        })
    }

    fn los_spec(&self) -> &LosSpec {
        &self.los_model
    }
}
