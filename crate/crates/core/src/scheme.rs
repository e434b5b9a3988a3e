use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    Uplink,
    Downlink,
}

/// Downlink power normalization policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// One coefficient for all streams, set from an expectation over fading.
    Long,
    /// Per-stream coefficients from the instantaneous channel.
    Short,
}

/// Receiver / precoder combination whose rate is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    UlZf,
    UlMrc,
    DlZfLt,
    DlZfSt,
    DlMrtLt,
    DlMrtSt,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::UlZf,
        Scheme::UlMrc,
        Scheme::DlZfLt,
        Scheme::DlZfSt,
        Scheme::DlMrtLt,
        Scheme::DlMrtSt,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Scheme::UlZf => "UL-ZF",
            Scheme::UlMrc => "UL-MRC",
            Scheme::DlZfLt => "DL-ZF-LT",
            Scheme::DlZfSt => "DL-ZF-ST",
            Scheme::DlMrtLt => "DL-MRT-LT",
            Scheme::DlMrtSt => "DL-MRT-ST",
        }
    }

    pub fn link(self) -> Link {
        match self {
            Scheme::UlZf | Scheme::UlMrc => Link::Uplink,
            _ => Link::Downlink,
        }
    }

    pub fn normalization(self) -> Option<Normalization> {
        match self {
            Scheme::UlZf | Scheme::UlMrc => None,
            Scheme::DlZfLt | Scheme::DlMrtLt => Some(Normalization::Long),
            Scheme::DlZfSt | Scheme::DlMrtSt => Some(Normalization::Short),
        }
    }

    pub fn is_zero_forcing(self) -> bool {
        matches!(self, Scheme::UlZf | Scheme::DlZfLt | Scheme::DlZfSt)
    }

    /// Assembles a scheme from the experiment-level description.
    ///
    /// `beamformer` is one of `zf`, `mrc`, `mrt`; MRC is uplink-only, MRT
    /// downlink-only, and a normalization is required exactly on the downlink.
    pub fn compose(link: Link, beamformer: &str, norm: Option<Normalization>) -> Result<Scheme> {
        use Normalization::*;
        let scheme = match (link, beamformer, norm) {
            (Link::Uplink, _, Some(_)) => {
                return Err(Error::Parameter(
                    "normalization applies to the downlink only".into(),
                ))
            }
            (Link::Downlink, _, None) => {
                return Err(Error::Parameter(
                    "downlink requires a normalization (long or short)".into(),
                ))
            }
            (Link::Uplink, "zf", None) => Scheme::UlZf,
            (Link::Uplink, "mrc", None) => Scheme::UlMrc,
            (Link::Downlink, "zf", Some(Long)) => Scheme::DlZfLt,
            (Link::Downlink, "zf", Some(Short)) => Scheme::DlZfSt,
            (Link::Downlink, "mrt", Some(Long)) => Scheme::DlMrtLt,
            (Link::Downlink, "mrt", Some(Short)) => Scheme::DlMrtSt,
            (link, bf, _) => {
                return Err(Error::Parameter(format!(
                    "beamformer `{bf}` is not available on the {}",
                    match link {
                        Link::Uplink => "uplink",
                        Link::Downlink => "downlink",
                    }
                )))
            }
        };
        Ok(scheme)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('_', "-");
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.label() == norm)
            .ok_or_else(|| Error::Parameter(format!("unknown scheme `{s}`")))
    }
}
