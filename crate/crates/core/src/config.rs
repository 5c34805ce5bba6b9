//! Run configuration, stored as TOML with one table per stage.
//!
//! ```toml
//! [plate]
//! n_layers = 11
//! ply_thickness = 1.0
//! bottom_angle = 90        # alternating 90/0/90/... from the bottom
//! # angles = [90, 0, 0, 90] # explicit stack, overrides bottom_angle
//! slenderness = 10.0
//! sigma0 = 1.0
//!
//! [material]               # engineering constants, GPa
//! e1 = 25.0
//! e2 = 1.0
//! e3 = 1.0
//! g12 = 0.2
//! g13 = 0.2
//! g23 = 0.5
//! nu12 = 0.25
//! nu13 = 0.25
//! nu23 = 0.25
//!
//! [discretization]
//! variant = "single-element"
//! degree_inplane = 4
//! elements_inplane = 9
//! degree_z = 3
//! quad_per_layer = 4
//!
//! [recovery]
//! mode = "from-bottom"
//! stations = 5
//! samples_per_layer = 10
//!
//! [output]                 # default destinations for the CLI
//! # profile = "profile.csv"
//! # report = "report.csv"
//! # coefficients = "coefficients.json"
//! ```
//!
//! Every key is optional and falls back to the values above. Unknown keys
//! and out-of-range values are rejected with the line and column of the
//! offending entry.

use crate::error::{Error, Result};
use crate::iga::{DiscretizationScheme, Variant};
use crate::laminate::{alternating_angles, stiffness_from_engineering, Layup, OrthotropicMaterial, PlateCase, PlyAngle};
use crate::recovery::{RecoveryMode, SampleGrid};
use serde::{Deserialize, Deserializer, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub plate: PlateConfig,
    #[serde(deserialize_with = "valid_material")]
    pub material: OrthotropicMaterial,
    pub discretization: DiscretizationConfig,
    pub recovery: RecoveryConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlateConfig {
    #[serde(deserialize_with = "count_in::<_, 1, 1000>")]
    pub n_layers: usize,
    #[serde(deserialize_with = "positive")]
    pub ply_thickness: f64,
    #[serde(deserialize_with = "ply_angle")]
    pub bottom_angle: u32,
    /// Explicit angles bottom to top; length must equal `n_layers`.
    #[serde(deserialize_with = "ply_angles", skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<u32>>,
    #[serde(deserialize_with = "positive")]
    pub slenderness: f64,
    #[serde(deserialize_with = "positive")]
    pub sigma0: f64,
}

impl Default for PlateConfig {
    fn default() -> Self {
        Self { n_layers: 11, ply_thickness: 1.0, bottom_angle: 90, angles: None, slenderness: 10.0, sigma0: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscretizationConfig {
    pub variant: Variant,
    /// At least 3: recovery needs third displacement derivatives in-plane.
    #[serde(deserialize_with = "count_in::<_, 3, 12>")]
    pub degree_inplane: usize,
    #[serde(deserialize_with = "count_in::<_, 1, 64>")]
    pub elements_inplane: usize,
    #[serde(deserialize_with = "count_in::<_, 1, 12>")]
    pub degree_z: usize,
    #[serde(deserialize_with = "count_in::<_, 1, 16>")]
    pub quad_per_layer: usize,
}

impl Default for DiscretizationConfig {
    fn default() -> Self {
        Self {
            variant: Variant::SingleElement,
            degree_inplane: 4,
            elements_inplane: 9,
            degree_z: 3,
            quad_per_layer: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecoveryConfig {
    pub mode: RecoveryMode,
    /// In-plane stations per side of the comparison grid.
    #[serde(deserialize_with = "count_in::<_, 1, 100>")]
    pub stations: usize,
    #[serde(deserialize_with = "count_in::<_, 1, 1000>")]
    pub samples_per_layer: usize,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        Self { mode: RecoveryMode::FromBottom, stations: 5, samples_per_layer: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<PathBuf>,
}

fn count_in<'de, D: Deserializer<'de>, const LO: usize, const HI: usize>(d: D) -> std::result::Result<usize, D::Error> {
    let v = i64::deserialize(d)?;
    if v < LO as i64 || v > HI as i64 {
        return Err(serde::de::Error::custom(format!("value {v} outside [{LO}, {HI}]")));
    }
    Ok(v as usize)
}

fn positive<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    let v = f64::deserialize(d)?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(serde::de::Error::custom(format!("value {v} must be positive and finite")));
    }
    Ok(v)
}

fn ply_angle<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<u32, D::Error> {
    let v = u32::deserialize(d)?;
    PlyAngle::from_degrees(v).map_err(serde::de::Error::custom)?;
    Ok(v)
}

fn ply_angles<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<u32>>, D::Error> {
    let v = Vec::<u32>::deserialize(d)?;
    if v.is_empty() {
        return Err(serde::de::Error::custom("angles must not be empty"));
    }
    for &a in &v {
        PlyAngle::from_degrees(a).map_err(serde::de::Error::custom)?;
    }
    Ok(Some(v))
}

fn valid_material<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<OrthotropicMaterial, D::Error> {
    let m = OrthotropicMaterial::deserialize(d)?;
    stiffness_from_engineering(&m).map_err(serde::de::Error::custom)?;
    Ok(m)
}

/// 1-based line and column of byte offset `pos`.
fn line_col(src: &str, pos: usize) -> (usize, usize) {
    let before = &src[..pos.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

impl RunConfig {
    pub fn from_toml_str(src: &str) -> Result<Self> {
        let config: Self = toml::from_str(src).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_col(src, s.start));
            let mut message = e.message().trim().to_string();
            let key = src.lines().nth(line.saturating_sub(1)).and_then(|l| l.split_once('=')).map(|(k, _)| k.trim());
            if let Some(key) = key.filter(|k| !k.is_empty() && !message.contains(*k)) {
                message = format!("{key}: {message}");
            }
            Error::Config { line, column, message }
        })?;
        if let Some(angles) = &config.plate.angles {
            if angles.len() != config.plate.n_layers {
                let line = src
                    .lines()
                    .position(|l| l.trim_start().starts_with("angles"))
                    .map_or(0, |i| i + 1);
                return Err(Error::Config {
                    line,
                    column: 1,
                    message: format!(
                        "angles: {} entries but n_layers = {}",
                        angles.len(),
                        config.plate.n_layers
                    ),
                });
            }
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Re-checks every field, e.g. after programmatic edits. Errors carry
    /// line 0 since there is no source text.
    pub fn validated(self) -> Result<Self> {
        Self::from_toml_str(&self.to_toml()).map_err(|e| match e {
            Error::Config { message, .. } => Error::Config { line: 0, column: 0, message },
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    /// Ply angles bottom to top.
    pub fn angles(&self) -> Result<Vec<PlyAngle>> {
        match &self.plate.angles {
            Some(a) => a.iter().map(|&d| PlyAngle::from_degrees(d)).collect(),
            None => Ok(alternating_angles(self.plate.n_layers, PlyAngle::from_degrees(self.plate.bottom_angle)?)),
        }
    }

    pub fn case(&self) -> Result<PlateCase> {
        let layup = Layup::from_angles(self.material, &self.angles()?, self.plate.ply_thickness)?;
        PlateCase::new(layup, self.plate.slenderness, self.plate.sigma0)
    }

    pub fn scheme(&self) -> DiscretizationScheme {
        let d = &self.discretization;
        match d.variant {
            Variant::Layerwise => DiscretizationScheme::layerwise(d.degree_inplane, d.elements_inplane, d.degree_z),
            Variant::SingleElement => {
                DiscretizationScheme::single_element(d.degree_inplane, d.elements_inplane, d.degree_z, d.quad_per_layer)
            }
        }
    }

    pub fn grid(&self, case: &PlateCase) -> Result<SampleGrid> {
        SampleGrid::new(case, self.recovery.stations, self.recovery.samples_per_layer)
    }

    /// Stable identifier, e.g. `se-n11-S10-q4-p4-pz3-e9`.
    pub fn case_id(&self) -> String {
        let d = &self.discretization;
        let prefix = match d.variant {
            Variant::Layerwise => "lw",
            Variant::SingleElement => "se",
        };
        format!(
            "{prefix}-n{}-S{}-q{}-p{}-pz{}-e{}",
            self.plate.n_layers,
            self.plate.slenderness,
            self.scheme().z_points_per_layer(),
            d.degree_inplane,
            d.degree_z,
            d.elements_inplane
        )
    }
}
