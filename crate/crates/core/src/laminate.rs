//! Orthotropic plies, cross-ply layups and the plate test case.
//!
//! Voigt ordering throughout is (11, 22, 33, 23, 13, 12) with engineering
//! shear strains.

use crate::error::{Error, Result};
use nalgebra::Matrix6;
use serde::{Deserialize, Serialize};

/// Engineering constants of an orthotropic material in its principal axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrthotropicMaterial {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub g12: f64,
    pub g13: f64,
    pub g23: f64,
    pub nu12: f64,
    pub nu13: f64,
    pub nu23: f64,
}

impl Default for OrthotropicMaterial {
    fn default() -> Self {
        Self::benchmark()
    }
}

impl OrthotropicMaterial {
    /// Ply material of the cross-ply benchmark: `E2 = E3 = E1/25`,
    /// `G12 = G13 = G23/2.5`, all Poisson ratios 0.25, with `E1 = 25` and
    /// `G23 = 0.5` (GPa).
    pub fn benchmark() -> Self {
        Self::from_ratios(25.0, 0.5)
    }

    pub fn from_ratios(e1: f64, g23: f64) -> Self {
        Self {
            e1,
            e2: e1 / 25.0,
            e3: e1 / 25.0,
            g12: g23 / 2.5,
            g13: g23 / 2.5,
            g23,
            nu12: 0.25,
            nu13: 0.25,
            nu23: 0.25,
        }
    }

    pub fn isotropic(e: f64, nu: f64) -> Self {
        let g = e / (2.0 * (1.0 + nu));
        Self { e1: e, e2: e, e3: e, g12: g, g13: g, g23: g, nu12: nu, nu13: nu, nu23: nu }
    }

    /// Material with axes 1 and 2 exchanged.
    pub fn swapped_12(&self) -> Self {
        Self {
            e1: self.e2,
            e2: self.e1,
            e3: self.e3,
            g12: self.g12,
            g13: self.g23,
            g23: self.g13,
            nu12: self.nu12 * self.e2 / self.e1,
            nu13: self.nu23,
            nu23: self.nu13,
        }
    }

    /// Symmetric compliance matrix; entry (1,2) is `-nu12/E1` (= `-nu21/E2`).
    pub fn compliance(&self) -> Matrix6<f64> {
        let mut s = Matrix6::zeros();
        s[(0, 0)] = 1.0 / self.e1;
        s[(1, 1)] = 1.0 / self.e2;
        s[(2, 2)] = 1.0 / self.e3;
        s[(0, 1)] = -self.nu12 / self.e1;
        s[(0, 2)] = -self.nu13 / self.e1;
        s[(1, 2)] = -self.nu23 / self.e2;
        s[(1, 0)] = s[(0, 1)];
        s[(2, 0)] = s[(0, 2)];
        s[(2, 1)] = s[(1, 2)];
        s[(3, 3)] = 1.0 / self.g23;
        s[(4, 4)] = 1.0 / self.g13;
        s[(5, 5)] = 1.0 / self.g12;
        s
    }

    fn validate(&self) -> Result<()> {
        let moduli = [self.e1, self.e2, self.e3, self.g12, self.g13, self.g23];
        if moduli.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::InvalidMaterial("all moduli must be positive and finite".into()));
        }
        if [self.nu12, self.nu13, self.nu23].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMaterial("Poisson ratios must be finite".into()));
        }
        Ok(())
    }
}

/// 6x6 Voigt stiffness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stiffness6(pub Matrix6<f64>);

/// Voigt index of the symmetric tensor pair `(i, j)`.
#[inline]
pub const fn voigt(i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (1, 2) | (2, 1) => 3,
        (0, 2) | (2, 0) => 4,
        _ => 5,
    }
}

impl Stiffness6 {
    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.0
    }

    /// Fourth-order tensor entry `C_ijkl`.
    #[inline]
    pub fn tensor(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.0[(voigt(i, j), voigt(k, l))]
    }

    /// `σ = C ε` for a Voigt strain with engineering shears.
    #[inline]
    pub fn apply(&self, strain: &[f64; 6]) -> [f64; 6] {
        let mut out = [0.0; 6];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..6).map(|c| self.0[(r, c)] * strain[c]).sum();
        }
        out
    }

    /// Same material with axes 1 and 2 exchanged (a 90° in-plane rotation
    /// for an orthotropic ply).
    pub fn rotate_90(&self) -> Self {
        const PERM: [usize; 6] = [1, 0, 2, 4, 3, 5];
        Self(Matrix6::from_fn(|r, c| self.0[(PERM[r], PERM[c])]))
    }

    pub fn is_positive_definite(&self) -> bool {
        self.0.cholesky().is_some()
    }
}

/// Inverts the compliance built from engineering constants.
pub fn stiffness_from_engineering(mat: &OrthotropicMaterial) -> Result<Stiffness6> {
    mat.validate()?;
    let s = mat.compliance();
    if s.cholesky().is_none() {
        return Err(Error::InvalidMaterial(
            "compliance is not positive definite; check Poisson ratios".into(),
        ));
    }
    let c = s
        .try_inverse()
        .ok_or_else(|| Error::InvalidMaterial("compliance is singular".into()))?;
    // symmetrize away round-off
    Ok(Stiffness6((c + c.transpose()) * 0.5))
}

/// Fiber direction of a ply: 0° along global x, 90° along global y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlyAngle {
    #[serde(rename = "0")]
    Deg0,
    #[serde(rename = "90")]
    Deg90,
}

impl PlyAngle {
    pub fn degrees(self) -> u32 {
        match self {
            PlyAngle::Deg0 => 0,
            PlyAngle::Deg90 => 90,
        }
    }

    pub fn from_degrees(deg: u32) -> Result<Self> {
        match deg {
            0 => Ok(PlyAngle::Deg0),
            90 => Ok(PlyAngle::Deg90),
            other => Err(Error::InvalidLayup(format!("ply angle {other} is not 0 or 90"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ply {
    pub material: OrthotropicMaterial,
    pub angle: PlyAngle,
    pub thickness: f64,
    stiffness: Stiffness6,
}

impl Ply {
    pub fn new(material: OrthotropicMaterial, angle: PlyAngle, thickness: f64) -> Result<Self> {
        if !(thickness > 0.0) || !thickness.is_finite() {
            return Err(Error::InvalidLayup(format!("ply thickness {thickness} must be positive")));
        }
        let c = stiffness_from_engineering(&material)?;
        let stiffness = match angle {
            PlyAngle::Deg0 => c,
            PlyAngle::Deg90 => c.rotate_90(),
        };
        Ok(Self { material, angle, thickness, stiffness })
    }

    /// Stiffness in global axes.
    pub fn stiffness(&self) -> &Stiffness6 {
        &self.stiffness
    }
}

/// Ordered stack of plies, bottom to top.
#[derive(Debug, Clone, PartialEq)]
pub struct Layup {
    plies: Vec<Ply>,
    interfaces: Vec<f64>,
}

impl Layup {
    pub fn new(plies: Vec<Ply>) -> Result<Self> {
        if plies.is_empty() {
            return Err(Error::InvalidLayup("a layup needs at least one ply".into()));
        }
        let mut interfaces = Vec::with_capacity(plies.len() + 1);
        let mut z = 0.0;
        interfaces.push(z);
        for p in &plies {
            z += p.thickness;
            interfaces.push(z);
        }
        Ok(Self { plies, interfaces })
    }

    /// `n` plies of equal thickness with the given angle pattern.
    pub fn from_angles(
        material: OrthotropicMaterial,
        angles: &[PlyAngle],
        ply_thickness: f64,
    ) -> Result<Self> {
        let plies = angles
            .iter()
            .map(|&a| Ply::new(material, a, ply_thickness))
            .collect::<Result<Vec<_>>>()?;
        Self::new(plies)
    }

    /// 90/0/90/... from the bottom.
    pub fn cross_ply(material: OrthotropicMaterial, n_layers: usize, ply_thickness: f64) -> Result<Self> {
        Self::from_angles(material, &alternating_angles(n_layers, PlyAngle::Deg90), ply_thickness)
    }

    pub fn plies(&self) -> &[Ply] {
        &self.plies
    }

    pub fn n_layers(&self) -> usize {
        self.plies.len()
    }

    pub fn thickness(&self) -> f64 {
        self.interfaces[self.plies.len()]
    }

    /// `n_layers + 1` ply boundary heights from 0 to `t`.
    pub fn interfaces(&self) -> &[f64] {
        &self.interfaces
    }

    /// Ply containing `z`; intervals are `[z_i, z_{i+1})` with the top ply
    /// closed, so interface points belong to the ply above.
    pub fn layer_index(&self, z: f64) -> Result<usize> {
        let t = self.thickness();
        if !(0.0..=t).contains(&z) {
            return Err(Error::OutOfDomain { value: z, lo: 0.0, hi: t });
        }
        let n = self.plies.len();
        let k = self.interfaces[1..n].partition_point(|&zi| zi <= z);
        Ok(k)
    }

    pub fn stiffness_at(&self, z: f64) -> Result<(Stiffness6, usize)> {
        let k = self.layer_index(z)?;
        Ok((self.plies[k].stiffness, k))
    }

    /// Stiffness of ply `k` in global axes.
    pub fn stiffness(&self, k: usize) -> &Stiffness6 {
        &self.plies[k].stiffness
    }
}

/// Alternating 0/90 pattern starting from `bottom`.
pub fn alternating_angles(n: usize, bottom: PlyAngle) -> Vec<PlyAngle> {
    let other = match bottom {
        PlyAngle::Deg0 => PlyAngle::Deg90,
        PlyAngle::Deg90 => PlyAngle::Deg0,
    };
    (0..n).map(|i| if i % 2 == 0 { bottom } else { other }).collect()
}

/// Square simply-supported plate of side `L = S t` under a bisinusoidal
/// pressure of amplitude `sigma0` on the top face.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateCase {
    pub layup: Layup,
    pub slenderness: f64,
    pub sigma0: f64,
}

impl PlateCase {
    pub fn new(layup: Layup, slenderness: f64, sigma0: f64) -> Result<Self> {
        if !(slenderness > 0.0) || !slenderness.is_finite() {
            return Err(Error::InvalidLayup(format!("slenderness {slenderness} must be positive")));
        }
        if !sigma0.is_finite() {
            return Err(Error::InvalidLayup("load amplitude must be finite".into()));
        }
        Ok(Self { layup, slenderness, sigma0 })
    }

    /// Benchmark cross-ply case with unit plies.
    pub fn benchmark(n_layers: usize, slenderness: f64) -> Result<Self> {
        let layup = Layup::cross_ply(OrthotropicMaterial::benchmark(), n_layers, 1.0)?;
        Self::new(layup, slenderness, 1.0)
    }

    pub fn thickness(&self) -> f64 {
        self.layup.thickness()
    }

    /// In-plane side length.
    pub fn length(&self) -> f64 {
        self.slenderness * self.layup.thickness()
    }

    /// Top pressure `p(x, y) = σ0 sin(πx/L) sin(πy/L)`.
    pub fn pressure(&self, x: f64, y: f64) -> f64 {
        let l = self.length();
        let pi = std::f64::consts::PI;
        self.sigma0 * (pi * x / l).sin() * (pi * y / l).sin()
    }
}
