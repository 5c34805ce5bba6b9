//! Exact 3D elasticity solution of the simply supported cross-ply plate
//! under bisinusoidal top pressure.
//!
//! With `α = β = π/L` the separated ansatz
//!
//! ```text
//! u = U(z) cos αx sin βy,   v = V(z) sin αx cos βy,   w = W(z) sin αx sin βy
//! ```
//!
//! satisfies the support conditions exactly and turns equilibrium in each ply
//! into a constant-coefficient first-order system `X' = A X` for the state
//! `X = (U, V, W, T13, T23, T33)`, where `T` are the amplitudes of the
//! transverse stresses. The state is continuous across ply interfaces, so one
//! linear system of size `6N` (bottom tractions, interface continuity, top
//! tractions) fixes the state at the bottom of every ply. Inside a ply the
//! state is propagated with the matrix exponential of `A`, which handles
//! real, complex and repeated characteristic roots uniformly.

use crate::error::{Error, Result};
use crate::laminate::{PlateCase, Stiffness6};
use nalgebra::{DMatrix, DVector, Matrix6, RowVector6, Vector6};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Stress components in Voigt order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StressComponent {
    S11,
    S22,
    S33,
    S23,
    S13,
    S12,
}

impl StressComponent {
    pub const ALL: [StressComponent; 6] = [
        StressComponent::S11,
        StressComponent::S22,
        StressComponent::S33,
        StressComponent::S23,
        StressComponent::S13,
        StressComponent::S12,
    ];

    /// The three transverse (interlaminar) components.
    pub const OUT_OF_PLANE: [StressComponent; 3] =
        [StressComponent::S13, StressComponent::S23, StressComponent::S33];

    pub fn voigt(self) -> usize {
        self as usize
    }

    pub fn is_out_of_plane(self) -> bool {
        matches!(self, StressComponent::S13 | StressComponent::S23 | StressComponent::S33)
    }

    pub fn name(self) -> &'static str {
        match self {
            StressComponent::S11 => "s11",
            StressComponent::S22 => "s22",
            StressComponent::S33 => "s33",
            StressComponent::S23 => "s23",
            StressComponent::S13 => "s13",
            StressComponent::S12 => "s12",
        }
    }
}

impl fmt::Display for StressComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StressComponent {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        StressComponent::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown stress component `{s}`"))
    }
}

/// Benchmark normalization: in-plane components by `σ0 S²`, transverse
/// shears by `σ0 S`, the normal transverse component by `σ0`.
pub fn normalize(value: f64, component: StressComponent, case: &PlateCase) -> f64 {
    let s = case.slenderness;
    let scale = match component {
        StressComponent::S11 | StressComponent::S22 | StressComponent::S12 => case.sigma0 * s * s,
        StressComponent::S13 | StressComponent::S23 => case.sigma0 * s,
        StressComponent::S33 => case.sigma0,
    };
    value / scale
}

/// Quantity that [`OracleField::evaluate`] can return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// Displacement component 0, 1 or 2.
    Displacement(usize),
    Stress(StressComponent),
}

#[derive(Debug, Clone)]
struct LayerSolution {
    z0: f64,
    c: Stiffness6,
    a: Matrix6<f64>,
    /// State at the bottom of the ply.
    x0: Vector6<f64>,
}

/// Exact solution for one plate case.
#[derive(Debug, Clone)]
pub struct OracleField {
    case: PlateCase,
    alpha: f64,
    beta: f64,
    layers: Vec<LayerSolution>,
}

/// State-space matrix of one ply.
fn system_matrix(c: &Stiffness6, alpha: f64, beta: f64) -> Matrix6<f64> {
    let m = c.matrix();
    let (c11, c12, c13) = (m[(0, 0)], m[(0, 1)], m[(0, 2)]);
    let (c22, c23, c33) = (m[(1, 1)], m[(1, 2)], m[(2, 2)]);
    let (c44, c55, c66) = (m[(3, 3)], m[(4, 4)], m[(5, 5)]);

    // W' in terms of the state
    let wp = RowVector6::new(c13 * alpha / c33, c23 * beta / c33, 0.0, 0.0, 0.0, 1.0 / c33);
    let s11 = RowVector6::new(-c11 * alpha, -c12 * beta, 0.0, 0.0, 0.0, 0.0) + wp * c13;
    let s22 = RowVector6::new(-c12 * alpha, -c22 * beta, 0.0, 0.0, 0.0, 0.0) + wp * c23;
    let s12 = RowVector6::new(c66 * beta, c66 * alpha, 0.0, 0.0, 0.0, 0.0);

    let mut a = Matrix6::zeros();
    a.set_row(0, &RowVector6::new(0.0, 0.0, -alpha, 1.0 / c55, 0.0, 0.0));
    a.set_row(1, &RowVector6::new(0.0, 0.0, -beta, 0.0, 1.0 / c44, 0.0));
    a.set_row(2, &wp);
    a.set_row(3, &(s11 * -alpha + s12 * beta));
    a.set_row(4, &(s22 * -beta + s12 * alpha));
    a.set_row(5, &RowVector6::new(0.0, 0.0, 0.0, alpha, beta, 0.0));
    a
}

/// Solves the interface system for `case`.
pub fn build_oracle(case: &PlateCase) -> Result<OracleField> {
    let layup = &case.layup;
    let n = layup.n_layers();
    let l = case.length();
    let (alpha, beta) = (PI / l, PI / l);

    let mut layers: Vec<LayerSolution> = layup
        .plies()
        .iter()
        .zip(layup.interfaces())
        .map(|(ply, &z0)| {
            let c = *ply.stiffness();
            let a = system_matrix(&c, alpha, beta);
            LayerSolution { z0, c, a, x0: Vector6::zeros() }
        })
        .collect();

    let size = 6 * n;
    let mut m = DMatrix::<f64>::zeros(size, size);
    let mut rhs = DVector::<f64>::zeros(size);
    let mut row = 0;
    // traction-free bottom
    for r in 0..3 {
        m[(row, 3 + r)] = 1.0;
        row += 1;
    }
    for k in 0..n {
        let h = layup.plies()[k].thickness;
        let e = (layers[k].a * h).exp();
        if k + 1 < n {
            for r in 0..6 {
                for c in 0..6 {
                    m[(row, 6 * k + c)] = e[(r, c)];
                }
                m[(row, 6 * (k + 1) + r)] = -1.0;
                row += 1;
            }
        } else {
            // top: T13 = T23 = 0, T33 = -σ0
            for r in 0..3 {
                for c in 0..6 {
                    m[(row, 6 * k + c)] = e[(3 + r, c)];
                }
                rhs[row] = if r == 2 { -case.sigma0 } else { 0.0 };
                row += 1;
            }
        }
    }
    debug_assert_eq!(row, size);

    // column equilibration: displacement and traction amplitudes differ by
    // many orders of magnitude for slender plates
    let mut col_scale = vec![1.0; size];
    for (c, s) in col_scale.iter_mut().enumerate() {
        let mx = m.column(c).amax();
        if mx > 0.0 {
            *s = 1.0 / mx;
        }
    }
    for (c, &s) in col_scale.iter().enumerate() {
        m.column_mut(c).scale_mut(s);
    }
    let lu = m.full_piv_lu();
    let sol = lu
        .solve(&rhs)
        .ok_or_else(|| Error::SingularOracle(format!("{n}-ply interface system")))?;
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularOracle("non-finite amplitudes".into()));
    }
    for (k, layer) in layers.iter_mut().enumerate() {
        layer.x0 = Vector6::from_fn(|r, _| sol[6 * k + r] * col_scale[6 * k + r]);
    }
    Ok(OracleField { case: case.clone(), alpha, beta, layers })
}

impl OracleField {
    pub fn case(&self) -> &PlateCase {
        &self.case
    }

    fn check_point(&self, p: [f64; 3]) -> Result<()> {
        let l = self.case.length();
        let t = self.case.thickness();
        for (v, hi) in [(p[0], l), (p[1], l), (p[2], t)] {
            if !(0.0..=hi).contains(&v) {
                return Err(Error::OutOfDomain { value: v, lo: 0.0, hi });
            }
        }
        Ok(())
    }

    /// State `(U, V, W, T13, T23, T33)` at height `z` using the solution of
    /// ply `layer` (may be evaluated slightly outside the ply).
    pub fn state(&self, z: f64, layer: usize) -> [f64; 6] {
        let ls = &self.layers[layer];
        let x = (ls.a * (z - ls.z0)).exp() * ls.x0;
        [x[0], x[1], x[2], x[3], x[4], x[5]]
    }

    fn amplitudes(&self, z: f64, layer: usize) -> ([f64; 6], [f64; 6]) {
        let x = self.state(z, layer);
        let m = self.layers[layer].c.matrix();
        let (a, b) = (self.alpha, self.beta);
        let [u, v, _, t13, t23, t33] = x;
        let wp = (t33 + m[(0, 2)] * a * u + m[(1, 2)] * b * v) / m[(2, 2)];
        let s11 = -m[(0, 0)] * a * u - m[(0, 1)] * b * v + m[(0, 2)] * wp;
        let s22 = -m[(0, 1)] * a * u - m[(1, 1)] * b * v + m[(1, 2)] * wp;
        let s12 = m[(5, 5)] * (b * u + a * v);
        (x, [s11, s22, t33, t23, t13, s12])
    }

    /// Voigt stress at `p` computed with the solution of ply `layer`.
    pub fn stress_in_layer(&self, p: [f64; 3], layer: usize) -> [f64; 6] {
        let (_, s) = self.amplitudes(p[2], layer);
        let (sx, cx) = (self.alpha * p[0]).sin_cos();
        let (sy, cy) = (self.beta * p[1]).sin_cos();
        [s[0] * sx * sy, s[1] * sx * sy, s[2] * sx * sy, s[3] * sx * cy, s[4] * cx * sy, s[5] * cx * cy]
    }

    pub fn displacement_in_layer(&self, p: [f64; 3], layer: usize) -> [f64; 3] {
        let x = self.state(p[2], layer);
        let (sx, cx) = (self.alpha * p[0]).sin_cos();
        let (sy, cy) = (self.beta * p[1]).sin_cos();
        [x[0] * cx * sy, x[1] * sx * cy, x[2] * sx * sy]
    }

    /// Voigt stress; points on an interface use the ply above.
    pub fn stress(&self, p: [f64; 3]) -> Result<[f64; 6]> {
        self.check_point(p)?;
        let k = self.case.layup.layer_index(p[2])?;
        Ok(self.stress_in_layer(p, k))
    }

    pub fn displacement(&self, p: [f64; 3]) -> Result<[f64; 3]> {
        self.check_point(p)?;
        let k = self.case.layup.layer_index(p[2])?;
        Ok(self.displacement_in_layer(p, k))
    }

    pub fn evaluate(&self, p: [f64; 3], quantity: Quantity) -> Result<f64> {
        match quantity {
            Quantity::Displacement(c) if c < 3 => Ok(self.displacement(p)?[c]),
            Quantity::Displacement(c) => Err(Error::OutOfDomain { value: c as f64, lo: 0.0, hi: 2.0 }),
            Quantity::Stress(s) => Ok(self.stress(p)?[s.voigt()]),
        }
    }

    /// Magnitude of a stress component, for sign-convention-free comparisons.
    pub fn evaluate_abs(&self, p: [f64; 3], component: StressComponent) -> Result<f64> {
        Ok(self.stress(p)?[component.voigt()].abs())
    }
}
