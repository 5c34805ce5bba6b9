//! Out-of-plane stress recovery from equilibrium.
//!
//! Given the spline displacement, in-plane stress derivatives follow from
//! second and third displacement derivatives with the ply stiffness held
//! constant. Integrating the first two equilibrium equations through the
//! thickness gives the transverse shears:
//!
//! ```text
//! σ13(z) = σ13(z0) - ∫ (σ11,1 + σ12,2 - b1) dζ
//! σ23(z) = σ23(z0) - ∫ (σ12,1 + σ22,2 - b2) dζ
//! ```
//!
//! and substituting those into the third equation gives the normal
//! transverse stress as an iterated integral of second in-plane derivatives,
//! evaluated here with the Cauchy formula for repeated integration:
//!
//! ```text
//! σ33(z) = σ33(z0) + ∫_{z0}^{z} (z - ξ) g(ξ) dξ + ∫_{z0}^{z} b3 dζ
//! g      = σ11,11 + σ22,22 + 2 σ12,12 - b1,1 - b2,2
//! ```
//!
//! The integrals run span by span (spans split at ply interfaces and at
//! z-knots), so every Gauss point sits strictly inside one ply where the
//! integrand is a polynomial.

use crate::bspline::{Partials, SpanSide};
use crate::error::{Error, Result};
use crate::iga::{DisplacementColumn, DisplacementField};
use crate::laminate::Stiffness6;
use crate::pagano::StressComponent;
use crate::quadrature::GaussRule;
use serde::{Deserialize, Serialize};

/// Stress at a point, Voigt order, with the ply used for the constitutive law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressState {
    pub sigma: [f64; 6],
    pub layer: usize,
}

/// Voigt strain derivative `∂^β ε` from displacement partials.
fn strain_derivative(p: &[Partials; 3], beta: [usize; 3]) -> [f64; 6] {
    let d = |comp: usize, dir: usize| {
        let mut a = beta;
        a[dir] += 1;
        p[comp].at(a)
    };
    [
        d(0, 0),
        d(1, 1),
        d(2, 2),
        d(1, 2) + d(2, 1),
        d(0, 2) + d(2, 0),
        d(0, 1) + d(1, 0),
    ]
}

/// Raw constitutive stress at a physical point; points on a ply interface
/// use the ply above.
pub fn stress_at(field: &DisplacementField, point: [f64; 3]) -> Result<StressState> {
    let layer = field.case().layup.layer_index(point[2])?;
    stress_in_layer(field, point, layer, SpanSide::Above)
}

/// Raw constitutive stress using ply `layer`'s stiffness and the z-span on
/// `z_side` of a knot.
pub fn stress_in_layer(
    field: &DisplacementField,
    point: [f64; 3],
    layer: usize,
    z_side: SpanSide,
) -> Result<StressState> {
    let p = field.partials(point, 1, z_side)?;
    let c = field.case().layup.stiffness(layer);
    Ok(StressState { sigma: c.apply(&strain_derivative(&p, [0, 0, 0])), layer })
}

/// Second in-plane derivatives of the in-plane stresses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondStressDerivatives {
    pub s11_11: f64,
    pub s22_22: f64,
    pub s12_12: f64,
}

/// In-plane stress derivatives that drive the equilibrium integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InplaneStressDerivatives {
    pub s11_1: f64,
    pub s12_2: f64,
    pub s12_1: f64,
    pub s22_2: f64,
    /// Present when order 2 was requested.
    pub second: Option<SecondStressDerivatives>,
}

fn derivatives_from_partials(p: &[Partials; 3], c: &Stiffness6, order: usize) -> InplaneStressDerivatives {
    let ds = |beta: [usize; 3]| c.apply(&strain_derivative(p, beta));
    let dx = ds([1, 0, 0]);
    let dy = ds([0, 1, 0]);
    let second = (order >= 2).then(|| SecondStressDerivatives {
        s11_11: ds([2, 0, 0])[0],
        s22_22: ds([0, 2, 0])[1],
        s12_12: ds([1, 1, 0])[5],
    });
    InplaneStressDerivatives { s11_1: dx[0], s12_2: dy[5], s12_1: dx[5], s22_2: dy[1], second }
}

fn check_order(field: &DisplacementField, order: usize) -> Result<()> {
    if !(1..=2).contains(&order) {
        return Err(Error::DerivativeOrder { requested: order, max: 2 });
    }
    let p = field.discretization().scheme().degree_inplane;
    // stress derivatives of order k need displacement derivatives of order k + 1
    if p < order + 1 {
        return Err(Error::DerivativeOrder { requested: order + 1, max: p });
    }
    Ok(())
}

/// Stress derivatives at a point with the ply containing it (ply above on
/// an interface).
pub fn inplane_stress_derivatives(
    field: &DisplacementField,
    point: [f64; 3],
    order: usize,
) -> Result<InplaneStressDerivatives> {
    let layer = field.case().layup.layer_index(point[2])?;
    inplane_stress_derivatives_in_layer(field, point, layer, order, SpanSide::Above)
}

pub fn inplane_stress_derivatives_in_layer(
    field: &DisplacementField,
    point: [f64; 3],
    layer: usize,
    order: usize,
    z_side: SpanSide,
) -> Result<InplaneStressDerivatives> {
    check_order(field, order)?;
    let p = field.partials(point, order + 1, z_side)?;
    Ok(derivatives_from_partials(&p, field.case().layup.stiffness(layer), order))
}

/// Right-hand side `b` of the equilibrium equations `div σ = b`, so an
/// applied volume load `f` enters as `b = -f`.
pub trait BodyForce: Sync {
    fn value(&self, x: [f64; 3]) -> [f64; 3];

    /// `b1,1 + b2,2`.
    fn inplane_divergence(&self, x: [f64; 3]) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoBodyForce;

impl BodyForce for NoBodyForce {
    fn value(&self, _: [f64; 3]) -> [f64; 3] {
        [0.0; 3]
    }

    fn inplane_divergence(&self, _: [f64; 3]) -> f64 {
        0.0
    }
}

/// Spatially uniform `b`, e.g. self-weight.
#[derive(Debug, Clone, Copy)]
pub struct UniformBodyForce(pub [f64; 3]);

impl BodyForce for UniformBodyForce {
    fn value(&self, _: [f64; 3]) -> [f64; 3] {
        self.0
    }

    fn inplane_divergence(&self, _: [f64; 3]) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecoveryMode {
    /// Integrate upward from the traction-free bottom face.
    #[default]
    FromBottom,
    /// Average the upward integration with a downward one anchored at the
    /// known top traction.
    TwoSidedAverage,
}

/// Transverse traction on the top face at the station, needed by
/// [`RecoveryMode::TwoSidedAverage`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopTraction {
    pub sigma13: f64,
    pub sigma23: f64,
    pub sigma33: f64,
    /// `σ13,1 + σ23,2` on the top face.
    pub shear_divergence: f64,
}

impl TopTraction {
    /// Pure normal pressure `p` acting downward.
    pub fn pressure(p: f64) -> Self {
        Self { sigma13: 0.0, sigma23: 0.0, sigma33: -p, shear_divergence: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredProfile {
    pub x: f64,
    pub y: f64,
    pub z: Vec<f64>,
    pub sigma13: Vec<f64>,
    pub sigma23: Vec<f64>,
    pub sigma33: Vec<f64>,
    pub mode: RecoveryMode,
}

impl RecoveredProfile {
    /// Recovered values of a transverse component; `None` for in-plane ones.
    pub fn component(&self, c: StressComponent) -> Option<&[f64]> {
        match c {
            StressComponent::S13 => Some(&self.sigma13),
            StressComponent::S23 => Some(&self.sigma23),
            StressComponent::S33 => Some(&self.sigma33),
            _ => None,
        }
    }
}

/// Running primitives of the recovery integrands from the bottom face.
#[derive(Debug, Clone, Copy, Default)]
struct Primitives {
    /// `∫ (σ11,1 + σ12,2 - b1)`
    f13: f64,
    /// `∫ (σ12,1 + σ22,2 - b2)`
    f23: f64,
    /// `∫ g`
    g: f64,
    /// `∫∫ g`
    h: f64,
    /// `∫ b3`
    b3: f64,
}

struct Integrand {
    f13: f64,
    f23: f64,
    g: f64,
    b3: f64,
}

struct Span {
    a: f64,
    b: f64,
    layer: usize,
}

struct Integrator<'a> {
    field: &'a DisplacementField,
    column: DisplacementColumn<'a>,
    body: &'a dyn BodyForce,
    x: f64,
    y: f64,
    rule: GaussRule,
}

impl Integrator<'_> {
    fn integrand(&self, z: f64, layer: usize) -> Result<Integrand> {
        let pt = [self.x, self.y, z];
        let p = self.column.partials(z, SpanSide::Above)?;
        let d = derivatives_from_partials(&p, self.field.case().layup.stiffness(layer), 2);
        let s = d.second.expect("order 2 requested");
        let b = self.body.value(pt);
        Ok(Integrand {
            f13: d.s11_1 + d.s12_2 - b[0],
            f23: d.s12_1 + d.s22_2 - b[1],
            g: s.s11_11 + s.s22_22 + 2.0 * s.s12_12 - self.body.inplane_divergence(pt),
            b3: b[2],
        })
    }

    /// Primitives at `z` given their values at the span start `a`.
    fn advance(&self, start: Primitives, a: f64, z: f64, layer: usize) -> Result<Primitives> {
        let mut out = start;
        out.h += start.g * (z - a);
        if z > a {
            for (xi, w) in self.rule.mapped(a, z) {
                let f = self.integrand(xi, layer)?;
                out.f13 += w * f.f13;
                out.f23 += w * f.f23;
                out.g += w * f.g;
                out.h += w * (z - xi) * f.g;
                out.b3 += w * f.b3;
            }
        }
        Ok(out)
    }
}

fn spans(field: &DisplacementField) -> Vec<Span> {
    let layup = &field.case().layup;
    let t = layup.thickness();
    let mut cuts: Vec<f64> = layup.interfaces().to_vec();
    cuts.extend(field.space().space(2).knot_vector().breakpoints().iter().map(|u| u * t));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * t);
    cuts.windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let layer = layup.layer_index(mid).expect("midpoint lies inside the plate");
            Span { a: w[0], b: w[1], layer }
        })
        .collect()
}

/// Recovers σ13, σ23 and σ33 at the in-plane station `(x, y)` for the sorted
/// heights `z_samples`. The bottom face is taken as traction free; the top
/// traction is only used (and required) in two-sided mode.
pub fn recover_profile(
    field: &DisplacementField,
    x: f64,
    y: f64,
    z_samples: &[f64],
    body_force: &dyn BodyForce,
    mode: RecoveryMode,
    top: Option<TopTraction>,
) -> Result<RecoveredProfile> {
    let t = field.case().thickness();
    let l = field.case().length();
    if !(0.0..=l).contains(&x) || !(0.0..=l).contains(&y) {
        return Err(Error::InvalidSampling(format!("station ({x}, {y}) outside the plate")));
    }
    if z_samples.iter().any(|&z| !(0.0..=t).contains(&z)) {
        return Err(Error::InvalidSampling(format!("z samples must lie in [0, {t}]")));
    }
    if z_samples.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidSampling("z samples must be sorted".into()));
    }
    if mode == RecoveryMode::TwoSidedAverage && top.is_none() {
        return Err(Error::Recovery("two-sided recovery needs the top-face traction".into()));
    }
    check_order(field, 2)?;

    let deg_z = field.space().space(2).degree();
    let integrator = Integrator {
        field,
        column: field.column(x, y, 3)?,
        body: body_force,
        x,
        y,
        rule: GaussRule::new((deg_z + 2).div_ceil(2)),
    };

    let spans = spans(field);
    let mut at_start = Vec::with_capacity(spans.len() + 1);
    let mut acc = Primitives::default();
    at_start.push(acc);
    for s in &spans {
        acc = integrator.advance(acc, s.a, s.b, s.layer)?;
        at_start.push(acc);
    }
    let total = acc;

    let mut prims = Vec::with_capacity(z_samples.len());
    for &z in z_samples {
        // an interface sample belongs to the span below it
        let idx = spans.iter().position(|s| z <= s.b).unwrap_or(spans.len() - 1);
        let s = &spans[idx];
        prims.push((z, integrator.advance(at_start[idx], s.a, z, s.layer)?));
    }

    let from_bottom = |p: &Primitives| (-p.f13, -p.f23, p.h + p.b3);
    let from_top = |z: f64, p: &Primitives, top: &TopTraction| {
        (
            top.sigma13 + total.f13 - p.f13,
            top.sigma23 + total.f23 - p.f23,
            top.sigma33 - top.shear_divergence * (z - t) + p.h - total.h - total.g * (z - t) + p.b3
                - total.b3,
        )
    };

    let n = z_samples.len();
    let mut out = RecoveredProfile {
        x,
        y,
        z: z_samples.to_vec(),
        sigma13: Vec::with_capacity(n),
        sigma23: Vec::with_capacity(n),
        sigma33: Vec::with_capacity(n),
        mode,
    };
    for (z, p) in &prims {
        let (s13, s23, s33) = match (mode, &top) {
            (RecoveryMode::TwoSidedAverage, Some(top)) => {
                let b = from_bottom(p);
                let tp = from_top(*z, p, top);
                (0.5 * (b.0 + tp.0), 0.5 * (b.1 + tp.1), 0.5 * (b.2 + tp.2))
            }
            _ => from_bottom(p),
        };
        out.sigma13.push(s13);
        out.sigma23.push(s23);
        out.sigma33.push(s33);
    }
    Ok(out)
}

/// `max |reference - computed| / max |reference|` over matching samples.
pub fn error_metric(computed: &[f64], reference: &[f64]) -> Result<f64> {
    if computed.len() != reference.len() {
        return Err(Error::LengthMismatch(computed.len(), reference.len()));
    }
    let scale = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::ZeroReference);
    }
    let diff = computed.iter().zip(reference).fold(0.0f64, |m, (c, r)| m.max((r - c).abs()));
    Ok(diff / scale)
}

/// Sampling plan for profile comparisons: in-plane stations and through-thickness
/// heights tagged with the ply used to evaluate them.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub stations: Vec<[f64; 2]>,
    /// `(z, layer)`, sorted by `z`; each ply contributes heights in `(z_k, z_{k+1}]`.
    pub heights: Vec<(f64, usize)>,
}

impl SampleGrid {
    /// `n_stations`² interior stations at `i / (n_stations + 1)` of the side and
    /// `per_layer` evenly spaced heights in each ply, its top included.
    pub fn new(case: &crate::laminate::PlateCase, n_stations: usize, per_layer: usize) -> Result<Self> {
        if n_stations == 0 || per_layer == 0 {
            return Err(Error::InvalidSampling("grid needs at least one station and one height".into()));
        }
        let l = case.length();
        let rel: Vec<f64> = (1..=n_stations).map(|i| i as f64 / (n_stations + 1) as f64).collect();
        let stations = rel.iter().flat_map(|&y| rel.iter().map(move |&x| [x * l, y * l])).collect();
        let zs = case.layup.interfaces();
        let heights = (0..case.layup.n_layers())
            .flat_map(|k| {
                let (a, b) = (zs[k], zs[k + 1]);
                (1..=per_layer).map(move |j| {
                    let z = if j == per_layer { b } else { a + (b - a) * j as f64 / per_layer as f64 };
                    (z, k)
                })
            })
            .collect();
        Ok(Self { stations, heights })
    }

    /// The comparison grid used throughout the benchmarks: 5 × 5 stations,
    /// 10 heights per ply.
    pub fn standard(case: &crate::laminate::PlateCase) -> Result<Self> {
        Self::new(case, 5, 10)
    }

    pub fn z_values(&self) -> Vec<f64> {
        self.heights.iter().map(|h| h.0).collect()
    }
}
