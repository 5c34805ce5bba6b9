#![allow(dead_code)]

use lamina::bspline::SpanSide;
use lamina::iga::{build_discretization, Discretization, DiscretizationScheme, DisplacementField};
use lamina::laminate::{Layup, OrthotropicMaterial, PlateCase, PlyAngle, Stiffness6};
use lamina::pagano::OracleField;
use lamina::recovery::{
    inplane_stress_derivatives_in_layer, recover_profile, stress_in_layer, BodyForce, RecoveryMode, TopTraction,
};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Polynomial in `(x, y, z)` as a list of `coefficient * x^a y^b z^c` terms.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Poly3 {
    pub terms: Vec<(f64, [u32; 3])>,
}

impl Poly3 {
    pub fn new(terms: &[(f64, [u32; 3])]) -> Self {
        Self { terms: terms.to_vec() }
    }

    pub fn eval(&self, p: [f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * p[0].powi(e[0] as i32) * p[1].powi(e[1] as i32) * p[2].powi(e[2] as i32))
            .sum()
    }

    pub fn d(&self, dir: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(_, e)| e[dir] > 0)
            .map(|(c, e)| {
                let mut e2 = *e;
                e2[dir] -= 1;
                (c * e[dir] as f64, e2)
            })
            .collect();
        Self { terms }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self { terms }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { terms: self.terms.iter().map(|(c, e)| (c * s, *e)).collect() }
    }
}

/// Voigt strain polynomials of a polynomial displacement.
pub fn strain(u: &[Poly3; 3]) -> [Poly3; 6] {
    [
        u[0].d(0),
        u[1].d(1),
        u[2].d(2),
        u[1].d(2).add(&u[2].d(1)),
        u[0].d(2).add(&u[2].d(0)),
        u[0].d(1).add(&u[1].d(0)),
    ]
}

pub fn stress(c: &Stiffness6, u: &[Poly3; 3]) -> [Poly3; 6] {
    let e = strain(u);
    std::array::from_fn(|i| {
        (0..6).fold(Poly3::default(), |acc, j| acc.add(&e[j].scale(c.matrix()[(i, j)])))
    })
}

/// `div σ` for Voigt stress polynomials.
pub fn divergence(s: &[Poly3; 6]) -> [Poly3; 3] {
    [
        s[0].d(0).add(&s[5].d(1)).add(&s[4].d(2)),
        s[5].d(0).add(&s[1].d(1)).add(&s[3].d(2)),
        s[4].d(0).add(&s[3].d(1)).add(&s[2].d(2)),
    ]
}

/// Body force given as the polynomial right-hand side of `div σ = b`.
pub struct PolyBodyForce(pub [Poly3; 3]);

impl BodyForce for PolyBodyForce {
    fn value(&self, x: [f64; 3]) -> [f64; 3] {
        [self.0[0].eval(x), self.0[1].eval(x), self.0[2].eval(x)]
    }

    fn inplane_divergence(&self, x: [f64; 3]) -> f64 {
        self.0[0].d(0).eval(x) + self.0[1].d(1).eval(x)
    }
}

/// Interleaved spline coefficients interpolating a vector field.
pub fn interpolate_vector(disc: &Discretization, f: impl Fn([f64; 3]) -> [f64; 3]) -> Vec<f64> {
    let g = disc.geometry();
    let comps: Vec<Vec<f64>> = (0..3)
        .map(|c| disc.space().interpolate(|u| f(g.to_physical(u))[c]))
        .collect();
    let mut out = vec![0.0; 3 * disc.space().dim()];
    for i in 0..disc.space().dim() {
        for c in 0..3 {
            out[3 * i + c] = comps[c][i];
        }
    }
    out
}

pub fn homogeneous_case(n_layers: usize, angle: PlyAngle, slenderness: f64) -> PlateCase {
    let layup = Layup::from_angles(OrthotropicMaterial::benchmark(), &vec![angle; n_layers], 1.0).unwrap();
    PlateCase::new(layup, slenderness, 1.0).unwrap()
}

pub fn disc(case: &PlateCase, scheme: DiscretizationScheme) -> Discretization {
    build_discretization(case, &scheme).unwrap()
}

/// Fourth-order central difference.
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// Self-consistency measures of an exact solution, each relative to the
/// largest stress magnitude found on the probe points.
#[derive(Debug, Clone, Copy)]
pub struct OracleChecks {
    pub equilibrium: f64,
    pub continuity: f64,
    pub tractions: f64,
}

/// Probes equilibrium by finite differences (step 1e-5) inside every ply, continuity of
/// displacement and transverse tractions at every interface, and the face
/// tractions, at a fixed set of in-plane stations.
pub fn oracle_checks(oracle: &OracleField) -> OracleChecks {
    let case = oracle.case();
    let l = case.length();
    let zs = case.layup.interfaces().to_vec();
    let stations = [[0.25, 0.25], [0.1, 0.7], [0.6, 0.35], [0.83, 0.91]];

    let mut scale: f64 = 0.0;
    for st in stations {
        for k in 0..case.layup.n_layers() {
            for f in [0.0, 0.5, 1.0] {
                let z = zs[k] + f * (zs[k + 1] - zs[k]);
                let s = oracle.stress_in_layer([st[0] * l, st[1] * l, z], k);
                scale = s.iter().fold(scale, |m, v| m.max(v.abs()));
            }
        }
    }

    let mut equilibrium: f64 = 0.0;
    for st in stations {
        let (x, y) = (st[0] * l, st[1] * l);
        for k in 0..case.layup.n_layers() {
            let (hx, hz) = (1e-5, 1e-5);
            for f in [0.2, 0.5, 0.8] {
                let z = zs[k] + f * (zs[k + 1] - zs[k]);
                let s = |p: [f64; 3], i: usize| oracle.stress_in_layer(p, k)[i];
                let dx = |i| central_diff(|v| s([v, y, z], i), x, hx);
                let dy = |i| central_diff(|v| s([x, v, z], i), y, hx);
                let dz = |i| central_diff(|v| s([x, y, v], i), z, hz);
                let div = [dx(0) + dy(5) + dz(4), dx(5) + dy(1) + dz(3), dx(4) + dy(3) + dz(2)];
                equilibrium = div.iter().fold(equilibrium, |m, v| m.max(v.abs()));
            }
        }
    }

    let mut continuity: f64 = 0.0;
    let mut dscale: f64 = 0.0;
    let mut djump: f64 = 0.0;
    for st in stations {
        let (x, y) = (st[0] * l, st[1] * l);
        for k in 1..case.layup.n_layers() {
            let p = [x, y, zs[k]];
            let below = oracle.stress_in_layer(p, k - 1);
            let above = oracle.stress_in_layer(p, k);
            for i in 2..5 {
                continuity = continuity.max((below[i] - above[i]).abs());
            }
            let ub = oracle.displacement_in_layer(p, k - 1);
            let ua = oracle.displacement_in_layer(p, k);
            for i in 0..3 {
                djump = djump.max((ub[i] - ua[i]).abs());
                dscale = dscale.max(ub[i].abs());
            }
        }
    }

    let mut tractions: f64 = 0.0;
    let n = case.layup.n_layers();
    let t = case.thickness();
    for st in stations {
        let (x, y) = (st[0] * l, st[1] * l);
        let bottom = oracle.stress_in_layer([x, y, 0.0], 0);
        let top = oracle.stress_in_layer([x, y, t], n - 1);
        let p = case.pressure(x, y);
        for v in [bottom[2], bottom[3], bottom[4], top[3], top[4], top[2] + p] {
            tractions = tractions.max(v.abs());
        }
    }

    OracleChecks {
        equilibrium: equilibrium / scale,
        continuity: (continuity / scale).max(if dscale > 0.0 { djump / dscale } else { 0.0 }),
        tractions: tractions / scale,
    }
}

/// Stress at a point with one-sided z evaluation, for tests that probe
/// interfaces.
pub fn side(below: bool) -> SpanSide {
    if below {
        SpanSide::Below
    } else {
        SpanSide::Above
    }
}

/// Full `3 dim x 3 dim` stiffness by a plain element loop: every in-plane
/// element times every intersection of a z-knot span with a ply, tensor
/// Gauss rules exact for the polynomial integrand, fourth-order stiffness
/// tensor contracted directly.
pub fn dense_stiffness(disc: &Discretization) -> Vec<Vec<f64>> {
    use lamina::quadrature::GaussRule;
    let space = disc.space();
    let g = disc.geometry();
    let case = disc.case();
    let t = case.thickness();
    let n = 3 * space.dim();
    let mut k = vec![vec![0.0; n]; n];
    let px = space.space(0).degree();
    let pz = space.space(2).degree();
    let rx = GaussRule::new(px + 1);
    let rz = GaussRule::new(pz + 1);
    let zs = case.layup.interfaces();
    let mut zspans = Vec::new();
    for (a, b) in space.space(2).knot_vector().elements() {
        for layer in 0..case.layup.n_layers() {
            let lo = a.max(zs[layer] / t);
            let hi = b.min(zs[layer + 1] / t);
            if hi - lo > 1e-14 {
                zspans.push((lo, hi, layer));
            }
        }
    }
    let ex = space.space(0).knot_vector().elements();
    let ey = space.space(1).knot_vector().elements();
    for &(xa, xb) in &ex {
        for &(ya, yb) in &ey {
            for &(za, zb, layer) in &zspans {
                let c = case.layup.stiffness(layer);
                for (u, wu) in rx.mapped(xa, xb) {
                    for (v, wv) in rx.mapped(ya, yb) {
                        for (w, ww) in rz.mapped(za, zb) {
                            let weight = wu * wv * ww * g.jacobian_det();
                            let tx = space.space(0).eval_basis(u, 1).unwrap();
                            let ty = space.space(1).eval_basis(v, 1).unwrap();
                            let tz = space.space(2).eval_basis(w, 1).unwrap();
                            let mut funcs = Vec::new();
                            for lk in 0..tz.n_active() {
                                for lj in 0..ty.n_active() {
                                    for li in 0..tx.n_active() {
                                        let idx = space.index(tx.first + li, ty.first + lj, tz.first + lk);
                                        let grad = [
                                            tx.get(1, li) * ty.get(0, lj) * tz.get(0, lk) / g.lengths[0],
                                            tx.get(0, li) * ty.get(1, lj) * tz.get(0, lk) / g.lengths[1],
                                            tx.get(0, li) * ty.get(0, lj) * tz.get(1, lk) / g.lengths[2],
                                        ];
                                        funcs.push((idx, grad));
                                    }
                                }
                            }
                            for &(ia, ga) in &funcs {
                                for &(ib, gb) in &funcs {
                                    for a in 0..3 {
                                        for b in 0..3 {
                                            let mut s = 0.0;
                                            for j in 0..3 {
                                                for l in 0..3 {
                                                    s += c.tensor(a, j, b, l) * ga[j] * gb[l];
                                                }
                                            }
                                            k[3 * ia + a][3 * ib + b] += weight * s;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    k
}

/// Random polynomial of total degree <= `deg` in `(x / l, y / l)`.
pub fn random_inplane(r: &mut StdRng, deg: u32, l: f64) -> Vec<(f64, [u32; 2])> {
    let mut out = Vec::new();
    for a in 0..=deg {
        for b in 0..=deg - a {
            out.push((r.random_range(-1.0..1.0) / l.powi((a + b) as i32), [a, b]));
        }
    }
    out
}

/// `z^2 (a + b z / t) P(x, y)`: vanishes with its z-slope on the bottom face.
pub fn manufactured_component(r: &mut StdRng, l: f64, t: f64) -> Poly3 {
    let (a, b) = (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
    let p = random_inplane(r, 4, l);
    let mut terms = Vec::new();
    for (c, [ex, ey]) in p {
        terms.push((c * a / (t * t), [ex, ey, 2]));
        terms.push((c * b / (t * t * t), [ex, ey, 3]));
    }
    Poly3::new(&terms)
}

pub fn manufactured_field(case: &PlateCase, scheme: DiscretizationScheme, u: &[Poly3; 3]) -> DisplacementField {
    let d = disc(case, scheme);
    let coeffs = interpolate_vector(&d, |x| [u[0].eval(x), u[1].eval(x), u[2].eval(x)]);
    d.field(coeffs).unwrap()
}

/// Largest relative deviation of recovered transverse stresses from the
/// analytic ones, for a random displacement the space reproduces exactly on
/// a homogeneous three-ply stack, in both recovery modes.
pub fn manufactured_recovery_error(angle: PlyAngle, scheme: DiscretizationScheme, seed: u64) -> f64 {
    let mut worst: f64 = 0.0;
    let case = homogeneous_case(3, angle, 4.0);
    let (l, t) = (case.length(), case.thickness());
    let mut r = rng(seed);
    let u: [Poly3; 3] = std::array::from_fn(|_| manufactured_component(&mut r, l, t));
    let s = stress(case.layup.stiffness(0), &u);
    let b = PolyBodyForce(divergence(&s));
    let field = manufactured_field(&case, scheme, &u);
    let zs: Vec<f64> = (0..=30).map(|j| t * j as f64 / 30.0).collect();

    for station in [[0.25, 0.25], [0.6, 0.15], [0.9, 0.7]] {
        let (x, y) = (station[0] * l, station[1] * l);
        let exact: [Vec<f64>; 3] = [4, 3, 2].map(|v| zs.iter().map(|&z| s[v].eval([x, y, z])).collect());
        let scale = exact.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        let top_pt = [x, y, t];
        let top = TopTraction {
            sigma13: s[4].eval(top_pt),
            sigma23: s[3].eval(top_pt),
            sigma33: s[2].eval(top_pt),
            shear_divergence: s[4].d(0).eval(top_pt) + s[3].d(1).eval(top_pt),
        };
        for mode in [RecoveryMode::FromBottom, RecoveryMode::TwoSidedAverage] {
            let rec = recover_profile(&field, x, y, &zs, &b, mode, Some(top)).unwrap();
            for (got, want) in [&rec.sigma13, &rec.sigma23, &rec.sigma33].into_iter().zip(&exact) {
                for (g, w) in got.iter().zip(want) {
                    worst = worst.max((g - w).abs() / scale);
                }
            }
        }
    }
    worst
}

pub fn random_field(seed: u64) -> DisplacementField {
    let case = PlateCase::benchmark(3, 4.0).unwrap();
    let d = disc(&case, DiscretizationScheme::single_element(4, 3, 3, 2));
    let mut r = rng(seed);
    let coeffs = (0..d.total_dofs()).map(|_| r.random_range(-1.0..1.0)).collect();
    d.field(coeffs).unwrap()
}

/// Largest relative mismatch between the stress-derivative kernels and
/// fourth-order finite differences (step 1e-4) of the next lower order, over
/// `n_points` random points of a random-coefficient field.
pub fn kernel_fd_error(seed: u64, n_points: usize) -> f64 {
    let field = random_field(seed);
    let mut worst: f64 = 0.0;
    let case = field.case().clone();
    let (l, t) = (case.length(), case.thickness());
    let knots: Vec<f64> = field.space().space(0).knot_vector().breakpoints().iter().map(|u| u * l).collect();
    let h = 1e-4;
    let mut r = rng(seed + 1);
    let mut checked = 0;
    while checked < n_points {
        let p = [r.random_range(0.0..l), r.random_range(0.0..l), r.random_range(0.0..t)];
        if knots.iter().any(|k| (k - p[0]).abs() < 3.0 * h || (k - p[1]).abs() < 3.0 * h) {
            continue;
        }
        checked += 1;
        let layer = case.layup.layer_index(p[2]).unwrap();
        let side = SpanSide::Above;
        let d = inplane_stress_derivatives_in_layer(&field, p, layer, 2, side).unwrap();
        let s = |q: [f64; 3], i: usize| stress_in_layer(&field, q, layer, side).unwrap().sigma[i];
        let dx = |i: usize| central_diff(|v| s([v, p[1], p[2]], i), p[0], h);
        let dy = |i: usize| central_diff(|v| s([p[0], v, p[2]], i), p[1], h);
        let first = [(d.s11_1, dx(0)), (d.s12_2, dy(5)), (d.s12_1, dx(5)), (d.s22_2, dy(1))];
        let scale1 = first.iter().fold(0.0f64, |m, (a, _)| m.max(a.abs()));
        for (k, fd) in first {
            worst = worst.max((k - fd).abs() / scale1);
        }
        let d1 = |q: [f64; 3]| inplane_stress_derivatives_in_layer(&field, q, layer, 1, side).unwrap();
        let second = d.second.unwrap();
        let pairs = [
            (second.s11_11, central_diff(|v| d1([v, p[1], p[2]]).s11_1, p[0], h)),
            (second.s22_22, central_diff(|v| d1([p[0], v, p[2]]).s22_2, p[1], h)),
            (second.s12_12, central_diff(|v| d1([v, p[1], p[2]]).s12_2, p[0], h)),
        ];
        let scale2 = pairs.iter().fold(0.0f64, |m, (a, _)| m.max(a.abs()));
        for (k, fd) in pairs {
            worst = worst.max((k - fd).abs() / scale2);
        }
    }
    worst
}
