//! Isogeometric Galerkin discretization of the simply supported plate.
//!
//! The plate is an axis-aligned box and every ply has a constant stiffness,
//! so each entry of the stiffness matrix
//!
//! ```text
//! K[(a,I),(b,J)] = Σ_{l,n} ∫ C_{albn}(z) ∂_l N_I ∂_n N_J dV
//! ```
//!
//! factorizes into products of univariate integrals in x, y and z. The z
//! factor carries the ply stiffness and is integrated with the layer-aware
//! Gauss plan; the in-plane factors use `p + 1` points per element. This is
//! the same quadrature as an element loop, only reordered.

use crate::bspline::{BoxGeometry, ColumnContraction, KnotVector, Partials, SpanSide, SplineSpace1D, TensorSpace3D};
use crate::error::{Error, Result};
use crate::laminate::PlateCase;
use crate::quadrature::GaussRule;
use faer::linalg::solvers::SolveCore;
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Conj, Mat, Par, Side};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative residual every accepted solution must reach.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// One C⁰-joined z-element per ply.
    Layerwise,
    /// One z-element for the whole stack, integrated ply by ply.
    SingleElement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationScheme {
    pub variant: Variant,
    pub degree_inplane: usize,
    pub elements_inplane: usize,
    pub degree_z: usize,
    /// Gauss points per ply through the thickness (single-element only;
    /// the layerwise variant always uses `degree_z + 1`).
    pub quad_per_layer: usize,
}

impl DiscretizationScheme {
    pub fn layerwise(degree_inplane: usize, elements_inplane: usize, degree_z: usize) -> Self {
        Self {
            variant: Variant::Layerwise,
            degree_inplane,
            elements_inplane,
            degree_z,
            quad_per_layer: degree_z + 1,
        }
    }

    pub fn single_element(
        degree_inplane: usize,
        elements_inplane: usize,
        degree_z: usize,
        quad_per_layer: usize,
    ) -> Self {
        Self {
            variant: Variant::SingleElement,
            degree_inplane,
            elements_inplane,
            degree_z,
            quad_per_layer,
        }
    }

    /// Gauss points used in each ply.
    pub fn z_points_per_layer(&self) -> usize {
        match self.variant {
            Variant::Layerwise => self.degree_z + 1,
            Variant::SingleElement => self.quad_per_layer,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree_inplane < 1 || self.degree_z < 1 {
            return Err(Error::InvalidScheme("degrees must be at least 1".into()));
        }
        if self.degree_inplane > 12 || self.degree_z > 12 {
            return Err(Error::InvalidScheme("degrees above 12 are not supported".into()));
        }
        if self.elements_inplane < 1 {
            return Err(Error::InvalidScheme("need at least one in-plane element".into()));
        }
        if self.variant == Variant::SingleElement && self.quad_per_layer < 1 {
            return Err(Error::InvalidScheme("quad_per_layer must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for DiscretizationScheme {
    /// 9x9 quartic in-plane, one cubic element through the thickness, four
    /// Gauss points per ply.
    fn default() -> Self {
        Self::single_element(4, 9, 3, 4)
    }
}

/// Through-thickness quadrature point, in parametric z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZQuadPoint {
    pub z: f64,
    pub weight: f64,
    pub layer: usize,
}

/// Everything needed to assemble: spaces, geometry, quadrature and
/// constraints.
#[derive(Debug, Clone)]
pub struct Discretization {
    case: PlateCase,
    scheme: DiscretizationScheme,
    space: TensorSpace3D,
    geometry: BoxGeometry,
    z_quadrature: Vec<ZQuadPoint>,
    /// `fixed[3 I + c]` is true when component `c` of basis `I` is held at 0.
    fixed: Vec<bool>,
}

/// Builds the tensor space, quadrature plan and support constraints.
pub fn build_discretization(case: &PlateCase, scheme: &DiscretizationScheme) -> Result<Discretization> {
    scheme.validate()?;
    let layup = &case.layup;
    let t = layup.thickness();
    let l = case.length();
    let inplane = KnotVector::uniform(scheme.degree_inplane, scheme.elements_inplane, 1)?;
    let ply_breaks: Vec<f64> = layup.interfaces()[1..layup.n_layers()].iter().map(|z| z / t).collect();
    let zkv = match scheme.variant {
        Variant::Layerwise => KnotVector::from_breakpoints(scheme.degree_z, &ply_breaks, scheme.degree_z)?,
        Variant::SingleElement => KnotVector::from_breakpoints(scheme.degree_z, &[], 1)?,
    };
    let space = TensorSpace3D::new(
        SplineSpace1D::new(inplane.clone()),
        SplineSpace1D::new(inplane),
        SplineSpace1D::new(zkv),
    );

    let rule = GaussRule::new(scheme.z_points_per_layer());
    let mut z_quadrature = Vec::with_capacity(rule.len() * layup.n_layers());
    for (k, w) in layup.interfaces().windows(2).enumerate() {
        let (a, b) = (w[0] / t, w[1] / t);
        z_quadrature.extend(rule.mapped(a, b).map(|(z, weight)| ZQuadPoint { z, weight, layer: k }));
    }

    let [nx, ny, nz] = space.shape();
    let mut fixed = vec![false; 3 * space.dim()];
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let base = 3 * space.index(i, j, k);
                if i == 0 || i == nx - 1 {
                    fixed[base + 1] = true;
                    fixed[base + 2] = true;
                }
                if j == 0 || j == ny - 1 {
                    fixed[base] = true;
                    fixed[base + 2] = true;
                }
            }
        }
    }

    Ok(Discretization {
        case: case.clone(),
        scheme: *scheme,
        space,
        geometry: BoxGeometry::new(l, l, t),
        z_quadrature,
        fixed,
    })
}

impl Discretization {
    pub fn case(&self) -> &PlateCase {
        &self.case
    }

    pub fn scheme(&self) -> &DiscretizationScheme {
        &self.scheme
    }

    pub fn space(&self) -> &TensorSpace3D {
        &self.space
    }

    pub fn geometry(&self) -> &BoxGeometry {
        &self.geometry
    }

    pub fn z_quadrature(&self) -> &[ZQuadPoint] {
        &self.z_quadrature
    }

    /// Size of the scalar spline space (the DOF count quoted per field
    /// component).
    pub fn scalar_dofs(&self) -> usize {
        self.space.dim()
    }

    pub fn total_dofs(&self) -> usize {
        3 * self.space.dim()
    }

    pub fn fixed(&self) -> &[bool] {
        &self.fixed
    }

    pub fn free_dofs(&self) -> usize {
        self.fixed.iter().filter(|f| !**f).count()
    }

    /// Wraps a full coefficient vector (constrained entries included).
    pub fn field(&self, coefficients: Vec<f64>) -> Result<DisplacementField> {
        if coefficients.len() != self.total_dofs() {
            return Err(Error::CoefficientLength { got: coefficients.len(), expected: self.total_dofs() });
        }
        Ok(DisplacementField { disc: self.clone(), coefficients })
    }

    /// Solves `system` and expands the result into a displacement field.
    pub fn solve(&self, system: &SparseSystem) -> Result<DisplacementField> {
        let (free, _) = solve(system)?;
        self.field_from_free(system, &free)
    }

    /// Scatters a free-DOF solution of `system` into a displacement field.
    pub fn field_from_free(&self, system: &SparseSystem, free: &[f64]) -> Result<DisplacementField> {
        if free.len() != system.n {
            return Err(Error::CoefficientLength { got: free.len(), expected: system.n });
        }
        let mut coefficients = vec![0.0; self.total_dofs()];
        for (f, &g) in system.free_to_global.iter().enumerate() {
            coefficients[g] = free[f];
        }
        self.field(coefficients)
    }
}

/// Dense univariate Gram matrices `∫ N_i^(r) N_j^(s)` in physical units.
struct Gram1D {
    n: usize,
    /// `[r][s]`, each `n x n` row-major.
    mats: [[Vec<f64>; 2]; 2],
}

fn inplane_gram(space: &SplineSpace1D, length: f64) -> Gram1D {
    let n = space.n_basis();
    let p = space.degree();
    let rule = GaussRule::new(p + 1);
    let mut mats: [[Vec<f64>; 2]; 2] = Default::default();
    for row in mats.iter_mut() {
        for m in row.iter_mut() {
            *m = vec![0.0; n * n];
        }
    }
    for (a, b) in space.knot_vector().elements() {
        for (u, w) in rule.mapped(a, b) {
            let t = space.eval_basis(u, 1).expect("quadrature point inside [0, 1]");
            let scale = [1.0, 1.0 / length];
            for (r, row) in mats.iter_mut().enumerate() {
                for (s, m) in row.iter_mut().enumerate() {
                    for li in 0..=p {
                        let vi = t.get(r, li) * scale[r];
                        for lj in 0..=p {
                            m[(t.first + li) * n + t.first + lj] += w * length * vi * t.get(s, lj) * scale[s];
                        }
                    }
                }
            }
        }
    }
    Gram1D { n, mats }
}

/// Sorted neighbour lists: `j` is in `nbrs[i]` when supports of `N_i` and
/// `N_j` share an element.
fn support_neighbours(space: &SplineSpace1D) -> Vec<Vec<usize>> {
    let n = space.n_basis();
    let p = space.degree();
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, b) in space.knot_vector().elements() {
        let first = space.knot_vector().find_span(0.5 * (a + b), SpanSide::Above) - p;
        for i in first..=first + p {
            nbrs[i].extend(first..=first + p);
        }
    }
    for v in &mut nbrs {
        v.sort_unstable();
        v.dedup();
    }
    nbrs
}

/// Assembled system on the free DOFs: lower triangle of `K` in CSC form and
/// the load vector.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    n: usize,
    col_ptr: Vec<u32>,
    row_idx: Vec<u32>,
    values: Vec<f64>,
    load: Vec<f64>,
    free_to_global: Vec<usize>,
}

impl SparseSystem {
    /// Number of free DOFs.
    pub fn size(&self) -> usize {
        self.n
    }

    /// Stored entries of the lower triangle.
    pub fn nnz_lower(&self) -> usize {
        self.values.len()
    }

    pub fn load(&self) -> &[f64] {
        &self.load
    }

    pub fn set_load(&mut self, load: Vec<f64>) -> Result<()> {
        if load.len() != self.n {
            return Err(Error::CoefficientLength { got: load.len(), expected: self.n });
        }
        self.load = load;
        Ok(())
    }

    /// Global coefficient index of each free DOF.
    pub fn free_to_global(&self) -> &[usize] {
        &self.free_to_global
    }

    /// Visits every stored lower-triangle entry as `(row, col, value)`.
    pub fn for_each_lower(&self, mut f: impl FnMut(usize, usize, f64)) {
        for c in 0..self.n {
            for e in self.col_ptr[c] as usize..self.col_ptr[c + 1] as usize {
                f(self.row_idx[e] as usize, c, self.values[e]);
            }
        }
    }

    /// `K x` using the symmetric lower storage.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for c in 0..self.n {
            let xc = x[c];
            let mut acc = 0.0;
            for e in self.col_ptr[c] as usize..self.col_ptr[c + 1] as usize {
                let r = self.row_idx[e] as usize;
                let v = self.values[e];
                y[r] += v * xc;
                if r != c {
                    acc += v * x[r];
                }
            }
            y[c] += acc;
        }
        y
    }

    /// Full dense copy; meant for small systems in tests.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        self.for_each_lower(|r, c, v| {
            d[r][c] = v;
            d[c][r] = v;
        });
        d
    }
}

/// Assembles stiffness and load with fixed DOFs eliminated.
pub fn assemble(disc: &Discretization) -> SparseSystem {
    let space = &disc.space;
    let [nx, ny, nz] = space.shape();
    let [lx, ly, t] = disc.geometry.lengths;
    let gx = inplane_gram(space.space(0), lx);
    let gy = inplane_gram(space.space(1), ly);
    let (zmats, terms) = thickness_grams(disc, t);

    let nbx = support_neighbours(space.space(0));
    let nby = support_neighbours(space.space(1));
    let nbz = support_neighbours(space.space(2));

    let total = disc.total_dofs();
    let mut global_to_free = vec![u32::MAX; total];
    let mut free_to_global = Vec::with_capacity(total);
    for g in 0..total {
        if !disc.fixed[g] {
            global_to_free[g] = free_to_global.len() as u32;
            free_to_global.push(g);
        }
    }
    let n = free_to_global.len();

    let mut col_ptr = Vec::with_capacity(n + 1);
    let mut row_idx = Vec::new();
    let mut values = Vec::new();
    col_ptr.push(0u32);
    for &gcol in &free_to_global {
        let b = gcol % 3;
        let jdx = gcol / 3;
        let (ic, jc, kc) = (jdx % nx, (jdx / nx) % ny, jdx / (nx * ny));
        for &k in &nbz[kc] {
            for &j in &nby[jc] {
                for &i in &nbx[ic] {
                    let base = 3 * (i + nx * (j + ny * k));
                    for a in 0..3 {
                        let grow = base + a;
                        if grow < gcol || disc.fixed[grow] {
                            continue;
                        }
                        let mut v = 0.0;
                        for term in &terms[a][b] {
                            v += gx.mats[term.dx.0][term.dx.1][i * gx.n + ic]
                                * gy.mats[term.dy.0][term.dy.1][j * gy.n + jc]
                                * zmats[term.z][k * nz + kc];
                        }
                        if v != 0.0 || grow == gcol {
                            row_idx.push(global_to_free[grow]);
                            values.push(v);
                        }
                    }
                }
            }
        }
        col_ptr.push(row_idx.len() as u32);
    }

    let full_load = load_vector(disc);
    let load = free_to_global.iter().map(|&g| full_load[g]).collect();
    SparseSystem { n, col_ptr, row_idx, values, load, free_to_global }
}

/// One `(l, n)` contribution to the `(a, b)` block.
struct KronTerm {
    dx: (usize, usize),
    dy: (usize, usize),
    z: usize,
}

/// Ply-weighted z Gram matrices and, per `(a, b)` block, the terms that use
/// them.
fn thickness_grams(disc: &Discretization, t: f64) -> (Vec<Vec<f64>>, [[Vec<KronTerm>; 3]; 3]) {
    let zs = disc.space.space(2);
    let nz = zs.n_basis();
    let pz = zs.degree();
    let layup = &disc.case.layup;
    let tables: Vec<_> = disc
        .z_quadrature
        .iter()
        .map(|q| zs.eval_basis(q.z, 1).expect("quadrature point inside [0, 1]"))
        .collect();
    let mut zmats = Vec::new();
    let mut terms: [[Vec<KronTerm>; 3]; 3] = Default::default();
    let scale = [1.0, 1.0 / t];
    for a in 0..3 {
        for b in 0..3 {
            for l in 0..3 {
                for m in 0..3 {
                    if layup.plies().iter().all(|p| p.stiffness().tensor(a, l, b, m) == 0.0) {
                        continue;
                    }
                    let (rz, sz) = ((l == 2) as usize, (m == 2) as usize);
                    let mut mat = vec![0.0; nz * nz];
                    for (q, tab) in disc.z_quadrature.iter().zip(&tables) {
                        let c = layup.stiffness(q.layer).tensor(a, l, b, m);
                        if c == 0.0 {
                            continue;
                        }
                        let w = q.weight * t * c;
                        for li in 0..=pz {
                            let vi = w * tab.get(rz, li) * scale[rz];
                            for lj in 0..=pz {
                                mat[(tab.first + li) * nz + tab.first + lj] += vi * tab.get(sz, lj) * scale[sz];
                            }
                        }
                    }
                    terms[a][b].push(KronTerm {
                        dx: ((l == 0) as usize, (m == 0) as usize),
                        dy: ((l == 1) as usize, (m == 1) as usize),
                        z: zmats.len(),
                    });
                    zmats.push(mat);
                }
            }
        }
    }
    (zmats, terms)
}

/// Consistent nodal forces of the downward top traction `(0, 0, -p)`, over
/// all `3 * dim` coefficients.
pub fn load_vector(disc: &Discretization) -> Vec<f64> {
    let space = &disc.space;
    let [nx, ny, nz] = space.shape();
    let l = disc.geometry.lengths[0];
    let sigma0 = disc.case.sigma0;
    let mut f = vec![0.0; disc.total_dofs()];
    if sigma0 == 0.0 {
        return f;
    }
    let fx = sine_moments(space.space(0), disc.geometry.lengths[0], l);
    let fy = sine_moments(space.space(1), disc.geometry.lengths[1], l);
    let top = space.space(2).eval_basis(1.0, 0).expect("top face is in the domain");
    for lk in 0..top.n_active() {
        let nk = top.get(0, lk);
        if nk == 0.0 {
            continue;
        }
        let k = top.first + lk;
        debug_assert!(k < nz);
        for j in 0..ny {
            for i in 0..nx {
                f[3 * space.index(i, j, k) + 2] = -sigma0 * fx[i] * fy[j] * nk;
            }
        }
    }
    f
}

/// `∫_0^len sin(π x / period) N_i(x / len) dx` with `p + 1` Gauss points per
/// element.
fn sine_moments(space: &SplineSpace1D, len: f64, period: f64) -> Vec<f64> {
    let rule = GaussRule::new(space.degree() + 1);
    let mut out = vec![0.0; space.n_basis()];
    for (a, b) in space.knot_vector().elements() {
        for (u, w) in rule.mapped(a, b) {
            let t = space.eval_basis(u, 0).expect("quadrature point inside [0, 1]");
            let s = (PI * u * len / period).sin();
            for (li, v) in t.row(0).iter().enumerate() {
                out[t.first + li] += w * len * s * v;
            }
        }
    }
    out
}

/// Sparse Cholesky solve with one step of iterative refinement. Returns the
/// free-DOF solution and its relative residual.
pub fn solve(system: &SparseSystem) -> Result<(Vec<f64>, f64)> {
    let n = system.n;
    let fnorm = norm(&system.load);
    if fnorm == 0.0 {
        return Ok((vec![0.0; n], 0.0));
    }
    faer::set_global_parallelism(Par::Seq);
    let sym = SymbolicSparseColMatRef::new_checked(n, n, &system.col_ptr, None, &system.row_idx);
    let mat = SparseColMatRef::new(sym, &system.values);
    let llt = mat
        .sp_cholesky(Side::Lower)
        .map_err(|e| Error::Factorization(format!("{e:?}")))?;

    let mut rhs = Mat::<f64>::from_fn(n, 1, |i, _| system.load[i]);
    llt.solve_in_place_with_conj(Conj::No, rhs.as_mut());
    let mut x: Vec<f64> = (0..n).map(|i| rhs[(i, 0)]).collect();

    let mut residual = relative_residual(system, &x, fnorm);
    for _ in 0..3 {
        if residual <= RESIDUAL_TOLERANCE * 0.1 {
            break;
        }
        let kx = system.mul_vec(&x);
        let mut r = Mat::<f64>::from_fn(n, 1, |i, _| system.load[i] - kx[i]);
        llt.solve_in_place_with_conj(Conj::No, r.as_mut());
        let candidate: Vec<f64> = x.iter().enumerate().map(|(i, v)| v + r[(i, 0)]).collect();
        let res = relative_residual(system, &candidate, fnorm);
        if res < residual {
            x = candidate;
            residual = res;
        } else {
            break;
        }
    }
    if !residual.is_finite() || residual > RESIDUAL_TOLERANCE {
        return Err(Error::Residual { residual, tolerance: RESIDUAL_TOLERANCE });
    }
    Ok((x, residual))
}

fn relative_residual(system: &SparseSystem, x: &[f64], fnorm: f64) -> f64 {
    let kx = system.mul_vec(x);
    let r: Vec<f64> = kx.iter().zip(&system.load).map(|(a, b)| a - b).collect();
    norm(&r) / fnorm
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Vector-valued spline displacement on the plate.
#[derive(Debug, Clone)]
pub struct DisplacementField {
    disc: Discretization,
    coefficients: Vec<f64>,
}

impl DisplacementField {
    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    pub fn case(&self) -> &PlateCase {
        &self.disc.case
    }

    pub fn space(&self) -> &TensorSpace3D {
        &self.disc.space
    }

    pub fn geometry(&self) -> &BoxGeometry {
        &self.disc.geometry
    }

    /// Interleaved coefficients, `3 I + c`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Physical partials of the three displacement components at a physical
    /// point. `z_side` picks the z-span at a z-knot.
    pub fn partials(&self, x: [f64; 3], max_deriv: usize, z_side: SpanSide) -> Result<[Partials; 3]> {
        let u = self.disc.geometry.to_parametric(x);
        for (d, &ud) in u.iter().enumerate() {
            if !(0.0..=1.0).contains(&ud) {
                return Err(Error::OutOfDomain { value: x[d], lo: 0.0, hi: self.disc.geometry.lengths[d] });
            }
        }
        let tables =
            self.disc.space.basis_tables_clamped(u, max_deriv, [SpanSide::Above, SpanSide::Above, z_side])?;
        let p = self.disc.space.contract(&tables, &self.disc.geometry, &self.coefficients, 3, max_deriv);
        Ok([p[0], p[1], p[2]])
    }

    /// Displacement restricted to the vertical line through `(x, y)`, for
    /// repeated evaluation along z.
    pub fn column(&self, x: f64, y: f64, max_deriv: usize) -> Result<DisplacementColumn<'_>> {
        let g = &self.disc.geometry;
        let u = g.to_parametric([x, y, 0.0]);
        for (d, &ud) in u[..2].iter().enumerate() {
            if !(0.0..=1.0).contains(&ud) {
                return Err(Error::OutOfDomain { value: [x, y][d], lo: 0.0, hi: g.lengths[d] });
            }
        }
        let contraction = self.disc.space.contract_column(u[0], u[1], g, &self.coefficients, 3, max_deriv)?;
        Ok(DisplacementColumn { field: self, contraction })
    }

    pub fn displacement(&self, x: [f64; 3]) -> Result<[f64; 3]> {
        let p = self.partials(x, 0, SpanSide::Above)?;
        Ok([p[0].value(), p[1].value(), p[2].value()])
    }
}

#[derive(Debug, Clone)]
pub struct DisplacementColumn<'a> {
    field: &'a DisplacementField,
    contraction: ColumnContraction,
}

impl DisplacementColumn<'_> {
    /// Same values as [`DisplacementField::partials`] at `(x, y, z)`, with
    /// `max_deriv` fixed when the column was built.
    pub fn partials(&self, z: f64, z_side: SpanSide) -> Result<[Partials; 3]> {
        let g = &self.field.disc.geometry;
        let lz = g.lengths[2];
        let w = z / lz;
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::OutOfDomain { value: z, lo: 0.0, hi: lz });
        }
        let p = self.contraction.partials(self.field.disc.space.space(2), lz, w, z_side)?;
        Ok([p[0], p[1], p[2]])
    }
}
