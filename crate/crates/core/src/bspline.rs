//! Univariate and tensor-product B-spline spaces.
//!
//! Knot vectors are open (clamped) on `[0, 1]`. Interior breakpoints may be
//! repeated up to `degree` times; multiplicity `degree` gives a C⁰ joint,
//! which is how ply interfaces are represented in layerwise spaces.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Highest derivative order supported by the evaluators.
pub const MAX_DERIV: usize = 3;

const KNOT_TOL: f64 = 1e-14;

/// Which knot span owns a parameter lying exactly on an interior knot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpanSide {
    /// Half-open spans `[u_i, u_{i+1})`; the last span is closed.
    #[default]
    Above,
    /// Spans `(u_i, u_{i+1}]`; the first span is closed.
    Below,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    degree: usize,
    knots: Vec<f64>,
}

impl KnotVector {
    /// Validates an explicit open knot vector on `[0, 1]`.
    pub fn new(degree: usize, knots: Vec<f64>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidKnots("degree must be at least 1".into()));
        }
        if knots.len() < 2 * (degree + 1) {
            return Err(Error::InvalidKnots(format!(
                "{} knots is too few for degree {degree}",
                knots.len()
            )));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidKnots("knots must be non-decreasing".into()));
        }
        let first = knots[0];
        let last = knots[knots.len() - 1];
        if first != 0.0 || last != 1.0 {
            return Err(Error::InvalidKnots("knots must span [0, 1]".into()));
        }
        let start = knots.iter().take_while(|&&k| k == first).count();
        let end = knots.iter().rev().take_while(|&&k| k == last).count();
        if start != degree + 1 || end != degree + 1 {
            return Err(Error::InvalidKnots(format!(
                "end knots must be repeated exactly {} times",
                degree + 1
            )));
        }
        let mut i = start;
        while i < knots.len() - end {
            let m = knots[i..].iter().take_while(|&&k| k == knots[i]).count();
            if m > degree {
                return Err(Error::InvalidKnots(format!(
                    "interior knot {} has multiplicity {m} > degree {degree}",
                    knots[i]
                )));
            }
            i += m;
        }
        Ok(Self { degree, knots })
    }

    /// Open knot vector with the given interior breakpoints, each repeated
    /// `interior_multiplicity` times.
    pub fn from_breakpoints(
        degree: usize,
        breakpoints: &[f64],
        interior_multiplicity: usize,
    ) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidKnots("degree must be at least 1".into()));
        }
        if !breakpoints.is_empty() && !(1..=degree).contains(&interior_multiplicity) {
            return Err(Error::InvalidKnots(format!(
                "interior multiplicity {interior_multiplicity} outside 1..={degree}"
            )));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidKnots("breakpoints must be strictly increasing".into()));
        }
        if breakpoints.iter().any(|&b| !(b > 0.0 && b < 1.0)) {
            return Err(Error::InvalidKnots("breakpoints must lie inside (0, 1)".into()));
        }
        let mut knots = vec![0.0; degree + 1];
        for &b in breakpoints {
            knots.extend(std::iter::repeat_n(b, interior_multiplicity));
        }
        knots.extend(std::iter::repeat_n(1.0, degree + 1));
        Self::new(degree, knots)
    }

    /// `n_elements` uniform spans with the given interior multiplicity.
    pub fn uniform(degree: usize, n_elements: usize, interior_multiplicity: usize) -> Result<Self> {
        if n_elements == 0 {
            return Err(Error::InvalidKnots("need at least one element".into()));
        }
        let bps: Vec<f64> = (1..n_elements).map(|i| i as f64 / n_elements as f64).collect();
        Self::from_breakpoints(degree, &bps, interior_multiplicity)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn n_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Distinct knot values, including both ends.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for &k in &self.knots {
            if out.last().is_none_or(|&l| k > l) {
                out.push(k);
            }
        }
        out
    }

    /// Non-empty knot spans `(a, b)`.
    pub fn elements(&self) -> Vec<(f64, f64)> {
        self.breakpoints().windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Interior multiplicity of the value `u`, zero if it is not a knot.
    pub fn multiplicity(&self, u: f64) -> usize {
        self.knots.iter().filter(|&&k| (k - u).abs() <= KNOT_TOL).count()
    }

    /// Index `s` of the span containing `u`, with `degree <= s < n_basis`.
    pub fn find_span(&self, u: f64, side: SpanSide) -> usize {
        let p = self.degree;
        let n = self.n_basis();
        let k = &self.knots;
        match side {
            SpanSide::Above => {
                if u >= k[n] {
                    return n - 1;
                }
                // largest s with k[s] <= u
                let mut lo = p;
                let mut hi = n;
                while hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    if u < k[mid] {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                lo
            }
            SpanSide::Below => {
                if u <= k[p] {
                    return p;
                }
                // smallest s with u <= k[s+1]
                let mut lo = p;
                let mut hi = n - 1;
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if u <= k[mid + 1] {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                lo
            }
        }
    }
}

/// Nonzero basis functions at a parameter, with derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisTable {
    /// Global index of the first active function.
    pub first: usize,
    degree: usize,
    max_deriv: usize,
    /// Row-major `(max_deriv + 1) x (degree + 1)`.
    values: Vec<f64>,
}

impl BasisTable {
    /// `order`-th derivative of the `local`-th active function.
    #[inline]
    pub fn get(&self, order: usize, local: usize) -> f64 {
        self.values[order * (self.degree + 1) + local]
    }

    /// All active functions for one derivative order.
    #[inline]
    pub fn row(&self, order: usize) -> &[f64] {
        let w = self.degree + 1;
        &self.values[order * w..(order + 1) * w]
    }

    pub fn max_deriv(&self) -> usize {
        self.max_deriv
    }

    pub fn n_active(&self) -> usize {
        self.degree + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplineSpace1D {
    knot_vector: KnotVector,
}

impl SplineSpace1D {
    pub fn new(knot_vector: KnotVector) -> Self {
        Self { knot_vector }
    }

    pub fn knot_vector(&self) -> &KnotVector {
        &self.knot_vector
    }

    pub fn degree(&self) -> usize {
        self.knot_vector.degree
    }

    pub fn n_basis(&self) -> usize {
        self.knot_vector.n_basis()
    }

    /// Basis values and derivatives up to `max_deriv` at `u`.
    pub fn eval_basis(&self, u: f64, max_deriv: usize) -> Result<BasisTable> {
        self.eval_basis_sided(u, max_deriv, SpanSide::Above)
    }

    pub fn eval_basis_sided(&self, u: f64, max_deriv: usize, side: SpanSide) -> Result<BasisTable> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::OutOfDomain { value: u, lo: 0.0, hi: 1.0 });
        }
        let p = self.degree();
        if max_deriv > p.min(MAX_DERIV) {
            return Err(Error::DerivativeOrder { requested: max_deriv, max: p.min(MAX_DERIV) });
        }
        let span = self.knot_vector.find_span(u, side);
        let values = ders_basis_funs(&self.knot_vector.knots, p, span, u, max_deriv);
        Ok(BasisTable { first: span - p, degree: p, max_deriv, values })
    }

    /// Greville abscissae, one per basis function.
    pub fn greville(&self) -> Vec<f64> {
        let p = self.degree();
        let k = &self.knot_vector.knots;
        (0..self.n_basis())
            .map(|i| k[i + 1..=i + p].iter().sum::<f64>() / p as f64)
            .collect()
    }

    /// Collocation matrix `A[r][i] = N_i(g_r)` at the Greville points.
    pub fn collocation_matrix(&self) -> DMatrix<f64> {
        let n = self.n_basis();
        let mut a = DMatrix::zeros(n, n);
        for (r, &g) in self.greville().iter().enumerate() {
            let t = self.eval_basis(g, 0).expect("Greville points lie in [0, 1]");
            for (l, &v) in t.row(0).iter().enumerate() {
                a[(r, t.first + l)] = v;
            }
        }
        a
    }

    /// Coefficients of the spline interpolating `f` at the Greville points.
    pub fn interpolate(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let rhs = DVector::from_iterator(self.n_basis(), self.greville().into_iter().map(f));
        let lu = self.collocation_matrix().lu();
        lu.solve(&rhs).expect("Greville collocation is unisolvent").as_slice().to_vec()
    }
}

/// Piegl–Tiller algorithm A2.3: derivatives of the nonzero basis functions.
fn ders_basis_funs(knots: &[f64], p: usize, span: usize, u: f64, n: usize) -> Vec<f64> {
    let mut ndu = vec![vec![0.0; p + 1]; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    let w = p + 1;
    let mut ders = vec![0.0; (n + 1) * w];
    for j in 0..=p {
        ders[j] = ndu[j][p];
    }
    let mut a = [vec![0.0; p + 1], vec![0.0; p + 1]];
    let pi = p as isize;
    for r in 0..=pi {
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0][0] = 1.0;
        for k in 1..=n as isize {
            let mut d = 0.0;
            let rk = r - k;
            let pk = pi - k;
            if r >= k {
                a[s2][0] = a[s1][0] / ndu[(pk + 1) as usize][rk as usize];
                d = a[s2][0] * ndu[rk as usize][pk as usize];
            }
            let j1 = if rk >= -1 { 1 } else { -rk };
            let j2 = if r - 1 <= pk { k - 1 } else { pi - r };
            for j in j1..=j2 {
                let (ju, rkj) = (j as usize, (rk + j) as usize);
                a[s2][ju] = (a[s1][ju] - a[s1][ju - 1]) / ndu[(pk + 1) as usize][rkj];
                d += a[s2][ju] * ndu[rkj][pk as usize];
            }
            if r <= pk {
                let ku = k as usize;
                a[s2][ku] = -a[s1][ku - 1] / ndu[(pk + 1) as usize][r as usize];
                d += a[s2][ku] * ndu[r as usize][pk as usize];
            }
            ders[k as usize * w + r as usize] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut fac = p as f64;
    for k in 1..=n {
        for j in 0..=p {
            ders[k * w + j] *= fac;
        }
        fac *= (p - k) as f64;
    }
    ders
}

/// Axis-aligned box `[0, Lx] x [0, Ly] x [0, Lz]`; the geometry map from the
/// parametric unit cube is `x = L ⊙ ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxGeometry {
    pub lengths: [f64; 3],
}

impl BoxGeometry {
    pub fn new(lx: f64, ly: f64, lz: f64) -> Self {
        Self { lengths: [lx, ly, lz] }
    }

    pub fn to_parametric(&self, x: [f64; 3]) -> [f64; 3] {
        [x[0] / self.lengths[0], x[1] / self.lengths[1], x[2] / self.lengths[2]]
    }

    pub fn to_physical(&self, u: [f64; 3]) -> [f64; 3] {
        [u[0] * self.lengths[0], u[1] * self.lengths[1], u[2] * self.lengths[2]]
    }

    pub fn jacobian_det(&self) -> f64 {
        self.lengths.iter().product()
    }
}

/// Mixed partials `∂^(a+b+c) f / ∂x^a ∂y^b ∂z^c` for `a + b + c <= order`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials {
    order: usize,
    d: [[[f64; MAX_DERIV + 1]; MAX_DERIV + 1]; MAX_DERIV + 1],
}

impl Partials {
    fn zero(order: usize) -> Self {
        Self { order, d: [[[0.0; MAX_DERIV + 1]; MAX_DERIV + 1]; MAX_DERIV + 1] }
    }

    /// Highest total order stored.
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        debug_assert!(a + b + c <= self.order, "partial ({a},{b},{c}) not evaluated");
        self.d[a][b][c]
    }

    /// Partial with derivative counts given as a multi-index.
    #[inline]
    pub fn at(&self, alpha: [usize; 3]) -> f64 {
        self.get(alpha[0], alpha[1], alpha[2])
    }

    pub fn value(&self) -> f64 {
        self.d[0][0][0]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorSpace3D {
    spaces: [SplineSpace1D; 3],
}

impl TensorSpace3D {
    pub fn new(x: SplineSpace1D, y: SplineSpace1D, z: SplineSpace1D) -> Self {
        Self { spaces: [x, y, z] }
    }

    pub fn space(&self, dir: usize) -> &SplineSpace1D {
        &self.spaces[dir]
    }

    pub fn spaces(&self) -> &[SplineSpace1D; 3] {
        &self.spaces
    }

    /// Number of scalar basis functions.
    pub fn dim(&self) -> usize {
        self.spaces.iter().map(SplineSpace1D::n_basis).product()
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.spaces[0].n_basis(), self.spaces[1].n_basis(), self.spaces[2].n_basis()]
    }

    /// Flat scalar index, x fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let [nx, ny, _] = self.shape();
        i + nx * (j + ny * k)
    }

    pub fn min_degree(&self) -> usize {
        self.spaces.iter().map(SplineSpace1D::degree).min().unwrap_or(0)
    }

    /// Coefficients interpolating `f` (given in parametric coordinates) at
    /// the tensor grid of Greville points.
    pub fn interpolate(&self, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
        let [nx, ny, nz] = self.shape();
        let g: Vec<Vec<f64>> = self.spaces.iter().map(SplineSpace1D::greville).collect();
        let mut vals = vec![0.0; nx * ny * nz];
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    vals[self.index(i, j, k)] = f([g[0][i], g[1][j], g[2][k]]);
                }
            }
        }
        let strides = [1, nx, nx * ny];
        for dir in 0..3 {
            let lu = self.spaces[dir].collocation_matrix().lu();
            let n = self.shape()[dir];
            let stride = strides[dir];
            let mut line = DVector::zeros(n);
            for start in 0..vals.len() {
                // visit each line once: its first entry has index 0 along `dir`
                if (start / stride) % n != 0 {
                    continue;
                }
                for t in 0..n {
                    line[t] = vals[start + t * stride];
                }
                let sol = lu.solve(&line).expect("Greville collocation is unisolvent");
                for t in 0..n {
                    vals[start + t * stride] = sol[t];
                }
            }
        }
        vals
    }

    /// Basis tables for the three directions at a parametric point.
    pub fn basis_tables(
        &self,
        u: [f64; 3],
        max_deriv: usize,
        sides: [SpanSide; 3],
    ) -> Result<[BasisTable; 3]> {
        Ok([
            self.spaces[0].eval_basis_sided(u[0], max_deriv, sides[0])?,
            self.spaces[1].eval_basis_sided(u[1], max_deriv, sides[1])?,
            self.spaces[2].eval_basis_sided(u[2], max_deriv, sides[2])?,
        ])
    }

    /// Like [`basis_tables`](Self::basis_tables) but each direction stops at
    /// its own degree; higher partials in that direction are zero.
    pub fn basis_tables_clamped(
        &self,
        u: [f64; 3],
        max_deriv: usize,
        sides: [SpanSide; 3],
    ) -> Result<[BasisTable; 3]> {
        let m = |d: usize| max_deriv.min(self.spaces[d].degree());
        Ok([
            self.spaces[0].eval_basis_sided(u[0], m(0), sides[0])?,
            self.spaces[1].eval_basis_sided(u[1], m(1), sides[1])?,
            self.spaces[2].eval_basis_sided(u[2], m(2), sides[2])?,
        ])
    }

    /// Physical partials of an `ncomp`-component field whose coefficients are
    /// interleaved (`coeffs[ncomp * I + c]`), from precomputed tables.
    pub fn contract(
        &self,
        tables: &[BasisTable; 3],
        geometry: &BoxGeometry,
        coeffs: &[f64],
        ncomp: usize,
        max_deriv: usize,
    ) -> Vec<Partials> {
        let [tx, ty, tz] = tables;
        let (px, py, pz) = (tx.n_active(), ty.n_active(), tz.n_active());
        let m = max_deriv + 1;
        let (mx, my, mz) = (tx.max_deriv + 1, ty.max_deriv + 1, tz.max_deriv + 1);
        let mut out = vec![Partials::zero(max_deriv); ncomp];
        // s2[c][a][b][k]: contracted over i and j
        let mut s1 = vec![0.0; ncomp * m * py];
        let mut s2 = vec![0.0; ncomp * m * m * pz];
        for lk in 0..pz {
            let k = tz.first + lk;
            s1.iter_mut().for_each(|v| *v = 0.0);
            for lj in 0..py {
                let j = ty.first + lj;
                for li in 0..px {
                    let base = ncomp * self.index(tx.first + li, j, k);
                    for c in 0..ncomp {
                        let coef = coeffs[base + c];
                        if coef == 0.0 {
                            continue;
                        }
                        for a in 0..m.min(mx) {
                            s1[(c * m + a) * py + lj] += tx.get(a, li) * coef;
                        }
                    }
                }
            }
            for c in 0..ncomp {
                for a in 0..m.min(mx) {
                    for b in 0..(m - a).min(my) {
                        let mut acc = 0.0;
                        for lj in 0..py {
                            acc += ty.get(b, lj) * s1[(c * m + a) * py + lj];
                        }
                        s2[((c * m + a) * m + b) * pz + lk] = acc;
                    }
                }
            }
        }
        let inv = geometry.lengths.map(|l| 1.0 / l);
        for (c, part) in out.iter_mut().enumerate() {
            for a in 0..m.min(mx) {
                for b in 0..(m - a).min(my) {
                    for cc in 0..(m - a - b).min(mz) {
                        let mut acc = 0.0;
                        for lk in 0..pz {
                            acc += tz.get(cc, lk) * s2[((c * m + a) * m + b) * pz + lk];
                        }
                        part.d[a][b][cc] =
                            acc * inv[0].powi(a as i32) * inv[1].powi(b as i32) * inv[2].powi(cc as i32);
                    }
                }
            }
        }
        out
    }
}

/// A tensor-product field with the two in-plane directions already
/// contracted at a fixed `(x, y)`: for every z-basis function and in-plane
/// partial `(a, b)` the physical in-plane derivative of the coefficient
/// column. Evaluating along z then costs one univariate table per point.
#[derive(Debug, Clone)]
pub struct ColumnContraction {
    ncomp: usize,
    order: usize,
    nz: usize,
    /// `[c][a][b][k]` flattened, `a + b <= order`.
    vals: Vec<f64>,
}

impl TensorSpace3D {
    /// Contracts x and y at parametric `(u, v)` for derivatives up to `max_deriv`.
    pub fn contract_column(
        &self,
        u: f64,
        v: f64,
        geometry: &BoxGeometry,
        coeffs: &[f64],
        ncomp: usize,
        max_deriv: usize,
    ) -> Result<ColumnContraction> {
        let m = max_deriv + 1;
        let tx = self.spaces[0].eval_basis_sided(u, max_deriv.min(self.spaces[0].degree()), SpanSide::Above)?;
        let ty = self.spaces[1].eval_basis_sided(v, max_deriv.min(self.spaces[1].degree()), SpanSide::Above)?;
        let nz = self.spaces[2].n_basis();
        let (mx, my) = (tx.max_deriv + 1, ty.max_deriv + 1);
        let inv = [1.0 / geometry.lengths[0], 1.0 / geometry.lengths[1]];
        let mut vals = vec![0.0; ncomp * m * m * nz];
        for k in 0..nz {
            for lj in 0..ty.n_active() {
                let j = ty.first + lj;
                for li in 0..tx.n_active() {
                    let base = ncomp * self.index(tx.first + li, j, k);
                    for c in 0..ncomp {
                        let coef = coeffs[base + c];
                        if coef == 0.0 {
                            continue;
                        }
                        for a in 0..m.min(mx) {
                            let xa = tx.get(a, li) * coef;
                            for b in 0..(m - a).min(my) {
                                vals[((c * m + a) * m + b) * nz + k] += xa * ty.get(b, lj);
                            }
                        }
                    }
                }
            }
        }
        for c in 0..ncomp {
            for a in 0..m {
                for b in 0..m - a {
                    let scale = inv[0].powi(a as i32) * inv[1].powi(b as i32);
                    for k in 0..nz {
                        vals[((c * m + a) * m + b) * nz + k] *= scale;
                    }
                }
            }
        }
        Ok(ColumnContraction { ncomp, order: max_deriv, nz, vals })
    }
}

impl ColumnContraction {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Physical partials at parametric height `w` (z length `lz`), up to the
    /// contraction order.
    pub fn partials(&self, space_z: &SplineSpace1D, lz: f64, w: f64, side: SpanSide) -> Result<Vec<Partials>> {
        debug_assert_eq!(space_z.n_basis(), self.nz);
        let m = self.order + 1;
        let tz = space_z.eval_basis_sided(w, self.order.min(space_z.degree()), side)?;
        let mz = tz.max_deriv + 1;
        let inv = 1.0 / lz;
        let mut out = vec![Partials::zero(self.order); self.ncomp];
        for (c, part) in out.iter_mut().enumerate() {
            for a in 0..m {
                for b in 0..m - a {
                    let col = &self.vals[((c * m + a) * m + b) * self.nz..][..self.nz];
                    for cc in 0..(m - a - b).min(mz) {
                        let mut acc = 0.0;
                        for lk in 0..tz.n_active() {
                            acc += tz.get(cc, lk) * col[tz.first + lk];
                        }
                        part.d[a][b][cc] = acc * inv.powi(cc as i32);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Value and all mixed physical partials up to `max_deriv` of a scalar field
/// with coefficients `coeffs` at the parametric point `u`.
pub fn eval_field(
    space: &TensorSpace3D,
    geometry: &BoxGeometry,
    coeffs: &[f64],
    u: [f64; 3],
    max_deriv: usize,
) -> Result<Partials> {
    if coeffs.len() != space.dim() {
        return Err(Error::CoefficientLength { got: coeffs.len(), expected: space.dim() });
    }
    let tables = space.basis_tables(u, max_deriv, [SpanSide::Above; 3])?;
    Ok(space.contract(&tables, geometry, coeffs, 1, max_deriv)[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cubic_element() {
        let kv = KnotVector::from_breakpoints(3, &[], 1).unwrap();
        assert_eq!(kv.knots(), &[0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(kv.n_basis(), 4);
    }

    #[test]
    fn layerwise_interfaces_give_three_functions_per_ply() {
        let bps: Vec<f64> = (1..11).map(|i| i as f64 / 11.0).collect();
        let kv = KnotVector::from_breakpoints(3, &bps, 3).unwrap();
        assert_eq!(kv.n_basis(), 34);
    }

    #[test]
    fn quartic_nine_elements() {
        assert_eq!(KnotVector::uniform(4, 9, 1).unwrap().n_basis(), 13);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(KnotVector::from_breakpoints(3, &[0.5], 4).is_err());
        assert!(KnotVector::from_breakpoints(3, &[0.5], 0).is_err());
        assert!(KnotVector::from_breakpoints(3, &[0.6, 0.4], 1).is_err());
        assert!(KnotVector::from_breakpoints(3, &[1.0], 1).is_err());
        assert!(KnotVector::new(2, vec![0.0, 0.0, 1.0, 1.0, 1.0]).is_err());
        assert!(KnotVector::new(1, vec![0.0, 0.0, 0.5, 0.5, 0.5, 1.0, 1.0]).is_err());
        assert!(KnotVector::new(0, vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn linear_hat() {
        let s = SplineSpace1D::new(KnotVector::new(1, vec![0.0, 0.0, 1.0, 1.0]).unwrap());
        let t = s.eval_basis(0.3, 1).unwrap();
        assert_eq!(t.first, 0);
        assert!((t.get(0, 0) - 0.7).abs() < 1e-15);
        assert!((t.get(0, 1) - 0.3).abs() < 1e-15);
        assert!((t.get(1, 0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn out_of_domain_and_order() {
        let s = SplineSpace1D::new(KnotVector::uniform(2, 3, 1).unwrap());
        assert!(matches!(s.eval_basis(1.2, 0), Err(Error::OutOfDomain { .. })));
        assert!(matches!(s.eval_basis(0.5, 3), Err(Error::DerivativeOrder { .. })));
    }

    #[test]
    fn span_sides_at_interior_knot() {
        let kv = KnotVector::uniform(2, 4, 1).unwrap();
        // knots: 0 0 0 .25 .5 .75 1 1 1
        assert_eq!(kv.find_span(0.5, SpanSide::Above), 4);
        assert_eq!(kv.find_span(0.5, SpanSide::Below), 3);
        assert_eq!(kv.find_span(1.0, SpanSide::Above), 5);
        assert_eq!(kv.find_span(0.0, SpanSide::Below), 2);
        assert_eq!(kv.find_span(0.6, SpanSide::Below), 4);
    }

    #[test]
    fn breakpoints_and_elements() {
        let kv = KnotVector::from_breakpoints(3, &[0.25, 0.5], 3).unwrap();
        assert_eq!(kv.breakpoints(), vec![0.0, 0.25, 0.5, 1.0]);
        assert_eq!(kv.elements().len(), 3);
        assert_eq!(kv.multiplicity(0.25), 3);
        assert_eq!(kv.multiplicity(0.3), 0);
    }
}
