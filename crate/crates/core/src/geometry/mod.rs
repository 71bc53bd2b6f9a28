//! Floating-point geometry of finitely generated cones.
//!
//! Cones are stored as generator rows. Everything here assumes general
//! position, under which a cone is either pointed or all of `R^d`; the
//! samplers in [`crate::simulation`] reject draws that come too close to
//! violating it.
//!
//! Face tests rest on one fact: for linearly independent `s_i, i in F`, the
//! set `pos{s_i : i in F}` is a face of `C` iff some `u` orthogonal to them
//! has `<u, s_j> < 0` for every other generator. Projecting onto
//! `M = span(F)^perp` turns this into a pointedness test inside `M`, which a
//! single LP decides.

mod lp;
mod nnls;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::formulas::ModelKind;

/// Default slack threshold for LPs and NNLS support classification.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative determinant below which a `d`-subset counts as degenerate.
pub const GENERAL_POSITION_THRESHOLD: f64 = 1e-12;

/// A finitely generated cone `pos{rows}` in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSample {
    generators: DMatrix<f64>,
    kind: Option<ModelKind>,
    tol: f64,
}

impl ConeSample {
    /// Generators are the rows of an `n x d` matrix.
    pub fn new(generators: DMatrix<f64>) -> Result<Self> {
        if generators.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("cone generators must be finite"));
        }
        Ok(ConeSample { generators, kind: None, tol: DEFAULT_TOL })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::domain("generator rows have different lengths"));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        ConeSample::new(DMatrix::from_row_slice(rows.len(), d, &flat))
    }

    /// The zero cone in `R^d`.
    pub fn empty(d: usize) -> Self {
        ConeSample { generators: DMatrix::zeros(0, d), kind: None, tol: DEFAULT_TOL }
    }

    pub fn with_kind(mut self, kind: ModelKind) -> Self {
        self.kind = Some(kind);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn kind(&self) -> Option<ModelKind> {
        self.kind
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.generators.ncols()
    }

    pub fn len(&self) -> usize {
        self.generators.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn generators(&self) -> &DMatrix<f64> {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> DVector<f64> {
        self.generators.row(i).transpose()
    }

    fn rows(&self) -> Vec<DVector<f64>> {
        (0..self.len()).map(|i| self.generator(i)).collect()
    }

    /// Applies `x -> q x` to every generator.
    pub fn transformed(&self, q: &DMatrix<f64>) -> Self {
        ConeSample { generators: &self.generators * q.transpose(), ..self.clone() }
    }

    fn check_subset(&self, subset: &[usize]) -> Result<()> {
        if subset.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain(format!("index tuple {subset:?} must be strictly increasing")));
        }
        if let Some(&bad) = subset.iter().find(|&&i| i >= self.len()) {
            return Err(Error::domain(format!(
                "generator index {bad} out of range for a cone with {} generators",
                self.len()
            )));
        }
        Ok(())
    }
}

/// A linear subspace of `R^d` given by orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let m = basis.ncols();
        let gram = basis.transpose() * &basis;
        let err = (gram - DMatrix::<f64>::identity(m, m)).amax();
        if err > 1e-12 {
            return Err(Error::domain(format!("subspace basis is not orthonormal (error {err:.3e})")));
        }
        Ok(Subspace { basis })
    }

    pub fn full(d: usize) -> Self {
        Subspace { basis: DMatrix::identity(d, d) }
    }

    pub fn zero(d: usize) -> Self {
        Subspace { basis: DMatrix::zeros(d, 0) }
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn complement(&self) -> Subspace {
        let cols: Vec<DVector<f64>> = self.basis.column_iter().map(|c| c.into_owned()).collect();
        Subspace { basis: complement_basis(&cols, self.ambient_dim()) }
    }

    /// Coordinates of `v`'s orthogonal projection in this basis.
    pub fn coordinates(&self, v: &DVector<f64>) -> DVector<f64> {
        self.basis.transpose() * v
    }
}

/// Nearest point of a cone together with the support of its representation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeProjection {
    pub point: DVector<f64>,
    pub coefficients: DVector<f64>,
    pub active_set: Vec<usize>,
    pub face_dim: usize,
}

/// Number of `k`-faces plus whether the cone was all of `R^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceCount {
    pub count: u64,
    pub full: bool,
}

// ---- linear algebra helpers -------------------------------------------------

/// Appends the normalized component of `v` orthogonal to `basis`; returns
/// false when that component is negligible relative to `|v|`.
fn push_orthogonal(basis: &mut Vec<DVector<f64>>, v: &DVector<f64>, rel: f64) -> bool {
    let n0 = v.norm();
    if n0 == 0.0 {
        return false;
    }
    let mut r = v.clone();
    for _ in 0..2 {
        for b in basis.iter() {
            let c = b.dot(&r);
            r.axpy(-c, b, 1.0);
        }
    }
    let nr = r.norm();
    if nr <= rel * n0 {
        return false;
    }
    basis.push(r / nr);
    true
}

/// Orthonormal basis (as columns) of the complement of `span(ortho)`, where
/// `ortho` is already orthonormal.
fn complement_basis(ortho: &[DVector<f64>], d: usize) -> DMatrix<f64> {
    let mut basis: Vec<DVector<f64>> = ortho.to_vec();
    let start = basis.len();
    while basis.len() < d {
        // Take the coordinate axis with the largest residual; it is always
        // at least 1/sqrt(d) while the span is proper.
        let mut best: Option<(usize, f64)> = None;
        for i in 0..d {
            let mut r = DVector::<f64>::zeros(d);
            r[i] = 1.0;
            for b in &basis {
                let c = b.dot(&r);
                r.axpy(-c, b, 1.0);
            }
            let nr = r.norm();
            if best.is_none_or(|(_, bn)| nr > bn) {
                best = Some((i, nr));
            }
        }
        let (i, _) = best.expect("d > 0 while the span is proper");
        let mut e = DVector::<f64>::zeros(d);
        e[i] = 1.0;
        if !push_orthogonal(&mut basis, &e, 1e-8) {
            break;
        }
    }
    let cols = &basis[start..];
    DMatrix::from_columns(cols).resize(d, cols.len(), 0.0)
}

/// Orthonormal basis of `span(vectors)`; errors when they are dependent.
fn span_basis(vectors: &[DVector<f64>], rel: f64) -> Result<Vec<DVector<f64>>> {
    let mut basis = Vec::with_capacity(vectors.len());
    for v in vectors {
        if !push_orthogonal(&mut basis, v, rel) {
            return Err(Error::degenerate(format!(
                "{} selected generators are linearly dependent",
                vectors.len()
            )));
        }
    }
    Ok(basis)
}

fn project_all(points: &[DVector<f64>], onto: &DMatrix<f64>) -> Vec<DVector<f64>> {
    points.iter().map(|p| onto.transpose() * p).collect()
}

// ---- separation -------------------------------------------------------------

/// Whether some `u` has `<u, x> < 0` for every point (Gordan alternative to
/// `0 in conv(points)`). Points are rescaled to unit length first; a zero
/// point makes separation impossible.
fn strictly_separable(points: &[DVector<f64>], d: usize, tol: f64) -> Result<bool> {
    if points.is_empty() {
        return Ok(true);
    }
    if d == 0 {
        return Ok(false);
    }
    let mut unit = Vec::with_capacity(points.len());
    for p in points {
        let n = p.norm();
        if n == 0.0 {
            return Ok(false);
        }
        unit.push(p / n);
    }
    // Variables (p, q, delta) with u = p - q, 0 <= p, q <= 1, 0 <= delta <= 1.
    let cols = 2 * d + 1;
    let rows = unit.len() + cols;
    let mut a = DMatrix::<f64>::zeros(rows, cols);
    let mut b = DVector::<f64>::zeros(rows);
    for (i, x) in unit.iter().enumerate() {
        for j in 0..d {
            a[(i, j)] = x[j];
            a[(i, d + j)] = -x[j];
        }
        a[(i, 2 * d)] = 1.0;
    }
    for j in 0..cols {
        a[(unit.len() + j, j)] = 1.0;
        b[unit.len() + j] = 1.0;
    }
    let mut c = DVector::<f64>::zeros(cols);
    c[2 * d] = 1.0;
    let sol = lp::maximize(&a, &b, &c)?;
    Ok(sol.value > tol)
}

/// Whether `0` is a convex combination of `points`.
pub fn origin_in_convex_hull(points: &[DVector<f64>], tol: f64) -> Result<bool> {
    let Some(first) = points.first() else {
        return Err(Error::domain("convex hull test needs at least one point"));
    };
    let d = first.len();
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::domain("points have different dimensions"));
    }
    Ok(!strictly_separable(points, d, tol)?)
}

/// Whether the cone is all of `R^d`. Under general position the only
/// alternative is a pointed cone.
pub fn is_full_cone(cone: &ConeSample) -> Result<bool> {
    if cone.dim() == 0 {
        return Ok(true);
    }
    if cone.is_empty() {
        return Ok(false);
    }
    origin_in_convex_hull(&cone.rows(), cone.tol)
}

/// Whether the cone contains no line.
pub fn is_pointed(cone: &ConeSample) -> Result<bool> {
    strictly_separable(&cone.rows(), cone.dim(), cone.tol)
}

struct Split {
    /// Orthonormal basis of `span(subset)^perp`, as columns.
    m_basis: DMatrix<f64>,
    /// The other generators in `M` coordinates, with negligible ones dropped.
    projected: Vec<DVector<f64>>,
}

fn split(cone: &ConeSample, subset: &[usize]) -> Result<Split> {
    cone.check_subset(subset)?;
    let d = cone.dim();
    let chosen: Vec<DVector<f64>> = subset.iter().map(|&i| cone.generator(i)).collect();
    let span = span_basis(&chosen, 1e-10)?;
    let m_basis = complement_basis(&span, d);
    let others: Vec<DVector<f64>> = (0..cone.len())
        .filter(|i| subset.binary_search(i).is_err())
        .map(|i| cone.generator(i))
        .collect();
    let projected = project_all(&others, &m_basis)
        .into_iter()
        .zip(&others)
        .filter(|(p, s)| p.norm() > cone.tol * s.norm())
        .map(|(p, _)| p)
        .collect();
    Ok(Split { m_basis, projected })
}

/// Whether `pos{s_i : i in subset}` is a `|subset|`-face. Indices are
/// 0-based and strictly increasing; the empty subset asks for the apex.
pub fn is_face(cone: &ConeSample, subset: &[usize]) -> Result<bool> {
    if subset.len() >= cone.dim() {
        return Err(Error::domain(format!(
            "face test needs fewer than d = {} generators (got {})",
            cone.dim(),
            subset.len()
        )));
    }
    let s = split(cone, subset)?;
    strictly_separable(&s.projected, s.m_basis.ncols(), cone.tol)
}

/// All `k`-subsets (0-based) spanning a `k`-face, `1 <= k <= d - 1`.
pub fn k_faces(cone: &ConeSample, k: usize) -> Result<Vec<Vec<usize>>> {
    if k == 0 || k >= cone.dim() {
        return Err(Error::domain(format!(
            "k-face enumeration needs 1 <= k <= d - 1 (got k = {k}, d = {})",
            cone.dim()
        )));
    }
    if is_full_cone(cone)? {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for subset in subsets(cone.len(), k) {
        if is_face(cone, &subset)? {
            out.push(subset);
        }
    }
    Ok(out)
}

/// Number of `k`-faces, `0 <= k <= d - 1`. A full cone has none and is
/// flagged.
pub fn count_k_faces(cone: &ConeSample, k: usize) -> Result<FaceCount> {
    if k >= cone.dim() {
        return Err(Error::domain(format!(
            "face count needs 0 <= k <= d - 1 (got k = {k}, d = {})",
            cone.dim()
        )));
    }
    if is_full_cone(cone)? {
        return Ok(FaceCount { count: 0, full: true });
    }
    let count = if k == 0 { 1 } else { k_faces(cone, k)?.len() as u64 };
    Ok(FaceCount { count, full: false })
}

/// Whether the cone meets `V` outside the origin.
pub fn intersects_subspace(cone: &ConeSample, v: &Subspace) -> Result<bool> {
    if v.ambient_dim() != cone.dim() {
        return Err(Error::domain(format!(
            "subspace lives in R^{} but the cone in R^{}",
            v.ambient_dim(),
            cone.dim()
        )));
    }
    if v.dim() == 0 || cone.is_empty() {
        return Ok(false);
    }
    if v.dim() == cone.dim() {
        return Ok(true);
    }
    let w = v.complement();
    let rows = cone.rows();
    let projected = project_all(&rows, w.basis());
    if projected.iter().zip(&rows).any(|(p, s)| p.norm() <= cone.tol * s.norm()) {
        return Ok(true);
    }
    origin_in_convex_hull(&projected, cone.tol)
}

/// Metric projection of `g` onto the cone.
pub fn project_onto_cone(g: &DVector<f64>, cone: &ConeSample) -> Result<ConeProjection> {
    let d = cone.dim();
    if g.len() != d {
        return Err(Error::domain(format!("point has dimension {}, cone {d}", g.len())));
    }
    let a = cone.generators.transpose();
    let x = nnls::solve(&a, g, cone.tol)?;
    let point = &a * &x;
    // Judge support by each generator's contribution, not its raw coefficient.
    let weight: Vec<f64> = (0..x.len()).map(|i| x[i] * a.column(i).norm()).collect();
    let xmax = weight.iter().cloned().fold(0.0, f64::max);
    let active_set: Vec<usize> = if xmax > 0.0 {
        (0..x.len()).filter(|&i| weight[i] > cone.tol * xmax).collect()
    } else {
        Vec::new()
    };
    let face_dim = active_set.len().min(d);
    Ok(ConeProjection { point, coefficients: x, active_set, face_dim })
}

/// Haar-uniform `m`-dimensional subspace of `R^d`.
pub fn sample_uniform_subspace<R: Rng + ?Sized>(d: usize, m: usize, rng: &mut R) -> Result<Subspace> {
    if m > d {
        return Err(Error::domain(format!("subspace dimension {m} exceeds ambient dimension {d}")));
    }
    if m == 0 {
        return Ok(Subspace::zero(d));
    }
    for _ in 0..64 {
        let g = DMatrix::<f64>::from_fn(d, m, |_, _| rng.sample(StandardNormal));
        let qr = g.qr();
        let r = qr.r();
        let diag_max = r.diagonal().amax();
        if r.diagonal().iter().all(|v| v.abs() > 1e-10 * diag_max) {
            return Ok(Subspace { basis: qr.q() });
        }
    }
    Err(Error::numeric("repeated rank-deficient Gaussian draws for a subspace"))
}

/// The projected cone `C|M`, `M = span(subset)^perp`, in an orthonormal basis
/// of `M`. The tangent cone at the face is `span(subset) + C|M`.
pub fn tangent_cone_projection_base(cone: &ConeSample, subset: &[usize]) -> Result<ConeSample> {
    if subset.is_empty() {
        return Ok(cone.clone());
    }
    if !is_face(cone, subset)? {
        return Err(Error::domain(format!("generators {subset:?} do not span a face")));
    }
    let s = split(cone, subset)?;
    let dim = s.m_basis.ncols();
    let mut generators = DMatrix::<f64>::zeros(s.projected.len(), dim);
    for (i, p) in s.projected.iter().enumerate() {
        generators.set_row(i, &p.transpose());
    }
    Ok(ConeSample { generators, kind: cone.kind, tol: cone.tol })
}

/// The cone generated by `subset`, in an orthonormal basis of its span.
pub fn face_in_own_span(cone: &ConeSample, subset: &[usize]) -> Result<ConeSample> {
    cone.check_subset(subset)?;
    let chosen: Vec<DVector<f64>> = subset.iter().map(|&i| cone.generator(i)).collect();
    let span = span_basis(&chosen, 1e-10)?;
    let basis = DMatrix::from_columns(&span).resize(cone.dim(), span.len(), 0.0);
    let mut generators = DMatrix::<f64>::zeros(chosen.len(), span.len());
    for (i, v) in chosen.iter().enumerate() {
        generators.set_row(i, &(basis.transpose() * v).transpose());
    }
    Ok(ConeSample { generators, kind: cone.kind, tol: cone.tol })
}

/// Facets as `(generator indices, outward unit normal)`, found by checking
/// the hyperplane through every `(d-1)`-subset. Uses sign tests only.
pub fn facets(cone: &ConeSample) -> Result<Vec<(Vec<usize>, DVector<f64>)>> {
    let d = cone.dim();
    if d == 0 {
        return Ok(Vec::new());
    }
    let rows = cone.rows();
    let mut out = Vec::new();
    for t in subsets(cone.len(), d - 1) {
        let chosen: Vec<DVector<f64>> = t.iter().map(|&i| rows[i].clone()).collect();
        let Ok(span) = span_basis(&chosen, 1e-10) else { continue };
        let normal = complement_basis(&span, d).column(0).into_owned();
        let mut on = t.clone();
        let (mut neg, mut pos) = (0usize, 0usize);
        for (i, s) in rows.iter().enumerate() {
            if t.binary_search(&i).is_ok() {
                continue;
            }
            let v = normal.dot(s);
            if v.abs() <= cone.tol * s.norm() {
                on.push(i);
            } else if v < 0.0 {
                neg += 1;
            } else {
                pos += 1;
            }
        }
        on.sort_unstable();
        if on != t {
            // Extra generators on the hyperplane break general position;
            // keep the facet once, from its lowest subset.
            if t != on[..d - 1] {
                continue;
            }
        }
        if pos == 0 {
            out.push((on, normal));
        } else if neg == 0 {
            out.push((on, -normal));
        }
    }
    Ok(out)
}

/// Face test by exhaustive facet search: a subset spans a face iff it equals
/// the intersection of the facets containing it.
pub fn is_face_brute_force(cone: &ConeSample, subset: &[usize]) -> Result<bool> {
    cone.check_subset(subset)?;
    let all = facets(cone)?;
    let mut meet: Option<Vec<usize>> = None;
    for (gens, _) in &all {
        if subset.iter().all(|i| gens.binary_search(i).is_ok()) {
            meet = Some(match meet {
                None => gens.clone(),
                Some(m) => m.into_iter().filter(|i| gens.binary_search(i).is_ok()).collect(),
            });
        }
    }
    Ok(meet.is_some_and(|m| m == subset))
}

/// Generators of the polar cone `{x : <x, s> <= 0 for all s in C}`, one per
/// facet. The polar of a full cone is `{0}`.
pub fn polar_generators(cone: &ConeSample) -> Result<ConeSample> {
    let d = cone.dim();
    if is_full_cone(cone)? {
        return Ok(ConeSample::empty(d).with_tol(cone.tol));
    }
    let mut basis = Vec::new();
    for s in cone.rows() {
        push_orthogonal(&mut basis, &s, 1e-10);
    }
    if basis.len() < d {
        return Err(Error::domain("polar generators need a full-dimensional cone"));
    }
    let normals: Vec<DVector<f64>> = facets(cone)?.into_iter().map(|(_, u)| u).collect();
    let mut generators = DMatrix::<f64>::zeros(normals.len(), d);
    for (i, u) in normals.iter().enumerate() {
        generators.set_row(i, &u.transpose());
    }
    Ok(ConeSample { generators, kind: None, tol: cone.tol })
}

/// Whether every `d`-subset of rows has a relative determinant of at least
/// `threshold` (or, with fewer than `d` rows, whether they are independent).
pub fn in_general_position(generators: &DMatrix<f64>, threshold: f64) -> bool {
    let (n, d) = generators.shape();
    let norms: Vec<f64> = generators.row_iter().map(|r| r.norm()).collect();
    if norms.iter().any(|&v| v == 0.0 || !v.is_finite()) {
        return false;
    }
    if n < d {
        let rows: Vec<DVector<f64>> = generators.row_iter().map(|r| r.transpose()).collect();
        return span_basis(&rows, threshold.sqrt()).is_ok();
    }
    subsets(n, d).into_iter().all(|s| {
        let sub = generators.select_rows(&s);
        let scale: f64 = s.iter().map(|&i| norms[i]).product();
        (sub.determinant() / scale).abs() >= threshold
    })
}

/// Strictly increasing `k`-subsets of `0..n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    fn cone(rows: &[&[f64]]) -> ConeSample {
        ConeSample::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn gaussian_cone(rng: &mut ChaCha8Rng, n: usize, d: usize) -> ConeSample {
        ConeSample::new(DMatrix::from_fn(n, d, |_, _| rng.sample(StandardNormal))).unwrap()
    }

    #[test]
    fn convex_hull_examples() {
        let cross = [v(&[1.0, 0.0]), v(&[-1.0, 0.0]), v(&[0.0, 1.0]), v(&[0.0, -1.0])];
        assert!(origin_in_convex_hull(&cross, DEFAULT_TOL).unwrap());
        let half = [v(&[1.0, 0.0]), v(&[2.0, 1.0]), v(&[1.0, 3.0])];
        assert!(!origin_in_convex_hull(&half, DEFAULT_TOL).unwrap());
        assert!(origin_in_convex_hull(&[], DEFAULT_TOL).is_err());
        assert!(origin_in_convex_hull(&[v(&[1.0]), v(&[1.0, 2.0])], DEFAULT_TOL).is_err());
    }

    #[test]
    fn full_cone_examples() {
        let orthant = cone(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert!(!is_full_cone(&orthant).unwrap());
        assert!(is_pointed(&orthant).unwrap());
        let all = cone(&[
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, 0.0, 1.0],
            &[-1.0, 0.0, 0.0],
            &[0.0, -1.0, 0.0],
            &[0.0, 0.0, -1.0],
        ]);
        assert!(is_full_cone(&all).unwrap());
        assert!(!is_pointed(&all).unwrap());
    }

    #[test]
    fn face_examples() {
        let orthant = cone(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        for k in 1..3 {
            for s in subsets(3, k) {
                assert!(is_face(&orthant, &s).unwrap());
            }
            assert_eq!(count_k_faces(&orthant, k).unwrap().count, 3);
        }
        let inner = cone(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        assert!(!is_face(&inner, &[2]).unwrap());
        assert!(is_face(&inner, &[0]).unwrap());
        let dependent = cone(&[&[1.0, 0.0, 0.0], &[2.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert!(matches!(is_face(&dependent, &[0, 1]), Err(Error::Degenerate(_))));
        assert!(is_face(&orthant, &[1, 0]).is_err());
        assert!(is_face(&orthant, &[0, 1, 2]).is_err());
    }

    #[test]
    fn full_cone_has_no_faces() {
        let all = cone(&[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, -1.0]]);
        let c = count_k_faces(&all, 1).unwrap();
        assert_eq!(c, FaceCount { count: 0, full: true });
        assert_eq!(count_k_faces(&all, 0).unwrap().count, 0);
    }

    #[test]
    fn subspace_examples() {
        let c = cone(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        assert!(intersects_subspace(&c, &Subspace::full(3)).unwrap());
        let z_axis = Subspace::new(DMatrix::from_column_slice(3, 1, &[0.0, 0.0, 1.0])).unwrap();
        assert!(!intersects_subspace(&c, &z_axis).unwrap());
        let diag = Subspace::new(DMatrix::from_column_slice(3, 1, &[0.6, 0.8, 0.0])).unwrap();
        assert!(intersects_subspace(&c, &diag).unwrap());
        assert!(!intersects_subspace(&c, &Subspace::zero(3)).unwrap());
    }

    #[test]
    fn projection_examples() {
        let c = cone(&[&[1.0, 0.0], &[1.0, 1.0]]);
        let inside = v(&[2.0, 1.0]);
        let p = project_onto_cone(&inside, &c).unwrap();
        assert!((&p.point - &inside).norm() < 1e-12);
        assert_eq!(p.face_dim, 2);
        let polar = v(&[-1.0, -3.0]);
        let p = project_onto_cone(&polar, &c).unwrap();
        assert!(p.point.norm() < 1e-12);
        assert_eq!(p.face_dim, 0);
        let edge = v(&[3.0, -1.0]);
        let p = project_onto_cone(&edge, &c).unwrap();
        assert_eq!(p.active_set, vec![0]);
        assert_eq!(p.face_dim, 1);
        assert!((&p.point - v(&[3.0, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn moreau_decomposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let c = gaussian_cone(&mut rng, 5, 3);
            if is_full_cone(&c).unwrap() {
                continue;
            }
            let g = DVector::from_fn(3, |_, _| rng.sample(StandardNormal));
            let proj = project_onto_cone(&g, &c).unwrap();
            let rest = &g - &proj.point;
            let scale = g.norm().max(1.0);
            assert!(proj.point.dot(&rest).abs() <= 1e-8 * scale * scale);
            for i in 0..c.len() {
                assert!(rest.dot(&c.generator(i)) <= 1e-8 * scale * c.generator(i).norm());
            }
            for &i in &proj.active_set {
                assert!(rest.dot(&c.generator(i)).abs() <= 1e-8 * scale * c.generator(i).norm());
            }
        }
    }

    #[test]
    fn uniform_subspace_shape_and_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(sample_uniform_subspace(4, 0, &mut rng).unwrap().dim(), 0);
        let full = sample_uniform_subspace(3, 3, &mut rng).unwrap();
        let p = full.basis() * full.basis().transpose();
        assert!((p - DMatrix::<f64>::identity(3, 3)).amax() < 1e-12);
        assert!(sample_uniform_subspace(2, 3, &mut rng).is_err());

        // E |P_V w|^2 = m / d.
        let (d, m, draws) = (5, 2, 100_000);
        let w = v(&[1.0, 0.0, 0.0, 0.0, 0.0]);
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..draws {
            let s = sample_uniform_subspace(d, m, &mut rng).unwrap();
            let x = s.coordinates(&w).norm_squared();
            sum += x;
            sq += x * x;
        }
        let mean = sum / draws as f64;
        let sd = ((sq / draws as f64 - mean * mean) * draws as f64 / (draws - 1) as f64).sqrt();
        let stderr = sd / (draws as f64).sqrt();
        assert!((mean - 0.4).abs() <= 3.0 * stderr, "mean {mean}, stderr {stderr}");
    }

    #[test]
    fn tangent_base_examples() {
        let orthant = cone(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert_eq!(tangent_cone_projection_base(&orthant, &[]).unwrap(), orthant);
        let ray = tangent_cone_projection_base(&orthant, &[0, 2]).unwrap();
        assert_eq!((ray.len(), ray.dim()), (1, 1));
        let inner = cone(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        assert!(tangent_cone_projection_base(&inner, &[2]).is_err());
    }

    #[test]
    fn brute_force_agrees_and_faces_are_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let d = rng.random_range(2..=3);
            let n = rng.random_range(d..=6);
            let c = gaussian_cone(&mut rng, n, d);
            for k in 1..d {
                for s in subsets(n, k) {
                    let lp = is_face(&c, &s).unwrap();
                    assert_eq!(lp, is_face_brute_force(&c, &s).unwrap(), "{c:?} {s:?}");
                    if lp {
                        for &i in &s {
                            assert!(is_face(&c, &[i]).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn predicates_are_scale_and_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let c = gaussian_cone(&mut rng, 5, 3);
            let q = DMatrix::<f64>::from_fn(3, 3, |_, _| rng.sample(StandardNormal)).qr().q();
            let mut scaled = c.generators().clone();
            for mut row in scaled.row_iter_mut() {
                row *= rng.random_range(0.01..100.0);
            }
            let scaled = ConeSample::new(scaled).unwrap();
            let rotated = c.transformed(&q);
            let full = is_full_cone(&c).unwrap();
            assert_eq!(full, is_full_cone(&scaled).unwrap());
            assert_eq!(full, is_full_cone(&rotated).unwrap());
            assert_ne!(full, is_pointed(&c).unwrap());
            for s in subsets(5, 1).into_iter().chain(subsets(5, 2)) {
                let f = is_face(&c, &s).unwrap();
                assert_eq!(f, is_face(&scaled, &s).unwrap());
                assert_eq!(f, is_face(&rotated, &s).unwrap());
            }
        }
    }

    #[test]
    fn polar_of_orthant_is_negative_orthant() {
        let orthant = cone(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let polar = polar_generators(&orthant).unwrap();
        assert_eq!(polar.len(), 3);
        for i in 0..3 {
            let u = polar.generator(i);
            assert!((u.sum() + 1.0).abs() < 1e-12 && u.amax() <= 1.0 + 1e-12);
        }
        let all = cone(&[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, -1.0]]);
        assert!(polar_generators(&all).unwrap().is_empty());
    }

    #[test]
    fn general_position_guard() {
        let good = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        assert!(in_general_position(&good, GENERAL_POSITION_THRESHOLD));
        let bad = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 2.0, 0.0, 1.0, 1.0]);
        assert!(!in_general_position(&bad, GENERAL_POSITION_THRESHOLD));
        let short = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        assert!(in_general_position(&short, GENERAL_POSITION_THRESHOLD));
    }
}
