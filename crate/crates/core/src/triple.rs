//! Finite-dimensional JB*-triples built from rectangular matrix blocks.
//!
//! A [`TripleSpace`] is an ℓ∞ direct sum of type-I Cartan factors
//! `M_{p,q}(ℂ)`. Each factor carries the triple product
//! `{a,b,c} = ½(ab*c + cb*a)` and the spectral norm; the sum carries the
//! coordinatewise product and the maximum of the block norms.
//!
//! Elements vectorize blockwise in column-major order. Every [`LinOp`] is a
//! dense complex matrix in that fixed basis of matrix units.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{JbhError, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Default absolute tolerance for equality tests.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Shape of one type-I Cartan factor `M_{p,q}(ℂ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub p: usize,
    pub q: usize,
}

impl Block {
    pub fn dim(self) -> usize {
        self.p * self.q
    }

    pub fn rank(self) -> usize {
        self.p.min(self.q)
    }

    /// `Tr(x□y) = trace_weight · tr(xy*)` on this factor.
    pub fn trace_weight(self) -> f64 {
        (self.p + self.q) as f64 / 2.0
    }

    /// Complex dimension of the Peirce-1 space of a minimal tripotent.
    pub fn peirce1_dim_minimal(self) -> usize {
        (self.p - 1) + (self.q - 1)
    }
}

/// Descriptor of `V = M_{p_1,q_1} ⊕ … ⊕ M_{p_d,q_d}` with the ℓ∞ norm.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr")]
pub struct TripleSpace {
    blocks: Vec<Block>,
}

#[derive(Deserialize)]
struct SpaceRepr {
    blocks: Vec<Block>,
}

impl TryFrom<SpaceRepr> for TripleSpace {
    type Error = JbhError;
    fn try_from(r: SpaceRepr) -> Result<Self> {
        TripleSpace::new(r.blocks)
    }
}

impl TripleSpace {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(JbhError::InvalidSpace("at least one block is required".into()));
        }
        if let Some(b) = blocks.iter().find(|b| b.p == 0 || b.q == 0) {
            return Err(JbhError::InvalidSpace(format!(
                "block dimensions must be positive, got {}x{}",
                b.p, b.q
            )));
        }
        Ok(Self { blocks })
    }

    /// The single factor `M_{p,q}(ℂ)`.
    pub fn matrix(p: usize, q: usize) -> Result<Self> {
        Self::new(vec![Block { p, q }])
    }

    /// Unit disc `M_{1,1}`.
    pub fn disc() -> Self {
        Self { blocks: vec![Block { p: 1, q: 1 }] }
    }

    /// Euclidean ball in ℂ^p, realised as `M_{p,1}`.
    pub fn euclidean(p: usize) -> Result<Self> {
        Self::matrix(p, 1)
    }

    pub fn from_shapes(shapes: &[(usize, usize)]) -> Result<Self> {
        Self::new(shapes.iter().map(|&(p, q)| Block { p, q }).collect())
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn complex_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim()).sum()
    }

    /// Maximal number of mutually orthogonal tripotents.
    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| b.rank()).sum()
    }

    /// Per-coordinate weight of the trace form in the vectorized basis.
    pub fn trace_weights(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .flat_map(|b| std::iter::repeat_n(b.trace_weight(), b.dim()))
            .collect()
    }

    /// Matrix units in vectorization order.
    pub fn basis(&self) -> Vec<Element> {
        (0..self.complex_dim())
            .map(|k| {
                let mut v = CVec::zeros(self.complex_dim());
                v[k] = C64::new(1.0, 0.0);
                Element::from_vector(self, &v)
            })
            .collect()
    }
}

impl fmt::Display for TripleSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|b| format!("M{}x{}", b.p, b.q)).collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// A point of V, one complex `p×q` matrix per block.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    blocks: Vec<CMat>,
}

impl Element {
    pub fn zeros(space: &TripleSpace) -> Self {
        Self {
            blocks: space.blocks.iter().map(|b| CMat::zeros(b.p, b.q)).collect(),
        }
    }

    pub fn from_blocks(blocks: Vec<CMat>) -> Result<Self> {
        if blocks.is_empty() || blocks.iter().any(|m| m.nrows() == 0 || m.ncols() == 0) {
            return Err(JbhError::InvalidSpace("element needs nonempty blocks".into()));
        }
        Ok(Self { blocks })
    }

    /// Element of a single-block space.
    pub fn from_matrix(m: CMat) -> Self {
        assert!(m.nrows() > 0 && m.ncols() > 0, "empty matrix");
        Self { blocks: vec![m] }
    }

    /// Real diagonal matrix `diag(d)` in `M_{p,q}`.
    pub fn diag(p: usize, q: usize, d: &[f64]) -> Self {
        let mut m = CMat::zeros(p, q);
        for (i, &v) in d.iter().enumerate().take(p.min(q)) {
            m[(i, i)] = C64::new(v, 0.0);
        }
        Self::from_matrix(m)
    }

    /// Matrix unit `E_{ij}` (zero-based) in block `block` of `space`.
    pub fn unit(space: &TripleSpace, block: usize, i: usize, j: usize) -> Self {
        let mut x = Self::zeros(space);
        x.blocks[block][(i, j)] = C64::new(1.0, 0.0);
        x
    }

    pub fn scalar(z: C64) -> Self {
        Self::from_matrix(CMat::from_element(1, 1, z))
    }

    pub fn space(&self) -> TripleSpace {
        TripleSpace {
            blocks: self.blocks.iter().map(|m| Block { p: m.nrows(), q: m.ncols() }).collect(),
        }
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [CMat] {
        &mut self.blocks
    }

    pub fn block(&self, i: usize) -> &CMat {
        &self.blocks[i]
    }

    pub fn same_shape(&self, other: &Element) -> bool {
        self.blocks.len() == other.blocks.len()
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| a.shape() == b.shape())
    }

    pub fn check_shape(&self, other: &Element) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(JbhError::ShapeMismatch(format!("{} vs {}", self.space(), other.space())))
        }
    }

    pub fn check_space(&self, space: &TripleSpace) -> Result<()> {
        let own = self.space();
        if &own == space {
            Ok(())
        } else {
            Err(JbhError::ShapeMismatch(format!("{own} vs {space}")))
        }
    }

    /// Column-major vectorization, blocks concatenated.
    pub fn to_vector(&self) -> CVec {
        let n: usize = self.blocks.iter().map(|m| m.len()).sum();
        let mut v = CVec::zeros(n);
        let mut k = 0;
        for m in &self.blocks {
            for z in m.iter() {
                v[k] = *z;
                k += 1;
            }
        }
        v
    }

    pub fn from_vector(space: &TripleSpace, v: &CVec) -> Self {
        assert_eq!(v.len(), space.complex_dim(), "vector length does not match space");
        let mut k = 0;
        let blocks = space
            .blocks
            .iter()
            .map(|b| {
                let m = CMat::from_column_slice(b.p, b.q, &v.as_slice()[k..k + b.dim()]);
                k += b.dim();
                m
            })
            .collect();
        Self { blocks }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_blocks(|m| m * C64::new(s, 0.0))
    }

    pub fn scale_c(&self, s: C64) -> Self {
        self.map_blocks(|m| m * s)
    }

    fn map_blocks(&self, f: impl Fn(&CMat) -> CMat) -> Self {
        Self { blocks: self.blocks.iter().map(f).collect() }
    }

    fn zip_blocks(&self, other: &Element, f: impl Fn(&CMat, &CMat) -> CMat) -> Self {
        assert!(self.same_shape(other), "shape mismatch in elementwise operation");
        Self {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// Euclidean length of the coordinate vector.
    pub fn frobenius_norm(&self) -> f64 {
        self.blocks.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt()
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|m| m.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Coordinatewise conjugate.
    pub fn conj(&self) -> Self {
        self.map_blocks(|m| m.map(|z| z.conj()))
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a + b)
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a - b)
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.map_blocks(|m| -m)
    }
}

impl Mul<&Element> for f64 {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        rhs.scale(self)
    }
}

impl Add for Element {
    type Output = Element;
    fn add(self, rhs: Element) -> Element {
        &self + &rhs
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        &self - &rhs
    }
}

/// Sum of a nonempty list of equally shaped elements; zero of `space` if empty.
pub fn sum_elements<'a>(space: &TripleSpace, items: impl IntoIterator<Item = &'a Element>) -> Element {
    items.into_iter().fold(Element::zeros(space), |acc, x| &acc + x)
}

/// Linear combination `Σ c_i x_i` with real coefficients.
pub fn real_combination(space: &TripleSpace, coeffs: &[f64], items: &[Element]) -> Element {
    coeffs
        .iter()
        .zip(items)
        .fold(Element::zeros(space), |acc, (&c, x)| &acc + &x.scale(c))
}

fn tp_block(a: &CMat, b: &CMat, c: &CMat) -> CMat {
    let bh = b.adjoint();
    (a * &bh * c + c * &bh * a) * C64::new(0.5, 0.0)
}

fn triple_unchecked(a: &Element, b: &Element, c: &Element) -> Element {
    Element {
        blocks: a
            .blocks
            .iter()
            .zip(&b.blocks)
            .zip(&c.blocks)
            .map(|((a, b), c)| tp_block(a, b, c))
            .collect(),
    }
}

/// Jordan triple product `{a,b,c}`, blockwise `½(ab*c + cb*a)`.
pub fn triple_product(a: &Element, b: &Element, c: &Element) -> Result<Element> {
    a.check_shape(b)?;
    a.check_shape(c)?;
    Ok(triple_unchecked(a, b, c))
}

/// Shorthand used internally once shapes are known to agree.
pub(crate) fn tp(a: &Element, b: &Element, c: &Element) -> Element {
    triple_unchecked(a, b, c)
}

/// `Q_a(x) = {a,x,a}`; conjugate-linear in `x`.
pub fn quadratic_apply(a: &Element, x: &Element) -> Result<Element> {
    a.check_shape(x)?;
    Ok(Element {
        blocks: a
            .blocks
            .iter()
            .zip(&x.blocks)
            .map(|(a, x)| a * x.adjoint() * a)
            .collect(),
    })
}

pub(crate) fn quad(a: &Element, x: &Element) -> Element {
    Element {
        blocks: a
            .blocks
            .iter()
            .zip(&x.blocks)
            .map(|(a, x)| a * x.adjoint() * a)
            .collect(),
    }
}

/// The box operator `a□b : x ↦ {a,b,x}`.
pub fn box_operator(a: &Element, b: &Element) -> Result<LinOp> {
    a.check_shape(b)?;
    let space = a.space();
    Ok(LinOp::from_fn(&space, |x| tp(a, b, x)))
}

/// The complex-linear composition `Q_a Q_b`.
pub fn quadratic_pair(a: &Element, b: &Element) -> Result<LinOp> {
    a.check_shape(b)?;
    let space = a.space();
    Ok(LinOp::from_fn(&space, |x| quad(a, &quad(b, x))))
}

fn spectral_norm(m: &CMat) -> f64 {
    crate::linalg::spectral_norm(m)
}

/// ℓ∞ sum of the block spectral norms.
pub fn triple_norm(x: &Element) -> f64 {
    x.blocks.iter().map(spectral_norm).fold(0.0, f64::max)
}

fn frob_inner(x: &CMat, y: &CMat) -> C64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum()
}

/// Trace form `⟨x,y⟩ = Tr(x□y)`; linear in `x`, conjugate-linear in `y`.
pub fn trace_inner(x: &Element, y: &Element) -> Result<C64> {
    x.check_shape(y)?;
    Ok(trace_inner_unchecked(x, y))
}

pub(crate) fn trace_inner_unchecked(x: &Element, y: &Element) -> C64 {
    x.blocks
        .iter()
        .zip(&y.blocks)
        .map(|(a, b)| {
            let w = (a.nrows() + a.ncols()) as f64 / 2.0;
            frob_inner(a, b) * w
        })
        .sum()
}

/// Normalised trace form `[x,y]`, rescaled per block so minimal tripotents
/// have unit length.
pub fn normalized_inner(x: &Element, y: &Element) -> Result<C64> {
    x.check_shape(y)?;
    Ok(normalized_inner_unchecked(x, y))
}

pub(crate) fn normalized_inner_unchecked(x: &Element, y: &Element) -> C64 {
    x.blocks
        .iter()
        .zip(&y.blocks)
        .map(|(a, b)| {
            let blk = Block { p: a.nrows(), q: a.ncols() };
            let normalizer = 1.0 + blk.peirce1_dim_minimal() as f64 / 2.0;
            frob_inner(a, b) * blk.trace_weight() / normalizer
        })
        .sum()
}

/// A complex-linear operator on V in the fixed vectorized basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LinOp {
    space: TripleSpace,
    matrix: CMat,
    self_adjoint_hint: bool,
}

impl LinOp {
    pub fn from_matrix(space: &TripleSpace, matrix: CMat) -> Result<Self> {
        let n = space.complex_dim();
        if matrix.shape() != (n, n) {
            return Err(JbhError::ShapeMismatch(format!(
                "operator matrix {}x{} on a space of dimension {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { space: space.clone(), matrix, self_adjoint_hint: false })
    }

    /// Materialises a map that the caller guarantees to be complex-linear.
    pub fn from_fn(space: &TripleSpace, f: impl Fn(&Element) -> Element) -> Self {
        let n = space.complex_dim();
        let mut matrix = CMat::zeros(n, n);
        for (k, e) in space.basis().iter().enumerate() {
            matrix.set_column(k, &f(e).to_vector());
        }
        Self { space: space.clone(), matrix, self_adjoint_hint: false }
    }

    pub fn identity(space: &TripleSpace) -> Self {
        let n = space.complex_dim();
        Self { space: space.clone(), matrix: CMat::identity(n, n), self_adjoint_hint: true }
    }

    pub fn zero(space: &TripleSpace) -> Self {
        let n = space.complex_dim();
        Self { space: space.clone(), matrix: CMat::zeros(n, n), self_adjoint_hint: true }
    }

    pub fn space(&self) -> &TripleSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn self_adjoint_hint(&self) -> bool {
        self.self_adjoint_hint
    }

    pub fn with_self_adjoint_hint(mut self, hint: bool) -> Self {
        self.self_adjoint_hint = hint;
        self
    }

    pub fn apply(&self, x: &Element) -> Element {
        Element::from_vector(&self.space, &(&self.matrix * x.to_vector()))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinOp) -> LinOp {
        assert_eq!(self.space, other.space, "operators act on different spaces");
        LinOp {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix,
            self_adjoint_hint: false,
        }
    }

    pub fn add(&self, other: &LinOp) -> LinOp {
        assert_eq!(self.space, other.space, "operators act on different spaces");
        LinOp {
            space: self.space.clone(),
            matrix: &self.matrix + &other.matrix,
            self_adjoint_hint: self.self_adjoint_hint && other.self_adjoint_hint,
        }
    }

    pub fn sub(&self, other: &LinOp) -> LinOp {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> LinOp {
        LinOp {
            space: self.space.clone(),
            matrix: &self.matrix * C64::new(s, 0.0),
            self_adjoint_hint: self.self_adjoint_hint,
        }
    }

    /// Adjoint with respect to the trace form `⟨·,·⟩`.
    pub fn adjoint(&self) -> LinOp {
        let w = self.space.trace_weights();
        let mut m = self.matrix.adjoint();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                m[(i, j)] *= w[j] / w[i];
            }
        }
        LinOp { space: self.space.clone(), matrix: m, self_adjoint_hint: self.self_adjoint_hint }
    }

    /// `‖M − M†‖_F / ‖M‖_F`, zero for the zero operator.
    pub fn self_adjoint_defect(&self) -> f64 {
        let norm = self.matrix.norm();
        if norm == 0.0 {
            return 0.0;
        }
        (&self.matrix - self.adjoint().matrix).norm() / norm
    }

    /// Hermitian part `(M + M†)/2` after asserting near self-adjointness.
    pub fn hermitian_part(&self, rel_tol: f64) -> Result<LinOp> {
        let asymmetry = self.self_adjoint_defect();
        if asymmetry > rel_tol {
            return Err(JbhError::NotSelfAdjoint { asymmetry });
        }
        let m = (&self.matrix + &self.adjoint().matrix) * C64::new(0.5, 0.0);
        Ok(LinOp { space: self.space.clone(), matrix: m, self_adjoint_hint: true })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Numerical rank: singular values above `rel_tol · σ_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let sv = crate::linalg::singular_values(&self.matrix);
        let max = sv.first().copied().unwrap_or(0.0);
        if max == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > rel_tol * max).count()
    }

    /// Largest eigenvalue of the Hermitian part, in the trace-form geometry.
    pub fn eigenvalues_hermitian(&self, rel_tol: f64) -> Result<Vec<f64>> {
        let h = self.hermitian_part(rel_tol)?;
        // In W^{1/2}-scaled coordinates the operator is Euclidean-Hermitian.
        let w = self.space.trace_weights();
        let mut m = h.matrix;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                m[(i, j)] *= (w[i] / w[j]).sqrt();
            }
        }
        let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let mut v = crate::linalg::hermitian_eigen(&m).0;
        v.sort_by(|a, b| b.total_cmp(a));
        Ok(v)
    }

    /// Euclidean operator norm of the coordinate matrix.
    pub fn spectral_norm_coords(&self) -> f64 {
        spectral_norm(&self.matrix)
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &LinOp) -> f64 {
        (&self.matrix - &other.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Orthonormal basis (for `⟨·,·⟩`) of the range of `op`, by a rank-revealing
/// SVD with threshold `rel_tol` relative to the largest singular value.
pub fn range_basis(op: &LinOp, rel_tol: f64) -> Vec<Element> {
    let space = op.space();
    let w = space.trace_weights();
    let mut scaled = op.matrix().clone();
    for i in 0..scaled.nrows() {
        let s = w[i].sqrt();
        for j in 0..scaled.ncols() {
            scaled[(i, j)] *= s;
        }
    }
    let svd = crate::linalg::svd(&scaled);
    let u = svd.u;
    let max = svd.s.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        return Vec::new();
    }
    svd.s
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > rel_tol * max)
        .map(|(k, _)| {
            let mut col: CVec = u.column(k).into_owned();
            for (i, z) in col.iter_mut().enumerate() {
                *z /= w[i].sqrt();
            }
            Element::from_vector(space, &col)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_element, seeded_rng};

    fn m22() -> TripleSpace {
        TripleSpace::matrix(2, 2).unwrap()
    }

    #[test]
    fn space_validation() {
        assert!(TripleSpace::new(vec![]).is_err());
        assert!(TripleSpace::from_shapes(&[(2, 0)]).is_err());
        let s = TripleSpace::from_shapes(&[(2, 3), (1, 1)]).unwrap();
        assert_eq!(s.complex_dim(), 7);
        assert_eq!(s.rank(), 3);
    }

    #[test]
    fn matrix_unit_is_tripotent() {
        let e = Element::unit(&m22(), 0, 0, 0);
        let t = triple_product(&e, &e, &e).unwrap();
        assert!((&t - &e).max_abs() < 1e-15);
    }

    #[test]
    fn zero_middle_slot_gives_zero() {
        let mut rng = seeded_rng(3);
        let s = m22();
        let x = random_element(&mut rng, &s, 1.0);
        let z = random_element(&mut rng, &s, 1.0);
        let t = triple_product(&x, &Element::zeros(&s), &z).unwrap();
        assert_eq!(t.max_abs(), 0.0);
    }

    #[test]
    fn c_star_identity_on_m23() {
        let mut rng = seeded_rng(11);
        let s = TripleSpace::matrix(2, 3).unwrap();
        for _ in 0..20 {
            let a = random_element(&mut rng, &s, 1.7);
            let aaa = triple_product(&a, &a, &a).unwrap();
            let n = triple_norm(&a);
            assert!((triple_norm(&aaa) - n.powi(3)).abs() < 1e-12 * n.powi(3).max(1.0));
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let a = Element::zeros(&m22());
        let b = Element::zeros(&TripleSpace::matrix(2, 3).unwrap());
        assert!(matches!(triple_product(&a, &b, &a), Err(JbhError::ShapeMismatch(_))));
        assert!(box_operator(&a, &b).is_err());
        assert!(trace_inner(&a, &b).is_err());
    }

    #[test]
    fn box_of_tripotent_has_peirce_spectrum() {
        let s = TripleSpace::matrix(3, 2).unwrap();
        let e = Element::unit(&s, 0, 1, 0);
        let eig = box_operator(&e, &e).unwrap().eigenvalues_hermitian(1e-9).unwrap();
        for l in eig {
            let near = [0.0, 0.5, 1.0].iter().any(|k| (l - k).abs() < 1e-12);
            assert!(near, "eigenvalue {l} outside {{0, 1/2, 1}}");
        }
    }

    #[test]
    fn box_with_zero_is_zero() {
        let mut rng = seeded_rng(5);
        let s = m22();
        let b = random_element(&mut rng, &s, 1.0);
        let op = box_operator(&Element::zeros(&s), &b).unwrap();
        assert_eq!(op.frobenius_norm(), 0.0);
    }

    #[test]
    fn box_matches_triple_product() {
        let mut rng = seeded_rng(17);
        let s = TripleSpace::from_shapes(&[(2, 3), (2, 2)]).unwrap();
        for _ in 0..100 {
            let a = random_element(&mut rng, &s, 1.0);
            let b = random_element(&mut rng, &s, 1.0);
            let x = random_element(&mut rng, &s, 1.0);
            let lhs = box_operator(&a, &b).unwrap().apply(&x);
            let rhs = triple_product(&a, &b, &x).unwrap();
            assert!((&lhs - &rhs).max_abs() < 1e-13);
        }
    }

    #[test]
    fn quadratic_conjugate_linearity() {
        let mut rng = seeded_rng(23);
        let s = TripleSpace::matrix(2, 3).unwrap();
        let a = random_element(&mut rng, &s, 1.0);
        let x = random_element(&mut rng, &s, 1.0);
        let i = C64::new(0.0, 1.0);
        let lhs = quadratic_apply(&a, &x.scale_c(i)).unwrap();
        let rhs = quadratic_apply(&a, &x).unwrap().scale_c(-i);
        assert!((&lhs - &rhs).max_abs() < 1e-14);
        let e = Element::unit(&s, 0, 0, 2);
        assert!((&quadratic_apply(&e, &e).unwrap() - &e).max_abs() < 1e-15);
    }

    #[test]
    fn triple_norm_examples() {
        assert_eq!(triple_norm(&Element::diag(2, 2, &[3.0, 1.0])), 3.0);
        assert_eq!(triple_norm(&Element::zeros(&m22())), 0.0);
    }

    #[test]
    fn trace_form_is_weighted_frobenius() {
        // Oracle: Tr(x□y) summed over the matrix-unit basis directly.
        let mut rng = seeded_rng(29);
        for (p, q) in [(2, 3), (3, 1), (4, 4)] {
            let s = TripleSpace::matrix(p, q).unwrap();
            let x = random_element(&mut rng, &s, 1.0);
            let y = random_element(&mut rng, &s, 1.0);
            let mut trace = C64::new(0.0, 0.0);
            for (k, u) in s.basis().iter().enumerate() {
                trace += tp(&x, &y, u).to_vector()[k];
            }
            let expected: C64 = x.block(0).iter().zip(y.block(0).iter()).map(|(a, b)| a * b.conj()).sum::<C64>()
                * ((p + q) as f64 / 2.0);
            assert!((trace - expected).norm() < 1e-12);
            assert!((trace_inner(&x, &y).unwrap() - trace).norm() < 1e-12);
        }
    }

    #[test]
    fn minimal_tripotent_trace_length() {
        let s = TripleSpace::matrix(2, 3).unwrap();
        let e = Element::unit(&s, 0, 1, 2);
        assert!((trace_inner(&e, &e).unwrap().re - 2.5).abs() < 1e-15);
        assert!((normalized_inner(&e, &e).unwrap().re - 1.0).abs() < 1e-15);
        let d = Element::unit(&s, 0, 0, 0);
        assert!(normalized_inner(&e, &d).unwrap().norm() < 1e-15);
    }

    #[test]
    fn normalized_form_counts_peirce_one_dimension() {
        // Oracle: dim V_1(E_11) from the eigen-equation e□e x = x/2 on matrix units.
        let s = TripleSpace::matrix(2, 3).unwrap();
        let e = Element::unit(&s, 0, 0, 0);
        let dim_v1 = s
            .basis()
            .iter()
            .filter(|u| (&tp(&e, &e, u) - &u.scale(0.5)).max_abs() < 1e-15)
            .count();
        assert_eq!(dim_v1, 3);
        let normalizer = 1.0 + dim_v1 as f64 / 2.0;
        assert_eq!(normalizer, 2.5);
        let mut rng = seeded_rng(31);
        let x = random_element(&mut rng, &s, 1.0);
        let y = random_element(&mut rng, &s, 1.0);
        let frob: C64 = x.block(0).iter().zip(y.block(0).iter()).map(|(a, b)| a * b.conj()).sum();
        assert!((normalized_inner(&x, &y).unwrap() - frob).norm() < 1e-12);
    }

    #[test]
    fn adjoint_respects_mixed_weights() {
        let mut rng = seeded_rng(37);
        let s = TripleSpace::from_shapes(&[(2, 3), (1, 1)]).unwrap();
        let m = CMat::from_fn(7, 7, |i, j| C64::new((i * 7 + j) as f64 * 0.1, (i as f64) - (j as f64)));
        let op = LinOp::from_matrix(&s, m).unwrap();
        let x = random_element(&mut rng, &s, 1.0);
        let y = random_element(&mut rng, &s, 1.0);
        let lhs = trace_inner(&op.apply(&x), &y).unwrap();
        let rhs = trace_inner(&x, &op.adjoint().apply(&y)).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn range_basis_is_orthonormal() {
        let s = TripleSpace::from_shapes(&[(2, 2), (1, 2)]).unwrap();
        let e = Element::unit(&s, 0, 0, 0);
        let op = quadratic_pair(&e, &e).unwrap();
        let basis = range_basis(&op, 1e-8);
        assert_eq!(basis.len(), 1);
        assert!((trace_inner(&basis[0], &basis[0]).unwrap().re - 1.0).abs() < 1e-12);
    }
}
