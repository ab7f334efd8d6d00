//! Horofunctions of the normed space `(V, ‖·‖)`.
//!
//! A horofunction is determined by orthogonal minimal tripotents
//! `e_1, …, e_p` and weights `α_i ≥ 0` with `min α_i = 0`:
//!
//! `h(x) = Λ_{V_2(e_I)}(−½(e_I□P_2(e_I)x + P_2(e_I)x□e_I) − Σ α_i e_i□e_i)`,
//!
//! where `Λ_W(T)` is the largest eigenvalue of `T` compressed to `W`.

use serde::Serialize;

use crate::error::{JbhError, Result};
use crate::extended::Extended;
use crate::extrapolate::{extrapolate_to_zero, Extrapolation};
use crate::linalg::hermitian_eigen;
use crate::metric_d::{same_support, validate_frame};
use crate::spectral::is_tripotent;
use crate::triple::{
    box_operator, quadratic_pair, range_basis, real_combination, sum_elements, trace_inner_unchecked,
    triple_norm, CMat, Element, LinOp, TripleSpace,
};

/// Relative singular-value threshold used to extract `V_2(e)`.
pub const RANGE_TOL: f64 = 1e-8;

/// Largest weight that still counts as convergent in
/// [`limit_datum_sequence`].
pub const DIVERGENCE_THRESHOLD: f64 = 1e3;

const HERMITIAN_TOL: f64 = 1e-9;

/// Canonical data of a horofunction on `V`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryDatumV {
    space: TripleSpace,
    tripotents: Vec<Element>,
    alpha: Vec<f64>,
}

impl BoundaryDatumV {
    /// Validates the frame and weights and sorts weights nondecreasing.
    pub fn new(tripotents: Vec<Element>, alpha: Vec<f64>) -> Result<Self> {
        let space = validate_frame(&tripotents, alpha.len())?;
        crate::metric_d::validate_alpha(&alpha)?;
        let mut idx: Vec<usize> = (0..alpha.len()).collect();
        idx.sort_by(|&a, &b| alpha[a].total_cmp(&alpha[b]));
        Ok(Self {
            space,
            tripotents: idx.iter().map(|&i| tripotents[i].clone()).collect(),
            alpha: idx.iter().map(|&i| alpha[i]).collect(),
        })
    }

    pub fn space(&self) -> &TripleSpace {
        &self.space
    }

    pub fn tripotents(&self) -> &[Element] {
        &self.tripotents
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// `e_I = Σ e_i`.
    pub fn support(&self) -> Element {
        sum_elements(&self.space, &self.tripotents)
    }

    /// `a = Σ α_i e_i`.
    pub fn weighted(&self) -> Element {
        real_combination(&self.space, &self.alpha, &self.tripotents)
    }
}

/// Orthonormal basis of `V_2(e)` for `⟨·,·⟩`.
pub fn peirce2_basis(e: &Element) -> Result<Vec<Element>> {
    Ok(range_basis(&quadratic_pair(e, e)?, RANGE_TOL))
}

/// Compression `[⟨T b_j, b_i⟩]` of `t` to the span of `basis`.
pub fn compress(t: &LinOp, basis: &[Element]) -> CMat {
    let images: Vec<Element> = basis.iter().map(|b| t.apply(b)).collect();
    CMat::from_fn(basis.len(), basis.len(), |i, j| trace_inner_unchecked(&images[j], &basis[i]))
}

fn compressed_spectrum(t: &LinOp, basis: &[Element]) -> Result<Vec<f64>> {
    if basis.is_empty() {
        return Err(JbhError::InvalidDatum("empty subspace".into()));
    }
    let m = compress(t, basis);
    let asym = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if asym > HERMITIAN_TOL * scale {
        return Err(JbhError::NotSelfAdjoint { asymmetry: asym });
    }
    let h = (&m + m.adjoint()).scale(0.5);
    Ok(hermitian_eigen(&h).0)
}

/// `Λ_W(T)`: largest eigenvalue of `T` compressed to the span of an
/// orthonormal `basis`.
pub fn lambda_restricted(t: &LinOp, basis: &[Element]) -> Result<f64> {
    Ok(*compressed_spectrum(t, basis)?.last().expect("nonempty spectrum"))
}

/// The operator whose top eigenvalue on `V_2(e_I)` is `h(x)`.
pub fn horofunction_v_operator(datum: &BoundaryDatumV, x: &Element) -> Result<LinOp> {
    x.check_space(&datum.space)?;
    let e = datum.support();
    let y = quadratic_pair(&e, &e)?.apply(x);
    let mut t = box_operator(&e, &y)?.add(&box_operator(&y, &e)?).scale(-0.5);
    for (ei, &a) in datum.tripotents.iter().zip(&datum.alpha) {
        if a != 0.0 {
            t = t.sub(&box_operator(ei, ei)?.scale(a));
        }
    }
    Ok(t)
}

pub fn horofunction_v_eval(datum: &BoundaryDatumV, x: &Element) -> Result<f64> {
    let basis = peirce2_basis(&datum.support())?;
    lambda_restricted(&horofunction_v_operator(datum, x)?, &basis)
}

/// Smallest admissible index of [`approach_sequence_v`].
pub fn approach_threshold_v(datum: &BoundaryDatumV) -> f64 {
    datum.alpha.iter().copied().fold(0.0, f64::max)
}

/// `a_k = k e_I − Σ α_i e_i`.
pub fn approach_sequence_v(datum: &BoundaryDatumV, k: f64) -> Result<Element> {
    let threshold = approach_threshold_v(datum);
    if k < threshold || k <= 0.0 {
        return Err(JbhError::BelowThreshold { k, threshold });
    }
    let c: Vec<f64> = datum.alpha.iter().map(|a| k - a).collect();
    Ok(real_combination(&datum.space, &c, &datum.tripotents))
}

/// `h_y(x) = ‖x − y‖ − ‖y‖`.
pub fn metric_functional_v(y: &Element, x: &Element) -> Result<f64> {
    y.check_shape(x)?;
    Ok(triple_norm(&(x - y)) - triple_norm(y))
}

/// Ladder `k = 2^6, …, 2^20`.
pub fn default_k_ladder_v() -> Vec<f64> {
    (6..=20).map(|m| 2f64.powi(m)).collect()
}

/// Sequence values along `a_k` and their extrapolation in `1/k`.
#[derive(Clone, Debug, Serialize)]
pub struct SequenceLimit {
    pub ladder: Vec<(f64, f64)>,
    pub extrapolation: Extrapolation,
}

pub fn horofunction_v_limit(datum: &BoundaryDatumV, x: &Element, ks: &[f64], tol: f64) -> Result<SequenceLimit> {
    x.check_space(&datum.space)?;
    let threshold = approach_threshold_v(datum);
    let mut ladder = Vec::new();
    for &k in ks.iter().filter(|&&k| k >= threshold && k > 0.0) {
        ladder.push((k, metric_functional_v(&approach_sequence_v(datum, k)?, x)?));
    }
    if ladder.len() < 2 {
        return Err(JbhError::NonConvergence("too few admissible sequence indices".into()));
    }
    let h: Vec<f64> = ladder.iter().map(|(k, _)| 1.0 / k).collect();
    let f: Vec<f64> = ladder.iter().map(|(_, v)| *v).collect();
    let extrapolation = extrapolate_to_zero(&h, &f, 4, tol);
    Ok(SequenceLimit { ladder, extrapolation })
}

/// Limit of a convergent sequence of data. Weights above
/// [`DIVERGENCE_THRESHOLD`] in the last datum are treated as divergent and
/// their indices dropped; the remaining tripotents and weights are taken
/// from the last datum.
pub fn limit_datum_sequence(data: &[BoundaryDatumV]) -> Result<BoundaryDatumV> {
    let last = data.last().ok_or(JbhError::EmptyLimit)?;
    if data.iter().any(|d| d.len() != last.len() || d.space != last.space) {
        return Err(JbhError::InvalidDatum("data in a sequence must share space and length".into()));
    }
    let keep: Vec<usize> = (0..last.len()).filter(|&i| last.alpha[i] <= DIVERGENCE_THRESHOLD).collect();
    if keep.is_empty() {
        return Err(JbhError::EmptyLimit);
    }
    let min = keep.iter().map(|&i| last.alpha[i]).fold(f64::INFINITY, f64::min);
    BoundaryDatumV::new(
        keep.iter().map(|&i| last.tripotents[i].clone()).collect(),
        keep.iter().map(|&i| last.alpha[i] - min).collect(),
    )
}

/// Whether `h` and `h2` lie in the same part: equal supports.
pub fn same_part_v(h: &BoundaryDatumV, h2: &BoundaryDatumV) -> bool {
    h.space == h2.space && same_support(&h.support(), &h2.support())
}

/// Whether `h` and `h2` define the same horofunction.
pub fn data_equal_v(h: &BoundaryDatumV, h2: &BoundaryDatumV) -> bool {
    same_part_v(h, h2) && triple_norm(&(&h.weighted() - &h2.weighted())) < crate::metric_d::SUPPORT_TOL
}

/// `H(h,h') = Λ_{V_2(e_I)}((a − b)□e_I)`, or `+∞` for different supports.
pub fn detour_cost_v(h: &BoundaryDatumV, h2: &BoundaryDatumV) -> Result<Extended> {
    if h.space != h2.space {
        return Err(JbhError::ShapeMismatch(format!("{} vs {}", h.space, h2.space)));
    }
    if !same_part_v(h, h2) {
        return Ok(Extended::Infinite);
    }
    let e = h.support();
    let t = box_operator(&(&h.weighted() - &h2.weighted()), &e)?;
    Ok(Extended::Finite(lambda_restricted(&t, &peirce2_basis(&e)?)?.max(0.0)))
}

/// `δ(h,h') = H(h,h') + H(h',h)`.
pub fn detour_distance_v(h: &BoundaryDatumV, h2: &BoundaryDatumV) -> Result<Extended> {
    Ok(detour_cost_v(h, h2)?.add(detour_cost_v(h2, h)?))
}

/// `‖x‖_var = λ_max − λ_min` of `x□e` on `V_2(e)`, for `x` in
/// `A(e) = {x : Q_e x = x}`.
pub fn variation_seminorm(x: &Element, e: &Element) -> Result<f64> {
    x.check_shape(e)?;
    if !is_tripotent(e) {
        return Err(JbhError::NotTripotent { residual: crate::spectral::tripotent_residual(e) });
    }
    let residual = triple_norm(&(&crate::triple::quad(e, x) - x));
    if residual > 1e-9 * triple_norm(x).max(1.0) {
        return Err(JbhError::NotInSelfAdjointPart { residual });
    }
    let eig = compressed_spectrum(&box_operator(x, e)?, &peirce2_basis(e)?)?;
    Ok(eig.last().expect("nonempty") - eig.first().expect("nonempty"))
}
