//! Spectral decompositions and the order and orthogonality of tripotents.
//!
//! For type-I blocks the spectral decomposition is the singular value
//! decomposition: `x = Σ σ_i u_i v_i*`, and each `u_i v_i*` is a minimal
//! tripotent. Blocks are decomposed independently and their terms merged.

use crate::error::{JbhError, Result};
use crate::linalg::{singular_values, svd};
use crate::triple::{
    box_operator, quad, quadratic_pair, real_combination, tp, triple_norm, CMat, Element, LinOp,
    TripleSpace, DEFAULT_TOL,
};

/// Coefficients closer than this are merged by [`unique_spectral`].
pub const GROUPING_TOL: f64 = 1e-8;

/// One term `λ e` of a spectral decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameEntry {
    pub coeff: f64,
    pub tripotent: Element,
}

/// Spectral data `x = Σ λ_i e_i` with nonincreasing `λ_i > 0` and mutually
/// orthogonal minimal tripotents `e_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub space: TripleSpace,
    pub entries: Vec<FrameEntry>,
}

impl Frame {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.coeff).collect()
    }

    pub fn tripotents(&self) -> Vec<Element> {
        self.entries.iter().map(|e| e.tripotent.clone()).collect()
    }

    pub fn reconstruct(&self) -> Element {
        let coeffs = self.coefficients();
        real_combination(&self.space, &coeffs, &self.tripotents())
    }

    /// Applies `f` to every coefficient, keeping the tripotents.
    pub fn map_coefficients(&self, f: impl Fn(f64) -> f64) -> Element {
        let coeffs: Vec<f64> = self.coefficients().into_iter().map(f).collect();
        real_combination(&self.space, &coeffs, &self.tripotents())
    }

    /// Worst violation of the frame invariants; used by test harnesses.
    pub fn invariant_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.entries.iter().enumerate() {
            worst = worst.max(tripotent_residual(&a.tripotent));
            for b in &self.entries[i + 1..] {
                worst = worst.max(orthogonality_residual(&a.tripotent, &b.tripotent));
            }
        }
        worst
    }
}

/// Output of [`unique_spectral`]: strictly decreasing positive coefficients,
/// each carrying the sum of its minimal tripotents.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupedFrame {
    pub space: TripleSpace,
    pub entries: Vec<FrameEntry>,
}

impl GroupedFrame {
    pub fn coefficients(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.coeff).collect()
    }

    /// Support tripotent `Σ c_g`.
    pub fn support(&self) -> Element {
        self.entries
            .iter()
            .fold(Element::zeros(&self.space), |acc, e| &acc + &e.tripotent)
    }

    pub fn reconstruct(&self) -> Element {
        self.entries
            .iter()
            .fold(Element::zeros(&self.space), |acc, e| &acc + &e.tripotent.scale(e.coeff))
    }
}

/// Spectral decomposition of `x`; zero coefficients are omitted.
pub fn spectral_decompose(x: &Element) -> Frame {
    let space = x.space();
    let scale = triple_norm(x).max(1.0);
    let mut entries = Vec::new();
    for (b, m) in x.blocks().iter().enumerate() {
        let d = svd(m);
        for (k, &s) in d.s.iter().enumerate() {
            if s <= 1e-14 * scale {
                continue;
            }
            let t: CMat = d.u.column(k) * d.v.column(k).adjoint();
            let mut e = Element::zeros(&space);
            e.blocks_mut()[b] = t;
            entries.push(FrameEntry { coeff: s, tripotent: e });
        }
    }
    entries.sort_by(|a, b| b.coeff.total_cmp(&a.coeff));
    Frame { space, entries }
}

/// Singular values of all blocks, merged and sorted nonincreasing,
/// including zeros, `rank(V)` values in total.
pub fn spectral_values(x: &Element) -> Vec<f64> {
    let mut v: Vec<f64> = x
        .blocks()
        .iter()
        .flat_map(singular_values)
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Unique spectral decomposition with the default grouping tolerance.
pub fn unique_spectral(x: &Element) -> GroupedFrame {
    unique_spectral_with_tol(x, GROUPING_TOL)
}

/// Groups consecutive frame coefficients differing by less than `tol`. The
/// group coefficient is the mean of its members.
pub fn unique_spectral_with_tol(x: &Element, tol: f64) -> GroupedFrame {
    group_frame(&spectral_decompose(x), tol)
}

pub fn group_frame(frame: &Frame, tol: f64) -> GroupedFrame {
    let mut entries: Vec<FrameEntry> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut last: Option<f64> = None;
    for e in &frame.entries {
        match (last, entries.last_mut()) {
            (Some(prev), Some(g)) if (prev - e.coeff).abs() < tol => {
                let n = counts.last_mut().expect("group count present");
                g.coeff = (g.coeff * *n as f64 + e.coeff) / (*n + 1) as f64;
                *n += 1;
                g.tripotent = &g.tripotent + &e.tripotent;
            }
            _ => {
                entries.push(e.clone());
                counts.push(1);
            }
        }
        last = Some(e.coeff);
    }
    GroupedFrame { space: frame.space.clone(), entries }
}

/// Whether `a` and `b` have the same unique spectral decomposition: equal
/// group counts, coefficients and grouped tripotents, all within `tol`.
pub fn grouped_equal(a: &Element, b: &Element, tol: f64) -> bool {
    if !a.same_shape(b) {
        return false;
    }
    let ga = unique_spectral(a);
    let gb = unique_spectral(b);
    ga.entries.len() == gb.entries.len()
        && ga.entries.iter().zip(&gb.entries).all(|(x, y)| {
            (x.coeff - y.coeff).abs() < tol && triple_norm(&(&x.tripotent - &y.tripotent)) < tol
        })
}

/// `‖{e,e,e} − e‖`.
pub fn tripotent_residual(e: &Element) -> f64 {
    triple_norm(&(&tp(e, e, e) - e))
}

pub fn is_tripotent(e: &Element) -> bool {
    tripotent_residual(e) < DEFAULT_TOL
}

pub fn ensure_tripotent(e: &Element) -> Result<()> {
    let residual = tripotent_residual(e);
    if residual < DEFAULT_TOL {
        Ok(())
    } else {
        Err(JbhError::NotTripotent { residual })
    }
}

/// Frobenius norm of the coordinate matrix of `a□b`.
pub fn orthogonality_residual(a: &Element, b: &Element) -> f64 {
    match box_operator(a, b) {
        Ok(op) => op.frobenius_norm(),
        Err(_) => f64::INFINITY,
    }
}

pub fn is_orthogonal(a: &Element, b: &Element) -> bool {
    is_orthogonal_with_tol(a, b, DEFAULT_TOL)
}

pub fn is_orthogonal_with_tol(a: &Element, b: &Element, tol: f64) -> bool {
    orthogonality_residual(a, b) < tol
}

/// Checks that a list of tripotents is mutually orthogonal.
pub fn ensure_orthogonal(tripotents: &[Element]) -> Result<()> {
    for (i, a) in tripotents.iter().enumerate() {
        for b in &tripotents[i + 1..] {
            let residual = orthogonality_residual(a, b);
            if residual >= DEFAULT_TOL {
                return Err(JbhError::NotOrthogonal { residual });
            }
        }
    }
    Ok(())
}

/// Complex dimension of the Peirce-2 space `V_2(e)`.
pub fn peirce2_dim(e: &Element) -> usize {
    quadratic_pair(e, e).map(|op| op.rank(1e-8)).unwrap_or(0)
}

pub fn is_minimal_tripotent(e: &Element) -> bool {
    is_tripotent(e) && peirce2_dim(e) == 1
}

pub fn ensure_minimal(e: &Element) -> Result<()> {
    ensure_tripotent(e)?;
    let dim = peirce2_dim(e);
    if dim == 1 {
        Ok(())
    } else {
        Err(JbhError::NotMinimal { dim })
    }
}

/// `c ≤ e`, tested as `P_2(c)e = c`.
pub fn tripotent_leq(c: &Element, e: &Element) -> Result<bool> {
    tripotent_leq_with_tol(c, e, DEFAULT_TOL)
}

pub fn tripotent_leq_with_tol(c: &Element, e: &Element, tol: f64) -> Result<bool> {
    c.check_shape(e)?;
    ensure_tripotent(c)?;
    ensure_tripotent(e)?;
    let p2 = quad(c, &quad(c, e));
    Ok(triple_norm(&(&p2 - c)) < tol)
}

/// Order test through `{c,e,c} + {c,c,e} = 2c`.
pub fn tripotent_leq_identity(c: &Element, e: &Element, tol: f64) -> Result<bool> {
    c.check_shape(e)?;
    ensure_tripotent(c)?;
    ensure_tripotent(e)?;
    let lhs = &tp(c, e, c) + &tp(c, c, e);
    Ok(triple_norm(&(&lhs - &c.scale(2.0))) < tol)
}

/// Order test through `B(e,c)w = 0` for `w ∈ V_2(c)`.
pub fn tripotent_leq_bergman(c: &Element, e: &Element, tol: f64) -> Result<bool> {
    c.check_shape(e)?;
    ensure_tripotent(c)?;
    ensure_tripotent(e)?;
    let b = crate::peirce::bergman(e, c)?;
    let p2: LinOp = quadratic_pair(c, c)?;
    let basis = crate::triple::range_basis(&p2, 1e-8);
    let worst = basis
        .iter()
        .map(|w| triple_norm(&b.apply(w)))
        .fold(0.0, f64::max);
    Ok(worst < tol)
}
