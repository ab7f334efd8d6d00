//! The Carathéodory distance on the open unit ball `D` and its horofunctions.
//!
//! A horofunction of `(D, ρ)` with base point 0 is determined by orthogonal
//! minimal tripotents `e_1, …, e_p` and weights `λ_i ∈ (0,1]` with
//! `max λ_i = 1`:
//!
//! `h(z) = ½ log ‖Σ_{1≤i≤j≤p} λ_i λ_j B(z,z)^{-1/2} B(z,e) P_ij‖`,
//! with `e = e_1 + … + e_p`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{JbhError, Result};
use crate::extended::Extended;
use crate::extrapolate::{extrapolate_to_zero, fit_slope, Extrapolation};
use crate::opnorm::{induced_op_norm_with, OpNormOptions};
use crate::peirce::{bergman, bergman_half_powers, joint_peirce_unchecked, Mobius};
use crate::spectral::{ensure_minimal, ensure_orthogonal, grouped_equal};
use crate::triple::{quadratic_pair, real_combination, triple_norm, Element, LinOp, TripleSpace};

/// Tolerance for deciding `e = c` between support tripotents.
pub const SUPPORT_TOL: f64 = 1e-7;

/// Canonical data of a horofunction on `D`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryDatumD {
    space: TripleSpace,
    tripotents: Vec<Element>,
    lambda: Vec<f64>,
}

impl BoundaryDatumD {
    /// Validates the frame and weights and sorts weights nonincreasing.
    pub fn new(tripotents: Vec<Element>, lambda: Vec<f64>) -> Result<Self> {
        let space = validate_frame(&tripotents, lambda.len())?;
        if let Some(l) = lambda.iter().find(|l| !(**l > 0.0 && **l <= 1.0)) {
            return Err(JbhError::InvalidDatum(format!("weights must lie in (0,1], got {l}")));
        }
        let max = lambda.iter().copied().fold(0.0, f64::max);
        if (max - 1.0).abs() > 1e-12 {
            return Err(JbhError::InvalidDatum(format!("largest weight must be 1, got {max}")));
        }
        let mut idx: Vec<usize> = (0..lambda.len()).collect();
        idx.sort_by(|&a, &b| lambda[b].total_cmp(&lambda[a]));
        Ok(Self {
            space,
            tripotents: idx.iter().map(|&i| tripotents[i].clone()).collect(),
            lambda: idx.iter().map(|&i| lambda[i]).collect(),
        })
    }

    pub fn space(&self) -> &TripleSpace {
        &self.space
    }

    pub fn tripotents(&self) -> &[Element] {
        &self.tripotents
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    /// Support tripotent `e = Σ e_i`.
    pub fn support(&self) -> Element {
        crate::triple::sum_elements(&self.space, &self.tripotents)
    }

    /// `a = Σ λ_i e_i`.
    pub fn weighted(&self) -> Element {
        real_combination(&self.space, &self.lambda, &self.tripotents)
    }

    /// `Σ λ_i λ_j P_ij` over `1 ≤ i ≤ j ≤ p`.
    pub fn weight_operator(&self) -> LinOp {
        let sys = joint_peirce_unchecked(&self.space, &self.tripotents);
        let l = &self.lambda;
        sys.combine(|i, j| if i == 0 { 0.0 } else { l[i - 1] * l[j - 1] })
    }
}

/// Checks that `tripotents` is a nonempty family of orthogonal minimal
/// tripotents of one space, with `n` weights attached.
pub(crate) fn validate_frame(tripotents: &[Element], n: usize) -> Result<TripleSpace> {
    let first = tripotents
        .first()
        .ok_or_else(|| JbhError::InvalidDatum("at least one tripotent is required".into()))?;
    if tripotents.len() != n {
        return Err(JbhError::InvalidDatum(format!(
            "{} tripotents but {} weights",
            tripotents.len(),
            n
        )));
    }
    let space = first.space();
    for e in tripotents {
        e.check_space(&space)?;
        ensure_minimal(e)?;
    }
    ensure_orthogonal(tripotents)?;
    Ok(space)
}

pub(crate) fn ensure_in_ball(x: &Element) -> Result<f64> {
    let norm = triple_norm(x);
    if norm < 1.0 {
        Ok(norm)
    } else {
        Err(JbhError::OutsideBall { norm })
    }
}

/// `ρ(x,y) = atanh ‖g_{-x}(y)‖`.
pub fn caratheodory_distance(x: &Element, y: &Element) -> Result<f64> {
    x.check_shape(y)?;
    ensure_in_ball(x)?;
    ensure_in_ball(y)?;
    let g = Mobius::new(&-x)?.apply(y)?;
    Ok(triple_norm(&g).min(1.0).atanh())
}

fn half_log_form(y_norm: f64, g_norm: f64) -> f64 {
    let ratio = ((1.0 - y_norm) * (1.0 + y_norm)) / ((1.0 - g_norm) * (1.0 + g_norm));
    let corr = (1.0 + g_norm) / (1.0 + y_norm);
    0.5 * (ratio * corr * corr).ln()
}

/// `h_y(z) = ρ(z,y) − ρ(0,y)`, evaluated through `‖g_{-y}(z)‖`.
pub fn metric_functional_d(y: &Element, z: &Element) -> Result<f64> {
    y.check_shape(z)?;
    let yn = ensure_in_ball(y)?;
    ensure_in_ball(z)?;
    let g = Mobius::new(&-y)?.apply(z)?;
    Ok(half_log_form(yn, triple_norm(&g)))
}

/// The same functional evaluated through `‖g_{-z}(y)‖`.
pub fn metric_functional_d_swapped(y: &Element, z: &Element) -> Result<f64> {
    y.check_shape(z)?;
    let yn = ensure_in_ball(y)?;
    ensure_in_ball(z)?;
    let g = Mobius::new(&-z)?.apply(y)?;
    Ok(half_log_form(yn, triple_norm(&g)))
}

/// Both ratio expressions `½ log((1−‖y‖²)/(1−‖g‖²))`, with `g = g_{-y}(z)`
/// and with `g = g_{-z}(y)`, whose common limit along an approach
/// sequence is the horofunction.
pub fn limit_ratio_forms(y: &Element, z: &Element) -> Result<(f64, f64)> {
    y.check_shape(z)?;
    let yn = ensure_in_ball(y)?;
    ensure_in_ball(z)?;
    let g1 = triple_norm(&Mobius::new(&-y)?.apply(z)?);
    let g2 = triple_norm(&Mobius::new(&-z)?.apply(y)?);
    let f = |g: f64| 0.5 * (((1.0 - yn) * (1.0 + yn)) / ((1.0 - g) * (1.0 + g))).ln();
    Ok((f(g1), f(g2)))
}

/// Evaluation route for [`horofunction_d_eval`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HoroMethod {
    Extrapolate,
    InducedNorm,
}

impl std::str::FromStr for HoroMethod {
    type Err = JbhError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "extrapolate" => Ok(HoroMethod::Extrapolate),
            "induced_norm" | "induced-norm" => Ok(HoroMethod::InducedNorm),
            other => Err(JbhError::UnknownName(format!("method {other:?}"))),
        }
    }
}

/// Ladder of sequence indices `k = 2^4, …, 2^20`.
pub fn default_k_ladder() -> Vec<f64> {
    (4..=20).map(|m| 2f64.powi(m)).collect()
}

/// Options for the sequence-limit evaluation.
#[derive(Clone, Debug)]
pub struct ExtrapolationOptions {
    pub ks: Vec<f64>,
    pub max_order: usize,
    pub tol: f64,
    /// Also evaluate the induced-norm route.
    pub secondary: bool,
}

impl Default for ExtrapolationOptions {
    fn default() -> Self {
        Self { ks: default_k_ladder(), max_order: 4, tol: 1e-6, secondary: false }
    }
}

/// Detailed result of a horofunction evaluation.
#[derive(Clone, Debug, Serialize)]
pub struct HoroEvaluation {
    pub value: f64,
    pub method: HoroMethod,
    /// Raw sequence values `½ log((1−‖y_k‖²)/(1−‖g_{-y_k}(z)‖²))`.
    pub ladder: Vec<(f64, f64)>,
    pub extrapolation: Option<Extrapolation>,
    /// Induced-norm value, when requested alongside the extrapolation.
    pub secondary: Option<f64>,
}

/// Smallest admissible sequence index: all radicands in the approach
/// sequence are positive exactly when `k` exceeds this value.
pub fn approach_threshold_d(datum: &BoundaryDatumD) -> f64 {
    let lmin = datum.lambda.iter().copied().fold(1.0, f64::min);
    (1.0 + (1.0 - lmin * lmin).max(0.0).sqrt()) / (lmin * lmin)
}

/// `y_k = (1 − 1/k) e_1 + Σ_{i≥2} α_ik e_i`, `α_ik = √(1 − (2k−1)/(k²λ_i²))`.
pub fn approach_sequence_d(datum: &BoundaryDatumD, k: f64) -> Result<Element> {
    let threshold = approach_threshold_d(datum);
    if k <= threshold || k < 1.0 {
        return Err(JbhError::BelowThreshold { k, threshold });
    }
    let coeffs: Vec<f64> = datum
        .lambda
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            if i == 0 {
                1.0 - 1.0 / k
            } else {
                (1.0 - (2.0 * k - 1.0) / (k * k * l * l)).sqrt()
            }
        })
        .collect();
    Ok(real_combination(&datum.space, &coeffs, &datum.tripotents))
}

/// `½ log((1−‖y‖²)/(1−‖g_{-y}(z)‖²))`.
pub fn limit_ratio(y: &Element, z: &Element) -> Result<f64> {
    let yn = ensure_in_ball(y)?;
    let g = triple_norm(&Mobius::new(&-y)?.apply(z)?);
    Ok(0.5 * (((1.0 - yn) * (1.0 + yn)) / ((1.0 - g) * (1.0 + g))).ln())
}

/// The operator `Σ λ_i λ_j B(z,z)^{-1/2} B(z,e) P_ij` of the closed form.
pub fn horofunction_d_operator(datum: &BoundaryDatumD, z: &Element) -> Result<LinOp> {
    z.check_space(&datum.space)?;
    ensure_in_ball(z)?;
    let b_inv = bergman_half_powers(z, -1)?;
    let b_ze = bergman(z, &datum.support())?;
    Ok(b_inv.compose(&b_ze).compose(&datum.weight_operator()))
}

/// Horofunction value at `z` by the chosen route.
pub fn horofunction_d_eval(datum: &BoundaryDatumD, z: &Element, method: HoroMethod) -> Result<f64> {
    let ev = horofunction_d_eval_detailed(datum, z, method, &ExtrapolationOptions::default())?;
    if let Some(e) = &ev.extrapolation {
        if !e.converged {
            return Err(JbhError::NonConvergence(format!(
                "extrapolated horofunction value {} has error estimate {:.3e}",
                e.value, e.error_estimate
            )));
        }
    }
    Ok(ev.value)
}

pub fn horofunction_d_eval_detailed(
    datum: &BoundaryDatumD,
    z: &Element,
    method: HoroMethod,
    opts: &ExtrapolationOptions,
) -> Result<HoroEvaluation> {
    z.check_space(&datum.space)?;
    ensure_in_ball(z)?;
    match method {
        HoroMethod::InducedNorm => {
            let t = horofunction_d_operator(datum, z)?;
            let n = induced_op_norm_with(&t, &OpNormOptions::default()).value;
            Ok(HoroEvaluation { value: 0.5 * n.ln(), method, ladder: Vec::new(), extrapolation: None, secondary: None })
        }
        HoroMethod::Extrapolate => {
            let threshold = approach_threshold_d(datum);
            let ks: Vec<f64> = opts.ks.iter().copied().filter(|&k| k > threshold).collect();
            let ladder = ks
                .par_iter()
                .map(|&k| Ok((k, limit_ratio(&approach_sequence_d(datum, k)?, z)?)))
                .collect::<Result<Vec<_>>>()?;
            if ladder.len() < 2 {
                return Err(JbhError::NonConvergence("too few admissible sequence indices".into()));
            }
            let h: Vec<f64> = ladder.iter().map(|(k, _)| 1.0 / k).collect();
            let f: Vec<f64> = ladder.iter().map(|(_, v)| *v).collect();
            let e = extrapolate_to_zero(&h, &f, opts.max_order, opts.tol);
            let secondary = if opts.secondary {
                Some(horofunction_d_eval_detailed(datum, z, HoroMethod::InducedNorm, opts)?.value)
            } else {
                None
            };
            Ok(HoroEvaluation { value: e.value, method, ladder, extrapolation: Some(e), secondary })
        }
    }
}

/// `γ(t) = Σ tanh(t − α_i) e_i`.
pub fn geodesic_gamma(tripotents: &[Element], alpha: &[f64], t: f64) -> Result<Element> {
    let space = validate_frame(tripotents, alpha.len())?;
    validate_alpha(alpha)?;
    if !(t >= 0.0) {
        return Err(JbhError::InvalidDatum(format!("geodesic parameter must be nonnegative, got {t}")));
    }
    Ok(geodesic_unchecked(&space, tripotents, alpha, t))
}

pub(crate) fn geodesic_unchecked(space: &TripleSpace, tripotents: &[Element], alpha: &[f64], t: f64) -> Element {
    let c: Vec<f64> = alpha.iter().map(|a| (t - a).tanh()).collect();
    real_combination(space, &c, tripotents)
}

pub(crate) fn validate_alpha(alpha: &[f64]) -> Result<()> {
    if let Some(a) = alpha.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
        return Err(JbhError::InvalidDatum(format!("weights must be finite and nonnegative, got {a}")));
    }
    let min = alpha.iter().copied().fold(f64::INFINITY, f64::min);
    if min.abs() > 1e-12 {
        return Err(JbhError::InvalidDatum(format!("smallest weight must be 0, got {min}")));
    }
    Ok(())
}

/// `ρ(x_n,x_m) + ρ(x_m,x_0) − ρ(x_n,x_0)`.
pub fn almost_geodesic_defect(points: &[Element], n: usize, m: usize) -> Result<f64> {
    if n >= points.len() || m > n {
        return Err(JbhError::Index(format!(
            "need m ≤ n < {}, got n = {n}, m = {m}",
            points.len()
        )));
    }
    let d = caratheodory_distance;
    Ok(d(&points[n], &points[m])? + d(&points[m], &points[0])? - d(&points[n], &points[0])?)
}

/// Evaluation route for [`detour_cost_d`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DetourMethod {
    Closed,
    Limit,
}

impl std::str::FromStr for DetourMethod {
    type Err = JbhError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(DetourMethod::Closed),
            "limit" => Ok(DetourMethod::Limit),
            other => Err(JbhError::UnknownName(format!("method {other:?}"))),
        }
    }
}

/// Geodesic parameters used by the limit route.
pub const DETOUR_T_GRID: [f64; 5] = [4.0, 6.0, 8.0, 10.0, 12.0];

/// Detail of a limit-route detour cost.
#[derive(Clone, Debug, Serialize)]
pub struct DetourProfile {
    /// `(t, t + h'(γ(t)))` pairs.
    pub profile: Vec<(f64, f64)>,
    /// Least-squares slope of the profile; near zero on a plateau.
    pub slope: f64,
    pub value: f64,
}

pub fn same_support(e: &Element, c: &Element) -> bool {
    e.same_shape(c) && triple_norm(&(e - c)) < SUPPORT_TOL
}

/// `H(h, h')`: infinite unless the supports agree.
pub fn detour_cost_d(h: &BoundaryDatumD, h2: &BoundaryDatumD, method: DetourMethod) -> Result<Extended> {
    if h.space != h2.space {
        return Err(JbhError::ShapeMismatch(format!("{} vs {}", h.space, h2.space)));
    }
    if !same_support(&h.support(), &h2.support()) {
        return Ok(Extended::Infinite);
    }
    match method {
        DetourMethod::Closed => Ok(Extended::Finite(detour_closed(h, h2)?.max(0.0))),
        DetourMethod::Limit => Ok(Extended::Finite(detour_limit_profile(h, h2)?.value.max(0.0))),
    }
}

/// `½ log ‖Q_{a^{-1}} Q_e Q_b Q_e P_2(e)‖` for equal supports.
fn detour_closed(h: &BoundaryDatumD, h2: &BoundaryDatumD) -> Result<f64> {
    let e = h.support();
    let inv: Vec<f64> = h.lambda.iter().map(|l| 1.0 / l).collect();
    let a_inv = real_combination(&h.space, &inv, &h.tripotents);
    let b = h2.weighted();
    let p2 = quadratic_pair(&e, &e)?;
    let op = quadratic_pair(&a_inv, &e)?.compose(&quadratic_pair(&b, &e)?).compose(&p2);
    Ok(0.5 * induced_op_norm_with(&op, &OpNormOptions::default()).value.ln())
}

/// Profile of `t + h'(γ(t))` along the geodesic converging to `h`.
pub fn detour_limit_profile(h: &BoundaryDatumD, h2: &BoundaryDatumD) -> Result<DetourProfile> {
    let alpha: Vec<f64> = h.lambda.iter().map(|l| -l.ln()).collect();
    let mut profile = Vec::new();
    for &t in &DETOUR_T_GRID {
        let s: Vec<f64> = alpha.iter().map(|a| t - a).collect();
        profile.push((t, horofunction_d_on_flat(h2, &h.tripotents, &s, t)?));
    }
    let ts: Vec<f64> = profile.iter().map(|p| p.0).collect();
    let vs: Vec<f64> = profile.iter().map(|p| p.1).collect();
    let value = *vs.last().expect("nonempty grid");
    Ok(DetourProfile { slope: fit_slope(&ts, &vs), value, profile })
}

/// `h(z) + shift` at `z = Σ tanh(s_i) f_i`, for a frame `f` whose sum is the
/// support of `datum`.
///
/// On such points `B(z,z)^{-1/2} B(z,e) = Σ_{0≤i≤j} w_i w_j P_ij(f)` with
/// `w_i = e^{-s_i}` and `w_0 = 1`, so no cancellation occurs however close
/// `z` is to the boundary.
pub fn horofunction_d_on_flat(datum: &BoundaryDatumD, frame: &[Element], s: &[f64], shift: f64) -> Result<f64> {
    let space = validate_frame(frame, s.len())?;
    if space != datum.space {
        return Err(JbhError::ShapeMismatch(format!("{} vs {}", space, datum.space)));
    }
    let e = crate::triple::sum_elements(&space, frame);
    if !same_support(&e, &datum.support()) {
        return Err(JbhError::InvalidDatum("frame does not sum to the support".into()));
    }
    let sys = joint_peirce_unchecked(&space, frame);
    let w = |i: usize| if i == 0 { shift } else { shift - s[i - 1] };
    let op = sys.combine(|i, j| (w(i) + w(j)).exp()).compose(&datum.weight_operator());
    Ok(0.5 * induced_op_norm_with(&op, &OpNormOptions::default()).value.ln())
}

/// `δ(h,h') = H(h,h') + H(h',h)`.
pub fn detour_distance_d(h: &BoundaryDatumD, h2: &BoundaryDatumD, method: DetourMethod) -> Result<Extended> {
    Ok(detour_cost_d(h, h2, method)?.add(detour_cost_d(h2, h, method)?))
}

/// Whether two data define the same horofunction: equal supports and equal
/// `Σ λ_i e_i` after grouping.
pub fn data_equal_d(h: &BoundaryDatumD, h2: &BoundaryDatumD) -> bool {
    h.space == h2.space
        && same_support(&h.support(), &h2.support())
        && grouped_equal(&h.weighted(), &h2.weighted(), SUPPORT_TOL)
}
