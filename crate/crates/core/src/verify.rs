//! Seeded randomized verification suites.
//!
//! Each property draws its trials from `derived_rng(seed', trial)`, where
//! `seed'` mixes the run seed with the property index, so a report depends
//! only on the seed and the trial count. Trials run in parallel and are
//! collected in trial order.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::compactify::{
    dual_norm, face_membership, phi_boundary, phi_boundary_preimage, phi_interior, relative_interior_face,
};
use crate::error::{JbhError, Result};
use crate::exp_bridge::{bridge_consistency, exp_extend, exp_extend_inverse, exp_map, same_part_d};
use crate::extended::Extended;
use crate::horo_v::{
    approach_sequence_v, compress, detour_cost_v, detour_distance_v, horofunction_v_eval, horofunction_v_limit,
    horofunction_v_operator, lambda_restricted, peirce2_basis, same_part_v, variation_seminorm, BoundaryDatumV,
};
use crate::metric_d::{
    almost_geodesic_defect, approach_sequence_d, caratheodory_distance, data_equal_d, detour_cost_d,
    detour_distance_d, geodesic_gamma, horofunction_d_eval, limit_ratio_forms, metric_functional_d,
    metric_functional_d_swapped, BoundaryDatumD, DetourMethod, HoroMethod,
};
use crate::opnorm::induced_op_norm;
use crate::peirce::{bergman, bergman_half_powers, joint_peirce, mobius, peirce_arithmetic_residual};
use crate::random::{
    derived_rng, haar_unitary, random_ball_element, random_element, FramePosition, JbhRng,
};
use crate::spectral::{grouped_equal, spectral_decompose};
use crate::triple::{
    box_operator, normalized_inner_unchecked, quadratic_pair, real_combination, sum_elements, tp,
    trace_inner_unchecked, triple_norm, Element, TripleSpace, C64,
};

pub const SCHEMA: &str = "jbh-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Axioms,
    Peirce,
    HoroD,
    HoroV,
    Phi,
    Detour,
    Exp,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] =
        [Suite::Axioms, Suite::Peirce, Suite::HoroD, Suite::HoroV, Suite::Phi, Suite::Detour, Suite::Exp];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Peirce => "peirce",
            Suite::HoroD => "horo-d",
            Suite::HoroV => "horo-v",
            Suite::Phi => "phi",
            Suite::Detour => "detour",
            Suite::Exp => "exp",
            Suite::All => "all",
        }
    }

    fn contains(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl std::str::FromStr for Suite {
    type Err = JbhError;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| JbhError::UnknownName(format!("suite {s:?}")))
    }
}

type Check = fn(&mut JbhRng) -> Result<f64>;

/// One sampled property: a trial returns a residual, and the property passes
/// when every residual is below `threshold`.
pub struct Property {
    pub name: &'static str,
    pub suite: Suite,
    pub threshold: f64,
    /// Lower bound on the number of trials.
    pub min_trials: usize,
    /// Measured and reported without a pass/fail verdict.
    pub informational: bool,
    check: Check,
}

const fn prop(name: &'static str, suite: Suite, threshold: f64, check: Check) -> Property {
    Property { name, suite, threshold, min_trials: 1, informational: false, check }
}

const fn prop_min(name: &'static str, suite: Suite, threshold: f64, min_trials: usize, check: Check) -> Property {
    Property { name, suite, threshold, min_trials, informational: false, check }
}

const fn measure(name: &'static str, suite: Suite, check: Check) -> Property {
    Property { name, suite, threshold: f64::INFINITY, min_trials: 1, informational: true, check }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub suite: String,
    pub passed: bool,
    pub informational: bool,
    pub trials: usize,
    pub threshold: Option<f64>,
    pub max_residual: Option<f64>,
    pub p95_residual: Option<f64>,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: String,
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub passed: bool,
    pub properties: Vec<PropertyReport>,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    /// Replaces every threshold when set.
    pub tol: Option<f64>,
}

/// All properties, in report order.
pub fn properties() -> Vec<Property> {
    use Suite::*;
    vec![
        prop("jordan_identity", Axioms, 1e-10, check_jordan_identity),
        prop("cube_norm", Axioms, 1e-10, check_cube_norm),
        prop("box_norm", Axioms, 1e-10, check_box_norm),
        prop("orthogonal_sum_norm", Axioms, 1e-10, check_orthogonal_sum_norm),
        prop("spectral_frame", Axioms, 1e-10, check_spectral_frame),
        prop("joint_peirce_projections", Peirce, 1e-10, check_joint_peirce),
        prop("joint_projection_on_frame", Peirce, 1e-10, check_projection_on_frame),
        prop("joint_projection_eigenvalues", Peirce, 1e-10, check_projection_eigenvalues),
        prop("peirce2_of_sum", Peirce, 1e-10, check_peirce2_of_sum),
        prop("peirce_arithmetic", Peirce, 1e-10, check_peirce_arithmetic),
        prop("bergman_inverse_half_norm", Peirce, 1e-6, check_bergman_half_norm),
        prop("bergman_distance_identity", Peirce, 1e-5, check_bergman_distance_identity),
        prop("euclidean_ball_law", Peirce, 1e-10, check_euclidean_ball_law),
        prop("boundary_approach", Peirce, 1e-3, check_boundary_approach),
        prop("distance_from_origin", HoroD, 1e-10, check_distance_from_origin),
        prop("distance_triangle", HoroD, 1e-10, check_distance_triangle),
        prop("functional_forms", HoroD, 1e-10, check_functional_forms),
        prop("functional_lipschitz", HoroD, 1e-10, check_functional_lipschitz),
        prop_min("closed_vs_extrapolated_d", HoroD, 1e-4, 20, check_closed_vs_extrapolated_d),
        prop("disc_closed_form", HoroD, 1e-8, check_disc_closed_form),
        prop("euclidean_horofunction", HoroD, 1e-6, check_euclidean_horofunction),
        prop("limit_forms_agree", HoroD, 1e-6, check_limit_forms),
        prop("closed_vs_extrapolated_v", HoroV, 1e-4, check_closed_vs_extrapolated_v),
        prop("straight_line_values", HoroV, 1e-9, check_straight_line),
        prop("linear_functional_case", HoroV, 1e-10, check_linear_functional),
        prop("horofunction_lipschitz", HoroV, 1e-9, check_horofunction_lipschitz),
        prop("sequence_lower_bound", HoroV, 1e-9, check_lower_bound),
        prop("lambda_basis_independence", HoroV, 1e-10, check_basis_independence),
        prop("dual_norm_duality", Phi, 1e-8, check_dual_norm_duality),
        prop("phi_interior_image", Phi, 0.5, check_phi_interior_image),
        prop("phi_regrouping", Phi, 1e-10, check_phi_regrouping),
        prop("phi_injectivity", Phi, 0.5, check_phi_injectivity),
        prop("phi_boundary_face", Phi, 1e-9, check_phi_boundary_face),
        prop("boundary_surjectivity", Phi, 1e-9, check_boundary_surjectivity),
        prop("boundary_continuity", Phi, 1e-5, check_boundary_continuity),
        prop("face_alignment", Phi, 0.5, check_face_alignment),
        prop("variation_detour", Detour, 1e-9, check_variation_detour),
        prop("variation_seminorm_axioms", Detour, 1e-9, check_variation_axioms),
        prop("detour_triangle", Detour, 1e-9, check_detour_triangle),
        prop("infinite_iff_supports_differ", Detour, 0.5, check_infinite_iff),
        prop("detour_closed_vs_limit", Detour, 1e-4, check_detour_closed_vs_limit),
        prop("planted_detour", Detour, 1e-5, check_planted_detour),
        prop("geodesic_distance", Exp, 1e-9, check_geodesic_distance),
        prop("geodesic_defect", Exp, 1e-8, check_geodesic_defect),
        prop("geodesic_horofunction", Exp, 1e-4, check_geodesic_horofunction),
        prop("radial_isometry", Exp, 1e-9, check_radial_isometry),
        prop("bridge_consistency", Exp, 1e-4, check_bridge),
        prop("exp_well_defined", Exp, 0.5, check_exp_well_defined),
        prop_min("part_preservation", Exp, 0.5, 50, check_part_preservation),
        measure("detour_v_vs_d", Exp, check_detour_v_vs_d),
    ]
}

/// Runs every property of `suite`.
pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Report {
    let mut reports = Vec::new();
    for (index, p) in properties().into_iter().enumerate() {
        if suite.contains(p.suite) {
            reports.push(run_property(&p, index as u64, opts));
        }
    }
    Report {
        schema: SCHEMA.into(),
        suite: suite.name().into(),
        seed: opts.seed,
        trials: opts.trials,
        tol: opts.tol,
        passed: reports.iter().all(|r| r.passed),
        properties: reports,
    }
}

/// Runs the named properties, seeded as within their suites.
pub fn run_named(names: &[&str], opts: &VerifyOptions) -> Result<Vec<PropertyReport>> {
    let all = properties();
    names
        .iter()
        .map(|n| {
            let index = all
                .iter()
                .position(|p| p.name == *n)
                .ok_or_else(|| JbhError::UnknownName(format!("property {n:?}")))?;
            Ok(run_property(&all[index], index as u64, opts))
        })
        .collect()
}

fn property_seed(seed: u64, index: u64) -> u64 {
    seed ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

pub fn run_property(p: &Property, index: u64, opts: &VerifyOptions) -> PropertyReport {
    let trials = opts.trials.max(p.min_trials);
    let seed = property_seed(opts.seed, index);
    let outcomes: Vec<std::result::Result<f64, String>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = derived_rng(seed, t);
            (p.check)(&mut rng).map_err(|e| e.to_string())
        })
        .collect();
    let threshold = if p.informational { f64::INFINITY } else { opts.tol.unwrap_or(p.threshold) };
    let mut residuals: Vec<f64> = outcomes
        .iter()
        .map(|o| match o {
            Ok(r) if r.is_nan() => f64::INFINITY,
            Ok(r) => *r,
            Err(_) => f64::INFINITY,
        })
        .collect();
    let first_error = outcomes.iter().find_map(|o| o.as_ref().err().cloned());
    let failures = residuals.iter().filter(|r| !(**r < threshold)).count();
    residuals.sort_by(f64::total_cmp);
    let finite = |v: f64| v.is_finite().then_some(v);
    let max = residuals.last().copied().unwrap_or(0.0);
    let p95 = residuals
        .get(((residuals.len() as f64 * 0.95).ceil() as usize).saturating_sub(1))
        .copied()
        .unwrap_or(0.0);
    PropertyReport {
        name: p.name.into(),
        suite: p.suite.name().into(),
        passed: failures == 0 && (first_error.is_none() || !p.informational),
        informational: p.informational,
        trials,
        threshold: finite(threshold),
        max_residual: finite(max),
        p95_residual: finite(p95),
        failures,
        first_error,
    }
}

// Random inputs.

const SHAPES: &[&[(usize, usize)]] = &[
    &[(1, 1)],
    &[(2, 1)],
    &[(2, 2)],
    &[(2, 3)],
    &[(3, 3)],
    &[(3, 4)],
    &[(4, 4)],
    &[(2, 2), (1, 1)],
    &[(2, 3), (2, 2)],
    &[(1, 3), (2, 2)],
];

fn random_space(rng: &mut JbhRng) -> TripleSpace {
    TripleSpace::from_shapes(SHAPES.choose(rng).expect("nonempty list")).expect("valid shapes")
}

fn uniform(rng: &mut JbhRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

fn ball(rng: &mut JbhRng, space: &TripleSpace, max: f64) -> Element {
    random_ball_element(rng, space, max)
}

fn random_position(rng: &mut JbhRng, space: &TripleSpace) -> FramePosition {
    let p = rng.random_range(1..=space.rank());
    FramePosition::random(rng, space, p)
}

fn random_lambda(rng: &mut JbhRng, p: usize) -> Vec<f64> {
    let mut l = vec![1.0];
    l.extend((1..p).map(|_| uniform(rng, 0.2, 1.0)));
    l.shuffle(rng);
    l
}

fn random_alpha(rng: &mut JbhRng, p: usize) -> Vec<f64> {
    let mut a = vec![0.0];
    a.extend((1..p).map(|_| uniform(rng, 0.0, 3.0)));
    a.shuffle(rng);
    a
}

fn datum_v(frame: Vec<Element>, alpha: Vec<f64>) -> Result<BoundaryDatumV> {
    BoundaryDatumV::new(frame, alpha)
}

fn indicator(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

fn finite(x: Extended) -> Result<f64> {
    x.finite().ok_or_else(|| JbhError::NonConvergence("unexpected infinite detour cost".into()))
}

// Axioms.

fn check_jordan_identity(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let [a, b, x, y, z] = std::array::from_fn(|_| ball(rng, &s, 1.0));
    let lhs = tp(&a, &b, &tp(&x, &y, &z));
    let rhs = &(&tp(&tp(&a, &b, &x), &y, &z) - &tp(&x, &tp(&b, &a, &y), &z)) + &tp(&x, &y, &tp(&a, &b, &z));
    Ok(triple_norm(&(&lhs - &rhs)))
}

fn check_cube_norm(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let a = ball(rng, &s, 1.0);
    Ok((triple_norm(&tp(&a, &a, &a)) - triple_norm(&a).powi(3)).abs())
}

fn check_box_norm(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let a = ball(rng, &s, 1.0);
    Ok((induced_op_norm(&box_operator(&a, &a)?) - triple_norm(&a).powi(2)).abs())
}

fn check_orthogonal_sum_norm(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    if s.rank() < 2 {
        return Ok(0.0);
    }
    let pos = FramePosition::random(rng, &s, s.rank());
    let f = pos.frame();
    let cut = rng.random_range(1..f.len());
    let ca: Vec<f64> = (0..cut).map(|_| uniform(rng, 0.0, 2.0)).collect();
    let cb: Vec<f64> = (cut..f.len()).map(|_| uniform(rng, 0.0, 2.0)).collect();
    let a = real_combination(&s, &ca, &f[..cut]);
    let b = real_combination(&s, &cb, &f[cut..]);
    Ok((triple_norm(&(&a + &b)) - triple_norm(&a).max(triple_norm(&b))).abs())
}

fn check_spectral_frame(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let x = ball(rng, &s, 2.0);
    let f = spectral_decompose(&x);
    Ok(f.invariant_residual().max(triple_norm(&(&f.reconstruct() - &x))))
}

// Peirce and Bergman.

fn check_joint_peirce(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let f = random_position(rng, &s).frame();
    Ok(joint_peirce(&f)?.invariant_residual())
}

fn check_projection_on_frame(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let f = random_position(rng, &s).frame();
    let sys = joint_peirce(&f)?;
    let mut worst: f64 = 0.0;
    for (i, j) in sys.pairs() {
        for (k, ek) in f.iter().enumerate() {
            let img = sys.get(i, j).apply(ek);
            let expected = if i == j && i == k + 1 { ek.clone() } else { Element::zeros(&s) };
            worst = worst.max(triple_norm(&(&img - &expected)));
        }
    }
    Ok(worst)
}

fn check_projection_eigenvalues(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let f = random_position(rng, &s).frame();
    let sys = joint_peirce(&f)?;
    let mut worst: f64 = 0.0;
    for (i, j) in sys.pairs() {
        let p = sys.get(i, j);
        for (k, ek) in f.iter().enumerate() {
            let m = [i == k + 1, j == k + 1].iter().filter(|b| **b).count() as f64;
            let lhs = box_operator(ek, ek)?.compose(p);
            worst = worst.max(lhs.max_abs_diff(&p.scale(m / 2.0)));
        }
    }
    Ok(worst)
}

fn check_peirce2_of_sum(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    if s.rank() < 2 {
        return Ok(0.0);
    }
    let f = FramePosition::random(rng, &s, 2).frame();
    let sys = joint_peirce(&f)?;
    let e = &f[0] + &f[1];
    let p2 = quadratic_pair(&e, &e)?;
    let sum = sys.get(1, 1).add(sys.get(1, 2)).add(sys.get(2, 2));
    Ok(p2.max_abs_diff(&sum))
}

fn check_peirce_arithmetic(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let e = sum_elements(&s, &random_position(rng, &s).frame());
    let samples: Vec<_> = (0..3).map(|_| (ball(rng, &s, 1.0), ball(rng, &s, 1.0), ball(rng, &s, 1.0))).collect();
    peirce_arithmetic_residual(&e, &samples)
}

fn check_bergman_half_norm(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let r = uniform(rng, 0.0, 0.9);
    let z = random_element(rng, &s, r);
    let exact = 1.0 / (1.0 - r * r);
    Ok((induced_op_norm(&bergman_half_powers(&z, -1)?) - exact).abs() / exact)
}

fn check_bergman_distance_identity(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let y = ball(rng, &s, 0.8);
    let z = ball(rng, &s, 0.8);
    let lhs = 1.0 - triple_norm(&mobius(&-&y, &z)?).powi(2);
    let t = bergman_half_powers(&z, -1)?.compose(&bergman(&z, &y)?).compose(&bergman_half_powers(&y, -1)?);
    let rhs = 1.0 / induced_op_norm(&t);
    Ok((lhs - rhs).abs() / lhs)
}

fn euclidean_inner(y: &Element, z: &Element) -> C64 {
    y.block(0).iter().zip(z.block(0).iter()).map(|(a, b)| a * b.conj()).sum()
}

fn check_euclidean_ball_law(rng: &mut JbhRng) -> Result<f64> {
    let s = TripleSpace::euclidean(rng.random_range(1..=4))?;
    let y = ball(rng, &s, 0.95);
    let z = ball(rng, &s, 0.95);
    let lhs = 1.0 - triple_norm(&mobius(&-&y, &z)?).powi(2);
    let ny = triple_norm(&y).powi(2);
    let nz = triple_norm(&z).powi(2);
    let rhs = (1.0 - ny) * (1.0 - nz) / (C64::new(1.0, 0.0) - euclidean_inner(&y, &z)).norm_sqr();
    Ok((lhs - rhs).abs())
}

fn check_boundary_approach(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let u = random_element(rng, &s, 1.0);
    let z = ball(rng, &s, 0.9);
    let mut prev = 0.0;
    let mut last = 0.0;
    for j in 1..=6 {
        let y = u.scale(1.0 - 10f64.powi(-j));
        let g = triple_norm(&mobius(&-&y, &z)?);
        if g < prev - 1e-12 {
            return Ok(f64::INFINITY);
        }
        prev = g;
        last = g;
    }
    Ok(1.0 - last)
}

// Carathéodory distance and horofunctions of D.

fn check_distance_from_origin(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let y = ball(rng, &s, 0.99);
    Ok((caratheodory_distance(&Element::zeros(&s), &y)? - triple_norm(&y).atanh()).abs())
}

fn check_distance_triangle(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let [x, y, z] = std::array::from_fn(|_| ball(rng, &s, 0.95));
    let d = caratheodory_distance;
    let tri = d(&x, &z)? - d(&x, &y)? - d(&y, &z)?;
    let sym = (d(&x, &y)? - d(&y, &x)?).abs();
    Ok(tri.max(0.0).max(sym).max(d(&x, &x)?))
}

fn check_functional_forms(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let y = ball(rng, &s, 0.95);
    let z = ball(rng, &s, 0.95);
    let a = metric_functional_d(&y, &z)?;
    let b = metric_functional_d_swapped(&y, &z)?;
    let origin = metric_functional_d(&y, &Element::zeros(&s))?.abs();
    let at_y = (metric_functional_d(&y, &y)? + triple_norm(&y).atanh()).abs();
    Ok((a - b).abs().max(origin).max(at_y))
}

fn check_functional_lipschitz(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let [y, z, w] = std::array::from_fn(|_| ball(rng, &s, 0.95));
    let diff = (metric_functional_d(&y, &z)? - metric_functional_d(&y, &w)?).abs();
    Ok((diff - caratheodory_distance(&z, &w)?).max(0.0))
}

fn random_datum_d(rng: &mut JbhRng, s: &TripleSpace) -> Result<BoundaryDatumD> {
    let f = random_position(rng, s).frame();
    let l = random_lambda(rng, f.len());
    BoundaryDatumD::new(f, l)
}

fn check_closed_vs_extrapolated_d(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let d = random_datum_d(rng, &s)?;
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let z = ball(rng, &s, 0.9);
        let a = horofunction_d_eval(&d, &z, HoroMethod::InducedNorm)?;
        let b = horofunction_d_eval(&d, &z, HoroMethod::Extrapolate)?;
        worst = worst.max((a - b).abs());
    }
    Ok(worst)
}

fn check_disc_closed_form(rng: &mut JbhRng) -> Result<f64> {
    let xi = C64::from_polar(1.0, uniform(rng, 0.0, std::f64::consts::TAU));
    let z = C64::from_polar(uniform(rng, 0.0, 0.95), uniform(rng, 0.0, std::f64::consts::TAU));
    let d = BoundaryDatumD::new(vec![Element::scalar(xi)], vec![1.0])?;
    let exact = 0.5 * ((xi - z).norm_sqr() / (1.0 - z.norm_sqr())).ln();
    let ze = Element::scalar(z);
    let a = horofunction_d_eval(&d, &ze, HoroMethod::InducedNorm)?;
    let b = horofunction_d_eval(&d, &ze, HoroMethod::Extrapolate)?;
    Ok((a - exact).abs().max((b - exact).abs()))
}

fn check_euclidean_horofunction(rng: &mut JbhRng) -> Result<f64> {
    let s = TripleSpace::euclidean(rng.random_range(1..=4))?;
    let xi = FramePosition::random(rng, &s, 1).frame().remove(0);
    let d = BoundaryDatumD::new(vec![xi.clone()], vec![1.0])?;
    let z = ball(rng, &s, 0.9);
    let exact = 0.5 * ((C64::new(1.0, 0.0) - euclidean_inner(&z, &xi)).norm_sqr() / (1.0 - triple_norm(&z).powi(2))).ln();
    let a = horofunction_d_eval(&d, &z, HoroMethod::InducedNorm)?;
    let b = horofunction_d_eval(&d, &z, HoroMethod::Extrapolate)?;
    Ok((a - exact).abs().max((b - exact).abs()))
}

fn check_limit_forms(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let d = random_datum_d(rng, &s)?;
    let z = ball(rng, &s, 0.9);
    let mut worst: f64 = 0.0;
    for m in [8, 12, 16, 20] {
        let k = 2f64.powi(m);
        if k <= crate::metric_d::approach_threshold_d(&d) {
            continue;
        }
        let (a, b) = limit_ratio_forms(&approach_sequence_d(&d, k)?, &z)?;
        worst = worst.max((a - b).abs());
    }
    Ok(worst)
}

// Horofunctions of V.

fn random_datum_v(rng: &mut JbhRng, s: &TripleSpace) -> Result<BoundaryDatumV> {
    let f = random_position(rng, s).frame();
    let a = random_alpha(rng, f.len());
    datum_v(f, a)
}

fn check_closed_vs_extrapolated_v(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let d = random_datum_v(rng, &s)?;
    let x = ball(rng, &s, 2.0);
    let closed = horofunction_v_eval(&d, &x)?;
    let lim = horofunction_v_limit(&d, &x, &crate::horo_v::default_k_ladder_v(), 1e-6)?;
    Ok((lim.extrapolation.value - closed).abs())
}

fn check_straight_line(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let d = random_datum_v(rng, &s)?;
    let m = uniform(rng, crate::horo_v::approach_threshold_v(&d).max(0.1), 10.0);
    let a = approach_sequence_v(&d, m)?;
    Ok((horofunction_v_eval(&d, &a)? + m).abs())
}

fn check_linear_functional(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let e = FramePosition::random(rng, &s, 1).frame().remove(0);
    let d = datum_v(vec![e.clone()], vec![0.0])?;
    let x = ball(rng, &s, 2.0);
    let l = trace_inner_unchecked(&x, &e) / trace_inner_unchecked(&e, &e);
    Ok((horofunction_v_eval(&d, &x)? + l.re).abs())
}

fn check_horofunction_lipschitz(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let d = random_datum_v(rng, &s)?;
    let x = ball(rng, &s, 2.0);
    let y = ball(rng, &s, 2.0);
    let diff = (horofunction_v_eval(&d, &x)? - horofunction_v_eval(&d, &y)?).abs();
    let origin = horofunction_v_eval(&d, &Element::zeros(&s))?.abs();
    Ok((diff - triple_norm(&(&x - &y))).max(0.0).max(origin))
}

fn check_lower_bound(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let d = random_datum_v(rng, &s)?;
    let x = ball(rng, &s, 2.0);
    let mut worst: f64 = 0.0;
    for k in [4.0, 16.0, 64.0] {
        let a = approach_sequence_v(&d, k)?;
        let y = &x - &a;
        let lhs = (induced_op_norm(&box_operator(&y, &y)?) - k * k) / (2.0 * k);
        worst = worst.max(-2.0 * triple_norm(&x) - lhs);
    }
    Ok(worst.max(0.0))
}

fn check_basis_independence(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let d = random_datum_v(rng, &s)?;
    let x = ball(rng, &s, 2.0);
    let t = horofunction_v_operator(&d, &x)?;
    let basis = peirce2_basis(&d.support())?;
    let u = haar_unitary(rng, basis.len());
    let rotated: Vec<Element> = (0..basis.len())
        .map(|j| basis.iter().enumerate().fold(Element::zeros(&s), |acc, (i, b)| &acc + &b.scale_c(u[(i, j)])))
        .collect();
    let _ = compress(&t, &rotated);
    Ok((lambda_restricted(&t, &basis)? - lambda_restricted(&t, &rotated)?).abs())
}

// The dual-ball model.

fn check_dual_norm_duality(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let x = ball(rng, &s, 2.0);
    let n = dual_norm(&x);
    let y = sum_elements(&s, &spectral_decompose(&x).tripotents());
    let attained = (normalized_inner_unchecked(&y, &x).re - n).abs();
    let mut excess: f64 = 0.0;
    for _ in 0..10 {
        let pos = FramePosition::random(rng, &s, s.rank());
        let w = sum_elements(&s, &pos.frame());
        excess = excess.max(normalized_inner_unchecked(&w, &x).norm() - n);
    }
    Ok(attained.max(excess.max(0.0)))
}

fn check_phi_interior_image(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let r = uniform(rng, 0.0, 15.0);
    let x = random_element(rng, &s, r);
    Ok(indicator(phi_interior(&x).dual_norm < 1.0))
}

fn check_phi_regrouping(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    if s.rank() < 2 {
        return Ok(0.0);
    }
    let pos = FramePosition::random(rng, &s, s.rank());
    let c = uniform(rng, 0.1, 3.0);
    let coeffs = vec![c; pos.slots.len()];
    let x = real_combination(&s, &coeffs, &pos.frame());
    let y = real_combination(&s, &coeffs, &pos.rotated_frame(rng));
    let (px, py) = (phi_interior(&x).point, phi_interior(&y).point);
    Ok(triple_norm(&(&px - &py)).max(triple_norm(&(&x - &y))))
}

fn check_phi_injectivity(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let x = ball(rng, &s, 3.0);
    let y = ball(rng, &s, 3.0);
    if grouped_equal(&x, &y, 1e-9) {
        return Ok(0.0);
    }
    Ok(indicator(triple_norm(&(&phi_interior(&x).point - &phi_interior(&y).point)) > 1e-10))
}

fn check_phi_boundary_face(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let h = random_datum_v(rng, &s)?;
    let p = phi_boundary(&h);
    let face = relative_interior_face(&p.point)?;
    let m = face_membership(&p.point, &h.support(), 1e-9)?;
    let verdict = indicator(m.metric && m.structural);
    Ok(triple_norm(&(&face - &h.support())).max((p.dual_norm - 1.0).abs()).max(verdict))
}

fn check_boundary_surjectivity(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let x = ball(rng, &s, 1.0);
    let x = x.scale(1.0 / dual_norm(&x));
    let h = phi_boundary_preimage(&x)?;
    Ok(triple_norm(&(&phi_boundary(&h).point - &x)))
}

fn check_boundary_continuity(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let h = random_datum_v(rng, &s)?;
    let a = approach_sequence_v(&h, 2f64.powi(20))?;
    Ok(dual_norm(&(&phi_interior(&a).point - &phi_boundary(&h).point)))
}

fn check_face_alignment(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let pos = random_position(rng, &s);
    let h1 = datum_v(pos.frame(), random_alpha(rng, pos.slots.len()))?;
    let h2 = datum_v(pos.rotated_frame(rng), random_alpha(rng, pos.slots.len()))?;
    let f1 = relative_interior_face(&phi_boundary(&h1).point)?;
    let f2 = relative_interior_face(&phi_boundary(&h2).point)?;
    let mut ok = triple_norm(&(&f1 - &f2)) < 1e-9;
    if pos.slots.len() < s.rank() {
        let other = FramePosition::random(rng, &s, pos.slots.len());
        let h3 = datum_v(other.frame(), vec![0.0; other.slots.len()])?;
        let f3 = relative_interior_face(&phi_boundary(&h3).point)?;
        ok &= triple_norm(&(&f1 - &f3)) > 1e-6;
    }
    Ok(indicator(ok))
}

// Detour distances and parts.

fn same_support_pair(rng: &mut JbhRng, s: &TripleSpace) -> Result<(BoundaryDatumV, BoundaryDatumV)> {
    let pos = random_position(rng, s);
    let p = pos.slots.len();
    Ok((datum_v(pos.frame(), random_alpha(rng, p))?, datum_v(pos.rotated_frame(rng), random_alpha(rng, p))?))
}

fn check_variation_detour(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let (h, h2) = same_support_pair(rng, &s)?;
    let delta = finite(detour_distance_v(&h, &h2)?)?;
    let var = variation_seminorm(&(&h.weighted() - &h2.weighted()), &h.support())?;
    Ok((delta - var).abs())
}

fn check_variation_axioms(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let pos = random_position(rng, &s);
    let e = sum_elements(&s, &pos.frame());
    let herm = |rng: &mut JbhRng| {
        let f = pos.rotated_frame(rng);
        let c: Vec<f64> = (0..f.len()).map(|_| uniform(rng, -2.0, 2.0)).collect();
        real_combination(&s, &c, &f)
    };
    let x = herm(rng);
    let y = herm(rng);
    let t = uniform(rng, -3.0, 3.0);
    let v = |z: &Element| variation_seminorm(z, &e);
    let homog = (v(&x.scale(t))? - t.abs() * v(&x)?).abs();
    let tri = (v(&(&x + &y))? - v(&x)? - v(&y)?).max(0.0);
    let kernel = v(&e.scale(t))?;
    let shift = (v(&(&x + &e.scale(t)))? - v(&x)?).abs();
    Ok(homog.max(tri).max(kernel).max(shift))
}

fn check_detour_triangle(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let pos = random_position(rng, &s);
    let p = pos.slots.len();
    let a = datum_v(pos.frame(), random_alpha(rng, p))?;
    let b = datum_v(pos.rotated_frame(rng), random_alpha(rng, p))?;
    let c = datum_v(pos.rotated_frame(rng), random_alpha(rng, p))?;
    let d = |x: &BoundaryDatumV, y: &BoundaryDatumV| finite(detour_distance_v(x, y)?);
    let tri = d(&a, &c)? - d(&a, &b)? - d(&b, &c)?;
    let sym = (d(&a, &b)? - d(&b, &a)?).abs();
    Ok(tri.max(0.0).max(sym).max(d(&a, &a)?))
}

fn check_infinite_iff(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let full = FramePosition::random(rng, &s, s.rank());
    let pick = |rng: &mut JbhRng| {
        let mut idx: Vec<usize> = (0..s.rank()).collect();
        idx.shuffle(rng);
        idx.truncate(rng.random_range(1..=s.rank()));
        idx.sort_unstable();
        idx
    };
    let (i1, i2) = (pick(rng), pick(rng));
    let h = datum_v(full.subset(&i1).frame(), random_alpha(rng, i1.len()))?;
    let h2 = datum_v(full.subset(&i2).frame(), random_alpha(rng, i2.len()))?;
    let differ = i1 != i2;
    let v_inf = detour_cost_v(&h, &h2)?.is_infinite();
    let d_inf = detour_cost_d(&exp_extend(&h), &exp_extend(&h2), DetourMethod::Closed)?.is_infinite();
    Ok(indicator(v_inf == differ && d_inf == differ && same_part_v(&h, &h2) != differ))
}

fn check_detour_closed_vs_limit(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let (h, h2) = same_support_pair(rng, &s)?;
    let (a, b) = (exp_extend(&h), exp_extend(&h2));
    let closed = finite(detour_cost_d(&a, &b, DetourMethod::Closed)?)?;
    let limit = finite(detour_cost_d(&a, &b, DetourMethod::Limit)?)?;
    Ok((closed - limit).abs())
}

fn check_planted_detour(_: &mut JbhRng) -> Result<f64> {
    let s = TripleSpace::matrix(2, 2)?;
    let f = vec![Element::unit(&s, 0, 0, 0), Element::unit(&s, 0, 1, 1)];
    let e = std::f64::consts::E;
    let h = BoundaryDatumD::new(f.clone(), vec![1.0, 1.0 / e])?;
    let h2 = BoundaryDatumD::new(f.clone(), vec![1.0, 1.0 / (e * e)])?;
    let mut worst: f64 = 0.0;
    for m in [DetourMethod::Closed, DetourMethod::Limit] {
        worst = worst.max((finite(detour_distance_d(&h, &h2, m)?)? - 1.0).abs());
    }
    let hv = datum_v(f.clone(), vec![0.0, 1.0])?;
    let hv2 = datum_v(f, vec![0.0, 2.0])?;
    worst = worst.max((finite(detour_distance_v(&hv, &hv2)?)? - 1.0).abs());
    Ok(worst)
}

// Geodesics and the exponential map.

fn check_geodesic_distance(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let f = random_position(rng, &s).frame();
    let a = random_alpha(rng, f.len());
    let (t1, t2) = (uniform(rng, 0.0, 6.0), uniform(rng, 0.0, 6.0));
    let d = caratheodory_distance(&geodesic_gamma(&f, &a, t1)?, &geodesic_gamma(&f, &a, t2)?)?;
    Ok((d - (t1 - t2).abs()).abs())
}

fn check_geodesic_defect(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let f = random_position(rng, &s).frame();
    let a = random_alpha(rng, f.len());
    let pts: Vec<Element> =
        [0.0, 1.0, 2.5, 4.0, 6.0].iter().map(|&t| geodesic_gamma(&f, &a, t)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for n in 1..pts.len() {
        for m in 0..=n {
            worst = worst.max(almost_geodesic_defect(&pts, n, m)?.abs());
        }
    }
    Ok(worst)
}

fn check_geodesic_horofunction(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let h = random_datum_v(rng, &s)?;
    let g = geodesic_gamma(h.tripotents(), h.alpha(), 12.0)?;
    let z = ball(rng, &s, 0.8);
    Ok((metric_functional_d(&g, &z)? - horofunction_d_eval(&exp_extend(&h), &z, HoroMethod::Extrapolate)?).abs())
}

fn check_radial_isometry(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let x = ball(rng, &s, 6.0);
    Ok((caratheodory_distance(&Element::zeros(&s), &exp_map(&x))? - triple_norm(&x)).abs())
}

fn check_bridge(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let h = random_datum_v(rng, &s)?;
    let zs: Vec<Element> = (0..3).map(|_| ball(rng, &s, 0.8)).collect();
    Ok(bridge_consistency(&h, &zs)?.max_gap)
}

fn check_exp_well_defined(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let pos = random_position(rng, &s);
    let p = pos.slots.len();
    let a = vec![0.0; p];
    let h1 = datum_v(pos.frame(), a.clone())?;
    let h2 = datum_v(pos.rotated_frame(rng), a)?;
    let round = exp_extend_inverse(&exp_extend(&h1));
    let same = data_equal_d(&exp_extend(&h1), &exp_extend(&h2));
    let rt = round.alpha().iter().zip(h1.alpha()).all(|(x, y)| (x - y).abs() < 1e-12);
    Ok(indicator(same && rt))
}

fn check_part_preservation(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let full = FramePosition::random(rng, &s, s.rank());
    let p = rng.random_range(1..=s.rank());
    let mut idx: Vec<usize> = (0..s.rank()).collect();
    idx.shuffle(rng);
    let i1: Vec<usize> = idx[..p].to_vec();
    let h = datum_v(full.subset(&i1).frame(), random_alpha(rng, p))?;
    let h2 = if rng.random::<bool>() {
        datum_v(full.subset(&i1).rotated_frame(rng), random_alpha(rng, p))?
    } else {
        let mut j = idx.clone();
        j.shuffle(rng);
        let q = rng.random_range(1..=s.rank());
        let i2: Vec<usize> = j[..q].to_vec();
        datum_v(full.subset(&i2).frame(), random_alpha(rng, q))?
    };
    Ok(indicator(same_part_v(&h, &h2) == same_part_d(&exp_extend(&h), &exp_extend(&h2))?))
}

fn check_detour_v_vs_d(rng: &mut JbhRng) -> Result<f64> {
    let s = random_space(rng);
    let (h, h2) = same_support_pair(rng, &s)?;
    let dv = finite(detour_distance_v(&h, &h2)?)?;
    let dd = finite(detour_distance_d(&exp_extend(&h), &exp_extend(&h2), DetourMethod::Closed)?)?;
    Ok((dv - dd).abs())
}
