//! The exponential map `Exp = tanh : V → D` and its boundary extension.
//!
//! On a flat `Exp(Σ λ_i e_i) = Σ tanh(λ_i) e_i`. A `V`-datum `(e_i, α_i)`
//! goes to the `D`-datum `(e_i, e^{−α_i})`.

use serde::Serialize;

use crate::error::{JbhError, Result};
use crate::extended::Extended;
use crate::horo_v::{approach_sequence_v, BoundaryDatumV};
use crate::metric_d::{detour_cost_d, horofunction_d_eval, metric_functional_d, BoundaryDatumD, DetourMethod, HoroMethod};
use crate::spectral::spectral_decompose;
use crate::triple::Element;

/// `Exp(x) = Σ tanh(λ_i) e_i` over the spectral decomposition of `x`.
pub fn exp_map(x: &Element) -> Element {
    spectral_decompose(x).map_coefficients(f64::tanh)
}

/// Inverse of [`exp_map`] on `D`.
pub fn log_map(y: &Element) -> Result<Element> {
    crate::metric_d::ensure_in_ball(y)?;
    Ok(spectral_decompose(y).map_coefficients(f64::atanh))
}

/// `(e_i, α_i) ↦ (e_i, e^{−α_i})`.
pub fn exp_extend(h: &BoundaryDatumV) -> BoundaryDatumD {
    let lambda = h.alpha().iter().map(|a| (-a).exp()).collect();
    BoundaryDatumD::new(h.tripotents().to_vec(), lambda).expect("weights of a valid datum map to valid weights")
}

/// `(e_i, λ_i) ↦ (e_i, −log λ_i)`.
pub fn exp_extend_inverse(h: &BoundaryDatumD) -> BoundaryDatumV {
    let alpha = h.lambda().iter().map(|l| -l.ln()).collect();
    BoundaryDatumV::new(h.tripotents().to_vec(), alpha).expect("weights of a valid datum map to valid weights")
}

/// Indices used by [`bridge_consistency`]. Beyond `k ≈ 18` the point
/// `Exp(a_k)` rounds onto the sphere.
pub const BRIDGE_K_GRID: [f64; 5] = [4.0, 6.0, 8.0, 10.0, 12.0];

#[derive(Clone, Debug, Serialize)]
pub struct BridgeSample {
    /// `f_{Exp(a_k)}(z)` for each index of the grid.
    pub values: Vec<f64>,
    pub target: f64,
    /// `|f_{Exp(a_k)}(z) − target|` at the largest index.
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BridgeReport {
    pub ks: Vec<f64>,
    pub samples: Vec<BridgeSample>,
    pub max_gap: f64,
}

/// Compares the metric functionals of `D` at `Exp(a_k)` with the
/// horofunction of `Ẽxp(h)` at each of `z_samples`.
pub fn bridge_consistency(h: &BoundaryDatumV, z_samples: &[Element]) -> Result<BridgeReport> {
    bridge_consistency_with(h, z_samples, &BRIDGE_K_GRID)
}

pub fn bridge_consistency_with(h: &BoundaryDatumV, z_samples: &[Element], ks: &[f64]) -> Result<BridgeReport> {
    if ks.is_empty() {
        return Err(JbhError::InvalidDatum("empty index grid".into()));
    }
    let hd = exp_extend(h);
    let points = ks
        .iter()
        .map(|&k| Ok(exp_map(&approach_sequence_v(h, k)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut samples = Vec::with_capacity(z_samples.len());
    for z in z_samples {
        let target = horofunction_d_eval(&hd, z, HoroMethod::Extrapolate)?;
        let values = points.iter().map(|y| metric_functional_d(y, z)).collect::<Result<Vec<_>>>()?;
        let gap = (values.last().expect("nonempty grid") - target).abs();
        samples.push(BridgeSample { values, target, gap });
    }
    let max_gap = samples.iter().map(|s| s.gap).fold(0.0, f64::max);
    Ok(BridgeReport { ks: ks.to_vec(), samples, max_gap })
}

/// Whether two `D`-data lie in the same part: mutually finite detour costs.
pub fn same_part_d(h: &BoundaryDatumD, h2: &BoundaryDatumD) -> Result<bool> {
    let a = detour_cost_d(h, h2, DetourMethod::Closed)?;
    let b = detour_cost_d(h2, h, DetourMethod::Closed)?;
    Ok(a != Extended::Infinite && b != Extended::Infinite)
}
