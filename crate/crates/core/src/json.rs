//! JSON formats.
//!
//! An element is `{"space":{"blocks":[{"p":2,"q":3}]},"blocks":[{"re":[[…]],"im":[[…]]}]}`
//! with row-major arrays; a missing `im` means a real matrix. Data are
//! validated on input exactly as their constructors validate them.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::compactify::DualBallPoint;
use crate::error::Result;
use crate::horo_v::BoundaryDatumV;
use crate::metric_d::BoundaryDatumD;
use crate::spectral::{Frame, FrameEntry, GroupedFrame};
use crate::triple::{CMat, Element, TripleSpace, C64};

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    space: TripleSpace,
    blocks: Vec<MatrixRepr>,
}

fn matrix_repr(m: &CMat) -> MatrixRepr {
    let rows = |f: fn(&C64) -> f64| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect();
    MatrixRepr { re: rows(|z| z.re), im: Some(rows(|z| z.im)) }
}

fn matrix_from_repr(r: &MatrixRepr, p: usize, q: usize) -> std::result::Result<CMat, String> {
    let check = |a: &Vec<Vec<f64>>, name: &str| {
        if a.len() != p || a.iter().any(|row| row.len() != q) {
            Err(format!("{name} part must be a {p}x{q} array"))
        } else {
            Ok(())
        }
    };
    check(&r.re, "real")?;
    if let Some(im) = &r.im {
        check(im, "imaginary")?;
    }
    Ok(CMat::from_fn(p, q, |i, j| C64::new(r.re[i][j], r.im.as_ref().map_or(0.0, |im| im[i][j]))))
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementRepr { space: self.space(), blocks: self.blocks().iter().map(matrix_repr).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ElementRepr::deserialize(d)?;
        if r.blocks.len() != r.space.blocks().len() {
            return Err(D::Error::custom(format!(
                "space has {} blocks but {} were given",
                r.space.blocks().len(),
                r.blocks.len()
            )));
        }
        let blocks = r
            .blocks
            .iter()
            .zip(r.space.blocks())
            .map(|(m, b)| matrix_from_repr(m, b.p, b.q))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        Element::from_blocks(blocks).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    coeff: f64,
    tripotent: Element,
}

#[derive(Serialize, Deserialize)]
struct FrameRepr {
    #[serde(default)]
    space: Option<TripleSpace>,
    entries: Vec<EntryRepr>,
}

fn frame_repr(space: &TripleSpace, entries: &[FrameEntry]) -> FrameRepr {
    FrameRepr {
        space: Some(space.clone()),
        entries: entries.iter().map(|e| EntryRepr { coeff: e.coeff, tripotent: e.tripotent.clone() }).collect(),
    }
}

fn frame_from_repr(r: FrameRepr) -> std::result::Result<(TripleSpace, Vec<FrameEntry>), String> {
    let space = match (r.space, r.entries.first()) {
        (Some(s), _) => s,
        (None, Some(e)) => e.tripotent.space(),
        (None, None) => return Err("an empty frame needs a space".into()),
    };
    if let Some(e) = r.entries.iter().find(|e| e.tripotent.space() != space) {
        return Err(format!("tripotent in {} does not belong to {}", e.tripotent.space(), space));
    }
    Ok((space, r.entries.into_iter().map(|e| FrameEntry { coeff: e.coeff, tripotent: e.tripotent }).collect()))
}

impl Serialize for Frame {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        frame_repr(&self.space, &self.entries).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Frame {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (space, entries) = frame_from_repr(FrameRepr::deserialize(d)?).map_err(D::Error::custom)?;
        Ok(Frame { space, entries })
    }
}

impl Serialize for GroupedFrame {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        frame_repr(&self.space, &self.entries).serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupedFrame {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (space, entries) = frame_from_repr(FrameRepr::deserialize(d)?).map_err(D::Error::custom)?;
        Ok(GroupedFrame { space, entries })
    }
}

#[derive(Serialize, Deserialize)]
struct DatumDRepr {
    tripotents: Vec<Element>,
    lambda: Vec<f64>,
}

impl Serialize for BoundaryDatumD {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DatumDRepr { tripotents: self.tripotents().to_vec(), lambda: self.lambda().to_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoundaryDatumD {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = DatumDRepr::deserialize(d)?;
        BoundaryDatumD::new(r.tripotents, r.lambda).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct DatumVRepr {
    tripotents: Vec<Element>,
    alpha: Vec<f64>,
}

impl Serialize for BoundaryDatumV {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DatumVRepr { tripotents: self.tripotents().to_vec(), alpha: self.alpha().to_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoundaryDatumV {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = DatumVRepr::deserialize(d)?;
        BoundaryDatumV::new(r.tripotents, r.alpha).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct DualPointRepr {
    #[serde(flatten)]
    point: Element,
    dual_norm: f64,
    boundary: bool,
    face: Option<Element>,
}

impl Serialize for DualBallPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DualPointRepr {
            point: self.point.clone(),
            dual_norm: self.dual_norm,
            boundary: self.boundary,
            face: self.face.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DualBallPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = DualPointRepr::deserialize(d)?;
        DualBallPoint::new(r.point).map_err(D::Error::custom)
    }
}

/// Either kind of boundary datum, told apart by the `lambda` or `alpha` key.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnyDatum {
    D(BoundaryDatumD),
    V(BoundaryDatumV),
}

/// Parses any JSON type of this crate.
pub fn from_json<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    Ok(serde_json::from_str(s)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
