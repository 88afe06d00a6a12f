use serde::{Deserialize, Serialize};

use super::krawczyk::{krawczyk_image, strictly_inside};
use super::linalg::{det_enclosure, DMatrix, IMatrix};
use super::SquareSystem;
use crate::algebra::{AlgebraError, KhovanskiiSystem};
use crate::enclose::{Dyadic, Interval, IntervalBox};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobianEnclosure {
    pub entries: IMatrix,
    pub det: Interval,
}

/// Evidence for a unique regular zero inside `region`: the Krawczyk image
/// of `region` lies in its interior and the Jacobian determinant
/// enclosure over `region` excludes zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate<S = KhovanskiiSystem> {
    pub system: S,
    pub region: IntervalBox,
    pub midpoint: Vec<Dyadic>,
    pub preconditioner: DMatrix,
    pub krawczyk_image: IntervalBox,
    pub jacobian: JacobianEnclosure,
    pub precision: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertifyError {
    #[error("malformed certificate JSON: {0}")]
    Json(String),
    #[error("certificate system: {0}")]
    System(#[from] AlgebraError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    system: String,
    #[serde(rename = "box")]
    region: IntervalBox,
    midpoint: Vec<Dyadic>,
    preconditioner: DMatrix,
    krawczyk_image: IntervalBox,
    jacobian: JacobianEnclosure,
    precision: u32,
}

impl<S: SquareSystem> Certificate<S> {
    /// The enclosure of the certified zero.
    pub fn zero_enclosure(&self) -> &IntervalBox {
        &self.krawczyk_image
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = Document {
            system: self.system.canonical_text(),
            region: self.region.clone(),
            midpoint: self.midpoint.clone(),
            preconditioner: self.preconditioner.clone(),
            krawczyk_image: self.krawczyk_image.clone(),
            jacobian: self.jacobian.clone(),
            precision: self.precision,
        };
        serde_json::to_value(doc).expect("certificate serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("certificate serializes")
    }
}

impl Certificate<KhovanskiiSystem> {
    pub fn from_json(text: &str) -> Result<Self, CertifyError> {
        let doc: Document = serde_json::from_str(text).map_err(|e| CertifyError::Json(e.to_string()))?;
        Self::from_document(doc)
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Self, CertifyError> {
        let doc: Document = serde_json::from_value(v).map_err(|e| CertifyError::Json(e.to_string()))?;
        Self::from_document(doc)
    }

    fn from_document(doc: Document) -> Result<Self, CertifyError> {
        Ok(Certificate {
            system: KhovanskiiSystem::parse(&doc.system)?,
            region: doc.region,
            midpoint: doc.midpoint,
            preconditioner: doc.preconditioner,
            krawczyk_image: doc.krawczyk_image,
            jacobian: doc.jacobian,
            precision: doc.precision,
        })
    }
}

/// Re-verifies every certificate invariant from scratch at the stored
/// precision. Only the midpoint and preconditioner are taken as given;
/// the stored image and Jacobian must contain the recomputed ones.
pub fn check_certificate<S: SquareSystem>(cert: &Certificate<S>) -> bool {
    let n = cert.system.dim();
    let prec = cert.precision;
    if prec < 2
        || cert.region.dim() != n
        || cert.krawczyk_image.dim() != n
        || cert.midpoint.len() != n
        || cert.preconditioner.len() != n
        || cert.preconditioner.iter().any(|r| r.len() != n)
        || cert.jacobian.entries.len() != n
        || cert.jacobian.entries.iter().any(|r| r.len() != n)
    {
        return false;
    }
    let one = Dyadic::one();
    let m1 = Dyadic::from_i64(-1);
    if cert.region.coords()[..cert.system.restricted()]
        .iter()
        .any(|c| c.lo() <= &m1 || c.hi() >= &one)
    {
        return false;
    }
    if !cert.region.contains_point(&cert.midpoint) {
        return false;
    }
    let Some((k, j)) = krawczyk_image(&cert.system, &cert.region, &cert.midpoint, &cert.preconditioner, prec) else {
        return false;
    };
    if !strictly_inside(&k, &cert.region, prec) || !k.is_subset(&cert.krawczyk_image) || !cert.krawczyk_image.is_subset(&cert.region) {
        return false;
    }
    let entries_ok = j
        .iter()
        .zip(&cert.jacobian.entries)
        .all(|(r, s)| r.iter().zip(s).all(|(a, b)| a.is_subset(b)));
    let det = det_enclosure(&j, prec);
    entries_ok && det.excludes_zero() && det.is_subset(&cert.jacobian.det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{certify_regular_zero, Budget};

    fn cert() -> Certificate {
        let s = KhovanskiiSystem::parse("E(x1) - 2").unwrap();
        let b = IntervalBox::parse("[0.6, 0.8]", 64).unwrap();
        certify_regular_zero(&s, &b, Budget::default()).unwrap()
    }

    #[test]
    fn json_round_trip() {
        let c = cert();
        let text = c.to_json();
        let back = Certificate::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert!(check_certificate(&back));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in ["system", "box", "midpoint", "preconditioner", "krawczyk_image", "jacobian", "precision"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn widened_box_fails() {
        let mut c = cert();
        let w = c.region.max_width().mul(&Dyadic::from_i64(5));
        c.region = c.region.inflate(&w);
        assert!(!check_certificate(&c));
    }

    #[test]
    fn flipped_jacobian_fails() {
        let mut c = cert();
        c.jacobian.entries[0][0] = c.jacobian.entries[0][0].neg();
        assert!(!check_certificate(&c));
    }

    #[test]
    fn malformed_documents() {
        assert!(Certificate::from_json("{}").is_err());
        assert!(Certificate::from_json("not json").is_err());
    }
}
