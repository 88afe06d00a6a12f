//! Axis-aligned boxes of intervals.

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::dyadic::{parse_rational, Dyadic};
use super::interval::Interval;

/// An `n`-box; for Khovanskii search domains the first `ell` coordinates
/// live in `[-1, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalBox {
    coords: Vec<Interval>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoxParseError {
    #[error("box text is not a JSON array: {0}")]
    Json(String),
    #[error("invalid box coordinate {index}: {reason}")]
    Coordinate { index: usize, reason: String },
}

impl IntervalBox {
    pub fn new(coords: Vec<Interval>) -> Self {
        IntervalBox { coords }
    }

    pub fn point(xs: &[Dyadic]) -> Self {
        IntervalBox {
            coords: xs.iter().cloned().map(Interval::point).collect(),
        }
    }

    pub fn from_rationals(xs: &[BigRational], prec: u32) -> Self {
        IntervalBox {
            coords: xs.iter().map(|q| Interval::from_rational(q, prec)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Interval] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Interval {
        &self.coords[i]
    }

    pub fn into_coords(self) -> Vec<Interval> {
        self.coords
    }

    pub fn midpoint(&self) -> Vec<Dyadic> {
        self.coords.iter().map(Interval::midpoint).collect()
    }

    pub fn max_width(&self) -> Dyadic {
        self.coords
            .iter()
            .map(Interval::width)
            .max()
            .unwrap_or_else(Dyadic::zero)
    }

    pub fn is_subset(&self, o: &IntervalBox) -> bool {
        self.dim() == o.dim() && self.coords.iter().zip(&o.coords).all(|(a, b)| a.is_subset(b))
    }

    pub fn is_interior_subset(&self, o: &IntervalBox) -> bool {
        self.dim() == o.dim()
            && self
                .coords
                .iter()
                .zip(&o.coords)
                .all(|(a, b)| a.is_interior_subset(b))
    }

    pub fn intersect(&self, o: &IntervalBox) -> Option<IntervalBox> {
        let coords = self
            .coords
            .iter()
            .zip(&o.coords)
            .map(|(a, b)| a.intersect(b))
            .collect::<Option<Vec<_>>>()?;
        Some(IntervalBox { coords })
    }

    pub fn overlaps(&self, o: &IntervalBox) -> bool {
        self.coords.iter().zip(&o.coords).all(|(a, b)| a.overlaps(b))
    }

    pub fn contains_point(&self, x: &[Dyadic]) -> bool {
        x.len() == self.dim() && self.coords.iter().zip(x).all(|(c, v)| c.contains(v))
    }

    /// Split coordinate `i` at its midpoint.
    pub fn bisect(&self, i: usize) -> (IntervalBox, IntervalBox) {
        let c = &self.coords[i];
        let m = c.midpoint();
        let mut left = self.clone();
        let mut right = self.clone();
        left.coords[i] = Interval::new(c.lo().clone(), m.clone());
        right.coords[i] = Interval::new(m, c.hi().clone());
        (left, right)
    }

    pub fn inflate(&self, delta: &Dyadic) -> IntervalBox {
        IntervalBox {
            coords: self.coords.iter().map(|c| c.inflate(delta)).collect(),
        }
    }

    pub fn with_coord(&self, i: usize, c: Interval) -> IntervalBox {
        let mut b = self.clone();
        b.coords[i] = c;
        b
    }

    pub fn project(&self, idx: &[usize]) -> IntervalBox {
        IntervalBox {
            coords: idx.iter().map(|&i| self.coords[i].clone()).collect(),
        }
    }

    pub fn hull(&self, o: &IntervalBox) -> IntervalBox {
        IntervalBox {
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a.hull(b)).collect(),
        }
    }

    /// Parses the box file format: a JSON array of `[lo, hi]` pairs whose
    /// entries are dyadic strings, decimal strings, rationals `p/q` or JSON
    /// numbers. A bare pair `[lo, hi]` is read as a one-dimensional box.
    /// Non-dyadic endpoints are rounded outward at `prec` bits.
    pub fn parse(text: &str, prec: u32) -> Result<IntervalBox, BoxParseError> {
        let v: serde_json::Value =
            serde_json::from_str(text.trim()).map_err(|e| BoxParseError::Json(e.to_string()))?;
        let arr = v
            .as_array()
            .ok_or_else(|| BoxParseError::Json("expected an array".into()))?;
        let pairs: Vec<&serde_json::Value> = if arr.len() == 2 && arr.iter().all(|x| !x.is_array()) {
            vec![&v]
        } else {
            arr.iter().collect()
        };
        let mut coords = Vec::with_capacity(pairs.len());
        for (index, p) in pairs.into_iter().enumerate() {
            let bad = |reason: &str| BoxParseError::Coordinate {
                index,
                reason: reason.to_string(),
            };
            let pair = p.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("expected [lo, hi]"))?;
            let read = |x: &serde_json::Value| -> Option<BigRational> {
                match x {
                    serde_json::Value::String(s) => parse_rational(s),
                    serde_json::Value::Number(n) => parse_rational(&n.to_string()),
                    _ => None,
                }
            };
            let lo = read(&pair[0]).ok_or_else(|| bad("unreadable lower endpoint"))?;
            let hi = read(&pair[1]).ok_or_else(|| bad("unreadable upper endpoint"))?;
            if lo > hi {
                return Err(bad("endpoints out of order"));
            }
            coords.push(Interval::from_rationals(&lo, &hi, prec));
        }
        Ok(IntervalBox { coords })
    }
}

impl fmt::Display for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, " × ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
