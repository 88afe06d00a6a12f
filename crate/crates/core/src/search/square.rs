use std::time::{Duration, Instant};

use serde_json::json;

use super::engine::{explore, Step};
use super::{SearchConfig, SearchError, Status};
use crate::algebra::KhovanskiiSystem;
use crate::certify::{certify_regular_zero, krawczyk, Certificate, SquareSystem, Verdict};
use crate::enclose::{Interval, IntervalBox};

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub status: Status,
    pub region: IntervalBox,
    /// One per isolated zero, in search order.
    pub certificates: Vec<Certificate>,
    /// Boxes settled by a certificate: each holds no zero besides the
    /// certified one.
    pub certified_boxes: Vec<IntervalBox>,
    pub excluded: Vec<IntervalBox>,
    pub unknown: Vec<IntervalBox>,
    pub boxes_processed: usize,
    pub elapsed: Option<Duration>,
}

impl SolveReport {
    pub fn to_json_value(&self, cfg: &SearchConfig) -> serde_json::Value {
        let mut v = json!({
            "status": self.status,
            "region": self.region,
            "certificates": self.certificates.iter().map(Certificate::to_json_value).collect::<Vec<_>>(),
            "certified_boxes": self.certified_boxes,
            "excluded": self.excluded,
            "unknown": self.unknown,
            "boxes_processed": self.boxes_processed,
            "config": cfg.to_json_value(),
        });
        if let Some(t) = self.elapsed {
            v["timing_ms"] = json!(t.as_millis() as u64);
        }
        v
    }
}

/// Clips the first `ell` coordinates to `[-1, 1]`.
pub(crate) fn clip_closed_unit(region: &IntervalBox, ell: usize) -> Option<IntervalBox> {
    let unit = Interval::from_i64_pair(-1, 1);
    let mut coords = region.coords().to_vec();
    for c in coords.iter_mut().take(ell) {
        *c = c.intersect(&unit)?;
    }
    Some(IntervalBox::new(coords))
}

/// `b` grown by half its width on every side, kept inside `region`.
pub(crate) fn neighbourhood(b: &IntervalBox, region: &IntervalBox) -> IntervalBox {
    let grown = IntervalBox::new(
        b.coords()
            .iter()
            .map(|c| c.inflate(&c.width().half()))
            .collect(),
    );
    grown.intersect(region).unwrap_or_else(|| b.clone())
}

/// What a small box yields when Krawczyk settles a neighbourhood of it.
pub(crate) enum Local<S: SquareSystem> {
    NoZero,
    /// The neighbourhood holds exactly one zero, certified here.
    Unique(IntervalBox, Certificate<S>),
    Open,
}

pub(crate) fn settle<S: SquareSystem>(sys: &S, b: &IntervalBox, region: &IntervalBox, cfg: &SearchConfig) -> Local<S> {
    let nb = neighbourhood(b, region);
    match krawczyk(sys, &nb, cfg.precision) {
        Verdict::Excluded => Local::NoZero,
        Verdict::Contracted { strict: true, .. } => match certify_regular_zero(sys, &nb, cfg.budget()) {
            Ok(c) => Local::Unique(nb, c),
            Err(_) => Local::Open,
        },
        _ => Local::Open,
    }
}

/// Certifies every isolable zero of a square system in `region` (first
/// `ell` coordinates clipped to `[-1, 1]`) and proves the rest of the
/// region zero-free where it can.
pub fn solve_square(sys: &KhovanskiiSystem, region: &IntervalBox, cfg: &SearchConfig) -> Result<SolveReport, SearchError> {
    cfg.validate()?;
    if region.dim() != sys.n() {
        return Err(SearchError::RegionMismatch {
            expected: sys.n(),
            found: region.dim(),
        });
    }
    let start = Instant::now();
    let Some(region) = clip_closed_unit(region, sys.ell()) else {
        return Ok(SolveReport {
            status: Status::RegionUnsat,
            region: region.clone(),
            certificates: vec![],
            certified_boxes: vec![],
            excluded: vec![region.clone()],
            unknown: vec![],
            boxes_processed: 0,
            elapsed: cfg.timing.then(|| start.elapsed()),
        });
    };
    let prec = cfg.precision;
    let pool = cfg.pool()?;
    let e = pool.install(|| {
        explore(&region, cfg, |node, small| {
            match sys.eval_domain(&node.b, prec) {
                None => return Step::Excluded,
                Some(v) if v.iter().any(Interval::excludes_zero) => return Step::Excluded,
                _ => {}
            }
            if !small {
                return Step::Undecided;
            }
            match settle(sys, &node.b, &region, cfg) {
                Local::NoZero => Step::Excluded,
                Local::Unique(nb, c) => Step::Covered((nb, c)),
                Local::Open => Step::Undecided,
            }
        })
    });
    // a zero near a face is found from both sides; keep the first
    let mut certificates: Vec<Certificate> = Vec::new();
    let mut neighbourhoods: Vec<IntervalBox> = Vec::new();
    let mut certified_boxes = Vec::new();
    for (b, (nb, c)) in e.covered {
        certified_boxes.push(b);
        let dup = certificates
            .iter()
            .zip(&neighbourhoods)
            .any(|(k, knb)| c.zero_enclosure().is_subset(knb) || k.zero_enclosure().is_subset(&nb));
        if !dup {
            certificates.push(c);
            neighbourhoods.push(nb);
        }
    }
    let status = if !certificates.is_empty() {
        Status::Sat
    } else if e.unknown.is_empty() {
        Status::RegionUnsat
    } else {
        Status::Unknown
    };
    Ok(SolveReport {
        status,
        region,
        certificates,
        certified_boxes,
        excluded: e.excluded,
        unknown: e.unknown,
        boxes_processed: e.processed,
        elapsed: cfg.timing.then(|| start.elapsed()),
    })
}
