use super::certificate::{Certificate, JacobianEnclosure};
use super::linalg::{approx_inverse, det_enclosure, identity_minus_product, interval_mat_vec, point_mat_vec, DMatrix, IMatrix};
use super::SquareSystem;
use crate::enclose::{Dyadic, Interval, IntervalBox, Round};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `K(X) ∩ X`; `strict` when `K(X)` lies in the interior of `X`, which
    /// proves a unique zero in `X`.
    Contracted { image: IntervalBox, strict: bool },
    /// `X` contains no zero.
    Excluded,
    Inconclusive(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Failure {
    #[error("no contraction: the Krawczyk operator never mapped the box into its interior")]
    NoContraction,
    #[error("Jacobian singular: no regular zero could be certified")]
    JacobianSingular,
    #[error("domain violation: a zero may lie on the boundary of the texp domain")]
    DomainViolation,
    #[error("budget exhausted before certification")]
    BudgetExhausted,
    #[error("box excluded: it contains no zero")]
    Excluded,
}

/// Bounds on iteration count and the precision ladder.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_iterations: usize,
    pub precision_start: u32,
    pub precision_cap: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_iterations: 64,
            precision_start: 64,
            precision_cap: 4096,
        }
    }
}

/// Everything one Krawczyk application produced.
pub(crate) struct Step {
    pub verdict: Verdict,
    pub midpoint: Vec<Dyadic>,
    pub preconditioner: DMatrix,
    pub image: Option<IntervalBox>,
    pub jacobian: Option<IMatrix>,
}

impl Step {
    fn bare(verdict: Verdict) -> Step {
        Step {
            verdict,
            midpoint: vec![],
            preconditioner: vec![],
            image: None,
            jacobian: None,
        }
    }
}

fn ulp(x: &Interval, prec: u32) -> Dyadic {
    match x.mag().msb() {
        Some(e) => Dyadic::pow2(e + 1 - prec as i64),
        None => Dyadic::pow2(-(prec as i64)),
    }
}

/// `k ⊂ int x` with a margin of one unit in the last place per coordinate.
pub(crate) fn strictly_inside(k: &IntervalBox, x: &IntervalBox, prec: u32) -> bool {
    k.dim() == x.dim()
        && k.coords().iter().zip(x.coords()).all(|(a, b)| {
            let u = ulp(b, prec);
            a.lo() >= &b.lo().add(&u) && a.hi() <= &b.hi().sub(&u)
        })
}

/// Midpoint rounded to nearest at `prec` bits, kept inside the box.
fn rounded_midpoint(x: &IntervalBox, prec: u32) -> Vec<Dyadic> {
    x.coords()
        .iter()
        .map(|c| {
            let m = c.midpoint().round(prec, Round::Nearest);
            m.greater(c.lo()).lesser(c.hi()).clone()
        })
        .collect()
}

/// `K(X) = m − Y·F(m) + (I − Y·J(X))(X − m)` with a given preconditioner.
pub(crate) fn krawczyk_image<S: SquareSystem>(
    sys: &S,
    x: &IntervalBox,
    m: &[Dyadic],
    y: &DMatrix,
    prec: u32,
) -> Option<(IntervalBox, IMatrix)> {
    let fm = sys.eval_domain(&IntervalBox::point(m), prec)?;
    let j = sys.jacobian_domain(x, prec)?;
    let yf = point_mat_vec(y, &fm, prec);
    let c = identity_minus_product(y, &j, prec);
    let dx: Vec<Interval> = x
        .coords()
        .iter()
        .zip(m)
        .map(|(xi, mi)| xi.sub(&Interval::point(mi.clone()), prec))
        .collect();
    let cd = interval_mat_vec(&c, &dx, prec);
    let k = m
        .iter()
        .zip(yf.iter().zip(&cd))
        .map(|(mi, (a, b))| Interval::point(mi.clone()).sub(a, prec).add(b, prec))
        .collect();
    Some((IntervalBox::new(k), j))
}

pub(crate) fn krawczyk_step<S: SquareSystem>(sys: &S, x: &IntervalBox, prec: u32) -> Step {
    assert_eq!(x.dim(), sys.dim(), "box dimension");
    let Some(fx) = sys.eval_domain(x, prec) else {
        return Step::bare(Verdict::Excluded);
    };
    if fx.iter().any(Interval::excludes_zero) {
        return Step::bare(Verdict::Excluded);
    }
    let m = rounded_midpoint(x, prec);
    let mbox = IntervalBox::point(&m);
    let Some(jm) = sys.jacobian_domain(&mbox, prec) else {
        return Step::bare(Verdict::Inconclusive("midpoint outside the domain".into()));
    };
    let jmid: DMatrix = jm
        .iter()
        .map(|r| r.iter().map(|e| e.midpoint().round(prec, Round::Nearest)).collect())
        .collect();
    let Some(y) = approx_inverse(&jmid, prec) else {
        return Step::bare(Verdict::Inconclusive(
            "midpoint Jacobian singular at working precision".into(),
        ));
    };
    let Some((k, j)) = krawczyk_image(sys, x, &m, &y, prec) else {
        return Step::bare(Verdict::Inconclusive("midpoint outside the domain".into()));
    };
    let verdict = if strictly_inside(&k, x, prec) {
        Verdict::Contracted {
            image: k.clone(),
            strict: true,
        }
    } else {
        match k.intersect(x) {
            None => Verdict::Excluded,
            Some(n) if n != *x => Verdict::Contracted { image: n, strict: false },
            Some(_) => Verdict::Inconclusive("no contraction".into()),
        }
    };
    Step {
        verdict,
        midpoint: m,
        preconditioner: y,
        image: Some(k),
        jacobian: Some(j),
    }
}

/// One Krawczyk test of `x` at `prec` bits.
pub fn krawczyk<S: SquareSystem>(sys: &S, x: &IntervalBox, prec: u32) -> Verdict {
    krawczyk_step(sys, x, prec).verdict
}

/// Clips the first `ell` coordinates to `[-1 + 2^-prec, 1 - 2^-prec]`.
pub(crate) fn clip_to_domain(x: &IntervalBox, ell: usize, prec: u32) -> Option<IntervalBox> {
    let eps = Dyadic::pow2(-(prec as i64));
    let lim = Interval::new(Dyadic::from_i64(-1).add(&eps), Dyadic::one().sub(&eps));
    let mut coords = x.coords().to_vec();
    for c in coords.iter_mut().take(ell) {
        *c = c.intersect(&lim)?;
    }
    Some(IntervalBox::new(coords))
}

/// Whether the slab removed by clipping could hold a zero.
fn boundary_suspect<S: SquareSystem>(sys: &S, orig: &IntervalBox, prec: u32) -> bool {
    let eps = Dyadic::pow2(-(prec as i64));
    let one = Dyadic::one();
    let m1 = Dyadic::from_i64(-1);
    for i in 0..sys.restricted() {
        let c = orig.coord(i);
        let hi_slab = Interval::new(one.sub(&eps), one.clone());
        let lo_slab = Interval::new(m1.clone(), m1.add(&eps));
        for slab in [hi_slab, lo_slab] {
            if let Some(part) = c.intersect(&slab) {
                let b = orig.with_coord(i, part);
                if let Some(v) = sys.eval_domain(&b, prec) {
                    if v.iter().all(Interval::contains_zero) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Certifies a unique regular zero in `x`, iterating the Krawczyk
/// operator and doubling the precision while the box is limited by it.
pub fn certify_regular_zero<S: SquareSystem>(sys: &S, x: &IntervalBox, budget: Budget) -> Result<Certificate<S>, Failure> {
    let mut prec = budget.precision_start.max(16);
    let ell = sys.restricted();
    let Some(mut cur) = clip_to_domain(x, ell, prec) else {
        return Err(Failure::DomainViolation);
    };
    let mut best: Option<(IntervalBox, Step)> = None;
    let mut failure = Failure::BudgetExhausted;
    for _ in 0..budget.max_iterations {
        let step = krawczyk_step(sys, &cur, prec);
        match step.verdict.clone() {
            Verdict::Contracted { image, strict: true } => {
                let old = cur.max_width();
                let new = image.max_width();
                let target = Dyadic::pow2(16 - prec as i64);
                // a degenerate coordinate can never be strictly contracted,
                // so widen a little before the next pass
                let grown = IntervalBox::new(
                    image
                        .coords()
                        .iter()
                        .map(|c| c.inflate(&c.width().mul_pow2(-3).add(&Dyadic::one().add(&c.mag()).mul_pow2(8 - prec as i64))))
                        .collect(),
                );
                let next = grown.intersect(&cur).unwrap_or(image);
                best = Some((cur, step));
                if new <= target || new.mul_pow2(1) > old {
                    break;
                }
                cur = next;
            }
            Verdict::Contracted { image, strict: false } => {
                if best.is_some() {
                    break;
                }
                if image.max_width().mul_pow2(1) > cur.max_width() && image.max_width() < Dyadic::pow2(-(prec as i64) / 2) {
                    if prec * 2 > budget.precision_cap {
                        failure = Failure::BudgetExhausted;
                        break;
                    }
                    prec *= 2;
                }
                cur = image;
            }
            Verdict::Excluded => {
                if best.is_some() {
                    break;
                }
                return Err(if boundary_suspect(sys, x, prec) {
                    Failure::DomainViolation
                } else {
                    Failure::Excluded
                });
            }
            Verdict::Inconclusive(why) => {
                if best.is_some() {
                    break;
                }
                let limited = cur.max_width() < Dyadic::pow2(-(prec as i64) / 2);
                if limited && prec * 2 <= budget.precision_cap {
                    prec *= 2;
                    continue;
                }
                failure = if why.contains("singular") {
                    Failure::JacobianSingular
                } else if limited {
                    Failure::BudgetExhausted
                } else {
                    Failure::NoContraction
                };
                break;
            }
        }
    }
    let Some((bx, step)) = best else {
        if boundary_suspect(sys, x, prec) {
            return Err(Failure::DomainViolation);
        }
        return Err(failure);
    };
    let entries = step.jacobian.expect("strict step has a Jacobian");
    let det = det_enclosure(&entries, prec);
    if !det.excludes_zero() {
        return Err(Failure::JacobianSingular);
    }
    Ok(Certificate {
        system: sys.clone(),
        region: bx,
        midpoint: step.midpoint,
        preconditioner: step.preconditioner,
        krawczyk_image: step.image.expect("strict step has an image"),
        jacobian: JacobianEnclosure { entries, det },
        precision: prec,
    })
}
