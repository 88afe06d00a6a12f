use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use super::genexp::{GenExpPolynomial, GenExpSystem};
use super::ReduceError;
use crate::algebra::{DependenceRelation, KhovanskiiSystem, Rational, Shape};
use crate::certify::{certify_regular_zero, det_enclosure, Budget, Certificate, SquareSystem};
use crate::enclose::{Dyadic, Interval, IntervalBox};

/// Result of eliminating one dependent coordinate.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    pub system: GenExpSystem,
    pub shape: Shape,
    pub drop_index: usize,
    pub relation: DependenceRelation,
    pub transformed_box: IntervalBox,
    pub certificate: Certificate<GenExpSystem>,
    /// Equivalent texp-polynomial form, when one exists.
    pub plain: Option<KhovanskiiSystem>,
}

fn int(b: &BigInt) -> Rational {
    Rational::from_integer(b.clone())
}

/// The images of the old coordinates and texp factors under the
/// substitution, as polynomials in the new variables.
struct Substitution {
    xs: Vec<GenExpPolynomial>,
    ys: Vec<GenExpPolynomial>,
}

fn substitution(n: usize, ell: usize, rel: &DependenceRelation) -> Substitution {
    let l = ell - 1;
    let m = n - 1;
    let d = int(&rel.d);
    let shift = &rel.g / &d;
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(ell);
    for i in 0..l {
        xs.push(GenExpPolynomial::var(m, i, d.clone()));
        let mut lambda = vec![Rational::zero(); m];
        lambda[i] = d.clone();
        ys.push(GenExpPolynomial::exp_linear(lambda, Rational::zero()));
    }
    let mut last = GenExpPolynomial::constant(m, shift.clone());
    let mut lambda = vec![Rational::zero(); m];
    for (i, k) in rel.k.iter().enumerate() {
        last = last.add(&GenExpPolynomial::var(m, i, int(k)));
        lambda[i] = int(k);
    }
    xs.push(last);
    ys.push(GenExpPolynomial::exp_linear(lambda, shift));
    for j in ell..n {
        xs.push(GenExpPolynomial::var(m, j - 1, Rational::one()));
    }
    Substitution { xs, ys }
}

fn substitute(p: &crate::algebra::ExpPolynomial, s: &Substitution) -> GenExpPolynomial {
    let m = s.xs[0].n();
    let mut acc = GenExpPolynomial::zero(m);
    for t in p.terms() {
        let mut term = GenExpPolynomial::constant(m, t.coeff.clone());
        for (i, &a) in t.xpow.iter().enumerate() {
            if a > 0 {
                term = term.mul(&s.xs[i].pow(a));
            }
        }
        for (j, &b) in t.ypow.iter().enumerate() {
            if b > 0 {
                term = term.mul(&s.ys[j].pow(b));
            }
        }
        acc = acc.add(&term);
    }
    clear_negative_exponents(acc)
}

/// Multiplies by `Exp(μ·X)` so that no coefficient of `X` in an
/// exponential argument is negative.
fn clear_negative_exponents(p: GenExpPolynomial) -> GenExpPolynomial {
    let m = p.n();
    let mut mu = vec![Rational::zero(); m];
    for t in p.terms() {
        for (j, l) in t.lambda.iter().enumerate() {
            if l.is_negative() && -l > mu[j] {
                mu[j] = -l;
            }
        }
    }
    if mu.iter().all(Zero::is_zero) {
        p
    } else {
        p.mul_exp(&mu)
    }
}

impl ReducedSystem {
    /// Maps a box of the new variables back to the original coordinates.
    pub fn lift_box(&self, b: &IntervalBox, prec: u32) -> IntervalBox {
        lift(&self.relation, b, prec)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let eqs: Vec<serde_json::Value> = self
            .system
            .equations()
            .iter()
            .map(|e| json!({ "text": e.to_string(), "terms": e.to_json() }))
            .collect();
        json!({
            "shape": [self.shape.ell(), self.shape.n()],
            "drop_index": self.drop_index,
            "relation": self.relation.to_string(),
            "point_transform": format!("X_i = a_i / {} for i < {}", self.relation.d, self.relation.ell()),
            "system": eqs,
            "plain": self.plain.as_ref().map(|p| p.to_string()),
            "transformed_box": self.transformed_box,
            "certificate": self.certificate.to_json_value(),
        })
    }
}

fn lift(rel: &DependenceRelation, b: &IntervalBox, prec: u32) -> IntervalBox {
    let l = rel.k.len();
    let d = int(&rel.d);
    let mut out = Vec::with_capacity(b.dim() + 1);
    for i in 0..l {
        out.push(b.coord(i).mul_rational(&d, prec));
    }
    let mut last = Interval::from_rational(&(&rel.g / &d), prec);
    for (i, k) in rel.k.iter().enumerate() {
        last = last.add(&b.coord(i).mul_rational(&int(k), prec), prec);
    }
    out.push(last);
    out.extend(b.coords()[l..].iter().cloned());
    IntervalBox::new(out)
}

fn strictly_in_unit(c: &Interval) -> bool {
    c.lo() > &Dyadic::from_i64(-1) && c.hi() < &Dyadic::one()
}

/// Eliminates `x_ℓ` through a candidate relation `d·a_ℓ = Σ k_i·a_i + g`
/// among the coordinates of a certified zero, and re-certifies the
/// reduced system. A failed re-certification rejects the relation.
pub fn eliminate_dependence(
    sys: &KhovanskiiSystem,
    rel: &DependenceRelation,
    cert: &Certificate,
    budget: Budget,
) -> Result<ReducedSystem, ReduceError> {
    let (n, ell) = (sys.n(), sys.ell());
    if ell == 0 || rel.ell() != ell {
        return Err(ReduceError::RelationShape {
            relation: rel.ell(),
            ell,
        });
    }
    if n < 2 {
        return Err(ReduceError::TooSmall(n));
    }
    let prec = cert.precision.max(64);
    let image = cert.zero_enclosure();
    if !rel.residual(&image.coords()[..ell], prec).contains_zero() {
        return Err(ReduceError::RelationInconsistent);
    }

    let l = ell - 1;
    let mut coords = Vec::with_capacity(n - 1);
    for i in 0..l {
        coords.push(image.coord(i).div_int(&rel.d, prec));
    }
    coords.extend(image.coords()[ell..].iter().cloned());
    let tight = IntervalBox::new(coords);
    let pad = tight.max_width().add(&Dyadic::pow2(-(prec as i64) / 2));
    let region = tight.inflate(&pad);

    let lifted = lift(rel, &region, prec);
    if !lifted.coords()[..ell].iter().all(strictly_in_unit) {
        return Err(ReduceError::DomainLeft);
    }

    let subst = substitution(n, ell, rel);
    let all: Vec<GenExpPolynomial> = sys.equations().iter().map(|p| substitute(p, &subst)).collect();
    let m = n - 1;
    let mut chosen = None;
    for drop in 0..n {
        let eqs: Vec<GenExpPolynomial> = all
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != drop)
            .map(|(_, e)| e.clone())
            .collect();
        let cand = GenExpSystem::new(l, eqs);
        let Some(j) = cand.jacobian_domain(&region, prec) else {
            continue;
        };
        if det_enclosure(&j, prec).excludes_zero() {
            chosen = Some((drop, cand));
            break;
        }
    }
    let Some((drop_index, system)) = chosen else {
        return Err(ReduceError::NoRegularMinor);
    };

    let certificate = certify_regular_zero(&system, &region, budget).map_err(ReduceError::Recertification)?;
    let shape = Shape::new(l, m)?;
    let plain = system
        .equations()
        .iter()
        .map(|e| e.to_plain(shape))
        .collect::<Option<Vec<_>>>()
        .and_then(|eqs| KhovanskiiSystem::new(shape, eqs).ok());
    // only meaningful when the texp arguments stay inside the domain
    let plain = plain.filter(|_| certificate.region.coords()[..l].iter().all(strictly_in_unit));
    Ok(ReducedSystem {
        system,
        shape,
        drop_index,
        relation: rel.clone(),
        transformed_box: region,
        certificate,
        plain,
    })
}
