use super::ReduceError;
use crate::algebra::{determinant, minor, ExpPolynomial, KhovanskiiSystem, Shape};
use crate::certify::{box_around, certify_regular_zero, newton_f64, Budget, Certificate};

/// A system extended by the sign witness, the minor reciprocal and, when
/// texp occurs, the de-nesting variable for `texp(x_ℓ)`.
#[derive(Clone, Debug)]
pub struct AugmentedSystem {
    pub system: KhovanskiiSystem,
    pub original_n: usize,
    pub minor_index: usize,
    pub denested: bool,
    det: ExpPolynomial,
    minor: ExpPolynomial,
}

/// Replaces `texp(x_ℓ)` by a fresh last variable `x_{n+1}` and appends
/// `x_{n+1} − texp(x_ℓ)`. Identity on systems without restricted
/// coordinates.
pub fn denest(sys: &KhovanskiiSystem) -> Result<KhovanskiiSystem, ReduceError> {
    let (ell, n) = (sys.ell(), sys.n());
    if ell == 0 {
        return Ok(sys.clone());
    }
    let shape = Shape::new(ell, n + 1)?;
    let mut eqs = Vec::with_capacity(n + 1);
    for p in sys.equations() {
        eqs.push(p.embed(shape)?.replace_texp_by_var(ell - 1, n)?);
    }
    eqs.push(ExpPolynomial::var(shape, n)? - ExpPolynomial::texp_var(shape, ell - 1)?);
    Ok(KhovanskiiSystem::new(shape, eqs)?)
}

/// Negates the first equation when the certified Jacobian determinant is
/// negative. Returns the system and whether it was flipped.
pub fn orient_positive(sys: &KhovanskiiSystem, cert: &Certificate) -> Result<(KhovanskiiSystem, bool), ReduceError> {
    let det = &cert.jacobian.det;
    if !det.excludes_zero() {
        return Err(ReduceError::NoRegularMinor);
    }
    if det.lo().is_positive() {
        return Ok((sys.clone(), false));
    }
    let mut eqs = sys.equations().to_vec();
    eqs[0] = -&eqs[0];
    Ok((KhovanskiiSystem::new(sys.shape(), eqs)?, true))
}

/// Appends `x_{n+1}²·det J − 1` and `x_{n+2}·M − 1`, where `M` is the
/// minor of `J` without its last row and the column `minor_index`, then
/// de-nests `texp(x_ℓ)`.
pub fn regularize_augment(sys: &KhovanskiiSystem, minor_index: usize) -> Result<AugmentedSystem, ReduceError> {
    let (ell, n) = (sys.ell(), sys.n());
    if minor_index >= n {
        return Err(ReduceError::Algebra(crate::algebra::AlgebraError::IndexOutOfRange { index: minor_index, n }));
    }
    let det = sys.jacobian_determinant();
    let m = minor(sys.jacobian(), &[n - 1], &[minor_index]);
    let minor_poly = determinant(&m, sys.shape());
    let shape = Shape::new(ell, n + 2)?;
    let mut eqs: Vec<ExpPolynomial> = sys.equations().iter().map(|p| p.embed(shape)).collect::<Result<_, _>>()?;
    let one = ExpPolynomial::from_int(shape, 1);
    let w1 = ExpPolynomial::var(shape, n)?;
    let w2 = ExpPolynomial::var(shape, n + 1)?;
    eqs.push(&(&w1.pow(2) * &det.embed(shape)?) - &one);
    eqs.push(&(&w2 * &minor_poly.embed(shape)?) - &one);
    let augmented = KhovanskiiSystem::new(shape, eqs)?;
    let system = denest(&augmented)?;
    Ok(AugmentedSystem {
        denested: ell > 0,
        system,
        original_n: n,
        minor_index,
        det,
        minor: minor_poly,
    })
}

impl AugmentedSystem {
    /// Certifies the extension of a certified zero of the original system.
    /// The witnesses are `det^{-1/2}`, `1/M` and `exp(a_ℓ)`; the projection
    /// of the result must land in the original certified box.
    pub fn certify_extension(&self, cert: &Certificate, budget: Budget) -> Result<Certificate, ReduceError> {
        let image = cert.zero_enclosure();
        if image.dim() != self.original_n {
            return Err(ReduceError::TooSmall(image.dim()));
        }
        let prec = cert.precision.max(64);
        let det = self
            .det
            .evaluate_on_domain(image, prec)?
            .ok_or(ReduceError::DomainLeft)?;
        if !det.lo().is_positive() {
            return Err(ReduceError::NegativeDeterminant);
        }
        let minor = self
            .minor
            .evaluate_on_domain(image, prec)?
            .ok_or(ReduceError::DomainLeft)?;
        if !minor.excludes_zero() {
            return Err(ReduceError::SingularMinor(self.minor_index));
        }
        let mut x: Vec<f64> = image.coords().iter().map(|c| c.mid_f64()).collect();
        x.push(det.mid_f64().powf(-0.5));
        x.push(1.0 / minor.mid_f64());
        if self.denested {
            x.push(x[self.system.ell() - 1].exp());
        }
        let x = newton_f64(&self.system, &x, 20).unwrap_or(x);
        let start = box_around(&x, 1e-9).ok_or(ReduceError::DomainLeft)?;
        let out = certify_regular_zero(&self.system, &start, budget).map_err(ReduceError::Recertification)?;
        let idx: Vec<usize> = (0..self.original_n).collect();
        if !out.zero_enclosure().project(&idx).is_subset(&cert.region) {
            return Err(ReduceError::ProjectionEscapes);
        }
        Ok(out)
    }

    pub fn determinant(&self) -> &ExpPolynomial {
        &self.det
    }

    pub fn minor(&self) -> &ExpPolynomial {
        &self.minor
    }
}
