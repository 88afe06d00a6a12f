use std::time::{Duration, Instant};

use serde_json::json;

use super::engine::{explore, Node, Step};
use super::square::{neighbourhood, settle, Local};
use super::{SearchConfig, SearchError, Status};
use crate::algebra::{determinant, ExpPolynomial, KhovanskiiSystem, Rational, Shape};
use crate::certify::{certify_regular_zero, Budget, Certificate};
use crate::enclose::{Dyadic, Interval, IntervalBox};
use crate::formula::{
    eval_atom, eval_term, flatten, normalize_complexity, parse_formula, Atom, CmpOp, Disjunct, FormulaError, QfFormula,
    Truth,
};
use crate::reduce::witness_slice;

/// A satisfying point: enclosures of the variables, the certificate of
/// the square system that pins it down, and the enclosure of `lhs − rhs`
/// for every atom of the case over the certified box.
#[derive(Clone, Debug)]
pub struct Witness {
    pub values: Vec<(String, Interval)>,
    /// Absent only for formulas without variables.
    pub certificate: Option<Certificate>,
    pub verification: Vec<(Atom, Interval)>,
}

#[derive(Clone, Debug)]
pub struct CaseReport {
    pub atoms: Vec<Atom>,
    pub status: Status,
    pub excluded: Vec<IntervalBox>,
    pub unknown: Vec<IntervalBox>,
    pub boxes_processed: usize,
}

#[derive(Clone, Debug)]
pub struct DisjunctReport {
    pub disjunct: Disjunct,
    pub status: Status,
    pub cases: Vec<CaseReport>,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug)]
pub struct SatReport {
    pub formula: QfFormula,
    pub flattened: QfFormula,
    pub status: Status,
    pub disjuncts: Vec<DisjunctReport>,
    pub elapsed: Option<Duration>,
}

fn combine(statuses: impl IntoIterator<Item = Status>) -> Status {
    let mut all_unsat = true;
    for s in statuses {
        match s {
            Status::Sat => return Status::Sat,
            Status::RegionUnsat | Status::Skipped => {}
            Status::Unknown => all_unsat = false,
        }
    }
    if all_unsat {
        Status::RegionUnsat
    } else {
        Status::Unknown
    }
}

impl Witness {
    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "values": self.values.iter().map(|(v, i)| json!({ "var": v, "value": i })).collect::<Vec<_>>(),
            "certificate": self.certificate.as_ref().map(Certificate::to_json_value),
            "verification": self
                .verification
                .iter()
                .map(|(a, i)| json!({ "atom": a.to_string(), "difference": i }))
                .collect::<Vec<_>>(),
        })
    }
}

impl CaseReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "atoms": self.atoms.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "status": self.status,
            "boxes_processed": self.boxes_processed,
            "excluded": self.excluded,
            "unknown": self.unknown,
        })
    }
}

impl DisjunctReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "disjunct": self.disjunct.to_string(),
            "status": self.status,
            "cases": self.cases.iter().map(CaseReport::to_json_value).collect::<Vec<_>>(),
            "witness": self.witness.as_ref().map(Witness::to_json_value),
        })
    }
}

impl SatReport {
    pub fn to_json_value(&self, cfg: &SearchConfig) -> serde_json::Value {
        let mut v = json!({
            "status": self.status,
            "formula": self.formula.to_string(),
            "flattened": self.flattened.to_string(),
            "disjuncts": self.disjuncts.iter().map(DisjunctReport::to_json_value).collect::<Vec<_>>(),
            "config": cfg.to_json_value(),
        });
        if let Some(t) = self.elapsed {
            v["timing_ms"] = json!(t.as_millis() as u64);
        }
        v
    }
}

/// How the equalities of a case are turned into a square system.
enum EquationBlock {
    None,
    /// As many independent equalities as variables; `extra` are the
    /// atoms left over, which intervals can refute but never confirm.
    Square { sys: KhovanskiiSystem, extra: Vec<Atom> },
    /// Fewer equalities than variables, completed per box.
    Under(Vec<ExpPolynomial>),
}

enum Check {
    Holds(Vec<(Atom, Interval)>, Certificate),
    Fails,
    Undecided,
}

struct Case<'a> {
    d: &'a Disjunct,
    atoms: &'a [Atom],
    shape: Shape,
    region: IntervalBox,
    block: EquationBlock,
    cfg: &'a SearchConfig,
}

fn first_square_subset(eqs: &[ExpPolynomial], shape: Shape) -> Option<Vec<usize>> {
    let n = shape.n();
    fn rec(start: usize, k: usize, m: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..m {
            cur.push(i);
            if rec(i + 1, k, m, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let mut found = None;
    rec(0, n, eqs.len(), &mut Vec::new(), &mut |sel| {
        let jac: Vec<Vec<ExpPolynomial>> = sel
            .iter()
            .map(|&i| (0..n).map(|j| eqs[i].partial(j).expect("index in range")).collect())
            .collect();
        if determinant(&jac, shape).is_zero() {
            false
        } else {
            found = Some(sel.to_vec());
            true
        }
    });
    found
}

impl<'a> Case<'a> {
    fn new(d: &'a Disjunct, atoms: &'a [Atom], cfg: &'a SearchConfig) -> Result<Self, SearchError> {
        let shape = d.shape();
        let n = shape.n();
        let r = &cfg.radius;
        let region = IntervalBox::new(
            (0..n)
                .map(|i| {
                    if i < d.ell {
                        Interval::from_i64_pair(-1, 1)
                    } else {
                        Interval::new(r.neg(), r.clone())
                    }
                })
                .collect(),
        );
        let eq_atoms: Vec<&Atom> = atoms.iter().filter(|a| a.op == CmpOp::Eq).collect();
        let eqs: Vec<ExpPolynomial> = eq_atoms
            .iter()
            .map(|a| d.atom_polynomial(a, shape))
            .collect::<Result<_, FormulaError>>()?;
        let block = if eqs.is_empty() {
            EquationBlock::None
        } else if eqs.len() < n {
            EquationBlock::Under(eqs)
        } else {
            match first_square_subset(&eqs, shape) {
                Some(sel) => {
                    let extra = (0..eqs.len())
                        .filter(|i| !sel.contains(i))
                        .map(|i| eq_atoms[i].clone())
                        .collect();
                    let sys = KhovanskiiSystem::new(shape, sel.iter().map(|&i| eqs[i].clone()).collect())?;
                    EquationBlock::Square { sys, extra }
                }
                // every choice is identically singular: no regular zero
                // to certify, intervals may still refute
                None => EquationBlock::Square {
                    sys: KhovanskiiSystem::new(shape, eqs[..n].to_vec())?,
                    extra: eq_atoms[n..].iter().map(|a| (*a).clone()).collect(),
                },
            }
        };
        Ok(Case {
            d,
            atoms,
            shape,
            region,
            block,
            cfg,
        })
    }

    fn truth(&self, vals: &[Interval], prec: u32) -> Truth {
        self.atoms
            .iter()
            .fold(Truth::True, |acc, a| acc.and(eval_atom(a, &self.d.vars, vals, prec)))
    }

    fn differences(&self, vals: &[Interval], prec: u32) -> Vec<(Atom, Interval)> {
        self.atoms
            .iter()
            .map(|a| {
                let v = eval_term(&a.lhs, &self.d.vars, vals, prec).sub(&eval_term(&a.rhs, &self.d.vars, vals, prec), prec);
                (a.clone(), v)
            })
            .collect()
    }

    /// Checks every atom that the system does not already guarantee at
    /// the certified zero, raising the precision while undecided.
    fn check(&self, sys: &KhovanskiiSystem, cert: Certificate, guaranteed: &[&Atom]) -> Check {
        let mut cert = cert;
        loop {
            let prec = cert.precision.max(self.cfg.precision);
            let vals = cert.zero_enclosure().coords();
            let mut acc = Truth::True;
            for a in self.atoms.iter().filter(|a| !guaranteed.contains(a)) {
                acc = acc.and(eval_atom(a, &self.d.vars, vals, prec));
                if acc == Truth::False {
                    return Check::Fails;
                }
            }
            if acc == Truth::True {
                let diffs = self.differences(vals, prec);
                return Check::Holds(diffs, cert);
            }
            let next = prec * 2;
            if next > self.cfg.precision_cap {
                return Check::Undecided;
            }
            let budget = Budget {
                precision_start: next,
                ..self.cfg.budget()
            };
            match certify_regular_zero(sys, &cert.region, budget) {
                Ok(c) if c.precision > cert.precision || c.zero_enclosure().max_width() < cert.zero_enclosure().max_width() => cert = c,
                _ => return Check::Undecided,
            }
        }
    }

    fn pinned(&self, node: &Node) -> Option<Check> {
        let p = node.b.midpoint();
        let one = Dyadic::one();
        if p[..self.d.ell].iter().any(|x| x.abs() >= one) {
            return None;
        }
        let eqs = p
            .iter()
            .enumerate()
            .map(|(i, x)| Some(ExpPolynomial::var(self.shape, i).ok()? - ExpPolynomial::constant(self.shape, x.to_rational())))
            .collect::<Option<Vec<_>>>()?;
        let sys = KhovanskiiSystem::new(self.shape, eqs).ok()?;
        let start = IntervalBox::point(&p).inflate(&Dyadic::pow2(-(self.cfg.precision as i64) / 2));
        let cert = certify_regular_zero(&sys, &start, self.cfg.budget()).ok()?;
        Some(self.check(&sys, cert, &[]))
    }

    fn process(&self, node: &Node, small: bool) -> Step<Witness> {
        let prec = self.cfg.precision;
        let truth = self.truth(node.b.coords(), prec);
        if truth == Truth::False {
            return Step::Excluded;
        }
        let found = |diffs: Vec<(Atom, Interval)>, cert: Certificate| {
            let values = self
                .d
                .vars
                .iter()
                .cloned()
                .zip(cert.zero_enclosure().coords().iter().cloned())
                .collect();
            Step::Found(Witness {
                values,
                certificate: Some(cert),
                verification: diffs,
            })
        };
        match &self.block {
            EquationBlock::None => {
                if truth != Truth::True {
                    return Step::Undecided;
                }
                match self.pinned(node) {
                    Some(Check::Holds(diffs, cert)) => found(diffs, cert),
                    _ => Step::Undecided,
                }
            }
            EquationBlock::Square { sys, extra } => {
                if !small {
                    return Step::Undecided;
                }
                match settle(sys, &node.b, &self.region, self.cfg) {
                    Local::NoZero => Step::Excluded,
                    Local::Open => Step::Undecided,
                    Local::Unique(_, cert) => {
                        let guaranteed: Vec<&Atom> = self
                            .atoms
                            .iter()
                            .filter(|a| a.op == CmpOp::Eq && !extra.contains(a))
                            .collect();
                        match self.check(sys, cert, &guaranteed) {
                            Check::Holds(diffs, cert) => found(diffs, cert),
                            // the only zero near the box violates the case
                            Check::Fails => Step::Excluded,
                            Check::Undecided => Step::Undecided,
                        }
                    }
                }
            }
            EquationBlock::Under(eqs) => {
                if !small {
                    return Step::Undecided;
                }
                let center: Vec<Rational> = node.jittered_center(self.cfg.seed).iter().map(Dyadic::to_rational).collect();
                let Ok(sys) = witness_slice(eqs, &center) else {
                    return Step::Undecided;
                };
                let nb = neighbourhood(&node.b, &self.region);
                let Ok(cert) = certify_regular_zero(&sys, &nb, self.cfg.budget()) else {
                    return Step::Undecided;
                };
                let guaranteed: Vec<&Atom> = self.atoms.iter().filter(|a| a.op == CmpOp::Eq).collect();
                match self.check(&sys, cert, &guaranteed) {
                    Check::Holds(diffs, cert) => found(diffs, cert),
                    _ => Step::Undecided,
                }
            }
        }
    }
}

fn closed_case(atoms: &[Atom], prec: u32) -> (Status, Option<Witness>) {
    let t = atoms.iter().fold(Truth::True, |acc, a| acc.and(eval_atom(a, &[], &[], prec)));
    match t {
        Truth::True => {
            let verification = atoms
                .iter()
                .map(|a| (a.clone(), eval_term(&a.lhs, &[], &[], prec).sub(&eval_term(&a.rhs, &[], &[], prec), prec)))
                .collect();
            (
                Status::Sat,
                Some(Witness {
                    values: vec![],
                    certificate: None,
                    verification,
                }),
            )
        }
        Truth::False => (Status::RegionUnsat, None),
        Truth::Unknown => (Status::Unknown, None),
    }
}

fn solve_disjunct_in(d: &Disjunct, cfg: &SearchConfig, pool: &rayon::ThreadPool) -> Result<DisjunctReport, SearchError> {
    let mut cases = Vec::new();
    let mut witness = None;
    for atoms in d.conjunctive_cases() {
        if witness.is_some() {
            cases.push(CaseReport {
                atoms,
                status: Status::Skipped,
                excluded: vec![],
                unknown: vec![],
                boxes_processed: 0,
            });
            continue;
        }
        if d.vars.is_empty() {
            let (status, w) = closed_case(&atoms, cfg.precision);
            witness = w;
            cases.push(CaseReport {
                atoms,
                status,
                excluded: vec![],
                unknown: vec![],
                boxes_processed: 0,
            });
            continue;
        }
        let case = Case::new(d, &atoms, cfg)?;
        let e = pool.install(|| explore(&case.region, cfg, |node, small| case.process(node, small)));
        let status = if e.found.is_some() {
            Status::Sat
        } else if e.unknown.is_empty() {
            Status::RegionUnsat
        } else {
            Status::Unknown
        };
        witness = e.found.map(|(_, w)| w);
        cases.push(CaseReport {
            atoms: atoms.clone(),
            status,
            excluded: e.excluded,
            unknown: e.unknown,
            boxes_processed: e.processed,
        });
    }
    let status = combine(cases.iter().map(|c| c.status));
    Ok(DisjunctReport {
        disjunct: d.clone(),
        status,
        cases,
        witness,
    })
}

/// Decides one disjunct over its search region: inside variables range
/// over `[-1, 1]`, the others over `[-radius, radius]`.
pub fn solve_disjunct(d: &Disjunct, cfg: &SearchConfig) -> Result<DisjunctReport, SearchError> {
    cfg.validate()?;
    let pool = cfg.pool()?;
    solve_disjunct_in(d, cfg, &pool)
}

pub fn solve_formula(f: &QfFormula, cfg: &SearchConfig) -> Result<SatReport, SearchError> {
    cfg.validate()?;
    let start = Instant::now();
    let pool = cfg.pool()?;
    let flat = flatten(f);
    let ds = normalize_complexity(&flat.formula)?;
    let mut reports: Vec<DisjunctReport> = Vec::with_capacity(ds.len());
    for d in ds {
        if reports.iter().any(|r| r.status == Status::Sat) {
            reports.push(DisjunctReport {
                disjunct: d,
                status: Status::Skipped,
                cases: vec![],
                witness: None,
            });
            continue;
        }
        reports.push(solve_disjunct_in(&d, cfg, &pool)?);
    }
    Ok(SatReport {
        formula: f.clone(),
        flattened: flat.formula,
        status: combine(reports.iter().map(|r| r.status)),
        disjuncts: reports,
        elapsed: cfg.timing.then(|| start.elapsed()),
    })
}

pub fn solve_formula_text(text: &str, cfg: &SearchConfig) -> Result<SatReport, SearchError> {
    let f = parse_formula(text).map_err(FormulaError::from)?;
    solve_formula(&f, cfg)
}
