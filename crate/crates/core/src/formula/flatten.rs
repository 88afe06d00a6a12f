use super::ast::{Atom, CmpOp, Formula, QfFormula, Term};

/// A flat formula: texp applied only to variables, never nested. The
/// fresh variables are defined by `definitions`; `formula` is the
/// rewritten body conjoined with those definitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flattened {
    pub formula: QfFormula,
    pub fresh: Vec<String>,
    pub definitions: Vec<Atom>,
}

struct Flattener {
    taken: Vec<String>,
    fresh: Vec<String>,
    defs: Vec<Atom>,
    memo: Vec<(Term, String)>,
    counter: usize,
}

impl Flattener {
    fn fresh_name(&mut self) -> String {
        loop {
            self.counter += 1;
            let name = format!("u{}", self.counter);
            if !self.taken.contains(&name) {
                self.taken.push(name.clone());
                self.fresh.push(name.clone());
                return name;
            }
        }
    }

    fn name_for(&mut self, t: Term) -> String {
        if let Some((_, v)) = self.memo.iter().find(|(s, _)| *s == t) {
            return v.clone();
        }
        let v = self.fresh_name();
        self.defs.push(Atom::new(Term::Var(v.clone()), CmpOp::Eq, t.clone()));
        self.memo.push((t, v.clone()));
        v
    }

    fn term(&mut self, t: &Term) -> Term {
        match t {
            Term::Texp(inner) => {
                let arg = self.term(inner);
                match arg {
                    Term::Var(_) => Term::Texp(Box::new(arg)),
                    other => Term::texp(Term::Var(self.name_for(other))),
                }
            }
            Term::Const(_) | Term::Var(_) => t.clone(),
            Term::Neg(a) => Term::Neg(Box::new(self.term(a))),
            Term::Add(a, b) => Term::add(self.term(a), self.term(b)),
            Term::Sub(a, b) => Term::sub(self.term(a), self.term(b)),
            Term::Mul(a, b) => Term::mul(self.term(a), self.term(b)),
            Term::Pow(a, k) => Term::pow(self.term(a), *k),
        }
    }
}

/// Extracts every non-variable texp argument into a fresh variable
/// `u1, u2, ...` with a defining equation; identical arguments share one
/// variable.
pub fn flatten(f: &QfFormula) -> Flattened {
    let mut fl = Flattener {
        taken: f.vars.clone(),
        fresh: vec![],
        defs: vec![],
        memo: vec![],
        counter: 0,
    };
    let body = f.body.map_atoms(&mut |a| {
        Formula::Atom(Atom::new(fl.term(&a.lhs), a.op, fl.term(&a.rhs)))
    });
    let mut vars = f.vars.clone();
    vars.extend(fl.fresh.iter().cloned());
    let mut parts = vec![body];
    parts.extend(fl.defs.iter().cloned().map(Formula::Atom));
    Flattened {
        formula: QfFormula {
            vars,
            body: Formula::and(parts),
        },
        fresh: fl.fresh,
        definitions: fl.defs,
    }
}

/// True if texp is applied only to variables.
pub fn is_flat(f: &Formula) -> bool {
    let mut ok = true;
    for a in f.atoms() {
        for t in [&a.lhs, &a.rhs] {
            t.visit(&mut |s| {
                if let Term::Texp(inner) = s {
                    ok &= matches!(inner.as_ref(), Term::Var(_));
                }
            });
        }
    }
    ok
}
