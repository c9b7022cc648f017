//! Type-directed translation from source terms to evidence terms.

use crate::evidence::trans;
use crate::statics::{consistent, typecheck_gsf, TypeEnv, TypeError};
use crate::syntax::{Term, TermEps, TermKind};
use crate::types::{join, lift, matching, meet, Base, Evidence, MatchShape, Ty};

/// How many ascriptions to insert.
///
/// Both modes fuse source ascriptions of literal values into a single
/// evidence and leave literal bodies of type abstractions raw. `Compact`
/// also omits ascriptions between equal types; this is what the evaluator
/// runs and what printed traces show. `Uniform` inserts an ascription at
/// every consistency and matching site, so that two terms with the same
/// shape elaborate to terms with the same shape.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    #[default]
    Compact,
    Uniform,
}

/// `⟨lift(m), lift(m)⟩` for `m = g1 ⊓ g2`.
pub fn initial_evidence(env: &TypeEnv, g1: &Ty, g2: &Ty) -> Option<Evidence> {
    if !consistent(env, g1, g2) {
        return None;
    }
    let m = meet(g1, g2)?;
    Some(Evidence::refl(lift(&env.store, &m)))
}

pub fn elaborate(t: &Term) -> Result<(TermEps, Ty), TypeError> {
    elaborate_with(t, Mode::Compact)
}

pub fn elaborate_with(t: &Term, mode: Mode) -> Result<(TermEps, Ty), TypeError> {
    elaborate_in(&TypeEnv::new(), t, mode)
}

pub fn elaborate_in(env: &TypeEnv, t: &Term, mode: Mode) -> Result<(TermEps, Ty), TypeError> {
    let g = typecheck_gsf(env, t)?;
    let mut el = Elab { env: env.clone(), mode };
    let (te, g2) = el.go(t);
    debug_assert!(g == g2);
    Ok((te, g))
}

struct Elab {
    env: TypeEnv,
    mode: Mode,
}

fn refl(g: &Ty, env: &TypeEnv) -> Evidence {
    Evidence::refl(lift(&env.store, g))
}

impl Elab {
    /// Coerce `t : from` to `to`.
    fn coerce(&self, t: TermEps, from: &Ty, to: &Ty) -> TermEps {
        if self.mode == Mode::Compact && from == to {
            return t;
        }
        let ev = initial_evidence(&self.env, from, to)
            .unwrap_or_else(|| panic!("elaborating an inconsistent judgment {from} ~ {to}"));
        TermEps::asc(ev, t, to.clone())
    }

    /// Ascribe an elimination scrutinee to the matching constructor type.
    fn matched(&self, t: TermEps, g: &Ty, shape: MatchShape) -> (TermEps, Ty) {
        let m = matching(g, shape).expect("scrutinee type has the matched shape");
        if self.mode == Mode::Compact && !g.is_unknown() {
            return (t, m);
        }
        (TermEps::asc(refl(&m, &self.env), t, m.clone()), m)
    }

    fn go(&mut self, t: &Term) -> (TermEps, Ty) {
        use TermKind::*;
        match &t.kind {
            Const(c) => {
                let g = Ty::Base(c.base());
                (TermEps::asc(Evidence::refl(g.clone()), TermEps::Const(*c), g.clone()), g)
            }
            Var(x) => (TermEps::Var(x.clone()), self.env.lookup(x).unwrap().clone()),
            Lam(x, g, body) => {
                self.env.vars.push((x.clone(), g.clone()));
                let (b, gb) = self.go(body);
                self.env.vars.pop();
                let ty = Ty::Arrow(Box::new(g.clone()), Box::new(gb));
                let lam = TermEps::Lam(x.clone(), g.clone(), Box::new(b));
                (TermEps::asc(refl(&ty, &self.env), lam, ty.clone()), ty)
            }
            TyLam(x, body) => {
                self.env.tyvars.push(x.clone());
                let (b, gb) = self.go(body);
                self.env.tyvars.pop();
                let literal = matches!(body.kind, Const(_) | Lam(..) | TyLam(..));
                let b = match b {
                    TermEps::Asc(_, u, _) if literal => *u,
                    b => b,
                };
                let ty = Ty::Forall(x.clone(), Box::new(gb));
                let tl = TermEps::TyLam(x.clone(), Box::new(b));
                (TermEps::asc(refl(&ty, &self.env), tl, ty.clone()), ty)
            }
            Pair(a, b) => {
                let (ea, ga) = self.go(a);
                let (eb, gb) = self.go(b);
                (
                    TermEps::Pair(Box::new(ea), Box::new(eb)),
                    Ty::Pair(Box::new(ga), Box::new(gb)),
                )
            }
            Asc(a, g) => {
                let (ea, ga) = self.go(a);
                let literal = matches!(a.kind, Const(_) | Lam(..) | TyLam(..));
                if literal {
                    if let TermEps::Asc(e1, u, _) = &ea {
                        let e2 = initial_evidence(&self.env, &ga, g).unwrap();
                        if let Ok(e) = trans(e1, &e2) {
                            return (TermEps::Asc(e, u.clone(), g.clone()), g.clone());
                        }
                    }
                }
                let ev = initial_evidence(&self.env, &ga, g).unwrap();
                (TermEps::asc(ev, ea, g.clone()), g.clone())
            }
            Op(op, args) => {
                let (arg, res) = op.signature();
                let want = Ty::Base(arg);
                let es = args
                    .iter()
                    .map(|a| {
                        let (ea, ga) = self.go(a);
                        self.coerce(ea, &ga, &want)
                    })
                    .collect();
                (TermEps::Op(*op, es), Ty::Base(res))
            }
            App(f, a) => {
                let (ef, gf) = self.go(f);
                let (ef, m) = self.matched(ef, &gf, MatchShape::Function);
                let Ty::Arrow(d, c) = m else { unreachable!() };
                let (ea, ga) = self.go(a);
                let ea = self.coerce(ea, &ga, &d);
                (TermEps::App(Box::new(ef), Box::new(ea)), *c)
            }
            TyApp(f, g) => {
                let (ef, gf) = self.go(f);
                let (ef, m) = self.matched(ef, &gf, MatchShape::Forall);
                let Ty::Forall(x, body) = m else { unreachable!() };
                (TermEps::TyApp(Box::new(ef), g.clone()), body.subst(&x, g))
            }
            Proj(i, a) => {
                let (ea, ga) = self.go(a);
                let (ea, m) = self.matched(ea, &ga, MatchShape::Pair);
                let Ty::Pair(l, r) = m else { unreachable!() };
                (TermEps::Proj(*i, Box::new(ea)), if *i == 1 { *l } else { *r })
            }
            If(c, a, b) => {
                let (ec, gc) = self.go(c);
                let ec = self.coerce(ec, &gc, &Ty::Base(Base::Bool));
                let (ea, ga) = self.go(a);
                let (eb, gb) = self.go(b);
                let m = join(&ga, &gb).unwrap();
                let ea = self.coerce(ea, &ga, &m);
                let eb = self.coerce(eb, &gb, &m);
                (TermEps::If(Box::new(ec), Box::new(ea), Box::new(eb)), m)
            }
            Let(x, ann, a, body) => {
                // sugar for an immediate application
                let (ea, ga) = self.go(a);
                let g = ann.clone().unwrap_or_else(|| ga.clone());
                let ea = self.coerce(ea, &ga, &g);
                self.env.vars.push((x.clone(), g.clone()));
                let (eb, gb) = self.go(body);
                self.env.vars.pop();
                let fty = Ty::Arrow(Box::new(g.clone()), Box::new(gb.clone()));
                let lam = TermEps::asc(
                    refl(&fty, &self.env),
                    TermEps::Lam(x.clone(), g, Box::new(eb)),
                    fty.clone(),
                );
                let (f, _) = self.matched(lam, &fty, MatchShape::Function);
                (TermEps::App(Box::new(f), Box::new(ea)), gb)
            }
            Pack(w, a, g) => {
                let (ea, ga) = self.go(a);
                let Ty::Exists(x, body) = g else { unreachable!() };
                let ea = self.coerce(ea, &ga, &body.subst(x, w));
                let pk = TermEps::Pack(w.clone(), Box::new(ea), g.clone());
                (TermEps::asc(refl(g, &self.env), pk, g.clone()), g.clone())
            }
            Unpack(x, y, a, body) => {
                let (ea, ga) = self.go(a);
                let (ea, m) = self.matched(ea, &ga, MatchShape::Exists);
                let schema = m.body_as(x).unwrap();
                self.env.tyvars.push(x.clone());
                self.env.vars.push((y.clone(), schema));
                let (eb, gb) = self.go(body);
                self.env.vars.pop();
                self.env.tyvars.pop();
                (
                    TermEps::Unpack(x.clone(), y.clone(), Box::new(ea), Box::new(eb)),
                    gb,
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_gsf;
    use crate::statics::typecheck_eps;
    use crate::types::*;

    #[test]
    fn initial_evidence_examples() {
        let env = TypeEnv::new();
        assert_eq!(initial_evidence(&env, &bool_(), &unk()).unwrap(), Evidence::refl(bool_()));
        assert_eq!(initial_evidence(&env, &unk(), &int()).unwrap(), Evidence::refl(int()));
        let f = arrow(unk(), unk());
        assert_eq!(initial_evidence(&env, &f, &unk()).unwrap(), Evidence::refl(f));
        assert!(initial_evidence(&env, &int(), &bool_()).is_none());
    }

    #[test]
    fn elaborates_displayed_application() {
        let t = parse_gsf("(\\x:?. x + 1) false").unwrap();
        let (e, g) = elaborate(&t).unwrap();
        assert_eq!(g, int());
        assert_eq!(
            e.to_string(),
            "(<?->Int,?->Int> (\\x:?. (<Int,Int> x :: Int) + (<Int,Int> 1 :: Int)) :: ?->Int) \
             (<Bool,Bool> (<Bool,Bool> false :: Bool) :: ?)"
        );
    }

    #[test]
    fn fuses_ascribed_literal() {
        let t = parse_gsf("(/\\X.\\x:X.x) :: forall X.X->?").unwrap();
        let (e, _) = elaborate(&t).unwrap();
        assert_eq!(
            e.to_string(),
            "<forall X.X->X,forall X.X->X> (/\\X. \\x:X. x) :: forall X.X->?"
        );
    }

    #[test]
    fn constant_is_ascribed() {
        let (e, _) = elaborate(&parse_gsf("1").unwrap()).unwrap();
        assert_eq!(e.to_string(), "<Int,Int> 1 :: Int");
    }

    #[test]
    fn output_typechecks() {
        for src in [
            "let g:? = /\\X.\\x:X.x in g [Int] true",
            "unpack <X,x> = pack<Int,(1, \\y:Int. y + 1)> as exists X.X*(X->X) in 0",
            "if true then 1 else (2 :: ?)",
            "fst ((1, true) :: ?)",
        ] {
            let t = parse_gsf(src).unwrap();
            for mode in [Mode::Compact, Mode::Uniform] {
                let (e, g) = elaborate_with(&t, mode).unwrap();
                assert_eq!(typecheck_eps(&TypeEnv::new(), &e).unwrap(), g, "{src}");
            }
        }
    }
}
