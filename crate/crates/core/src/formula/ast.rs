use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::Rational;

/// Terms of the group language: variables, `e`, inverse and product.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Identity,
    Inv(Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn inv(t: Term) -> Term {
        Term::Inv(Box::new(t))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    /// `[a, b]`, desugared to `a*b*inv(a)*inv(b)`.
    pub fn comm(a: Term, b: Term) -> Term {
        let ab = Term::mul(a.clone(), b.clone());
        let aba = Term::mul(ab, Term::inv(a));
        Term::mul(aba, Term::inv(b))
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Identity => {}
            Term::Inv(t) => t.vars(out),
            Term::Mul(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    /// Number of occurrences of `var`, counting occurrences under `inv`.
    pub fn occurrences(&self, var: &str) -> usize {
        match self {
            Term::Var(v) => usize::from(v == var),
            Term::Identity => 0,
            Term::Inv(t) => t.occurrences(var),
            Term::Mul(a, b) => a.occurrences(var) + b.occurrences(var),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, right_of_product: bool) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Identity => write!(f, "e"),
            Term::Inv(t) => {
                write!(f, "inv(")?;
                t.fmt_prec(f, false)?;
                write!(f, ")")
            }
            Term::Mul(a, b) => {
                if right_of_product {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, false)?;
                write!(f, "*")?;
                b.fmt_prec(f, true)?;
                if right_of_product {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

/// Formulas over the metric group language with the connectives
/// `{constants, 1−x, x∸y, min, max, min(q·x, 1)}` and `inf`/`sup` quantifiers.
/// Every formula takes values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Dist(Term, Term),
    Const(Rational),
    OneMinus(Box<Formula>),
    /// `max(a − b, 0)`.
    TruncSub(Box<Formula>, Box<Formula>),
    Min(Box<Formula>, Box<Formula>),
    Max(Box<Formula>, Box<Formula>),
    /// `min(q·x, 1)` for `q ≥ 0`.
    Scale(Rational, Box<Formula>),
    Inf(String, Box<Formula>),
    Sup(String, Box<Formula>),
}

impl Formula {
    pub fn dist(s: Term, t: Term) -> Formula {
        Formula::Dist(s, t)
    }

    pub fn constant(value: Rational) -> Formula {
        assert!(
            value >= Rational::zero() && value <= Rational::one(),
            "constants lie in [0, 1]"
        );
        Formula::Const(value)
    }

    pub fn one_minus(f: Formula) -> Formula {
        Formula::OneMinus(Box::new(f))
    }

    pub fn trunc_sub(a: Formula, b: Formula) -> Formula {
        Formula::TruncSub(Box::new(a), Box::new(b))
    }

    pub fn min(a: Formula, b: Formula) -> Formula {
        Formula::Min(Box::new(a), Box::new(b))
    }

    pub fn max(a: Formula, b: Formula) -> Formula {
        Formula::Max(Box::new(a), Box::new(b))
    }

    pub fn scale(q: Rational, f: Formula) -> Formula {
        assert!(q >= Rational::zero(), "scale factors are non-negative");
        Formula::Scale(q, Box::new(f))
    }

    pub fn inf(var: &str, f: Formula) -> Formula {
        Formula::Inf(var.to_string(), Box::new(f))
    }

    pub fn sup(var: &str, f: Formula) -> Formula {
        Formula::Sup(var.to_string(), Box::new(f))
    }

    pub fn inf_all(vars: &[&str], f: Formula) -> Formula {
        vars.iter().rev().fold(f, |acc, v| Formula::inf(v, acc))
    }

    pub fn sup_all(vars: &[&str], f: Formula) -> Formula {
        vars.iter().rev().fold(f, |acc, v| Formula::sup(v, acc))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Dist(s, t) => {
                let mut vars = BTreeSet::new();
                s.vars(&mut vars);
                t.vars(&mut vars);
                out.extend(vars.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Const(_) => {}
            Formula::OneMinus(a) | Formula::Scale(_, a) => a.collect_free(bound, out),
            Formula::TruncSub(a, b) | Formula::Min(a, b) | Formula::Max(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Inf(v, a) | Formula::Sup(v, a) => {
                bound.push(v.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Dist(..) | Formula::Const(_) => true,
            Formula::OneMinus(a) | Formula::Scale(_, a) => a.is_quantifier_free(),
            Formula::TruncSub(a, b) | Formula::Min(a, b) | Formula::Max(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Inf(..) | Formula::Sup(..) => false,
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Splits `inf x̄ sup ȳ ψ` into `(x̄, ȳ, ψ)` when `ψ` is quantifier-free.
    pub fn sigma2_parts(&self) -> Option<(Vec<String>, Vec<String>, &Formula)> {
        let mut infs = Vec::new();
        let mut sups = Vec::new();
        let mut cur = self;
        while let Formula::Inf(v, body) = cur {
            infs.push(v.clone());
            cur = body;
        }
        while let Formula::Sup(v, body) = cur {
            sups.push(v.clone());
            cur = body;
        }
        cur.is_quantifier_free().then_some((infs, sups, cur))
    }

    pub fn is_sigma2(&self) -> bool {
        self.sigma2_parts().is_some()
    }

    /// Quantifier nesting depth.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Dist(..) | Formula::Const(_) => 0,
            Formula::OneMinus(a) | Formula::Scale(_, a) => a.quantifier_depth(),
            Formula::TruncSub(a, b) | Formula::Min(a, b) | Formula::Max(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            Formula::Inf(_, a) | Formula::Sup(_, a) => 1 + a.quantifier_depth(),
        }
    }

    /// Lipschitz constant of a quantifier-free formula in `var` with respect to
    /// a bi-invariant metric: each occurrence of `var` in a `d(s, t)` atom
    /// contributes 1, `1−x` and `min`/`max` preserve the constant, `∸` adds,
    /// and `min(q·x, 1)` multiplies by `q`.
    pub fn lipschitz(&self, var: &str) -> Rational {
        match self {
            Formula::Dist(s, t) => {
                Rational::from_integer(BigInt::from(s.occurrences(var) + t.occurrences(var)))
            }
            Formula::Const(_) => Rational::zero(),
            Formula::OneMinus(a) => a.lipschitz(var),
            Formula::TruncSub(a, b) => a.lipschitz(var) + b.lipschitz(var),
            Formula::Min(a, b) | Formula::Max(a, b) => {
                let (la, lb) = (a.lipschitz(var), b.lipschitz(var));
                if la >= lb {
                    la
                } else {
                    lb
                }
            }
            Formula::Scale(q, a) => q * a.lipschitz(var),
            Formula::Inf(v, a) | Formula::Sup(v, a) => {
                if v == var {
                    Rational::zero()
                } else {
                    a.lipschitz(var)
                }
            }
        }
    }

    /// Renames free occurrences of variable `from` to `to`.
    pub fn rename(&self, from: &str, to: &str) -> Formula {
        fn term(t: &Term, from: &str, to: &str) -> Term {
            match t {
                Term::Var(v) if v == from => Term::var(to),
                Term::Var(_) | Term::Identity => t.clone(),
                Term::Inv(a) => Term::inv(term(a, from, to)),
                Term::Mul(a, b) => Term::mul(term(a, from, to), term(b, from, to)),
            }
        }
        match self {
            Formula::Dist(s, t) => Formula::Dist(term(s, from, to), term(t, from, to)),
            Formula::Const(_) => self.clone(),
            Formula::OneMinus(a) => Formula::one_minus(a.rename(from, to)),
            Formula::TruncSub(a, b) => Formula::trunc_sub(a.rename(from, to), b.rename(from, to)),
            Formula::Min(a, b) => Formula::min(a.rename(from, to), b.rename(from, to)),
            Formula::Max(a, b) => Formula::max(a.rename(from, to), b.rename(from, to)),
            Formula::Scale(q, a) => Formula::Scale(q.clone(), Box::new(a.rename(from, to))),
            Formula::Inf(v, _) | Formula::Sup(v, _) if v == from => self.clone(),
            Formula::Inf(v, a) => Formula::inf(v, a.rename(from, to)),
            Formula::Sup(v, a) => Formula::sup(v, a.rename(from, to)),
        }
    }

    /// Printing levels: 0 admits quantifiers, 1 admits `∸` chains, 2 is a
    /// unary operand.
    fn fmt_level(&self, f: &mut fmt::Formatter<'_>, level: u8) -> fmt::Result {
        let own = match self {
            Formula::Inf(..) | Formula::Sup(..) => 0,
            Formula::TruncSub(..) => 1,
            _ => 2,
        };
        if own < level {
            write!(f, "(")?;
            self.fmt_level(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Formula::Dist(s, t) => write!(f, "d({s}, {t})"),
            Formula::Const(c) => write!(f, "{c}"),
            Formula::OneMinus(a) => {
                write!(f, "1-")?;
                a.fmt_level(f, 2)
            }
            Formula::TruncSub(a, b) => {
                a.fmt_level(f, 1)?;
                write!(f, " -. ")?;
                b.fmt_level(f, 2)
            }
            Formula::Min(a, b) | Formula::Max(a, b) => {
                let name = if matches!(self, Formula::Min(..)) {
                    "min"
                } else {
                    "max"
                };
                write!(f, "{name}(")?;
                a.fmt_level(f, 0)?;
                write!(f, ", ")?;
                b.fmt_level(f, 0)?;
                write!(f, ")")
            }
            Formula::Scale(q, a) => {
                write!(f, "{q}*")?;
                a.fmt_level(f, 2)
            }
            Formula::Inf(v, a) | Formula::Sup(v, a) => {
                let q = if matches!(self, Formula::Inf(..)) {
                    "inf"
                } else {
                    "sup"
                };
                write!(f, "{q} {v}. ")?;
                a.fmt_level(f, 0)
            }
        }
    }
}

impl fmt::Display for Formula {
    /// Canonical text in the grammar accepted by [`crate::formula::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_level(f, 0)
    }
}
