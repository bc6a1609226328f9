//! Formula semantics over a [`MetricStructure`].

use std::collections::BTreeMap;

use thiserror::Error;

use super::ast::{Formula, Term};
use super::structure::{MetricStructure, StructureError};
use super::value::MetricValue;

/// Default cap on quantifier-free evaluations per call.
pub const DEFAULT_BUDGET: u128 = 500_000_000;

pub type Assignment<E> = BTreeMap<String, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable {0} is not assigned")]
    Unassigned(String),
    #[error("value assigned to {0} does not belong to the structure")]
    ForeignElement(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("evaluation needs {required} steps, over the budget of {budget}; try sampled mode")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("formula is not of the form inf ... sup ... (quantifier-free)")]
    NotSigma2,
}

type Env<'a, E> = Vec<(&'a str, E)>;

fn lookup<'e, E>(env: &'e [(&str, E)], name: &str) -> Result<&'e E, EvalError> {
    env.iter()
        .rev()
        .find(|(v, _)| *v == name)
        .map(|(_, e)| e)
        .ok_or_else(|| EvalError::Unassigned(name.to_string()))
}

fn eval_term<S: MetricStructure>(
    s: &S,
    t: &Term,
    env: &[(&str, S::Elem)],
) -> Result<S::Elem, EvalError> {
    Ok(match t {
        Term::Var(v) => lookup(env, v)?.clone(),
        Term::Identity => s.identity(),
        Term::Inv(a) => s.inv(&eval_term(s, a, env)?),
        Term::Mul(a, b) => s.mul(&eval_term(s, a, env)?, &eval_term(s, b, env)?),
    })
}

/// Value of a term under an assignment.
pub fn evaluate_term<S: MetricStructure>(
    s: &S,
    t: &Term,
    assignment: &Assignment<S::Elem>,
) -> Result<S::Elem, EvalError> {
    let env = checked_env(s, assignment)?;
    eval_term(s, t, &env)
}

fn checked_env<'a, S: MetricStructure>(
    s: &S,
    assignment: &'a Assignment<S::Elem>,
) -> Result<Env<'a, S::Elem>, EvalError> {
    assignment
        .iter()
        .map(|(k, v)| {
            if s.contains(v) {
                Ok((k.as_str(), v.clone()))
            } else {
                Err(EvalError::ForeignElement(k.clone()))
            }
        })
        .collect()
}

fn quantifier_count(f: &Formula) -> u32 {
    match f {
        Formula::Dist(..) | Formula::Const(_) => 0,
        Formula::OneMinus(a) | Formula::Scale(_, a) => quantifier_count(a),
        Formula::TruncSub(a, b) | Formula::Min(a, b) | Formula::Max(a, b) => {
            quantifier_count(a) + quantifier_count(b)
        }
        Formula::Inf(_, a) | Formula::Sup(_, a) => 1 + quantifier_count(a),
    }
}

/// Number of quantifier-free evaluations needed for `quantified` nested
/// quantifiers over a domain of `size` elements, saturating.
pub fn required_steps(size: Option<u128>, quantified: u32) -> u128 {
    if quantified == 0 {
        return 1;
    }
    match size {
        Some(size) => size.checked_pow(quantified).unwrap_or(u128::MAX),
        None => u128::MAX,
    }
}

fn check_budget<S: MetricStructure>(s: &S, quantified: u32, budget: u128) -> Result<(), EvalError> {
    if quantified == 0 {
        return Ok(());
    }
    if s.domain_size().is_none() {
        // Surface the structural reason, e.g. an exhaustive unitary group.
        s.domain()?;
    }
    let required = required_steps(s.domain_size(), quantified);
    if required > budget {
        return Err(EvalError::BudgetExceeded { required, budget });
    }
    Ok(())
}

struct Evaluator<'s, S: MetricStructure> {
    s: &'s S,
    domain: Option<Vec<S::Elem>>,
}

impl<'s, S: MetricStructure> Evaluator<'s, S> {
    fn domain(&mut self) -> Result<Vec<S::Elem>, EvalError> {
        if self.domain.is_none() {
            self.domain = Some(self.s.domain()?);
        }
        Ok(self.domain.clone().expect("just filled"))
    }

    fn eval<'f>(
        &mut self,
        f: &'f Formula,
        env: &mut Env<'f, S::Elem>,
    ) -> Result<S::Value, EvalError> {
        let s = self.s;
        Ok(match f {
            Formula::Dist(a, b) => s.dist(&eval_term(s, a, env)?, &eval_term(s, b, env)?),
            Formula::Const(q) => S::Value::from_rational(q),
            Formula::OneMinus(a) => self.eval(a, env)?.one_minus(),
            Formula::TruncSub(a, b) => {
                let x = self.eval(a, env)?;
                x.trunc_sub(&self.eval(b, env)?)
            }
            Formula::Min(a, b) => {
                let x = self.eval(a, env)?;
                S::Value::min_of(x, self.eval(b, env)?)
            }
            Formula::Max(a, b) => {
                let x = self.eval(a, env)?;
                S::Value::max_of(x, self.eval(b, env)?)
            }
            Formula::Scale(q, a) => self.eval(a, env)?.scale(q),
            Formula::Inf(v, body) | Formula::Sup(v, body) => {
                let is_inf = matches!(f, Formula::Inf(..));
                let mut best: Option<S::Value> = None;
                for elem in self.domain()? {
                    env.push((v.as_str(), elem));
                    let value = self.eval(body, env);
                    env.pop();
                    let value = value?;
                    best = Some(match best {
                        None => value,
                        Some(b) if is_inf => S::Value::min_of(b, value),
                        Some(b) => S::Value::max_of(b, value),
                    });
                    let done = best.as_ref().is_some_and(|b| {
                        if is_inf {
                            *b <= S::Value::zero_value()
                        } else {
                            *b >= S::Value::one_value()
                        }
                    });
                    if done {
                        break;
                    }
                }
                best.expect("domains are never empty")
            }
        })
    }
}

/// Value of `f` with its free variables assigned. Quantifiers range over the
/// structure's domain for its evaluation mode.
pub fn evaluate<S: MetricStructure>(
    s: &S,
    f: &Formula,
    assignment: &Assignment<S::Elem>,
) -> Result<S::Value, EvalError> {
    evaluate_with_budget(s, f, assignment, DEFAULT_BUDGET)
}

pub fn evaluate_with_budget<S: MetricStructure>(
    s: &S,
    f: &Formula,
    assignment: &Assignment<S::Elem>,
    budget: u128,
) -> Result<S::Value, EvalError> {
    if let Some(v) = f
        .free_vars()
        .into_iter()
        .find(|v| !assignment.contains_key(v))
    {
        return Err(EvalError::Unassigned(v));
    }
    check_budget(s, quantifier_count(f), budget)?;
    let mut env = checked_env(s, assignment)?;
    Evaluator { s, domain: None }.eval(f, &mut env)
}

/// Outcome of a Σ₂ evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Sigma2Report<V, E> {
    pub value: V,
    /// Outer tuple attaining the infimum; empty when there is no outer block.
    pub witness: Vec<E>,
    /// Quantifier-free evaluations actually performed.
    pub evaluations: u64,
    /// Whether the value is exact (exhaustive mode).
    pub exact: bool,
}

/// Value of a sentence `inf x̄ sup ȳ ψ`.
///
/// The inner supremum for an outer tuple stops as soon as it reaches the best
/// infimum found so far, or 1; the outer loop stops at 0.
pub fn sigma2_value<S: MetricStructure>(s: &S, f: &Formula) -> Result<S::Value, EvalError> {
    sigma2_report(s, f, DEFAULT_BUDGET).map(|r| r.value)
}

pub fn sigma2_report<S: MetricStructure>(
    s: &S,
    f: &Formula,
    budget: u128,
) -> Result<Sigma2Report<S::Value, S::Elem>, EvalError> {
    let (infs, sups, body) = f.sigma2_parts().ok_or(EvalError::NotSigma2)?;
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(EvalError::Unassigned(v));
    }
    let quantified = (infs.len() + sups.len()) as u32;
    check_budget(s, quantified, budget)?;
    let domain = if quantified == 0 {
        Vec::new()
    } else {
        s.domain()?
    };
    let one = S::Value::one_value();
    let zero = S::Value::zero_value();
    let mut evaluator = Evaluator { s, domain: None };
    let mut evaluations = 0u64;
    let mut best: Option<(S::Value, Vec<S::Elem>)> = None;

    let mut outer = Odometer::new(infs.len(), domain.len());
    while let Some(xs) = outer.next() {
        let mut env: Env<S::Elem> = infs
            .iter()
            .zip(xs)
            .map(|(v, &i)| (v.as_str(), domain[i].clone()))
            .collect();
        let mut sup: Option<S::Value> = None;
        let mut inner = Odometer::new(sups.len(), domain.len());
        while let Some(ys) = inner.next() {
            env.truncate(infs.len());
            env.extend(
                sups.iter()
                    .zip(ys)
                    .map(|(v, &i)| (v.as_str(), domain[i].clone())),
            );
            let value = evaluator.eval(body, &mut env)?;
            evaluations += 1;
            let current = match sup {
                None => value,
                Some(prev) => S::Value::max_of(prev, value),
            };
            let pruned = current >= one || best.as_ref().is_some_and(|(b, _)| current >= *b);
            sup = Some(current);
            if pruned {
                break;
            }
        }
        let sup = sup.expect("inner loop runs at least once");
        if best.as_ref().is_none_or(|(b, _)| sup < *b) {
            let witness = env[..infs.len()].iter().map(|(_, e)| e.clone()).collect();
            best = Some((sup, witness));
        }
        if best.as_ref().is_some_and(|(b, _)| *b <= zero) {
            break;
        }
    }
    let (value, witness) = best.expect("outer loop runs at least once");
    Ok(Sigma2Report {
        value,
        witness,
        evaluations,
        exact: s.mode().is_exhaustive(),
    })
}

/// Iterates over all index tuples of a given length, last index fastest.
/// A length-zero odometer yields the empty tuple once.
struct Odometer {
    digits: Vec<usize>,
    base: usize,
    started: bool,
    finished: bool,
}

impl Odometer {
    fn new(len: usize, base: usize) -> Self {
        Odometer {
            digits: vec![0; len],
            base,
            started: false,
            finished: len > 0 && base == 0,
        }
    }

    fn next(&mut self) -> Option<&[usize]> {
        if self.finished {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.digits);
        }
        for pos in (0..self.digits.len()).rev() {
            self.digits[pos] += 1;
            if self.digits[pos] < self.base {
                return Some(&self.digits);
            }
            self.digits[pos] = 0;
        }
        self.finished = true;
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse::{parse, parse_sentence};
    use crate::formula::structure::{EvalMode, SymmetricGroup, TableGroup, UnitaryGroup};
    use crate::perm::Permutation;
    use crate::rational::{int, rational};

    fn sym(n: usize) -> SymmetricGroup {
        SymmetricGroup::new(n, EvalMode::Exhaustive).unwrap()
    }

    fn assign(pairs: &[(&str, Permutation)]) -> Assignment<Permutation> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect()
    }

    #[test]
    fn eta_body_on_two_transpositions() {
        let f = parse("min(2*d(comm(x,y), e), 1)").unwrap();
        let a = assign(&[
            ("x", Permutation::parse_cycles("(1 2)", 3).unwrap()),
            ("y", Permutation::parse_cycles("(2 3)", 3).unwrap()),
        ]);
        assert_eq!(evaluate(&sym(3), &f, &a).unwrap(), int(1));
    }

    #[test]
    fn constants_and_one_minus() {
        let s = sym(3);
        let a = assign(&[("x", Permutation::identity(3))]);
        assert_eq!(
            evaluate(&s, &parse("1/2").unwrap(), &a).unwrap(),
            rational(1, 2)
        );
        assert_eq!(
            evaluate(&s, &parse("1-d(x, x)").unwrap(), &a).unwrap(),
            int(1)
        );
    }

    #[test]
    fn unassigned_and_foreign_variables_are_reported() {
        let s = sym(3);
        let f = parse("d(x, y)").unwrap();
        let a = assign(&[("x", Permutation::identity(3))]);
        assert_eq!(evaluate(&s, &f, &a), Err(EvalError::Unassigned("y".into())));
        let a = assign(&[
            ("x", Permutation::identity(3)),
            ("y", Permutation::identity(4)),
        ]);
        assert_eq!(
            evaluate(&s, &f, &a),
            Err(EvalError::ForeignElement("y".into()))
        );
    }

    #[test]
    fn small_sigma2_values() {
        let eta = parse_sentence("inf x. sup y. min(2*d(comm(x,y), e), 1)").unwrap();
        assert_eq!(sigma2_value(&sym(3), &eta).unwrap(), int(0));
        let far = parse_sentence("sup x. d(x, e)").unwrap();
        assert_eq!(sigma2_value(&sym(3), &far).unwrap(), int(1));
        let spread = parse_sentence("inf x. sup y. d(x, y)").unwrap();
        assert_eq!(sigma2_value(&sym(4), &spread).unwrap(), int(1));
    }

    #[test]
    fn sigma2_agrees_with_general_evaluator() {
        let f = parse_sentence("inf x. sup y. d(x*y, y*x)").unwrap();
        for n in 1..=4 {
            let s = sym(n);
            assert_eq!(
                sigma2_value(&s, &f).unwrap(),
                evaluate(&s, &f, &Assignment::new()).unwrap()
            );
        }
    }

    #[test]
    fn table_structures_evaluate_like_permutations() {
        let f = parse_sentence("inf x. sup y. d(x*y, y*x)").unwrap();
        let table = TableGroup::from_symmetric(3, EvalMode::Exhaustive).unwrap();
        assert_eq!(
            sigma2_value(&table, &f).unwrap(),
            sigma2_value(&sym(3), &f).unwrap()
        );
    }

    #[test]
    fn budget_and_enumerability_are_enforced() {
        let f = parse_sentence("inf x. sup y. d(x, y)").unwrap();
        assert!(matches!(
            sigma2_report(&sym(5), &f, 1000),
            Err(EvalError::BudgetExceeded {
                required: 14400,
                ..
            })
        ));
        let u = UnitaryGroup::new(2, EvalMode::Exhaustive).unwrap();
        assert!(matches!(
            sigma2_value(&u, &f),
            Err(EvalError::Structure(StructureError::NotEnumerable(_)))
        ));
        assert_eq!(
            sigma2_value(&sym(3), &parse("inf x. d(x, y)").unwrap()),
            Err(EvalError::Unassigned("y".into()))
        );
        assert_eq!(
            sigma2_value(&sym(3), &parse_sentence("sup x. inf y. d(x, y)").unwrap()),
            Err(EvalError::NotSigma2)
        );
    }

    #[test]
    fn sampled_unitary_evaluation_is_deterministic() {
        let u = UnitaryGroup::new(
            3,
            EvalMode::Sampled {
                samples: 20,
                seed: 5,
            },
        )
        .unwrap();
        let f = parse_sentence("sup x. d(x, e)").unwrap();
        let a = sigma2_report(&u, &f, DEFAULT_BUDGET).unwrap();
        let b = sigma2_report(&u, &f, DEFAULT_BUDGET).unwrap();
        assert_eq!(a.value, b.value);
        assert!(!a.exact);
        assert!(a.value > 0.5 && a.value <= 1.0);
    }

    #[test]
    fn pruning_saves_work() {
        let f = parse_sentence("inf x. sup y. min(2*d(comm(x,y), e), 1)").unwrap();
        let r = sigma2_report(&sym(4), &f, DEFAULT_BUDGET).unwrap();
        // The identity comes first and commutes with everything.
        assert_eq!(r.evaluations, 24);
        assert!(r.witness[0].is_identity());
    }
}
