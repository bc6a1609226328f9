//! How far a map between metric groups is from an isometric embedding, and
//! the zero set of `q(d(s, t))`.

use num_traits::{Signed, Zero};
use thiserror::Error;

use super::ast::Term;
use super::eval::{evaluate_term, Assignment, EvalError};
use super::structure::{MetricStructure, StructureError};
use super::value::{MetricValue, Value};
use crate::rational::{int, rational, Rational};

/// Largest violations found, per kind.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingDefect {
    /// `d(f(a) f(b), f(ab))`.
    pub product: Value,
    /// `d(f(a)⁻¹, f(a⁻¹))`.
    pub inverse: Value,
    /// `d(f(e), e)`.
    pub identity: Value,
    /// `|d(f(a), f(b)) − d(a, b)|`.
    pub metric: Value,
}

impl EmbeddingDefect {
    /// The overall defect δ.
    pub fn max(&self) -> Value {
        [&self.inverse, &self.identity, &self.metric]
            .into_iter()
            .fold(self.product.clone(), |acc, v| value_max(acc, v.clone()))
    }
}

fn value_diff(a: Value, b: Value) -> Value {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => Value::Exact((x - y).abs()),
        (x, y) => Value::Approx((x.to_f64() - y.to_f64()).abs()),
    }
}

fn value_max(a: Value, b: Value) -> Value {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => Value::Exact(if y > x { y } else { x }),
        (x, y) => Value::Approx(x.to_f64().max(y.to_f64())),
    }
}

/// Measures the defect of `f` over every pair from `sample`, or from the
/// domain of `m` when no sample is given.
pub fn embedding_defect<M, N, F>(
    f: F,
    m: &M,
    n: &N,
    sample: Option<&[M::Elem]>,
) -> Result<EmbeddingDefect, StructureError>
where
    M: MetricStructure,
    N: MetricStructure,
    F: Fn(&M::Elem) -> N::Elem,
{
    let owned;
    let elems = match sample {
        Some(s) => s,
        None => {
            owned = m.domain()?;
            &owned[..]
        }
    };
    let images: Vec<N::Elem> = elems.iter().map(&f).collect();
    let zero = || N::Value::zero_value().into_value();
    let mut out = EmbeddingDefect {
        product: zero(),
        inverse: zero(),
        identity: n.dist(&f(&m.identity()), &n.identity()).into_value(),
        metric: zero(),
    };
    for (a, fa) in elems.iter().zip(&images) {
        let inv = n.dist(&n.inv(fa), &f(&m.inv(a))).into_value();
        out.inverse = value_max(out.inverse, inv);
        for (b, fb) in elems.iter().zip(&images) {
            let prod = n.dist(&n.mul(fa, fb), &f(&m.mul(a, b))).into_value();
            out.product = value_max(out.product, prod);
            let metric = value_diff(n.dist(fa, fb).into_value(), m.dist(a, b).into_value());
            out.metric = value_max(out.metric, metric);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShadowError {
    #[error("q violates its contract at {at}: q = {value}")]
    Contract { at: Rational, value: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Checks on the grid `i/64` that `q` maps `[0, 1]` into `[0, 1]`, vanishes at
/// 0 and nowhere else.
pub fn validate_shadow_map<V: MetricValue>(q: impl Fn(&V) -> V) -> Result<(), ShadowError> {
    for i in 0..=64 {
        let x = rational(i, 64);
        let y = q(&V::from_rational(&x));
        let in_range = V::zero_value().le_tol(&y) && y.le_tol(&V::one_value());
        let zero_ok = y.is_zero_tol() == x.is_zero();
        if !in_range || !zero_ok {
            return Err(ShadowError::Contract {
                at: x,
                value: y.to_f64(),
            });
        }
    }
    Ok(())
}

/// Verifies over all assignments of the variables of `s` and `t` (from the
/// structure's domain) that `q(d(s, t))` vanishes exactly when `s = t`.
pub fn discrete_shadow_check<M: MetricStructure>(
    m: &M,
    q: impl Fn(&M::Value) -> M::Value,
    s: &Term,
    t: &Term,
) -> Result<bool, ShadowError> {
    validate_shadow_map(&q)?;
    let mut vars = std::collections::BTreeSet::new();
    s.vars(&mut vars);
    t.vars(&mut vars);
    let vars: Vec<String> = vars.into_iter().collect();
    let domain = m.domain().map_err(EvalError::from)?;
    let mut digits = vec![0usize; vars.len()];
    loop {
        let assignment: Assignment<M::Elem> = vars
            .iter()
            .zip(&digits)
            .map(|(v, &i)| (v.clone(), domain[i].clone()))
            .collect();
        let a = evaluate_term(m, s, &assignment)?;
        let b = evaluate_term(m, t, &assignment)?;
        if q(&m.dist(&a, &b)).is_zero_tol() != m.same(&a, &b) {
            return Ok(false);
        }
        let Some(pos) = digits.iter().rposition(|&d| d + 1 < domain.len()) else {
            return Ok(true);
        };
        digits[pos] += 1;
        for d in &mut digits[pos + 1..] {
            *d = 0;
        }
    }
}

/// `min(2x, 1)`, a standard choice of `q`.
pub fn double_clamped<V: MetricValue>(x: &V) -> V {
    x.scale(&int(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::structure::{EvalMode, SymmetricGroup};
    use crate::perm::Permutation;

    fn sym(n: usize) -> SymmetricGroup {
        SymmetricGroup::new(n, EvalMode::Exhaustive).unwrap()
    }

    #[test]
    fn identity_map_has_no_defect() {
        let d = embedding_defect(|p: &Permutation| p.clone(), &sym(3), &sym(3), None).unwrap();
        assert_eq!(d.max(), Value::Exact(int(0)));
    }

    #[test]
    fn padding_distorts_the_metric() {
        let d = embedding_defect(
            |p: &Permutation| p.pad_embed(3).unwrap(),
            &sym(2),
            &sym(3),
            None,
        )
        .unwrap();
        assert_eq!(d.metric, Value::Exact(rational(1, 3)));
        assert_eq!(d.product, Value::Exact(int(0)));
        assert_eq!(d.max(), Value::Exact(rational(1, 3)));
    }

    #[test]
    fn diagonal_embedding_is_isometric() {
        let d = embedding_defect(
            |p: &Permutation| p.diagonal_embed(2, 6).unwrap(),
            &sym(3),
            &sym(6),
            None,
        )
        .unwrap();
        assert_eq!(d.max(), Value::Exact(int(0)));
    }

    #[test]
    fn shadow_of_commutation() {
        let xy = Term::mul(Term::var("x"), Term::var("y"));
        let yx = Term::mul(Term::var("y"), Term::var("x"));
        let s4 = sym(4);
        assert!(discrete_shadow_check(&s4, |x: &Rational| x.clone(), &xy, &yx).unwrap());
        assert!(discrete_shadow_check(&s4, double_clamped, &xy, &yx).unwrap());
        let half = rational(1, 2);
        let err = discrete_shadow_check(&s4, |x: &Rational| x.trunc_sub(&half), &xy, &yx);
        assert!(matches!(err, Err(ShadowError::Contract { .. })));
    }
}
