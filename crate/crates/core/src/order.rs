//! Explicit chains of commuting and non-commuting pairs in `S_n`, `U_n` and the
//! rank-metric matrix algebras, and verification of `(ψ, ε)`-chains.
//!
//! Only finitely many sizes can be certified; every check here concerns the
//! concrete `n` it is called with.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::formula::{
    evaluate, parse_with_vars, Assignment, Descriptor, EvalError, Formula, MetricStructure,
    MetricValue, Value,
};
use crate::matrix::{perm_matrix, RationalMatrix, UnitaryElement};
use crate::perm::{PermError, Permutation};
use crate::rational::{format_pq, rational, Rational};

/// A formula `ψ(x̄, ȳ)` together with the split of its variables into the
/// left tuple `x̄` and the right tuple `ȳ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationFormula {
    pub formula: Formula,
    pub left: Vec<String>,
    pub right: Vec<String>,
}

impl RelationFormula {
    pub fn new(formula: Formula, left: &[&str], right: &[&str]) -> Self {
        RelationFormula {
            formula,
            left: left.iter().map(|s| s.to_string()).collect(),
            right: right.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Parses `text` with free variables drawn from `left` and `right`.
    pub fn parse(
        text: &str,
        left: &[&str],
        right: &[&str],
    ) -> Result<Self, crate::formula::ParseError> {
        let vars: Vec<&str> = left.iter().chain(right).copied().collect();
        Ok(RelationFormula::new(
            parse_with_vars(text, &vars)?,
            left,
            right,
        ))
    }

    /// `η(x₁, x₂; y₁, y₂) = min{2 d([x₁, y₂], e), 1}`.
    pub fn eta() -> Self {
        Self::parse("min(2*d(comm(x1, y2), e), 1)", &["x1", "x2"], &["y1", "y2"])
            .expect("valid built-in formula")
    }

    /// `min{3 d(x₁ y₂, y₂ x₁), 1}`, the relation used for rank metrics.
    pub fn rank_order() -> Self {
        Self::parse("min(3*d(x1*y2, y2*x1), 1)", &["x1", "x2"], &["y1", "y2"])
            .expect("valid built-in formula")
    }

    pub fn arity(&self) -> usize {
        self.left.len()
    }

    /// `ψ(a, b)` with `a` bound to the left tuple and `b` to the right one.
    pub fn value<S: MetricStructure>(
        &self,
        s: &S,
        a: &[S::Elem],
        b: &[S::Elem],
    ) -> Result<S::Value, EvalError> {
        let assignment: Assignment<S::Elem> = self
            .left
            .iter()
            .zip(a)
            .chain(self.right.iter().zip(b))
            .map(|(v, e)| (v.clone(), e.clone()))
            .collect();
        evaluate(s, &self.formula, &assignment)
    }
}

/// The `l` pairs `(σ_{l,i}, τ_{l,i})` in `S_{3^l}`, acting on `{1,2,3}^l`:
/// `σ_{l,i}` swaps the first two values in coordinates `1..=i`, and `τ_{l,i}`
/// swaps the last two values in coordinate `i` only.
///
/// `[σ_{l,i}, τ_{l,j}]` is trivial for `i < j` and a product of `3^{l−1}`
/// disjoint 3-cycles for `i ≥ j`.
pub fn base_pairs(l: usize) -> Result<Vec<(Permutation, Permutation)>, PermError> {
    if l == 0 {
        return Err(PermError::NoFactors);
    }
    let e = Permutation::identity(3);
    let swap12 = Permutation::from_images(vec![1, 0, 2]).expect("valid");
    let swap23 = Permutation::from_images(vec![0, 2, 1]).expect("valid");
    (1..=l)
        .map(|i| {
            let sigma: Vec<Permutation> = (1..=l)
                .map(|c| if c <= i { swap12.clone() } else { e.clone() })
                .collect();
            let tau: Vec<Permutation> = (1..=l)
                .map(|c| if c == i { swap23.clone() } else { e.clone() })
                .collect();
            Ok((
                Permutation::product_action(&sigma)?,
                Permutation::product_action(&tau)?,
            ))
        })
        .collect()
}

/// `3^l`, or an error when it exceeds the supported degree.
fn power_of_three(l: usize) -> Result<usize, PermError> {
    u32::try_from(l)
        .ok()
        .and_then(|l| 3usize.checked_pow(l))
        .filter(|&p| p <= crate::perm::MAX_DEGREE)
        .ok_or(PermError::TooLarge(u128::MAX))
}

/// The base pairs embedded diagonally into `S_n`: `k = ⌊n/3^l⌋` copies, the
/// remaining `n − 3^l k` points fixed.
pub fn sym_chain(n: usize, l: usize) -> Result<Vec<(Permutation, Permutation)>, PermError> {
    let block = power_of_three(l)?;
    if n < block {
        return Err(PermError::TargetTooSmall {
            target: n,
            required: block,
        });
    }
    let k = n / block;
    base_pairs(l)?
        .iter()
        .map(|(s, t)| Ok((s.diagonal_embed(k, n)?, t.diagonal_embed(k, n)?)))
        .collect()
}

/// Permutation matrices of [`sym_chain`].
pub fn unitary_chain(
    n: usize,
    l: usize,
) -> Result<Vec<(UnitaryElement, UnitaryElement)>, PermError> {
    Ok(sym_chain(n, l)?
        .iter()
        .map(|(s, t)| (perm_matrix(s), perm_matrix(t)))
        .collect())
}

/// Rational permutation matrices of [`sym_chain`].
pub fn rank_chain(n: usize, l: usize) -> Result<Vec<(RationalMatrix, RationalMatrix)>, PermError> {
    Ok(sym_chain(n, l)?
        .iter()
        .map(|(s, t)| {
            (
                RationalMatrix::from_permutation(s),
                RationalMatrix::from_permutation(t),
            )
        })
        .collect())
}

/// `d([Σ_{n,i}, T_{n,j}], e)`: 0 for `i < j`, `3^l ⌊n/3^l⌋ / n` otherwise.
pub fn expected_commutator_distance(n: usize, l: usize, i: usize, j: usize) -> Rational {
    if i < j {
        return Rational::zero();
    }
    let block = 3u64.pow(l as u32);
    let k = n as u64 / block;
    Rational::new(BigInt::from(block * k), BigInt::from(n))
}

/// Chain elements as 2-tuples, the shape [`chain_check`] expects.
pub fn as_tuples<E: Clone>(pairs: &[(E, E)]) -> Vec<Vec<E>> {
    pairs
        .iter()
        .map(|(a, b)| vec![a.clone(), b.clone()])
        .collect()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    #[error("tuple {index} has {found} entries, the relation expects {expected}")]
    ArityMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("relation has left arity {left} but right arity {right}")]
    UnbalancedRelation { left: usize, right: usize },
    #[error("epsilon {0} is outside [0, 1/2)")]
    EpsilonOutOfRange(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A verified `(ψ, ε)`-chain.
#[derive(Debug, Clone)]
pub struct ChainWitness<E> {
    pub structure: Descriptor,
    pub tuples: Vec<Vec<E>>,
    pub relation: RelationFormula,
    pub epsilon: Rational,
    /// `values[i][j] = ψ(tuples[i], tuples[j])`.
    pub values: Vec<Vec<Value>>,
}

impl<E: Serialize> ChainWitness<E> {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "structure": self.structure.to_string(),
            "epsilon": format_pq(&self.epsilon),
            "formula_text": self.relation.formula.to_string(),
            "tuples": self.tuples,
            "values_matrix": self
                .values
                .iter()
                .map(|row| row.iter().map(Value::to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// The first ordered pair `first < second` for which
/// `ψ(first, second) ≤ ε` or `ψ(second, first) ≥ 1 − ε` fails.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainViolation {
    pub first: usize,
    pub second: usize,
    pub forward: Value,
    pub backward: Value,
}

#[derive(Debug, Clone)]
pub enum ChainCheck<E> {
    Valid(ChainWitness<E>),
    Violated(ChainViolation),
}

impl<E> ChainCheck<E> {
    pub fn is_valid(&self) -> bool {
        matches!(self, ChainCheck::Valid(_))
    }

    pub fn witness(self) -> Option<ChainWitness<E>> {
        match self {
            ChainCheck::Valid(w) => Some(w),
            ChainCheck::Violated(_) => None,
        }
    }

    pub fn violation(&self) -> Option<&ChainViolation> {
        match self {
            ChainCheck::Valid(_) => None,
            ChainCheck::Violated(v) => Some(v),
        }
    }
}

/// Checks that `tuples`, in list order, form a `(ψ, ε)`-chain: for every
/// `i < j`, `ψ(tᵢ, tⱼ) ≤ ε` and `ψ(tⱼ, tᵢ) ≥ 1 − ε`. All ordered pairs are
/// tested, not only consecutive ones.
pub fn chain_check<S: MetricStructure>(
    s: &S,
    psi: &RelationFormula,
    epsilon: &Rational,
    tuples: Vec<Vec<S::Elem>>,
) -> Result<ChainCheck<S::Elem>, ChainError> {
    if psi.left.len() != psi.right.len() {
        return Err(ChainError::UnbalancedRelation {
            left: psi.left.len(),
            right: psi.right.len(),
        });
    }
    if *epsilon < Rational::zero() || *epsilon >= rational(1, 2) {
        return Err(ChainError::EpsilonOutOfRange(format_pq(epsilon)));
    }
    if let Some((index, t)) = tuples
        .iter()
        .enumerate()
        .find(|(_, t)| t.len() != psi.arity())
    {
        return Err(ChainError::ArityMismatch {
            index,
            found: t.len(),
            expected: psi.arity(),
        });
    }
    let values: Vec<Vec<S::Value>> = (0..tuples.len())
        .into_par_iter()
        .map(|i| {
            tuples
                .iter()
                .map(|b| psi.value(s, &tuples[i], b))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let eps = S::Value::from_rational(epsilon);
    let upper = S::Value::from_rational(&(Rational::one() - epsilon));
    for (i, row) in values.iter().enumerate() {
        for (j, forward) in row.iter().enumerate().skip(i + 1) {
            let backward = &values[j][i];
            if !(forward.le_tol(&eps) && upper.le_tol(backward)) {
                return Ok(ChainCheck::Violated(ChainViolation {
                    first: i,
                    second: j,
                    forward: forward.clone().into_value(),
                    backward: backward.clone().into_value(),
                }));
            }
        }
    }
    Ok(ChainCheck::Valid(ChainWitness {
        structure: s.descriptor(),
        tuples,
        relation: psi.clone(),
        epsilon: epsilon.clone(),
        values: values
            .into_iter()
            .map(|row| row.into_iter().map(MetricValue::into_value).collect())
            .collect(),
    }))
}
