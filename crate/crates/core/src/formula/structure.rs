//! Finite and sampled metric groups that formulas are evaluated in.

use std::fmt;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::value::MetricValue;
use crate::matrix::{hs_distance, rank_distance, RationalMatrix, UnitaryElement};
use crate::perm::Permutation;
use crate::rational::Rational;

/// How quantifiers range over a structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalMode {
    /// Over the whole carrier.
    Exhaustive,
    /// Over the identity plus `samples` seeded random elements.
    Sampled { samples: usize, seed: u64 },
}

impl EvalMode {
    pub fn is_exhaustive(&self) -> bool {
        matches!(self, EvalMode::Exhaustive)
    }

    pub fn label(&self) -> &'static str {
        match self {
            EvalMode::Exhaustive => "exact",
            EvalMode::Sampled { .. } => "sampled estimate",
        }
    }

    fn rng(&self) -> Option<(usize, ChaCha8Rng)> {
        match self {
            EvalMode::Exhaustive => None,
            EvalMode::Sampled { samples, seed } => {
                Some((*samples, ChaCha8Rng::seed_from_u64(*seed)))
            }
        }
    }
}

/// Identifies the ambient structure in reports and exports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Descriptor {
    Sym(usize),
    Unitary(usize),
    Rank(usize),
    Table(usize),
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::Sym(n) => write!(f, "sym({n})"),
            Descriptor::Unitary(n) => write!(f, "unitary({n})"),
            Descriptor::Rank(n) => write!(f, "rank({n})"),
            Descriptor::Table(n) => write!(f, "table({n})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("{0} cannot be enumerated; use sampled mode")]
    NotEnumerable(Descriptor),
    #[error("{descriptor} has {size} elements, too many to enumerate")]
    TooLarge { descriptor: Descriptor, size: u128 },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("invalid table: {0}")]
    InvalidTable(String),
}

/// A group with a bi-invariant metric bounded by 1.
///
/// Elements handed to the operations are assumed to belong to the structure;
/// use [`MetricStructure::contains`] to check foreign elements first.
pub trait MetricStructure: Sync {
    type Elem: Clone + Send + Sync + fmt::Debug;
    type Value: MetricValue;

    fn descriptor(&self) -> Descriptor;
    fn mode(&self) -> &EvalMode;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn dist(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Value;
    fn contains(&self, a: &Self::Elem) -> bool;

    /// Element equality; approximate for continuous groups.
    fn same(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.dist(a, b).is_zero_tol()
    }

    /// Carrier size, when finite and known.
    fn carrier_size(&self) -> Option<u128>;

    /// The whole carrier in exhaustive mode.
    fn enumerate(&self) -> Result<Vec<Self::Elem>, StructureError>;

    /// A seeded random element.
    fn random(&self, rng: &mut ChaCha8Rng) -> Self::Elem;

    /// Number of elements quantifiers range over in the current mode.
    fn domain_size(&self) -> Option<u128> {
        match self.mode() {
            EvalMode::Exhaustive => self.carrier_size(),
            EvalMode::Sampled { samples, .. } => Some(*samples as u128 + 1),
        }
    }

    /// Elements quantifiers range over: the carrier, or the identity followed
    /// by the seeded samples.
    fn domain(&self) -> Result<Vec<Self::Elem>, StructureError> {
        match self.mode().rng() {
            None => self.enumerate(),
            Some((samples, mut rng)) => {
                let mut out = Vec::with_capacity(samples + 1);
                out.push(self.identity());
                for _ in 0..samples {
                    out.push(self.random(&mut rng));
                }
                Ok(out)
            }
        }
    }
}

/// Largest `n` for which `S_n` is enumerated.
pub const MAX_ENUMERABLE_SYM: usize = 10;

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// `S_n` with the normalized Hamming metric.
#[derive(Debug, Clone)]
pub struct SymmetricGroup {
    n: usize,
    mode: EvalMode,
}

impl SymmetricGroup {
    pub fn new(n: usize, mode: EvalMode) -> Result<Self, StructureError> {
        if n == 0 {
            return Err(StructureError::ZeroDimension);
        }
        Ok(SymmetricGroup { n, mode })
    }

    pub fn degree(&self) -> usize {
        self.n
    }
}

impl MetricStructure for SymmetricGroup {
    type Elem = Permutation;
    type Value = Rational;

    fn descriptor(&self) -> Descriptor {
        Descriptor::Sym(self.n)
    }
    fn mode(&self) -> &EvalMode {
        &self.mode
    }
    fn identity(&self) -> Permutation {
        Permutation::identity(self.n)
    }
    fn mul(&self, a: &Permutation, b: &Permutation) -> Permutation {
        a.compose(b).expect("elements of the same symmetric group")
    }
    fn inv(&self, a: &Permutation) -> Permutation {
        a.inverse()
    }
    fn dist(&self, a: &Permutation, b: &Permutation) -> Rational {
        a.hamming_distance(b)
            .expect("elements of the same symmetric group")
    }
    fn same(&self, a: &Permutation, b: &Permutation) -> bool {
        a == b
    }
    fn contains(&self, a: &Permutation) -> bool {
        a.degree() == self.n
    }
    fn carrier_size(&self) -> Option<u128> {
        Some(factorial(self.n.min(34)))
    }
    fn enumerate(&self) -> Result<Vec<Permutation>, StructureError> {
        if self.n > MAX_ENUMERABLE_SYM {
            return Err(StructureError::TooLarge {
                descriptor: self.descriptor(),
                size: factorial(self.n.min(34)),
            });
        }
        Ok(Permutation::all(self.n))
    }
    fn random(&self, rng: &mut ChaCha8Rng) -> Permutation {
        Permutation::random(self.n, rng)
    }
}

/// `U_n` with `d(A, B) = ‖A − B‖_F / (2√n)`. Only sampled evaluation is possible.
#[derive(Debug, Clone)]
pub struct UnitaryGroup {
    n: usize,
    mode: EvalMode,
}

impl UnitaryGroup {
    pub fn new(n: usize, mode: EvalMode) -> Result<Self, StructureError> {
        if n == 0 {
            return Err(StructureError::ZeroDimension);
        }
        Ok(UnitaryGroup { n, mode })
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

impl MetricStructure for UnitaryGroup {
    type Elem = UnitaryElement;
    type Value = f64;

    fn descriptor(&self) -> Descriptor {
        Descriptor::Unitary(self.n)
    }
    fn mode(&self) -> &EvalMode {
        &self.mode
    }
    fn identity(&self) -> UnitaryElement {
        UnitaryElement::identity(self.n)
    }
    fn mul(&self, a: &UnitaryElement, b: &UnitaryElement) -> UnitaryElement {
        a.mul(b).expect("elements of the same unitary group")
    }
    fn inv(&self, a: &UnitaryElement) -> UnitaryElement {
        a.inverse()
    }
    fn dist(&self, a: &UnitaryElement, b: &UnitaryElement) -> f64 {
        hs_distance(a, b).expect("elements of the same unitary group")
    }
    fn contains(&self, a: &UnitaryElement) -> bool {
        a.dim() == self.n
    }
    fn carrier_size(&self) -> Option<u128> {
        None
    }
    fn enumerate(&self) -> Result<Vec<UnitaryElement>, StructureError> {
        Err(StructureError::NotEnumerable(self.descriptor()))
    }
    fn random(&self, rng: &mut ChaCha8Rng) -> UnitaryElement {
        UnitaryElement::haar(self.n, rng)
    }
}

/// Invertible rational `n × n` matrices with the rank metric `rk(a − b)/n`.
///
/// Quantifiers range over the permutation matrices, exhaustively or sampled;
/// assignments may use any invertible matrix.
#[derive(Debug, Clone)]
pub struct RankAlgebra {
    n: usize,
    mode: EvalMode,
}

impl RankAlgebra {
    pub fn new(n: usize, mode: EvalMode) -> Result<Self, StructureError> {
        if n == 0 {
            return Err(StructureError::ZeroDimension);
        }
        Ok(RankAlgebra { n, mode })
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

impl MetricStructure for RankAlgebra {
    type Elem = RationalMatrix;
    type Value = Rational;

    fn descriptor(&self) -> Descriptor {
        Descriptor::Rank(self.n)
    }
    fn mode(&self) -> &EvalMode {
        &self.mode
    }
    fn identity(&self) -> RationalMatrix {
        RationalMatrix::identity(self.n)
    }
    fn mul(&self, a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
        a.mul(b).expect("matrices of the same dimension")
    }
    fn inv(&self, a: &RationalMatrix) -> RationalMatrix {
        a.inverse().expect("elements are invertible")
    }
    fn dist(&self, a: &RationalMatrix, b: &RationalMatrix) -> Rational {
        rank_distance(a, b).expect("matrices of the same dimension")
    }
    fn same(&self, a: &RationalMatrix, b: &RationalMatrix) -> bool {
        a == b
    }
    fn contains(&self, a: &RationalMatrix) -> bool {
        a.dim() == self.n && a.rank() == self.n
    }
    fn carrier_size(&self) -> Option<u128> {
        Some(factorial(self.n.min(34)))
    }
    fn enumerate(&self) -> Result<Vec<RationalMatrix>, StructureError> {
        if self.n > MAX_ENUMERABLE_SYM {
            return Err(StructureError::TooLarge {
                descriptor: self.descriptor(),
                size: factorial(self.n.min(34)),
            });
        }
        Ok(Permutation::all(self.n)
            .iter()
            .map(RationalMatrix::from_permutation)
            .collect())
    }
    fn random(&self, rng: &mut ChaCha8Rng) -> RationalMatrix {
        RationalMatrix::from_permutation(&Permutation::random(self.n, rng))
    }
}

/// A finite group given by its multiplication and distance tables.
///
/// Elements are indices `0..size`. Construction checks the group axioms and
/// that the distance is a bi-invariant metric with values in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct TableGroup {
    op: Vec<Vec<usize>>,
    metric: Vec<Vec<Rational>>,
    identity: usize,
    inverses: Vec<usize>,
    mode: EvalMode,
}

impl TableGroup {
    pub fn new(
        op: Vec<Vec<usize>>,
        metric: Vec<Vec<Rational>>,
        mode: EvalMode,
    ) -> Result<Self, StructureError> {
        let bad = |msg: String| Err(StructureError::InvalidTable(msg));
        let size = op.len();
        if size == 0 {
            return bad("empty carrier".into());
        }
        if op.iter().any(|row| row.len() != size) {
            return bad("multiplication table is not square".into());
        }
        if metric.len() != size || metric.iter().any(|row| row.len() != size) {
            return bad("distance table does not match the carrier".into());
        }
        if op.iter().flatten().any(|&c| c >= size) {
            return bad("product outside the carrier".into());
        }
        for a in 0..size {
            for b in 0..size {
                for c in 0..size {
                    if op[op[a][b]][c] != op[a][op[b][c]] {
                        return bad(format!("not associative at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        let Some(identity) = (0..size).find(|&e| (0..size).all(|a| op[e][a] == a && op[a][e] == a))
        else {
            return bad("no identity element".into());
        };
        let mut inverses = Vec::with_capacity(size);
        for (a, row) in op.iter().enumerate() {
            match (0..size).find(|&b| row[b] == identity && op[b][a] == identity) {
                Some(b) => inverses.push(b),
                None => return bad(format!("element {a} has no inverse")),
            }
        }
        let one = Rational::one();
        for a in 0..size {
            for b in 0..size {
                let d = &metric[a][b];
                if (a == b) != d.is_zero() {
                    return bad(format!("distance between {a} and {b} breaks separation"));
                }
                if *d < Rational::zero() || *d > one {
                    return bad(format!("distance between {a} and {b} is outside [0, 1]"));
                }
                if *d != metric[b][a] {
                    return bad(format!("distance between {a} and {b} is not symmetric"));
                }
                for c in 0..size {
                    if *d > &metric[a][c] + &metric[c][b] {
                        return bad(format!("triangle inequality fails at ({a}, {c}, {b})"));
                    }
                    if metric[op[c][a]][op[c][b]] != *d || metric[op[a][c]][op[b][c]] != *d {
                        return bad(format!("distance is not invariant under {c}"));
                    }
                }
            }
        }
        Ok(TableGroup {
            op,
            metric,
            identity,
            inverses,
            mode,
        })
    }

    /// The table form of `S_n`, elements listed as in [`Permutation::all`].
    pub fn from_symmetric(n: usize, mode: EvalMode) -> Result<Self, StructureError> {
        if n == 0 {
            return Err(StructureError::ZeroDimension);
        }
        if n > 6 {
            return Err(StructureError::TooLarge {
                descriptor: Descriptor::Sym(n),
                size: factorial(n),
            });
        }
        let elems = Permutation::all(n);
        let index = |p: &Permutation| elems.binary_search(p).expect("listed in order");
        let op = elems
            .iter()
            .map(|a| {
                elems
                    .iter()
                    .map(|b| index(&a.compose(b).expect("same degree")))
                    .collect()
            })
            .collect();
        let metric = elems
            .iter()
            .map(|a| {
                elems
                    .iter()
                    .map(|b| a.hamming_distance(b).expect("same degree"))
                    .collect()
            })
            .collect();
        TableGroup::new(op, metric, mode)
    }

    pub fn size(&self) -> usize {
        self.op.len()
    }
}

impl MetricStructure for TableGroup {
    type Elem = usize;
    type Value = Rational;

    fn descriptor(&self) -> Descriptor {
        Descriptor::Table(self.size())
    }
    fn mode(&self) -> &EvalMode {
        &self.mode
    }
    fn identity(&self) -> usize {
        self.identity
    }
    fn mul(&self, a: &usize, b: &usize) -> usize {
        self.op[*a][*b]
    }
    fn inv(&self, a: &usize) -> usize {
        self.inverses[*a]
    }
    fn dist(&self, a: &usize, b: &usize) -> Rational {
        self.metric[*a][*b].clone()
    }
    fn same(&self, a: &usize, b: &usize) -> bool {
        a == b
    }
    fn contains(&self, a: &usize) -> bool {
        *a < self.size()
    }
    fn carrier_size(&self) -> Option<u128> {
        Some(self.size() as u128)
    }
    fn enumerate(&self) -> Result<Vec<usize>, StructureError> {
        Ok((0..self.size()).collect())
    }
    fn random(&self, rng: &mut ChaCha8Rng) -> usize {
        use rand::Rng;
        rng.random_range(0..self.size())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rational;

    #[test]
    fn sampled_domain_starts_with_identity_and_is_seeded() {
        let mode = EvalMode::Sampled {
            samples: 5,
            seed: 3,
        };
        let s = SymmetricGroup::new(7, mode.clone()).unwrap();
        let a = s.domain().unwrap();
        let b = s.domain().unwrap();
        assert_eq!(a.len(), 6);
        assert!(a[0].is_identity());
        assert_eq!(a, b);
    }

    #[test]
    fn unitary_group_is_not_enumerable() {
        let u = UnitaryGroup::new(2, EvalMode::Exhaustive).unwrap();
        assert!(matches!(u.domain(), Err(StructureError::NotEnumerable(_))));
    }

    #[test]
    fn symmetric_table_passes_validation() {
        let t = TableGroup::from_symmetric(3, EvalMode::Exhaustive).unwrap();
        assert_eq!(t.size(), 6);
        assert_eq!(t.identity(), 0);
    }

    #[test]
    fn table_validation_rejects_bad_metrics() {
        // Z/2 with a distance that is not bounded by 1.
        let op = vec![vec![0, 1], vec![1, 0]];
        let metric = vec![
            vec![rational(0, 1), rational(2, 1)],
            vec![rational(2, 1), rational(0, 1)],
        ];
        assert!(TableGroup::new(op.clone(), metric, EvalMode::Exhaustive).is_err());
        // Z/3 with a distance that is not translation invariant.
        let op3: Vec<Vec<usize>> = (0..3)
            .map(|a| (0..3).map(|b| (a + b) % 3).collect())
            .collect();
        let q = |p| rational(p, 4);
        let metric3 = vec![
            vec![q(0), q(1), q(2)],
            vec![q(1), q(0), q(2)],
            vec![q(2), q(2), q(0)],
        ];
        assert!(TableGroup::new(op3, metric3, EvalMode::Exhaustive).is_err());
        let ok = vec![
            vec![rational(0, 1), rational(1, 1)],
            vec![rational(1, 1), rational(0, 1)],
        ];
        assert!(TableGroup::new(op, ok, EvalMode::Exhaustive).is_ok());
    }

    #[test]
    fn rank_domain_is_permutation_matrices() {
        let r = RankAlgebra::new(3, EvalMode::Exhaustive).unwrap();
        let dom = r.domain().unwrap();
        assert_eq!(dom.len(), 6);
        assert!(dom.iter().all(|a| r.contains(a)));
    }
}
