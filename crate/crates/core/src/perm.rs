//! Symmetric groups with the normalized Hamming metric.
//!
//! Points are `0..n` in the Rust API. Text forms are 1-based: the image list
//! `"n: σ(1) σ(2) … σ(n)"` and disjoint-cycle notation `"(1 2 3)(4 5)"`.
//!
//! Composition follows `(σ∘τ)(i) = σ(τ(i))`, so the right factor acts first.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("image list is not a bijection of 0..{degree}")]
    NotBijection { degree: usize },
    #[error("factor {index} has degree {degree}, expected {expected}")]
    WrongFactorDegree {
        index: usize,
        degree: usize,
        expected: usize,
    },
    #[error("product action needs at least one factor")]
    NoFactors,
    #[error("target degree {target} is smaller than required {required}")]
    TargetTooSmall { target: usize, required: usize },
    #[error("degree {0} overflows the supported range")]
    TooLarge(u128),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A bijection of `{0, …, n-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        assert!(degree >= 1, "degree must be at least 1");
        Permutation {
            images: (0..degree).collect(),
        }
    }

    /// Builds a permutation from its 0-based image list.
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        if n == 0 {
            return Err(PermError::ZeroDegree);
        }
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(PermError::NotBijection { degree: n });
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation of the given degree from disjoint 0-based cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        if degree == 0 {
            return Err(PermError::ZeroDegree);
        }
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (pos, &x) in cycle.iter().enumerate() {
                if x >= degree || touched[x] {
                    return Err(PermError::NotBijection { degree });
                }
                touched[x] = true;
                images[x] = cycle[(pos + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    /// Parses 1-based disjoint-cycle notation such as `"(1 2 3)(4 5)"`.
    ///
    /// `"()"` and `"e"` denote the identity.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self, PermError> {
        let cycles = parse_cycle_list(text)?;
        let zero_based: Vec<Vec<usize>> = cycles
            .into_iter()
            .map(|c| c.into_iter().map(|x| x - 1).collect())
            .collect();
        Permutation::from_cycles(degree, &zero_based)
    }

    /// A uniformly random permutation.
    pub fn random<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Self {
        let mut images: Vec<usize> = (0..degree).collect();
        images.shuffle(rng);
        Permutation { images }
    }

    /// All `n!` permutations in lexicographic order of image lists, identity first.
    pub fn all(degree: usize) -> Vec<Permutation> {
        assert!(degree >= 1, "degree must be at least 1");
        let mut current: Vec<usize> = (0..degree).collect();
        let mut out = vec![Permutation {
            images: current.clone(),
        }];
        loop {
            let Some(i) = (0..degree.saturating_sub(1))
                .rev()
                .find(|&i| current[i] < current[i + 1])
            else {
                return out;
            };
            let j = (i + 1..degree)
                .rev()
                .find(|&j| current[j] > current[i])
                .expect("a larger element exists to the right");
            current.swap(i, j);
            current[i + 1..].reverse();
            out.push(Permutation {
                images: current.clone(),
            });
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    fn check_degree(&self, other: &Permutation) -> Result<(), PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(())
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        self.check_degree(other)?;
        Ok(Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Permutation { images }
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`.
    pub fn commutator(a: &Permutation, b: &Permutation) -> Result<Permutation, PermError> {
        a.check_degree(b)?;
        a.compose(b)?.compose(&a.inverse())?.compose(&b.inverse())
    }

    /// `by ∘ self ∘ by⁻¹`.
    pub fn conjugate_by(&self, by: &Permutation) -> Result<Permutation, PermError> {
        self.check_degree(by)?;
        let mut images = vec![0; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[by.images[i]] = by.images[x];
        }
        Ok(Permutation { images })
    }

    /// Number of points where the two permutations differ.
    pub fn mismatches(&self, other: &Permutation) -> Result<usize, PermError> {
        self.check_degree(other)?;
        Ok(self
            .images
            .iter()
            .zip(&other.images)
            .filter(|(a, b)| a != b)
            .count())
    }

    /// Normalized Hamming distance `|{i : σ(i) ≠ τ(i)}| / n`.
    pub fn hamming_distance(&self, other: &Permutation) -> Result<Rational, PermError> {
        let count = self.mismatches(other)?;
        Ok(Rational::new(
            BigInt::from(count),
            BigInt::from(self.degree()),
        ))
    }

    /// All cycles, fixed points included. Each cycle starts at its smallest point
    /// and follows the permutation; cycles are ordered by that smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        let mut seen = vec![false; self.degree()];
        let mut count = 0;
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x];
            }
        }
        count
    }

    pub fn cycle_profile(&self) -> CycleProfile {
        let mut counts = BTreeMap::new();
        for cycle in self.cycles() {
            *counts.entry(cycle.len()).or_insert(0) += 1;
        }
        CycleProfile {
            degree: self.degree(),
            counts,
        }
    }

    /// Largest cycle length.
    pub fn width(&self) -> usize {
        self.cycles().iter().map(Vec::len).max().unwrap_or(1)
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.degree())
            .filter(|&i| self.images[i] == i)
            .collect()
    }

    /// Coordinatewise action of `S₃ × … × S₃` (`l` factors) on `{1,2,3}^l`,
    /// with `(i₁,…,i_l)` identified with `Σ_j (i_j − 1)·3^{l−j}` (0-based).
    pub fn product_action(factors: &[Permutation]) -> Result<Permutation, PermError> {
        if factors.is_empty() {
            return Err(PermError::NoFactors);
        }
        for (index, f) in factors.iter().enumerate() {
            if f.degree() != 3 {
                return Err(PermError::WrongFactorDegree {
                    index,
                    degree: f.degree(),
                    expected: 3,
                });
            }
        }
        let l = factors.len();
        let size = 3u128
            .checked_pow(l as u32)
            .filter(|&s| s <= MAX_DEGREE as u128)
            .ok_or(PermError::TooLarge(u128::MAX))?;
        let size = size as usize;
        let mut images = vec![0usize; size];
        let mut digits = vec![0usize; l];
        for (index, image) in images.iter_mut().enumerate() {
            let mut rest = index;
            for j in (0..l).rev() {
                digits[j] = rest % 3;
                rest /= 3;
            }
            *image = digits
                .iter()
                .zip(factors)
                .fold(0, |acc, (&d, f)| acc * 3 + f.images[d]);
        }
        Ok(Permutation { images })
    }

    /// `Φ(σ)` acting as `σ` on each of `k` stacked copies of `{0..m}` and fixing
    /// `{km, …, n-1}`. Block `j` occupies points `j·m .. (j+1)·m`.
    pub fn diagonal_embed(&self, copies: usize, target: usize) -> Result<Permutation, PermError> {
        let m = self.degree();
        let required = m
            .checked_mul(copies)
            .ok_or(PermError::TooLarge(m as u128 * copies as u128))?;
        if copies == 0 {
            return Err(PermError::TargetTooSmall {
                target: 0,
                required: m,
            });
        }
        if target < required {
            return Err(PermError::TargetTooSmall { target, required });
        }
        let mut images: Vec<usize> = (0..target).collect();
        for block in 0..copies {
            let offset = block * m;
            for i in 0..m {
                images[offset + i] = offset + self.images[i];
            }
        }
        Ok(Permutation { images })
    }

    /// Extension by fixed points to degree `target`.
    pub fn pad_embed(&self, target: usize) -> Result<Permutation, PermError> {
        self.diagonal_embed(1, target)
    }

    /// Restriction to `{0..degree}`; `None` if the set is not invariant.
    pub fn restrict(&self, degree: usize) -> Option<Permutation> {
        if degree == 0 || degree > self.degree() {
            return None;
        }
        let images = self.images[..degree].to_vec();
        if images.iter().any(|&x| x >= degree) {
            return None;
        }
        Some(Permutation { images })
    }
}

/// Upper limit on permutation degrees handled by constructions that allocate
/// `degree` words.
pub const MAX_DEGREE: usize = 1 << 26;

fn parse_cycle_list(text: &str) -> Result<Vec<Vec<usize>>, PermError> {
    let text = text.trim();
    if text == "e" || text == "()" || text.is_empty() {
        return Ok(Vec::new());
    }
    let mut cycles = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        let open = rest
            .strip_prefix('(')
            .ok_or_else(|| PermError::Parse(format!("expected '(' at {rest:?}")))?;
        let close = open
            .find(')')
            .ok_or_else(|| PermError::Parse("unclosed cycle".into()))?;
        let body = &open[..close];
        let cycle = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| match s.parse::<usize>() {
                Ok(0) => Err(PermError::Parse("points are numbered from 1".into())),
                Ok(x) => Ok(x),
                Err(_) => Err(PermError::Parse(format!("bad point {s:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
        rest = open[close + 1..].trim_start();
    }
    Ok(cycles)
}

impl fmt::Display for Permutation {
    /// One-line image list, `"n: σ(1) … σ(n)"`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.degree())?;
        for &x in &self.images {
            write!(f, " {}", x + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    /// Disjoint-cycle notation with the degree, e.g. `(1 2 3)(4 5) in S6`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for cycle in self.cycles().into_iter().filter(|c| c.len() > 1) {
            any = true;
            write!(f, "(")?;
            for (pos, x) in cycle.iter().enumerate() {
                if pos > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", x + 1)?;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "e")?;
        }
        write!(f, " in S{}", self.degree())
    }
}

impl FromStr for Permutation {
    type Err = PermError;

    /// Accepts the image list `"n: σ(1) … σ(n)"` or cycles with a degree
    /// prefix, `"n: (1 2 3)(4 5)"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (degree, body) = s
            .split_once(':')
            .ok_or_else(|| PermError::Parse("missing 'n:' degree prefix".into()))?;
        let degree: usize = degree
            .trim()
            .parse()
            .map_err(|_| PermError::Parse(format!("bad degree {degree:?}")))?;
        let body = body.trim();
        if body.starts_with('(') || body == "e" {
            return Permutation::parse_cycles(body, degree);
        }
        let images = body
            .split_whitespace()
            .map(|t| match t.parse::<usize>() {
                Ok(x) if x >= 1 => Ok(x - 1),
                _ => Err(PermError::Parse(format!("bad image {t:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if images.len() != degree {
            return Err(PermError::Parse(format!(
                "expected {degree} images, found {}",
                images.len()
            )));
        }
        Permutation::from_images(images)
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Number of cycles of each length, fixed points included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleProfile {
    degree: usize,
    counts: BTreeMap<usize, usize>,
}

impl CycleProfile {
    pub fn from_counts(degree: usize, counts: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let counts: BTreeMap<usize, usize> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        assert_eq!(
            counts.iter().map(|(l, c)| l * c).sum::<usize>(),
            degree,
            "cycle counts must cover the degree"
        );
        CycleProfile { degree, counts }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `|C_l(σ)|`.
    pub fn count(&self, length: usize) -> usize {
        self.counts.get(&length).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<usize, usize> {
        &self.counts
    }

    /// `w(σ)`: the greatest cycle length present.
    pub fn width(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(1)
    }

    pub fn total_cycles(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn all_divisible_by(&self, k: usize) -> bool {
        self.counts.values().all(|&c| c % k == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rational;

    fn cyc(text: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(text, n).unwrap()
    }

    #[test]
    fn compose_applies_right_factor_first() {
        // (12)∘(23): 1→2, 2→3, 3→1
        let p = cyc("(1 2)", 3).compose(&cyc("(2 3)", 3)).unwrap();
        assert_eq!(p, cyc("(1 2 3)", 3));
        assert_eq!(p.images(), &[1, 2, 0]);
    }

    #[test]
    fn compose_rejects_mismatched_degrees() {
        let err = cyc("(1 2)", 3).compose(&Permutation::identity(4));
        assert_eq!(err, Err(PermError::DegreeMismatch { left: 3, right: 4 }));
        assert!(
            Permutation::commutator(&Permutation::identity(2), &Permutation::identity(3)).is_err()
        );
        assert!(Permutation::identity(2)
            .hamming_distance(&Permutation::identity(3))
            .is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(cyc("(1 2 3)", 3).inverse(), cyc("(1 3 2)", 3));
        assert_eq!(Permutation::identity(5).inverse(), Permutation::identity(5));
        let t = cyc("(2 5)", 6);
        assert_eq!(t.inverse(), t);
    }

    #[test]
    fn commutator_of_adjacent_transpositions() {
        let c = Permutation::commutator(&cyc("(1 2)", 3), &cyc("(2 3)", 3)).unwrap();
        assert_eq!(c, cyc("(1 3 2)", 3));
        let a = cyc("(1 4)(2 3)", 4);
        assert!(Permutation::commutator(&a, &Permutation::identity(4))
            .unwrap()
            .is_identity());
        assert!(Permutation::commutator(&a, &a).unwrap().is_identity());
    }

    #[test]
    fn hamming_examples() {
        let d = cyc("(1 2)", 3)
            .hamming_distance(&Permutation::identity(3))
            .unwrap();
        assert_eq!(d, rational(2, 3));
    }

    #[test]
    fn cycle_profile_examples() {
        let p = cyc("(1 2 3)(4 5)", 6).cycle_profile();
        assert_eq!(p, CycleProfile::from_counts(6, [(3, 1), (2, 1), (1, 1)]));
        assert_eq!(p.width(), 3);
        let id = Permutation::identity(7).cycle_profile();
        assert_eq!(id.count(1), 7);
        assert_eq!(id.width(), 1);
        let long = cyc("(1 2 3 4 5 6 7 8)", 8).cycle_profile();
        assert_eq!(long, CycleProfile::from_counts(8, [(8, 1)]));
        assert_eq!(long.width(), 8);
    }

    #[test]
    fn product_action_examples() {
        let s = cyc("(1 2)", 3);
        assert_eq!(
            Permutation::product_action(std::slice::from_ref(&s)).unwrap(),
            s
        );
        let p = Permutation::product_action(&[s, Permutation::identity(3)]).unwrap();
        assert_eq!(p.degree(), 9);
        assert_eq!(
            p.cycle_profile(),
            CycleProfile::from_counts(9, [(2, 3), (1, 3)])
        );
        assert_eq!(
            Permutation::product_action(&[Permutation::identity(2)]),
            Err(PermError::WrongFactorDegree {
                index: 0,
                degree: 2,
                expected: 3
            })
        );
        assert_eq!(Permutation::product_action(&[]), Err(PermError::NoFactors));
    }

    #[test]
    fn diagonal_embed_examples() {
        let s = cyc("(1 2 3)", 3);
        assert_eq!(s.diagonal_embed(1, 3).unwrap(), s);
        let e = s.diagonal_embed(2, 6).unwrap();
        assert_eq!(e, cyc("(1 2 3)(4 5 6)", 6));
        assert_eq!(
            s.diagonal_embed(2, 5),
            Err(PermError::TargetTooSmall {
                target: 5,
                required: 6
            })
        );
        let a = cyc("(1 2)", 3);
        let b = cyc("(1 2 3)", 3);
        let d_small = a.hamming_distance(&b).unwrap();
        let d_big = a
            .diagonal_embed(2, 7)
            .unwrap()
            .hamming_distance(&b.diagonal_embed(2, 7).unwrap())
            .unwrap();
        assert_eq!(d_big, d_small * rational(6, 7));
    }

    #[test]
    fn pad_embed_examples() {
        assert_eq!(
            Permutation::identity(3).pad_embed(5).unwrap(),
            Permutation::identity(5)
        );
        let p = cyc("(1 2)", 2).pad_embed(3).unwrap();
        assert_eq!(
            p.hamming_distance(&Permutation::identity(3)).unwrap(),
            rational(2, 3)
        );
        assert!(cyc("(1 2)", 2).pad_embed(1).is_err());
    }

    #[test]
    fn text_round_trip() {
        let p = cyc("(1 3 5)(2 4)", 6);
        let text = p.to_string();
        assert_eq!(text, "6: 3 4 5 2 1 6");
        assert_eq!(text.parse::<Permutation>().unwrap(), p);
        assert_eq!("6: (1 3 5)(2 4)".parse::<Permutation>().unwrap(), p);
        assert_eq!(format!("{p:?}"), "(1 3 5)(2 4) in S6");
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Permutation>(&json).unwrap(), p);
    }

    #[test]
    fn parse_errors() {
        assert!(Permutation::parse_cycles("(1 2)(2 3)", 3).is_err());
        assert!(Permutation::parse_cycles("(1 4)", 3).is_err());
        assert!(Permutation::parse_cycles("(0 1)", 3).is_err());
        assert!(Permutation::parse_cycles("(1 2", 3).is_err());
        assert!("3: 1 1 2".parse::<Permutation>().is_err());
        assert!("3: 1 2".parse::<Permutation>().is_err());
        assert!("1 2 3".parse::<Permutation>().is_err());
        assert!(Permutation::from_images(vec![]).is_err());
    }

    #[test]
    fn enumerates_all_permutations() {
        assert_eq!(Permutation::all(1).len(), 1);
        let all = Permutation::all(4);
        assert_eq!(all.len(), 24);
        assert!(all[0].is_identity());
        let distinct: std::collections::BTreeSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 24);
    }

    #[test]
    fn restriction_requires_invariance() {
        let p = cyc("(1 2)(4 5)", 5);
        assert_eq!(p.restrict(3).unwrap(), cyc("(1 2)", 3));
        assert!(p.restrict(4).is_none());
    }
}
