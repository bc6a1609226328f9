//! Values of one sentence across a range of sizes.

use std::str::FromStr;

use super::ast::Formula;
use super::eval::{sigma2_report, EvalError, DEFAULT_BUDGET};
use super::structure::{EvalMode, MetricStructure, RankAlgebra, SymmetricGroup, UnitaryGroup};
use super::value::{MetricValue, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Sym,
    Unitary,
    Rank,
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sym" => Ok(Family::Sym),
            "unitary" => Ok(Family::Unitary),
            "rank" => Ok(Family::Rank),
            other => Err(format!(
                "unknown family {other:?}; expected sym, unitary or rank"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOptions {
    pub budget: u128,
    /// Sample count for sampled evaluation.
    pub samples: usize,
    pub seed: u64,
    /// Sample permutation and rank structures too, instead of enumerating.
    pub force_sampled: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            budget: DEFAULT_BUDGET,
            samples: 64,
            seed: 0,
            force_sampled: false,
        }
    }
}

impl ScanOptions {
    fn mode(&self, family: Family, n: usize) -> EvalMode {
        if family == Family::Unitary || self.force_sampled {
            EvalMode::Sampled {
                samples: self.samples,
                seed: self.seed.wrapping_add(n as u64),
            }
        } else {
            EvalMode::Exhaustive
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub n: usize,
    pub value: Value,
    /// `"exact"` or `"sampled estimate"`.
    pub mode: &'static str,
    pub evaluations: u64,
}

fn point<S: MetricStructure>(
    s: &S,
    f: &Formula,
    n: usize,
    budget: u128,
) -> Result<ScanPoint, EvalError> {
    let report = sigma2_report(s, f, budget)?;
    Ok(ScanPoint {
        n,
        value: report.value.into_value(),
        mode: s.mode().label(),
        evaluations: report.evaluations,
    })
}

/// Evaluates the Σ₂ sentence `f` in the `n`-th member of `family` for each `n`.
/// The series is reported as computed; nothing about its limit is asserted.
pub fn convergence_scan(
    f: &Formula,
    family: Family,
    ns: &[usize],
    options: &ScanOptions,
) -> Result<Vec<ScanPoint>, EvalError> {
    if !f.is_sigma2() {
        return Err(EvalError::NotSigma2);
    }
    ns.iter()
        .map(|&n| {
            let mode = options.mode(family, n);
            match family {
                Family::Sym => point(&SymmetricGroup::new(n, mode)?, f, n, options.budget),
                Family::Unitary => point(&UnitaryGroup::new(n, mode)?, f, n, options.budget),
                Family::Rank => point(&RankAlgebra::new(n, mode)?, f, n, options.budget),
            }
        })
        .collect()
}
