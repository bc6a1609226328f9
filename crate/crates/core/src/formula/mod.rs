//! Continuous-logic formulas over metric groups: syntax, parsing and evaluation.

mod ast;
mod defect;
mod eval;
mod parse;
mod scan;
mod structure;
mod value;

pub use ast::{Formula, Term};
pub use defect::{
    discrete_shadow_check, double_clamped, embedding_defect, validate_shadow_map, EmbeddingDefect,
    ShadowError,
};
pub use eval::{
    evaluate, evaluate_term, evaluate_with_budget, required_steps, sigma2_report, sigma2_value,
    Assignment, EvalError, Sigma2Report, DEFAULT_BUDGET,
};
pub use parse::{parse, parse_sentence, parse_with_vars, ParseError, ParseErrorKind};
pub use scan::{convergence_scan, Family, ScanOptions, ScanPoint};
pub use structure::{
    Descriptor, EvalMode, MetricStructure, RankAlgebra, StructureError, SymmetricGroup, TableGroup,
    UnitaryGroup, MAX_ENUMERABLE_SYM,
};
pub use value::{MetricValue, Value, FLOAT_TOL};
