pub mod cli;
pub mod formula;
pub mod matrix;
pub mod order;
pub mod perm;
pub mod rational;
pub mod rounding;
