// Negated float comparisons are used on purpose so that NaN takes the error path.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod correction;
pub mod error;
pub mod oracle;
pub mod potential;
pub mod quadrature;
pub mod solver;
