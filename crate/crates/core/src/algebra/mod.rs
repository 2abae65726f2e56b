//! Exact computational substrate: arbitrary-precision rationals, sparse
//! multivariate polynomials, rational functions, Laurent expansion, residues,
//! partial fractions, and local antiderivatives.

pub mod gcd;
pub mod num;
pub mod poly;
pub mod ratfunc;
pub mod residue;
pub mod series;
pub mod text;
pub mod vars;

pub use num::{rat, rat_int, Rat};
pub use poly::{Monomial, MultiPoly};
pub use ratfunc::{field_arith, AlgebraError, FieldOp, Point, RatFunc};
pub use residue::{
    diff_valuation, local_antiderivative, partial_fractions, pole_order, residue_at,
    root_multiplicity, PartialFractions, PoleTerm,
};
pub use series::{laurent_expand, LaurentSeries};
pub use text::{parse_expr, poly_to_string, ratfunc_to_string, ExprNames, ParseError};
pub use vars::{ParamTable, Var, INTEG, SHIFT};
