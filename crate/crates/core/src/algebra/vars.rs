//! Variable identifiers and the parameter name table.
//!
//! All polynomials in the engine live in one ambient set of variables with a
//! fixed total order: geometry variables `z0, z1, ...` first (by index), then
//! the refinement symbol `Q`, then named parameters (alphabetically), then the
//! base coordinate `x`, then scratch variables used for integration and local
//! expansion. The order is what makes graded-lex serialization byte-stable.

use std::fmt;

/// A variable of the ambient polynomial ring.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    /// Geometry variable `z<i>`: evaluation slots of multidifferentials.
    Z(u16),
    /// The refinement parameter.
    RefQ,
    /// A named curve parameter; the index comes from a [`ParamTable`] and is
    /// assigned in alphabetical order of the names.
    Par(u16),
    /// The base coordinate of the `x`-projection (quantum-curve output).
    X,
    /// Scratch variable: `Tmp(0)` is the integration variable of residue
    /// sums, `Tmp(1)` the local-expansion offset. Never part of stored data.
    Tmp(u16),
}

/// Integration variable used by all residue-sum engines.
pub const INTEG: Var = Var::Tmp(0);
/// Offset variable used internally by Laurent expansion.
pub const SHIFT: Var = Var::Tmp(1);

impl Var {
    pub fn z(i: usize) -> Var {
        Var::Z(u16::try_from(i).expect("geometry variable index overflow"))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Z(i) => write!(f, "z{i}"),
            Var::RefQ => write!(f, "Q"),
            Var::Par(i) => write!(f, "<par{i}>"),
            Var::X => write!(f, "x"),
            Var::Tmp(i) => write!(f, "<tmp{i}>"),
        }
    }
}

/// Maps parameter names to `Var::Par` indices.
///
/// Indices follow the alphabetical order of the names, so any two tables built
/// from the same name set agree, and serialized output is stable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParamTable {
    names: Vec<String>,
}

impl ParamTable {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> ParamTable {
        let mut names: Vec<String> = names.into_iter().map(Into::into).collect();
        names.sort();
        names.dedup();
        assert!(names.len() <= u16::MAX as usize, "too many parameters");
        ParamTable { names }
    }

    pub fn index(&self, name: &str) -> Option<u16> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok().map(|i| i as u16)
    }

    pub fn var(&self, name: &str) -> Option<Var> {
        self.index(name).map(Var::Par)
    }

    pub fn name(&self, index: u16) -> &str {
        &self.names[index as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_order_is_z_then_q_then_params() {
        let mut vars = vec![Var::Par(0), Var::X, Var::RefQ, Var::Z(3), Var::Z(0), Var::Tmp(0)];
        vars.sort();
        assert_eq!(
            vars,
            vec![Var::Z(0), Var::Z(3), Var::RefQ, Var::Par(0), Var::X, Var::Tmp(0)]
        );
    }

    #[test]
    fn param_table_orders_alphabetically() {
        let t = ParamTable::new(["mu0", "alpha", "lam0"]);
        assert_eq!(t.name(0), "alpha");
        assert_eq!(t.name(1), "lam0");
        assert_eq!(t.name(2), "mu0");
        assert_eq!(t.index("mu0"), Some(2));
        assert_eq!(t.index("nope"), None);
    }
}
