//! Rational functions: the universal value type of the engine.
//!
//! Canonical form: `gcd(num, den) = 1` and the denominator's graded-lex
//! leading coefficient is `+1`. Construction always normalizes, so derived
//! equality agrees with mathematical equality.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::gcd::poly_gcd;
use super::num::Rat;
use super::poly::MultiPoly;
use super::vars::Var;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFunc {
    num: MultiPoly,
    den: MultiPoly,
}

/// Errors raised by exact-algebra operations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AlgebraError {
    /// Division by the zero rational function.
    DivisionByZero,
    /// A required point is not rational (or `oo`) in the chosen chart.
    UnsupportedPoint(String),
    /// Denominator has an irreducible factor of degree >= 2 over the
    /// available coefficients.
    UnsupportedFactorization(String),
    /// Antiderivative obstructed by a nonzero residue (a log term).
    NoRationalPrimitive(String),
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::DivisionByZero => write!(f, "division by zero rational function"),
            AlgebraError::UnsupportedPoint(s) => write!(f, "unsupported point: {s}"),
            AlgebraError::UnsupportedFactorization(s) => {
                write!(f, "unsupported factorization: {s}")
            }
            AlgebraError::NoRationalPrimitive(s) => {
                write!(f, "no rational primitive: {s}")
            }
        }
    }
}

impl std::error::Error for AlgebraError {}

impl RatFunc {
    pub fn new(num: MultiPoly, den: MultiPoly) -> RatFunc {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFunc { num, den: MultiPoly::one() };
        }
        let g = poly_gcd(&num, &den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let (monic_den, lead) = den.monic();
        den = monic_den;
        num = num.map_coeffs(|c| c / &lead);
        RatFunc { num, den }
    }

    pub fn from_poly(p: MultiPoly) -> RatFunc {
        RatFunc { num: p, den: MultiPoly::one() }
    }

    pub fn zero() -> RatFunc {
        RatFunc::from_poly(MultiPoly::zero())
    }

    pub fn one() -> RatFunc {
        RatFunc::from_poly(MultiPoly::one())
    }

    pub fn constant(c: Rat) -> RatFunc {
        RatFunc::from_poly(MultiPoly::constant(c))
    }

    pub fn var(v: Var) -> RatFunc {
        RatFunc::from_poly(MultiPoly::var(v))
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Rat> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut vs = self.num.variables();
        for v in self.den.variables() {
            if !vs.contains(&v) {
                vs.push(v);
            }
        }
        vs.sort();
        vs
    }

    pub fn recip(&self) -> Result<RatFunc, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(RatFunc::new(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, e: i64) -> Result<RatFunc, AlgebraError> {
        if e < 0 {
            return Ok(self.recip()?.pow(-e)?);
        }
        Ok(RatFunc::new(self.num.pow(e as u32), self.den.pow(e as u32)))
    }

    pub fn scale(&self, c: &Rat) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    /// d/dv, quotient rule.
    pub fn derivative(&self, v: Var) -> RatFunc {
        if !self.contains_var(v) {
            return RatFunc::zero();
        }
        if self.den.is_one() {
            return RatFunc::from_poly(self.num.derivative(v));
        }
        let dn = self.num.derivative(v);
        let dd = self.den.derivative(v);
        RatFunc::new(&(&dn * &self.den) - &(&self.num * &dd), &self.den * &self.den)
    }

    /// Rename variables (map may merge variables). The merged denominator
    /// must not collapse to zero; that would mean evaluating on a pole locus.
    pub fn remap(&self, map: impl Fn(Var) -> Var) -> RatFunc {
        let den = self.den.remap(&map);
        assert!(!den.is_zero(), "variable merge lands on the pole locus");
        RatFunc::new(self.num.remap(&map), den)
    }

    /// Rename variables along an injective map: coprimality is preserved, so
    /// only the leading normalization needs redoing.
    pub fn remap_injective(&self, map: impl Fn(Var) -> Var) -> RatFunc {
        RatFunc { num: self.num.remap(&map), den: self.den.remap(&map) }.normalize_lead()
    }

    /// Substitute a rational constant for `v`. Fails if `v = value` hits the
    /// pole locus of the function.
    pub fn eval_var(&self, v: Var, value: &Rat) -> Result<RatFunc, AlgebraError> {
        if !self.contains_var(v) {
            return Ok(self.clone());
        }
        let den = self.den.eval_var(v, value);
        if den.is_zero() {
            return Err(AlgebraError::UnsupportedPoint(format!(
                "substitution {v} = {value} lands on a pole"
            )));
        }
        Ok(RatFunc::new(self.num.eval_var(v, value), den))
    }

    /// Substitute a rational function for `v`.
    pub fn subst(&self, v: Var, value: &RatFunc) -> Result<RatFunc, AlgebraError> {
        if !self.contains_var(v) {
            return Ok(self.clone());
        }
        let (nn, nd) = self.num.subst_fraction(v, &value.num, &value.den);
        let (dn, dd) = self.den.subst_fraction(v, &value.num, &value.den);
        // value = a/b: self = nn/b^dn_deg / (dn/b^dd_deg) -> nn * dd_pow / (dn * nd_pow)
        if dn.is_zero() {
            return Err(AlgebraError::UnsupportedPoint(
                "substitution lands on a pole".into(),
            ));
        }
        Ok(RatFunc::new(&nn * &dd, &dn * &nd))
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den.clone());
        }
        let g = poly_gcd(&self.den, &rhs.den);
        if g.is_one() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            return RatFunc { num, den: &self.den * &rhs.den }.reduce_light();
        }
        let da = self.den.div_exact(&g).unwrap();
        let db = rhs.den.div_exact(&g).unwrap();
        let num = &(&self.num * &db) + &(&rhs.num * &da);
        // Any common factor of num with the lcm divides g.
        let h = poly_gcd(&num, &g);
        if h.is_one() {
            RatFunc { num, den: &self.den * &db }.normalize_lead()
        } else {
            let num = num.div_exact(&h).unwrap();
            let den = &self.den.div_exact(&h).unwrap() * &db;
            RatFunc { num, den }.normalize_lead()
        }
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        // Cross-cancel before multiplying to keep intermediates small.
        let g1 = poly_gcd(&self.num, &rhs.den);
        let g2 = poly_gcd(&rhs.num, &self.den);
        let n1 = if g1.is_one() { self.num.clone() } else { self.num.div_exact(&g1).unwrap() };
        let d2 = if g1.is_one() { rhs.den.clone() } else { rhs.den.div_exact(&g1).unwrap() };
        let n2 = if g2.is_one() { rhs.num.clone() } else { rhs.num.div_exact(&g2).unwrap() };
        let d1 = if g2.is_one() { self.den.clone() } else { self.den.div_exact(&g2).unwrap() };
        RatFunc { num: &n1 * &n2, den: &d1 * &d2 }.normalize_lead()
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        assert!(!rhs.is_zero(), "division by zero rational function");
        self * &RatFunc::new(rhs.den.clone(), rhs.num.clone())
    }
}

impl RatFunc {
    /// Build from parts already known to be coprime (skips the gcd).
    pub(crate) fn from_coprime(num: MultiPoly, den: MultiPoly) -> RatFunc {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num, den }.normalize_lead()
    }

    fn normalize_lead(mut self) -> RatFunc {
        if self.num.is_zero() {
            return RatFunc::zero();
        }
        let (den, lead) = self.den.monic();
        if !lead.is_one() {
            self.den = den;
            self.num = self.num.map_coeffs(|c| c / &lead);
        }
        self
    }

    fn reduce_light(self) -> RatFunc {
        // Numerator built from coprime denominators is already coprime with
        // the product; only the leading normalization can be off.
        self.normalize_lead()
    }

    /// Numerator of `self - rhs`; zero iff equal (cross-multiplication test).
    pub fn equals(&self, rhs: &RatFunc) -> bool {
        self == rhs
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::text::ratfunc_to_string(self, None))
    }
}

/// Sum many fractions (not necessarily reduced) whose denominators factor
/// completely over a known basis of pairwise-coprime polynomials: no gcd
/// runs anywhere. The result is exact and fully reduced. Returns `None` if
/// some denominator refuses to factor over the basis (caller falls back to
/// pairwise adds).
pub fn sum_raw_over_factor_basis(
    items: &[(MultiPoly, MultiPoly)],
    basis: &[MultiPoly],
) -> Option<RatFunc> {
    use super::num::Rat;
    if items.is_empty() {
        return Some(RatFunc::zero());
    }
    let mut exps: Vec<Vec<u32>> = Vec::with_capacity(items.len());
    let mut scales: Vec<Rat> = Vec::with_capacity(items.len());
    for (_, d) in items {
        let mut den = d.clone();
        let mut e = vec![0u32; basis.len()];
        for (k, f) in basis.iter().enumerate() {
            while let Some(q) = den.div_exact(f) {
                den = q;
                e[k] += 1;
            }
        }
        let c = den.as_constant()?;
        if c.is_zero() {
            return None;
        }
        exps.push(e);
        scales.push(c);
    }
    let mut maxe = vec![0u32; basis.len()];
    for e in &exps {
        for (k, &x) in e.iter().enumerate() {
            maxe[k] = maxe[k].max(x);
        }
    }
    let mut num = MultiPoly::zero();
    for (((n, _), e), c) in items.iter().zip(&exps).zip(&scales) {
        if n.is_zero() {
            continue;
        }
        let mut cof = n.map_coeffs(|x| x / c);
        for (k, f) in basis.iter().enumerate() {
            let extra = maxe[k] - e[k];
            if extra > 0 {
                cof = &cof * &f.pow(extra);
            }
        }
        num = &num + &cof;
    }
    if num.is_zero() {
        return Some(RatFunc::zero());
    }
    // Cancel basis factors shared with the numerator; afterwards the pair is
    // coprime since the denominator has no other factors.
    let mut den = MultiPoly::one();
    for (k, f) in basis.iter().enumerate() {
        let mut e = maxe[k];
        while e > 0 {
            match num.div_exact(f) {
                Some(q) => {
                    num = q;
                    e -= 1;
                }
                None => break,
            }
        }
        for _ in 0..e {
            den = &den * f;
        }
    }
    Some(RatFunc::from_coprime(num, den))
}

/// Reduced-input convenience wrapper over [`sum_raw_over_factor_basis`].
pub fn sum_over_factor_basis(items: &[RatFunc], basis: &[MultiPoly]) -> Option<RatFunc> {
    let raw: Vec<(MultiPoly, MultiPoly)> = items
        .iter()
        .map(|f| (f.num().clone(), f.den().clone()))
        .collect();
    sum_raw_over_factor_basis(&raw, basis)
}

/// Field operations behind one entry point, matching the engine's public
/// operation table.
pub fn field_arith(a: &RatFunc, b: &RatFunc, op: FieldOp) -> Result<RatFunc, AlgebraError> {
    match op {
        FieldOp::Add => Ok(a + b),
        FieldOp::Sub => Ok(a - b),
        FieldOp::Mul => Ok(a * b),
        FieldOp::Div => {
            if b.is_zero() {
                Err(AlgebraError::DivisionByZero)
            } else {
                Ok(a / b)
            }
        }
        FieldOp::Pow(e) => {
            if e < 0 && a.is_zero() {
                Err(AlgebraError::DivisionByZero)
            } else {
                a.pow(e)
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow(i64),
}

/// A point of the Riemann sphere in a fixed chart: a finite value (possibly
/// depending on parameters or other geometry variables) or `oo`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Point {
    Finite(RatFunc),
    Infinity,
}

impl Point {
    pub fn rat(r: Rat) -> Point {
        Point::Finite(RatFunc::constant(r))
    }

    pub fn int(n: i64) -> Point {
        Point::rat(Rat::from_integer(n.into()))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn as_rat(&self) -> Option<Rat> {
        match self {
            Point::Finite(f) => f.as_constant(),
            Point::Infinity => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(v) => write!(f, "{v}"),
            Point::Infinity => write!(f, "oo"),
        }
    }
}

/// Sign-stable display ordering for point lists.
pub fn point_sort_key(p: &Point) -> String {
    match p {
        Point::Infinity => "~oo".into(),
        Point::Finite(f) => format!("{f}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::num::{rat, rat_int};

    fn z(i: usize) -> RatFunc {
        RatFunc::var(Var::z(i))
    }

    #[test]
    fn additive_inverse_cancels() {
        // (z/(z-1)) + (-z/(z-1)) = 0
        let zm1 = &z(0) - &RatFunc::one();
        let a = &z(0) / &zm1;
        let b = -&a;
        assert!((&a + &b).is_zero());
    }

    #[test]
    fn gcd_cancellation_normalizes() {
        // (z^2 - 1)/(z - 1) = z + 1
        let f = RatFunc::new(
            (&z(0).pow(2).unwrap() - &RatFunc::one()).num().clone(),
            (&z(0) - &RatFunc::one()).num().clone(),
        );
        assert_eq!(f, &z(0) + &RatFunc::one());
    }

    #[test]
    fn refinement_parameter_product() {
        // (1 + Q z)(1 - Q z) = 1 - Q^2 z^2, frozen from the hand expansion.
        use crate::algebra::poly::Monomial;
        let q = RatFunc::var(Var::RefQ);
        let qz = &q * &z(0);
        let lhs = &(&RatFunc::one() + &qz) * &(&RatFunc::one() - &qz);
        let expect = MultiPoly::from_terms([
            (Monomial::unit(), rat_int(1)),
            (
                Monomial::from_pairs(vec![(Var::z(0), 2), (Var::RefQ, 2)]),
                rat_int(-1),
            ),
        ]);
        assert_eq!(lhs, RatFunc::from_poly(expect));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let e = field_arith(&z(0), &RatFunc::zero(), FieldOp::Div);
        assert_eq!(e, Err(AlgebraError::DivisionByZero));
    }

    #[test]
    fn canonical_form_has_monic_denominator() {
        // 1 / (2z + 2) -> (1/2) / (z + 1)
        let f = &RatFunc::one() / &(&z(0).scale(&rat_int(2)) + &RatFunc::constant(rat_int(2)));
        assert!(f.den().leading().unwrap().1.is_one());
        assert_eq!(f.num().as_constant(), Some(rat(1, 2)));
    }

    #[test]
    fn substitution_composes() {
        // f(z) = z^2, f(1/w) = 1/w^2
        let f = z(0).pow(2).unwrap();
        let w = RatFunc::var(Var::z(1));
        let g = f.subst(Var::z(0), &w.recip().unwrap()).unwrap();
        assert_eq!(g, w.pow(-2).unwrap());
    }
}
