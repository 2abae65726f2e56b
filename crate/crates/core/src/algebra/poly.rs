//! Sparse multivariate polynomials over arbitrary-precision rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by monomials under graded-lex order
//! (total degree first, then the earlier variable with the larger exponent
//! wins), so iteration order, leading terms, and serialization are all
//! deterministic. No zero coefficient is ever stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::num::{is_zero, Rat};
use super::vars::Var;

/// A power product: sorted `(variable, exponent)` pairs, exponents > 0.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn unit() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(v: Var, exp: u32) -> Monomial {
        if exp == 0 {
            Monomial::unit()
        } else {
            Monomial(vec![(v, exp)])
        }
    }

    pub fn from_pairs(mut pairs: Vec<(Var, u32)>) -> Monomial {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_by_key(|&(v, _)| v);
        for w in pairs.windows(2) {
            assert!(w[0].0 != w[1].0, "duplicate variable in monomial");
        }
        Monomial(pairs)
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&(_, e)| e as u64).sum()
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.0.iter().find(|&&(w, _)| w == v).map_or(0, |&(_, e)| e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0, self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Divide by `other`, if every exponent of `other` is covered.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            let mut e = e;
            if j < other.0.len() && other.0[j].0 < v {
                return None; // divisor has a variable we lack
            }
            if j < other.0.len() && other.0[j].0 == v {
                let de = other.0[j].1;
                if de > e {
                    return None;
                }
                e -= de;
                j += 1;
            }
            if e > 0 {
                out.push((v, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        for &(v, e) in &self.0 {
            let oe = other.exp(v);
            let m = e.min(oe);
            if m > 0 {
                out.push((v, m));
            }
        }
        Monomial(out)
    }

    /// Replace variables according to `map`; images may collide (exponents add).
    pub fn remap(&self, map: impl Fn(Var) -> Var) -> Monomial {
        let mut pairs: Vec<(Var, u32)> = Vec::with_capacity(self.0.len());
        for &(v, e) in &self.0 {
            pairs.push((map(v), e));
        }
        pairs.sort_by_key(|&(v, _)| v);
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some((w, f)) if *w == v => *f += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: higher total degree first; on ties the earlier
    /// variable with the larger exponent wins.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                // The side that still has variables has positive exponent on
                // some later variable, hence smaller lex weight on earlier
                // ones is impossible at equal degree: remaining side is less.
                (None, Some(_)) => return Ordering::Greater,
                (Some(_), None) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(&eb) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }
}

/// Sparse multivariate polynomial with rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Rat>,
}

impl MultiPoly {
    pub fn zero() -> MultiPoly {
        MultiPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> MultiPoly {
        MultiPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> MultiPoly {
        let mut terms = BTreeMap::new();
        if !is_zero(&c) {
            terms.insert(Monomial::unit(), c);
        }
        MultiPoly { terms }
    }

    pub fn var(v: Var) -> MultiPoly {
        MultiPoly::monomial(Monomial::var(v, 1), Rat::one())
    }

    pub fn monomial(m: Monomial, c: Rat) -> MultiPoly {
        let mut terms = BTreeMap::new();
        if !is_zero(&c) {
            terms.insert(m, c);
        }
        MultiPoly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rat)>) -> MultiPoly {
        let mut p = MultiPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::unit())
                .map_or(false, |c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&Monomial::unit()))
    }

    /// The constant value, if this polynomial is constant.
    pub fn as_constant(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            Some(Rat::zero())
        } else if self.is_constant() {
            self.terms.get(&Monomial::unit()).cloned()
        } else {
            None
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if is_zero(&c) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if is_zero(&s) {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// Leading (monomial, coefficient) under graded-lex.
    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = Vec::new();
        for m in self.terms.keys() {
            for &(v, _) in m.pairs() {
                if !vs.contains(&v) {
                    vs.push(v);
                }
            }
        }
        vs.sort();
        vs
    }

    pub fn map_coeffs(&self, f: impl Fn(&Rat) -> Rat) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> MultiPoly {
        if is_zero(c) {
            return MultiPoly::zero();
        }
        self.map_coeffs(|x| x * c)
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rat) -> MultiPoly {
        if is_zero(c) {
            return MultiPoly::zero();
        }
        let mut out = BTreeMap::new();
        for (mm, cc) in &self.terms {
            out.insert(mm.mul(m), cc * c);
        }
        MultiPoly { terms: out }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut result = MultiPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Partial derivative with respect to `v`.
    pub fn derivative(&self, v: Var) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e == 0 {
                continue;
            }
            let mut pairs: Vec<(Var, u32)> = m.pairs().to_vec();
            for p in pairs.iter_mut() {
                if p.0 == v {
                    p.1 -= 1;
                }
            }
            out.add_term(Monomial::from_pairs(pairs), c * Rat::from_integer(e.into()));
        }
        out
    }

    /// Rename variables; the map may merge distinct variables.
    pub fn remap(&self, map: impl Fn(Var) -> Var) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.remap(&map), c.clone());
        }
        out
    }

    /// Substitute a rational constant for `v`.
    pub fn eval_var(&self, v: Var, value: &Rat) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e == 0 {
                out.add_term(m.clone(), c.clone());
            } else {
                let rest = Monomial::from_pairs(
                    m.pairs().iter().copied().filter(|&(w, _)| w != v).collect(),
                );
                let mut pw = Rat::one();
                for _ in 0..e {
                    pw *= value;
                }
                out.add_term(rest, c * pw);
            }
        }
        out
    }

    /// Substitute the polynomial `p` for `v` (Horner in `v`).
    pub fn subst_poly(&self, v: Var, p: &MultiPoly) -> MultiPoly {
        let d = self.degree_in(v);
        if d == 0 {
            return self.clone();
        }
        let coeffs = self.coeffs_in(v);
        let mut acc = MultiPoly::zero();
        for k in (0..=d as usize).rev() {
            acc = &(&acc * p) + &coeffs[k];
        }
        acc
    }

    /// Substitute the fraction `num/den` for `v`; returns the numerator of
    /// the cleared result, paired with the power `den^deg_v(self)` that
    /// clears it.
    pub fn subst_fraction(&self, v: Var, num: &MultiPoly, den: &MultiPoly) -> (MultiPoly, MultiPoly) {
        let d = self.degree_in(v);
        if d == 0 {
            return (self.clone(), MultiPoly::one());
        }
        let coeffs = self.coeffs_in(v);
        // sum_k c_k num^k den^(d-k), by Horner: ((c_d num + c_{d-1} den) num + c_{d-2} den^2) ...
        let mut acc = MultiPoly::zero();
        let mut den_pow = MultiPoly::one();
        for k in (0..=d as usize).rev() {
            acc = &(&acc * num) + &(&coeffs[k] * &den_pow);
            if k > 0 {
                den_pow = &den_pow * den;
            }
        }
        (acc, den_pow)
    }

    /// Dense coefficient list in `v`: index `k` holds the coefficient of `v^k`.
    pub fn coeffs_in(&self, v: Var) -> Vec<MultiPoly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![MultiPoly::zero(); d + 1];
        for (m, c) in &self.terms {
            let e = m.exp(v) as usize;
            let rest =
                Monomial::from_pairs(m.pairs().iter().copied().filter(|&(w, _)| w != v).collect());
            out[e].add_term(rest, c.clone());
        }
        out
    }

    /// Assemble from a dense coefficient list in `v`.
    pub fn from_coeffs_in(v: Var, coeffs: &[MultiPoly]) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            for (m, r) in &c.terms {
                out.add_term(m.mul(&Monomial::var(v, k as u32)), r.clone());
            }
        }
        out
    }

    /// Lowest exponent of `v` appearing (the `v`-adic valuation); 0 for the
    /// zero polynomial.
    pub fn valuation_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).min().unwrap_or(0)
    }

    /// Exact division; `None` if `self` is not a multiple of `d`.
    pub fn div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(MultiPoly::zero());
        }
        if let Some(c) = d.as_constant() {
            return Some(self.map_coeffs(|x| x / &c));
        }
        let (dm, dc) = d.leading().unwrap();
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(dm)?;
            let qc = rc / dc;
            quot.add_term(qm.clone(), qc.clone());
            let sub = d.mul_monomial(&qm, &qc);
            rem = &rem - &sub;
        }
        Some(quot)
    }

    /// Normalize so the graded-lex leading coefficient is `+1`; returns the
    /// scalar that was divided out. Zero stays zero with scalar 1.
    pub fn monic(&self) -> (MultiPoly, Rat) {
        match self.leading() {
            None => (MultiPoly::zero(), Rat::one()),
            Some((_, c)) => {
                let c = c.clone();
                (self.map_coeffs(|x| x / &c), c)
            }
        }
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let (big, small) = if self.terms.len() >= rhs.terms.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.map_coeffs(|c| -c.clone())
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        if self.is_zero() || rhs.is_zero() {
            return MultiPoly::zero();
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        let (big, small) = if self.terms.len() >= rhs.terms.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = MultiPoly::zero();
        for (m, c) in &small.terms {
            for (mm, cc) in &big.terms {
                out.add_term(m.mul(mm), c * cc);
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::text::poly_to_string(self, None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::num::{rat, rat_int};

    fn z(i: usize) -> MultiPoly {
        MultiPoly::var(Var::z(i))
    }

    #[test]
    fn graded_lex_orders_by_degree_then_early_var() {
        let m_z0sq = Monomial::var(Var::z(0), 2);
        let m_z0z1 = Monomial::from_pairs(vec![(Var::z(0), 1), (Var::z(1), 1)]);
        let m_z1sq = Monomial::var(Var::z(1), 2);
        let m_z0 = Monomial::var(Var::z(0), 1);
        assert!(m_z0sq > m_z0z1);
        assert!(m_z0z1 > m_z1sq);
        assert!(m_z1sq > m_z0);
        assert!(m_z0 > Monomial::unit());
    }

    #[test]
    fn arithmetic_and_cancellation() {
        let p = &(&z(0) + &z(1)) * &(&z(0) - &z(1));
        let q = &z(0).pow(2) - &z(1).pow(2);
        assert_eq!(p, q);
        assert!((&p - &q).is_zero());
    }

    #[test]
    fn exact_division() {
        let p = &(&z(0) + &MultiPoly::one()) * &(&z(0).pow(2) + &z(1).scale(&rat(3, 2)));
        let q = p.div_exact(&(&z(0) + &MultiPoly::one())).unwrap();
        assert_eq!(q, &z(0).pow(2) + &z(1).scale(&rat(3, 2)));
        assert!(p.div_exact(&(&z(0) + &z(1))).is_none());
    }

    #[test]
    fn derivative_and_substitution() {
        // d/dz0 (z0^3 z1) = 3 z0^2 z1
        let p = &z(0).pow(3) * &z(1);
        assert_eq!(p.derivative(Var::z(0)), (&z(0).pow(2) * &z(1)).scale(&rat_int(3)));
        // substitute z0 := z1 + 1 into z0^2 - 1
        let s = (&z(0).pow(2) - &MultiPoly::one()).subst_poly(Var::z(0), &(&z(1) + &MultiPoly::one()));
        assert_eq!(s, &z(1).pow(2) + &z(1).scale(&rat_int(2)));
    }

    #[test]
    fn fraction_substitution_clears_denominator() {
        // (z0^2 + 1) with z0 := a/b gives (a^2 + b^2) / b^2
        let p = &z(0).pow(2) + &MultiPoly::one();
        let (num, den) = p.subst_fraction(Var::z(0), &z(1), &z(2));
        assert_eq!(num, &z(1).pow(2) + &z(2).pow(2));
        assert_eq!(den, z(2).pow(2));
    }
}
