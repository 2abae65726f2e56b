//! Residues, partial fractions, and local antiderivatives of rational
//! differentials on the Riemann sphere.
//!
//! A differential is carried around as the coefficient `f` of `f(z) dz`; at
//! `oo` every operation works in the chart `w = 1/z` with `dz = -dw/w^2`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::gcd::reduce_against_power;
use super::num::Rat;
use super::poly::MultiPoly;
use super::ratfunc::{AlgebraError, Point, RatFunc};
use super::series::laurent_expand;
use super::vars::Var;

/// Exact residue of the differential `f dvar` at `center`.
///
/// Works at the polynomial level: with `den = L^m h`, `L` the linear factor
/// at the center, the residue is the `(m-1)`-st quotient-rule derivative
/// `N_{m-1}(c) / ((m-1)! lc^m h(c)^m)` where `N_{k+1} = N_k' h - (k+1) N_k h'`.
/// No rational-function arithmetic happens before the single final division,
/// which keeps the gcd work off the hot path.
pub fn residue_at(f: &RatFunc, var: Var, center: &Point) -> Result<RatFunc, AlgebraError> {
    let (num, den) = residue_at_raw(f, var, center)?;
    Ok(RatFunc::new(num, den))
}

/// Residue as an unreduced `(numerator, denominator)` pair. The denominator
/// is a product of evaluated pole factors, so callers summing many residues
/// can factor it over a known basis and never reduce at all.
pub fn residue_at_raw(
    f: &RatFunc,
    var: Var,
    center: &Point,
) -> Result<(MultiPoly, MultiPoly), AlgebraError> {
    match center {
        Point::Finite(c) => {
            if c.contains_var(var) {
                return Err(AlgebraError::UnsupportedPoint(format!(
                    "center depends on the residue variable {var}"
                )));
            }
            residue_finite(f.num(), f.den(), var, c)
        }
        Point::Infinity => {
            // In w = 1/z: f dz = -f(1/w)/w^2 dw; clear the chart poles.
            let dn = f.num().degree_in(var) as i64;
            let dd = f.den().degree_in(var) as i64;
            let rev = |p: &MultiPoly| -> MultiPoly {
                let rv: Vec<MultiPoly> = p.coeffs_in(var).into_iter().rev().collect();
                MultiPoly::from_coeffs_in(var, &rv)
            };
            // f(1/w) = w^(dd-dn) rev(num)/rev(den); multiply by -1/w^2.
            let shift = dd - dn - 2;
            let mut num = -&rev(f.num());
            let mut den = rev(f.den());
            if shift >= 0 {
                num = &num * &MultiPoly::var(var).pow(shift as u32);
            } else {
                den = &den * &MultiPoly::var(var).pow((-shift) as u32);
            }
            residue_finite(&num, &den, var, &RatFunc::zero())
        }
    }
}

fn factorial(n: u32) -> Rat {
    let mut acc = BigInt::one();
    for k in 2..=n as u64 {
        acc *= BigInt::from(k);
    }
    Rat::from_integer(acc)
}

fn residue_finite(
    num: &MultiPoly,
    den: &MultiPoly,
    var: Var,
    c: &RatFunc,
) -> Result<(MultiPoly, MultiPoly), AlgebraError> {
    if num.is_zero() {
        return Ok((MultiPoly::zero(), MultiPoly::one()));
    }
    let lf = linear_factor(var, c);
    let mut h = den.clone();
    let mut m: u32 = 0;
    while let Some(q) = h.div_exact(&lf) {
        h = q;
        m += 1;
    }
    if m == 0 {
        return Ok((MultiPoly::zero(), MultiPoly::one()));
    }
    let mut n = num.clone();
    if m > 1 {
        let hp = h.derivative(var);
        for k in 0..(m - 1) {
            let a = &n.derivative(var) * &h;
            let b = (&n * &hp).scale(&Rat::from_integer((k as i64 + 1).into()));
            n = &a - &b;
        }
    }
    // Evaluate at var = c; res = n(c) den_c^(m deg_h - deg_n - m) /
    // ((m-1)! h(c)^m), left unreduced: the denominator stays a product of
    // evaluated pole factors.
    let deg_n = n.degree_in(var);
    let deg_h = h.degree_in(var);
    let (n_at, _) = n.subst_fraction(var, c.num(), c.den());
    let (h_at, _) = h.subst_fraction(var, c.num(), c.den());
    if h_at.is_zero() {
        return Err(AlgebraError::UnsupportedPoint(
            "denominator cofactor vanishes at the center; multiplicity extraction failed".into(),
        ));
    }
    let denc_exp = m as i64 * deg_h as i64 - deg_n as i64 - m as i64;
    let mut s = n_at.scale(&factorial(m - 1).recip());
    let mut d = h_at.pow(m);
    if denc_exp < 0 && !c.den().is_one() {
        s = &s * &c.den().pow((-denc_exp) as u32);
    } else if denc_exp > 0 && !c.den().is_one() {
        d = &d * &c.den().pow(denc_exp as u32);
    }
    Ok((s, d))
}

/// Multiplicity of `(var - c)` in `p` (0 if `p` is zero).
pub fn root_multiplicity(p: &MultiPoly, var: Var, c: &RatFunc) -> u32 {
    if p.is_zero() {
        return 0;
    }
    let lin = linear_factor(var, c);
    let mut q = p.clone();
    let mut m = 0;
    while let Some(next) = q.div_exact(&lin) {
        q = next;
        m += 1;
    }
    m
}

/// Exact valuation of the differential `f dvar` at `center`: negative at a
/// pole, positive at a zero. At `oo` the chart Jacobian `dz = -dw/w^2`
/// shifts the plain valuation by 2. `None` for the zero function.
pub fn diff_valuation(f: &RatFunc, var: Var, center: &Point) -> Option<i64> {
    if f.is_zero() {
        return None;
    }
    match center {
        Point::Finite(c) => {
            let vn = root_multiplicity(f.num(), var, c) as i64;
            let vd = root_multiplicity(f.den(), var, c) as i64;
            Some(vn - vd)
        }
        Point::Infinity => {
            let vn = f.num().degree_in(var) as i64;
            let vd = f.den().degree_in(var) as i64;
            Some(vd - vn - 2)
        }
    }
}

/// Order of the pole of the differential `f dvar` at `center` (0 when
/// regular).
pub fn pole_order(f: &RatFunc, var: Var, center: &Point) -> i64 {
    diff_valuation(f, var, center).map_or(0, |v| (-v).max(0))
}

/// One pole of a partial-fraction decomposition: principal-part coefficients
/// `coeffs[k]` of `(var - pole)^-(order - k)` for `k = 0 .. order-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleTerm {
    pub pole: Point,
    pub order: u32,
    pub coeffs: Vec<RatFunc>,
}

/// Partial-fraction decomposition of a rational function with respect to one
/// variable: finite principal parts plus a part polynomial in `var` (which
/// absorbs the behaviour at `oo`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFractions {
    pub var: Var,
    pub poles: Vec<PoleTerm>,
    pub poly_part: RatFunc,
}

impl PartialFractions {
    /// Exact reconstruction; equals the decomposed input.
    pub fn resum(&self) -> RatFunc {
        let z = RatFunc::var(self.var);
        let mut acc = self.poly_part.clone();
        for p in &self.poles {
            let base = match &p.pole {
                Point::Finite(c) => &z - c,
                Point::Infinity => unreachable!("infinity is carried by the polynomial part"),
            };
            for (k, c) in p.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let e = -(p.order as i64) + k as i64;
                acc = &acc + &(c * &base.pow(e).expect("negative power"));
            }
        }
        acc
    }
}

/// Decompose `f` in `var`. Candidate poles are taken from `hints` plus all
/// rational roots of the denominator; any unexplained denominator factor is
/// an `UnsupportedFactorization` error.
pub fn partial_fractions(
    f: &RatFunc,
    var: Var,
    hints: &[Point],
) -> Result<PartialFractions, AlgebraError> {
    let mut den = f.den().clone();
    let mut candidates: Vec<Point> = Vec::new();
    let push_candidate = |cands: &mut Vec<Point>, p: &Point| {
        if let Point::Finite(c) = p {
            if !c.contains_var(var) && !cands.iter().any(|q| points_equal(q, p)) {
                cands.push(p.clone());
            }
        }
    };
    for h in hints {
        push_candidate(&mut candidates, h);
    }

    let mut poles: Vec<PoleTerm> = Vec::new();
    let mut remainder = f.clone();
    let mut idx = 0;
    while idx <= candidates.len() {
        if idx == candidates.len() {
            // Hints exhausted: hunt for plain rational roots in what is left
            // of the denominator, then finish.
            if den.degree_in(var) == 0 {
                break;
            }
            let extra = rational_roots_in(&den, var);
            if extra.is_empty() {
                break;
            }
            for r in extra {
                push_candidate(&mut candidates, &Point::rat(r));
            }
            if idx == candidates.len() {
                break;
            }
        }
        let cand = candidates[idx].clone();
        idx += 1;
        let c = match &cand {
            Point::Finite(c) => c.clone(),
            Point::Infinity => continue,
        };
        let mult = root_multiplicity(&den, var, &c);
        if mult == 0 {
            continue;
        }
        den = den
            .div_exact(&linear_factor(var, &c).pow(mult))
            .expect("multiplicity counts exact divisions");
        let s = laurent_expand(&remainder, var, &cand, -1)?;
        let mut coeffs = Vec::new();
        for k in (1..=mult as i64).rev() {
            coeffs.push(s.coeff(-k));
        }
        // Canonical form guarantees the top coefficient is nonzero; peel the
        // principal part off the running remainder.
        let term = PoleTerm { pole: cand, order: mult, coeffs };
        let partial = PartialFractions {
            var,
            poles: vec![term.clone()],
            poly_part: RatFunc::zero(),
        };
        remainder = &remainder - &partial.resum();
        poles.push(term);
    }

    if den.degree_in(var) > 0 {
        let (_, pp) = super::gcd::content_in(&den, var);
        return Err(AlgebraError::UnsupportedFactorization(format!(
            "denominator factor irreducible over the available points: {pp}"
        )));
    }
    if remainder.den().degree_in(var) > 0 {
        return Err(AlgebraError::UnsupportedFactorization(format!(
            "residual denominator still involves the variable: {}",
            remainder.den()
        )));
    }
    poles.sort_by(|a, b| {
        super::ratfunc::point_sort_key(&a.pole).cmp(&super::ratfunc::point_sort_key(&b.pole))
    });
    Ok(PartialFractions { var, poles, poly_part: remainder })
}

/// The polynomial `den(c)*var - num(c)` vanishing exactly at `var = c`.
pub fn linear_factor(var: Var, c: &RatFunc) -> MultiPoly {
    let v = MultiPoly::var(var);
    &(&v * c.den()) - c.num()
}

fn points_equal(a: &Point, b: &Point) -> bool {
    match (a, b) {
        (Point::Infinity, Point::Infinity) => true,
        (Point::Finite(x), Point::Finite(y)) => x == y,
        _ => false,
    }
}

/// All rational roots (over Q, ignoring parameters) of `p` in `var`.
///
/// Uses the rational-root bound on the lowest and highest nonvanishing
/// constant coefficients; roots whose coefficients involve other variables
/// are out of reach here and must come in as hints.
pub fn rational_roots_in(p: &MultiPoly, var: Var) -> Vec<Rat> {
    let coeffs = p.coeffs_in(var);
    if coeffs.len() <= 1 {
        return Vec::new();
    }
    let consts: Option<Vec<Rat>> = coeffs.iter().map(|c| c.as_constant()).collect();
    let Some(consts) = consts else {
        // Mixed coefficients: try roots of the univariate content instead.
        return Vec::new();
    };
    // Clear to integers.
    let mut denlcm = BigInt::one();
    for c in &consts {
        if !c.is_zero() {
            denlcm = lcm_big(&denlcm, c.denom());
        }
    }
    let ints: Vec<BigInt> = consts.iter().map(|c| c.numer() * (&denlcm / c.denom())).collect();
    let lo = ints.iter().position(|c| !c.is_zero());
    let hi = ints.iter().rposition(|c| !c.is_zero());
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Vec::new();
    };
    let mut roots = Vec::new();
    if lo > 0 {
        roots.push(Rat::zero());
    }
    if hi == lo {
        return roots;
    }
    let a0 = ints[lo].abs();
    let an = ints[hi].abs();
    let eval = |r: &Rat| -> bool {
        let mut acc = Rat::zero();
        for c in ints.iter().rev() {
            acc = acc * r + Rat::from_integer(c.clone());
        }
        acc.is_zero()
    };
    for p in divisors(&a0) {
        for q in divisors(&an) {
            for sign in [1i64, -1] {
                let r = Rat::new(&p * BigInt::from(sign), q.clone());
                if !roots.contains(&r) && eval(&r) {
                    roots.push(r.clone());
                }
            }
        }
    }
    roots
}

fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
    use num_bigint::Sign;
    if a.sign() == Sign::NoSign || b.sign() == Sign::NoSign {
        return BigInt::zero();
    }
    (a / gcd_big(a, b)) * b
}

fn gcd_big(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    // Divisor enumeration via trial division; root candidates stay small in
    // practice because inputs are normalized.
    let n = n.abs();
    if n.is_zero() {
        return vec![BigInt::zero()];
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    loop {
        let dsq = &d * &d;
        if dsq > n {
            break;
        }
        if (&n % &d).is_zero() {
            small.push(d.clone());
            let q = &n / &d;
            if q != d {
                large.push(q);
            }
        }
        d += 1;
        // Guard against pathological inputs; factors beyond this bound do not
        // appear for the distinguished points the engine manipulates.
        if d > BigInt::from(1_000_000u64) {
            break;
        }
    }
    large.reverse();
    small.extend(large);
    small
}

/// Local antiderivative at `center`: a Laurent polynomial germ `F` with
/// `dF = f dvar` modulo terms of order above `order`. Requires vanishing
/// residue at the center.
pub fn local_antiderivative(
    f: &RatFunc,
    var: Var,
    center: &Point,
    order: i64,
) -> Result<RatFunc, AlgebraError> {
    match center {
        Point::Finite(c) => {
            // Expand far enough that the residue obstruction is in-window
            // even when only deep principal parts were requested.
            let s = laurent_expand(f, var, center, (order - 1).max(-1))?;
            if !s.coeff(-1).is_zero() {
                return Err(AlgebraError::NoRationalPrimitive(format!(
                    "residue {} at {}",
                    s.coeff(-1),
                    c
                )));
            }
            let local = &RatFunc::var(var) - c;
            let mut acc = RatFunc::zero();
            for (i, coeff) in s.coeffs.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                let k = s.lowest + i as i64;
                debug_assert!(k != -1);
                let anti = coeff.scale(&Rat::new(BigInt::one(), BigInt::from(k + 1)));
                acc = &acc + &(&anti * &local.pow(k + 1).expect("power"));
            }
            Ok(acc)
        }
        Point::Infinity => {
            // In w = 1/z: f(1/w) (-1/w^2) dw; antidifferentiate in w, then
            // return in the z chart. The germ order is in w, so the plain
            // expansion of f is needed two coefficients deeper (and at least
            // far enough to witness the residue obstruction).
            let w_expr = laurent_expand(f, var, &Point::Infinity, (order + 2).max(1))?;
            // g(w) = -f(1/w)/w^2 has coefficients g_k = -coeff_{k+2}(f at oo).
            if !w_expr.coeff(1).is_zero() {
                return Err(AlgebraError::NoRationalPrimitive(format!(
                    "residue {} at oo",
                    -&w_expr.coeff(1)
                )));
            }
            let zinv = RatFunc::var(var).recip().expect("1/z");
            let mut acc = RatFunc::zero();
            for (i, coeff) in w_expr.coeffs.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                let k = w_expr.lowest + i as i64 - 2; // order in g
                if k == -1 {
                    continue; // excluded above
                }
                let anti = -&coeff.scale(&Rat::new(BigInt::one(), BigInt::from(k + 1)));
                acc = &acc + &(&anti * &zinv.pow(k + 1).expect("power"));
            }
            Ok(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::num::{rat, rat_int};

    fn z() -> RatFunc {
        RatFunc::var(Var::z(0))
    }

    fn c(n: i64) -> RatFunc {
        RatFunc::constant(rat_int(n))
    }

    #[test]
    fn defining_residue() {
        // dz/z at 0 -> 1
        let f = z().recip().unwrap();
        assert_eq!(residue_at(&f, Var::z(0), &Point::int(0)).unwrap(), RatFunc::one());
    }

    #[test]
    fn no_simple_pole_part() {
        // dz/(z-2)^2 at 2 -> 0
        let f = (&z() - &c(2)).pow(-2).unwrap();
        assert!(residue_at(&f, Var::z(0), &Point::int(2)).unwrap().is_zero());
    }

    #[test]
    fn residue_at_infinity_balances_total() {
        // ((z^2+1)/(z(z-1))) dz: residues at 0 and 1 are -1 and 2; the
        // genus-zero total-residue theorem forces -1 at oo.
        let f = &(&z().pow(2).unwrap() + &RatFunc::one()) / &(&z() * &(&z() - &RatFunc::one()));
        let r0 = residue_at(&f, Var::z(0), &Point::int(0)).unwrap();
        let r1 = residue_at(&f, Var::z(0), &Point::int(1)).unwrap();
        let roo = residue_at(&f, Var::z(0), &Point::Infinity).unwrap();
        assert_eq!(r0, -&RatFunc::one());
        assert_eq!(r1, c(2));
        assert!((&(&r0 + &r1) + &roo).is_zero());
        assert_eq!(roo, -&RatFunc::one());
    }

    #[test]
    fn partial_fractions_clears_denominators() {
        // 1/(z^2-1) = (1/2)/(z-1) - (1/2)/(z+1)
        let f = (&z().pow(2).unwrap() - &RatFunc::one()).recip().unwrap();
        let pf = partial_fractions(&f, Var::z(0), &[]).unwrap();
        assert!(pf.poly_part.is_zero());
        assert_eq!(pf.poles.len(), 2);
        let at = |v: i64| {
            pf.poles
                .iter()
                .find(|p| p.pole == Point::int(v))
                .expect("pole present")
                .clone()
        };
        assert_eq!(at(1).coeffs, vec![RatFunc::constant(rat(1, 2))]);
        assert_eq!(at(-1).coeffs, vec![RatFunc::constant(rat(-1, 2))]);
        assert_eq!(pf.resum(), f);
    }

    #[test]
    fn polynomial_input_has_no_poles() {
        let f = z().pow(2).unwrap();
        let pf = partial_fractions(&f, Var::z(0), &[]).unwrap();
        assert!(pf.poles.is_empty());
        assert_eq!(pf.poly_part, f);
    }

    #[test]
    fn irreducible_quadratic_is_unsupported() {
        let f = (&z().pow(2).unwrap() + &RatFunc::one()).recip().unwrap();
        match partial_fractions(&f, Var::z(0), &[]) {
            Err(AlgebraError::UnsupportedFactorization(_)) => {}
            other => panic!("expected unsupported factorization, got {other:?}"),
        }
    }

    #[test]
    fn antiderivative_power_rule() {
        // dz/z^2 -> -1/z
        let f = z().pow(-2).unwrap();
        let g = local_antiderivative(&f, Var::z(0), &Point::int(0), 0).unwrap();
        assert_eq!(g, -&z().recip().unwrap());
    }

    #[test]
    fn log_obstruction_is_an_error() {
        let f = z().recip().unwrap();
        match local_antiderivative(&f, Var::z(0), &Point::int(0), 0) {
            Err(AlgebraError::NoRationalPrimitive(_)) => {}
            other => panic!("expected log obstruction, got {other:?}"),
        }
    }

    #[test]
    fn antiderivative_differentiates_back() {
        // (1/z^3 + 3) dz -> -1/(2 z^2) + 3 z, and d/dz returns the input.
        let f = &z().pow(-3).unwrap() + &c(3);
        let g = local_antiderivative(&f, Var::z(0), &Point::int(0), 1).unwrap();
        let expect = &(-&(&c(1) / &(&c(2) * &z().pow(2).unwrap())))
            + &(&c(3) * &z());
        assert_eq!(g, expect);
        assert_eq!(g.derivative(Var::z(0)), f);
    }

    #[test]
    fn rational_roots_found() {
        // (z - 3)(2z + 1) z
        let p = (&(&z() - &c(3)) * &(&(&c(2) * &z()) + &c(1))).num().clone();
        let p = &p * &MultiPoly::var(Var::z(0));
        let mut roots = rational_roots_in(&p, Var::z(0));
        roots.sort();
        assert_eq!(roots, vec![rat(-1, 2), rat_int(0), rat_int(3)]);
    }
}
