//! Exact Laurent expansion of rational functions at rational points and `oo`.

use super::poly::MultiPoly;
use super::ratfunc::{AlgebraError, Point, RatFunc};
use super::vars::{Var, SHIFT};

/// A truncated Laurent expansion of a rational function in one variable.
///
/// `coeffs[i]` is the coefficient of `t^(lowest + i)` where `t` is the local
/// parameter: `var - center` at a finite center, `1/var` at `oo`. All
/// coefficients live in the remaining variables. The window always covers
/// `lowest ..= trunc`, and the leading stored coefficient is nonzero unless
/// the function vanishes identically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    pub var: Var,
    pub center: Point,
    pub lowest: i64,
    pub trunc: i64,
    pub coeffs: Vec<RatFunc>,
}

impl LaurentSeries {
    pub fn coeff(&self, k: i64) -> RatFunc {
        if k < self.lowest || k > self.trunc {
            return RatFunc::zero();
        }
        self.coeffs[(k - self.lowest) as usize].clone()
    }

    pub fn is_zero_window(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// True valuation on the window, if any coefficient is nonzero.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.lowest + i as i64)
    }

    /// Re-sum the window as a rational function of `var`.
    pub fn resum(&self) -> RatFunc {
        let local: RatFunc = match &self.center {
            Point::Finite(c) => &RatFunc::var(self.var) - c,
            Point::Infinity => RatFunc::var(self.var).recip().expect("1/var"),
        };
        let mut acc = RatFunc::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = self.lowest + i as i64;
            acc = &acc + &(c * &local.pow(k).expect("power of local parameter"));
        }
        acc
    }
}

/// Expand `f` in `var` around `center` through order `order` (inclusive).
///
/// At `oo` the substitution `var -> 1/w` is used with no Jacobian; callers
/// expanding differentials apply `dz = -dw/w^2` themselves.
pub fn laurent_expand(
    f: &RatFunc,
    var: Var,
    center: &Point,
    order: i64,
) -> Result<LaurentSeries, AlgebraError> {
    if f.is_zero() {
        return Ok(LaurentSeries {
            var,
            center: center.clone(),
            lowest: order,
            trunc: order,
            coeffs: vec![RatFunc::zero()],
        });
    }
    // Move the expansion point to t = 0: var := center + t, or var := 1/t.
    let t = SHIFT;
    assert!(
        !f.contains_var(t),
        "expansion input already uses the internal shift variable"
    );
    let (num_t, den_t) = match center {
        Point::Finite(c) => {
            if c.contains_var(var) {
                return Err(AlgebraError::UnsupportedPoint(format!(
                    "center depends on the expansion variable {var}"
                )));
            }
            let shifted = &RatFunc::var(t) + c;
            let g = f.subst(var, &shifted).expect("affine shift cannot hit a pole locus");
            (g.num().clone(), g.den().clone())
        }
        Point::Infinity => {
            let inv = RatFunc::var(t).recip().expect("1/t");
            let g = f.subst(var, &inv).expect("inversion cannot hit a pole locus");
            (g.num().clone(), g.den().clone())
        }
    };

    let series = expand_shifted(&num_t, &den_t, t, order)?;
    Ok(LaurentSeries {
        var,
        center: center.clone(),
        lowest: series.0,
        trunc: order,
        coeffs: series.1,
    })
}

/// Series coefficients of `num/den` in `t` through `order`; returns
/// `(lowest, coeffs)`.
///
/// The inversion runs at the polynomial level over a common denominator
/// `b0^(m+1)` (where `b0` is the unit constant term of the stripped
/// denominator); each output coefficient does a single rational reduction.
pub(crate) fn expand_shifted(
    num: &MultiPoly,
    den: &MultiPoly,
    t: Var,
    order: i64,
) -> Result<(i64, Vec<RatFunc>), AlgebraError> {
    let val_num = num.valuation_in(t) as i64;
    let val_den = den.valuation_in(t) as i64;
    let lowest = val_num - val_den;
    if lowest > order {
        return Ok((order, vec![RatFunc::zero()]));
    }
    let n_terms = (order - lowest + 1) as usize;

    // Strip the valuations so both series start at t^0 with nonzero constant.
    let shift_down = |p: &MultiPoly, v: i64| -> Vec<MultiPoly> {
        let coeffs = p.coeffs_in(t);
        coeffs[v as usize..].to_vec()
    };
    let a = shift_down(num, val_num);
    let b = shift_down(den, val_den);

    // Invert b as a power series with fully reduced rational-function
    // coefficients: c_0 = 1/b_0, c_m = -(1/b_0) sum_{k>=1} b_k c_{m-k}.
    // Keeping every coefficient reduced is what stops expression swell.
    let b0_inv = RatFunc::from_poly(b[0].clone()).recip().expect("unit constant term");
    let mut inv: Vec<RatFunc> = Vec::with_capacity(n_terms);
    inv.push(b0_inv.clone());
    for m in 1..n_terms {
        let mut s = RatFunc::zero();
        for k in 1..=m.min(b.len() - 1) {
            if b[k].is_zero() {
                continue;
            }
            s = &s + &(&RatFunc::from_poly(b[k].clone()) * &inv[m - k]);
        }
        inv.push(-&(&b0_inv * &s));
    }

    let mut out: Vec<RatFunc> = Vec::with_capacity(n_terms);
    for m in 0..n_terms {
        let mut s = RatFunc::zero();
        for k in 0..=m.min(a.len() - 1) {
            if a[k].is_zero() {
                continue;
            }
            s = &s + &(&RatFunc::from_poly(a[k].clone()) * &inv[m - k]);
        }
        out.push(s);
    }
    Ok((lowest, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::num::{rat_int, Rat};

    fn z() -> RatFunc {
        RatFunc::var(Var::z(0))
    }

    /// Long-division oracle for series of num/den at 0 in one variable with
    /// rational coefficients: returns coefficients of t^lowest.. up to order.
    fn long_division_oracle(num: &[i64], den: &[i64], order: i64) -> (i64, Vec<Rat>) {
        let val = |v: &[i64]| v.iter().position(|c| *c != 0).expect("nonzero") as i64;
        let (vn, vd) = (val(num), val(den));
        let lowest = vn - vd;
        let a: Vec<Rat> = num[vn as usize..].iter().map(|&c| rat_int(c)).collect();
        let b: Vec<Rat> = den[vd as usize..].iter().map(|&c| rat_int(c)).collect();
        let n = (order - lowest + 1).max(0) as usize;
        let mut q: Vec<Rat> = Vec::new();
        let mut rem = a;
        rem.resize(rem.len().max(n + b.len()), rat_int(0));
        for m in 0..n {
            let c = rem[m].clone() / &b[0];
            for (k, bk) in b.iter().enumerate() {
                if m + k < rem.len() {
                    let t = rem[m + k].clone() - &c * bk;
                    rem[m + k] = t;
                }
            }
            q.push(c);
        }
        (lowest, q)
    }

    #[test]
    fn expansion_matches_long_division_oracle() {
        // 1/(z(1-z)) at 0 through order 1: oracle gives z^-1 + 1 + z.
        let (lowest, coeffs) = long_division_oracle(&[1], &[0, 1, -1], 1);
        assert_eq!(lowest, -1);
        assert_eq!(coeffs, vec![rat_int(1), rat_int(1), rat_int(1)]);

        let f = &RatFunc::one() / &(&z() * &(&RatFunc::one() - &z()));
        let s = laurent_expand(&f, Var::z(0), &Point::int(0), 1).unwrap();
        assert_eq!(s.lowest, -1);
        assert_eq!(
            s.coeffs,
            vec![RatFunc::one(), RatFunc::one(), RatFunc::one()]
        );
    }

    #[test]
    fn monomial_at_shifted_center() {
        // 1/(z-2)^2 at 2 is already the Laurent monomial t^-2.
        let f = (&z() - &RatFunc::constant(rat_int(2))).pow(-2).unwrap();
        let s = laurent_expand(&f, Var::z(0), &Point::int(2), -2).unwrap();
        assert_eq!(s.lowest, -2);
        assert_eq!(s.coeffs, vec![RatFunc::one()]);
    }

    #[test]
    fn expansion_at_infinity() {
        // (z^2+1)/(z(z-1)) at oo in w = 1/z: (1+w^2)/(1-w), oracle-checked.
        let (lowest, coeffs) = long_division_oracle(&[1, 0, 1], &[1, -1], 3);
        assert_eq!(lowest, 0);
        assert_eq!(coeffs, vec![rat_int(1), rat_int(1), rat_int(2), rat_int(2)]);

        let f = &(&z().pow(2).unwrap() + &RatFunc::one())
            / &(&z() * &(&z() - &RatFunc::one()));
        let s = laurent_expand(&f, Var::z(0), &Point::Infinity, 3).unwrap();
        assert_eq!(s.lowest, 0);
        let want: Vec<RatFunc> = coeffs.into_iter().map(RatFunc::constant).collect();
        assert_eq!(s.coeffs, want);
    }

    #[test]
    fn resum_and_subtract_vanishes_on_window() {
        // Window re-summation: f - resum has zero expansion through trunc.
        let f = &(&z().pow(3).unwrap() + &RatFunc::constant(rat_int(5)))
            / &(&z().pow(2).unwrap() * &(&z() - &RatFunc::constant(rat_int(3))));
        let s = laurent_expand(&f, Var::z(0), &Point::int(0), 4).unwrap();
        let diff = &f - &s.resum();
        let s2 = laurent_expand(&diff, Var::z(0), &Point::int(0), 4).unwrap();
        assert!(s2.is_zero_window());
    }

    #[test]
    fn symbolic_center_expansion() {
        // 1/(z0 - z1) at z0 = z1 has a plain simple pole with coefficient 1.
        let f = (&z() - &RatFunc::var(Var::z(1))).recip().unwrap();
        let center = Point::Finite(RatFunc::var(Var::z(1)));
        let s = laurent_expand(&f, Var::z(0), &center, 0).unwrap();
        assert_eq!(s.lowest, -1);
        assert_eq!(s.coeff(-1), RatFunc::one());
        assert_eq!(s.coeff(0), RatFunc::zero());
    }
}
