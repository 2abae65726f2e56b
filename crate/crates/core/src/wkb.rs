//! WKB coefficients of the Q-top tower and the associated quantum curve.
//!
//! `S_k = varpi_{(k+1)/2,1}/dx` satisfies
//! `sum_{i+j=k-2} S_i S_j + (d/dx) S_{k-2} = Q_k` with every `Q_k` invariant
//! under the sheet involution, hence a rational function of the base
//! coordinate. The module computes both sides from independent routes (the
//! tower on the left, the defining expressions on the right), certifies the
//! residual and the invariance, and performs the exact descent to the base.

use crate::algebra::num::rat_int;
use crate::algebra::{MultiPoly, RatFunc, Var};
use crate::curve::{eta_point, SpectralCurve};
use crate::diff::Flavor;
use crate::recursion::{hat_r, EngineError, RecursionStore};
use crate::validator::CheckReport;

const Z: Var = Var::Z(0);

/// The list `S_{-1}, S_0, ..., S_{kmax}` with the two-route `Q_k` data.
#[derive(Clone, Debug)]
pub struct WkbCoefficients {
    pub kmax: u32,
    /// `s[i]` holds `S_{i-1}` as a rational function of `z`.
    pub s: Vec<RatFunc>,
    /// `q[k]` holds `Q_k` (the left-hand sums; equal to the defining
    /// expressions once the residual reports pass).
    pub q: Vec<RatFunc>,
    pub reports: Vec<CheckReport>,
}

/// `(d/dx) f = f' / x'`.
fn d_over_dx(curve: &SpectralCurve, f: &RatFunc) -> RatFunc {
    &f.derivative(Z) / &curve.dx
}

/// The defining expression for `Q_k`, independent of the WKB sums:
/// discriminant data at `k = 0`, the `mu`-weighted eta sum at `k = 1`, and
/// `2 w01 hat-R^{qtop}_{k/2,1} / dx^2` beyond.
fn q_defining(
    store: &RecursionStore,
    k: u32,
    s_m1: &RatFunc,
) -> Result<Option<RatFunc>, EngineError> {
    let curve = &store.curve;
    match k {
        0 => match &curve.relation {
            Some([a, b, c]) => {
                let ax = a.subst(Var::X, &curve.x)?;
                let bx = b.subst(Var::X, &curve.x)?;
                let cx = c.subst(Var::X, &curve.x)?;
                let disc = &(&bx * &bx) - &(&(&ax * &cx).scale(&rat_int(4)));
                Ok(Some(&disc / &(&ax * &ax).scale(&rat_int(4))))
            }
            // No defining polynomial supplied: S_{-1}^2 is the only route.
            None => Ok(Some(s_m1 * s_m1)),
        },
        1 => {
            let mut eta_sum = RatFunc::zero();
            for (p, mu) in &store.ram.ptilde_plus {
                let eta = eta_point(curve, p, Z).map_err(EngineError::Curve)?;
                eta_sum = &eta_sum + &(mu * &eta);
            }
            let dx2 = &curve.dx * &curve.dx;
            Ok(Some(&(&store.unstable.omega01 * &eta_sum) / &dx2))
        }
        _ => {
            let r_hat = hat_r(store, k, 1, Flavor::QTop)?;
            let dx2 = &curve.dx * &curve.dx;
            let q = &(&store.unstable.omega01.scale(&rat_int(2)) * &r_hat) / &dx2;
            Ok(Some(q))
        }
    }
}

/// Compute `S_{-1}..S_kmax` and certify the WKB relation and sigma-invariance
/// for every `k <= kmax`.
pub fn wkb_coefficients(store: &RecursionStore, kmax: u32) -> Result<WkbCoefficients, EngineError> {
    let curve = &store.curve;
    let mut s: Vec<RatFunc> = Vec::with_capacity(kmax as usize + 2);
    for k in -1..=(kmax as i64) {
        let two_g = (k + 1) as u32;
        let varpi = store.omega(two_g, 1, Flavor::QTop)?;
        s.push(&varpi.expr / &curve.dx);
    }
    let s_at = |k: i64| -> RatFunc {
        if k < -1 {
            RatFunc::zero()
        } else {
            s[(k + 1) as usize].clone()
        }
    };

    let mut q = Vec::with_capacity(kmax as usize + 1);
    let mut reports = Vec::new();
    for k in 0..=kmax {
        let mut lhs = RatFunc::zero();
        for i in -1..=(k as i64 - 1) {
            let j = k as i64 - 2 - i;
            if j < -1 {
                continue;
            }
            lhs = &lhs + &(&s_at(i) * &s_at(j));
        }
        let ds = s_at(k as i64 - 2);
        if !ds.is_zero() {
            lhs = &lhs + &d_over_dx(curve, &ds);
        }

        if let Some(def) = q_defining(store, k, &s_at(-1))? {
            let residual = &lhs - &def;
            reports.push(CheckReport::on_identity("wkb-residual", k, 1, residual));
        }
        let inv_residual = &curve.pullback_fn(&lhs, Z) - &lhs;
        reports.push(CheckReport::on_identity("wkb-invariance", k, 1, inv_residual));
        q.push(lhs);
    }
    Ok(WkbCoefficients { kmax, s, q, reports })
}

/// The Q-top quantum curve: `Dy^2 - sum_l eps^l Qbar_l(x)` with each
/// `Qbar_l` rational in the base coordinate.
#[derive(Clone, Debug)]
pub struct QuantumCurve {
    /// `q_bar[l]` is the coefficient of `eps^l`, in `Var::X`.
    pub q_bar: Vec<RatFunc>,
}

impl QuantumCurve {
    /// One-line rendering of the operator.
    pub fn render(&self, params: Option<&crate::algebra::ParamTable>) -> String {
        let mut out = String::from("Dy^2");
        for (l, q) in self.q_bar.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let body = crate::algebra::ratfunc_to_string(q, params);
            if l == 0 {
                out.push_str(&format!(" - ({body})"));
            } else {
                out.push_str(&format!(" - eps^{l}*({body})"));
            }
        }
        out
    }
}

/// Rewrite a sigma-invariant rational function of `z` as a rational function
/// of `x(z)`, exactly: set up `A(x(z)) f_den(z) = f_num(z) B(x(z))` as a
/// linear system for the coefficients of `A, B`, solve, and verify the lift.
pub fn descend_to_base(curve: &SpectralCurve, f: &RatFunc) -> Result<RatFunc, EngineError> {
    if let Some(c) = f.as_constant() {
        return Ok(RatFunc::constant(c));
    }
    let p = curve.x.num();
    let s = curve.x.den();
    let deg_f = f.num().degree_in(Z).max(f.den().degree_in(Z));
    let d_bound = (deg_f as usize) / 2 + 1;

    // Powers of P and S up to the bound.
    let mut p_pow = vec![MultiPoly::one()];
    let mut s_pow = vec![MultiPoly::one()];
    for i in 1..=d_bound {
        p_pow.push(&p_pow[i - 1] * p);
        s_pow.push(&s_pow[i - 1] * s);
    }
    // Column polynomials: a_i multiplies P^i S^(d-i) f_den, b_j multiplies
    // -f_num P^j S^(d-j).
    let mut columns: Vec<MultiPoly> = Vec::new();
    for i in 0..=d_bound {
        columns.push(&(&p_pow[i] * &s_pow[d_bound - i]) * f.den());
    }
    for j in 0..=d_bound {
        columns.push(-&(&(&p_pow[j] * &s_pow[d_bound - j]) * f.num()));
    }

    // Assemble the homogeneous system: one row per power of z.
    let max_deg = columns.iter().map(|c| c.degree_in(Z)).max().unwrap_or(0) as usize;
    let ncols = columns.len();
    let mut rows: Vec<Vec<RatFunc>> = vec![vec![RatFunc::zero(); ncols]; max_deg + 1];
    for (cidx, col) in columns.iter().enumerate() {
        for (e, coeff) in col.coeffs_in(Z).into_iter().enumerate() {
            if !coeff.is_zero() {
                rows[e][cidx] = RatFunc::from_poly(coeff);
            }
        }
    }

    // Gaussian elimination; free columns parametrize the nullspace.
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = rows[r][c].recip().expect("pivot nonzero");
        for cc in c..ncols {
            rows[r][cc] = &rows[r][cc] * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c].clone();
                for cc in c..ncols {
                    let t = &rows[i][cc] - &(&factor * &rows[r][cc]);
                    rows[i][cc] = t;
                }
            }
        }
        pivot_of_col[c] = Some(r);
        r += 1;
        if r == rows.len() {
            break;
        }
    }

    // Try each free column as the seed of a nullspace vector until one gives
    // a nonzero denominator and a verified lift.
    for free in 0..ncols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut sol = vec![RatFunc::zero(); ncols];
        sol[free] = RatFunc::one();
        for c in 0..ncols {
            if let Some(pr) = pivot_of_col[c] {
                sol[c] = -&rows[pr][free];
            }
        }
        // Clear parameter denominators so every entry is polynomial.
        let mut lcm = MultiPoly::one();
        for c in &sol {
            if !c.is_zero() {
                let g = crate::algebra::gcd::poly_gcd(&lcm, c.den());
                lcm = &lcm * &c.den().div_exact(&g).unwrap();
            }
        }
        let clear = RatFunc::from_poly(lcm);
        let scaled: Vec<MultiPoly> = sol
            .iter()
            .map(|c| {
                let v = c * &clear;
                debug_assert!(v.is_poly());
                v.num().clone()
            })
            .collect();
        let mut a = MultiPoly::zero();
        let mut b = MultiPoly::zero();
        for i in 0..=d_bound {
            for (m, coeff) in scaled[i].terms() {
                a.add_term(m.mul(&crate::algebra::Monomial::var(Var::X, i as u32)), coeff.clone());
            }
            for (m, coeff) in scaled[d_bound + 1 + i].terms() {
                b.add_term(m.mul(&crate::algebra::Monomial::var(Var::X, i as u32)), coeff.clone());
            }
        }
        if b.is_zero() {
            continue;
        }
        let candidate = RatFunc::new(a, b);
        let lifted = candidate.subst(Var::X, &curve.x)?;
        if &lifted == f {
            return Ok(candidate);
        }
    }
    Err(EngineError::BadRequest(
        "descent to the base failed; the input is not a function of x".into(),
    ))
}

/// Descend every `Q_k` through `kmax` and assemble the operator.
pub fn emit_quantum_curve(store: &RecursionStore, kmax: u32) -> Result<QuantumCurve, EngineError> {
    let wkb = wkb_coefficients(store, kmax)?;
    for r in &wkb.reports {
        if !r.pass {
            return Err(EngineError::InvariantViolation {
                two_g: r.two_g,
                arity: r.arity,
                flavor: Flavor::QTop,
                what: format!("{r}"),
            });
        }
    }
    let mut q_bar = Vec::with_capacity(wkb.q.len());
    for qk in &wkb.q {
        q_bar.push(descend_to_base(&store.curve, qk)?);
    }
    Ok(QuantumCurve { q_bar })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_expr, ExprNames};
    use crate::testcurves::{airy_store, appendix_store};
    use crate::algebra::{rat, rat_int as ri};

    fn ex(s: &str) -> RatFunc {
        let names = ExprNames { coord: Some("z"), params: None, allow_geometry: true };
        parse_expr(s, 1, &names).unwrap()
    }

    #[test]
    fn airy_wkb_tower() {
        let store = airy_store();
        let wkb = wkb_coefficients(&store, 4).unwrap();
        // S_{-1} = (1/2) Delta y = z, so S_{-1}^2 = z^2 = Q_0 = x.
        assert_eq!(wkb.s[0], ex("z"));
        assert_eq!(wkb.q[0], ex("z^2"));
        // Ptilde is empty: Q_1 = 0, and every higher Q_k vanishes too.
        for k in 1..=4 {
            assert!(wkb.q[k].is_zero(), "Q_{k} nonzero");
        }
        for r in &wkb.reports {
            assert!(r.pass, "{r}");
        }
    }

    #[test]
    fn airy_quantum_curve_is_dy2_minus_x() {
        let store = airy_store();
        let qc = emit_quantum_curve(&store, 2).unwrap();
        assert_eq!(qc.q_bar[0], RatFunc::var(Var::X));
        assert!(qc.q_bar[1].is_zero());
        assert!(qc.q_bar[2].is_zero());
        assert_eq!(qc.render(None), "Dy^2 - (x)");
    }

    #[test]
    fn descent_round_trip() {
        let store = airy_store();
        // z^4 + 3 z^2 is x^2 + 3x under x = z^2.
        let f = ex("z^4 + 3*z^2");
        let d = descend_to_base(&store.curve, &f).unwrap();
        let names = ExprNames { coord: None, params: None, allow_geometry: true };
        assert_eq!(d, parse_expr("x^2 + 3*x", 1, &names).unwrap());
        // 1/(z^2 - 5) descends too.
        let f = ex("1/(z^2 - 5)");
        let d = descend_to_base(&store.curve, &f).unwrap();
        assert_eq!(d, parse_expr("1/(x - 5)", 1, &names).unwrap());
        // Odd functions do not descend.
        assert!(descend_to_base(&store.curve, &ex("z^3")).is_err());
    }

    #[test]
    fn appendix_q0_matches_defining_polynomial() {
        // lam0 = 2/3, rho = 3 gives lam_inf = -10/9; Qbar_0(x) must equal
        // (x^2 + 4 lam_inf x + 4 lam0^2)/(4 x^2).
        let store = appendix_store(rat(2, 3), ri(3), Some((rat(3, 5), rat(-7, 4))));
        let qc = emit_quantum_curve(&store, 1).unwrap();
        let names = ExprNames { coord: None, params: None, allow_geometry: true };
        let expect = parse_expr("(x^2 + 4*(-10/9)*x + 4*(2/3)^2)/(4*x^2)", 1, &names).unwrap();
        assert_eq!(qc.q_bar[0], expect);
        // Qbar_1 is the descent of w01 (mu0 eta^1 + muP eta^rho)/dx^2.
        assert!(!qc.q_bar[1].is_zero());
    }
}
