//! Multivariate polynomial GCD.
//!
//! Strategy: a rational specialization probe settles coprime pairs with one
//! univariate Euclid; otherwise the heuristic evaluation gcd (integer
//! substitution + balanced xi-adic lifting, verified by exact division)
//! extracts the common factor, falling back to a primitive pseudo-remainder
//! sequence if the heuristic keeps missing.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::num::Rat;
use super::poly::MultiPoly;
use super::vars::Var;

/// Monic gcd. `gcd(0, 0) = 0`; nonzero constants count as units, so any
/// result without variables is `1`.
pub fn poly_gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() {
        return normalize(b);
    }
    if b.is_zero() {
        return normalize(a);
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one();
    }
    let common: Vec<Var> = a
        .variables()
        .into_iter()
        .filter(|v| b.contains_var(*v))
        .collect();
    if common.is_empty() {
        return MultiPoly::one();
    }

    let debug = std::env::var_os("REFREC_GCD_TRACE").is_some();
    let t0 = if debug { Some(std::time::Instant::now()) } else { None };
    let mut ia = to_integer(a);
    let mut ib = to_integer(b);
    if let Some(t) = &t0 {
        let _ = t;
        eprintln!(
            "[gcd] terms {}x{} deg {}x{} bits {}x{}",
            ia.num_terms(),
            ib.num_terms(),
            ia.total_degree(),
            ib.total_degree(),
            max_abs_coeff(&ia).bits(),
            max_abs_coeff(&ib).bits()
        );
    }
    let mut acc = MultiPoly::one();
    loop {
        let live: Vec<Var> = common
            .iter()
            .copied()
            .filter(|&v| ia.contains_var(v) && ib.contains_var(v))
            .collect();
        if live.is_empty() || live.iter().all(|&v| probe_says_coprime(&ia, &ib, v)) {
            return normalize(&acc);
        }
        match gcd_heuristic(&ia, &ib, &live) {
            Some(g) if !g.is_constant() => {
                ia = ia.div_exact(&g).expect("verified divisor");
                ib = ib.div_exact(&g).expect("verified divisor");
                acc = &acc * &g;
            }
            other => {
                // Heuristic missed; finish with the pseudo-remainder path.
                if debug {
                    eprintln!(
                        "[gcd->prs] heu={:?} terms {}x{} deg {}x{} bits {}x{}",
                        other.map(|g| g.num_terms()),
                        ia.num_terms(),
                        ib.num_terms(),
                        ia.total_degree(),
                        ib.total_degree(),
                        max_abs_coeff(&ia).bits(),
                        max_abs_coeff(&ib).bits()
                    );
                    if ia.num_terms() + ib.num_terms() < 12 {
                        eprintln!("[gcd->prs] A = {ia}");
                        eprintln!("[gcd->prs] B = {ib}");
                    }
                }
                let rest = gcd_via_prs(&ia, &ib);
                return normalize(&(&acc * &rest));
            }
        }
    }
}

/// Reduce the fraction `s / base^pw` to lowest terms without ever expanding
/// the full power: gcds run against the small `base` only. Returns the
/// reduced numerator and the expanded reduced denominator.
pub fn reduce_against_power(
    mut s: MultiPoly,
    base: &MultiPoly,
    mut pw: u32,
) -> (MultiPoly, MultiPoly) {
    let mut den = MultiPoly::one();
    if let Some(c) = base.as_constant() {
        let mut scale = Rat::one();
        for _ in 0..pw {
            scale = scale * &c;
        }
        return (s.map_coeffs(|x| x / &scale), MultiPoly::one());
    }
    while pw > 0 {
        // Whole copies first: cheap exact divisions.
        if let Some(q) = s.div_exact(base) {
            s = q;
            pw -= 1;
            continue;
        }
        let g = poly_gcd(&s, base);
        if g.is_one() {
            break;
        }
        s = s.div_exact(&g).expect("gcd divides");
        den = &den * &base.div_exact(&g).expect("gcd divides");
        pw -= 1;
    }
    for _ in 0..pw {
        den = &den * base;
    }
    (s, den)
}

pub fn poly_gcd_many(polys: &[MultiPoly]) -> MultiPoly {
    let mut g = MultiPoly::zero();
    for p in polys {
        if p.is_zero() {
            continue;
        }
        g = poly_gcd(&g, p);
        if g.is_one() {
            return g;
        }
    }
    normalize(&g)
}

/// Content of `p` with respect to `v` (gcd of the `v`-coefficients) and the
/// primitive part `p / content`.
pub fn content_in(p: &MultiPoly, v: Var) -> (MultiPoly, MultiPoly) {
    let coeffs = p.coeffs_in(v);
    let cont = poly_gcd_many(&coeffs);
    if cont.is_zero() {
        return (MultiPoly::zero(), MultiPoly::zero());
    }
    let pp = p.div_exact(&cont).expect("content must divide");
    (cont, pp)
}

fn normalize(p: &MultiPoly) -> MultiPoly {
    if p.is_constant() && !p.is_zero() {
        return MultiPoly::one();
    }
    p.monic().0
}

/// Clear rational denominators (gcd over a field is only defined up to
/// scalars, so the scaling is irrelevant).
fn to_integer(p: &MultiPoly) -> MultiPoly {
    let mut l = BigInt::one();
    for (_, c) in p.terms() {
        l = lcm_big(&l, c.denom());
    }
    if l.is_one() {
        return p.clone();
    }
    let scale = Rat::from_integer(l);
    p.map_coeffs(|c| c * &scale)
}

fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
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

// ---------------------------------------------------------------------------
// Coprimality probe.

/// Word-size prime for modular probes.
const PROBE_P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PROBE_P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    acc
}

fn rat_mod(c: &Rat) -> Option<u64> {
    let p = num_bigint::BigInt::from(PROBE_P);
    let mut n = c.numer() % &p;
    if n.sign() == num_bigint::Sign::Minus {
        n += &p;
    }
    let mut d = c.denom() % &p;
    if d.sign() == num_bigint::Sign::Minus {
        d += &p;
    }
    let d: u64 = d.try_into().ok()?;
    if d == 0 {
        return None;
    }
    let n: u64 = n.try_into().ok()?;
    Some(mulmod(n, powmod(d, PROBE_P - 2)))
}

/// Dense coefficients of `p` in `v` with the other variables evaluated at
/// `assign`, all mod the probe prime.
fn univariate_mod(p: &MultiPoly, v: Var, assign: &dyn Fn(Var) -> u64) -> Option<Vec<u64>> {
    let mut out = vec![0u64; p.degree_in(v) as usize + 1];
    for (m, c) in p.terms() {
        let mut val = rat_mod(c)?;
        let mut e_v = 0;
        for &(w, e) in m.pairs() {
            if w == v {
                e_v = e;
            } else {
                val = mulmod(val, powmod(assign(w), e as u64));
            }
        }
        let slot = &mut out[e_v as usize];
        *slot = (*slot + val) % PROBE_P;
    }
    Some(out)
}

fn gcd_degree_mod(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    let trim = |v: &mut Vec<u64>| {
        while v.last().map_or(false, |&c| c == 0) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        let lb_inv = powmod(*b.last().unwrap(), PROBE_P - 2);
        while a.len() >= b.len() && !a.is_empty() {
            let q = mulmod(*a.last().unwrap(), lb_inv);
            let shift = a.len() - b.len();
            for (i, &c) in b.iter().enumerate() {
                let t = (a[shift + i] + PROBE_P - mulmod(q, c)) % PROBE_P;
                a[shift + i] = t;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Specialize all variables except `v` at sample residues mod a word prime
/// and test whether the univariate images are coprime. A constant image gcd
/// at ANY clean sample (leading coefficient surviving) proves the true gcd
/// is free of `v`; nontrivial images prove nothing, so every attempt gets
/// its say.
fn probe_says_coprime(a: &MultiPoly, b: &MultiPoly, v: Var) -> bool {
    let lead_a = a.coeffs_in(v).pop().unwrap();
    for attempt in 0u64..6 {
        let assign = |w: Var| -> u64 {
            let tag = match w {
                Var::Z(i) => 11 + i as u64,
                Var::RefQ => 5,
                Var::Par(i) => 201 + i as u64,
                Var::X => 3,
                Var::Tmp(i) => 401 + i as u64,
            };
            // Deterministic scattered residues, varied per attempt.
            powmod(1_000_003 + tag + 7919 * attempt, 3) | 1
        };
        let Some(la) = univariate_mod(&lead_a, v, &assign) else {
            continue;
        };
        if la.iter().all(|&c| c == 0) {
            continue; // leading coefficient vanished; unsound sample
        }
        let (Some(ua), Some(ub)) = (univariate_mod(a, v, &assign), univariate_mod(b, v, &assign))
        else {
            continue;
        };
        if gcd_degree_mod(ua, ub) == 0 {
            return true;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Heuristic gcd (integer evaluation + xi-adic reconstruction).

fn max_abs_coeff(p: &MultiPoly) -> BigInt {
    let mut m = BigInt::one();
    for (_, c) in p.terms() {
        let a = c.numer().abs();
        if a > m {
            m = a;
        }
    }
    m
}

/// Integer-coefficient gcd over the variables in `vars` (must cover every
/// variable of both inputs that matters). `None` when the heuristic fails.
///
/// The recursion returns RAW xi-adic reconstructions: the integer content of
/// an inner level encodes the outer digits, so primitivization and the
/// division check happen only here at the top.
fn gcd_heuristic(a: &MultiPoly, b: &MultiPoly, vars: &[Var]) -> Option<MultiPoly> {
    // Evaluate small-degree variables first: the later a variable is
    // evaluated the more its xi has compounded, so the largest degree should
    // meet the xi that has grown the least overall.
    let mut order: Vec<Var> = vars.to_vec();
    order.sort_by_key(|&v| a.degree_in(v).min(b.degree_in(v)));
    for attempt in 0..6u32 {
        if let Some(raw) = heu_try(a, b, &order, attempt) {
            let cand = integer_primitive(&raw);
            if !cand.is_zero() && a.div_exact(&cand).is_some() && b.div_exact(&cand).is_some() {
                return Some(cand);
            }
        }
    }
    None
}

fn integer_content(p: &MultiPoly) -> BigInt {
    let mut g = BigInt::zero();
    for (_, c) in p.terms() {
        g = gcd_big(&g, c.numer());
        if g.is_one() {
            break;
        }
    }
    g
}

fn heu_try(a: &MultiPoly, b: &MultiPoly, vars: &[Var], salt: u32) -> Option<MultiPoly> {
    let v = match vars.iter().find(|&&v| a.contains_var(v) || b.contains_var(v)) {
        None => {
            // No shared variables left; any remaining non-shared variables
            // only contribute through the integer content.
            return Some(MultiPoly::constant(Rat::from_integer(gcd_big(
                &integer_content(a),
                &integer_content(b),
            ))));
        }
        Some(&v) => v,
    };
    let rest: Vec<Var> = vars.iter().copied().filter(|&w| w != v).collect();
    let degree_cap = a.degree_in(v).min(b.degree_in(v));

    let bound = max_abs_coeff(a).max(max_abs_coeff(b));
    let mut xi = BigInt::from(2u32) * bound + BigInt::from(29 + 4 * salt);
    for _ in 0..salt {
        xi = &xi * BigInt::from(157u32) / BigInt::from(50u32) + BigInt::from(1u32);
    }
    if xi.bits() > 60_000 {
        // Integer sizes out of hand; let the caller fall back.
        return None;
    }
    let xi_rat = Rat::from_integer(xi.clone());
    let ga = a.eval_var(v, &xi_rat);
    let gb = b.eval_var(v, &xi_rat);
    if ga.is_zero() || gb.is_zero() {
        return None;
    }
    let gamma = heu_try(&ga, &gb, &rest, salt)?;
    lift_digits(&gamma, v, &xi, degree_cap)
}

/// Balanced xi-adic digits of `gamma`, interpreted as coefficients of `v`.
fn lift_digits(gamma: &MultiPoly, v: Var, xi: &BigInt, degree_cap: u32) -> Option<MultiPoly> {
    let mut digits: Vec<MultiPoly> = Vec::new();
    let mut g = gamma.clone();
    let half = xi / BigInt::from(2u32);
    while !g.is_zero() {
        if digits.len() as u32 > degree_cap {
            return None;
        }
        let mut digit = MultiPoly::zero();
        let mut next = MultiPoly::zero();
        for (m, c) in g.terms() {
            debug_assert!(c.denom().is_one());
            let n = c.numer();
            let mut r = n % xi;
            if r.sign() == num_bigint::Sign::Minus {
                r += xi;
            }
            if r > half {
                r -= xi;
            }
            let q = (n - &r) / xi;
            if !r.is_zero() {
                digit.add_term(m.clone(), Rat::from_integer(r));
            }
            if !q.is_zero() {
                next.add_term(m.clone(), Rat::from_integer(q));
            }
        }
        digits.push(digit);
        g = next;
    }
    if digits.is_empty() {
        return None;
    }
    let mut out = MultiPoly::zero();
    for (k, d) in digits.iter().enumerate() {
        for (m, c) in d.terms() {
            out.add_term(m.mul(&super::poly::Monomial::var(v, k as u32)), c.clone());
        }
    }
    Some(out)
}

/// Divide out the integer content and make the leading coefficient positive.
fn integer_primitive(p: &MultiPoly) -> MultiPoly {
    if p.is_zero() {
        return MultiPoly::zero();
    }
    let mut g = BigInt::zero();
    for (_, c) in p.terms() {
        g = gcd_big(&g, c.numer());
        if g.is_one() {
            break;
        }
    }
    let mut scale = Rat::from_integer(g).recip();
    if p.leading().unwrap().1.is_negative() {
        scale = -scale;
    }
    p.map_coeffs(|c| c * &scale)
}

// ---------------------------------------------------------------------------
// Pseudo-remainder fallback.

fn gcd_via_prs(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let common: Vec<Var> = a
        .variables()
        .into_iter()
        .filter(|v| b.contains_var(*v))
        .collect();
    if common.is_empty() {
        return MultiPoly::one();
    }
    let v = *common
        .iter()
        .min_by_key(|&&v| a.degree_in(v).min(b.degree_in(v)))
        .unwrap();
    let (cont_a, pp_a) = content_in(a, v);
    let (cont_b, pp_b) = content_in(b, v);
    let g_cont = poly_gcd(&cont_a, &cont_b);
    if probe_says_coprime(&pp_a, &pp_b, v) {
        return normalize(&g_cont);
    }
    let g_main = prs_gcd(&pp_a, &pp_b, v);
    normalize(&(&g_cont * &g_main))
}

/// Primitive pseudo-remainder sequence on `v`-primitive inputs.
fn prs_gcd(pa: &MultiPoly, pb: &MultiPoly, v: Var) -> MultiPoly {
    let (mut a, mut b) = if pa.degree_in(v) >= pb.degree_in(v) {
        (pa.clone(), pb.clone())
    } else {
        (pb.clone(), pa.clone())
    };
    loop {
        if b.is_zero() {
            return a;
        }
        if b.degree_in(v) == 0 {
            return MultiPoly::one();
        }
        let r = pseudo_rem(&a, &b, v);
        if r.is_zero() {
            return content_in(&b, v).1;
        }
        // Strip polynomial content AND integer content: the latter is what
        // keeps rational-coefficient remainder growth polynomial.
        let (_, rp) = content_in(&r, v);
        let rp = integer_primitive(&to_integer(&rp));
        a = b;
        b = rp;
    }
}

/// Pseudo remainder of `a` by `b` in `v`: `lc(b)^(da-db+1) * a  mod  b`.
fn pseudo_rem(a: &MultiPoly, b: &MultiPoly, v: Var) -> MultiPoly {
    let db = b.degree_in(v);
    let bc = b.coeffs_in(v);
    let lb = bc.last().unwrap().clone();
    let mut r = a.coeffs_in(v);
    while r.len() as u32 > db {
        let top = r.pop().unwrap();
        let k = r.len() as u32; // degree just removed is k
        for c in r.iter_mut() {
            *c = &*c * &lb;
        }
        if !top.is_zero() {
            let off = (k - db) as usize;
            for (i, bcoef) in bc.iter().enumerate().take(db as usize) {
                let t = &r[off + i] - &(&top * bcoef);
                r[off + i] = t;
            }
        }
        while r.last().map_or(false, |c| c.is_zero()) {
            r.pop();
        }
    }
    MultiPoly::from_coeffs_in(v, &r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::num::rat_int;

    fn z(i: usize) -> MultiPoly {
        MultiPoly::var(Var::z(i))
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let a = &z(0) + &MultiPoly::one();
        let b = &z(0) + &z(1);
        assert!(poly_gcd(&a, &b).is_one());
    }

    #[test]
    fn gcd_finds_common_factor() {
        let f = &z(0) + &z(1); // common
        let a = &f * &(&z(0) - &MultiPoly::one());
        let b = &f * &(&z(1).pow(2) + &MultiPoly::constant(rat_int(2)));
        assert_eq!(poly_gcd(&a, &b), f);
    }

    #[test]
    fn gcd_with_multiplicity_and_content() {
        let f = &z(0) - &z(1);
        let a = (&f.pow(2) * &z(1)).scale(&rat_int(6));
        let b = (&f.pow(3) * &z(1).pow(2)).scale(&rat_int(-4));
        assert_eq!(poly_gcd(&a, &b), &f.pow(2) * &z(1));
    }

    #[test]
    fn pseudo_rem_matches_euclid_univariate() {
        // (z0^2 - 1) mod (z0 - 1) = 0
        let a = &z(0).pow(2) - &MultiPoly::one();
        let b = &z(0) - &MultiPoly::one();
        assert!(pseudo_rem(&a, &b, Var::z(0)).is_zero());
        assert_eq!(poly_gcd(&a, &b), b);
    }

    #[test]
    fn heuristic_handles_many_variables() {
        // (z0 + z1 + z2 Q)(z0 - 7 z3) against (z0 + z1 + z2 Q)(z1 + z2 + 1)
        let f = &(&z(0) + &z(1)) + &(&z(2) * &MultiPoly::var(Var::RefQ));
        let a = &f * &(&z(0) - &z(3).scale(&rat_int(7)));
        let b = &f * &(&(&z(1) + &z(2)) + &MultiPoly::one());
        assert_eq!(poly_gcd(&a, &b), f.monic().0);
    }

    #[test]
    fn fractional_coefficients_are_fine() {
        let f = &z(0).scale(&crate::algebra::rat(1, 3)) + &z(1);
        let a = &f * &z(0);
        let b = &f * &z(1);
        let g = poly_gcd(&a, &b);
        // Equal up to the monic normalization.
        assert_eq!(g, f.monic().0);
    }
}
