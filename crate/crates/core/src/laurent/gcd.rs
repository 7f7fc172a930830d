//! gcd in `Z[z_1, ..., z_m]` by recursion on the variables: contents and
//! primitive parts with respect to a main variable, and a primitive
//! pseudo-remainder sequence for the univariate step.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use super::modgcd::modular_gcd;
use super::Laurent;

/// gcd of two polynomials (nonnegative exponents), with positive leading
/// coefficient. `gcd(0, 0) = 0`.
pub fn poly_gcd(a: &Laurent, b: &Laurent) -> Laurent {
    debug_assert!(a.is_polynomial() && b.is_polynomial());
    normalize_sign(gcd_rec(a, b, true))
}

/// The same gcd by pseudo-remainder sequences only; slow, kept as a reference.
pub fn poly_gcd_prs(a: &Laurent, b: &Laurent) -> Laurent {
    debug_assert!(a.is_polynomial() && b.is_polynomial());
    normalize_sign(gcd_rec(a, b, false))
}

fn normalize_sign(p: Laurent) -> Laurent {
    match p.leading() {
        Some((_, c)) if c.is_negative() => -&p,
        _ => p,
    }
}

fn gcd_rec(a: &Laurent, b: &Laurent, modular: bool) -> Laurent {
    let n = a.nvars();
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return Laurent::constant(n, a.content().gcd(&b.content()));
    }
    // Strip monomial factors; the gcd picks up the componentwise minimum.
    let (la, lb) = (a.min_exponents(), b.min_exponents());
    let common: Vec<i64> = la.iter().zip(&lb).map(|(x, y)| *x.min(y)).collect();
    let neg = |v: &[i64]| v.iter().map(|x| -x).collect::<Vec<_>>();
    let a = a.shift(&neg(&la));
    let b = b.shift(&neg(&lb));
    let core = gcd_stripped(&a, &b, modular);
    core.shift(&common)
}

/// Both inputs nonzero and not divisible by any variable.
fn gcd_stripped(a: &Laurent, b: &Laurent, modular: bool) -> Laurent {
    let n = a.nvars();
    if a.is_constant() || b.is_constant() {
        return Laurent::constant(n, a.content().gcd(&b.content()));
    }
    if a == b {
        return a.clone();
    }
    // one side often divides the other, e.g. a denominator and its pullback
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let cs = small.content();
    let prim = small.div_int(&cs);
    if large.div_exact(&prim).is_some() {
        return prim.scale(&cs.gcd(&large.content()));
    }
    if modular {
        let (ca, cb) = (a.content(), b.content());
        if let Some(g) = modular_gcd(&a.div_int(&ca), &b.div_int(&cb)) {
            return g.scale(&ca.gcd(&cb));
        }
    }
    let var = (0..n)
        .find(|&v| a.terms().any(|(m, _)| m.0[v] != 0) || b.terms().any(|(m, _)| m.0[v] != 0))
        .expect("non-constant input has a variable");
    let in_a = a.terms().any(|(m, _)| m.0[var] != 0);
    let in_b = b.terms().any(|(m, _)| m.0[var] != 0);
    if !in_a {
        return gcd_rec(a, &content_in(b, var), modular);
    }
    if !in_b {
        return gcd_rec(&content_in(a, var), b, modular);
    }
    let ca = content_in(a, var);
    let cb = content_in(b, var);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let c = gcd_rec(&ca, &cb, modular);
    let g = primitive_prs(&pa, &pb, var);
    &c * &g
}

/// Coefficients of `p` as a polynomial in `var` (index = degree in `var`).
fn coefficients_in(p: &Laurent, var: usize) -> Vec<Laurent> {
    let n = p.nvars();
    let deg = p.terms().map(|(m, _)| m.0[var]).max().unwrap_or(0) as usize;
    let mut coeffs: Vec<Vec<(Vec<i64>, BigInt)>> = vec![Vec::new(); deg + 1];
    for (m, c) in p.terms() {
        let d = m.0[var] as usize;
        let mut e = m.0.clone();
        e[var] = 0;
        coeffs[d].push((e, c.clone()));
    }
    coeffs.into_iter().map(|t| Laurent::from_terms(n, t)).collect()
}

fn from_coefficients(coeffs: &[Laurent], var: usize, n: usize) -> Laurent {
    let mut out = Laurent::zero(n);
    for (d, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut shift = vec![0; n];
        shift[var] = d as i64;
        out = &out + &c.shift(&shift);
    }
    out
}

/// gcd of the coefficients of `p` viewed as a polynomial in `var`.
fn content_in(p: &Laurent, var: usize) -> Laurent {
    let mut g = Laurent::zero(p.nvars());
    for c in coefficients_in(p, var) {
        if c.is_zero() {
            continue;
        }
        g = gcd_rec(&g, &c, false);
        if g.is_constant() && g.content().is_one() {
            break;
        }
    }
    normalize_sign(g)
}

fn primitive_part(p: &Laurent, var: usize) -> Laurent {
    let c = content_in(p, var);
    normalize_sign(p.div_exact(&c).expect("content divides"))
}

fn degree_in(coeffs: &[Laurent]) -> Option<usize> {
    coeffs.iter().rposition(|c| !c.is_zero())
}

/// Pseudo-remainder of `a` by `b` in `var`, coefficientwise representation.
fn prem(a: &[Laurent], b: &[Laurent]) -> Vec<Laurent> {
    let db = degree_in(b).expect("nonzero divisor");
    let lb = &b[db];
    let mut r: Vec<Laurent> = a.to_vec();
    while let Some(dr) = degree_in(&r) {
        if dr < db {
            break;
        }
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = &*c * lb;
        }
        for (i, bc) in b.iter().enumerate() {
            if bc.is_zero() {
                continue;
            }
            r[i + shift] = &r[i + shift] - &(&lr * bc);
        }
        r.truncate(dr);
    }
    r
}

/// gcd of two polynomials that are primitive with respect to `var`.
fn primitive_prs(a: &Laurent, b: &Laurent, var: usize) -> Laurent {
    let n = a.nvars();
    let mut x = coefficients_in(a, var);
    let mut y = coefficients_in(b, var);
    if degree_in(&x) < degree_in(&y) {
        std::mem::swap(&mut x, &mut y);
    }
    loop {
        let r = prem(&x, &y);
        match degree_in(&r) {
            None => return primitive_part(&from_coefficients(&y, var, n), var),
            Some(0) => return Laurent::one(n),
            Some(_) => {
                let rp = primitive_part(&from_coefficients(&r, var, n), var);
                x = y;
                y = coefficients_in(&rp, var);
            }
        }
    }
}
