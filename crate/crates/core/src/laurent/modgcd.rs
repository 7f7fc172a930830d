//! Modular gcd for integer polynomials: images over `Z_p` are computed by
//! evaluating the last variable and interpolating, combined over several
//! primes by CRT, and the candidate is confirmed by exact division.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Laurent;

type Exp = Vec<u32>;
type Poly = Vec<(Exp, u64)>;
type Upoly = Vec<u64>;
type Terms = [(Exp, BigInt)];

const MAX_PRIMES: usize = 64;

fn add(a: u64, b: u64, p: u64) -> u64 {
    (a + b) % p
}

fn sub(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b) % p
}

fn mul(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

fn inv(a: u64, p: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, base, p);
        }
        base = mul(base, base, p);
        e >>= 1;
    }
    acc
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Primes just below 2^31, largest first.
fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| (1u64 << 20..(1u64 << 31)).rev().filter(|&n| n % 2 == 1 && is_prime(n)).take(MAX_PRIMES).collect())
}

// univariate polynomials over Z_p, coefficient i is degree i

fn utrim(mut a: Upoly) -> Upoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn ueval(a: &[u64], x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| add(mul(acc, x, p), c, p))
}

fn umul(a: &[u64], b: &[u64], p: u64) -> Upoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add(out[i + j], mul(x, y, p), p);
        }
    }
    utrim(out)
}

fn udivrem(a: &[u64], b: &[u64], p: u64) -> (Upoly, Upoly) {
    let b = utrim(b.to_vec());
    let db = b.len() - 1;
    let li = inv(b[db], p);
    let mut r = utrim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![0; r.len() - db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let c = mul(r[dr], li, p);
        q[dr - db] = c;
        for (i, &bc) in b.iter().enumerate() {
            r[dr - db + i] = sub(r[dr - db + i], mul(c, bc, p), p);
        }
        r = utrim(r);
    }
    (utrim(q), r)
}

fn umonic(a: Upoly, p: u64) -> Upoly {
    match a.last() {
        Some(&l) => {
            let li = inv(l, p);
            a.into_iter().map(|c| mul(c, li, p)).collect()
        }
        None => a,
    }
}

fn ugcd(a: &[u64], b: &[u64], p: u64) -> Upoly {
    let (mut x, mut y) = (utrim(a.to_vec()), utrim(b.to_vec()));
    while !y.is_empty() {
        let (_, r) = udivrem(&x, &y, p);
        x = y;
        y = r;
    }
    umonic(x, p)
}

// multivariate over Z_p: terms sorted by exponent, ascending lex

fn normalize(map: BTreeMap<Exp, u64>) -> Poly {
    map.into_iter().filter(|(_, c)| *c != 0).collect()
}

fn monic(a: Poly, p: u64) -> Poly {
    match a.last() {
        Some((_, l)) => {
            let li = inv(*l, p);
            a.into_iter().map(|(e, c)| (e, mul(c, li, p))).collect()
        }
        None => a,
    }
}

fn is_constant(a: &Poly) -> bool {
    a.len() == 1 && a[0].0.iter().all(|&e| e == 0)
}

/// Splits off the last variable: main exponent -> polynomial in it.
fn y_form(a: &Poly) -> BTreeMap<Exp, Upoly> {
    let mut out: BTreeMap<Exp, Upoly> = BTreeMap::new();
    for (e, c) in a {
        let (main, y) = e.split_at(e.len() - 1);
        let slot = out.entry(main.to_vec()).or_default();
        let d = y[0] as usize;
        if slot.len() <= d {
            slot.resize(d + 1, 0);
        }
        slot[d] = *c;
    }
    out
}

fn from_y_form(f: &BTreeMap<Exp, Upoly>) -> Poly {
    let mut out = BTreeMap::new();
    for (main, u) in f {
        for (d, &c) in u.iter().enumerate() {
            if c != 0 {
                let mut e = main.clone();
                e.push(d as u32);
                out.insert(e, c);
            }
        }
    }
    normalize(out)
}

fn y_content(f: &BTreeMap<Exp, Upoly>, p: u64) -> Upoly {
    let mut g: Upoly = Vec::new();
    for u in f.values() {
        g = ugcd(&g, u, p);
        if g.len() == 1 {
            break;
        }
    }
    g
}

fn y_divide(f: &BTreeMap<Exp, Upoly>, d: &[u64], p: u64) -> BTreeMap<Exp, Upoly> {
    f.iter().map(|(e, u)| (e.clone(), udivrem(u, d, p).0)).collect()
}

fn y_eval(f: &BTreeMap<Exp, Upoly>, x: u64, p: u64) -> Poly {
    f.iter().map(|(e, u)| (e.clone(), ueval(u, x, p))).filter(|(_, c)| *c != 0).collect()
}

fn pmul(a: &Poly, b: &Poly, p: u64) -> Poly {
    let mut out: BTreeMap<Exp, u64> = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Exp = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let slot = out.entry(e).or_insert(0);
            *slot = add(*slot, mul(*ca, *cb, p), p);
        }
    }
    normalize(out)
}

/// Exact quotient `a / d` over `Z_p`, or `None`.
fn pdiv_exact(a: &Poly, d: &Poly, p: u64) -> Option<Poly> {
    let (ld, lc) = d.last()?;
    let li = inv(*lc, p);
    let mut r: BTreeMap<Exp, u64> = a.iter().cloned().collect();
    let mut q: BTreeMap<Exp, u64> = BTreeMap::new();
    while let Some((er, cr)) = r.iter().next_back().map(|(e, c)| (e.clone(), *c)) {
        if er.iter().zip(ld).any(|(x, y)| x < y) {
            return None;
        }
        let shift: Exp = er.iter().zip(ld).map(|(x, y)| x - y).collect();
        let c = mul(cr, li, p);
        for (ed, cd) in d {
            let e: Exp = ed.iter().zip(&shift).map(|(x, y)| x + y).collect();
            let slot = r.entry(e.clone()).or_insert(0);
            *slot = sub(*slot, mul(c, *cd, p), p);
            if *slot == 0 {
                r.remove(&e);
            }
        }
        q.insert(shift, c);
    }
    Some(normalize(q))
}

/// Monic gcd over `Z_p` of polynomials in `k` variables.
fn gcd_p(a: &Poly, b: &Poly, p: u64) -> Poly {
    if a.is_empty() {
        return monic(b.clone(), p);
    }
    if b.is_empty() {
        return monic(a.clone(), p);
    }
    let k = a[0].0.len();
    if k == 0 {
        return vec![(Vec::new(), 1)];
    }
    if k == 1 {
        let to_u = |x: &Poly| y_form(x).into_values().next().unwrap_or_default();
        let g = ugcd(&to_u(a), &to_u(b), p);
        return from_y_form(&BTreeMap::from([(Vec::new(), g)]));
    }
    let (fa, fb) = (y_form(a), y_form(b));
    let (ca, cb) = (y_content(&fa, p), y_content(&fb, p));
    let c = ugcd(&ca, &cb, p);
    let (fa, fb) = (y_divide(&fa, &ca, p), y_divide(&fb, &cb, p));
    let content_poly = from_y_form(&BTreeMap::from([(vec![0; k - 1], c.clone())]));
    let lca = fa.values().next_back().expect("nonzero").clone();
    let lcb = fb.values().next_back().expect("nonzero").clone();
    let gamma = ugcd(&lca, &lcb, p);
    let (pa, pb) = (from_y_form(&fa), from_y_form(&fb));

    let mut interp: BTreeMap<Exp, Upoly> = BTreeMap::new();
    let mut modulus: Upoly = vec![1];
    let mut lead: Option<Exp> = None;
    for x in 1..p {
        let g_at = ueval(&gamma, x, p);
        if g_at == 0 || ueval(&lca, x, p) == 0 || ueval(&lcb, x, p) == 0 {
            continue;
        }
        let img = gcd_p(&y_eval(&fa, x, p), &y_eval(&fb, x, p), p);
        if is_constant(&img) {
            return monic(content_poly, p);
        }
        let lm = img.last().expect("nonzero").0.clone();
        match &lead {
            Some(cur) if lm > *cur => continue,
            Some(cur) if lm < *cur => {
                interp.clear();
                modulus = vec![1];
                lead = Some(lm);
            }
            None => lead = Some(lm),
            _ => {}
        }
        // Newton step: H += (g_at * img - H(x)) / m(x) * m
        let m_at = ueval(&modulus, x, p);
        let m_inv = inv(m_at, p);
        let img_map: BTreeMap<Exp, u64> = img.into_iter().collect();
        let mut keys: Vec<Exp> = interp.keys().cloned().collect();
        keys.extend(img_map.keys().cloned());
        keys.sort();
        keys.dedup();
        let mut changed = false;
        for e in keys {
            let target = mul(img_map.get(&e).copied().unwrap_or(0), g_at, p);
            let h = interp.entry(e).or_default();
            let cur = ueval(h, x, p);
            let delta = mul(sub(target, cur, p), m_inv, p);
            if delta != 0 {
                changed = true;
                let corr: Upoly = modulus.iter().map(|&m| mul(m, delta, p)).collect();
                if h.len() < corr.len() {
                    h.resize(corr.len(), 0);
                }
                for (i, v) in corr.into_iter().enumerate() {
                    h[i] = add(h[i], v, p);
                }
                *h = utrim(std::mem::take(h));
            }
        }
        interp.retain(|_, u| !u.is_empty());
        modulus = umul(&modulus, &[sub(0, x, p), 1], p);
        if !changed {
            let cont = y_content(&interp, p);
            let cand = from_y_form(&y_divide(&interp, &cont, p));
            if pdiv_exact(&pa, &cand, p).is_some() && pdiv_exact(&pb, &cand, p).is_some() {
                return monic(pmul(&cand, &content_poly, p), p);
            }
        }
    }
    unreachable!("ran out of evaluation points")
}

fn reduce(a: &[(Exp, BigInt)], p: u64) -> Poly {
    let pb = BigInt::from(p);
    a.iter()
        .map(|(e, c)| (e.clone(), c.mod_floor(&pb).to_u64().expect("reduced")))
        .filter(|(_, c)| *c != 0)
        .collect()
}

fn symmetric(c: &BigInt, m: &BigInt, half: &BigInt) -> BigInt {
    if c > half {
        c - m
    } else {
        c.clone()
    }
}

/// gcd of two primitive polynomials, neither divisible by a variable, given
/// as compressed exponent/coefficient lists. `None` if the primes run out.
fn gcd_z(a: &Terms, b: &Terms, back: &dyn Fn(&Terms) -> Laurent, la: &Laurent, lb: &Laurent) -> Option<Laurent> {
    let lca = &a.last()?.1;
    let lcb = &b.last()?.1;
    let gamma = lca.gcd(lcb);
    let mut acc: BTreeMap<Exp, BigInt> = BTreeMap::new();
    let mut m = BigInt::one();
    let mut lead: Option<Exp> = None;
    let mut previous: Option<BTreeMap<Exp, BigInt>> = None;
    for &p in primes() {
        let pb = BigInt::from(p);
        if (lca % &pb).is_zero() || (lcb % &pb).is_zero() {
            continue;
        }
        let g = gcd_p(&reduce(a, p), &reduce(b, p), p);
        if is_constant(&g) {
            return Some(Laurent::one(la.nvars()));
        }
        let lm = g.last().expect("nonzero").0.clone();
        match &lead {
            Some(cur) if lm > *cur => continue,
            Some(cur) if lm < *cur => {
                acc.clear();
                m = BigInt::one();
                previous = None;
                lead = Some(lm);
            }
            None => lead = Some(lm),
            _ => {}
        }
        let g_at = gamma.mod_floor(&pb).to_u64().expect("reduced");
        let img: BTreeMap<Exp, u64> = g.into_iter().map(|(e, c)| (e, mul(c, g_at, p))).collect();
        // CRT: x = acc + m * ((img - acc) / m mod p)
        let m_inv = BigInt::from(inv((&m % &pb).to_u64().expect("reduced"), p));
        let mut keys: Vec<Exp> = acc.keys().cloned().collect();
        keys.extend(img.keys().cloned());
        keys.sort();
        keys.dedup();
        for e in keys {
            let cur = acc.get(&e).cloned().unwrap_or_default();
            let target = BigInt::from(img.get(&e).copied().unwrap_or(0));
            let t = ((target - &cur) * &m_inv).mod_floor(&pb);
            acc.insert(e, cur + &m * t);
        }
        m *= &pb;
        let half: BigInt = &m >> 1;
        let sym: BTreeMap<Exp, BigInt> =
            acc.iter().map(|(e, c)| (e.clone(), symmetric(c, &m, &half))).filter(|(_, c)| !c.is_zero()).collect();
        // a candidate that divides both is the gcd whatever the primes say,
        // so test it as soon as it changes
        if previous.as_ref() != Some(&sym) {
            let terms: Vec<(Exp, BigInt)> = sym.clone().into_iter().collect();
            let cand = back(&terms);
            let cont = cand.content();
            let cand = cand.div_int(&cont);
            if la.div_exact(&cand).is_some() && lb.div_exact(&cand).is_some() {
                return Some(cand);
            }
        }
        previous = Some(sym);
    }
    None
}

/// gcd of two nonzero polynomials that are primitive over `Z` and not
/// divisible by any variable. `None` means the caller should fall back.
pub(super) fn modular_gcd(a: &Laurent, b: &Laurent) -> Option<Laurent> {
    let n = a.nvars();
    let used: Vec<usize> = (0..n)
        .filter(|&v| a.terms().chain(b.terms()).any(|(m, _)| m.0[v] != 0))
        .collect();
    if used.is_empty() {
        return Some(Laurent::one(n));
    }
    let compress = |l: &Laurent| -> Vec<(Exp, BigInt)> {
        let mut t: Vec<(Exp, BigInt)> =
            l.terms().map(|(m, c)| (used.iter().map(|&v| m.0[v] as u32).collect(), c.clone())).collect();
        t.sort_by(|x, y| x.0.cmp(&y.0));
        t
    };
    let back = |t: &[(Exp, BigInt)]| -> Laurent {
        Laurent::from_terms(
            n,
            t.iter().map(|(e, c)| {
                let mut full = vec![0i64; n];
                for (i, &v) in used.iter().enumerate() {
                    full[v] = i64::from(e[i]);
                }
                (full, c.clone())
            }),
        )
    };
    let g = gcd_z(&compress(a), &compress(b), &back, a, b)?;
    Some(match g.leading() {
        Some((_, c)) if c.is_negative() => -&g,
        _ => g,
    })
}
