//! Univariate polynomial arithmetic and factorization over finite fields,
//! sized for the Meataxe and centroid splitting (degrees stay small).
//! Polynomials are little-endian coefficient vectors.

use crate::field::{Field, Rng, Scalar};

pub fn trim(f: &Field, p: &mut Vec<Scalar>) {
    while p.last().map_or(false, |c| f.is_zero(c)) {
        p.pop();
    }
}

pub fn is_zero(p: &[Scalar]) -> bool {
    p.is_empty()
}

pub fn degree(p: &[Scalar]) -> usize {
    p.len().saturating_sub(1)
}

pub fn monic(f: &Field, p: &[Scalar]) -> Vec<Scalar> {
    let mut p = p.to_vec();
    trim(f, &mut p);
    if p.is_empty() {
        return p;
    }
    let inv = f.inv(p.last().unwrap()).unwrap();
    for c in p.iter_mut() {
        *c = f.mul(c, &inv);
    }
    p
}

pub fn mul(f: &Field, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    let mut out = out;
    trim(f, &mut out);
    out
}

/// Remainder of a modulo b (b nonzero).
pub fn rem(f: &Field, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let b = monic(f, b);
    let mut r = a.to_vec();
    trim(f, &mut r);
    let db = b.len() - 1;
    while r.len() > db {
        let lead = r.last().unwrap().clone();
        let shift = r.len() - 1 - db;
        if !f.is_zero(&lead) {
            for i in 0..=db {
                let v = f.sub(&r[shift + i], &f.mul(&lead, &b[i]));
                r[shift + i] = v;
            }
        }
        r.pop();
        trim(f, &mut r);
        if r.len() <= db {
            break;
        }
    }
    r
}

pub fn gcd(f: &Field, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let mut a = monic(f, a);
    let mut b = monic(f, b);
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = monic(f, &r);
    }
    monic(f, &a)
}

pub fn derivative(f: &Field, p: &[Scalar]) -> Vec<Scalar> {
    let mut out = Vec::with_capacity(p.len().saturating_sub(1));
    for (i, c) in p.iter().enumerate().skip(1) {
        out.push(f.mul(&f.from_int(i as i64), c));
    }
    trim(f, &mut out);
    out
}

fn pow_mod(f: &Field, base: &[Scalar], mut e: u64, m: &[Scalar]) -> Vec<Scalar> {
    let mut acc = vec![f.one()];
    let mut b = rem(f, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(f, &mul(f, &acc, &b), m);
        }
        b = rem(f, &mul(f, &b, &b), m);
        e >>= 1;
    }
    acc
}

/// p-th root of a polynomial with only p-th power terms (perfect field).
fn pth_root(f: &Field, p: &[Scalar]) -> Vec<Scalar> {
    let ch = f.characteristic();
    let q = f.size().unwrap();
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < p.len() {
        // coefficient root: c^(q/p) is the p-th root in GF(q)
        out.push(f.pow(&p[i], q / ch));
        i += ch as usize;
    }
    let mut out = out;
    trim(f, &mut out);
    out
}

/// Monic irreducible factors with multiplicities, over a finite field.
pub fn factor(f: &Field, poly: &[Scalar], rng: &mut Rng) -> Vec<(Vec<Scalar>, usize)> {
    assert!(f.size().is_some(), "factorization over finite fields only");
    let mut out: Vec<(Vec<Scalar>, usize)> = Vec::new();
    factor_rec(f, &monic(f, poly), 1, rng, &mut out);
    out.sort_by(|a, b| (a.0.len(), format_key(f, &a.0)).cmp(&(b.0.len(), format_key(f, &b.0))));
    out
}

fn format_key(f: &Field, p: &[Scalar]) -> Vec<String> {
    p.iter().map(|c| f.scalar_to_string(c)).collect()
}

fn factor_rec(
    f: &Field,
    poly: &[Scalar],
    mult: usize,
    rng: &mut Rng,
    out: &mut Vec<(Vec<Scalar>, usize)>,
) {
    if degree(poly) == 0 {
        return;
    }
    let d = derivative(f, poly);
    if is_zero(&d) {
        // poly = g(x^p)
        let root = pth_root(f, poly);
        factor_rec(f, &root, mult * f.characteristic() as usize, rng, out);
        return;
    }
    let g = gcd(f, poly, &d);
    if degree(&g) > 0 {
        // squarefree part and repeated part
        let sqfree = quotient(f, poly, &g);
        squarefree_factor(f, &sqfree, mult, rng, out);
        // remaining factors of g each gain one more multiplicity in poly
        // handle by recursing on g and merging
        let mut inner: Vec<(Vec<Scalar>, usize)> = Vec::new();
        factor_rec(f, &g, mult, rng, &mut inner);
        for (fac, m) in inner {
            merge(out, fac, m);
        }
        // fix multiplicities: factors of sqfree already counted once; the
        // merge above adds the extra copies from g
        return;
    }
    squarefree_factor(f, poly, mult, rng, out);
}

fn merge(out: &mut Vec<(Vec<Scalar>, usize)>, fac: Vec<Scalar>, m: usize) {
    for (g, gm) in out.iter_mut() {
        if *g == fac {
            *gm += m;
            return;
        }
    }
    out.push((fac, m));
}

fn quotient(f: &Field, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    // exact division
    let b = monic(f, b);
    let mut r = a.to_vec();
    trim(f, &mut r);
    let db = b.len() - 1;
    let mut q = vec![f.zero(); r.len().saturating_sub(db)];
    while r.len() > db {
        let lead = r.last().unwrap().clone();
        let shift = r.len() - 1 - db;
        q[shift] = lead.clone();
        if !f.is_zero(&lead) {
            for i in 0..=db {
                let v = f.sub(&r[shift + i], &f.mul(&lead, &b[i]));
                r[shift + i] = v;
            }
        }
        r.pop();
        trim(f, &mut r);
    }
    q
}

/// Distinct-degree then equal-degree (Cantor–Zassenhaus) on squarefree input.
fn squarefree_factor(
    f: &Field,
    poly: &[Scalar],
    mult: usize,
    rng: &mut Rng,
    out: &mut Vec<(Vec<Scalar>, usize)>,
) {
    let q = f.size().unwrap();
    let mut rest = monic(f, poly);
    let x = vec![f.zero(), f.one()];
    let mut xq = x.clone(); // x^(q^d) mod rest, updated per degree
    let mut d = 0usize;
    while degree(&rest) > 0 {
        d += 1;
        if (degree(&rest)) < 2 * d {
            // rest itself is irreducible
            merge(out, rest.clone(), mult);
            return;
        }
        xq = pow_mod(f, &xq, q, &rest);
        // gcd(x^(q^d) - x, rest) = product of degree-d factors
        let mut diff = xq.clone();
        while diff.len() < 2 {
            diff.push(f.zero());
        }
        diff[1] = f.sub(&diff[1], &f.one());
        let mut diff = diff;
        trim(f, &mut diff);
        let g = gcd(f, &diff, &rest);
        if degree(&g) > 0 {
            equal_degree(f, &g, d, mult, rng, out);
            rest = quotient(f, &rest, &g);
            xq = rem(f, &xq, &rest);
        }
    }
}

fn equal_degree(
    f: &Field,
    poly: &[Scalar],
    d: usize,
    mult: usize,
    rng: &mut Rng,
    out: &mut Vec<(Vec<Scalar>, usize)>,
) {
    if degree(poly) == d {
        merge(out, monic(f, poly), mult);
        return;
    }
    let q = f.size().unwrap();
    loop {
        // random polynomial of degree < deg(poly)
        let mut r: Vec<Scalar> = (0..degree(poly)).map(|_| f.random_scalar(rng)).collect();
        trim(f, &mut r);
        if degree(&r) == 0 {
            continue;
        }
        let g0 = gcd(f, &r, poly);
        let g = if degree(&g0) > 0 {
            g0
        } else if f.characteristic() == 2 {
            // trace map: r + r² + r⁴ + ... over GF(2^(k·d))
            let k = f.extension_degree();
            let steps = k as usize * d;
            let mut acc = r.clone();
            let mut cur = r.clone();
            for _ in 1..steps {
                cur = rem(f, &mul(f, &cur, &cur), poly);
                acc = add(f, &acc, &cur);
            }
            gcd(f, &acc, poly)
        } else {
            // r^((q^d - 1)/2) - 1
            let e = (q.pow(d as u32) - 1) / 2;
            let mut t = pow_mod(f, &r, e, poly);
            if t.is_empty() {
                t.push(f.zero());
            }
            t[0] = f.sub(&t[0], &f.one());
            let mut t = t;
            trim(f, &mut t);
            gcd(f, &t, poly)
        };
        if degree(&g) > 0 && degree(&g) < degree(poly) {
            equal_degree(f, &g, d, mult, rng, out);
            equal_degree(f, &quotient(f, poly, &g), d, mult, rng, out);
            return;
        }
    }
}

pub fn add(f: &Field, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(|| f.zero());
        let y = b.get(i).cloned().unwrap_or_else(|| f.zero());
        out.push(f.add(&x, &y));
    }
    trim(f, &mut out);
    out
}

pub fn eval(f: &Field, p: &[Scalar], x: &Scalar) -> Scalar {
    let mut acc = f.zero();
    for c in p.iter().rev() {
        acc = f.add(&f.mul(&acc, x), c);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_ints(f: &Field, v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&c| f.from_int(c)).collect()
    }

    #[test]
    fn factor_product_of_linears() {
        let f = Field::finite(5, 1).unwrap();
        // (x-1)(x-2)² = x³ - 5x² + 8x - 4 ≡ x³ + 3x + 1 mod 5
        let p1 = from_ints(&f, &[-1, 1]);
        let p2 = from_ints(&f, &[-2, 1]);
        let poly = mul(&f, &p1, &mul(&f, &p2, &p2));
        let mut rng = Rng::from_seed(1);
        let facs = factor(&f, &poly, &mut rng);
        assert_eq!(facs.len(), 2);
        let total: usize = facs.iter().map(|(g, m)| degree(g) * m).sum();
        assert_eq!(total, 3);
        for (g, m) in &facs {
            assert_eq!(degree(g), 1);
            assert!(*m == 1 || *m == 2);
        }
    }

    #[test]
    fn factor_irreducible_quadratic_gf2() {
        let f = Field::finite(2, 1).unwrap();
        let poly = from_ints(&f, &[1, 1, 1]); // x²+x+1
        let mut rng = Rng::from_seed(2);
        let facs = factor(&f, &poly, &mut rng);
        assert_eq!(facs.len(), 1);
        assert_eq!(degree(&facs[0].0), 2);
        assert_eq!(facs[0].1, 1);
    }

    #[test]
    fn factor_random_products_roundtrip() {
        let mut rng = Rng::from_seed(3);
        for spec in ["2", "3", "2^2", "3^2", "2^3"] {
            let f = Field::parse(spec).unwrap();
            for _ in 0..25 {
                // random monic poly of degree 4..6
                let d = 4 + rng.below(3);
                let mut poly: Vec<Scalar> = (0..d).map(|_| f.random_scalar(&mut rng)).collect();
                poly.push(f.one());
                let facs = factor(&f, &poly, &mut rng);
                // reassemble
                let mut prod = vec![f.one()];
                for (g, m) in &facs {
                    for _ in 0..*m {
                        prod = mul(&f, &prod, g);
                    }
                }
                assert_eq!(monic(&f, &poly), prod, "field {spec}");
            }
        }
    }

    #[test]
    fn factor_frobenius_power_gf4() {
        let f = Field::finite(2, 2).unwrap();
        // (x + g)² = x² + g² has zero derivative
        let g = f.element(2);
        let lin = vec![g.clone(), f.one()];
        let poly = mul(&f, &lin, &lin);
        let mut rng = Rng::from_seed(4);
        let facs = factor(&f, &poly, &mut rng);
        assert_eq!(facs.len(), 1);
        assert_eq!(facs[0].1, 2);
        assert_eq!(facs[0].0, lin);
    }
}
