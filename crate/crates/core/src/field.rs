//! Exact scalar arithmetic over the rationals and over finite fields GF(p^k).
//!
//! Finite fields are represented by an index encoding: an element is a number
//! in `0..q` whose base-p digits are the coefficients of its polynomial
//! representative modulo a fixed irreducible polynomial. All arithmetic for
//! fields of size up to `TABLE_LIMIT` is backed by precomputed tables, which
//! keeps the dense linear algebra fast.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Largest field size for which full multiplication/addition tables are built.
const TABLE_LIMIT: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    NotPrime(u64),
    BadSpec(String),
    DivisionByZero,
    FieldMismatch,
    WrongCharacteristic,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::NotPrime(p) => write!(f, "{p} is not prime"),
            FieldError::BadSpec(s) => write!(f, "bad field spec `{s}`"),
            FieldError::DivisionByZero => write!(f, "division by zero"),
            FieldError::FieldMismatch => write!(f, "scalars belong to different fields"),
            FieldError::WrongCharacteristic => write!(f, "operation requires characteristic 2"),
        }
    }
}

impl std::error::Error for FieldError {}

/// An element of a [`Field`]. Canonical by construction: rationals are kept
/// reduced by `BigRational`, finite-field elements are indices in `0..q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    F(u64),
}

impl Scalar {
    pub fn from_int(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
}

#[derive(Debug)]
struct FiniteTables {
    add: Vec<u32>,
    mul: Vec<u32>,
    inv: Vec<u32>,
    neg: Vec<u32>,
}

#[derive(Debug)]
enum FieldInner {
    Rationals,
    Finite {
        p: u64,
        k: u32,
        q: u64,
        /// Coefficients of the modulus polynomial, degree k, monic,
        /// lexicographically least irreducible over GF(p).
        modulus: Vec<u64>,
        tables: Option<FiniteTables>,
    },
}

/// An exact field: ℚ or GF(p^k). Cheap to clone.
#[derive(Clone)]
pub struct Field {
    inner: Arc<FieldInner>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.spec_string())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        match (&*self.inner, &*other.inner) {
            (FieldInner::Rationals, FieldInner::Rationals) => true,
            (
                FieldInner::Finite { p, k, .. },
                FieldInner::Finite { p: p2, k: k2, .. },
            ) => p == p2 && k == k2,
            _ => false,
        }
    }
}

impl Eq for Field {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Polynomial arithmetic over GF(p) on little-endian coefficient vectors.
mod polys {
    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(&mut out);
        out
    }

    /// Remainder of `a` modulo the monic polynomial `m`.
    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r: Vec<u64> = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        while r.len() > dm {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - dm;
            for i in 0..=dm {
                let idx = shift + i;
                let sub = (lead * m[i]) % p;
                r[idx] = (r[idx] + p * p - sub) % p;
            }
            trim(&mut r);
        }
        r
    }
}

/// Decode element index to coefficient vector (little-endian, length k).
fn decode(mut idx: u64, p: u64, k: u32) -> Vec<u64> {
    let mut out = Vec::with_capacity(k as usize);
    for _ in 0..k {
        out.push(idx % p);
        idx /= p;
    }
    out
}

fn encode(coeffs: &[u64], p: u64, k: u32) -> u64 {
    let mut idx = 0u64;
    for i in (0..k as usize).rev() {
        idx = idx * p + coeffs.get(i).copied().unwrap_or(0);
    }
    idx
}

/// Multiply two elements given as indices, reducing by the modulus.
fn raw_mul(a: u64, b: u64, p: u64, k: u32, modulus: &[u64]) -> u64 {
    if k == 1 {
        return (a * b) % p;
    }
    let pa = decode(a, p, k);
    let pb = decode(b, p, k);
    let prod = polys::mul(&pa, &pb, p);
    let red = polys::rem(&prod, modulus, p);
    encode(&red, p, k)
}

fn raw_add(a: u64, b: u64, p: u64, k: u32) -> u64 {
    if k == 1 {
        return (a + b) % p;
    }
    let pa = decode(a, p, k);
    let pb = decode(b, p, k);
    let sum: Vec<u64> = (0..k as usize).map(|i| (pa[i] + pb[i]) % p).collect();
    encode(&sum, p, k)
}

fn raw_neg(a: u64, p: u64, k: u32) -> u64 {
    if k == 1 {
        return (p - a) % p;
    }
    let pa = decode(a, p, k);
    let neg: Vec<u64> = pa.iter().map(|&c| (p - c) % p).collect();
    encode(&neg, p, k)
}

fn raw_pow(mut base: u64, mut e: u64, p: u64, k: u32, modulus: &[u64]) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = raw_mul(acc, base, p, k, modulus);
        }
        base = raw_mul(base, base, p, k, modulus);
        e >>= 1;
    }
    acc
}

/// The lexicographically least monic irreducible polynomial of degree k over
/// GF(p), compared as little-endian index order. Irreducibility is tested by
/// checking that the polynomial has no root pattern via gcd-free powering:
/// x^(p^k) ≡ x and x^(p^(k/ℓ)) ≢ x for prime divisors ℓ of k.
fn find_modulus(p: u64, k: u32) -> Vec<u64> {
    if k == 1 {
        return vec![0, 1];
    }
    let prime_divs: Vec<u32> = (2..=k).filter(|d| k % d == 0 && is_prime(*d as u64)).collect();
    let pk_low = p.pow(k); // number of monic degree-k candidates
    for low in 0..pk_low {
        let mut m = decode(low, p, k);
        m.push(1); // monic of degree k
        if !irreducible(&m, p, k, &prime_divs) {
            continue;
        }
        return m;
    }
    unreachable!("an irreducible polynomial of degree {k} over GF({p}) exists");
}

fn irreducible(m: &[u64], p: u64, k: u32, prime_divs: &[u32]) -> bool {
    // x^(p^k) mod m must equal x
    let x = vec![0, 1];
    let mut f = x.clone();
    for _ in 0..k {
        f = poly_pow_p(&f, p, m);
    }
    if f != polys::rem(&x, m, p) {
        return false;
    }
    // for each prime divisor ℓ of k: gcd(x^(p^(k/ℓ)) - x, m) must be 1
    for &l in prime_divs {
        let e = k / l;
        let mut g = x.clone();
        for _ in 0..e {
            g = poly_pow_p(&g, p, m);
        }
        // g - x
        let mut diff = g;
        while diff.len() < 2 {
            diff.push(0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        polys::trim(&mut diff);
        if !poly_gcd_is_one(&diff, m, p) {
            return false;
        }
    }
    true
}

/// Raise a polynomial to the p-th power modulo m (Frobenius step).
fn poly_pow_p(f: &[u64], p: u64, m: &[u64]) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut base = f.to_vec();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = polys::rem(&polys::mul(&acc, &base, p), m, p);
        }
        base = polys::rem(&polys::mul(&base, &base, p), m, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd_is_one(a: &[u64], b: &[u64], p: u64) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    polys::trim(&mut a);
    polys::trim(&mut b);
    while !b.is_empty() {
        // make b monic for rem
        let lead = *b.last().unwrap();
        let inv = mod_inv(lead, p);
        let monic: Vec<u64> = b.iter().map(|&c| (c * inv) % p).collect();
        let r = polys::rem(&a, &monic, p);
        a = b;
        b = r;
    }
    a.len() == 1
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a != 0
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

impl Field {
    pub fn rationals() -> Field {
        Field { inner: Arc::new(FieldInner::Rationals) }
    }

    pub fn finite(p: u64, k: u32) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 {
            return Err(FieldError::BadSpec(format!("{p}^0")));
        }
        let q = p.checked_pow(k).filter(|&q| q <= u32::MAX as u64).ok_or_else(|| {
            FieldError::BadSpec(format!("{p}^{k} too large"))
        })?;
        let modulus = find_modulus(p, k);
        let tables = (q <= TABLE_LIMIT).then(|| {
            let mut add = vec![0u32; (q * q) as usize];
            let mut mul = vec![0u32; (q * q) as usize];
            let mut inv = vec![0u32; q as usize];
            let mut neg = vec![0u32; q as usize];
            for a in 0..q {
                neg[a as usize] = raw_neg(a, p, k) as u32;
                for b in 0..q {
                    add[(a * q + b) as usize] = raw_add(a, b, p, k) as u32;
                    mul[(a * q + b) as usize] = raw_mul(a, b, p, k, &modulus) as u32;
                }
            }
            for a in 1..q {
                inv[a as usize] = raw_pow(a, q - 2, p, k, &modulus) as u32;
            }
            FiniteTables { add, mul, inv, neg }
        });
        Ok(Field { inner: Arc::new(FieldInner::Finite { p, k, q, modulus, tables }) })
    }

    /// Parse a field spec: `Q`, a prime `p`, or `p^k`.
    pub fn parse(spec: &str) -> Result<Field, FieldError> {
        let s = spec.trim();
        if s == "Q" || s == "q" {
            return Ok(Field::rationals());
        }
        let (p, k) = match s.split_once('^') {
            Some((p, k)) => (
                p.parse::<u64>().map_err(|_| FieldError::BadSpec(s.into()))?,
                k.parse::<u32>().map_err(|_| FieldError::BadSpec(s.into()))?,
            ),
            None => (s.parse::<u64>().map_err(|_| FieldError::BadSpec(s.into()))?, 1),
        };
        Field::finite(p, k)
    }

    pub fn spec_string(&self) -> String {
        match &*self.inner {
            FieldInner::Rationals => "Q".into(),
            FieldInner::Finite { p, k, .. } => {
                if *k == 1 {
                    format!("{p}")
                } else {
                    format!("{p}^{k}")
                }
            }
        }
    }

    pub fn characteristic(&self) -> u64 {
        match &*self.inner {
            FieldInner::Rationals => 0,
            FieldInner::Finite { p, .. } => *p,
        }
    }

    pub fn is_rationals(&self) -> bool {
        matches!(&*self.inner, FieldInner::Rationals)
    }

    /// Field size, or None for ℚ.
    pub fn size(&self) -> Option<u64> {
        match &*self.inner {
            FieldInner::Rationals => None,
            FieldInner::Finite { q, .. } => Some(*q),
        }
    }

    pub fn extension_degree(&self) -> u32 {
        match &*self.inner {
            FieldInner::Rationals => 1,
            FieldInner::Finite { k, .. } => *k,
        }
    }

    pub fn modulus(&self) -> Option<&[u64]> {
        match &*self.inner {
            FieldInner::Rationals => None,
            FieldInner::Finite { modulus, .. } => Some(modulus),
        }
    }

    pub fn zero(&self) -> Scalar {
        match &*self.inner {
            FieldInner::Rationals => Scalar::Q(BigRational::zero()),
            FieldInner::Finite { .. } => Scalar::F(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match &*self.inner {
            FieldInner::Rationals => Scalar::Q(BigRational::one()),
            FieldInner::Finite { .. } => Scalar::F(1),
        }
    }

    /// The image of an integer in the field.
    pub fn from_int(&self, n: i64) -> Scalar {
        match &*self.inner {
            FieldInner::Rationals => Scalar::Q(Scalar::from_int(n)),
            FieldInner::Finite { p, .. } => {
                let r = n.rem_euclid(*p as i64) as u64;
                Scalar::F(r)
            }
        }
    }

    /// Element from its index (finite fields only).
    pub fn element(&self, idx: u64) -> Scalar {
        match &*self.inner {
            FieldInner::Rationals => panic!("element() on ℚ"),
            FieldInner::Finite { q, .. } => {
                assert!(idx < *q);
                Scalar::F(idx)
            }
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Q(r) => r.is_zero(),
            Scalar::F(x) => *x == 0,
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (&*self.inner, a, b) {
            (FieldInner::Rationals, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x + y),
            (FieldInner::Finite { p, k, q, tables, .. }, Scalar::F(x), Scalar::F(y)) => {
                Scalar::F(match tables {
                    Some(t) => t.add[(x * q + y) as usize] as u64,
                    None => raw_add(*x, *y, *p, *k),
                })
            }
            _ => panic!("field mismatch"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        let nb = self.neg(b);
        self.add(a, &nb)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (&*self.inner, a) {
            (FieldInner::Rationals, Scalar::Q(x)) => Scalar::Q(-x),
            (FieldInner::Finite { p, k, tables, .. }, Scalar::F(x)) => Scalar::F(match tables {
                Some(t) => t.neg[*x as usize] as u64,
                None => raw_neg(*x, *p, *k),
            }),
            _ => panic!("field mismatch"),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (&*self.inner, a, b) {
            (FieldInner::Rationals, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x * y),
            (FieldInner::Finite { p, k, q, modulus, tables }, Scalar::F(x), Scalar::F(y)) => {
                Scalar::F(match tables {
                    Some(t) => t.mul[(x * q + y) as usize] as u64,
                    None => raw_mul(*x, *y, *p, *k, modulus),
                })
            }
            _ => panic!("field mismatch"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Result<Scalar, FieldError> {
        if self.is_zero(a) {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match (&*self.inner, a) {
            (FieldInner::Rationals, Scalar::Q(x)) => Scalar::Q(x.recip()),
            (FieldInner::Finite { p, k, q, modulus, tables }, Scalar::F(x)) => {
                Scalar::F(match tables {
                    Some(t) => t.inv[*x as usize] as u64,
                    None => raw_pow(*x, *q - 2, *p, *k, modulus),
                })
            }
            _ => panic!("field mismatch"),
        })
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar, FieldError> {
        let ib = self.inv(b)?;
        Ok(self.mul(a, &ib))
    }

    pub fn pow(&self, a: &Scalar, e: u64) -> Scalar {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// All roots of x² + b·x + c in a finite field of characteristic 2,
    /// found by solving the GF(2)-linear system for the additive map
    /// x ↦ x² + b·x on the GF(2)-vector space underlying the field.
    pub fn solve_quadratic_char2(&self, b: &Scalar, c: &Scalar) -> Result<Vec<Scalar>, FieldError> {
        let q = match &*self.inner {
            FieldInner::Finite { p: 2, q, .. } => *q,
            _ => return Err(FieldError::WrongCharacteristic),
        };
        let k = self.extension_degree();
        // basis of GF(2^k) over GF(2): indices 1, 2, 4, ..., 2^(k-1)
        // columns of the linear map e ↦ e² + b·e
        let mut cols: Vec<u64> = Vec::with_capacity(k as usize);
        for i in 0..k {
            let e = Scalar::F(1u64 << i);
            let e2 = self.mul(&e, &e);
            let be = self.mul(b, &e);
            let img = self.add(&e2, &be);
            match img {
                Scalar::F(v) => cols.push(v),
                _ => unreachable!(),
            }
        }
        let target = match self.neg(c) {
            Scalar::F(v) => v,
            _ => unreachable!(),
        };
        // Solve the GF(2) system: find all selectors x (bitmask of basis
        // coefficients) with XOR of chosen columns == target.
        // Pivots are kept sorted by decreasing leading bit, leading bits
        // pairwise distinct; one pass in that order zeroes every pivot
        // position of the vector being reduced.
        let mut pivots: Vec<(u64, u64)> = Vec::new(); // (column value, selector)
        let mut kernel_sel: Vec<u64> = Vec::new();
        let reduce = |pivots: &[(u64, u64)], mut v: u64, mut s: u64| {
            for &(pv, ps) in pivots {
                let bit = 63 - pv.leading_zeros();
                if (v >> bit) & 1 == 1 {
                    v ^= pv;
                    s ^= ps;
                }
            }
            (v, s)
        };
        for (i, &cval) in cols.iter().enumerate() {
            let (v, s) = reduce(&pivots, cval, 1u64 << i);
            if v == 0 {
                kernel_sel.push(s);
            } else {
                pivots.push((v, s));
                pivots.sort_by_key(|&(pv, _)| std::cmp::Reverse(pv));
            }
        }
        let (t, sel) = reduce(&pivots, target, 0);
        if t != 0 {
            return Ok(vec![]); // no roots in this field
        }
        let mut roots: Vec<Scalar> = Vec::new();
        let mut push_root = |s: u64| {
            let val = Scalar::F(s % q);
            if !roots.contains(&val) {
                roots.push(val);
            }
        };
        push_root(sel);
        // add kernel combinations (kernel of x ↦ x²+bx has dim ≤ 1 for b ≠ 0,
        // dim 1 for b = 0 would mean Frobenius non-injective, impossible; so
        // at most 2 roots, but enumerate the kernel space to be safe)
        let kd = kernel_sel.len();
        for mask in 1..(1u64 << kd) {
            let mut s = sel;
            for (j, &ks) in kernel_sel.iter().enumerate() {
                if (mask >> j) & 1 == 1 {
                    s ^= ks;
                }
            }
            push_root(s);
        }
        roots.sort_by_key(|r| match r {
            Scalar::F(v) => *v,
            _ => 0,
        });
        Ok(roots)
    }

    /// Uniform random element (finite) or random small-height rational.
    pub fn random_scalar(&self, rng: &mut Rng) -> Scalar {
        match &*self.inner {
            FieldInner::Rationals => {
                let num = (rng.next_u64() % 21) as i64 - 10;
                let den = (rng.next_u64() % 10) as i64 + 1;
                Scalar::Q(BigRational::new(BigInt::from(num), BigInt::from(den)))
            }
            FieldInner::Finite { q, .. } => Scalar::F(rng.next_u64() % q),
        }
    }

    /// Uniform random nonzero element.
    pub fn random_nonzero(&self, rng: &mut Rng) -> Scalar {
        loop {
            let s = self.random_scalar(rng);
            if !self.is_zero(&s) {
                return s;
            }
        }
    }

    /// Every element of a finite field, in index order.
    pub fn all_elements(&self) -> Vec<Scalar> {
        match &*self.inner {
            FieldInner::Rationals => panic!("all_elements() on ℚ"),
            FieldInner::Finite { q, .. } => (0..*q).map(Scalar::F).collect(),
        }
    }

    pub fn scalar_to_string(&self, a: &Scalar) -> String {
        match a {
            Scalar::Q(r) => {
                if r.denom().is_one() {
                    format!("{}", r.numer())
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::F(x) => {
                if self.extension_degree() == 1 {
                    format!("{x}")
                } else {
                    let coeffs = decode(*x, self.characteristic(), self.extension_degree());
                    let inner: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                    format!("[{}]", inner.join(","))
                }
            }
        }
    }

    pub fn scalar_from_string(&self, s: &str) -> Result<Scalar, FieldError> {
        let s = s.trim();
        match &*self.inner {
            FieldInner::Rationals => {
                let r = match s.split_once('/') {
                    Some((n, d)) => {
                        let n: BigInt = n.parse().map_err(|_| FieldError::BadSpec(s.into()))?;
                        let d: BigInt = d.parse().map_err(|_| FieldError::BadSpec(s.into()))?;
                        if d.is_zero() {
                            return Err(FieldError::DivisionByZero);
                        }
                        BigRational::new(n, d)
                    }
                    None => {
                        let n: BigInt = s.parse().map_err(|_| FieldError::BadSpec(s.into()))?;
                        BigRational::from_integer(n)
                    }
                };
                Ok(Scalar::Q(r))
            }
            FieldInner::Finite { p, k, q, .. } => {
                if let Some(body) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
                    let mut coeffs = Vec::new();
                    for part in body.split(',') {
                        let c: i64 = part.trim().parse().map_err(|_| FieldError::BadSpec(s.into()))?;
                        coeffs.push(c.rem_euclid(*p as i64) as u64);
                    }
                    if coeffs.len() > *k as usize {
                        return Err(FieldError::BadSpec(s.into()));
                    }
                    Ok(Scalar::F(encode(&coeffs, *p, *k)))
                } else {
                    let n: i64 = s.parse().map_err(|_| FieldError::BadSpec(s.into()))?;
                    let r = n.rem_euclid(*p as i64) as u64;
                    if *k == 1 {
                        Ok(Scalar::F(r % q))
                    } else {
                        Ok(Scalar::F(r))
                    }
                }
            }
        }
    }

    /// Rational scalar as an exact integer if it is one.
    pub fn scalar_as_integer(&self, a: &Scalar) -> Option<BigInt> {
        match a {
            Scalar::Q(r) if r.denom().is_one() => Some(r.numer().clone()),
            _ => None,
        }
    }

    /// Height bound used when sampling rationals (|num| and den bounds).
    pub fn rational_height(a: &Scalar) -> Option<(BigInt, BigInt)> {
        match a {
            Scalar::Q(r) => Some((r.numer().abs(), r.denom().clone())),
            _ => None,
        }
    }
}

/// Small splittable deterministic PRNG (splitmix64 stream). Every randomized
/// routine takes one of these so runs are reproducible from an explicit seed.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn from_seed(seed: u64) -> Rng {
        Rng { state: seed.wrapping_add(0x9e3779b97f4a7c15) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// Independent child stream; advancing the child does not affect `self`.
    pub fn split(&mut self) -> Rng {
        Rng::from_seed(self.next_u64() ^ 0xa5a5a5a5a5a5a5a5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_specs() {
        assert!(Field::parse("Q").unwrap().is_rationals());
        assert_eq!(Field::parse("2^6").unwrap().size(), Some(64));
        assert_eq!(Field::parse("3^3").unwrap().size(), Some(27));
        assert_eq!(Field::parse("17").unwrap().size(), Some(17));
        assert!(Field::parse("4").is_err());
        assert!(Field::parse("x").is_err());
    }

    #[test]
    fn gf2_basics() {
        let f = Field::finite(2, 1).unwrap();
        let one = f.one();
        assert!(f.is_zero(&f.add(&one, &one)));
    }

    #[test]
    fn rational_arith() {
        let f = Field::rationals();
        let third = f.scalar_from_string("1/3").unwrap();
        let sixth = f.scalar_from_string("1/6").unwrap();
        let half = f.scalar_from_string("1/2").unwrap();
        assert_eq!(f.add(&third, &sixth), half);
    }

    #[test]
    fn gf4_generator_table() {
        // modulus for GF(4) must be x² + x + 1 (lexicographically least
        // irreducible), so g·g = g+1 for g the class of x.
        let f = Field::finite(2, 2).unwrap();
        assert_eq!(f.modulus().unwrap(), &[1, 1, 1]);
        let g = f.element(2); // x
        let gg = f.mul(&g, &g);
        assert_eq!(gg, f.element(3)); // x+1
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, k) in [(2u64, 1u32), (3, 1), (2, 2), (5, 1), (3, 2), (7, 1)] {
            let f = Field::finite(p, k).unwrap();
            if f.size().unwrap() > 9 {
                continue;
            }
            let els = f.all_elements();
            for a in &els {
                for b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in &els {
                        assert_eq!(f.add(&f.add(a, b), c), f.add(a, &f.add(b, c)));
                        assert_eq!(f.mul(&f.mul(a, b), c), f.mul(a, &f.mul(b, c)));
                        let lhs = f.mul(a, &f.add(b, c));
                        let rhs = f.add(&f.mul(a, b), &f.mul(a, c));
                        assert_eq!(lhs, rhs);
                    }
                }
                if !f.is_zero(a) {
                    let ia = f.inv(a).unwrap();
                    assert_eq!(f.mul(a, &ia), f.one());
                }
            }
        }
    }

    #[test]
    fn field_axioms_random_larger() {
        let mut rng = Rng::from_seed(7);
        for spec in ["17", "2^6", "3^3", "2^8"] {
            let f = Field::parse(spec).unwrap();
            for _ in 0..200 {
                let a = f.random_scalar(&mut rng);
                let b = f.random_scalar(&mut rng);
                let c = f.random_scalar(&mut rng);
                assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
                if !f.is_zero(&b) {
                    let d = f.div(&a, &b).unwrap();
                    assert_eq!(f.mul(&d, &b), a);
                }
            }
        }
    }

    #[test]
    fn quadratic_char2_vs_exhaustive() {
        // all (b, c) over GF(2^k), k ≤ 4
        for k in 1..=4u32 {
            let f = Field::finite(2, k).unwrap();
            let els = f.all_elements();
            for b in &els {
                for c in &els {
                    let mut expect: Vec<Scalar> = els
                        .iter()
                        .filter(|x| {
                            let v = f.add(&f.add(&f.mul(x, x), &f.mul(b, x)), c);
                            f.is_zero(&v)
                        })
                        .cloned()
                        .collect();
                    expect.sort_by_key(|r| match r {
                        Scalar::F(v) => *v,
                        _ => 0,
                    });
                    let got = f.solve_quadratic_char2(b, c).unwrap();
                    assert_eq!(got, expect, "k={k} b={b:?} c={c:?}");
                }
            }
        }
    }

    #[test]
    fn quadratic_char2_random_gf256() {
        let f = Field::finite(2, 8).unwrap();
        let mut rng = Rng::from_seed(99);
        for _ in 0..1000 {
            let b = f.random_scalar(&mut rng);
            let c = f.random_scalar(&mut rng);
            let got = f.solve_quadratic_char2(&b, &c).unwrap();
            for r in &got {
                let v = f.add(&f.add(&f.mul(r, r), &f.mul(&b, r)), &c);
                assert!(f.is_zero(&v));
            }
            // x² + bx + c has 0, 1, or 2 roots
            assert!(got.len() <= 2);
            // b = 0 means a unique Frobenius square root
            if f.is_zero(&b) {
                assert_eq!(got.len(), 1);
            }
        }
    }

    #[test]
    fn quadratic_examples_from_small_fields() {
        let f2 = Field::finite(2, 1).unwrap();
        // x² + x = x(x+1): roots {0, 1}
        let roots = f2.solve_quadratic_char2(&f2.one(), &f2.zero()).unwrap();
        assert_eq!(roots, vec![f2.element(0), f2.element(1)]);
        // x² + x + 1 has no roots over GF(2)
        assert!(f2.solve_quadratic_char2(&f2.one(), &f2.one()).unwrap().is_empty());
        // ... but two roots over GF(4): g and g+1
        let f4 = Field::finite(2, 2).unwrap();
        let roots = f4.solve_quadratic_char2(&f4.one(), &f4.one()).unwrap();
        assert_eq!(roots, vec![f4.element(2), f4.element(3)]);
    }

    #[test]
    fn frobenius_additive_small() {
        for k in 1..=4u32 {
            let f = Field::finite(2, k).unwrap();
            let els = f.all_elements();
            for a in &els {
                for b in &els {
                    let lhs = {
                        let s = f.add(a, b);
                        f.mul(&s, &s)
                    };
                    let rhs = f.add(&f.mul(a, a), &f.mul(b, b));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn gf27_draws_hit_every_element() {
        let f = Field::finite(3, 3).unwrap();
        let mut rng = Rng::from_seed(0);
        let mut seen = vec![false; 27];
        for _ in 0..10_000 {
            if let Scalar::F(v) = f.random_scalar(&mut rng) {
                seen[v as usize] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn rational_sampling_height() {
        let f = Field::rationals();
        let mut rng = Rng::from_seed(3);
        for _ in 0..200 {
            let s = f.random_scalar(&mut rng);
            let (num, den) = Field::rational_height(&s).unwrap();
            assert!(num <= BigInt::from(10));
            assert!(den <= BigInt::from(10));
        }
    }

    #[test]
    fn deterministic_modulus() {
        let a = Field::finite(2, 6).unwrap();
        let b = Field::finite(2, 6).unwrap();
        assert_eq!(a.modulus(), b.modulus());
        // GF(8): x³ + x + 1 is the least irreducible cubic over GF(2)
        let f8 = Field::finite(2, 3).unwrap();
        assert_eq!(f8.modulus().unwrap(), &[1, 1, 0, 1]);
    }
}
