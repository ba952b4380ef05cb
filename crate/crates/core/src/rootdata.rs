//! Irreducible root data: Cartan matrices, root closure, isogeny lattices,
//! Cartan integers, structure constants via extraspecial pairs, and the
//! prediction of root multiplicities modulo a prime.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DynkinType {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            DynkinType::A => 'A',
            DynkinType::B => 'B',
            DynkinType::C => 'C',
            DynkinType::D => 'D',
            DynkinType::E => 'E',
            DynkinType::F => 'F',
            DynkinType::G => 'G',
        };
        write!(f, "{c}")
    }
}

impl DynkinType {
    pub fn parse(s: &str) -> Option<DynkinType> {
        match s.trim() {
            "A" | "a" => Some(DynkinType::A),
            "B" | "b" => Some(DynkinType::B),
            "C" | "c" => Some(DynkinType::C),
            "D" | "d" => Some(DynkinType::D),
            "E" | "e" => Some(DynkinType::E),
            "F" | "f" => Some(DynkinType::F),
            "G" | "g" => Some(DynkinType::G),
            _ => None,
        }
    }
}

/// Isogeny label: position of the character lattice X between the root
/// lattice (adjoint) and the weight lattice (simply connected).
/// `Intermediate(k)` means the order-k subgroup for type A, and the subgroup
/// generated by the k-th fundamental weight for type D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Isogeny {
    Adjoint,
    SimplyConnected,
    Intermediate(usize),
}

impl fmt::Display for Isogeny {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Isogeny::Adjoint => write!(f, "ad"),
            Isogeny::SimplyConnected => write!(f, "sc"),
            Isogeny::Intermediate(k) => write!(f, "i{k}"),
        }
    }
}

impl Isogeny {
    pub fn parse(s: &str) -> Option<Isogeny> {
        let s = s.trim();
        match s {
            "ad" | "adjoint" => Some(Isogeny::Adjoint),
            "sc" | "simply-connected" => Some(Isogeny::SimplyConnected),
            _ => {
                let k = s.strip_prefix('i')?.parse().ok()?;
                Some(Isogeny::Intermediate(k))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootDataError {
    InvalidType(DynkinType, usize),
    InvalidIsogeny(String),
    NotCartan,
    NotARoot,
}

impl fmt::Display for RootDataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootDataError::InvalidType(t, n) => write!(f, "invalid type {t}{n}"),
            RootDataError::InvalidIsogeny(s) => write!(f, "invalid isogeny label {s}"),
            RootDataError::NotCartan => write!(f, "matrix is not a Cartan matrix"),
            RootDataError::NotARoot => write!(f, "vector is not a root"),
        }
    }
}

impl std::error::Error for RootDataError {}

pub type IntMatrix = Vec<Vec<i64>>;

/// A root datum R = (X, Φ, Y, Φ∨) of an irreducible type, with fixed
/// integer root and coroot matrices, the full root list as coefficient
/// vectors over the simple roots, and the structure-constant table.
#[derive(Debug, Clone)]
pub struct RootDatum {
    pub dynkin: DynkinType,
    pub rank: usize,
    pub isogeny: Isogeny,
    /// Root matrix: rows are the simple roots in a basis of X = ℤⁿ.
    pub a: IntMatrix,
    /// Coroot matrix: rows are the simple coroots in the dual basis of Y.
    pub b: IntMatrix,
    /// Cartan matrix, C = A·Bᵀ.
    pub c: IntMatrix,
    /// All roots as c-vectors; positives ordered by (height, lex), then the
    /// negatives in matching order.
    pub roots: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
    /// Halved squared lengths (α,α)/2, normalized so short roots get 1.
    simple_len: Vec<i64>,
    /// N_{α,β} for all ordered root pairs with α+β ∈ Φ, by root index.
    nab: HashMap<(usize, usize), i64>,
}

fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![0i64; m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t] == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += a[i][t] * b[t][j];
            }
        }
    }
    out
}

fn mat_transpose(a: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let m = a[0].len();
    let mut out = vec![vec![0i64; n]; m];
    for i in 0..n {
        for j in 0..m {
            out[j][i] = a[i][j];
        }
    }
    out
}

fn identity(n: usize) -> IntMatrix {
    let mut m = vec![vec![0i64; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

/// Cartan matrix of an irreducible type in Bourbaki numbering.
pub fn cartan_matrix(t: DynkinType, n: usize) -> Result<IntMatrix, RootDataError> {
    let valid = match t {
        DynkinType::A => n >= 1,
        DynkinType::B => n >= 2,
        DynkinType::C => n >= 3,
        DynkinType::D => n >= 4,
        DynkinType::E => (6..=8).contains(&n),
        DynkinType::F => n == 4,
        DynkinType::G => n == 2,
    };
    if !valid {
        return Err(RootDataError::InvalidType(t, n));
    }
    let mut c = vec![vec![0i64; n]; n];
    for i in 0..n {
        c[i][i] = 2;
    }
    let chain = |c: &mut IntMatrix, i: usize, j: usize| {
        c[i][j] = -1;
        c[j][i] = -1;
    };
    match t {
        DynkinType::A => {
            for i in 0..n - 1 {
                chain(&mut c, i, i + 1);
            }
        }
        DynkinType::B => {
            for i in 0..n - 1 {
                chain(&mut c, i, i + 1);
            }
            // α_n short: ⟨α_{n-1}, α_n∨⟩ = -2
            c[n - 2][n - 1] = -2;
        }
        DynkinType::C => {
            for i in 0..n - 1 {
                chain(&mut c, i, i + 1);
            }
            // α_n long: ⟨α_n, α_{n-1}∨⟩ = -2
            c[n - 1][n - 2] = -2;
        }
        DynkinType::D => {
            for i in 0..n - 2 {
                chain(&mut c, i, i + 1);
            }
            c[n - 3][n - 1] = -1;
            c[n - 1][n - 3] = -1;
            c[n - 2][n - 1] = 0;
            c[n - 1][n - 2] = 0;
        }
        DynkinType::E => {
            // Bourbaki: node 2 attaches to node 4
            for (i, j) in [(0, 2), (2, 3), (3, 4), (1, 3)] {
                chain(&mut c, i, j);
            }
            for i in 4..n - 1 {
                chain(&mut c, i, i + 1);
            }
        }
        DynkinType::F => {
            chain(&mut c, 0, 1);
            chain(&mut c, 2, 3);
            c[1][2] = -2;
            c[2][1] = -1;
        }
        DynkinType::G => {
            c[0][1] = -1;
            c[1][0] = -3;
        }
    }
    Ok(c)
}

fn is_cartan_like(c: &IntMatrix) -> bool {
    let n = c.len();
    if n == 0 || c.iter().any(|r| r.len() != n) {
        return false;
    }
    for i in 0..n {
        if c[i][i] != 2 {
            return false;
        }
        for j in 0..n {
            if i != j && (c[i][j] > 0 || (c[i][j] == 0) != (c[j][i] == 0)) {
                return false;
            }
        }
    }
    true
}

/// All roots of the Cartan matrix as c-vectors, positives (by height then
/// lex) followed by their negatives in matching order.
pub fn roots_closure(c: &IntMatrix) -> Result<Vec<Vec<i64>>, RootDataError> {
    if !is_cartan_like(c) {
        return Err(RootDataError::NotCartan);
    }
    let n = c.len();
    let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
    let mut queue: Vec<Vec<i64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0i64; n];
        e[i] = 1;
        seen.insert(e.clone(), ());
        queue.push(e);
    }
    while let Some(r) = queue.pop() {
        // pairing of r with each simple coroot: (r · C)_j
        for j in 0..n {
            let pairing: i64 = (0..n).map(|i| r[i] * c[i][j]).sum();
            let mut refl = r.clone();
            refl[j] -= pairing;
            let positive = refl.iter().all(|&x| x >= 0);
            let negative = refl.iter().all(|&x| x <= 0);
            if !positive && !negative {
                return Err(RootDataError::NotCartan);
            }
            let key = if positive { refl.clone() } else { refl.iter().map(|&x| -x).collect() };
            if seen.insert(key.clone(), ()).is_none() {
                queue.push(key);
                if seen.len() > 1000 {
                    return Err(RootDataError::NotCartan);
                }
            }
        }
    }
    let mut positives: Vec<Vec<i64>> = seen.into_keys().collect();
    positives.sort_by_key(|r| (r.iter().sum::<i64>(), r.clone()));
    let negatives: Vec<Vec<i64>> = positives.iter().map(|r| r.iter().map(|&x| -x).collect()).collect();
    let mut all = positives;
    all.extend(negatives);
    Ok(all)
}

/// Halved squared lengths (αᵢ,αᵢ)/2 of the simple roots, normalized to
/// integers with minimum 1, from the symmetrizability of C.
fn simple_lengths(c: &IntMatrix) -> Vec<BigRational> {
    let n = c.len();
    let mut d: Vec<Option<BigRational>> = vec![None; n];
    d[0] = Some(BigRational::one());
    // propagate along edges: d_j / d_i = C[i][j] / C[j][i]
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j || c[i][j] == 0 {
                    continue;
                }
                if let (Some(di), None) = (d[i].clone(), &d[j]) {
                    // (α_i,α_j) = (α_j,α_i) forces C[i][j]·d_j = C[j][i]·d_i
                    let ratio = BigRational::new(BigInt::from(c[j][i]), BigInt::from(c[i][j]));
                    d[j] = Some(di * ratio);
                    changed = true;
                }
            }
        }
    }
    let vals: Vec<BigRational> = d.into_iter().map(|x| x.expect("connected diagram")).collect();
    let min = vals.iter().min().unwrap().clone();
    vals.into_iter().map(|v| v / min.clone()).collect()
}

impl RootDatum {
    pub fn root_index(&self, c_vec: &[i64]) -> Option<usize> {
        self.index.get(c_vec).copied()
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn num_positive(&self) -> usize {
        self.roots.len() / 2
    }

    /// Index of -α.
    pub fn negate(&self, i: usize) -> usize {
        let np = self.num_positive();
        if i < np {
            i + np
        } else {
            i - np
        }
    }

    pub fn is_positive(&self, i: usize) -> bool {
        i < self.num_positive()
    }

    /// Index of the simple root αᵢ (0-based i).
    pub fn simple_root(&self, i: usize) -> usize {
        let mut e = vec![0i64; self.rank];
        e[i] = 1;
        self.index[&e]
    }

    /// Height of a root (sum of coefficients).
    pub fn height(&self, i: usize) -> i64 {
        self.roots[i].iter().sum()
    }

    /// (α,α)/2 for root α, normalized with short roots at 1.
    pub fn half_length(&self, i: usize) -> i64 {
        // (α,α) = Σ_jk c_j c_k (α_j, α_k), with (α_j,α_k) = C[j][k]·d_k
        let c = &self.roots[i];
        let mut acc = 0i64;
        for j in 0..self.rank {
            if c[j] == 0 {
                continue;
            }
            for k in 0..self.rank {
                acc += c[j] * c[k] * self.c[j][k] * self.simple_len[k];
            }
        }
        debug_assert_eq!(acc % 2, 0);
        acc / 2
    }

    /// ⟨α, β∨⟩ = 2(α,β)/(β,β) for roots given by index.
    pub fn cartan_integer(&self, alpha: usize, beta: usize) -> i64 {
        let a = &self.roots[alpha];
        let b = &self.roots[beta];
        let mut inner = 0i64; // (α, β), via (α_j, α_k) = C[j][k]·d_k
        for j in 0..self.rank {
            if a[j] == 0 {
                continue;
            }
            for k in 0..self.rank {
                inner += a[j] * b[k] * self.c[j][k] * self.simple_len[k];
            }
        }
        let db = self.half_length(beta); // (β,β)/2
        debug_assert_eq!(inner % db, 0);
        inner / db
    }

    /// Coefficients of β∨ over the simple coroots.
    pub fn coroot_cvector(&self, beta: usize) -> Vec<i64> {
        let c = &self.roots[beta];
        let db = self.half_length(beta);
        (0..self.rank)
            .map(|i| {
                let num = c[i] * self.simple_len[i];
                debug_assert_eq!(num % db, 0);
                num / db
            })
            .collect()
    }

    /// β∨ as a vector in Y = ℤⁿ (dual-basis coordinates).
    pub fn coroot_vector(&self, beta: usize) -> Vec<i64> {
        let cv = self.coroot_cvector(beta);
        let mut out = vec![0i64; self.rank];
        for (i, &ci) in cv.iter().enumerate() {
            for j in 0..self.rank {
                out[j] += ci * self.b[i][j];
            }
        }
        out
    }

    /// α as a vector in X = ℤⁿ.
    pub fn root_vector(&self, alpha: usize) -> Vec<i64> {
        let c = &self.roots[alpha];
        let mut out = vec![0i64; self.rank];
        for (i, &ci) in c.iter().enumerate() {
            for j in 0..self.rank {
                out[j] += ci * self.a[i][j];
            }
        }
        out
    }

    /// Reflection s_α applied to x ∈ X = ℤⁿ.
    pub fn apply_reflection(&self, alpha: usize, x: &[i64]) -> Result<Vec<i64>, RootDataError> {
        if alpha >= self.roots.len() {
            return Err(RootDataError::NotARoot);
        }
        let av = self.coroot_vector(alpha);
        let pairing: i64 = x.iter().zip(&av).map(|(a, b)| a * b).sum();
        let root = self.root_vector(alpha);
        Ok(x.iter().zip(&root).map(|(xi, ri)| xi - pairing * ri).collect())
    }

    /// Largest k with α - kβ ∈ Φ.
    pub fn chain_down(&self, alpha: usize, beta: usize) -> i64 {
        let mut k = 0i64;
        loop {
            let cand: Vec<i64> = self.roots[alpha]
                .iter()
                .zip(&self.roots[beta])
                .map(|(a, b)| a - (k + 1) * b)
                .collect();
            if self.index.contains_key(&cand) {
                k += 1;
            } else {
                return k;
            }
        }
    }

    /// Largest k with α + kβ ∈ Φ.
    pub fn chain_up(&self, alpha: usize, beta: usize) -> i64 {
        self.chain_down(alpha, self.negate(beta))
    }

    /// Cartan integer from the root chain through β (Lemma: ⟨α,β∨⟩ = p - q).
    pub fn chain_cartan_integer(&self, alpha: usize, beta: usize) -> i64 {
        self.chain_down(alpha, beta) - self.chain_up(alpha, beta)
    }

    /// N_{α,β}, zero when α+β ∉ Φ.
    pub fn n_constant(&self, alpha: usize, beta: usize) -> i64 {
        self.nab.get(&(alpha, beta)).copied().unwrap_or(0)
    }

    /// Sum index α+β if it is a root.
    pub fn sum_root(&self, alpha: usize, beta: usize) -> Option<usize> {
        let s: Vec<i64> =
            self.roots[alpha].iter().zip(&self.roots[beta]).map(|(a, b)| a + b).collect();
        self.index.get(&s).copied()
    }

    /// Multiplicity prediction: partitions Φ by (c^α − c^β)A ≡ 0 mod p.
    /// Returns (sorted list of (class size, number of classes) for nonzero
    /// classes, count of roots with ᾱ = 0).
    pub fn predicted_multiplicities(&self, p: u64) -> (Vec<(usize, usize)>, usize) {
        let mut groups: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut zero_count = 0usize;
        for i in 0..self.roots.len() {
            let v = self.root_vector(i);
            let key: Vec<i64> = if p == 0 {
                v
            } else {
                v.iter().map(|&x| x.rem_euclid(p as i64)).collect()
            };
            if key.iter().all(|&x| x == 0) {
                zero_count += 1;
            } else {
                *groups.entry(key).or_insert(0) += 1;
            }
        }
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for size in groups.values() {
            *counts.entry(*size).or_insert(0) += 1;
        }
        let mut out: Vec<(usize, usize)> = counts.into_iter().collect();
        out.sort();
        (out, zero_count)
    }

    /// Key of a root's multiplicity class: the image of α in X ⊗ F_p.
    pub fn class_key(&self, alpha: usize, p: u64) -> Vec<i64> {
        let v = self.root_vector(alpha);
        if p == 0 {
            v
        } else {
            v.iter().map(|&x| x.rem_euclid(p as i64)).collect()
        }
    }

    /// Deterministic JSON document with A, B, C, roots and the N-table.
    pub fn to_json(&self) -> serde_json::Value {
        let mut nab: Vec<(usize, usize, i64)> =
            self.nab.iter().map(|(&(i, j), &v)| (i, j, v)).collect();
        nab.sort();
        json!({
            "type": self.dynkin.to_string(),
            "rank": self.rank,
            "isogeny": self.isogeny.to_string(),
            "A": self.a,
            "B": self.b,
            "C": self.c,
            "roots": self.roots,
            "nab": nab.iter().map(|(i, j, v)| json!([i, j, v])).collect::<Vec<_>>(),
        })
    }
}

/// Hermite normal form of the row lattice of an integer matrix; returns a
/// square basis (rows) assuming full column rank.
fn hnf_row_basis(mut m: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let cols = m[0].len();
    let mut row = 0usize;
    for col in 0..cols {
        // find pivot with minimal nonzero |value|, reduce others
        loop {
            let mut pivot: Option<usize> = None;
            for r in row..m.len() {
                if m[r][col] != 0 {
                    pivot = match pivot {
                        None => Some(r),
                        Some(p) if m[r][col].abs() < m[p][col].abs() => Some(r),
                        keep => keep,
                    };
                }
            }
            let Some(p) = pivot else { break };
            m.swap(row, p);
            let mut done = true;
            for r in row + 1..m.len() {
                if m[r][col] != 0 {
                    let q = m[r][col].div_euclid(m[row][col]);
                    for k in 0..cols {
                        m[r][k] -= q * m[row][k];
                    }
                    if m[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[row][col] != 0 {
            if m[row][col] < 0 {
                for k in 0..cols {
                    m[row][k] = -m[row][k];
                }
            }
            // reduce entries above the pivot
            for r in 0..row {
                let q = m[r][col].div_euclid(m[row][col]);
                if q != 0 {
                    for k in 0..cols {
                        m[r][k] -= q * m[row][k];
                    }
                }
            }
            row += 1;
        }
        if row == cols {
            break;
        }
    }
    m.truncate(row);
    m
}

/// Rational matrix inverse for small integer matrices.
fn rational_inverse(m: &IntMatrix) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut aug: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> =
                m[i].iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect();
            for j in 0..n {
                row.push(if i == j { BigRational::one() } else { BigRational::zero() });
            }
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, pivot);
        let inv = aug[col][col].recip();
        for k in 0..2 * n {
            aug[col][k] = &aug[col][k] * &inv;
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for k in 0..2 * n {
                    let v = &aug[r][k] - &f * &aug[col][k];
                    aug[r][k] = v;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

fn fundamental_group_order(t: DynkinType, n: usize) -> usize {
    match t {
        DynkinType::A => n + 1,
        DynkinType::B | DynkinType::C => 2,
        DynkinType::D => 4,
        DynkinType::E => match n {
            6 => 3,
            7 => 2,
            _ => 1,
        },
        DynkinType::F | DynkinType::G => 1,
    }
}

/// Valid isogeny labels for a type, adjoint first, simply connected last.
pub fn isogeny_labels(t: DynkinType, n: usize) -> Vec<Isogeny> {
    let order = fundamental_group_order(t, n);
    if order == 1 {
        return vec![Isogeny::Adjoint];
    }
    let mut out = vec![Isogeny::Adjoint];
    match t {
        DynkinType::A => {
            for d in 2..=n {
                if (n + 1) % d == 0 && d < n + 1 {
                    out.push(Isogeny::Intermediate(d));
                }
            }
        }
        DynkinType::D => {
            out.push(Isogeny::Intermediate(1));
            if n % 2 == 0 {
                out.push(Isogeny::Intermediate(n - 1));
                out.push(Isogeny::Intermediate(n));
            }
        }
        _ => {}
    }
    out.push(Isogeny::SimplyConnected);
    out
}

/// Rows of X-basis construction for an intermediate isogeny: the lattice
/// Q + ℤ·g in root coordinates, where g is a rational weight-lattice vector.
fn intermediate_lattice_matrices(
    c: &IntMatrix,
    g: &[BigRational],
) -> Option<(IntMatrix, IntMatrix)> {
    let n = c.len();
    // clear denominators of g
    let mut den = BigInt::one();
    for v in g {
        let d = v.denom();
        let gcd = num_integer::Integer::gcd(&den, d);
        den = &den * d / gcd;
    }
    let den_i = den.to_i64()?;
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for i in 0..n {
        let mut r = vec![0i64; n];
        r[i] = den_i;
        rows.push(r);
    }
    rows.push(
        g.iter()
            .map(|v| {
                let scaled = v * BigRational::from_integer(den.clone());
                scaled.to_integer().to_i64().unwrap()
            })
            .collect(),
    );
    // basis of den·X
    let u = hnf_row_basis(rows);
    if u.len() != n {
        return None;
    }
    // A = den · U⁻¹ (simple roots in the X-basis)
    let uinv = rational_inverse(&u)?;
    let mut a = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let v = &uinv[i][j] * BigRational::from_integer(den.clone());
            if !v.denom().is_one() {
                return None;
            }
            a[i][j] = v.to_integer().to_i64()?;
        }
    }
    // B = (A⁻¹ C)ᵀ
    let ainv = rational_inverse(&a)?;
    let mut b = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = BigRational::zero();
            for k in 0..n {
                acc += &ainv[i][k] * BigRational::from_integer(BigInt::from(c[k][j]));
            }
            if !acc.denom().is_one() {
                return None;
            }
            // B's (j,i) entry: rows of B are coroots; (A⁻¹C)[i][j] gives
            // the pairing produced column-wise, transpose below
            b[j][i] = acc.to_integer().to_i64()?;
        }
    }
    Some((a, b))
}

/// Build a root datum for (type, rank, isogeny).
pub fn build_root_datum(
    t: DynkinType,
    n: usize,
    isogeny: Isogeny,
) -> Result<RootDatum, RootDataError> {
    let c = cartan_matrix(t, n)?;
    let labels = isogeny_labels(t, n);
    // E8, F4, G2: fundamental group trivial; accept sc as alias of ad
    let isogeny = if fundamental_group_order(t, n) == 1
        && matches!(isogeny, Isogeny::SimplyConnected | Isogeny::Adjoint)
    {
        Isogeny::Adjoint
    } else {
        isogeny
    };
    if !labels.contains(&isogeny) {
        return Err(RootDataError::InvalidIsogeny(format!("{t}{n} {isogeny}")));
    }
    let (a, b) = match isogeny {
        Isogeny::Adjoint => (identity(n), mat_transpose(&c)),
        Isogeny::SimplyConnected => (c.clone(), identity(n)),
        Isogeny::Intermediate(k) => {
            if t == DynkinType::A && n == 3 && k == 2 {
                // the fixed matrices for A3 with index-2 lattice
                let a = vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 0, 2]];
                let b = vec![vec![2, -1, -1], vec![-1, 2, 0], vec![0, -1, 1]];
                (a, b)
            } else {
                let cinv = rational_inverse(&c).ok_or(RootDataError::NotCartan)?;
                let g: Vec<BigRational> = match t {
                    DynkinType::A => {
                        // subgroup of order k generated by ((n+1)/k)·ω₁
                        let m = BigRational::from_integer(BigInt::from(((n + 1) / k) as i64));
                        cinv[0].iter().map(|v| v * &m).collect()
                    }
                    DynkinType::D => cinv[k - 1].clone(),
                    _ => return Err(RootDataError::InvalidIsogeny(format!("{t}{n} i{k}"))),
                };
                intermediate_lattice_matrices(&c, &g)
                    .ok_or_else(|| RootDataError::InvalidIsogeny(format!("{t}{n} i{k}")))?
            }
        }
    };
    // consistency: C = A·Bᵀ
    debug_assert_eq!(mat_mul(&a, &mat_transpose(&b)), c);
    let roots = roots_closure(&c)?;
    let index: HashMap<Vec<i64>, usize> =
        roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
    let lengths = simple_lengths(&c);
    let simple_len: Vec<i64> = lengths
        .iter()
        .map(|v| {
            assert!(v.denom().is_one());
            v.to_integer().to_i64().unwrap()
        })
        .collect();
    let mut datum = RootDatum {
        dynkin: t,
        rank: n,
        isogeny,
        a,
        b,
        c,
        roots,
        index,
        simple_len,
        nab: HashMap::new(),
    };
    datum.nab = structure_constants(&datum);
    Ok(datum)
}

/// Structure constants N_{α,β} for all ordered pairs with α+β ∈ Φ, fixed by
/// the extraspecial-pair convention: positive roots ordered by (height, lex),
/// the minimal decomposition of every non-simple positive root gets +(p+1),
/// everything else follows from the standard bilinearity relations.
pub fn structure_constants(datum: &RootDatum) -> HashMap<(usize, usize), i64> {
    let np = datum.num_positive();
    // table over positive special pairs, computed in height order
    let mut table: HashMap<(usize, usize), i64> = HashMap::new();

    // helper: N for arbitrary sign pairs, given the positive table so far
    fn n_any(
        datum: &RootDatum,
        table: &HashMap<(usize, usize), i64>,
        alpha: usize,
        beta: usize,
    ) -> i64 {
        let np = datum.num_positive();
        if datum.sum_root(alpha, beta).is_none() {
            return 0;
        }
        let pos_a = alpha < np;
        let pos_b = beta < np;
        match (pos_a, pos_b) {
            (true, true) => {
                if alpha < beta {
                    *table.get(&(alpha, beta)).expect("positive pair computed")
                } else {
                    -*table.get(&(beta, alpha)).expect("positive pair computed")
                }
            }
            (false, false) => -n_any(datum, table, datum.negate(alpha), datum.negate(beta)),
            (true, false) => {
                // α positive, β = -μ: if α-μ > 0 use
                // N_{α,-μ} = N_{α-μ, μ}·(α-μ,α-μ)/(α,α)
                let mu = datum.negate(beta);
                let gamma = datum.sum_root(alpha, beta).expect("sum is a root");
                if datum.is_positive(gamma) {
                    let la = datum.half_length(alpha);
                    let lg = datum.half_length(gamma);
                    let ng = n_any(datum, table, gamma, mu);
                    let num = ng * lg;
                    debug_assert_eq!(num % la, 0);
                    num / la
                } else {
                    // α - μ < 0: N_{α,-μ} = N_{μ,-α} = N_{μ-α, α}·(μ-α)/(μ)
                    let neg_a = datum.negate(alpha);
                    let diff = datum.sum_root(mu, neg_a).expect("sum is a root");
                    let lm = datum.half_length(mu);
                    let ld = datum.half_length(diff);
                    let nd = n_any(datum, table, diff, alpha);
                    let num = nd * ld;
                    debug_assert_eq!(num % lm, 0);
                    num / lm
                }
            }
            (false, true) => -n_any(datum, table, beta, alpha),
        }
    }

    // process positive roots by order; roots are already (height, lex) sorted
    for gamma in 0..np {
        if datum.height(gamma) == 1 {
            continue;
        }
        // special pairs (ξ, η), ξ ≤ η... ξ < η or ξ = η impossible (2ξ not a
        // root in reduced systems except... ξ+ξ = γ would need 2ξ ∈ Φ: no)
        let mut specials: Vec<(usize, usize)> = Vec::new();
        for xi in 0..np {
            if let Some(s) = datum.sum_root(gamma, datum.negate(xi)) {
                if datum.is_positive(s) && xi < s {
                    specials.push((xi, s));
                }
            }
        }
        specials.sort();
        let &(a0, b0) = specials.first().expect("non-simple positive root decomposes");
        let p = datum.chain_down(a0, b0);
        table.insert((a0, b0), p + 1);
        for &(xi, eta) in &specials[1..] {
            // quadruple (a0, b0, -ξ, -η):
            // N_{ξ,η} = (γ,γ)·(T2 + T3)/N_{a0,b0}
            let lg = datum.half_length(gamma);
            let t2 = match datum.sum_root(b0, datum.negate(xi)) {
                Some(d) => {
                    let v = n_any(datum, &table, b0, datum.negate(xi))
                        * n_any(datum, &table, a0, datum.negate(eta));
                    // divided by (b0-ξ, b0-ξ)
                    BigRational::new(BigInt::from(v), BigInt::from(2 * datum.half_length(d)))
                }
                None => BigRational::zero(),
            };
            let t3 = match datum.sum_root(a0, datum.negate(xi)) {
                Some(d) => {
                    let v = n_any(datum, &table, datum.negate(xi), a0)
                        * n_any(datum, &table, b0, datum.negate(eta));
                    BigRational::new(BigInt::from(v), BigInt::from(2 * datum.half_length(d)))
                }
                None => BigRational::zero(),
            };
            let n0 = n_any(datum, &table, a0, b0);
            let val = (t2 + t3) * BigRational::from_integer(BigInt::from(2 * lg))
                / BigRational::from_integer(BigInt::from(n0));
            assert!(val.denom().is_one(), "structure constant must be integral");
            let v = val.to_integer().to_i64().unwrap();
            let expect = datum.chain_down(xi, eta) + 1;
            assert_eq!(v.abs(), expect, "|N| = p+1 for special pair");
            table.insert((xi, eta), v);
        }
    }

    // fill the complete table over all ordered pairs with α+β ∈ Φ
    let total = datum.num_roots();
    let mut full: HashMap<(usize, usize), i64> = HashMap::new();
    for alpha in 0..total {
        for beta in 0..total {
            if alpha == beta || datum.negate(alpha) == beta {
                continue;
            }
            if datum.sum_root(alpha, beta).is_some() {
                full.insert((alpha, beta), n_any(datum, &table, alpha, beta));
            }
        }
    }
    full
}

#[cfg(test)]
mod tests {
    use super::*;

    fn datum(t: DynkinType, n: usize, iso: Isogeny) -> RootDatum {
        build_root_datum(t, n, iso).unwrap()
    }

    #[test]
    fn a3_sc_matrices() {
        let d = datum(DynkinType::A, 3, Isogeny::SimplyConnected);
        let expect = vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]];
        assert_eq!(d.a, expect);
        assert_eq!(d.c, expect);
        assert_eq!(d.b, identity(3));
    }

    #[test]
    fn a3_intermediate_matrices() {
        let d = datum(DynkinType::A, 3, Isogeny::Intermediate(2));
        assert_eq!(d.a, vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 0, 2]]);
        assert_eq!(d.b, vec![vec![2, -1, -1], vec![-1, 2, 0], vec![0, -1, 1]]);
        assert_eq!(mat_mul(&d.a, &mat_transpose(&d.b)), d.c);
    }

    #[test]
    fn g2_counts() {
        let d = datum(DynkinType::G, 2, Isogeny::Adjoint);
        assert_eq!(d.c, vec![vec![2, -1], vec![-3, 2]]);
        assert_eq!(d.num_roots(), 12);
        // highest root 3α₁+2α₂ present
        assert!(d.root_index(&[3, 2]).is_some());
    }

    #[test]
    fn root_counts_classical() {
        assert_eq!(datum(DynkinType::A, 4, Isogeny::Adjoint).num_roots(), 20);
        assert_eq!(datum(DynkinType::B, 3, Isogeny::Adjoint).num_roots(), 18);
        assert_eq!(datum(DynkinType::C, 4, Isogeny::Adjoint).num_roots(), 32);
        assert_eq!(datum(DynkinType::D, 5, Isogeny::Adjoint).num_roots(), 40);
        assert_eq!(datum(DynkinType::F, 4, Isogeny::Adjoint).num_roots(), 48);
        assert_eq!(datum(DynkinType::E, 6, Isogeny::Adjoint).num_roots(), 72);
        assert_eq!(datum(DynkinType::E, 7, Isogeny::Adjoint).num_roots(), 126);
        assert_eq!(datum(DynkinType::E, 8, Isogeny::Adjoint).num_roots(), 240);
    }

    #[test]
    fn roots_closure_small() {
        let a2 = roots_closure(&cartan_matrix(DynkinType::A, 2).unwrap()).unwrap();
        assert_eq!(a2.len(), 6);
        assert!(a2.contains(&vec![1, 1]));
        let b2 = roots_closure(&cartan_matrix(DynkinType::B, 2).unwrap()).unwrap();
        assert_eq!(b2.len(), 8);
        assert!(b2.contains(&vec![1, 2]));
        let g2 = roots_closure(&cartan_matrix(DynkinType::G, 2).unwrap()).unwrap();
        assert_eq!(g2.len(), 12);
        assert!(g2.contains(&vec![3, 2]));
    }

    #[test]
    fn not_cartan_rejected() {
        let bad = vec![vec![2, 1], vec![1, 2]];
        assert_eq!(roots_closure(&bad), Err(RootDataError::NotCartan));
    }

    #[test]
    fn cartan_integers() {
        let a2 = datum(DynkinType::A, 2, Isogeny::SimplyConnected);
        let s0 = a2.simple_root(0);
        assert_eq!(a2.cartan_integer(s0, s0), 2);
        let g2 = datum(DynkinType::G, 2, Isogeny::Adjoint);
        assert_eq!(g2.cartan_integer(g2.simple_root(1), g2.simple_root(0)), -3);
        let b2 = datum(DynkinType::B, 2, Isogeny::Adjoint);
        assert_eq!(b2.cartan_integer(b2.simple_root(0), b2.simple_root(1)), -2);
    }

    #[test]
    fn chains_match_pairing_small_ranks() {
        for (t, n) in [
            (DynkinType::A, 3),
            (DynkinType::B, 3),
            (DynkinType::C, 3),
            (DynkinType::D, 4),
            (DynkinType::G, 2),
            (DynkinType::F, 4),
        ] {
            let d = datum(t, n, Isogeny::Adjoint);
            for a in 0..d.num_roots() {
                for b in 0..d.num_roots() {
                    if a == b || d.negate(a) == b {
                        continue;
                    }
                    assert_eq!(
                        d.cartan_integer(a, b),
                        d.chain_cartan_integer(a, b),
                        "{t}{n} roots {a},{b}"
                    );
                }
            }
        }
    }

    #[test]
    fn reflection_involution_and_examples() {
        let a2 = datum(DynkinType::A, 2, Isogeny::Adjoint);
        let s0 = a2.simple_root(0);
        let alpha = a2.root_vector(s0);
        let neg: Vec<i64> = alpha.iter().map(|&v| -v).collect();
        assert_eq!(a2.apply_reflection(s0, &alpha).unwrap(), neg);
        // s_{α1}(α2) = α1 + α2
        let a1 = a2.root_vector(a2.simple_root(1));
        let sum = a2.root_vector(a2.root_index(&[1, 1]).unwrap());
        assert_eq!(a2.apply_reflection(s0, &a1).unwrap(), sum);
        // involution on assorted lattice vectors
        for seed in 0..20i64 {
            let x = vec![seed % 5 - 2, (seed * 7) % 5 - 2];
            let once = a2.apply_reflection(s0, &x).unwrap();
            let twice = a2.apply_reflection(s0, &once).unwrap();
            assert_eq!(twice, x);
        }
    }

    #[test]
    fn structure_constants_a2_b2() {
        let a2 = datum(DynkinType::A, 2, Isogeny::Adjoint);
        for (&(i, j), &v) in a2.nab.iter() {
            assert_eq!(v.abs(), 1, "A2 pair ({i},{j})");
        }
        let s0 = a2.simple_root(0);
        let s1 = a2.simple_root(1);
        assert_eq!(a2.n_constant(s0, s1).abs(), 1);
        let b2 = datum(DynkinType::B, 2, Isogeny::Adjoint);
        for (_, &v) in b2.nab.iter() {
            assert!(v.abs() == 1 || v.abs() == 2);
        }
    }

    #[test]
    fn structure_constants_antisymmetry_and_negation() {
        for (t, n) in [(DynkinType::B, 3), (DynkinType::G, 2), (DynkinType::A, 3)] {
            let d = datum(t, n, Isogeny::Adjoint);
            for (&(i, j), &v) in d.nab.iter() {
                assert_eq!(d.n_constant(j, i), -v);
                assert_eq!(d.n_constant(d.negate(i), d.negate(j)), -v);
                let p = d.chain_down(i, j);
                assert_eq!(v.abs(), p + 1);
            }
        }
    }

    #[test]
    fn predicted_multiplicities_spec_rows() {
        // A2sc(3): two classes of 3, zero count 0
        let a2 = datum(DynkinType::A, 2, Isogeny::SimplyConnected);
        assert_eq!(a2.predicted_multiplicities(3), (vec![(3, 2)], 0));
        // B2sc(2): one nonzero class of 4, zero count 4
        let b2 = datum(DynkinType::B, 2, Isogeny::SimplyConnected);
        assert_eq!(b2.predicted_multiplicities(2), (vec![(4, 1)], 4));
        // F4(2): twelve 2s, three 8s
        let f4 = datum(DynkinType::F, 4, Isogeny::Adjoint);
        assert_eq!(f4.predicted_multiplicities(2), (vec![(2, 12), (8, 3)], 0));
        // G2(3): six 1s, two 3s
        let g2 = datum(DynkinType::G, 2, Isogeny::Adjoint);
        assert_eq!(g2.predicted_multiplicities(3), (vec![(1, 6), (3, 2)], 0));
    }

    #[test]
    fn multiplicities_all_one_char_zero() {
        for (t, n) in [(DynkinType::A, 5), (DynkinType::D, 5), (DynkinType::C, 4)] {
            for iso in isogeny_labels(t, n) {
                let d = datum(t, n, iso);
                let (classes, zero) = d.predicted_multiplicities(0);
                assert_eq!(classes, vec![(1, d.num_roots())]);
                assert_eq!(zero, 0);
            }
        }
    }

    #[test]
    fn isogeny_label_sets() {
        assert_eq!(isogeny_labels(DynkinType::A, 3).len(), 3);
        assert_eq!(isogeny_labels(DynkinType::A, 5).len(), 4);
        assert_eq!(isogeny_labels(DynkinType::D, 4).len(), 5);
        assert_eq!(isogeny_labels(DynkinType::D, 5).len(), 3);
        assert_eq!(isogeny_labels(DynkinType::G, 2), vec![Isogeny::Adjoint]);
        assert!(build_root_datum(DynkinType::B, 3, Isogeny::Intermediate(2)).is_err());
        assert!(build_root_datum(DynkinType::C, 2, Isogeny::Adjoint).is_err());
    }

    #[test]
    fn intermediate_dn_determinants() {
        // |det A| = order of the subgroup
        for (n, iso, det) in [
            (4usize, Isogeny::Intermediate(1), 2i64),
            (4, Isogeny::Intermediate(3), 2),
            (4, Isogeny::Intermediate(4), 2),
            (5, Isogeny::Intermediate(1), 2),
            (6, Isogeny::Intermediate(5), 2),
        ] {
            let d = datum(DynkinType::D, n, iso);
            assert_eq!(int_det(&d.a).abs(), det, "D{n} {iso}");
            assert_eq!(mat_mul(&d.a, &mat_transpose(&d.b)), d.c);
        }
    }

    fn int_det(m: &IntMatrix) -> i64 {
        // small n: Laplace expansion is fine
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        let mut det = 0i64;
        for j in 0..n {
            if m[0][j] == 0 {
                continue;
            }
            let minor: IntMatrix = (1..n)
                .map(|i| (0..n).filter(|&k| k != j).map(|k| m[i][k]).collect())
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            det += sign * m[0][j] * int_det(&minor);
        }
        det
    }
}
