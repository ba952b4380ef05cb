//! Exact dense linear algebra over a [`Field`]: row reduction, kernels,
//! solving, subspace lattice operations, and simultaneous eigenspace
//! decomposition for commuting split semisimple matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;


use crate::field::{Field, Rng, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinalgError {
    DimensionMismatch,
    AmbientMismatch,
    /// A matrix has an eigenvalue outside the field or is not semisimple.
    NotSplit,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::DimensionMismatch => write!(f, "dimension mismatch"),
            LinalgError::AmbientMismatch => write!(f, "subspaces of different ambient spaces"),
            LinalgError::NotSplit => write!(f, "matrix is not split semisimple over the field"),
        }
    }
}

impl std::error::Error for LinalgError {}

/// Dense row-major matrix over an exact field.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    pub field: Field,
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field.spec_string())?;
        for i in 0..self.rows {
            let row: Vec<String> =
                (0..self.cols).map(|j| self.field.scalar_to_string(self.at(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<Scalar>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row);
        }
        Matrix { field: field.clone(), rows: r, cols: c, data }
    }

    /// Integer-entry constructor, mapping through the field.
    pub fn from_int_rows(field: &Field, rows: &[Vec<i64>]) -> Matrix {
        Matrix::from_rows(
            field,
            rows.iter().map(|r| r.iter().map(|&v| field.from_int(v)).collect()).collect(),
        )
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<Scalar> {
        self.row(i).to_vec()
    }

    pub fn push_row(&mut self, row: Vec<Scalar>) {
        assert_eq!(row.len(), self.cols);
        self.data.extend(row);
        self.rows += 1;
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.at(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let v = f.add(out.at(i, j), &f.mul(a, b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.rows);
        let f = &self.field;
        let mut out = vec![f.zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if f.is_zero(vi) {
                continue;
            }
            for j in 0..self.cols {
                let a = self.at(i, j);
                if f.is_zero(a) {
                    continue;
                }
                out[j] = f.add(&out[j], &f.mul(vi, a));
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = &self.field;
        let mut out = self.clone();
        for i in 0..self.rows * self.cols {
            out.data[i] = f.add(&self.data[i], &other.data[i]);
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = &self.field;
        let mut out = self.clone();
        for i in 0..self.rows * self.cols {
            out.data[i] = f.sub(&self.data[i], &other.data[i]);
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let f = &self.field;
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v = f.mul(v, s);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| self.field.is_zero(v))
    }

    /// In-place reduced row echelon form. Returns (rank, pivot columns).
    /// Pivoting is deterministic: first nonzero row in the first nonzero
    /// column.
    pub fn rref_in_place(&mut self) -> (usize, Vec<usize>) {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let mut sel = None;
            for i in r..self.rows {
                if !f.is_zero(self.at(i, c)) {
                    sel = Some(i);
                    break;
                }
            }
            let Some(i) = sel else { continue };
            self.swap_rows(r, i);
            let inv = f.inv(self.at(r, c)).expect("pivot nonzero");
            for j in c..self.cols {
                let v = f.mul(self.at(r, j), &inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || f.is_zero(self.at(i, c)) {
                    continue;
                }
                let factor = self.at(i, c).clone();
                for j in c..self.cols {
                    let v = f.sub(self.at(i, j), &f.mul(&factor, self.at(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (r, pivots)
    }

    pub fn rref(&self) -> (Matrix, usize, Vec<usize>) {
        let mut m = self.clone();
        let (rank, pivots) = m.rref_in_place();
        (m, rank, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Right null space: all v with M v = 0, as a Subspace of F^cols.
    pub fn kernel(&self) -> Subspace {
        let f = &self.field;
        let (r, rank, pivots) = self.rref();
        let mut basis: Vec<Vec<Scalar>> = Vec::with_capacity(self.cols - rank);
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = Some(row);
            }
            v
        };
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut vec = vec![f.zero(); self.cols];
            vec[free] = f.one();
            for (col, p) in pivot_set.iter().enumerate() {
                if let Some(row) = p {
                    vec[col] = f.neg(r.at(*row, free));
                }
            }
            basis.push(vec);
        }
        Subspace::from_rows(f, self.cols, basis)
    }

    /// Solve x · M = b for a row vector x, if possible (least structure:
    /// returns one solution).
    pub fn solve_left(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        // x M = b  <=>  M^T x^T = b^T
        self.transpose().solve_right(b)
    }

    /// Solve M x = b for a column vector x given as slice; returns one
    /// solution as Vec.
    pub fn solve_right(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let f = &self.field;
        // augment
        let mut aug = Matrix::zeros(f, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, _rank, pivots) = aug.rref();
        // inconsistent if a pivot is in the last column
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![f.zero(); self.cols];
        for (row, &c) in pivots.iter().enumerate() {
            x[c] = r.at(row, self.cols).clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix, if invertible.
    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let f = &self.field;
        let n = self.rows;
        let mut aug = Matrix::zeros(f, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, n + i, f.one());
        }
        let (r, rank, pivots) = aug.rref();
        // singular input shows up as pivots escaping into the augmented block
        if rank != n || pivots.iter().any(|&c| c >= n) {
            return None;
        }
        let mut inv = Matrix::zeros(f, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.at(i, n + j).clone());
            }
        }
        Some(inv)
    }
}

/// A subspace of F^n stored as an RREF basis matrix (rows = basis).
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    pub field: Field,
    pub ambient: usize,
    basis: Matrix,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace dim {} of F^{}: {:?}", self.dim(), self.ambient, self.basis)
    }
}

impl Subspace {
    pub fn zero(field: &Field, ambient: usize) -> Subspace {
        Subspace {
            field: field.clone(),
            ambient,
            basis: Matrix::zeros(field, 0, ambient),
        }
    }

    pub fn full(field: &Field, ambient: usize) -> Subspace {
        Subspace {
            field: field.clone(),
            ambient,
            basis: Matrix::identity(field, ambient),
        }
    }

    pub fn from_rows(field: &Field, ambient: usize, rows: Vec<Vec<Scalar>>) -> Subspace {
        let mut m = Matrix::from_rows(field, rows);
        if m.rows == 0 {
            return Subspace::zero(field, ambient);
        }
        assert_eq!(m.cols, ambient);
        let (rank, _) = m.rref_in_place();
        let mut basis = Matrix::zeros(field, 0, ambient);
        for i in 0..rank {
            basis.push_row(m.row_vec(i));
        }
        Subspace { field: field.clone(), ambient, basis }
    }

    pub fn from_matrix_rows(m: &Matrix) -> Subspace {
        Subspace::from_rows(&m.field, m.cols, (0..m.rows).map(|i| m.row_vec(i)).collect())
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn basis_matrix(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.basis.rows).map(|i| self.basis.row_vec(i)).collect()
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let f = &self.field;
        // reduce v against the RREF basis
        let mut v = v.to_vec();
        for i in 0..self.basis.rows {
            // leading column of row i
            let lead = (0..self.ambient).find(|&j| !f.is_zero(self.basis.at(i, j)));
            if let Some(j) = lead {
                if !f.is_zero(&v[j]) {
                    let factor = v[j].clone();
                    for k in 0..self.ambient {
                        v[k] = f.sub(&v[k], &f.mul(&factor, self.basis.at(i, k)));
                    }
                }
            }
        }
        v.iter().all(|x| f.is_zero(x))
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        (0..other.basis.rows).all(|i| self.contains(other.basis.row(i)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::AmbientMismatch);
        }
        let mut rows = self.basis_rows();
        rows.extend(other.basis_rows());
        Ok(Subspace::from_rows(&self.field, self.ambient, rows))
    }

    /// Meet of two subspaces via the kernel of the stacked basis.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::AmbientMismatch);
        }
        let f = &self.field;
        let d1 = self.dim();
        let d2 = other.dim();
        if d1 == 0 || d2 == 0 {
            return Ok(Subspace::zero(f, self.ambient));
        }
        // columns: coefficients over basis1 then basis2; rows: ambient coords
        let mut m = Matrix::zeros(f, self.ambient, d1 + d2);
        for j in 0..d1 {
            for i in 0..self.ambient {
                m.set(i, j, self.basis.at(j, i).clone());
            }
        }
        for j in 0..d2 {
            for i in 0..self.ambient {
                m.set(i, d1 + j, f.neg(other.basis.at(j, i)));
            }
        }
        let ker = m.kernel();
        let mut rows = Vec::new();
        for kv in ker.basis_rows() {
            // vector = sum of basis1 rows weighted by first d1 coords
            let mut v = vec![f.zero(); self.ambient];
            for (j, c) in kv.iter().take(d1).enumerate() {
                if f.is_zero(c) {
                    continue;
                }
                for i in 0..self.ambient {
                    v[i] = f.add(&v[i], &f.mul(c, self.basis.at(j, i)));
                }
            }
            rows.push(v);
        }
        Ok(Subspace::from_rows(f, self.ambient, rows))
    }

    /// Coordinates of v in this subspace's basis, if v lies in it.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        self.basis.transpose().solve_right(v)
    }

    pub fn random_element(&self, rng: &mut Rng) -> Vec<Scalar> {
        let f = &self.field;
        let mut v = vec![f.zero(); self.ambient];
        for i in 0..self.basis.rows {
            let c = f.random_scalar(rng);
            for j in 0..self.ambient {
                v[j] = f.add(&v[j], &f.mul(&c, self.basis.at(i, j)));
            }
        }
        v
    }
}

/// Minimal polynomial of a square matrix, as little-endian coefficients
/// (monic). Computed by Krylov iteration with linear-dependency detection.
pub fn minimal_polynomial(m: &Matrix) -> Vec<Scalar> {
    assert_eq!(m.rows, m.cols);
    let f = &m.field;
    let n = m.rows;
    // lcm of local minimal polynomials of basis vectors; we build it by
    // accumulating a spanning Krylov space and tracking relations.
    let mut poly: Vec<Scalar> = vec![f.one()]; // current min poly (monic)
    let mut tried = 0usize;
    while tried < n {
        // apply current poly to e_tried; if nonzero, extend by the local
        // min poly of the residual vector
        let e: Vec<Scalar> = (0..n).map(|j| if j == tried { f.one() } else { f.zero() }).collect();
        let r = apply_poly_to_vec(m, &poly, &e);
        if r.iter().all(|x| f.is_zero(x)) {
            tried += 1;
            continue;
        }
        let local = local_min_poly(m, &r);
        poly = poly_mul(f, &poly, &local);
        tried += 1;
    }
    poly
}

fn apply_poly_to_vec(m: &Matrix, poly: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
    let f = &m.field;
    let n = v.len();
    let mut acc = vec![f.zero(); n];
    let mut cur = v.to_vec();
    for c in poly {
        if !f.is_zero(c) {
            for j in 0..n {
                acc[j] = f.add(&acc[j], &f.mul(c, &cur[j]));
            }
        }
        cur = mat_vec(m, &cur);
    }
    acc
}

fn mat_vec(m: &Matrix, v: &[Scalar]) -> Vec<Scalar> {
    let f = &m.field;
    let mut out = vec![f.zero(); m.rows];
    for i in 0..m.rows {
        for j in 0..m.cols {
            let a = m.at(i, j);
            if f.is_zero(a) || f.is_zero(&v[j]) {
                continue;
            }
            out[i] = f.add(&out[i], &f.mul(a, &v[j]));
        }
    }
    out
}

fn local_min_poly(m: &Matrix, v: &[Scalar]) -> Vec<Scalar> {
    let f = &m.field;
    let n = v.len();
    // Krylov vectors v, Mv, M²v, ... reduced incrementally against an
    // echelon; each stored row remembers its expression over the Krylov
    // basis, so the first dependency yields the local minimal polynomial.
    struct Row {
        reduced: Vec<Scalar>,
        expr: Vec<Scalar>,
        pivot: usize,
    }
    let mut rows: Vec<Row> = Vec::new();
    let mut cur = v.to_vec();
    let mut degree = 0usize;
    loop {
        let mut red = cur.clone();
        let mut expr = vec![f.zero(); n + 2];
        expr[degree] = f.one();
        for row in &rows {
            let c = red[row.pivot].clone();
            if f.is_zero(&c) {
                continue;
            }
            for j in 0..n {
                red[j] = f.sub(&red[j], &f.mul(&c, &row.reduced[j]));
            }
            for (j, e) in row.expr.iter().enumerate() {
                expr[j] = f.sub(&expr[j], &f.mul(&c, e));
            }
        }
        match (0..n).find(|&j| !f.is_zero(&red[j])) {
            None => {
                // dependency: expr is the monic local min poly of degree `degree`
                expr.truncate(degree + 1);
                return expr;
            }
            Some(p) => {
                let inv = f.inv(&red[p]).expect("pivot nonzero");
                for x in red.iter_mut() {
                    *x = f.mul(x, &inv);
                }
                let mut e = expr;
                for x in e.iter_mut() {
                    *x = f.mul(x, &inv);
                }
                rows.push(Row { reduced: red, expr: e, pivot: p });
            }
        }
        cur = mat_vec(m, &cur);
        degree += 1;
    }
}

pub fn poly_mul(f: &Field, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if f.is_zero(y) {
                continue;
            }
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    out
}

pub fn poly_eval(f: &Field, poly: &[Scalar], x: &Scalar) -> Scalar {
    let mut acc = f.zero();
    for c in poly.iter().rev() {
        acc = f.add(&f.mul(&acc, x), c);
    }
    acc
}

/// Divide poly by (x - root), assuming root is a root. Little-endian.
pub fn poly_deflate(f: &Field, poly: &[Scalar], root: &Scalar) -> Vec<Scalar> {
    let n = poly.len();
    let mut out = vec![f.zero(); n - 1];
    let mut carry = f.zero();
    for i in (0..n - 1).rev() {
        let c = f.add(&poly[i + 1], &f.mul(&carry, root));
        out[i] = c.clone();
        carry = c;
    }
    out
}

/// All eigenvalues (with splitting check) of a matrix acting on F^n.
///
/// For finite fields every field element is tested; for ℚ the minimal
/// polynomial is factored modulo a large prime and the roots are lifted by
/// rational reconstruction, each verified exactly. Errors with NotSplit if
/// the minimal polynomial does not factor into distinct linear factors.
pub fn split_eigenvalues(m: &Matrix) -> Result<Vec<Scalar>, LinalgError> {
    let f = &m.field;
    let n = m.rows;
    if n == 0 {
        return Ok(vec![]);
    }
    if f.is_rationals() {
        let poly = minimal_polynomial(m);
        rational_poly_roots(f, &poly)
    } else {
        let poly = minimal_polynomial(m);
        let mut roots = Vec::new();
        for lam in f.all_elements() {
            if f.is_zero(&poly_eval(f, &poly, &lam)) {
                roots.push(lam);
            }
        }
        if poly.len() - 1 != roots.len() {
            return Err(LinalgError::NotSplit);
        }
        Ok(roots)
    }
}

const MODULAR_PRIMES: [u64; 5] =
    [2147483647, 2147483629, 2147483587, 2147483579, 2147483563];

/// All rational roots of a monic squarefree rational polynomial that splits
/// completely; NotSplit otherwise. Roots are found as linear factors modulo
/// a large prime and lifted by rational reconstruction with exact checks.
fn rational_poly_roots(f: &Field, poly: &[Scalar]) -> Result<Vec<Scalar>, LinalgError> {
    let deg = poly.len() - 1;
    if deg == 0 {
        return Ok(vec![]);
    }
    'primes: for p in MODULAR_PRIMES {
        let fp = match Field::finite(p, 1) {
            Ok(fp) => fp,
            Err(_) => continue,
        };
        // reduce coefficients; denominators must be invertible mod p
        let mut reduced: Vec<Scalar> = Vec::with_capacity(poly.len());
        for c in poly {
            let Scalar::Q(r) = c else { unreachable!() };
            let num = r.numer().mod_floor(&BigInt::from(p));
            let den = r.denom().mod_floor(&BigInt::from(p));
            let num = num.to_u64_digits().1.first().copied().unwrap_or(0);
            let den = den.to_u64_digits().1.first().copied().unwrap_or(0);
            if den == 0 {
                continue 'primes;
            }
            let v = fp
                .div(&fp.element(num % p), &fp.element(den % p))
                .map_err(|_| LinalgError::NotSplit)?;
            reduced.push(v);
        }
        let mut rng = crate::field::Rng::from_seed(0x5eed);
        let factors = crate::poly::factor(&fp, &reduced, &mut rng);
        let mut roots: Vec<Scalar> = Vec::new();
        for (fac, mult) in &factors {
            if fac.len() != 2 || *mult != 1 {
                // nonlinear or repeated factor mod p: not split (mod-p
                // repetition can be an artifact, so try another prime)
                if *mult != 1 {
                    continue 'primes;
                }
                return Err(LinalgError::NotSplit);
            }
            // root of x + c is -c
            let Scalar::F(c0) = fac[0] else { unreachable!() };
            let r = (p - c0 % p) % p;
            let cand = rational_reconstruct(r, p).ok_or(LinalgError::NotSplit)?;
            let cand = Scalar::Q(cand);
            if !f.is_zero(&poly_eval(f, poly, &cand)) {
                return Err(LinalgError::NotSplit);
            }
            if roots.contains(&cand) {
                return Err(LinalgError::NotSplit);
            }
            roots.push(cand);
        }
        if roots.len() != deg {
            return Err(LinalgError::NotSplit);
        }
        return Ok(roots);
    }
    Err(LinalgError::NotSplit)
}

/// u/v with u ≡ v·r (mod p), |u|, v ≤ √(p/2), via the extended Euclidean
/// algorithm on (p, r).
fn rational_reconstruct(r: u64, p: u64) -> Option<num_rational::BigRational> {
    if r == 0 {
        return Some(num_rational::BigRational::from_integer(BigInt::from(0)));
    }
    let bound = ((p / 2) as f64).sqrt() as i128;
    let (mut r0, mut r1) = (p as i128, r as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 && r1 > bound {
        let q = r0 / r1;
        let (nr, nt) = (r0 - q * r1, t0 - q * t1);
        r0 = r1;
        r1 = nr;
        t0 = t1;
        t1 = nt;
    }
    if r1 == 0 || t1 == 0 || t1.abs() > bound {
        return None;
    }
    let (num, den) = if t1 < 0 { (-r1, -t1) } else { (r1, t1) };
    Some(num_rational::BigRational::new(
        BigInt::from(num),
        BigInt::from(den),
    ))
}

/// Joint eigenspace decomposition of commuting split semisimple matrices.
/// Returns (weight vector, eigenspace) pairs; the spaces are independent and
/// sum to the whole space.
pub fn simultaneous_eigenspaces(
    mats: &[Matrix],
) -> Result<Vec<(Vec<Scalar>, Subspace)>, LinalgError> {
    if mats.is_empty() {
        return Err(LinalgError::DimensionMismatch);
    }
    let f = mats[0].field.clone();
    let n = mats[0].rows;
    let mut pieces: Vec<(Vec<Scalar>, Subspace)> = vec![(vec![], Subspace::full(&f, n))];
    for m in mats {
        if m.rows != n || m.cols != n {
            return Err(LinalgError::DimensionMismatch);
        }
        let mut next = Vec::new();
        for (weights, space) in pieces {
            // restrict m to space: coordinates matrix
            let restricted = restrict_to_subspace(m, &space)?;
            let eigen = split_eigenvalues(&restricted)?;
            let mut covered = 0;
            for lam in eigen {
                // kernel of restricted - lam I
                let mut shifted = restricted.clone();
                for i in 0..shifted.rows {
                    let v = f.sub(shifted.at(i, i), &lam);
                    shifted.set(i, i, v);
                }
                let ker = shifted.kernel();
                if ker.dim() == 0 {
                    continue;
                }
                covered += ker.dim();
                // map back to ambient coordinates
                let rows: Vec<Vec<Scalar>> = ker
                    .basis_rows()
                    .iter()
                    .map(|coeffs| {
                        let mut v = vec![f.zero(); n];
                        for (j, c) in coeffs.iter().enumerate() {
                            if f.is_zero(c) {
                                continue;
                            }
                            for t in 0..n {
                                v[t] = f.add(&v[t], &f.mul(c, space.basis_matrix().at(j, t)));
                            }
                        }
                        v
                    })
                    .collect();
                let sub = Subspace::from_rows(&f, n, rows);
                let mut w = weights.clone();
                w.push(lam);
                next.push((w, sub));
            }
            if covered != space.dim() {
                return Err(LinalgError::NotSplit);
            }
        }
        pieces = next;
    }
    Ok(pieces)
}

/// The matrix of m acting on a subspace it stabilizes, in the subspace basis.
/// Errors with NotSplit if the subspace is not invariant.
pub fn restrict_to_subspace(m: &Matrix, space: &Subspace) -> Result<Matrix, LinalgError> {
    let f = &m.field;
    let d = space.dim();
    let mut out = Matrix::zeros(f, d, d);
    for i in 0..d {
        let v = space.basis_matrix().row_vec(i);
        let img = mat_vec(m, &v);
        let coords = space.coordinates(&img).ok_or(LinalgError::NotSplit)?;
        for j in 0..d {
            out.set(j, i, coords[j].clone());
        }
    }
    // out currently has columns = images; acting as matrix-on-coordinates
    Ok(out)
}

pub fn matrix_vec_mul(m: &Matrix, v: &[Scalar]) -> Vec<Scalar> {
    mat_vec(m, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::rationals()
    }

    #[test]
    fn rref_identity_and_zero() {
        let f = q();
        let id = Matrix::identity(&f, 3);
        let (r, rank, _) = id.rref();
        assert_eq!(rank, 3);
        assert_eq!(r, id);
        let z = Matrix::zeros(&f, 2, 2);
        let (r, rank, _) = z.rref();
        assert_eq!(rank, 0);
        assert!(r.is_zero());
    }

    #[test]
    fn rref_rank_one() {
        let f = q();
        let m = Matrix::from_int_rows(&f, &[vec![1, 2], vec![2, 4]]);
        let (_, rank, pivots) = m.rref();
        assert_eq!(rank, 1);
        assert_eq!(pivots, vec![0]);
    }

    #[test]
    fn kernel_basics() {
        let f = q();
        assert_eq!(Matrix::identity(&f, 4).kernel().dim(), 0);
        assert_eq!(Matrix::zeros(&f, 3, 3).kernel().dim(), 3);
        let f2 = Field::finite(2, 1).unwrap();
        let m = Matrix::from_int_rows(&f2, &[vec![1, 1]]);
        let k = m.kernel();
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&[f2.one(), f2.one()]));
    }

    #[test]
    fn rank_nullity_random() {
        let mut rng = Rng::from_seed(11);
        for spec in ["Q", "5", "2^2"] {
            let f = Field::parse(spec).unwrap();
            for _ in 0..20 {
                let rows = 2 + rng.below(5);
                let cols = 2 + rng.below(5);
                let mut m = Matrix::zeros(&f, rows, cols);
                for i in 0..rows {
                    for j in 0..cols {
                        m.set(i, j, f.random_scalar(&mut rng));
                    }
                }
                assert_eq!(m.rank() + m.kernel().dim(), cols);
            }
        }
    }

    #[test]
    fn intersect_and_sum() {
        let f = q();
        let e = |i: usize| {
            let mut v = vec![f.zero(); 3];
            v[i] = f.one();
            v
        };
        let v12 = Subspace::from_rows(&f, 3, vec![e(0), e(1)]);
        let v23 = Subspace::from_rows(&f, 3, vec![e(1), e(2)]);
        let meet = v12.intersect(&v23).unwrap();
        assert_eq!(meet.dim(), 1);
        assert!(meet.contains(&e(1)));
        let e1 = Subspace::from_rows(&f, 3, vec![e(0)]);
        let e2 = Subspace::from_rows(&f, 3, vec![e(1)]);
        assert_eq!(e1.intersect(&e2).unwrap().dim(), 0);
        assert_eq!(e1.sum(&e2).unwrap().dim(), 2);
        assert_eq!(v12.intersect(&v12).unwrap(), v12);
    }

    #[test]
    fn eigen_diag_gf2() {
        let f = Field::finite(2, 1).unwrap();
        let m = Matrix::from_int_rows(&f, &[vec![0, 0], vec![0, 1]]);
        let out = simultaneous_eigenspaces(&[m]).unwrap();
        assert_eq!(out.len(), 2);
        for (w, s) in out {
            assert_eq!(s.dim(), 1);
            assert_eq!(w.len(), 1);
        }
    }

    #[test]
    fn eigen_rational_integer_matrix() {
        let f = q();
        // matrix with eigenvalues 0, 1, -2
        let m = Matrix::from_int_rows(&f, &[vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, -2]]);
        let vals = split_eigenvalues(&m).unwrap();
        assert_eq!(vals.len(), 3);
        let out = simultaneous_eigenspaces(&[m]).unwrap();
        let total: usize = out.iter().map(|(_, s)| s.dim()).sum();
        assert_eq!(total, 3);
    }

    #[test]
    fn eigen_not_split_detected() {
        // nilpotent non-semisimple block
        let f = q();
        let m = Matrix::from_int_rows(&f, &[vec![0, 1], vec![0, 0]]);
        assert_eq!(split_eigenvalues(&m), Err(LinalgError::NotSplit));
    }

    #[test]
    fn eigen_vectors_satisfy_relation() {
        let f = Field::finite(5, 1).unwrap();
        let m1 = Matrix::from_int_rows(&f, &[vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 3]]);
        let m2 = Matrix::from_int_rows(&f, &[vec![1, 0, 0], vec![0, 4, 0], vec![0, 0, 4]]);
        let out = simultaneous_eigenspaces(&[m1.clone(), m2.clone()]).unwrap();
        let total: usize = out.iter().map(|(_, s)| s.dim()).sum();
        assert_eq!(total, 3);
        for (w, s) in &out {
            for v in s.basis_rows() {
                let i1 = matrix_vec_mul(&m1, &v);
                let i2 = matrix_vec_mul(&m2, &v);
                for j in 0..3 {
                    assert_eq!(i1[j], f.mul(&w[0], &v[j]));
                    assert_eq!(i2[j], f.mul(&w[1], &v[j]));
                }
            }
        }
    }

    #[test]
    fn min_poly_of_projection() {
        let f = q();
        let m = Matrix::from_int_rows(&f, &[vec![1, 0], vec![0, 0]]);
        let p = minimal_polynomial(&m);
        // x² - x
        assert_eq!(p.len(), 3);
        assert!(f.is_zero(&p[0]));
        assert_eq!(p[1], f.from_int(-1));
        assert_eq!(p[2], f.one());
    }

    #[test]
    fn solve_and_inverse() {
        let f = q();
        let m = Matrix::from_int_rows(&f, &[vec![2, 1], vec![1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(&f, 2));
        let b = vec![f.from_int(3), f.from_int(2)];
        let x = m.solve_right(&b).unwrap();
        // m x = b
        let got = matrix_vec_mul(&m, &x);
        assert_eq!(got, b);
    }
}
