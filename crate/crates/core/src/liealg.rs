//! Finite-dimensional Lie algebras presented by structure-constant tables:
//! construction of L_F(R) from a root datum, products and adjoints,
//! centralisers, generated subalgebras and ideals, derivation algebras,
//! direct-sum decomposition, basis scrambling, and the table file format.

use std::collections::HashMap;
use std::fmt;

use crate::field::{Field, FieldError, Rng, Scalar};
use crate::linalg::{Matrix, Subspace};
use crate::poly;
use crate::rootdata::RootDatum;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LieAlgError {
    DimensionMismatch,
    NotAbelian,
    Indecomposable,
    BadTable(String),
    Field(FieldError),
}

impl fmt::Display for LieAlgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieAlgError::DimensionMismatch => write!(f, "vector dimension mismatch"),
            LieAlgError::NotAbelian => write!(f, "span is not abelian"),
            LieAlgError::Indecomposable => write!(f, "algebra is indecomposable"),
            LieAlgError::BadTable(s) => write!(f, "bad structure table: {s}"),
            LieAlgError::Field(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for LieAlgError {}

impl From<FieldError> for LieAlgError {
    fn from(e: FieldError) -> Self {
        LieAlgError::Field(e)
    }
}

/// A Lie algebra given by its structure table T[i][j] = [e_i, e_j] stored
/// sparsely per basis pair.
#[derive(Clone)]
pub struct LieAlgebra {
    pub field: Field,
    pub dim: usize,
    /// table[i][j] = coordinates of [e_i, e_j] as (index, coefficient).
    table: Vec<Vec<Vec<(usize, Scalar)>>>,
}

impl fmt::Debug for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LieAlgebra(dim {}, over {})", self.dim, self.field.spec_string())
    }
}

/// A spanning set (possibly redundant) of a Cartan subalgebra of a parent
/// algebra, as row vectors.
#[derive(Debug, Clone)]
pub struct CartanSpan {
    pub vectors: Vec<Vec<Scalar>>,
}

/// How basis positions of a reference Chevalley algebra relate to the datum:
/// first `rank` entries are the Cartan basis h_i, the rest are X_α in the
/// datum's root order.
#[derive(Debug, Clone)]
pub struct BasisLabels {
    pub rank: usize,
    pub num_roots: usize,
}

impl BasisLabels {
    /// Basis index of X_α for root index `alpha`.
    pub fn root_position(&self, alpha: usize) -> usize {
        self.rank + alpha
    }

    pub fn is_root_position(&self, i: usize) -> bool {
        i >= self.rank
    }
}

impl LieAlgebra {
    pub fn from_table(
        field: &Field,
        dim: usize,
        table: Vec<Vec<Vec<(usize, Scalar)>>>,
    ) -> LieAlgebra {
        LieAlgebra { field: field.clone(), dim, table }
    }

    pub fn zero_algebra(field: &Field, dim: usize) -> LieAlgebra {
        LieAlgebra {
            field: field.clone(),
            dim,
            table: vec![vec![Vec::new(); dim]; dim],
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> &[(usize, Scalar)] {
        &self.table[i][j]
    }

    fn set_entry(&mut self, i: usize, j: usize, val: Vec<(usize, Scalar)>) {
        let neg: Vec<(usize, Scalar)> =
            val.iter().map(|(k, c)| (*k, self.field.neg(c))).collect();
        self.table[i][j] = val;
        self.table[j][i] = neg;
    }

    /// Bilinear product of coordinate vectors.
    pub fn multiply(&self, x: &[Scalar], y: &[Scalar]) -> Result<Vec<Scalar>, LieAlgError> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(LieAlgError::DimensionMismatch);
        }
        let f = &self.field;
        let mut out = vec![f.zero(); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if f.is_zero(xi) {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if f.is_zero(yj) {
                    continue;
                }
                let c = f.mul(xi, yj);
                for (k, t) in &self.table[i][j] {
                    out[*k] = f.add(&out[*k], &f.mul(&c, t));
                }
            }
        }
        Ok(out)
    }

    /// Matrix of ad_x = [x, ·] acting on coordinate columns.
    pub fn adjoint_matrix(&self, x: &[Scalar]) -> Result<Matrix, LieAlgError> {
        if x.len() != self.dim {
            return Err(LieAlgError::DimensionMismatch);
        }
        let f = &self.field;
        let mut m = Matrix::zeros(f, self.dim, self.dim);
        for (i, xi) in x.iter().enumerate() {
            if f.is_zero(xi) {
                continue;
            }
            for j in 0..self.dim {
                for (k, t) in &self.table[i][j] {
                    let v = f.add(m.at(*k, j), &f.mul(xi, t));
                    m.set(*k, j, v);
                }
            }
        }
        Ok(m)
    }

    /// Verify antisymmetry and the Jacobi identity on all basis triples.
    pub fn validate(&self) -> Result<(), LieAlgError> {
        let f = &self.field;
        let d = self.dim;
        let basis = |i: usize| {
            let mut v = vec![f.zero(); d];
            v[i] = f.one();
            v
        };
        for i in 0..d {
            let ei = basis(i);
            let sq = self.multiply(&ei, &ei)?;
            if sq.iter().any(|c| !f.is_zero(c)) {
                return Err(LieAlgError::BadTable(format!("[e{i},e{i}] != 0")));
            }
        }
        for i in 0..d {
            let ei = basis(i);
            for j in i + 1..d {
                let ej = basis(j);
                let ij = self.multiply(&ei, &ej)?;
                let ji = self.multiply(&ej, &ei)?;
                for t in 0..d {
                    if !f.is_zero(&f.add(&ij[t], &ji[t])) {
                        return Err(LieAlgError::BadTable(format!("antisymmetry at ({i},{j})")));
                    }
                }
                for k in j + 1..d {
                    let ek = basis(k);
                    let jk = self.multiply(&ej, &ek)?;
                    let ki = self.multiply(&ek, &ei)?;
                    let t1 = self.multiply(&ij, &ek)?;
                    let t2 = self.multiply(&jk, &ei)?;
                    let t3 = self.multiply(&ki, &ej)?;
                    for t in 0..d {
                        let s = f.add(&f.add(&t1[t], &t2[t]), &t3[t]);
                        if !f.is_zero(&s) {
                            return Err(LieAlgError::BadTable(format!(
                                "Jacobi fails on ({i},{j},{k})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Span of all [x, v] for x in `left` (rows) and v in `right` (rows).
    pub fn bracket_span(&self, left: &Subspace, right: &Subspace) -> Subspace {
        let mut rows = Vec::new();
        for x in left.basis_rows() {
            for y in right.basis_rows() {
                rows.push(self.multiply(&x, &y).expect("dims match"));
            }
        }
        Subspace::from_rows(&self.field, self.dim, rows)
    }

    /// C_V(S) = { v ∈ V : [s, v] = 0 for all s ∈ S }.
    pub fn centraliser(&self, v_space: &Subspace, s: &[Vec<Scalar>]) -> Subspace {
        let f = &self.field;
        let vb = v_space.basis_rows();
        if vb.is_empty() {
            return Subspace::zero(f, self.dim);
        }
        let mut system = Matrix::zeros(f, 0, vb.len());
        for sv in s {
            let images: Vec<Vec<Scalar>> =
                vb.iter().map(|v| self.multiply(sv, v).expect("dims")).collect();
            for coord in 0..self.dim {
                if images.iter().all(|img| f.is_zero(&img[coord])) {
                    continue;
                }
                let row: Vec<Scalar> = images.iter().map(|img| img[coord].clone()).collect();
                system.push_row(row);
            }
        }
        if system.rows == 0 {
            return v_space.clone();
        }
        let ker = system.kernel();
        let rows: Vec<Vec<Scalar>> = ker
            .basis_rows()
            .iter()
            .map(|coeffs| {
                let mut out = vec![f.zero(); self.dim];
                for (i, c) in coeffs.iter().enumerate() {
                    if f.is_zero(c) {
                        continue;
                    }
                    for t in 0..self.dim {
                        out[t] = f.add(&out[t], &f.mul(c, &vb[i][t]));
                    }
                }
                out
            })
            .collect();
        Subspace::from_rows(f, self.dim, rows)
    }

    /// Least subalgebra containing the generators.
    pub fn subalgebra_generated(&self, gens: &[Vec<Scalar>]) -> Subspace {
        let mut space = Subspace::from_rows(&self.field, self.dim, gens.to_vec());
        loop {
            let prod = self.bracket_span(&space, &space);
            let bigger = space.sum(&prod).expect("same ambient");
            if bigger.dim() == space.dim() {
                return space;
            }
            space = bigger;
        }
    }

    /// Least ideal containing the generators.
    pub fn ideal_closure(&self, gens: &[Vec<Scalar>]) -> Subspace {
        let full = Subspace::full(&self.field, self.dim);
        let mut space = Subspace::from_rows(&self.field, self.dim, gens.to_vec());
        loop {
            let prod = self.bracket_span(&full, &space);
            let bigger = space.sum(&prod).expect("same ambient");
            if bigger.dim() == space.dim() {
                return space;
            }
            space = bigger;
        }
    }

    /// Centre: all x with [x, L] = 0.
    pub fn centre(&self) -> Subspace {
        self.centraliser(
            &Subspace::full(&self.field, self.dim),
            &identity_rows(&self.field, self.dim),
        )
    }

    /// Derived subalgebra [L, L].
    pub fn derived(&self) -> Subspace {
        let full = Subspace::full(&self.field, self.dim);
        self.bracket_span(&full, &full)
    }

    /// The algebra structure on a bracket-closed subspace, with the basis
    /// matrix mapping new coordinates to ambient rows.
    pub fn subalgebra_as_algebra(&self, sub: &Subspace) -> (LieAlgebra, Matrix) {
        let f = &self.field;
        let d = sub.dim();
        let mut alg = LieAlgebra::zero_algebra(f, d);
        let rows = sub.basis_rows();
        for i in 0..d {
            for j in i + 1..d {
                let prod = self.multiply(&rows[i], &rows[j]).expect("dims");
                let coords = sub.coordinates(&prod).expect("subspace closed under bracket");
                let sparse: Vec<(usize, Scalar)> = coords
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !f.is_zero(c))
                    .collect();
                alg.set_entry(i, j, sparse);
            }
        }
        (alg, sub.basis_matrix().clone())
    }

    /// The quotient algebra sub/ideal for an ideal of `sub`. Returns the
    /// algebra and the projection/lift map.
    pub fn subquotient_algebra(
        &self,
        sub: &Subspace,
        ideal: &Subspace,
    ) -> (LieAlgebra, QuotientMap) {
        let f = &self.field;
        assert!(sub.contains_subspace(ideal), "ideal inside subalgebra");
        let mut reps: Vec<Vec<Scalar>> = Vec::new();
        let mut span = ideal.clone();
        for row in sub.basis_rows() {
            if !span.contains(&row) {
                reps.push(row.clone());
                span =
                    span.sum(&Subspace::from_rows(f, self.dim, vec![row])).expect("ambient");
            }
        }
        let d = reps.len();
        let map = QuotientMap {
            field: f.clone(),
            reps: Matrix::from_rows(f, reps.clone()),
            ideal: ideal.clone(),
        };
        let mut alg = LieAlgebra::zero_algebra(f, d);
        for i in 0..d {
            for j in i + 1..d {
                let prod = self.multiply(&reps[i], &reps[j]).expect("dims");
                let coords = map.project(&prod).expect("closed modulo ideal");
                let sparse: Vec<(usize, Scalar)> = coords
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !f.is_zero(c))
                    .collect();
                alg.set_entry(i, j, sparse);
            }
        }
        (alg, map)
    }
}

fn identity_rows(f: &Field, n: usize) -> Vec<Vec<Scalar>> {
    (0..n)
        .map(|i| {
            let mut v = vec![f.zero(); n];
            v[i] = f.one();
            v
        })
        .collect()
}

/// Projection of ambient vectors onto quotient coordinates, given
/// representatives and the ideal.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    field: Field,
    /// rows = ambient representatives of the quotient basis
    pub reps: Matrix,
    pub ideal: Subspace,
}

impl QuotientMap {
    /// Coordinates of the class of v over the representative basis, if v
    /// lies in reps-span + ideal.
    pub fn project(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        let f = &self.field;
        let mut rows = Vec::new();
        for i in 0..self.reps.rows {
            rows.push(self.reps.row_vec(i));
        }
        rows.extend(self.ideal.basis_rows());
        let m = Matrix::from_rows(f, rows);
        let coeffs = m.transpose().solve_right(v)?;
        Some(coeffs[..self.reps.rows].to_vec())
    }

    /// Ambient representative of quotient coordinates.
    pub fn lift(&self, coords: &[Scalar]) -> Vec<Scalar> {
        let f = &self.field;
        let n = self.reps.cols;
        let mut out = vec![f.zero(); n];
        for (i, c) in coords.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            for t in 0..n {
                out[t] = f.add(&out[t], &f.mul(c, self.reps.at(i, t)));
            }
        }
        out
    }
}

/// Build the Chevalley Lie algebra L_F(R): dimension rank + |Φ|, basis
/// (h_1..h_n, X_α in root order), products by (CB1)–(CB4).
pub fn chevalley_lie_algebra(
    datum: &RootDatum,
    field: &Field,
) -> (LieAlgebra, CartanSpan, BasisLabels) {
    let n = datum.rank;
    let nr = datum.num_roots();
    let dim = n + nr;
    let f = field;
    let mut alg = LieAlgebra::zero_algebra(f, dim);
    let labels = BasisLabels { rank: n, num_roots: nr };
    // (CB2): [X_α, h_i] = ⟨α, f_i⟩ X_α, so [h_i, X_α] = −⟨α, f_i⟩ X_α
    for i in 0..n {
        for alpha in 0..nr {
            let pos = labels.root_position(alpha);
            let w = datum.root_vector(alpha)[i];
            let c = f.neg(&f.from_int(w));
            if !f.is_zero(&c) {
                alg.set_entry(i, pos, vec![(pos, c)]);
            }
        }
    }
    for alpha in 0..nr {
        let pa = labels.root_position(alpha);
        for beta in alpha + 1..nr {
            let pb = labels.root_position(beta);
            if datum.negate(alpha) == beta {
                // (CB3): [X_{-α}, X_α] = Σ ⟨e_i, α∨⟩ h_i; with beta = -alpha
                // this reads [X_α, X_β] = β∨ since α = -β
                let cv = datum.coroot_vector(beta);
                let sparse: Vec<(usize, Scalar)> = cv
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (i, f.from_int(v)))
                    .filter(|(_, c)| !f.is_zero(c))
                    .collect();
                alg.set_entry(pa, pb, sparse);
            } else if let Some(gamma) = datum.sum_root(alpha, beta) {
                let nval = datum.n_constant(alpha, beta);
                let c = f.from_int(nval);
                if !f.is_zero(&c) {
                    alg.set_entry(pa, pb, vec![(labels.root_position(gamma), c)]);
                }
            }
        }
    }
    let cartan = CartanSpan {
        vectors: (0..n)
            .map(|i| {
                let mut v = vec![f.zero(); dim];
                v[i] = f.one();
                v
            })
            .collect(),
    };
    (alg, cartan, labels)
}

/// Conjugate the algebra by a random invertible matrix g (unit upper ×
/// permutation × unit lower × diagonal) and return the scrambled algebra,
/// the remixed image of the Cartan span, and the secret g (new-to-old
/// coordinate change).
pub fn scramble(
    algebra: &LieAlgebra,
    span: &CartanSpan,
    seed: u64,
) -> (LieAlgebra, CartanSpan, Matrix) {
    let f = &algebra.field;
    let d = algebra.dim;
    let mut rng = Rng::from_seed(seed);
    let small = |rng: &mut Rng| {
        // small entries keep ℚ tables tame; for finite fields any element
        if f.is_rationals() {
            f.from_int((rng.next_u64() % 5) as i64 - 2)
        } else {
            f.random_scalar(rng)
        }
    };
    // over ℚ the triangular factors are kept sparse so the inverse (and
    // hence the scrambled table) stays at small heights
    let density_keep = |rng: &mut Rng, d: usize| -> bool {
        if f.is_rationals() {
            rng.below(d.max(1)) < 3
        } else {
            true
        }
    };
    let mut upper = Matrix::identity(f, d);
    let mut lower = Matrix::identity(f, d);
    for i in 0..d {
        for j in i + 1..d {
            if density_keep(&mut rng, d) {
                upper.set(i, j, small(&mut rng));
            }
            if density_keep(&mut rng, d) {
                lower.set(j, i, small(&mut rng));
            }
        }
    }
    let mut perm = Matrix::zeros(f, d, d);
    let mut order: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        let j = rng.below(i + 1);
        order.swap(i, j);
    }
    for (i, &p) in order.iter().enumerate() {
        perm.set(i, p, f.one());
    }
    let mut diag = Matrix::zeros(f, d, d);
    for i in 0..d {
        let v = if f.is_rationals() {
            f.from_int(if rng.next_u64() % 2 == 0 { 1 } else { -1 })
        } else {
            f.random_nonzero(&mut rng)
        };
        diag.set(i, i, v);
    }
    let g = upper.mul(&perm).mul(&lower).mul(&diag);
    let ginv = g.inverse().expect("construction is invertible");
    // new table: T'[i][j] = g⁻¹ [g e_i, g e_j]
    let mut new = LieAlgebra::zero_algebra(f, d);
    let cols: Vec<Vec<Scalar>> =
        (0..d).map(|j| (0..d).map(|i| g.at(i, j).clone()).collect()).collect();
    for i in 0..d {
        for j in i + 1..d {
            let prod = algebra.multiply(&cols[i], &cols[j]).expect("dims");
            let back = crate::linalg::matrix_vec_mul(&ginv, &prod);
            let sparse: Vec<(usize, Scalar)> =
                back.into_iter().enumerate().filter(|(_, c)| !f.is_zero(c)).collect();
            new.set_entry(i, j, sparse);
        }
    }
    // span images, remixed by a random invertible coefficient matrix
    let m = span.vectors.len();
    let images: Vec<Vec<Scalar>> =
        span.vectors.iter().map(|h| crate::linalg::matrix_vec_mul(&ginv, h)).collect();
    let mix = loop {
        let mut mm = Matrix::zeros(f, m, m);
        for i in 0..m {
            for j in 0..m {
                mm.set(i, j, small(&mut rng));
            }
        }
        if mm.inverse().is_some() {
            break mm;
        }
    };
    let mixed: Vec<Vec<Scalar>> = (0..m)
        .map(|i| {
            let mut v = vec![f.zero(); d];
            for j in 0..m {
                let c = mix.at(i, j);
                if f.is_zero(c) {
                    continue;
                }
                for t in 0..d {
                    v[t] = f.add(&v[t], &f.mul(c, &images[j][t]));
                }
            }
            v
        })
        .collect();
    (new, CartanSpan { vectors: mixed }, g)
}

/// Basis of derivations of the algebra.
pub struct DerivationAlgebra {
    pub algebra: LieAlgebra,
    /// matrices of the derivation basis acting on the parent algebra
    pub matrices: Vec<Matrix>,
}

impl DerivationAlgebra {
    pub fn dim(&self) -> usize {
        self.matrices.len()
    }

    /// Coordinates of ad_x inside the derivation basis.
    pub fn ad_coordinates(&self, parent: &LieAlgebra, x: &[Scalar]) -> Option<Vec<Scalar>> {
        let ad = parent.adjoint_matrix(x).ok()?;
        self.coordinates_of_matrix(&ad)
    }

    pub fn coordinates_of_matrix(&self, m: &Matrix) -> Option<Vec<Scalar>> {
        let f = &m.field;
        let d2 = m.rows * m.cols;
        let mut basis = Matrix::zeros(f, d2, self.matrices.len());
        for (j, dm) in self.matrices.iter().enumerate() {
            for r in 0..m.rows {
                for c in 0..m.cols {
                    basis.set(r * m.cols + c, j, dm.at(r, c).clone());
                }
            }
        }
        let flat: Vec<Scalar> =
            (0..m.rows).flat_map(|r| (0..m.cols).map(move |c| m.at(r, c).clone())).collect();
        basis.solve_right(&flat)
    }
}

/// Incremental row eliminator over a fixed number of unknowns; keeps a
/// normalized pivot row per leading column.
pub struct Eliminator {
    field: Field,
    cols: usize,
    rows: Vec<(usize, Vec<Scalar>)>,
    by_col: HashMap<usize, usize>,
}

impl Eliminator {
    pub fn new(field: &Field, cols: usize) -> Eliminator {
        Eliminator { field: field.clone(), cols, rows: Vec::new(), by_col: HashMap::new() }
    }

    pub fn add_row(&mut self, mut row: Vec<Scalar>) {
        let f = self.field.clone();
        let mut start = 0usize;
        loop {
            let lead = match (start..self.cols).find(|&j| !f.is_zero(&row[j])) {
                None => return,
                Some(j) => j,
            };
            match self.by_col.get(&lead) {
                Some(&idx) => {
                    let c = row[lead].clone();
                    let pivot_row = self.rows[idx].1.clone();
                    for j in lead..self.cols {
                        row[j] = f.sub(&row[j], &f.mul(&c, &pivot_row[j]));
                    }
                    start = lead;
                }
                None => {
                    let inv = f.inv(&row[lead]).unwrap();
                    for j in lead..self.cols {
                        row[j] = f.mul(&row[j], &inv);
                    }
                    self.by_col.insert(lead, self.rows.len());
                    self.rows.push((lead, row));
                    return;
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Null space basis of the accumulated system.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let f = &self.field;
        let mut rows = self.rows.clone();
        rows.sort_by_key(|(c, _)| *c);
        for i in (0..rows.len()).rev() {
            let (lead_i, row_i) = rows[i].clone();
            for j in 0..i {
                let c = rows[j].1[lead_i].clone();
                if f.is_zero(&c) {
                    continue;
                }
                for t in 0..self.cols {
                    let v = f.sub(&rows[j].1[t], &f.mul(&c, &row_i[t]));
                    rows[j].1[t] = v;
                }
            }
        }
        let pivot_cols: std::collections::HashSet<usize> =
            rows.iter().map(|(c, _)| *c).collect();
        let mut out = Vec::new();
        for free in 0..self.cols {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (lead, row) in &rows {
                v[*lead] = f.neg(&row[free]);
            }
            out.push(v);
        }
        out
    }
}

/// Compute the derivation algebra, optionally restricted to derivations that
/// are block diagonal with respect to a grading (a list of subspaces that
/// decompose the whole space).
pub fn derivation_algebra(
    algebra: &LieAlgebra,
    grading: Option<&[Subspace]>,
) -> DerivationAlgebra {
    let f = &algebra.field;
    let d = algebra.dim;
    let (basis_rows, blocks): (Vec<Vec<Scalar>>, Vec<(usize, usize)>) = match grading {
        None => (identity_rows(f, d), vec![(0, d)]),
        Some(parts) => {
            let mut rows = Vec::new();
            let mut blocks = Vec::new();
            let mut start = 0usize;
            for p in parts {
                let b = p.basis_rows();
                blocks.push((start, b.len()));
                start += b.len();
                rows.extend(b);
            }
            assert_eq!(start, d, "grading must decompose the space");
            (rows, blocks)
        }
    };
    let p_mat = Matrix::from_rows(f, basis_rows);
    let p_inv = p_mat.inverse().expect("grading basis invertible");
    // vector with adapted coords c has ambient coords pᵀ·c
    let pt = p_mat.transpose();
    let pit = p_inv.transpose();
    let adapted: Vec<Vec<Vec<Scalar>>> = (0..d)
        .map(|i| {
            let bi = p_mat.row_vec(i);
            (0..d)
                .map(|j| {
                    let bj = p_mat.row_vec(j);
                    let prod = algebra.multiply(&bi, &bj).expect("dims");
                    crate::linalg::matrix_vec_mul(&pit, &prod)
                })
                .collect()
        })
        .collect();
    let mut unknown_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut unknown_list: Vec<(usize, usize)> = Vec::new();
    for &(start, len) in &blocks {
        for r in start..start + len {
            for c in start..start + len {
                unknown_index.insert((r, c), unknown_list.len());
                unknown_list.push((r, c));
            }
        }
    }
    let u = unknown_list.len();
    let mut elim = Eliminator::new(f, u);
    // Leibniz per (i < j, coordinate s):
    // Σ_k T[i][j]_k D[s][k] − Σ_t D[t][i] T[t][j]_s − Σ_t D[t][j] T[i][t]_s = 0
    'outer: for i in 0..d {
        for j in i + 1..d {
            for s in 0..d {
                let mut row = vec![f.zero(); u];
                let mut touched = false;
                for (k, tk) in adapted[i][j].iter().enumerate() {
                    if f.is_zero(tk) {
                        continue;
                    }
                    if let Some(&ui) = unknown_index.get(&(s, k)) {
                        row[ui] = f.add(&row[ui], tk);
                        touched = true;
                    }
                }
                for t in 0..d {
                    let c1 = &adapted[t][j][s];
                    if !f.is_zero(c1) {
                        if let Some(&ui) = unknown_index.get(&(t, i)) {
                            row[ui] = f.sub(&row[ui], c1);
                            touched = true;
                        }
                    }
                    let c2 = &adapted[i][t][s];
                    if !f.is_zero(c2) {
                        if let Some(&ui) = unknown_index.get(&(t, j)) {
                            row[ui] = f.sub(&row[ui], c2);
                            touched = true;
                        }
                    }
                }
                if touched {
                    elim.add_row(row);
                }
                if elim.rank() == u {
                    break 'outer;
                }
            }
        }
    }
    let kernel = elim.kernel();
    // ambient action: D_amb = pᵀ · D_adapted · (pᵀ)⁻¹
    let mut matrices = Vec::new();
    for sol in kernel {
        let mut dm = Matrix::zeros(f, d, d);
        for (ui, &(r, c)) in unknown_list.iter().enumerate() {
            if !f.is_zero(&sol[ui]) {
                dm.set(r, c, sol[ui].clone());
            }
        }
        let amb = pt.mul(&dm).mul(&pit);
        matrices.push(amb);
    }
    let m = matrices.len();
    let mut flat_basis = Matrix::zeros(f, d * d, m);
    for (j, dm) in matrices.iter().enumerate() {
        for r in 0..d {
            for c in 0..d {
                flat_basis.set(r * d + c, j, dm.at(r, c).clone());
            }
        }
    }
    let mut alg = LieAlgebra::zero_algebra(f, m);
    for a in 0..m {
        for b in a + 1..m {
            let comm = matrices[a].mul(&matrices[b]).sub(&matrices[b].mul(&matrices[a]));
            let flat: Vec<Scalar> = (0..d)
                .flat_map(|r| (0..d).map(|c| comm.at(r, c).clone()).collect::<Vec<_>>())
                .collect();
            let coords = flat_basis
                .solve_right(&flat)
                .expect("commutator of derivations is a derivation");
            let sparse: Vec<(usize, Scalar)> =
                coords.into_iter().enumerate().filter(|(_, c)| !f.is_zero(c)).collect();
            alg.set_entry(a, b, sparse);
        }
    }
    DerivationAlgebra { algebra: alg, matrices }
}

/// Split an algebra into indecomposable ideal summands using generalized
/// eigenspaces of random centroid elements.
pub fn direct_sum_decomposition(algebra: &LieAlgebra, rng: &mut Rng) -> Vec<Subspace> {
    let f = &algebra.field;
    let d = algebra.dim;
    // centroid: φ with φ[x,y] = [φx, y] for all x, y
    let mut elim = Eliminator::new(f, d * d);
    let idx = |r: usize, c: usize| r * d + c;
    for i in 0..d {
        for j in 0..d {
            for s in 0..d {
                let mut row = vec![f.zero(); d * d];
                let mut touched = false;
                for (k, tk) in algebra.table[i][j].iter() {
                    row[idx(s, *k)] = f.add(&row[idx(s, *k)], tk);
                    touched = true;
                }
                for t in 0..d {
                    for (ss, c) in algebra.table[t][j].iter() {
                        if *ss == s {
                            row[idx(t, i)] = f.sub(&row[idx(t, i)], c);
                            touched = true;
                        }
                    }
                }
                if touched {
                    elim.add_row(row);
                }
            }
        }
    }
    let cent_basis: Vec<Matrix> = elim
        .kernel()
        .into_iter()
        .map(|flat| {
            let mut m = Matrix::zeros(f, d, d);
            for r in 0..d {
                for c in 0..d {
                    if !f.is_zero(&flat[idx(r, c)]) {
                        m.set(r, c, flat[idx(r, c)].clone());
                    }
                }
            }
            m
        })
        .collect();
    if cent_basis.len() <= 1 || f.is_rationals() {
        return vec![Subspace::full(f, d)];
    }
    // combine Fitting partitions of random centroid elements by meets; each
    // partition is computed on the whole algebra, so no stability issues
    // between non-commuting centroid elements arise
    let mut best: Vec<Subspace> = vec![Subspace::full(f, d)];
    for _ in 0..60 {
        let mut g = Matrix::zeros(f, d, d);
        for b in &cent_basis {
            let c = f.random_scalar(rng);
            if f.is_zero(&c) {
                continue;
            }
            g = g.add(&b.scale(&c));
        }
        let parts = fitting_partition(&g, rng);
        if parts.len() <= 1 {
            continue;
        }
        let mut meet: Vec<Subspace> = Vec::new();
        for p in &best {
            for q in &parts {
                let m = p.intersect(q).expect("ambient");
                if m.dim() > 0 {
                    meet.push(m);
                }
            }
        }
        let total: usize = meet.iter().map(|m| m.dim()).sum();
        if total == d && meet.len() > best.len() {
            best = meet;
        }
        if best.iter().all(|p| p.dim() == 1) {
            break;
        }
    }
    best
}

/// Generalized eigenspace components of a centroid element on the whole
/// algebra; these are ideals and sum to everything.
fn fitting_partition(g: &Matrix, rng: &mut Rng) -> Vec<Subspace> {
    let f = &g.field;
    let d = g.rows;
    let minpoly = crate::linalg::minimal_polynomial(g);
    let facs = poly::factor(f, &minpoly, rng);
    if facs.len() <= 1 {
        return vec![Subspace::full(f, d)];
    }
    let mut out = Vec::new();
    for (fac, mult) in facs {
        let mut power = Matrix::identity(f, d);
        let fac_mat = eval_poly_matrix(f, &fac, g);
        for _ in 0..mult {
            power = power.mul(&fac_mat);
        }
        out.push(power.kernel());
    }
    out
}

fn eval_poly_matrix(f: &Field, poly: &[Scalar], m: &Matrix) -> Matrix {
    let n = m.rows;
    let mut acc = Matrix::zeros(f, n, n);
    for c in poly.iter().rev() {
        acc = acc.mul(m);
        for i in 0..n {
            let v = f.add(acc.at(i, i), c);
            acc.set(i, i, v);
        }
    }
    acc
}

fn lift_coords(space: &Subspace, coeffs: &[Scalar]) -> Vec<Scalar> {
    let f = &space.field;
    let mut out = vec![f.zero(); space.ambient];
    for (i, c) in coeffs.iter().enumerate() {
        if f.is_zero(c) {
            continue;
        }
        for t in 0..space.ambient {
            out[t] = f.add(&out[t], &f.mul(c, space.basis_matrix().at(i, t)));
        }
    }
    out
}

/// Structure-table text format: header `dim d field <spec>`, then lines
/// `i j k <scalar>` with i < j and only nonzero entries (0-based indices).
pub fn write_structure_table(algebra: &LieAlgebra) -> String {
    let f = &algebra.field;
    let mut out = format!("dim {} field {}\n", algebra.dim, f.spec_string());
    for i in 0..algebra.dim {
        for j in i + 1..algebra.dim {
            let mut entries = algebra.table[i][j].clone();
            entries.sort_by_key(|(k, _)| *k);
            for (k, c) in entries {
                if !f.is_zero(&c) {
                    out.push_str(&format!("{i} {j} {k} {}\n", f.scalar_to_string(&c)));
                }
            }
        }
    }
    out
}

pub fn read_structure_table(text: &str) -> Result<LieAlgebra, LieAlgError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| LieAlgError::BadTable("empty".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "dim" || toks[2] != "field" {
        return Err(LieAlgError::BadTable(format!("bad header `{header}`")));
    }
    let dim: usize = toks[1].parse().map_err(|_| LieAlgError::BadTable("bad dim".into()))?;
    let field = Field::parse(toks[3])?;
    let mut alg = LieAlgebra::zero_algebra(&field, dim);
    let mut entries: HashMap<(usize, usize), Vec<(usize, Scalar)>> = HashMap::new();
    for line in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 4 {
            return Err(LieAlgError::BadTable(format!("bad line `{line}`")));
        }
        let i: usize = toks[0].parse().map_err(|_| LieAlgError::BadTable(line.into()))?;
        let j: usize = toks[1].parse().map_err(|_| LieAlgError::BadTable(line.into()))?;
        let k: usize = toks[2].parse().map_err(|_| LieAlgError::BadTable(line.into()))?;
        if i >= j || j >= dim || k >= dim {
            return Err(LieAlgError::BadTable(format!("bad indices `{line}`")));
        }
        let c = field.scalar_from_string(toks[3])?;
        entries.entry((i, j)).or_default().push((k, c));
    }
    for ((i, j), sparse) in entries {
        alg.set_entry(i, j, sparse);
    }
    Ok(alg)
}

pub fn write_cartan_span(field: &Field, span: &CartanSpan) -> String {
    let mut out = String::new();
    for v in &span.vectors {
        let parts: Vec<String> = v.iter().map(|c| field.scalar_to_string(c)).collect();
        out.push_str(&parts.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_cartan_span(field: &Field, dim: usize, text: &str) -> Result<CartanSpan, LieAlgError> {
    let mut vectors = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != dim {
            return Err(LieAlgError::BadTable(format!("span row has {} entries", parts.len())));
        }
        let v: Result<Vec<Scalar>, FieldError> =
            parts.iter().map(|p| field.scalar_from_string(p)).collect();
        vectors.push(v?);
    }
    Ok(CartanSpan { vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::{build_root_datum, DynkinType, Isogeny};

    fn basis(f: &Field, d: usize, i: usize) -> Vec<Scalar> {
        let mut v = vec![f.zero(); d];
        v[i] = f.one();
        v
    }

    #[test]
    fn a1_adjoint_over_q() {
        let d = build_root_datum(DynkinType::A, 1, Isogeny::Adjoint).unwrap();
        let f = Field::rationals();
        let (alg, _, labels) = chevalley_lie_algebra(&d, &f);
        assert_eq!(alg.dim, 3);
        // [X_{-α}, X_α] = α∨-image = 2h₁ in the adjoint lattice
        let pos = labels.root_position(0);
        let neg = labels.root_position(d.negate(0));
        let xm = basis(&f, 3, neg);
        let xp = basis(&f, 3, pos);
        let h = alg.multiply(&xm, &xp).unwrap();
        assert_eq!(h[0], f.from_int(2));
        alg.validate().unwrap();
    }

    #[test]
    fn dims_of_known_algebras() {
        let f2 = Field::finite(2, 1).unwrap();
        let g2 = build_root_datum(DynkinType::G, 2, Isogeny::Adjoint).unwrap();
        assert_eq!(chevalley_lie_algebra(&g2, &f2).0.dim, 14);
        let d4 = build_root_datum(DynkinType::D, 4, Isogeny::SimplyConnected).unwrap();
        assert_eq!(chevalley_lie_algebra(&d4, &f2).0.dim, 28);
    }

    #[test]
    fn d4_sc_gf2_central_ideal() {
        let f2 = Field::finite(2, 1).unwrap();
        let d4 = build_root_datum(DynkinType::D, 4, Isogeny::SimplyConnected).unwrap();
        let (alg, _, _) = chevalley_lie_algebra(&d4, &f2);
        assert_eq!(alg.centre().dim(), 2);
    }

    #[test]
    fn d4_ad_gf2_root_ideal_dim_26() {
        let f2 = Field::finite(2, 1).unwrap();
        let d4 = build_root_datum(DynkinType::D, 4, Isogeny::Adjoint).unwrap();
        let (alg, _, labels) = chevalley_lie_algebra(&d4, &f2);
        let gens: Vec<Vec<Scalar>> = (0..d4.num_roots())
            .map(|a| basis(&f2, alg.dim, labels.root_position(a)))
            .collect();
        let ideal = alg.ideal_closure(&gens);
        assert_eq!(ideal.dim(), 26);
    }

    #[test]
    fn jacobi_across_fields_on_g2_b3() {
        for spec in ["Q", "2", "3", "2^2"] {
            let f = Field::parse(spec).unwrap();
            for (t, n) in [(DynkinType::G, 2), (DynkinType::B, 3)] {
                let d = build_root_datum(t, n, Isogeny::Adjoint).unwrap();
                let (alg, _, _) = chevalley_lie_algebra(&d, &f);
                alg.validate().unwrap();
            }
        }
    }

    #[test]
    fn multiply_and_adjoint() {
        let f = Field::finite(3, 1).unwrap();
        let d = build_root_datum(DynkinType::G, 2, Isogeny::Adjoint).unwrap();
        let (alg, _, labels) = chevalley_lie_algebra(&d, &f);
        // [X_{α1}, X_{α2}] = ±X_{α1+α2}, nonzero mod 3
        let i1 = d.simple_root(0);
        let i2 = d.simple_root(1);
        let x1 = basis(&f, alg.dim, labels.root_position(i1));
        let x2 = basis(&f, alg.dim, labels.root_position(i2));
        let prod = alg.multiply(&x1, &x2).unwrap();
        let sum = d.root_index(&[1, 1]).unwrap();
        assert!(!f.is_zero(&prod[labels.root_position(sum)]));
        // ad_h is diagonal on the reference basis
        let h = basis(&f, alg.dim, 0);
        let ad = alg.adjoint_matrix(&h).unwrap();
        for i in 0..alg.dim {
            for j in 0..alg.dim {
                if i != j {
                    assert!(f.is_zero(ad.at(i, j)));
                }
            }
        }
        let mut rng = Rng::from_seed(5);
        for _ in 0..10 {
            let x: Vec<Scalar> = (0..alg.dim).map(|_| f.random_scalar(&mut rng)).collect();
            let sq = alg.multiply(&x, &x).unwrap();
            assert!(sq.iter().all(|c| f.is_zero(c)));
        }
    }

    #[test]
    fn centraliser_of_zero_and_cartan() {
        let f = Field::finite(5, 1).unwrap();
        let d = build_root_datum(DynkinType::A, 2, Isogeny::Adjoint).unwrap();
        let (alg, cartan, _) = chevalley_lie_algebra(&d, &f);
        let full = Subspace::full(&f, alg.dim);
        let z = vec![f.zero(); alg.dim];
        assert_eq!(alg.centraliser(&full, &[z]).dim(), alg.dim);
        let h_space = Subspace::from_rows(&f, alg.dim, cartan.vectors.clone());
        let c = alg.centraliser(&h_space, &cartan.vectors);
        assert_eq!(c.dim(), 2);
    }

    #[test]
    fn scramble_round_trip() {
        let f = Field::finite(17, 1).unwrap();
        let d = build_root_datum(DynkinType::A, 2, Isogeny::Adjoint).unwrap();
        let (alg, cartan, _) = chevalley_lie_algebra(&d, &f);
        let (scrambled, _span, g) = scramble(&alg, &cartan, 42);
        let ginv = g.inverse().unwrap();
        let cols: Vec<Vec<Scalar>> = (0..alg.dim)
            .map(|j| (0..alg.dim).map(|i| ginv.at(i, j).clone()).collect())
            .collect();
        for i in 0..alg.dim {
            for j in 0..alg.dim {
                let prod = scrambled.multiply(&cols[i], &cols[j]).unwrap();
                let back = crate::linalg::matrix_vec_mul(&g, &prod);
                let expect =
                    alg.multiply(&basis(&f, alg.dim, i), &basis(&f, alg.dim, j)).unwrap();
                assert_eq!(back, expect);
            }
        }
    }

    #[test]
    fn scramble_deterministic() {
        let f = Field::finite(17, 1).unwrap();
        let d = build_root_datum(DynkinType::A, 2, Isogeny::Adjoint).unwrap();
        let (alg, cartan, _) = chevalley_lie_algebra(&d, &f);
        let (s1, _, _) = scramble(&alg, &cartan, 7);
        let (s2, _, _) = scramble(&alg, &cartan, 7);
        assert_eq!(write_structure_table(&s1), write_structure_table(&s2));
    }

    #[test]
    fn derivation_dim_of_abelian() {
        let f = Field::finite(2, 1).unwrap();
        let alg = LieAlgebra::zero_algebra(&f, 1);
        let der = derivation_algebra(&alg, None);
        assert_eq!(der.dim(), 1);
    }

    #[test]
    fn derivations_satisfy_leibniz() {
        let f = Field::finite(2, 1).unwrap();
        let d = build_root_datum(DynkinType::A, 2, Isogeny::SimplyConnected).unwrap();
        let (alg, _, _) = chevalley_lie_algebra(&d, &f);
        let der = derivation_algebra(&alg, None);
        assert!(der.dim() >= alg.dim - alg.centre().dim());
        for dm in &der.matrices {
            for i in 0..alg.dim {
                for j in 0..alg.dim {
                    let ei = basis(&f, alg.dim, i);
                    let ej = basis(&f, alg.dim, j);
                    let lhs = {
                        let prod = alg.multiply(&ei, &ej).unwrap();
                        crate::linalg::matrix_vec_mul(dm, &prod)
                    };
                    let rhs = {
                        let dei = crate::linalg::matrix_vec_mul(dm, &ei);
                        let dej = crate::linalg::matrix_vec_mul(dm, &ej);
                        let a = alg.multiply(&dei, &ej).unwrap();
                        let b = alg.multiply(&ei, &dej).unwrap();
                        (0..alg.dim).map(|t| f.add(&a[t], &b[t])).collect::<Vec<_>>()
                    };
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn decompose_abelian_two_dim() {
        let f = Field::finite(2, 1).unwrap();
        let alg = LieAlgebra::zero_algebra(&f, 2);
        let mut rng = Rng::from_seed(1);
        let parts = direct_sum_decomposition(&alg, &mut rng);
        assert_eq!(parts.len(), 2);
        assert!(parts.iter().all(|p| p.dim() == 1));
    }

    #[test]
    fn table_io_round_trip() {
        let f = Field::finite(2, 2).unwrap();
        let d = build_root_datum(DynkinType::A, 2, Isogeny::Adjoint).unwrap();
        let (alg, cartan, _) = chevalley_lie_algebra(&d, &f);
        let text = write_structure_table(&alg);
        let back = read_structure_table(&text).unwrap();
        assert_eq!(write_structure_table(&back), text);
        let span_text = write_cartan_span(&f, &cartan);
        let span = read_cartan_span(&f, alg.dim, &span_text).unwrap();
        assert_eq!(span.vectors, cartan.vectors);
    }

    #[test]
    fn ideal_closure_of_zero() {
        let f = Field::finite(3, 1).unwrap();
        let d = build_root_datum(DynkinType::A, 2, Isogeny::Adjoint).unwrap();
        let (alg, _, _) = chevalley_lie_algebra(&d, &f);
        let z = vec![f.zero(); alg.dim];
        assert_eq!(alg.ideal_closure(&[z]).dim(), 0);
    }

    #[test]
    fn b3_short_roots_generate_proper_ideal() {
        let f = Field::finite(2, 1).unwrap();
        let d = build_root_datum(DynkinType::B, 3, Isogeny::Adjoint).unwrap();
        let (alg, _, labels) = chevalley_lie_algebra(&d, &f);
        let gens: Vec<Vec<Scalar>> = (0..d.num_roots())
            .filter(|&a| d.half_length(a) == 1)
            .map(|a| basis(&f, alg.dim, labels.root_position(a)))
            .collect();
        let ideal = alg.ideal_closure(&gens);
        assert!(ideal.dim() < alg.dim);
        for i in 0..d.rank {
            let h = basis(&f, alg.dim, i);
            for row in ideal.basis_rows() {
                let img = alg.multiply(&h, &row).unwrap();
                assert!(ideal.contains(&img));
            }
        }
    }
}
