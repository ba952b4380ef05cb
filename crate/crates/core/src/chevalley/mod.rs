//! The end-to-end recovery pipeline: root-space decomposition, frame
//! finding, root identification, scaling to a Chevalley basis, verification
//! against (CB1)–(CB4), and root-datum inference.

pub mod frame;

use std::collections::HashMap;
use std::fmt;

use crate::field::{Field, Rng, Scalar};
use crate::liealg::{CartanSpan, LieAlgebra};
use crate::linalg::Matrix;
use crate::rootdata::{isogeny_labels, DynkinType, RootDatum};

pub use frame::{
    find_frame, find_root_spaces, frame_method_a2, frame_method_b2sc, frame_method_c,
    frame_method_der, ChevalleyFrame, FrameLine, FrameMethod, RootSpaceDecomposition,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PipelineError {
    NotSplit,
    NotAbelian,
    MultiplicityMismatch,
    RetryExhausted,
    IdentificationFailed,
    ScalingInconsistent,
    NoSolution,
    CocliqueNotFound,
    NoCandidateFits,
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PipelineError::NotSplit => "Cartan span is not split semisimple",
            PipelineError::NotAbelian => "Cartan span is not abelian",
            PipelineError::MultiplicityMismatch => "root multiplicities do not match the datum",
            PipelineError::RetryExhausted => "Las Vegas retry budget exhausted",
            PipelineError::IdentificationFailed => "no consistent root identification",
            PipelineError::ScalingInconsistent => "scaling system unsolvable",
            PipelineError::NoSolution => "no quadratic solution (wrong partner space)",
            PipelineError::CocliqueNotFound => "coclique structure not found",
            PipelineError::NoCandidateFits => "no candidate root datum fits",
        };
        write!(f, "{s}")
    }
}

impl std::error::Error for PipelineError {}

/// A recovered Chevalley basis: the bijection ι (root index → frame line),
/// the chosen root vectors in the input coordinates, and the Cartan basis.
#[derive(Debug, Clone)]
pub struct ChevalleyBasisResult {
    /// assignment[r] = frame line index for root r (datum root order)
    pub assignment: Vec<usize>,
    pub x_vectors: Vec<Vec<Scalar>>,
    pub h_vectors: Vec<Vec<Scalar>>,
    pub method: FrameMethod,
    pub attempts_used: usize,
}

/// Outcome of verification, reporting the first violated relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyOutcome {
    Pass,
    Fail { relation: &'static str, detail: String },
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, VerifyOutcome::Pass)
    }
}

/// Check (CB1)–(CB4) literally against the datum's structure constants
/// reduced into the field.
pub fn verify_chevalley_basis(
    algebra: &LieAlgebra,
    datum: &RootDatum,
    x_vectors: &[Vec<Scalar>],
    h_vectors: &[Vec<Scalar>],
) -> VerifyOutcome {
    let f = &algebra.field;
    let n = datum.rank;
    let nr = datum.num_roots();
    if x_vectors.len() != nr || h_vectors.len() != n {
        return VerifyOutcome::Fail { relation: "shape", detail: "wrong vector counts".into() };
    }
    let vec_eq = |a: &[Scalar], b: &[Scalar]| a.iter().zip(b).all(|(x, y)| x == y);
    let scale = |v: &[Scalar], c: &Scalar| -> Vec<Scalar> {
        v.iter().map(|x| f.mul(x, c)).collect()
    };
    // (CB1)
    for i in 0..n {
        for j in 0..n {
            let p = algebra.multiply(&h_vectors[i], &h_vectors[j]).expect("dims");
            if p.iter().any(|c| !f.is_zero(c)) {
                return VerifyOutcome::Fail {
                    relation: "CB1",
                    detail: format!("[h{i}, h{j}] != 0"),
                };
            }
        }
    }
    // (CB2): [X_α, h_i] = ⟨α, f_i⟩ X_α
    for alpha in 0..nr {
        let rv = datum.root_vector(alpha);
        for i in 0..n {
            let lhs = algebra.multiply(&x_vectors[alpha], &h_vectors[i]).expect("dims");
            let rhs = scale(&x_vectors[alpha], &f.from_int(rv[i]));
            if !vec_eq(&lhs, &rhs) {
                return VerifyOutcome::Fail {
                    relation: "CB2",
                    detail: format!("root {alpha}, h{i}"),
                };
            }
        }
    }
    // (CB3): [X_{-α}, X_α] = Σ ⟨e_i, α∨⟩ h_i
    for alpha in 0..nr {
        let neg = datum.negate(alpha);
        let lhs = algebra.multiply(&x_vectors[neg], &x_vectors[alpha]).expect("dims");
        let cv = datum.coroot_vector(alpha);
        let mut rhs = vec![f.zero(); algebra.dim];
        for i in 0..n {
            let c = f.from_int(cv[i]);
            if f.is_zero(&c) {
                continue;
            }
            for t in 0..algebra.dim {
                rhs[t] = f.add(&rhs[t], &f.mul(&c, &h_vectors[i][t]));
            }
        }
        if !vec_eq(&lhs, &rhs) {
            return VerifyOutcome::Fail { relation: "CB3", detail: format!("root {alpha}") };
        }
    }
    // (CB4)
    for alpha in 0..nr {
        for beta in 0..nr {
            if alpha == beta || datum.negate(alpha) == beta {
                continue;
            }
            let lhs = algebra.multiply(&x_vectors[alpha], &x_vectors[beta]).expect("dims");
            let rhs = match datum.sum_root(alpha, beta) {
                Some(gamma) => {
                    scale(&x_vectors[gamma], &f.from_int(datum.n_constant(alpha, beta)))
                }
                None => vec![f.zero(); algebra.dim],
            };
            if !vec_eq(&lhs, &rhs) {
                return VerifyOutcome::Fail {
                    relation: "CB4",
                    detail: format!("roots {alpha},{beta}"),
                };
            }
        }
    }
    VerifyOutcome::Pass
}

/// Match the datum's multiplicity classes (keys in X ⊗ F_p) to the observed
/// weight classes by a linear extension of a basis assignment. Returns every
/// consistent map root → Some(class index) / None (weight-zero roots).
fn class_matchings(
    algebra: &LieAlgebra,
    f: &Field,
    datum: &RootDatum,
    decomposition: &RootSpaceDecomposition,
    limit: usize,
) -> Vec<Vec<Option<usize>>> {
    let p = f.characteristic();
    let nr = datum.num_roots();
    let n = datum.rank;
    // predicted keys and class sizes
    let keys: Vec<Vec<i64>> = (0..nr).map(|r| datum.class_key(r, p)).collect();
    let mut size_of_key: HashMap<Vec<i64>, usize> = HashMap::new();
    for k in &keys {
        *size_of_key.entry(k.clone()).or_insert(0) += 1;
    }
    // keys as field vectors
    let to_field = |k: &Vec<i64>| -> Vec<Scalar> {
        k.iter().map(|&v| f.from_int(v)).collect()
    };
    let distinct_keys: Vec<Vec<i64>> = {
        let mut seen = Vec::new();
        for k in &keys {
            if k.iter().any(|&v| v != 0) && !seen.contains(k) {
                seen.push(k.clone());
            }
        }
        seen
    };
    // greedy basis of the key span
    let mut basis_keys: Vec<Vec<i64>> = Vec::new();
    let mut echelon = Matrix::zeros(f, 0, n);
    for k in &distinct_keys {
        let mut m = echelon.clone();
        m.push_row(to_field(k));
        if m.rank() > echelon.rows {
            echelon.push_row(to_field(k));
            echelon.rref_in_place();
            basis_keys.push(k.clone());
        }
    }
    let weight_key =
        |w: &[Scalar]| -> Vec<String> { w.iter().map(|c| f.scalar_to_string(c)).collect() };
    let mut class_by_weight: HashMap<Vec<String>, usize> = HashMap::new();
    for (ci, (w, _)) in decomposition.classes.iter().enumerate() {
        class_by_weight.insert(weight_key(w), ci);
    }
    // coefficients of every distinct key over the basis keys
    let basis_mat =
        Matrix::from_rows(f, basis_keys.iter().map(to_field).collect()).transpose();
    let coeffs: HashMap<Vec<i64>, Vec<Scalar>> = distinct_keys
        .iter()
        .map(|k| {
            let c = basis_mat.solve_right(&to_field(k)).expect("key in span");
            (k.clone(), c)
        })
        .collect();
    // group keys by the largest basis index their coefficients touch, so
    // each backtracking level checks all keys that become determined
    let support_max = |k: &Vec<i64>| -> usize {
        let c = &coeffs[k];
        (0..c.len()).rev().find(|&i| !f.is_zero(&c[i])).unwrap_or(0)
    };
    let mut keys_by_level: Vec<Vec<Vec<i64>>> = vec![Vec::new(); basis_keys.len()];
    for k in &distinct_keys {
        keys_by_level[support_max(k)].push(k.clone());
    }
    // bracket pattern: a pair of observed classes has a nonzero span
    // exactly when the matched key pair contains a root pair with unit N
    let nclasses = decomposition.classes.len();
    let mut observed_nonzero = vec![vec![false; nclasses]; nclasses];
    for i in 0..nclasses {
        for j in i..nclasses {
            let nz = algebra
                .bracket_span(&decomposition.classes[i].1, &decomposition.classes[j].1)
                .dim()
                > 0;
            observed_nonzero[i][j] = nz;
            observed_nonzero[j][i] = nz;
        }
    }
    let mut predicted_nonzero: HashMap<(Vec<i64>, Vec<i64>), bool> = HashMap::new();
    let nr_all = datum.num_roots();
    for a in 0..nr_all {
        for b in 0..nr_all {
            let ka = keys[a].clone();
            let kb = keys[b].clone();
            if ka.iter().all(|&v| v == 0) || kb.iter().all(|&v| v == 0) {
                continue;
            }
            let entry = predicted_nonzero.entry((ka, kb)).or_insert(false);
            if *entry {
                continue;
            }
            if a == b {
                continue;
            }
            if datum.negate(a) == b {
                // opposite roots bracket onto the coroot image
                if datum.coroot_vector(a).iter().any(|&v| !f.is_zero(&f.from_int(v))) {
                    *entry = true;
                }
                continue;
            }
            if datum.sum_root(a, b).is_some()
                && !f.is_zero(&f.from_int(datum.n_constant(a, b)))
            {
                *entry = true;
            }
        }
    }
    struct Ctx<'a> {
        f: &'a Field,
        decomposition: &'a RootSpaceDecomposition,
        basis_keys: &'a [Vec<i64>],
        keys_by_level: &'a [Vec<Vec<i64>>],
        size_of_key: &'a HashMap<Vec<i64>, usize>,
        coeffs: &'a HashMap<Vec<i64>, Vec<Scalar>>,
        class_by_weight: &'a HashMap<Vec<String>, usize>,
        observed_nonzero: &'a [Vec<bool>],
        predicted_nonzero: &'a HashMap<(Vec<i64>, Vec<i64>), bool>,
        limit: usize,
    }
    fn recurse(
        ctx: &Ctx,
        images: &mut Vec<usize>,
        class_of_key: &mut HashMap<Vec<i64>, usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<HashMap<Vec<i64>, usize>>,
    ) {
        if out.len() >= ctx.limit {
            return;
        }
        let bi = images.len();
        if bi == ctx.basis_keys.len() {
            out.push(class_of_key.clone());
            return;
        }
        let f = ctx.f;
        let want = ctx.size_of_key[&ctx.basis_keys[bi]];
        for ci in 0..ctx.decomposition.classes.len() {
            if used[ci] || ctx.decomposition.classes[ci].1.dim() != want {
                continue;
            }
            images.push(ci);
            // check every key fully determined at this level
            let mut added: Vec<Vec<i64>> = Vec::new();
            let mut ok = true;
            for k in &ctx.keys_by_level[bi] {
                let c = &ctx.coeffs[k];
                let mut w = vec![f.zero(); ctx.decomposition.h_basis.len()];
                for (bj, coef) in c.iter().enumerate().take(bi + 1) {
                    if f.is_zero(coef) {
                        continue;
                    }
                    let bw = &ctx.decomposition.classes[images[bj]].0;
                    for t in 0..w.len() {
                        w[t] = f.add(&w[t], &f.mul(coef, &bw[t]));
                    }
                }
                let wk: Vec<String> = w.iter().map(|c| f.scalar_to_string(c)).collect();
                match ctx.class_by_weight.get(&wk) {
                    Some(&target)
                        if ctx.decomposition.classes[target].1.dim()
                            == ctx.size_of_key[k]
                            && !used[target] =>
                    {
                        // bracket pattern against every key matched so far
                        for (other, &oc) in class_of_key.iter() {
                            let want = ctx
                                .predicted_nonzero
                                .get(&(k.clone(), other.clone()))
                                .copied()
                                .unwrap_or(false);
                            if ctx.observed_nonzero[target][oc] != want {
                                ok = false;
                                break;
                            }
                        }
                        let self_want = ctx
                            .predicted_nonzero
                            .get(&(k.clone(), k.clone()))
                            .copied()
                            .unwrap_or(false);
                        if ctx.observed_nonzero[target][target] != self_want {
                            ok = false;
                        }
                        if !ok {
                            break;
                        }
                        used[target] = true;
                        class_of_key.insert(k.clone(), target);
                        added.push(k.clone());
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                recurse(ctx, images, class_of_key, used, out);
            }
            for k in added {
                let t = class_of_key.remove(&k).unwrap();
                used[t] = false;
            }
            images.pop();
            if out.len() >= ctx.limit {
                return;
            }
        }
    }
    let ctx = Ctx {
        f,
        decomposition,
        basis_keys: &basis_keys,
        keys_by_level: &keys_by_level,
        size_of_key: &size_of_key,
        coeffs: &coeffs,
        class_by_weight: &class_by_weight,
        observed_nonzero: &observed_nonzero,
        predicted_nonzero: &predicted_nonzero,
        limit,
    };
    let mut images = Vec::new();
    let mut class_of_key = HashMap::new();
    let mut used = vec![false; decomposition.classes.len()];
    let mut raw = Vec::new();
    recurse(&ctx, &mut images, &mut class_of_key, &mut used, &mut raw);
    let mut out = Vec::new();
    for class_of_key in raw {
        if class_of_key.len() != decomposition.classes.len() {
            continue;
        }
        let assignment: Vec<Option<usize>> = keys
            .iter()
            .map(|k| {
                if k.iter().all(|&v| v == 0) {
                    None
                } else {
                    Some(class_of_key[k])
                }
            })
            .collect();
        out.push(assignment);
    }
    out
}

/// Backtracking root identification constrained by class membership, pair
/// structure and bracket compatibility (the Prop-style relations: the
/// bracket of two identified lines must land on the line of the sum root
/// exactly when N_{α,β} is a unit).
struct Identifier<'a> {
    algebra: &'a LieAlgebra,
    datum: &'a RootDatum,
    frame: &'a ChevalleyFrame,
    f: Field,
    /// candidate line indices per root
    candidates: Vec<Vec<usize>>,
    /// bracket cache: (line, line) -> Some(line index), None (zero), or Err
    bracket: HashMap<(usize, usize), Option<Option<usize>>>,
    line_lookup: HashMap<Vec<String>, usize>,
    n_unit: Vec<Vec<bool>>,
    solutions: Vec<Vec<usize>>,
    limit: usize,
}

impl<'a> Identifier<'a> {
    fn bracket_of(&mut self, li: usize, lj: usize) -> Option<Option<usize>> {
        if let Some(v) = self.bracket.get(&(li, lj)) {
            return *v;
        }
        let f = &self.f;
        let prod = self
            .algebra
            .multiply(&self.frame.lines[li].rep, &self.frame.lines[lj].rep)
            .expect("dims");
        let val = if prod.iter().all(|c| f.is_zero(c)) {
            Some(None)
        } else {
            let norm = frame::normalize_line(f, &prod);
            let key: Vec<String> = norm.iter().map(|c| f.scalar_to_string(c)).collect();
            match self.line_lookup.get(&key) {
                Some(&k) => Some(Some(k)),
                None => None, // nonzero but not a frame line
            }
        };
        self.bracket.insert((li, lj), val);
        val
    }

    /// Check the new assignment (root -> line) against existing ones.
    fn compatible(&mut self, assign: &[Option<usize>], root: usize, line: usize) -> bool {
        let nr = self.datum.num_roots();
        for other in 0..nr {
            let Some(oline) = assign[other] else { continue };
            if other == root {
                continue;
            }
            if oline == line {
                return false;
            }
            if self.datum.negate(root) == other {
                // opposite roots must use opposite lines when the frame
                // knows the pairing
                if let Some(opp) = self.frame.lines[line].opposite {
                    if opp != oline {
                        return false;
                    }
                }
                continue;
            }
            for (a, la, b, lb) in [(root, line, other, oline), (other, oline, root, line)] {
                let sum = self.datum.sum_root(a, b);
                let unit = self.n_unit[a][b];
                let br = self.bracket_of(la, lb);
                match (sum, unit) {
                    (Some(g), true) => match br {
                        Some(Some(lg)) => {
                            if let Some(ag) = assign[g] {
                                if ag != lg {
                                    return false;
                                }
                            }
                            // line must be a candidate for g
                            if !self.candidates[g].contains(&lg) {
                                return false;
                            }
                        }
                        _ => return false,
                    },
                    (Some(_), false) => {
                        if br != Some(None) {
                            return false;
                        }
                    }
                    (None, _) => {
                        // α+β ∉ Φ (and not 0 since other != negate(root))
                        if br != Some(None) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn propagate(&mut self, assign: &mut Vec<Option<usize>>) -> Result<Vec<usize>, ()> {
        let nr = self.datum.num_roots();
        let mut newly = Vec::new();
        loop {
            let mut changed = false;
            // pair forcing
            for r in 0..nr {
                let Some(l) = assign[r] else { continue };
                let neg = self.datum.negate(r);
                if assign[neg].is_none() {
                    if let Some(opp) = self.frame.lines[l].opposite {
                        if !self.candidates[neg].contains(&opp)
                            || !self.compatible(assign, neg, opp)
                        {
                            return Err(());
                        }
                        assign[neg] = Some(opp);
                        newly.push(neg);
                        changed = true;
                    }
                }
            }
            // bracket forcing: γ = α + β with both assigned and N a unit
            for a in 0..nr {
                let Some(la) = assign[a] else { continue };
                for b in 0..nr {
                    if b == a || b == self.datum.negate(a) {
                        continue;
                    }
                    let Some(lb) = assign[b] else { continue };
                    let Some(g) = self.datum.sum_root(a, b) else { continue };
                    if !self.n_unit[a][b] || assign[g].is_some() {
                        continue;
                    }
                    match self.bracket_of(la, lb) {
                        Some(Some(lg)) => {
                            if !self.candidates[g].contains(&lg)
                                || !self.compatible(assign, g, lg)
                            {
                                return Err(());
                            }
                            assign[g] = Some(lg);
                            newly.push(g);
                            changed = true;
                        }
                        _ => return Err(()),
                    }
                }
            }
            if !changed {
                return Ok(newly);
            }
        }
    }

    fn search(&mut self, assign: &mut Vec<Option<usize>>) {
        if self.solutions.len() >= self.limit {
            return;
        }
        // pick the unassigned root with fewest candidates, simples first
        let nr = self.datum.num_roots();
        let mut pick: Option<(usize, usize, usize)> = None; // (candidates, -height?, root)
        for r in 0..nr {
            if assign[r].is_some() {
                continue;
            }
            let cands = self.candidates[r]
                .iter()
                .filter(|&&l| {
                    !assign.iter().any(|a| *a == Some(l))
                })
                .count();
            let height_rank = self.datum.height(r).unsigned_abs() as usize;
            let key = (cands, height_rank, r);
            pick = match pick {
                None => Some(key),
                Some(cur) if key < cur => Some(key),
                keep => keep,
            };
        }
        let Some((_, _, root)) = pick else {
            self.solutions.push(assign.iter().map(|a| a.unwrap()).collect());
            return;
        };
        if std::env::var("ID_TRACE").is_ok() {
            let depth = assign.iter().filter(|a| a.is_some()).count();
            eprintln!("depth {depth} root {root} cands {:?}", self.candidates[root].iter().filter(|&&l| !assign.iter().any(|a| *a == Some(l))).collect::<Vec<_>>());
        }
        let cands = self.candidates[root].clone();
        for line in cands {
            if assign.iter().any(|a| *a == Some(line)) {
                continue;
            }
            if !self.compatible(assign, root, line) {
                continue;
            }
            let snapshot = assign.clone();
            assign[root] = Some(line);
            if self.propagate(assign).is_ok() {
                self.search(assign);
            }
            *assign = snapshot;
            if self.solutions.len() >= self.limit {
                return;
            }
        }
    }
}

/// Identification: produce candidate bijections Φ → frame lines.
pub fn identify_roots(
    algebra: &LieAlgebra,
    datum: &RootDatum,
    decomposition: &RootSpaceDecomposition,
    frame: &ChevalleyFrame,
    limit: usize,
) -> Vec<Vec<usize>> {
    let f = &algebra.field;
    let nr = datum.num_roots();
    let p = f.characteristic();
    let matchings = class_matchings(algebra, f, datum, decomposition, 64);
    if std::env::var("ID_TRACE").is_ok() {
        eprintln!("class matchings: {}", matchings.len());
    }
    let mut line_lookup = HashMap::new();
    for (i, line) in frame.lines.iter().enumerate() {
        let key: Vec<String> = line.rep.iter().map(|c| f.scalar_to_string(c)).collect();
        line_lookup.insert(key, i);
    }
    let mut n_unit = vec![vec![false; nr]; nr];
    for a in 0..nr {
        for b in 0..nr {
            if a == b || datum.negate(a) == b {
                continue;
            }
            if datum.sum_root(a, b).is_some() {
                let nv = datum.n_constant(a, b);
                n_unit[a][b] = !f.is_zero(&f.from_int(nv));
            }
        }
    }
    let mut solutions = Vec::new();
    for matching in matchings {
        let candidates: Vec<Vec<usize>> = (0..nr)
            .map(|r| {
                frame
                    .lines
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| l.class == matching[r])
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        if candidates.iter().any(|c| c.is_empty()) {
            continue;
        }
        let mut ident = Identifier {
            algebra,
            datum,
            frame,
            f: f.clone(),
            candidates,
            bracket: HashMap::new(),
            line_lookup: line_lookup.clone(),
            n_unit: n_unit.clone(),
            solutions: Vec::new(),
            limit,
        };
        let mut assign: Vec<Option<usize>> = vec![None; nr];
        ident.search(&mut assign);
        solutions.extend(ident.solutions);
        if solutions.len() >= limit {
            solutions.truncate(limit);
            break;
        }
    }
    let _ = p;
    solutions
}

/// Symbolic scalar: a field constant times a monomial in free parameters.
#[derive(Debug, Clone)]
struct SymbolicScale {
    coeff: Scalar,
    expo: HashMap<usize, i64>,
}

impl SymbolicScale {
    fn constant(c: Scalar) -> SymbolicScale {
        SymbolicScale { coeff: c, expo: HashMap::new() }
    }

    fn param(f: &Field, id: usize) -> SymbolicScale {
        let mut expo = HashMap::new();
        expo.insert(id, 1);
        SymbolicScale { coeff: f.one(), expo }
    }

    fn mul(&self, f: &Field, other: &SymbolicScale) -> SymbolicScale {
        let mut expo = self.expo.clone();
        for (k, v) in &other.expo {
            *expo.entry(*k).or_insert(0) += v;
            if expo[k] == 0 {
                expo.remove(k);
            }
        }
        SymbolicScale { coeff: f.mul(&self.coeff, &other.coeff), expo }
    }

    fn div(&self, f: &Field, other: &SymbolicScale) -> SymbolicScale {
        let mut expo = self.expo.clone();
        for (k, v) in &other.expo {
            *expo.entry(*k).or_insert(0) -= v;
            if expo[k] == 0 {
                expo.remove(k);
            }
        }
        SymbolicScale {
            coeff: f.mul(&self.coeff, &f.inv(&other.coeff).expect("nonzero")),
            expo,
        }
    }

    fn expo_key(&self) -> Vec<(usize, i64)> {
        let mut v: Vec<(usize, i64)> = self.expo.iter().map(|(a, b)| (*a, *b)).collect();
        v.sort();
        v
    }
}

/// Choose representatives on the identified lines and a Cartan basis so
/// that (CB1)–(CB4) hold. Solves the multiplicative constraints along the
/// unit-N edges, then a linear system for the Cartan vectors and leftover
/// pair scales, then the residual monomial equations.
pub fn scale_to_basis(
    algebra: &LieAlgebra,
    datum: &RootDatum,
    decomposition: &RootSpaceDecomposition,
    frame: &ChevalleyFrame,
    assignment: &[usize],
) -> Result<(Vec<Vec<Scalar>>, Vec<Vec<Scalar>>), PipelineError> {
    let f = &algebra.field;
    let nr = datum.num_roots();
    let n = datum.rank;
    let dim = algebra.dim;
    let y: Vec<Vec<Scalar>> =
        (0..nr).map(|r| frame.lines[assignment[r]].rep.clone()).collect();
    // bracket scalars m_{α,β}: [y_α, y_β] = m · y_{α+β}
    let proportion = |vec: &[Scalar], line: &[Scalar]| -> Option<Scalar> {
        let lead = line.iter().position(|c| !f.is_zero(c))?;
        let m = f.div(&vec[lead], &line[lead]).ok()?;
        for t in 0..vec.len() {
            if vec[t] != f.mul(&m, &line[t]) {
                return None;
            }
        }
        Some(m)
    };
    // symbolic c_α with propagation over unit-N edges
    let mut c: Vec<Option<SymbolicScale>> = vec![None; nr];
    for i in 0..n {
        c[datum.simple_root(i)] = Some(SymbolicScale::constant(f.one()));
    }
    let mut edges: Vec<(usize, usize, usize)> = Vec::new(); // (a, b, sum)
    for a in 0..nr {
        for b in a + 1..nr {
            if datum.negate(a) == b {
                continue;
            }
            if let Some(g) = datum.sum_root(a, b) {
                if !f.is_zero(&f.from_int(datum.n_constant(a, b))) {
                    edges.push((a, b, g));
                }
            }
        }
    }
    let mut monomial_eqs: Vec<(Vec<(usize, i64)>, Scalar)> = Vec::new();
    let mut next_param = 0usize;
    loop {
        let mut changed = false;
        for &(a, b, g) in &edges {
            let known = [c[a].is_some(), c[b].is_some(), c[g].is_some()];
            let count = known.iter().filter(|&&k| k).count();
            if count < 2 {
                continue;
            }
            let m = {
                let prod = algebra.multiply(&y[a], &y[b]).expect("dims");
                match proportion(&prod, &y[g]) {
                    Some(m) if !f.is_zero(&m) => m,
                    _ => return Err(PipelineError::ScalingInconsistent),
                }
            };
            let nval = f.from_int(datum.n_constant(a, b));
            // c_a c_b m = N c_g
            let m_sym = SymbolicScale::constant(m);
            let n_sym = SymbolicScale::constant(nval);
            if count == 3 {
                let lhs = c[a].as_ref().unwrap().mul(f, c[b].as_ref().unwrap()).mul(f, &m_sym);
                let rhs = c[g].as_ref().unwrap().mul(f, &n_sym);
                let q = lhs.div(f, &rhs);
                if q.expo.is_empty() {
                    if q.coeff != f.one() {
                        return Err(PipelineError::ScalingInconsistent);
                    }
                } else {
                    // Π t^e = coeff⁻¹
                    monomial_eqs
                        .push((q.expo_key(), f.inv(&q.coeff).expect("nonzero")));
                }
                continue;
            }
            if c[g].is_none() {
                let v = c[a].as_ref().unwrap().mul(f, c[b].as_ref().unwrap()).mul(f, &m_sym).div(f, &n_sym);
                c[g] = Some(v);
            } else if c[a].is_none() {
                let v = c[g].as_ref().unwrap().mul(f, &n_sym).div(
                    f,
                    &c[b].as_ref().unwrap().mul(f, &m_sym),
                );
                c[a] = Some(v);
            } else {
                let v = c[g].as_ref().unwrap().mul(f, &n_sym).div(
                    f,
                    &c[a].as_ref().unwrap().mul(f, &m_sym),
                );
                c[b] = Some(v);
            }
            changed = true;
        }
        if changed {
            continue;
        }
        // introduce a free parameter on the first undetermined root
        match (0..nr).find(|&r| c[r].is_none()) {
            Some(r) => {
                c[r] = Some(SymbolicScale::param(f, next_param));
                next_param += 1;
            }
            None => break,
        }
    }
    let c: Vec<SymbolicScale> = c.into_iter().map(|v| v.unwrap()).collect();
    // Cartan basis: h_i = h_i⁰ + k_i with the weight conditions
    // ad_{h_i} acts on class(ᾱ) by −⟨α, f_i⟩ (the builder's convention).
    let hn = decomposition.h_basis.len();
    let mut weight_rows = Matrix::zeros(f, 0, hn);
    for (w, _) in &decomposition.classes {
        weight_rows.push_row(w.clone());
    }
    let mut h0: Vec<Vec<Scalar>> = Vec::new(); // coords over h_basis
    for i in 0..n {
        let mut rhs = Vec::new();
        for (ci, (_, _)) in decomposition.classes.iter().enumerate() {
            // any root assigned to this class gives the target value
            let mut target = None;
            for r in 0..nr {
                if frame.lines[assignment[r]].class == Some(ci) {
                    let rv = datum.root_vector(r);
                    target = Some(f.neg(&f.from_int(rv[i])));
                    break;
                }
            }
            rhs.push(target.ok_or(PipelineError::ScalingInconsistent)?);
            let _ = ci;
        }
        let sol = weight_rows
            .solve_right(&rhs)
            .ok_or(PipelineError::ScalingInconsistent)?;
        h0.push(sol);
    }
    let kernel = weight_rows.kernel();
    let kernel_rows = kernel.basis_rows();
    let kd = kernel_rows.len();
    // ambient H vectors from h-basis coordinates
    let to_ambient = |coords: &[Scalar]| -> Vec<Scalar> {
        let mut v = vec![f.zero(); dim];
        for (j, cj) in coords.iter().enumerate() {
            if f.is_zero(cj) {
                continue;
            }
            for t in 0..dim {
                v[t] = f.add(&v[t], &f.mul(cj, &decomposition.h_basis[j][t]));
            }
        }
        v
    };
    // linear system for (z_monomials, kappa): CB3 per positive pair
    let mut mono_index: HashMap<Vec<(usize, i64)>, usize> = HashMap::new();
    let mut mono_list: Vec<Vec<(usize, i64)>> = Vec::new();
    let np = datum.num_positive();
    struct Cb3Row {
        mono: Option<usize>,
        gvec: Vec<Scalar>,
        dd: Scalar,
        coroot: Vec<Scalar>, // a_i in F
    }
    let mut cb3: Vec<Cb3Row> = Vec::new();
    for alpha in 0..np {
        let neg = datum.negate(alpha);
        let g = algebra.multiply(&y[neg], &y[alpha]).expect("dims");
        let prod = c[alpha].mul(f, &c[neg]);
        let mono = if prod.expo.is_empty() {
            None
        } else {
            let key = prod.expo_key();
            Some(*mono_index.entry(key.clone()).or_insert_with(|| {
                mono_list.push(key);
                mono_list.len() - 1
            }))
        };
        let coroot: Vec<Scalar> =
            datum.coroot_vector(alpha).iter().map(|&v| f.from_int(v)).collect();
        cb3.push(Cb3Row { mono, gvec: g, dd: prod.coeff.clone(), coroot });
    }
    // unknown order: the κ block first, then the scale monomials, so that
    // elimination pivots prefer κ and the monomials stay free (nonzero)
    let unknowns = n * kd + mono_list.len();
    let mono_col = |mi: usize| n * kd + mi;
    let mut system = Matrix::zeros(f, 0, unknowns);
    let mut rhs_vec: Vec<Scalar> = Vec::new();
    for row in &cb3 {
        // (z·dd)·g − Σ_i a_i Σ_s κ_{is} K_s = Σ_i a_i h_i⁰   (ambient coords)
        let mut base = vec![f.zero(); dim];
        for i in 0..n {
            if f.is_zero(&row.coroot[i]) {
                continue;
            }
            let hi = to_ambient(&h0[i]);
            for t in 0..dim {
                base[t] = f.add(&base[t], &f.mul(&row.coroot[i], &hi[t]));
            }
        }
        let kernel_amb: Vec<Vec<Scalar>> =
            kernel_rows.iter().map(|k| to_ambient(k)).collect();
        for t in 0..dim {
            let mut sys_row = vec![f.zero(); unknowns];
            let mut rhs = base[t].clone();
            let mut touched = !f.is_zero(&rhs);
            match row.mono {
                Some(mi) => {
                    let v = f.mul(&row.dd, &row.gvec[t]);
                    if !f.is_zero(&v) {
                        sys_row[mono_col(mi)] = v;
                        touched = true;
                    }
                }
                None => {
                    let v = f.mul(&row.dd, &row.gvec[t]);
                    if !f.is_zero(&v) {
                        rhs = f.sub(&rhs, &v);
                        touched = true;
                    }
                }
            }
            for i in 0..n {
                if f.is_zero(&row.coroot[i]) {
                    continue;
                }
                for (s, k_amb) in kernel_amb.iter().enumerate() {
                    let v = f.neg(&f.mul(&row.coroot[i], &k_amb[t]));
                    if !f.is_zero(&v) {
                        sys_row[i * kd + s] = v;
                        touched = true;
                    }
                }
            }
            if touched {
                system.push_row(sys_row);
                rhs_vec.push(rhs);
            }
        }
    }
    let solution = if unknowns == 0 {
        // nothing to solve; system must be trivially consistent
        if rhs_vec.iter().any(|v| !f.is_zero(v)) {
            return Err(PipelineError::ScalingInconsistent);
        }
        Vec::new()
    } else {
        // free scale monomials must come out nonzero, so free columns among
        // the first mono_list.len() unknowns default to one, not zero
        let prefer_one: Vec<bool> = (0..unknowns).map(|c| c >= n * kd).collect();
        solve_preferring(&system, &rhs_vec, &prefer_one)
            .ok_or(PipelineError::ScalingInconsistent)?
    };
    // monomial equations from the CB3 z-values; a monomial whose column is
    // entirely absent from the system is unconstrained, not zero
    for (mi, key) in mono_list.iter().enumerate() {
        let v = solution[mono_col(mi)].clone();
        if f.is_zero(&v) {
            let column_zero =
                (0..system.rows).all(|r| f.is_zero(system.at(r, mono_col(mi))));
            if column_zero {
                monomial_eqs.push((key.clone(), f.one()));
                continue;
            }
            return Err(PipelineError::ScalingInconsistent);
        }
        monomial_eqs.push((key.clone(), v));
    }
    // resolve parameters
    let params = resolve_parameters(f, next_param, &monomial_eqs)?;
    let eval = |s: &SymbolicScale| -> Result<Scalar, PipelineError> {
        let mut acc = s.coeff.clone();
        for (pid, e) in &s.expo {
            let t = &params[*pid];
            let factor = if *e >= 0 {
                f.pow(t, *e as u64)
            } else {
                f.pow(&f.inv(t).map_err(|_| PipelineError::ScalingInconsistent)?, (-e) as u64)
            };
            acc = f.mul(&acc, &factor);
        }
        Ok(acc)
    };
    let mut x_vectors = Vec::with_capacity(nr);
    for r in 0..nr {
        let s = eval(&c[r])?;
        if f.is_zero(&s) {
            return Err(PipelineError::ScalingInconsistent);
        }
        x_vectors.push(y[r].iter().map(|v| f.mul(v, &s)).collect());
    }
    let mut h_vectors = Vec::with_capacity(n);
    for i in 0..n {
        let mut coords = h0[i].clone();
        for s in 0..kd {
            let kappa = &solution[i * kd + s];
            for (t, kv) in kernel_rows[s].iter().enumerate() {
                coords[t] = f.add(&coords[t], &f.mul(kappa, kv));
            }
        }
        h_vectors.push(to_ambient(&coords));
    }
    Ok((x_vectors, h_vectors))
}

/// Solve Π t_k^{e_k} = v equations greedily, defaulting untouched
/// parameters to 1. Small fields allow scans for general exponents.
fn resolve_parameters(
    f: &Field,
    count: usize,
    eqs: &[(Vec<(usize, i64)>, Scalar)],
) -> Result<Vec<Scalar>, PipelineError> {
    let mut values: Vec<Option<Scalar>> = vec![None; count];
    let mut remaining: Vec<(Vec<(usize, i64)>, Scalar)> = eqs.to_vec();
    loop {
        let mut progress = false;
        let mut next = Vec::new();
        for (expo, target) in remaining.drain(..) {
            // reduce by the known values
            let mut resid = target.clone();
            let mut unknown: Vec<(usize, i64)> = Vec::new();
            for (pid, e) in &expo {
                match &values[*pid] {
                    Some(v) => {
                        let factor = if *e >= 0 {
                            f.pow(v, *e as u64)
                        } else {
                            f.pow(
                                &f.inv(v).map_err(|_| PipelineError::ScalingInconsistent)?,
                                (-e) as u64,
                            )
                        };
                        resid = f
                            .div(&resid, &factor)
                            .map_err(|_| PipelineError::ScalingInconsistent)?;
                    }
                    None => unknown.push((*pid, *e)),
                }
            }
            match unknown.len() {
                0 => {
                    if resid != f.one() {
                        return Err(PipelineError::ScalingInconsistent);
                    }
                }
                1 => {
                    let (pid, e) = unknown[0];
                    let val = solve_power(f, e, &resid)?;
                    values[pid] = Some(val);
                    progress = true;
                }
                _ => next.push((unknown, resid)),
            }
        }
        remaining = next;
        if remaining.is_empty() {
            break;
        }
        if !progress {
            // fix one parameter to 1 and keep going
            let free = remaining[0].0.iter().find(|(pid, _)| values[*pid].is_none());
            match free {
                Some((pid, _)) => values[*pid] = Some(f.one()),
                None => return Err(PipelineError::ScalingInconsistent),
            }
        }
    }
    Ok(values.into_iter().map(|v| v.unwrap_or_else(|| f.one())).collect())
}

/// Solve system·x = rhs, setting free variables to one where preferred
/// (and zero otherwise).
fn solve_preferring(
    system: &Matrix,
    rhs: &[Scalar],
    prefer_one: &[bool],
) -> Option<Vec<Scalar>> {
    let f = &system.field;
    let cols = system.cols;
    let mut aug = Matrix::zeros(f, system.rows, cols + 1);
    for i in 0..system.rows {
        for j in 0..cols {
            aug.set(i, j, system.at(i, j).clone());
        }
        aug.set(i, cols, rhs[i].clone());
    }
    let (r, _rank, pivots) = aug.rref();
    if pivots.contains(&cols) {
        return None;
    }
    let pivot_set: Vec<bool> = {
        let mut v = vec![false; cols];
        for &c in &pivots {
            v[c] = true;
        }
        v
    };
    let mut x: Vec<Scalar> = (0..cols)
        .map(|c| if !pivot_set[c] && prefer_one[c] { f.one() } else { f.zero() })
        .collect();
    for (row, &pc) in pivots.iter().enumerate() {
        let mut val = r.at(row, cols).clone();
        for c in pc + 1..cols {
            if !pivot_set[c] && !f.is_zero(r.at(row, c)) {
                val = f.sub(&val, &f.mul(r.at(row, c), &x[c]));
            }
        }
        x[pc] = val;
    }
    Some(x)
}

/// t with t^e = v.
fn solve_power(f: &Field, e: i64, v: &Scalar) -> Result<Scalar, PipelineError> {
    if e == 1 {
        return Ok(v.clone());
    }
    if e == -1 {
        return f.inv(v).map_err(|_| PipelineError::ScalingInconsistent);
    }
    match f.size() {
        Some(q) if q <= 4096 => {
            for t in f.all_elements() {
                if f.is_zero(&t) {
                    continue;
                }
                let p = if e >= 0 {
                    f.pow(&t, e as u64)
                } else {
                    f.pow(&f.inv(&t).unwrap(), (-e) as u64)
                };
                if &p == v {
                    return Ok(t);
                }
            }
            Err(PipelineError::ScalingInconsistent)
        }
        _ => Err(PipelineError::ScalingInconsistent),
    }
}

/// The composed Las Vegas pipeline. Never returns an unverified basis.
pub fn chevalley_basis(
    algebra: &LieAlgebra,
    span: &CartanSpan,
    datum: &RootDatum,
    rng: &mut Rng,
    retries: usize,
) -> Result<ChevalleyBasisResult, PipelineError> {
    let decomposition = find_root_spaces(algebra, span)?;
    if decomposition.h_basis.len() != datum.rank {
        return Err(PipelineError::MultiplicityMismatch);
    }
    let method = frame::frame_method_for(datum, algebra.field.characteristic());
    let mut last = PipelineError::RetryExhausted;
    for attempt in 0..retries {
        let mut attempt_rng = rng.split();
        let frame = match find_frame(algebra, datum, &decomposition, &mut attempt_rng) {
            Ok(fr) => fr,
            Err(PipelineError::MultiplicityMismatch) => {
                return Err(PipelineError::MultiplicityMismatch)
            }
            Err(e) => {
                last = e;
                continue;
            }
        };
        let assignments = identify_roots(algebra, datum, &decomposition, &frame, 8);
        if assignments.is_empty() {
            last = PipelineError::IdentificationFailed;
            continue;
        }
        for assignment in assignments {
            match scale_to_basis(algebra, datum, &decomposition, &frame, &assignment) {
                Ok((x, h)) => {
                    if verify_chevalley_basis(algebra, datum, &x, &h).passed() {
                        return Ok(ChevalleyBasisResult {
                            assignment,
                            x_vectors: x,
                            h_vectors: h,
                            method,
                            attempts_used: attempt + 1,
                        });
                    }
                    last = PipelineError::ScalingInconsistent;
                }
                Err(e) => last = e,
            }
        }
    }
    Err(last)
}

/// Candidate (type, rank) pairs for a given algebra dimension and rank.
pub fn classification_candidates(dim: usize, rank: usize) -> Vec<(DynkinType, usize)> {
    let mut out = Vec::new();
    let types = [
        DynkinType::A,
        DynkinType::B,
        DynkinType::C,
        DynkinType::D,
        DynkinType::E,
        DynkinType::F,
        DynkinType::G,
    ];
    for t in types {
        if let Ok(c) = crate::rootdata::cartan_matrix(t, rank) {
            if let Ok(roots) = crate::rootdata::roots_closure(&c) {
                if rank + roots.len() == dim {
                    out.push((t, rank));
                }
            }
        }
    }
    out
}

/// Infer the root datum from the algebra and Cartan span alone, running the
/// recovery per candidate until verification passes.
pub fn infer_root_datum(
    algebra: &LieAlgebra,
    span: &CartanSpan,
    rng: &mut Rng,
) -> Result<(RootDatum, ChevalleyBasisResult), PipelineError> {
    let f = &algebra.field;
    let decomposition = find_root_spaces(algebra, span)?;
    let rank = decomposition.h_basis.len();
    let candidates = classification_candidates(algebra.dim, rank);
    if candidates.is_empty() {
        return Err(PipelineError::NoCandidateFits);
    }
    let p = f.characteristic();
    for (t, n) in candidates {
        for iso in isogeny_labels(t, n) {
            let datum = match crate::rootdata::build_root_datum(t, n, iso) {
                Ok(d) => d,
                Err(_) => continue,
            };
            // cheap multiplicity filter before the full pipeline
            let (expected, expected_zero) = datum.predicted_multiplicities(p);
            let (observed, observed_zero) = decomposition.multiplicity_profile(n);
            if expected != observed || expected_zero != observed_zero {
                continue;
            }
            let mut attempt_rng = rng.split();
            if let Ok(result) = chevalley_basis(algebra, span, &datum, &mut attempt_rng, 6) {
                return Ok((datum, result));
            }
        }
    }
    Err(PipelineError::NoCandidateFits)
}

/// Convenience: a deterministic text report of a recovery run.
pub fn recovery_report(
    datum: &RootDatum,
    decomposition: &RootSpaceDecomposition,
    result: &ChevalleyBasisResult,
    field: &Field,
) -> String {
    let (mults, zero) = decomposition.multiplicity_profile(datum.rank);
    let mult_str: Vec<String> =
        mults.iter().map(|(size, count)| format!("{size}^{count}")).collect();
    let method = match result.method {
        FrameMethod::Trivial => "trivial",
        FrameMethod::Generic => "centraliser",
        FrameMethod::Der => "derivations",
        FrameMethod::B2sc => "meataxe",
    };
    let mut out = String::new();
    out.push_str(&format!("datum: {}{} {}\n", datum.dynkin, datum.rank, datum.isogeny));
    out.push_str(&format!("field: {}\n", field.spec_string()));
    out.push_str(&format!("multiplicities: {} zero:{zero}\n", mult_str.join(",")));
    out.push_str(&format!("method: {method}\n"));
    out.push_str(&format!("attempts: {}\n", result.attempts_used));
    out.push_str("verified: pass\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{chevalley_lie_algebra, scramble};
    use crate::rootdata::{build_root_datum, Isogeny};

    fn round_trip(t: DynkinType, n: usize, iso: Isogeny, field_spec: &str, seed: u64) {
        let datum = build_root_datum(t, n, iso).unwrap();
        let f = Field::parse(field_spec).unwrap();
        let (alg, span, _) = chevalley_lie_algebra(&datum, &f);
        let (scrambled, sspan, _) = scramble(&alg, &span, seed);
        let mut rng = Rng::from_seed(seed);
        let result = chevalley_basis(&scrambled, &sspan, &datum, &mut rng, 20)
            .unwrap_or_else(|e| panic!("{t}{n} {iso} over {field_spec}: {e}"));
        assert!(verify_chevalley_basis(&scrambled, &datum, &result.x_vectors, &result.h_vectors)
            .passed());
    }

    #[test]
    fn trivial_multiplicity_round_trips() {
        round_trip(DynkinType::A, 2, Isogeny::Adjoint, "17", 1);
        round_trip(DynkinType::A, 1, Isogeny::Adjoint, "Q", 2);
        round_trip(DynkinType::B, 2, Isogeny::SimplyConnected, "5", 3);
        round_trip(DynkinType::G, 2, Isogeny::Adjoint, "Q", 4);
    }

    #[test]
    fn unscrambled_reference_identity() {
        // recovering on the unscrambled algebra must work and verify
        let datum = build_root_datum(DynkinType::A, 2, Isogeny::Adjoint).unwrap();
        let f = Field::parse("5").unwrap();
        let (alg, span, _) = chevalley_lie_algebra(&datum, &f);
        let mut rng = Rng::from_seed(0);
        let result = chevalley_basis(&alg, &span, &datum, &mut rng, 20).unwrap();
        assert!(verify_chevalley_basis(&alg, &datum, &result.x_vectors, &result.h_vectors)
            .passed());
    }

    #[test]
    fn reference_basis_verifies() {
        let datum = build_root_datum(DynkinType::G, 2, Isogeny::Adjoint).unwrap();
        for spec in ["Q", "2", "3", "5"] {
            let f = Field::parse(spec).unwrap();
            let (alg, _, labels) = chevalley_lie_algebra(&datum, &f);
            let nr = datum.num_roots();
            let x: Vec<Vec<Scalar>> = (0..nr)
                .map(|r| {
                    let mut v = vec![f.zero(); alg.dim];
                    v[labels.root_position(r)] = f.one();
                    v
                })
                .collect();
            let h: Vec<Vec<Scalar>> = (0..datum.rank)
                .map(|i| {
                    let mut v = vec![f.zero(); alg.dim];
                    v[i] = f.one();
                    v
                })
                .collect();
            assert!(verify_chevalley_basis(&alg, &datum, &x, &h).passed(), "field {spec}");
        }
    }

    #[test]
    fn perturbed_basis_fails_cb4() {
        let datum = build_root_datum(DynkinType::A, 2, Isogeny::Adjoint).unwrap();
        let f = Field::parse("5").unwrap();
        let (alg, _, labels) = chevalley_lie_algebra(&datum, &f);
        let nr = datum.num_roots();
        let mut x: Vec<Vec<Scalar>> = (0..nr)
            .map(|r| {
                let mut v = vec![f.zero(); alg.dim];
                v[labels.root_position(r)] = f.one();
                v
            })
            .collect();
        let h: Vec<Vec<Scalar>> = (0..datum.rank)
            .map(|i| {
                let mut v = vec![f.zero(); alg.dim];
                v[i] = f.one();
                v
            })
            .collect();
        // add X_β into X_α
        let pos = labels.root_position(1);
        x[0][pos] = f.one();
        let out = verify_chevalley_basis(&alg, &datum, &x, &h);
        assert!(!out.passed());
    }

    #[test]
    fn swap_opposites_fails_cb3() {
        let datum = build_root_datum(DynkinType::A, 1, Isogeny::Adjoint).unwrap();
        let f = Field::parse("3").unwrap();
        let (alg, _, labels) = chevalley_lie_algebra(&datum, &f);
        let mut x: Vec<Vec<Scalar>> = (0..2)
            .map(|r| {
                let mut v = vec![f.zero(); alg.dim];
                v[labels.root_position(r)] = f.one();
                v
            })
            .collect();
        let h: Vec<Vec<Scalar>> = vec![{
            let mut v = vec![f.zero(); alg.dim];
            v[0] = f.one();
            v
        }];
        x.swap(0, 1);
        // both (CB2) and (CB3) are broken by the swap; the checker reports
        // whichever it visits first, and must fail either way
        let out = verify_chevalley_basis(&alg, &datum, &x, &h);
        match out {
            VerifyOutcome::Fail { relation, .. } => {
                assert!(relation == "CB2" || relation == "CB3")
            }
            VerifyOutcome::Pass => panic!("swap must fail"),
        }
    }

    #[test]
    fn infer_small() {
        let datum = build_root_datum(DynkinType::G, 2, Isogeny::Adjoint).unwrap();
        let f = Field::parse("17").unwrap();
        let (alg, span, _) = chevalley_lie_algebra(&datum, &f);
        let (scrambled, sspan, _) = scramble(&alg, &span, 9);
        let mut rng = Rng::from_seed(9);
        let (found, _) = infer_root_datum(&scrambled, &sspan, &mut rng).unwrap();
        assert_eq!((found.dynkin, found.rank), (DynkinType::G, 2));
    }

    #[test]
    fn classification_candidate_sets() {
        // dim 14 rank 2: G2 only
        assert_eq!(classification_candidates(14, 2), vec![(DynkinType::G, 2)]);
        // dim 78 rank 6: B6, C6, E6
        let c = classification_candidates(78, 6);
        assert_eq!(
            c,
            vec![(DynkinType::B, 6), (DynkinType::C, 6), (DynkinType::E, 6)]
        );
    }
}
