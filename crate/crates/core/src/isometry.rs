//! Isometries of a Gram lattice: verification, reflections, word algebra
//! over named generators, and a bounded brute-force search.
//!
//! Vectors are columns and isometries multiply on the left; a word (a, b, c)
//! means the composite a ∘ b ∘ c, i.e. c acts first.

use crate::lattice::{gram_eval, GramLattice};
use crate::matrix::{IMat, IVec, Int};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IsometryError {
    #[error("matrix does not preserve the gram form")]
    NotAnIsometry,
    #[error("reflection in {0:?} is not integral on this lattice")]
    NonIntegralReflection(Vec<String>),
    #[error("reflection vectors must square to -2 or -10, got {0}")]
    BadReflectionSquare(Int),
    #[error("unknown generator symbol {0:?}")]
    UnknownSymbol(String),
    #[error("zero vector not allowed")]
    ZeroVector,
}

/// An integer matrix preserving the Gram form, with an optional word in the
/// scenario's named generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Isometry {
    pub matrix: IMat,
    pub word: Option<Vec<String>>,
}

impl Isometry {
    pub fn identity(rank: usize) -> Self {
        Isometry {
            matrix: IMat::identity(rank),
            word: Some(Vec::new()),
        }
    }

    pub fn from_matrix(matrix: IMat) -> Self {
        Isometry { matrix, word: None }
    }

    pub fn apply(&self, v: &[Int]) -> IVec {
        self.matrix.mul_vec(v)
    }

    /// a.compose(b) acts as a ∘ b (b first).
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let word = match (&self.word, &other.word) {
            (Some(a), Some(b)) => {
                let mut w = a.clone();
                w.extend(b.iter().cloned());
                Some(w)
            }
            _ => None,
        };
        Isometry {
            matrix: self.matrix.mul(&other.matrix),
            word,
        }
    }

    /// Exact inverse; the determinant is ±1 for any isometry.
    pub fn inverse(&self) -> Isometry {
        let m = self
            .matrix
            .unimodular_inverse()
            .expect("isometry has unit determinant");
        Isometry {
            matrix: m,
            word: None,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    pub fn negate(&self) -> Isometry {
        Isometry {
            matrix: self.matrix.neg(),
            word: None,
        }
    }
}

/// Named generator matrices of a scenario, kept in name order so every
/// iteration over the table is deterministic.
#[derive(Clone, Debug, Default)]
pub struct GeneratorTable {
    pub entries: BTreeMap<String, Isometry>,
}

impl GeneratorTable {
    pub fn new() -> Self {
        GeneratorTable {
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, name: &str, iso: Isometry) {
        self.entries.insert(name.to_string(), iso);
    }

    pub fn get(&self, name: &str) -> Option<&Isometry> {
        self.entries.get(name)
    }

    pub fn validate(&self, l: &GramLattice) -> Result<(), IsometryError> {
        for iso in self.entries.values() {
            if !is_isometry(l, &iso.matrix) {
                return Err(IsometryError::NotAnIsometry);
            }
        }
        Ok(())
    }
}

/// MᵀGM = G and det(M) = ±1.
pub fn is_isometry(l: &GramLattice, m: &IMat) -> bool {
    if m.rows != l.rank || m.cols != l.rank {
        return false;
    }
    if !m.det().abs().is_one() {
        return false;
    }
    m.transpose().mul(&l.gram).mul(m) == l.gram
}

/// Reflection x ↦ x - 2 q(x, rho)/q(rho, rho) · rho, accepted only when it is
/// integral on the whole lattice.
pub fn reflection_in(l: &GramLattice, rho: &[Int]) -> Result<Isometry, IsometryError> {
    if crate::matrix::vec_is_zero(rho) {
        return Err(IsometryError::ZeroVector);
    }
    let sq = gram_eval(l, rho, rho).map_err(|_| IsometryError::NotAnIsometry)?;
    if sq != Int::from(-2) && sq != Int::from(-10) {
        return Err(IsometryError::BadReflectionSquare(sq));
    }
    let mut cols: Vec<IVec> = Vec::with_capacity(l.rank);
    for j in 0..l.rank {
        let mut e = vec![Int::zero(); l.rank];
        e[j] = Int::one();
        let pairing = gram_eval(l, &e, rho).unwrap();
        let num = Int::from(2) * pairing;
        // image of e_j is e_j - (num / sq) * rho; must be integral
        if !(&num % &sq).is_zero() {
            return Err(IsometryError::NonIntegralReflection(
                rho.iter().map(|x| x.to_string()).collect(),
            ));
        }
        let coeff = num / &sq;
        let col: IVec = (0..l.rank)
            .map(|i| {
                let base = if i == j { Int::one() } else { Int::zero() };
                base - &coeff * &rho[i]
            })
            .collect();
        cols.push(col);
    }
    let mut m = IMat::zero(l.rank, l.rank);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..l.rank {
            m[(i, j)] = col[i].clone();
        }
    }
    debug_assert!(is_isometry(l, &m));
    Ok(Isometry {
        matrix: m,
        word: None,
    })
}

/// Product of the named generators in left-to-right application order:
/// word (a, b, c) evaluates to a ∘ b ∘ c.
pub fn word_eval(table: &GeneratorTable, word: &[String]) -> Result<Isometry, IsometryError> {
    let rank = table
        .entries
        .values()
        .next()
        .map(|iso| iso.matrix.rows)
        .unwrap_or(0);
    let mut acc = IMat::identity(rank);
    for symbol in word {
        let gen = table
            .get(symbol)
            .ok_or_else(|| IsometryError::UnknownSymbol(symbol.clone()))?;
        acc = acc.mul(&gen.matrix);
    }
    Ok(Isometry {
        matrix: acc,
        word: Some(word.to_vec()),
    })
}

/// All integer matrices with entries bounded by `entry_bound` that preserve
/// the Gram form, in lexicographic matrix order.
///
/// The search goes column by column and prunes on partial Gram constraints
/// (column j must pair correctly with every earlier column), so small bounds
/// are fast; expect exponential cost past bound ~8 in rank 3.
pub fn bounded_isometry_search(l: &GramLattice, entry_bound: i64) -> Vec<Isometry> {
    assert!(entry_bound >= 1, "entry bound must be at least 1");
    let n = l.rank;
    let mut range = Vec::new();
    for v in -entry_bound..=entry_bound {
        range.push(Int::from(v));
    }
    // all candidate columns in lex order
    let mut columns: Vec<IVec> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for c in &columns {
            for v in &range {
                let mut c2 = c.clone();
                c2.push(v.clone());
                next.push(c2);
            }
        }
        columns = next;
    }
    let mut results = Vec::new();
    let mut chosen: Vec<IVec> = Vec::new();
    search_columns(l, &columns, &mut chosen, &mut results);
    results.into_iter().map(Isometry::from_matrix).collect()
}

fn search_columns(
    l: &GramLattice,
    columns: &[IVec],
    chosen: &mut Vec<IVec>,
    results: &mut Vec<IMat>,
) {
    let n = l.rank;
    let j = chosen.len();
    if j == n {
        let mut m = IMat::zero(n, n);
        for (jj, col) in chosen.iter().enumerate() {
            for i in 0..n {
                m[(i, jj)] = col[i].clone();
            }
        }
        if m.det().abs().is_one() {
            results.push(m);
        }
        return;
    }
    for cand in columns {
        if gram_eval(l, cand, cand).unwrap() != l.gram[(j, j)] {
            continue;
        }
        let mut ok = true;
        for (i, prev) in chosen.iter().enumerate() {
            if gram_eval(l, prev, cand).unwrap() != l.gram[(i, j)] {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        chosen.push(cand.clone());
        search_columns(l, columns, chosen, results);
        chosen.pop();
    }
}

/// True iff q(phi(ample), ample) > 0, i.e. phi maps the component of the
/// positive cone containing the ample class to itself.
pub fn preserves_positive_cone(l: &GramLattice, phi: &Isometry) -> bool {
    let image = phi.apply(&l.ample);
    gram_eval(l, &image, &l.ample).unwrap().is_positive()
}

/// Breadth-first search for a word of bounded length over the table (symbols
/// and, where distinct, their inverses) evaluating to ±m. Used as an oracle
/// that the configured generators reach everything the bounded matrix search
/// finds.
pub fn find_word_for(
    l: &GramLattice,
    table: &GeneratorTable,
    m: &IMat,
    max_len: usize,
) -> Option<Vec<String>> {
    let target_neg = m.neg();
    let id = IMat::identity(l.rank);
    if *m == id || target_neg == id {
        return Some(Vec::new());
    }
    let mut frontier: Vec<(IMat, Vec<String>)> = vec![(id, Vec::new())];
    let mut seen = std::collections::HashSet::new();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (mat, word) in &frontier {
            for (name, gen) in &table.entries {
                let prod = mat.mul(&gen.matrix);
                if prod == *m || prod == target_neg {
                    let mut w = word.clone();
                    w.push(name.clone());
                    return Some(w);
                }
                if seen.insert(prod.clone()) {
                    let mut w = word.clone();
                    w.push(name.clone());
                    next.push((prod, w));
                }
            }
        }
        frontier = next;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ivec, rvec};

    fn j12() -> GramLattice {
        GramLattice::new(
            IMat::from_rows(&[vec![6, 0], vec![0, -4]]),
            vec!["g".into(), "l".into()],
            ivec(&[1, 0]),
            vec![rvec(&[(1, 3), (0, 1)]), rvec(&[(0, 1), (1, 4)])],
        )
        .unwrap()
    }

    fn jsyz() -> GramLattice {
        GramLattice::new(
            IMat::from_rows(&[vec![6, 0, 0], vec![0, -4, 0], vec![0, 0, -4]]),
            vec!["g".into(), "l1".into(), "l2".into()],
            ivec(&[1, 0, 0]),
            vec![],
        )
        .unwrap()
    }

    fn jnonsyz() -> GramLattice {
        GramLattice::new(
            IMat::from_rows(&[vec![6, 0, 0], vec![0, -4, 2], vec![0, 2, -4]]),
            vec!["g".into(), "l1".into(), "l2".into()],
            ivec(&[1, 0, 0]),
            vec![],
        )
        .unwrap()
    }

    fn syz_r4() -> IMat {
        IMat::from_rows(&[vec![7, -4, 4], vec![6, -3, 4], vec![-6, 4, -3]])
    }

    fn nonsyz_r4() -> IMat {
        IMat::from_rows(&[vec![1, 0, 0], vec![0, 1, -1], vec![0, 1, 0]])
    }

    #[test]
    fn is_isometry_examples() {
        assert!(is_isometry(&jsyz(), &syz_r4()));
        assert!(is_isometry(&j12(), &IMat::identity(2)));
        let n = jnonsyz();
        let r4 = nonsyz_r4();
        assert!(is_isometry(&n, &r4));
        // R4 has exact order 6
        let mut p = IMat::identity(3);
        for k in 1..=6 {
            p = p.mul(&r4);
            if k < 6 {
                assert!(!p.is_identity(), "R4^{k} should not be the identity");
            }
        }
        assert!(p.is_identity());
    }

    #[test]
    fn reflection_examples() {
        let s = jsyz();
        let r = reflection_in(&s, &ivec(&[1, 1, 1])).unwrap();
        // image of g is g + 6*(1,1,1) = (7,6,6), still of square 6
        let img = r.apply(&ivec(&[1, 0, 0]));
        assert_eq!(img, ivec(&[7, 6, 6]));
        assert_eq!(gram_eval(&s, &img, &img).unwrap(), Int::from(6));
        // involutive
        assert!(r.compose(&r).is_identity());

        let l = j12();
        assert!(matches!(
            reflection_in(&l, &ivec(&[1, -2])),
            Err(IsometryError::NonIntegralReflection(_))
        ));
        assert!(matches!(
            reflection_in(&l, &ivec(&[0, 1])),
            Err(IsometryError::BadReflectionSquare(_))
        ));
    }

    #[test]
    fn word_eval_examples() {
        let mut table = GeneratorTable::new();
        table.insert(
            "R1",
            Isometry::from_matrix(IMat::from_rows(&[
                vec![5, 4, 0],
                vec![-6, -5, 0],
                vec![0, 0, -1],
            ])),
        );
        table.insert(
            "R3",
            Isometry::from_matrix(IMat::from_rows(&[
                vec![1, 0, 0],
                vec![0, 0, 1],
                vec![0, 1, 0],
            ])),
        );
        let w = word_eval(&table, &["R3".into(), "R1".into(), "R3".into()]).unwrap();
        // iota_2^* fixes (1, 0, -1)
        assert_eq!(w.apply(&ivec(&[1, 0, -1])), ivec(&[1, 0, -1]));
        assert!(w.compose(&w).is_identity());

        let empty = word_eval(&table, &[]).unwrap();
        assert!(empty.is_identity());
        assert!(matches!(
            word_eval(&table, &["R9".into()]),
            Err(IsometryError::UnknownSymbol(_))
        ));
    }

    #[test]
    fn nonsyz_involution_words() {
        let mut table = GeneratorTable::new();
        table.insert(
            "R1",
            Isometry::from_matrix(IMat::from_rows(&[
                vec![5, 4, -2],
                vec![-6, -5, 2],
                vec![0, 0, -1],
            ])),
        );
        table.insert("R4", Isometry::from_matrix(nonsyz_r4()));
        let w: Vec<String> = ["R4", "R4", "R4", "R1", "R4", "R4", "R4"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let iso = word_eval(&table, &w).unwrap();
        // (iota_1^vee)^* fixes (1, 1, 0) and is an involution
        assert_eq!(iso.apply(&ivec(&[1, 1, 0])), ivec(&[1, 1, 0]));
        assert!(iso.compose(&iso).is_identity());
        assert!(is_isometry(&jnonsyz(), &iso.matrix));
    }

    #[test]
    fn bounded_search_small_bounds() {
        let l = j12();
        let found = bounded_isometry_search(&l, 1);
        let r1 = IMat::from_rows(&[vec![1, 0], vec![0, -1]]);
        let matrices: Vec<&IMat> = found.iter().map(|i| &i.matrix).collect();
        assert!(matrices.contains(&&IMat::identity(2)));
        assert!(matrices.contains(&&IMat::identity(2).neg()));
        assert!(matrices.contains(&&r1));
        assert!(matrices.contains(&&r1.neg()));
        assert_eq!(found.len(), 4);
        for iso in &found {
            assert!(is_isometry(&l, &iso.matrix));
        }

        let s = jsyz();
        let found = bounded_isometry_search(&s, 1);
        let r2 = IMat::from_rows(&[vec![1, 0, 0], vec![0, -1, 0], vec![0, 0, 1]]);
        let r3 = IMat::from_rows(&[vec![1, 0, 0], vec![0, 0, 1], vec![0, 1, 0]]);
        let matrices: Vec<&IMat> = found.iter().map(|i| &i.matrix).collect();
        for m in [&r2, &r3] {
            assert!(matrices.contains(&m));
            let neg = m.neg();
            assert!(matrices.contains(&&neg));
        }
        // closed under negation and inverse
        for iso in &found {
            assert!(matrices.contains(&&iso.matrix.neg()));
            let inv = iso.inverse().matrix;
            assert!(matrices.contains(&&inv));
        }
    }

    #[test]
    fn positive_cone_examples() {
        let l = j12();
        let neg_id = Isometry::from_matrix(IMat::identity(2).neg());
        assert!(!preserves_positive_cone(&l, &neg_id));

        let s = jsyz();
        let r1 = Isometry::from_matrix(IMat::from_rows(&[
            vec![5, 4, 0],
            vec![-6, -5, 0],
            vec![0, 0, -1],
        ]));
        assert!(preserves_positive_cone(&s, &r1));

        let n = jnonsyz();
        let r2 = Isometry::from_matrix(IMat::from_rows(&[
            vec![3, 2, -2],
            vec![-2, -1, 2],
            vec![2, 2, -1],
        ]));
        assert!(preserves_positive_cone(&n, &r2));
    }
}
