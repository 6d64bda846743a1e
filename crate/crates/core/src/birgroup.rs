//! The birational criterion and the structure of Bir(F): which isometries
//! are induced by birational automorphisms, solving for the flop
//! involutions, orbit reduction under the involution generators, bounded
//! relator search, and nef-cone stabilizers.

use crate::chambers::{carve_chamber, chamber_isometries, mov_membership, Chamber, SliceShape};
use crate::geom::Polygon;
use crate::isometry::{is_isometry, preserves_positive_cone, Isometry};
use crate::lattice::{
    disc_action, disc_action_is_pm_identity, gram_eval, kernel_basis, positive_eigenvalue_count,
    rat_mod, residue_order, GramLattice, LatticeError,
};
use crate::matrix::{self, IMat, IVec, Int, Rat};
use crate::walls::{find_blocking_pex, vectors_of_square_posdef, WallsError};
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BirGroupError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Walls(#[from] WallsError),
    #[error("glue generators span a subgroup of order {got}, expected index two ({want})")]
    NotIndexTwo { got: Int, want: Int },
    #[error("no involution satisfies the constraints")]
    NoSolution,
    #[error("involution is not unique: {0} candidates")]
    NotUnique(usize),
    #[error("fixed vector must be primitive of positive square")]
    BadFixedVector,
    #[error("reduction did not terminate within {0} steps")]
    NonTermination(usize),
    #[error("vector has square {got}, expected {want}")]
    WrongSquare { got: Int, want: Int },
    #[error("wall class {0:?} is neither certified inside nor outside the movable cone")]
    DeltaUndetermined(Vec<String>),
    #[error("chamber error: {0}")]
    Chamber(String),
}

impl From<crate::chambers::ChambersError> for BirGroupError {
    fn from(e: crate::chambers::ChambersError) -> Self {
        BirGroupError::Chamber(e.to_string())
    }
}

/// Whether the movable cone is the full (closed) positive cone or is cut out
/// by prime exceptional walls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MovMode {
    RoundPos,
    PexBounded,
}

/// Data needed to decide the birational criterion.
#[derive(Clone, Debug)]
pub struct BirCriterionConfig {
    /// Generators of the index-two glue subgroup H of the discriminant group.
    pub glue_gens: Vec<Vec<Rat>>,
    pub mov_mode: MovMode,
    /// Interior witness of the movable cone (the polarization).
    pub witness: IVec,
}

impl BirCriterionConfig {
    /// Verify that the glue generators span an index-two subgroup of the
    /// discriminant group, by direct order count.
    pub fn validate(&self, l: &GramLattice) -> Result<(), BirGroupError> {
        let disc_order = l.det().abs();
        let mut seen = std::collections::HashSet::new();
        let orders: Vec<Int> = self.glue_gens.iter().map(|w| residue_order(w)).collect();
        let mut coeffs = vec![Int::zero(); self.glue_gens.len()];
        loop {
            let mut residue = Vec::with_capacity(l.rank);
            for r in 0..l.rank {
                let mut x = Rat::zero();
                for (i, c) in coeffs.iter().enumerate() {
                    x += Rat::from(c.clone()) * &self.glue_gens[i][r];
                }
                let frac = rat_mod(&x, 1);
                residue.push((frac.numer().clone(), frac.denom().clone()));
            }
            seen.insert(residue);
            let mut pos = 0;
            loop {
                if pos == coeffs.len() {
                    let got = Int::from(seen.len() as i64);
                    let want = &disc_order / Int::from(2);
                    if got == want {
                        return Ok(());
                    }
                    return Err(BirGroupError::NotIndexTwo { got, want });
                }
                coeffs[pos] += 1;
                if coeffs[pos] < orders[pos] {
                    break;
                }
                coeffs[pos] = Int::zero();
                pos += 1;
            }
        }
    }
}

/// Is the isometry induced by a birational automorphism? True iff it acts as
/// ±Id on the glue subgroup and preserves the movable cone (the positive
/// cone when the movable cone is round; otherwise additionally a
/// fundamental-domain membership test on the image of the witness).
pub fn bir_criterion(l: &GramLattice, cfg: &BirCriterionConfig, phi: &Isometry) -> bool {
    if !is_isometry(l, &phi.matrix) {
        return false;
    }
    let Ok((action, orders)) = disc_action(l, &phi.matrix, &cfg.glue_gens) else {
        return false;
    };
    if !disc_action_is_pm_identity(&action, &orders) {
        return false;
    }
    if !preserves_positive_cone(l, phi) {
        return false;
    }
    if cfg.mov_mode == MovMode::PexBounded {
        let image = phi.apply(&cfg.witness);
        let image_rat = matrix::ivec_to_rvec(&image);
        match mov_membership(l, &image_rat) {
            Ok(inside) => inside,
            Err(_) => false,
        }
    } else {
        true
    }
}

/// The unique involution fixing the given vector, not preserving the nef
/// cone, and passing the birational criterion. Candidates are built from the
/// finitely many isometries of the negative-definite orthogonal complement.
pub fn solve_involution(
    l: &GramLattice,
    cfg: &BirCriterionConfig,
    fixed: &[Int],
) -> Result<Isometry, BirGroupError> {
    if matrix::primitive_part(fixed) != *fixed || !gram_eval(l, fixed, fixed)?.is_positive() {
        return Err(BirGroupError::BadFixedVector);
    }
    let pairing_row = IMat::from_big_rows(vec![l.gram.mul_vec(fixed)]);
    let basis = kernel_basis(&pairing_row);
    let k = basis.len();
    let mut sub = IMat::zero(k, k);
    for i in 0..k {
        for j in 0..k {
            sub[(i, j)] = gram_eval(l, &basis[i], &basis[j])?;
        }
    }
    if positive_eigenvalue_count(&sub)
        .map(|p| p != 0)
        .unwrap_or(true)
    {
        return Err(BirGroupError::BadFixedVector);
    }
    let neg_sub = sub.neg();
    // all isometries of the complement, column by column
    let sigmas = negdef_isometries(&sub, &neg_sub);
    // nef chamber for the "does not preserve Nef(F)" filter
    let ample_rat = matrix::ivec_to_rvec(&l.ample);
    let nef = carve_chamber(l, &ample_rat)?;
    let nef_key = nef.key();
    // T = [fixed | basis] as columns
    let n = l.rank;
    let mut t = IMat::zero(n, n);
    for i in 0..n {
        t[(i, 0)] = fixed[i].clone();
    }
    for (j, b) in basis.iter().enumerate() {
        for i in 0..n {
            t[(i, j + 1)] = b[i].clone();
        }
    }
    let t_det = t.det();
    let t_adj = t.adjugate();
    let mut survivors: Vec<Isometry> = Vec::new();
    for sigma in sigmas {
        // involutions on the complement only
        if !sigma.mul(&sigma).is_identity() {
            continue;
        }
        // M = T diag(1, sigma) T^{-1}; reject non-integral lifts
        let mut block = IMat::zero(n, n);
        block[(0, 0)] = Int::one();
        for i in 0..k {
            for j in 0..k {
                block[(i + 1, j + 1)] = sigma[(i, j)].clone();
            }
        }
        let num = t.mul(&block).mul(&t_adj);
        let mut m = IMat::zero(n, n);
        let mut integral = true;
        'fill: for i in 0..n {
            for j in 0..n {
                if !(&num[(i, j)] % &t_det).is_zero() {
                    integral = false;
                    break 'fill;
                }
                m[(i, j)] = &num[(i, j)] / &t_det;
            }
        }
        if !integral || !is_isometry(l, &m) {
            continue;
        }
        let iso = Isometry::from_matrix(m);
        debug_assert!(iso.compose(&iso).is_identity());
        debug_assert_eq!(iso.apply(fixed), fixed.to_vec());
        if !preserves_positive_cone(l, &iso) {
            continue;
        }
        // exclude candidates that keep the nef cone (the identity-like ones)
        if transform_chamber(l, &iso.matrix, &nef).key() == nef_key {
            continue;
        }
        if bir_criterion(l, cfg, &iso) && !survivors.contains(&iso) {
            survivors.push(iso);
        }
    }
    match survivors.len() {
        0 => Err(BirGroupError::NoSolution),
        1 => Ok(survivors.into_iter().next().unwrap()),
        n => Err(BirGroupError::NotUnique(n)),
    }
}

/// All isometries of a negative definite lattice of rank 1 or 2, enumerated
/// through the vectors of the required squares.
fn negdef_isometries(sub: &IMat, neg_sub: &IMat) -> Vec<IMat> {
    let k = sub.rows;
    let mut out = Vec::new();
    match k {
        1 => {
            out.push(IMat::identity(1));
            out.push(IMat::identity(1).neg());
        }
        2 => {
            let c0s = vectors_of_square_posdef(neg_sub, &(-sub[(0, 0)].clone()));
            let c1s = vectors_of_square_posdef(neg_sub, &(-sub[(1, 1)].clone()));
            for c0 in &c0s {
                for c1 in &c1s {
                    // pairing constraint
                    let mut pair = Int::zero();
                    for i in 0..2 {
                        for j in 0..2 {
                            pair += &c0[i] * &sub[(i, j)] * &c1[j];
                        }
                    }
                    if pair != sub[(0, 1)] {
                        continue;
                    }
                    let m = IMat::from_big_rows(vec![
                        vec![c0[0].clone(), c1[0].clone()],
                        vec![c0[1].clone(), c1[1].clone()],
                    ]);
                    if m.det().abs().is_one() {
                        out.push(m);
                    }
                }
            }
        }
        _ => panic!("negative definite enumeration supports rank 1 and 2 only"),
    }
    out
}

/// Transform a chamber by an isometry that preserves the positive cone,
/// mapping rays, facets and the slice shape exactly.
pub fn transform_chamber(l: &GramLattice, m: &IMat, c: &Chamber) -> Chamber {
    let mut rays: Vec<IVec> = c.rays.iter().map(|r| m.mul_vec(r)).collect();
    // slice coordinates only make sense on the ample side of the cone
    assert!(
        rays.iter().all(|r| r[0].is_positive()),
        "transform_chamber needs an isometry preserving the positive cone"
    );
    rays.sort();
    let mut facets: Vec<(crate::walls::WallDivisor, i8)> = c
        .facets
        .iter()
        .map(|(w, s)| {
            let image = m.mul_vec(&w.vector);
            let norm = crate::walls::normalize_wall_vector(l, &image);
            let flipped = norm != image;
            let sign = if flipped { -s } else { *s };
            (
                crate::walls::WallDivisor {
                    vector: norm,
                    kind: w.kind,
                },
                sign,
            )
        })
        .collect();
    facets.sort_by(|a, b| a.0.cmp(&b.0));
    let interior = m.mul_vec(&c.interior);
    let shape = match &c.shape {
        SliceShape::Poly(poly) => {
            let verts: Vec<[Rat; 2]> = poly
                .vertices
                .iter()
                .map(|u| {
                    let v = vec![Rat::one(), u[0].clone(), u[1].clone()];
                    let w = mul_rat_vec(m, &v);
                    [&w[1] / &w[0], &w[2] / &w[0]]
                })
                .collect();
            SliceShape::Poly(Polygon { vertices: verts }.oriented_ccw())
        }
        SliceShape::Seg(iv) => {
            let map_pt = |y: &Rat| {
                let v = vec![Rat::one(), y.clone()];
                let w = mul_rat_vec(m, &v);
                &w[1] / &w[0]
            };
            let a = map_pt(&iv.lo);
            let b = map_pt(&iv.hi);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            SliceShape::Seg(crate::geom::Interval { lo, hi })
        }
    };
    Chamber {
        facets,
        rays,
        interior,
        label: c.label.clone(),
        shape,
    }
}

fn mul_rat_vec(m: &IMat, v: &[Rat]) -> Vec<Rat> {
    (0..m.rows)
        .map(|i| {
            let mut acc = Rat::zero();
            for j in 0..m.cols {
                acc += Rat::from(m[(i, j)].clone()) * &v[j];
            }
            acc
        })
        .collect()
}

/// Result of a greedy orbit reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitReduction {
    pub representative: IVec,
    /// Generator symbols in composition order: word_eval(word) applied to
    /// the input yields sign * representative.
    pub word: Vec<String>,
    pub sign: i8,
}

const REDUCTION_STEP_LIMIT: usize = 10_000;

/// Greedily shrink the first coordinate by applying the involution
/// generators; ties are broken by generator name order. The measure strictly
/// decreases at every step, so this terminates on every orbit with a
/// minimal-coordinate representative.
pub fn orbit_reduce(
    l: &GramLattice,
    generators: &[(String, Isometry)],
    v: &[Int],
    target_square: &Int,
) -> Result<OrbitReduction, BirGroupError> {
    let sq = gram_eval(l, v, v)?;
    if &sq != target_square {
        return Err(BirGroupError::WrongSquare {
            got: sq,
            want: target_square.clone(),
        });
    }
    let mut current = v.to_vec();
    let mut word: Vec<String> = Vec::new();
    for _ in 0..REDUCTION_STEP_LIMIT {
        let measure = current[0].abs();
        let mut best: Option<(Int, &String, IVec)> = None;
        for (name, iso) in generators {
            let image = iso.apply(&current);
            let m = image[0].abs();
            if m < measure {
                let better = match &best {
                    None => true,
                    Some((bm, _, _)) => m < *bm,
                };
                if better {
                    best = Some((m, name, image));
                }
            }
        }
        match best {
            Some((_, name, image)) => {
                // prepend: the new generator acts after the accumulated word
                word.insert(0, name.clone());
                current = image;
            }
            None => {
                let (rep, sign) = normalize_sign(l, &current);
                return Ok(OrbitReduction {
                    representative: rep,
                    word,
                    sign,
                });
            }
        }
    }
    Err(BirGroupError::NonTermination(REDUCTION_STEP_LIMIT))
}

fn normalize_sign(l: &GramLattice, v: &[Int]) -> (IVec, i8) {
    let norm = crate::walls::normalize_wall_vector(l, v);
    if norm == v {
        (norm, 1)
    } else {
        (norm, -1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitKind {
    Flop,
    Pex,
    Square(i64),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitEntry {
    pub representative: Vec<i64>,
    pub size: usize,
    /// Whether the representative's wall meets the movable cone (always true
    /// for square-type orbits and for round movable cones).
    pub in_delta: bool,
    /// For excluded wall classes, a prime exceptional certificate that the
    /// wall misses the movable cone.
    pub blocking_pex: Option<Vec<i64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitReport {
    pub kind: OrbitKind,
    pub coefficient_bound: i64,
    pub vector_count: usize,
    /// Partition by greedy reduction representative.
    pub orbits: Vec<OrbitEntry>,
    /// Count of orbits whose walls meet the movable cone.
    pub delta_orbit_count: usize,
    /// Number of representative groups after additionally identifying
    /// representatives connected by generator moves at the same first
    /// coordinate (a lower bound on orbit fusion; reduction representatives
    /// above the base level need not be orbit-distinct).
    pub fused_orbit_count: usize,
    /// For the syzygetic wall actions: every element with small first
    /// coordinate has a unique reduced word of its reduction length
    /// (evidence that the action is free).
    pub freeness_unique_words: Option<bool>,
}

/// Enumerate the requested vectors up to the coefficient bound (canonical
/// sign), reduce each one, and partition by representative.
pub fn orbit_count(
    l: &GramLattice,
    cfg: &BirCriterionConfig,
    generators: &[(String, Isometry)],
    kind: OrbitKind,
    coefficient_bound: i64,
    check_freeness: bool,
) -> Result<OrbitReport, BirGroupError> {
    assert!(
        coefficient_bound >= 5,
        "coefficient bound must be at least 5"
    );
    let (target, walls) = match kind {
        OrbitKind::Flop => (Int::from(-10), true),
        OrbitKind::Pex => (Int::from(-2), true),
        OrbitKind::Square(n) => (Int::from(n), false),
    };
    let vectors = enumerate_by_first_coordinate(l, &target, coefficient_bound, walls, kind)?;
    let vector_count = vectors.len();
    let mut groups: std::collections::BTreeMap<IVec, usize> = std::collections::BTreeMap::new();
    let mut reduction_lengths: std::collections::BTreeMap<IVec, Vec<(IVec, usize)>> =
        std::collections::BTreeMap::new();
    for v in &vectors {
        let red = orbit_reduce(l, generators, v, &target)?;
        let rep = red.representative;
        *groups.entry(rep.clone()).or_insert(0) += 1;
        reduction_lengths
            .entry(rep)
            .or_default()
            .push((v.clone(), red.word.len()));
    }
    // generators can identify distinct reduction representatives at the same
    // first coordinate; count the fused groups for the report
    let fused_orbit_count = {
        let mut canon: std::collections::BTreeSet<IVec> = std::collections::BTreeSet::new();
        for rep in groups.keys() {
            canon.insert(canonical_stalled_rep(l, generators, rep));
        }
        canon.len()
    };
    let nef_walls = nef_contact_walls(l)?;
    let mut orbits = Vec::new();
    let mut delta = 0usize;
    for (rep, size) in &groups {
        let no_delta_filter =
            !walls || cfg.mov_mode == MovMode::RoundPos || nef_walls.contains(rep);
        let (in_delta, blocking) = if no_delta_filter {
            (true, None)
        } else {
            match find_blocking_pex(l, rep, 9)? {
                Some(p) => (false, Some(p)),
                None => {
                    return Err(BirGroupError::DeltaUndetermined(
                        rep.iter().map(|x| x.to_string()).collect(),
                    ))
                }
            }
        };
        if in_delta {
            delta += 1;
        }
        orbits.push(OrbitEntry {
            representative: rep.iter().map(small).collect(),
            size: *size,
            in_delta,
            blocking_pex: blocking.map(|p| p.iter().map(small).collect()),
        });
    }
    let freeness_unique_words = if check_freeness {
        let mut all_unique = true;
        for (rep, members) in &reduction_lengths {
            if !orbits.iter().any(|o| {
                o.in_delta && o.representative == rep.iter().map(small).collect::<Vec<_>>()
            }) {
                continue;
            }
            for (v, len) in members {
                if v[0].abs() > Int::from(20) {
                    continue;
                }
                if count_words_mapping(generators, rep, v, *len) != 1 {
                    all_unique = false;
                }
            }
        }
        Some(all_unique)
    } else {
        None
    };
    Ok(OrbitReport {
        kind,
        coefficient_bound,
        vector_count,
        orbits,
        delta_orbit_count: delta,
        fused_orbit_count,
        freeness_unique_words,
    })
}

fn small(x: &Int) -> i64 {
    i64::try_from(x).expect("coordinate fits i64")
}

/// Vectors of the given square with 0 <= first coordinate <= bound in
/// canonical sign, optionally filtered to wall divisors.
fn enumerate_by_first_coordinate(
    l: &GramLattice,
    target: &Int,
    bound: i64,
    walls: bool,
    kind: OrbitKind,
) -> Result<Vec<IVec>, BirGroupError> {
    let mut e0 = vec![Int::zero(); l.rank];
    e0[0] = Int::one();
    assert_eq!(l.ample, e0, "polarization must be the first basis vector");
    let e = l.gram[(0, 0)].clone();
    let mut neg = IMat::zero(l.rank - 1, l.rank - 1);
    for i in 1..l.rank {
        for j in 1..l.rank {
            neg[(i - 1, j - 1)] = -l.gram[(i, j)].clone();
        }
    }
    let mut out = Vec::new();
    let mut a = Int::zero();
    while a <= Int::from(bound) {
        let m = &e * &a * &a - target;
        for w in vectors_of_square_posdef(&neg, &m) {
            let mut v = vec![a.clone()];
            v.extend(w);
            if matrix::primitive_part(&v) != v {
                continue;
            }
            if walls {
                let class = crate::walls::classify_wall(l, &v)?;
                let keep = matches!(
                    (kind, class),
                    (OrbitKind::Flop, crate::walls::WallClass::Flop)
                        | (OrbitKind::Pex, crate::walls::WallClass::Pex)
                );
                if !keep {
                    continue;
                }
            }
            let norm = crate::walls::normalize_wall_vector(l, &v);
            if !out.contains(&norm) {
                out.push(norm);
            }
        }
        a += 1;
    }
    out.sort();
    Ok(out)
}

/// Walls in contact with the nef chamber around the polarization (facets and
/// corner contacts); these certify movable-cone membership for reduction
/// representatives.
fn nef_contact_walls(l: &GramLattice) -> Result<Vec<IVec>, BirGroupError> {
    let ample_rat = matrix::ivec_to_rvec(&l.ample);
    let nef = carve_chamber(l, &ample_rat)?;
    let region = nef.region(l)?;
    let mut out = Vec::new();
    for kind in [crate::walls::WallKind::Pex, crate::walls::WallKind::Flop] {
        for w in crate::walls::enumerate_walls_in_region(l, &region, kind)? {
            out.push(w.vector);
        }
    }
    Ok(out)
}

/// Lex-minimal element of the same-level closure of a reduction
/// representative (walking generator images that keep the first coordinate
/// equal); used to count fused representative groups.
fn canonical_stalled_rep(l: &GramLattice, generators: &[(String, Isometry)], rep: &[Int]) -> IVec {
    let level = rep[0].abs();
    if level <= Int::one() {
        return rep.to_vec();
    }
    let mut seen: std::collections::BTreeSet<IVec> = std::collections::BTreeSet::new();
    let mut queue = vec![rep.to_vec()];
    seen.insert(rep.to_vec());
    while let Some(v) = queue.pop() {
        if seen.len() > 1000 {
            break;
        }
        for (_, iso) in generators {
            let img = iso.apply(&v);
            if img[0].abs() == level {
                let norm = crate::walls::normalize_wall_vector(l, &img);
                if seen.insert(norm.clone()) {
                    queue.push(norm);
                }
            }
        }
    }
    seen.into_iter().next().unwrap()
}

/// Number of distinct reduced words of exactly the given length mapping the
/// representative onto ±v.
fn count_words_mapping(
    generators: &[(String, Isometry)],
    rep: &[Int],
    v: &[Int],
    len: usize,
) -> usize {
    let neg: IVec = v.iter().map(|x| -x).collect();
    let mut count = 0;
    let mut stack: Vec<(Vec<usize>, IVec)> = vec![(Vec::new(), rep.to_vec())];
    while let Some((word, current)) = stack.pop() {
        if word.len() == len {
            if current == v || current == neg {
                count += 1;
            }
            continue;
        }
        for (gi, (_, iso)) in generators.iter().enumerate() {
            if word.last() == Some(&gi) {
                continue; // involution squares are trivial
            }
            let mut w = word.clone();
            w.push(gi);
            stack.push((w, iso.apply(&current)));
        }
    }
    count
}

/// A relation among the involution generators: two distinct reduced words
/// with the same matrix, plus the induced cyclically reduced relator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Relator {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
    pub relator: Vec<String>,
}

/// All minimal relators of length at most `max_length` beyond the involution
/// relations, by collision search over reduced words of half length. Matrix
/// equality detects relations in the image in O(NS); for the configured
/// scenarios the representation of the birational group is faithful, so
/// these are relations of the abstract group.
pub fn find_relations(generators: &[(String, Isometry)], max_length: usize) -> Vec<Relator> {
    let half = max_length.div_ceil(2);
    let rank = generators
        .first()
        .map(|(_, iso)| iso.matrix.rows)
        .unwrap_or(0);
    let mut table: std::collections::HashMap<IMat, Vec<String>> = std::collections::HashMap::new();
    table.insert(IMat::identity(rank), Vec::new());
    // one entry per cyclically reduced relator, keeping the first collision
    // pair that exhibited it
    let mut relators: std::collections::BTreeMap<Vec<String>, Relator> =
        std::collections::BTreeMap::new();
    let mut frontier: Vec<(Vec<String>, IMat)> = vec![(Vec::new(), IMat::identity(rank))];
    for _ in 0..half {
        let mut next = Vec::new();
        for (word, mat) in &frontier {
            for (name, iso) in generators {
                if word.last() == Some(name) {
                    continue;
                }
                let mut w = word.clone();
                w.push(name.clone());
                let m = mat.mul(&iso.matrix);
                match table.get(&m) {
                    Some(existing) => {
                        if let Some(rel) = make_relator(existing, &w, max_length) {
                            relators.entry(rel.relator.clone()).or_insert(rel);
                        }
                    }
                    None => {
                        table.insert(m.clone(), w.clone());
                        next.push((w, m));
                    }
                }
            }
        }
        frontier = next;
    }
    relators.into_values().collect()
}

fn make_relator(lhs: &[String], rhs: &[String], max_length: usize) -> Option<Relator> {
    // relator = lhs * rhs^{-1}; involutions invert by reversal
    let mut word: Vec<String> = lhs.to_vec();
    word.extend(rhs.iter().rev().cloned());
    // free reduction
    let mut reduced: Vec<String> = Vec::new();
    for s in word {
        if reduced.last() == Some(&s) {
            reduced.pop();
        } else {
            reduced.push(s);
        }
    }
    // cyclic reduction
    while reduced.len() >= 2 && reduced.first() == reduced.last() {
        reduced.pop();
        reduced.remove(0);
    }
    if reduced.is_empty() || reduced.len() > max_length {
        return None;
    }
    // canonical rotation (including reversal) for deduplication
    let mut best = reduced.clone();
    let n = reduced.len();
    let reversed: Vec<String> = reduced.iter().rev().cloned().collect();
    for word in [&reduced, &reversed] {
        for r in 0..n {
            let mut rot: Vec<String> = word[r..].to_vec();
            rot.extend_from_slice(&word[..r]);
            if rot < best {
                best = rot;
            }
        }
    }
    Some(Relator {
        lhs: lhs.to_vec(),
        rhs: rhs.to_vec(),
        relator: best,
    })
}

/// All isometries mapping the chamber onto itself that pass the birational
/// criterion; the identity is always included.
pub fn nef_stabilizer(
    l: &GramLattice,
    cfg: &BirCriterionConfig,
    chamber: &Chamber,
) -> Vec<Isometry> {
    let mut out = Vec::new();
    for m in chamber_isometries(l, chamber, chamber) {
        let iso = Isometry::from_matrix(m);
        if bir_criterion(l, cfg, &iso) && !out.contains(&iso) {
            out.push(iso);
        }
    }
    out
}

/// Factor a census certificate as (word in the involution generators)
/// composed with a nef-cone stabilizer element: given phi with
/// phi(rep) = member, find a word W with W(rep) = member and
/// s = W^{-1} phi in the stabilizer of rep.
pub fn factor_certificate(
    l: &GramLattice,
    cfg: &BirCriterionConfig,
    generators: &[(String, Isometry)],
    rep: &Chamber,
    phi: &Isometry,
) -> Option<(Vec<String>, Isometry)> {
    let member = transform_chamber(l, &phi.matrix, rep);
    // greedy reduction on the interior's first coordinate
    let mut current = member.clone();
    let mut inverse_word: Vec<String> = Vec::new(); // generators applied, in application order
    loop {
        let measure = current.interior[0].abs();
        let mut best: Option<(Int, &String, Chamber)> = None;
        for (name, iso) in generators {
            let cand = transform_chamber(l, &iso.matrix, &current);
            let m = cand.interior[0].abs();
            if m < measure {
                let better = match &best {
                    None => true,
                    Some((bm, _, _)) => m < *bm,
                };
                if better {
                    best = Some((m, name, cand));
                }
            }
        }
        match best {
            Some((_, name, cand)) => {
                inverse_word.push(name.clone());
                current = cand;
            }
            None => break,
        }
        if inverse_word.len() > 64 {
            return None;
        }
    }
    // same-level search connecting the stalled chamber to the representative
    if current.key() != rep.key() {
        let level = current.interior[0].abs();
        let mut queue = std::collections::VecDeque::new();
        queue.push_back((current.clone(), Vec::<String>::new()));
        let mut seen = std::collections::HashSet::new();
        seen.insert(current.key());
        let mut found: Option<(Chamber, Vec<String>)> = None;
        while let Some((ch, path)) = queue.pop_front() {
            if path.len() > 6 {
                continue;
            }
            if ch.key() == rep.key() {
                found = Some((ch, path));
                break;
            }
            for (name, iso) in generators {
                let cand = transform_chamber(l, &iso.matrix, &ch);
                if cand.interior[0].abs() != level {
                    continue;
                }
                if seen.insert(cand.key()) {
                    let mut p = path.clone();
                    p.push(name.clone());
                    queue.push_back((cand, p));
                }
            }
        }
        let (_, extra) = found?;
        inverse_word.extend(extra);
    }
    // steps g1, g2, ..., gk applied in order satisfy (gk···g1)(member) = rep,
    // so member = (g1 ∘ g2 ∘ ... ∘ gk)(rep): the application list already is
    // the word in composition order
    let word: Vec<String> = inverse_word;
    let mut w_mat = IMat::identity(l.rank);
    for symbol in &word {
        let (_, iso) = generators.iter().find(|(n, _)| n == symbol)?;
        w_mat = w_mat.mul(&iso.matrix);
    }
    let w_inv = w_mat.unimodular_inverse()?;
    let stab = Isometry::from_matrix(w_inv.mul(&phi.matrix));
    // verify: stab fixes the representative chamber and is birational
    if transform_chamber(l, &stab.matrix, rep).key() != rep.key() {
        return None;
    }
    if !bir_criterion(l, cfg, &stab) {
        return None;
    }
    Some((word, stab))
}
