//! Wall divisors: enumeration inside a cone region, classification, modular
//! representability certificates, and negative-definite obstruction sweeps.
//!
//! A wall divisor is a primitive class of square -2 (prime exceptional) or of
//! square -10 with full divisibility 2 (flopping wall). Wall vectors are
//! normalized to pair non-negatively with the polarization, ties broken by
//! lexicographic positivity.

use crate::lattice::{divisibility_full, gram_eval, GramLattice, LatticeError};
use crate::matrix::{self, isqrt, IMat, IVec, Int, Rat};
use num::{Integer as _, One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WallsError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("region ray {0:?} is not inside the closed positive cone")]
    RayOutsidePositiveCone(Vec<String>),
    #[error("region ray {0:?} pairs non-positively with the polarization")]
    RayOnWrongSide(Vec<String>),
    #[error("region touches the boundary of the positive cone; clip the region to rays of positive square first")]
    RegionTouchesBoundary,
    #[error("the polarization must be the first basis vector and orthogonal to the rest")]
    UnsupportedBasisShape,
    #[error("representability undecided within coefficient box {0}")]
    Undecided(i64),
    #[error("orthogonal complement is not negative definite")]
    ComplementNotNegativeDefinite,
    #[error("zero vector not allowed")]
    ZeroVector,
}

#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
pub enum WallKind {
    Pex,
    Flop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WallClass {
    Pex,
    Flop,
    NotWall,
}

/// Primitive wall vector in canonical sign, tagged by kind.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WallDivisor {
    pub vector: IVec,
    pub kind: WallKind,
}

/// Canonical sign: q(v, ample) >= 0, with q(v, ample) = 0 broken by making
/// the first nonzero coordinate positive.
pub fn normalize_wall_vector(l: &GramLattice, v: &[Int]) -> IVec {
    let prim = matrix::primitive_part(v);
    let pairing = gram_eval(l, &prim, &l.ample).unwrap();
    if pairing.is_positive() {
        prim
    } else if pairing.is_negative() {
        prim.iter().map(|x| -x).collect()
    } else {
        matrix::lex_positive(&prim)
    }
}

pub fn classify_wall(l: &GramLattice, v: &[Int]) -> Result<WallClass, WallsError> {
    if matrix::vec_is_zero(v) {
        return Err(WallsError::ZeroVector);
    }
    let prim = matrix::primitive_part(v);
    let sq = gram_eval(l, &prim, &prim)?;
    if sq == Int::from(-2) {
        return Ok(WallClass::Pex);
    }
    if sq == Int::from(-10) && divisibility_full(l, &prim)? == Int::from(2) {
        return Ok(WallClass::Flop);
    }
    Ok(WallClass::NotWall)
}

pub fn wall_divisor(
    l: &GramLattice,
    v: &[Int],
    kind: WallKind,
) -> Result<Option<WallDivisor>, WallsError> {
    let class = classify_wall(l, v)?;
    let matches = matches!(
        (class, kind),
        (WallClass::Pex, WallKind::Pex) | (WallClass::Flop, WallKind::Flop)
    );
    if !matches {
        return Ok(None);
    }
    Ok(Some(WallDivisor {
        vector: normalize_wall_vector(l, v),
        kind,
    }))
}

/// Rational polyhedral cone given by extremal rays, all of positive square
/// and positive polarization pairing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeRegion {
    pub rays: Vec<IVec>,
}

impl ConeRegion {
    pub fn new(l: &GramLattice, rays: Vec<IVec>) -> Result<Self, WallsError> {
        for r in &rays {
            let sq = gram_eval(l, r, r)?;
            if sq.is_negative() {
                return Err(WallsError::RayOutsidePositiveCone(strvec(r)));
            }
            if sq.is_zero() {
                return Err(WallsError::RegionTouchesBoundary);
            }
            if !gram_eval(l, r, &l.ample)?.is_positive() {
                return Err(WallsError::RayOnWrongSide(strvec(r)));
            }
        }
        Ok(ConeRegion { rays })
    }
}

fn strvec(v: &[Int]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

/// Check the block shape all census lattices share: the polarization is the
/// first basis vector and is orthogonal to the remaining basis vectors.
fn split_form(l: &GramLattice) -> Result<(Int, IMat), WallsError> {
    let e0: IVec = {
        let mut v = vec![Int::zero(); l.rank];
        v[0] = Int::one();
        v
    };
    if l.ample != e0 {
        return Err(WallsError::UnsupportedBasisShape);
    }
    for j in 1..l.rank {
        if !l.gram[(0, j)].is_zero() {
            return Err(WallsError::UnsupportedBasisShape);
        }
    }
    let e = l.gram[(0, 0)].clone();
    let mut neg = IMat::zero(l.rank - 1, l.rank - 1);
    for i in 1..l.rank {
        for j in 1..l.rank {
            neg[(i - 1, j - 1)] = -l.gram[(i, j)].clone();
        }
    }
    Ok((e, neg))
}

/// All integer vectors w with wᵀ M w = m, for M positive definite of rank 1
/// or 2, in lexicographic order.
pub fn vectors_of_square_posdef(m_mat: &IMat, m: &Int) -> Vec<IVec> {
    let mut out = Vec::new();
    if m.is_negative() {
        return out;
    }
    match m_mat.rows {
        1 => {
            let p = &m_mat[(0, 0)];
            assert!(p.is_positive());
            if (m % p).is_zero() {
                let sq = m / p;
                let r = isqrt(&sq);
                if &r * &r == sq {
                    if r.is_zero() {
                        out.push(vec![Int::zero()]);
                    } else {
                        out.push(vec![-r.clone()]);
                        out.push(vec![r]);
                    }
                }
            }
        }
        2 => {
            let p = m_mat[(0, 0)].clone();
            let q = m_mat[(0, 1)].clone();
            let r = m_mat[(1, 1)].clone();
            let det = &p * &r - &q * &q;
            assert!(
                p.is_positive() && det.is_positive(),
                "not positive definite"
            );
            // p b^2 + 2 q b c + r c^2 = m; discriminant in c:
            // c = (-q b ± sqrt(r m - det b^2)) / r
            let bmax: Int = isqrt(&((&r * m) / &det)) + 1;
            let mut b = -bmax.clone();
            while b <= bmax {
                let disc = &r * m - &det * &b * &b;
                if !disc.is_negative() {
                    let s = isqrt(&disc);
                    if &s * &s == disc {
                        for sign in [Int::one(), -Int::one()] {
                            let num = -&q * &b + &sign * &s;
                            if (&num % &r).is_zero() {
                                let c = num / &r;
                                // re-verify (guards the ± collapse at s = 0)
                                let val = &p * &b * &b + Int::from(2) * &q * &b * &c + &r * &c * &c;
                                if &val == m {
                                    let cand = vec![b.clone(), c];
                                    if !out.contains(&cand) {
                                        out.push(cand);
                                    }
                                }
                            }
                        }
                    }
                }
                b += 1;
            }
            out.sort();
        }
        _ => panic!("vectors_of_square_posdef supports rank 1 and 2 only"),
    }
    out
}

/// Exact per-region first-coordinate bound for wall vectors of square `s`:
/// a wall hyperplane can only meet the region if
/// a^2 <= (-s) d^2 / (e (e - d^2)) where d^2 is the largest slice norm of a
/// region ray. Returns the largest admissible |a|.
fn first_coordinate_bound(
    e: &Int,
    neg: &IMat,
    region: &ConeRegion,
    s: &Int,
) -> Result<Int, WallsError> {
    // d^2 = max over rays (a, w) of wᵀ(-N)w / a^2, as an exact rational
    let mut d2 = Rat::zero();
    for ray in &region.rays {
        let a = &ray[0];
        if !a.is_positive() {
            return Err(WallsError::RayOnWrongSide(strvec(ray)));
        }
        let w = &ray[1..];
        let mut norm = Int::zero();
        for i in 0..neg.rows {
            for j in 0..neg.cols {
                norm += &neg[(i, j)] * &w[i] * &w[j];
            }
        }
        let val = Rat::new(norm, a * a);
        if val > d2 {
            d2 = val;
        }
    }
    let e_rat = Rat::from(e.clone());
    if d2 >= e_rat {
        return Err(WallsError::RegionTouchesBoundary);
    }
    // a^2 <= (-s) d2 / (e (e - d2))
    let bound = Rat::from(-s.clone()) * &d2 / (e_rat.clone() * (e_rat - d2));
    let num = bound.numer().clone();
    let den = bound.denom().clone();
    let mut a_max = isqrt(&num.div_floor(&den));
    while (&a_max + 1) * (&a_max + 1) * &den <= num {
        a_max += 1;
    }
    Ok(a_max)
}

/// Complete list of wall divisors of the requested kind whose hyperplane
/// meets the closed region. Completeness comes from the exact distance bound
/// on the first coordinate plus finite enumeration on the negative-definite
/// complement slice.
pub fn enumerate_walls_in_region(
    l: &GramLattice,
    region: &ConeRegion,
    kind: WallKind,
) -> Result<Vec<WallDivisor>, WallsError> {
    let (e, neg) = split_form(l)?;
    let s = match kind {
        WallKind::Pex => Int::from(-2),
        WallKind::Flop => Int::from(-10),
    };
    let a_max = first_coordinate_bound(&e, &neg, region, &s)?;
    let mut found: Vec<WallDivisor> = Vec::new();
    let mut a = Int::zero();
    while a <= a_max {
        let m = &e * &a * &a - &s;
        for w in vectors_of_square_posdef(&neg, &m) {
            let mut v = vec![a.clone()];
            v.extend(w);
            // squares -2 and -10 force primitivity, but keep the guard
            if !matrix::primitive_part(&v).eq(&v) {
                continue;
            }
            let Some(wall) = wall_divisor(l, &v, kind)? else {
                continue;
            };
            // closed-intersection test: q(v, .) must change sign or vanish
            // somewhere on the region's extremal rays
            let mut has_nonneg = false;
            let mut has_nonpos = false;
            for ray in &region.rays {
                let p = gram_eval(l, &wall.vector, ray)?;
                if !p.is_negative() {
                    has_nonneg = true;
                }
                if !p.is_positive() {
                    has_nonpos = true;
                }
            }
            if has_nonneg && has_nonpos && !found.contains(&wall) {
                found.push(wall);
            }
        }
        a += 1;
    }
    found.sort();
    Ok(found)
}

/// Certificate that the form does or does not represent a target value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepresentabilityCertificate {
    /// A vector with q(v, v) = n exactly.
    Represented(IVec),
    /// A modulus M such that q(v, v) ≡ n (mod M) has no solution.
    Obstructed(i64),
}

const SIEVE_MODULI: [i64; 4] = [8, 9, 16, 64];
const MAX_WITNESS_BOX: i64 = 32;

/// Decide whether the form represents n < 0: first a residue sieve over the
/// fixed modulus list, then a growing coefficient box for a witness.
pub fn represents(l: &GramLattice, n: &Int) -> Result<RepresentabilityCertificate, WallsError> {
    for m in SIEVE_MODULI {
        if verify_obstruction(l, n, m) {
            return Ok(RepresentabilityCertificate::Obstructed(m));
        }
    }
    let mut bound = 1i64;
    while bound <= MAX_WITNESS_BOX {
        if let Some(v) = witness_search(l, n, bound) {
            return Ok(RepresentabilityCertificate::Represented(v));
        }
        bound *= 2;
    }
    Err(WallsError::Undecided(MAX_WITNESS_BOX))
}

/// True iff q(v, v) ≡ n (mod m) has no solution, by full residue
/// enumeration; this is the re-verification required of every Obstructed
/// certificate.
pub fn verify_obstruction(l: &GramLattice, n: &Int, m: i64) -> bool {
    let mm = Int::from(m);
    let target = n.mod_floor(&mm);
    let mut coords = vec![Int::zero(); l.rank];
    loop {
        let q = gram_eval(l, &coords, &coords).unwrap().mod_floor(&mm);
        if q == target {
            return false;
        }
        let mut pos = 0;
        loop {
            if pos == l.rank {
                return true;
            }
            coords[pos] += 1;
            if coords[pos] < mm {
                break;
            }
            coords[pos] = Int::zero();
            pos += 1;
        }
    }
}

/// Depth-first witness search in the box |coords| <= bound, each coordinate
/// iterated in the order 0, 1, -1, 2, -2, ...; returns the first hit.
fn witness_search(l: &GramLattice, n: &Int, bound: i64) -> Option<IVec> {
    let mut order = vec![0i64];
    for k in 1..=bound {
        order.push(k);
        order.push(-k);
    }
    fn rec(l: &GramLattice, n: &Int, order: &[i64], coords: &mut IVec) -> Option<IVec> {
        if coords.len() == l.rank {
            if matrix::vec_is_zero(coords) {
                return None;
            }
            if &gram_eval(l, coords, coords).unwrap() == n {
                return Some(coords.clone());
            }
            return None;
        }
        for &v in order {
            coords.push(Int::from(v));
            if let Some(hit) = rec(l, n, order, coords) {
                return Some(hit);
            }
            coords.pop();
        }
        None
    }
    rec(l, n, &order, &mut Vec::new())
}

/// Complete list of vectors orthogonal to `orthogonal_to` with square in
/// `squares` and full divisibility `required_div`; the orthogonal complement
/// must be negative definite, which makes the list finite.
pub fn negdef_obstruction_sweep(
    l: &GramLattice,
    orthogonal_to: &[Int],
    squares: &[i64],
    required_div: i64,
) -> Result<Vec<IVec>, WallsError> {
    let pairing_row = {
        let gv = l.gram.mul_vec(orthogonal_to);
        IMat::from_big_rows(vec![gv])
    };
    let basis = crate::lattice::kernel_basis(&pairing_row);
    let k = basis.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    // gram of the complement in the kernel basis
    let mut sub = IMat::zero(k, k);
    for i in 0..k {
        for j in 0..k {
            sub[(i, j)] = gram_eval(l, &basis[i], &basis[j])?;
        }
    }
    let plus = crate::lattice::positive_eigenvalue_count(&sub)
        .map_err(|_| WallsError::ComplementNotNegativeDefinite)?;
    if plus != 0 {
        return Err(WallsError::ComplementNotNegativeDefinite);
    }
    let neg_sub = sub.neg();
    let mut out: Vec<IVec> = Vec::new();
    for &s in squares {
        assert!(s < 0, "sweep targets must be negative squares");
        let m = Int::from(-s);
        for w in vectors_of_square_posdef(&neg_sub, &m) {
            // map back to lattice coordinates
            let mut v = vec![Int::zero(); l.rank];
            for (i, b) in basis.iter().enumerate() {
                for r in 0..l.rank {
                    let t = &w[i] * &b[r];
                    v[r] += t;
                }
            }
            if divisibility_full(l, &v)? != Int::from(required_div) {
                continue;
            }
            let norm = normalize_wall_vector(l, &v);
            if !out.contains(&norm) {
                out.push(norm);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// The primitive class spanning rho^⊥ in a rank-2 lattice, normalized to
/// pair positively with the polarization: the nef-cone edge class cut out by
/// the wall.
pub fn nef_edge_class(l: &GramLattice, rho: &[Int]) -> Result<IVec, WallsError> {
    if l.rank != 2 {
        return Err(WallsError::UnsupportedBasisShape);
    }
    if matrix::vec_is_zero(rho) {
        return Err(WallsError::ZeroVector);
    }
    let row = IMat::from_big_rows(vec![l.gram.mul_vec(rho)]);
    let kernel = crate::lattice::kernel_basis(&row);
    let alpha = matrix::primitive_part(&kernel[0]);
    if gram_eval(l, &alpha, &l.ample)?.is_negative() {
        return Ok(alpha.iter().map(|x| -x).collect());
    }
    Ok(alpha)
}

/// Certificate that `pex` separates the whole positive part of wall^⊥ from
/// the ample chamber: the common line of the two hyperplanes has negative
/// square and the projection of the polarization onto wall^⊥ pairs
/// negatively with pex (which itself pairs positively with the
/// polarization). A wall with such a certificate meets the movable cone only
/// at the origin.
pub fn pex_blocks_wall(l: &GramLattice, wall: &[Int], pex: &[Int]) -> Result<bool, WallsError> {
    if gram_eval(l, pex, pex)? != Int::from(-2) {
        return Ok(false);
    }
    let pex_g = gram_eval(l, pex, &l.ample)?;
    if !pex_g.is_positive() {
        return Ok(false);
    }
    // x0 = g - (q(g, w)/q(w, w)) w, the projection of g onto wall^⊥,
    // scaled by q(w, w) < 0 to stay integral: x0' = q(w,w) g - q(g,w) w
    let ww = gram_eval(l, wall, wall)?;
    let gw = gram_eval(l, &l.ample, wall)?;
    let x0: IVec = (0..l.rank)
        .map(|i| &ww * &l.ample[i] - &gw * &wall[i])
        .collect();
    // x0' = q(w,w)·x0 flips orientation (q(w,w) < 0), so x0 ∈ wall^⊥ on the
    // g-side corresponds to -x0'
    let x0: IVec = x0.iter().map(|x| -x).collect();
    debug_assert!(gram_eval(l, &x0, wall).unwrap().is_zero());
    debug_assert!(gram_eval(l, &x0, &l.ample).unwrap().is_positive());
    if !gram_eval(l, pex, &x0)?.is_negative() {
        return Ok(false);
    }
    // the common line wall^⊥ ∩ pex^⊥ must carry no positive vectors
    let rows = vec![l.gram.mul_vec(wall), l.gram.mul_vec(pex)];
    let m = IMat::from_big_rows(rows);
    let kernel = crate::lattice::kernel_basis(&m);
    for d in &kernel {
        if !gram_eval(l, d, d)?.is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Search for a prime exceptional class certifying that the wall hyperplane
/// misses the movable cone; candidates are enumerated by first coordinate up
/// to `search_bound`.
pub fn find_blocking_pex(
    l: &GramLattice,
    wall: &[Int],
    search_bound: i64,
) -> Result<Option<IVec>, WallsError> {
    let (e, neg) = split_form(l)?;
    let mut a = Int::zero();
    while a <= Int::from(search_bound) {
        let m = &e * &a * &a + Int::from(2);
        for w in vectors_of_square_posdef(&neg, &m) {
            let mut v = vec![a.clone()];
            v.extend(w);
            for cand in [v.clone(), v.iter().map(|x| -x).collect::<IVec>()] {
                if pex_blocks_wall(l, wall, &cand)? {
                    return Ok(Some(cand));
                }
            }
        }
        a += 1;
    }
    Ok(None)
}
