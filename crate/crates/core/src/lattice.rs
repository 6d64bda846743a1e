//! Integer lattices with a symmetric bilinear form.
//!
//! A [`GramLattice`] is the Neron-Severi lattice of a hyperkahler fourfold in
//! a fixed basis, together with the distinguished polarization and the
//! generators of the glue subgroup of its discriminant group coming from the
//! ambient second cohomology. An [`IntersectionLattice`] is the lattice of
//! algebraic middle cohomology of the cubic fourfold itself; the two are
//! related by [`abel_jacobi`].

use crate::matrix::{self, IMat, IVec, Int, Rat};
use num::{Integer as _, One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("gram matrix must have signature (1, rank-1), got {plus} positive eigenvalues")]
    WrongSignature { plus: usize },
    #[error("polarization must have positive square")]
    AmpleNotPositive,
    #[error("glue generator {index} does not lie in the dual lattice")]
    GlueNotDual { index: usize },
    #[error("gram matrix is degenerate")]
    Degenerate,
    #[error("zero vector not allowed")]
    ZeroVector,
    #[error("isometry does not preserve the given subgroup")]
    SubgroupNotPreserved,
    #[error("distinguished class must have square 3")]
    BadEta,
}

/// Rank 2 or 3 integer lattice carrying the restricted BBF form, the
/// polarization class and the glue-subgroup generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramLattice {
    pub rank: usize,
    pub gram: IMat,
    pub basis_labels: Vec<String>,
    pub ample: IVec,
    /// Rational vectors in L ⊗ Q generating the glue subgroup H of the
    /// discriminant group (empty when no overlattice data is configured).
    pub glue_gens: Vec<Vec<Rat>>,
}

impl GramLattice {
    pub fn new(
        gram: IMat,
        basis_labels: Vec<String>,
        ample: IVec,
        glue_gens: Vec<Vec<Rat>>,
    ) -> Result<Self, LatticeError> {
        let rank = gram.rows;
        let l = GramLattice {
            rank,
            gram,
            basis_labels,
            ample,
            glue_gens,
        };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        let g = &self.gram;
        if g.rows != g.cols {
            return Err(LatticeError::NotSymmetric);
        }
        for i in 0..g.rows {
            for j in 0..i {
                if g[(i, j)] != g[(j, i)] {
                    return Err(LatticeError::NotSymmetric);
                }
            }
        }
        let plus = positive_eigenvalue_count(g)?;
        if plus != 1 {
            return Err(LatticeError::WrongSignature { plus });
        }
        if self.ample.len() != self.rank {
            return Err(LatticeError::DimensionMismatch {
                expected: self.rank,
                got: self.ample.len(),
            });
        }
        if !gram_eval(self, &self.ample, &self.ample)?.is_positive() {
            return Err(LatticeError::AmpleNotPositive);
        }
        for (index, w) in self.glue_gens.iter().enumerate() {
            if w.len() != self.rank {
                return Err(LatticeError::DimensionMismatch {
                    expected: self.rank,
                    got: w.len(),
                });
            }
            // dual-lattice condition: q(w, e_i) integral for every basis vector
            for i in 0..self.rank {
                let mut pairing = Rat::zero();
                for j in 0..self.rank {
                    pairing += Rat::from(self.gram[(i, j)].clone()) * &w[j];
                }
                if !pairing.denom().is_one() {
                    return Err(LatticeError::GlueNotDual { index });
                }
            }
        }
        Ok(())
    }

    pub fn det(&self) -> Int {
        self.gram.det()
    }

    /// q(v, w) for a rational right-hand side.
    pub fn pair_rat(&self, v: &[Rat], w: &[Rat]) -> Rat {
        assert_eq!(v.len(), self.rank);
        assert_eq!(w.len(), self.rank);
        let mut acc = Rat::zero();
        for i in 0..self.rank {
            for j in 0..self.rank {
                acc += &v[i] * Rat::from(self.gram[(i, j)].clone()) * &w[j];
            }
        }
        acc
    }

    /// q(v, w) with an integer left side and rational right side.
    pub fn pair_int_rat(&self, v: &[Int], w: &[Rat]) -> Rat {
        let vr = matrix::ivec_to_rvec(v);
        self.pair_rat(&vr, w)
    }
}

/// Exact count of positive eigenvalues of a symmetric integer matrix via
/// Descartes' rule on the characteristic polynomial (all roots are real).
pub fn positive_eigenvalue_count(g: &IMat) -> Result<usize, LatticeError> {
    let coeffs = g.char_poly();
    if coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
        return Err(LatticeError::Degenerate);
    }
    let mut variations = 0;
    let mut last_sign = 0i8;
    for c in &coeffs {
        let s = if c.is_positive() {
            1
        } else if c.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last_sign != 0 && s != last_sign {
                variations += 1;
            }
            last_sign = s;
        }
    }
    Ok(variations)
}

/// The intersection form on A(X) with the distinguished square-3 class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionLattice {
    pub gram: IMat,
    pub eta_index: usize,
    pub basis_labels: Vec<String>,
}

impl IntersectionLattice {
    pub fn new(
        gram: IMat,
        eta_index: usize,
        basis_labels: Vec<String>,
    ) -> Result<Self, LatticeError> {
        if gram.rows != gram.cols {
            return Err(LatticeError::NotSymmetric);
        }
        for i in 0..gram.rows {
            for j in 0..i {
                if gram[(i, j)] != gram[(j, i)] {
                    return Err(LatticeError::NotSymmetric);
                }
            }
        }
        if gram[(eta_index, eta_index)] != Int::from(3) {
            return Err(LatticeError::BadEta);
        }
        Ok(IntersectionLattice {
            gram,
            eta_index,
            basis_labels,
        })
    }

    pub fn pair(&self, v: &[Int], w: &[Int]) -> Int {
        let gv = self.gram.mul_vec(w);
        v.iter().zip(&gv).map(|(a, b)| a * b).sum()
    }
}

/// vᵀ · gram · w.
pub fn gram_eval(l: &GramLattice, v: &[Int], w: &[Int]) -> Result<Int, LatticeError> {
    if v.len() != l.rank {
        return Err(LatticeError::DimensionMismatch {
            expected: l.rank,
            got: v.len(),
        });
    }
    if w.len() != l.rank {
        return Err(LatticeError::DimensionMismatch {
            expected: l.rank,
            got: w.len(),
        });
    }
    let gw = l.gram.mul_vec(w);
    Ok(v.iter().zip(&gw).map(|(a, b)| a * b).sum())
}

/// Translate the intersection form on A(X) to the BBF form on NS(F):
/// the polarization keeps square 6 and the classes T_i - eta flip sign.
///
/// Output basis is (g, l_1, ..., l_k) where l_i corresponds to the i-th
/// non-eta basis class; no glue data is attached.
pub fn abel_jacobi(a: &IntersectionLattice) -> Result<GramLattice, LatticeError> {
    let n = a.gram.rows;
    let eta = a.eta_index;
    let mut basis: Vec<IVec> = Vec::new();
    // eta itself maps to g with q(g,g) = -(eta.eta) + ... handled separately:
    // q(alpha(x), alpha(y)) = -x.y on primitive classes; g^2 = 6 is imposed.
    let mut labels = vec!["g".to_string()];
    for i in 0..n {
        if i == eta {
            continue;
        }
        let mut v = vec![Int::zero(); n];
        v[i] = Int::one();
        v[eta] = -Int::one();
        basis.push(v);
        labels.push(format!("l{}", labels.len()));
    }
    let rank = 1 + basis.len();
    let mut gram = IMat::zero(rank, rank);
    gram[(0, 0)] = Int::from(6);
    for (i, vi) in basis.iter().enumerate() {
        // q(g, lambda_i) = -eta.(T_i - eta) = -(3 - 3) = 0 for scroll classes;
        // computed exactly from the table rather than assumed.
        let mut eta_vec = vec![Int::zero(); n];
        eta_vec[eta] = Int::one();
        gram[(0, i + 1)] = -a.pair(&eta_vec, vi);
        gram[(i + 1, 0)] = gram[(0, i + 1)].clone();
        for (j, vj) in basis.iter().enumerate() {
            gram[(i + 1, j + 1)] = -a.pair(vi, vj);
        }
    }
    let mut ample = vec![Int::zero(); rank];
    ample[0] = Int::one();
    GramLattice::new(gram, labels, ample, Vec::new())
}

/// Smith normal form: returns (d, u, v) with u*m*v = diag(d), u and v
/// unimodular and d_i | d_{i+1}.
///
/// Pivot rule: smallest nonzero absolute value, row-major tie break, so the
/// transforms are reproducible run to run.
pub fn smith_normal_form(m: &IMat) -> (Vec<Int>, IMat, IMat) {
    let rows = m.rows;
    let cols = m.cols;
    let mut a = m.clone();
    let mut u = IMat::identity(rows);
    let mut v = IMat::identity(cols);

    fn swap_rows(a: &mut IMat, u: &mut IMat, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..a.cols {
            let tmp = a[(i, c)].clone();
            a[(i, c)] = a[(j, c)].clone();
            a[(j, c)] = tmp;
        }
        for c in 0..u.cols {
            let tmp = u[(i, c)].clone();
            u[(i, c)] = u[(j, c)].clone();
            u[(j, c)] = tmp;
        }
    }
    fn swap_cols(a: &mut IMat, v: &mut IMat, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..a.rows {
            let tmp = a[(r, i)].clone();
            a[(r, i)] = a[(r, j)].clone();
            a[(r, j)] = tmp;
        }
        for r in 0..v.rows {
            let tmp = v[(r, i)].clone();
            v[(r, i)] = v[(r, j)].clone();
            v[(r, j)] = tmp;
        }
    }
    // row_i -= q * row_j  (and mirror into u)
    fn row_op(a: &mut IMat, u: &mut IMat, i: usize, j: usize, q: &Int) {
        for c in 0..a.cols {
            let t = q * &a[(j, c)];
            a[(i, c)] -= t;
        }
        for c in 0..u.cols {
            let t = q * &u[(j, c)];
            u[(i, c)] -= t;
        }
    }
    fn col_op(a: &mut IMat, v: &mut IMat, i: usize, j: usize, q: &Int) {
        for r in 0..a.rows {
            let t = q * &a[(r, j)];
            a[(r, i)] -= t;
        }
        for r in 0..v.rows {
            let t = q * &v[(r, j)];
            v[(r, i)] -= t;
        }
    }

    let n = rows.min(cols);
    for t in 0..n {
        loop {
            // deterministic pivot: smallest |entry| != 0, row-major ties
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[(i, j)].is_zero() {
                        continue;
                    }
                    match pivot {
                        None => pivot = Some((i, j)),
                        Some((pi, pj)) => {
                            if a[(i, j)].abs() < a[(pi, pj)].abs() {
                                pivot = Some((i, j));
                            }
                        }
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                // rest of the matrix is zero
                break;
            };
            swap_rows(&mut a, &mut u, t, pi);
            swap_cols(&mut a, &mut v, t, pj);
            let mut clean = true;
            for i in (t + 1)..rows {
                if !a[(i, t)].is_zero() {
                    let q = a[(i, t)].div_floor(&a[(t, t)]);
                    row_op(&mut a, &mut u, i, t, &q);
                    if !a[(i, t)].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in (t + 1)..cols {
                if !a[(t, j)].is_zero() {
                    let q = a[(t, j)].div_floor(&a[(t, t)]);
                    col_op(&mut a, &mut v, j, t, &q);
                    if !a[(t, j)].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // ensure divisibility of the remaining block by the pivot
            let mut divisible = true;
            'check: for i in (t + 1)..rows {
                for j in (t + 1)..cols {
                    if !(&a[(i, j)] % &a[(t, t)]).is_zero() {
                        // fold row i into row t to force a smaller pivot
                        let minus_one = -Int::one();
                        row_op(&mut a, &mut u, t, i, &minus_one);
                        divisible = false;
                        break 'check;
                    }
                }
            }
            if divisible {
                break;
            }
        }
    }
    // normalize signs of the diagonal
    for t in 0..n {
        if a[(t, t)].is_negative() {
            for c in 0..cols {
                let x = -a[(t, c)].clone();
                a[(t, c)] = x;
            }
            for c in 0..u.cols {
                let x = -u[(t, c)].clone();
                u[(t, c)] = x;
            }
        }
    }
    let d = (0..n).map(|t| a[(t, t)].clone()).collect();
    (d, u, v)
}

/// Saturated integer kernel of a matrix, via the SNF of the transpose setup:
/// columns of the result form a basis of { x : m x = 0 }.
pub fn kernel_basis(m: &IMat) -> Vec<IVec> {
    let (d, _u, v) = smith_normal_form(m);
    let mut kernel = Vec::new();
    for j in 0..m.cols {
        let dj_zero = j >= d.len() || d[j].is_zero();
        if dj_zero {
            kernel.push(v.col(j));
        }
    }
    kernel
}

/// Finite abelian group L*/L presented by invariant factors with rational
/// generator lifts in L ⊗ Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantGroup {
    /// Invariant factors > 1, each dividing the next.
    pub invariant_factors: Vec<Int>,
    pub generator_lifts: Vec<Vec<Rat>>,
    /// q(w, w) mod 2Z for each generator lift, reduced to [0, 2).
    pub q_values: Vec<Rat>,
}

impl DiscriminantGroup {
    pub fn order(&self) -> Int {
        self.invariant_factors.iter().product()
    }
}

pub fn discriminant_group(l: &GramLattice) -> Result<DiscriminantGroup, LatticeError> {
    let det = l.gram.det();
    if det.is_zero() {
        return Err(LatticeError::Degenerate);
    }
    // L*/L where L* has coordinate lattice Z^n in the dual basis and L sits
    // inside with coordinate matrix G. SNF(G) = U G V reads off the quotient.
    let (d, u, _v) = smith_normal_form(&l.gram);
    let uinv = u
        .unimodular_inverse()
        .expect("SNF row transform is unimodular");
    let adj = l.gram.adjugate();
    let det_rat = Rat::from(det);
    let mut invariant_factors = Vec::new();
    let mut generator_lifts = Vec::new();
    let mut q_values = Vec::new();
    for (i, di) in d.iter().enumerate() {
        if di.is_one() {
            continue;
        }
        invariant_factors.push(di.clone());
        // generator of factor i in dual coordinates is column i of U^{-1};
        // convert to lattice coordinates via G^{-1} = adj / det.
        let dual_coords = uinv.col(i);
        let lift: Vec<Rat> = (0..l.rank)
            .map(|r| {
                let num: Int = (0..l.rank).map(|c| &adj[(r, c)] * &dual_coords[c]).sum();
                Rat::from(num) / det_rat.clone()
            })
            .collect();
        let q = l.pair_rat(&lift, &lift);
        q_values.push(rat_mod(&q, 2));
        generator_lifts.push(lift);
    }
    Ok(DiscriminantGroup {
        invariant_factors,
        generator_lifts,
        q_values,
    })
}

/// Reduce a rational into [0, modulus).
pub fn rat_mod(x: &Rat, modulus: i64) -> Rat {
    let m = Rat::from(Int::from(modulus));
    let q = (x / &m).floor();
    x - q * m
}

/// Multiset of prime-power cyclic factors; two presentations of a finite
/// abelian group agree iff these multisets agree.
pub fn primary_decomposition(factors: &[Int]) -> Vec<(Int, u32)> {
    let mut out = Vec::new();
    for f in factors {
        let mut n = f.abs();
        let mut p = Int::from(2);
        while &p * &p <= n {
            let mut e = 0u32;
            while (&n % &p).is_zero() {
                n /= &p;
                e += 1;
            }
            if e > 0 {
                out.push((p.clone(), e));
            }
            p += 1;
        }
        if n > Int::one() {
            out.push((n, 1));
        }
    }
    out.sort();
    out
}

pub fn groups_isomorphic(a: &[Int], b: &[Int]) -> bool {
    primary_decomposition(a) == primary_decomposition(b)
}

/// Order of [w] in the discriminant group: smallest k >= 1 with k·w integral.
pub fn residue_order(w: &[Rat]) -> Int {
    let mut l = Int::one();
    for x in w {
        l = l.lcm(x.denom());
    }
    l
}

/// True iff v - w lies in the lattice (all coordinates integral).
fn same_residue(v: &[Rat], w: &[Rat]) -> bool {
    v.iter().zip(w).all(|(a, b)| (a - b).denom().is_one())
}

/// Matrix of the action induced by an isometry on the subgroup of the
/// discriminant group generated by the given rational vectors.
///
/// Entry (i, j) is the coefficient of generator i in the image of generator
/// j, reduced modulo the order of generator i. Errors if some image is not a
/// combination of the generators.
pub fn disc_action(
    l: &GramLattice,
    phi: &IMat,
    subgroup_gens: &[Vec<Rat>],
) -> Result<(Vec<Vec<Int>>, Vec<Int>), LatticeError> {
    let orders: Vec<Int> = subgroup_gens.iter().map(|w| residue_order(w)).collect();
    let k = subgroup_gens.len();
    let mut action = vec![vec![Int::zero(); k]; k];
    for (j, w) in subgroup_gens.iter().enumerate() {
        let image = phi.mul_rvec(w);
        // solve image = sum_i c_i gen_i  (mod L) by exhausting coefficients
        let mut found = false;
        let mut coeffs = vec![Int::zero(); k];
        'outer: loop {
            let mut candidate = vec![Rat::zero(); l.rank];
            for (i, c) in coeffs.iter().enumerate() {
                for r in 0..l.rank {
                    let term = Rat::from(c.clone()) * &subgroup_gens[i][r];
                    candidate[r] += term;
                }
            }
            if same_residue(&candidate, &image) {
                found = true;
                break;
            }
            // odometer increment over (Z/ord_0) x ... x (Z/ord_{k-1})
            let mut pos = 0;
            loop {
                if pos == k {
                    break 'outer;
                }
                coeffs[pos] += 1;
                if coeffs[pos] < orders[pos] {
                    break;
                }
                coeffs[pos] = Int::zero();
                pos += 1;
            }
        }
        if !found {
            return Err(LatticeError::SubgroupNotPreserved);
        }
        for i in 0..k {
            action[i][j] = coeffs[i].clone();
        }
    }
    Ok((action, orders))
}

/// Does the induced action equal +Id or -Id on the subgroup (entrywise mod
/// the per-factor orders)?
pub fn disc_action_is_pm_identity(action: &[Vec<Int>], orders: &[Int]) -> bool {
    for sign in [1i64, -1] {
        let mut ok = true;
        'rows: for (i, row) in action.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                let want = if i == j { Int::from(sign) } else { Int::zero() };
                if !((entry - want).mod_floor(&orders[i])).is_zero() {
                    ok = false;
                    break 'rows;
                }
            }
        }
        if ok {
            return true;
        }
    }
    false
}

/// Divisibility of v in the full second cohomology: gcd of the pairings with
/// the lattice basis and with the configured glue generators (the glue
/// classes are the NS-components of the overlattice generators, and only the
/// NS-component pairs nontrivially with v).
pub fn divisibility_full(l: &GramLattice, v: &[Int]) -> Result<Int, LatticeError> {
    if v.len() != l.rank {
        return Err(LatticeError::DimensionMismatch {
            expected: l.rank,
            got: v.len(),
        });
    }
    if matrix::vec_is_zero(v) {
        return Err(LatticeError::ZeroVector);
    }
    let mut g = Int::zero();
    let gv = l.gram.mul_vec(v);
    for x in &gv {
        g = g.gcd(x);
    }
    for w in &l.glue_gens {
        let p = l.pair_int_rat(v, w);
        assert!(p.denom().is_one(), "glue generator not in dual lattice");
        g = g.gcd(p.numer());
    }
    Ok(g)
}
