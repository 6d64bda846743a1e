//! Small exact integer/rational matrix helpers.
//!
//! All census lattices have rank 2 or 3, so nothing here tries to be clever
//! about size; the point is exactness and determinism.

use num::{BigInt, BigRational, One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;
pub type IVec = Vec<Int>;
pub type RVec = Vec<Rat>;

/// Dense integer matrix, row major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Int>,
}

impl IMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IMat {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend(row.iter().map(|&x| Int::from(x)));
        }
        IMat {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_big_rows(rows: Vec<Vec<Int>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend(row);
        }
        IMat {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> IVec {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> IMat {
        let mut t = IMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IMat) -> IMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a * &other[(k, j)];
                    out[(i, j)] += v;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> IVec {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul_rvec(&self, v: &[Rat]) -> RVec {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, b)| Rat::from(a.clone()) * b)
                    .sum()
            })
            .collect()
    }

    pub fn neg(&self) -> IMat {
        IMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == IMat::identity(self.rows)
    }

    /// Determinant by cofactor expansion; fine for the ranks used here.
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols);
        match self.rows {
            0 => Int::one(),
            1 => self[(0, 0)].clone(),
            2 => &self[(0, 0)] * &self[(1, 1)] - &self[(0, 1)] * &self[(1, 0)],
            _ => {
                let mut acc = Int::zero();
                for j in 0..self.cols {
                    let m = self.minor(0, j).det();
                    let term = &self[(0, j)] * m;
                    if j % 2 == 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
                acc
            }
        }
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> IMat {
        let mut rows = Vec::new();
        for i in 0..self.rows {
            if i == skip_row {
                continue;
            }
            let mut row = Vec::new();
            for j in 0..self.cols {
                if j == skip_col {
                    continue;
                }
                row.push(self[(i, j)].clone());
            }
            rows.push(row);
        }
        IMat::from_big_rows(rows)
    }

    /// Adjugate matrix: `self * adjugate = det * I`.
    pub fn adjugate(&self) -> IMat {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 1 {
            return IMat::identity(1);
        }
        let mut adj = IMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(i, j).det();
                adj[(j, i)] = if (i + j) % 2 == 0 { c } else { -c };
            }
        }
        adj
    }

    /// Exact inverse of a matrix with determinant ±1.
    pub fn unimodular_inverse(&self) -> Option<IMat> {
        let d = self.det();
        if d.is_one() {
            Some(self.adjugate())
        } else if (-&d).is_one() {
            Some(self.adjugate().neg())
        } else {
            None
        }
    }

    /// Solve `self * x = rhs` over the rationals; `None` if singular.
    pub fn solve_rational(&self, rhs: &[Rat]) -> Option<RVec> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, rhs.len());
        let d = self.det();
        if d.is_zero() {
            return None;
        }
        let adj = self.adjugate();
        let d = Rat::from(d);
        Some(
            (0..self.rows)
                .map(|i| {
                    let num: Rat = adj
                        .row(i)
                        .iter()
                        .zip(rhs)
                        .map(|(a, b)| Rat::from(a.clone()) * b)
                        .sum();
                    num / d.clone()
                })
                .collect(),
        )
    }

    /// Coefficient sequence of det(xI - self), highest degree first.
    pub fn char_poly(&self) -> Vec<Int> {
        // Faddeev-LeVerrier: exact over the integers for integer matrices.
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut coeffs = vec![Int::one()];
        let mut m = IMat::zero(n, n);
        for k in 1..=n {
            // M_k = A * M_{k-1} + c_{k-1} I
            let mut am = self.mul(&m);
            for i in 0..n {
                am[(i, i)] += coeffs.last().unwrap().clone();
            }
            let prod = self.mul(&am);
            let tr: Int = (0..n).map(|i| prod[(i, i)].clone()).sum();
            // the division is exact for integer matrices
            let c = -tr / Int::from(k as i64);
            coeffs.push(c);
            m = am;
        }
        coeffs
    }
}

impl std::ops::Index<(usize, usize)> for IMat {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }
}

pub fn ivec(v: &[i64]) -> IVec {
    v.iter().map(|&x| Int::from(x)).collect()
}

pub fn rvec(v: &[(i64, i64)]) -> RVec {
    v.iter()
        .map(|&(n, d)| Rat::new(Int::from(n), Int::from(d)))
        .collect()
}

pub fn ivec_to_rvec(v: &[Int]) -> RVec {
    v.iter().map(|x| Rat::from(x.clone())).collect()
}

/// Divide out the gcd of the entries; the zero vector is returned unchanged.
pub fn primitive_part(v: &[Int]) -> IVec {
    let mut g = Int::zero();
    for x in v {
        g = num::Integer::gcd(&g, x);
    }
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Clear denominators of a rational vector and divide by the content.
pub fn primitive_from_rational(v: &[Rat]) -> IVec {
    let mut lcm = Int::one();
    for x in v {
        lcm = num::Integer::lcm(&lcm, x.denom());
    }
    let ints: IVec = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    primitive_part(&ints)
}

pub fn vec_is_zero(v: &[Int]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// Lexicographic sign normalization: flips the vector if its first nonzero
/// entry is negative.
pub fn lex_positive(v: &[Int]) -> IVec {
    for x in v {
        if x.is_positive() {
            return v.to_vec();
        }
        if x.is_negative() {
            return v.iter().map(|y| -y).collect();
        }
    }
    v.to_vec()
}

/// Integer square root (floor), exact.
pub fn isqrt(n: &Int) -> Int {
    assert!(!n.is_negative(), "isqrt of negative");
    if n.is_zero() {
        return Int::zero();
    }
    let mut x: Int = Int::one() << ((n.bits() + 1) / 2);
    loop {
        let y = (&x + n / &x) >> 1;
        if y >= x {
            return x;
        }
        x = y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_adjugate() {
        let m = IMat::from_rows(&[vec![2, 1, 0], vec![0, 3, 1], vec![1, 0, 1]]);
        let d = m.det();
        assert_eq!(d, Int::from(7));
        let prod = m.mul(&m.adjugate());
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { d.clone() } else { Int::zero() };
                assert_eq!(prod[(i, j)], want);
            }
        }
    }

    #[test]
    fn char_poly_diag() {
        let m = IMat::from_rows(&[vec![6, 0], vec![0, -4]]);
        // (x-6)(x+4) = x^2 - 2x - 24
        assert_eq!(m.char_poly(), ivec(&[1, -2, -24]));
    }

    #[test]
    fn isqrt_exact() {
        for n in 0..2000i64 {
            let r = isqrt(&Int::from(n));
            let r2 = &r * &r;
            assert!(r2 <= Int::from(n));
            let r1 = (&r + 1) * (&r + 1);
            assert!(r1 > Int::from(n));
        }
    }

    #[test]
    fn primitive_parts() {
        assert_eq!(primitive_part(&ivec(&[4, -6, 8])), ivec(&[2, -3, 4]));
        assert_eq!(
            primitive_from_rational(&rvec(&[(1, 2), (3, 4)])),
            ivec(&[2, 3])
        );
        assert_eq!(lex_positive(&ivec(&[0, -2, 4])), ivec(&[0, 2, -4]));
    }
}
