//! Finite-field verification of the explicit examples: scroll ideals from
//! 2x3 minors, exhaustive projective point scans, containment and
//! transversality checks, and rational singular-point sweeps.
//!
//! Coefficient arithmetic is u64 modulo a prime (default 29); a full scan of
//! P^5(F_29) iterates (29^6 - 1)/28 = 21,243,690 canonical points, so the
//! hot loop avoids allocation and exits on the first nonvanishing polynomial.

use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FqError {
    #[error("polynomial parse error: {0}")]
    Parse(String),
    #[error("inputs must be homogeneous")]
    NotHomogeneous,
    #[error("scroll matrix entries must be homogeneous linear forms")]
    NotLinear,
    #[error("matrix does not define a scroll (all minors vanish)")]
    NotScroll,
    #[error("point does not lie on the variety")]
    PointNotOnVariety,
    #[error("variable count mismatch")]
    VariableMismatch,
    #[error("prime must be an odd prime < 2^16, got {0}")]
    BadPrime(u64),
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Sparse multivariate polynomial over F_p. Terms are kept sorted by
/// exponent tuple with nonzero coefficients in [1, p-1].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    pub p: u64,
    pub nvars: usize,
    pub terms: Vec<(Vec<u8>, u64)>,
}

impl FpPoly {
    pub fn zero(p: u64, nvars: usize) -> Self {
        FpPoly {
            p,
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(p: u64, nvars: usize, raw: Vec<(Vec<u8>, u64)>) -> Result<Self, FqError> {
        if !is_prime(p) || p > u16::MAX as u64 || p == 2 {
            return Err(FqError::BadPrime(p));
        }
        let mut map: std::collections::BTreeMap<Vec<u8>, u64> = std::collections::BTreeMap::new();
        for (exps, c) in raw {
            if exps.len() != nvars {
                return Err(FqError::VariableMismatch);
            }
            let e = map.entry(exps).or_insert(0);
            *e = (*e + c % p) % p;
        }
        let terms = map.into_iter().filter(|(_, c)| *c != 0).collect();
        Ok(FpPoly { p, nvars, terms })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().map(|&x| x as u32).sum())
            .max()
    }

    /// Some(d) iff nonzero and every term has total degree d.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut deg = None;
        for (e, _) in &self.terms {
            let d: u32 = e.iter().map(|&x| x as u32).sum();
            match deg {
                None => deg = Some(d),
                Some(dd) if dd != d => return None,
                _ => {}
            }
        }
        deg
    }

    pub fn eval(&self, point: &[u64]) -> u64 {
        let p = self.p;
        let mut acc = 0u64;
        for (exps, coeff) in &self.terms {
            let mut term = *coeff;
            for (i, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    term = term * point[i] % p;
                }
            }
            acc = (acc + term) % p;
        }
        acc
    }

    pub fn mul(&self, other: &FpPoly) -> FpPoly {
        assert_eq!(self.p, other.p);
        assert_eq!(self.nvars, other.nvars);
        let mut raw = Vec::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u8> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                raw.push((exps, ca * cb % self.p));
            }
        }
        FpPoly::from_terms(self.p, self.nvars, raw).expect("closed under multiplication")
    }

    pub fn sub(&self, other: &FpPoly) -> FpPoly {
        assert_eq!(self.p, other.p);
        let mut raw = self.terms.clone();
        for (e, c) in &other.terms {
            raw.push((e.clone(), (self.p - c) % self.p));
        }
        FpPoly::from_terms(self.p, self.nvars, raw).expect("closed under subtraction")
    }

    pub fn scale(&self, k: u64) -> FpPoly {
        let raw = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c * (k % self.p) % self.p))
            .collect();
        FpPoly::from_terms(self.p, self.nvars, raw).expect("closed under scaling")
    }

    /// Scale so the leading (first stored) term has coefficient 1.
    pub fn monic(&self) -> FpPoly {
        match self.terms.first() {
            None => self.clone(),
            Some((_, c)) => self.scale(mod_inverse(*c, self.p)),
        }
    }

    pub fn partial_derivative(&self, var: usize) -> FpPoly {
        let mut raw = Vec::new();
        for (exps, c) in &self.terms {
            let e = exps[var];
            if e == 0 {
                continue;
            }
            let mut ne = exps.clone();
            ne[var] = e - 1;
            raw.push((ne, c * (e as u64) % self.p));
        }
        FpPoly::from_terms(self.p, self.nvars, raw).expect("closed under derivation")
    }

    /// Parse expressions like `17*x0*x1*x2 + 19*x1^2*x2 - x5`.
    pub fn parse(src: &str, p: u64, nvars: usize) -> Result<Self, FqError> {
        if !is_prime(p) || p > u16::MAX as u64 || p == 2 {
            return Err(FqError::BadPrime(p));
        }
        let compact: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Ok(FpPoly::zero(p, nvars));
        }
        let mut raw: Vec<(Vec<u8>, u64)> = Vec::new();
        let mut term = String::new();
        let mut sign = 1i64;
        let mut chars = compact.chars().peekable();
        let flush =
            |term: &mut String, sign: i64, raw: &mut Vec<(Vec<u8>, u64)>| -> Result<(), FqError> {
                if term.is_empty() {
                    return Err(FqError::Parse("empty term".into()));
                }
                let (exps, coeff) = parse_term(term, p, nvars)?;
                let c = if sign >= 0 { coeff } else { (p - coeff) % p };
                raw.push((exps, c));
                term.clear();
                Ok(())
            };
        // leading sign
        if let Some(&c) = chars.peek() {
            if c == '+' || c == '-' {
                sign = if c == '-' { -1 } else { 1 };
                chars.next();
            }
        }
        for c in chars {
            if c == '+' || c == '-' {
                flush(&mut term, sign, &mut raw)?;
                sign = if c == '-' { -1 } else { 1 };
            } else {
                term.push(c);
            }
        }
        flush(&mut term, sign, &mut raw)?;
        FpPoly::from_terms(p, nvars, raw)
    }
}

fn parse_term(term: &str, p: u64, nvars: usize) -> Result<(Vec<u8>, u64), FqError> {
    let mut coeff = 1u64;
    let mut exps = vec![0u8; nvars];
    for factor in term.split('*') {
        if factor.is_empty() {
            return Err(FqError::Parse(format!("empty factor in {term:?}")));
        }
        if let Some(rest) = factor.strip_prefix('x') {
            let (var, exp) = match rest.split_once('^') {
                Some((v, e)) => (
                    v.parse::<usize>()
                        .map_err(|_| FqError::Parse(format!("bad variable {factor:?}")))?,
                    e.parse::<u8>()
                        .map_err(|_| FqError::Parse(format!("bad exponent {factor:?}")))?,
                ),
                None => (
                    rest.parse::<usize>()
                        .map_err(|_| FqError::Parse(format!("bad variable {factor:?}")))?,
                    1,
                ),
            };
            if var >= nvars {
                return Err(FqError::Parse(format!("variable x{var} out of range")));
            }
            exps[var] = exps[var]
                .checked_add(exp)
                .ok_or_else(|| FqError::Parse(format!("exponent overflow in {term:?}")))?;
        } else {
            let n = factor
                .parse::<u64>()
                .map_err(|_| FqError::Parse(format!("bad coefficient {factor:?}")))?;
            coeff = coeff * (n % p) % p;
        }
    }
    Ok((exps, coeff))
}

pub fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut parts = Vec::new();
            if *c != 1 || exps.iter().all(|&e| e == 0) {
                parts.push(c.to_string());
            }
            for (i, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(format!("x{i}")),
                    _ => parts.push(format!("x{i}^{e}")),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// Projective point over F_p in canonical form: the first nonzero coordinate
/// equals 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FpProjPoint {
    pub coords: Vec<u64>,
}

impl FpProjPoint {
    pub fn new(coords: Vec<u64>, p: u64) -> Option<Self> {
        let lead = coords.iter().position(|&c| c % p != 0)?;
        let inv = mod_inverse(coords[lead] % p, p);
        Some(FpProjPoint {
            coords: coords.iter().map(|&c| c % p * inv % p).collect(),
        })
    }
}

impl fmt::Display for FpProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", inner.join(":"))
    }
}

/// 2x3 matrix of homogeneous linear forms whose 2x2 minors cut out a cubic
/// scroll surface.
#[derive(Clone, Debug)]
pub struct ScrollSpec {
    pub rows: [[FpPoly; 3]; 2],
}

impl ScrollSpec {
    pub fn new(rows: [[FpPoly; 3]; 2]) -> Result<Self, FqError> {
        for row in &rows {
            for entry in row {
                if entry.is_zero() || entry.homogeneous_degree() != Some(1) {
                    return Err(FqError::NotLinear);
                }
            }
        }
        Ok(ScrollSpec { rows })
    }
}

/// The three 2x2 minors (columns 01, 02, 12), each a homogeneous quadric.
pub fn minors_ideal(spec: &ScrollSpec) -> Result<[FpPoly; 3], FqError> {
    let r0 = &spec.rows[0];
    let r1 = &spec.rows[1];
    let minor = |a: usize, b: usize| r0[a].mul(&r1[b]).sub(&r0[b].mul(&r1[a]));
    let minors = [minor(0, 1), minor(0, 2), minor(1, 2)];
    if minors.iter().all(|m| m.is_zero()) {
        return Err(FqError::NotScroll);
    }
    Ok(minors)
}

/// A compiled evaluator: terms flattened to (coeff, packed variable list)
/// for the scan hot loop.
struct CompiledPoly {
    p: u64,
    terms: Vec<(u64, Vec<(usize, u8)>)>,
}

impl CompiledPoly {
    fn new(poly: &FpPoly) -> Self {
        let terms = poly
            .terms
            .iter()
            .map(|(exps, c)| {
                let vars: Vec<(usize, u8)> = exps
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e))
                    .collect();
                (*c, vars)
            })
            .collect();
        CompiledPoly { p: poly.p, terms }
    }

    #[inline]
    fn eval(&self, point: &[u64]) -> u64 {
        let p = self.p;
        let mut acc = 0u64;
        for (coeff, vars) in &self.terms {
            let mut t = *coeff;
            for &(i, e) in vars {
                let x = point[i];
                for _ in 0..e {
                    t = t * x % p;
                }
            }
            acc += t;
        }
        acc % p
    }
}

pub struct ScanResult {
    pub points: Vec<FpProjPoint>,
    /// Number of canonical representatives iterated; must equal
    /// (p^n - 1)/(p - 1).
    pub candidates: u64,
}

/// All canonical projective points where every polynomial vanishes, by
/// exhaustive iteration over the (p^n - 1)/(p - 1) canonical
/// representatives. Blocks of the scan run in parallel and are merged in
/// canonical order, so the output is identical to a serial scan.
pub fn projective_scan(polys: &[FpPoly], nvars: usize) -> Result<ScanResult, FqError> {
    let p = polys.first().map(|f| f.p).unwrap_or(29);
    for f in polys {
        if f.nvars != nvars {
            return Err(FqError::VariableMismatch);
        }
        if !f.is_zero() && f.homogeneous_degree().is_none() {
            return Err(FqError::NotHomogeneous);
        }
    }
    let compiled: Vec<CompiledPoly> = polys.iter().map(CompiledPoly::new).collect();
    // one task per (leading index, value of the first free coordinate)
    let mut tasks: Vec<(usize, Option<u64>)> = Vec::new();
    for lead in 0..nvars {
        if lead + 1 == nvars {
            tasks.push((lead, None));
        } else {
            for v in 0..p {
                tasks.push((lead, Some(v)));
            }
        }
    }
    let results: Vec<(Vec<FpProjPoint>, u64)> = tasks
        .par_iter()
        .map(|&(lead, first_free)| scan_block(&compiled, nvars, p, lead, first_free))
        .collect();
    let mut points = Vec::new();
    let mut candidates = 0u64;
    for (mut pts, c) in results {
        points.append(&mut pts);
        candidates += c;
    }
    Ok(ScanResult { points, candidates })
}

fn scan_block(
    compiled: &[CompiledPoly],
    nvars: usize,
    p: u64,
    lead: usize,
    first_free: Option<u64>,
) -> (Vec<FpProjPoint>, u64) {
    let mut point = vec![0u64; nvars];
    point[lead] = 1;
    let free_start = match first_free {
        Some(v) => {
            point[lead + 1] = v;
            lead + 2
        }
        None => lead + 1,
    };
    let free: Vec<usize> = (free_start..nvars).collect();
    let mut hits = Vec::new();
    let mut candidates = 0u64;
    loop {
        candidates += 1;
        let mut vanish = true;
        for c in compiled {
            if c.eval(&point) != 0 {
                vanish = false;
                break;
            }
        }
        if vanish {
            hits.push(FpProjPoint {
                coords: point.clone(),
            });
        }
        // odometer over the free coordinates
        let mut pos = free.len();
        loop {
            if pos == 0 {
                return (hits, candidates);
            }
            let idx = free[pos - 1];
            point[idx] += 1;
            if point[idx] < p {
                break;
            }
            point[idx] = 0;
            pos -= 1;
        }
    }
}

/// True iff the hypersurface vanishes at every scan point of the surface
/// system; also returns the surface point count.
pub fn verify_containment(
    surface: &[FpPoly],
    hypersurface: &FpPoly,
    nvars: usize,
) -> Result<(bool, usize), FqError> {
    let scan = projective_scan(surface, nvars)?;
    let contained = scan
        .points
        .iter()
        .all(|pt| hypersurface.eval(&pt.coords) == 0);
    Ok((contained, scan.points.len()))
}

/// Common zero locus of two polynomial systems.
pub fn intersection_points(
    a: &[FpPoly],
    b: &[FpPoly],
    nvars: usize,
) -> Result<Vec<FpProjPoint>, FqError> {
    let mut system: Vec<FpPoly> = a.to_vec();
    system.extend(b.iter().cloned());
    Ok(projective_scan(&system, nvars)?.points)
}

/// Rank over F_p of the Jacobian matrix of the system at a point on the
/// variety.
pub fn jacobian_rank_at(polys: &[FpPoly], point: &FpProjPoint) -> Result<usize, FqError> {
    let p = polys.first().map(|f| f.p).unwrap_or(29);
    for f in polys {
        if f.eval(&point.coords) != 0 {
            return Err(FqError::PointNotOnVariety);
        }
    }
    let nvars = point.coords.len();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for f in polys {
        let row: Vec<u64> = (0..nvars)
            .map(|v| f.partial_derivative(v).eval(&point.coords))
            .collect();
        rows.push(row);
    }
    Ok(rank_mod_p(rows, p))
}

fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let nrows = rows.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = rows[0].len();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..ncols {
        let Some(pivot) = (row..nrows).find(|&r| rows[r][col] % p != 0) else {
            continue;
        };
        rows.swap(row, pivot);
        let inv = mod_inverse(rows[row][col] % p, p);
        for c in col..ncols {
            rows[row][c] = rows[row][c] % p * inv % p;
        }
        for r in 0..nrows {
            if r != row && rows[r][col] % p != 0 {
                let factor = rows[r][col] % p;
                for c in col..ncols {
                    let sub = factor * rows[row][c] % p;
                    rows[r][c] = (rows[r][c] % p + p - sub) % p;
                }
            }
        }
        rank += 1;
        row += 1;
        if row == nrows {
            break;
        }
    }
    rank
}

/// All rational points where the system vanishes and the Jacobian rank drops
/// below the expected codimension.
pub fn singular_point_scan(
    system: &[FpPoly],
    nvars: usize,
    expected_codim: usize,
) -> Result<Vec<FpProjPoint>, FqError> {
    let scan = projective_scan(system, nvars)?;
    let mut singular = Vec::new();
    for pt in scan.points {
        if jacobian_rank_at(system, &pt)? < expected_codim {
            singular.push(pt);
        }
    }
    Ok(singular)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xvar(p: u64, nvars: usize, i: usize) -> FpPoly {
        let mut exps = vec![0u8; nvars];
        exps[i] = 1;
        FpPoly::from_terms(p, nvars, vec![(exps, 1)]).unwrap()
    }

    #[test]
    fn parse_and_display() {
        let f = FpPoly::parse("17*x0*x1*x2 + 19*x1^2*x2 - x5", 29, 6).unwrap();
        assert_eq!(f.terms.len(), 3);
        assert_eq!(f.homogeneous_degree(), None); // mixed degrees 3 and 1
        let g = FpPoly::parse("x0*x3 - x1*x2", 29, 6).unwrap();
        assert_eq!(g.homogeneous_degree(), Some(2));
        // -1 coefficient wraps mod p
        let h = FpPoly::parse("-x0", 29, 6).unwrap();
        assert_eq!(h.eval(&[1, 0, 0, 0, 0, 0]), 28);
        assert!(FpPoly::parse("3*y0", 29, 6).is_err());
    }

    #[test]
    fn minors_of_standard_scroll() {
        let p = 29;
        let n = 6;
        let x = |i| xvar(p, n, i);
        let spec = ScrollSpec::new([[x(0), x(1), x(2)], [x(2), x(3), x(4)]]).unwrap();
        let minors = minors_ideal(&spec).unwrap();
        let want = [
            FpPoly::parse("x0*x3 - x1*x2", p, n).unwrap(),
            FpPoly::parse("x0*x4 - x2^2", p, n).unwrap(),
            FpPoly::parse("x1*x4 - x2*x3", p, n).unwrap(),
        ];
        assert_eq!(minors, want);
    }

    #[test]
    fn zero_matrix_is_rejected() {
        let p = 29;
        let n = 6;
        let x = |i| xvar(p, n, i);
        // rows proportional: all minors vanish
        let spec = ScrollSpec::new([[x(0), x(1), x(2)], [x(0), x(1), x(2)]]).unwrap();
        assert_eq!(minors_ideal(&spec), Err(FqError::NotScroll));
        // non-linear entries rejected at construction
        let quad = FpPoly::parse("x0^2", p, n).unwrap();
        assert!(ScrollSpec::new([[quad.clone(), x(1), x(2)], [x(2), x(3), x(4)],]).is_err());
    }

    #[test]
    fn minors_stable_under_row_scaling() {
        let p = 29;
        let n = 6;
        let x = |i| xvar(p, n, i);
        let spec = ScrollSpec::new([[x(0), x(1), x(2)], [x(2), x(3), x(4)]]).unwrap();
        let scaled = ScrollSpec::new([
            [x(0).scale(7), x(1).scale(7), x(2).scale(7)],
            [x(2), x(3), x(4)],
        ])
        .unwrap();
        let a = minors_ideal(&spec).unwrap();
        let b = minors_ideal(&scaled).unwrap();
        for (f, g) in a.iter().zip(&b) {
            assert_eq!(f.monic(), g.monic());
        }
    }

    #[test]
    fn tiny_projective_scans() {
        // {x0} in P^1: one point (0:1)
        let f = FpPoly::parse("x0", 29, 2).unwrap();
        let scan = projective_scan(&[f], 2).unwrap();
        assert_eq!(scan.candidates, 30); // (29^2-1)/28
        assert_eq!(scan.points.len(), 1);
        assert_eq!(scan.points[0].coords, vec![0, 1]);
        // empty system: all of P^1
        let scan = projective_scan(&[], 2).unwrap();
        assert_eq!(scan.points.len(), 30);
    }

    #[test]
    fn scan_over_smaller_prime() {
        // conic x0*x2 - x1^2 in P^2(F_7): a smooth conic has p+1 points
        let f = FpPoly::parse("x0*x2 - x1^2", 7, 3).unwrap();
        let scan = projective_scan(&[f], 3).unwrap();
        assert_eq!(scan.candidates, 57); // (7^3-1)/6
        assert_eq!(scan.points.len(), 8);
    }

    #[test]
    fn jacobian_and_singular_scan() {
        // nodal cubic x1^2*x2 - x0^2*(x0 + x2): singular at (0:0:1)
        let f = FpPoly::parse("x1^2*x2 - x0^3 - x0^2*x2", 29, 3).unwrap();
        let sing = singular_point_scan(&[f.clone()], 3, 1).unwrap();
        assert_eq!(sing.len(), 1);
        assert_eq!(sing[0].coords, vec![0, 0, 1]);
        // (0:1:0) is a smooth point: rank 1
        let pt = FpProjPoint::new(vec![0, 1, 0], 29).unwrap();
        assert_eq!(f.eval(&pt.coords), 0);
        assert_eq!(jacobian_rank_at(&[f.clone()], &pt).unwrap(), 1);
        let off = FpProjPoint::new(vec![1, 1, 28], 29).unwrap();
        assert_ne!(f.eval(&off.coords), 0);
        assert_eq!(
            jacobian_rank_at(&[f], &off),
            Err(FqError::PointNotOnVariety)
        );
    }

    #[test]
    fn derivative_rules() {
        let f = FpPoly::parse("x0^3 + 5*x0*x1", 29, 2).unwrap();
        let d0 = f.partial_derivative(0);
        assert_eq!(d0, FpPoly::parse("3*x0^2 + 5*x1", 29, 2).unwrap());
        let d1 = f.partial_derivative(1);
        assert_eq!(d1, FpPoly::parse("5*x0", 29, 2).unwrap());
    }
}
